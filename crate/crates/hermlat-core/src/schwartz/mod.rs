//! Finite rational combinations of lattice indicators and their Fourier
//! transforms, with the two functions whose transforms the theory controls.

mod ddenv;
mod geometric;
mod support;

pub use ddenv::{dden_v_function, dden_v_function_with_threshold, local_constancy_check};
pub use geometric::int_vlambda_function;
pub use support::{coset_witness, support_outside_vint, support_outside_vint_along};

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::efield::Elem;
use crate::error::{Error, Result};
use crate::hermlat::{HermLattice, LatticeJson};
use crate::rational::{fmt_q, p_pow, parse_q, Q};

/// Σ coef·1_L over distinct lattices; zero coefficients never stored.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LatticeFunction {
    terms: BTreeMap<HermLattice, Q>,
}

#[derive(Serialize, Deserialize)]
struct TermJson {
    coef: String,
    lattice: LatticeJson,
}

#[derive(Serialize, Deserialize)]
struct FunctionJson {
    terms: Vec<TermJson>,
}

impl LatticeFunction {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn indicator(l: &HermLattice) -> Self {
        Self::from_terms([(Q::from_integer(1.into()), l.clone())])
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (Q, HermLattice)>) -> Self {
        let mut f = Self::zero();
        for (c, l) in terms {
            f.add_term(c, l);
        }
        f
    }

    pub fn add_term(&mut self, c: Q, l: HermLattice) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(l) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&HermLattice, &Q)> {
        self.terms.iter()
    }

    pub fn add(&self, other: &LatticeFunction) -> LatticeFunction {
        let mut out = self.clone();
        for (l, c) in &other.terms {
            out.add_term(c.clone(), l.clone());
        }
        out
    }

    pub fn scale(&self, s: &Q) -> LatticeFunction {
        Self::from_terms(self.terms.iter().map(|(l, c)| (c * s, l.clone())))
    }

    pub fn sub(&self, other: &LatticeFunction) -> LatticeFunction {
        self.add(&other.scale(&Q::from_integer((-1).into())))
    }

    pub fn evaluate(&self, x: &[Elem]) -> Result<Q> {
        let mut acc = Q::zero();
        for (l, c) in &self.terms {
            if l.dim() != x.len() {
                return Err(Error::Mismatch);
            }
            if l.contains_vec(x) {
                acc += c;
            }
        }
        Ok(acc)
    }

    /// Term-wise 1_L ↦ vol(L)·1_{L^∨}.
    pub fn fourier(&self) -> Result<LatticeFunction> {
        let mut out = Self::zero();
        for (l, c) in &self.terms {
            out.add_term(c * volume(l)?, l.dual()?);
        }
        Ok(out)
    }

    /// Sum of all term lattices.
    pub fn lattice_max(&self) -> Result<Option<HermLattice>> {
        let mut it = self.terms.keys();
        let Some(first) = it.next() else { return Ok(None) };
        it.try_fold(first.clone(), |acc, l| acc.sum(l)).map(Some)
    }

    /// Intersection of all term lattices.
    pub fn lattice_min(&self) -> Result<Option<HermLattice>> {
        let mut it = self.terms.keys();
        let Some(first) = it.next() else { return Ok(None) };
        it.try_fold(first.clone(), |acc, l| acc.intersect(l)).map(Some)
    }

    /// Whether f is identically zero as a function on V.
    ///
    /// Indicators of lattices are linearly dependent, so a nonzero term list
    /// can still be the zero function. f is constant on cosets of the
    /// intersection of its lattices and vanishes outside their sum, so
    /// checking one point per coset is exhaustive.
    pub fn vanishes(&self) -> Result<bool> {
        let Some(lmax) = self.lattice_max()? else { return Ok(true) };
        let lmin = self.lattice_min()?.expect("nonempty");
        let reps = lmax.coset_reps(&lmin, crate::enumerate::COSET_CAP * 5)?;
        for x in reps {
            if !self.evaluate(&x)?.is_zero() {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn same_function(&self, other: &LatticeFunction) -> Result<bool> {
        self.sub(other).vanishes()
    }

    pub fn to_json(&self) -> serde_json::Value {
        let terms = self
            .terms
            .iter()
            .map(|(l, c)| TermJson { coef: fmt_q(c), lattice: LatticeJson::from_lattice(l) })
            .collect();
        serde_json::to_value(FunctionJson { terms }).expect("plain data")
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Self> {
        let j: FunctionJson = serde_json::from_value(v.clone()).map_err(|e| Error::Parse(e.to_string()))?;
        let mut f = Self::zero();
        for t in j.terms {
            f.add_term(parse_q(&t.coef)?, t.lattice.to_lattice()?);
        }
        Ok(f)
    }
}

/// Self-dual Haar volume q^{−(val_E(det T) + n)/2} of a full-rank lattice.
pub fn volume(l: &HermLattice) -> Result<Q> {
    if !l.is_full_rank() {
        return Err(Error::Dimension("volume needs a full-rank lattice".into()));
    }
    let v = l.volume_val()?;
    if v % 2 != 0 {
        return Err(Error::Domain(format!("volume exponent {v}/2 is not an integer")));
    }
    Ok(p_pow(l.cfg().p, -v / 2))
}
