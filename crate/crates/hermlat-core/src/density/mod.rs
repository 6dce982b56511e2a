//! Local densities, the Siegel series and its central derivative, the
//! horizontal/vertical split of ∂Den, and scalar normalizing factors.
//!
//! Every lattice sum here runs over `integral_overlattices`. The parameter q
//! is free in the scalar formulas but must equal p whenever a lattice is
//! passed in.

mod poly;
mod scalars;

pub use poly::DenPoly;
pub use scalars::{
    archimedean_constant, aur_factor, b2r_at_zero, b2r_s, spherical_zeta, spherical_zeta_f64,
};

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::efield::Elem;
use crate::enumerate::{integral_overlattices, perp_line};
use crate::error::{Error, Result};
use crate::hermlat::HermLattice;
use crate::rational::{p_pow, q_int, Q};

/// ∂Den(L) as an exact integer; always even.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct DDenValue {
    #[serde(serialize_with = "ser_bigint")]
    pub value: BigInt,
}

fn ser_bigint<S: serde::Serializer>(v: &BigInt, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

impl DDenValue {
    pub fn is_even(&self) -> bool {
        (&self.value % 2u32).is_zero()
    }
}

impl From<i64> for DDenValue {
    fn from(v: i64) -> Self {
        Self { value: BigInt::from(v) }
    }
}

fn check_q(l: &HermLattice, q: u64) -> Result<()> {
    if l.cfg().p != q {
        return Err(Error::Precondition(format!("q = {q} but the lattice lives over p = {}", l.cfg().p)));
    }
    Ok(())
}

fn check_nonsplit_full(l: &HermLattice) -> Result<()> {
    if !l.is_full_rank() {
        return Err(Error::Dimension("expected a full-rank lattice".into()));
    }
    if l.dim() % 2 == 1 || !l.space().is_nonsplit()? {
        return Err(Error::SplitSpace);
    }
    Ok(())
}

/// Integral overlattices, or none when L itself is not integral.
fn overlattices_or_empty(l: &HermLattice) -> Result<Vec<HermLattice>> {
    match integral_overlattices(l) {
        Err(Error::NotIntegral) => Ok(Vec::new()),
        r => r,
    }
}

/// μ(t) = Π_{i=1}^{t/2−1} (1 − q^{2i}).
pub fn mu(t: usize, q: u64) -> Result<BigInt> {
    if t == 0 || t % 2 == 1 {
        return Err(Error::Domain(format!("mu needs a positive even type, got {t}")));
    }
    let qb = BigInt::from(q);
    Ok((1..t / 2).fold(BigInt::one(), |acc, i| acc * (BigInt::one() - num_traits::pow(qb.clone(), 2 * i))))
}

/// Π_{lo < i ≤ hi} (1 − q^{−2i}).
fn tail_product(q: u64, lo: i64, hi: i64) -> Q {
    ((lo + 1)..=hi).fold(q_int(1), |acc, i| acc * (q_int(1) - p_pow(q, -2 * i)))
}

/// Den(H_s, L) as the sum over integral L' ⊇ L.
pub fn den_hs(l: &HermLattice, s: i64, q: u64) -> Result<Q> {
    check_q(l, q)?;
    let m = l.rank() as i64;
    if s < m {
        return Err(Error::Domain(format!("need s ≥ rank, got s = {s}, rank {m}")));
    }
    let mut total = Q::zero();
    for lp in overlattices_or_empty(l)? {
        let t = lp.invariants()?.t as i64;
        let len = lp.index_length(l)?;
        let lo = s - (m + t) / 2;
        total += p_pow(q, len * (m - 2 * s)) * tail_product(q, lo, s);
    }
    Ok(total)
}

/// Den(X, L) = Σ X^{2·len(L'/L)} Π_{i<t(L')/2} (1 − q^{2i}X²).
pub fn siegel_series(l: &HermLattice, q: u64) -> Result<DenPoly> {
    check_q(l, q)?;
    check_nonsplit_full(l)?;
    let mut acc = DenPoly::zero(q);
    for lp in overlattices_or_empty(l)? {
        let t = lp.invariants()?.t;
        let len = lp.index_length(l)? as usize;
        let term = DenPoly::monomial(q, BigInt::one(), 2 * len).mul(&poly::type_factor(q, t / 2));
        acc = acc.add(&term);
    }
    Ok(acc)
}

/// 2·Σ μ(t(L')) over integral L' ⊇ L.
fn dden_mu_sum(l: &HermLattice, q: u64) -> Result<BigInt> {
    let mut acc = BigInt::zero();
    for lp in overlattices_or_empty(l)? {
        acc += mu(lp.invariants()?.t, q)?;
    }
    Ok(acc * 2)
}

/// ∂Den(L) = −Den'(1), cross-checked against the μ-sum.
pub fn dden(l: &HermLattice, q: u64) -> Result<DDenValue> {
    let poly = siegel_series(l, q)?;
    let from_poly = -poly.derivative().eval(&q_int(1));
    let direct = dden_mu_sum(l, q)?;
    if from_poly != Q::from_integer(direct.clone()) {
        return Err(Error::Inconsistent(format!("−Den'(1) = {from_poly} but the μ-sum gives {direct}")));
    }
    Ok(DDenValue { value: direct })
}

/// Int(L), evaluated analytically as ∂Den(L).
pub fn int_number(l: &HermLattice, q: u64) -> Result<DDenValue> {
    dden(l, q)
}

/// 2·Σ_{j=0}^{b1} (1 + q + … + q^j + (b2 − j)·q^j).
pub fn dden_rank2_closed(b1: u32, b2: u32, q: u64) -> Result<BigInt> {
    if b1 > b2 {
        return Err(Error::Domain(format!("need b1 ≤ b2, got ({b1}, {b2})")));
    }
    let qb = BigInt::from(q);
    let mut acc = BigInt::zero();
    for j in 0..=b1 {
        let qj = num_traits::pow(qb.clone(), j as usize);
        let geo: BigInt = (0..=j).map(|i| num_traits::pow(qb.clone(), i as usize)).sum();
        acc += geo + BigInt::from(b2 - j) * qj;
    }
    Ok(acc * 2)
}

/// (∂Den^h, ∂Den^v) of L♭ + ⟨x⟩, split by the type of L' ∩ span(L♭).
pub fn dden_split(lflat: &HermLattice, x: &[Elem], q: u64) -> Result<(BigInt, BigInt)> {
    check_q(lflat, q)?;
    if lflat.in_span(x) {
        return Err(Error::Precondition("x lies in the span of L♭".into()));
    }
    let l = lflat.add_vector(x);
    check_nonsplit_full(&l)?;
    let f0 = perp_line(lflat)?.f0;
    let (mut h, mut v) = (BigInt::zero(), BigInt::zero());
    for lp in overlattices_or_empty(&l)? {
        let slice = lp.orthogonal_part(std::slice::from_ref(&f0));
        if slice.invariants()?.t == 1 {
            h += 1;
        } else {
            v += mu(lp.invariants()?.t, q)?;
        }
    }
    Ok((h * 2, v * 2))
}

pub fn dden_h(lflat: &HermLattice, x: &[Elem], q: u64) -> Result<BigInt> {
    Ok(dden_split(lflat, x, q)?.0)
}

pub fn dden_v(lflat: &HermLattice, x: &[Elem], q: u64) -> Result<BigInt> {
    Ok(dden_split(lflat, x, q)?.1)
}

/// ∂Den(L)·Π_{i=1}^{r}(1 − q^{−2i}) with 2r = rank.
pub fn whittaker_scalar(l: &HermLattice, q: u64) -> Result<Q> {
    let d = dden(l, q)?;
    let r = (l.rank() / 2) as i64;
    Ok(Q::from_integer(d.value) * tail_product(q, 0, r))
}
