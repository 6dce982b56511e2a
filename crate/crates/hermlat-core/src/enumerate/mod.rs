//! Finite lattice enumerations: integral and vertex overlattices, the
//! corank-one family over a lattice L♭, special lattices and the
//! valuation-lowering rewrite of L♭ + ⟨x⟩.

mod corank1;
mod special;

pub use corank1::{
    corank1_integral_lattices, default_delta_cap, perp_line, slice_extensions, Corank1Extension,
    PerpLine, COSET_CAP,
};
pub use special::{reduce_pair, s_region_membership, special_data, SRegion, SpecialData};

use std::collections::BTreeSet;

use rayon::prelude::*;

use crate::efield::{vec_add, vec_scale, Vector};
use crate::error::{Error, Result};
use crate::hermlat::{HermLattice, Invariants};

/// Lattices L + O_E·x for the lines x of (u⁻¹L ∩ L^∨)/L with (x,x) ∈ O_F.
fn one_step_extensions(l: &HermLattice) -> Result<Vec<HermLattice>> {
    let cfg = l.cfg();
    let n = l.rescale(&cfg.u_pow(-1)).intersect(&l.dual()?)?;
    let (digits, _) = n.quotient_shape(l)?;
    let gens: Vec<&Vector> =
        digits.iter().zip(n.basis()).filter(|(&d, _)| d == 1).map(|(_, b)| b).collect();
    let mut out = Vec::new();
    for t in projective_points(cfg.p, gens.len()) {
        let mut x = l.space().zero_vector();
        for (&ti, g) in t.iter().zip(&gens) {
            if ti != 0 {
                x = vec_add(&x, &vec_scale(&cfg.int(ti as i64), g));
            }
        }
        if l.space().pair(&x, &x).is_integral() {
            out.push(l.add_vector(&x));
        }
    }
    Ok(out)
}

/// Normalized nonzero tuples of F_p^k (first nonzero entry equal to 1).
pub(crate) fn projective_points(p: u64, k: usize) -> Vec<Vec<u64>> {
    let mut out = Vec::new();
    for lead in 0..k {
        let free = k - lead - 1;
        let total = (p as usize).pow(free as u32);
        for mut idx in 0..total {
            let mut t = vec![0u64; k];
            t[lead] = 1;
            for slot in t[lead + 1..].iter_mut() {
                *slot = (idx % p as usize) as u64;
                idx /= p as usize;
            }
            out.push(t);
        }
    }
    out
}

pub(crate) fn sort_key(l: &HermLattice) -> (i64, Vec<i64>) {
    let inv = l.invariants().expect("enumerated lattices are integral");
    (inv.val, inv.a)
}

/// Sorts by (val, invariants, canonical basis).
pub fn sort_lattices(mut ls: Vec<HermLattice>) -> Vec<HermLattice> {
    let mut keyed: Vec<_> = ls.drain(..).map(|l| (sort_key(&l), l)).collect();
    keyed.sort();
    keyed.into_iter().map(|(_, l)| l).collect()
}

/// Every integral L' with L ⊆ L' ⊆ L'^∨.
///
/// Each such L' is reached from L by adding one vector at a time, where the
/// added vector is killed by u modulo the current lattice, so a breadth-first
/// search over those one-step extensions finds them all.
pub fn integral_overlattices(l: &HermLattice) -> Result<Vec<HermLattice>> {
    if !l.is_integral() {
        return Err(Error::NotIntegral);
    }
    let mut seen: BTreeSet<HermLattice> = BTreeSet::new();
    seen.insert(l.clone());
    let mut level = vec![l.clone()];
    while !level.is_empty() {
        let found: Vec<Vec<HermLattice>> =
            level.par_iter().map(one_step_extensions).collect::<Result<_>>()?;
        let mut next = BTreeSet::new();
        for m in found.into_iter().flatten() {
            if !seen.contains(&m) {
                next.insert(m);
            }
        }
        seen.extend(next.iter().cloned());
        level = next.into_iter().collect();
    }
    Ok(sort_lattices(seen.into_iter().collect()))
}

/// Integral overlattices with a_max ≤ 1.
pub fn vertex_overlattices(l: &HermLattice) -> Result<Vec<HermLattice>> {
    Ok(integral_overlattices(l)?
        .into_iter()
        .filter(|m| m.invariants().map(|i| i.a_max() <= 1).unwrap_or(false))
        .collect())
}

/// Integral overlattices of L with the given invariants.
pub fn overlattices_with_invariants(l: &HermLattice, inv: &Invariants) -> Result<Vec<HermLattice>> {
    Ok(integral_overlattices(l)?.into_iter().filter(|m| m.invariants().as_ref() == Ok(inv)).collect())
}

/// ceil(a / 2) for any sign.
pub(crate) fn ceil_half(a: i64) -> i64 {
    -((-a).div_euclid(2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::efield::{Elem, FieldConfig};
    use crate::hermlat::HermSpace;

    fn diag(p: u64, d: &[i64]) -> HermLattice {
        let c = FieldConfig::new(p, 1).unwrap();
        let e: Vec<Elem> = d.iter().map(|&x| c.int(x)).collect();
        HermLattice::standard(HermSpace::diagonal(c, &e).unwrap())
    }

    #[test]
    fn projective_point_count() {
        assert_eq!(projective_points(3, 2).len(), 4);
        assert_eq!(projective_points(5, 3).len(), 31);
        assert!(projective_points(3, 0).is_empty());
    }

    #[test]
    fn overlattice_examples() {
        assert_eq!(integral_overlattices(&diag(3, &[1, 1])).unwrap().len(), 1);
        // diag(1, 3) is split at p = 3, eps0 = 1; diag(1, 6) is its nonsplit twin.
        assert!(!diag(3, &[1, 3]).space().is_nonsplit().unwrap());
        assert_eq!(integral_overlattices(&diag(3, &[1, 3])).unwrap().len(), 4);
        let l = diag(3, &[1, 6]);
        assert!(l.space().is_nonsplit().unwrap());
        let all = integral_overlattices(&l).unwrap();
        assert_eq!(all.len(), 2);
        assert_eq!(all[0].invariants().unwrap().a, vec![1, 1]);
        assert_eq!(all[1], l);
        assert_eq!(vertex_overlattices(&l).unwrap().len(), 1);
        assert!(integral_overlattices(&diag(3, &[1, 9]).rescale(&l.cfg().u_pow(-2))).is_err());
    }

    #[test]
    fn ceil_half_signs() {
        assert_eq!(ceil_half(-3), -1);
        assert_eq!(ceil_half(-4), -2);
        assert_eq!(ceil_half(3), 2);
    }
}
