//! Full-rank integral lattices containing a corank-one lattice L♭.
//!
//! With W = span(L♭) and f0 a generator of (W^⊥)^int, every such L is
//! S + O_E·(y + u^δ·f0) for a unique slice S = L ∩ W, a unique δ and a
//! unique class y ∈ S^∨/S. Integrality of L is exactly
//! (y,y) + (−p·ε₀)^δ·(f0,f0) ∈ O_F. The family is infinite in δ, so callers
//! pass an upper bound.

use std::ops::RangeInclusive;

use rayon::prelude::*;

use super::{ceil_half, integral_overlattices, sort_key};
use crate::efield::{vec_add, vec_scale, Matrix, Vector};
use crate::error::{Error, Result};
use crate::hermlat::HermLattice;
use crate::rational::{pow_q, q_int, val_p, Q};

/// Largest quotient S^∨/S the enumerators will walk.
pub const COSET_CAP: usize = 200_000;

/// Generator f0 of (W^⊥)^int and its unit norm β0.
#[derive(Clone, Debug)]
pub struct PerpLine {
    pub f0: Vector,
    pub beta0: Q,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Corank1Extension {
    pub lattice: HermLattice,
    pub slice: HermLattice,
    pub delta: i64,
    /// Representative of the S^∨/S class with lattice = slice + O_E·(y + u^δ·f0).
    pub y: Vector,
}

fn check_corank_one(lflat: &HermLattice) -> Result<()> {
    let n = lflat.dim();
    if lflat.rank() + 1 != n {
        return Err(Error::Dimension(format!("expected rank {} in dimension {n}, got {}", n - 1, lflat.rank())));
    }
    Ok(())
}

pub fn perp_line(lflat: &HermLattice) -> Result<PerpLine> {
    check_corank_one(lflat)?;
    let space = lflat.space();
    let cfg = lflat.cfg();
    let g = space.gram();
    let rows: Vec<Vector> = lflat.basis().iter().map(|b| g.mul_vec(&b.iter().map(|x| x.conj()).collect::<Vec<_>>())).collect();
    let a = Matrix::from_rows(cfg, rows)?;
    let ker = a.kernel();
    let f = ker.into_iter().next().ok_or(Error::Degenerate)?;
    let d = space.norm(&f);
    let k = val_p(&d, cfg.p).ok_or(Error::Degenerate)?;
    let f0 = vec_scale(&cfg.u_pow(-k), &f);
    let beta0 = space.norm(&f0);
    Ok(PerpLine { f0, beta0 })
}

/// (−p·ε₀)^δ·β0 = (u^δ f0, u^δ f0).
fn perp_norm(lflat: &HermLattice, line: &PerpLine, delta: i64) -> Q {
    let cfg = lflat.cfg();
    pow_q(&q_int(-(cfg.p as i64) * cfg.eps0), delta) * &line.beta0
}

fn integral_q(x: &Q, p: u64) -> bool {
    val_p(x, p).is_none_or(|v| v >= 0)
}

/// Lattices S + O_E·(y + u^δ f0) over all valid y and δ in `deltas`.
pub fn slice_extensions(
    slice: &HermLattice,
    line: &PerpLine,
    deltas: RangeInclusive<i64>,
) -> Result<Vec<Corank1Extension>> {
    let cfg = slice.cfg();
    let inv = slice.invariants()?;
    let lo = (*deltas.start()).max(ceil_half(-1 - inv.a_max()));
    let hi = *deltas.end();
    if lo > hi {
        return Ok(Vec::new());
    }
    let sd = slice.dual()?;
    let reps = sd.coset_reps(slice, COSET_CAP)?;
    let space = slice.space();
    let norms: Vec<Q> = reps.iter().map(|y| space.norm(y)).collect();
    let mut jobs = Vec::new();
    for delta in lo..=hi {
        let c = perp_norm(slice, line, delta);
        for (i, ny) in norms.iter().enumerate() {
            if integral_q(&(ny + &c), cfg.p) {
                jobs.push((delta, i));
            }
        }
    }
    Ok(jobs
        .into_par_iter()
        .map(|(delta, i)| {
            let y = reps[i].clone();
            let z = vec_add(&y, &vec_scale(&cfg.u_pow(delta), &line.f0));
            Corank1Extension { lattice: slice.add_vector(&z), slice: slice.clone(), delta, y }
        })
        .collect())
}

/// Default δ bound a_max(L♭) + 1.
pub fn default_delta_cap(lflat: &HermLattice) -> Result<i64> {
    Ok(lflat.invariants()?.a_max() + 1)
}

/// Integral full-rank L ⊇ L♭ with δ_L ≤ `delta_max`; empty for non-integral L♭.
pub fn corank1_integral_lattices(lflat: &HermLattice, delta_max: i64) -> Result<Vec<Corank1Extension>> {
    check_corank_one(lflat)?;
    if lflat.dim() % 2 == 1 || !lflat.space().is_nonsplit()? {
        return Err(Error::SplitSpace);
    }
    if !lflat.is_integral() {
        return Ok(Vec::new());
    }
    let line = perp_line(lflat)?;
    let mut out = Vec::new();
    for s in integral_overlattices(lflat)? {
        out.extend(slice_extensions(&s, &line, i64::MIN..=delta_max)?);
    }
    let mut keyed: Vec<_> = out.into_iter().map(|e| ((sort_key(&e.lattice), e.lattice.clone()), e)).collect();
    keyed.sort_by(|a, b| a.0.cmp(&b.0));
    Ok(keyed.into_iter().map(|(_, e)| e).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::efield::{Elem, FieldConfig};
    use crate::hermlat::HermSpace;

    fn setup() -> HermLattice {
        let c = FieldConfig::new(3, 1).unwrap();
        let e: Vec<Elem> = [1, 1].iter().map(|&x| c.int(x)).collect();
        let space = HermSpace::diagonal(c, &e).unwrap();
        HermLattice::new(space.clone(), vec![space.basis_vector(0)]).unwrap()
    }

    #[test]
    fn perp_line_is_unit() {
        let l = setup();
        let line = perp_line(&l).unwrap();
        assert_eq!(val_p(&line.beta0, 3), Some(0));
        assert!(l.space().pair(&line.f0, &l.basis()[0]).is_zero());
    }

    #[test]
    fn members_are_integral_with_expected_slice() {
        let l = setup();
        let ext = corank1_integral_lattices(&l, 2).unwrap();
        assert!(!ext.is_empty());
        let line = perp_line(&l).unwrap();
        for e in &ext {
            assert!(e.lattice.is_integral());
            assert_eq!(e.lattice.orthogonal_part(std::slice::from_ref(&line.f0)), e.slice);
            let inv = e.lattice.invariants().unwrap();
            let s = e.slice.invariants().unwrap();
            assert_eq!(inv.val, s.val + 2 * e.delta + 1);
            assert_eq!((inv.t as i64 - s.t as i64).abs(), 1);
        }
    }
}
