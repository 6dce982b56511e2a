//! Special corank-one lattices, the region S_{L♭}, and the rewrite
//! L♭ + ⟨x⟩ = L♭' + ⟨x'⟩ with smaller val(L♭').

use super::corank1::{perp_line, slice_extensions, PerpLine};
use super::integral_overlattices;
use crate::efield::{vec_add, vec_scale, Elem, Vector};
use crate::error::{Error, Result};
use crate::hermlat::{Block, HermLattice, Invariants};
use crate::rational::q_int;

#[derive(Clone, Debug)]
pub struct SpecialData {
    pub special: bool,
    /// Number of integral L ⊇ L♭ with invariants (a₁,…,a_{n−2}, a−1, a−1).
    pub count: usize,
    pub plus_minus: Option<(HermLattice, HermLattice)>,
}

fn check_shape(lflat: &HermLattice) -> Result<()> {
    let n = lflat.dim();
    if lflat.rank() + 1 != n || n < 4 {
        return Err(Error::Dimension(format!("need rank n−1 ≥ 3 in dimension n, got rank {} in {n}", lflat.rank())));
    }
    if n % 2 == 1 || !lflat.space().is_nonsplit()? {
        return Err(Error::SplitSpace);
    }
    Ok(())
}

pub fn special_data(lflat: &HermLattice) -> Result<SpecialData> {
    check_shape(lflat)?;
    let inv = lflat.invariants()?;
    let m = inv.a.len();
    let a = inv.a[m - 1];
    let not_special = SpecialData { special: false, count: 0, plus_minus: None };
    if inv.a[m - 2] == a || a % 2 == 0 {
        return Ok(not_special);
    }
    let mut target = inv.a[..m - 1].to_vec();
    target.extend([a - 1, a - 1]);
    let target = Invariants::from_sorted(target);
    let line = perp_line(lflat)?;
    let mut found = Vec::new();
    for s in integral_overlattices(lflat)? {
        let ell = (inv.val - s.invariants()?.val) / 2;
        let delta = (a - 3) / 2 + ell;
        for e in slice_extensions(&s, &line, delta..=delta)? {
            if e.lattice.invariants()? == target {
                found.push(e.lattice);
            }
        }
    }
    let count = found.len();
    if count != 2 {
        return Ok(SpecialData { count, ..not_special });
    }
    let (lp, lm) = (found[0].clone(), found[1].clone());
    verify_special(lflat, &inv, &line, [&lp, &lm])?;
    Ok(SpecialData { special: true, count, plus_minus: Some((lp, lm)) })
}

/// Checks the three structural properties of the two special overlattices.
fn verify_special(lflat: &HermLattice, inv: &Invariants, line: &PerpLine, pm: [&HermLattice; 2]) -> Result<()> {
    let bad = |what: &str| Err(Error::Inconsistent(format!("special lattice check failed: {what}")));
    let a = inv.a_max();
    for l in pm {
        if l.orthogonal_part(std::slice::from_ref(&line.f0)) != *lflat {
            return bad("slice differs from L♭");
        }
    }
    if a < 3 {
        return bad("a_{n-1} < 3");
    }
    let nb = lflat.normal_basis()?;
    let top = nb
        .blocks
        .iter()
        .find_map(|b| match b {
            Block::Diagonal { index, b, .. } if 2 * b + 1 == a => Some(*index),
            _ => None,
        })
        .ok_or_else(|| Error::Inconsistent("no 1×1 block carries a_{n-1}".into()))?;
    let left: Vec<Vector> = nb.basis.iter().enumerate().filter(|&(i, _)| i != top).map(|(_, v)| v.clone()).collect();
    let left = HermLattice::new(lflat.space().clone(), left)?;
    let right = HermLattice::new(lflat.space().clone(), vec![nb.basis[top].clone()])?;
    if left.sum(&right)? != *lflat || left.invariants()?.a != inv.a[..inv.a.len() - 1] {
        return bad("L♭ decomposition");
    }
    for l in pm {
        let r = l.orthogonal_part(left.basis());
        if left.sum(&r)? != *l || r.invariants()?.a != vec![a - 1, a - 1] {
            return bad("L♭± decomposition");
        }
    }
    Ok(())
}

/// Precomputed membership test for S_{L♭}.
#[derive(Clone, Debug)]
pub struct SRegion {
    lflat: HermLattice,
    line: PerpLine,
    special: Option<(HermLattice, HermLattice)>,
}

impl SRegion {
    pub fn new(lflat: &HermLattice) -> Result<Self> {
        if !lflat.is_integral() {
            return Err(Error::NotIntegral);
        }
        // Special lattices only exist from rank three on.
        let special = if lflat.dim() >= 4 { special_data(lflat)?.plus_minus } else { None };
        Ok(Self { lflat: lflat.clone(), line: perp_line(lflat)?, special })
    }

    pub fn is_special(&self) -> bool {
        self.special.is_some()
    }

    pub fn contains(&self, x: &[Elem]) -> bool {
        if let Some((lp, lm)) = &self.special {
            return lp.contains_vec(x) || lm.contains_vec(x);
        }
        let space = self.lflat.space();
        let f0 = &self.line.f0;
        let c = space.pair(x, f0).checked_div(&space.pair(f0, f0)).expect("anisotropic line");
        let px = vec_scale(&c, f0);
        let w: Vector = x.iter().zip(&px).map(|(a, b)| a - b).collect();
        self.lflat.contains_vec(&w) && space.v_int_test(&px)
    }
}

pub fn s_region_membership(lflat: &HermLattice, x: &[Elem]) -> Result<bool> {
    Ok(SRegion::new(lflat)?.contains(x))
}

/// Rewrites L♭ + ⟨x⟩ as L♭' + ⟨x'⟩ with val(L♭') < val(L♭).
///
/// Candidates come from a normal basis of L = L♭ + ⟨x⟩: drop a 1×1 block
/// vector, or replace a plane ⟨e, f⟩ by ⟨e + t·u·f⟩ and keep f as x'.
pub fn reduce_pair(region: &SRegion, x: &[Elem]) -> Result<(HermLattice, Vector)> {
    let lflat = &region.lflat;
    if lflat.in_span(x) {
        return Err(Error::Precondition("x lies in the span of L♭".into()));
    }
    if region.contains(x) {
        return Err(Error::Precondition("x lies in S_{L♭}".into()));
    }
    let cfg = lflat.cfg();
    let l = lflat.add_vector(x);
    let v0 = lflat.invariants()?.val;
    let nb = l.normal_basis()?;
    let e = &nb.basis;
    let rest = |skip: &[usize]| -> Vec<Vector> {
        e.iter().enumerate().filter(|(i, _)| !skip.contains(i)).map(|(_, v)| v.clone()).collect()
    };
    let mut candidates: Vec<(Vec<Vector>, Vector)> = Vec::new();
    for b in &nb.blocks {
        match *b {
            Block::Diagonal { index, .. } => candidates.push((rest(&[index]), e[index].clone())),
            Block::Hyperbolic { first, second, .. } => {
                for (k, l2) in [(first, second), (second, first)] {
                    for t in [1, 2] {
                        let w = vec_add(&e[k], &vec_scale(&cfg.u().scale(&q_int(t)), &e[l2]));
                        let mut gens = rest(&[first, second]);
                        gens.push(w);
                        candidates.push((gens, e[l2].clone()));
                    }
                }
            }
        }
    }
    let mut best: Option<(i64, HermLattice, Vector)> = None;
    for (gens, xp) in candidates {
        let lf = HermLattice::new(lflat.space().clone(), gens)?;
        let v = lf.val_or_minus_one()?;
        if best.as_ref().is_none_or(|(bv, _, _)| v < *bv) {
            best = Some((v, lf, xp));
        }
    }
    let (v, lf, xp) = best.ok_or_else(|| Error::Inconsistent("no candidate decomposition".into()))?;
    if v >= v0 {
        return Err(Error::Inconsistent(format!("no decomposition lowers val below {v0}")));
    }
    if lf.add_vector(&xp) != l {
        return Err(Error::Inconsistent("rewritten lattice differs".into()));
    }
    Ok((lf, xp))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::efield::FieldConfig;
    use crate::hermlat::HermSpace;

    /// L♭ = ⟨e1, e2, e3⟩ inside diag(1, 1, b, γ) with γ making the space nonsplit.
    fn setup(b: i64) -> HermLattice {
        let c = FieldConfig::new(3, 1).unwrap();
        for g in [1, 2] {
            let d: Vec<Elem> = [1, 1, b, g].iter().map(|&x| c.int(x)).collect();
            let space = HermSpace::diagonal(c, &d).unwrap();
            if space.is_nonsplit().unwrap() {
                let basis = (0..3).map(|i| space.basis_vector(i)).collect();
                return HermLattice::new(space, basis).unwrap();
            }
        }
        unreachable!()
    }

    #[test]
    fn special_examples() {
        let l = setup(3);
        let sd = special_data(&l).unwrap();
        assert_eq!(sd.count, 2);
        assert!(sd.special);
        let (lp, lm) = sd.plus_minus.unwrap();
        assert_ne!(lp, lm);
        assert_eq!(lp.invariants().unwrap().a, vec![1, 1, 2, 2]);
        let sd5 = special_data(&setup(9)).unwrap();
        assert_eq!(sd5.special, sd5.count == 2);
        assert!(!special_data(&setup(1)).unwrap().special);
    }

    #[test]
    fn reduce_lowers_val() {
        for b in [3, 9] {
            let l = setup(b);
            let region = SRegion::new(&l).unwrap();
            let c = l.cfg();
            let sp = l.space();
            let e3 = sp.basis_vector(2);
            let e4 = sp.basis_vector(3);
            let mut tried = 0;
            for k in 1..=2 {
                for t in 0..3 {
                    let x = vec_add(&vec_scale(&c.u_pow(-k), &e3), &vec_scale(&c.int(t), &e4));
                    if l.in_span(&x) || region.contains(&x) {
                        assert!(reduce_pair(&region, &x).is_err());
                        continue;
                    }
                    let (lf, xp) = reduce_pair(&region, &x).unwrap();
                    assert!(lf.val_or_minus_one().unwrap() < l.invariants().unwrap().val);
                    assert_eq!(lf.add_vector(&xp), l.add_vector(&x));
                    tried += 1;
                }
            }
            assert!(tried > 0);
        }
    }

    #[test]
    fn s_region_contains_lflat() {
        let l = setup(3);
        for v in l.basis() {
            assert!(s_region_membership(&l, v).unwrap());
        }
    }
}
