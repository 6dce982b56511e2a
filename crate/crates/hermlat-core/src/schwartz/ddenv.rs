//! ∂Den^v_{L♭} as a lattice function on all of V.
//!
//! Off span(L♭) the function is 2·Σ μ(t(L))·1_L over the integral L ⊇ L♭
//! whose slice S = L ∩ span(L♭) has t(S) > 1. Writing x = w + λ·f0, only
//! lattices with δ_L ≤ val(λ) contain x, and past the threshold A the value
//! no longer depends on λ. So the function is the finite sum over δ ≤ A cut
//! to val(λ) ≤ A, plus the value at val(λ) = A + 1, averaged over unit
//! multiples of λ, spread over u^{A+1}·O_E·f0.

use num_bigint::BigInt;

use super::LatticeFunction;
use crate::density::{dden_v, mu};
use crate::efield::{vec_add, vec_scale, Elem};
use crate::enumerate::{integral_overlattices, perp_line, slice_extensions};
use crate::error::{Error, Result};
use crate::hermlat::HermLattice;
use crate::rational::{p_pow, Q};

fn check_corank_one(lflat: &HermLattice) -> Result<()> {
    if lflat.rank() + 1 != lflat.dim() {
        return Err(Error::Dimension(format!("expected rank {} for L♭, got {}", lflat.dim() - 1, lflat.rank())));
    }
    Ok(())
}

pub fn dden_v_function(lflat: &HermLattice) -> Result<LatticeFunction> {
    check_corank_one(lflat)?;
    if !lflat.is_integral() {
        return Ok(LatticeFunction::zero());
    }
    let a = lflat.invariants()?.a_max();
    dden_v_function_with_threshold(lflat, a)
}

/// Same function with an explicit constancy threshold A.
pub fn dden_v_function_with_threshold(lflat: &HermLattice, a: i64) -> Result<LatticeFunction> {
    check_corank_one(lflat)?;
    if lflat.dim() == 2 || !lflat.is_integral() {
        return Ok(LatticeFunction::zero());
    }
    if lflat.dim() % 2 == 1 || !lflat.space().is_nonsplit()? {
        return Err(Error::SplitSpace);
    }
    let cfg = lflat.cfg();
    let q = cfg.p;
    let line = perp_line(lflat)?;
    let space = lflat.space().clone();
    let k = a + 1;
    let tail = vec_scale(&cfg.u_pow(k), &line.f0);
    let with_tail = |m: &HermLattice| -> Result<HermLattice> {
        let mut cols = m.basis().to_vec();
        cols.push(tail.clone());
        HermLattice::new(space.clone(), cols)
    };
    let mut f = LatticeFunction::zero();
    for s in integral_overlattices(lflat)? {
        if s.invariants()?.t <= 1 {
            continue;
        }
        for e in slice_extensions(&s, &line, i64::MIN..=k)? {
            let m = Q::from_integer(mu(e.lattice.invariants()?.t, q)? * BigInt::from(2));
            let gen = vec_add(&e.y, &vec_scale(&cfg.u_pow(e.delta), &line.f0));
            if e.delta <= a {
                f.add_term(m.clone(), e.lattice.clone());
                f.add_term(-m.clone(), s.add_vector(&vec_scale(&cfg.u_pow(k - e.delta), &gen)));
            }
            let z = vec_scale(&cfg.u_pow(k - e.delta), &e.y);
            if s.contains_vec(&z) {
                f.add_term(m, with_tail(&s)?);
                continue;
            }
            let o = order_mod(&s, &z);
            let gens = p_pow(q, o) - p_pow(q, o - 1);
            let c = m / gens;
            f.add_term(c.clone(), with_tail(&s.add_vector(&z))?);
            f.add_term(-c, with_tail(&s.add_vector(&vec_scale(&cfg.u(), &z)))?);
        }
    }
    Ok(f)
}

/// Least o ≥ 0 with u^o·z ∈ S.
fn order_mod(s: &HermLattice, z: &[Elem]) -> i64 {
    let coords = s.coords(z).expect("z lies in span(S)");
    coords.iter().filter_map(|c| c.val().finite()).map(|v| (-v).max(0)).max().unwrap_or(0)
}

/// Checks that dden_v(L♭, y + c·u^δ·f) is the same for every δ in
/// (A, A + 2] and every unit c in a set of residue representatives.
pub fn local_constancy_check(lflat: &HermLattice, y: &[Elem], f: &[Elem]) -> Result<bool> {
    check_corank_one(lflat)?;
    let cfg = lflat.cfg();
    let a = if lflat.is_integral() { lflat.invariants()?.a_max() } else { 0 };
    let mut units: Vec<Elem> = (1..cfg.p as i64).map(|c| cfg.int(c)).collect();
    units.push(&cfg.one() + &cfg.u());
    let mut first: Option<BigInt> = None;
    for delta in a + 1..=a + 2 {
        for c in &units {
            let x = vec_add(y, &vec_scale(&(c * &cfg.u_pow(delta)), f));
            let v = dden_v(lflat, &x, cfg.p)?;
            match &first {
                None => first = Some(v),
                Some(w) if *w != v => return Ok(false),
                _ => {}
            }
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::efield::FieldConfig;
    use crate::hermlat::HermSpace;

    /// diag(1, 1, b) ⊕ ⟨γ⟩ in a nonsplit 4-space, with L♭ the first three lines.
    fn setup(b: i64) -> (HermLattice, Vec<Elem>) {
        let c = FieldConfig::new(3, 1).unwrap();
        let space = [1, 2]
            .into_iter()
            .map(|g| HermSpace::diagonal(c, &[c.one(), c.one(), c.int(b), c.int(g)]).unwrap())
            .find(|s| s.is_nonsplit().unwrap())
            .unwrap();
        let lflat = HermLattice::new(space.clone(), (0..3).map(|i| space.basis_vector(i)).collect()).unwrap();
        (lflat, space.basis_vector(3))
    }

    #[test]
    fn trivial_cases() {
        let c = FieldConfig::new(3, 1).unwrap();
        let space = HermSpace::diagonal(c, &[c.one(), c.one()]).unwrap();
        let l = HermLattice::new(space.clone(), vec![space.basis_vector(0)]).unwrap();
        assert!(dden_v_function(&l).unwrap().is_zero());
        let (lflat, _) = setup(3);
        let big = lflat.rescale(&c.u_pow(-2));
        assert!(dden_v_function(&big).unwrap().is_zero());
    }

    #[test]
    fn matches_pointwise_off_span() {
        let (lflat, f) = setup(3);
        let func = dden_v_function(&lflat).unwrap();
        assert!(!func.is_zero());
        let cfg = lflat.cfg();
        let w_samples = [
            lflat.space().zero_vector(),
            lflat.basis()[0].clone(),
            vec_scale(&cfg.u_pow(-1), &lflat.basis()[2]),
            vec_add(&lflat.basis()[1], &vec_scale(&cfg.u_pow(-1), &lflat.basis()[2])),
        ];
        for w in &w_samples {
            for k in -1..=5 {
                for c in [cfg.one(), cfg.int(2)] {
                    let x = vec_add(w, &vec_scale(&(&c * &cfg.u_pow(k)), &f));
                    let want = Q::from_integer(dden_v(&lflat, &x, 3).unwrap());
                    assert_eq!(func.evaluate(&x).unwrap(), want, "w = {w:?}, k = {k}");
                }
            }
        }
    }

    #[test]
    fn fourier_support_in_vint() {
        let (lflat, f0) = setup(3);
        let ft = dden_v_function(&lflat).unwrap().fourier().unwrap();
        assert_eq!(crate::schwartz::support_outside_vint_along(&ft, &f0).unwrap(), None);
    }

    #[test]
    fn constancy_beyond_threshold() {
        let (lflat, f) = setup(3);
        let y = lflat.space().zero_vector();
        assert!(local_constancy_check(&lflat, &y, &f).unwrap());
    }
}
