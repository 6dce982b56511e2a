//! The function −q(1+q)·1_Λ + Σ_{Λ ⊊ Λ' ⊆ Λ'^∨} 1_{Λ'} attached to a
//! type-4 vertex lattice Λ in a nonsplit 4-dimensional space.

use super::LatticeFunction;
use crate::enumerate::vertex_overlattices;
use crate::error::{Error, Result};
use crate::hermlat::HermLattice;
use crate::rational::{q_int, Q};

pub fn int_vlambda_function(lambda: &HermLattice) -> Result<LatticeFunction> {
    if lambda.dim() != 4 || !lambda.is_full_rank() {
        return Err(Error::Dimension("need a full-rank lattice in a 4-dimensional space".into()));
    }
    if !lambda.space().is_nonsplit()? {
        return Err(Error::SplitSpace);
    }
    if !lambda.is_vertex()? || lambda.invariants()?.t != 4 {
        return Err(Error::Precondition("need a vertex lattice of type 4".into()));
    }
    let q = lambda.cfg().p as i64;
    let mut f = LatticeFunction::from_terms([(q_int(-q * (1 + q)), lambda.clone())]);
    for l in vertex_overlattices(lambda)? {
        if l != *lambda {
            f.add_term(Q::from_integer(1.into()), l);
        }
    }
    Ok(f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::efield::{vec_scale, Elem, FieldConfig};
    use crate::hermlat::HermSpace;

    #[test]
    fn values_and_self_duality() {
        let c = FieldConfig::new(3, 1).unwrap();
        // Unit diagonal, with the last entry fixing the nonsplit class.
        let mut d = [1i64, 1, 1, 1];
        let e = |d: &[i64]| d.iter().map(|&x| c.int(x)).collect::<Vec<Elem>>();
        if !HermSpace::diagonal(c, &e(&d)).unwrap().is_nonsplit().unwrap() {
            d[3] = 2;
        }
        let lambda = HermLattice::standard(HermSpace::diagonal(c, &e(&d)).unwrap());
        let f = int_vlambda_function(&lambda).unwrap();
        assert_eq!(f.len(), 11);
        let x = lambda.basis()[0].clone();
        assert_eq!(f.evaluate(&x).unwrap(), q_int(-2));
        let far = vec_scale(&c.u_pow(-1), &x);
        assert_eq!(f.evaluate(&far).unwrap(), q_int(0));
        assert!(f.fourier().unwrap().same_function(&f.scale(&q_int(-1))).unwrap());
    }
}
