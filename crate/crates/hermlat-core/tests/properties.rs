//! Invariants over seeded corpus lattices and random field elements.

use proptest::prelude::*;
use rand::Rng;

use hermlat_core::corpus::Corpus;
use hermlat_core::efield::{Elem, FieldConfig};
use hermlat_core::enumerate::integral_overlattices;
use hermlat_core::glcount::{c_m, Composition};
use hermlat_core::hermlat::{HermLattice, HermSpace};
use hermlat_core::oracle::naive_integral_overlattices;
use hermlat_core::rational::{q_frac, q_int};
use hermlat_core::schwartz::LatticeFunction;

fn cfg_of(p: u64, nonresidue: bool) -> FieldConfig {
    if nonresidue {
        FieldConfig::nonresidue(p).unwrap()
    } else {
        FieldConfig::new(p, 1).unwrap()
    }
}

fn elem(cfg: FieldConfig, a: (i64, i64), b: (i64, i64)) -> Elem {
    Elem::new(cfg, q_frac(a.0, a.1), q_frac(b.0, b.1))
}

fn frac() -> impl Strategy<Value = (i64, i64)> {
    (-40i64..40, prop_oneof![Just(1i64), Just(3), Just(5), Just(9), Just(2)])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn norm_and_valuation_are_multiplicative(a in frac(), b in frac(), c in frac(), d in frac(), nr in any::<bool>()) {
        let cfg = cfg_of(3, nr);
        let x = elem(cfg, a, b);
        let y = elem(cfg, c, d);
        prop_assert_eq!((&x * &y).norm(), x.norm() * y.norm());
        prop_assert_eq!((&x * &y).conj(), x.conj() * y.conj());
        if !x.is_zero() && !y.is_zero() {
            prop_assert_eq!((&x * &y).v(), x.v() + y.v());
            prop_assert_eq!(&(&x * &y).checked_div(&y).unwrap(), &x);
        }
    }

    #[test]
    fn coset_count_is_symmetric(parts in prop::collection::vec(1u32..3, 1..4), m in 1u32..3, rot in 0usize..3) {
        let mut rotated = parts.clone();
        let k = rot % parts.len();
        rotated.rotate_left(k);
        let a = c_m(&Composition::new(parts).unwrap(), m, 3).unwrap();
        let b = c_m(&Composition::new(rotated).unwrap(), m, 3).unwrap();
        prop_assert_eq!(a, b);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn lattice_invariants(seed in 0u64..1_000_000, n in 1usize..5, nr in any::<bool>(), p in prop_oneof![Just(3u64), Just(5)]) {
        let cfg = cfg_of(p, nr);
        let mut c = Corpus::new(cfg, seed);
        let l = c.integral_lattice(n, 3, 6);
        let inv = l.invariants().unwrap();
        prop_assert_eq!(&l.dual().unwrap().dual().unwrap(), &l);
        prop_assert_eq!(inv.t % 2, n % 2);
        prop_assert_eq!(inv.val.rem_euclid(2) as usize, n % 2);

        let other = c.integral_lattice(2, 3, 4);
        let sum = HermLattice::orthogonal_sum(&l, &other).unwrap();
        let mut merged = [inv.a.clone(), other.invariants().unwrap().a].concat();
        merged.sort_unstable();
        prop_assert_eq!(sum.invariants().unwrap().a, merged);

        let unit = &cfg.int(c.rng().gen_range(1..p as i64)) + &cfg.u();
        prop_assert_eq!(&l.rescale(&unit).invariants().unwrap(), &inv);
        let rebased = c.rebase(&l).unwrap();
        prop_assert_eq!(&rebased, &l);
        let g = l.space().gram().scale(&cfg.int(c.rng().gen_range(1..p as i64)));
        prop_assert_eq!(HermLattice::standard(HermSpace::new(g).unwrap()).invariants().unwrap(), inv);
    }

    #[test]
    fn fourier_inversion_in_even_rank(seed in 0u64..1_000_000, half in 1usize..3, nr in any::<bool>()) {
        let cfg = cfg_of(3, nr);
        let l = Corpus::new(cfg, seed).integral_lattice(2 * half, 3, 5);
        let f = LatticeFunction::from_terms([(q_int(3), l.clone()), (q_int(-2), l.dual().unwrap())]);
        prop_assert_eq!(f.fourier().unwrap().fourier().unwrap(), f);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn enumeration_matches_naive_oracle(seed in 0u64..1_000_000, n in 1usize..5, nr in any::<bool>()) {
        let l = Corpus::new(cfg_of(3, nr), seed).integral_lattice(n, 3, 4);
        let a = naive_integral_overlattices(&l).unwrap();
        let b = integral_overlattices(&l).unwrap();
        prop_assert_eq!(a, b);
    }
}
