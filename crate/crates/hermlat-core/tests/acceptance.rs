//! The twelve acceptance criteria, one line each.
//!
//! Runs as a plain binary so the report is printed even when everything
//! passes; exits non-zero if any criterion fails or runs over its budget.

use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_traits::Zero;
use rand::Rng;

use hermlat_core::corpus::{all_positive_type, lattice_from_blocks, BlockSpec, Corpus};
use hermlat_core::density::{dden, dden_rank2_closed, dden_split, den_hs, int_number, mu, siegel_series};
use hermlat_core::efield::{vec_add, vec_scale, Elem, FieldConfig, Matrix, Vector};
use hermlat_core::enumerate::{
    integral_overlattices, perp_line, reduce_pair, slice_extensions, special_data, vertex_overlattices, SRegion,
};
use hermlat_core::glcount::{c_m, c_m_by_group_order, refinement_identity, Composition};
use hermlat_core::hermlat::{HermLattice, HermSpace};
use hermlat_core::oracle::{
    count_herm_homs, count_symplectic_isoms, coset_count_vint, naive_integral_overlattices, symplectic_isom_formula,
};
use hermlat_core::rational::{q_int, Q};
use hermlat_core::schwartz::{dden_v_function, int_vlambda_function, local_constancy_check, support_outside_vint, LatticeFunction};

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn ok<T, E: std::fmt::Debug>(r: Result<T, E>, what: &str) -> Result<T, String> {
    r.map_err(|e| format!("{what}: {e:?}"))
}

fn both_classes(p: u64) -> [FieldConfig; 2] {
    [FieldConfig::new(p, 1).unwrap(), FieldConfig::nonresidue(p).unwrap()]
}

fn diag(cfg: FieldConfig, d: &[Elem]) -> HermLattice {
    HermLattice::standard(HermSpace::diagonal(cfg, d).unwrap())
}

fn dual_vector(c: &mut Corpus, l: &HermLattice) -> Vector {
    let cfg = c.cfg();
    let dual = l.dual().unwrap();
    let mut y = l.space().zero_vector();
    for b in dual.basis() {
        let k = c.rng().gen_range(0..cfg.p as i64);
        y = vec_add(&y, &vec_scale(&cfg.int(k), b));
    }
    y
}

fn rank2_closed() -> Outcome {
    let mut cases = 0;
    for p in [3, 5] {
        for cfg in both_classes(p) {
            let nr = FieldConfig::smallest_nonresidue(p);
            for b1 in 0..=3u32 {
                for b2 in b1..=3u32 {
                    let mut nonsplit = 0;
                    for beta1 in [1, nr] {
                        for beta2 in [1, nr] {
                            let d = [
                                cfg.int(beta1) * cfg.u_pow(2 * b1 as i64),
                                cfg.int(beta2) * cfg.u_pow(2 * b2 as i64),
                            ];
                            let l = diag(cfg, &d);
                            if !l.space().is_nonsplit().unwrap() {
                                continue;
                            }
                            nonsplit += 1;
                            let want = ok(dden_rank2_closed(b1, b2, p), "closed form")?;
                            let got = ok(dden(&l, p), "dden")?.value;
                            let int = ok(int_number(&l, p), "int")?.value;
                            ensure(got == want && int == want, || {
                                format!("p={p} eps0={} b=({b1},{b2}) beta=({beta1},{beta2}): dden {got}, int {int}, closed {want}", cfg.eps0)
                            })?;
                            cases += 1;
                        }
                    }
                    ensure(nonsplit == 2, || format!("expected two nonsplit unit classes, found {nonsplit}"))?;
                }
            }
        }
    }
    Ok(format!("{cases} Gram representatives"))
}

fn central_vanishing() -> Outcome {
    for i in 0..200u64 {
        let cfg = both_classes(3)[(i % 2) as usize];
        let n = if i % 4 < 2 { 2 } else { 4 };
        let l = ok(Corpus::new(cfg, 1000 + i).nonsplit_lattice(n, 4, 8), "corpus")?;
        let poly = ok(siegel_series(&l, 3), "siegel_series")?;
        ensure(poly.eval(&q_int(1)).is_zero(), || format!("seed {}: Den(1, L) = {}", 1000 + i, poly.eval(&q_int(1))))?;
    }
    Ok("200 lattices, n ∈ {2, 4}".into())
}

fn density_oracle() -> Outcome {
    let mut cases = 0;
    for cfg in both_classes(3) {
        let nr = FieldConfig::smallest_nonresidue(3);
        for b in 0..=1 {
            for beta in [1, nr] {
                let gram = Matrix::diagonal(cfg, &[cfg.int(beta * 3i64.pow(b))]);
                let l = HermLattice::standard(HermSpace::new(gram.clone()).unwrap());
                for s in 1..=2u32 {
                    let n2 = ok(count_herm_homs(&gram, s, 2), "count N=2")?;
                    let n3 = ok(count_herm_homs(&gram, s, 3), "count N=3")?;
                    let want = ok(den_hs(&l, s as i64, 3), "den_hs")?;
                    ensure(n2.normalized == n3.normalized && n3.normalized == want, || {
                        format!("beta={beta} b={b} s={s}: N=2 {}, N=3 {}, den_hs {want}", n2.normalized, n3.normalized)
                    })?;
                    cases += 1;
                }
            }
        }
        let fixed = ok(count_herm_homs(&Matrix::diagonal(cfg, &[cfg.one()]), 1, 1), "count N=1")?;
        ensure(fixed.raw_count == 24, || format!("raw count {} at the unit fixed point", fixed.raw_count))?;
    }
    Ok(format!("{cases} cases stable at N = 2, 3; raw count 24 reproduced"))
}

fn isometry_counts() -> Outcome {
    let mut cases = 0;
    for m in 0..=3u32 {
        for t in (0..=m).filter(|t| (m - t) % 2 == 0) {
            for s in 0..=3u32 {
                let n = ok(count_symplectic_isoms(m, t, s, 3), "count")?;
                let f = ok(symplectic_isom_formula(m, t, s, 3), "formula")?;
                ensure(Q::from_integer(n.into()) == f, || format!("m={m} t'={t} s={s}: count {n}, formula {f}"))?;
                cases += 1;
            }
        }
    }
    ensure(count_symplectic_isoms(2, 0, 1, 3) == Ok(24), || "|Sp_2(F_3)| ≠ 24".into())?;
    Ok(format!("{cases} parameter tuples"))
}

fn coset_identity() -> Outcome {
    let mut cases = 0;
    for cfg in both_classes(3) {
        for rank in [1usize, 3] {
            let m = (rank - 1) / 2;
            for blocks in all_positive_type(cfg, rank, 5) {
                let l = ok(lattice_from_blocks(cfg, &blocks), "lattice")?;
                let k0 = ok(coset_count_vint(&l, 0), "k=0")?;
                let k1 = ok(coset_count_vint(&l, 1), "k=1")?;
                ensure(9u64.pow(m as u32) * k1 == k0, || format!("{blocks:?}: k0 {k0}, k1 {k1}"))?;
                if rank == 3 && blocks.iter().all(|b| matches!(b, BlockSpec::Diag { b: 0, .. })) {
                    ensure(k0 == 9 && k1 == 1, || format!("unit diagonal {blocks:?}: {k0}, {k1}"))?;
                }
                cases += 1;
            }
        }
    }
    Ok(format!("{cases} lattices"))
}

fn corank_one_vanishing() -> Outcome {
    let mut done = 0;
    let mut seed = 0u64;
    let mut members = 0;
    while done < 30 {
        seed += 1;
        ensure(seed < 1000, || "corpus produced too few slices with t > 1".into())?;
        let mut c = Corpus::new(FieldConfig::new(3, 1).unwrap(), 2000 + seed);
        let (lflat, _) = ok(c.corank_one(4, 3, 6), "corpus")?;
        let line = ok(perp_line(&lflat), "perp_line")?;
        let slices: Vec<HermLattice> = ok(integral_overlattices(&lflat), "overlattices")?
            .into_iter()
            .filter(|s| s.invariants().unwrap().t > 1)
            .collect();
        if slices.is_empty() {
            continue;
        }
        let s = &slices[c.rng().gen_range(0..slices.len())];
        let ts = s.invariants().unwrap().t as i64;
        let mut sum = BigInt::zero();
        for e in ok(slice_extensions(s, &line, 0..=0), "extensions")? {
            let t = e.lattice.invariants().unwrap().t;
            ensure((t as i64 - ts).abs() == 1, || format!("type jump {ts} → {t}"))?;
            sum += ok(mu(t, 3), "mu")?;
            members += 1;
        }
        ensure(sum.is_zero(), || format!("seed {}: sum {sum}", 2000 + seed))?;
        done += 1;
    }
    Ok(format!("30 pairs, {members} members"))
}

fn fourier_support() -> Outcome {
    let (mut terms, mut seed, mut done) = (0, 3000u64, 0);
    while done < 20 {
        let p = if done < 10 { 3 } else { 5 };
        let cfg = both_classes(p)[done % 2];
        seed += 1;
        let mut c = Corpus::new(cfg, seed);
        let (lflat, f0) = ok(c.corank_one(4, 5, 5), "corpus")?;
        // Type ≤ 1 gives the zero function, which is vacuous here.
        if ok(lflat.invariants(), "invariants")?.t < 2 {
            continue;
        }
        let f = ok(dden_v_function(&lflat), "dden_v_function")?;
        terms += f.len();
        let ft = ok(f.fourier(), "fourier")?;
        let w = ok(support_outside_vint(&ft), "support")?;
        ensure(w.is_none(), || format!("seed {seed}: witness {w:?}"))?;
        let y = dual_vector(&mut c, &lflat);
        ensure(ok(local_constancy_check(&lflat, &y, &f0), "constancy")?, || format!("seed {seed}: not constant"))?;
        done += 1;
    }
    Ok(format!("20 lattices of type ≥ 2, {terms} terms"))
}

fn geometric_shadow() -> Outcome {
    for p in [3u64, 5] {
        for cfg in both_classes(p) {
            let nr = FieldConfig::smallest_nonresidue(p);
            let mut c = Corpus::new(cfg, 4000 + p);
            let lambda = [1, nr]
                .iter()
                .map(|&g| {
                    let blocks = [1, 1, 1, g].map(|beta| BlockSpec::Diag { beta, b: 0 });
                    HermLattice::standard(HermSpace::new(c.scrambled_gram(&blocks)).unwrap())
                })
                .find(|l| l.space().is_nonsplit().unwrap())
                .unwrap();
            let q = p as i64;
            let proper = ok(vertex_overlattices(&lambda), "vertex")?.len() - 1;
            ensure(proper as i64 == q * q + 1, || format!("p={p}: {proper} proper vertex overlattices"))?;
            let f = ok(int_vlambda_function(&lambda), "int_vlambda")?;
            let space = lambda.space().clone();
            let reps = ok(lambda.dual().unwrap().coset_reps(&lambda, 10_000), "cosets")?;
            for z in &reps {
                let want = if lambda.contains_vec(z) {
                    1 - q
                } else if space.v_int_test(z) {
                    1
                } else {
                    0
                };
                let got = ok(f.evaluate(z), "evaluate")?;
                ensure(got == q_int(want), || format!("p={p}: value {got}, expected {want}"))?;
            }
            let far = vec_scale(&cfg.u_pow(-1), &lambda.dual().unwrap().basis()[0]);
            ensure(f.evaluate(&far).unwrap().is_zero(), || "nonzero outside the dual".into())?;
            let neg = f.scale(&q_int(-1));
            ensure(ok(f.fourier().unwrap().same_function(&neg), "compare")?, || format!("p={p}: FT ≠ −f"))?;
        }
    }
    Ok("p ∈ {3, 5}, both unit classes".into())
}

fn reduction() -> Outcome {
    let (mut special, mut reduced) = (0, 0);
    for i in 0..50u64 {
        let mut c = Corpus::new(FieldConfig::new(3, 1).unwrap(), 5000 + i);
        let (lflat, f0) = ok(c.corank_one(4, 3, 6), "corpus")?;
        let sd = ok(special_data(&lflat), "special_data")?;
        ensure(sd.count == 0 || sd.count == 2, || format!("seed {}: special count {}", 5000 + i, sd.count))?;
        special += usize::from(sd.special);
        let region = ok(SRegion::new(&lflat), "region")?;
        let x = (0..200)
            .map(|_| c.transversal_vector(&lflat, &f0, (-1, 2)).unwrap())
            .find(|x| !lflat.in_span(x) && !region.contains(x))
            .ok_or_else(|| format!("seed {}: no x outside S", 5000 + i))?;
        let (lf, xp) = ok(reduce_pair(&region, &x), "reduce_pair")?;
        let v0 = lflat.invariants().unwrap().val;
        let v1 = lf.val_or_minus_one().unwrap();
        ensure(lf.add_vector(&xp) == lflat.add_vector(&x), || format!("seed {}: lattices differ", 5000 + i))?;
        ensure(v1 < v0, || format!("seed {}: val {v0} → {v1}", 5000 + i))?;
        reduced += 1;
    }
    Ok(format!("{reduced} rewrites, {special} special L♭"))
}

fn split_consistency() -> Outcome {
    let mut vertical = 0;
    for i in 0..50u64 {
        let mut c = Corpus::new(FieldConfig::new(3, 1).unwrap(), 6000 + i);
        let (lflat, f0) = ok(c.corank_one(4, 3, 5), "corpus")?;
        let x = (0..200)
            .map(|_| c.transversal_vector(&lflat, &f0, (0, 2)).unwrap())
            .find(|x| lflat.add_vector(x).is_integral())
            .ok_or_else(|| format!("seed {}: no integral L", 6000 + i))?;
        let l = lflat.add_vector(&x);
        let total = ok(dden(&l, 3), "dden")?.value;
        let (h, v) = ok(dden_split(&lflat, &x, 3), "split")?;
        ensure(total == &h + &v, || format!("seed {}: {total} ≠ {h} + {v}", 6000 + i))?;
        vertical += usize::from(!v.is_zero());
    }
    Ok(format!("50 pairs, {vertical} with a vertical part"))
}

fn coset_counts() -> Outcome {
    let comps: [&[u32]; 7] = [&[1], &[2], &[1, 1], &[3], &[2, 1], &[1, 2], &[1, 1, 1]];
    let comp = |p: &[u32]| Composition::new(p.to_vec()).unwrap();
    let mut cases = 0;
    for p in [2, 3] {
        for m in 1..=2 {
            for parts in comps {
                let c = comp(parts);
                let a = ok(c_m(&c, m, p), "c_m")?;
                let b = ok(c_m_by_group_order(&c, m, p), "group order")?;
                ensure(a == b, || format!("{parts:?} m={m} p={p}: {a} vs {b}"))?;
                cases += 1;
            }
        }
    }
    let chains: [(&[u32], &[&[u32]]); 6] = [
        (&[2, 1], &[&[1, 1], &[1]]),
        (&[1, 2], &[&[1], &[1, 1]]),
        (&[3], &[&[1, 2]]),
        (&[3], &[&[1, 1, 1]]),
        (&[2, 2], &[&[1, 1], &[1, 1]]),
        (&[3, 2], &[&[2, 1], &[2]]),
    ];
    for p in [2, 3, 5] {
        for m in 1..=3 {
            for (coarse, refs) in chains {
                let refs: Vec<Composition> = refs.iter().map(|r| comp(r)).collect();
                let r = ok(refinement_identity(&comp(coarse), &refs, m, p), "refinement")?;
                ensure(r.holds, || format!("{coarse:?} p={p} m={m}: {r:?}"))?;
            }
        }
    }
    let f52 = (c_m(&comp(&[1, 1, 1]), 1, 3).unwrap(), c_m_by_group_order(&comp(&[1, 1, 1]), 1, 3).unwrap());
    let f12 = (c_m(&comp(&[1, 1]), 2, 3).unwrap(), c_m_by_group_order(&comp(&[1, 1]), 2, 3).unwrap());
    ensure(f52 == (52.into(), 52.into()) && f12 == (12.into(), 12.into()), || format!("fixed points {f52:?} {f12:?}"))?;
    Ok(format!("{cases} group-order checks, 54 refinements, 52 and 12 reproduced"))
}

fn property_suite() -> Outcome {
    let mut naive = 0;
    for i in 0..500u64 {
        let cfg = both_classes(3)[(i % 2) as usize];
        let mut c = Corpus::new(cfg, 7000 + i);
        let n = 1 + (i % 4) as usize;
        let l = c.integral_lattice(n, 3, 6);
        let inv = l.invariants().unwrap();
        let tag = || format!("seed {}", 7000 + i);
        let dd = ok(l.dual().and_then(|d| d.dual()), "dual")?;
        ensure(dd == l, || format!("{}: dual involution", tag()))?;
        // Volumes are rational only in even dimension.
        if n.is_multiple_of(2) {
            let f = LatticeFunction::from_terms([(q_int(2), l.clone()), (q_int(-1), l.rescale(&cfg.u()))]);
            ensure(ok(f.fourier().and_then(|g| g.fourier()), "fourier")? == f, || format!("{}: Fourier inversion", tag()))?;
        }
        ensure(inv.t % 2 == n % 2 && inv.val.rem_euclid(2) as usize == n % 2, || format!("{}: parity {inv:?}", tag()))?;
        let other = c.integral_lattice(1 + (i % 3) as usize, 3, 6);
        let sum = ok(HermLattice::orthogonal_sum(&l, &other), "orthogonal sum")?;
        let mut merged = [inv.a.clone(), other.invariants().unwrap().a].concat();
        merged.sort_unstable();
        ensure(sum.invariants().unwrap().a == merged, || format!("{}: merge", tag()))?;
        let unit = &cfg.int(c.rng().gen_range(1..3)) + &cfg.u();
        ensure(l.rescale(&unit).invariants().unwrap() == inv, || format!("{}: unit rescale", tag()))?;
        let beta = c.rng().gen_range(1..3);
        let g = l.space().gram().scale(&cfg.int(beta));
        let scaled = HermLattice::standard(HermSpace::new(g).unwrap());
        ensure(scaled.invariants().unwrap() == inv, || format!("{}: gram rescale", tag()))?;
        if inv.val <= 5 {
            let a = ok(naive_integral_overlattices(&l), "naive")?;
            let b = ok(integral_overlattices(&l), "enumerate")?;
            ensure(a == b, || format!("{}: naive {} vs enumerate {}", tag(), a.len(), b.len()))?;
            naive += 1;
        }
    }
    Ok(format!("500 cases, {naive} naive-oracle comparisons"))
}

fn main() {
    type Criterion = (&'static str, u64, fn() -> Outcome);
    let criteria: [Criterion; 12] = [
        ("rank-2 closed formula", 10, rank2_closed),
        ("central vanishing", 60, central_vanishing),
        ("density oracle", 120, density_oracle),
        ("isometry counts", 60, isometry_counts),
        ("coset identity", 60, coset_identity),
        ("corank-one vanishing", 120, corank_one_vanishing),
        ("Fourier support", 300, fourier_support),
        ("geometric-shadow function", 60, geometric_shadow),
        ("reduction machinery", 120, reduction),
        ("split consistency", 120, split_consistency),
        ("coset counts C_m", 10, coset_counts),
        ("property suite", 120, property_suite),
    ];
    let only: Option<usize> = std::env::var("ACCEPTANCE_ONLY").ok().and_then(|s| s.parse().ok());
    let mut failed = 0;
    for (k, (name, budget, run)) in criteria.iter().enumerate() {
        if only.is_some_and(|o| o != k + 1) {
            continue;
        }
        let start = Instant::now();
        let res = std::panic::catch_unwind(run).unwrap_or_else(|_| Err("panicked".into()));
        let took = start.elapsed();
        let over = took > Duration::from_secs(*budget);
        let (status, detail) = match (&res, over) {
            (Ok(d), false) => ("PASS", d.clone()),
            (Ok(d), true) => ("FAIL", format!("{d}; over the {budget} s budget")),
            (Err(e), _) => ("FAIL", e.clone()),
        };
        if status == "FAIL" {
            failed += 1;
        }
        println!("criterion {:>2} {status} {name}: {detail} ({:.2} s)", k + 1, took.as_secs_f64());
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
