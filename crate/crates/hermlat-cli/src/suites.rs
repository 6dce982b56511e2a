//! Verification suites. Every case recomputes one quantity along two
//! independent routes and records both as strings.
//!
//! Random inputs come from the seeded corpus: case i of a suite draws its
//! lattice from `Corpus::new(cfg, case_seed(seed, suite, i))`, so a case
//! does not depend on which worker runs it.

use num_bigint::BigInt;
use num_traits::Zero;
use rand::Rng;
use rayon::prelude::*;
use serde_json::{json, Value};

use hermlat_core::corpus::{all_positive_type, lattice_from_blocks, BlockSpec, Corpus};
use hermlat_core::density::{archimedean_constant, dden, dden_rank2_closed, dden_split, den_hs, mu, siegel_series};
use hermlat_core::efield::{vec_add, vec_scale, FieldConfig, Matrix, Vector};
use hermlat_core::enumerate::{
    integral_overlattices, perp_line, reduce_pair, slice_extensions, special_data, vertex_overlattices, SRegion,
};
use hermlat_core::glcount::{c_m, c_m_by_group_order, refinement_identity, Composition};
use hermlat_core::hermlat::{vector_to_json, HermLattice, HermSpace, LatticeJson};
use hermlat_core::oracle::{count_herm_homs, count_symplectic_isoms, coset_count_vint, symplectic_isom_formula};
use hermlat_core::rational::{fmt_q, q_int, Q};
use hermlat_core::schwartz::{dden_v_function, int_vlambda_function, local_constancy_check, support_outside_vint};

use crate::report::{sig12, Case};
use crate::{CliError, CliResult};

pub const SUITES: [&str; 9] = ["density", "isom", "coset", "vanishing", "ft", "geom3", "reduction", "special", "glcount"];

#[derive(Clone, Copy, Debug)]
pub struct Params {
    pub p: u64,
    pub eps0: i64,
    pub max_val: i64,
    pub seed: u64,
}

impl Params {
    fn cfg(&self) -> CliResult<FieldConfig> {
        Ok(FieldConfig::new(self.p, self.eps0)?)
    }

    fn base(&self, suite: &str) -> Value {
        json!({"suite": suite, "p": self.p, "eps0": self.eps0, "max_val": self.max_val})
    }
}

fn case_seed(seed: u64, suite: &str, i: usize) -> u64 {
    let tag = suite.bytes().fold(0u64, |h, b| h.wrapping_mul(131).wrapping_add(b as u64));
    seed.wrapping_mul(0x9e37_79b9_7f4a_7c15).wrapping_add(tag << 20).wrapping_add(i as u64)
}

fn lattice_json(l: &HermLattice) -> Value {
    serde_json::to_value(LatticeJson::from_lattice(l)).expect("plain data")
}

fn with(base: &Value, extra: Value) -> Value {
    let mut v = base.clone();
    if let (Value::Object(a), Value::Object(b)) = (&mut v, extra) {
        a.extend(b);
    }
    v
}

/// `expected` when `ok`, else the observed value.
fn check(ok: bool, expected: &str, observed: impl FnOnce() -> String) -> (String, String) {
    let actual = if ok { expected.to_string() } else { observed() };
    (expected.to_string(), actual)
}

/// Runs `job(i)` for i in 0..n, in order of i whatever the worker count.
fn run_indexed<F>(n: usize, job: F) -> CliResult<Vec<Case>>
where
    F: Fn(usize) -> CliResult<Vec<Case>> + Sync,
{
    let parts: Vec<Vec<Case>> = (0..n).into_par_iter().map(&job).collect::<CliResult<_>>()?;
    Ok(parts.into_iter().flatten().collect())
}

pub fn run_suite(name: &str, params: &Params) -> CliResult<Vec<Case>> {
    if params.max_val < 1 {
        return Err(CliError::Input("--max-val must be at least 1".into()));
    }
    params.cfg()?;
    match name {
        "density" => density(params),
        "isom" => isom(params),
        "coset" => coset(params),
        "vanishing" => vanishing(params),
        "ft" => ft(params),
        "geom3" => geom3(params),
        "reduction" => reduction(params),
        "special" => special(params),
        "glcount" => glcount(params),
        "all" => {
            let mut out = Vec::new();
            for s in SUITES {
                for mut c in run_suite(s, params)? {
                    c.id = format!("{s}/{}", c.id);
                    out.push(c);
                }
            }
            Ok(out)
        }
        _ => Err(CliError::Input(format!("unknown suite {name}"))),
    }
}

fn nonsplit_diag(cfg: FieldConfig, d: &[i64]) -> CliResult<Option<HermLattice>> {
    let e: Vec<_> = d.iter().map(|&x| cfg.int(x)).collect();
    let l = HermLattice::standard(HermSpace::diagonal(cfg, &e)?);
    Ok(l.space().is_nonsplit()?.then_some(l))
}

/// Deferred (expected, actual) computation.
type Pair = Box<dyn Fn() -> CliResult<(String, String)> + Sync>;

/// (−1)^r 2^{r(r−1)} π^{r²} Π (i−1)!/(r+i−1)!, by direct products.
fn archimedean_direct(r: u32) -> f64 {
    let fact = |k: u32| (1..=k).map(f64::from).product::<f64>();
    let ratio: f64 = (1..=r).map(|i| fact(i - 1) / fact(r + i - 1)).product();
    let sign = if r.is_multiple_of(2) { 1.0 } else { -1.0 };
    sign * 2f64.powi((r * (r - 1)) as i32) * std::f64::consts::PI.powi((r * r) as i32) * ratio
}

fn density(params: &Params) -> CliResult<Vec<Case>> {
    let cfg = params.cfg()?;
    let p = params.p;
    let base = params.base("density");
    let nr = FieldConfig::smallest_nonresidue(p);
    let mut jobs: Vec<(String, Value, Pair)> = Vec::new();
    if p <= 5 {
        for b in (0..=1u32).filter(|b| 2 * b < params.max_val as u32) {
            for beta in [1, nr] {
                for s in 1..=2u32 {
                    let gram = Matrix::diagonal(cfg, &[cfg.int(beta * (p as i64).pow(b))]);
                    let inputs = with(&base, json!({"rank1": [beta, b], "s": s, "level": 2}));
                    jobs.push((
                        format!("homs/beta{beta}/b{b}/s{s}"),
                        inputs,
                        Box::new(move || {
                            let l = HermLattice::standard(HermSpace::new(gram.clone())?);
                            let want = fmt_q(&den_hs(&l, s as i64, p)?);
                            let got = fmt_q(&count_herm_homs(&gram, s, 2)?.normalized);
                            Ok((want, got))
                        }),
                    ));
                }
            }
        }
    }
    for b1 in 0..=3u32 {
        for b2 in b1..=3u32 {
            if (2 * (b1 + b2) + 2) as i64 > params.max_val {
                continue;
            }
            for (k, beta) in [(1, 1), (1, nr)].into_iter().enumerate() {
                let d = [beta.0 * (p as i64).pow(b1), beta.1 * (p as i64).pow(b2)];
                let Some(l) = nonsplit_diag(cfg, &d)? else { continue };
                let inputs = with(&base, json!({"rank2": [b1, b2], "diag": d}));
                jobs.push((
                    format!("rank2/b{b1}{b2}/{k}"),
                    inputs,
                    Box::new(move || Ok((dden_rank2_closed(b1, b2, p)?.to_string(), dden(&l, p)?.value.to_string()))),
                ));
            }
        }
    }
    for r in 1..=3u32 {
        jobs.push((
            format!("archimedean/r{r}"),
            with(&base, json!({"archimedean": r})),
            Box::new(move || Ok((sig12(archimedean_direct(r)), sig12(archimedean_constant(r))))),
        ));
    }
    run_indexed(jobs.len(), |i| {
        let (id, inputs, f) = &jobs[i];
        let (want, got) = f()?;
        Ok(vec![Case::new(id.clone(), inputs, want, got)])
    })
}

/// Isometry counts are brute force over F_3.
fn isom(params: &Params) -> CliResult<Vec<Case>> {
    let base = params.base("isom");
    let mut tuples = Vec::new();
    for m in 0..=3u32 {
        for t in (0..=m).filter(|t| (m - t) % 2 == 0) {
            for s in 0..=3u32 {
                tuples.push((m, t, s));
            }
        }
    }
    run_indexed(tuples.len(), |i| {
        let (m, t, s) = tuples[i];
        let want = fmt_q(&symplectic_isom_formula(m, t, s, 3)?);
        let got = fmt_q(&Q::from_integer(count_symplectic_isoms(m, t, s, 3)?.into()));
        let inputs = with(&base, json!({"q": 3, "m": m, "radical": t, "s": s}));
        Ok(vec![Case::new(format!("m{m}/t{t}/s{s}"), &inputs, want, got)])
    })
}

fn coset(params: &Params) -> CliResult<Vec<Case>> {
    let cfg = params.cfg()?;
    let base = params.base("coset");
    let q = params.p;
    let mut lists = Vec::new();
    for rank in [1usize, 3] {
        for blocks in all_positive_type(cfg, rank, params.max_val) {
            lists.push((rank, blocks));
        }
    }
    run_indexed(lists.len(), |i| {
        let (rank, blocks) = &lists[i];
        let l = lattice_from_blocks(cfg, blocks)?;
        let m = (*rank as u32 - 1) / 2;
        let k0 = coset_count_vint(&l, 0)?;
        let k1 = coset_count_vint(&l, 1)?;
        let want = (BigInt::from(q).pow(2 * m) * k1).to_string();
        let inputs = with(&base, json!({"lattice": lattice_json(&l)}));
        Ok(vec![Case::new(format!("rank{rank}/{i:03}"), &inputs, want, k0.to_string())])
    })
}

const VANISHING_CASES: usize = 20;

fn vanishing(params: &Params) -> CliResult<Vec<Case>> {
    let cfg = params.cfg()?;
    let base = params.base("vanishing");
    let mut cases = run_indexed(VANISHING_CASES, |i| {
        let n = if i % 2 == 0 { 2 } else { 4 };
        let seed = case_seed(params.seed, "vanishing", i);
        let l = Corpus::new(cfg, seed).nonsplit_lattice(n, 4, params.max_val.max(n as i64))?;
        let value = siegel_series(&l, params.p)?.eval(&q_int(1));
        let inputs = with(&base, json!({"seed": seed, "lattice": lattice_json(&l)}));
        Ok(vec![Case::new(format!("central/{i:03}"), &inputs, fmt_q(&q_int(0)), fmt_q(&value))])
    })?;
    cases.extend(run_indexed(VANISHING_CASES, |i| {
        // Draw until some slice has type > 1.
        for attempt in 0..100 {
            let seed = case_seed(params.seed, "vanishing-corank1", 100 * i + attempt);
            let mut c = Corpus::new(cfg, seed);
            let (lflat, _) = c.corank_one(4, 3, params.max_val.max(3))?;
            let line = perp_line(&lflat)?;
            let slices: Vec<HermLattice> =
                integral_overlattices(&lflat)?.into_iter().filter(|s| s.invariants().is_ok_and(|v| v.t > 1)).collect();
            if slices.is_empty() {
                continue;
            }
            let s = &slices[c.rng().gen_range(0..slices.len())];
            let mut sum = BigInt::zero();
            for e in slice_extensions(s, &line, 0..=0)? {
                sum += mu(e.lattice.invariants()?.t, params.p)?;
            }
            let inputs = with(&base, json!({"seed": seed, "slice": lattice_json(s)}));
            return Ok(vec![Case::new(format!("corank1/{i:03}"), &inputs, "0", sum.to_string())]);
        }
        Err(CliError::Input("no slice of type > 1 within the --max-val bound".into()))
    })?);
    Ok(cases)
}

const FT_CASES: usize = 3;

fn dual_vector(c: &mut Corpus, l: &HermLattice) -> CliResult<Vector> {
    let cfg = c.cfg();
    let mut y = l.space().zero_vector();
    for b in l.dual()?.basis() {
        let k = c.rng().gen_range(0..cfg.p as i64);
        y = vec_add(&y, &vec_scale(&cfg.int(k), b));
    }
    Ok(y)
}

fn ft(params: &Params) -> CliResult<Vec<Case>> {
    let cfg = params.cfg()?;
    let base = params.base("ft");
    let parts = run_indexed(FT_CASES, |i| {
        for attempt in 0..100 {
            let seed = case_seed(params.seed, "ft", 100 * i + attempt);
            let mut c = Corpus::new(cfg, seed);
            let (lflat, f0) = c.corank_one(4, params.max_val, params.max_val)?;
            if lflat.invariants()?.t < 2 {
                continue;
            }
            let inputs = with(&base, json!({"seed": seed, "lflat": lattice_json(&lflat)}));
            let w = support_outside_vint(&dden_v_function(&lflat)?.fourier()?)?;
            let actual = w.map_or("none".to_string(), |w| serde_json::to_string(&vector_to_json(&w)).expect("plain data"));
            let y = dual_vector(&mut c, &lflat)?;
            let constant = local_constancy_check(&lflat, &y, &f0)?;
            return Ok(vec![
                Case::new(format!("support/{i}"), &inputs, "none", actual),
                Case::new(format!("constancy/{i}"), &inputs, "true", constant.to_string()),
            ]);
        }
        Err(CliError::Input("no L♭ of type ≥ 2 within the --max-val bound".into()))
    })?;
    Ok(parts)
}

fn geom3(params: &Params) -> CliResult<Vec<Case>> {
    let cfg = params.cfg()?;
    let base = params.base("geom3");
    let q = params.p as i64;
    let nr = FieldConfig::smallest_nonresidue(params.p);
    let mut c = Corpus::new(cfg, case_seed(params.seed, "geom3", 0));
    let mut lambda = None;
    for g in [1, nr] {
        let blocks = [1, 1, 1, g].map(|beta| BlockSpec::Diag { beta, b: 0 });
        let l = HermLattice::standard(HermSpace::new(c.scrambled_gram(&blocks))?);
        if l.space().is_nonsplit()? {
            lambda = Some(l);
        }
    }
    let lambda = lambda.ok_or_else(|| CliError::Failure("no nonsplit unit diagonal".into()))?;
    let inputs = with(&base, json!({"lambda": lattice_json(&lambda)}));
    let mut cases = Vec::new();
    let proper = vertex_overlattices(&lambda)?.len() - 1;
    cases.push(Case::new("proper-vertex", &inputs, (q * q + 1).to_string(), proper.to_string()));
    let f = int_vlambda_function(&lambda)?;
    let space = lambda.space().clone();
    for (k, z) in lambda.dual()?.coset_reps(&lambda, 10_000)?.iter().enumerate() {
        let want = if lambda.contains_vec(z) {
            1 - q
        } else if space.v_int_test(z) {
            1
        } else {
            0
        };
        let zin = with(&inputs, json!({"z": vector_to_json(z)}));
        cases.push(Case::new(format!("value/{k:03}"), &zin, fmt_q(&q_int(want)), fmt_q(&f.evaluate(z)?)));
    }
    let same = f.fourier()?.same_function(&f.scale(&q_int(-1)))?;
    cases.push(Case::new("fourier", &inputs, "true", same.to_string()));
    Ok(cases)
}

const REDUCTION_CASES: usize = 10;

fn reduction(params: &Params) -> CliResult<Vec<Case>> {
    let cfg = params.cfg()?;
    let base = params.base("reduction");
    let mut cases = run_indexed(REDUCTION_CASES, |i| {
        let seed = case_seed(params.seed, "reduction", i);
        let mut c = Corpus::new(cfg, seed);
        let (lflat, f0) = c.corank_one(4, 3, params.max_val.max(3))?;
        let region = SRegion::new(&lflat)?;
        let Some(x) = (0..200)
            .map(|_| c.transversal_vector(&lflat, &f0, (-1, 2)))
            .collect::<Result<Vec<_>, _>>()?
            .into_iter()
            .find(|x| !lflat.in_span(x) && !region.contains(x))
        else {
            return Ok(Vec::new());
        };
        let inputs = with(&base, json!({"seed": seed, "lflat": lattice_json(&lflat), "x": vector_to_json(&x)}));
        let (lf, xp) = reduce_pair(&region, &x)?;
        let v0 = lflat.invariants()?.val;
        let v1 = lf.val_or_minus_one()?;
        let same = lf.add_vector(&xp) == lflat.add_vector(&x);
        let (we, wa) = check(v1 < v0, "val decreases", || format!("val {v0} -> {v1}"));
        Ok(vec![
            Case::new(format!("{i:03}/lattice"), &inputs, "equal", if same { "equal" } else { "different" }),
            Case::new(format!("{i:03}/val"), &inputs, we, wa),
        ])
    })?;
    cases.extend(run_indexed(REDUCTION_CASES, |i| {
        let seed = case_seed(params.seed, "split", i);
        let mut c = Corpus::new(cfg, seed);
        let (lflat, f0) = c.corank_one(4, 3, params.max_val.max(3))?;
        let candidates = (0..200).map(|_| c.transversal_vector(&lflat, &f0, (0, 2))).collect::<Result<Vec<_>, _>>()?;
        let Some(x) = candidates.into_iter().find(|x| lflat.add_vector(x).is_integral()) else {
            return Ok(Vec::new());
        };
        let inputs = with(&base, json!({"seed": seed, "lflat": lattice_json(&lflat), "x": vector_to_json(&x)}));
        let total = dden(&lflat.add_vector(&x), params.p)?.value;
        let (h, v) = dden_split(&lflat, &x, params.p)?;
        Ok(vec![Case::new(format!("{i:03}/split"), &inputs, total.to_string(), (h + v).to_string())])
    })?);
    Ok(cases)
}

const SPECIAL_CASES: usize = 10;

fn special(params: &Params) -> CliResult<Vec<Case>> {
    let cfg = params.cfg()?;
    let base = params.base("special");
    let count_case = |id: String, lflat: &HermLattice, seed: Option<u64>| -> CliResult<Case> {
        let inputs = with(&base, json!({"seed": seed, "lflat": lattice_json(lflat)}));
        // special_data checks the structure of L♭± itself when it finds two.
        let sd = special_data(lflat)?;
        let (we, wa) = check(sd.count == 0 || sd.count == 2, "0 or 2", || sd.count.to_string());
        Ok(Case::new(id, &inputs, we, wa))
    };
    let mut cases = run_indexed(SPECIAL_CASES, |i| {
        let seed = case_seed(params.seed, "special", i);
        let (lflat, _) = Corpus::new(cfg, seed).corank_one(4, 3, params.max_val.max(3))?;
        Ok(vec![count_case(format!("{i:03}"), &lflat, Some(seed))?])
    })?;
    // ⟨e1, e2, e3⟩ in diag(1, 1, p, γ): a_max = 3 sits over a unit part.
    let nr = FieldConfig::smallest_nonresidue(params.p);
    for g in [1, nr] {
        if let Some(l) = nonsplit_diag(cfg, &[1, 1, params.p as i64, g])? {
            let lflat = HermLattice::new(l.space().clone(), (0..3).map(|i| l.space().basis_vector(i)).collect())?;
            cases.push(count_case("unit-plus-p".into(), &lflat, None)?);
        }
    }
    Ok(cases)
}

fn glcount(params: &Params) -> CliResult<Vec<Case>> {
    let base = params.base("glcount");
    let comps: [&[u32]; 7] = [&[1], &[2], &[1, 1], &[3], &[2, 1], &[1, 2], &[1, 1, 1]];
    let comp = |p: &[u32]| Composition::new(p.to_vec()).map_err(CliError::from);
    let mut cases = Vec::new();
    for p in [2u64, 3] {
        for m in 1..=2u32 {
            for parts in comps {
                let c = comp(parts)?;
                let inputs = with(&base, json!({"parts": parts, "m": m, "prime": p}));
                let want = c_m_by_group_order(&c, m, p)?.to_string();
                cases.push(Case::new(format!("order/p{p}/m{m}/{parts:?}"), &inputs, want, c_m(&c, m, p)?.to_string()));
            }
        }
    }
    let chains: [(&[u32], &[&[u32]]); 4] = [
        (&[2, 1], &[&[1, 1], &[1]]),
        (&[3], &[&[1, 2]]),
        (&[3], &[&[1, 1, 1]]),
        (&[2, 2], &[&[1, 1], &[1, 1]]),
    ];
    for m in 1..=3u32 {
        for (coarse, refs) in chains {
            let inputs = with(&base, json!({"coarse": coarse, "refinements": refs, "m": m}));
            let refs: Vec<Composition> = refs.iter().map(|r| comp(r)).collect::<CliResult<_>>()?;
            let r = refinement_identity(&comp(coarse)?, &refs, m, params.p)?;
            let product = r.coarse.clone() * &r.blocks;
            cases.push(Case::new(format!("refine/m{m}/{coarse:?}"), &inputs, r.refined.to_string(), product.to_string()));
        }
    }
    for (parts, m, want) in [(&[1u32, 1, 1][..], 1u32, 52), (&[1, 1][..], 2, 12)] {
        let inputs = with(&base, json!({"parts": parts, "m": m, "prime": 3}));
        let got = c_m(&comp(parts)?, m, 3)?.to_string();
        cases.push(Case::new(format!("fixed/{want}"), &inputs, want.to_string(), got));
    }
    Ok(cases)
}
