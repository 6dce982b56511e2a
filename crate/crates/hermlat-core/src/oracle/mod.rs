//! Brute-force counters used to check the closed formulas at small sizes.

mod quotient;

pub use quotient::{naive_integral_overlattices, quotient_invariants, FiniteQuotient};

use std::collections::HashMap;

use num_traits::Zero;
use rayon::prelude::*;
use serde::Serialize;

use crate::efield::Matrix;
use crate::error::{Error, Result};
use crate::hermlat::HermLattice;
use crate::rational::{p_pow, q_int, residue_pow, val_p, Q};

/// Enumeration budget for a single brute-force loop.
const WORK_CAP: u64 = 100_000_000;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HomCountResult {
    pub raw_count: u128,
    pub level: u32,
    #[serde(serialize_with = "crate::rational::ser_q")]
    pub normalized: Q,
    pub d: i64,
}

/// O_E/p^N as pairs (a, b) meaning a + b·u.
#[derive(Clone, Copy)]
struct Ring {
    m: u64,
    pe: u64,
}

impl Ring {
    fn mul(self, x: (u64, u64), y: (u64, u64)) -> (u64, u64) {
        let m = self.m;
        let a = (x.0 * y.0 + x.1 * y.1 % m * self.pe) % m;
        let b = (x.0 * y.1 + x.1 * y.0) % m;
        (a, b)
    }

    fn conj(self, x: (u64, u64)) -> (u64, u64) {
        (x.0, (self.m - x.1) % self.m)
    }

    fn sub(self, x: (u64, u64), y: (u64, u64)) -> (u64, u64) {
        ((x.0 + self.m - y.0) % self.m, (x.1 + self.m - y.1) % self.m)
    }
}

/// Keys are u·T(x) entries: the u-coefficient of each diagonal entry, then
/// both coordinates of each entry above the diagonal, in mixed radix P.
fn plane_key(ring: Ring, xs: &[[(u64, u64); 2]]) -> u64 {
    let m = ring.m;
    let w = |i: usize, j: usize| {
        let a = ring.mul(xs[i][0], ring.conj(xs[j][1]));
        let b = ring.mul(xs[i][1], ring.conj(xs[j][0]));
        ring.sub(a, b)
    };
    let mut key = 0u64;
    for i in 0..xs.len() {
        key = key * m + w(i, i).1;
    }
    for i in 0..xs.len() {
        for j in i + 1..xs.len() {
            let e = w(i, j);
            key = (key * m + e.0) * m + e.1;
        }
    }
    key
}

fn add_keys(a: u64, b: u64, m: u64, len: usize) -> u64 {
    let (mut a, mut b) = (a, b);
    let mut out = 0u64;
    let mut scale = 1u64;
    for _ in 0..len {
        out += ((a % m + b % m) % m) * scale;
        a /= m;
        b /= m;
        scale *= m;
    }
    out
}

fn sub_keys(a: u64, b: u64, m: u64, len: usize) -> u64 {
    let (mut a, mut b) = (a, b);
    let mut out = 0u64;
    let mut scale = 1u64;
    for _ in 0..len {
        out += ((a % m + m - b % m) % m) * scale;
        a /= m;
        b /= m;
        scale *= m;
    }
    out
}

/// Distribution of plane keys over all m-tuples in one hyperbolic plane mod p^N.
fn plane_distribution(ring: Ring, m: usize) -> HashMap<u64, u128> {
    let p2 = ring.m * ring.m;
    let total = p2.pow(2 * m as u32);
    (0..total)
        .into_par_iter()
        .fold(HashMap::new, |mut acc: HashMap<u64, u128>, mut idx| {
            let mut xs = vec![[(0, 0); 2]; m];
            for x in xs.iter_mut() {
                for c in x.iter_mut() {
                    let e = idx % p2;
                    idx /= p2;
                    *c = (e % ring.m, e / ring.m);
                }
            }
            *acc.entry(plane_key(ring, &xs)).or_default() += 1;
            acc
        })
        .reduce(HashMap::new, |mut a, b| {
            for (k, v) in b {
                *a.entry(k).or_default() += v;
            }
            a
        })
}

/// Counts x ∈ (H_s ⊗ O_E/u^{2N})^m with T(x) ≡ T: diagonal modulo p^N,
/// off-diagonal modulo u^{2N−1}. Normalized by q^{N·m(4s−m)}.
pub fn count_herm_homs(gram: &Matrix, s: u32, level: u32) -> Result<HomCountResult> {
    let cfg = gram.cfg();
    let p = cfg.p;
    let m = gram.rows();
    if !gram.is_hermitian() {
        return Err(Error::NotHermitian);
    }
    if m == 0 || m > 2 || s == 0 || s > 2 || level == 0 || level > 3 || p > 5 {
        return Err(Error::TooLarge(format!("need m ≤ 2, 1 ≤ s ≤ 2, 1 ≤ N ≤ 3, p ≤ 5; got m={m}, s={s}, N={level}, p={p}")));
    }
    let pm = p.pow(level);
    if (pm as u128).pow(4 * m as u32) > WORK_CAP as u128 {
        return Err(Error::TooLarge(format!("p^(4Nm) = {p}^{} exceeds the work cap", 4 * level as usize * m)));
    }
    let d = (m as i64) * (4 * s as i64 - m as i64);
    let normalized_of = |raw: u128| Q::from_integer(raw.into()) * p_pow(p, -(level as i64) * d);
    let pe = residue_pow(&(q_int(p as i64) * q_int(cfg.eps0)), p, level)?;
    let ring = Ring { m: pm, pe };
    // Target key from u·T.
    let mut target = 0u64;
    let mut integral = true;
    let mut digit = |x: &Q| match val_p(x, p) {
        Some(v) if v < 0 => {
            integral = false;
            0
        }
        _ => residue_pow(x, p, level).expect("p-integral"),
    };
    for i in 0..m {
        let t = gram.get(i, i);
        target = target * pm + digit(t.a());
    }
    for i in 0..m {
        for j in i + 1..m {
            let ut = &cfg.u() * gram.get(i, j);
            target = (target * pm + digit(ut.a())) * pm + digit(ut.b());
        }
    }
    if !integral {
        return Ok(HomCountResult { raw_count: 0, level, normalized: Q::zero(), d });
    }
    let len = m * m;
    let dist = plane_distribution(ring, m);
    let mut acc: HashMap<u64, u128> = HashMap::from([(0, 1)]);
    for _ in 1..s {
        let mut next: HashMap<u64, u128> = HashMap::new();
        for (k1, v1) in &acc {
            for (k2, v2) in &dist {
                *next.entry(add_keys(*k1, *k2, pm, len)).or_default() += v1 * v2;
            }
        }
        acc = next;
    }
    let raw: u128 = acc
        .iter()
        .map(|(k, v)| v * dist.get(&sub_keys(target, *k, pm, len)).copied().unwrap_or(0))
        .sum();
    Ok(HomCountResult { raw_count: raw, level, normalized: normalized_of(raw), d })
}

/// q^{m(4s−m+1)/2}·Π_{s−(m+t')/2 < i ≤ s} (1 − q^{−2i}).
pub fn symplectic_isom_formula(m: u32, radical: u32, s: u32, q: u64) -> Result<Q> {
    check_symplectic_args(m, radical)?;
    let (m, t, s) = (m as i64, radical as i64, s as i64);
    let lead = p_pow(q, m * (4 * s - m + 1) / 2);
    let lo = s - (m + t) / 2;
    Ok(((lo + 1)..=s).fold(lead, |acc, i| acc * (q_int(1) - p_pow(q, -2 * i))))
}

fn check_symplectic_args(m: u32, radical: u32) -> Result<()> {
    if radical > m || (m - radical) % 2 == 1 {
        return Err(Error::Domain(format!("radical dimension {radical} has the wrong parity for m = {m}")));
    }
    Ok(())
}

/// Injective isometries from the m-dimensional alternating space with radical
/// of dimension t' into the standard 2s-dimensional symplectic space over F_q.
pub fn count_symplectic_isoms(m: u32, radical: u32, s: u32, q: u64) -> Result<u64> {
    check_symplectic_args(m, radical)?;
    if !crate::rational::is_odd_prime(q) || q > 3 || m > 3 || s > 3 {
        return Err(Error::TooLarge(format!("need q odd prime ≤ 3, m ≤ 3, 2s ≤ 6; got q={q}, m={m}, s={s}")));
    }
    let n = 2 * s as usize;
    let m = m as usize;
    // Source form: hyperbolic pairs on the first m − t' coordinates.
    let mut gram = vec![vec![0i64; m]; m];
    for k in (0..m - radical as usize).step_by(2) {
        gram[k][k + 1] = 1;
        gram[k + 1][k] = -1;
    }
    let vectors: Vec<Vec<u64>> = (0..q.pow(n as u32))
        .map(|mut idx| {
            (0..n)
                .map(|_| {
                    let d = idx % q;
                    idx /= q;
                    d
                })
                .collect()
        })
        .collect();
    let form = |x: &[u64], y: &[u64]| -> u64 {
        let mut acc = 0u64;
        for i in 0..s as usize {
            acc += x[2 * i] * y[2 * i + 1] + (q - 1) * x[2 * i + 1] * y[2 * i] % q;
        }
        acc % q
    };
    let target = |i: usize, j: usize| gram[i][j].rem_euclid(q as i64) as u64;
    fn extend(
        chosen: &mut Vec<usize>,
        vectors: &[Vec<u64>],
        m: usize,
        q: u64,
        form: &dyn Fn(&[u64], &[u64]) -> u64,
        target: &dyn Fn(usize, usize) -> u64,
    ) -> u64 {
        let k = chosen.len();
        if k == m {
            return u64::from(independent(chosen.iter().map(|&i| vectors[i].clone()).collect(), q));
        }
        let mut total = 0;
        for (idx, v) in vectors.iter().enumerate() {
            if form(v, v) != target(k, k) {
                continue;
            }
            if chosen.iter().enumerate().all(|(i, &c)| form(&vectors[c], v) == target(i, k)) {
                chosen.push(idx);
                total += extend(chosen, vectors, m, q, form, target);
                chosen.pop();
            }
        }
        total
    }
    if m == 0 {
        return Ok(1);
    }
    let firsts: Vec<usize> = (0..vectors.len()).filter(|&i| form(&vectors[i], &vectors[i]) == target(0, 0)).collect();
    Ok(firsts
        .into_par_iter()
        .map(|i| {
            let mut chosen = vec![i];
            extend(&mut chosen, &vectors, m, q, &form, &target)
        })
        .sum())
}

/// Linear independence over F_q by row reduction.
fn independent(mut rows: Vec<Vec<u64>>, q: u64) -> bool {
    let n = rows.first().map_or(0, Vec::len);
    let mut rank = 0;
    for col in 0..n {
        let Some(piv) = (rank..rows.len()).find(|&r| rows[r][col] != 0) else { continue };
        rows.swap(rank, piv);
        let inv = crate::rational::inv_mod(rows[rank][col], q);
        for r in 0..rows.len() {
            if r != rank && rows[r][col] != 0 {
                let c = rows[r][col] * inv % q;
                for j in 0..n {
                    rows[r][j] = (rows[r][j] + q * q - c * rows[rank][j] % q) % q;
                }
            }
        }
        rank += 1;
    }
    rank == rows.len()
}

/// |(u^k·L^∨)^int / L| by walking coset representatives.
pub fn coset_count_vint(l: &HermLattice, k: u32) -> Result<u64> {
    if k > 1 {
        return Err(Error::Domain(format!("scale must be 0 or 1, got {k}")));
    }
    let m = l.rank();
    let inv = l.invariants()?;
    if m.is_multiple_of(2) || inv.t != m {
        return Err(Error::Precondition(format!("need odd rank with t = rank; rank {m}, t {}", inv.t)));
    }
    let cfg = l.cfg();
    let big = l.dual()?.rescale(&cfg.u_pow(k as i64));
    let reps = big.coset_reps(l, 1_000_000)?;
    let space = l.space();
    Ok(reps.par_iter().filter(|y| space.v_int_test(y)).count() as u64)
}
