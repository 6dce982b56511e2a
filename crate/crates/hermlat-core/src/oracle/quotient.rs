//! The finite group L^∨/L built from Z_p coordinates and a Smith form,
//! without the O_E echelon machinery, for cross-checking enumerations.

use std::collections::HashSet;

use crate::efield::{vec_add, vec_scale, Elem, Vector};
use crate::enumerate::sort_lattices;
use crate::error::{Error, Result};
use crate::hermlat::HermLattice;
use crate::rational::{q_int, residue_pow, val_p};

const SUBGROUP_CAP: usize = 200_000;

/// L^∨/L ≅ ⊕ Z/p^{e_j} with the action of u.
#[derive(Clone, Debug)]
pub struct FiniteQuotient {
    pub p: u64,
    pub exps: Vec<u32>,
    /// Lifts of the cyclic generators as ambient vectors.
    pub gens: Vec<Vector>,
    /// u·gen_j in quotient coordinates.
    u_action: Vec<Vec<u64>>,
}

fn modp(x: i128, m: i128) -> i128 {
    x.rem_euclid(m)
}

fn inv_mod(a: i128, m: i128) -> i128 {
    let (mut r0, mut r1) = (m, modp(a, m));
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    debug_assert_eq!(r0, 1);
    modp(t0, m)
}

fn vp(x: i128, p: i128, k: u32) -> u32 {
    if x == 0 {
        return k;
    }
    let mut v = 0;
    let mut x = x;
    while x % p == 0 {
        x /= p;
        v += 1;
    }
    v
}

/// Smith form of a square matrix over Z/p^k: returns exponents and (P, P⁻¹)
/// with P·A·Q diagonal.
#[allow(clippy::type_complexity)]
fn smith(mut a: Vec<Vec<i128>>, p: i128, k: u32) -> (Vec<u32>, Vec<Vec<i128>>, Vec<Vec<i128>>) {
    let n = a.len();
    let m = p.pow(k);
    let id = |i: usize, j: usize| i128::from(i == j);
    let mut pm: Vec<Vec<i128>> = (0..n).map(|i| (0..n).map(|j| id(i, j)).collect()).collect();
    let mut pinv = pm.clone();
    let mut exps = Vec::with_capacity(n);
    for t in 0..n {
        let mut best = (k, t, t);
        for i in t..n {
            for j in t..n {
                let v = vp(a[i][j], p, k);
                if v < best.0 {
                    best = (v, i, j);
                }
            }
        }
        let (v, bi, bj) = best;
        a.swap(t, bi);
        pm.swap(t, bi);
        for row in pinv.iter_mut() {
            row.swap(t, bi);
        }
        for row in a.iter_mut() {
            row.swap(t, bj);
        }
        exps.push(v);
        if v == k {
            continue;
        }
        let pv = p.pow(v);
        let w = a[t][t] / pv;
        let wi = inv_mod(w, m);
        for j in 0..n {
            a[t][j] = modp(a[t][j] * wi, m);
            pm[t][j] = modp(pm[t][j] * wi, m);
        }
        for row in pinv.iter_mut() {
            row[t] = modp(row[t] * w, m);
        }
        for i in 0..n {
            if i != t && a[i][t] != 0 {
                let c = a[i][t] / pv;
                for j in 0..n {
                    a[i][j] = modp(a[i][j] - c * a[t][j], m);
                    pm[i][j] = modp(pm[i][j] - c * pm[t][j], m);
                }
                for row in pinv.iter_mut() {
                    row[t] = modp(row[t] + c * row[i], m);
                }
            }
        }
        for j in t + 1..n {
            a[t][j] = 0;
        }
    }
    (exps, pm, pinv)
}

impl FiniteQuotient {
    pub fn new(l: &HermLattice) -> Result<Self> {
        let big = l.dual()?;
        FiniteQuotient::of_pair(&big, l)
    }

    /// big/sub for sub ⊆ big of equal rank.
    pub fn of_pair(big: &HermLattice, sub: &HermLattice) -> Result<Self> {
        let cfg = big.cfg();
        let p = cfg.p;
        let n = big.rank();
        let pe = q_int(p as i64) * q_int(cfg.eps0);
        // Exponent bound: sub ⊇ p^k·big once k exceeds every elementary divisor.
        let mut coords = Vec::with_capacity(n);
        for b in sub.basis() {
            coords.push(big.coords(b).ok_or_else(|| Error::Precondition("not a sublattice".into()))?);
        }
        let mut vmin = 0i64;
        let det = crate::efield::Matrix::from_cols(cfg, n, &coords).det()?;
        if let Some(v) = det.val().finite() {
            vmin = vmin.max(v);
        }
        let k = (vmin / 2 + 2) as u32;
        let pk = (p as i128).pow(k);
        let zp = |x: &crate::rational::Q| -> Result<i128> {
            if val_p(x, p).is_some_and(|v| v < 0) {
                return Err(Error::Precondition("not a sublattice".into()));
            }
            Ok(residue_pow(x, p, k)? as i128)
        };
        // Columns: Z_p coordinates of l_j and u·l_j in the basis (b_i, u·b_i).
        let mut cols: Vec<Vec<i128>> = Vec::with_capacity(2 * n);
        for c in &coords {
            let mut col = Vec::with_capacity(2 * n);
            let mut ucol = Vec::with_capacity(2 * n);
            for e in c {
                col.push(zp(e.a())?);
                col.push(zp(e.b())?);
                ucol.push(zp(&(e.b() * &pe))?);
                ucol.push(zp(e.a())?);
            }
            cols.push(col);
            cols.push(ucol);
        }
        let a: Vec<Vec<i128>> = (0..2 * n).map(|i| cols.iter().map(|c| c[i]).collect()).collect();
        let (exps, pm, pinv) = smith(a, p as i128, k);
        let keep: Vec<usize> = (0..2 * n).filter(|&j| exps[j] > 0).collect();
        let to_vec = |z: &[i128]| -> Vector {
            let mut v = big.space().zero_vector();
            for i in 0..n {
                let c = Elem::new(cfg, q_int(z[2 * i] as i64), q_int(z[2 * i + 1] as i64));
                if !c.is_zero() {
                    v = vec_add(&v, &vec_scale(&c, &big.basis()[i]));
                }
            }
            v
        };
        let mut gens = Vec::new();
        let mut u_action = Vec::new();
        let pe_res = residue_pow(&pe, p, k)? as i128;
        for &j in &keep {
            let z: Vec<i128> = (0..2 * n).map(|i| pinv[i][j]).collect();
            gens.push(to_vec(&z));
            let mut uz = vec![0i128; 2 * n];
            for i in 0..n {
                uz[2 * i] = modp(z[2 * i + 1] * pe_res, pk);
                uz[2 * i + 1] = z[2 * i];
            }
            let img: Vec<u64> = keep
                .iter()
                .map(|&r| {
                    let x: i128 = (0..2 * n).map(|c| pm[r][c] * uz[c]).sum();
                    modp(x, (p as i128).pow(exps[r])) as u64
                })
                .collect();
            u_action.push(img);
        }
        Ok(Self { p, exps: keep.iter().map(|&j| exps[j]).collect(), gens, u_action })
    }

    pub fn order(&self) -> u128 {
        self.exps.iter().map(|&e| (self.p as u128).pow(e)).product()
    }

    fn moduli(&self) -> Vec<u64> {
        self.exps.iter().map(|&e| self.p.pow(e)).collect()
    }

    fn add(&self, x: &[u64], y: &[u64]) -> Vec<u64> {
        x.iter().zip(y).zip(self.moduli()).map(|((a, b), m)| (a + b) % m).collect()
    }

    fn times_u(&self, x: &[u64]) -> Vec<u64> {
        let mods = self.moduli();
        let mut out = vec![0u64; x.len()];
        for (j, &c) in x.iter().enumerate() {
            for (r, o) in out.iter_mut().enumerate() {
                *o = (*o + c * self.u_action[j][r]) % mods[r];
            }
        }
        out
    }

    fn elements(&self) -> Vec<Vec<u64>> {
        let mut out = vec![Vec::new()];
        for m in self.moduli() {
            out = out.into_iter().flat_map(|e| (0..m).map(move |c| [e.clone(), vec![c]].concat())).collect();
        }
        out
    }

    fn lift(&self, x: &[u64]) -> Vector {
        let mut v = self.gens.first().map(|g| vec![g[0].cfg().zero(); g.len()]).unwrap_or_default();
        for (c, g) in x.iter().zip(&self.gens) {
            if *c != 0 {
                v = vec_add(&v, &vec_scale(&g[0].cfg().int(*c as i64), g));
            }
        }
        v
    }
}

/// Invariants of an integral lattice read off from |ker u^k| on L^∨/L.
pub fn quotient_invariants(l: &HermLattice) -> Result<Vec<i64>> {
    if !l.is_integral() {
        return Err(Error::NotIntegral);
    }
    let fq = FiniteQuotient::new(l)?;
    if fq.order() > 1_000_000 {
        return Err(Error::TooLarge(format!("quotient of order {}", fq.order())));
    }
    let elems = fq.elements();
    let p = fq.p as f64;
    let mut kernel_logs = vec![0i64];
    let mut powers: Vec<Vec<u64>> = elems.clone();
    let zero = vec![0u64; fq.exps.len()];
    loop {
        powers = powers.iter().map(|x| fq.times_u(x)).collect();
        let killed = powers.iter().filter(|x| **x == zero).count();
        let log = ((killed as f64).ln() / p.ln()).round() as i64;
        kernel_logs.push(log);
        if killed == elems.len() {
            break;
        }
    }
    // #{a_i ≥ k} = log|ker u^k| − log|ker u^{k−1}|.
    let m = l.rank();
    let mut a = Vec::new();
    for k in 1..kernel_logs.len() {
        let ge_k = kernel_logs[k] - kernel_logs[k - 1];
        let ge_next = kernel_logs.get(k + 1).map_or(0, |n| n - kernel_logs[k]);
        a.extend(std::iter::repeat_n(k as i64, (ge_k - ge_next) as usize));
    }
    let zeros = m - a.len();
    let mut out = vec![0i64; zeros];
    out.extend(a);
    Ok(out)
}

/// Integral overlattices from all subgroups of L^∨/L, filtered by
/// u-stability and integrality of the lift.
pub fn naive_integral_overlattices(l: &HermLattice) -> Result<Vec<HermLattice>> {
    if !l.is_integral() {
        return Err(Error::NotIntegral);
    }
    let fq = FiniteQuotient::new(l)?;
    if fq.order() > 1_000_000 {
        return Err(Error::TooLarge(format!("quotient of order {}", fq.order())));
    }
    let elems = fq.elements();
    let size = elems.len();
    let mods = fq.moduli();
    let index = |x: &[u64]| x.iter().zip(&mods).fold(0usize, |acc, (&c, &m)| acc * m as usize + c as usize);
    let add = |i: usize, j: usize| index(&fq.add(&elems[i], &elems[j]));
    let words = size.div_ceil(64);
    let has = |h: &[u64], i: usize| h[i / 64] >> (i % 64) & 1 == 1;
    let mut start = vec![0u64; words];
    start[0] = 1;
    let mut seen: HashSet<Vec<u64>> = HashSet::from([start.clone()]);
    let mut queue = vec![(start, vec![0usize], Vec::<usize>::new())];
    let mut all = Vec::new();
    while let Some((h, members, gens)) = queue.pop() {
        for g in 0..size {
            // Only the smallest element of each coset g + H.
            if has(&h, g) || members.iter().any(|&x| add(g, x) < g) {
                continue;
            }
            let mut grown = h.clone();
            let mut grown_members = members.clone();
            let mut mult = g;
            while mult != 0 {
                for &x in &members {
                    let y = add(x, mult);
                    if !has(&grown, y) {
                        grown[y / 64] |= 1 << (y % 64);
                        grown_members.push(y);
                    }
                }
                mult = add(mult, g);
            }
            if seen.insert(grown.clone()) {
                if seen.len() > SUBGROUP_CAP {
                    return Err(Error::TooLarge("too many subgroups".into()));
                }
                let mut ng = gens.clone();
                ng.push(g);
                queue.push((grown, grown_members, ng));
            }
        }
        all.push((h, members, gens));
    }
    let space = l.space();
    let mut out = Vec::new();
    for (h, members, gens) in all {
        if !members.iter().all(|&x| has(&h, index(&fq.times_u(&elems[x])))) {
            continue;
        }
        let lifts: Vec<Vector> = gens.iter().map(|&g| fq.lift(&elems[g])).collect();
        let integral = lifts.iter().enumerate().all(|(i, x)| {
            lifts[i..].iter().all(|y| space.pair(x, y).val() >= crate::efield::EValuation::Finite(-1))
        });
        if integral {
            let mut cols = l.basis().to_vec();
            cols.extend(lifts);
            out.push(HermLattice::generated(space.clone(), cols)?);
        }
    }
    Ok(sort_lattices(out))
}
