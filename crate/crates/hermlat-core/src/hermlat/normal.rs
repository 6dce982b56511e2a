//! Jordan splitting into 1×1 blocks β·u^{2b} and 2×2 blocks with
//! off-diagonal entries ±u^{2c−1}.
//!
//! The 2×2 blocks are made hyperbolic by a Hensel iteration. An isotropic
//! vector of a p-adically hyperbolic plane need not have coordinates in
//! Q(u), so the iteration may stop with tiny nonzero diagonal entries; such
//! blocks are reported with `exact: false`.

use serde::Serialize;

use super::{HermLattice, Invariants};
use crate::efield::{vec_add, vec_scale, vec_sub, EValuation, Vector};
use crate::error::{Error, Result};
use crate::rational::{fmt_q, pow_q, val_p, Q};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum Block {
    /// (e_index, e_index) = beta·(p·ε₀)^b with beta a p-adic unit.
    Diagonal { index: usize, beta: String, b: i64 },
    /// (e_first, e_second) = u^{2c−1}.
    Hyperbolic { first: usize, second: usize, c: i64, exact: bool },
}

#[derive(Clone, Debug)]
pub struct NormalBasis {
    pub basis: Vec<Vector>,
    pub blocks: Vec<Block>,
    betas: Vec<Q>,
}

const HENSEL_ROUNDS: usize = 6;
const HENSEL_MARGIN: i64 = 6;

impl NormalBasis {
    /// Unit parts of the 1×1 blocks, in block order.
    pub fn betas(&self) -> &[Q] {
        &self.betas
    }

    /// Invariants read off the blocks: 2b+1 for 1×1, (2c, 2c) for 2×2.
    pub fn invariants(&self) -> Invariants {
        let mut a = Vec::new();
        for b in &self.blocks {
            match b {
                Block::Diagonal { b, .. } => a.push(2 * b + 1),
                Block::Hyperbolic { c, .. } => a.extend([2 * c, 2 * c]),
            }
        }
        a.sort_unstable();
        Invariants::from_sorted(a)
    }

    /// Indices of 1×1 blocks paired with their exponent b.
    pub fn diagonal_blocks(&self) -> Vec<(usize, i64)> {
        self.blocks
            .iter()
            .filter_map(|b| match b {
                Block::Diagonal { index, b, .. } => Some((*index, *b)),
                _ => None,
            })
            .collect()
    }
}

impl HermLattice {
    pub fn normal_basis(&self) -> Result<NormalBasis> {
        let space = self.space().clone();
        let cfg = self.cfg();
        let pair = |x: &Vector, y: &Vector| space.pair(x, y);
        let mut rem: Vec<Vector> = self.basis().to_vec();
        let mut out: Vec<Vector> = Vec::new();
        let mut blocks = Vec::new();
        let mut betas = Vec::new();
        while !rem.is_empty() {
            let m = rem.len();
            let mut best: Option<(i64, bool, usize, usize)> = None;
            for i in 0..m {
                for j in i..m {
                    let v = match pair(&rem[i], &rem[j]).val() {
                        EValuation::Finite(v) => v,
                        EValuation::Infinity => continue,
                    };
                    // Smaller val first, then diagonal, then index order.
                    let key = (v, i != j, i, j);
                    if best.is_none_or(|b| key < b) {
                        best = Some(key);
                    }
                }
            }
            let (v, off_diag, k, l) = best.ok_or(Error::Degenerate)?;
            if !off_diag || v % 2 == 0 {
                if off_diag {
                    rem[k] = vec_add(&rem[k], &rem[l]);
                }
                let e = rem.remove(k);
                let d = pair(&e, &e);
                debug_assert_eq!(d.val(), EValuation::Finite(v));
                let dinv = d.inv()?;
                for x in rem.iter_mut() {
                    let c = &pair(x, &e) * &dinv;
                    if !c.is_zero() {
                        *x = vec_sub(x, &vec_scale(&c, &e));
                    }
                }
                let dq = d.a().clone();
                let b = val_p(&dq, cfg.p).expect("nonzero");
                let beta = &dq / pow_q(&cfg.u_squared(), b);
                blocks.push(Block::Diagonal { index: out.len(), beta: fmt_q(&beta), b });
                betas.push(beta);
                out.push(e);
                continue;
            }
            // Odd minimum on an off-diagonal entry: split off a plane.
            let (mut ek, mut el) = (rem[k].clone(), rem[l].clone());
            let others: Vec<Vector> =
                rem.iter().enumerate().filter(|&(i, _)| i != k && i != l).map(|(_, x)| x.clone()).collect();
            let alpha = pair(&ek, &ek);
            let gamma = pair(&el, &el);
            let x = pair(&ek, &el);
            let xb = x.conj();
            let delta = &(&alpha * &gamma) - &(&x * &xb);
            let dinv = delta.inv()?;
            rem = others
                .into_iter()
                .map(|y| {
                    let w1 = pair(&y, &ek);
                    let w2 = pair(&y, &el);
                    let s = &(&(&w1 * &gamma) - &(&w2 * &xb)) * &dinv;
                    let t = &(&(&w2 * &alpha) - &(&w1 * &x)) * &dinv;
                    vec_sub(&vec_sub(&y, &vec_scale(&s, &ek)), &vec_scale(&t, &el))
                })
                .collect();
            let mut exact = false;
            for _ in 0..HENSEL_ROUNDS {
                let a = pair(&ek, &ek);
                if !a.is_zero() {
                    let xb = pair(&ek, &el).conj();
                    let lam = -(&a * &(&cfg.int(2) * &xb).inv()?);
                    ek = vec_add(&ek, &vec_scale(&lam, &el));
                }
                let g = pair(&el, &el);
                if !g.is_zero() {
                    let x = pair(&ek, &el);
                    let mu = -(&g * &(&cfg.int(2) * &x).inv()?);
                    el = vec_add(&el, &vec_scale(&mu, &ek));
                }
                let (a, g) = (pair(&ek, &ek), pair(&el, &el));
                if a.is_zero() && g.is_zero() {
                    exact = true;
                    break;
                }
                if a.val().min(g.val()) >= EValuation::Finite(v + 1 + HENSEL_MARGIN) {
                    break;
                }
            }
            let x = pair(&ek, &el);
            let rho = cfg.u_pow(v).checked_div(&x)?.conj();
            el = vec_scale(&rho, &el);
            let c = (v + 1) / 2;
            blocks.push(Block::Hyperbolic { first: out.len(), second: out.len() + 1, c, exact });
            out.push(ek);
            out.push(el);
        }
        Ok(NormalBasis { basis: out, blocks, betas })
    }
}
