//! Column Hermite form over O_E.
//!
//! Rows are processed top-down. At each row the remaining column with the
//! smallest valuation there becomes the pivot and is scaled so the pivot
//! entry is exactly u^v. Entries of earlier columns in later pivot rows are
//! then reduced to canonical u-adic digit representatives, so two generating
//! sets of the same O_E-module give identical output.

use crate::efield::{vec_is_zero, vec_scale, Elem, FieldConfig, Vector};

#[derive(Clone, Debug)]
pub(crate) struct Echelon {
    pub cols: Vec<Vector>,
    /// (pivot row, pivot valuation) per column.
    pub pivots: Vec<(usize, i64)>,
}

fn axpy(target: &mut Vector, f: &Elem, x: &[Elem], from: usize) {
    for i in from..target.len() {
        if !x[i].is_zero() {
            let t = f * &x[i];
            target[i] -= &t;
        }
    }
}

pub(crate) fn echelon(cfg: FieldConfig, nrows: usize, cols: Vec<Vector>) -> Echelon {
    let mut rem: Vec<Vector> = cols.into_iter().filter(|c| !vec_is_zero(c)).collect();
    let mut done: Vec<Vector> = Vec::new();
    let mut pivots = Vec::new();
    for r in 0..nrows {
        if rem.is_empty() {
            break;
        }
        let best = rem
            .iter()
            .enumerate()
            .filter(|(_, c)| !c[r].is_zero())
            .min_by_key(|(j, c)| (c[r].v(), *j))
            .map(|(j, _)| j);
        let Some(j) = best else { continue };
        let piv = rem.remove(j);
        let v = piv[r].v();
        let target = cfg.u_pow(v);
        let s = target.checked_div(&piv[r]).expect("nonzero pivot");
        let mut piv = vec_scale(&s, &piv);
        piv[r] = target;
        let u_inv = cfg.u_pow(-v);
        for c in rem.iter_mut() {
            if c[r].is_zero() {
                continue;
            }
            let f = &c[r] * &u_inv;
            axpy(c, &f, &piv, r);
            c[r] = cfg.zero();
        }
        rem.retain(|c| !vec_is_zero(c));
        done.push(piv);
        pivots.push((r, v));
    }
    debug_assert!(rem.is_empty());
    for k in 0..done.len() {
        let (r, v) = pivots[k];
        let u_inv = cfg.u_pow(-v);
        let (head, tail) = done.split_at_mut(k);
        let col_k = &tail[0];
        for col_j in head.iter_mut() {
            let x = &col_j[r];
            if x.is_zero() {
                continue;
            }
            let rep = x.reduce_mod_u_pow(v);
            if &rep == x {
                continue;
            }
            let t = &(x - &rep) * &u_inv;
            axpy(col_j, &t, col_k, r);
            col_j[r] = rep;
        }
    }
    Echelon { cols: done, pivots }
}

impl Echelon {
    /// Coordinates of x in the echelon basis, or None if x is outside the E-span.
    pub fn coords(&self, cfg: FieldConfig, x: &[Elem]) -> Option<Vec<Elem>> {
        let mut c: Vec<Elem> = Vec::with_capacity(self.cols.len());
        for &(r, v) in &self.pivots {
            let mut acc = x[r].clone();
            for (j, cj) in c.iter().enumerate() {
                let e = &self.cols[j][r];
                if !e.is_zero() && !cj.is_zero() {
                    acc -= &(e * cj);
                }
            }
            c.push(if acc.is_zero() { acc } else { &acc * &cfg.u_pow(-v) });
        }
        let mut y = vec![cfg.zero(); x.len()];
        for (ck, col) in c.iter().zip(&self.cols) {
            if ck.is_zero() {
                continue;
            }
            for (yi, ci) in y.iter_mut().zip(col) {
                if !ci.is_zero() {
                    *yi += &(ck * ci);
                }
            }
        }
        (y.as_slice() == x).then_some(c)
    }
}
