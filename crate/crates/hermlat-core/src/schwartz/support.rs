//! Searching the support of a lattice function for vectors outside V^int.
//!
//! For a coset z + N with Z_p-basis (m_i) of N, the map
//! t ↦ (z + Σ t_i m_i, z + Σ t_i m_i) is a quadratic polynomial over Z_p,
//! and for odd p it is Z_p-valued exactly when N is integral, z ∈ N^∨ and
//! (z, z) ∈ O_F. When it is not, one of the points z + ε_i m_i + ε_j m_j
//! with ε ∈ {−1, 0, 1} already leaves V^int.
//!
//! A function f = Σ c·1_L is searched fiberwise over W = f0^⊥: for fixed
//! w ∈ W the set of λ with w + λ·f0 ∈ L is empty or a ball in E, so f on
//! the fiber is a sum of ball indicators, and each region where it is
//! constant is one lattice coset.

use std::collections::BTreeMap;

use num_traits::Zero;

use super::LatticeFunction;
use crate::efield::{vec_add, vec_scale, vec_sub, EValuation, Elem, Vector};
use crate::enumerate::COSET_CAP;
use crate::error::{Error, Result};
use crate::hermlat::{HermLattice, HermSpace};
use crate::rational::Q;

fn pair_integral(space: &HermSpace, x: &[Elem], y: &[Elem]) -> bool {
    space.pair(x, y).val() >= EValuation::Finite(-1)
}

/// A vector of z + N outside V^int, or None when the whole coset lies in V^int.
pub fn coset_witness(z: &[Elem], n: &HermLattice) -> Result<Option<Vector>> {
    let space = n.space();
    if !space.v_int_test(z) {
        return Ok(Some(z.to_vec()));
    }
    let basis = n.basis();
    let closed = basis.iter().all(|b| pair_integral(space, z, b))
        && basis.iter().enumerate().all(|(i, a)| basis[i..].iter().all(|b| pair_integral(space, a, b)));
    if closed {
        return Ok(None);
    }
    let u = n.cfg().u();
    let ms: Vec<Vector> = basis.iter().flat_map(|b| [b.clone(), vec_scale(&u, b)]).collect();
    let signs = [-1i64, 1];
    for m in &ms {
        for s in signs {
            let x = vec_add(z, &vec_scale(&n.cfg().int(s), m));
            if !space.v_int_test(&x) {
                return Ok(Some(x));
            }
        }
    }
    for i in 0..ms.len() {
        for j in i + 1..ms.len() {
            for si in signs {
                for sj in signs {
                    let x = vec_add(
                        &vec_add(z, &vec_scale(&n.cfg().int(si), &ms[i])),
                        &vec_scale(&n.cfg().int(sj), &ms[j]),
                    );
                    if !space.v_int_test(&x) {
                        return Ok(Some(x));
                    }
                }
            }
        }
    }
    Err(Error::Inconsistent("coset leaves V^int but no grid point does".into()))
}

/// Data of one term: L = S + O_E·(y + u^d·f0), with u^o·y ∈ S minimal.
struct Piece {
    d: i64,
    y_coords: Vec<Elem>,
    o: i64,
    coef: Q,
}

/// Ball c + u^r·O_E, with c = u^base·Σ_j digits[j]·u^j and
/// digits.len() = r − base for a base shared by all balls of a search.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
struct Ball {
    r: i64,
    digits: Vec<u64>,
}

impl Ball {
    fn new(c: &Elem, r: i64, base: i64) -> Self {
        let len = (r - base) as usize;
        let digits = c.shift(-base).digits(len).expect("center has valuation at least base");
        Ball { r, digits }
    }

    fn within(&self, other: &Ball) -> bool {
        self.r >= other.r && self.digits.starts_with(&other.digits)
    }

    fn truncate(&self, r: i64) -> Ball {
        let cut = self.digits.len() - (self.r - r) as usize;
        Ball { r, digits: self.digits[..cut].to_vec() }
    }

    fn center(&self, cfg: crate::efield::FieldConfig, base: i64) -> Elem {
        Elem::from_digits(cfg, &self.digits).shift(base)
    }
}

fn order_mod(s: &HermLattice, y: &[Elem]) -> i64 {
    let coords = s.coords(y).expect("y lies in span(S)");
    coords.iter().filter_map(|c| c.val().finite()).map(|v| (-v).max(0)).max().unwrap_or(0)
}

struct Fibration<'a> {
    space: &'a HermSpace,
    f0: Vector,
    nf: Elem,
}

impl Fibration<'_> {
    fn lambda(&self, x: &[Elem]) -> Elem {
        self.space.pair(x, &self.f0).checked_div(&self.nf).expect("anisotropic f0")
    }

    fn proj(&self, x: &[Elem]) -> Vector {
        vec_sub(x, &vec_scale(&self.lambda(x), &self.f0))
    }

    /// The slice S of L and the rest of the term data.
    fn piece(&self, l: &HermLattice, coef: &Q) -> (HermLattice, Piece) {
        let s = l.orthogonal_part(std::slice::from_ref(&self.f0));
        let (b, lam) = l
            .basis()
            .iter()
            .map(|b| (b, self.lambda(b)))
            .filter(|(_, lam)| !lam.is_zero())
            .min_by_key(|(_, lam)| lam.v())
            .expect("full-rank lattice meets f0");
        let d = lam.v();
        let unit = l.cfg().u_pow(d).checked_div(&lam).expect("nonzero");
        let y = self.proj(&vec_scale(&unit, b));
        let o = order_mod(&s, &y);
        let y_coords = s.coords(&y).expect("in span");
        (s, Piece { d, y_coords, o, coef: coef.clone() })
    }
}

/// The λ-ball of a term over the fiber through w, given w in S-coordinates.
/// Only wc modulo O_E matters.
fn term_ball(piece: &Piece, wc: &[Elem], base: i64) -> Option<Ball> {
    let cfg = wc[0].cfg();
    if piece.o == 0 {
        return wc.iter().all(Elem::is_integral).then(|| Ball::new(&cfg.zero(), piece.d, base));
    }
    let k = piece.y_coords.iter().position(|c| c.val() == EValuation::Finite(-piece.o))?;
    let c0 = wc[k].checked_div(&piece.y_coords[k]).ok()?.reduce_mod_u_pow(piece.o);
    if !c0.is_integral() {
        return None;
    }
    let ok = wc.iter().zip(&piece.y_coords).all(|(a, b)| (a - &(&c0 * b)).is_integral());
    ok.then(|| Ball::new(&(&cfg.u_pow(piece.d) * &c0), piece.d + piece.o, base))
}

/// Leaf cosets (w + c·f0) + (M_W ⊕ u^r·O_E·f0) of one fiber.
struct FiberSearch<'a> {
    fib: &'a Fibration<'a>,
    w: Vector,
    /// (w, m) integral for all m ∈ M_W.
    w_closed: bool,
    w_norm: Elem,
    leaves: &'a BTreeMap<i64, (HermLattice, bool)>,
    base: i64,
}

impl FiberSearch<'_> {
    /// The coset criterion, evaluated through (w + c·f0, w + c·f0) = (w, w) + Nm(c)·(f0, f0)
    /// and (w + c·f0, u^r·f0) = c·conj(u^r)·(f0, f0).
    fn leaf(&self, b: &Ball, value: &Q) -> Result<Option<Vector>> {
        if value.is_zero() {
            return Ok(None);
        }
        let (lattice, closed) = &self.leaves[&b.r];
        let c = b.center(self.fib.nf.cfg(), self.base);
        let cross_ok = c.is_zero() || c.v() + b.r + self.fib.nf.v() >= -1;
        let norm = &self.w_norm + &self.fib.nf.scale(&c.norm());
        if self.w_closed && *closed && cross_ok && norm.is_integral() {
            return Ok(None);
        }
        let z = vec_add(&self.w, &vec_scale(&c, &self.fib.f0));
        coset_witness(&z, lattice)
    }

    /// `value` is the sum over balls containing b; `inner` are the balls
    /// strictly inside b.
    fn walk(&self, b: &Ball, value: &Q, inner: &[&(Ball, Q)]) -> Result<Option<Vector>> {
        if inner.is_empty() {
            return self.leaf(b, value);
        }
        let mut children: BTreeMap<Ball, (Q, Vec<&(Ball, Q)>)> = BTreeMap::new();
        for t in inner {
            let child = t.0.truncate(b.r + 1);
            let entry = children.entry(child).or_insert_with(|| (value.clone(), Vec::new()));
            if t.0.r == b.r + 1 {
                entry.0 += &t.1;
            } else {
                entry.1.push(t);
            }
        }
        for (child, (v, rest)) in &children {
            if let Some(x) = self.walk(child, v, rest)? {
                return Ok(Some(x));
            }
        }
        if value.is_zero() || children.len() == self.fib.space.cfg().p as usize {
            return Ok(None);
        }
        for d in 0..self.fib.nf.cfg().p {
            let mut digits = b.digits.clone();
            digits.push(d);
            let child = Ball { r: b.r + 1, digits };
            if !children.contains_key(&child) {
                if let Some(x) = self.leaf(&child, value)? {
                    return Ok(Some(x));
                }
            }
        }
        Ok(None)
    }
}

/// Witness search fibered along the anisotropic vector f0.
pub fn support_outside_vint_along(f: &LatticeFunction, f0: &[Elem]) -> Result<Option<Vector>> {
    let Some(lmax) = f.lattice_max()? else { return Ok(None) };
    let lmin = f.lattice_min()?.expect("nonempty");
    if f.terms().any(|(l, _)| !l.is_full_rank()) {
        return Err(Error::Dimension("support search needs full-rank terms".into()));
    }
    let space = lmax.space().clone();
    let nf = space.pair(f0, f0);
    if nf.is_zero() {
        return Err(Error::Precondition("f0 must be anisotropic".into()));
    }
    let cfg = lmax.cfg();
    let fib = Fibration { space: &space, f0: f0.to_vec(), nf };
    let mut slices: Vec<HermLattice> = Vec::new();
    let mut by_slice: Vec<Vec<Piece>> = Vec::new();
    let mut slice_index: BTreeMap<HermLattice, usize> = BTreeMap::new();
    for (l, c) in f.terms() {
        let (s, piece) = fib.piece(l, c);
        let i = *slice_index.entry(s.clone()).or_insert_with(|| {
            slices.push(s);
            by_slice.push(Vec::new());
            slices.len() - 1
        });
        by_slice[i].push(piece);
    }
    let pieces: Vec<&Piece> = by_slice.iter().flatten().collect();
    let pw = HermLattice::generated(space.clone(), lmax.basis().iter().map(|b| fib.proj(b)).collect())?;
    let mw = lmin.orthogonal_part(std::slice::from_ref(&fib.f0));
    let reps = pw.coset_reps(&mw, COSET_CAP * 5)?;
    // Coordinates in each slice go through the basis of M_W ⊆ S.
    let transitions: Vec<Vec<Vector>> = slices
        .iter()
        .map(|s| mw.basis().iter().map(|b| s.coords(b).expect("M_W lies in every slice")).collect())
        .collect();
    let rmin = pieces.iter().map(|p| p.d).min().expect("nonempty");
    let rmax = pieces.iter().map(|p| p.d + p.o).max().expect("nonempty");
    let leaves: BTreeMap<i64, (HermLattice, bool)> = (rmin..=rmax)
        .map(|r| {
            let mut cols = mw.basis().to_vec();
            cols.push(vec_scale(&cfg.u_pow(r), &fib.f0));
            let n = HermLattice::new(space.clone(), cols).expect("independent");
            let closed = n.is_integral();
            (r, (n, closed))
        })
        .collect();
    // Balls of a slice's terms depend on w only modulo the slice.
    let mut cache: Vec<BTreeMap<Vector, Vec<(Ball, Q)>>> = vec![BTreeMap::new(); slices.len()];
    let mut witness = None;
    for w in &reps {
        let cw = mw.coords(w).expect("w lies in W");
        let mut merged: BTreeMap<Ball, Q> = BTreeMap::new();
        for (k, t) in transitions.iter().enumerate() {
            let mut wc = vec![cfg.zero(); slices[k].rank()];
            for (c, row) in cw.iter().zip(t) {
                if !c.is_zero() {
                    for (a, r) in wc.iter_mut().zip(row) {
                        *a = &*a + &(c * r);
                    }
                }
            }
            let polar: Vector = wc.iter().map(|x| x.reduce_mod_u_pow(0)).collect();
            let balls = cache[k].entry(polar).or_insert_with_key(|polar| {
                let mut m: BTreeMap<Ball, Q> = BTreeMap::new();
                for piece in &by_slice[k] {
                    if let Some(b) = term_ball(piece, polar, rmin) {
                        *m.entry(b).or_insert_with(Q::zero) += &piece.coef;
                    }
                }
                m.into_iter().filter(|(_, c)| !c.is_zero()).collect()
            });
            for (b, c) in balls.iter() {
                *merged.entry(b.clone()).or_insert_with(Q::zero) += c;
            }
        }
        let balls: Vec<(Ball, Q)> = merged.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        let w_closed = mw.basis().iter().all(|m| pair_integral(&space, w, m));
        let w_norm = space.pair(w, w);
        let search = FiberSearch { fib: &fib, w: w.clone(), w_closed, w_norm, leaves: &leaves, base: rmin };
        for (top, coef) in &balls {
            if balls.iter().any(|(o, _)| o != top && top.within(o)) {
                continue;
            }
            let inner: Vec<&(Ball, Q)> = balls.iter().filter(|(t, _)| t != top && t.within(top)).collect();
            if let Some(x) = search.walk(top, coef, &inner)? {
                witness = Some(x);
                break;
            }
        }
        if witness.is_some() {
            break;
        }
    }
    if let Some(x) = &witness {
        if f.evaluate(x)?.is_zero() || space.v_int_test(x) {
            return Err(Error::Inconsistent("witness check failed".into()));
        }
    }
    Ok(witness)
}

/// log_q of the number of fibers the search along f0 walks.
fn fiber_count(lmax: &HermLattice, lmin: &HermLattice, f0: &[Elem]) -> Result<i64> {
    let space = lmax.space();
    let fib = Fibration { space, f0: f0.to_vec(), nf: space.pair(f0, f0) };
    let pw = HermLattice::generated(space.clone(), lmax.basis().iter().map(|b| fib.proj(b)).collect())?;
    let mw = lmin.orthogonal_part(std::slice::from_ref(&fib.f0));
    pw.index_length(&mw)
}

/// Some vector z with (z, z) ∉ O_F and f(z) ≠ 0, or None if f vanishes off V^int.
///
/// The fiber direction is the anisotropic candidate with the fewest fibers,
/// among basis vectors, dual basis vectors and small sums of basis vectors.
pub fn support_outside_vint(f: &LatticeFunction) -> Result<Option<Vector>> {
    let (Some(lmax), Some(lmin)) = (f.lattice_max()?, f.lattice_min()?) else { return Ok(None) };
    let space = lmax.space();
    let n = space.dim();
    let cfg = space.cfg();
    let e = |i: usize| space.basis_vector(i);
    let ginv = space.gram().inverse()?.conj();
    let mut candidates: Vec<Vector> = (0..n).map(|i| ginv.col(i)).collect();
    candidates.extend((0..n).map(e));
    for i in 0..n {
        for j in i + 1..n {
            candidates.push(vec_add(&e(i), &e(j)));
            candidates.push(vec_add(&e(i), &vec_scale(&cfg.u(), &e(j))));
        }
    }
    let mut best: Option<(i64, Vector)> = None;
    for v in candidates {
        if space.pair(&v, &v).is_zero() {
            continue;
        }
        let k = fiber_count(&lmax, &lmin, &v)?;
        if best.as_ref().is_none_or(|(b, _)| k < *b) {
            best = Some((k, v));
        }
    }
    let (_, f0) = best.ok_or(Error::Degenerate)?;
    support_outside_vint_along(f, &f0)
}
