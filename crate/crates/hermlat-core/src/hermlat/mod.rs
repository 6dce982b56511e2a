//! Hermitian spaces and O_E-lattices inside them.
//!
//! The form is linear in the first argument and conjugate-linear in the
//! second: (x, y) = xᵀ·G·conj(y). A lattice stores its canonical column
//! Hermite basis, so equality, ordering and hashing are module equality.

mod echelon;
mod io;
mod normal;

pub(crate) use echelon::{echelon, Echelon};
pub use io::{elem_from_json, elem_to_json, vector_from_json, vector_to_json, ElemJson, LatticeJson, SpaceJson};
pub use normal::{Block, NormalBasis};

use std::cmp::Ordering;
use std::hash::{Hash, Hasher};
use std::sync::{Arc, OnceLock};

use serde::{Deserialize, Serialize};

use crate::efield::{vec_add, vec_scale, EValuation, Elem, FieldConfig, Matrix, Vector};
use crate::error::{Error, Result};

/// A nondegenerate hermitian space E^n with Gram matrix `gram`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct HermSpace {
    cfg: FieldConfig,
    gram: Matrix,
}

impl HermSpace {
    pub fn new(gram: Matrix) -> Result<Arc<Self>> {
        if !gram.is_square() {
            return Err(Error::Dimension("gram matrix is not square".into()));
        }
        if gram.rows() == 0 {
            return Err(Error::Dimension("empty gram matrix".into()));
        }
        if !gram.is_hermitian() {
            return Err(Error::NotHermitian);
        }
        if gram.det()?.is_zero() {
            return Err(Error::Degenerate);
        }
        Ok(Arc::new(Self { cfg: gram.cfg(), gram }))
    }

    pub fn diagonal(cfg: FieldConfig, entries: &[Elem]) -> Result<Arc<Self>> {
        Self::new(Matrix::diagonal(cfg, entries))
    }

    pub fn cfg(&self) -> FieldConfig {
        self.cfg
    }

    pub fn dim(&self) -> usize {
        self.gram.rows()
    }

    pub fn gram(&self) -> &Matrix {
        &self.gram
    }

    /// (x, y) = Σ x_i·G_ij·conj(y_j).
    pub fn pair(&self, x: &[Elem], y: &[Elem]) -> Elem {
        let n = self.dim();
        let mut acc = self.cfg.zero();
        for j in 0..n {
            if y[j].is_zero() {
                continue;
            }
            let cy = y[j].conj();
            for i in 0..n {
                let g = self.gram.get(i, j);
                if x[i].is_zero() || g.is_zero() {
                    continue;
                }
                acc += &(&(&x[i] * g) * &cy);
            }
        }
        acc
    }

    /// (x, x) as a rational.
    pub fn norm(&self, x: &[Elem]) -> crate::rational::Q {
        self.pair(x, x).a().clone()
    }

    /// Matrix of pairwise products ((x_i, x_j)).
    pub fn moment_matrix(&self, xs: &[Vector]) -> Matrix {
        let m = xs.len();
        let mut t = Matrix::zeros(self.cfg, m, m);
        for i in 0..m {
            for j in i..m {
                let v = self.pair(&xs[i], &xs[j]);
                if i != j {
                    t.set(j, i, v.conj());
                }
                t.set(i, j, v);
            }
        }
        t
    }

    /// val_E((x,x)) + 1; isotropic vectors are rejected.
    pub fn val_of_vector(&self, x: &[Elem]) -> Result<i64> {
        match self.pair(x, x).val() {
            EValuation::Finite(v) => Ok(v + 1),
            EValuation::Infinity => Err(Error::Domain("isotropic vector".into())),
        }
    }

    /// Whether (x,x) ∈ O_F.
    pub fn v_int_test(&self, x: &[Elem]) -> bool {
        self.pair(x, x).is_integral()
    }

    /// Whether (−1)^{n/2}·det(G) is not a norm.
    pub fn is_nonsplit(&self) -> Result<bool> {
        is_nonsplit_gram(&self.gram)
    }

    pub fn zero_vector(&self) -> Vector {
        vec![self.cfg.zero(); self.dim()]
    }

    pub fn basis_vector(&self, i: usize) -> Vector {
        let mut v = self.zero_vector();
        v[i] = self.cfg.one();
        v
    }
}

/// Nonsplit test for any even-size nondegenerate hermitian matrix.
pub fn is_nonsplit_gram(gram: &Matrix) -> Result<bool> {
    let n = gram.rows();
    if n % 2 == 1 {
        return Err(Error::Domain(format!("split/nonsplit needs even dimension, got {n}")));
    }
    let d = gram.det()?;
    if d.is_zero() {
        return Err(Error::Degenerate);
    }
    let mut t = d.a().clone();
    if (n / 2) % 2 == 1 {
        t = -t;
    }
    Ok(!gram.cfg().is_norm(&t)?)
}

/// Fundamental invariants 0 ≤ a₁ ≤ … ≤ a_m with type and valuation.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Invariants {
    pub a: Vec<i64>,
    pub t: usize,
    pub val: i64,
}

impl Invariants {
    pub fn from_sorted(a: Vec<i64>) -> Self {
        let t = a.iter().filter(|&&x| x != 0).count();
        let val = a.iter().sum();
        Self { a, t, val }
    }

    pub fn a_max(&self) -> i64 {
        self.a.last().copied().unwrap_or(0)
    }
}

/// A finitely generated O_E-submodule of a hermitian space, stored in
/// canonical form.
#[derive(Clone, Debug)]
pub struct HermLattice {
    space: Arc<HermSpace>,
    ech: Echelon,
    gram: OnceLock<Matrix>,
}

impl PartialEq for HermLattice {
    fn eq(&self, other: &Self) -> bool {
        self.ech.cols == other.ech.cols && *self.space == *other.space
    }
}

impl Eq for HermLattice {}

impl PartialOrd for HermLattice {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for HermLattice {
    fn cmp(&self, other: &Self) -> Ordering {
        self.ech.cols.cmp(&other.ech.cols).then_with(|| self.space.cmp(&other.space))
    }
}

impl Hash for HermLattice {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.ech.cols.hash(state);
    }
}

impl HermLattice {
    /// Lattice with the given E-independent generators.
    pub fn new(space: Arc<HermSpace>, cols: Vec<Vector>) -> Result<Self> {
        let m = cols.len();
        let l = Self::generated(space, cols)?;
        if l.rank() != m {
            return Err(Error::Dimension("basis columns are linearly dependent".into()));
        }
        Ok(l)
    }

    /// O_E-module generated by arbitrary vectors.
    pub fn generated(space: Arc<HermSpace>, cols: Vec<Vector>) -> Result<Self> {
        let n = space.dim();
        if cols.iter().any(|c| c.len() != n) {
            return Err(Error::Dimension(format!("vectors must have length {n}")));
        }
        let ech = echelon(space.cfg(), n, cols);
        Ok(Self { space, ech, gram: OnceLock::new() })
    }

    /// The standard lattice O_E^n of the space.
    pub fn standard(space: Arc<HermSpace>) -> Self {
        let cols = (0..space.dim()).map(|i| space.basis_vector(i)).collect();
        Self::new(space, cols).expect("identity basis")
    }

    pub fn from_matrix(space: Arc<HermSpace>, basis: &Matrix) -> Result<Self> {
        if basis.rows() != space.dim() {
            return Err(Error::Dimension("basis rows must equal the space dimension".into()));
        }
        Self::new(space, basis.columns())
    }

    pub fn space(&self) -> &Arc<HermSpace> {
        &self.space
    }

    pub fn cfg(&self) -> FieldConfig {
        self.space.cfg()
    }

    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    pub fn rank(&self) -> usize {
        self.ech.cols.len()
    }

    pub fn is_full_rank(&self) -> bool {
        self.rank() == self.dim()
    }

    /// Canonical basis columns.
    pub fn basis(&self) -> &[Vector] {
        &self.ech.cols
    }

    pub fn basis_matrix(&self) -> Matrix {
        Matrix::from_cols(self.cfg(), self.dim(), &self.ech.cols)
    }

    fn check_space(&self, other: &HermLattice) -> Result<()> {
        if Arc::ptr_eq(&self.space, &other.space) || *self.space == *other.space {
            Ok(())
        } else {
            Err(Error::Mismatch)
        }
    }

    /// Moment matrix of the canonical basis.
    pub fn gram(&self) -> &Matrix {
        self.gram.get_or_init(|| self.space.moment_matrix(&self.ech.cols))
    }

    /// Coordinates in the canonical basis, or None outside the E-span.
    pub fn coords(&self, x: &[Elem]) -> Option<Vec<Elem>> {
        self.ech.coords(self.cfg(), x)
    }

    pub fn in_span(&self, x: &[Elem]) -> bool {
        self.coords(x).is_some()
    }

    pub fn contains_vec(&self, x: &[Elem]) -> bool {
        self.coords(x).is_some_and(|c| c.iter().all(Elem::is_integral))
    }

    pub fn contains(&self, other: &HermLattice) -> Result<bool> {
        self.check_space(other)?;
        Ok(other.basis().iter().all(|b| self.contains_vec(b)))
    }

    pub fn sum(&self, other: &HermLattice) -> Result<HermLattice> {
        self.check_space(other)?;
        let cols = self.basis().iter().chain(other.basis()).cloned().collect();
        HermLattice::generated(self.space.clone(), cols)
    }

    /// L + O_E·x.
    pub fn add_vector(&self, x: &[Elem]) -> HermLattice {
        let mut cols = self.basis().to_vec();
        cols.push(x.to_vec());
        HermLattice::generated(self.space.clone(), cols).expect("same space")
    }

    pub fn intersect(&self, other: &HermLattice) -> Result<HermLattice> {
        self.check_space(other)?;
        let cfg = self.cfg();
        let n = self.dim();
        let (m1, m2) = (self.rank(), other.rank());
        let rows = n + m1 + m2;
        let mut cols = Vec::with_capacity(m1 + m2);
        for (j, b) in self.basis().iter().enumerate() {
            let mut c = b.clone();
            c.resize(rows, cfg.zero());
            c[n + j] = cfg.one();
            cols.push(c);
        }
        for (j, b) in other.basis().iter().enumerate() {
            let mut c: Vector = b.iter().map(|x| -x).collect();
            c.resize(rows, cfg.zero());
            c[n + m1 + j] = cfg.one();
            cols.push(c);
        }
        let ech = echelon(cfg, rows, cols);
        let gens = ech
            .cols
            .iter()
            .zip(&ech.pivots)
            .filter(|(_, &(r, _))| r >= n)
            .map(|(col, _)| self.combine(&col[n..n + m1]))
            .collect();
        HermLattice::generated(self.space.clone(), gens)
    }

    /// {v ∈ L : (v, f) = 0 for every f in `perp`}.
    pub fn orthogonal_part(&self, perp: &[Vector]) -> HermLattice {
        let cfg = self.cfg();
        let k = perp.len();
        let m = self.rank();
        let cols = self
            .basis()
            .iter()
            .enumerate()
            .map(|(j, b)| {
                let mut c: Vector = perp.iter().map(|f| self.space.pair(b, f)).collect();
                c.resize(k + m, cfg.zero());
                c[k + j] = cfg.one();
                c
            })
            .collect();
        let ech = echelon(cfg, k + m, cols);
        let gens = ech
            .cols
            .iter()
            .zip(&ech.pivots)
            .filter(|(_, &(r, _))| r >= k)
            .map(|(col, _)| self.combine(&col[k..]))
            .collect();
        HermLattice::generated(self.space.clone(), gens).expect("same space")
    }

    /// Σ c_j·b_j over the canonical basis.
    pub fn combine(&self, coeffs: &[Elem]) -> Vector {
        let mut v = self.space.zero_vector();
        for (a, b) in coeffs.iter().zip(self.basis()) {
            if !a.is_zero() {
                v = vec_add(&v, &vec_scale(a, b));
            }
        }
        v
    }

    /// s·L.
    pub fn rescale(&self, s: &Elem) -> HermLattice {
        let cols = self.basis().iter().map(|b| vec_scale(s, b)).collect();
        HermLattice::generated(self.space.clone(), cols).expect("same space")
    }

    /// {x ∈ span(L) : (x, y) ∈ u⁻¹O_E for all y ∈ L}.
    pub fn dual(&self) -> Result<HermLattice> {
        let t = self.gram();
        let ti = t.inverse()?;
        let cfg = self.cfg();
        let c = ti.transpose().scale(&cfg.u_pow(-1));
        let b = self.basis_matrix();
        let d = &b * &c;
        HermLattice::new(self.space.clone(), d.columns())
    }

    pub fn is_integral(&self) -> bool {
        let t = self.gram();
        let m = t.rows();
        (0..m).all(|i| (i..m).all(|j| t.get(i, j).val() >= EValuation::Finite(-1)))
    }

    /// Elementary exponents a_i with a₁+…+a_i − i = min val_E over i-minors.
    /// Defined for any nondegenerate lattice; negative entries mean non-integral.
    pub fn exponents(&self) -> Result<Vec<i64>> {
        let t = self.gram();
        let m = t.rows();
        let mut prev = 0;
        let mut out = Vec::with_capacity(m);
        for i in 1..=m {
            let s = t.min_minor_val(i)?.finite().ok_or(Error::Degenerate)?;
            let cur = s + i as i64;
            out.push(cur - prev);
            prev = cur;
        }
        Ok(out)
    }

    pub fn invariants(&self) -> Result<Invariants> {
        if !self.is_integral() {
            return Err(Error::NotIntegral);
        }
        Ok(Invariants::from_sorted(self.exponents()?))
    }

    /// Σ a_i for integral lattices, −1 for non-integral ones.
    pub fn val_or_minus_one(&self) -> Result<i64> {
        match self.invariants() {
            Ok(inv) => Ok(inv.val),
            Err(Error::NotIntegral) => Ok(-1),
            Err(e) => Err(e),
        }
    }

    /// val_E(det T) + rank; agrees with Σ a_i on integral lattices.
    pub fn volume_val(&self) -> Result<i64> {
        let d = self.gram().det()?;
        Ok(d.val().finite().ok_or(Error::Degenerate)? + self.rank() as i64)
    }

    pub fn is_vertex(&self) -> Result<bool> {
        Ok(self.is_integral() && self.invariants()?.a_max() <= 1)
    }

    pub fn is_selfdual(&self) -> Result<bool> {
        Ok(self.is_integral() && self.invariants()?.a_max() == 0)
    }

    /// Orthogonal direct sum in the block-diagonal space.
    pub fn orthogonal_sum(a: &HermLattice, b: &HermLattice) -> Result<HermLattice> {
        if a.cfg() != b.cfg() {
            return Err(Error::Mismatch);
        }
        let cfg = a.cfg();
        let space = HermSpace::new(Matrix::block_diag(a.space.gram(), b.space.gram()))?;
        let (n1, n2) = (a.dim(), b.dim());
        let mut cols = Vec::new();
        for c in a.basis() {
            let mut v = c.clone();
            v.resize(n1 + n2, cfg.zero());
            cols.push(v);
        }
        for c in b.basis() {
            let mut v = vec![cfg.zero(); n1];
            v.extend(c.iter().cloned());
            cols.push(v);
        }
        HermLattice::new(space, cols)
    }

    /// Representatives of self/sub for a finite-index sublattice `sub`.
    pub fn coset_reps(&self, sub: &HermLattice, cap: usize) -> Result<Vec<Vector>> {
        let (digits, size) = self.quotient_shape(sub)?;
        if size > cap as u128 {
            return Err(Error::TooLarge(format!("quotient of size {size} exceeds {cap}")));
        }
        let cfg = self.cfg();
        let q = cfg.p;
        let mut reps = vec![self.space.zero_vector()];
        for (k, &d) in digits.iter().enumerate() {
            if d == 0 {
                continue;
            }
            let mut next = Vec::with_capacity(reps.len() * (q as usize).pow(d as u32));
            let ts = digit_elements(cfg, d as usize);
            for r in &reps {
                for t in &ts {
                    next.push(vec_add(r, &vec_scale(t, &self.basis()[k])));
                }
            }
            reps = next;
        }
        Ok(reps)
    }

    /// Exponents d_k with sub = span(u^{d_k}·m_k + lower terms) in self's basis.
    pub(crate) fn quotient_shape(&self, sub: &HermLattice) -> Result<(Vec<i64>, u128)> {
        self.check_space(sub)?;
        if sub.rank() != self.rank() {
            return Err(Error::Dimension("quotient needs equal ranks".into()));
        }
        let mut coord_cols = Vec::with_capacity(sub.rank());
        for b in sub.basis() {
            let c = self
                .coords(b)
                .filter(|c| c.iter().all(Elem::is_integral))
                .ok_or_else(|| Error::Precondition("not a sublattice".into()))?;
            coord_cols.push(c);
        }
        let ech = echelon(self.cfg(), self.rank(), coord_cols);
        let digits: Vec<i64> = ech.pivots.iter().map(|&(_, v)| v).collect();
        let size = digits
            .iter()
            .try_fold(1u128, |acc, &d| acc.checked_mul((self.cfg().p as u128).checked_pow(d as u32)?))
            .unwrap_or(u128::MAX);
        Ok((digits, size))
    }

    /// length_{O_E}(self/sub).
    pub fn index_length(&self, sub: &HermLattice) -> Result<i64> {
        Ok(self.quotient_shape(sub)?.0.iter().sum())
    }
}

/// All Σ_{j<d} t_j·u^j with digits t_j ∈ 0..p, in lexicographic digit order.
pub(crate) fn digit_elements(cfg: FieldConfig, d: usize) -> Vec<Elem> {
    let p = cfg.p;
    let mut out = Vec::new();
    let total = (p as usize).pow(d as u32);
    for mut idx in 0..total {
        let mut digits = vec![0u64; d];
        for slot in digits.iter_mut() {
            *slot = (idx % p as usize) as u64;
            idx /= p as usize;
        }
        out.push(Elem::from_digits(cfg, &digits));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> FieldConfig {
        FieldConfig::new(3, 1).unwrap()
    }

    fn hyperbolic(c: FieldConfig) -> Arc<HermSpace> {
        let ui = c.u_pow(-1);
        HermSpace::new(
            Matrix::from_rows(c, vec![vec![c.zero(), ui.clone()], vec![-ui, c.zero()]]).unwrap(),
        )
        .unwrap()
    }

    fn diag(c: FieldConfig, d: &[i64]) -> HermLattice {
        let e: Vec<Elem> = d.iter().map(|&x| c.int(x)).collect();
        HermLattice::standard(HermSpace::diagonal(c, &e).unwrap())
    }

    #[test]
    fn gram_examples() {
        let c = cfg();
        let h = HermLattice::standard(hyperbolic(c));
        assert_eq!(h.gram(), hyperbolic(c).gram());
        let l = diag(c, &[1, 3]);
        let scaled = l.space().moment_matrix(&l.basis().iter().map(|b| vec_scale(&c.u(), b)).collect::<Vec<_>>());
        assert_eq!(scaled, l.gram().scale(&c.int(-3)));
    }

    #[test]
    fn duals() {
        let c = cfg();
        let h = HermLattice::standard(hyperbolic(c));
        assert_eq!(h.dual().unwrap(), h);
        let l = diag(c, &[2]);
        assert_eq!(l.dual().unwrap(), l.rescale(&c.u_pow(-1)));
        let m = diag(c, &[1, 3]);
        assert_eq!(m.dual().unwrap().dual().unwrap(), m);
    }

    #[test]
    fn predicates_and_invariants() {
        let c = cfg();
        let h = HermLattice::standard(hyperbolic(c));
        assert!(h.is_integral() && h.is_vertex().unwrap() && h.is_selfdual().unwrap());
        assert_eq!(h.invariants().unwrap().a, vec![0, 0]);
        let d = diag(c, &[1, 1]);
        assert!(d.is_vertex().unwrap() && !d.is_selfdual().unwrap());
        assert_eq!(d.invariants().unwrap().a, vec![1, 1]);
        assert_eq!(diag(c, &[1, 3]).invariants().unwrap().a, vec![1, 3]);
        assert_eq!(diag(c, &[2]).invariants().unwrap().a, vec![1]);
        let e = c.rational(crate::rational::q_frac(1, 3));
        let bad = HermLattice::standard(HermSpace::diagonal(c, &[e]).unwrap());
        assert!(!bad.is_integral());
        assert_eq!(bad.invariants(), Err(Error::NotIntegral));
    }

    #[test]
    fn nonsplit_examples() {
        let c = cfg();
        assert!(diag(c, &[1, 1]).space().is_nonsplit().unwrap());
        assert!(!hyperbolic(c).is_nonsplit().unwrap());
        let c5 = FieldConfig::new(5, 1).unwrap();
        assert!(!diag(c5, &[1, 1]).space().is_nonsplit().unwrap());
        assert!(HermSpace::diagonal(c, &[c.one()]).unwrap().is_nonsplit().is_err());
    }

    #[test]
    fn vector_helpers() {
        let c = cfg();
        let l = diag(c, &[3]);
        let x = l.basis()[0].clone();
        assert_eq!(l.space().val_of_vector(&x).unwrap(), 3);
        assert!(diag(c, &[1]).space().v_int_test(&x));
        let s = HermSpace::diagonal(c, &[c.rational(crate::rational::q_frac(1, 3))]).unwrap();
        assert!(!s.v_int_test(&x));
    }

    #[test]
    fn algebra() {
        let c = cfg();
        let l = diag(c, &[1, 3]);
        assert_eq!(l.sum(&l).unwrap(), l);
        assert_eq!(l.intersect(&l.dual().unwrap()).unwrap(), l);
        let a = diag(c, &[1, 1]);
        let b = diag(c, &[3]);
        let s = HermLattice::orthogonal_sum(&a, &b).unwrap();
        assert_eq!(s.invariants().unwrap().a, vec![1, 1, 3]);
        assert!(l.dual().unwrap().contains(&l).unwrap());
        assert!(!l.contains(&l.dual().unwrap()).unwrap());
        assert_eq!(l.dual().unwrap().coset_reps(&l, 100).unwrap().len(), 81);
        assert_eq!(l.dual().unwrap().index_length(&l).unwrap(), 4);
    }

    #[test]
    fn canonical_form_ignores_generators() {
        let c = cfg();
        let l = diag(c, &[1, 3]);
        let unit = &c.one() + &c.u();
        let b = l.basis();
        let mixed = vec![vec_scale(&unit, &b[0]), vec_add(&b[1], &vec_scale(&c.int(5), &b[0]))];
        assert_eq!(HermLattice::new(l.space().clone(), mixed).unwrap(), l);
        assert_eq!(l.rescale(&unit), l);
        assert_ne!(l.rescale(&c.u()), l);
        assert_eq!(l.volume_val().unwrap(), 4);
    }
}
