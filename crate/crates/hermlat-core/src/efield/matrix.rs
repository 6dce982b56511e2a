use std::ops::Mul;

use super::{EValuation, Elem, FieldConfig, Vector};
use crate::error::{Error, Result};

/// Dense row-major matrix over E.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Matrix {
    cfg: FieldConfig,
    rows: usize,
    cols: usize,
    data: Vec<Elem>,
}

impl Matrix {
    pub fn zeros(cfg: FieldConfig, rows: usize, cols: usize) -> Self {
        Self { cfg, rows, cols, data: vec![cfg.zero(); rows * cols] }
    }

    pub fn identity(cfg: FieldConfig, n: usize) -> Self {
        let mut m = Self::zeros(cfg, n, n);
        for i in 0..n {
            m.set(i, i, cfg.one());
        }
        m
    }

    pub fn from_rows(cfg: FieldConfig, rows: Vec<Vec<Elem>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::Dimension("ragged rows".into()));
        }
        Ok(Self { cfg, rows: r, cols: c, data: rows.into_iter().flatten().collect() })
    }

    /// Builds an `nrows × cols.len()` matrix whose columns are `cols`.
    pub fn from_cols(cfg: FieldConfig, nrows: usize, cols: &[Vector]) -> Self {
        let mut m = Self::zeros(cfg, nrows, cols.len());
        for (j, c) in cols.iter().enumerate() {
            assert_eq!(c.len(), nrows, "column length");
            for (i, x) in c.iter().enumerate() {
                m.set(i, j, x.clone());
            }
        }
        m
    }

    pub fn diagonal(cfg: FieldConfig, entries: &[Elem]) -> Self {
        let mut m = Self::zeros(cfg, entries.len(), entries.len());
        for (i, x) in entries.iter().enumerate() {
            m.set(i, i, x.clone());
        }
        m
    }

    /// Block-diagonal sum of two matrices.
    pub fn block_diag(a: &Matrix, b: &Matrix) -> Matrix {
        let mut m = Matrix::zeros(a.cfg, a.rows + b.rows, a.cols + b.cols);
        for i in 0..a.rows {
            for j in 0..a.cols {
                m.set(i, j, a.get(i, j).clone());
            }
        }
        for i in 0..b.rows {
            for j in 0..b.cols {
                m.set(a.rows + i, a.cols + j, b.get(i, j).clone());
            }
        }
        m
    }

    pub fn cfg(&self) -> FieldConfig {
        self.cfg
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Elem {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, x: Elem) {
        self.data[i * self.cols + j] = x;
    }

    pub fn row(&self, i: usize) -> Vector {
        self.data[i * self.cols..(i + 1) * self.cols].to_vec()
    }

    pub fn col(&self, j: usize) -> Vector {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn columns(&self) -> Vec<Vector> {
        (0..self.cols).map(|j| self.col(j)).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<Elem>> {
        (0..self.rows).map(|i| self.row(i)).collect()
    }

    pub fn transpose(&self) -> Matrix {
        let mut m = Matrix::zeros(self.cfg, self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m.set(j, i, self.get(i, j).clone());
            }
        }
        m
    }

    pub fn conj(&self) -> Matrix {
        Matrix { data: self.data.iter().map(Elem::conj).collect(), ..self.clone() }
    }

    pub fn conj_transpose(&self) -> Matrix {
        self.transpose().conj()
    }

    pub fn scale(&self, c: &Elem) -> Matrix {
        Matrix { data: self.data.iter().map(|x| c * x).collect(), ..self.clone() }
    }

    pub fn try_mul(&self, rhs: &Matrix) -> Result<Matrix> {
        if self.cols != rhs.rows {
            return Err(Error::Dimension(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let mut m = Matrix::zeros(self.cfg, self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let b = rhs.get(k, j);
                    if b.is_zero() {
                        continue;
                    }
                    let prod = a * b;
                    m.data[i * rhs.cols + j] += &prod;
                }
            }
        }
        Ok(m)
    }

    pub fn mul_vec(&self, v: &[Elem]) -> Vector {
        assert_eq!(v.len(), self.cols, "vector length");
        (0..self.rows)
            .map(|i| {
                let mut acc = self.cfg.zero();
                for (j, x) in v.iter().enumerate() {
                    let a = self.get(i, j);
                    if !a.is_zero() && !x.is_zero() {
                        acc += &(a * x);
                    }
                }
                acc
            })
            .collect()
    }

    pub fn is_hermitian(&self) -> bool {
        self.is_square() && *self == self.conj_transpose()
    }

    /// Determinant by Gaussian elimination over E.
    pub fn det(&self) -> Result<Elem> {
        if !self.is_square() {
            return Err(Error::Dimension("determinant of a non-square matrix".into()));
        }
        let n = self.rows;
        let mut a = self.to_rows();
        let mut det = self.cfg.one();
        for c in 0..n {
            let Some(piv) = (c..n).find(|&r| !a[r][c].is_zero()) else {
                return Ok(self.cfg.zero());
            };
            if piv != c {
                a.swap(piv, c);
                det = -det;
            }
            det = &det * &a[c][c];
            let inv = a[c][c].inv()?;
            for r in c + 1..n {
                if a[r][c].is_zero() {
                    continue;
                }
                let f = &a[r][c] * &inv;
                for k in c..n {
                    let t = &f * &a[c][k];
                    a[r][k] -= &t;
                }
            }
        }
        Ok(det)
    }

    pub fn inverse(&self) -> Result<Matrix> {
        if !self.is_square() {
            return Err(Error::Dimension("inverse of a non-square matrix".into()));
        }
        let n = self.rows;
        let mut a = self.to_rows();
        let mut inv = Matrix::identity(self.cfg, n).to_rows();
        for c in 0..n {
            let piv = (c..n).find(|&r| !a[r][c].is_zero()).ok_or(Error::Degenerate)?;
            a.swap(piv, c);
            inv.swap(piv, c);
            let s = a[c][c].inv()?;
            for k in 0..n {
                a[c][k] = &a[c][k] * &s;
                inv[c][k] = &inv[c][k] * &s;
            }
            for r in 0..n {
                if r == c || a[r][c].is_zero() {
                    continue;
                }
                let f = a[r][c].clone();
                for k in 0..n {
                    let t = &f * &a[c][k];
                    a[r][k] -= &t;
                    let t = &f * &inv[c][k];
                    inv[r][k] -= &t;
                }
            }
        }
        Matrix::from_rows(self.cfg, inv)
    }

    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> Matrix {
        let mut m = Matrix::zeros(self.cfg, rows.len(), cols.len());
        for (i, &r) in rows.iter().enumerate() {
            for (j, &c) in cols.iter().enumerate() {
                m.set(i, j, self.get(r, c).clone());
            }
        }
        m
    }

    /// All i×i minors (row subsets × column subsets, lexicographic).
    pub fn minors(&self, i: usize) -> Result<Vec<Elem>> {
        if i == 0 || i > self.rows.min(self.cols) {
            return Err(Error::Dimension(format!("minor size {i} for {}x{}", self.rows, self.cols)));
        }
        let rs = subsets(self.rows, i);
        let cs = subsets(self.cols, i);
        let mut out = Vec::with_capacity(rs.len() * cs.len());
        for r in &rs {
            for c in &cs {
                out.push(self.submatrix(r, c).det()?);
            }
        }
        Ok(out)
    }

    /// Minimum valuation over all i×i minors.
    pub fn min_minor_val(&self, i: usize) -> Result<EValuation> {
        Ok(self.minors(i)?.iter().map(Elem::val).min().unwrap_or(EValuation::Infinity))
    }

    /// Rank over E.
    pub fn rank(&self) -> usize {
        let mut a = self.to_rows();
        let mut rank = 0;
        for c in 0..self.cols {
            let Some(piv) = (rank..self.rows).find(|&r| !a[r][c].is_zero()) else {
                continue;
            };
            a.swap(piv, rank);
            let inv = a[rank][c].inv().expect("nonzero pivot");
            for r in rank + 1..self.rows {
                if a[r][c].is_zero() {
                    continue;
                }
                let f = &a[r][c] * &inv;
                for k in c..self.cols {
                    let t = &f * &a[rank][k];
                    a[r][k] -= &t;
                }
            }
            rank += 1;
        }
        rank
    }

    /// Basis of the right kernel {v : A·v = 0} over E.
    pub fn kernel(&self) -> Vec<Vector> {
        let mut a = self.to_rows();
        let mut pivots = Vec::new();
        let mut row = 0;
        for c in 0..self.cols {
            let Some(piv) = (row..self.rows).find(|&r| !a[r][c].is_zero()) else {
                continue;
            };
            a.swap(piv, row);
            let inv = a[row][c].inv().expect("nonzero pivot");
            for k in 0..self.cols {
                a[row][k] = &a[row][k] * &inv;
            }
            for r in 0..self.rows {
                if r == row || a[r][c].is_zero() {
                    continue;
                }
                let f = a[r][c].clone();
                for k in 0..self.cols {
                    let t = &f * &a[row][k];
                    a[r][k] -= &t;
                }
            }
            pivots.push(c);
            row += 1;
        }
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&f| {
                let mut v = vec![self.cfg.zero(); self.cols];
                v[f] = self.cfg.one();
                for (r, &pc) in pivots.iter().enumerate() {
                    v[pc] = -&a[r][f];
                }
                v
            })
            .collect()
    }
}

impl Mul for &Matrix {
    type Output = Matrix;
    fn mul(self, rhs: &Matrix) -> Matrix {
        self.try_mul(rhs).expect("matrix dimensions")
    }
}

/// All k-subsets of 0..n in lexicographic order.
pub(crate) fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, &mut Vec::new(), &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> FieldConfig {
        FieldConfig::new(3, 1).unwrap()
    }

    #[test]
    fn hyperbolic_is_hermitian() {
        let c = cfg();
        let ui = c.u_pow(-1);
        let h = Matrix::from_rows(c, vec![vec![c.zero(), ui.clone()], vec![-ui, c.zero()]]).unwrap();
        assert!(h.is_hermitian());
    }

    #[test]
    fn determinant_and_minors() {
        let c = cfg();
        assert_eq!(Matrix::identity(c, 2).det().unwrap(), c.one());
        let d = Matrix::diagonal(c, &[c.one(), c.int(3)]);
        assert_eq!(d.min_minor_val(1).unwrap(), EValuation::Finite(0));
        assert_eq!(d.min_minor_val(2).unwrap(), EValuation::Finite(2));
        assert!(d.minors(3).is_err());
    }

    #[test]
    fn inverse_round_trip() {
        let c = cfg();
        let m = Matrix::from_rows(
            c,
            vec![vec![c.one(), c.u()], vec![c.int(2), &c.one() + &c.u()]],
        )
        .unwrap();
        let inv = m.inverse().unwrap();
        assert_eq!(&m * &inv, Matrix::identity(c, 2));
    }

    #[test]
    fn kernel_of_rank_one() {
        let c = cfg();
        let m = Matrix::from_rows(c, vec![vec![c.one(), c.u()]]).unwrap();
        let k = m.kernel();
        assert_eq!(k.len(), 1);
        assert!(m.mul_vec(&k[0]).iter().all(Elem::is_zero));
    }
}
