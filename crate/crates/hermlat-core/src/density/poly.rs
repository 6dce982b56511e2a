//! Integer polynomials in X for the normalized Siegel series.

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::Q;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DenPoly {
    pub q: u64,
    /// Ascending powers of X, trailing zeros trimmed.
    pub coeffs: Vec<BigInt>,
}

#[derive(Serialize, Deserialize)]
struct DenPolyJson {
    q: u64,
    coeffs: Vec<i64>,
}

impl DenPoly {
    pub fn zero(q: u64) -> Self {
        Self { q, coeffs: Vec::new() }
    }

    pub fn new(q: u64, mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        Self { q, coeffs }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn add(&self, other: &DenPoly) -> DenPoly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let get = |c: &[BigInt], i: usize| c.get(i).cloned().unwrap_or_default();
        DenPoly::new(self.q, (0..n).map(|i| get(&self.coeffs, i) + get(&other.coeffs, i)).collect())
    }

    pub fn mul(&self, other: &DenPoly) -> DenPoly {
        if self.is_zero() || other.is_zero() {
            return DenPoly::zero(self.q);
        }
        let mut out = vec![BigInt::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        DenPoly::new(self.q, out)
    }

    /// c·X^k.
    pub fn monomial(q: u64, c: BigInt, k: usize) -> DenPoly {
        let mut coeffs = vec![BigInt::zero(); k + 1];
        coeffs[k] = c;
        DenPoly::new(q, coeffs)
    }

    pub fn eval(&self, x: &Q) -> Q {
        let mut acc = Q::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + Q::from_integer(c.clone());
        }
        acc
    }

    pub fn derivative(&self) -> DenPoly {
        let coeffs = self.coeffs.iter().enumerate().skip(1).map(|(i, c)| c * BigInt::from(i)).collect();
        DenPoly::new(self.q, coeffs)
    }

    /// Den(q^{-s}); the interpolation point for Den(H_{r+s}, L).
    pub fn at_q_power(&self, s: i64) -> Q {
        let x = crate::rational::p_pow(self.q, -s);
        self.eval(&x)
    }

    pub fn to_json(&self) -> Result<serde_json::Value> {
        let coeffs = self
            .coeffs
            .iter()
            .map(|c| c.to_i64().ok_or_else(|| Error::TooLarge(format!("coefficient {c}"))))
            .collect::<Result<Vec<_>>>()?;
        Ok(serde_json::to_value(DenPolyJson { q: self.q, coeffs }).expect("plain data"))
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Self> {
        let j: DenPolyJson = serde_json::from_value(v.clone()).map_err(|e| Error::Parse(e.to_string()))?;
        Ok(DenPoly::new(j.q, j.coeffs.into_iter().map(BigInt::from).collect()))
    }
}

/// Π_{i=0}^{k−1} (1 − q^{2i} X²).
pub(crate) fn type_factor(q: u64, k: usize) -> DenPoly {
    let mut acc = DenPoly::new(q, vec![BigInt::one()]);
    let qb = BigInt::from(q);
    for i in 0..k {
        let c = -num_traits::pow(qb.clone(), 2 * i);
        acc = acc.mul(&DenPoly::new(q, vec![BigInt::one(), BigInt::zero(), c]));
    }
    acc
}
