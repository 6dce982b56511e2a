//! Sizes C_m of GL_g(O/p^m)/P(O/p^m) for block upper triangular parabolics P,
//! and the tower identity for refining a block.

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::rational::is_odd_prime;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Composition {
    parts: Vec<u32>,
}

impl Composition {
    pub fn new(parts: Vec<u32>) -> Result<Self> {
        if parts.is_empty() {
            return Err(Error::Domain("a composition needs at least one part".into()));
        }
        Ok(Self { parts })
    }

    pub fn parts(&self) -> &[u32] {
        &self.parts
    }

    pub fn g(&self) -> u32 {
        self.parts.iter().sum()
    }

    /// Σ_{i<j} g_i·g_j, the dimension of GL_g/P.
    pub fn flag_dim(&self) -> u64 {
        let mut acc = 0u64;
        for (i, a) in self.parts.iter().enumerate() {
            for b in &self.parts[i + 1..] {
                acc += (*a as u64) * (*b as u64);
            }
        }
        acc
    }
}

fn check_prime(p: u64) -> Result<()> {
    if p != 2 && !is_odd_prime(p) {
        return Err(Error::Domain(format!("{p} is not prime")));
    }
    Ok(())
}

/// [n]_p! = Π_{k=1}^{n} (p^k − 1)/(p − 1).
fn q_factorial(n: u32, p: u64) -> BigInt {
    let pb = BigInt::from(p);
    (1..=n).fold(BigInt::one(), |acc, k| acc * (num_traits::pow(pb.clone(), k as usize) - 1u32) / (p - 1))
}

pub fn gaussian_multinomial(parts: &Composition, p: u64) -> BigInt {
    let den = parts.parts.iter().fold(BigInt::one(), |acc, &k| acc * q_factorial(k, p));
    q_factorial(parts.g(), p) / den
}

/// C_m = p^{(m−1)·Σ_{i<j} g_i g_j} times the Gaussian multinomial.
pub fn c_m(parts: &Composition, m: u32, p: u64) -> Result<BigInt> {
    if m < 1 {
        return Err(Error::Domain("level m must be at least 1".into()));
    }
    check_prime(p)?;
    let lift = num_traits::pow(BigInt::from(p), ((m - 1) as u64 * parts.flag_dim()) as usize);
    Ok(lift * gaussian_multinomial(parts, p))
}

/// Counts invertible g×g matrices over Z/p^m, zero below the block diagonal
/// of `parts` (or unrestricted when `parts` is None).
fn count_matrices(g: usize, parts: Option<&[u32]>, m: u32, p: u64) -> u64 {
    let modulus = p.pow(m);
    let block: Vec<usize> = match parts {
        Some(ps) => ps.iter().enumerate().flat_map(|(i, &k)| std::iter::repeat_n(i, k as usize)).collect(),
        None => vec![0; g],
    };
    let free: Vec<(usize, usize)> =
        (0..g).flat_map(|i| (0..g).map(move |j| (i, j))).filter(|&(i, j)| block[i] <= block[j]).collect();
    let total = modulus.pow(free.len() as u32);
    let mut count = 0u64;
    let mut a = vec![vec![0i64; g]; g];
    for mut idx in 0..total {
        for &(i, j) in &free {
            a[i][j] = (idx % modulus) as i64;
            idx /= modulus;
        }
        if det_mod_p(&a, p) != 0 {
            count += 1;
        }
    }
    count
}

/// Determinant modulo p by cofactor expansion (g ≤ 3).
fn det_mod_p(a: &[Vec<i64>], p: u64) -> i64 {
    let p = p as i64;
    let d = match a.len() {
        0 => 1,
        1 => a[0][0],
        2 => a[0][0] * a[1][1] - a[0][1] * a[1][0],
        3 => {
            a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1]) - a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0])
                + a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0])
        }
        _ => unreachable!("g ≤ 3"),
    };
    d.rem_euclid(p)
}

/// Largest brute-force matrix enumeration.
const BRUTE_CAP: u64 = 2_000_000;

/// |G(Z/p^m)| for a smooth group scheme G of dimension `dim`: brute force when
/// small, else p^{(m−1)·dim}·|G(F_p)|.
fn group_order(g: usize, parts: Option<&[u32]>, m: u32, p: u64) -> u64 {
    let dim = match parts {
        Some(ps) => (g * g) as u64 - ps.iter().enumerate().map(|(i, &a)| ps[i + 1..].iter().map(|&b| (a * b) as u64).sum::<u64>()).sum::<u64>(),
        None => (g * g) as u64,
    };
    if (p.pow(m) as u128).pow(dim as u32) <= BRUTE_CAP as u128 {
        count_matrices(g, parts, m, p)
    } else {
        p.pow((m - 1) * dim as u32) * count_matrices(g, parts, 1, p)
    }
}

/// |GL_g(Z/p^m)| / |P(Z/p^m)| from explicit group orders.
pub fn c_m_by_group_order(parts: &Composition, m: u32, p: u64) -> Result<BigInt> {
    check_prime(p)?;
    let g = parts.g() as usize;
    if g > 3 || m > 2 || p > 3 || m < 1 {
        return Err(Error::TooLarge(format!("group orders need g ≤ 3, 1 ≤ m ≤ 2, p ≤ 3; got g={g}, m={m}, p={p}")));
    }
    let full = group_order(g, None, m, p);
    let para = group_order(g, Some(&parts.parts), m, p);
    if !full.is_multiple_of(para) {
        return Err(Error::Inconsistent(format!("{para} does not divide {full}")));
    }
    Ok(BigInt::from(full / para))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RefinementCheck {
    #[serde(serialize_with = "ser_big")]
    pub refined: BigInt,
    #[serde(serialize_with = "ser_big")]
    pub coarse: BigInt,
    #[serde(serialize_with = "ser_big")]
    pub blocks: BigInt,
    pub holds: bool,
}

fn ser_big<S: serde::Serializer>(v: &BigInt, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

/// C_m of the refined composition against C_m(coarse)·Π C_m(block refinement).
pub fn refinement_identity(coarse: &Composition, refinements: &[Composition], m: u32, p: u64) -> Result<RefinementCheck> {
    if refinements.len() != coarse.parts.len() {
        return Err(Error::Dimension(format!(
            "{} refinements for {} blocks",
            refinements.len(),
            coarse.parts.len()
        )));
    }
    for (r, &g) in refinements.iter().zip(&coarse.parts) {
        if r.g() != g {
            return Err(Error::Dimension(format!("refinement {:?} does not partition a block of size {g}", r.parts)));
        }
    }
    let refined = Composition::new(refinements.iter().flat_map(|r| r.parts.iter().copied()).collect())?;
    let refined_c = c_m(&refined, m, p)?;
    let coarse_c = c_m(coarse, m, p)?;
    let blocks = refinements.iter().try_fold(BigInt::one(), |acc, r| Ok::<_, Error>(acc * c_m(r, m, p)?))?;
    let holds = refined_c == &coarse_c * &blocks && !refined_c.is_zero();
    Ok(RefinementCheck { refined: refined_c, coarse: coarse_c, blocks, holds })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn comp(p: &[u32]) -> Composition {
        Composition::new(p.to_vec()).unwrap()
    }

    #[test]
    fn fixed_points() {
        assert_eq!(c_m(&comp(&[1, 1]), 1, 5).unwrap(), BigInt::from(6));
        assert_eq!(c_m(&comp(&[1, 1, 1]), 1, 3).unwrap(), BigInt::from(52));
        assert_eq!(c_m(&comp(&[1, 1]), 2, 3).unwrap(), BigInt::from(12));
        assert_eq!(c_m_by_group_order(&comp(&[1, 1]), 2, 3).unwrap(), BigInt::from(12));
        assert!(c_m(&comp(&[1]), 0, 3).is_err());
        assert!(c_m(&comp(&[1]), 1, 4).is_err());
    }

    #[test]
    fn refinement_examples() {
        let r = refinement_identity(&comp(&[2, 1]), &[comp(&[1, 1]), comp(&[1])], 1, 3).unwrap();
        assert_eq!((r.refined.clone(), r.coarse.clone(), r.blocks.clone()), (52.into(), 13.into(), 4.into()));
        assert!(r.holds);
        let t = refinement_identity(&comp(&[2, 1]), &[comp(&[2]), comp(&[1])], 1, 3).unwrap();
        assert!(t.holds && t.blocks == BigInt::one());
        assert!(refinement_identity(&comp(&[2, 1]), &[comp(&[1]), comp(&[1])], 1, 3).is_err());
    }

    #[test]
    fn formula_matches_group_orders() {
        let comps: [&[u32]; 7] = [&[1], &[2], &[1, 1], &[3], &[2, 1], &[1, 2], &[1, 1, 1]];
        for p in [2, 3] {
            for m in [1, 2] {
                for c in comps {
                    let c = comp(c);
                    assert_eq!(c_m(&c, m, p).unwrap(), c_m_by_group_order(&c, m, p).unwrap(), "{c:?} m={m} p={p}");
                }
            }
        }
    }
}
