//! Scalar normalizing factors that need no lattice.

use std::f64::consts::PI;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::rational::{p_pow, q_int, Q};

/// Π_{i=1}^{r} (1 − q^{−2i}).
pub fn b2r_at_zero(q: u64, r: u32) -> Q {
    (1..=r as i64).fold(q_int(1), |acc, i| acc * (q_int(1) - p_pow(q, -2 * i)))
}

/// Π_{i=1}^{r} 1/(1 − q^{−2s−2i}); needs 2s ∈ Z.
pub fn b2r_s(q: u64, r: u32, s: &Q) -> Result<Q> {
    let two_s = s * q_int(2);
    if !two_s.is_integer() {
        return Err(Error::Domain(format!("b2r_s needs 2s integral, got s = {s}")));
    }
    let two_s: i64 = crate::rational::to_i64(&two_s).ok_or_else(|| Error::TooLarge(format!("s = {s}")))?;
    let mut acc = q_int(1);
    for i in 1..=r as i64 {
        let f = q_int(1) - p_pow(q, -two_s - 2 * i);
        if f.is_zero() {
            return Err(Error::Domain(format!("b2r_s has a pole at s = {s}")));
        }
        acc /= f;
    }
    Ok(acc)
}

/// q^{r−1}(q+1) / ((q^{2r−1}+1)(q^{2r}−1)).
pub fn aur_factor(q: u64, r: u32) -> Q {
    let r = r as i64;
    let num = p_pow(q, r - 1) * q_int(q as i64 + 1);
    let den = (p_pow(q, 2 * r - 1) + q_int(1)) * (p_pow(q, 2 * r) - q_int(1));
    num / den
}

/// (−1)^r 2^{r(r−1)} π^{r²} Γ(1)⋯Γ(r)/(Γ(r+1)⋯Γ(2r)).
pub fn archimedean_constant(r: u32) -> f64 {
    let r = r as i32;
    // Γ(k) = (k−1)!, so the ratio is Π_{i=1}^{r} (i−1)!/(r+i−1)!.
    let mut log_ratio = 0.0;
    for i in 1..=r {
        log_ratio += ln_factorial(i - 1) - ln_factorial(r + i - 1);
    }
    let log_mag = (r * (r - 1)) as f64 * 2f64.ln() + (r * r) as f64 * PI.ln() + log_ratio;
    let sign = if r % 2 == 0 { 1.0 } else { -1.0 };
    sign * log_mag.exp()
}

fn ln_factorial(k: i32) -> f64 {
    (2..=k).map(|j| (j as f64).ln()).sum()
}

/// L^σ(s + 1/2)/b_{2r}(s) with x = q^{−s−1/2} given exactly and t_i = q^{σ_i}:
/// Π 1/((1 − t_i x)(1 − x/t_i)) · Π_{i=1}^{r} (1 − q·x²·q^{−2i}).
pub fn spherical_zeta(q: u64, t: &[Q], x: &Q) -> Result<Q> {
    let mut acc = Q::one();
    for ti in t {
        if ti.is_zero() {
            return Err(Error::Domain("Satake parameter must be nonzero".into()));
        }
        let f = (q_int(1) - ti * x) * (q_int(1) - x / ti);
        if f.is_zero() {
            return Err(Error::Domain(format!("pole of L^σ at t = {ti}, x = {x}")));
        }
        acc /= f;
    }
    let qx2 = q_int(q as i64) * x * x;
    for i in 1..=t.len() as i64 {
        acc *= q_int(1) - &qx2 * p_pow(q, -2 * i);
    }
    Ok(acc)
}

/// Floating-point version for arbitrary real s and exponents σ_i.
pub fn spherical_zeta_f64(q: f64, sigma: &[f64], s: f64) -> f64 {
    let x = q.powf(-s - 0.5);
    let mut acc = 1.0;
    for (i, &sg) in sigma.iter().enumerate() {
        let t = q.powf(sg);
        acc /= (1.0 - t * x) * (1.0 - x / t);
        acc *= 1.0 - q.powf(-2.0 * s - 2.0 * (i as f64 + 1.0));
    }
    acc
}
