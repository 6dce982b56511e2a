//! Small helpers around `BigRational` used by every other module.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Exact rational number.
pub type Q = BigRational;

pub fn q_int(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn q_frac(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

fn val_int(n: &BigInt, p: u64) -> i64 {
    let pb = BigInt::from(p);
    let mut n = n.clone();
    let mut k = 0;
    loop {
        let (q, r) = n.div_rem(&pb);
        if !r.is_zero() {
            return k;
        }
        n = q;
        k += 1;
    }
}

/// p-adic valuation of a nonzero rational; `None` for zero.
pub fn val_p(x: &Q, p: u64) -> Option<i64> {
    if x.is_zero() {
        return None;
    }
    Some(val_int(x.numer(), p) - val_int(x.denom(), p))
}

/// `base^e` for any integer exponent (base must be nonzero when e < 0).
pub fn pow_q(base: &Q, e: i64) -> Q {
    let mut out = Q::one();
    let b = if e < 0 { base.recip() } else { base.clone() };
    for _ in 0..e.unsigned_abs() {
        out *= &b;
    }
    out
}

pub fn p_pow(p: u64, e: i64) -> Q {
    pow_q(&q_int(p as i64), e)
}

fn mod_p(n: &BigInt, p: u64) -> u64 {
    n.mod_floor(&BigInt::from(p)).to_u64().expect("residue fits in u64")
}

pub fn inv_mod(a: u64, p: u64) -> u64 {
    let mut r = 1u64;
    let mut b = a % p;
    let mut e = p - 2;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % p;
        }
        b = b * b % p;
        e >>= 1;
    }
    r
}

/// Image of a p-integral rational in Z/p.
pub fn residue(x: &Q, p: u64) -> Result<u64> {
    if let Some(v) = val_p(x, p) {
        if v < 0 {
            return Err(Error::Domain(format!("{} is not p-integral", fmt_q(x))));
        }
    }
    let n = mod_p(x.numer(), p);
    let d = mod_p(x.denom(), p);
    Ok(n * inv_mod(d, p) % p)
}

/// Image of a p-integral rational in Z/p^k, as an integer in [0, p^k).
pub fn residue_pow(x: &Q, p: u64, k: u32) -> Result<u64> {
    if let Some(v) = val_p(x, p) {
        if v < 0 {
            return Err(Error::Domain(format!("{} is not p-integral", fmt_q(x))));
        }
    }
    let m = BigInt::from(p).pow(k);
    let n = x.numer().mod_floor(&m);
    let d = x.denom().mod_floor(&m);
    // d is a unit modulo p^k; extended Euclid gives its inverse.
    let g = d.extended_gcd(&m);
    debug_assert!(g.gcd.is_one());
    let inv = g.x.mod_floor(&m);
    Ok(((n * inv).mod_floor(&m)).to_u64().expect("fits in u64"))
}

pub fn is_square_mod_p(w: u64, p: u64) -> bool {
    let w = w % p;
    if w == 0 {
        return true;
    }
    let mut r = 1u64;
    let mut b = w;
    let mut e = (p - 1) / 2;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % p;
        }
        b = b * b % p;
        e >>= 1;
    }
    r == 1
}

pub fn is_odd_prime(p: u64) -> bool {
    if p < 3 || p.is_multiple_of(2) {
        return false;
    }
    let mut d = 3;
    while d * d <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

/// `"num/den"` with the denominator always present.
pub fn fmt_q(x: &Q) -> String {
    format!("{}/{}", x.numer(), x.denom())
}

/// Serde helper writing a rational as `"num/den"`.
pub fn ser_q<S: serde::Serializer>(x: &Q, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&fmt_q(x))
}

/// Accepts `"n"`, `"n/d"` and surrounding whitespace.
pub fn parse_q(s: &str) -> Result<Q> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not a rational: {s:?}"));
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            Ok(Q::new(n, d))
        }
        None => {
            let n: BigInt = s.parse().map_err(|_| bad())?;
            Ok(Q::from_integer(n))
        }
    }
}

pub fn to_i64(x: &Q) -> Option<i64> {
    if x.is_integer() {
        x.numer().to_i64()
    } else {
        None
    }
}

pub fn abs_q(x: &Q) -> Q {
    x.abs()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn valuations() {
        assert_eq!(val_p(&q_frac(18, 5), 3), Some(2));
        assert_eq!(val_p(&q_frac(2, 27), 3), Some(-3));
        assert_eq!(val_p(&q_int(0), 3), None);
    }

    #[test]
    fn residues() {
        assert_eq!(residue(&q_frac(1, 2), 3).unwrap(), 2);
        assert_eq!(residue_pow(&q_frac(1, 2), 3, 2).unwrap(), 5);
        assert!(residue(&q_frac(1, 3), 3).is_err());
    }

    #[test]
    fn round_trip() {
        for s in ["3/2", "-7/9", "0/1", "12/1"] {
            assert_eq!(fmt_q(&parse_q(s).unwrap()), s);
        }
        assert_eq!(fmt_q(&parse_q("4").unwrap()), "4/1");
    }
}
