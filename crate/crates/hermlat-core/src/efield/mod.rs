//! The ramified quadratic extension E = Q_p(u) with u² = p·ε₀.
//!
//! An element is a pair of rationals (a, b) standing for a + b·u. Valuations
//! are exact: val_E(a + b·u) = min(2·val_p(a), 2·val_p(b) + 1), and the two
//! candidates never tie because they have opposite parity.
//!
//! Denominators prime to p are allowed (they are p-adic units), so the set
//! of representable elements is closed under inversion. Lattice bases in
//! canonical form only ever carry p-power denominators.

mod matrix;

pub use matrix::Matrix;

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::{fmt_q, is_odd_prime, is_square_mod_p, p_pow, q_int, residue, val_p, Q};

/// The prime p and the unit ε₀ fixing u² = p·ε₀.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FieldConfig {
    pub p: u64,
    pub eps0: i64,
}

impl FieldConfig {
    pub fn new(p: u64, eps0: i64) -> Result<Self> {
        if !is_odd_prime(p) {
            return Err(Error::Config(format!("p = {p} is not an odd prime")));
        }
        if eps0.rem_euclid(p as i64) == 0 {
            return Err(Error::Config(format!("eps0 = {eps0} is divisible by p = {p}")));
        }
        Ok(Self { p, eps0 })
    }

    /// Smallest positive quadratic nonresidue modulo p.
    pub fn smallest_nonresidue(p: u64) -> i64 {
        (2..p).find(|&w| !is_square_mod_p(w, p)).expect("odd prime has a nonresidue") as i64
    }

    /// The configuration whose ε₀ is the smallest nonresidue.
    pub fn nonresidue(p: u64) -> Result<Self> {
        if !is_odd_prime(p) {
            return Err(Error::Config(format!("p = {p} is not an odd prime")));
        }
        Self::new(p, Self::smallest_nonresidue(p))
    }

    /// q = p, the residue cardinality of F = Q_p.
    pub fn q(&self) -> u64 {
        self.p
    }

    /// u² = p·ε₀ as a rational.
    pub fn u_squared(&self) -> Q {
        q_int(self.p as i64 * self.eps0)
    }

    pub fn zero(&self) -> Elem {
        Elem::new(*self, Q::zero(), Q::zero())
    }

    pub fn one(&self) -> Elem {
        Elem::new(*self, Q::one(), Q::zero())
    }

    pub fn u(&self) -> Elem {
        Elem::new(*self, Q::zero(), Q::one())
    }

    pub fn int(&self, n: i64) -> Elem {
        Elem::new(*self, q_int(n), Q::zero())
    }

    pub fn rational(&self, a: Q) -> Elem {
        Elem::new(*self, a, Q::zero())
    }

    /// u^k for any integer k.
    pub fn u_pow(&self, k: i64) -> Elem {
        let j = k.div_euclid(2);
        let base = crate::rational::pow_q(&self.u_squared(), j);
        if k.rem_euclid(2) == 0 {
            Elem::new(*self, base, Q::zero())
        } else {
            Elem::new(*self, Q::zero(), base)
        }
    }

    /// Whether the nonzero rational t lies in Nm(E^×).
    ///
    /// With t = p^k·w: for even k test w, for odd k test w/(−ε₀), in each
    /// case for being a square modulo p.
    pub fn is_norm(&self, t: &Q) -> Result<bool> {
        let k = val_p(t, self.p).ok_or_else(|| Error::Domain("is_norm(0)".into()))?;
        let w = t / p_pow(self.p, k);
        let w = if k % 2 == 0 { w } else { w / q_int(-self.eps0) };
        Ok(is_square_mod_p(residue(&w, self.p)?, self.p))
    }
}

/// Valuation on E normalised by val_E(u) = 1.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum EValuation {
    Finite(i64),
    Infinity,
}

impl EValuation {
    pub fn finite(self) -> Option<i64> {
        match self {
            EValuation::Finite(v) => Some(v),
            EValuation::Infinity => None,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, EValuation::Infinity)
    }
}

impl Add for EValuation {
    type Output = EValuation;
    fn add(self, rhs: Self) -> Self {
        match (self, rhs) {
            (EValuation::Finite(a), EValuation::Finite(b)) => EValuation::Finite(a + b),
            _ => EValuation::Infinity,
        }
    }
}

impl fmt::Display for EValuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EValuation::Finite(v) => write!(f, "{v}"),
            EValuation::Infinity => write!(f, "inf"),
        }
    }
}

/// a + b·u in E.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Elem {
    a: Q,
    b: Q,
    cfg: FieldConfig,
}

impl Elem {
    pub fn new(cfg: FieldConfig, a: Q, b: Q) -> Self {
        Self { a, b, cfg }
    }

    pub fn a(&self) -> &Q {
        &self.a
    }

    pub fn b(&self) -> &Q {
        &self.b
    }

    pub fn cfg(&self) -> FieldConfig {
        self.cfg
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }

    pub fn conj(&self) -> Elem {
        Elem::new(self.cfg, self.a.clone(), -&self.b)
    }

    /// a² − p·ε₀·b².
    pub fn norm(&self) -> Q {
        &self.a * &self.a - self.cfg.u_squared() * &self.b * &self.b
    }

    pub fn trace(&self) -> Q {
        &self.a + &self.a
    }

    pub fn val(&self) -> EValuation {
        let p = self.cfg.p;
        let va = val_p(&self.a, p).map(|v| 2 * v);
        let vb = val_p(&self.b, p).map(|v| 2 * v + 1);
        match (va, vb) {
            (None, None) => EValuation::Infinity,
            (Some(x), None) | (None, Some(x)) => EValuation::Finite(x),
            (Some(x), Some(y)) => EValuation::Finite(x.min(y)),
        }
    }

    /// Finite valuation; panics on zero. Use only where nonzero is known.
    pub fn v(&self) -> i64 {
        self.val().finite().expect("valuation of zero")
    }

    pub fn is_integral(&self) -> bool {
        self.val() >= EValuation::Finite(0)
    }

    pub fn inv(&self) -> Result<Elem> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let n = self.norm();
        let c = self.conj();
        Ok(Elem::new(self.cfg, c.a / &n, c.b / n))
    }

    pub fn checked_div(&self, rhs: &Elem) -> Result<Elem> {
        Ok(self * &rhs.inv()?)
    }

    pub fn scale(&self, s: &Q) -> Elem {
        Elem::new(self.cfg, &self.a * s, &self.b * s)
    }

    /// Multiplication by u^k.
    pub fn shift(&self, k: i64) -> Elem {
        self * &self.cfg.u_pow(k)
    }

    /// Residue in O_E/u = F_p of an integral element.
    pub fn residue(&self) -> Result<u64> {
        if !self.is_integral() {
            return Err(Error::Domain("residue of a non-integral element".into()));
        }
        residue(&self.a, self.cfg.p)
    }

    /// Leading u-adic digit: the residue of x/u^val(x), in 1..p.
    fn leading_digit(&self, v: i64) -> u64 {
        let unit = self.shift(-v);
        unit.residue().expect("unit part is integral")
    }

    /// Canonical representative of x modulo u^k·O_E.
    ///
    /// The representative is Σ_{j<k} d_j·u^j with digits d_j in 0..p,
    /// summing over j ≥ val(x). It depends only on the class of x.
    pub fn reduce_mod_u_pow(&self, k: i64) -> Elem {
        let mut rest = self.clone();
        let mut rep = self.cfg.zero();
        loop {
            let v = match rest.val() {
                EValuation::Infinity => break,
                EValuation::Finite(v) => v,
            };
            if v >= k {
                break;
            }
            let d = rest.leading_digit(v);
            let term = self.cfg.u_pow(v).scale(&q_int(d as i64));
            rest = &rest - &term;
            rep = &rep + &term;
        }
        rep
    }

    /// u-adic digits d_0..d_{k-1} of an integral element modulo u^k.
    pub fn digits(&self, k: usize) -> Result<Vec<u64>> {
        if !self.is_integral() {
            return Err(Error::Domain("digits of a non-integral element".into()));
        }
        let mut out = vec![0; k];
        let mut rest = self.clone();
        while let EValuation::Finite(v) = rest.val() {
            if v as usize >= k {
                break;
            }
            let d = rest.leading_digit(v);
            out[v as usize] = d;
            rest = &rest - &self.cfg.u_pow(v).scale(&q_int(d as i64));
        }
        Ok(out)
    }

    /// Σ d_j·u^j.
    pub fn from_digits(cfg: FieldConfig, digits: &[u64]) -> Elem {
        let mut acc = cfg.zero();
        for (j, &d) in digits.iter().enumerate() {
            if d != 0 {
                acc = &acc + &cfg.u_pow(j as i64).scale(&q_int(d as i64));
            }
        }
        acc
    }

    /// Serialised form `["a_num/a_den", "b_num/b_den"]`.
    pub fn to_strings(&self) -> [String; 2] {
        [fmt_q(&self.a), fmt_q(&self.b)]
    }
}

impl PartialOrd for Elem {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Elem {
    fn cmp(&self, other: &Self) -> Ordering {
        self.cfg
            .cmp(&other.cfg)
            .then_with(|| self.a.cmp(&other.a))
            .then_with(|| self.b.cmp(&other.b))
    }
}

impl fmt::Display for Elem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.a.is_zero(), self.b.is_zero()) {
            (_, true) => write!(f, "{}", self.a),
            (true, false) => write!(f, "{}u", self.b),
            (false, false) => write!(f, "{} + {}u", self.a, self.b),
        }
    }
}

fn add_e(x: &Elem, y: &Elem) -> Elem {
    debug_assert_eq!(x.cfg, y.cfg, "mixed field configurations");
    Elem::new(x.cfg, &x.a + &y.a, &x.b + &y.b)
}

fn sub_e(x: &Elem, y: &Elem) -> Elem {
    debug_assert_eq!(x.cfg, y.cfg, "mixed field configurations");
    Elem::new(x.cfg, &x.a - &y.a, &x.b - &y.b)
}

fn mul_e(x: &Elem, y: &Elem) -> Elem {
    debug_assert_eq!(x.cfg, y.cfg, "mixed field configurations");
    if x.b.is_zero() && y.b.is_zero() {
        return Elem::new(x.cfg, &x.a * &y.a, Q::zero());
    }
    let a = &x.a * &y.a + x.cfg.u_squared() * &x.b * &y.b;
    let b = &x.a * &y.b + &x.b * &y.a;
    Elem::new(x.cfg, a, b)
}

macro_rules! binop {
    ($tr:ident, $m:ident, $f:ident) => {
        impl $tr<&Elem> for &Elem {
            type Output = Elem;
            fn $m(self, rhs: &Elem) -> Elem {
                $f(self, rhs)
            }
        }
        impl $tr<Elem> for Elem {
            type Output = Elem;
            fn $m(self, rhs: Elem) -> Elem {
                $f(&self, &rhs)
            }
        }
        impl $tr<&Elem> for Elem {
            type Output = Elem;
            fn $m(self, rhs: &Elem) -> Elem {
                $f(&self, rhs)
            }
        }
        impl $tr<Elem> for &Elem {
            type Output = Elem;
            fn $m(self, rhs: Elem) -> Elem {
                $f(self, &rhs)
            }
        }
    };
}

binop!(Add, add, add_e);
binop!(Sub, sub, sub_e);
binop!(Mul, mul, mul_e);

impl AddAssign<&Elem> for Elem {
    fn add_assign(&mut self, rhs: &Elem) {
        self.a += &rhs.a;
        self.b += &rhs.b;
    }
}

impl SubAssign<&Elem> for Elem {
    fn sub_assign(&mut self, rhs: &Elem) {
        self.a -= &rhs.a;
        self.b -= &rhs.b;
    }
}

impl Neg for &Elem {
    type Output = Elem;
    fn neg(self) -> Elem {
        Elem::new(self.cfg, -&self.a, -&self.b)
    }
}

impl Neg for Elem {
    type Output = Elem;
    fn neg(self) -> Elem {
        -&self
    }
}

/// A column vector of field elements in ambient coordinates.
pub type Vector = Vec<Elem>;

pub fn vec_add(x: &[Elem], y: &[Elem]) -> Vector {
    x.iter().zip(y).map(|(a, b)| a + b).collect()
}

pub fn vec_sub(x: &[Elem], y: &[Elem]) -> Vector {
    x.iter().zip(y).map(|(a, b)| a - b).collect()
}

pub fn vec_scale(c: &Elem, x: &[Elem]) -> Vector {
    x.iter().map(|a| c * a).collect()
}

pub fn vec_is_zero(x: &[Elem]) -> bool {
    x.iter().all(Elem::is_zero)
}

/// Minimum valuation over the entries.
pub fn vec_val(x: &[Elem]) -> EValuation {
    x.iter().map(Elem::val).min().unwrap_or(EValuation::Infinity)
}
