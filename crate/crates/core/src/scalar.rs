//! Scalar abstraction shared by the geometric and combinatorial modules.
//!
//! Everything that certifies an inequality runs on [`Rational`]; `f64` is
//! supported for exploratory runs and for the tolerance-based fixed-point
//! search.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Arbitrary-precision rational number.
pub type Rational = BigRational;

/// Ordered field element usable as a coordinate.
pub trait Scalar:
    Clone + fmt::Debug + fmt::Display + PartialOrd + Signed + Send + Sync + 'static
{
    /// `true` when arithmetic never rounds.
    const EXACT: bool;

    fn from_i128(v: i128) -> Self;

    fn from_ratio(num: i64, den: i64) -> Self {
        Self::from_i128(num as i128) / Self::from_i128(den as i128)
    }

    /// Exact conversion for rationals (every finite double is dyadic).
    fn from_f64(v: f64) -> Option<Self>;

    fn to_f64(&self) -> f64;

    fn floor(&self) -> Self;

    fn ceil(&self) -> Self;

    fn is_integer(&self) -> bool {
        self.floor() == *self
    }

    /// Integer value, if this is an integer representable as `i64`.
    fn to_i64(&self) -> Option<i64>;

    /// Text encoding; `num/den` for rationals.
    fn encode(&self) -> String;

    fn decode(s: &str) -> Option<Self>;
}

impl Scalar for Rational {
    const EXACT: bool = true;

    fn from_i128(v: i128) -> Self {
        Rational::from_integer(BigInt::from(v))
    }

    fn from_ratio(num: i64, den: i64) -> Self {
        Rational::new(BigInt::from(num), BigInt::from(den))
    }

    fn from_f64(v: f64) -> Option<Self> {
        Rational::from_float(v)
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn floor(&self) -> Self {
        Rational::floor(self)
    }

    fn ceil(&self) -> Self {
        Rational::ceil(self)
    }

    fn is_integer(&self) -> bool {
        Rational::is_integer(self)
    }

    fn to_i64(&self) -> Option<i64> {
        if Rational::is_integer(self) {
            self.numer().to_i64()
        } else {
            None
        }
    }

    fn encode(&self) -> String {
        format!("{}/{}", self.numer(), self.denom())
    }

    fn decode(s: &str) -> Option<Self> {
        let s = s.trim();
        if s.contains('/') {
            let (n, d) = s.split_once('/')?;
            let n = BigInt::from_str(n.trim()).ok()?;
            let d = BigInt::from_str(d.trim()).ok()?;
            if d.is_zero() {
                return None;
            }
            return Some(Rational::new(n, d));
        }
        if let Some((int, frac)) = s.split_once('.') {
            let negative = int.trim_start().starts_with('-');
            let int_part = if int.is_empty() || int == "-" || int == "+" {
                BigInt::zero()
            } else {
                BigInt::from_str(int).ok()?
            };
            if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
                return None;
            }
            let scale = num_traits::pow(BigInt::from(10), frac.len());
            let frac_val = Rational::new(BigInt::from_str(frac).ok()?, scale);
            let base = Rational::from_integer(int_part);
            return Some(if negative { base - frac_val } else { base + frac_val });
        }
        BigInt::from_str(s).ok().map(Rational::from_integer)
    }
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn from_i128(v: i128) -> Self {
        v as f64
    }

    fn from_ratio(num: i64, den: i64) -> Self {
        num as f64 / den as f64
    }

    fn from_f64(v: f64) -> Option<Self> {
        v.is_finite().then_some(v)
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn floor(&self) -> Self {
        f64::floor(*self)
    }

    fn ceil(&self) -> Self {
        f64::ceil(*self)
    }

    fn to_i64(&self) -> Option<i64> {
        (self.fract() == 0.0 && self.abs() < 9.0e18).then_some(*self as i64)
    }

    fn encode(&self) -> String {
        format!("{self:?}")
    }

    fn decode(s: &str) -> Option<Self> {
        let s = s.trim();
        if let Some((n, d)) = s.split_once('/') {
            return Some(n.trim().parse::<f64>().ok()? / d.trim().parse::<f64>().ok()?);
        }
        s.parse().ok()
    }
}

/// Total order for scalars that are never NaN in practice.
pub fn cmp<S: Scalar>(a: &S, b: &S) -> Ordering {
    a.partial_cmp(b).unwrap_or(Ordering::Equal)
}

pub fn max_of<S: Scalar>(a: &S, b: &S) -> S {
    if a >= b { a.clone() } else { b.clone() }
}

pub fn min_of<S: Scalar>(a: &S, b: &S) -> S {
    if a <= b { a.clone() } else { b.clone() }
}

pub fn int<S: Scalar>(v: i64) -> S {
    S::from_i128(v as i128)
}

pub fn half<S: Scalar>() -> S {
    S::from_ratio(1, 2)
}

pub fn powi<S: Scalar>(base: &S, exp: usize) -> S {
    num_traits::pow(base.clone(), exp)
}

/// Max norm of a vector.
pub fn norm<S: Scalar>(v: &[S]) -> S {
    v.iter().fold(S::zero(), |acc, c| max_of(&acc, &c.abs()))
}

/// Max-norm distance.
pub fn dist<S: Scalar>(a: &[S], b: &[S]) -> S {
    a.iter()
        .zip(b)
        .fold(S::zero(), |acc, (x, y)| max_of(&acc, &(x.clone() - y.clone()).abs()))
}

pub fn cmp_lex<S: Scalar>(a: &[S], b: &[S]) -> Ordering {
    for (x, y) in a.iter().zip(b) {
        match cmp(x, y) {
            Ordering::Equal => continue,
            other => return other,
        }
    }
    a.len().cmp(&b.len())
}

/// Smallest integer `n >= 0` with `n^k >= v`, for nonnegative integer `v`.
pub fn int_root_ceil(v: &BigInt, k: u32) -> BigInt {
    if v.is_zero() || k == 1 {
        return v.clone();
    }
    let r = v.nth_root(k);
    if num_traits::pow(r.clone(), k as usize) >= *v {
        r
    } else {
        r + BigInt::one()
    }
}

/// Floor of `v^(1/k)` for a nonnegative integer.
pub fn int_root_floor(v: &BigInt, k: u32) -> BigInt {
    v.nth_root(k)
}
