//! Scalar abstractions.
//!
//! Everything above this module is written against [`Field`], so the same
//! recurrence, kernel and Sobolev code runs over exact rationals (the default,
//! and the only choice for identity verification), over `f32`/`f64`, and over
//! the precision-carrying [`BigFloat`] used by the numeric layer.

use std::cmp::Ordering;
use std::fmt;
use std::num::NonZeroU64;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use bigdecimal::{BigDecimal, Context, RoundingMode};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Exact arbitrary-precision rational. Always reduced, denominator positive.
pub type Rational = BigRational;

/// Commutative field operations the generic algorithms need.
///
/// `Div` by zero is a logic error for exact types (it panics); callers that
/// can hit it go through checked paths first.
pub trait Field:
    Clone
    + PartialEq
    + fmt::Debug
    + Zero
    + One
    + Neg<Output = Self>
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
{
    fn from_i64(n: i64) -> Self;

    fn recip(&self) -> Self {
        Self::one() / self.clone()
    }

    /// Integer power; negative exponents go through the reciprocal.
    fn powi(&self, exp: i64) -> Self {
        let base = if exp < 0 { self.recip() } else { self.clone() };
        let mut e = exp.unsigned_abs();
        let mut acc = Self::one();
        let mut sq = base;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * sq.clone();
            }
            e >>= 1;
            if e > 0 {
                sq = sq.clone() * sq;
            }
        }
        acc
    }
}

/// Ordered fields with a notion of magnitude, used by the numeric layer.
pub trait RealScalar: Field + PartialOrd {
    /// Converts an exact rational, rounding to `digits` significant digits
    /// where the type supports it.
    fn from_rational(r: &Rational, digits: u64) -> Self;

    fn to_f64(&self) -> f64;

    fn abs(&self) -> Self {
        if *self < Self::zero() {
            -self.clone()
        } else {
            self.clone()
        }
    }

    /// Significant decimal digits carried by the value (`f64` reports 15).
    fn digits(&self) -> u64;

    /// Decimal rendering with `places` digits after the point.
    fn to_fixed(&self, places: usize) -> String;
}

impl Field for Rational {
    fn from_i64(n: i64) -> Self {
        Rational::from_integer(BigInt::from(n))
    }

    fn recip(&self) -> Self {
        num_traits::Inv::inv(self)
    }
}

macro_rules! impl_float_field {
    ($($t:ty),*) => {$(
        impl Field for $t {
            fn from_i64(n: i64) -> Self {
                n as $t
            }
        }

        impl RealScalar for $t {
            fn from_rational(r: &Rational, _digits: u64) -> Self {
                r.to_f64().unwrap_or(f64::NAN) as $t
            }

            fn to_f64(&self) -> f64 {
                *self as f64
            }

            fn digits(&self) -> u64 {
                <$t>::DIGITS as u64
            }

            fn to_fixed(&self, places: usize) -> String {
                format!("{:.*}", places, self)
            }
        }
    )*};
}

impl_float_field!(f32, f64);

/// Parses `"p/q"`, an integer, or a decimal such as `"0.6"` or `"1e-3"` into
/// an exact rational. Decimals are converted exactly, never via `f64`.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    if s.contains('/') {
        let (n, d) = s.split_once('/').unwrap();
        let n = BigInt::from_str(n.trim()).map_err(|e| Error::Parse(format!("{s:?}: {e}")))?;
        let d = BigInt::from_str(d.trim()).map_err(|e| Error::Parse(format!("{s:?}: {e}")))?;
        if d.is_zero() {
            return Err(Error::Parse(format!("{s:?}: zero denominator")));
        }
        return Ok(Rational::new(n, d));
    }
    let dec = BigDecimal::from_str(s).map_err(|e| Error::Parse(format!("{s:?}: {e}")))?;
    Ok(decimal_to_rational(&dec))
}

/// Canonical `"p/q"` text (just `"p"` for integers).
pub fn format_rational(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

fn decimal_to_rational(d: &BigDecimal) -> Rational {
    let (mantissa, scale) = d.as_bigint_and_exponent();
    let ten = BigInt::from(10);
    if scale >= 0 {
        Rational::new(mantissa, num_traits::pow(ten, scale as usize))
    } else {
        Rational::from_integer(mantissa * num_traits::pow(ten, (-scale) as usize))
    }
}

/// Rounds a rational to `digits` significant decimal digits and returns the
/// result as an exact rational.
pub fn round_rational(r: &Rational, digits: u64) -> Rational {
    let f = BigFloat::from_rational(r, digits);
    decimal_to_rational(&f.value)
}

/// Default significant digits for [`BigFloat`] values built without an
/// explicit precision.
pub const DEFAULT_DIGITS: u64 = 34;

/// Arbitrary-precision decimal float that rounds every result to the larger
/// of its operands' precisions.
///
/// A precision of 0 marks a value as exact (integers produced by
/// [`Field::from_i64`], `zero()`, `one()`); exact values adopt the precision
/// of whatever they are combined with.
#[derive(Clone, Debug)]
pub struct BigFloat {
    value: BigDecimal,
    digits: u64,
}

impl BigFloat {
    pub fn new(value: BigDecimal, digits: u64) -> Self {
        let value = if digits > 0 { round_to(&value, digits) } else { value };
        BigFloat { value, digits }
    }

    pub fn value(&self) -> &BigDecimal {
        &self.value
    }

    /// Same value carried at a different precision.
    pub fn with_digits(&self, digits: u64) -> Self {
        BigFloat::new(self.value.clone(), digits)
    }

    /// Exact rational equal to the stored decimal.
    pub fn to_rational(&self) -> Rational {
        decimal_to_rational(&self.value)
    }

    fn joint_digits(&self, other: &Self) -> u64 {
        self.digits.max(other.digits)
    }
}

fn context(digits: u64) -> Context {
    Context::new(NonZeroU64::new(digits.max(1)).unwrap(), RoundingMode::HalfEven)
}

fn round_to(v: &BigDecimal, digits: u64) -> BigDecimal {
    context(digits).round_decimal_ref(v)
}

impl PartialEq for BigFloat {
    fn eq(&self, other: &Self) -> bool {
        self.value == other.value
    }
}

impl PartialOrd for BigFloat {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        self.value.partial_cmp(&other.value)
    }
}

impl fmt::Display for BigFloat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

impl Zero for BigFloat {
    fn zero() -> Self {
        BigFloat { value: BigDecimal::zero(), digits: 0 }
    }

    fn is_zero(&self) -> bool {
        self.value.is_zero()
    }
}

impl One for BigFloat {
    fn one() -> Self {
        BigFloat { value: BigDecimal::one(), digits: 0 }
    }
}

impl Neg for BigFloat {
    type Output = BigFloat;

    fn neg(self) -> BigFloat {
        BigFloat { value: -self.value, digits: self.digits }
    }
}

impl Add for BigFloat {
    type Output = BigFloat;

    fn add(self, rhs: BigFloat) -> BigFloat {
        let d = self.joint_digits(&rhs);
        BigFloat::new(self.value + rhs.value, d)
    }
}

impl Sub for BigFloat {
    type Output = BigFloat;

    fn sub(self, rhs: BigFloat) -> BigFloat {
        let d = self.joint_digits(&rhs);
        BigFloat::new(self.value - rhs.value, d)
    }
}

impl Mul for BigFloat {
    type Output = BigFloat;

    fn mul(self, rhs: BigFloat) -> BigFloat {
        let d = self.joint_digits(&rhs);
        if d == 0 {
            return BigFloat { value: self.value * rhs.value, digits: 0 };
        }
        BigFloat { value: self.value.mul_with_context(&rhs.value, &context(d)), digits: d }
    }
}

impl Div for BigFloat {
    type Output = BigFloat;

    fn div(self, rhs: BigFloat) -> BigFloat {
        assert!(!rhs.value.is_zero(), "BigFloat division by zero");
        let d = match self.joint_digits(&rhs) {
            0 => DEFAULT_DIGITS,
            d => d,
        };
        // Two guard digits on the reciprocal keep the quotient correctly rounded
        // to within one unit in the last place.
        let inv = rhs.value.inverse_with_context(&context(d + 2));
        BigFloat { value: self.value.mul_with_context(&inv, &context(d)), digits: d }
    }
}

impl Field for BigFloat {
    fn from_i64(n: i64) -> Self {
        BigFloat { value: BigDecimal::from(n), digits: 0 }
    }
}

impl RealScalar for BigFloat {
    fn from_rational(r: &Rational, digits: u64) -> Self {
        let digits = if digits == 0 { DEFAULT_DIGITS } else { digits };
        let num = BigDecimal::from(r.numer().clone());
        let den = BigDecimal::from(r.denom().clone());
        let inv = den.inverse_with_context(&context(digits + 4));
        BigFloat { value: num.mul_with_context(&inv, &context(digits)), digits }
    }

    fn to_f64(&self) -> f64 {
        self.value.to_f64().unwrap_or(f64::NAN)
    }

    fn abs(&self) -> Self {
        BigFloat { value: self.value.abs(), digits: self.digits }
    }

    fn digits(&self) -> u64 {
        if self.digits == 0 {
            DEFAULT_DIGITS
        } else {
            self.digits
        }
    }

    fn to_fixed(&self, places: usize) -> String {
        let v = self.value.with_scale_round(places as i64, RoundingMode::HalfEven);
        v.to_plain_string()
    }
}
