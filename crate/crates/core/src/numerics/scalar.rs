use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::sync::atomic::{AtomicU32, Ordering as AtomicOrdering};

use rug::float::Round;
use rug::ops::Pow;
use rug::{Float, Integer, Rational};

use crate::error::{Error, Result};

/// Working precision used when none is given explicitly.
pub const DEFAULT_PRECISION_BITS: u32 = 256;

static DEFAULT_PRECISION: AtomicU32 = AtomicU32::new(DEFAULT_PRECISION_BITS);

/// Current process-wide default precision in bits.
pub fn default_precision() -> u32 {
    DEFAULT_PRECISION.load(AtomicOrdering::Relaxed)
}

/// Overrides the process-wide default precision. Values below 16 bits are rejected.
pub fn set_default_precision(bits: u32) -> Result<()> {
    if bits < 16 || bits > rug::float::prec_max() {
        return Err(Error::domain(format!("precision {bits} bits out of range")));
    }
    DEFAULT_PRECISION.store(bits, AtomicOrdering::Relaxed);
    Ok(())
}

/// Arbitrary-precision real number.
///
/// Binary operations produce a result at the larger of the two operand
/// precisions.
#[derive(Clone, Debug, PartialEq, PartialOrd)]
pub struct BigScalar(Float);

impl BigScalar {
    pub fn from_float(value: Float) -> Self {
        BigScalar(value)
    }

    pub fn from_f64(value: f64) -> Self {
        Self::from_f64_prec(value, default_precision())
    }

    pub fn from_f64_prec(value: f64, prec: u32) -> Self {
        BigScalar(Float::with_val(prec, value))
    }

    pub fn from_int(value: i64) -> Self {
        Self::from_int_prec(value, default_precision())
    }

    pub fn from_int_prec(value: i64, prec: u32) -> Self {
        BigScalar(Float::with_val(prec, value))
    }

    pub fn from_integer(value: &Integer, prec: u32) -> Self {
        BigScalar(Float::with_val(prec, value))
    }

    pub fn from_rational(value: &Rational) -> Self {
        Self::from_rational_prec(value, default_precision())
    }

    pub fn from_rational_prec(value: &Rational, prec: u32) -> Self {
        BigScalar(Float::with_val(prec, value))
    }

    pub fn zero(prec: u32) -> Self {
        BigScalar(Float::with_val(prec, 0))
    }

    pub fn one(prec: u32) -> Self {
        BigScalar(Float::with_val(prec, 1))
    }

    /// Parses a decimal string (`"0.25"`, `"1e-30"`, `"-3"`) at `prec` bits.
    pub fn parse(text: &str, prec: u32) -> Result<Self> {
        let parsed = Float::parse(text.trim())
            .map_err(|e| Error::domain(format!("cannot parse {text:?} as a number: {e}")))?;
        Ok(BigScalar(Float::with_val(prec, parsed)))
    }

    pub fn prec(&self) -> u32 {
        self.0.prec()
    }

    pub fn as_float(&self) -> &Float {
        &self.0
    }

    pub fn into_float(self) -> Float {
        self.0
    }

    /// Same value re-rounded to `prec` bits.
    pub fn with_prec(&self, prec: u32) -> Self {
        BigScalar(Float::with_val(prec, &self.0))
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64()
    }

    pub fn to_rational(&self) -> Option<Rational> {
        self.0.to_rational()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_positive(&self) -> bool {
        self.0.is_sign_positive() && !self.0.is_zero() && !self.0.is_nan()
    }

    pub fn is_finite(&self) -> bool {
        self.0.is_finite()
    }

    pub fn abs(&self) -> Self {
        BigScalar(self.0.clone().abs())
    }

    pub fn ln(&self) -> Self {
        BigScalar(self.0.clone().ln())
    }

    pub fn exp(&self) -> Self {
        BigScalar(self.0.clone().exp())
    }

    pub fn sqrt(&self) -> Self {
        BigScalar(self.0.clone().sqrt())
    }

    pub fn recip(&self) -> Self {
        BigScalar(self.0.clone().recip())
    }

    pub fn floor(&self) -> Self {
        BigScalar(self.0.clone().floor())
    }

    pub fn square(&self) -> Self {
        BigScalar(self.0.clone().square())
    }

    /// `self^exponent`, at the larger operand precision.
    pub fn pow(&self, exponent: &BigScalar) -> Self {
        let prec = self.prec().max(exponent.prec());
        BigScalar(Float::with_val(prec, (&self.0).pow(&exponent.0)))
    }

    pub fn powi(&self, exponent: i64) -> Self {
        BigScalar(Float::with_val(self.prec(), (&self.0).pow(exponent)))
    }

    pub fn max<'a>(&'a self, other: &'a BigScalar) -> &'a BigScalar {
        if other > self {
            other
        } else {
            self
        }
    }

    pub fn min<'a>(&'a self, other: &'a BigScalar) -> &'a BigScalar {
        if other < self {
            other
        } else {
            self
        }
    }

    /// Number of significant decimal digits needed to round-trip this precision.
    pub fn decimal_digits(&self) -> usize {
        decimal_digits_for(self.prec())
    }

    /// Decimal (scientific) representation with enough digits to round-trip.
    pub fn to_decimal_string(&self) -> String {
        self.to_decimal_digits(self.decimal_digits())
    }

    /// Decimal representation rounded to `digits` significant digits.
    pub fn to_decimal_digits(&self, digits: usize) -> String {
        if self.0.is_zero() {
            return "0".to_string();
        }
        self.0
            .to_string_radix_round(10, Some(digits.max(1)), Round::Nearest)
    }

    pub fn total_cmp(&self, other: &BigScalar) -> Ordering {
        self.0.total_cmp(&other.0)
    }
}

/// Decimal digits required so that a `prec`-bit value survives a decimal round trip.
pub fn decimal_digits_for(prec: u32) -> usize {
    (f64::from(prec) * std::f64::consts::LOG10_2).ceil() as usize + 2
}

impl fmt::Display for BigScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match f.precision() {
            Some(digits) => f.write_str(&self.to_decimal_digits(digits)),
            None => f.write_str(&self.to_decimal_string()),
        }
    }
}

impl From<Float> for BigScalar {
    fn from(value: Float) -> Self {
        BigScalar(value)
    }
}

macro_rules! binary_op {
    ($trait:ident, $method:ident, $op:tt) => {
        impl<'a> $trait<&'a BigScalar> for &'a BigScalar {
            type Output = BigScalar;
            fn $method(self, rhs: &'a BigScalar) -> BigScalar {
                let prec = self.prec().max(rhs.prec());
                BigScalar(Float::with_val(prec, &self.0 $op &rhs.0))
            }
        }

        impl $trait<BigScalar> for BigScalar {
            type Output = BigScalar;
            fn $method(self, rhs: BigScalar) -> BigScalar {
                (&self).$method(&rhs)
            }
        }

        impl<'a> $trait<&'a BigScalar> for BigScalar {
            type Output = BigScalar;
            fn $method(self, rhs: &'a BigScalar) -> BigScalar {
                (&self).$method(rhs)
            }
        }

        impl<'a> $trait<BigScalar> for &'a BigScalar {
            type Output = BigScalar;
            fn $method(self, rhs: BigScalar) -> BigScalar {
                self.$method(&rhs)
            }
        }
    };
}

binary_op!(Add, add, +);
binary_op!(Sub, sub, -);
binary_op!(Mul, mul, *);
binary_op!(Div, div, /);

impl Neg for BigScalar {
    type Output = BigScalar;
    fn neg(self) -> BigScalar {
        BigScalar(-self.0)
    }
}

impl Neg for &BigScalar {
    type Output = BigScalar;
    fn neg(self) -> BigScalar {
        BigScalar(-self.0.clone())
    }
}
