use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use rug::ops::Pow;
use rug::{Float, Integer, Rational};

use super::scalar::{default_precision, BigScalar};

/// A real number that stays an exact fraction for as long as every operand is
/// exact, and falls back to a [`BigScalar`] otherwise.
#[derive(Clone, Debug)]
pub enum Real {
    Exact(Rational),
    Approx(BigScalar),
}

impl Real {
    pub fn zero() -> Self {
        Real::Exact(Rational::new())
    }

    pub fn one() -> Self {
        Real::Exact(Rational::from(1))
    }

    pub fn ratio(num: i64, den: i64) -> Self {
        Real::Exact(Rational::from((num, den)))
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Real::Exact(_))
    }

    pub fn as_rational(&self) -> Option<&Rational> {
        match self {
            Real::Exact(q) => Some(q),
            Real::Approx(_) => None,
        }
    }

    /// Precision this value carries; exact values report 0.
    fn carried_prec(&self) -> u32 {
        match self {
            Real::Exact(_) => 0,
            Real::Approx(x) => x.prec(),
        }
    }

    pub fn to_scalar_prec(&self, prec: u32) -> BigScalar {
        match self {
            Real::Exact(q) => BigScalar::from_rational_prec(q, prec),
            Real::Approx(x) => x.with_prec(prec),
        }
    }

    /// Converts to a float, keeping the carried precision of approximate values.
    pub fn to_scalar(&self) -> BigScalar {
        match self {
            Real::Exact(q) => BigScalar::from_rational(q),
            Real::Approx(x) => x.clone(),
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Real::Exact(q) => q.to_f64(),
            Real::Approx(x) => x.to_f64(),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Real::Exact(q) => *q == 0,
            Real::Approx(x) => x.is_zero(),
        }
    }

    pub fn is_positive(&self) -> bool {
        match self {
            Real::Exact(q) => *q > 0,
            Real::Approx(x) => x.is_positive(),
        }
    }

    pub fn abs(&self) -> Real {
        match self {
            Real::Exact(q) => Real::Exact(q.clone().abs()),
            Real::Approx(x) => Real::Approx(x.abs()),
        }
    }

    /// Integer power; exact inputs stay exact.
    pub fn powi(&self, exponent: i32) -> Real {
        match self {
            Real::Exact(q) => Real::Exact(Rational::from(q.pow(exponent))),
            Real::Approx(x) => Real::Approx(x.powi(i64::from(exponent))),
        }
    }

    pub fn square(&self) -> Real {
        match self {
            Real::Exact(q) => Real::Exact(q.clone().square()),
            Real::Approx(x) => Real::Approx(x.square()),
        }
    }

    pub fn recip(&self) -> Real {
        match self {
            Real::Exact(q) => Real::Exact(q.clone().recip()),
            Real::Approx(x) => Real::Approx(x.recip()),
        }
    }

    /// Decimal representation at full working precision (exact values use the
    /// default precision for their expansion).
    pub fn to_decimal_string(&self) -> String {
        match self {
            Real::Exact(q) if *q.denom() == 1 => q.numer().to_string(),
            Real::Exact(q) => BigScalar::from_rational(q).to_decimal_string(),
            Real::Approx(x) => x.to_decimal_string(),
        }
    }

    /// `"p/q"` for exact values, the decimal expansion otherwise.
    pub fn to_exact_or_decimal(&self) -> String {
        match self {
            Real::Exact(q) => q.to_string(),
            Real::Approx(x) => x.to_decimal_string(),
        }
    }
}

fn promote(a: &Real, b: &Real) -> (BigScalar, BigScalar) {
    let prec = match a.carried_prec().max(b.carried_prec()) {
        0 => default_precision(),
        p => p,
    };
    (a.to_scalar_prec(prec), b.to_scalar_prec(prec))
}

macro_rules! real_op {
    ($trait:ident, $method:ident) => {
        impl<'a> $trait<&'a Real> for &'a Real {
            type Output = Real;
            fn $method(self, rhs: &'a Real) -> Real {
                match (self, rhs) {
                    (Real::Exact(a), Real::Exact(b)) => {
                        Real::Exact(Rational::from($trait::$method(a, b)))
                    }
                    _ => {
                        let (a, b) = promote(self, rhs);
                        Real::Approx($trait::$method(a, b))
                    }
                }
            }
        }

        impl $trait<Real> for Real {
            type Output = Real;
            fn $method(self, rhs: Real) -> Real {
                (&self).$method(&rhs)
            }
        }

        impl<'a> $trait<&'a Real> for Real {
            type Output = Real;
            fn $method(self, rhs: &'a Real) -> Real {
                (&self).$method(rhs)
            }
        }

        impl<'a> $trait<Real> for &'a Real {
            type Output = Real;
            fn $method(self, rhs: Real) -> Real {
                self.$method(&rhs)
            }
        }
    };
}

real_op!(Add, add);
real_op!(Sub, sub);
real_op!(Mul, mul);
real_op!(Div, div);

impl Neg for Real {
    type Output = Real;
    fn neg(self) -> Real {
        match self {
            Real::Exact(q) => Real::Exact(-q),
            Real::Approx(x) => Real::Approx(-x),
        }
    }
}

impl Neg for &Real {
    type Output = Real;
    fn neg(self) -> Real {
        -self.clone()
    }
}

impl PartialEq for Real {
    fn eq(&self, other: &Self) -> bool {
        self.partial_cmp(other) == Some(Ordering::Equal)
    }
}

impl PartialOrd for Real {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match (self, other) {
            (Real::Exact(a), Real::Exact(b)) => a.partial_cmp(b),
            (Real::Approx(a), Real::Approx(b)) => a.as_float().partial_cmp(b.as_float()),
            (Real::Exact(a), Real::Approx(b)) => b.as_float().partial_cmp(a).map(Ordering::reverse),
            (Real::Approx(a), Real::Exact(b)) => a.as_float().partial_cmp(b),
        }
    }
}

impl PartialEq<Rational> for Real {
    fn eq(&self, other: &Rational) -> bool {
        match self {
            Real::Exact(q) => q == other,
            Real::Approx(x) => x.as_float() == other,
        }
    }
}

impl fmt::Display for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_exact_or_decimal())
    }
}

impl From<Rational> for Real {
    fn from(value: Rational) -> Self {
        Real::Exact(value)
    }
}

impl From<BigScalar> for Real {
    fn from(value: BigScalar) -> Self {
        Real::Approx(value)
    }
}

impl From<Float> for Real {
    fn from(value: Float) -> Self {
        Real::Approx(BigScalar::from_float(value))
    }
}

impl From<Integer> for Real {
    fn from(value: Integer) -> Self {
        Real::Exact(Rational::from(value))
    }
}

impl From<i64> for Real {
    fn from(value: i64) -> Self {
        Real::Exact(Rational::from(value))
    }
}
