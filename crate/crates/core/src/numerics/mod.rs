//! Arbitrary-precision scalars, exact fractions and limit extrapolation.

mod fit;
mod limit;
mod rational;
mod real;
mod scalar;

pub use fit::{linear_fit, log_base, LinearFit};
pub use limit::{eval_limit, eval_limit_traced, try_eval_limit, LimitEstimate, LimitMethod, LimitOptions, TracePoint};
pub use rational::{parse_rational, serde_rational, serde_rational_vec};
pub use real::Real;
pub use scalar::{decimal_digits_for, default_precision, set_default_precision, BigScalar, DEFAULT_PRECISION_BITS};

pub use rug::{Integer, Rational};
