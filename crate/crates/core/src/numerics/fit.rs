use super::scalar::BigScalar;
use crate::error::{Error, Result};

/// Ordinary least-squares line through a point cloud.
#[derive(Clone, Debug)]
pub struct LinearFit {
    pub slope: BigScalar,
    pub intercept: BigScalar,
    /// Root-mean-square vertical deviation from the fitted line.
    pub residual: BigScalar,
}

/// Least-squares fit `y = slope * x + intercept`.
pub fn linear_fit(points: &[(BigScalar, BigScalar)]) -> Result<LinearFit> {
    if points.len() < 2 {
        return Err(Error::DegenerateInput("linear fit needs at least two points".into()));
    }
    let prec = points
        .iter()
        .map(|(x, y)| x.prec().max(y.prec()))
        .max()
        .unwrap_or(0);
    let n = BigScalar::from_int_prec(points.len() as i64, prec);
    let mut sx = BigScalar::zero(prec);
    let mut sy = BigScalar::zero(prec);
    for (x, y) in points {
        sx = &sx + x;
        sy = &sy + y;
    }
    let mx = &sx / &n;
    let my = &sy / &n;

    // Centred sums keep cancellation small for nearly collinear data.
    let mut sxx = BigScalar::zero(prec);
    let mut sxy = BigScalar::zero(prec);
    for (x, y) in points {
        let dx = x - &mx;
        sxx = &sxx + &dx.square();
        sxy = &sxy + &(&dx * &(y - &my));
    }
    if sxx.is_zero() {
        return Err(Error::DegenerateInput("all abscissae coincide".into()));
    }
    let slope = &sxy / &sxx;
    let intercept = &my - &(&slope * &mx);

    let mut ss = BigScalar::zero(prec);
    for (x, y) in points {
        let r = y - &(&(&slope * x) + &intercept);
        ss = &ss + &r.square();
    }
    let residual = (&ss / &n).sqrt();
    Ok(LinearFit {
        slope,
        intercept,
        residual,
    })
}

/// `ln(x) / ln(b)` at the larger operand precision.
pub fn log_base(b: &BigScalar, x: &BigScalar) -> Result<BigScalar> {
    if !b.is_positive() || !x.is_positive() {
        return Err(Error::domain("logarithm needs a positive base and argument"));
    }
    let prec = b.prec().max(x.prec());
    let lb = b.with_prec(prec).ln();
    if lb.is_zero() {
        return Err(Error::domain("logarithm base must differ from 1"));
    }
    Ok(x.with_prec(prec).ln() / lb)
}
