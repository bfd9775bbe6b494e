use rug::Rational;
use serde::Serialize;

use super::valuation::{traced_limit, ValuationEstimate};
use crate::construction::CantorSystem;
use crate::error::{Error, Result};
use crate::numerics::{default_precision, linear_fit, BigScalar, LimitOptions};

/// Solves `c^(n - k) = b^n` for `k`.
pub fn endpoint_exponent(c: &BigScalar, b: &BigScalar, n: u64) -> Result<BigScalar> {
    let one = BigScalar::one(c.prec());
    if !c.is_positive() || !b.is_positive() {
        return Err(Error::domain("endpoint exponent needs positive c and b"));
    }
    if *c == one {
        return Err(Error::domain("endpoint exponent is undefined for c = 1"));
    }
    let nb = BigScalar::from_int_prec(n as i64, c.prec());
    Ok(&nb * &(&one - &(b.ln() / c.ln())))
}

/// Valued measure of a middle-alpha set covered by its `2^level` bridges,
/// each of valued diameter `2^-level`.
pub fn valued_measure_estimate(system: &CantorSystem, level: usize) -> Result<BigScalar> {
    if !matches!(system, CantorSystem::MiddleAlpha { .. }) {
        return Err(Error::Unsupported(format!("valued measure for {}", system.label())));
    }
    if level == 0 {
        return Err(Error::domain("valued measure needs level >= 1"));
    }
    system.validate()?;
    let level = u32::try_from(level).map_err(|_| Error::DepthOverflow(format!("level {level}")))?;
    let count = rug::Integer::from(1) << level;
    let diameter = Rational::from((1, count.clone()));
    Ok(BigScalar::from_rational(&(Rational::from(count) * diameter)))
}

/// Scale-invariant valuation of `x~ = beta^n (beta^n)^(l_n) a` at scales
/// `beta^n`, `n = 1, 2, 4, ... <= n_max`, where `l_n` is the remaining length
/// of `fat_target` at depth `n` and `beta = (1 - alpha)/2`. The limit is the
/// measure of the target.
pub fn growth_of_measure_demo(
    alpha: &Rational,
    fat_target: &CantorSystem,
    n_max: usize,
    tol: f64,
) -> Result<ValuationEstimate> {
    if *alpha <= 0 || *alpha >= 1 {
        return Err(Error::domain(format!("alpha = {alpha} not in (0, 1)")));
    }
    let prec = default_precision();
    let beta = BigScalar::from_rational_prec(&((Rational::from(1) - alpha.clone()) / 2), prec);
    let ln_beta = beta.ln();
    // A point of the middle-alpha set with alternating digits.
    let one = BigScalar::one(prec);
    let digits: BigScalar = (1..64).step_by(2).fold(one.clone(), |acc, i| &acc + &beta.powi(i));
    let ln_a = (&(&one - &beta) * &digits).ln();

    let levels: Vec<(usize, BigScalar)> = fat_target
        .profiles()?
        .take(n_max + 1)
        .filter_map(|p| match p {
            Ok(p) if p.depth.is_power_of_two() => Some(Ok((p.depth, p.total_bridge_length().to_scalar_prec(prec)))),
            Ok(_) => None,
            Err(e) => Some(Err(e)),
        })
        .collect::<Result<_>>()?;
    match levels.last() {
        Some((_, l)) if l.to_f64() >= 1e-9 => {}
        _ => return Err(Error::domain("target has no positive measure at the largest depth")),
    }
    let terms = levels.into_iter().map(|(n, l)| {
        let nb = BigScalar::from_int_prec(n as i64, prec);
        // log_{beta^-n}(beta^n / x~) = l_n + ln a / (n ln beta)
        let term = &l + &(&ln_a / &(&nb * &ln_beta));
        Ok((format!("beta^{n}"), term))
    });
    traced_limit(
        terms,
        &LimitOptions::aitken(tol, 64),
        format!("scales beta^n, beta = {}, n = 2^k <= {n_max}", beta.to_decimal_digits(12)),
    )
}

/// Regression of `log_3 alpha_m` against `m`.
#[derive(Clone, Debug, Serialize)]
pub struct ExponentFit {
    /// `-slope`, i.e. `log_3 q` for the fluctuating family.
    #[serde(serialize_with = "decimal")]
    pub rho: BigScalar,
    #[serde(serialize_with = "decimal")]
    pub residual: BigScalar,
    /// `(m, log_3 alpha_m)` pairs that entered the fit.
    pub points: Vec<(usize, String)>,
}

fn decimal<S: serde::Serializer>(x: &BigScalar, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&x.with_prec(x.prec().min(default_precision())).to_decimal_string())
}

/// Valuated exponent of a fluctuating family, read off the gaps created at
/// the requested depths (each at least 2): the gap at depth `k` is
/// `3^(-k (1 +- alpha_(k-1)))`.
pub fn valuated_exponent_estimate(system: &CantorSystem, depths: &[usize]) -> Result<ExponentFit> {
    if !matches!(system, CantorSystem::FluctuatingFamily { .. }) {
        return Err(Error::Unsupported(format!("valuated exponent for {}", system.label())));
    }
    if depths.len() < 3 {
        return Err(Error::DegenerateInput("valuated exponent needs at least three depths".into()));
    }
    if let Some(k) = depths.iter().find(|&&k| k < 2) {
        return Err(Error::domain(format!("depth {k} carries no exponent; use depths >= 2")));
    }
    let max = *depths.iter().max().expect("non-empty");
    let profiles = system.profile_to(max)?;
    let prec = profiles[max].gap_length.to_scalar().prec();
    let ln3 = BigScalar::from_int_prec(3, prec).ln();
    let one = BigScalar::one(prec);
    let mut points = Vec::with_capacity(depths.len());
    let mut xy = Vec::with_capacity(depths.len());
    for &k in depths {
        let g = profiles[k].gap_length.to_scalar();
        let kb = BigScalar::from_int_prec(k as i64, prec);
        let alpha = (&(-(g.ln() / &ln3) / &kb) - &one).abs();
        let log3 = alpha.ln() / &ln3;
        points.push((k - 1, log3.to_decimal_digits(20)));
        xy.push((BigScalar::from_int_prec(k as i64 - 1, prec), log3));
    }
    let fit = linear_fit(&xy)?;
    Ok(ExponentFit {
        rho: -fit.slope,
        residual: fit.residual,
        points,
    })
}

/// `log_{beta^n} log_{beta^n} [x~ / (beta^n)^(1 + v0)]`.
pub fn renormalised_valuation(xtilde: &BigScalar, beta: &BigScalar, n: u64, v0: &BigScalar) -> Result<BigScalar> {
    if !xtilde.is_positive() {
        return Err(Error::domain("x~ must be positive"));
    }
    renormalised_valuation_ln(&xtilde.ln(), beta, n, v0)
}

/// [`renormalised_valuation`] taking `ln x~`, for infinitesimals below the
/// float exponent range.
pub fn renormalised_valuation_ln(ln_xtilde: &BigScalar, beta: &BigScalar, n: u64, v0: &BigScalar) -> Result<BigScalar> {
    let one = BigScalar::one(beta.prec());
    if !beta.is_positive() || *beta >= one || n == 0 {
        return Err(Error::domain("renormalised valuation needs 0 < beta < 1 and n >= 1"));
    }
    let ln_scale = &BigScalar::from_int_prec(n as i64, beta.prec()) * &beta.ln();
    let ln_inner = ln_xtilde - &(&(&one + v0) * &ln_scale);
    if ln_inner.is_positive() || ln_inner.is_zero() || !ln_inner.is_finite() {
        return Err(Error::domain(format!(
            "x~ / (beta^n)^(1 + v0) = exp({}) is not in (0, 1)",
            ln_inner.to_decimal_digits(12)
        )));
    }
    let w = &ln_inner / &ln_scale;
    Ok(w.ln() / ln_scale)
}
