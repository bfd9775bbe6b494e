//! Measure, box dimension, thickness and fatness of defining sequences.

use rug::{Integer, Rational};
use serde::Serialize;

use crate::construction::{CantorSystem, LevelProfile, RefinementLevel};
use crate::error::{Error, Result};
use crate::numerics::{default_precision, linear_fit, BigScalar, LimitEstimate, LimitOptions, Real};

/// Largest bridge-length spread accepted by the box-dimension fit.
pub const HOMOGENEITY_THRESHOLD: f64 = 0.10;

/// Growth factor between the first and last per-level thickness ratio that
/// counts as divergence.
pub const DIVERGENCE_GROWTH: f64 = 10.0;

fn ln_integer(n: &Integer, prec: u32) -> BigScalar {
    BigScalar::from_integer(n, prec).ln()
}

/// Deepest level visited by [`lebesgue_measure_limit`].
pub const MEASURE_MAX_DEPTH: usize = 4096;

/// Limit of the total bridge length, with Aitken extrapolation over depths
/// `1, 2, 4, ..., 4096`. Algebraic tails such as `c/n` become geometric along
/// this subsequence.
pub fn lebesgue_measure_limit(system: &CantorSystem, tol: f64) -> Result<LimitEstimate> {
    let seq = system
        .profiles()?
        .take(MEASURE_MAX_DEPTH + 1)
        .filter(|p| p.as_ref().map_or(true, |p| p.depth.is_power_of_two()))
        .map(|p| p.map(|p| p.total_bridge_length().to_scalar()));
    crate::numerics::try_eval_limit(seq, &LimitOptions::aitken(tol, 64))
}

/// Limit of the total bridge length with explicit options; term `n` of the
/// sequence is the total bridge length at depth `n - 1`.
pub fn lebesgue_measure_limit_with(system: &CantorSystem, opts: &LimitOptions) -> Result<LimitEstimate> {
    let seq = system.profiles()?.map(|p| p.map(|p| p.total_bridge_length().to_scalar()));
    crate::numerics::try_eval_limit(seq, opts)
}

/// One row of the box-counting table.
#[derive(Clone, Debug, Serialize)]
pub struct BoxCountRow {
    pub depth: usize,
    pub count: String,
    pub length: String,
    pub log_count: f64,
    pub log_inv_length: f64,
}

#[derive(Clone, Debug)]
pub struct BoxDimension {
    pub slope: BigScalar,
    pub residual: BigScalar,
    pub rows: Vec<BoxCountRow>,
}

/// Slope of `log N` against `log(1/l)` over depths `min_depth..=max_depth`,
/// with `N` the bridge count and `l` the bridge length.
pub fn box_dimension_estimate(system: &CantorSystem, min_depth: usize, max_depth: usize) -> Result<BoxDimension> {
    if min_depth >= max_depth {
        return Err(Error::domain(format!("need min_depth < max_depth, got {min_depth}..{max_depth}")));
    }
    let profiles = system.profile_to(max_depth)?;
    // Every system kind is homogeneous, so each level has a single bridge length.
    fit_box_counts(profiles[min_depth..].iter().map(|p| (p.depth, p.bridge_count.clone(), p.bridge_length.clone())))
}

/// Box-dimension fit over materialized levels, rejecting levels whose bridge
/// lengths spread by more than [`HOMOGENEITY_THRESHOLD`].
pub fn box_dimension_from_levels(levels: &[RefinementLevel]) -> Result<BoxDimension> {
    let mut rows = Vec::with_capacity(levels.len());
    for lvl in levels {
        let spread = lvl.bridge_length_spread();
        if spread > HOMOGENEITY_THRESHOLD {
            return Err(Error::InhomogeneousSystem {
                depth: lvl.depth,
                spread,
                threshold: HOMOGENEITY_THRESHOLD,
            });
        }
        let longest = lvl
            .bridges
            .iter()
            .map(|b| b.length())
            .fold(Real::zero(), |m, l| if l > m { l } else { m });
        rows.push((lvl.depth, Integer::from(lvl.bridges.len()), longest));
    }
    fit_box_counts(rows.into_iter())
}

fn fit_box_counts(rows: impl Iterator<Item = (usize, Integer, Real)>) -> Result<BoxDimension> {
    let prec = default_precision();
    let mut points = Vec::new();
    let mut table = Vec::new();
    for (depth, count, length) in rows {
        let log_n = ln_integer(&count, prec);
        let log_inv = -length.to_scalar_prec(prec).ln();
        table.push(BoxCountRow {
            depth,
            count: count.to_string(),
            length: length.to_decimal_string(),
            log_count: log_n.to_f64(),
            log_inv_length: log_inv.to_f64(),
        });
        points.push((log_inv, log_n));
    }
    let fit = linear_fit(&points)?;
    Ok(BoxDimension {
        slope: fit.slope,
        residual: fit.residual,
        rows: table,
    })
}

/// `ln p / ln(1/beta)` for uniform systems.
pub fn hausdorff_dimension_closed_form(system: &CantorSystem) -> Result<BigScalar> {
    system.validate()?;
    let (p, beta) = match system {
        CantorSystem::MiddleAlpha { .. } => (2, system.scale_factor()),
        CantorSystem::MultiBranch { p, beta, .. } => (*p, beta.clone()),
        other => {
            return Err(Error::Unsupported(format!(
                "closed-form dimension needs a uniform system, got {}",
                other.label()
            )))
        }
    };
    let prec = default_precision();
    let num = BigScalar::from_int_prec(i64::from(p), prec).ln();
    let den = -BigScalar::from_rational_prec(&beta, prec).ln();
    Ok(num / den)
}

/// Per-level ratios `tau_k = |child| / |gap|` for `k = 1..=max_depth`.
pub fn thickness_profile(system: &CantorSystem, max_depth: usize) -> Result<Vec<Real>> {
    if max_depth == 0 {
        return Err(Error::domain("thickness needs max_depth >= 1"));
    }
    let profiles = system.profile_to(max_depth)?;
    Ok(profiles.iter().filter_map(LevelProfile::child_to_gap_ratio).collect())
}

/// Thickness of the canonical defining sequence, estimated as the infimum of
/// the per-level ratios over the tail depths `ceil(max_depth / 2)..=max_depth`.
///
/// Constant-ratio systems return the exact ratio, so middle-alpha sets give
/// `beta / alpha`.
pub fn thickness(system: &CantorSystem, max_depth: usize) -> Result<Real> {
    let ratios = thickness_profile(system, max_depth)?;
    let start = max_depth.div_ceil(2).max(1) - 1;
    Ok(ratios[start..]
        .iter()
        .cloned()
        .reduce(|m, r| if r < m { r } else { m })
        .expect("non-empty tail"))
}

/// True when the per-level ratios increase strictly and the last exceeds the
/// first by at least [`DIVERGENCE_GROWTH`].
pub fn thickness_is_infinite(system: &CantorSystem, max_depth: usize) -> Result<bool> {
    thickness_diverges(system, max_depth, DIVERGENCE_GROWTH)
}

pub fn thickness_diverges(system: &CantorSystem, max_depth: usize, growth: f64) -> Result<bool> {
    if max_depth < 2 {
        return Err(Error::domain("divergence diagnostic needs max_depth >= 2"));
    }
    let ratios = thickness_profile(system, max_depth)?;
    let increasing = ratios.windows(2).all(|w| w[1] > w[0]);
    let first = ratios[0].to_f64();
    let last = ratios[ratios.len() - 1].to_f64();
    Ok(increasing && last >= growth * first)
}

/// Options for the gap-inventory sums behind the fatness exponent.
#[derive(Clone, Debug)]
pub struct FatnessOptions {
    /// Stop once a level contributes less than this fraction of the running sum.
    pub tail_tol: f64,
    pub max_depth: usize,
    /// Skip the positive-measure precondition.
    pub allow_null_set: bool,
}

impl Default for FatnessOptions {
    fn default() -> Self {
        FatnessOptions {
            tail_tol: 1e-30,
            max_depth: 4000,
            allow_null_set: false,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct FatteningRow {
    pub epsilon: String,
    pub mu: String,
    pub excess: String,
}

#[derive(Clone, Debug)]
pub struct FatnessEstimate {
    pub beta_tilde: BigScalar,
    pub residual: BigScalar,
    pub rows: Vec<FatteningRow>,
}

/// Covered length `sum count * min(g, 2 eps)` added by fattening with `eps`.
pub fn fattened_excess(gaps: &[(Integer, Real)], eps: &Real) -> Real {
    let two_eps = eps * &Real::from(2);
    gaps.iter().fold(Real::zero(), |acc, (count, g)| {
        let covered = if *g < two_eps { g.clone() } else { two_eps.clone() };
        acc + Real::from(count.clone()) * covered
    })
}

/// Fatness exponent from an explicit gap inventory of `(count, length)` pairs.
pub fn fatness_from_inventory(gaps: &[(Integer, Real)], mu0: &Real, epsilons: &[Real]) -> Result<FatnessEstimate> {
    let prec = default_precision();
    let mut points = Vec::new();
    let mut rows = Vec::new();
    for eps in epsilons {
        if !eps.is_positive() {
            return Err(Error::domain("fattening scales must be positive"));
        }
        let excess = fattened_excess(gaps, eps);
        rows.push(FatteningRow {
            epsilon: eps.to_decimal_string(),
            mu: (mu0 + &excess).to_decimal_string(),
            excess: excess.to_decimal_string(),
        });
        if excess.is_positive() {
            points.push((eps.to_scalar_prec(prec).ln(), excess.to_scalar_prec(prec).ln()));
        }
    }
    if points.is_empty() {
        return Err(Error::DegenerateInput("fattening adds no measure at any requested scale".into()));
    }
    let fit = linear_fit(&points)?;
    Ok(FatnessEstimate {
        beta_tilde: fit.slope,
        residual: fit.residual,
        rows,
    })
}

/// Streams `(count, length)` for every level until contributions fall below
/// `tail_tol` relative to the running total or `max_depth` is reached.
pub fn gap_inventory(system: &CantorSystem, opts: &FatnessOptions) -> Result<Vec<(Integer, Real)>> {
    let tol = Real::Exact(Rational::from_f64(opts.tail_tol).unwrap_or_default());
    let mut out = Vec::new();
    let mut total = Real::zero();
    for p in system.profiles()?.skip(1).take(opts.max_depth) {
        let p = match p {
            Ok(p) => p,
            // Finite explicit schedules end the inventory.
            Err(Error::InvalidSystem(_)) if !out.is_empty() && has_finite_schedule(system) => break,
            Err(e) => return Err(e),
        };
        let contribution = p.total_gap_length();
        total = &total + &contribution;
        let small = contribution < &total * &tol;
        out.push((p.gap_count, p.gap_length));
        if small {
            break;
        }
    }
    Ok(out)
}

fn has_finite_schedule(system: &CantorSystem) -> bool {
    match system {
        CantorSystem::VariableFraction { alpha } => alpha.len().is_some(),
        CantorSystem::ExplicitGapSchedule { gaps } => gaps.len().is_some(),
        _ => false,
    }
}

/// Slope of `log(mu(eps) - mu(0))` against `log eps` with `eps_n = s^n`, `s`
/// the system's scale factor, for `n` in `depths`.
pub fn fatness_exponent(system: &CantorSystem, depths: &[usize], opts: &FatnessOptions) -> Result<FatnessEstimate> {
    if depths.len() < 3 {
        return Err(Error::domain("fatness exponent needs at least three depths"));
    }
    let mu0 = measure_at_depth(system, 256)?;
    if !opts.allow_null_set && mu0.to_f64() < 1e-9 {
        return Err(Error::domain(format!("{} has measure zero; pass allow_null_set to override", system.label())));
    }
    let inventory = gap_inventory(system, opts)?;
    let s = Real::Exact(system.scale_factor());
    let epsilons: Vec<Real> = depths.iter().map(|&n| s.powi(n as i32)).collect();
    fatness_from_inventory(&inventory, &mu0, &epsilons)
}

/// Best available measure: the extrapolated limit, or the last partial value
/// when the limit does not settle within `max_terms` levels.
fn measure_at_depth(system: &CantorSystem, max_terms: usize) -> Result<Real> {
    match lebesgue_measure_limit_with(system, &LimitOptions::aitken(1e-15, max_terms)) {
        Ok(est) => Ok(Real::Approx(est.value)),
        Err(Error::NonConvergent { best }) => Ok(Real::Approx(best.value)),
        Err(Error::InvalidSystem(_)) if has_finite_schedule(system) => {
            let n = match system {
                CantorSystem::VariableFraction { alpha } => alpha.len().unwrap_or(0),
                CantorSystem::ExplicitGapSchedule { gaps } => gaps.len().unwrap_or(0),
                _ => 0,
            };
            Ok(system.profile_at(n)?.total_bridge_length())
        }
        Err(e) => Err(e),
    }
}
