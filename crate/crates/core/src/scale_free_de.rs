//! Infinite-product solutions of `x dX/dx = X`, hopping coverage, and
//! locally constant solutions built from the Cantor function.

use rug::Rational;
use serde::Serialize;

use crate::cantor_function::PhiEvaluator;
use crate::construction::CantorSystem;
use crate::error::{Error, Result};
use crate::numerics::{default_precision, BigScalar, Real};

fn check_eta(eta: &BigScalar) -> Result<()> {
    if !eta.is_positive() || *eta >= BigScalar::one(eta.prec()) {
        return Err(Error::domain(format!("eta = {} not in (0, 1)", eta.to_decimal_digits(12))));
    }
    Ok(())
}

/// Bits needed to resolve `eta^(2^(N+1))` next to quantities of order one.
fn working_precision(eta: &BigScalar, n: u32) -> u32 {
    let base = eta.prec().max(default_precision());
    let log2_inv = -eta.to_f64().log2();
    let extra = (2f64.powi(n as i32 + 1) * log2_inv).min(1e7).ceil() as u32;
    base + extra + 64
}

/// `prod_(i=lo..=hi) (1 + eta^(2^i))`, starting from `eta^(2^lo)`.
fn doubling_product(eta: &BigScalar, lo: u32, hi: u32) -> BigScalar {
    let mut power = eta.clone();
    for _ in 0..lo {
        power = power.square();
    }
    let one = BigScalar::one(eta.prec());
    let mut acc = one.clone();
    for _ in lo..=hi {
        acc = &acc * &(&one + &power);
        power = power.square();
    }
    acc
}

/// `prod_(i=0)^N 1 / (1 + eta^(2^i))`; tends to `1 - eta`.
pub fn product_minus(eta: &BigScalar, n: u32) -> Result<BigScalar> {
    check_eta(eta)?;
    Ok(doubling_product(eta, 0, n).recip())
}

/// `(1 - eta)^-1 prod_(i=1)^N 1 / (1 + eta^(2^i))`; tends to `1 + eta`.
pub fn product_plus(eta: &BigScalar, n: u32) -> Result<BigScalar> {
    check_eta(eta)?;
    let one = BigScalar::one(eta.prec());
    if n == 0 {
        return Ok((&one - eta).recip());
    }
    Ok((&(&one - eta) * &doubling_product(eta, 1, n)).recip())
}

/// `prod_(i=0)^N (1 + eta^(2^i))` on exact input.
pub fn doubling_product_exact(eta: &Rational, n: u32) -> Result<Rational> {
    if *eta <= 0 || *eta >= 1 {
        return Err(Error::domain(format!("eta = {eta} not in (0, 1)")));
    }
    let mut power = eta.clone();
    let mut acc = Rational::from(1);
    for _ in 0..=n {
        acc *= Rational::from(1) + &power;
        power = power.square();
    }
    Ok(acc)
}

/// Both sides of `(1 - eta)^-1 = (1 + eta) prod_(i>=1) (1 + eta^(2^i))`
/// truncated at `N`.
#[derive(Clone, Debug)]
pub struct HoppingIdentity {
    pub lhs: BigScalar,
    pub rhs: BigScalar,
    /// `|lhs - rhs|`, equal to `eta^(2^(N+1)) / (1 - eta)`.
    pub gap: BigScalar,
}

/// Evaluates the hopping identity at a precision wide enough to resolve the gap.
pub fn hopping_identity(eta: &BigScalar, n: u32) -> Result<HoppingIdentity> {
    check_eta(eta)?;
    let prec = working_precision(eta, n);
    let e = eta.with_prec(prec);
    let one = BigScalar::one(prec);
    let lhs = (&one - &e).recip();
    let rhs = if n == 0 { &one + &e } else { &(&one + &e) * &doubling_product(&e, 1, n) };
    let gap = (&lhs - &rhs).abs();
    Ok(HoppingIdentity { lhs, rhs, gap })
}

/// Coverage after `N` hops: additive `1 - (1 - eta)^N` and multiplicative
/// `1 - eta^(2^N)`.
pub fn hopping_coverage(eta: &BigScalar, n: u32) -> Result<(BigScalar, BigScalar)> {
    check_eta(eta)?;
    let prec = working_precision(eta, n.saturating_sub(1));
    let e = eta.with_prec(prec);
    let one = BigScalar::one(prec);
    let additive = &one - &(&one - &e).powi(i64::from(n));
    let mut power = e;
    for _ in 0..n {
        power = power.square();
    }
    Ok((additive, &one - &power))
}

/// Hops needed to reach coverage `1 - delta` along each path.
#[derive(Clone, Debug, Serialize)]
pub struct CoverageSteps {
    pub eta: f64,
    pub delta: f64,
    pub additive: u64,
    pub multiplicative: u64,
}

/// Smallest hop counts with `(1 - eta)^N <= delta` and `eta^(2^N) <= delta`.
pub fn coverage_steps(eta: f64, delta: f64) -> Result<CoverageSteps> {
    if !(eta > 0.0 && eta < 1.0) || !(delta > 0.0 && delta < 1.0) {
        return Err(Error::domain("coverage steps need eta and delta in (0, 1)"));
    }
    let ln_delta = delta.ln();
    let additive = (ln_delta / (1.0 - eta).ln()).ceil().max(0.0) as u64;
    let ln_eta = eta.ln();
    let mut multiplicative = 0u64;
    while 2f64.powi(multiplicative as i32) * ln_eta > ln_delta {
        multiplicative += 1;
    }
    Ok(CoverageSteps {
        eta,
        delta,
        additive,
        multiplicative,
    })
}

/// Diagnostics for one pair of consecutive samples.
#[derive(Clone, Debug, Serialize)]
pub struct LcfPair {
    pub x1: String,
    pub x2: String,
    #[serde(with = "crate::numerics::serde_rational")]
    pub delta_phi: Rational,
    /// Both samples resolved to the same gap of the construction.
    pub same_plateau: bool,
    /// `|dX/dx - X/x|` by finite differences for `X = x eps0^phi(x)`.
    pub de_residual: String,
    pub de_residual_f64: f64,
}

/// Finite-difference derivative of `v(x) = log_(1/eps)(eps / x~)` for
/// `x~ = x eps^(1 + a)`, next to the analytic `1 / (x ln eps)`.
#[derive(Clone, Debug, Serialize)]
pub struct DerivativeRow {
    pub epsilon: f64,
    pub x: f64,
    pub finite_difference: f64,
    pub oracle: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct LcfReport {
    pub system: String,
    pub pairs: Vec<LcfPair>,
    pub derivative: Vec<DerivativeRow>,
}

/// Exponent `a` of the infinitesimals used for the derivative rows.
const LCF_EXPONENT: f64 = 0.5;

/// Checks that `X = x eps0^phi(x)` solves `x dX/dx = X` on each plateau of
/// the Cantor function of `system` (consecutive samples form the pairs, and
/// `eps0` is the first scale), and that the valuation derivative vanishes
/// along `eps_schedule`.
pub fn lcf_solution_check(
    system: &CantorSystem,
    x_samples: &[BigScalar],
    eps_schedule: &[BigScalar],
) -> Result<LcfReport> {
    let one = BigScalar::one(default_precision());
    if let Some(x) = x_samples.iter().find(|x| !x.is_positive() || **x >= one) {
        return Err(Error::domain(format!("sample {} not in (0, 1)", x.to_decimal_digits(12))));
    }
    let eps0 = eps_schedule
        .first()
        .ok_or_else(|| Error::DegenerateInput("empty scale schedule".into()))?;
    check_eta(eps0)?;
    let evaluator = PhiEvaluator::new(system, 64)?;
    let exact = |x: &BigScalar| -> Result<Real> {
        x.to_rational()
            .map(Real::Exact)
            .ok_or_else(|| Error::domain("sample is not finite"))
    };
    let big_x = |x: &BigScalar, p: &Rational| x * &eps0.pow(&BigScalar::from_rational_prec(p, x.prec()));

    let mut pairs = Vec::new();
    for w in x_samples.windows(2) {
        let (x1, x2) = (&w[0], &w[1]);
        let p1 = evaluator.eval(&exact(x1)?)?;
        let p2 = evaluator.eval(&exact(x2)?)?;
        let delta_phi = Rational::from(&p2.value - &p1.value);
        let same_plateau = p1.exact && p2.exact && delta_phi == 0;
        let (y1, y2) = (big_x(x1, &p1.value), big_x(x2, &p2.value));
        let slope = &(&y2 - &y1) / &(x2 - x1);
        let residual = (&slope - &(&y1 / x1)).abs();
        pairs.push(LcfPair {
            x1: x1.to_decimal_digits(20),
            x2: x2.to_decimal_digits(20),
            delta_phi,
            same_plateau,
            de_residual: residual.to_decimal_digits(20),
            de_residual_f64: residual.to_f64(),
        });
    }

    let mut derivative = Vec::new();
    for eps in eps_schedule {
        check_eta(eps)?;
        let ln_eps = eps.ln();
        let a = BigScalar::from_f64_prec(LCF_EXPONENT, eps.prec());
        let v = |x: &BigScalar| {
            let xt = x * &eps.pow(&(&BigScalar::one(eps.prec()) + &a));
            (eps / &xt).ln() / -&ln_eps
        };
        for x in x_samples {
            let h = x * &BigScalar::from_f64_prec(1e-20, x.prec());
            let fd = &(&v(&(x + &h)) - &v(&(x - &h))) / &(&h * &BigScalar::from_int_prec(2, x.prec()));
            let oracle = (x * &ln_eps).recip();
            derivative.push(DerivativeRow {
                epsilon: eps.to_f64(),
                x: x.to_f64(),
                finite_difference: fd.to_f64(),
                oracle: oracle.to_f64(),
            });
        }
    }
    Ok(LcfReport {
        system: system.label(),
        pairs,
        derivative,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construction::example2_system;
    use proptest::prelude::*;
    use rug::ops::Pow;

    fn s(v: f64) -> BigScalar {
        BigScalar::from_f64(v)
    }

    fn half() -> BigScalar {
        s(0.5)
    }

    #[test]
    fn products_converge() {
        let m = product_minus(&half(), 40).unwrap();
        assert!((&m - &half()).abs() < s(1e-12));
        let p = product_plus(&s(0.25), 30).unwrap();
        assert!((&p - &s(1.25)).abs() < s(1e-12));
        let tiny = s(1e-30);
        assert!((product_minus(&tiny, 5).unwrap() - s(1.0)).abs() < s(1e-29));
        assert!((product_plus(&tiny, 5).unwrap() - s(1.0)).abs() < s(1e-29));
        assert!(product_minus(&s(1.0), 3).is_err());
        assert!(product_plus(&s(0.0), 3).is_err());
    }

    #[test]
    fn finite_product_closed_form() {
        let m = product_minus(&half(), 5).unwrap();
        let two = BigScalar::from_int(2);
        let want = (&two * &(BigScalar::from_int(1) - two.powi(-64))).recip();
        assert!((&m - &want).abs() < s(1e-70));
    }

    #[test]
    fn telescoping_is_exact() {
        for (p, d) in [(1, 2), (1, 3), (9, 10), (2, 7)] {
            let eta = Rational::from((p, d));
            for n in 0..6u32 {
                let prod = doubling_product_exact(&eta, n).unwrap();
                let lhs = prod * (Rational::from(1) - &eta);
                let rhs = Rational::from(1) - Rational::from((&eta).pow(1u32 << (n + 1)));
                assert_eq!(lhs, rhs);
            }
        }
    }

    #[test]
    fn plus_and_minus_consistency() {
        // X_+ (1 - eta) = X_- (1 + eta) at every truncation.
        let eta = s(0.3);
        let one = BigScalar::from_int(1);
        for n in 1..8u32 {
            let plus = product_plus(&eta, n).unwrap();
            let minus = product_minus(&eta, n).unwrap();
            let lhs = &plus * &(&one - &eta);
            let rhs = &minus * &(&one + &eta);
            assert!((&lhs - &rhs).abs() < s(1e-70));
        }
    }

    #[test]
    fn hopping_identity_gap() {
        let h = hopping_identity(&s(0.9), 8).unwrap();
        assert!(h.gap < s(1e-20));
        let h = hopping_identity(&half(), 3).unwrap();
        let want = BigScalar::from_int(2).powi(-15);
        assert!(((&h.gap - &want) / &want).abs() < s(1e-60), "{}", h.gap);
        let h = hopping_identity(&s(1e-12), 1).unwrap();
        assert!(h.gap < s(1e-40));
    }

    #[test]
    fn hopping_gap_matches_closed_form() {
        for eta in [0.1, 0.5, 0.9] {
            let e = s(eta);
            for n in 0..=10u32 {
                let h = hopping_identity(&e, n).unwrap();
                let prec = h.lhs.prec();
                let e = e.with_prec(prec);
                let mut p = e.clone();
                for _ in 0..=n {
                    p = p.square();
                }
                let want = &p / &(&BigScalar::one(prec) - &e);
                assert!(((&h.gap - &want) / &want).abs() < s(1e-60), "eta {eta} N {n}");
            }
        }
    }

    #[test]
    fn coverage_examples() {
        let (add, mul) = hopping_coverage(&half(), 10).unwrap();
        assert_eq!(add, BigScalar::from_int(1) - BigScalar::from_int(2).powi(-10));
        let (_, mul5) = hopping_coverage(&half(), 5).unwrap();
        assert_eq!(mul5, BigScalar::from_int(1) - BigScalar::from_int(2).powi(-32));
        assert!(mul > add);
        for eta in [0.01, 0.5, 0.9] {
            let deep = coverage_steps(eta, 1e-100).unwrap();
            assert!(deep.multiplicative < deep.additive, "{deep:?}");
            let c = coverage_steps(eta, 1e-6).unwrap();
            let want = (6.0 / (1.0 / eta).log10()).log2().ceil().max(0.0) as u64;
            assert_eq!(c.multiplicative, want);
        }
        let c = coverage_steps(0.5, 1e-6).unwrap();
        assert_eq!((c.additive, c.multiplicative), (20, 5));
    }

    #[test]
    fn lcf_plateau_and_crossing() {
        let third = CantorSystem::middle_third();
        let samples = [s(0.4), s(0.6), s(0.7)];
        let eps = [s(1e-3), s(1e-5), s(1e-8)];
        let r = lcf_solution_check(&third, &samples, &eps).unwrap();
        assert!(r.pairs[0].same_plateau);
        assert_eq!(r.pairs[0].delta_phi, 0);
        assert!(r.pairs[0].de_residual_f64 < 1e-60);
        assert!(!r.pairs[1].same_plateau);
        assert!(r.pairs[1].delta_phi != 0);
        for row in &r.derivative {
            assert!(((row.finite_difference - row.oracle) / row.oracle).abs() < 1e-9, "{row:?}");
        }
        let first = r.derivative.iter().find(|d| d.x == 0.4 && d.epsilon == 1e-3).unwrap();
        let last = r.derivative.iter().find(|d| d.x == 0.4 && d.epsilon == 1e-8).unwrap();
        assert!(last.oracle.abs() < first.oracle.abs());
        assert!(lcf_solution_check(&third, &[s(1.5)], &eps).is_err());
        let fat = example2_system(Rational::from((1, 2))).unwrap();
        assert!(lcf_solution_check(&fat, &samples, &eps).is_ok());
    }

    proptest! {
        #[test]
        fn minus_decreases_and_plus_decreases_to_limits(eta in 0.01f64..0.99) {
            let e = s(eta);
            let one = BigScalar::from_int(1);
            let slack = BigScalar::from_int(2).powi(-240);
            let (lo, hi) = (&(&one - &e) - &slack, &(&one + &e) - &slack);
            let mut prev_m = product_minus(&e, 0).unwrap();
            let mut prev_p = product_plus(&e, 0).unwrap();
            for n in 1..12u32 {
                let m = product_minus(&e, n).unwrap();
                let p = product_plus(&e, n).unwrap();
                prop_assert!(m <= prev_m && m >= lo);
                prop_assert!(p <= prev_p && p >= hi);
                prev_m = m;
                prev_p = p;
            }
        }

        #[test]
        fn gap_squares(eta in 0.05f64..0.9, n in 2u32..9) {
            let g0 = hopping_identity(&s(eta), n).unwrap().gap;
            let g1 = hopping_identity(&s(eta), n + 1).unwrap().gap;
            let bound = g0.with_prec(g1.prec()).pow(&BigScalar::from_f64_prec(1.9, g1.prec()));
            prop_assert!(g1 < bound);
        }
    }
}
