use rug::Float;
use serde::Serialize;

use super::scalar::BigScalar;
use crate::error::{Error, Result};

/// How successive terms are turned into limit extrapolants.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum LimitMethod {
    /// The latest term is the estimate.
    PlainTail,
    /// Aitken delta-squared; falls back to the plain tail when the second
    /// difference vanishes at working precision.
    Aitken,
}

#[derive(Clone, Debug)]
pub struct LimitOptions {
    pub method: LimitMethod,
    pub tol: BigScalar,
    pub max_terms: usize,
}

impl LimitOptions {
    pub fn new(method: LimitMethod, tol: f64, max_terms: usize) -> Self {
        LimitOptions {
            method,
            tol: BigScalar::from_f64(tol),
            max_terms,
        }
    }

    pub fn aitken(tol: f64, max_terms: usize) -> Self {
        Self::new(LimitMethod::Aitken, tol, max_terms)
    }

    pub fn plain(tol: f64, max_terms: usize) -> Self {
        Self::new(LimitMethod::PlainTail, tol, max_terms)
    }
}

impl Default for LimitOptions {
    fn default() -> Self {
        Self::aitken(1e-12, 4096)
    }
}

/// An extrapolated limit.
///
/// `error_bound` is `|last extrapolant - previous extrapolant|`. It is a
/// stopping heuristic, not a certified enclosure.
#[derive(Clone, Debug)]
pub struct LimitEstimate {
    pub value: BigScalar,
    pub error_bound: BigScalar,
    pub terms_used: usize,
    pub converged: bool,
}

/// One row of a convergence trace.
#[derive(Clone, Debug)]
pub struct TracePoint {
    pub n: usize,
    pub term: BigScalar,
    pub extrapolant: BigScalar,
}

/// Evaluates the limit of `seq` (terms indexed from 1).
///
/// At least three terms are consumed before convergence is declared.
/// Returns [`Error::NonConvergent`] carrying the best estimate when the
/// tolerance is not met within `max_terms` terms or the sequence ends early.
pub fn eval_limit<I>(seq: I, opts: &LimitOptions) -> Result<LimitEstimate>
where
    I: IntoIterator<Item = BigScalar>,
{
    run(seq.into_iter().map(Ok), opts, None)
}

/// Like [`eval_limit`], for generators whose terms can fail.
pub fn try_eval_limit<I>(seq: I, opts: &LimitOptions) -> Result<LimitEstimate>
where
    I: IntoIterator<Item = Result<BigScalar>>,
{
    run(seq.into_iter(), opts, None)
}

/// [`try_eval_limit`] that also records every term and extrapolant.
pub fn eval_limit_traced<I>(seq: I, opts: &LimitOptions) -> (Result<LimitEstimate>, Vec<TracePoint>)
where
    I: IntoIterator<Item = Result<BigScalar>>,
{
    let mut trace = Vec::new();
    let result = run(seq.into_iter(), opts, Some(&mut trace));
    (result, trace)
}

fn run<I>(seq: I, opts: &LimitOptions, mut trace: Option<&mut Vec<TracePoint>>) -> Result<LimitEstimate>
where
    I: Iterator<Item = Result<BigScalar>>,
{
    if !opts.tol.is_positive() {
        return Err(Error::domain("limit tolerance must be positive"));
    }
    let mut window: Vec<BigScalar> = Vec::with_capacity(3);
    let mut prev_extrapolant: Option<BigScalar> = None;
    let mut best: Option<LimitEstimate> = None;

    // Aitken extrapolants only exist from the third term on; compare two of them.
    let first_check = match opts.method {
        LimitMethod::PlainTail => 3,
        LimitMethod::Aitken => 4,
    };

    for (idx, term) in seq.take(opts.max_terms).enumerate() {
        let n = idx + 1;
        let term = term?;
        if window.len() == 3 {
            window.remove(0);
        }
        window.push(term.clone());

        let extrapolant = match opts.method {
            LimitMethod::PlainTail => term.clone(),
            LimitMethod::Aitken if window.len() == 3 => aitken(&window[0], &window[1], &window[2]),
            LimitMethod::Aitken => term.clone(),
        };
        if let Some(t) = trace.as_deref_mut() {
            t.push(TracePoint {
                n,
                term: term.clone(),
                extrapolant: extrapolant.clone(),
            });
        }

        let error_bound = match &prev_extrapolant {
            Some(prev) => (&extrapolant - prev).abs(),
            None => BigScalar::from_float(Float::with_val(extrapolant.prec(), f64::INFINITY)),
        };
        let estimate = LimitEstimate {
            value: extrapolant.clone(),
            error_bound,
            terms_used: n,
            converged: false,
        };
        if n >= first_check && estimate.error_bound < opts.tol {
            return Ok(LimitEstimate {
                converged: true,
                ..estimate
            });
        }
        best = Some(estimate);
        prev_extrapolant = Some(extrapolant);
    }

    match best {
        Some(best) if best.terms_used >= 3 => Err(Error::NonConvergent { best: Box::new(best) }),
        _ => Err(Error::DegenerateInput(
            "limit evaluation needs at least three terms".into(),
        )),
    }
}

fn aitken(s0: &BigScalar, s1: &BigScalar, s2: &BigScalar) -> BigScalar {
    let d1 = s2 - s1;
    let denom = &(&d1 - s1) + s0;
    // A second difference at rounding level means the tail is already flat.
    let scale = s2.abs().max(&s1.abs()).max(&s0.abs()).clone();
    let prec = s2.prec();
    let noise = &scale * &BigScalar::from_int_prec(2, prec).powi(8 - i64::from(prec));
    if denom.abs() <= noise {
        return s2.clone();
    }
    s2 - &(&d1.square() / &denom)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scalar(v: f64) -> BigScalar {
        BigScalar::from_f64(v)
    }

    #[test]
    fn constant_sequence_has_zero_error_under_plain_tail() {
        let c = scalar(0.7);
        let est = eval_limit(std::iter::repeat(c.clone()), &LimitOptions::plain(1e-30, 10)).unwrap();
        assert_eq!(est.value, c);
        assert!(est.error_bound.is_zero());
        assert!(est.converged);
        assert_eq!(est.terms_used, 3);
    }

    #[test]
    fn constant_sequence_under_aitken_falls_back() {
        let c = scalar(-2.5);
        let est = eval_limit(std::iter::repeat(c.clone()), &LimitOptions::aitken(1e-30, 10)).unwrap();
        assert_eq!(est.value, c);
        assert!(est.error_bound.is_zero());
    }

    #[test]
    fn harmonic_sequence_goes_to_zero_under_aitken() {
        // Aitken maps 1/n to 1/(2(n-1)); differences drop below 1e-12 near n = 7.1e5.
        let seq = (1..).map(|n: u64| BigScalar::from_int(1) / BigScalar::from_int(n as i64));
        let est = eval_limit(seq, &LimitOptions::aitken(1e-12, 2_000_000)).unwrap();
        assert!(est.converged);
        assert!(est.value.abs() < scalar(1e-5), "value {}", est.value);
    }

    #[test]
    fn euler_product_matches_partial_product_oracle() {
        // Oracle: prod_{i=1}^{60} (1 - 2^-i) at 256 bits.
        let two = BigScalar::from_int(2);
        let mut oracle = BigScalar::from_int(1);
        for i in 1..=60 {
            oracle = &oracle * &(BigScalar::from_int(1) - two.powi(-i));
        }
        assert_eq!(format!("{:.10}", oracle), "2.887880951e-1");

        let seq = (1..).scan(BigScalar::from_int(1), |acc, i: i64| {
            *acc = &*acc * &(BigScalar::from_int(1) - BigScalar::from_int(2).powi(-i));
            Some(acc.clone())
        });
        let est = eval_limit(seq, &LimitOptions::aitken(1e-15, 200)).unwrap();
        assert!(est.converged);
        assert!((&est.value - &oracle).abs() < scalar(1e-14));
    }

    #[test]
    fn geometric_sequence_recovers_offset() {
        for (a, r, c) in [(1.0, 0.5, 0.25), (-3.0, 0.9, 2.0), (0.5, -0.7, -1.0)] {
            let seq = (1..).map(move |n: i32| scalar(c) + scalar(a) * scalar(r).powi(n as i64));
            let est = eval_limit(seq, &LimitOptions::aitken(1e-40, 100)).unwrap();
            assert!((&est.value - &scalar(c)).abs() < scalar(1e-40));
        }
    }

    #[test]
    fn non_convergence_carries_best_estimate() {
        let seq = (1..).map(|n: i64| BigScalar::from_int(n));
        let err = eval_limit(seq, &LimitOptions::plain(1e-3, 10)).unwrap_err();
        let best = err.best_estimate().expect("best estimate");
        assert_eq!(best.terms_used, 10);
        assert_eq!(best.value, BigScalar::from_int(10));
        assert!(!best.converged);
    }

    #[test]
    fn too_few_terms_is_degenerate() {
        let err = eval_limit(vec![scalar(1.0), scalar(1.0)], &LimitOptions::plain(1e-3, 10)).unwrap_err();
        assert!(matches!(err, Error::DegenerateInput(_)));
    }

    #[test]
    fn trace_records_every_term() {
        let seq = (1..=5).map(|n: i64| Ok(BigScalar::from_int(1) / BigScalar::from_int(n)));
        let (res, trace) = eval_limit_traced(seq, &LimitOptions::plain(1e-30, 5));
        assert!(res.is_err());
        assert_eq!(trace.len(), 5);
        assert_eq!(trace[4].n, 5);
    }
}
