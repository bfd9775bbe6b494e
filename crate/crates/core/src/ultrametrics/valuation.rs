use serde::Serialize;

use super::words::word_encode;
use crate::construction::CantorSystem;
use crate::error::{Error, Result};
use crate::numerics::{
    default_precision, eval_limit, eval_limit_traced, log_base, BigScalar, LimitEstimate, LimitOptions, Real,
};

/// Point, scale and inversion parameter of a relative infinitesimal.
#[derive(Clone, Debug)]
pub struct InfinitesimalContext {
    pub x: Real,
    pub epsilon: Real,
    pub lambda: Real,
}

/// One term of a valuation limit.
#[derive(Clone, Debug, Serialize)]
pub struct TraceRow {
    pub n: usize,
    pub scale: String,
    pub term: String,
}

/// A numerically extrapolated valuation.
#[derive(Clone, Debug)]
pub struct ValuationEstimate {
    pub value: BigScalar,
    pub error_bound: BigScalar,
    pub terms_used: usize,
    pub converged: bool,
    /// How the scales were chosen.
    pub schedule: String,
    pub trace: Vec<TraceRow>,
}

impl ValuationEstimate {
    fn from_limit(est: LimitEstimate, schedule: String, trace: Vec<TraceRow>) -> Self {
        ValuationEstimate {
            value: est.value,
            error_bound: est.error_bound,
            terms_used: est.terms_used,
            converged: est.converged,
            schedule,
            trace,
        }
    }
}

/// Runs an extrapolation over `(scale label, term)` pairs and keeps the trace.
pub(crate) fn traced_limit<I>(terms: I, opts: &LimitOptions, schedule: String) -> Result<ValuationEstimate>
where
    I: Iterator<Item = Result<(String, BigScalar)>>,
{
    let mut labels = Vec::new();
    let seq = terms.map(|t| {
        t.map(|(label, term)| {
            labels.push(label);
            term
        })
    });
    let (res, points) = eval_limit_traced(seq, opts);
    let trace = points
        .iter()
        .zip(labels)
        .map(|(p, scale)| TraceRow {
            n: p.n,
            scale,
            term: p.term.to_decimal_digits(30),
        })
        .collect();
    res.map(|est| ValuationEstimate::from_limit(est, schedule, trace))
}

/// `eps^2 / (lambda x)`, the inversion rule solved for the infinitesimal.
pub fn inversion(x: &Real, epsilon: &Real, lambda: &Real) -> Result<Real> {
    if !x.is_positive() || !epsilon.is_positive() || !lambda.is_positive() {
        return Err(Error::domain("inversion needs positive x, epsilon and lambda"));
    }
    Ok(epsilon.square() / (lambda * x))
}

/// The relative infinitesimal of `ctx.x` at scale `ctx.epsilon`; fails with
/// [`Error::InversionOutOfRange`] unless `0 < x~ < epsilon`.
pub fn relative_infinitesimal(ctx: &InfinitesimalContext) -> Result<Real> {
    if ctx.lambda > Real::one() {
        return Err(Error::domain(format!("lambda = {} exceeds 1", ctx.lambda)));
    }
    let xt = inversion(&ctx.x, &ctx.epsilon, &ctx.lambda)?;
    if xt >= ctx.epsilon {
        return Err(Error::InversionOutOfRange {
            xtilde: xt.to_decimal_string(),
            epsilon: ctx.epsilon.to_decimal_string(),
        });
    }
    Ok(xt)
}

/// Sequences of primary scales decreasing to zero.
#[derive(Clone, Debug)]
pub enum ScaleSchedule {
    /// `eps_k = base^(2^k)`, `k = 0, 1, ...`; limited by the float exponent range.
    Squaring { base: BigScalar },
    /// `eps_k = base^k`, `k = 1, 2, ...`.
    Powers { base: BigScalar },
    Explicit(Vec<BigScalar>),
}

impl ScaleSchedule {
    pub fn describe(&self) -> String {
        match self {
            ScaleSchedule::Squaring { base } => format!("eps_k = {}^(2^k)", base.to_decimal_digits(12)),
            ScaleSchedule::Powers { base } => format!("eps_k = {}^k", base.to_decimal_digits(12)),
            ScaleSchedule::Explicit(v) => format!("explicit list of {} scales", v.len()),
        }
    }

    pub fn scales(&self) -> Box<dyn Iterator<Item = BigScalar> + '_> {
        match self {
            ScaleSchedule::Squaring { base } => Box::new((0..29).scan(base.clone(), |eps, k| {
                if k > 0 {
                    *eps = eps.square();
                }
                Some(eps.clone())
            })),
            ScaleSchedule::Powers { base } => Box::new((1i64..).map(move |k| base.powi(k))),
            ScaleSchedule::Explicit(v) => Box::new(v.iter().cloned()),
        }
    }
}

/// Limit of `log_{1/eps}(eps / x~(eps))` along `schedule`.
pub fn valuation<F>(xtilde_of_eps: F, schedule: &ScaleSchedule, tol: f64) -> Result<ValuationEstimate>
where
    F: Fn(&BigScalar) -> Result<BigScalar>,
{
    let terms = schedule.scales().map(|eps| {
        let xt = xtilde_of_eps(&eps)?;
        if !xt.is_positive() || xt >= eps {
            return Err(Error::domain(format!(
                "x~ = {} is not in (0, eps) at eps = {}",
                xt.to_decimal_digits(12),
                eps.to_decimal_digits(12)
            )));
        }
        let term = log_base(&eps.recip(), &(&eps / &xt))?;
        Ok((eps.to_decimal_digits(20), term))
    });
    traced_limit(terms, &LimitOptions::aitken(tol, 64), schedule.describe())
}

/// `(x^(1 - v), x^(1 + v))` for each valuation `v`.
pub fn valued_neighbours(x: &BigScalar, values: &[BigScalar]) -> Result<Vec<(BigScalar, BigScalar)>> {
    if !x.is_positive() || *x >= BigScalar::one(x.prec()) {
        return Err(Error::domain(format!("x = {} not in (0, 1)", x.to_decimal_digits(12))));
    }
    values
        .iter()
        .map(|v| {
            if !v.is_finite() || *v < BigScalar::zero(v.prec()) || *v > BigScalar::one(v.prec()) {
                return Err(Error::domain(format!("valuation {} not in [0, 1]", v.to_decimal_digits(12))));
            }
            let one = BigScalar::one(v.prec());
            Ok((x.pow(&(&one - v)), x.pow(&(&one + v))))
        })
        .collect()
}

/// Valued norm of a point of the middle-thirds set resolved to depth `n`,
/// from the valuations `i 2^-n`, `i = 1..2^m - 1`.
///
/// `error_bound` is the larger of the deviation from `2^-n` and the gap in the
/// identity `2^-n = 3^(-n s)`, `s = log_3 2`.
pub fn valued_norm_triadic(x: &Real, n: usize, m: usize) -> Result<ValuationEstimate> {
    if m == 0 {
        return Err(Error::domain("secondary depth m must be at least 1"));
    }
    word_encode(&CantorSystem::middle_third(), x, n).map_err(|e| match e {
        Error::NotInSet { depth } => Error::domain(format!("x falls in a gap at depth {depth} < {n}")),
        other => other,
    })?;
    let prec = default_precision();
    let xs = x.to_scalar_prec(prec);
    let unit = BigScalar::from_int_prec(2, prec).powi(-(n as i64));
    let count = (1u64 << m.min(62)) - 1;
    let values: Vec<BigScalar> = (1..=count)
        .map(|i| &unit * &BigScalar::from_int_prec(i as i64, prec))
        .take_while(|v| *v <= BigScalar::one(prec))
        .collect();
    let neighbours = valued_neighbours(&xs, &values)?;
    let inv_x = xs.recip();
    let mut best: Option<BigScalar> = None;
    for (plus, _) in &neighbours {
        let v = log_base(&inv_x, &(plus / &xs))?;
        best = Some(match best {
            Some(b) if b <= v => b,
            _ => v,
        });
    }
    let value = best.ok_or_else(|| Error::DegenerateInput("no valuations at this depth".into()))?;
    let s = log_base(&BigScalar::from_int_prec(3, prec), &BigScalar::from_int_prec(2, prec))?;
    let triadic = BigScalar::from_int_prec(3, prec).pow(&(-(&s * &BigScalar::from_int_prec(n as i64, prec))));
    let err = (&value - &unit).abs().max(&(&unit - &triadic).abs()).clone();
    Ok(ValuationEstimate {
        value,
        error_bound: err,
        terms_used: neighbours.len(),
        converged: true,
        schedule: format!("valuations i*2^-{n}, i = 1..{}", neighbours.len()),
        trace: Vec::new(),
    })
}

/// Parameters for [`sequence_norm_limit`].
#[derive(Clone, Debug)]
pub struct SequenceNormOptions {
    pub lambda: BigScalar,
    pub n_max: u64,
    pub tol: f64,
    /// Fixed index `n` used for the companion `||eps^n||`.
    pub companion_n: u64,
}

impl Default for SequenceNormOptions {
    fn default() -> Self {
        SequenceNormOptions {
            lambda: BigScalar::from_f64(0.9),
            n_max: 1 << 20,
            tol: 1e-9,
            companion_n: 10,
        }
    }
}

#[derive(Clone, Debug)]
pub struct SequenceNorm {
    /// Ultrametric limit of `eps^(n - n l)`; tends to `l`.
    pub limit: ValuationEstimate,
    /// `||eps^n|| = inf_r r / (n + r)`; tends to 0.
    pub companion: ValuationEstimate,
}

/// The sequence `eps^(n - n l)` measured in the valued norm, at scales `eps^n`
/// with infinitesimals `lambda^-1 eps^(n + n l)` and `n = 1, 2, 4, ...`.
///
/// Indices where the infinitesimal is not below its scale are skipped.
pub fn sequence_norm_limit(epsilon: &BigScalar, l: &BigScalar, opts: &SequenceNormOptions) -> Result<SequenceNorm> {
    let one = BigScalar::one(epsilon.prec());
    if !epsilon.is_positive() || *epsilon >= one {
        return Err(Error::domain("epsilon must lie in (0, 1)"));
    }
    if !l.is_positive() || *l >= one {
        return Err(Error::domain("l must lie in (0, 1)"));
    }
    check_lambda(&opts.lambda)?;
    let ln_eps = epsilon.ln();
    let ln_lambda = opts.lambda.ln();
    let n_max = opts.n_max;
    let terms = (0..64u32)
        .map(|k| 1u64 << k)
        .take_while(move |&n| n <= n_max)
        .filter_map(move |n| {
            let nb = BigScalar::from_int_prec(n as i64, ln_eps.prec());
            // ln x~ = -ln lambda + n (1 + l) ln eps; ln scale = n ln eps.
            let ln_scale = &nb * &ln_eps;
            let ln_xt = &(&nb * &(&(&one + l) * &ln_eps)) - &ln_lambda;
            if ln_xt >= ln_scale {
                return None;
            }
            let term = (&ln_scale - &ln_xt) / -ln_scale;
            Some(Ok((format!("eps^{n}"), term)))
        });
    let schedule = format!("scales eps^n, n = 2^k <= {n_max}");
    let limit = traced_limit(terms, &LimitOptions::aitken(opts.tol, 64), schedule)?;
    let companion = sequence_norm_companion(epsilon, opts.companion_n, &opts.lambda, opts.tol)?;
    Ok(SequenceNorm { limit, companion })
}

fn check_lambda(lambda: &BigScalar) -> Result<()> {
    if !lambda.is_positive() || *lambda > BigScalar::one(lambda.prec()) {
        return Err(Error::domain("lambda must lie in (0, 1]"));
    }
    Ok(())
}

/// `||eps^n|| = inf_r r/(n + r)`: for `r = 2^-j` the valuation of
/// `lambda^-1 eps^(n + 2r)` at scale `eps^(n + r)` is extrapolated along the
/// secondary scales `eps -> eps^m`, `m = 2^k`, and the infimum over `j` is
/// extrapolated in turn.
pub fn sequence_norm_companion(epsilon: &BigScalar, n: u64, lambda: &BigScalar, tol: f64) -> Result<ValuationEstimate> {
    check_lambda(lambda)?;
    let one = BigScalar::one(epsilon.prec());
    if !epsilon.is_positive() || *epsilon >= one {
        return Err(Error::domain("epsilon must lie in (0, 1)"));
    }
    let big_l = -epsilon.ln();
    let ln_lambda = lambda.ln();
    let nb = BigScalar::from_int_prec(n as i64, epsilon.prec());
    let inner = |r: &BigScalar| -> Result<BigScalar> {
        let seq = (0..200u32).filter_map(|k| {
            let m = BigScalar::from_int_prec(2, epsilon.prec()).powi(i64::from(k));
            // ln(scale / x~) = ln lambda + m r L must be positive.
            let num = &ln_lambda + &(&(&m * r) * &big_l);
            if !num.is_positive() {
                return None;
            }
            Some(num / (&(&m * &(&nb + r)) * &big_l))
        });
        Ok(eval_limit(seq, &LimitOptions::aitken(tol * 1e-3, 200))?.value)
    };
    let terms = (0..256i64).map(|j| {
        let r = BigScalar::from_int_prec(2, epsilon.prec()).powi(-j);
        inner(&r).map(|v| (format!("r = 2^-{j}"), v))
    });
    // The inner values decrease in r; their limit is the infimum.
    traced_limit(terms, &LimitOptions::aitken(tol, 256), format!("scales eps^(n + r), n = {n}, r = 2^-j"))
}
