use cantorlab::cantor_function::{phi, sample_staircase, PhiEvaluator};
use cantorlab::construction::CantorSystem;
use cantorlab::numerics::{default_precision, parse_rational, BigScalar, Rational, Real};
use cantorlab::scale_free_de::{coverage_steps, hopping_coverage, hopping_identity, lcf_solution_check, product_minus, product_plus};
use cantorlab::set_statistics::{
    box_dimension_estimate, fatness_exponent, hausdorff_dimension_closed_form, lebesgue_measure_limit, thickness,
    thickness_diverges, thickness_profile, FatnessOptions, DIVERGENCE_GROWTH,
};
use cantorlab::ultrametrics::{
    endpoint_exponent, natural_ultrametric, relative_infinitesimal, renormalised_valuation, sequence_norm_limit,
    valuated_exponent_estimate, valuation, valued_measure_estimate, valued_norm_triadic, word_encode,
    InfinitesimalContext, ScaleSchedule, SequenceNormOptions, WordRep,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::args::{Cli, Command, DeCmd, PhiCmd, SequenceArgs, StatsCmd, SystemArg, UltraCmd};
use crate::output::{num, real, trace_table, valuation_json, Report, Table};
use crate::spec::{load_config, parse_system};
use crate::{experiments, CliError};

pub type CliResult<T> = Result<T, CliError>;

/// Flags shared by every command.
pub struct Ctx<'a> {
    pub cli: &'a Cli,
}

impl Ctx<'_> {
    pub fn system(&self, arg: &SystemArg) -> CliResult<CantorSystem> {
        match (&arg.system, &self.cli.config) {
            (Some(spec), _) => parse_system(spec),
            (None, Some(path)) => load_config(path),
            (None, None) => Ok(CantorSystem::middle_third()),
        }
    }

    pub fn depth_or(&self, default: usize) -> usize {
        self.cli.depth.unwrap_or(default)
    }

    pub fn tol_or(&self, default: f64) -> f64 {
        self.cli.tol.unwrap_or(default)
    }
}

pub fn rational(text: &str) -> CliResult<Rational> {
    parse_rational(text).map_err(|e| CliError::Usage(e.to_string()))
}

pub fn exact(text: &str) -> CliResult<Real> {
    rational(text).map(Real::Exact)
}

pub fn scalar(text: &str) -> CliResult<BigScalar> {
    rational(text).map(|q| BigScalar::from_rational(&q))
}

fn to_json<T: serde::Serialize>(v: &T) -> CliResult<Value> {
    serde_json::to_value(v).map_err(|e| CliError::Io(e.to_string()))
}

pub fn run(cli: &Cli) -> CliResult<Report> {
    let ctx = Ctx { cli };
    match &cli.command {
        Command::Construct(sys) => construct(&ctx, sys),
        Command::Stats { stat } => stats(&ctx, stat),
        Command::Phi { op } => phi_cmd(&ctx, op),
        Command::Ultra { op } => ultra(&ctx, op),
        Command::De { op } => de(&ctx, op),
        Command::Experiment(args) => experiments::run(&ctx, args),
    }
}

fn construct(ctx: &Ctx, arg: &SystemArg) -> CliResult<Report> {
    let system = ctx.system(arg)?;
    let level = system.refine_to(ctx.depth_or(4))?;
    let mut value = level.to_json();
    value["system"] = json!(system.label());
    value["total_bridge_length"] = real(&level.total_bridge_length());
    value["total_gap_length"] = real(&level.total_gap_length());
    let mut table = Table::new(&["kind", "left", "right", "depth"]);
    for b in &level.bridges {
        table.push(vec!["bridge".into(), b.left.to_decimal_string(), b.right.to_decimal_string(), b.depth.to_string()]);
    }
    for g in &level.gaps_all {
        table.push(vec!["gap".into(), g.left.to_decimal_string(), g.right.to_decimal_string(), g.depth.to_string()]);
    }
    Ok(Report::with_table(value, table))
}

fn stats(ctx: &Ctx, stat: &StatsCmd) -> CliResult<Report> {
    match stat {
        StatsCmd::Measure(arg) => {
            let system = ctx.system(arg)?;
            let est = lebesgue_measure_limit(&system, ctx.tol_or(1e-12))?;
            Ok(Report::json(json!({
                "operation": "measure",
                "system": system.label(),
                "estimate": num(&est.value),
                "error_bound": num(&est.error_bound),
                "terms_used": est.terms_used,
                "converged": est.converged,
            })))
        }
        StatsCmd::Dimension { system, min_depth } => {
            let system = ctx.system(system)?;
            let dim = box_dimension_estimate(&system, *min_depth, ctx.depth_or(20))?;
            let closed = hausdorff_dimension_closed_form(&system).ok();
            let mut table = Table::new(&["depth", "count", "length", "log_count", "log_inv_length"]);
            for r in &dim.rows {
                table.push(vec![
                    r.depth.to_string(),
                    r.count.clone(),
                    r.length.clone(),
                    r.log_count.to_string(),
                    r.log_inv_length.to_string(),
                ]);
            }
            Ok(Report::with_table(
                json!({
                    "operation": "box-dimension",
                    "system": system.label(),
                    "estimate": num(&dim.slope),
                    "residual": num(&dim.residual),
                    "closed_form": closed.as_ref().map(num),
                    "rows": to_json(&dim.rows)?,
                }),
                table,
            ))
        }
        StatsCmd::Thickness(arg) => {
            let system = ctx.system(arg)?;
            let depth = ctx.depth_or(20);
            let tau = thickness(&system, depth)?;
            let profile = thickness_profile(&system, depth)?;
            let diverges = thickness_diverges(&system, depth, DIVERGENCE_GROWTH)?;
            let mut table = Table::new(&["depth", "ratio"]);
            for (i, r) in profile.iter().enumerate() {
                table.push(vec![(i + 1).to_string(), r.to_exact_or_decimal()]);
            }
            Ok(Report::with_table(
                json!({
                    "operation": "thickness",
                    "system": system.label(),
                    "thickness": real(&tau),
                    "diverges": diverges,
                    "profile": profile.iter().map(real).collect::<Vec<_>>(),
                }),
                table,
            ))
        }
        StatsCmd::Fatness { system, from, to, allow_null_set } => {
            let system = ctx.system(system)?;
            if from > to {
                return Err(CliError::Usage("--from must not exceed --to".into()));
            }
            let depths: Vec<usize> = (*from..=*to).collect();
            let opts = FatnessOptions {
                allow_null_set: *allow_null_set,
                ..FatnessOptions::default()
            };
            let est = fatness_exponent(&system, &depths, &opts)?;
            let mut table = Table::new(&["epsilon", "mu", "excess"]);
            for r in &est.rows {
                table.push(vec![r.epsilon.clone(), r.mu.clone(), r.excess.clone()]);
            }
            Ok(Report::with_table(
                json!({
                    "operation": "fatness-exponent",
                    "system": system.label(),
                    "estimate": num(&est.beta_tilde),
                    "residual": num(&est.residual),
                    "rows": to_json(&est.rows)?,
                }),
                table,
            ))
        }
    }
}

fn phi_cmd(ctx: &Ctx, op: &PhiCmd) -> CliResult<Report> {
    match op {
        PhiCmd::Eval { system, x } => {
            let system = ctx.system(system)?;
            let v = phi(&system, &exact(x)?, ctx.depth_or(64))?;
            let mut value = to_json(&v)?;
            value["system"] = json!(system.label());
            value["x"] = json!(x);
            Ok(Report::json(value))
        }
        PhiCmd::Sample { system, resolution } => {
            let system = ctx.system(system)?;
            let rows = sample_staircase(&system, *resolution, ctx.depth_or(32))?;
            let mut table = Table::new(&["x", "phi", "exact", "uncertainty"]);
            for (x, v) in &rows {
                table.push(vec![x.to_string(), v.value.to_string(), v.exact.to_string(), v.uncertainty.to_string()]);
            }
            let points: Vec<Value> = rows
                .iter()
                .map(|(x, v)| json!({"x": x.to_string(), "phi": v.value.to_string(), "exact": v.exact}))
                .collect();
            Ok(Report::with_table(json!({"system": system.label(), "points": points}), table))
        }
        PhiCmd::Sweep { system, pairs } => {
            let system = ctx.system(system)?;
            let eval = PhiEvaluator::new(&system, ctx.depth_or(48))?;
            let mut rng = ChaCha8Rng::seed_from_u64(ctx.cli.seed);
            let mut violations = 0usize;
            for _ in 0..*pairs {
                let a = Rational::from((rng.gen_range(0..1_000_000i64), 1_000_000));
                let b = Rational::from((rng.gen_range(0..1_000_000i64), 1_000_000));
                let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
                let (pl, ph) = (eval.eval(&Real::Exact(lo))?, eval.eval(&Real::Exact(hi))?);
                if pl.value > Rational::from(&ph.value + &ph.uncertainty) {
                    violations += 1;
                }
            }
            Ok(Report::json(json!({
                "operation": "phi-monotonicity",
                "system": system.label(),
                "seed": ctx.cli.seed,
                "pairs": pairs,
                "violations": violations,
                "monotone": violations == 0,
            })))
        }
    }
}

fn word(text: &str, beta: &Rational) -> CliResult<WordRep> {
    let digits = text
        .chars()
        .map(|c| c.to_digit(10).map(|d| d as u8).ok_or_else(|| CliError::Usage(format!("bad digit {c:?} in word"))))
        .collect::<CliResult<Vec<u8>>>()?;
    Ok(WordRep::new(digits, beta.clone())?)
}

pub fn sequence_report(args: &SequenceArgs, tol: f64) -> CliResult<Report> {
    let opts = SequenceNormOptions {
        lambda: scalar(&args.lambda)?,
        n_max: args.n_max,
        tol,
        companion_n: args.companion_n,
    };
    let r = sequence_norm_limit(&scalar(&args.eps)?, &scalar(&args.l)?, &opts)?;
    let inputs = json!({"eps": args.eps, "l": args.l, "lambda": args.lambda});
    let mut value = valuation_json("sequence-norm-limit", inputs, &r.limit);
    value["companion"] = valuation_json("sequence-norm-companion", json!({"n": args.companion_n}), &r.companion);
    let table = trace_table(&r.limit);
    Ok(Report::with_table(value, table))
}

fn ultra(ctx: &Ctx, op: &UltraCmd) -> CliResult<Report> {
    match op {
        UltraCmd::Metric { x, y, beta, p } => {
            let beta = rational(beta)?;
            let d = natural_ultrametric(&word(x, &beta)?, &word(y, &beta)?, &scalar(p)?)?;
            Ok(Report::json(json!({"operation": "natural-ultrametric", "x": x, "y": y, "distance": num(&d)})))
        }
        UltraCmd::Encode { system, x } => {
            let system = ctx.system(system)?;
            let w = word_encode(&system, &exact(x)?, ctx.depth_or(8))?;
            let digits: String = w.digits.iter().map(|d| char::from(b'0' + d)).collect();
            Ok(Report::json(json!({
                "operation": "word-encode",
                "system": system.label(),
                "x": x,
                "word": digits,
                "reconstruction": w.reconstruct().to_string(),
            })))
        }
        UltraCmd::Valuation { a, base } => {
            let exponent = &BigScalar::from_int(1) + &scalar(a)?;
            let sched = ScaleSchedule::Squaring { base: scalar(base)? };
            let est = valuation(|e| Ok(e.pow(&exponent)), &sched, ctx.tol_or(1e-12))?;
            let value = valuation_json("valuation", json!({"xtilde": format!("eps^(1+{a})"), "base": base}), &est);
            Ok(Report::with_table(value, trace_table(&est)))
        }
        UltraCmd::Inversion { x, eps, lambda } => {
            let c = InfinitesimalContext {
                x: exact(x)?,
                epsilon: exact(eps)?,
                lambda: exact(lambda)?,
            };
            let xt = relative_infinitesimal(&c)?;
            Ok(Report::json(json!({
                "operation": "relative-infinitesimal",
                "inputs": {"x": x, "eps": eps, "lambda": lambda},
                "xtilde": real(&xt),
            })))
        }
        UltraCmd::Norm { x, n, m } => {
            let est = valued_norm_triadic(&exact(x)?, *n, *m)?;
            Ok(Report::json(valuation_json("valued-norm", json!({"x": x, "n": n, "m": m}), &est)))
        }
        UltraCmd::Sequence(args) => sequence_report(args, ctx.tol_or(1e-9)),
        UltraCmd::Exponent(arg) => {
            let system = ctx.system(arg)?;
            let depths: Vec<usize> = (2..=ctx.depth_or(24)).collect();
            let fit = valuated_exponent_estimate(&system, &depths)?;
            let mut value = to_json(&fit)?;
            value["operation"] = json!("valuated-exponent");
            value["system"] = json!(system.label());
            Ok(Report::json(value))
        }
        UltraCmd::Renormalised { xtilde, beta, n, v0 } => {
            let v = renormalised_valuation(&scalar(xtilde)?, &scalar(beta)?, *n, &scalar(v0)?)?;
            Ok(Report::json(json!({
                "operation": "renormalised-valuation",
                "inputs": {"xtilde": xtilde, "beta": beta, "n": n, "v0": v0},
                "estimate": num(&v),
            })))
        }
        UltraCmd::Endpoint { c, b, n } => {
            let k = endpoint_exponent(&scalar(c)?, &scalar(b)?, *n)?;
            Ok(Report::json(json!({
                "operation": "endpoint-exponent",
                "inputs": {"c": c, "b": b, "n": n},
                "k": num(&k),
            })))
        }
        UltraCmd::Measure { system, level } => {
            let system = ctx.system(system)?;
            let m = valued_measure_estimate(&system, *level)?;
            Ok(Report::json(json!({
                "operation": "valued-measure",
                "system": system.label(),
                "level": level,
                "estimate": num(&m),
            })))
        }
    }
}

pub fn hopping_table(eta: &str, n: u32) -> CliResult<(Vec<Value>, Table)> {
    let e = scalar(eta)?;
    let mut rows = Vec::new();
    let mut table = Table::new(&["eta", "n", "lhs", "rhs", "gap"]);
    for k in 0..=n {
        let h = hopping_identity(&e, k)?;
        table.push(vec![
            eta.to_string(),
            k.to_string(),
            h.lhs.with_prec(default_precision()).to_decimal_string(),
            h.rhs.with_prec(default_precision()).to_decimal_string(),
            h.gap.with_prec(default_precision()).to_decimal_string(),
        ]);
        rows.push(json!({"n": k, "lhs": num(&h.lhs), "rhs": num(&h.rhs), "gap": num(&h.gap)}));
    }
    Ok((rows, table))
}

fn de(ctx: &Ctx, op: &DeCmd) -> CliResult<Report> {
    match op {
        DeCmd::Products { eta, n } => {
            let e = scalar(eta)?;
            let mut table = Table::new(&["n", "product_minus", "product_plus"]);
            let mut rows = Vec::new();
            for k in 0..=*n {
                let (m, p) = (product_minus(&e, k)?, product_plus(&e, k)?);
                table.push(vec![k.to_string(), m.to_decimal_string(), p.to_decimal_string()]);
                rows.push(json!({"n": k, "product_minus": num(&m), "product_plus": num(&p)}));
            }
            let one = BigScalar::from_int(1);
            Ok(Report::with_table(
                json!({
                    "operation": "products",
                    "eta": eta,
                    "limit_minus": num(&(&one - &e)),
                    "limit_plus": num(&(&one + &e)),
                    "rows": rows,
                }),
                table,
            ))
        }
        DeCmd::Hopping { eta, n } => {
            let (rows, table) = hopping_table(eta, *n)?;
            Ok(Report::with_table(json!({"operation": "hopping-identity", "eta": eta, "rows": rows}), table))
        }
        DeCmd::Coverage { eta, n, delta } => {
            let e = scalar(eta)?;
            let mut table = Table::new(&["n", "additive", "multiplicative"]);
            let mut rows = Vec::new();
            for k in 1..=*n {
                let (a, m) = hopping_coverage(&e, k)?;
                table.push(vec![k.to_string(), a.to_decimal_digits(30), m.to_decimal_digits(30)]);
                rows.push(json!({"n": k, "additive": num(&a), "multiplicative": num(&m)}));
            }
            let steps = coverage_steps(e.to_f64(), *delta)?;
            Ok(Report::with_table(
                json!({"operation": "hopping-coverage", "eta": eta, "rows": rows, "steps": to_json(&steps)?}),
                table,
            ))
        }
        DeCmd::Lcf { system, x, eps } => {
            let system = ctx.system(system)?;
            let xs = x.iter().map(|t| scalar(t)).collect::<CliResult<Vec<_>>>()?;
            let es = eps.iter().map(|t| scalar(t)).collect::<CliResult<Vec<_>>>()?;
            let report = lcf_solution_check(&system, &xs, &es)?;
            let mut table = Table::new(&["x1", "x2", "delta_phi", "same_plateau", "de_residual"]);
            for p in &report.pairs {
                table.push(vec![
                    p.x1.clone(),
                    p.x2.clone(),
                    p.delta_phi.to_string(),
                    p.same_plateau.to_string(),
                    p.de_residual.clone(),
                ]);
            }
            Ok(Report::with_table(to_json(&report)?, table))
        }
    }
}
