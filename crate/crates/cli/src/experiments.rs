//! Named experiments.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use cantorlab::construction::{example2_system, fluctuating_family, CantorSystem, SequenceSpec};
use cantorlab::numerics::{LimitOptions, Rational};
use cantorlab::set_statistics::{
    box_dimension_estimate, fatness_exponent, lebesgue_measure_limit, lebesgue_measure_limit_with, thickness,
    thickness_diverges, thickness_profile, FatnessOptions, DIVERGENCE_GROWTH,
};
use cantorlab::ultrametrics::{growth_of_measure_demo, valuated_exponent_estimate};
use serde_json::{json, Map, Value};

use crate::args::{Experiment, ExperimentArgs, SequenceArgs};
use crate::commands::{hopping_table, rational, sequence_report, CliResult, Ctx};
use crate::output::{num, real, trace_table, valuation_json, Report, Table};
use crate::CliError;

pub fn run(ctx: &Ctx, args: &ExperimentArgs) -> CliResult<Report> {
    match args.experiment {
        Experiment::All => all(ctx, args),
        one => experiment(ctx, args, one),
    }
}

fn experiment(ctx: &Ctx, args: &ExperimentArgs, which: Experiment) -> CliResult<Report> {
    match which {
        Experiment::Example1 => example1(ctx),
        Experiment::Example2 => example2(ctx, args),
        Experiment::Example3 => {
            let seq = SequenceArgs {
                eps: args.eps.clone(),
                l: args.l.clone(),
                lambda: "0.9".into(),
                n_max: 1 << 20,
                companion_n: 10,
            };
            sequence_report(&seq, ctx.tol_or(1e-9))
        }
        Experiment::FluctFamily => fluct_family(ctx, args),
        Experiment::HoppingIdentity => hopping(ctx, args),
        Experiment::GrowthOfMeasure => growth(ctx, args),
        Experiment::FatnessExample2 => fatness(args),
        Experiment::RhoSeparation => rho_separation(ctx, args),
        Experiment::All => all(ctx, args),
    }
}

fn example1(ctx: &Ctx) -> CliResult<Report> {
    let system = CantorSystem::variable_fraction(SequenceSpec::InverseSquare {
        c: Rational::from(1),
        shift: 2,
    })?;
    let depth = ctx.depth_or(200);
    let partial = system.profile_at(depth)?.total_bridge_length();
    let mut oracle = Rational::from(1);
    for i in 1..=depth as i64 {
        oracle *= Rational::from(1) - Rational::from((1, (i + 2) * (i + 2)));
    }
    let limit = lebesgue_measure_limit(&system, ctx.tol_or(1e-6))?;
    let tail = match lebesgue_measure_limit_with(&system, &LimitOptions::plain(1e-8, depth + 1)) {
        Ok(e) => e.value,
        Err(e) => e.best_estimate().map(|b| b.value.clone()).ok_or(CliError::Core(e))?,
    };
    Ok(Report::json(json!({
        "experiment": "example1",
        "system": system.label(),
        "depth": depth,
        "measure_at_depth": real(&partial),
        "partial_product_oracle": oracle.to_string(),
        "plain_tail_estimate": num(&tail),
        "limit_estimate": num(&limit.value),
        "limit_error_bound": num(&limit.error_bound),
        "closed_form_limit": "2/3",
    })))
}

fn example2(ctx: &Ctx, args: &ExperimentArgs) -> CliResult<Report> {
    let delta = rational(&args.delta)?;
    let system = example2_system(delta.clone())?;
    let depth = ctx.depth_or(30);
    let measure = lebesgue_measure_limit_with(&system, &LimitOptions::aitken(ctx.tol_or(1e-12), depth + 1))?;
    let profile = thickness_profile(&system, depth)?;
    let diverges = thickness_diverges(&system, depth, DIVERGENCE_GROWTH)?;
    let mut table = Table::new(&["depth", "thickness_ratio"]);
    for (i, r) in profile.iter().enumerate() {
        table.push(vec![(i + 1).to_string(), r.to_exact_or_decimal()]);
    }
    Ok(Report::with_table(
        json!({
            "experiment": "example2",
            "system": system.label(),
            "delta": delta.to_string(),
            "measure": num(&measure.value),
            "measure_error_bound": num(&measure.error_bound),
            "expected_measure": (Rational::from(1) - delta).to_string(),
            "thickness_diverges": diverges,
            "thickness_profile": profile.iter().map(real).collect::<Vec<_>>(),
        }),
        table,
    ))
}

fn qs(args: &ExperimentArgs) -> Vec<u32> {
    if args.q.is_empty() {
        vec![3, 9]
    } else {
        args.q.clone()
    }
}

fn family_row(q: u32, depth: usize) -> CliResult<Value> {
    let system = fluctuating_family(q)?;
    let dim = box_dimension_estimate(&system, 10.min(depth.saturating_sub(2)), depth)?;
    let tau = thickness(&system, depth)?;
    let depths: Vec<usize> = (2..=depth).collect();
    let fit = valuated_exponent_estimate(&system, &depths)?;
    let deleted = system
        .profile_to(depth)?
        .iter()
        .fold(cantorlab::numerics::Real::zero(), |acc, p| acc + p.total_gap_length());
    Ok(json!({
        "q": q,
        "box_dimension": num(&dim.slope),
        "thickness": real(&tau),
        "rho": num(&fit.rho),
        "rho_residual": num(&fit.residual),
        "deleted_length": real(&deleted),
    }))
}

fn fluct_family(ctx: &Ctx, args: &ExperimentArgs) -> CliResult<Report> {
    let depth = ctx.depth_or(24);
    let rows = qs(args).into_iter().map(|q| family_row(q, depth)).collect::<CliResult<Vec<_>>>()?;
    Ok(Report::json(json!({"experiment": "fluct-family", "depth": depth, "systems": rows})))
}

fn rho_separation(ctx: &Ctx, args: &ExperimentArgs) -> CliResult<Report> {
    let depth = ctx.depth_or(24);
    let mut table = Table::new(&["q", "box_dimension", "rho"]);
    let mut rows = Vec::new();
    for q in qs(args) {
        let row = family_row(q, depth)?;
        table.push(vec![
            q.to_string(),
            row["box_dimension"].as_str().unwrap_or_default().to_string(),
            row["rho"].as_str().unwrap_or_default().to_string(),
        ]);
        rows.push(json!({"q": q, "box_dimension": row["box_dimension"], "rho": row["rho"]}));
    }
    Ok(Report::with_table(json!({"experiment": "rho-separation", "depth": depth, "systems": rows}), table))
}

fn hopping(ctx: &Ctx, args: &ExperimentArgs) -> CliResult<Report> {
    let etas = if args.eta.is_empty() {
        vec!["0.1".to_string(), "0.5".into(), "0.9".into()]
    } else {
        args.eta.clone()
    };
    let n = ctx.depth_or(10) as u32;
    let mut table = Table::default();
    let mut out = Vec::new();
    for eta in &etas {
        let (rows, t) = hopping_table(eta, n)?;
        table.header = t.header;
        table.rows.extend(t.rows);
        out.push(json!({"eta": eta, "rows": rows}));
    }
    Ok(Report::with_table(json!({"experiment": "hopping-identity", "n": n, "series": out}), table))
}

fn growth(ctx: &Ctx, args: &ExperimentArgs) -> CliResult<Report> {
    let delta = rational(&args.delta)?;
    let target = example2_system(delta.clone())?;
    let n_max = ctx.depth_or(1024);
    let est = growth_of_measure_demo(&Rational::from((1, 3)), &target, n_max, ctx.tol_or(1e-9))?;
    let inputs = json!({"alpha": "1/3", "target": target.label(), "n_max": n_max});
    let mut value = valuation_json("growth-of-measure", inputs, &est);
    value["experiment"] = json!("growth-of-measure");
    value["expected"] = json!((Rational::from(1) - delta).to_string());
    Ok(Report::with_table(value, trace_table(&est)))
}

fn fatness(args: &ExperimentArgs) -> CliResult<Report> {
    let system = example2_system(rational(&args.delta)?)?;
    let depths: Vec<usize> = (8..=20).collect();
    let est = fatness_exponent(&system, &depths, &FatnessOptions::default())?;
    let mut table = Table::new(&["epsilon", "mu", "excess"]);
    for r in &est.rows {
        table.push(vec![r.epsilon.clone(), r.mu.clone(), r.excess.clone()]);
    }
    let oracle = 1.0 - 2f64.ln() / 3f64.ln();
    Ok(Report::with_table(
        json!({
            "experiment": "fatness-example2",
            "system": system.label(),
            "estimate": num(&est.beta_tilde),
            "residual": num(&est.residual),
            "oracle": format!("{oracle:.6}"),
            "rows": serde_json::to_value(&est.rows).map_err(|e| CliError::Io(e.to_string()))?,
        }),
        table,
    ))
}

/// Runs every experiment on `--jobs` worker threads; failures are reported
/// per experiment and the largest exit code is returned.
fn all(ctx: &Ctx, args: &ExperimentArgs) -> CliResult<Report> {
    let jobs = ctx.cli.jobs.max(1);
    let next = AtomicUsize::new(0);
    let results: Mutex<Vec<Option<CliResult<Report>>>> = Mutex::new(Experiment::EACH.iter().map(|_| None).collect());
    std::thread::scope(|scope| {
        for _ in 0..jobs.min(Experiment::EACH.len()) {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                let Some(&which) = Experiment::EACH.get(i) else { break };
                let r = experiment(ctx, args, which);
                results.lock().expect("results lock")[i] = Some(r);
            });
        }
    });
    let mut map = Map::new();
    let mut status = 0u8;
    for (which, r) in Experiment::EACH.iter().zip(results.into_inner().expect("results lock")) {
        let value = match r.expect("every experiment ran") {
            Ok(rep) => rep.value,
            Err(e) => {
                eprintln!("error in {}: {e}", which.name());
                status = status.max(e.exit_code());
                json!({"error": e.to_string(), "exit_code": e.exit_code()})
            }
        };
        map.insert(which.name().to_string(), value);
    }
    Ok(Report::json(Value::Object(map)).with_status(status))
}
