use std::process::ExitCode;
use std::time::{Duration, Instant};

use cantorlab::cantor_function::{phi_increment_check, PhiEvaluator};
use cantorlab::construction::{example2_system, fluctuating_family, CantorSystem, SequenceSpec};
use cantorlab::numerics::{BigScalar, LimitOptions, Rational, Real};
use cantorlab::scale_free_de::hopping_identity;
use cantorlab::set_statistics::{
    box_dimension_estimate, fatness_exponent, lebesgue_measure_limit_with, thickness, thickness_diverges,
    FatnessOptions, DIVERGENCE_GROWTH,
};
use cantorlab::ultrametrics::{
    growth_of_measure_demo, inversion, natural_ultrametric, sequence_norm_limit, valuated_exponent_estimate,
    valued_measure_estimate, SequenceNormOptions, WordRep,
};
use cantorlab::Result;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn log3_2() -> f64 {
    2f64.ln() / 3f64.ln()
}

fn q(n: i64, d: i64) -> Rational {
    Rational::from((n, d))
}

fn s(v: f64) -> BigScalar {
    BigScalar::from_f64(v)
}

fn best_value(r: Result<cantorlab::numerics::LimitEstimate>) -> Result<BigScalar> {
    match r {
        Ok(e) => Ok(e.value),
        Err(e) => match e.best_estimate() {
            Some(b) => Ok(b.value.clone()),
            None => Err(e),
        },
    }
}

type Check = Result<std::result::Result<String, String>>;

type Criterion = (&'static str, &'static str, fn() -> Check, u64);

fn verdict(ok: bool, detail: String) -> std::result::Result<String, String> {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn c1() -> Check {
    let third = CantorSystem::middle_third();
    let tau = thickness(&third, 20)?;
    let dim = box_dimension_estimate(&third, 5, 20)?.slope.to_f64();
    let mut mu_ok = true;
    for level in 1..=12 {
        mu_ok &= valued_measure_estimate(&third, level)? == BigScalar::from_int(1);
    }
    let ok = tau == Real::one() && tau.is_exact() && (dim - log3_2()).abs() < 0.01 && mu_ok;
    Ok(verdict(ok, format!("thickness {tau}, box dimension {dim:.6}, valued measure 1 at levels 1-12: {mu_ok}")))
}

fn c2() -> Check {
    let fat = example2_system(q(1, 2))?;
    let m = best_value(lebesgue_measure_limit_with(&fat, &LimitOptions::aitken(1e-12, 31)))?.to_f64();
    let diverges = thickness_diverges(&fat, 30, DIVERGENCE_GROWTH)?;
    let ok = (m - 0.5).abs() < 1e-6 && diverges;
    Ok(verdict(ok, format!("measure {m:.12} by depth 30, thickness diverges: {diverges}")))
}

fn c3() -> Check {
    let sys = CantorSystem::variable_fraction(SequenceSpec::InverseSquare { c: q(1, 1), shift: 2 })?;
    let mut oracle = Rational::from(1);
    for i in 1..=200i64 {
        oracle *= Rational::from(1) - Rational::from((1, (i + 2) * (i + 2)));
    }
    let est = best_value(lebesgue_measure_limit_with(&sys, &LimitOptions::plain(1e-8, 201)))?;
    let diff = (&est - &BigScalar::from_rational(&oracle)).abs().to_f64();
    Ok(verdict(diff < 1e-8, format!("measure at depth 200 {:.12}, oracle difference {diff:.3e}", est.to_f64())))
}

fn c4() -> Check {
    let opts = SequenceNormOptions::default();
    let mut worst = 0f64;
    let mut worst_companion = 0f64;
    for eps in [0.1, 0.3, 0.5, 0.7, 0.9] {
        for l in [0.2, 0.4, 0.6, 0.8] {
            let r = sequence_norm_limit(&s(eps), &s(l), &opts)?;
            worst = worst.max((r.limit.value.to_f64() - l).abs());
            worst_companion = worst_companion.max(r.companion.value.abs().to_f64());
        }
    }
    let ok = worst < 1e-6 && worst_companion < 1e-6;
    Ok(verdict(ok, format!("max |limit - l| {worst:.3e}, max |companion| {worst_companion:.3e}")))
}

fn c5() -> Check {
    let mut ok = true;
    let mut detail = Vec::new();
    for eta in [0.1, 0.5, 0.9] {
        let gaps: Vec<BigScalar> = (0..=11).map(|n| hopping_identity(&s(eta), n).map(|h| h.gap)).collect::<Result<_>>()?;
        ok &= gaps[10] < s(1e-20);
        for n in 2..11 {
            let prec = gaps[n + 1].prec();
            ok &= gaps[n + 1] < gaps[n].with_prec(prec).pow(&BigScalar::from_f64_prec(1.9, prec));
        }
        detail.push(format!("eta {eta}: gap(10) {}", gaps[10].to_decimal_digits(4)));
    }
    Ok(verdict(ok, detail.join(", ")))
}

fn c6() -> Check {
    let mut ok = true;
    let mut detail = Vec::new();
    let depths: Vec<usize> = (2..=24).collect();
    for (qv, rho_want) in [(3u32, 1.0), (9, 2.0)] {
        let sys = fluctuating_family(qv)?;
        let dim = box_dimension_estimate(&sys, 10, 24)?.slope.to_f64();
        let tau = thickness(&sys, 24)?.to_f64();
        let fit = valuated_exponent_estimate(&sys, &depths)?;
        let rho = fit.rho.to_f64();
        let deleted: f64 = sys.profile_to(24)?.iter().map(|p| p.total_gap_length().to_f64()).sum();
        ok &= (dim - log3_2()).abs() < 0.02
            && (tau - 1.0).abs() < 0.05
            && (rho - rho_want).abs() < 1e-6
            && fit.residual.to_f64() < 1e-6
            && (deleted - 1.0).abs() < 1e-3;
        detail.push(format!(
            "q {qv}: dim {dim:.4}, thickness {tau:.4}, rho {rho:.6} (residual {:.1e}), deleted {deleted:.6}",
            fit.residual.to_f64()
        ));
    }
    Ok(verdict(ok, detail.join("; ")))
}

fn c7() -> Check {
    let fat = example2_system(q(1, 2))?;
    let depths: Vec<usize> = (8..=20).collect();
    let est = fatness_exponent(&fat, &depths, &FatnessOptions::default())?;
    let b = est.beta_tilde.to_f64();
    let oracle = 1.0 - log3_2();
    Ok(verdict((b - oracle).abs() < 0.05, format!("fatness exponent {b:.4}, oracle {oracle:.4}")))
}

fn c8() -> Check {
    let fat = example2_system(q(1, 2))?;
    let v = growth_of_measure_demo(&q(1, 3), &fat, 1024, 1e-9)?;
    let val = v.value.to_f64();
    Ok(verdict((val - 0.5).abs() < 1e-3, format!("valuation limit {val:.9} after {} scales", v.terms_used)))
}

fn c9() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(20_241_014);
    let third = q(1, 3);
    let p = BigScalar::from_int(2);

    // Ultrametric axioms over every word triple of each length.
    let mut axioms = true;
    for len in 1..=8usize {
        let words: Vec<WordRep> = (0..1u32 << len)
            .map(|bits| WordRep::new((0..len).map(|i| ((bits >> i) & 1) as u8).collect(), third.clone()))
            .collect::<Result<_>>()?;
        let count = words.len();
        let mut table = vec![0f64; count * count];
        for i in 0..count {
            for j in 0..count {
                let d = natural_ultrametric(&words[i], &words[j], &p)?;
                table[i * count + j] = d.to_f64();
            }
        }
        for i in 0..count {
            axioms &= table[i * count + i] == 0.0;
            for j in 0..count {
                let d = table[i * count + j];
                axioms &= d == table[j * count + i] && (d > 0.0) == (i != j);
                for k in 0..count {
                    axioms &= table[i * count + k] <= d.max(table[j * count + k]);
                }
            }
        }
    }

    // Monotonicity of the Cantor function.
    let phi_eval = PhiEvaluator::new(&CantorSystem::middle_third(), 48)?;
    let mut monotone = true;
    for _ in 0..10_000 {
        let a = Rational::from((rng.gen_range(0..1_000_000i64), 1_000_000));
        let b = Rational::from((rng.gen_range(0..1_000_000i64), 1_000_000));
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        let (pl, ph) = (phi_eval.eval(&Real::Exact(lo))?, phi_eval.eval(&Real::Exact(hi))?);
        monotone &= pl.value <= Rational::from(&ph.value + &ph.uncertainty);
    }

    // Increment identity on three kinds of systems.
    let kinds = [
        CantorSystem::middle_third(),
        example2_system(q(1, 2))?,
        CantorSystem::variable_fraction(SequenceSpec::InverseSquare { c: q(1, 1), shift: 2 })?,
    ];
    let mut increments = true;
    for sys in &kinds {
        for depth in 1..=10 {
            increments &= phi_increment_check(sys, depth)?;
        }
    }

    // Inversion involution on exact triples.
    let mut involution = true;
    for _ in 0..1_000 {
        let x = Real::Exact(Rational::from((rng.gen_range(1..10_000i64), rng.gen_range(1..10_000i64))));
        let e = Real::Exact(Rational::from((rng.gen_range(1..10_000i64), rng.gen_range(1..10_000i64))));
        let l = Real::Exact(Rational::from((rng.gen_range(1..10_000i64), 10_000)));
        let back = inversion(&inversion(&x, &e, &l)?, &e, &l)?;
        involution &= back.is_exact() && back == x;
    }

    // Conservation of length at every level.
    let all_kinds = [
        CantorSystem::middle_third(),
        CantorSystem::middle_alpha(q(1, 2))?,
        CantorSystem::multi_branch(3, 2, q(1, 5), q(1, 5))?,
        CantorSystem::variable_fraction(SequenceSpec::InverseSquare { c: q(1, 1), shift: 2 })?,
        example2_system(q(1, 2))?,
        fluctuating_family(3)?,
    ];
    let mut conservation = true;
    for sys in &all_kinds {
        for depth in 0..=10 {
            let level = sys.refine_to(depth)?;
            let total = level.total_bridge_length() + level.total_gap_length();
            conservation &= if total.is_exact() {
                total == Real::one()
            } else {
                (total - Real::one()).abs().to_f64() < 1e-60
            };
        }
    }

    let ok = axioms && monotone && increments && involution && conservation;
    Ok(verdict(
        ok,
        format!(
            "axioms {axioms}, monotone {monotone}, increments {increments}, involution {involution}, conservation {conservation}"
        ),
    ))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("C1", "middle-third invariants", c1, 5),
        ("C2", "example 2 fat set", c2, 10),
        ("C3", "inverse-square set measure", c3, 1),
        ("C4", "sequence norm grid", c4, 5),
        ("C5", "hopping identity", c5, 1),
        ("C6", "fluctuating family separation", c6, 60),
        ("C7", "fatness exponent", c7, 10),
        ("C8", "growth of measure", c8, 10),
        ("C9", "property suites", c9, 120),
    ];
    let start = Instant::now();
    let mut failures = 0;
    for (id, name, check, limit) in criteria {
        let t = Instant::now();
        let result = check();
        let elapsed = t.elapsed();
        let in_time = elapsed < Duration::from_secs(limit);
        let (pass, detail) = match result {
            Ok(Ok(d)) => (in_time, d),
            Ok(Err(d)) => (false, d),
            Err(e) => (false, format!("error: {e}")),
        };
        if !pass {
            failures += 1;
        }
        println!(
            "[{}] {id} {name}: {detail} ({:.2}s, limit {limit}s)",
            if pass { "PASS" } else { "FAIL" },
            elapsed.as_secs_f64()
        );
    }
    let total = start.elapsed();
    if total >= Duration::from_secs(120) {
        failures += 1;
        println!("[FAIL] total runtime {:.2}s exceeds 120s", total.as_secs_f64());
    }
    println!("{} of 9 criteria passed in {:.2}s", 9 - failures.min(9), total.as_secs_f64());
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
