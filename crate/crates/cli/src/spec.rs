//! `kind:param[,param]` system specifications.

use std::path::Path;

use cantorlab::construction::{example2_system, fluctuating_family, CantorSystem, SequenceSpec};
use cantorlab::numerics::{parse_rational, Rational};

use crate::CliError;

/// Parses a system specification such as `middle-alpha:1/3`, `example2:1/2`,
/// `fluct:3`, `multi:p=3,alpha=1/5,beta=1/5`, `varfrac:geom,c=1,r=1/4`,
/// `varfrac:invsq,c=1,shift=2` or `gaps:explicit,1/3,1/9`.
pub fn parse_system(text: &str) -> Result<CantorSystem, CliError> {
    let text = text.trim();
    let (kind, rest) = text.split_once(':').unwrap_or((text, ""));
    let params: Vec<&str> = rest.split(',').map(str::trim).filter(|p| !p.is_empty()).collect();
    let system = match kind {
        "middle-third" => CantorSystem::middle_third(),
        "middle-alpha" => CantorSystem::middle_alpha(rational(single(kind, &params)?)?)?,
        "example2" => example2_system(rational(single(kind, &params)?)?)?,
        "fluct" => {
            let q = single(kind, &params)?;
            fluctuating_family(q.parse().map_err(|_| usage(format!("fluct needs an integer q, got {q:?}")))?)?
        }
        "multi" => {
            let p: u32 = key(&params, "p")?
                .parse()
                .map_err(|_| usage("multi needs an integer p"))?;
            let alpha = rational(key(&params, "alpha")?)?;
            let beta = rational(key(&params, "beta")?)?;
            CantorSystem::multi_branch(p, p.saturating_sub(1), alpha, beta)?
        }
        "varfrac" => CantorSystem::variable_fraction(sequence(kind, &params)?)?,
        "gaps" => CantorSystem::explicit_gap_schedule(sequence(kind, &params)?)?,
        other => return Err(usage(format!("unknown system kind {other:?}"))),
    };
    Ok(system)
}

/// Reads a JSON system description (the serialized form of [`CantorSystem`]).
pub fn load_config(path: &Path) -> Result<CantorSystem, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| usage(format!("cannot read {}: {e}", path.display())))?;
    let system: CantorSystem =
        serde_json::from_str(&text).map_err(|e| usage(format!("invalid system config {}: {e}", path.display())))?;
    system.validate()?;
    Ok(system)
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn rational(text: &str) -> Result<Rational, CliError> {
    parse_rational(text).map_err(|e| usage(e.to_string()))
}

fn single<'a>(kind: &str, params: &[&'a str]) -> Result<&'a str, CliError> {
    match params {
        [one] => Ok(one),
        _ => Err(usage(format!("{kind} takes exactly one parameter"))),
    }
}

fn key<'a>(params: &[&'a str], name: &str) -> Result<&'a str, CliError> {
    params
        .iter()
        .find_map(|p| p.strip_prefix(name).and_then(|r| r.strip_prefix('=')))
        .ok_or_else(|| usage(format!("missing parameter {name}=")))
}

fn sequence(kind: &str, params: &[&str]) -> Result<SequenceSpec, CliError> {
    let (rule, args) = params
        .split_first()
        .ok_or_else(|| usage(format!("{kind} needs a rule: geom, invsq or explicit")))?;
    match *rule {
        "geom" => Ok(SequenceSpec::Geometric {
            c: rational(key(args, "c")?)?,
            r: rational(key(args, "r")?)?,
        }),
        "invsq" => Ok(SequenceSpec::InverseSquare {
            c: rational(key(args, "c")?)?,
            shift: key(args, "shift")?
                .parse()
                .map_err(|_| usage("invsq needs an integer shift"))?,
        }),
        "explicit" => Ok(SequenceSpec::Explicit {
            values: args.iter().map(|a| rational(a)).collect::<Result<_, _>>()?,
        }),
        other => Err(usage(format!("unknown sequence rule {other:?}"))),
    }
}
