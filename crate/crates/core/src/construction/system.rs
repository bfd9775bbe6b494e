use rug::ops::Pow;
use rug::{Integer, Rational};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{serde_rational, serde_rational_vec};

/// A sequence `a_1, a_2, ...` of exact fractions.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "kebab-case")]
pub enum SequenceSpec {
    /// `a_n = c * r^n`.
    Geometric {
        #[serde(with = "serde_rational")]
        c: Rational,
        #[serde(with = "serde_rational")]
        r: Rational,
    },
    /// `a_n = c / (n + shift)^2`.
    InverseSquare {
        #[serde(with = "serde_rational")]
        c: Rational,
        shift: i64,
    },
    /// `a_n = values[n - 1]`; only as many levels as listed.
    Explicit {
        #[serde(with = "serde_rational_vec")]
        values: Vec<Rational>,
    },
}

impl SequenceSpec {
    /// The `n`-th term, `n >= 1`.
    pub fn term(&self, n: usize) -> Result<Rational> {
        if n == 0 {
            return Err(Error::domain("sequence terms are indexed from 1"));
        }
        match self {
            SequenceSpec::Geometric { c, r } => {
                let exp = u32::try_from(n).map_err(|_| Error::DepthOverflow(format!("index {n}")))?;
                Ok(c * Rational::from(r.pow(exp)))
            }
            SequenceSpec::InverseSquare { c, shift } => {
                let m = Integer::from(n) + *shift;
                if m == 0 {
                    return Err(Error::InvalidSystem(format!("inverse-square term {n} divides by zero")));
                }
                Ok(c / Rational::from(m.square()))
            }
            SequenceSpec::Explicit { values } => values.get(n - 1).cloned().ok_or_else(|| {
                Error::InvalidSystem(format!("explicit schedule has only {} terms, level {n} requested", values.len()))
            }),
        }
    }

    /// Number of available terms, `None` when unbounded.
    pub fn len(&self) -> Option<usize> {
        match self {
            SequenceSpec::Explicit { values } => Some(values.len()),
            _ => None,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == Some(0)
    }
}

/// A rule producing level `n + 1` of a defining sequence from level `n`.
///
/// All kinds are homogeneous: every bridge of a level has the same length and
/// is split the same way.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum CantorSystem {
    /// Delete the open middle fraction `alpha` of every bridge.
    MiddleAlpha {
        #[serde(with = "serde_rational")]
        alpha: Rational,
    },
    /// Split every bridge into `p` children of relative length `beta` separated
    /// by `q = p - 1` gaps of relative length `alpha`.
    MultiBranch {
        p: u32,
        q: u32,
        #[serde(with = "serde_rational")]
        alpha: Rational,
        #[serde(with = "serde_rational")]
        beta: Rational,
    },
    /// At level `n` delete the middle fraction `alpha_n` of every bridge.
    VariableFraction { alpha: SequenceSpec },
    /// At level `n` delete a centred gap of absolute length `g_n` from every bridge.
    ExplicitGapSchedule { gaps: SequenceSpec },
    /// Triadic family with fluctuating scale factors `alpha_n = q^-n`.
    ///
    /// Level `k >= 2` deletes `2^(k-1)` gaps of length
    /// `3^(-k (1 + alpha_(k-1)))` for even `k` and `3^(-k (1 - alpha_(k-1)))`
    /// for odd `k`. The level-1 gap absorbs the remainder so that the total
    /// deleted length is exactly one.
    FluctuatingFamily { q: u32 },
}

impl CantorSystem {
    pub fn middle_alpha(alpha: Rational) -> Result<Self> {
        let s = CantorSystem::MiddleAlpha { alpha };
        s.validate()?;
        Ok(s)
    }

    pub fn multi_branch(p: u32, q: u32, alpha: Rational, beta: Rational) -> Result<Self> {
        let s = CantorSystem::MultiBranch { p, q, alpha, beta };
        s.validate()?;
        Ok(s)
    }

    pub fn variable_fraction(alpha: SequenceSpec) -> Result<Self> {
        let s = CantorSystem::VariableFraction { alpha };
        s.validate()?;
        Ok(s)
    }

    pub fn explicit_gap_schedule(gaps: SequenceSpec) -> Result<Self> {
        let s = CantorSystem::ExplicitGapSchedule { gaps };
        s.validate()?;
        Ok(s)
    }

    /// The middle-thirds set.
    pub fn middle_third() -> Self {
        CantorSystem::MiddleAlpha {
            alpha: Rational::from((1, 3)),
        }
    }

    /// Checks the closed-form invariants. Sequence terms are checked lazily as
    /// levels are generated.
    pub fn validate(&self) -> Result<()> {
        let zero = Rational::new();
        let one = Rational::from(1);
        match self {
            CantorSystem::MiddleAlpha { alpha } => {
                if *alpha <= zero || *alpha >= one {
                    return Err(Error::InvalidSystem(format!("middle fraction {alpha} not in (0, 1)")));
                }
            }
            CantorSystem::MultiBranch { p, q, alpha, beta } => {
                if *p < 2 {
                    return Err(Error::InvalidSystem(format!("branching p = {p} must be at least 2")));
                }
                if *q != p - 1 {
                    return Err(Error::InvalidSystem(format!(
                        "q = {q} gaps cannot separate p = {p} children; need q = p - 1"
                    )));
                }
                let p_r = Rational::from(*p);
                if *alpha <= zero || *beta <= zero || Rational::from(beta * &p_r) >= one {
                    return Err(Error::InvalidSystem(format!("need alpha > 0 and beta in (0, 1/{p})")));
                }
                let total = (alpha * Rational::from(*q)) + Rational::from(beta * &p_r);
                if total != one {
                    return Err(Error::InvalidSystem(format!("q alpha + p beta = {total}, not 1")));
                }
            }
            CantorSystem::VariableFraction { alpha } => {
                if alpha.len() == Some(0) {
                    return Err(Error::InvalidSystem("empty fraction schedule".into()));
                }
                check_fraction(&alpha.term(1)?, 1)?;
            }
            CantorSystem::ExplicitGapSchedule { gaps } => {
                if gaps.len() == Some(0) {
                    return Err(Error::InvalidSystem("empty gap schedule".into()));
                }
                let g1 = gaps.term(1)?;
                if g1 <= zero || g1 >= one {
                    return Err(Error::InvalidSystem(format!("first gap {g1} not in (0, 1)")));
                }
            }
            CantorSystem::FluctuatingFamily { q } => {
                if *q < 2 {
                    return Err(Error::domain(format!("fluctuating family needs q >= 2, got {q}")));
                }
            }
        }
        Ok(())
    }

    /// Number of children per bridge.
    pub fn branching(&self) -> u32 {
        match self {
            CantorSystem::MultiBranch { p, .. } => *p,
            _ => 2,
        }
    }

    pub fn is_binary(&self) -> bool {
        self.branching() == 2
    }

    /// Dominant per-level contraction, used as the base of fattening scales.
    pub fn scale_factor(&self) -> Rational {
        match self {
            CantorSystem::MiddleAlpha { alpha } => (Rational::from(1) - alpha.clone()) / 2,
            CantorSystem::MultiBranch { beta, .. } => beta.clone(),
            CantorSystem::ExplicitGapSchedule {
                gaps: SequenceSpec::Geometric { r, .. },
            } => r.clone(),
            CantorSystem::ExplicitGapSchedule { .. } | CantorSystem::VariableFraction { .. } => Rational::from((1, 2)),
            CantorSystem::FluctuatingFamily { .. } => Rational::from((1, 3)),
        }
    }

    /// Short human-readable label.
    pub fn label(&self) -> String {
        match self {
            CantorSystem::MiddleAlpha { alpha } => format!("middle-alpha:{alpha}"),
            CantorSystem::MultiBranch { p, q, alpha, beta } => format!("multi:{p},{q},{alpha},{beta}"),
            CantorSystem::VariableFraction { alpha } => format!("varfrac:{}", spec_label(alpha)),
            CantorSystem::ExplicitGapSchedule { gaps } => format!("gaps:{}", spec_label(gaps)),
            CantorSystem::FluctuatingFamily { q } => format!("fluct:{q}"),
        }
    }
}

fn spec_label(spec: &SequenceSpec) -> String {
    match spec {
        SequenceSpec::Geometric { c, r } => format!("geom,c={c},r={r}"),
        SequenceSpec::InverseSquare { c, shift } => format!("invsq,c={c},shift={shift}"),
        SequenceSpec::Explicit { values } => {
            let v: Vec<String> = values.iter().map(|v| v.to_string()).collect();
            format!("list,{}", v.join(";"))
        }
    }
}

pub(crate) fn check_fraction(alpha: &Rational, n: usize) -> Result<()> {
    if *alpha <= 0 || *alpha >= 1 {
        return Err(Error::InvalidSystem(format!("fraction alpha_{n} = {alpha} not in (0, 1)")));
    }
    Ok(())
}

/// Fat set that removes a centred interval of length `delta / 3^n` from each of
/// the `2^(n-1)` components at level `n >= 1`, deleting `delta` in total.
pub fn example2_system(delta: Rational) -> Result<CantorSystem> {
    if delta <= 0 || delta >= 1 {
        return Err(Error::domain(format!("delta = {delta} not in (0, 1)")));
    }
    CantorSystem::explicit_gap_schedule(SequenceSpec::Geometric {
        c: delta,
        r: Rational::from((1, 3)),
    })
}

/// The fluctuating triadic family with `alpha_n = q^-n`.
pub fn fluctuating_family(q: u32) -> Result<CantorSystem> {
    let s = CantorSystem::FluctuatingFamily { q };
    s.validate()?;
    Ok(s)
}
