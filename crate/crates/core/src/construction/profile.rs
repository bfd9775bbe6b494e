use rug::ops::Pow;
use rug::{Integer, Rational};

use super::system::{check_fraction, CantorSystem};
use crate::error::{Error, Result};
use crate::numerics::{default_precision, BigScalar, Real};

/// Summary of one homogeneous refinement level.
#[derive(Clone, Debug)]
pub struct LevelProfile {
    pub depth: usize,
    pub bridge_count: Integer,
    /// Common length of every bridge at this depth.
    pub bridge_length: Real,
    /// Number of gaps created at this depth (zero at depth 0).
    pub gap_count: Integer,
    /// Common length of the gaps created at this depth.
    pub gap_length: Real,
}

impl LevelProfile {
    pub fn total_bridge_length(&self) -> Real {
        Real::from(self.bridge_count.clone()) * &self.bridge_length
    }

    pub fn total_gap_length(&self) -> Real {
        Real::from(self.gap_count.clone()) * &self.gap_length
    }

    /// Child bridge length over the gap created next to it, `None` at depth 0.
    pub fn child_to_gap_ratio(&self) -> Option<Real> {
        (self.depth > 0).then(|| &self.bridge_length / &self.gap_length)
    }
}

/// Unbounded stream of level profiles starting at depth 0.
pub struct Profiles<'a> {
    system: &'a CantorSystem,
    current: Option<LevelProfile>,
    fluct: Option<Fluct>,
    done: bool,
}

struct Fluct {
    q: u32,
    prec: u32,
    g1: BigScalar,
}

impl CantorSystem {
    /// Streams per-level summaries without materializing any bridge.
    pub fn profiles(&self) -> Result<Profiles<'_>> {
        self.validate()?;
        let fluct = match self {
            CantorSystem::FluctuatingFamily { q } => Some(Fluct::new(*q)?),
            _ => None,
        };
        Ok(Profiles {
            system: self,
            current: None,
            fluct,
            done: false,
        })
    }

    /// Profiles for depths `0..=n`.
    pub fn profile_to(&self, n: usize) -> Result<Vec<LevelProfile>> {
        self.profiles()?.take(n + 1).collect()
    }

    /// Profile of a single depth.
    pub fn profile_at(&self, n: usize) -> Result<LevelProfile> {
        self.profiles()?
            .nth(n)
            .unwrap_or_else(|| Err(Error::DepthOverflow(format!("depth {n} unavailable"))))
    }
}

impl Fluct {
    fn new(q: u32) -> Result<Self> {
        let prec = default_precision() + 32;
        // g_1 = 1 - sum_{k>=2} 2^(k-1) g_k, summed until terms drop below 2^-(prec+16).
        let threshold = BigScalar::from_int_prec(2, prec).powi(-(i64::from(prec) + 16));
        let mut tail = BigScalar::zero(prec);
        let mut weight = BigScalar::one(prec);
        for k in 2usize.. {
            weight = &weight * &BigScalar::from_int_prec(2, prec);
            let term = &weight * &fluct_gap(q, k, prec);
            tail = &tail + &term;
            if term < threshold {
                break;
            }
        }
        let g1 = BigScalar::one(prec) - tail;
        if !g1.is_positive() {
            return Err(Error::InvalidSystem(format!("fluctuating family q = {q}: later gaps exceed the unit interval")));
        }
        Ok(Fluct { q, prec, g1 })
    }

    fn gap(&self, k: usize) -> BigScalar {
        if k == 1 {
            self.g1.clone()
        } else {
            fluct_gap(self.q, k, self.prec)
        }
    }
}

/// `3^(-k (1 + sigma alpha_(k-1)))` with `sigma = +1` for even `k`, `-1` for odd `k`.
fn fluct_gap(q: u32, k: usize, prec: u32) -> BigScalar {
    let alpha = Rational::from((1, Integer::from(q).pow(k as u32 - 1)));
    let factor = if k.is_multiple_of(2) { Rational::from(1) + alpha } else { Rational::from(1) - alpha };
    let exponent = -(factor * Rational::from(k));
    BigScalar::from_int_prec(3, prec).pow(&BigScalar::from_rational_prec(&exponent, prec))
}

impl Profiles<'_> {
    fn step(&mut self, prev: &LevelProfile) -> Result<LevelProfile> {
        let k = prev.depth + 1;
        let host = &prev.bridge_length;
        let b = self.system.branching();
        let (child, gap) = match self.system {
            CantorSystem::MiddleAlpha { alpha } => {
                let beta = (Rational::from(1) - alpha.clone()) / 2;
                (host * &Real::Exact(beta), host * &Real::Exact(alpha.clone()))
            }
            CantorSystem::MultiBranch { alpha, beta, .. } => {
                (host * &Real::Exact(beta.clone()), host * &Real::Exact(alpha.clone()))
            }
            CantorSystem::VariableFraction { alpha } => {
                let a = alpha.term(k)?;
                check_fraction(&a, k)?;
                let gap = host * &Real::Exact(a);
                ((host - &gap) / Real::from(2), gap)
            }
            CantorSystem::ExplicitGapSchedule { gaps } => {
                let gap = Real::Exact(gaps.term(k)?);
                guard_gap(&gap, host, k)?;
                ((host - &gap) / Real::from(2), gap)
            }
            CantorSystem::FluctuatingFamily { .. } => {
                let fl = self.fluct.as_ref().expect("fluctuating state");
                let gap = Real::Approx(fl.gap(k));
                guard_gap(&gap, host, k)?;
                ((host - &gap) / Real::from(2), gap)
            }
        };
        Ok(LevelProfile {
            depth: k,
            bridge_count: Integer::from(&prev.bridge_count * b),
            bridge_length: child,
            gap_count: Integer::from(&prev.bridge_count * (b - 1)),
            gap_length: gap,
        })
    }
}

fn guard_gap(gap: &Real, host: &Real, k: usize) -> Result<()> {
    if !gap.is_positive() {
        return Err(Error::InvalidSystem(format!("gap at level {k} has non-positive length {gap}")));
    }
    if gap >= host {
        return Err(Error::InvalidSystem(format!(
            "gap at level {k} ({}) does not fit inside its host bridge ({})",
            gap.to_scalar().to_decimal_digits(12),
            host.to_scalar().to_decimal_digits(12)
        )));
    }
    Ok(())
}

impl Iterator for Profiles<'_> {
    type Item = Result<LevelProfile>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.done {
            return None;
        }
        let next = match self.current.take() {
            None => Ok(LevelProfile {
                depth: 0,
                bridge_count: Integer::from(1),
                bridge_length: match &self.fluct {
                    Some(fl) => Real::Approx(BigScalar::one(fl.prec)),
                    None => Real::one(),
                },
                gap_count: Integer::new(),
                gap_length: Real::zero(),
            }),
            Some(prev) => {
                let r = self.step(&prev);
                self.current = Some(prev);
                r
            }
        };
        match next {
            Ok(p) => {
                self.current = Some(p.clone());
                Some(Ok(p))
            }
            Err(e) => {
                self.done = true;
                Some(Err(e))
            }
        }
    }
}
