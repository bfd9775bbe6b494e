//! The Cantor function of a binary defining sequence.

use rug::{Integer, Rational};
use serde::Serialize;

use crate::construction::{CantorSystem, LevelProfile};
use crate::error::{Error, Result};
use crate::numerics::Real;

/// A value of the Cantor function.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PhiValue {
    /// Plateau value when `exact`, otherwise the lower end of a dyadic bracket.
    #[serde(with = "crate::numerics::serde_rational")]
    pub value: Rational,
    /// True when `x` was resolved to a gap (endpoints included) or to 0 or 1.
    pub exact: bool,
    pub depth_used: usize,
    /// Width of the bracket containing the true value, zero when exact.
    #[serde(with = "crate::numerics::serde_rational")]
    pub uncertainty: Rational,
}

/// Cantor-function evaluator that reuses one set of level profiles.
pub struct PhiEvaluator {
    profiles: Vec<LevelProfile>,
}

impl PhiEvaluator {
    pub fn new(system: &CantorSystem, max_depth: usize) -> Result<Self> {
        if !system.is_binary() {
            return Err(Error::Unsupported(format!(
                "the Cantor function needs binary branching, {} has {}",
                system.label(),
                system.branching()
            )));
        }
        Ok(PhiEvaluator {
            profiles: system.profile_to(max_depth)?,
        })
    }

    pub fn max_depth(&self) -> usize {
        self.profiles.len() - 1
    }

    /// Descends the refinement tree: a hit on a depth-`n` gap returns the exact
    /// plateau value `(2i + 1) / 2^n`.
    pub fn eval(&self, x: &Real) -> Result<PhiValue> {
        if *x < Real::zero() || *x > Real::one() {
            return Err(Error::domain(format!("x = {x} not in [0, 1]")));
        }
        let exact = |value: Rational, depth_used| PhiValue {
            value,
            exact: true,
            depth_used,
            uncertainty: Rational::new(),
        };
        if x.is_zero() {
            return Ok(exact(Rational::new(), 0));
        }
        if *x == Real::one() {
            return Ok(exact(Rational::from(1), 0));
        }
        let mut left = Real::zero();
        let mut index = Integer::new();
        for p in &self.profiles[1..] {
            let gap_left = &left + &p.bridge_length;
            let gap_right = &gap_left + &p.gap_length;
            index <<= 1;
            if *x < gap_left {
                continue;
            }
            if *x <= gap_right {
                let num = Integer::from(&index + 1);
                return Ok(exact(Rational::from((num, Integer::from(1) << p.depth as u32)), p.depth));
            }
            index += 1;
            left = gap_right;
        }
        let n = self.max_depth();
        let unit = Rational::from((1, Integer::from(1) << n as u32));
        Ok(PhiValue {
            value: Rational::from(&unit * &Rational::from(index)),
            exact: false,
            depth_used: n,
            uncertainty: unit,
        })
    }
}

/// Cantor function of `system` at `x`, descending at most `max_depth` levels.
pub fn phi(system: &CantorSystem, x: &Real, max_depth: usize) -> Result<PhiValue> {
    PhiEvaluator::new(system, max_depth)?.eval(x)
}

/// Middle-thirds Cantor function from the first `digits` ternary digits of
/// `x`: read up to and including the first 1, map 2 to 1, read in binary.
pub fn phi_middle_third_digits(x: &Real, digits: usize) -> Result<Rational> {
    if *x < Real::zero() || *x > Real::one() {
        return Err(Error::domain(format!("x = {x} not in [0, 1]")));
    }
    if *x == Real::one() {
        return Ok(Rational::from(1));
    }
    let mut rest = x.clone();
    let mut out = Rational::new();
    let mut weight = Rational::from(1);
    for _ in 0..digits {
        let y = rest * Real::from(3);
        let d = match &y {
            Real::Exact(q) => q.clone().floor().numer().to_u32().unwrap_or(0),
            Real::Approx(f) => f.floor().to_f64() as u32,
        };
        rest = y - Real::from(i64::from(d));
        weight /= 2;
        match d {
            0 => {}
            1 => {
                out += &weight;
                break;
            }
            _ => out += &weight,
        }
    }
    Ok(out)
}

/// Checks `phi(b) - phi(a) = 2^-depth` on every bridge `[a, b]` of level `depth`.
pub fn phi_increment_check(system: &CantorSystem, depth: usize) -> Result<bool> {
    if depth == 0 {
        return Err(Error::domain("increment check needs depth >= 1"));
    }
    let level = system.refine_to(depth)?;
    let eval = PhiEvaluator::new(system, depth)?;
    let want = Rational::from((1, Integer::from(1) << depth as u32));
    for b in &level.bridges {
        let (pa, pb) = (eval.eval(&b.left)?, eval.eval(&b.right)?);
        if !(pa.exact && pb.exact) || Rational::from(&pb.value - &pa.value) != want {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `(x, phi(x))` on the grid `x = i / resolution`, `i = 0..=resolution`.
pub fn sample_staircase(system: &CantorSystem, resolution: u32, max_depth: usize) -> Result<Vec<(Rational, PhiValue)>> {
    if resolution == 0 {
        return Err(Error::domain("grid resolution must be positive"));
    }
    let eval = PhiEvaluator::new(system, max_depth)?;
    (0..=resolution)
        .map(|i| {
            let x = Rational::from((i, resolution));
            eval.eval(&Real::Exact(x.clone())).map(|v| (x, v))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construction::{example2_system, fluctuating_family};
    use proptest::prelude::*;

    fn r(n: i64, d: i64) -> Real {
        Real::ratio(n, d)
    }

    fn q(n: i64, d: i64) -> Rational {
        Rational::from((n, d))
    }

    #[test]
    fn endpoints_and_first_plateau() {
        let s = CantorSystem::middle_third();
        for (x, want) in [(r(0, 1), q(0, 1)), (r(1, 1), q(1, 1)), (r(1, 2), q(1, 2)), (r(1, 3), q(1, 2)), (r(2, 3), q(1, 2))] {
            let v = phi(&s, &x, 20).unwrap();
            assert!(v.exact, "{x}");
            assert_eq!(v.value, want, "{x}");
        }
        assert_eq!(phi(&s, &r(1, 2), 20).unwrap().depth_used, 1);
    }

    #[test]
    fn quarter_maps_to_a_third() {
        let s = CantorSystem::middle_third();
        let v = phi(&s, &r(1, 4), 30).unwrap();
        assert!(!v.exact);
        assert_eq!(v.uncertainty, Rational::from((1, Integer::from(1) << 30)));
        let diff = Rational::from(&v.value - &q(1, 3)).abs();
        assert!(diff <= v.uncertainty);
    }

    #[test]
    fn out_of_range_and_non_binary() {
        let s = CantorSystem::middle_third();
        assert!(matches!(phi(&s, &r(-1, 10), 5), Err(Error::Domain(_))));
        let m = CantorSystem::multi_branch(3, 2, q(1, 5), q(1, 5)).unwrap();
        assert!(matches!(phi(&m, &r(1, 2), 5), Err(Error::Unsupported(_))));
    }

    #[test]
    fn digit_rule_examples() {
        assert_eq!(phi_middle_third_digits(&r(2, 3), 10).unwrap(), q(1, 2));
        assert_eq!(phi_middle_third_digits(&r(1, 9), 10).unwrap(), q(1, 4));
        let v = phi_middle_third_digits(&r(1, 4), 40).unwrap();
        assert!(Rational::from(&v - &q(1, 3)).abs() < Rational::from((1, Integer::from(1) << 40)));
        assert!(phi_middle_third_digits(&r(3, 2), 10).is_err());
    }

    #[test]
    fn increments_on_three_kinds() {
        assert!(phi_increment_check(&CantorSystem::middle_third(), 3).unwrap());
        assert!(phi_increment_check(&example2_system(q(1, 2)).unwrap(), 4).unwrap());
        assert!(phi_increment_check(&fluctuating_family(3).unwrap(), 6).unwrap());
    }

    #[test]
    fn plateaus_are_constant_and_hit_every_dyadic() {
        let s = CantorSystem::middle_third();
        let level = s.refine_to(10).unwrap();
        let eval = PhiEvaluator::new(&s, 12).unwrap();
        let mut seen = std::collections::BTreeSet::new();
        for g in &level.gaps_all {
            let mid = (&g.left + &g.right) / Real::from(2);
            let (a, m, b) = (eval.eval(&g.left).unwrap(), eval.eval(&mid).unwrap(), eval.eval(&g.right).unwrap());
            assert!(a.exact && m.exact && b.exact);
            assert_eq!(a.value, m.value);
            assert_eq!(b.value, m.value);
            assert_eq!(m.depth_used, g.depth);
            seen.insert(m.value.clone());
        }
        for n in 1..=10u32 {
            for i in (1..(1i64 << n)).step_by(2) {
                assert!(seen.contains(&Rational::from((i, 1i64 << n))), "{i}/2^{n}");
            }
        }
    }

    #[test]
    fn staircase_grid() {
        let rows = sample_staircase(&CantorSystem::middle_third(), 6, 10).unwrap();
        assert_eq!(rows.len(), 7);
        assert_eq!(rows[3].1.value, q(1, 2));
        assert!(rows.windows(2).all(|w| w[0].1.value <= w[1].1.value));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]

        #[test]
        fn monotone_on_random_pairs(a in 0u64..=1_000_000, b in 0u64..=1_000_000) {
            let s = CantorSystem::middle_third();
            let (lo, hi) = (a.min(b), a.max(b));
            let x = Real::Exact(Rational::from((lo, 1_000_000u64)));
            let y = Real::Exact(Rational::from((hi, 1_000_000u64)));
            prop_assert!(phi(&s, &x, 24).unwrap().value <= phi(&s, &y, 24).unwrap().value);
        }

        #[test]
        fn digit_rule_agrees_with_descent(n in 0u64..=(1u64 << 40)) {
            let x = Real::Exact(Rational::from((n, 1u64 << 40)));
            let a = phi(&CantorSystem::middle_third(), &x, 40).unwrap().value;
            let b = phi_middle_third_digits(&x, 40).unwrap();
            prop_assert!(Rational::from(&a - &b).abs() <= Rational::from((1, Integer::from(1) << 40)));
        }
    }
}
