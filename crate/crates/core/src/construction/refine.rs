use std::cmp::Ordering;

use serde_json::{json, Value};

use super::profile::LevelProfile;
use super::system::CantorSystem;
use crate::error::{Error, Result};
use crate::numerics::Real;

/// Largest number of bridges a materialized level may hold.
pub const DEFAULT_BRIDGE_CAP: usize = 1 << 24;

/// A closed interval remaining at some depth.
#[derive(Clone, Debug, PartialEq)]
pub struct Bridge {
    pub left: Real,
    pub right: Real,
    pub depth: usize,
}

/// A deleted open interval and the depth at which it was removed.
#[derive(Clone, Debug, PartialEq)]
pub struct Gap {
    pub left: Real,
    pub right: Real,
    pub depth: usize,
}

impl Bridge {
    pub fn length(&self) -> Real {
        &self.right - &self.left
    }
}

impl Gap {
    pub fn length(&self) -> Real {
        &self.right - &self.left
    }
}

/// Bridges of one depth together with every gap removed up to that depth.
#[derive(Clone, Debug)]
pub struct RefinementLevel {
    pub depth: usize,
    pub bridges: Vec<Bridge>,
    /// Gaps of all depths `1..=depth`, sorted by position.
    pub gaps_all: Vec<Gap>,
}

/// Where a point sits relative to a refinement level.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Location {
    InBridge(usize),
    /// Index into [`RefinementLevel::gaps_all`]; gap endpoints count as inside.
    InGap(usize),
    Outside,
}

/// Splits `bridge` according to the next level's profile `step`.
pub fn split_bridge(bridge: &Bridge, step: &LevelProfile, branching: u32) -> (Vec<Bridge>, Vec<Gap>) {
    let child = &step.bridge_length;
    let gap = &step.gap_length;
    let mut bridges = Vec::with_capacity(branching as usize);
    let mut gaps = Vec::with_capacity(branching as usize - 1);
    let mut left = bridge.left.clone();
    for j in 0..branching {
        let last = j + 1 == branching;
        let right = if last { bridge.right.clone() } else { &left + child };
        bridges.push(Bridge {
            left: left.clone(),
            right: right.clone(),
            depth: step.depth,
        });
        if !last {
            // The next child starts exactly where this gap ends, rounding included.
            let gap_right = &right + gap;
            gaps.push(Gap {
                left: right,
                right: gap_right.clone(),
                depth: step.depth,
            });
            left = gap_right;
        }
    }
    (bridges, gaps)
}

impl CantorSystem {
    /// Materializes level `n` with the default bridge cap.
    pub fn refine_to(&self, n: usize) -> Result<RefinementLevel> {
        self.refine_to_capped(n, DEFAULT_BRIDGE_CAP)
    }

    /// Materializes level `n`, failing with [`Error::DepthOverflow`] when it needs
    /// more than `cap` bridges.
    pub fn refine_to_capped(&self, n: usize, cap: usize) -> Result<RefinementLevel> {
        let b = self.branching() as f64;
        if (n as f64) * b.log2() > (cap as f64).log2() + 1e-9 {
            return Err(Error::DepthOverflow(format!(
                "level {n} has {}^{n} bridges, above the cap of {cap}",
                self.branching()
            )));
        }
        let profiles = self.profile_to(n)?;
        let mut bridges = vec![Bridge {
            left: Real::zero(),
            right: profiles[0].bridge_length.clone(),
            depth: 0,
        }];
        let mut gaps_all = Vec::new();
        for step in &profiles[1..] {
            let mut next = Vec::with_capacity(bridges.len() * self.branching() as usize);
            for br in &bridges {
                let (children, gaps) = split_bridge(br, step, self.branching());
                next.extend(children);
                gaps_all.extend(gaps);
            }
            bridges = next;
        }
        gaps_all.sort_by(|a, b| a.left.partial_cmp(&b.left).unwrap_or(Ordering::Equal));
        Ok(RefinementLevel {
            depth: n,
            bridges,
            gaps_all,
        })
    }
}

impl RefinementLevel {
    /// Lengths of the gaps created exactly at `depth`, left to right.
    pub fn gap_lengths_at(&self, depth: usize) -> Result<Vec<Real>> {
        if depth > self.depth {
            return Err(Error::DepthOverflow(format!("depth {depth} beyond level {}", self.depth)));
        }
        Ok(self.gaps_all.iter().filter(|g| g.depth == depth).map(Gap::length).collect())
    }

    /// Binary search for `x` among gaps (closed) and then bridges.
    pub fn locate(&self, x: &Real) -> Location {
        if *x < Real::zero() || *x > Real::one() {
            return Location::Outside;
        }
        let gi = self.gaps_all.partition_point(|g| g.right < *x);
        if let Some(g) = self.gaps_all.get(gi) {
            if g.left <= *x {
                return Location::InGap(gi);
            }
        }
        let bi = self.bridges.partition_point(|b| b.right < *x);
        match self.bridges.get(bi) {
            Some(b) if b.left <= *x => Location::InBridge(bi),
            _ => Location::Outside,
        }
    }

    pub fn total_bridge_length(&self) -> Real {
        self.bridges.iter().fold(Real::zero(), |acc, b| acc + b.length())
    }

    pub fn total_gap_length(&self) -> Real {
        self.gaps_all.iter().fold(Real::zero(), |acc, g| acc + g.length())
    }

    /// Sum of bridge and gap lengths; one for a valid level.
    pub fn total_length(&self) -> Real {
        self.total_bridge_length() + self.total_gap_length()
    }

    /// `(max - min) / min` over bridge lengths.
    pub fn bridge_length_spread(&self) -> f64 {
        let lens: Vec<f64> = self.bridges.iter().map(|b| b.length().to_f64()).collect();
        let max = lens.iter().cloned().fold(f64::MIN, f64::max);
        let min = lens.iter().cloned().fold(f64::MAX, f64::min);
        if min <= 0.0 {
            f64::INFINITY
        } else {
            (max - min) / min
        }
    }

    pub fn to_json(&self) -> Value {
        json!({
            "depth": self.depth,
            "bridges": self.bridges.iter().map(|b| json!({
                "left": b.left.to_decimal_string(),
                "right": b.right.to_decimal_string(),
            })).collect::<Vec<_>>(),
            "gaps": self.gaps_all.iter().map(|g| json!({
                "left": g.left.to_decimal_string(),
                "right": g.right.to_decimal_string(),
                "depth": g.depth,
            })).collect::<Vec<_>>(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construction::{example2_system, fluctuating_family, SequenceSpec};
    use proptest::prelude::*;
    use rug::Rational;

    fn r(n: i64, d: i64) -> Real {
        Real::ratio(n, d)
    }

    #[test]
    fn middle_third_level_one() {
        let lvl = CantorSystem::middle_third().refine_to(1).unwrap();
        assert_eq!(lvl.bridges.len(), 2);
        assert_eq!((lvl.bridges[0].left.clone(), lvl.bridges[0].right.clone()), (r(0, 1), r(1, 3)));
        assert_eq!((lvl.bridges[1].left.clone(), lvl.bridges[1].right.clone()), (r(2, 3), r(1, 1)));
        assert_eq!(lvl.gaps_all.len(), 1);
        assert_eq!(lvl.gaps_all[0].left, r(1, 3));
        assert_eq!(lvl.gaps_all[0].right, r(2, 3));
    }

    #[test]
    fn middle_third_level_two() {
        let lvl = CantorSystem::middle_third().refine_to(2).unwrap();
        assert_eq!(lvl.bridges.len(), 4);
        assert!(lvl.bridges.iter().all(|b| b.length() == r(1, 9)));
        assert_eq!(lvl.gap_lengths_at(2).unwrap(), vec![r(1, 9), r(1, 9)]);
        assert!(lvl.gap_lengths_at(3).is_err());
    }

    #[test]
    fn middle_fifth_gap() {
        let s = CantorSystem::middle_alpha(Rational::from((1, 5))).unwrap();
        assert_eq!(s.refine_to(1).unwrap().gap_lengths_at(1).unwrap(), vec![r(1, 5)]);
    }

    #[test]
    fn example1_bridge_lengths() {
        let s = CantorSystem::variable_fraction(SequenceSpec::InverseSquare {
            c: Rational::from(1),
            shift: 2,
        })
        .unwrap();
        let lvl = s.refine_to(3).unwrap();
        let want = r(1, 8) * (r(1, 1) - r(1, 9)) * (r(1, 1) - r(1, 16)) * (r(1, 1) - r(1, 25));
        assert_eq!(lvl.bridges.len(), 8);
        assert!(lvl.bridges.iter().all(|b| b.length() == want));
        assert!(want.is_exact());
    }

    #[test]
    fn example2_depth_two_gaps() {
        let lvl = example2_system(Rational::from((1, 2))).unwrap().refine_to(2).unwrap();
        assert_eq!(lvl.gap_lengths_at(2).unwrap(), vec![r(1, 18), r(1, 18)]);
        assert_eq!(lvl.gap_lengths_at(1).unwrap(), vec![r(1, 6)]);
    }

    #[test]
    fn locate_examples() {
        let s = CantorSystem::middle_third();
        let l1 = s.refine_to(1).unwrap();
        assert_eq!(l1.locate(&r(1, 2)), Location::InGap(0));
        assert_eq!(l1.locate(&r(1, 3)), Location::InGap(0));
        assert_eq!(l1.locate(&r(2, 3)), Location::InGap(0));
        assert_eq!(l1.locate(&r(-1, 2)), Location::Outside);
        assert_eq!(l1.locate(&r(3, 2)), Location::Outside);
        let l2 = s.refine_to(2).unwrap();
        assert_eq!(l2.locate(&r(1, 9)), Location::InGap(0));
        assert_eq!(l2.locate(&r(1, 10)), Location::InBridge(0));
        assert_eq!(l2.locate(&r(1, 1)), Location::InBridge(3));
        assert_eq!(l2.locate(&r(0, 1)), Location::InBridge(0));
    }

    #[test]
    fn depth_cap() {
        let s = CantorSystem::middle_third();
        assert!(matches!(s.refine_to_capped(11, 1024), Err(Error::DepthOverflow(_))));
        assert!(s.refine_to_capped(10, 1024).is_ok());
        assert!(matches!(s.refine_to(25), Err(Error::DepthOverflow(_))));
    }

    #[test]
    fn fluctuating_family_conserves_length() {
        let lvl = fluctuating_family(3).unwrap().refine_to(8).unwrap();
        let err = (lvl.total_length() - Real::one()).abs().to_scalar();
        let bound = crate::numerics::BigScalar::from_int(2).powi(16 - 256);
        assert!(err <= bound, "{err}");
    }

    #[test]
    fn json_shape() {
        let v = CantorSystem::middle_third().refine_to(1).unwrap().to_json();
        assert_eq!(v["depth"], 1);
        assert_eq!(v["bridges"].as_array().unwrap().len(), 2);
        assert_eq!(v["bridges"][1]["right"], "1");
        assert_eq!(v["gaps"][0]["depth"], 1);
        assert!(v["gaps"][0]["left"].as_str().unwrap().starts_with("3.333333"));
    }

    fn nested(coarse: &RefinementLevel, fine: &RefinementLevel) -> bool {
        fine.bridges.iter().all(|f| {
            coarse
                .bridges
                .iter()
                .filter(|c| c.left <= f.left && f.right <= c.right)
                .count()
                == 1
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn middle_alpha_levels_conserve_and_nest(num in 1i64..40, den in 41i64..60, n in 1usize..7) {
            let s = CantorSystem::middle_alpha(Rational::from((num, den))).unwrap();
            let coarse = s.refine_to(n - 1).unwrap();
            let fine = s.refine_to(n).unwrap();
            prop_assert_eq!(fine.total_length(), Real::one());
            prop_assert!(nested(&coarse, &fine));
            let beta = (Real::one() - Real::ratio(num, den)) / Real::from(2);
            prop_assert!(fine.bridges.iter().all(|b| b.length() == beta.powi(n as i32)));
        }

        #[test]
        fn sorted_and_disjoint(delta_num in 1i64..20, n in 1usize..7) {
            let s = example2_system(Rational::from((delta_num, 20))).unwrap();
            let lvl = s.refine_to(n).unwrap();
            prop_assert_eq!(lvl.total_length(), Real::one());
            for w in lvl.bridges.windows(2) {
                prop_assert!(w[0].right < w[1].left);
            }
            for w in lvl.gaps_all.windows(2) {
                prop_assert!(w[0].right <= w[1].left);
            }
        }
    }
}
