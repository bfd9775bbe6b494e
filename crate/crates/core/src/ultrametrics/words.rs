use rug::Rational;

use crate::construction::CantorSystem;
use crate::error::{Error, Result};
use crate::numerics::{BigScalar, Real};

/// Leading binary digits of a point of a middle-alpha set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WordRep {
    pub digits: Vec<u8>,
    /// Scale factor of the system the word belongs to.
    pub beta: Rational,
}

impl WordRep {
    pub fn new(digits: Vec<u8>, beta: Rational) -> Result<Self> {
        if digits.iter().any(|&d| d > 1) {
            return Err(Error::domain("word digits must be 0 or 1"));
        }
        if beta <= 0 || beta >= (1, 2) {
            return Err(Error::domain(format!("scale factor {beta} not in (0, 1/2)")));
        }
        Ok(WordRep { digits, beta })
    }

    pub fn len(&self) -> usize {
        self.digits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.digits.is_empty()
    }

    /// `(1 - beta) * sum x_i beta^i`, the left endpoint of the word's bridge.
    pub fn reconstruct(&self) -> Rational {
        let scale = Rational::from(1) - self.beta.clone();
        let mut weight = Rational::from(1);
        let mut sum = Rational::new();
        for &d in &self.digits {
            if d == 1 {
                sum += &weight;
            }
            weight *= &self.beta;
        }
        sum * scale
    }
}

/// The first `n` digits of `x`: 0 for the left child, 1 for the right.
pub fn word_encode(system: &CantorSystem, x: &Real, n: usize) -> Result<WordRep> {
    let beta = match system {
        CantorSystem::MiddleAlpha { .. } => system.scale_factor(),
        other => return Err(Error::Unsupported(format!("word encoding needs a middle-alpha set, got {}", other.label()))),
    };
    if *x < Real::zero() || *x > Real::one() {
        return Err(Error::NotInSet { depth: 0 });
    }
    let b = Real::Exact(beta.clone());
    let mut left = Real::zero();
    let mut len = Real::one();
    let mut digits = Vec::with_capacity(n);
    for depth in 1..=n {
        let child = &len * &b;
        let right_start = &(&left + &len) - &child;
        if *x <= &left + &child {
            digits.push(0);
        } else if *x >= right_start {
            digits.push(1);
            left = right_start;
        } else {
            return Err(Error::NotInSet { depth });
        }
        len = child;
    }
    WordRep::new(digits, beta)
}

/// `p^-L` with `L` the first index where the words differ.
///
/// Words that agree over their shared length are at distance 0 when they
/// reconstruct to the same point and `p^-(shared length)` otherwise.
pub fn natural_ultrametric(x: &WordRep, y: &WordRep, p: &BigScalar) -> Result<BigScalar> {
    if x.beta != y.beta {
        return Err(Error::IncompatibleWords(format!("scale factors {} and {} differ", x.beta, y.beta)));
    }
    if *p <= BigScalar::one(p.prec()) {
        return Err(Error::domain("ultrametric base p must exceed 1"));
    }
    let shared = x.len().min(y.len());
    let first_diff = x.digits.iter().zip(&y.digits).position(|(a, b)| a != b);
    let level = match first_diff {
        Some(l) => l,
        None if x.reconstruct() == y.reconstruct() => return Ok(BigScalar::zero(p.prec())),
        None => shared,
    };
    Ok(p.powi(-(level as i64)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn third() -> Rational {
        Rational::from((1, 3))
    }

    fn word(bits: &str) -> WordRep {
        WordRep::new(bits.bytes().map(|b| b - b'0').collect(), third()).unwrap()
    }

    #[test]
    fn encode_examples() {
        let s = CantorSystem::middle_third();
        assert_eq!(word_encode(&s, &Real::zero(), 4).unwrap(), word("0000"));
        assert_eq!(word_encode(&s, &Real::one(), 3).unwrap(), word("111"));
        assert_eq!(word_encode(&s, &Real::ratio(2, 9), 2).unwrap(), word("01"));
        assert!(matches!(word_encode(&s, &Real::ratio(1, 2), 3), Err(Error::NotInSet { depth: 1 })));
        assert!(matches!(word_encode(&s, &Real::ratio(4, 81), 3), Err(Error::NotInSet { depth: 3 })));
        let w = word_encode(&s, &Real::ratio(2, 9), 2).unwrap();
        assert_eq!(w.reconstruct(), Rational::from((2, 9)));
    }

    #[test]
    fn distance_examples() {
        let two = BigScalar::from_int(2);
        let three = BigScalar::from_int(3);
        assert_eq!(natural_ultrametric(&word("000"), &word("111"), &two).unwrap(), BigScalar::from_int(1));
        assert!(natural_ultrametric(&word("0101"), &word("0101"), &two).unwrap().is_zero());
        let d = natural_ultrametric(&word("010"), &word("011"), &three).unwrap();
        assert_eq!(d, BigScalar::from_int(1) / BigScalar::from_int(9));
        assert!(natural_ultrametric(&word("01"), &word("010"), &two).unwrap().is_zero());
        assert_eq!(natural_ultrametric(&word("01"), &word("011"), &two).unwrap(), BigScalar::from_int(1) / BigScalar::from_int(4));
        let other = WordRep::new(vec![0], Rational::from((1, 4))).unwrap();
        assert!(matches!(natural_ultrametric(&word("0"), &other, &two), Err(Error::IncompatibleWords(_))));
        assert!(natural_ultrametric(&word("0"), &word("1"), &BigScalar::from_int(1)).is_err());
    }

    #[test]
    fn axioms_hold_exhaustively_to_length_eight() {
        let p = BigScalar::from_int(2);
        for len in 1..=8usize {
            let words: Vec<WordRep> = (0..1u32 << len)
                .map(|v| WordRep::new((0..len).map(|i| ((v >> i) & 1) as u8).collect(), third()).unwrap())
                .collect();
            let n = words.len();
            let mut table = vec![0f64; n * n];
            for i in 0..n {
                for j in 0..n {
                    table[i * n + j] = natural_ultrametric(&words[i], &words[j], &p).unwrap().to_f64();
                }
            }
            for i in 0..n {
                for j in 0..n {
                    let d = table[i * n + j];
                    assert!(d >= 0.0);
                    assert_eq!(d == 0.0, i == j);
                    assert_eq!(d, table[j * n + i]);
                    for k in 0..n {
                        assert!(table[i * n + k] <= d.max(table[j * n + k]));
                    }
                }
            }
        }
    }

    proptest! {
        #[test]
        fn strong_triangle_on_long_words(a in any::<u32>(), b in any::<u32>(), c in any::<u32>()) {
            let mk = |v: u32| WordRep::new((0..32).map(|i| ((v >> i) & 1) as u8).collect(), third()).unwrap();
            let (x, y, z) = (mk(a), mk(b), mk(c));
            let p = BigScalar::from_int(3);
            let dxz = natural_ultrametric(&x, &z, &p).unwrap();
            let dxy = natural_ultrametric(&x, &y, &p).unwrap();
            let dyz = natural_ultrametric(&y, &z, &p).unwrap();
            prop_assert!(dxz <= *dxy.max(&dyz));
            prop_assert_eq!(dxy.clone(), natural_ultrametric(&y, &x, &p).unwrap());
            prop_assert_eq!(dxy.is_zero(), a == b);
        }
    }
}
