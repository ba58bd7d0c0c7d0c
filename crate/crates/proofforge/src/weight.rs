//! Exact non-negative rational weights.
//!
//! All search and measure arithmetic is exact; nothing in the crate rounds a
//! weight. The only place a float appears is the display approximation of
//! `log2` for the log-depth measure.

use std::fmt;
use std::ops::Add;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

/// A non-negative rational number in reduced form.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Weight(BigRational);

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum WeightError {
    #[error("weight must be non-negative, got {0}")]
    Negative(String),
    #[error("invalid weight syntax: {0}")]
    Syntax(String),
    #[error("denominator must be non-zero")]
    ZeroDenominator,
}

impl Weight {
    pub fn zero() -> Weight {
        Weight(BigRational::zero())
    }

    pub fn one() -> Weight {
        Weight(BigRational::one())
    }

    pub fn from_u64(n: u64) -> Weight {
        Weight(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn from_ratio(num: u64, den: u64) -> Result<Weight, WeightError> {
        if den == 0 {
            return Err(WeightError::ZeroDenominator);
        }
        Ok(Weight(BigRational::new(BigInt::from(num), BigInt::from(den))))
    }

    pub fn from_rational(r: BigRational) -> Result<Weight, WeightError> {
        if r.is_negative() {
            return Err(WeightError::Negative(r.to_string()));
        }
        Ok(Weight(r))
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    /// Largest integer `<= self`, as an unsigned big integer.
    pub fn floor_uint(&self) -> BigUint {
        self.0
            .floor()
            .to_integer()
            .to_biguint()
            .expect("weight is non-negative")
    }

    /// `self - other` if the result stays non-negative.
    pub fn checked_sub(&self, other: &Weight) -> Option<Weight> {
        if self.0 < other.0 {
            None
        } else {
            Some(Weight(&self.0 - &other.0))
        }
    }

    pub fn max(self, other: Weight) -> Weight {
        if self.0 >= other.0 {
            self
        } else {
            other
        }
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::INFINITY)
    }

    pub fn as_rational(&self) -> &BigRational {
        &self.0
    }

    /// True iff `self <= 2^bound`, decided exactly: for `bound = a/b` this is
    /// `self^b <= 2^a` over big integers.
    pub fn leq_pow2(&self, bound: &Weight) -> bool {
        let a = bound
            .0
            .numer()
            .to_biguint()
            .expect("bound is non-negative");
        let b = bound
            .0
            .denom()
            .to_biguint()
            .expect("denominator is positive");
        let a32 = a.to_u32();
        let b32 = b.to_u32();
        let (a32, b32) = match (a32, b32) {
            (Some(a), Some(b)) => (a, b),
            // Astronomical exponents: fall back to the float comparison,
            // which is only reachable for bounds beyond any searchable depth.
            _ => return self.to_f64() <= 2f64.powf(bound.to_f64()),
        };
        let num = self.0.numer().to_biguint().expect("non-negative");
        let den = self.0.denom().to_biguint().expect("positive");
        // self <= 2^(a/b)  <=>  (num/den)^b <= 2^a  <=>  num^b <= 2^a * den^b
        num.pow(b32) <= (BigUint::one() << a32) * den.pow(b32)
    }
}

impl Add<&Weight> for Weight {
    type Output = Weight;
    fn add(self, rhs: &Weight) -> Weight {
        Weight(self.0 + &rhs.0)
    }
}

impl fmt::Display for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_integer() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl fmt::Debug for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Weight {
    type Err = WeightError;

    /// Accepts `3`, `3/2`, and decimal syntax `2.5`.
    fn from_str(s: &str) -> Result<Weight, WeightError> {
        let s = s.trim();
        if let Some((num, den)) = s.split_once('/') {
            let n: BigUint = num
                .trim()
                .parse()
                .map_err(|_| WeightError::Syntax(s.to_string()))?;
            let d: BigUint = den
                .trim()
                .parse()
                .map_err(|_| WeightError::Syntax(s.to_string()))?;
            if d.is_zero() {
                return Err(WeightError::ZeroDenominator);
            }
            return Ok(Weight(BigRational::new(n.into(), d.into())));
        }
        if let Some((int, frac)) = s.split_once('.') {
            let int = if int.is_empty() { "0" } else { int };
            let i: BigUint = int.parse().map_err(|_| WeightError::Syntax(s.to_string()))?;
            if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
                return Err(WeightError::Syntax(s.to_string()));
            }
            let f: BigUint = frac.parse().map_err(|_| WeightError::Syntax(s.to_string()))?;
            let scale = BigUint::from(10u32).pow(frac.len() as u32);
            let num = i * &scale + f;
            return Ok(Weight(BigRational::new(num.into(), scale.into())));
        }
        let n: BigUint = s.parse().map_err(|_| WeightError::Syntax(s.to_string()))?;
        Ok(Weight(BigRational::from_integer(n.into())))
    }
}

/// Sum of a slice of weights; zero for the empty slice.
pub fn sum(weights: &[Weight]) -> Weight {
    weights.iter().fold(Weight::zero(), |acc, w| acc + w)
}

/// Maximum of a slice of weights; zero for the empty slice.
pub fn max(weights: &[Weight]) -> Weight {
    weights
        .iter()
        .fold(Weight::zero(), |acc, w| acc.max(w.clone()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_integer_ratio_and_decimal() {
        assert_eq!("3".parse::<Weight>().unwrap(), Weight::from_u64(3));
        assert_eq!(
            "3/2".parse::<Weight>().unwrap(),
            Weight::from_ratio(3, 2).unwrap()
        );
        assert_eq!(
            "2.5".parse::<Weight>().unwrap(),
            Weight::from_ratio(5, 2).unwrap()
        );
        assert!("x".parse::<Weight>().is_err());
        assert!("1/0".parse::<Weight>().is_err());
    }

    #[test]
    fn display_reduces() {
        let w = Weight::from_ratio(4, 2).unwrap();
        assert_eq!(w.to_string(), "2");
        let w = Weight::from_ratio(3, 2).unwrap();
        assert_eq!(w.to_string(), "3/2");
    }

    #[test]
    fn exact_addition() {
        let half = Weight::from_ratio(1, 2).unwrap();
        let third = Weight::from_ratio(1, 3).unwrap();
        assert_eq!(half + &third, Weight::from_ratio(5, 6).unwrap());
    }

    #[test]
    fn pow2_threshold_is_exact() {
        // depth 8 <= 2^3, depth 9 > 2^3
        assert!(Weight::from_u64(8).leq_pow2(&Weight::from_u64(3)));
        assert!(!Weight::from_u64(9).leq_pow2(&Weight::from_u64(3)));
        // 2 <= 2^(3/2) since 4 <= 8; 3 > 2^(3/2) since 27 > 8... 9 > 8
        assert!(Weight::from_u64(2).leq_pow2(&Weight::from_ratio(3, 2).unwrap()));
        assert!(!Weight::from_u64(3).leq_pow2(&Weight::from_ratio(3, 2).unwrap()));
        assert!(Weight::zero().leq_pow2(&Weight::zero()));
    }
}
