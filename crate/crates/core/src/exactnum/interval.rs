use std::fmt;
use std::ops::{Add, Mul, Sub};

use serde::{Deserialize, Serialize};

use super::{ExactError, Rational};

/// Closed interval with rational endpoints. Arithmetic on it is exact
/// (endpoints are never rounded), so enclosures only widen where the
/// inputs were already approximate.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RationalInterval {
    pub lo: Rational,
    pub hi: Rational,
}

impl RationalInterval {
    pub fn new(lo: Rational, hi: Rational) -> Self {
        debug_assert!(lo <= hi, "inverted interval [{lo}, {hi}]");
        RationalInterval { lo, hi }
    }

    pub fn point(x: Rational) -> Self {
        RationalInterval { lo: x.clone(), hi: x }
    }

    pub fn zero() -> Self {
        Self::point(Rational::zero())
    }

    pub fn one() -> Self {
        Self::point(Rational::one())
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }

    pub fn as_point(&self) -> Option<&Rational> {
        self.is_point().then_some(&self.lo)
    }

    pub fn width(&self) -> Rational {
        &self.hi - &self.lo
    }

    pub fn contains(&self, x: &Rational) -> bool {
        &self.lo <= x && x <= &self.hi
    }

    pub fn intersects(&self, other: &RationalInterval) -> bool {
        self.lo <= other.hi && other.lo <= self.hi
    }

    /// `[1 - hi, 1 - lo]`.
    pub fn complement(&self) -> Self {
        RationalInterval { lo: Rational::one() - &self.hi, hi: Rational::one() - &self.lo }
    }

    /// Reciprocal; the interval must lie strictly on one side of zero.
    pub fn recip(&self) -> Result<Self, ExactError> {
        if self.lo.is_positive() || self.hi.is_negative() {
            Ok(RationalInterval { lo: self.hi.recip()?, hi: self.lo.recip()? })
        } else {
            Err(ExactError::DivisionByZero)
        }
    }

    pub fn midpoint(&self) -> Rational {
        (&self.lo + &self.hi) * Rational::frac(1, 2)
    }
}

impl fmt::Display for RationalInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

impl fmt::Debug for RationalInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl Add<&RationalInterval> for &RationalInterval {
    type Output = RationalInterval;
    fn add(self, rhs: &RationalInterval) -> RationalInterval {
        RationalInterval { lo: &self.lo + &rhs.lo, hi: &self.hi + &rhs.hi }
    }
}

impl Sub<&RationalInterval> for &RationalInterval {
    type Output = RationalInterval;
    fn sub(self, rhs: &RationalInterval) -> RationalInterval {
        RationalInterval { lo: &self.lo - &rhs.hi, hi: &self.hi - &rhs.lo }
    }
}

impl Mul<&RationalInterval> for &RationalInterval {
    type Output = RationalInterval;
    fn mul(self, rhs: &RationalInterval) -> RationalInterval {
        if !self.lo.is_negative() && !rhs.lo.is_negative() {
            return RationalInterval { lo: &self.lo * &rhs.lo, hi: &self.hi * &rhs.hi };
        }
        let products = [
            &self.lo * &rhs.lo,
            &self.lo * &rhs.hi,
            &self.hi * &rhs.lo,
            &self.hi * &rhs.hi,
        ];
        let lo = products.iter().min().cloned().unwrap_or_default();
        let hi = products.iter().max().cloned().unwrap_or_default();
        RationalInterval { lo, hi }
    }
}

/// Certified bracket around `1 - 1/e` from the truncated exponential
/// series: `sum_{k<=n} 1/k! <= e <= sum_{k<=n} 1/k! + 2/(n+1)!`.
pub fn one_minus_inv_e_bracket() -> RationalInterval {
    let terms = 24;
    let mut fact = Rational::one();
    let mut sum = Rational::one();
    for k in 1..=terms {
        fact = fact * Rational::from_integer(k);
        sum += fact.recip().expect("factorial is nonzero");
    }
    let tail = Rational::from_integer(2)
        * (fact * Rational::from_integer(terms + 1)).recip().expect("nonzero");
    let e = RationalInterval::new(sum.clone(), sum + tail);
    e.recip().expect("e is positive").complement()
}

/// 0.632, the rational lower bracket of `1 - 1/e` used in acceptance bounds.
pub fn one_minus_inv_e_lower() -> Rational {
    Rational::frac(632, 1000)
}

/// 0.6322, the rational upper bracket of `1 - 1/e`.
pub fn one_minus_inv_e_upper() -> Rational {
    Rational::frac(6322, 10000)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_brackets_enclose_one_minus_inv_e() {
        let b = one_minus_inv_e_bracket();
        assert!(one_minus_inv_e_lower() < b.lo);
        assert!(b.hi < one_minus_inv_e_upper());
        let f = 1.0 - (-1.0f64).exp();
        assert!(b.lo.to_f64() <= f && f <= b.hi.to_f64());
    }

    #[test]
    fn multiplication_with_signs() {
        let a = RationalInterval::new(Rational::frac(-1, 2), Rational::frac(1, 3));
        let b = RationalInterval::new(Rational::frac(2, 1), Rational::frac(3, 1));
        let p = &a * &b;
        assert_eq!(p.lo, Rational::frac(-3, 2));
        assert_eq!(p.hi, Rational::from_integer(1));
    }

    #[test]
    fn reciprocal_requires_sign_definite_interval() {
        let a = RationalInterval::new(Rational::frac(1, 4), Rational::frac(1, 2));
        let r = a.recip().unwrap();
        assert_eq!(r.lo, Rational::from_integer(2));
        assert_eq!(r.hi, Rational::from_integer(4));
        let z = RationalInterval::new(Rational::zero(), Rational::one());
        assert!(z.recip().is_err());
    }
}
