use std::fmt;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::{ExactError, Rational, RationalInterval};

/// Which irrational family an angle belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum AngleKind {
    /// `coeff * pi`
    #[serde(rename = "dyadic_pi")]
    DyadicPi,
    /// `coeff * sqrt(2) * pi`
    #[serde(rename = "sqrt2_pi")]
    Sqrt2Pi,
}

/// A rotation angle `coeff * pi` or `coeff * sqrt(2) * pi`.
///
/// The zero angle is normalised to `DyadicPi` and is compatible with both
/// kinds under addition.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SymbolicAngle {
    pub kind: AngleKind,
    pub coeff: Rational,
}

impl SymbolicAngle {
    pub fn new(kind: AngleKind, coeff: Rational) -> Self {
        if coeff.is_zero() {
            return Self::zero();
        }
        SymbolicAngle { kind, coeff }
    }

    pub fn zero() -> Self {
        SymbolicAngle { kind: AngleKind::DyadicPi, coeff: Rational::zero() }
    }

    pub fn dyadic_pi(coeff: Rational) -> Self {
        Self::new(AngleKind::DyadicPi, coeff)
    }

    pub fn sqrt2_pi(coeff: Rational) -> Self {
        Self::new(AngleKind::Sqrt2Pi, coeff)
    }

    /// `pi / 2^bits`.
    pub fn pi_over_pow2(bits: u64) -> Self {
        Self::dyadic_pi(Rational::dyadic(1, bits))
    }

    pub fn is_zero(&self) -> bool {
        self.coeff.is_zero()
    }

    pub fn add(&self, other: &SymbolicAngle) -> Result<SymbolicAngle, ExactError> {
        if other.is_zero() {
            return Ok(self.clone());
        }
        if self.is_zero() {
            return Ok(other.clone());
        }
        if self.kind != other.kind {
            return Err(ExactError::AngleKindMismatch);
        }
        Ok(Self::new(self.kind, &self.coeff + &other.coeff))
    }

    pub fn scale(&self, factor: &Rational) -> SymbolicAngle {
        Self::new(self.kind, &self.coeff * factor)
    }

    pub fn neg(&self) -> SymbolicAngle {
        Self::new(self.kind, -&self.coeff)
    }

    /// The angle as a multiple of `pi/2`, when it is one.
    pub fn quarter_turns(&self) -> Option<BigInt> {
        if self.is_zero() {
            return Some(BigInt::zero());
        }
        if self.kind != AngleKind::DyadicPi {
            return None;
        }
        let doubled = &self.coeff * Rational::from_integer(2);
        doubled.is_integer().then(|| doubled.numer().clone())
    }
}

impl fmt::Display for SymbolicAngle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            AngleKind::DyadicPi => write!(f, "({})pi", self.coeff),
            AngleKind::Sqrt2Pi => write!(f, "({})sqrt2*pi", self.coeff),
        }
    }
}

impl fmt::Debug for SymbolicAngle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// Result of evaluating `sin^2` of an angle.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AngleProbability {
    Exact(Rational),
    Approx(RationalInterval),
}

impl AngleProbability {
    pub fn enclosure(&self) -> RationalInterval {
        match self {
            AngleProbability::Exact(r) => RationalInterval::point(r.clone()),
            AngleProbability::Approx(i) => i.clone(),
        }
    }

    pub fn lower(&self) -> Rational {
        self.enclosure().lo
    }

    pub fn upper(&self) -> Rational {
        self.enclosure().hi
    }

    /// The probability of the complementary outcome, `cos^2`.
    pub fn complement(&self) -> AngleProbability {
        match self {
            AngleProbability::Exact(r) => AngleProbability::Exact(Rational::one() - r),
            AngleProbability::Approx(i) => AngleProbability::Approx(i.complement()),
        }
    }
}

pub const MIN_PRECISION_BITS: u32 = 16;

/// `sin^2(angle)`, the probability of observing `|1>` on
/// `cos(angle)|0> + sin(angle)|1>`.
///
/// Exact exactly when the angle is a multiple of `pi/2`; otherwise an
/// enclosure of width at most `2^-precision_bits` computed in fixed point
/// with every rounding error accounted for.
pub fn angle_probability(angle: &SymbolicAngle, precision_bits: u32) -> AngleProbability {
    if let Some(q) = angle.quarter_turns() {
        let odd = q.is_odd();
        return AngleProbability::Exact(if odd { Rational::one() } else { Rational::zero() });
    }
    let precision = precision_bits.max(MIN_PRECISION_BITS) as u64;
    let target = Rational::dyadic(1, precision);
    let magnitude_bits = angle.coeff.abs().ceil().bits() + 2;
    let mut work = precision + 24 + magnitude_bits;
    loop {
        let enclosure = sin_sqr_enclosure(angle, work);
        if enclosure.width() <= target {
            return AngleProbability::Approx(enclosure);
        }
        work += 32;
    }
}

/// Enclosure of `pi` as integers `(lo, hi)` scaled by `2^bits`.
pub fn pi_enclosure(bits: u64) -> (BigInt, BigInt) {
    const GUARD: u64 = 32;
    let w = bits + GUARD;
    let (s5, e5) = atan_inv(5, w);
    let (s239, e239) = atan_inv(239, w);
    let centre: BigInt = BigInt::from(16) * s5 - BigInt::from(4) * s239;
    let err: BigInt = BigInt::from(16) * e5 + BigInt::from(4) * e239;
    let lo: BigInt = (&centre - &err) >> GUARD;
    let hi_scaled: BigInt = &centre + &err;
    let hi = ceil_shift(&hi_scaled, GUARD);
    (lo, hi)
}

/// `atan(1/x) * 2^w` with an error bound in units of `2^-w`.
fn atan_inv(x: u32, w: u64) -> (BigInt, BigInt) {
    let x = BigInt::from(x);
    let x2 = &x * &x;
    // power_k = floor(2^w / x^(2k+1)); nested floors by integers are exact.
    let mut power: BigInt = (BigInt::one() << w) / &x;
    let mut sum = BigInt::zero();
    let mut k: u64 = 0;
    while !power.is_zero() {
        let term = &power / BigInt::from(2 * k + 1);
        if k.is_multiple_of(2) {
            sum += term;
        } else {
            sum -= term;
        }
        power /= &x2;
        k += 1;
    }
    // one floor per term, plus the alternating tail (first omitted term < 1)
    (sum, BigInt::from(k + 2))
}

fn ceil_shift(x: &BigInt, bits: u64) -> BigInt {
    let d = BigInt::one() << bits;
    let (q, r) = x.div_mod_floor(&d);
    if r.is_zero() {
        q
    } else {
        q + 1
    }
}

/// `sqrt(2) * 2^bits` bracketed as `[s, s+1]`.
fn sqrt2_floor(bits: u64) -> BigInt {
    let two: BigInt = BigInt::from(2) << (2 * bits);
    let root = two.magnitude().sqrt();
    BigInt::from_biguint(Sign::Plus, root)
}

/// Enclosure for `angle / pi` reduced modulo 1, scaled by `2^w`.
fn turns_enclosure(angle: &SymbolicAngle, w: u64) -> (BigInt, BigInt) {
    let c = angle.coeff.abs();
    let (lo, hi) = match angle.kind {
        AngleKind::DyadicPi => (c.scaled_floor(w), c.scaled_ceil(w)),
        AngleKind::Sqrt2Pi => {
            let s = sqrt2_floor(w);
            let p = c.numer();
            let q = c.denom();
            let lo = (p * &s).div_floor(q);
            let hi_num: BigInt = p * (&s + 1);
            let (hq, hr) = hi_num.div_mod_floor(q);
            let hi = if hr.is_zero() { hq } else { hq + 1 };
            (lo, hi)
        }
    };
    // sin^2(pi * g) has period 1 in g.
    let one = BigInt::one() << w;
    let shift = lo.div_floor(&one) * &one;
    (lo - &shift, hi - shift)
}

/// `sin(y)` at the exact point `y = m / 2^w`, `0 <= y <= 4`: returns the
/// fixed-point value and an error bound, both in units of `2^-w`.
fn sin_point(m: &BigInt, w: u64) -> (BigInt, BigInt) {
    let scale = BigInt::one() << w;
    let m2: BigInt = (m * m) >> w;
    let mut term = m.clone();
    let mut err = BigInt::zero();
    let mut sum = BigInt::zero();
    let mut total_err = BigInt::zero();
    let mut k: u64 = 0;
    loop {
        if term.is_zero() && k >= 3 {
            break;
        }
        if k.is_multiple_of(2) {
            sum += &term;
        } else {
            sum -= &term;
        }
        total_err += &err;
        let d = BigInt::from((2 * k + 2) * (2 * k + 3));
        let next = ((&term * &m2) >> w) / &d;
        // |t_k m2/2^w - T_k mu| <= e_k (m2+1)/2^w + (|t_k| + e_k)/2^w
        let carried: BigInt = &err * (&m2 + 1) + term.abs() + &err;
        let denom: BigInt = &scale * &d;
        let (q, r) = carried.div_mod_floor(&denom);
        err = if r.is_zero() { q } else { q + 1 } + 1;
        term = next;
        k += 1;
    }
    // Terms decrease from k = 2 on, so the alternating tail is bounded by
    // the first omitted term, which is within `err` of zero.
    total_err += &err + 1;
    (sum, total_err)
}

fn sin_sqr_enclosure(angle: &SymbolicAngle, w: u64) -> RationalInterval {
    let (g_lo, g_hi) = turns_enclosure(angle, w);
    let (pi_lo, pi_hi) = pi_enclosure(w);
    let y_lo: BigInt = (&g_lo * &pi_lo) >> w;
    let y_hi = ceil_shift(&(&g_hi * &pi_hi), w);
    let mid: BigInt = (&y_lo + &y_hi) >> 1;
    let radius = (&mid - &y_lo).max(&y_hi - &mid);

    let (s, e) = sin_point(&mid, w);
    let s_lo = Rational::dyadic(&s - &e, w);
    let s_hi = Rational::dyadic(&s + &e, w);
    let one = Rational::one();
    let s_lo = s_lo.max(-one.clone());
    let s_hi = s_hi.min(one.clone());
    let sq_lo = &s_lo * &s_lo;
    let sq_hi = &s_hi * &s_hi;
    let (mut lo, mut hi) = if !s_lo.is_positive() && !s_hi.is_negative() {
        (Rational::zero(), sq_lo.max(sq_hi))
    } else {
        (sq_lo.clone().min(sq_hi.clone()), sq_lo.max(sq_hi))
    };
    // d/dy sin^2(y) = sin(2y), so sin^2 is 1-Lipschitz.
    let r = Rational::dyadic(radius, w);
    lo = (lo - &r).max(Rational::zero());
    hi = (hi + &r).min(one);
    RationalInterval::new(lo, hi)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quarter_turns_are_exact() {
        let half = SymbolicAngle::dyadic_pi(Rational::frac(1, 2));
        assert_eq!(angle_probability(&half, 64), AngleProbability::Exact(Rational::one()));
        let full = SymbolicAngle::dyadic_pi(Rational::one());
        assert_eq!(angle_probability(&full, 64), AngleProbability::Exact(Rational::zero()));
        let zero = SymbolicAngle::sqrt2_pi(Rational::zero());
        assert_eq!(angle_probability(&zero, 64), AngleProbability::Exact(Rational::zero()));
    }

    #[test]
    fn pi_enclosure_is_tight() {
        let (lo, hi) = pi_enclosure(100);
        let lo = Rational::dyadic(lo, 100);
        let hi = Rational::dyadic(hi, 100);
        // 355/113 overshoots pi by ~2.7e-7
        assert!(hi < Rational::frac(355, 113));
        assert!(lo > Rational::frac(333, 106));
        assert!(&hi - &lo < Rational::dyadic(1, 96));
        assert!((lo.to_f64() - std::f64::consts::PI).abs() < 1e-15);
    }

    #[test]
    fn mixing_kinds_is_rejected_unless_zero() {
        let a = SymbolicAngle::dyadic_pi(Rational::frac(1, 4));
        let b = SymbolicAngle::sqrt2_pi(Rational::one());
        assert_eq!(a.add(&b), Err(ExactError::AngleKindMismatch));
        assert_eq!(SymbolicAngle::zero().add(&b).unwrap(), b);
        assert_eq!(b.add(&b.neg()).unwrap(), SymbolicAngle::zero());
    }

    #[test]
    fn sqrt2_pi_interval_matches_float() {
        let a = SymbolicAngle::sqrt2_pi(Rational::one());
        let AngleProbability::Approx(iv) = angle_probability(&a, 64) else {
            panic!("irrational angle reported exact");
        };
        assert!(iv.width() <= Rational::dyadic(1, 64));
        assert!(iv.lo > Rational::frac(1, 2));
        let f = (std::f64::consts::SQRT_2 * std::f64::consts::PI).sin().powi(2);
        assert!((iv.lo.to_f64() - f).abs() < 1e-12);
    }

    #[test]
    fn non_quarter_dyadic_is_approximate() {
        let a = SymbolicAngle::dyadic_pi(Rational::frac(1, 4));
        let AngleProbability::Approx(iv) = angle_probability(&a, 40) else {
            panic!("pi/4 reported exact");
        };
        assert!(iv.contains(&Rational::frac(1, 2)));
    }

    #[test]
    fn negative_coefficients_are_symmetric() {
        let a = SymbolicAngle::sqrt2_pi(Rational::from_integer(3));
        assert_eq!(angle_probability(&a, 48), angle_probability(&a.neg(), 48));
    }
}
