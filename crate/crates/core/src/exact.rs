//! Exact arithmetic in the ring of half-integer powers of two and in
//! Z[sqrt(2)] localized at 2.
//!
//! Polynomial construction only ever introduces factors 1/2 and 1/sqrt(2),
//! so every coefficient is `numerator * 2^(half_exponent/2)` with an odd
//! numerator. Strategy enumeration adds coefficients of mixed sqrt(2)-parity,
//! which needs the larger ring `(a + b*sqrt(2)) / 2^k`; [`Radical2`] covers
//! that and supports exact comparison.

use serde::{Deserialize, Serialize};
use std::cmp::Ordering;
use std::fmt;

const SQRT_2: f64 = std::f64::consts::SQRT_2;

/// A single exact coefficient `numerator * 2^(half_exponent/2)`.
///
/// Canonical form: the numerator is odd or zero, and zero forces
/// `half_exponent = 0`. All arithmetic stays exact; conversion to `f64`
/// happens only at evaluation time.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Coefficient {
    numerator: i64,
    half_exponent: i32,
}

impl Coefficient {
    pub const ZERO: Coefficient = Coefficient { numerator: 0, half_exponent: 0 };
    pub const ONE: Coefficient = Coefficient { numerator: 1, half_exponent: 0 };

    /// Builds `numerator * 2^(half_exponent/2)` and canonicalizes.
    pub fn new(numerator: i64, half_exponent: i32) -> Self {
        let mut num = numerator;
        let mut half = half_exponent;
        if num == 0 {
            return Self::ZERO;
        }
        while num % 2 == 0 {
            num /= 2;
            half += 2;
        }
        Coefficient { numerator: num, half_exponent: half }
    }

    pub fn numerator(&self) -> i64 {
        self.numerator
    }

    pub fn half_exponent(&self) -> i32 {
        self.half_exponent
    }

    pub fn is_zero(&self) -> bool {
        self.numerator == 0
    }

    pub fn signum(&self) -> i32 {
        self.numerator.signum() as i32
    }

    /// Exact sum. Returns `None` when the two values live on different
    /// sqrt(2)-parities and the sum leaves the representable set.
    pub fn checked_add(self, other: Self) -> Option<Self> {
        if self.is_zero() {
            return Some(other);
        }
        if other.is_zero() {
            return Some(self);
        }
        if (self.half_exponent - other.half_exponent) % 2 != 0 {
            return None;
        }
        let base = self.half_exponent.min(other.half_exponent);
        let sa = i128::from(self.numerator) << ((self.half_exponent - base) / 2);
        let sb = i128::from(other.numerator) << ((other.half_exponent - base) / 2);
        let sum = i64::try_from(sa + sb).expect("coefficient overflow");
        Some(Self::new(sum, base))
    }

    /// Exact sum; panics on a sqrt(2)-parity mismatch. Construction of the
    /// Mermin-Svetlichny family never mixes parities.
    pub fn add(self, other: Self) -> Self {
        self.checked_add(other)
            .expect("coefficient addition across sqrt(2) parity is not representable")
    }

    pub fn sub(self, other: Self) -> Self {
        self.add(other.neg())
    }

    pub fn neg(self) -> Self {
        Coefficient { numerator: -self.numerator, half_exponent: self.half_exponent }
    }

    pub fn mul(self, other: Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::ZERO;
        }
        Self::new(self.numerator * other.numerator, self.half_exponent + other.half_exponent)
    }

    /// Exact division by sqrt(2): decrements the half exponent.
    pub fn div_sqrt2(self) -> Self {
        if self.is_zero() {
            return Self::ZERO;
        }
        Coefficient { numerator: self.numerator, half_exponent: self.half_exponent - 1 }
    }

    pub fn abs(self) -> Self {
        Coefficient { numerator: self.numerator.abs(), half_exponent: self.half_exponent }
    }

    pub fn to_f64(self) -> f64 {
        let e = self.half_exponent.div_euclid(2);
        let rem = self.half_exponent.rem_euclid(2);
        let mut v = self.numerator as f64 * 2f64.powi(e);
        if rem == 1 {
            v *= SQRT_2;
        }
        v
    }

    pub fn to_radical2(self) -> Radical2 {
        if self.is_zero() {
            return Radical2::ZERO;
        }
        let num = i128::from(self.numerator);
        if self.half_exponent % 2 == 0 {
            let e = self.half_exponent / 2;
            if e >= 0 {
                Radical2::new(num << e, 0, 0)
            } else {
                Radical2::new(num, 0, (-e) as u32)
            }
        } else {
            // numerator * sqrt(2) * 2^((h-1)/2)
            let e = (self.half_exponent - 1) / 2;
            if e >= 0 {
                Radical2::new(0, num << e, 0)
            } else {
                Radical2::new(0, num, (-e) as u32)
            }
        }
    }
}

impl fmt::Display for Coefficient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        match (self.half_exponent % 2 == 0, self.half_exponent) {
            (true, 0) => write!(f, "{}", self.numerator),
            (true, h) => write!(f, "{}*2^{}", self.numerator, h / 2),
            (false, h) => write!(f, "{}*2^({}/2)", self.numerator, h),
        }
    }
}

/// Exact value `(a + b*sqrt(2)) / 2^den_pow2`.
///
/// Closed under addition and multiplication, totally ordered, with exact
/// sign decisions (`a^2` versus `2 b^2`; equality is impossible for nonzero
/// integers since sqrt(2) is irrational).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Radical2 {
    a: i128,
    b: i128,
    den_pow2: u32,
}

impl Radical2 {
    pub const ZERO: Radical2 = Radical2 { a: 0, b: 0, den_pow2: 0 };
    pub const ONE: Radical2 = Radical2 { a: 1, b: 0, den_pow2: 0 };
    pub const SQRT2: Radical2 = Radical2 { a: 0, b: 1, den_pow2: 0 };

    pub fn new(a: i128, b: i128, den_pow2: u32) -> Self {
        let mut v = Radical2 { a, b, den_pow2 };
        v.normalize();
        v
    }

    fn normalize(&mut self) {
        if self.a == 0 && self.b == 0 {
            self.den_pow2 = 0;
            return;
        }
        while self.den_pow2 > 0 && self.a % 2 == 0 && self.b % 2 == 0 {
            self.a /= 2;
            self.b /= 2;
            self.den_pow2 -= 1;
        }
    }

    /// Exact `2^(half/2)` for any signed half-exponent.
    pub fn pow2_half(half: i32) -> Self {
        Coefficient::new(1, half).to_radical2()
    }

    pub fn from_int(v: i64) -> Self {
        Radical2::new(i128::from(v), 0, 0)
    }

    pub fn is_zero(&self) -> bool {
        self.a == 0 && self.b == 0
    }

    pub fn signum(&self) -> i32 {
        match (self.a.signum(), self.b.signum()) {
            (0, 0) => 0,
            (sa, sb) if sa >= 0 && sb >= 0 => 1,
            (sa, sb) if sa <= 0 && sb <= 0 => -1,
            (sa, _) => {
                // a and b have strictly opposite signs: compare a^2 with 2 b^2
                let a2 = self.a * self.a;
                let b2 = 2 * self.b * self.b;
                if a2 > b2 {
                    sa as i32
                } else {
                    -(sa as i32)
                }
            }
        }
    }

    pub fn add(self, other: Self) -> Self {
        let den = self.den_pow2.max(other.den_pow2);
        let sa = 1i128 << (den - self.den_pow2);
        let sb = 1i128 << (den - other.den_pow2);
        Radical2::new(self.a * sa + other.a * sb, self.b * sa + other.b * sb, den)
    }

    pub fn sub(self, other: Self) -> Self {
        self.add(other.neg())
    }

    pub fn neg(self) -> Self {
        Radical2 { a: -self.a, b: -self.b, den_pow2: self.den_pow2 }
    }

    pub fn mul(self, other: Self) -> Self {
        Radical2::new(
            self.a * other.a + 2 * self.b * other.b,
            self.a * other.b + self.b * other.a,
            self.den_pow2 + other.den_pow2,
        )
    }

    pub fn mul_sign(self, sign: i8) -> Self {
        if sign < 0 {
            self.neg()
        } else {
            self
        }
    }

    pub fn abs(self) -> Self {
        if self.signum() < 0 {
            self.neg()
        } else {
            self
        }
    }

    pub fn to_f64(self) -> f64 {
        (self.a as f64 + self.b as f64 * SQRT_2) / 2f64.powi(self.den_pow2 as i32)
    }

    pub fn den_pow2(&self) -> u32 {
        self.den_pow2
    }

    /// Integer parts (a, b) rewritten over the denominator `2^den`;
    /// `den` must be at least this value's own denominator exponent.
    pub fn parts_at_den(&self, den: u32) -> (i64, i64) {
        assert!(den >= self.den_pow2, "denominator too small");
        let shift = den - self.den_pow2;
        let a = i64::try_from(self.a << shift).expect("radical2 part overflow");
        let b = i64::try_from(self.b << shift).expect("radical2 part overflow");
        (a, b)
    }
}

impl PartialOrd for Radical2 {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Radical2 {
    fn cmp(&self, other: &Self) -> Ordering {
        match self.sub(*other).signum() {
            s if s < 0 => Ordering::Less,
            0 => Ordering::Equal,
            _ => Ordering::Greater,
        }
    }
}

impl fmt::Display for Radical2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let num = match (self.a, self.b) {
            (a, 0) => format!("{a}"),
            (0, 1) => "sqrt(2)".to_string(),
            (0, -1) => "-sqrt(2)".to_string(),
            (0, b) => format!("{b}*sqrt(2)"),
            (a, b) if b > 0 => format!("{a} + {b}*sqrt(2)"),
            (a, b) => format!("{a} - {}*sqrt(2)", -b),
        };
        if self.den_pow2 == 0 {
            write!(f, "{num}")
        } else {
            write!(f, "({num})/2^{}", self.den_pow2)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn canonical_form_strips_twos() {
        let c = Coefficient::new(12, 0); // 12 = 3 * 2^2 -> 3 * 2^(4/2)
        assert_eq!(c.numerator(), 3);
        assert_eq!(c.half_exponent(), 4);
        assert_eq!(Coefficient::new(0, -7), Coefficient::ZERO);
    }

    #[test]
    fn addition_same_parity() {
        // 1/2 + 1/2 = 1
        let half = Coefficient::new(1, -2);
        assert_eq!(half.add(half), Coefficient::ONE);
        // 1/2 - 1/2 = 0
        assert_eq!(half.sub(half), Coefficient::ZERO);
    }

    #[test]
    fn addition_parity_mismatch_is_detected() {
        let one = Coefficient::ONE;
        let sqrt2 = Coefficient::new(1, 1);
        assert_eq!(one.checked_add(sqrt2), None);
    }

    #[test]
    fn div_sqrt2_roundtrip() {
        let c = Coefficient::new(3, 0);
        let d = c.div_sqrt2().div_sqrt2();
        assert_eq!(d, Coefficient::new(3, -2));
        assert!((d.to_f64() - 1.5).abs() < 1e-15);
    }

    #[test]
    fn radical2_sign_mixed_terms() {
        // 3 - 2*sqrt(2) > 0 (9 > 8)
        assert_eq!(Radical2::new(3, -2, 0).signum(), 1);
        // 2 - 2*sqrt(2) < 0 (4 < 8)
        assert_eq!(Radical2::new(2, -2, 0).signum(), -1);
        // -3 + 2*sqrt(2) < 0
        assert_eq!(Radical2::new(-3, 2, 0).signum(), -1);
    }

    #[test]
    fn radical2_pow2_half() {
        assert_eq!(Radical2::pow2_half(0), Radical2::ONE);
        assert_eq!(Radical2::pow2_half(1), Radical2::SQRT2);
        assert_eq!(Radical2::pow2_half(2), Radical2::from_int(2));
        assert_eq!(Radical2::pow2_half(-1), Radical2::new(0, 1, 1));
        assert!((Radical2::pow2_half(-3).to_f64() - 2f64.powf(-1.5)).abs() < 1e-15);
    }

    proptest! {
        #[test]
        fn coefficient_roundtrips_through_radical2(num in -1000i64..1000, half in -10i32..10) {
            let c = Coefficient::new(num, half);
            let r = c.to_radical2();
            prop_assert!((r.to_f64() - c.to_f64()).abs() < 1e-9);
        }

        #[test]
        fn radical2_order_matches_f64(
            a1 in -100i128..100, b1 in -100i128..100, d1 in 0u32..4,
            a2 in -100i128..100, b2 in -100i128..100, d2 in 0u32..4,
        ) {
            let x = Radical2::new(a1, b1, d1);
            let y = Radical2::new(a2, b2, d2);
            let fx = x.to_f64();
            let fy = y.to_f64();
            if (fx - fy).abs() > 1e-9 {
                prop_assert_eq!(x.cmp(&y) == std::cmp::Ordering::Less, fx < fy);
            }
        }

        #[test]
        fn radical2_ring_ops_match_f64(
            a1 in -50i128..50, b1 in -50i128..50,
            a2 in -50i128..50, b2 in -50i128..50,
        ) {
            let x = Radical2::new(a1, b1, 1);
            let y = Radical2::new(a2, b2, 2);
            prop_assert!((x.add(y).to_f64() - (x.to_f64() + y.to_f64())).abs() < 1e-9);
            prop_assert!((x.mul(y).to_f64() - (x.to_f64() * y.to_f64())).abs() < 1e-6);
        }
    }
}
