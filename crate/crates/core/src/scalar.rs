//! Scalar abstraction shared by every module.
//!
//! All distances, points and tolerances are carried in a type implementing
//! [`Scalar`]. Floating types (`f32`, `f64`) and the exact rational
//! `Ratio<i64>` are supported; the exact type keeps the worked examples
//! (halves, thirds, dyadic grids) free of rounding.

use std::fmt::{Debug, Display};

use num_rational::Ratio;
use num_traits::{FromPrimitive, Num, Signed, ToPrimitive};

/// Ordered field-like number used for points and distances.
pub trait Scalar:
    Num
    + Signed
    + PartialOrd
    + Copy
    + FromPrimitive
    + ToPrimitive
    + Debug
    + Display
    + Send
    + Sync
    + 'static
{
    /// Converts an `f64` literal. Exact types round to a nearby rational.
    fn lit(v: f64) -> Self {
        Self::from_f64(v).unwrap_or_else(|| panic!("{v} is not representable"))
    }

    /// The rational `num / den`, computed in the scalar's own arithmetic.
    fn ratio(num: i64, den: i64) -> Self {
        let n = Self::from_i64(num).expect("integer numerator");
        let d = Self::from_i64(den).expect("integer denominator");
        n / d
    }

    /// Parses a decimal literal such as `0.25`, `3` or `1e-9`.
    fn decimal(text: &str) -> Option<Self> {
        text.parse::<f64>().ok().and_then(Self::from_f64)
    }

    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    fn max_of(self, other: Self) -> Self {
        if other > self {
            other
        } else {
            self
        }
    }

    fn min_of(self, other: Self) -> Self {
        if other < self {
            other
        } else {
            self
        }
    }

    /// Absolute difference `|self - other|`.
    fn dist(self, other: Self) -> Self {
        (self - other).abs()
    }

    fn near(self, other: Self, tol: Self) -> bool {
        self.dist(other) <= tol
    }

    /// Default absolute tolerance for point equality (1e-9).
    fn tol_eq() -> Self {
        Self::lit(crate::DEFAULT_TOL_EQ)
    }
}

impl Scalar for f32 {
    fn decimal(text: &str) -> Option<Self> {
        text.parse().ok()
    }

    // 1e-9 is below f32 resolution near 1; use a few ulps instead.
    fn tol_eq() -> Self {
        1e-6
    }
}

impl Scalar for f64 {}

impl Scalar for Ratio<i64> {
    fn lit(v: f64) -> Self {
        Ratio::approximate_float(v).unwrap_or_else(|| panic!("{v} is not representable"))
    }

    fn ratio(num: i64, den: i64) -> Self {
        Ratio::new(num, den)
    }

    /// Exact whenever the digits fit in `i64`; longer literals are rounded
    /// through `f64`.
    fn decimal(text: &str) -> Option<Self> {
        exact_decimal(text).or_else(|| text.parse::<f64>().ok().and_then(Ratio::approximate_float))
    }
}

fn exact_decimal(text: &str) -> Option<Ratio<i64>> {
    let (body, exp) = match text.find(['e', 'E']) {
        Some(i) => (&text[..i], text[i + 1..].parse::<i32>().ok()?),
        None => (text, 0),
    };
    let (int, frac) = body.split_once('.').unwrap_or((body, ""));
    let digits: String = [int, frac].concat();
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    let mantissa: i64 = digits.parse().ok()?;
    let shift = exp.checked_sub(i32::try_from(frac.len()).ok()?)?;
    let ten = 10i64.checked_pow(shift.unsigned_abs())?;
    if shift >= 0 {
        Some(Ratio::from_integer(mantissa.checked_mul(ten)?))
    } else {
        Some(Ratio::new(mantissa, ten))
    }
}

/// Compares two points lexicographically; used to break ties deterministically.
pub(crate) fn lex_less<S: Scalar>(a: &[S], b: &[S]) -> bool {
    for (x, y) in a.iter().zip(b) {
        if x < y {
            return true;
        }
        if x > y {
            return false;
        }
    }
    a.len() < b.len()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ratio_is_exact_for_rationals() {
        let half: Ratio<i64> = Scalar::ratio(1, 2);
        assert_eq!(half, Ratio::new(1, 2));
        let third: Ratio<i64> = Scalar::ratio(2, 6);
        assert_eq!(third, Ratio::new(1, 3));
    }

    #[test]
    fn lit_and_back() {
        assert_eq!(f64::lit(0.25), 0.25);
        assert_eq!(Ratio::<i64>::lit(0.25), Ratio::new(1, 4));
        assert_eq!(Ratio::new(3i64, 2).as_f64(), 1.5);
    }

    #[test]
    fn decimal_literals() {
        assert_eq!(
            f64::decimal("0.0018843172295606389"),
            Some(0.0018843172295606389)
        );
        assert_eq!(f64::decimal("1e-9"), Some(1e-9));
        assert_eq!(Ratio::<i64>::decimal("0.125"), Some(Ratio::new(1, 8)));
        assert_eq!(Ratio::<i64>::decimal("25e-2"), Some(Ratio::new(1, 4)));
        assert_eq!(Ratio::<i64>::decimal("3E2"), Some(Ratio::from_integer(300)));
        assert!(Ratio::<i64>::decimal("0.0018843172295606389").is_some());
        assert_eq!(f32::decimal("x"), None);
    }

    #[test]
    fn lexicographic_order() {
        assert!(lex_less(&[0.0, 2.0], &[0.5, 1.0]));
        assert!(lex_less(&[0.5, 1.0], &[0.5, 1.5]));
        assert!(!lex_less(&[0.5, 1.0], &[0.5, 1.0]));
    }
}
