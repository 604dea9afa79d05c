use std::cmp::Ordering;
use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign, Mul};

use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// A value in `[0, ∞]`.
///
/// Finite values compare as reals and `∞` is strictly greater than every
/// finite value. Multiplication follows the convex-analysis convention
/// `0 · ∞ = 0`.
#[derive(Clone, Copy, PartialEq)]
pub struct ExtReal(f64);

impl ExtReal {
    pub const ZERO: ExtReal = ExtReal(0.0);
    pub const ONE: ExtReal = ExtReal(1.0);
    pub const INFINITY: ExtReal = ExtReal(f64::INFINITY);

    /// Wraps a nonnegative real or `+∞`. Negative zero is normalized to zero.
    ///
    /// Returns `None` for NaN or negative input.
    pub fn new(value: f64) -> Option<ExtReal> {
        if value.is_nan() || value < 0.0 {
            None
        } else {
            Some(ExtReal(value + 0.0))
        }
    }

    /// Like [`ExtReal::new`] but clamps tiny negative round-off to zero.
    ///
    /// # Panics
    /// Panics on NaN or on values below `-1e-300`.
    pub fn from_nonneg(value: f64) -> ExtReal {
        assert!(!value.is_nan(), "NaN is not an extended nonnegative real");
        assert!(value >= -1e-300, "negative value {value} is not in [0, ∞]");
        ExtReal(value.max(0.0))
    }

    pub fn finite(value: f64) -> ExtReal {
        assert!(value.is_finite());
        ExtReal::from_nonneg(value)
    }

    pub fn is_infinite(self) -> bool {
        self.0.is_infinite()
    }

    pub fn is_finite(self) -> bool {
        self.0.is_finite()
    }

    /// The raw value; `f64::INFINITY` for `∞`.
    pub fn get(self) -> f64 {
        self.0
    }

    /// The finite value, if any.
    pub fn to_finite(self) -> Option<f64> {
        self.is_finite().then_some(self.0)
    }

    /// Scalar multiple with `0 · ∞ = 0` and `c · ∞ = ∞` for `c > 0`.
    pub fn scale(self, c: f64) -> ExtReal {
        assert!(c >= 0.0 && !c.is_nan(), "scale factor must be nonnegative");
        if c == 0.0 {
            ExtReal::ZERO
        } else {
            ExtReal(self.0 * c)
        }
    }

    pub fn min(self, other: ExtReal) -> ExtReal {
        if other < self {
            other
        } else {
            self
        }
    }

    pub fn max(self, other: ExtReal) -> ExtReal {
        if other > self {
            other
        } else {
            self
        }
    }

    /// `self ≤ other + tol·max(1, other)`; `∞ ≤ ∞` holds.
    pub fn le_tol(self, other: ExtReal, tol: f64) -> bool {
        if other.is_infinite() {
            return true;
        }
        if self.is_infinite() {
            return false;
        }
        self.0 <= other.0 + tol * other.0.max(1.0)
    }

    /// `self ≤ other + tol·max(REL_FLOOR, other)`: relative at every scale, so
    /// a violation of size `1e-12` against `0` is still detected.
    pub fn le_rel(self, other: ExtReal, tol: f64) -> bool {
        if other.is_infinite() {
            return true;
        }
        if self.is_infinite() {
            return false;
        }
        self.0 <= other.0 + tol * other.0.max(REL_FLOOR)
    }
}

/// Scale below which [`ExtReal::le_rel`] stops being relative.
pub const REL_FLOOR: f64 = 1e-15;

impl Eq for ExtReal {}

impl PartialOrd for ExtReal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ExtReal {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.total_cmp(&other.0)
    }
}

impl Default for ExtReal {
    fn default() -> Self {
        ExtReal::ZERO
    }
}

impl Add for ExtReal {
    type Output = ExtReal;
    fn add(self, rhs: ExtReal) -> ExtReal {
        ExtReal(self.0 + rhs.0)
    }
}

impl AddAssign for ExtReal {
    fn add_assign(&mut self, rhs: ExtReal) {
        self.0 += rhs.0;
    }
}

impl Mul for ExtReal {
    type Output = ExtReal;
    fn mul(self, rhs: ExtReal) -> ExtReal {
        if self.0 == 0.0 || rhs.0 == 0.0 {
            ExtReal::ZERO
        } else {
            ExtReal(self.0 * rhs.0)
        }
    }
}

impl Sum for ExtReal {
    fn sum<I: Iterator<Item = ExtReal>>(iter: I) -> ExtReal {
        iter.fold(ExtReal::ZERO, Add::add)
    }
}

impl From<ExtReal> for f64 {
    fn from(value: ExtReal) -> f64 {
        value.0
    }
}

/// Formats `∞` as the literal `inf`; finite values use the shortest
/// round-trip representation.
impl fmt::Display for ExtReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_infinite() {
            f.write_str("inf")
        } else {
            write!(f, "{}", self.0)
        }
    }
}

impl fmt::Debug for ExtReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl std::str::FromStr for ExtReal {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s == "inf" {
            return Ok(ExtReal::INFINITY);
        }
        let v: f64 = s.parse().map_err(|_| format!("invalid number `{s}`"))?;
        if v.is_infinite() {
            return Err(format!("use the literal `inf` for infinity, got `{s}`"));
        }
        ExtReal::new(v).ok_or_else(|| format!("`{s}` is not in [0, inf]"))
    }
}

impl Serialize for ExtReal {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        if self.is_infinite() {
            serializer.serialize_str("inf")
        } else {
            serializer.serialize_f64(self.0)
        }
    }
}

impl<'de> Deserialize<'de> for ExtReal {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Num(f64),
            Str(String),
        }
        match Repr::deserialize(deserializer)? {
            Repr::Num(v) if v.is_finite() => {
                ExtReal::new(v).ok_or_else(|| serde::de::Error::custom("negative value"))
            }
            Repr::Num(_) => Err(serde::de::Error::custom("non-finite number")),
            Repr::Str(s) => s.parse().map_err(serde::de::Error::custom),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn infinity_dominates_order() {
        assert!(ExtReal::INFINITY > ExtReal::finite(1e300));
        assert!(ExtReal::finite(1.0) < ExtReal::finite(2.0));
        assert_eq!(ExtReal::INFINITY.cmp(&ExtReal::INFINITY), Ordering::Equal);
    }

    #[test]
    fn zero_times_infinity_is_zero() {
        assert_eq!(ExtReal::ZERO * ExtReal::INFINITY, ExtReal::ZERO);
        assert_eq!(ExtReal::INFINITY.scale(0.0), ExtReal::ZERO);
        assert_eq!(ExtReal::INFINITY.scale(0.5), ExtReal::INFINITY);
        assert_eq!(ExtReal::finite(2.0) * ExtReal::INFINITY, ExtReal::INFINITY);
    }

    #[test]
    fn infinity_absorbs_addition() {
        assert_eq!(ExtReal::INFINITY + ExtReal::finite(3.0), ExtReal::INFINITY);
        let s: ExtReal = [1.0, 2.0].iter().map(|&v| ExtReal::finite(v)).sum();
        assert_eq!(s.get(), 3.0);
    }

    #[test]
    fn rejects_nan_and_negative() {
        assert!(ExtReal::new(f64::NAN).is_none());
        assert!(ExtReal::new(-1.0).is_none());
        assert_eq!(ExtReal::new(-0.0).unwrap().get().to_bits(), 0.0f64.to_bits());
    }

    #[test]
    fn inf_literal_round_trips() {
        assert_eq!(ExtReal::INFINITY.to_string(), "inf");
        assert_eq!("inf".parse::<ExtReal>().unwrap(), ExtReal::INFINITY);
        assert_eq!("0.75".parse::<ExtReal>().unwrap().get(), 0.75);
        assert!("-1".parse::<ExtReal>().is_err());
    }
}
