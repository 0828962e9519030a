//! Rewards live in `[-inf, +inf)`: a finite real or negative infinity.

use std::cmp::Ordering;
use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign};
use std::str::FromStr;

use crate::error::{MdpError, Result};

/// An element of `[-inf, +inf)`.
///
/// The wrapped `f64` is either finite or `f64::NEG_INFINITY`; NaN and
/// `+inf` cannot be constructed, which makes the ordering total.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ExtendedReal(f64);

impl ExtendedReal {
    pub const NEG_INF: ExtendedReal = ExtendedReal(f64::NEG_INFINITY);
    pub const ZERO: ExtendedReal = ExtendedReal(0.0);

    pub fn new(v: f64) -> Result<Self> {
        if v.is_nan() || v == f64::INFINITY {
            Err(MdpError::Domain(format!("{v} is not in [-inf, +inf)")))
        } else {
            Ok(ExtendedReal(v))
        }
    }

    /// Panics on NaN or `+inf`; use for values known to be in range.
    pub fn finite(v: f64) -> Self {
        assert!(v.is_finite(), "expected a finite value, got {v}");
        ExtendedReal(v)
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn is_neg_inf(self) -> bool {
        self.0 == f64::NEG_INFINITY
    }

    pub fn is_finite(self) -> bool {
        self.0.is_finite()
    }

    /// `max(v, 0)`; finite whenever defined.
    pub fn positive_part(self) -> f64 {
        self.0.max(0.0)
    }

    /// `max(-v, 0)`, which is `+inf` for `NEG_INF`.
    pub fn negative_part(self) -> f64 {
        (-self.0).max(0.0)
    }

    pub fn max(self, other: Self) -> Self {
        if self >= other {
            self
        } else {
            other
        }
    }

    pub fn min(self, other: Self) -> Self {
        if self <= other {
            self
        } else {
            other
        }
    }

    /// Multiply by a probability weight, with `0 * (-inf) = 0`.
    pub fn scale(self, weight: f64) -> Self {
        debug_assert!(weight >= 0.0 && weight.is_finite());
        if weight == 0.0 {
            ExtendedReal::ZERO
        } else {
            ExtendedReal(self.0 * weight)
        }
    }
}

impl Default for ExtendedReal {
    fn default() -> Self {
        ExtendedReal::ZERO
    }
}

impl Eq for ExtendedReal {}

impl PartialOrd for ExtendedReal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ExtendedReal {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.total_cmp(&other.0)
    }
}

impl Add for ExtendedReal {
    type Output = ExtendedReal;

    fn add(self, rhs: Self) -> Self {
        // -inf absorbs; +inf never occurs so there is no indeterminate form.
        ExtendedReal(self.0 + rhs.0)
    }
}

impl AddAssign for ExtendedReal {
    fn add_assign(&mut self, rhs: Self) {
        *self = *self + rhs;
    }
}

impl Sum for ExtendedReal {
    fn sum<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(ExtendedReal::ZERO, Add::add)
    }
}

impl From<i32> for ExtendedReal {
    fn from(v: i32) -> Self {
        ExtendedReal(v as f64)
    }
}

impl fmt::Display for ExtendedReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_neg_inf() {
            f.write_str("-inf")
        } else {
            // `{}` on f64 is the shortest representation that round-trips.
            write!(f, "{}", self.0)
        }
    }
}

impl FromStr for ExtendedReal {
    type Err = MdpError;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "-inf" {
            return Ok(ExtendedReal::NEG_INF);
        }
        let v: f64 = s.parse().map_err(|_| MdpError::Domain(format!("cannot parse {s:?} as an extended real")))?;
        ExtendedReal::new(v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn rejects_positive_infinity_and_nan() {
        assert!(ExtendedReal::new(f64::INFINITY).is_err());
        assert!(ExtendedReal::new(f64::NAN).is_err());
        assert!(ExtendedReal::new(f64::NEG_INFINITY).unwrap().is_neg_inf());
    }

    #[test]
    fn display_round_trips() {
        for v in [ExtendedReal::NEG_INF, ExtendedReal::finite(0.1), ExtendedReal::finite(-3.25e-17)] {
            let s = v.to_string();
            assert_eq!(s.parse::<ExtendedReal>().unwrap(), v);
        }
        assert_eq!(ExtendedReal::NEG_INF.to_string(), "-inf");
    }

    #[test]
    fn zero_weight_kills_neg_inf() {
        assert_eq!(ExtendedReal::NEG_INF.scale(0.0), ExtendedReal::ZERO);
        assert!(ExtendedReal::NEG_INF.scale(1e-300).is_neg_inf());
    }

    proptest! {
        #[test]
        fn neg_inf_absorbs_and_is_identity_for_max(v in -1e300f64..1e300) {
            let x = ExtendedReal::finite(v);
            prop_assert!((ExtendedReal::NEG_INF + x).is_neg_inf());
            prop_assert!((x + ExtendedReal::NEG_INF).is_neg_inf());
            prop_assert_eq!(ExtendedReal::NEG_INF.max(x), x);
            prop_assert_eq!(x.max(ExtendedReal::NEG_INF), x);
            prop_assert!(ExtendedReal::NEG_INF < x);
        }

        #[test]
        fn parts_recombine(v in -1e6f64..1e6) {
            let x = ExtendedReal::finite(v);
            prop_assert_eq!(x.positive_part() - x.negative_part(), v);
        }
    }
}
