use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::{Deserialize, Deserializer, Serialize};

use crate::error::{ContentionError, Result};

/// A transmission probability in `[0, 1]`.
///
/// Stored as an `f64`; [`Probability::to_ratio`] recovers the exact binary
/// value so that threshold comparisons can be done without rounding.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd, Serialize)]
#[serde(transparent)]
pub struct Probability(f64);

impl Probability {
    pub const ZERO: Probability = Probability(0.0);
    pub const ONE: Probability = Probability(1.0);

    pub fn new(value: f64) -> Result<Self> {
        if value.is_finite() && (0.0..=1.0).contains(&value) {
            Ok(Probability(value))
        } else {
            Err(ContentionError::InvalidParameter(format!(
                "probability {value} outside [0, 1]"
            )))
        }
    }

    #[inline]
    pub fn get(self) -> f64 {
        self.0
    }

    /// True when the value is neither 0 nor 1, i.e. sampling is required.
    #[inline]
    pub fn is_random(self) -> bool {
        self.0 > 0.0 && self.0 < 1.0
    }

    /// Exact rational value of the stored binary float.
    pub fn to_ratio(self) -> BigRational {
        BigRational::from_float(self.0).unwrap_or_else(|| BigRational::from_integer(BigInt::from(0)))
    }

    /// Rejects the endpoints; most of the analysis needs `p` in `(0, 1)`.
    pub fn require_open(self) -> Result<Self> {
        if self.is_random() {
            Ok(self)
        } else {
            Err(ContentionError::InvalidParameter(format!(
                "p = {} must lie strictly inside (0, 1)",
                self.0
            )))
        }
    }
}

impl fmt::Display for Probability {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl TryFrom<f64> for Probability {
    type Error = ContentionError;

    fn try_from(value: f64) -> Result<Self> {
        Probability::new(value)
    }
}

impl std::str::FromStr for Probability {
    type Err = ContentionError;

    fn from_str(s: &str) -> Result<Self> {
        let value: f64 = s
            .trim()
            .parse()
            .map_err(|_| ContentionError::InvalidParameter(format!("not a probability: {s:?}")))?;
        Probability::new(value)
    }
}

impl<'de> Deserialize<'de> for Probability {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let v = f64::deserialize(deserializer)?;
        Probability::new(v).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_out_of_range() {
        assert!(Probability::new(-0.1).is_err());
        assert!(Probability::new(1.5).is_err());
        assert!(Probability::new(f64::NAN).is_err());
        assert!(Probability::new(0.0).is_ok());
        assert!(Probability::new(1.0).is_ok());
    }

    #[test]
    fn exact_ratio_of_three_quarters() {
        let p = Probability::new(0.75).unwrap();
        assert_eq!(p.to_ratio(), BigRational::new(3.into(), 4.into()));
    }
}
