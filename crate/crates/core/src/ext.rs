//! Extended real numbers `ℝ ∪ {−∞, +∞}` carrying values of `f` and `W`.
//!
//! Arithmetic is checked: `(−∞) + x = −∞` for any `x < +∞`, positive scaling
//! preserves infinities, and any expression that would combine `+∞` with `−∞`
//! returns [`Error::Indeterminate`] instead of producing a NaN.

use core::cmp::Ordering;
use core::fmt;

use crate::error::{Error, Result};

/// An extended real number.
///
/// The derived ordering is the natural one (`NegInf < Finite(_) < PosInf`)
/// as long as `Finite` only ever holds finite values; build values through
/// [`WelfareValue::new`] to keep that guarantee.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub enum WelfareValue {
    NegInf,
    Finite(f64),
    PosInf,
}

impl WelfareValue {
    pub const ZERO: WelfareValue = WelfareValue::Finite(0.0);

    /// Classifies a float, mapping IEEE infinities onto the infinite variants.
    pub fn new(x: f64) -> Result<Self> {
        if x.is_nan() {
            Err(Error::NotANumber)
        } else if x == f64::INFINITY {
            Ok(WelfareValue::PosInf)
        } else if x == f64::NEG_INFINITY {
            Ok(WelfareValue::NegInf)
        } else {
            Ok(WelfareValue::Finite(x))
        }
    }

    pub fn finite(self) -> Option<f64> {
        match self {
            WelfareValue::Finite(x) => Some(x),
            _ => None,
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self, WelfareValue::Finite(_))
    }

    pub fn is_neg_inf(self) -> bool {
        matches!(self, WelfareValue::NegInf)
    }

    pub fn is_pos_inf(self) -> bool {
        matches!(self, WelfareValue::PosInf)
    }

    /// IEEE view of the value, for numeric kernels only.
    pub fn to_f64(self) -> f64 {
        match self {
            WelfareValue::NegInf => f64::NEG_INFINITY,
            WelfareValue::Finite(x) => x,
            WelfareValue::PosInf => f64::INFINITY,
        }
    }

    pub fn checked_add(self, rhs: WelfareValue) -> Result<WelfareValue> {
        use WelfareValue::*;
        match (self, rhs) {
            (NegInf, PosInf) | (PosInf, NegInf) => Err(Error::Indeterminate),
            (NegInf, _) | (_, NegInf) => Ok(NegInf),
            (PosInf, _) | (_, PosInf) => Ok(PosInf),
            (Finite(a), Finite(b)) => WelfareValue::new(a + b),
        }
    }

    pub fn checked_neg(self) -> WelfareValue {
        match self {
            WelfareValue::NegInf => WelfareValue::PosInf,
            WelfareValue::Finite(x) => WelfareValue::Finite(-x),
            WelfareValue::PosInf => WelfareValue::NegInf,
        }
    }

    pub fn checked_sub(self, rhs: WelfareValue) -> Result<WelfareValue> {
        self.checked_add(rhs.checked_neg())
    }

    /// Multiplies by a finite real. `0 · (±∞)` is indeterminate.
    pub fn scale(self, c: f64) -> Result<WelfareValue> {
        if !c.is_finite() {
            return Err(Error::invalid("scale factor", c, "a finite real"));
        }
        match self {
            WelfareValue::Finite(x) => WelfareValue::new(c * x),
            _ if c == 0.0 => Err(Error::Indeterminate),
            inf if c > 0.0 => Ok(inf),
            inf => Ok(inf.checked_neg()),
        }
    }

    /// Sum of a sequence under the checked contract.
    pub fn sum<I: IntoIterator<Item = WelfareValue>>(values: I) -> Result<WelfareValue> {
        values
            .into_iter()
            .try_fold(WelfareValue::ZERO, WelfareValue::checked_add)
    }

    pub fn total_cmp(&self, other: &WelfareValue) -> Ordering {
        self.partial_cmp(other).unwrap_or(Ordering::Equal)
    }
}

impl From<f64> for WelfareValue {
    /// Lossy conversion: NaN is mapped to `NegInf`. Prefer [`WelfareValue::new`].
    fn from(x: f64) -> Self {
        WelfareValue::new(x).unwrap_or(WelfareValue::NegInf)
    }
}

impl fmt::Display for WelfareValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WelfareValue::NegInf => f.write_str("-inf"),
            WelfareValue::Finite(x) => write!(f, "{x}"),
            WelfareValue::PosInf => f.write_str("+inf"),
        }
    }
}

#[cfg(feature = "serde")]
mod wire {
    use super::WelfareValue;
    use serde::de::{self, Deserializer, Visitor};
    use serde::{Deserialize, Serialize, Serializer};

    // Finite values travel as JSON numbers, infinities as the strings
    // "-inf" / "+inf".
    impl Serialize for WelfareValue {
        fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
            match self {
                WelfareValue::NegInf => s.serialize_str("-inf"),
                WelfareValue::Finite(x) => s.serialize_f64(*x),
                WelfareValue::PosInf => s.serialize_str("+inf"),
            }
        }
    }

    struct ValueVisitor;

    impl Visitor<'_> for ValueVisitor {
        type Value = WelfareValue;

        fn expecting(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
            f.write_str("a number, \"-inf\" or \"+inf\"")
        }

        fn visit_f64<E: de::Error>(self, v: f64) -> Result<WelfareValue, E> {
            WelfareValue::new(v).map_err(E::custom)
        }

        fn visit_i64<E: de::Error>(self, v: i64) -> Result<WelfareValue, E> {
            Ok(WelfareValue::Finite(v as f64))
        }

        fn visit_u64<E: de::Error>(self, v: u64) -> Result<WelfareValue, E> {
            Ok(WelfareValue::Finite(v as f64))
        }

        fn visit_str<E: de::Error>(self, v: &str) -> Result<WelfareValue, E> {
            match v {
                "-inf" => Ok(WelfareValue::NegInf),
                "+inf" | "inf" => Ok(WelfareValue::PosInf),
                other => Err(E::invalid_value(de::Unexpected::Str(other), &self)),
            }
        }
    }

    impl<'de> Deserialize<'de> for WelfareValue {
        fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
            d.deserialize_any(ValueVisitor)
        }
    }
}
