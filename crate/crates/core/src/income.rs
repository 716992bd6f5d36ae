//! Incomes and income distributions.

use alloc::vec::Vec;

use crate::error::{Error, Result};

/// A nonnegative, finite income.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(try_from = "f64", into = "f64"))]
pub struct Income(f64);

impl Income {
    pub const ZERO: Income = Income(0.0);

    pub fn new(value: f64) -> Result<Self> {
        if value.is_nan() {
            Err(Error::NotANumber)
        } else if !value.is_finite() || value < 0.0 {
            Err(Error::invalid("income", value, "a finite nonnegative real"))
        } else {
            // normalise -0.0
            Ok(Income(value + 0.0))
        }
    }

    #[inline]
    pub fn get(self) -> f64 {
        self.0
    }
}

impl TryFrom<f64> for Income {
    type Error = Error;

    fn try_from(value: f64) -> Result<Self> {
        Income::new(value)
    }
}

impl From<Income> for f64 {
    fn from(y: Income) -> f64 {
        y.0
    }
}

impl core::fmt::Display for Income {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        core::fmt::Display::fmt(&self.0, f)
    }
}

/// A nonempty list of incomes. Every output computed from a distribution is
/// invariant under permutation of its entries.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(try_from = "Vec<Income>", into = "Vec<Income>"))]
pub struct Distribution {
    incomes: Vec<Income>,
}

impl Distribution {
    pub fn new(incomes: Vec<Income>) -> Result<Self> {
        if incomes.is_empty() {
            return Err(Error::EmptyDistribution);
        }
        Ok(Distribution { incomes })
    }

    pub fn from_values(values: &[f64]) -> Result<Self> {
        let incomes = values.iter().map(|&v| Income::new(v)).collect::<Result<Vec<_>>>()?;
        Distribution::new(incomes)
    }

    pub fn incomes(&self) -> &[Income] {
        &self.incomes
    }

    pub fn len(&self) -> usize {
        self.incomes.len()
    }

    /// Always false; kept for API symmetry with `len`.
    pub fn is_empty(&self) -> bool {
        self.incomes.is_empty()
    }

    pub fn min(&self) -> Income {
        self.incomes
            .iter()
            .copied()
            .fold(self.incomes[0], |a, b| if b < a { b } else { a })
    }

    pub fn max(&self) -> Income {
        self.incomes
            .iter()
            .copied()
            .fold(self.incomes[0], |a, b| if b > a { b } else { a })
    }
}

impl TryFrom<Vec<Income>> for Distribution {
    type Error = Error;

    fn try_from(incomes: Vec<Income>) -> Result<Self> {
        Distribution::new(incomes)
    }
}

impl From<Distribution> for Vec<Income> {
    fn from(d: Distribution) -> Self {
        d.incomes
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_negative_and_non_finite() {
        assert!(Income::new(-1.0).is_err());
        assert!(Income::new(f64::INFINITY).is_err());
        assert_eq!(Income::new(f64::NAN), Err(Error::NotANumber));
        assert_eq!(Income::new(-0.0).unwrap().get().to_bits(), 0.0f64.to_bits());
    }

    #[test]
    fn empty_distribution_is_an_error() {
        assert_eq!(Distribution::from_values(&[]), Err(Error::EmptyDistribution));
        let d = Distribution::from_values(&[3.0, 1.0, 2.0]).unwrap();
        assert_eq!(d.min().get(), 1.0);
        assert_eq!(d.max().get(), 3.0);
    }
}
