//! Quasi-periodic profiles and the tabulated families they generate.
//!
//! A [`PeriodicProfile`] is a strictly decreasing piecewise-linear function
//! `g` on a fundamental interval `[0, L]` with `g(L) − g(0) = −ln 2`,
//! extended to the whole line by `g(x + L) = g(x) − ln 2`. It generates
//!
//! * under [`PeriodicLaw::Fraction`] (`L = −ln λ`): `f(y) = −exp(g(ln y))`,
//!   which satisfies `f(λy) = 2f(y)`;
//! * under [`PeriodicLaw::Difference`] (`L = Δ`): `f(y) = −exp(g(y))`,
//!   which satisfies `f(y − Δ) = 2f(y)`.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math::{exp, floor, ln, LN_2};

/// Knots sampled per fundamental interval by [`PeriodicProfile::from_fn`]
/// when no resolution is given.
pub const DEFAULT_RESOLUTION: usize = 512;

const DECREMENT_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(try_from = "RawProfile"))]
pub struct PeriodicProfile {
    knots: Vec<(f64, f64)>,
    interval_length: f64,
    decrement: f64,
}

#[cfg(feature = "serde")]
#[derive(serde::Deserialize)]
struct RawProfile {
    knots: Vec<(f64, f64)>,
    #[serde(default)]
    interval_length: Option<f64>,
    #[serde(default)]
    decrement: Option<f64>,
}

#[cfg(feature = "serde")]
impl TryFrom<RawProfile> for PeriodicProfile {
    type Error = Error;

    fn try_from(raw: RawProfile) -> Result<Self> {
        let profile = PeriodicProfile::new(raw.knots)?;
        if let Some(len) = raw.interval_length {
            if (len - profile.interval_length).abs() > 1e-12 * len.abs().max(1.0) {
                return Err(Error::InvalidProfile {
                    reason: "interval_length disagrees with the last knot position",
                });
            }
        }
        if let Some(dec) = raw.decrement {
            if (dec + LN_2).abs() > DECREMENT_TOL {
                return Err(Error::InvalidProfile {
                    reason: "decrement must equal -ln 2",
                });
            }
        }
        Ok(profile)
    }
}

impl PeriodicProfile {
    /// Builds a profile from `(position, g)` knots. The first knot must sit at
    /// position 0 and the last at the interval length; positions must be
    /// strictly increasing, values strictly decreasing, and the values must
    /// drop by `ln 2` across the interval (to 1e−12, after which the last
    /// value is pinned to `g(0) − ln 2` so the periodic extension is
    /// continuous).
    pub fn new(mut knots: Vec<(f64, f64)>) -> Result<Self> {
        if knots.len() < 2 {
            return Err(Error::InvalidProfile {
                reason: "at least two knots are required",
            });
        }
        if knots.iter().any(|(x, g)| !x.is_finite() || !g.is_finite()) {
            return Err(Error::InvalidProfile {
                reason: "knots must be finite",
            });
        }
        if knots[0].0 != 0.0 {
            return Err(Error::InvalidProfile {
                reason: "the first knot must be at position 0",
            });
        }
        for w in knots.windows(2) {
            if w[1].0 <= w[0].0 {
                return Err(Error::InvalidProfile {
                    reason: "knot positions must be strictly increasing",
                });
            }
            if w[1].1 >= w[0].1 {
                return Err(Error::InvalidProfile {
                    reason: "g must be strictly decreasing",
                });
            }
        }
        let last = knots.len() - 1;
        let decrement = knots[last].1 - knots[0].1;
        if (decrement + LN_2).abs() > DECREMENT_TOL {
            return Err(Error::InvalidProfile {
                reason: "g(end) - g(start) must equal -ln 2",
            });
        }
        knots[last].1 = knots[0].1 - LN_2;
        let interval_length = knots[last].0;
        Ok(PeriodicProfile {
            knots,
            interval_length,
            decrement: -LN_2,
        })
    }

    /// The chord `g(x) = g0 − x·ln 2 / L`.
    pub fn linear(interval_length: f64, g0: f64) -> Result<Self> {
        if !(interval_length > 0.0) || !interval_length.is_finite() {
            return Err(Error::invalid("interval length", interval_length, "a positive real"));
        }
        PeriodicProfile::new(alloc::vec![(0.0, g0), (interval_length, g0 - LN_2)])
    }

    /// Samples a continuous decreasing `g` at `resolution` evenly spaced knots.
    pub fn from_fn<G: Fn(f64) -> f64>(interval_length: f64, resolution: usize, g: G) -> Result<Self> {
        if !(interval_length > 0.0) || !interval_length.is_finite() {
            return Err(Error::invalid("interval length", interval_length, "a positive real"));
        }
        if resolution < 2 {
            return Err(Error::invalid("resolution", resolution as f64, "at least 2 knots"));
        }
        let step = interval_length / (resolution - 1) as f64;
        let knots = (0..resolution)
            .map(|i| {
                let x = if i + 1 == resolution {
                    interval_length
                } else {
                    i as f64 * step
                };
                (x, g(x))
            })
            .collect();
        PeriodicProfile::new(knots)
    }

    pub fn knots(&self) -> &[(f64, f64)] {
        &self.knots
    }

    pub fn interval_length(&self) -> f64 {
        self.interval_length
    }

    /// `g(end) − g(start)`; always `−ln 2`.
    pub fn decrement(&self) -> f64 {
        self.decrement
    }

    /// True when every interior knot lies on the chord (to 1e−12).
    pub fn is_linear(&self) -> bool {
        let (x0, g0) = self.knots[0];
        let slope = self.decrement / self.interval_length;
        self.knots
            .iter()
            .all(|&(x, g)| (g - (g0 + slope * (x - x0))).abs() <= 1e-12 * g0.abs().max(1.0))
    }

    /// Piecewise-linear interpolation on the fundamental interval.
    fn base(&self, a: f64) -> f64 {
        let knots = &self.knots;
        let i = knots.partition_point(|&(x, _)| x <= a);
        if i == 0 {
            return knots[0].1;
        }
        if i >= knots.len() {
            return knots[knots.len() - 1].1;
        }
        let (x0, g0) = knots[i - 1];
        let (x1, g1) = knots[i];
        g0 + (g1 - g0) * (a - x0) / (x1 - x0)
    }

    /// `g` on the whole real line via the exact quasi-periodic rule.
    pub fn eval(&self, x: f64) -> f64 {
        let len = self.interval_length;
        let k = floor(x / len);
        let a = (x - k * len).clamp(0.0, len);
        self.base(a) + k * self.decrement
    }
}

/// Which functional equation a tabulated family is built to satisfy.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "kind", rename_all = "snake_case"))]
pub enum PeriodicLaw {
    /// `Ÿ(y) = λy`, i.e. `f(λy) = 2f(y)`.
    Fraction { lambda: f64 },
    /// `Ÿ(y) = y − Δ` above `Δ`, i.e. `f(y − Δ) = 2f(y)`.
    Difference { delta: f64 },
}

impl PeriodicLaw {
    /// Length of the fundamental interval the law needs.
    pub fn interval_length(self) -> Result<f64> {
        match self {
            PeriodicLaw::Fraction { lambda } => {
                if !(lambda > 0.0 && lambda < 1.0) {
                    return Err(Error::invalid("lambda", lambda, "a real in (0, 1)"));
                }
                Ok(-ln(lambda))
            }
            PeriodicLaw::Difference { delta } => {
                if !(delta > 0.0) || !delta.is_finite() {
                    return Err(Error::invalid("delta", delta, "a positive real"));
                }
                Ok(delta)
            }
        }
    }
}

/// A non-power family generated by a periodic profile.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(try_from = "RawTabulated"))]
pub struct TabulatedFamily {
    law: PeriodicLaw,
    profile: PeriodicProfile,
}

#[cfg(feature = "serde")]
#[derive(serde::Deserialize)]
struct RawTabulated {
    law: PeriodicLaw,
    profile: PeriodicProfile,
}

#[cfg(feature = "serde")]
impl TryFrom<RawTabulated> for TabulatedFamily {
    type Error = Error;

    fn try_from(raw: RawTabulated) -> Result<Self> {
        TabulatedFamily::new(raw.law, raw.profile)
    }
}

impl TabulatedFamily {
    pub fn new(law: PeriodicLaw, profile: PeriodicProfile) -> Result<Self> {
        let len = law.interval_length()?;
        if (len - profile.interval_length).abs() > 1e-12 * len.max(1.0) {
            return Err(Error::InvalidProfile {
                reason: "profile interval length does not match the law",
            });
        }
        Ok(TabulatedFamily { law, profile })
    }

    pub fn law(&self) -> PeriodicLaw {
        self.law
    }

    pub fn profile(&self) -> &PeriodicProfile {
        &self.profile
    }

    /// `f(y)` as an IEEE float; `−∞` at `y = 0` for fraction laws and on
    /// overflow of `exp(g)`.
    pub(crate) fn eval_raw(&self, y: f64) -> f64 {
        let g = match self.law {
            PeriodicLaw::Fraction { .. } => {
                if y == 0.0 {
                    return f64::NEG_INFINITY;
                }
                self.profile.eval(ln(y))
            }
            PeriodicLaw::Difference { .. } => self.profile.eval(y),
        };
        -exp(g)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn bent(len: f64) -> PeriodicProfile {
        PeriodicProfile::new(vec![(0.0, 0.0), (len / 3.0, -0.6 * LN_2), (len, -LN_2)]).unwrap()
    }

    #[test]
    fn rejects_bad_profiles() {
        assert!(PeriodicProfile::new(vec![(0.0, 0.0)]).is_err());
        assert!(PeriodicProfile::new(vec![(0.1, 0.0), (1.0, -LN_2)]).is_err());
        assert!(PeriodicProfile::new(vec![(0.0, 0.0), (1.0, -0.5)]).is_err());
        assert!(PeriodicProfile::new(vec![(0.0, 0.0), (0.5, 0.1), (1.0, -LN_2)]).is_err());
        assert!(PeriodicProfile::new(vec![(0.0, 0.0), (0.5, -0.2), (0.5, -0.3), (1.0, -LN_2)]).is_err());
    }

    #[test]
    fn extension_drops_ln2_per_period() {
        let p = bent(2.0);
        for &x in &[0.0, 0.3, 1.1, 1.9] {
            for k in -3..4 {
                let shifted = p.eval(x + k as f64 * 2.0);
                assert!((shifted - (p.eval(x) - k as f64 * LN_2)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn interpolates_between_knots() {
        let p = bent(3.0);
        assert!((p.eval(0.5) - (-0.3 * LN_2)).abs() < 1e-15);
        assert!(!p.is_linear());
        assert!(PeriodicProfile::linear(3.0, 1.0).unwrap().is_linear());
    }

    #[test]
    fn law_must_match_interval() {
        let law = PeriodicLaw::Fraction { lambda: 0.5 };
        assert!(TabulatedFamily::new(law, bent(LN_2)).is_ok());
        assert!(TabulatedFamily::new(law, bent(1.0)).is_err());
        assert!(TabulatedFamily::new(PeriodicLaw::Difference { delta: -1.0 }, bent(1.0)).is_err());
    }

    #[test]
    fn sampled_profile_keeps_endpoints() {
        let p = PeriodicProfile::from_fn(LN_2, DEFAULT_RESOLUTION, |x| {
            -x - 0.05 * libm::sin(2.0 * core::f64::consts::PI * x / LN_2)
        })
        .unwrap();
        assert_eq!(p.knots().len(), DEFAULT_RESOLUTION);
        assert_eq!(p.interval_length(), LN_2);
    }
}
