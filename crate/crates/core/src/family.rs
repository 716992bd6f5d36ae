//! Parametric social welfare families: evaluation of `f`, its supremum and
//! inverse, aggregate welfare and the equally-distributed equivalent.
//!
//! Bounded families are stored with `f(+∞) = 0`. No affine transform is ever
//! applied behind the caller's back: the value returned by [`SwfFamily::eval`]
//! is exactly the formula of the variant.

use crate::error::{Error, Result};
use crate::ext::WelfareValue;
use crate::income::{Distribution, Income};
use crate::math::{exp, ln, ln_1p, powf, LN_2};
use crate::root::Bisection;
use crate::tabulated::TabulatedFamily;

/// Parameters within this distance of 1 select the logarithmic branch of the
/// Kolm-Atkinson and CPIE formulas.
pub const LOG_BRANCH_BAND: f64 = 1e-12;

fn log_branch(p: f64) -> bool {
    (p - 1.0).abs() <= LOG_BRANCH_BAND
}

/// A social welfare family, the single source of `f`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(try_from = "RawFamily", into = "RawFamily"))]
pub enum SwfFamily {
    /// `f(y) = y^{1−η}/(1−η)`, `ln y` at `η = 1`.
    KolmAtkinson { eta: f64 },
    /// `f(y) = −e^{−αy}`, `y` at `α = 0`.
    KolmPollak { alpha: f64 },
    /// `f(y) = (ln(y/c))^{1−γ}/(1−γ)` for `y ≥ c`, `ln ln(y/c)` at `γ = 1`.
    Cpie { gamma: f64, c: f64 },
    /// A quasi-periodic non-power family.
    Tabulated(TabulatedFamily),
}

#[cfg(feature = "serde")]
#[derive(Clone, serde::Serialize, serde::Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
enum RawFamily {
    KolmAtkinson { eta: f64 },
    KolmPollak { alpha: f64 },
    Cpie { gamma: f64, c: f64 },
    Tabulated(TabulatedFamily),
}

#[cfg(feature = "serde")]
impl TryFrom<RawFamily> for SwfFamily {
    type Error = Error;

    fn try_from(raw: RawFamily) -> Result<Self> {
        match raw {
            RawFamily::KolmAtkinson { eta } => SwfFamily::kolm_atkinson(eta),
            RawFamily::KolmPollak { alpha } => SwfFamily::kolm_pollak(alpha),
            RawFamily::Cpie { gamma, c } => SwfFamily::cpie(gamma, c),
            RawFamily::Tabulated(t) => Ok(SwfFamily::Tabulated(t)),
        }
    }
}

#[cfg(feature = "serde")]
impl From<SwfFamily> for RawFamily {
    fn from(f: SwfFamily) -> Self {
        match f {
            SwfFamily::KolmAtkinson { eta } => RawFamily::KolmAtkinson { eta },
            SwfFamily::KolmPollak { alpha } => RawFamily::KolmPollak { alpha },
            SwfFamily::Cpie { gamma, c } => RawFamily::Cpie { gamma, c },
            SwfFamily::Tabulated(t) => RawFamily::Tabulated(t),
        }
    }
}

impl SwfFamily {
    pub fn kolm_atkinson(eta: f64) -> Result<Self> {
        let family = SwfFamily::KolmAtkinson { eta };
        family.validate()?;
        Ok(family)
    }

    pub fn kolm_pollak(alpha: f64) -> Result<Self> {
        let family = SwfFamily::KolmPollak { alpha };
        family.validate()?;
        Ok(family)
    }

    pub fn cpie(gamma: f64, c: f64) -> Result<Self> {
        let family = SwfFamily::Cpie { gamma, c };
        family.validate()?;
        Ok(family)
    }

    /// Constant relative protected income `Ÿ(y) = λy`: the Kolm-Atkinson
    /// member with `η = 1 − ln 2 / ln λ`. Its `f` equals `−y^{1/log₂λ}`
    /// up to the positive factor `1/(η − 1)`.
    pub fn from_protected_fraction(lambda: f64) -> Result<Self> {
        if !(lambda > 0.0 && lambda < 1.0) {
            return Err(Error::invalid("lambda", lambda, "a real in (0, 1)"));
        }
        SwfFamily::kolm_atkinson(1.0 - LN_2 / ln(lambda))
    }

    /// Constant difference protected income `Ÿ(y) = y − L`:
    /// `f(y) = −2^{−y/L}`, which is Kolm-Pollak with `α = ln 2 / L`.
    pub fn from_collateral_damage(largest_damage: f64) -> Result<Self> {
        if !(largest_damage > 0.0) || !largest_damage.is_finite() {
            return Err(Error::invalid("collateral damage", largest_damage, "a positive real"));
        }
        SwfFamily::kolm_pollak(LN_2 / largest_damage)
    }

    /// Constant protected income elasticity `Ÿ(y) = y^β c^{1−β}`: CPIE with
    /// `γ = 1 − ln 2 / ln β`. Its `f` equals `−(ln(y/c))^{1/log₂β}` up to the
    /// positive factor `1/(γ − 1)`.
    pub fn from_protected_elasticity(beta: f64, c: f64) -> Result<Self> {
        if !(beta > 0.0 && beta < 1.0) {
            return Err(Error::invalid("beta", beta, "a real in (0, 1)"));
        }
        SwfFamily::cpie(1.0 - LN_2 / ln(beta), c)
    }

    /// Checks parameter ranges; useful for values built from the public variants.
    pub fn validate(&self) -> Result<()> {
        let nonneg = |name, v: f64| {
            if v.is_finite() && v >= 0.0 {
                Ok(())
            } else {
                Err(Error::invalid(name, v, "a finite nonnegative real"))
            }
        };
        match *self {
            SwfFamily::KolmAtkinson { eta } => nonneg("eta", eta),
            SwfFamily::KolmPollak { alpha } => nonneg("alpha", alpha),
            SwfFamily::Cpie { gamma, c } => {
                nonneg("gamma", gamma)?;
                if c.is_finite() && c > 0.0 {
                    Ok(())
                } else {
                    Err(Error::invalid("c", c, "a finite positive real"))
                }
            }
            SwfFamily::Tabulated(_) => Ok(()),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            SwfFamily::KolmAtkinson { .. } => "kolm_atkinson",
            SwfFamily::KolmPollak { .. } => "kolm_pollak",
            SwfFamily::Cpie { .. } => "cpie",
            SwfFamily::Tabulated(_) => "tabulated",
        }
    }

    /// The inequality-aversion coefficient of the parametric families.
    pub fn coefficient(&self) -> Option<f64> {
        match *self {
            SwfFamily::KolmAtkinson { eta } => Some(eta),
            SwfFamily::KolmPollak { alpha } => Some(alpha),
            SwfFamily::Cpie { gamma, .. } => Some(gamma),
            SwfFamily::Tabulated(_) => None,
        }
    }

    /// Lower endpoint of the income domain: `c` for CPIE, 0 otherwise.
    pub fn lower_bound(&self) -> Income {
        match *self {
            SwfFamily::Cpie { c, .. } => Income::new(c).unwrap_or(Income::ZERO),
            _ => Income::ZERO,
        }
    }

    /// `f` at the lower endpoint of the domain (`f(0)`, or `f(c)` for CPIE).
    pub fn value_at_lower(&self) -> WelfareValue {
        WelfareValue::from(self.eval_raw(self.lower_bound().get()))
    }

    /// Evaluates `f(y)`.
    ///
    /// Returns `−∞` at the analytic singular points (Kolm-Atkinson `η ≥ 1` at
    /// 0, CPIE `γ ≥ 1` at `c`, fraction-law tabulated families at 0) and
    /// saturates to `−∞` when the formula overflows next to them.
    pub fn eval(&self, y: Income) -> Result<WelfareValue> {
        let lower = self.lower_bound().get();
        if y.get() < lower {
            return Err(Error::BelowDomain { income: y.get(), lower });
        }
        WelfareValue::new(self.eval_raw(y.get()))
    }

    /// `f(y)` as an IEEE float. `y` must be in the domain.
    pub(crate) fn eval_raw(&self, y: f64) -> f64 {
        match *self {
            SwfFamily::KolmAtkinson { eta } => {
                if eta == 0.0 {
                    y
                } else if log_branch(eta) {
                    ln(y)
                } else {
                    powf(y, 1.0 - eta) / (1.0 - eta)
                }
            }
            SwfFamily::KolmPollak { alpha } => {
                if alpha == 0.0 {
                    y
                } else {
                    -exp(-alpha * y)
                }
            }
            SwfFamily::Cpie { gamma, c } => {
                let t = ln_1p((y - c) / c);
                if log_branch(gamma) {
                    ln(t)
                } else {
                    powf(t, 1.0 - gamma) / (1.0 - gamma)
                }
            }
            SwfFamily::Tabulated(ref t) => t.eval_raw(y),
        }
    }

    /// `sup f` over the domain.
    pub fn sup(&self) -> WelfareValue {
        let bounded = match *self {
            SwfFamily::KolmAtkinson { eta } => eta > 1.0 && !log_branch(eta),
            SwfFamily::KolmPollak { alpha } => alpha > 0.0,
            SwfFamily::Cpie { gamma, .. } => gamma > 1.0 && !log_branch(gamma),
            SwfFamily::Tabulated(_) => true,
        };
        if bounded {
            WelfareValue::ZERO
        } else {
            WelfareValue::PosInf
        }
    }

    pub fn is_bounded(&self) -> bool {
        self.sup().is_finite()
    }

    fn check_invertible(&self, w: WelfareValue) -> Result<Option<f64>> {
        let inf = self.value_at_lower();
        let sup = self.sup();
        let out = Error::OutOfRange { value: w, inf, sup };
        match w {
            WelfareValue::NegInf => Ok(None),
            WelfareValue::PosInf => Err(out),
            WelfareValue::Finite(x) => {
                if w >= sup || w < inf {
                    Err(out)
                } else if w == inf {
                    Ok(None)
                } else {
                    Ok(Some(x))
                }
            }
        }
    }

    fn finish_inverse(&self, y: f64) -> Result<Income> {
        if !y.is_finite() {
            return Err(Error::Overflow { quantity: "f^-1" });
        }
        Income::new(y.max(self.lower_bound().get()))
    }

    /// `f⁻¹(w)`: closed form for the parametric families, bisection for
    /// tabulated ones.
    ///
    /// `w = −∞` (or `w = f(lower endpoint)`) maps to the lower endpoint of the
    /// domain. Values at or above `sup f` are not attained at any finite
    /// income and are rejected.
    pub fn inverse(&self, w: WelfareValue) -> Result<Income> {
        let Some(w) = self.check_invertible(w)? else {
            return Ok(self.lower_bound());
        };
        let y = match *self {
            SwfFamily::KolmAtkinson { eta } => {
                if eta == 0.0 {
                    w
                } else if log_branch(eta) {
                    exp(w)
                } else {
                    powf((1.0 - eta) * w, 1.0 / (1.0 - eta))
                }
            }
            SwfFamily::KolmPollak { alpha } => {
                if alpha == 0.0 {
                    w
                } else {
                    -ln(-w) / alpha
                }
            }
            SwfFamily::Cpie { gamma, c } => {
                let t = if log_branch(gamma) {
                    exp(w)
                } else {
                    powf((1.0 - gamma) * w, 1.0 / (1.0 - gamma))
                };
                c * exp(t)
            }
            SwfFamily::Tabulated(_) => return self.inverse_by_bisection(WelfareValue::Finite(w)),
        };
        self.finish_inverse(y)
    }

    /// `f⁻¹(w)` by monotone bisection on `f` alone (relative tolerance 1e−12
    /// on income, at most 200 iterations), whatever the family.
    pub fn inverse_by_bisection(&self, w: WelfareValue) -> Result<Income> {
        let Some(target) = self.check_invertible(w)? else {
            return Ok(self.lower_bound());
        };
        let origin = self.lower_bound().get();
        let f = |y: f64| self.eval_raw(y);
        let scale = origin.max(1.0);

        // Bracket by repeated squaring of the step: scale·2^{±1}, 2^{±2}, 2^{±4}, ...
        let (lo, hi) = if f(origin + scale) >= target {
            let mut lo = 0.0;
            let mut k = 1.0f64;
            while k <= 1024.0 {
                let u = scale * libm::exp2(-k);
                if f(origin + u) <= target {
                    lo = u;
                    break;
                }
                k *= 2.0;
            }
            (lo, scale)
        } else {
            let mut lo = scale;
            let mut k = 1.0f64;
            loop {
                let u = scale * libm::exp2(k);
                if !u.is_finite() {
                    return Err(Error::Overflow {
                        quantity: "f^-1 bracket",
                    });
                }
                if f(origin + u) >= target {
                    break (lo, u);
                }
                lo = u;
                k *= 2.0;
            }
        };
        let y = Bisection::default().solve_from(origin, f, target, lo, hi)?;
        self.finish_inverse(y)
    }

    /// `W = Σ f(yᵢ)`; a single `−∞` term makes the sum `−∞`.
    pub fn welfare(&self, d: &Distribution) -> Result<WelfareValue> {
        let mut acc = WelfareValue::ZERO;
        for &y in d.incomes() {
            acc = acc.checked_add(self.eval(y)?)?;
        }
        Ok(acc)
    }

    /// Equally-distributed equivalent `f⁻¹((1/n) Σ f(yᵢ))`, clamped into
    /// `[min d, max d]`. When some income sits at a singular point the
    /// result is the lower endpoint of the domain.
    pub fn ede(&self, d: &Distribution) -> Result<Income> {
        let total = self.welfare(d)?;
        let mean = total.scale(1.0 / d.len() as f64)?;
        let ee = self.inverse(mean)?;
        let (lo, hi) = (d.min(), d.max());
        Ok(if ee < lo {
            lo
        } else if ee > hi {
            hi
        } else {
            ee
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use WelfareValue::{Finite, NegInf, PosInf};

    fn y(v: f64) -> Income {
        Income::new(v).unwrap()
    }

    fn ka(eta: f64) -> SwfFamily {
        SwfFamily::kolm_atkinson(eta).unwrap()
    }

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * b.abs().max(1.0)
    }

    #[test]
    fn kolm_atkinson_values() {
        assert_eq!(ka(2.0).eval(y(0.0)), Ok(NegInf));
        assert_eq!(ka(3.5).eval(y(0.0)), Ok(NegInf));
        assert_eq!(ka(1.0).eval(y(0.0)), Ok(NegInf));
        assert_eq!(ka(0.5).eval(y(0.0)), Ok(Finite(0.0)));
        let v = ka(2.0).eval(y(100.0)).unwrap().finite().unwrap();
        assert!(close(v, -0.01, 1e-15));
        assert_eq!(ka(0.0).eval(y(7.0)), Ok(Finite(7.0)));
    }

    #[test]
    fn log_branch_guard_band() {
        let near = SwfFamily::kolm_atkinson(1.0 + 1e-13).unwrap();
        assert_eq!(near.eval(y(core::f64::consts::E)), Ok(Finite(1.0)));
        let cpie = SwfFamily::cpie(1.0 - 5e-13, 1.0).unwrap();
        let v = cpie.eval(y(core::f64::consts::E)).unwrap().finite().unwrap();
        assert!(v.abs() < 1e-15);
    }

    #[test]
    fn kolm_pollak_is_negative_with_upper_bound_zero() {
        let kp = SwfFamily::kolm_pollak(1.0).unwrap();
        for &v in &[0.0, 1.0, 10.0, 40.0] {
            assert!(kp.eval(y(v)).unwrap() < WelfareValue::ZERO);
        }
        assert_eq!(kp.sup(), WelfareValue::ZERO);
        assert!(kp.eval(y(60.0)).unwrap().finite().unwrap() > -1e-25);
    }

    #[test]
    fn suprema() {
        assert_eq!(ka(0.5).sup(), PosInf);
        assert_eq!(ka(1.0).sup(), PosInf);
        assert_eq!(ka(2.0).sup(), Finite(0.0));
        assert_eq!(SwfFamily::kolm_pollak(0.0).unwrap().sup(), PosInf);
        assert_eq!(SwfFamily::kolm_pollak(1.0).unwrap().sup(), Finite(0.0));
        assert_eq!(SwfFamily::cpie(2.0, 1.0).unwrap().sup(), Finite(0.0));
        assert_eq!(SwfFamily::cpie(1.0, 1.0).unwrap().sup(), PosInf);
        assert_eq!(SwfFamily::cpie(0.5, 1.0).unwrap().sup(), PosInf);
    }

    #[test]
    fn cpie_domain() {
        let f = SwfFamily::cpie(2.0, 3.0).unwrap();
        assert!(matches!(f.eval(y(2.0)), Err(Error::BelowDomain { .. })));
        assert_eq!(f.eval(y(3.0)), Ok(NegInf));
        assert_eq!(SwfFamily::cpie(1.0, 3.0).unwrap().eval(y(3.0)), Ok(NegInf));
        assert_eq!(SwfFamily::cpie(0.5, 3.0).unwrap().eval(y(3.0)), Ok(Finite(0.0)));
        // f(ce) = 1/(1-γ)
        let v = f.eval(y(3.0 * core::f64::consts::E)).unwrap().finite().unwrap();
        assert!(close(v, -1.0, 1e-15));
    }

    #[test]
    fn invalid_parameters() {
        assert!(SwfFamily::kolm_atkinson(-0.1).is_err());
        assert!(SwfFamily::kolm_pollak(f64::NAN).is_err());
        assert!(SwfFamily::cpie(2.0, 0.0).is_err());
        assert!(SwfFamily::from_protected_fraction(1.0).is_err());
    }

    #[test]
    fn inverse_examples() {
        let w = ka(2.0).inverse(Finite(-0.01)).unwrap().get();
        assert!(close(w, 100.0, 1e-13));
        let kp = SwfFamily::kolm_pollak(LN_2 / 10.0).unwrap();
        assert_eq!(kp.inverse(Finite(-1.0)), Ok(Income::ZERO));
        assert_eq!(ka(2.0).inverse(NegInf), Ok(Income::ZERO));
        let cpie = SwfFamily::cpie(2.0, 4.0).unwrap();
        assert_eq!(cpie.inverse(NegInf), Ok(y(4.0)));
    }

    #[test]
    fn inverse_rejects_values_outside_the_range() {
        assert!(matches!(ka(2.0).inverse(Finite(0.0)), Err(Error::OutOfRange { .. })));
        assert!(matches!(ka(2.0).inverse(Finite(0.5)), Err(Error::OutOfRange { .. })));
        assert!(matches!(ka(0.5).inverse(Finite(-1.0)), Err(Error::OutOfRange { .. })));
        let kp = SwfFamily::kolm_pollak(1.0).unwrap();
        assert!(matches!(kp.inverse(Finite(-2.0)), Err(Error::OutOfRange { .. })));
        assert!(matches!(kp.inverse(PosInf), Err(Error::OutOfRange { .. })));
    }

    #[test]
    fn bisection_agrees_with_closed_forms() {
        let families = [
            ka(0.5),
            ka(1.0),
            ka(2.0),
            ka(4.0),
            SwfFamily::kolm_pollak(0.3).unwrap(),
            SwfFamily::kolm_pollak(0.0).unwrap(),
            SwfFamily::cpie(2.0, 1.5).unwrap(),
            SwfFamily::cpie(1.0, 1.5).unwrap(),
            SwfFamily::cpie(0.5, 1.5).unwrap(),
        ];
        for f in &families {
            for &v in &[1.6, 2.0, 7.5, 33.0, 120.0] {
                let w = f.eval(y(v)).unwrap();
                let a = f.inverse(w).unwrap().get();
                let b = f.inverse_by_bisection(w).unwrap().get();
                assert!(close(a, v, 1e-10), "{f:?} closed {a} vs {v}");
                assert!(close(b, v, 1e-11), "{f:?} bisection {b} vs {v}");
            }
        }
    }

    #[test]
    fn welfare_examples() {
        let d = Distribution::from_values(&[100.0, 100.0]).unwrap();
        let w = ka(2.0).welfare(&d).unwrap().finite().unwrap();
        assert!(close(w, -0.02, 1e-15));
        let single = Distribution::from_values(&[42.0]).unwrap();
        assert_eq!(ka(3.0).welfare(&single), ka(3.0).eval(y(42.0)));
        let with_zero = Distribution::from_values(&[0.0, 10.0, 20.0]).unwrap();
        assert_eq!(ka(2.0).welfare(&with_zero), Ok(NegInf));
    }

    #[test]
    fn ede_examples() {
        let d = Distribution::from_values(&[50.0, 200.0]).unwrap();
        assert!(close(ka(2.0).ede(&d).unwrap().get(), 80.0, 1e-12));
        let flat = Distribution::from_values(&[37.0, 37.0, 37.0]).unwrap();
        for f in [
            ka(0.5),
            ka(2.0),
            SwfFamily::kolm_pollak(0.2).unwrap(),
            SwfFamily::cpie(3.0, 2.0).unwrap(),
        ] {
            assert_eq!(f.ede(&flat).unwrap().get(), 37.0);
        }
        let kp = SwfFamily::kolm_pollak(0.25).unwrap();
        let base = kp.ede(&Distribution::from_values(&[3.0, 11.0]).unwrap()).unwrap().get();
        let shifted = kp.ede(&Distribution::from_values(&[8.0, 16.0]).unwrap()).unwrap().get();
        assert!(close(shifted, base + 5.0, 1e-12));
    }

    #[test]
    fn ede_at_singular_point_is_lower_endpoint() {
        let d = Distribution::from_values(&[0.0, 50.0]).unwrap();
        assert_eq!(ka(2.0).ede(&d), Ok(Income::ZERO));
        let c = SwfFamily::cpie(2.0, 2.0).unwrap();
        assert_eq!(c.ede(&Distribution::from_values(&[2.0, 9.0]).unwrap()), Ok(y(2.0)));
    }

    #[test]
    fn alternate_parametrizations() {
        match SwfFamily::from_protected_fraction(0.5).unwrap() {
            SwfFamily::KolmAtkinson { eta } => assert!(close(eta, 2.0, 1e-15)),
            other => panic!("{other:?}"),
        }
        match SwfFamily::from_collateral_damage(10.0).unwrap() {
            SwfFamily::KolmPollak { alpha } => assert!(close(alpha, LN_2 / 10.0, 1e-15)),
            other => panic!("{other:?}"),
        }
        match SwfFamily::from_protected_elasticity(0.5, 2.0).unwrap() {
            SwfFamily::Cpie { gamma, c } => {
                assert!(close(gamma, 2.0, 1e-15));
                assert_eq!(c, 2.0);
            }
            other => panic!("{other:?}"),
        }
    }
}
