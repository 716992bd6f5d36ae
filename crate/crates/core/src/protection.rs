//! The trade-off curve `y₁(y₂, y) = f⁻¹(2f(y) − f(y₂))`, its domain of
//! definition, and protected income against one or more rivals whose
//! incomes rise without bound.
//!
//! The infimum over the open-ended rival range is taken analytically through
//! `sup f`: against `m` rivals, `Ÿ_m(y) = f⁻¹((m + 1)f(y) − m·sup f)`, or the
//! lower endpoint of the domain when that value falls at or below it.
//! Against one and two rivals the parametric families use their closed forms;
//! `m ≥ 3` is a direct generalization of the one- and two-rival definitions
//! and always goes through the limit expression.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::ext::WelfareValue;
use crate::family::SwfFamily;
use crate::income::Income;
use crate::math::{exp, ln, ln_1p, powf, LN_2};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum ProtectionMethod {
    ClosedForm,
    NumericLimit,
}

/// Protected income at an equal status quo `y`.
///
/// `protected_income + collateral_damage = y` and
/// `relative_damage = collateral_damage / y`. `positive` is true when the
/// protected income lies strictly above the lower endpoint of the domain
/// (0, or `c` for CPIE).
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ProtectionResult {
    pub protected_income: Income,
    pub collateral_damage: f64,
    pub relative_damage: f64,
    pub positive: bool,
    pub method: ProtectionMethod,
}

impl ProtectionResult {
    fn new(family: &SwfFamily, y: Income, protected: f64, method: ProtectionMethod) -> Result<Self> {
        let lower = family.lower_bound().get();
        let protected = protected.clamp(lower, y.get());
        let collateral_damage = y.get() - protected;
        Ok(ProtectionResult {
            protected_income: Income::new(protected)?,
            collateral_damage,
            relative_damage: collateral_damage / y.get(),
            positive: protected > lower,
            method,
        })
    }
}

/// A point `(y₂, y)` or `(y₂, y₃, y)` whose membership in the domain of the
/// trade-off function is being asked.
#[derive(Debug, Clone, PartialEq)]
pub struct DomainQuery {
    y: Income,
    rivals: Vec<Income>,
}

impl DomainQuery {
    pub fn new(y: Income, rivals: Vec<Income>) -> Result<Self> {
        if rivals.is_empty() {
            return Err(Error::invalid("rival count", 0.0, "at least one rival"));
        }
        Ok(DomainQuery { y, rivals })
    }

    pub fn y(&self) -> Income {
        self.y
    }

    pub fn rivals(&self) -> &[Income] {
        &self.rivals
    }
}

fn domain_bound(family: &SwfFamily, rivals: usize) -> &'static str {
    let cpie = matches!(family, SwfFamily::Cpie { .. });
    match (rivals, cpie) {
        (1, false) => "2f(y) - f(y2) >= f(0)",
        (1, true) => "2f(y) - f(y2) >= f(c)",
        (2, false) => "3f(y) - f(y2) - f(y3) >= f(0)",
        (2, true) => "3f(y) - f(y2) - f(y3) >= f(c)",
        (_, false) => "(m+1)f(y) - sum f(rivals) >= f(0)",
        (_, true) => "(m+1)f(y) - sum f(rivals) >= f(c)",
    }
}

/// `(n + 1)f(y) − Σ f(rivals)`.
fn tradeoff_target(family: &SwfFamily, rivals: &[Income], y: Income) -> Result<WelfareValue> {
    let mut target = family.eval(y)?.scale((rivals.len() + 1) as f64)?;
    for &r in rivals {
        target = target.checked_sub(family.eval(r)?)?;
    }
    Ok(target)
}

/// Membership in `D₁₂` (one rival) or `D₁₂₃` (two rivals): the defining
/// inequality `(n + 1)f(y) − Σ f(rivals) ≥ f(0)`. When `f(0) = −∞` every
/// query is a member. Incomes outside the family's domain are not.
pub fn in_domain(family: &SwfFamily, q: &DomainQuery) -> bool {
    let floor = family.value_at_lower();
    let lower = family.lower_bound();
    if q.y < lower || q.rivals.iter().any(|&r| r < lower) {
        return false;
    }
    if floor.is_neg_inf() {
        return true;
    }
    match tradeoff_target(family, &q.rivals, q.y) {
        Ok(target) => target >= floor,
        Err(_) => false,
    }
}

/// `y₁(y₂, y) = f⁻¹(2f(y) − f(y₂))`.
pub fn tradeoff_income(family: &SwfFamily, y2: Income, y: Income) -> Result<Income> {
    tradeoff_income_against(family, &[y2], y)
}

/// `y₁ = f⁻¹((n + 1)f(y) − Σ f(rivals))` for any number of rivals.
pub fn tradeoff_income_against(family: &SwfFamily, rivals: &[Income], y: Income) -> Result<Income> {
    if rivals.is_empty() {
        return Err(Error::invalid("rival count", 0.0, "at least one rival"));
    }
    if family.eval(y)? >= family.sup() {
        return Err(Error::Underflow { income: y.get() });
    }
    let target = tradeoff_target(family, rivals, y)?;
    let floor = family.value_at_lower();
    if !floor.is_neg_inf() && target < floor {
        return Err(Error::DomainExceeded {
            bound: domain_bound(family, rivals.len()),
            lhs: target,
            rhs: floor,
        });
    }
    family.inverse(target)
}

/// Existence of a strictly positive protected income against one rival:
/// `sup f < 2f(y) − f(0)` in extended-real arithmetic.
pub fn has_positive_protection(family: &SwfFamily, y: Income) -> bool {
    if y <= family.lower_bound() {
        return false;
    }
    if let SwfFamily::KolmPollak { alpha } = *family {
        // same inequality, solved for y
        return alpha > 0.0 && y.get() > LN_2 / alpha;
    }
    let rhs = family
        .eval(y)
        .and_then(|fy| fy.scale(2.0))
        .and_then(|v| v.checked_sub(family.value_at_lower()));
    match rhs {
        Ok(rhs) => family.sup() < rhs,
        Err(_) => false,
    }
}

fn check_query(family: &SwfFamily, y: Income, rivals: u32) -> Result<()> {
    if rivals < 1 {
        return Err(Error::invalid("rivals", rivals as f64, "an integer m >= 1"));
    }
    let lower = family.lower_bound();
    if y <= lower {
        return Err(Error::invalid(
            "y",
            y.get(),
            "an income strictly above the domain lower endpoint",
        ));
    }
    Ok(())
}

fn limit_protection<F>(family: &SwfFamily, y: Income, rivals: u32, invert: F) -> Result<f64>
where
    F: Fn(WelfareValue) -> Result<Income>,
{
    let sup = family.sup();
    let lower = family.lower_bound();
    if sup.is_pos_inf() {
        return Ok(lower.get());
    }
    let m = rivals as f64;
    let fy = family.eval(y)?;
    if fy >= sup {
        return Err(Error::Underflow { income: y.get() });
    }
    let target = fy.scale(m + 1.0)?.checked_sub(sup.scale(m)?)?;
    if target <= family.value_at_lower() {
        return Ok(lower.get());
    }
    Ok(invert(target)?.get())
}

/// Protected income against `rivals` individuals whose incomes rise without
/// bound.
///
/// Closed forms for one and two rivals (`k = m + 1`):
/// Kolm-Atkinson `η > 1`: `k^{1/(1−η)}·y`; Kolm-Pollak: `max(0, y − ln k/α)`;
/// CPIE `γ > 1`: `y^β c^{1−β}` with `β = k^{1/(1−γ)}`. Families without an
/// upper bound protect nothing and report the lower endpoint of the domain.
///
/// `rivals ≥ 3` extends the definition beyond the one- and two-rival cases and
/// is computed from the limit expression.
pub fn protected_income(family: &SwfFamily, y: Income, rivals: u32) -> Result<ProtectionResult> {
    check_query(family, y, rivals)?;
    let k = (rivals + 1) as f64;
    let closed = if rivals <= 2 {
        match *family {
            _ if !family.is_bounded() => Some(family.lower_bound().get()),
            SwfFamily::KolmAtkinson { eta } => Some(powf(k, 1.0 / (1.0 - eta)) * y.get()),
            SwfFamily::KolmPollak { alpha } => {
                let threshold = ln(k) / alpha;
                Some(if y.get() <= threshold { 0.0 } else { y.get() - threshold })
            }
            SwfFamily::Cpie { gamma, c } => {
                let beta = powf(k, 1.0 / (1.0 - gamma));
                Some(c * exp(beta * ln_1p((y.get() - c) / c)))
            }
            SwfFamily::Tabulated(_) => None,
        }
    } else {
        None
    };
    match closed {
        Some(p) => ProtectionResult::new(family, y, p, ProtectionMethod::ClosedForm),
        None => {
            let p = limit_protection(family, y, rivals, |w| family.inverse(w))?;
            ProtectionResult::new(family, y, p, ProtectionMethod::NumericLimit)
        }
    }
}

/// The numeric-limit oracle: `f⁻¹((m + 1)f(y) − m·sup f)` with `f⁻¹` taken by
/// bisection on `f`, never through a closed form.
pub fn protected_income_numeric(family: &SwfFamily, y: Income, rivals: u32) -> Result<ProtectionResult> {
    check_query(family, y, rivals)?;
    let p = limit_protection(family, y, rivals, |w| family.inverse_by_bisection(w))?;
    ProtectionResult::new(family, y, p, ProtectionMethod::NumericLimit)
}

/// Protected income from an unequal status quo `(y₁, y₂)`:
/// `f⁻¹(f(y₁) + f(y₂))` under the normalization `f(+∞) = 0`. Equals the
/// one-rival protected income at `EE_f(y₁, y₂)`.
pub fn protected_income_unequal(family: &SwfFamily, y1: Income, y2: Income) -> Result<Income> {
    let sup = family.sup();
    if !sup.is_finite() {
        return Err(Error::UnboundedFamily);
    }
    let target = family.eval(y1)?.checked_add(family.eval(y2)?)?.checked_sub(sup)?;
    if target <= family.value_at_lower() {
        return Ok(family.lower_bound());
    }
    family.inverse(target)
}
