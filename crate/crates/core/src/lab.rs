//! Constructive families and numerical verification of the characterizations.
//!
//! Builders turn a [`PeriodicProfile`] into the tabulated members of the
//! fixed-fraction and fixed-damage classes. Verifiers evaluate a claim point
//! by point over a grid and summarize it in a [`VerificationReport`]; they
//! report failures, they do not return errors for them.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::ext::WelfareValue;
use crate::family::SwfFamily;
use crate::income::{Distribution, Income};
use crate::math::{exp, ln, powf, LN_2, LN_3};
use crate::protection::{has_positive_protection, protected_income, protected_income_numeric};
use crate::tabulated::{PeriodicLaw, PeriodicProfile, TabulatedFamily};

pub const DEFAULT_GRID_POINTS: usize = 64;
pub const PROTECTION_TOL: f64 = 1e-6;
/// Smallest two-rival spread accepted as evidence of a non-constant ratio.
pub const SPREAD_THRESHOLD: f64 = 1e-6;
pub const LINEAR_SPREAD_TOL: f64 = 1e-9;
pub const FUNCTIONAL_EQUATION_TOL: f64 = 1e-9;
pub const INVARIANCE_TOL: f64 = 1e-9;
pub const MIN_INVARIANCE_SAMPLES: usize = 1000;
pub const ELASTICITY_TOL: f64 = 1e-6;
/// Protection above the lower endpoint by more than this counts as positive.
pub const EXISTENCE_THRESHOLD: f64 = 1e-8;

/// How a report's statistic is judged.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Criterion {
    /// Pass iff `max_abs_residual ≤ tol`.
    AtMost(f64),
    /// Pass iff `max_abs_residual > threshold`.
    AtLeast(f64),
}

impl Criterion {
    pub fn accepts(self, stat: f64) -> bool {
        match self {
            Criterion::AtMost(tol) => stat <= tol,
            Criterion::AtLeast(threshold) => stat > threshold,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct VerificationReport {
    pub proposition: u8,
    pub check: String,
    pub grid: Vec<f64>,
    /// One entry per grid point, aligned with `grid`.
    pub residuals: Vec<f64>,
    pub max_abs_residual: f64,
    pub criterion: Criterion,
    pub pass: bool,
    /// Estimated constant for rigidity checks.
    #[cfg_attr(feature = "serde", serde(default, skip_serializing_if = "Option::is_none"))]
    pub estimate: Option<f64>,
    #[cfg_attr(feature = "serde", serde(default, skip_serializing_if = "Option::is_none"))]
    pub note: Option<String>,
}

impl VerificationReport {
    fn new(proposition: u8, check: &str, grid: Vec<f64>, residuals: Vec<f64>, criterion: Criterion) -> Self {
        // NaN residuals fail every criterion through an infinite statistic.
        let max_abs_residual =
            residuals.iter().fold(
                0.0_f64,
                |acc, r| {
                    if r.is_nan() {
                        f64::INFINITY
                    } else {
                        acc.max(r.abs())
                    }
                },
            );
        VerificationReport {
            proposition,
            check: String::from(check),
            grid,
            residuals,
            max_abs_residual,
            criterion,
            pass: criterion.accepts(max_abs_residual),
            estimate: None,
            note: None,
        }
    }

    fn flagged(mut self, note: String) -> Self {
        self.pass = false;
        self.note = Some(note);
        self
    }

    fn with_note(mut self, note: String) -> Self {
        self.note = Some(note);
        self
    }
}

fn grid_bounds(lo: f64, hi: f64, n: usize) -> Result<()> {
    if !(lo >= 0.0) || !lo.is_finite() {
        return Err(Error::invalid("grid lower end", lo, "a finite income"));
    }
    if !(hi > lo) || !hi.is_finite() {
        return Err(Error::invalid(
            "grid upper end",
            hi,
            "a finite income above the lower end",
        ));
    }
    if n < 2 {
        return Err(Error::invalid("grid points", n as f64, "at least 2"));
    }
    Ok(())
}

/// `n` log-spaced incomes from `lo` to `hi` inclusive; `lo > 0`.
pub fn log_grid(lo: f64, hi: f64, n: usize) -> Result<Vec<Income>> {
    grid_bounds(lo, hi, n)?;
    if lo == 0.0 {
        return Err(Error::invalid("grid lower end", lo, "a positive income"));
    }
    let (a, b) = (ln(lo), ln(hi));
    (0..n)
        .map(|i| {
            let v = match i {
                0 => lo,
                _ if i + 1 == n => hi,
                _ => exp(a + (b - a) * i as f64 / (n - 1) as f64),
            };
            Income::new(v)
        })
        .collect()
}

/// `n` evenly spaced incomes from `lo` to `hi` inclusive.
pub fn linear_grid(lo: f64, hi: f64, n: usize) -> Result<Vec<Income>> {
    grid_bounds(lo, hi, n)?;
    (0..n)
        .map(|i| {
            let v = if i + 1 == n {
                hi
            } else {
                lo + (hi - lo) * i as f64 / (n - 1) as f64
            };
            Income::new(v)
        })
        .collect()
}

fn values(grid: &[Income]) -> Vec<f64> {
    grid.iter().map(|y| y.get()).collect()
}

/// A three-knot profile on `[0, L]` whose drop over the first third is
/// `bend·ln 2`. Linear iff `bend = 1/3`.
pub fn three_knot_profile(interval_length: f64, bend: f64) -> Result<PeriodicProfile> {
    if !(bend > 0.0 && bend < 1.0) {
        return Err(Error::invalid("bend", bend, "a real in (0, 1)"));
    }
    if !(interval_length > 0.0) || !interval_length.is_finite() {
        return Err(Error::invalid("interval length", interval_length, "a positive real"));
    }
    PeriodicProfile::new(alloc::vec![
        (0.0, 0.0),
        (interval_length / 3.0, -bend * LN_2),
        (interval_length, -LN_2),
    ])
}

/// The member of the fixed-fraction class generated by `profile`:
/// `f(y) = −exp(g(ln y))`, with `f(λy) = 2f(y)`.
pub fn build_crpi_family(lambda: f64, profile: PeriodicProfile) -> Result<SwfFamily> {
    TabulatedFamily::new(PeriodicLaw::Fraction { lambda }, profile).map(SwfFamily::Tabulated)
}

/// The member of the fixed-damage class generated by `profile`:
/// `f(y) = −exp(g(y))`, with `f(y − Δ) = 2f(y)`.
pub fn build_cdpi_family(delta: f64, profile: PeriodicProfile) -> Result<SwfFamily> {
    TabulatedFamily::new(PeriodicLaw::Difference { delta }, profile).map(SwfFamily::Tabulated)
}

/// A claimed closed form for one-rival protected income.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "law", rename_all = "snake_case"))]
pub enum ProtectionLaw {
    /// `Ÿ(y) = λy`.
    Fraction { lambda: f64 },
    /// `Ÿ(y) = max(0, y − Δ)`.
    Difference { delta: f64 },
    /// `Ÿ(y) = c·(y/c)^β` on `y ≥ c`.
    Elasticity { beta: f64, c: f64 },
}

impl ProtectionLaw {
    pub fn validate(&self) -> Result<()> {
        match *self {
            ProtectionLaw::Fraction { lambda } if !(lambda > 0.0 && lambda < 1.0) => {
                Err(Error::invalid("lambda", lambda, "a real in (0, 1)"))
            }
            ProtectionLaw::Difference { delta } if !(delta > 0.0) || !delta.is_finite() => {
                Err(Error::invalid("delta", delta, "a positive real"))
            }
            ProtectionLaw::Elasticity { beta, .. } if !(beta > 0.0 && beta < 1.0) => {
                Err(Error::invalid("beta", beta, "a real in (0, 1)"))
            }
            ProtectionLaw::Elasticity { c, .. } if !(c > 0.0) || !c.is_finite() => {
                Err(Error::invalid("c", c, "a positive real"))
            }
            _ => Ok(()),
        }
    }

    pub fn proposition(&self) -> u8 {
        match self {
            ProtectionLaw::Fraction { .. } => 2,
            ProtectionLaw::Difference { .. } => 4,
            ProtectionLaw::Elasticity { .. } => 6,
        }
    }

    pub fn apply(&self, y: f64) -> f64 {
        match *self {
            ProtectionLaw::Fraction { lambda } => lambda * y,
            ProtectionLaw::Difference { delta } => (y - delta).max(0.0),
            ProtectionLaw::Elasticity { beta, c } => c * powf(y / c, beta),
        }
    }

    /// The transformed income that carries exactly twice the (negative)
    /// welfare of `y`, when the law applies at `y`.
    fn halving_point(&self, y: f64) -> Option<f64> {
        match *self {
            ProtectionLaw::Difference { delta } if y < delta => None,
            ProtectionLaw::Elasticity { c, .. } if y < c => None,
            _ => Some(self.apply(y)),
        }
    }
}

/// Residual `|Ÿ(y) − law(y)| / max(y, 1)` of the numeric-limit one-rival
/// protected income.
pub fn verify_protection_law(family: &SwfFamily, law: ProtectionLaw, grid: &[Income]) -> Result<VerificationReport> {
    law.validate()?;
    let mut failures = 0usize;
    let residuals = grid
        .iter()
        .map(|&y| match protected_income_numeric(family, y, 1) {
            Ok(p) => (p.protected_income.get() - law.apply(y.get())).abs() / y.get().max(1.0),
            Err(_) => {
                failures += 1;
                f64::INFINITY
            }
        })
        .collect();
    let report = VerificationReport::new(
        law.proposition(),
        "protection law",
        values(grid),
        residuals,
        Criterion::AtMost(PROTECTION_TOL),
    );
    Ok(if failures > 0 {
        report.with_note(format!("{failures} grid points outside the family domain"))
    } else {
        report
    })
}

/// Relative residual of the functional equation `f(T(y)) = 2f(y)`, where `T`
/// is the law's one-rival protected income. Grid points where the law does not
/// apply are skipped with a zero residual.
pub fn verify_functional_equation(
    family: &SwfFamily,
    law: ProtectionLaw,
    grid: &[Income],
) -> Result<VerificationReport> {
    law.validate()?;
    let residuals = grid
        .iter()
        .map(|&y| {
            let Some(t) = law.halving_point(y.get()) else {
                return Ok(0.0);
            };
            let lhs = family.eval(Income::new(t)?)?;
            let rhs = family.eval(y)?.scale(2.0)?;
            Ok(match (lhs, rhs) {
                (WelfareValue::Finite(a), WelfareValue::Finite(b)) => (a - b).abs() / b.abs().max(f64::MIN_POSITIVE),
                (a, b) if a == b => 0.0,
                _ => f64::INFINITY,
            })
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(VerificationReport::new(
        law.proposition(),
        "functional equation",
        values(grid),
        residuals,
        Criterion::AtMost(FUNCTIONAL_EQUATION_TOL),
    ))
}

fn spread_report(proposition: u8, check: &str, grid: Vec<f64>, points: Vec<f64>, linear: bool) -> VerificationReport {
    let criterion = if linear {
        Criterion::AtMost(LINEAR_SPREAD_TOL)
    } else {
        Criterion::AtLeast(SPREAD_THRESHOLD)
    };
    if points.len() < 3 {
        let n = points.len();
        return VerificationReport::new(proposition, check, grid, points, criterion)
            .flagged(format!("insufficient grid: {n} usable points, at least 3 required"));
    }
    let min = points.iter().copied().fold(f64::INFINITY, f64::min);
    let mean = points.iter().sum::<f64>() / points.len() as f64;
    let residuals = points.iter().map(|p| p - min).collect();
    let mut report = VerificationReport::new(proposition, check, grid, residuals, criterion);
    report.estimate = Some(mean);
    report
}

/// Two-rival ratio `μ(y) = Ÿ₃(y)/y` of the fixed-fraction family built from
/// `profile`. The spread `max μ − min μ` must vanish for a linear profile and
/// must not for any other.
pub fn verify_rigidity(lambda: f64, profile: PeriodicProfile, grid: &[Income]) -> Result<VerificationReport> {
    let linear = profile.is_linear();
    let family = build_crpi_family(lambda, profile)?;
    let mut used = Vec::new();
    let mut mu = Vec::new();
    for &y in grid.iter().filter(|y| y.get() > 0.0) {
        let p = protected_income(&family, y, 2)?;
        used.push(y.get());
        mu.push(p.protected_income.get() / y.get());
    }
    Ok(spread_report(3, "two-rival fraction spread", used, mu, linear))
}

/// Two-rival damage `Ω(y) = y − Ÿ₃(y)` of the fixed-damage family built from
/// `profile`, over grid points with positive two-rival protection.
pub fn verify_damage_rigidity(delta: f64, profile: PeriodicProfile, grid: &[Income]) -> Result<VerificationReport> {
    let linear = profile.is_linear();
    let family = build_cdpi_family(delta, profile)?;
    let mut used = Vec::new();
    let mut omega = Vec::new();
    for &y in grid.iter().filter(|y| y.get() > 0.0) {
        let p = protected_income(&family, y, 2)?;
        if p.positive {
            used.push(y.get());
            omega.push(y.get() - p.protected_income.get());
        }
    }
    Ok(spread_report(5, "two-rival damage spread", used, omega, linear))
}

/// Measured elasticities above the floor `c`,
/// `β̈(y) = ln(Ÿ(y)/c) / ln(y/c)` and `β⃛(y)` from `Ÿ₃`, must satisfy
/// `ln 2 / ln β̈ = ln 3 / ln β⃛`. The floor is the family's lower endpoint.
pub fn verify_elasticity_rigidity(family: &SwfFamily, grid: &[Income]) -> Result<VerificationReport> {
    let c = family.lower_bound().get();
    if c <= 0.0 {
        return Err(Error::FamilyMismatch {
            operation: "elasticity rigidity",
            expected: "floored (CPIE)",
        });
    }
    let mut used = Vec::new();
    let mut residuals = Vec::new();
    let mut sum = 0.0;
    for &y in grid.iter().filter(|y| y.get() > c) {
        let p2 = protected_income_numeric(family, y, 1)?.protected_income.get();
        let p3 = protected_income_numeric(family, y, 2)?.protected_income.get();
        let scale = ln(y.get() / c);
        let (b2, b3) = (ln(p2 / c) / scale, ln(p3 / c) / scale);
        let (r2, r3) = (LN_2 / ln(b2), LN_3 / ln(b3));
        used.push(y.get());
        residuals.push((r2 - r3).abs());
        sum += r2;
    }
    let n = used.len();
    let mut report = VerificationReport::new(
        7,
        "elasticity consistency",
        used,
        residuals,
        Criterion::AtMost(ELASTICITY_TOL),
    );
    if n == 0 {
        return Ok(report.flagged(String::from("insufficient grid: no income above the floor")));
    }
    report.estimate = Some(1.0 - sum / n as f64);
    Ok(report)
}

/// Existence sweep: `has_positive_protection` must agree with the numeric
/// limit exceeding the lower endpoint by [`EXISTENCE_THRESHOLD`]. The residual
/// at each income counts the disagreeing families.
pub fn verify_existence(families: &[SwfFamily], grid: &[Income]) -> Result<VerificationReport> {
    if families.is_empty() {
        return Err(Error::invalid("families", 0.0, "a nonempty sweep"));
    }
    let residuals = grid
        .iter()
        .map(|&y| {
            let mut disagreements = 0usize;
            for family in families {
                let lower = family.lower_bound().get();
                let observed = y.get() > lower
                    && protected_income_numeric(family, y, 1)?.protected_income.get() - lower > EXISTENCE_THRESHOLD;
                if observed != has_positive_protection(family, y) {
                    disagreements += 1;
                }
            }
            Ok(disagreements as f64)
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(VerificationReport::new(
        1,
        "existence of positive protection",
        values(grid),
        residuals,
        Criterion::AtMost(0.0),
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum InvarianceKind {
    /// `EE(κy₁, κy₂) = κ·EE(y₁, y₂)`; Kolm-Atkinson.
    Scale,
    /// `EE(y₁ + k, y₂ + k) = EE(y₁, y₂) + k`; Kolm-Pollak.
    Translation,
    /// `EE(y₁^ρ, y₂^ρ; c^ρ) = EE(y₁, y₂; c)^ρ`; CPIE.
    Compound,
}

/// Two incomes and the transformation parameter (`κ`, `k` or `ρ`).
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct InvarianceSample {
    pub y1: f64,
    pub y2: f64,
    pub parameter: f64,
}

fn ede_of(family: &SwfFamily, y1: f64, y2: f64) -> Result<f64> {
    Ok(family.ede(&Distribution::from_values(&[y1, y2])?)?.get())
}

fn invariance_residual(family: &SwfFamily, kind: InvarianceKind, s: InvarianceSample) -> Result<f64> {
    let ee = ede_of(family, s.y1, s.y2)?;
    let (lhs, rhs) = match (kind, family) {
        (InvarianceKind::Scale, _) => (
            ede_of(family, s.parameter * s.y1, s.parameter * s.y2)?,
            s.parameter * ee,
        ),
        (InvarianceKind::Translation, _) => (
            ede_of(family, s.y1 + s.parameter, s.y2 + s.parameter)?,
            ee + s.parameter,
        ),
        (InvarianceKind::Compound, &SwfFamily::Cpie { gamma, c }) => {
            let rho = s.parameter;
            let moved = SwfFamily::cpie(gamma, powf(c, rho))?;
            (ede_of(&moved, powf(s.y1, rho), powf(s.y2, rho))?, powf(ee, rho))
        }
        (InvarianceKind::Compound, _) => unreachable!("kind checked against family"),
    };
    Ok((lhs - rhs).abs() / if rhs > 0.0 { rhs } else { 1.0 })
}

/// Relative residual `|EE(transformed) − transform(EE)|` per sample.
pub fn verify_invariance(
    family: &SwfFamily,
    kind: InvarianceKind,
    samples: &[InvarianceSample],
) -> Result<VerificationReport> {
    let expected = match kind {
        InvarianceKind::Scale => "Kolm-Atkinson",
        InvarianceKind::Translation => "Kolm-Pollak",
        InvarianceKind::Compound => "CPIE",
    };
    let matches = matches!(
        (kind, family),
        (InvarianceKind::Scale, SwfFamily::KolmAtkinson { .. })
            | (InvarianceKind::Translation, SwfFamily::KolmPollak { .. })
            | (InvarianceKind::Compound, SwfFamily::Cpie { .. })
    );
    if !matches {
        return Err(Error::FamilyMismatch {
            operation: "invariance check",
            expected,
        });
    }
    for s in samples {
        let ok = match kind {
            InvarianceKind::Scale | InvarianceKind::Compound => s.parameter > 0.0 && s.parameter.is_finite(),
            InvarianceKind::Translation => {
                s.parameter.is_finite() && s.y1 + s.parameter >= 0.0 && s.y2 + s.parameter >= 0.0
            }
        };
        if !ok {
            return Err(Error::invalid(
                "invariance parameter",
                s.parameter,
                "a transformation keeping incomes in the domain",
            ));
        }
    }
    let residuals = samples
        .iter()
        .map(|&s| invariance_residual(family, kind, s))
        .collect::<Result<Vec<f64>>>()?;
    let report = VerificationReport::new(
        8,
        match kind {
            InvarianceKind::Scale => "scale invariance",
            InvarianceKind::Translation => "translation invariance",
            InvarianceKind::Compound => "compound invariance",
        },
        samples.iter().map(|s| s.y1).collect(),
        residuals,
        Criterion::AtMost(INVARIANCE_TOL),
    );
    Ok(if samples.len() < MIN_INVARIANCE_SAMPLES {
        let n = samples.len();
        report.flagged(format!("{n} samples, at least {MIN_INVARIANCE_SAMPLES} required"))
    } else {
        report
    })
}
