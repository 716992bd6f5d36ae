//! Runner behind `welfare verify --prop N`.

use std::fmt::Write as _;

use serde::Deserialize;
use welfare_core::lab::{
    self, build_cdpi_family, build_crpi_family, three_knot_profile, Criterion, ProtectionLaw, VerificationReport,
};
use welfare_core::{Error, Income, PeriodicLaw, PeriodicProfile, SwfFamily};

use crate::sampling::{default_sample_count, invariance_kind, invariance_samples, DEFAULT_SEED};
use crate::wire::Malformed;

const LN_2: f64 = std::f64::consts::LN_2;
const DEFAULT_BEND: f64 = 0.6;

/// Optional knobs for a verification run. A family may be given inline
/// (`{"family":"kolm_pollak","alpha":1}`) or nested under `family`.
#[derive(Debug, Clone, Default, Deserialize)]
pub struct VerifyParams {
    pub lambda: Option<f64>,
    pub delta: Option<f64>,
    /// Drop over the first third of a three-knot profile, as a fraction of ln 2.
    pub bend: Option<f64>,
    pub profile: Option<PeriodicProfile>,
    pub y_min: Option<f64>,
    pub y_max: Option<f64>,
    pub points: Option<usize>,
    pub samples: Option<usize>,
    pub seed: Option<u64>,
    #[serde(skip)]
    pub family: Option<SwfFamily>,
}

pub fn parse_params(text: &str) -> Result<VerifyParams, Malformed> {
    let value: serde_json::Value = crate::wire::parse("params", text)?;
    let mut params: VerifyParams =
        serde_json::from_value(value.clone()).map_err(|e| Malformed(format!("malformed params: {e}")))?;
    params.family = match value.get("family") {
        None => None,
        Some(nested @ serde_json::Value::Object(_)) => {
            Some(serde_json::from_value(nested.clone()).map_err(|e| Malformed(format!("malformed family: {e}")))?)
        }
        Some(_) => Some(serde_json::from_value(value).map_err(|e| Malformed(format!("malformed family: {e}")))?),
    };
    Ok(params)
}

#[derive(Debug)]
pub enum VerifyError {
    Params(Malformed),
    Domain(Error),
}

impl std::fmt::Display for VerifyError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            VerifyError::Params(m) => m.fmt(f),
            VerifyError::Domain(e) => e.fmt(f),
        }
    }
}

impl std::error::Error for VerifyError {}

impl From<Error> for VerifyError {
    fn from(e: Error) -> Self {
        VerifyError::Domain(e)
    }
}

fn bad(msg: &str) -> VerifyError {
    VerifyError::Params(Malformed(msg.to_string()))
}

struct Grids<'a> {
    params: &'a VerifyParams,
    points: usize,
}

impl Grids<'_> {
    fn log(&self, lo: f64, hi: f64) -> Result<Vec<Income>, Error> {
        lab::log_grid(
            self.params.y_min.unwrap_or(lo),
            self.params.y_max.unwrap_or(hi),
            self.points,
        )
    }

    fn linear(&self, lo: f64, hi: f64) -> Result<Vec<Income>, Error> {
        lab::linear_grid(
            self.params.y_min.unwrap_or(lo),
            self.params.y_max.unwrap_or(hi),
            self.points,
        )
    }
}

fn profile_for(params: &VerifyParams, interval_length: f64) -> Result<PeriodicProfile, Error> {
    match &params.profile {
        Some(p) => Ok(p.clone()),
        None => three_knot_profile(interval_length, params.bend.unwrap_or(DEFAULT_BEND)),
    }
}

/// Profiles to test for rigidity: the requested one, or a bent and a linear
/// profile side by side.
fn rigidity_profiles(params: &VerifyParams, interval_length: f64) -> Result<Vec<PeriodicProfile>, Error> {
    if params.profile.is_some() || params.bend.is_some() {
        Ok(vec![profile_for(params, interval_length)?])
    } else {
        Ok(vec![
            three_knot_profile(interval_length, DEFAULT_BEND)?,
            PeriodicProfile::linear(interval_length, 0.0)?,
        ])
    }
}

fn fraction_of(family: &SwfFamily) -> Option<f64> {
    match family {
        SwfFamily::KolmAtkinson { eta } if *eta > 1.0 => Some(2f64.powf(1.0 / (1.0 - eta))),
        SwfFamily::Tabulated(t) => match t.law() {
            PeriodicLaw::Fraction { lambda } => Some(lambda),
            PeriodicLaw::Difference { .. } => None,
        },
        _ => None,
    }
}

fn damage_of(family: &SwfFamily) -> Option<f64> {
    match family {
        SwfFamily::KolmPollak { alpha } if *alpha > 0.0 => Some(LN_2 / alpha),
        SwfFamily::Tabulated(t) => match t.law() {
            PeriodicLaw::Difference { delta } => Some(delta),
            PeriodicLaw::Fraction { .. } => None,
        },
        _ => None,
    }
}

fn cpie_of(family: &SwfFamily) -> Result<(f64, f64), VerifyError> {
    match *family {
        SwfFamily::Cpie { gamma, c } => Ok((gamma, c)),
        _ => Err(bad("this proposition concerns CPIE families")),
    }
}

fn default_sweep() -> Result<Vec<SwfFamily>, Error> {
    Ok(vec![
        SwfFamily::kolm_atkinson(0.5)?,
        SwfFamily::kolm_atkinson(1.0)?,
        SwfFamily::kolm_atkinson(2.0)?,
        SwfFamily::kolm_atkinson(3.0)?,
        SwfFamily::kolm_pollak(0.0)?,
        SwfFamily::kolm_pollak(0.1)?,
        SwfFamily::kolm_pollak(1.0)?,
        SwfFamily::cpie(1.0, 1.0)?,
        SwfFamily::cpie(2.0, 1.0)?,
        build_crpi_family(0.5, three_knot_profile(LN_2, DEFAULT_BEND)?)?,
        build_cdpi_family(10.0, three_knot_profile(10.0, DEFAULT_BEND)?)?,
    ])
}

/// Runs the checks for proposition `prop` (1 to 8).
pub fn run(prop: u8, params: &VerifyParams, default_points: usize) -> Result<Vec<VerificationReport>, VerifyError> {
    let grids = Grids {
        params,
        points: params.points.unwrap_or(default_points),
    };
    let family = params.family.as_ref();
    let reports = match prop {
        1 => {
            let families = match family {
                Some(f) => vec![f.clone()],
                None => default_sweep()?,
            };
            vec![lab::verify_existence(&families, &grids.log(0.5, 200.0)?)?]
        }
        2 => {
            let (family, lambda) = match family {
                Some(f) => {
                    let lambda = params
                        .lambda
                        .or_else(|| fraction_of(f))
                        .ok_or_else(|| bad("give lambda or a fixed-fraction family"))?;
                    (f.clone(), lambda)
                }
                None => {
                    let lambda = params.lambda.unwrap_or(0.5);
                    (build_crpi_family(lambda, profile_for(params, -lambda.ln())?)?, lambda)
                }
            };
            let law = ProtectionLaw::Fraction { lambda };
            let grid = grids.log(1.0, 1e4)?;
            vec![
                lab::verify_protection_law(&family, law, &grid)?,
                lab::verify_functional_equation(&family, law, &grid)?,
            ]
        }
        3 => {
            let lambda = params.lambda.or_else(|| family.and_then(fraction_of)).unwrap_or(0.5);
            let grid = grids.log(1.0, 1e4)?;
            rigidity_profiles(params, -lambda.ln())?
                .into_iter()
                .map(|p| lab::verify_rigidity(lambda, p, &grid))
                .collect::<Result<_, _>>()?
        }
        4 => {
            let (family, delta) = match family {
                Some(f) => {
                    let delta = params
                        .delta
                        .or_else(|| damage_of(f))
                        .ok_or_else(|| bad("give delta or a fixed-damage family"))?;
                    (f.clone(), delta)
                }
                None => {
                    let delta = params.delta.unwrap_or(10.0);
                    (build_cdpi_family(delta, profile_for(params, delta)?)?, delta)
                }
            };
            let law = ProtectionLaw::Difference { delta };
            let grid = grids.linear(delta / 10.0, 10.0 * delta)?;
            vec![
                lab::verify_protection_law(&family, law, &grid)?,
                lab::verify_functional_equation(&family, law, &grid)?,
            ]
        }
        5 => {
            let delta = params.delta.or_else(|| family.and_then(damage_of)).unwrap_or(10.0);
            let grid = grids.linear(delta / 10.0, 10.0 * delta)?;
            rigidity_profiles(params, delta)?
                .into_iter()
                .map(|p| lab::verify_damage_rigidity(delta, p, &grid))
                .collect::<Result<_, _>>()?
        }
        6 => {
            let family = match family {
                Some(f) => f.clone(),
                None => SwfFamily::cpie(2.0, 1.0)?,
            };
            let (gamma, c) = cpie_of(&family)?;
            if gamma <= 1.0 {
                return Err(bad("constant elasticity protection needs gamma > 1"));
            }
            let law = ProtectionLaw::Elasticity {
                beta: 2f64.powf(1.0 / (1.0 - gamma)),
                c,
            };
            let grid = grids.log(c * std::f64::consts::E, c * 1e4)?;
            vec![
                lab::verify_protection_law(&family, law, &grid)?,
                lab::verify_functional_equation(&family, law, &grid)?,
            ]
        }
        7 => {
            let families = match family {
                Some(f) => vec![f.clone()],
                None => vec![
                    SwfFamily::cpie(1.5, 1.0)?,
                    SwfFamily::cpie(2.0, 1.0)?,
                    SwfFamily::cpie(4.0, 1.0)?,
                ],
            };
            let mut out = Vec::new();
            for f in &families {
                let (gamma, c) = cpie_of(f)?;
                if gamma <= 1.0 {
                    return Err(bad("elasticity consistency needs gamma > 1"));
                }
                out.push(lab::verify_elasticity_rigidity(
                    f,
                    &grids.log(c * std::f64::consts::E, c * 1e4)?,
                )?);
            }
            out
        }
        8 => {
            let families = match family {
                Some(f) => vec![f.clone()],
                None => vec![
                    SwfFamily::kolm_atkinson(2.0)?,
                    SwfFamily::kolm_pollak(1.0)?,
                    SwfFamily::cpie(1.0, 1.0)?,
                    SwfFamily::cpie(2.0, 1.0)?,
                ],
            };
            let n = params.samples.unwrap_or_else(default_sample_count);
            let seed = params.seed.unwrap_or(DEFAULT_SEED);
            let mut out = Vec::new();
            for f in &families {
                let kind = invariance_kind(f).ok_or_else(|| bad("tabulated families carry no invariance claim"))?;
                out.push(lab::verify_invariance(f, kind, &invariance_samples(f, kind, n, seed))?);
            }
            out
        }
        _ => return Err(bad("proposition must be between 1 and 8")),
    };
    Ok(reports)
}

fn criterion_text(c: Criterion) -> String {
    match c {
        Criterion::AtMost(t) => format!("<= {t:e}"),
        Criterion::AtLeast(t) => format!("> {t:e}"),
    }
}

/// Human-readable summary, one row per report.
pub fn render_table(reports: &[VerificationReport]) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:<5} {:<34} {:>6} {:>12} {:>10} {:<6} note",
        "prop", "check", "points", "statistic", "criterion", "result"
    );
    for r in reports {
        let _ = writeln!(
            out,
            "{:<5} {:<34} {:>6} {:>12.3e} {:>10} {:<6} {}",
            r.proposition,
            r.check,
            r.grid.len(),
            r.max_abs_residual,
            criterion_text(r.criterion),
            if r.pass { "PASS" } else { "FAIL" },
            r.note.as_deref().unwrap_or(""),
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_proposition_passes_with_defaults() {
        for prop in 1..=8 {
            let reports = run(prop, &VerifyParams::default(), 64).unwrap();
            assert!(!reports.is_empty());
            for r in &reports {
                assert!(r.pass, "prop {prop}: {r:?}");
            }
        }
    }

    #[test]
    fn inline_family_params() {
        let p = parse_params(r#"{"family":"kolm_pollak","alpha":1}"#).unwrap();
        assert_eq!(p.family, Some(SwfFamily::kolm_pollak(1.0).unwrap()));
        let reports = run(8, &p, 64).unwrap();
        assert_eq!(reports.len(), 1);
        assert!(reports[0].pass);
        let nested = parse_params(r#"{"family":{"family":"kolm_atkinson","eta":2},"points":16}"#).unwrap();
        assert_eq!(nested.points, Some(16));
        assert!(run(2, &nested, 64)
            .unwrap()
            .iter()
            .all(|r| r.pass && r.grid.len() == 16));
    }

    #[test]
    fn mismatched_law_fails_and_bad_params_error() {
        let p = parse_params(r#"{"family":"kolm_atkinson","eta":2,"delta":50}"#).unwrap();
        let reports = run(4, &p, 64).unwrap();
        assert!(!reports[0].pass);
        assert!(matches!(run(9, &p, 64), Err(VerifyError::Params(_))));
        assert!(matches!(run(6, &p, 64), Err(VerifyError::Params(_))));
        assert!(parse_params("{").is_err());
    }
}
