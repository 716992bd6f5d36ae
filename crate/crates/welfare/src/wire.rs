//! The JSON schema shared by the CLI and the HTTP service.
//!
//! Both front ends serialize through [`to_json`], so identical queries yield
//! byte-identical output. Every numeric response carries the tolerance policy
//! the engine applied.

use serde::{Deserialize, Serialize};
use welfare_core::elicitation::{InferredPreference, Question, SessionState, TranscriptEntry, CONSISTENCY_TOL};
use welfare_core::family::LOG_BRANCH_BAND;
use welfare_core::protection::{has_positive_protection, protected_income, tradeoff_income};
use welfare_core::root::Bisection;
use welfare_core::{Distribution, Error, Income, ProtectionResult, SwfFamily, WelfareValue};

/// Tolerances in force for every computation. Fixed by the engine.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TolerancePolicy {
    /// Relative bracket width at which numeric inversion of `f` stops.
    pub inverse_rel_tol: f64,
    /// Width of the band around a coefficient of 1 treated as the log branch.
    pub log_branch_band: f64,
    /// Absolute gap under which two elicited coefficients agree.
    pub consistency_tol: f64,
}

impl TolerancePolicy {
    pub fn engine() -> Self {
        TolerancePolicy {
            inverse_rel_tol: Bisection::default().rel_tol,
            log_branch_band: LOG_BRANCH_BAND,
            consistency_tol: CONSISTENCY_TOL,
        }
    }
}

#[derive(Serialize)]
struct Envelope<'a, T: Serialize> {
    #[serde(flatten)]
    body: &'a T,
    tolerance: TolerancePolicy,
}

/// Compact JSON for `body` with the tolerance policy attached.
pub fn to_json<T: Serialize>(body: &T) -> String {
    serde_json::to_string(&Envelope {
        body,
        tolerance: TolerancePolicy::engine(),
    })
    .expect("wire types serialize infallibly")
}

/// Error raised while decoding a request.
#[derive(Debug)]
pub struct Malformed(pub String);

impl std::fmt::Display for Malformed {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Malformed {}

pub fn parse<T: serde::de::DeserializeOwned>(what: &str, text: &str) -> Result<T, Malformed> {
    serde_json::from_str(text).map_err(|e| Malformed(format!("malformed {what}: {e}")))
}

#[derive(Debug, Clone, Deserialize)]
pub struct EvaluateRequest {
    pub family: SwfFamily,
    pub distribution: Distribution,
}

#[derive(Debug, Clone, Serialize)]
pub struct EvaluateResponse {
    pub welfare: WelfareValue,
    pub ede: Income,
    pub n: usize,
}

pub fn evaluate(req: &EvaluateRequest) -> Result<EvaluateResponse, Error> {
    Ok(EvaluateResponse {
        welfare: req.family.welfare(&req.distribution)?,
        ede: req.family.ede(&req.distribution)?,
        n: req.distribution.len(),
    })
}

fn one() -> u32 {
    1
}

#[derive(Debug, Clone, Deserialize)]
pub struct ProtectRequest {
    pub family: SwfFamily,
    pub y: Income,
    #[serde(default = "one")]
    pub rivals: u32,
    /// A finite rival income at which to evaluate the trade-off curve.
    #[serde(default)]
    pub y2: Option<Income>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ProtectResponse {
    pub y: Income,
    pub rivals: u32,
    #[serde(flatten)]
    pub result: ProtectionResult,
    pub has_positive_protection: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tradeoff_income: Option<Income>,
}

pub fn protect(req: &ProtectRequest) -> Result<ProtectResponse, Error> {
    let result = protected_income(&req.family, req.y, req.rivals)?;
    let tradeoff_income = match req.y2 {
        Some(y2) => Some(tradeoff_income(&req.family, y2, req.y)?),
        None => None,
    };
    Ok(ProtectResponse {
        y: req.y,
        rivals: req.rivals,
        result,
        has_positive_protection: has_positive_protection(&req.family, req.y),
        tradeoff_income,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct SessionCreated {
    pub id: String,
    pub state: SessionState,
    pub first_question: Question,
}

/// Outcome of one answer: exactly one of `next_question` and
/// `inferred_preference` is present.
#[derive(Debug, Clone, Serialize)]
pub struct AnswerOutcome {
    pub session_id: String,
    pub state: SessionState,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub next_question: Option<Question>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub inferred_preference: Option<InferredPreference>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SessionView {
    pub id: String,
    pub state: SessionState,
    pub transcript: Vec<TranscriptEntry>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub next_question: Option<Question>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub inferred_preference: Option<InferredPreference>,
}

impl SessionView {
    pub fn of(session: &welfare_core::elicitation::Session) -> Self {
        SessionView {
            id: session.id().to_string(),
            state: session.state(),
            transcript: session.transcript().to_vec(),
            next_question: session.next_question().ok(),
            inferred_preference: session.inferred_preference().cloned(),
        }
    }
}
