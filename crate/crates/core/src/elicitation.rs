//! Revealed inequality aversion.
//!
//! A respondent states how much of an individual's income must be protected
//! when someone else's income rises without bound. Each answer shape pins one
//! family: a fixed fraction (Kolm-Atkinson), a fixed collateral damage
//! (Kolm-Pollak) or a fixed income elasticity above a floor (CPIE). Asking the
//! same quantity against two rivals over-determines the coefficient, which is
//! the cross-check reported in [`Diagnostics`].
//!
//! [`Session`] runs the question protocol: one-rival shape question at two
//! income levels, then the matching two-rival question, then completion.

use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::family::SwfFamily;
use crate::math::{ln, log2, LN_2, LN_3};

/// Absolute tolerance below which two coefficient estimates count as equal.
pub const CONSISTENCY_TOL: f64 = 1e-9;

/// Incomes at which the one-rival question is asked.
pub const DEFAULT_INCOMES: [f64; 2] = [100.0, 1000.0];

fn unit_interval(name: &'static str, v: f64) -> Result<()> {
    if v > 0.0 && v < 1.0 {
        Ok(())
    } else {
        Err(Error::invalid(name, v, "a real in (0, 1)"))
    }
}

fn positive(name: &'static str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid(name, v, "a finite positive real"))
    }
}

fn finite_or_overflow(v: f64, quantity: &'static str) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::Overflow { quantity })
    }
}

/// `η = 1 − ln 2 / ln λ` from a protected fraction `λ`.
pub fn infer_eta_from_fraction(lambda: f64) -> Result<f64> {
    unit_interval("lambda", lambda)?;
    finite_or_overflow(1.0 - LN_2 / ln(lambda), "eta")
}

/// `α = ln 2 / Δ` from a constant collateral damage `Δ`.
pub fn infer_alpha_from_damage(delta: f64) -> Result<f64> {
    positive("delta", delta)?;
    finite_or_overflow(LN_2 / delta, "alpha")
}

/// `γ = 1 − ln 2 / ln β` from an income elasticity of protected income `β`.
pub fn infer_gamma_from_elasticity(beta: f64) -> Result<f64> {
    unit_interval("beta", beta)?;
    finite_or_overflow(1.0 - LN_2 / ln(beta), "gamma")
}

/// Leaky-bucket calibration `take = ratio^η`, so `η = ln take / ln ratio`.
///
/// This is a marginal calibration: it is only exact for infinitesimal
/// transfers from a donor `ratio` times richer than the recipient.
pub fn leaky_bucket_coefficient(ratio: f64, take: f64) -> Result<f64> {
    if !(ratio > 1.0) || !ratio.is_finite() {
        return Err(Error::invalid("ratio", ratio, "a finite real > 1"));
    }
    if !(take >= 1.0) || !take.is_finite() {
        return Err(Error::invalid("take", take, "a finite real >= 1"));
    }
    Ok(log2(take) / log2(ratio))
}

/// Cross-check residuals attached to an inferred coefficient. All entries are
/// nonnegative.
#[derive(Debug, Clone, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Diagnostics {
    /// Both answers reveal the same coefficient to within [`CONSISTENCY_TOL`].
    pub consistent: bool,
    /// Distance between the coefficient implied by the one-rival answer and the
    /// reported one.
    pub one_rival: f64,
    pub two_rival: f64,
    /// Distance between the two implied coefficients.
    pub inconsistency: f64,
    /// The two-rival damage did not exceed the one-rival damage.
    #[cfg_attr(feature = "serde", serde(default))]
    pub ordering_violation: bool,
    /// Leaky-bucket coefficient recorded in the same session, for comparison.
    #[cfg_attr(feature = "serde", serde(default, skip_serializing_if = "Option::is_none"))]
    pub leaky_bucket: Option<f64>,
}

/// Family and coefficient revealed by a pair of answers.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct InferredPreference {
    #[cfg_attr(feature = "serde", serde(flatten))]
    pub family: SwfFamily,
    pub coefficient: f64,
    #[cfg_attr(feature = "serde", serde(rename = "residuals"))]
    pub diagnostics: Diagnostics,
}

/// Combines two estimates of the same quantity: the first one when they agree,
/// their mean (the least-squares fit) otherwise.
fn reconcile(first: f64, second: f64) -> (f64, Diagnostics) {
    let gap = (first - second).abs();
    if gap <= CONSISTENCY_TOL {
        let d = Diagnostics {
            consistent: true,
            inconsistency: gap,
            ..Diagnostics::default()
        };
        (first, d)
    } else {
        let fit = 0.5 * (first + second);
        let d = Diagnostics {
            consistent: false,
            one_rival: (fit - first).abs(),
            two_rival: (fit - second).abs(),
            inconsistency: gap,
            ..Diagnostics::default()
        };
        (fit, d)
    }
}

/// Fractions `λ` (one rival) and `μ` (two rivals) come from one
/// Kolm-Atkinson member only if `ln 2 / ln λ = ln 3 / ln μ`; that common
/// value is `1 − η`.
pub fn check_consistency_fraction(lambda: f64, mu: f64) -> Result<InferredPreference> {
    unit_interval("lambda", lambda)?;
    unit_interval("mu", mu)?;
    let (ratio, diagnostics) = reconcile(LN_2 / ln(lambda), LN_3 / ln(mu));
    let eta = finite_or_overflow(1.0 - ratio, "eta")?;
    Ok(InferredPreference {
        family: SwfFamily::kolm_atkinson(eta)?,
        coefficient: eta,
        diagnostics,
    })
}

/// Damages `Δ` (one rival) and `Ω` (two rivals) come from one Kolm-Pollak
/// member only if `ln 2 / Δ = ln 3 / Ω = α`, which also forces `Ω > Δ`.
pub fn check_consistency_damage(delta: f64, omega: f64) -> Result<InferredPreference> {
    positive("delta", delta)?;
    positive("omega", omega)?;
    let (alpha, mut diagnostics) = reconcile(LN_2 / delta, LN_3 / omega);
    diagnostics.ordering_violation = omega <= delta;
    let alpha = finite_or_overflow(alpha, "alpha")?;
    Ok(InferredPreference {
        family: SwfFamily::kolm_pollak(alpha)?,
        coefficient: alpha,
        diagnostics,
    })
}

/// Elasticities `β̈` and `β⃛` above the floor `c` come from one CPIE member
/// only if `ln 2 / ln β̈ = ln 3 / ln β⃛ = 1 − γ`.
pub fn check_consistency_elasticity(beta: f64, beta_two: f64, floor_c: f64) -> Result<InferredPreference> {
    unit_interval("beta", beta)?;
    unit_interval("beta_two_rivals", beta_two)?;
    positive("floor_c", floor_c)?;
    let (ratio, diagnostics) = reconcile(LN_2 / ln(beta), LN_3 / ln(beta_two));
    let gamma = finite_or_overflow(1.0 - ratio, "gamma")?;
    Ok(InferredPreference {
        family: SwfFamily::cpie(gamma, floor_c)?,
        coefficient: gamma,
        diagnostics,
    })
}

/// A respondent's answer.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(
    feature = "serde",
    serde(tag = "answer_kind", content = "parameters", rename_all = "snake_case")
)]
pub enum ElicitationAnswer {
    /// `Ÿ(y) = λy` against one rival.
    ProtectedFraction {
        lambda: f64,
    },
    /// `Ÿ(y) = y − Δ` against one rival.
    ConstantDamage {
        delta: f64,
    },
    ProtectedFractionTwoRivals {
        mu: f64,
    },
    ConstantDamageTwoRivals {
        omega: f64,
    },
    /// `Ÿ(y) = y^β c^{1−β}` against one rival, with the floor `c` stated
    /// directly by the respondent.
    Elasticity {
        beta: f64,
        floor_c: f64,
    },
    ElasticityTwoRivals {
        beta: f64,
    },
    /// Worth giving one unit to someone `ratio` times poorer even if it takes
    /// `take` units from the donor.
    LeakyBucket {
        ratio: f64,
        take: f64,
    },
}

impl ElicitationAnswer {
    pub fn kind(&self) -> &'static str {
        match self {
            ElicitationAnswer::ProtectedFraction { .. } => "protected_fraction",
            ElicitationAnswer::ConstantDamage { .. } => "constant_damage",
            ElicitationAnswer::ProtectedFractionTwoRivals { .. } => "protected_fraction_two_rivals",
            ElicitationAnswer::ConstantDamageTwoRivals { .. } => "constant_damage_two_rivals",
            ElicitationAnswer::Elasticity { .. } => "elasticity",
            ElicitationAnswer::ElasticityTwoRivals { .. } => "elasticity_two_rivals",
            ElicitationAnswer::LeakyBucket { .. } => "leaky_bucket",
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            ElicitationAnswer::ProtectedFraction { lambda } => unit_interval("lambda", lambda),
            ElicitationAnswer::ConstantDamage { delta } => positive("delta", delta),
            ElicitationAnswer::ProtectedFractionTwoRivals { mu } => unit_interval("mu", mu),
            ElicitationAnswer::ConstantDamageTwoRivals { omega } => positive("omega", omega),
            ElicitationAnswer::Elasticity { beta, floor_c } => {
                unit_interval("beta", beta)?;
                positive("floor_c", floor_c)
            }
            ElicitationAnswer::ElasticityTwoRivals { beta } => unit_interval("beta", beta),
            ElicitationAnswer::LeakyBucket { ratio, take } => leaky_bucket_coefficient(ratio, take).map(|_| ()),
        }
    }
}

const LEVEL_TOL: f64 = 1e-9;

/// Reads the shape of protection off the protected incomes `protected[i]`
/// stated at incomes `incomes[i]`: a common ratio is a fraction answer, a
/// common difference a damage answer, and a common log-slope above
/// `floor_c` an elasticity answer.
pub fn answer_from_levels(incomes: [f64; 2], protected: [f64; 2], floor_c: Option<f64>) -> Result<ElicitationAnswer> {
    for i in 0..2 {
        positive("income", incomes[i])?;
        if !(protected[i] >= 0.0 && protected[i] < incomes[i]) {
            return Err(Error::invalid("protected income", protected[i], "a real in [0, y)"));
        }
    }
    let same = |a: f64, b: f64| (a - b).abs() <= LEVEL_TOL * a.abs().max(b.abs()).max(1.0);
    let ratios = [protected[0] / incomes[0], protected[1] / incomes[1]];
    if ratios[0] > 0.0 && same(ratios[0], ratios[1]) {
        return Ok(ElicitationAnswer::ProtectedFraction { lambda: ratios[0] });
    }
    let damages = [incomes[0] - protected[0], incomes[1] - protected[1]];
    if same(damages[0], damages[1]) && protected.iter().all(|&p| p > 0.0) {
        return Ok(ElicitationAnswer::ConstantDamage { delta: damages[0] });
    }
    if let Some(c) = floor_c {
        positive("floor_c", c)?;
        if incomes.iter().chain(protected.iter()).all(|&v| v > c) {
            let beta = |i: usize| ln(protected[i] / c) / ln(incomes[i] / c);
            let (b0, b1) = (beta(0), beta(1));
            if (b0 - b1).abs() <= 1e-6 && b0 > 0.0 && b0 < 1.0 {
                return Ok(ElicitationAnswer::Elasticity {
                    beta: 0.5 * (b0 + b1),
                    floor_c: c,
                });
            }
        }
    }
    Err(Error::invalid(
        "protected incomes",
        protected[1],
        "a constant fraction, a constant damage, or a constant elasticity above the floor",
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
pub enum SessionError {
    #[error("session is complete")]
    Completed,
    #[error("question {question} does not accept a {answer} answer")]
    UnexpectedAnswer {
        question: &'static str,
        answer: &'static str,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum QuestionId {
    OneRival,
    TwoRivalFraction,
    TwoRivalDamage,
    TwoRivalElasticity,
    LeakyBucket,
}

impl QuestionId {
    pub fn as_str(self) -> &'static str {
        match self {
            QuestionId::OneRival => "one_rival",
            QuestionId::TwoRivalFraction => "two_rival_fraction",
            QuestionId::TwoRivalDamage => "two_rival_damage",
            QuestionId::TwoRivalElasticity => "two_rival_elasticity",
            QuestionId::LeakyBucket => "leaky_bucket",
        }
    }
}

/// Descriptor of the next question in a session.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "question_id", rename_all = "snake_case"))]
pub enum Question {
    /// Protected income against one rival at each of `incomes`.
    OneRival {
        incomes: [f64; 2],
    },
    TwoRivalFraction {
        incomes: [f64; 2],
    },
    TwoRivalDamage {
        incomes: [f64; 2],
    },
    TwoRivalElasticity {
        incomes: [f64; 2],
        floor_c: f64,
    },
}

impl Question {
    pub fn id(&self) -> QuestionId {
        match self {
            Question::OneRival { .. } => QuestionId::OneRival,
            Question::TwoRivalFraction { .. } => QuestionId::TwoRivalFraction,
            Question::TwoRivalDamage { .. } => QuestionId::TwoRivalDamage,
            Question::TwoRivalElasticity { .. } => QuestionId::TwoRivalElasticity,
        }
    }

    pub fn incomes(&self) -> [f64; 2] {
        match *self {
            Question::OneRival { incomes }
            | Question::TwoRivalFraction { incomes }
            | Question::TwoRivalDamage { incomes }
            | Question::TwoRivalElasticity { incomes, .. } => incomes,
        }
    }

    pub fn accepts(&self, answer: &ElicitationAnswer) -> bool {
        use ElicitationAnswer as A;
        matches!(
            (self, answer),
            (_, A::LeakyBucket { .. })
                | (Question::OneRival { .. }, A::ProtectedFraction { .. })
                | (Question::OneRival { .. }, A::ConstantDamage { .. })
                | (Question::OneRival { .. }, A::Elasticity { .. })
                | (Question::TwoRivalFraction { .. }, A::ProtectedFractionTwoRivals { .. })
                | (Question::TwoRivalDamage { .. }, A::ConstantDamageTwoRivals { .. })
                | (Question::TwoRivalElasticity { .. }, A::ElasticityTwoRivals { .. })
        )
    }

    pub fn prompt(&self) -> &'static str {
        match self {
            Question::OneRival { .. } => {
                "Two people start with the same income y. The second person's income can \
                 be raised without limit. What is the lowest income the first person may be \
                 pushed to, at each of the incomes shown?"
            }
            Question::TwoRivalFraction { .. }
            | Question::TwoRivalDamage { .. }
            | Question::TwoRivalElasticity { .. } => {
                "Now three people start with the same income y and two of them can be raised \
                 without limit. What is the lowest income the remaining person may be pushed \
                 to?"
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TranscriptEntry {
    pub question_id: QuestionId,
    #[cfg_attr(feature = "serde", serde(flatten))]
    pub answer: ElicitationAnswer,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum SessionState {
    AwaitingFirst,
    AwaitingCrosscheck,
    Complete,
}

/// Outcome of applying one answer.
#[derive(Debug, Clone, PartialEq)]
pub enum Step {
    Next(Question),
    Complete(InferredPreference),
}

/// An elicitation session. The transcript only grows and the state only moves
/// forward.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct Session {
    id: String,
    state: SessionState,
    incomes: [f64; 2],
    transcript: Vec<TranscriptEntry>,
    #[cfg_attr(feature = "serde", serde(skip_serializing_if = "Option::is_none"))]
    inferred_preference: Option<InferredPreference>,
}

impl Session {
    pub fn new(id: impl Into<String>) -> Self {
        Session {
            id: id.into(),
            state: SessionState::AwaitingFirst,
            incomes: DEFAULT_INCOMES,
            transcript: Vec::new(),
            inferred_preference: None,
        }
    }

    pub fn with_incomes(id: impl Into<String>, incomes: [f64; 2]) -> Result<Self> {
        positive("income", incomes[0])?;
        positive("income", incomes[1])?;
        let mut s = Session::new(id);
        s.incomes = incomes;
        Ok(s)
    }

    /// Rebuilds a session by applying a transcript in order.
    pub fn replay(id: impl Into<String>, transcript: &[TranscriptEntry]) -> Result<Self> {
        let mut s = Session::new(id);
        for entry in transcript {
            let question = s.next_question()?;
            let expected = if matches!(entry.answer, ElicitationAnswer::LeakyBucket { .. }) {
                QuestionId::LeakyBucket
            } else {
                question.id()
            };
            if entry.question_id != expected {
                return Err(SessionError::UnexpectedAnswer {
                    question: expected.as_str(),
                    answer: entry.answer.kind(),
                }
                .into());
            }
            s.answer(entry.answer)?;
        }
        Ok(s)
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn state(&self) -> SessionState {
        self.state
    }

    pub fn transcript(&self) -> &[TranscriptEntry] {
        &self.transcript
    }

    pub fn inferred_preference(&self) -> Option<&InferredPreference> {
        self.inferred_preference.as_ref()
    }

    fn first_answer(&self) -> Option<ElicitationAnswer> {
        self.transcript
            .iter()
            .find(|e| e.question_id == QuestionId::OneRival)
            .map(|e| e.answer)
    }

    fn leaky_bucket(&self) -> Option<f64> {
        self.transcript.iter().rev().find_map(|e| match e.answer {
            ElicitationAnswer::LeakyBucket { ratio, take } => leaky_bucket_coefficient(ratio, take).ok(),
            _ => None,
        })
    }

    pub fn next_question(&self) -> Result<Question, SessionError> {
        let incomes = self.incomes;
        match self.state {
            SessionState::Complete => Err(SessionError::Completed),
            SessionState::AwaitingFirst => Ok(Question::OneRival { incomes }),
            SessionState::AwaitingCrosscheck => Ok(match self.first_answer() {
                Some(ElicitationAnswer::ConstantDamage { .. }) => Question::TwoRivalDamage { incomes },
                Some(ElicitationAnswer::Elasticity { floor_c, .. }) => {
                    Question::TwoRivalElasticity { incomes, floor_c }
                }
                _ => Question::TwoRivalFraction { incomes },
            }),
        }
    }

    /// Applies an answer to the current question. Leaky-bucket answers are
    /// accepted at any point before completion and recorded without moving the
    /// protocol forward.
    pub fn answer(&mut self, answer: ElicitationAnswer) -> Result<Step> {
        let question = self.next_question()?;
        if !question.accepts(&answer) {
            return Err(SessionError::UnexpectedAnswer {
                question: question.id().as_str(),
                answer: answer.kind(),
            }
            .into());
        }
        answer.validate()?;

        if let ElicitationAnswer::LeakyBucket { .. } = answer {
            self.transcript.push(TranscriptEntry {
                question_id: QuestionId::LeakyBucket,
                answer,
            });
            return Ok(Step::Next(question));
        }

        if self.state == SessionState::AwaitingFirst {
            self.transcript.push(TranscriptEntry {
                question_id: question.id(),
                answer,
            });
            self.state = SessionState::AwaitingCrosscheck;
            return Ok(Step::Next(self.next_question()?));
        }

        use ElicitationAnswer as A;
        let mut inferred = match (self.first_answer(), answer) {
            (Some(A::ProtectedFraction { lambda }), A::ProtectedFractionTwoRivals { mu }) => {
                check_consistency_fraction(lambda, mu)?
            }
            (Some(A::ConstantDamage { delta }), A::ConstantDamageTwoRivals { omega }) => {
                check_consistency_damage(delta, omega)?
            }
            (Some(A::Elasticity { beta, floor_c }), A::ElasticityTwoRivals { beta: beta_two }) => {
                check_consistency_elasticity(beta, beta_two, floor_c)?
            }
            _ => {
                return Err(SessionError::UnexpectedAnswer {
                    question: question.id().as_str(),
                    answer: answer.kind(),
                }
                .into())
            }
        };
        self.transcript.push(TranscriptEntry {
            question_id: question.id(),
            answer,
        });
        inferred.diagnostics.leaky_bucket = self.leaky_bucket();
        self.state = SessionState::Complete;
        self.inferred_preference = Some(inferred.clone());
        Ok(Step::Complete(inferred))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::math::powf;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * b.abs().max(1.0)
    }

    #[test]
    fn eta_from_fraction_examples() {
        assert!(close(infer_eta_from_fraction(0.5).unwrap(), 2.0, 1e-15));
        assert!(close(
            infer_eta_from_fraction(core::f64::consts::FRAC_1_SQRT_2).unwrap(),
            3.0,
            1e-14
        ));
        assert!(close(infer_eta_from_fraction(0.25).unwrap(), 1.5, 1e-15));
        assert!(infer_eta_from_fraction(1.0).is_err());
        assert!(infer_eta_from_fraction(0.0).is_err());
        let eta = infer_eta_from_fraction(0.37).unwrap();
        assert!(close(powf(2.0, 1.0 / (1.0 - eta)), 0.37, 1e-12));
    }

    #[test]
    fn alpha_from_damage_examples() {
        assert!(close(infer_alpha_from_damage(LN_2).unwrap(), 1.0, 1e-15));
        assert!(close(
            infer_alpha_from_damage(10.0).unwrap(),
            0.069_314_718_055_994_53,
            1e-15
        ));
        assert_eq!(
            infer_alpha_from_damage(1e-320),
            Err(Error::Overflow { quantity: "alpha" })
        );
        assert!(infer_alpha_from_damage(0.0).is_err());
    }

    #[test]
    fn gamma_from_elasticity_limits() {
        assert!(close(infer_gamma_from_elasticity(0.5).unwrap(), 2.0, 1e-15));
        assert!(infer_gamma_from_elasticity(1.0 - 1e-12).unwrap() > 1e11);
        let g = infer_gamma_from_elasticity(1e-300).unwrap();
        assert!(g > 1.0 && g < 1.01);
    }

    #[test]
    fn leaky_bucket_arithmetic() {
        assert_eq!(leaky_bucket_coefficient(2.0, 8.0), Ok(3.0));
        assert_eq!(leaky_bucket_coefficient(2.0, 4.0), Ok(2.0));
        assert_eq!(leaky_bucket_coefficient(2.0, 2.0), Ok(1.0));
        assert!(leaky_bucket_coefficient(1.0, 2.0).is_err());
    }

    #[test]
    fn fraction_consistency() {
        let p = check_consistency_fraction(0.5, 1.0 / 3.0).unwrap();
        assert!(p.diagnostics.consistent);
        assert!(close(p.coefficient, 2.0, 1e-12));
        assert_eq!(p.diagnostics.one_rival, 0.0);
        let p = check_consistency_fraction(core::f64::consts::FRAC_1_SQRT_2, 1.0 / libm::sqrt(3.0)).unwrap();
        assert!(p.diagnostics.consistent);
        assert!(close(p.coefficient, 3.0, 1e-12));
        let p = check_consistency_fraction(0.5, 0.5).unwrap();
        assert!(!p.diagnostics.consistent);
        assert!(close(p.diagnostics.inconsistency, LN_3 / LN_2 - 1.0, 1e-12));
        assert!(close(p.coefficient, 1.0 + 0.5 * (1.0 + LN_3 / LN_2), 1e-12));
    }

    #[test]
    fn damage_consistency() {
        let p = check_consistency_damage(LN_2, LN_3).unwrap();
        assert!(p.diagnostics.consistent && close(p.coefficient, 1.0, 1e-15));
        let p = check_consistency_damage(10.0 * LN_2, 10.0 * LN_3).unwrap();
        assert!(p.diagnostics.consistent && close(p.coefficient, 0.1, 1e-15));
        assert!(!p.diagnostics.ordering_violation);
        let p = check_consistency_damage(1.0, 1.0).unwrap();
        assert!(!p.diagnostics.consistent);
        assert!(p.diagnostics.ordering_violation);
    }

    #[test]
    fn protocol_walkthrough() {
        let mut s = Session::new("s1");
        assert_eq!(
            s.next_question(),
            Ok(Question::OneRival {
                incomes: [100.0, 1000.0]
            })
        );
        let step = s.answer(ElicitationAnswer::ProtectedFraction { lambda: 0.5 }).unwrap();
        assert_eq!(
            step,
            Step::Next(Question::TwoRivalFraction {
                incomes: [100.0, 1000.0]
            })
        );
        assert_eq!(s.state(), SessionState::AwaitingCrosscheck);
        let step = s
            .answer(ElicitationAnswer::ProtectedFractionTwoRivals { mu: 1.0 / 3.0 })
            .unwrap();
        match step {
            Step::Complete(p) => {
                assert!(matches!(p.family, SwfFamily::KolmAtkinson { .. }));
                assert!(close(p.coefficient, 2.0, 1e-12));
            }
            other => panic!("{other:?}"),
        }
        assert_eq!(s.state(), SessionState::Complete);
        assert_eq!(
            s.answer(ElicitationAnswer::ProtectedFraction { lambda: 0.5 }),
            Err(Error::Session(SessionError::Completed))
        );
    }

    #[test]
    fn wrong_answer_kind_is_rejected_without_side_effects() {
        let mut s = Session::new("s2");
        s.answer(ElicitationAnswer::ConstantDamage { delta: 10.0 }).unwrap();
        let err = s
            .answer(ElicitationAnswer::ProtectedFractionTwoRivals { mu: 0.3 })
            .unwrap_err();
        assert!(matches!(err, Error::Session(SessionError::UnexpectedAnswer { .. })));
        assert_eq!(s.transcript().len(), 1);
        assert!(s
            .answer(ElicitationAnswer::ConstantDamageTwoRivals { omega: -1.0 })
            .is_err());
        assert_eq!(s.transcript().len(), 1);
    }

    #[test]
    fn leaky_bucket_is_recorded_side_by_side() {
        let mut s = Session::new("s3");
        s.answer(ElicitationAnswer::LeakyBucket { ratio: 2.0, take: 8.0 })
            .unwrap();
        assert_eq!(s.state(), SessionState::AwaitingFirst);
        s.answer(ElicitationAnswer::Elasticity {
            beta: 0.5,
            floor_c: 2.0,
        })
        .unwrap();
        assert_eq!(
            s.next_question(),
            Ok(Question::TwoRivalElasticity {
                incomes: DEFAULT_INCOMES,
                floor_c: 2.0
            })
        );
        let beta_two = powf(3.0, -1.0);
        match s
            .answer(ElicitationAnswer::ElasticityTwoRivals { beta: beta_two })
            .unwrap()
        {
            Step::Complete(p) => {
                assert!(p.diagnostics.consistent);
                assert_eq!(p.diagnostics.leaky_bucket, Some(3.0));
                assert_eq!(p.family, SwfFamily::cpie(p.coefficient, 2.0).unwrap());
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn replay_is_deterministic() {
        let mut s = Session::new("a");
        s.answer(ElicitationAnswer::LeakyBucket { ratio: 2.0, take: 4.0 })
            .unwrap();
        s.answer(ElicitationAnswer::ConstantDamage { delta: 7.0 }).unwrap();
        s.answer(ElicitationAnswer::ConstantDamageTwoRivals { omega: 11.0 })
            .unwrap();
        let r = Session::replay("b", s.transcript()).unwrap();
        assert_eq!(r.inferred_preference(), s.inferred_preference());
        assert_eq!(r.transcript(), s.transcript());

        let bad = [TranscriptEntry {
            question_id: QuestionId::TwoRivalDamage,
            answer: ElicitationAnswer::ConstantDamage { delta: 7.0 },
        }];
        assert!(Session::replay("c", &bad).is_err());
    }

    #[test]
    fn levels_discriminate_shapes() {
        assert_eq!(
            answer_from_levels([100.0, 1000.0], [50.0, 500.0], None),
            Ok(ElicitationAnswer::ProtectedFraction { lambda: 0.5 })
        );
        assert_eq!(
            answer_from_levels([100.0, 1000.0], [90.0, 990.0], None),
            Ok(ElicitationAnswer::ConstantDamage { delta: 10.0 })
        );
        // CPIE with beta = 1/2 and c = 1: Ÿ = sqrt(y)
        match answer_from_levels([100.0, 1000.0], [10.0, libm::sqrt(1000.0)], Some(1.0)).unwrap() {
            ElicitationAnswer::Elasticity { beta, floor_c } => {
                assert!(close(beta, 0.5, 1e-12));
                assert_eq!(floor_c, 1.0);
            }
            other => panic!("{other:?}"),
        }
        assert!(answer_from_levels([100.0, 1000.0], [10.0, 900.0], None).is_err());
    }
}
