use crate::ext::WelfareValue;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid {name} = {value}: expected {expected}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        expected: &'static str,
    },

    #[error("value is not a number")]
    NotANumber,

    #[error("income {income} lies below the domain lower endpoint {lower}")]
    BelowDomain { income: f64, lower: f64 },

    /// The trade-off query left the domain of definition; `bound` spells out
    /// the inequality that failed.
    #[error("domain exceeded: {bound} fails ({lhs} < {rhs})")]
    DomainExceeded {
        bound: &'static str,
        lhs: WelfareValue,
        rhs: WelfareValue,
    },

    #[error("welfare value {value} is outside the range [{inf}, {sup}) of f")]
    OutOfRange {
        value: WelfareValue,
        inf: WelfareValue,
        sup: WelfareValue,
    },

    #[error("family is unbounded above, protected income against an unequal status quo is undefined")]
    UnboundedFamily,

    #[error("indeterminate form: +inf and -inf combined")]
    Indeterminate,

    #[error("bisection did not converge within {iterations} iterations")]
    NoConvergence { iterations: usize },

    #[error("{quantity} overflows the representable range")]
    Overflow { quantity: &'static str },

    #[error("f(y) at y = {income} is indistinguishable from sup f in double precision")]
    Underflow { income: f64 },

    #[error("invalid periodic profile: {reason}")]
    InvalidProfile { reason: &'static str },

    #[error("{operation} requires a {expected} family")]
    FamilyMismatch {
        operation: &'static str,
        expected: &'static str,
    },

    #[error("distribution must contain at least one income")]
    EmptyDistribution,

    #[error(transparent)]
    Session(#[from] crate::elicitation::SessionError),
}

impl Error {
    pub(crate) fn invalid(name: &'static str, value: f64, expected: &'static str) -> Self {
        Error::InvalidParameter { name, value, expected }
    }
}
