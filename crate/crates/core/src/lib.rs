//! Welfare evaluation and protected-income analysis for additively separable
//! social welfare functions `W(y₁, …, yₙ) = Σ f(yᵢ)`.
//!
//! The crate is `no_std` (it needs `alloc`) and is organised around a single
//! source of `f`, the [`SwfFamily`]:
//!
//! * [`family`] evaluates `f`, `f⁻¹`, aggregate welfare and the
//!   equally-distributed equivalent with extended-real semantics
//!   ([`WelfareValue`]) at boundary incomes.
//! * [`protection`] computes the trade-off curve, its domain, protected income
//!   against one or more rivals and collateral damage.
//! * [`elicitation`] inverts protection answers into inequality-aversion
//!   coefficients and runs the question protocol of an elicitation session.
//! * [`lab`] builds the quasi-periodic non-power families and numerically
//!   verifies the characterization and invariance results.
//!
//! Enable the `serde` feature for the JSON wire schema used by the `welfare`
//! command line tool and HTTP service.

#![no_std]
// `!(x > 0.0)` rejects NaN together with out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

mod math;

pub mod elicitation;
pub mod error;
pub mod ext;
pub mod family;
pub mod income;
pub mod lab;
pub mod protection;
pub mod root;
pub mod tabulated;

pub use error::{Error, Result};
pub use ext::WelfareValue;
pub use family::SwfFamily;
pub use income::{Distribution, Income};
pub use protection::{ProtectionMethod, ProtectionResult};
pub use tabulated::{PeriodicLaw, PeriodicProfile, TabulatedFamily};
