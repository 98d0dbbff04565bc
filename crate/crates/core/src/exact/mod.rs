//! Exact rational linear algebra on a three-state register.

mod register;
mod scalar;
mod superop;

pub use register::{initialize, squared_norm, Amp3, Mat3};
pub use scalar::ExactScalar;
pub(crate) use scalar::Tally;
pub(crate) use superop::PostState;
pub use superop::{apply, check_completeness, Branch, OperationElement, OutcomeLabel, Superoperator};
