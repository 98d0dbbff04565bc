//! Exact simulation of an Arthur-Merlin verifier whose only source of
//! randomness is a three-state quantum register.
//!
//! The verifier checks SUBSET-SUM certificates: it encodes the target and the
//! prover-selected values into register amplitudes with rational operators,
//! and every quantity (amplitudes, branch weights, acceptance probabilities)
//! is computed as an exact rational.
//!
//! - [`exact`]: rationals, 3-vectors, 3x3 matrices, superoperators.
//! - [`machine`]: the generic verifier engine (exact enumeration and sampling).
//! - [`protocol`]: the SUBSET-SUM verifier and its operators.
//! - [`analysis`]: verdicts, soundness sweeps, amplification.
//! - [`reduction`]: 3-SAT to SUBSET-SUM with witness transport.
//! - [`report`]: key=value and table rendering of results.

pub mod analysis;
mod error;
pub mod exact;
pub mod machine;
pub mod protocol;
pub mod reduction;
pub mod report;

pub use error::Error;
pub use exact::{Amp3, ExactScalar, OutcomeLabel, Superoperator};
pub use machine::{Choice, PassAnalysis, Verdict, VerifierSpec};
pub use protocol::{Instance, TapeString, WitnessSubset};
