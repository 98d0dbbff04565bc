//! Generic verifier engine: classical control over a tape, a quantum register
//! driven by per-(state, symbol) operations, and a prover answering
//! communication events.

mod prover;
mod run;
mod sample;
mod spec;

pub use prover::{FixedResponses, ProverRequest, ProverStrategy};
pub use run::{
    run_pass_exact, run_protocol_exact, Configuration, ExpectedPasses, PassAnalysis, PassRun,
    StepRecord, Verdict,
};
pub use sample::{sample_pass, PassResult, SampledPass, SampledStep, Sampler};
pub use spec::{
    Choice, OutcomeAction, QuantumOp, Rule, StateId, StateKind, Transition, VerifierSpec,
    VerifierSpecBuilder, LEFT_END, RIGHT_END,
};
