//! The SUBSET-SUM verification protocol on a three-state register.

mod instance;
pub mod operators;
mod verifier;

pub use instance::{encode_instance, validate_form, Instance, TapeString, WitnessSubset};
pub use verifier::{
    build_spec, closed_form_state, honest_prover, phase, run_pass, spec, step_cap,
    surviving_register, trace_state, trace_with_prover, Trace, TraceLine,
};
