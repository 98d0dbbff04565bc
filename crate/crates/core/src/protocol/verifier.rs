use std::sync::{Arc, LazyLock};

use crate::error::Error;
use crate::exact::{Amp3, ExactScalar, OutcomeLabel};
use crate::machine::{
    run_pass_exact, FixedResponses, OutcomeAction, PassAnalysis, PassRun, ProverRequest,
    ProverStrategy, QuantumOp, StateKind, Transition, VerifierSpec, LEFT_END,
};

use super::instance::{validate_form, Instance, TapeString, WitnessSubset};
use super::operators;

/// Phase names of the classical control.
pub mod phase {
    pub const INIT: &str = "init";
    pub const TARGET: &str = "encode_target";
    pub const VALUE: &str = "encode_value";
    pub const ASK: &str = "ask_prover";
    pub const SUBTRACT: &str = "subtract";
    pub const KEEP: &str = "keep";
    pub const ACCEPT: &str = "accept";
    pub const REJECT: &str = "reject";
}

/// Builds the SUBSET-SUM verifier.
///
/// Control flow over `¢ S # a1 # ... an # $`:
/// `init` initializes the register on `¢`; `encode_target` applies E0/E1 to
/// the digits of S and E_sharp to its separator; `encode_value` applies
/// E0'/E1' to the digits of each value. On a value's separator the register
/// first gets an identity step (recognizing `#`), the verifier then asks the
/// prover, and applies E_sharp_selected or E_sharp_skip accordingly. On `$`
/// E_dollar decides. Every `↻` outcome restarts the pass.
pub fn build_spec() -> VerifierSpec {
    use OutcomeAction::*;
    use OutcomeLabel as L;

    let mut b = VerifierSpec::builder("subset-sum");
    let init = b.state(phase::INIT, StateKind::Reading);
    let target = b.state(phase::TARGET, StateKind::Reading);
    let value = b.state(phase::VALUE, StateKind::Reading);
    let ask = b.state(phase::ASK, StateKind::Communication);
    let subtract = b.state(phase::SUBTRACT, StateKind::Reading);
    let keep = b.state(phase::KEEP, StateKind::Reading);
    let accept = b.state(phase::ACCEPT, StateKind::Accepting);
    let reject = b.state(phase::REJECT, StateKind::Rejecting);
    b.start(init).precheck(validate_form);

    let to = |next, action| Transition { next, action };
    let restart = (L::Restart, to(init, Restart));
    let op = |s: operators::Op| QuantumOp::Apply(Arc::new(s()));

    b.quantum(init, LEFT_END, QuantumOp::Initialize, &[(L::MoveRight, to(target, MoveRight))]);

    b.quantum(target, '0', op(operators::e0), &[(L::MoveRight, to(target, MoveRight)), restart]);
    b.quantum(target, '1', op(operators::e1), &[(L::MoveRight, to(target, MoveRight)), restart]);
    b.quantum(target, '#', op(operators::e_sharp), &[(L::MoveRight, to(value, MoveRight)), restart]);

    b.quantum(value, '0', op(operators::e0_prime), &[(L::MoveRight, to(value, MoveRight)), restart]);
    b.quantum(value, '1', op(operators::e1_prime), &[(L::MoveRight, to(value, MoveRight)), restart]);
    b.quantum(value, '#', op(operators::symbol_check), &[(L::MoveRight, to(ask, Stay))]);
    b.communicate(ask, '#', to(subtract, Stay), to(keep, Stay));
    b.quantum(
        subtract,
        '#',
        op(operators::e_sharp_selected),
        &[(L::MoveRight, to(value, MoveRight)), restart],
    );
    b.quantum(keep, '#', op(operators::e_sharp_skip), &[(L::MoveRight, to(value, MoveRight)), restart]);

    b.quantum(
        value,
        '$',
        op(operators::e_dollar),
        &[(L::Accept, to(accept, Accept)), (L::Reject, to(reject, Reject)), restart],
    );

    b.build().expect("protocol table is well formed")
}

static SPEC: LazyLock<VerifierSpec> = LazyLock::new(build_spec);

/// Shared instance of [`build_spec`].
pub fn spec() -> &'static VerifierSpec {
    &SPEC
}

/// A quantum-step cap no pass over a `w` of this length can reach.
pub fn step_cap(w_len: usize) -> usize {
    2 * (w_len + 2)
}

/// Answers "select" at the i-th event of every pass iff `witness[i]`.
pub fn honest_prover(inst: &Instance, witness: &WitnessSubset) -> Result<FixedResponses, Error> {
    witness.check_len(inst.len())?;
    Ok(FixedResponses(witness.choices()))
}

/// Exact pass analysis for `tape` under a fixed selection.
pub fn run_pass(tape: &TapeString, selection: &WitnessSubset) -> Result<PassAnalysis, Error> {
    let n = tape.decode().len();
    selection.check_len(n)?;
    run_pass_exact(spec(), tape.as_str(), &selection.choices(), step_cap(tape.len()))
}

/// The register of the single surviving branch of `run`. Errors if the pass
/// has split into several live branches or if the branch carries mass other
/// than 1 (in which case the register would not be its amplitude vector).
pub fn surviving_register<'r>(run: &'r PassRun<'_>) -> Result<&'r Amp3, Error> {
    match run.live() {
        [c] if c.mass.is_one() => Ok(&c.register),
        [_] => Err(Error::Inconsistent("surviving branch has been renormalized".into())),
        live => Err(Error::Inconsistent(format!("expected one surviving branch, found {}", live.len()))),
    }
}

/// The unnormalized register just before `$` on the all-`→` path.
pub fn trace_state(tape: &TapeString, selection: &WitnessSubset) -> Result<Amp3, Error> {
    selection.check_len(tape.decode().len())?;
    let mut run = PassRun::new(spec(), step_cap(tape.len()));
    for c in selection.choices() {
        run.push_response(c)?;
    }
    run.push_symbol(LEFT_END)?;
    for c in tape.as_str().chars() {
        run.push_symbol(c)?;
    }
    Ok(surviving_register(&run)?.clone())
}

/// `(1/3)^|w| * (1, S - T, 0)`.
pub fn closed_form_state(tape: &TapeString, selection: &WitnessSubset) -> Result<Amp3, Error> {
    let inst = tape.decode();
    let t = inst.selected_sum(selection)?;
    let diff = ExactScalar::from(num_bigint::BigInt::from(inst.target) - num_bigint::BigInt::from(t));
    let scale = ExactScalar::third_pow(tape.len() as u32);
    Ok(Amp3::new(ExactScalar::one(), diff, ExactScalar::zero()).scale(&scale))
}

/// One tape symbol of a trace.
#[derive(Clone, Debug)]
pub struct TraceLine {
    pub position: usize,
    pub symbol: char,
    /// Operators applied while the head sat on this symbol, with prover
    /// messages shown as `prover:<choice>`.
    pub ops: Vec<String>,
    pub state: Amp3,
    /// Restart probability accumulated so far in the pass.
    pub restart_mass: ExactScalar,
}

#[derive(Clone, Debug)]
pub struct Trace {
    pub lines: Vec<TraceLine>,
    pub selection: WitnessSubset,
    pub final_state: Amp3,
}

/// Follows the surviving branch from `¢` to the last `#`, asking `prover`
/// for each message and disclosing each `→` outcome to it.
pub fn trace_with_prover(
    tape: &TapeString,
    prover: &mut dyn ProverStrategy,
) -> Result<Trace, Error> {
    let mut run = PassRun::new(spec(), step_cap(tape.len())).with_log();
    let mut lines = Vec::new();
    let mut history: Vec<OutcomeLabel> = Vec::new();
    let symbols: Vec<char> = std::iter::once(LEFT_END).chain(tape.as_str().chars()).collect();
    for (position, &symbol) in symbols.iter().enumerate() {
        run.push_symbol(symbol)?;
        let mut ops = Vec::new();
        loop {
            for rec in run.take_log() {
                match rec.op {
                    Some(name) => {
                        ops.push(name);
                        for label in rec.continuing {
                            prover.observe(1, label)?;
                            history.push(label);
                        }
                    }
                    None => ops.push(format!("prover:{}", rec.response.expect("logged response"))),
                }
            }
            if !run.awaiting_response() {
                break;
            }
            let request =
                ProverRequest { pass: 1, event: run.responses().len() + 1, history: &history };
            let choice = prover.respond(&request)?;
            run.push_response(choice)?;
        }
        lines.push(TraceLine {
            position,
            symbol,
            ops,
            state: surviving_register(&run)?.clone(),
            restart_mass: run.restarted(),
        });
    }
    let final_state = surviving_register(&run)?.clone();
    Ok(Trace {
        lines,
        selection: WitnessSubset::from_choices(run.responses()),
        final_state,
    })
}
