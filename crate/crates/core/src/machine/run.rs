use crate::error::Error;
use crate::exact::{initialize, Amp3, ExactScalar, OutcomeLabel, PostState, Tally};

use super::spec::{
    Choice, OutcomeAction, QuantumOp, Rule, StateId, Transition, VerifierSpec, LEFT_END, RIGHT_END,
};

/// One live branch of a pass.
///
/// The branch probability is `mass * |register|^2`. Keeping the register
/// unnormalized and carrying the scalar `mass` separately avoids the square
/// roots that normalization would need.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Configuration {
    pub state: StateId,
    pub head: usize,
    pub mass: ExactScalar,
    pub register: Amp3,
    /// Quantum steps taken in this pass.
    pub steps: usize,
    /// Communication events consumed in this pass.
    pub events: usize,
}

impl Configuration {
    pub fn initial(spec: &VerifierSpec) -> Self {
        Configuration {
            state: spec.start(),
            head: 0,
            mass: ExactScalar::one(),
            register: initialize(),
            steps: 0,
            events: 0,
        }
    }

    pub fn probability(&self) -> ExactScalar {
        &self.mass * &self.register.squared_norm()
    }
}

/// One way a configuration can evolve in a single step.
#[derive(Clone, Debug)]
pub struct Successor {
    /// `None` for communication steps.
    pub label: Option<OutcomeLabel>,
    /// Index of the operation element that fired, for quantum steps.
    pub element: Option<usize>,
    pub transition: Transition,
    pub weight: ExactScalar,
    /// For a halting outcome the register is left as zero.
    pub config: Configuration,
}

pub(crate) fn moved(head: usize, action: OutcomeAction) -> Result<usize, Error> {
    match action {
        OutcomeAction::MoveRight => Ok(head + 1),
        OutcomeAction::MoveLeft => head
            .checked_sub(1)
            .ok_or_else(|| Error::Config("head moved left of the left endmarker".into())),
        _ => Ok(head),
    }
}

/// Expands `cfg` by one step on `symbol`. `response` must be provided when the
/// rule is a communication rule.
pub(crate) fn successors(
    spec: &VerifierSpec,
    cfg: &Configuration,
    symbol: char,
    response: Option<Choice>,
) -> Result<Vec<Successor>, Error> {
    let mut out = Vec::new();
    expand(spec, cfg, symbol, response, true, |b| {
        out.push(Successor {
            label: b.label,
            element: b.element,
            transition: b.transition,
            weight: b.weight.expect("weighed"),
            config: b.config,
        });
        Ok(())
    })?;
    Ok(out)
}

/// A successor whose weight may not have been computed.
struct Branch {
    label: Option<OutcomeLabel>,
    element: Option<usize>,
    transition: Transition,
    /// Always present for halting branches. `None` marks a live branch of
    /// nonzero weight that was not asked for.
    weight: Option<ExactScalar>,
    config: Configuration,
}

/// Hands the successors of `cfg` to `sink` in element order. Live branches
/// are weighed only when `weigh_live` is set; zero-weight live branches are
/// dropped when it is not.
fn expand(
    spec: &VerifierSpec,
    cfg: &Configuration,
    symbol: char,
    response: Option<Choice>,
    weigh_live: bool,
    mut sink: impl FnMut(Branch) -> Result<(), Error>,
) -> Result<(), Error> {
    let rule = spec.rule(cfg.state, symbol).ok_or_else(|| {
        Error::Config(format!(
            "no operator for state {:?} on symbol {symbol:?}",
            spec.state_name(cfg.state)
        ))
    })?;
    match rule {
        Rule::Communicate { on_select, on_skip } => {
            let choice = response.ok_or_else(|| {
                Error::Protocol(format!("prover message {} missing", cfg.events + 1))
            })?;
            let t = if choice.is_select() { *on_select } else { *on_skip };
            let config = Configuration {
                state: t.next,
                head: moved(cfg.head, t.action)?,
                events: cfg.events + 1,
                ..cfg.clone()
            };
            sink(Branch {
                label: None,
                element: None,
                transition: t,
                weight: weigh_live.then(|| config.probability()),
                config,
            })
        }
        Rule::Quantum { op, .. } => {
            let mut push = |element: usize,
                            label: OutcomeLabel,
                            mass: &ExactScalar,
                            register: PostState|
             -> Result<(), Error> {
                let t = rule.transition_for(label).ok_or_else(|| {
                    Error::Config(format!(
                        "no transition for outcome {label} in state {:?}",
                        spec.state_name(cfg.state)
                    ))
                })?;
                let halts = t.action.terminates();
                let weight = if halts || weigh_live {
                    Some(mass * &register.squared_norm())
                } else if register.is_zero() {
                    return Ok(());
                } else {
                    None
                };
                // Halted branches only contribute their weight.
                let (head, register) = if halts {
                    (cfg.head, Amp3::default())
                } else {
                    (moved(cfg.head, t.action)?, register.into_amp3())
                };
                let config = Configuration {
                    state: t.next,
                    head,
                    mass: mass.clone(),
                    register,
                    steps: cfg.steps + 1,
                    events: cfg.events,
                };
                sink(Branch { label: Some(label), element: Some(element), transition: t, weight, config })
            };
            match op {
                QuantumOp::Initialize => {
                    let mass = cfg.probability();
                    push(0, OutcomeLabel::MoveRight, &mass, PostState::Reduced(initialize()))
                }
                QuantumOp::Apply(sop) => {
                    for (element, e) in sop.elements.iter().enumerate() {
                        push(element, e.label(), &cfg.mass, e.apply_lazy(&cfg.register))?;
                    }
                    Ok(())
                }
            }
        }
    }
}

fn needs_response(spec: &VerifierSpec, tape: &[char], responses: &[Choice], c: &Configuration) -> bool {
    c.head < tape.len()
        && matches!(spec.rule(c.state, tape[c.head]), Some(Rule::Communicate { .. }))
        && c.events >= responses.len()
}

fn runnable(spec: &VerifierSpec, tape: &[char], responses: &[Choice], c: &Configuration) -> bool {
    c.head < tape.len() && !needs_response(spec, tape, responses, c)
}

/// Exact per-pass outcome probabilities.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PassAnalysis {
    pub p_accept: ExactScalar,
    pub p_reject: ExactScalar,
    pub p_restart: ExactScalar,
    /// Mass still live when the step cap was reached.
    pub residual: ExactScalar,
    /// Largest number of simultaneously live branches seen during the pass.
    pub peak_branches: usize,
}

impl PassAnalysis {
    pub fn total(&self) -> ExactScalar {
        [&self.p_accept, &self.p_reject, &self.p_restart, &self.residual]
            .into_iter()
            .sum()
    }

    /// The outcome of a pass that fails the classical form check.
    pub fn deterministic_reject() -> Self {
        PassAnalysis {
            p_accept: ExactScalar::zero(),
            p_reject: ExactScalar::one(),
            p_restart: ExactScalar::zero(),
            residual: ExactScalar::zero(),
            peak_branches: 0,
        }
    }
}

/// A step taken by the pass, recorded when logging is enabled.
#[derive(Clone, Debug)]
pub struct StepRecord {
    pub head: usize,
    pub symbol: char,
    pub state: StateId,
    /// Operator name, or `None` for a communication step.
    pub op: Option<String>,
    pub response: Option<Choice>,
    /// Labels of the successors that stayed live.
    pub continuing: Vec<OutcomeLabel>,
}

/// Incremental exact evaluation of one pass.
///
/// Tape symbols and prover messages are supplied one at a time; every branch
/// runs until it terminates or needs a symbol or message that has not been
/// supplied yet. Cloning a `PassRun` forks the evaluation, so many tapes that
/// share a prefix can share the work for that prefix.
#[derive(Clone, Debug)]
pub struct PassRun<'a> {
    spec: &'a VerifierSpec,
    step_cap: usize,
    tape: Vec<char>,
    responses: Vec<Choice>,
    blocked: Vec<Configuration>,
    accept: Tally,
    reject: Tally,
    restart: Tally,
    residual: Tally,
    peak: usize,
    log: Option<Vec<StepRecord>>,
}

impl<'a> PassRun<'a> {
    pub fn new(spec: &'a VerifierSpec, step_cap: usize) -> Self {
        PassRun {
            spec,
            step_cap,
            tape: Vec::new(),
            responses: Vec::new(),
            blocked: vec![Configuration::initial(spec)],
            accept: Tally::default(),
            reject: Tally::default(),
            restart: Tally::default(),
            residual: Tally::default(),
            peak: 1,
            log: None,
        }
    }

    pub fn with_log(mut self) -> Self {
        self.log = Some(Vec::new());
        self
    }

    pub fn take_log(&mut self) -> Vec<StepRecord> {
        self.log.as_mut().map(std::mem::take).unwrap_or_default()
    }

    pub fn tape(&self) -> &[char] {
        &self.tape
    }

    pub fn responses(&self) -> &[Choice] {
        &self.responses
    }

    pub fn push_symbol(&mut self, symbol: char) -> Result<(), Error> {
        self.tape.push(symbol);
        self.advance()
    }

    pub fn push_response(&mut self, choice: Choice) -> Result<(), Error> {
        self.responses.push(choice);
        self.advance()
    }

    /// Live branches, all waiting for input.
    pub fn live(&self) -> &[Configuration] {
        &self.blocked
    }

    /// True if some live branch is waiting for the next prover message.
    pub fn awaiting_response(&self) -> bool {
        self.blocked.iter().any(|c| self.needs_response(c))
    }

    pub fn accepted(&self) -> ExactScalar {
        self.accept.value()
    }

    pub fn rejected(&self) -> ExactScalar {
        self.reject.value()
    }

    pub fn restarted(&self) -> ExactScalar {
        self.restart.value()
    }

    fn needs_response(&self, c: &Configuration) -> bool {
        needs_response(self.spec, &self.tape, &self.responses, c)
    }

    fn advance(&mut self) -> Result<(), Error> {
        let (spec, tape, responses) = (self.spec, &self.tape[..], &self.responses[..]);
        let mut stack = Vec::new();
        let mut i = self.blocked.len();
        while i > 0 {
            i -= 1;
            if runnable(spec, tape, responses, &self.blocked[i]) {
                stack.push(self.blocked.remove(i));
            }
        }
        let logging = self.log.is_some();
        let mut fresh = Vec::new();
        while let Some(cfg) = stack.pop() {
            let symbol = tape[cfg.head];
            let response = responses.get(cfg.events).copied();
            let mut continuing = Vec::new();
            let weigh_live = cfg.steps + 1 >= self.step_cap;
            expand(spec, &cfg, symbol, response, weigh_live, |b| {
                let weight = match b.weight {
                    Some(w) if w.is_zero() => return Ok(()),
                    w => w,
                };
                let halted = match b.transition.action {
                    OutcomeAction::Accept => &mut self.accept,
                    OutcomeAction::Reject => &mut self.reject,
                    OutcomeAction::Restart => &mut self.restart,
                    _ if b.config.steps >= self.step_cap && b.label.is_some() => &mut self.residual,
                    _ => {
                        if let (true, Some(l)) = (logging, b.label) {
                            continuing.push(l);
                        }
                        if runnable(spec, tape, responses, &b.config) {
                            fresh.push(b.config);
                        } else {
                            self.blocked.push(b.config);
                        }
                        return Ok(());
                    }
                };
                halted.add(&weight.expect("halting and capped branches are weighed"));
                Ok(())
            })?;
            // Earlier elements are explored first.
            while let Some(c) = fresh.pop() {
                stack.push(c);
            }
            if let Some(log) = self.log.as_mut() {
                let op = match spec.rule(cfg.state, symbol) {
                    Some(Rule::Quantum { op, .. }) => Some(op.name().to_string()),
                    _ => None,
                };
                log.push(StepRecord {
                    head: cfg.head,
                    symbol,
                    state: cfg.state,
                    response: if op.is_none() { response } else { None },
                    op,
                    continuing,
                });
            }
            self.peak = self.peak.max(stack.len() + self.blocked.len());
        }
        Ok(())
    }

    /// Closes the pass. Every branch must have terminated or been capped.
    pub fn finish(self) -> Result<PassAnalysis, Error> {
        if let Some(c) = self.blocked.first() {
            return Err(if self.needs_response(c) {
                Error::Protocol(format!(
                    "prover supplied {} messages but the verifier needs more",
                    self.responses.len()
                ))
            } else if self.tape.last() == Some(&RIGHT_END) {
                Error::Config("head moved past the right endmarker".into())
            } else {
                Error::Precondition("tape ended without the right endmarker".into())
            });
        }
        Ok(PassAnalysis {
            p_accept: self.accept.value(),
            p_reject: self.reject.value(),
            p_restart: self.restart.value(),
            residual: self.residual.value(),
            peak_branches: self.peak,
        })
    }
}

/// Exact branch-tree enumeration of one pass over `¢ w $`.
///
/// Inputs that fail the verifier's classical precheck are rejected with
/// probability 1 before any quantum step.
pub fn run_pass_exact(
    spec: &VerifierSpec,
    w: &str,
    responses: &[Choice],
    step_cap: usize,
) -> Result<PassAnalysis, Error> {
    if step_cap == 0 {
        return Err(Error::Precondition("step cap must be positive".into()));
    }
    if !spec.precheck(w) {
        return Ok(PassAnalysis::deterministic_reject());
    }
    let mut run = PassRun::new(spec, step_cap);
    for &r in responses {
        run.responses.push(r);
    }
    run.push_symbol(LEFT_END)?;
    for c in w.chars() {
        run.push_symbol(c)?;
    }
    run.push_symbol(RIGHT_END)?;
    run.finish()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ExpectedPasses {
    Finite(ExactScalar),
    /// No pass ever halts.
    Infinite,
}

impl std::fmt::Display for ExpectedPasses {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ExpectedPasses::Finite(x) => write!(f, "{x}"),
            ExpectedPasses::Infinite => f.write_str("infinite"),
        }
    }
}

/// Outcome of repeating the same pass until it halts.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Verdict {
    pub overall_accept: ExactScalar,
    pub overall_reject: ExactScalar,
    pub expected_passes: ExpectedPasses,
}

impl Verdict {
    pub fn halts(&self) -> bool {
        matches!(self.expected_passes, ExpectedPasses::Finite(_))
    }
}

/// Geometric-series closed form for a fixed per-pass distribution.
pub fn run_protocol_exact(per_pass: &PassAnalysis) -> Result<Verdict, Error> {
    if !per_pass.residual.is_zero() {
        return Err(Error::Unresolved(per_pass.residual.clone()));
    }
    let halt = &per_pass.p_accept + &per_pass.p_reject;
    if halt.is_zero() {
        return Ok(Verdict {
            overall_accept: ExactScalar::zero(),
            overall_reject: ExactScalar::zero(),
            expected_passes: ExpectedPasses::Infinite,
        });
    }
    Ok(Verdict {
        overall_accept: &per_pass.p_accept / &halt,
        overall_reject: &per_pass.p_reject / &halt,
        expected_passes: ExpectedPasses::Finite(halt.recip()?),
    })
}
