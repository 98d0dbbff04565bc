use std::collections::HashMap;
use std::rc::Rc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Error;
use crate::exact::{Amp3, ExactScalar, OutcomeLabel};

use super::prover::{FixedResponses, ProverRequest, ProverStrategy};
use super::run::{moved, successors, Configuration, Successor};
use super::spec::{Choice, OutcomeAction, Rule, StateId, VerifierSpec, LEFT_END, RIGHT_END};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PassResult {
    Accept,
    Reject,
    Restart,
    /// The step cap was reached before the pass ended.
    Truncated,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SampledStep {
    pub symbol: char,
    pub label: OutcomeLabel,
    /// Index of the operation element that fired.
    pub element: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SampledPass {
    pub steps: Vec<SampledStep>,
    pub result: PassResult,
}

impl SampledPass {
    pub fn outcomes(&self) -> Vec<OutcomeLabel> {
        self.steps.iter().map(|s| s.label).collect()
    }
}

struct Draw {
    cumulative: f64,
    successor: Successor,
}

/// Monte-Carlo simulation of passes over a fixed tape.
///
/// Conditional outcome distributions are memoized on (state, symbol,
/// register), so repeated passes along the same path cost one lookup per step.
pub struct Sampler<'a> {
    spec: &'a VerifierSpec,
    w: String,
    tape: Vec<char>,
    step_cap: usize,
    passes: u64,
    memo: HashMap<(StateId, char, Amp3), Rc<[Draw]>>,
}

impl<'a> Sampler<'a> {
    pub fn new(spec: &'a VerifierSpec, w: &str, step_cap: usize) -> Self {
        let mut tape = vec![LEFT_END];
        tape.extend(w.chars());
        tape.push(RIGHT_END);
        Sampler { spec, w: w.to_string(), tape, step_cap, passes: 0, memo: HashMap::new() }
    }

    pub fn passes(&self) -> u64 {
        self.passes
    }

    fn draws(&mut self, cfg: &Configuration, symbol: char) -> Result<Rc<[Draw]>, Error> {
        let key = (cfg.state, symbol, cfg.register.clone());
        if let Some(d) = self.memo.get(&key) {
            return Ok(d.clone());
        }
        // Mass is irrelevant to the conditional distribution; expand from unit mass.
        let unit = Configuration { mass: ExactScalar::one(), ..cfg.clone() };
        let succ: Vec<Successor> = successors(self.spec, &unit, symbol, None)?
            .into_iter()
            .filter(|s| !s.weight.is_zero())
            .collect();
        let total: ExactScalar = succ.iter().map(|s| &s.weight).sum();
        if total.is_zero() {
            return Err(Error::Precondition("register has zero norm".into()));
        }
        let mut acc = ExactScalar::zero();
        let draws: Rc<[Draw]> = succ
            .into_iter()
            .map(|s| {
                acc = &acc + &s.weight;
                Draw { cumulative: (&acc / &total).to_f64(), successor: s }
            })
            .collect();
        self.memo.insert(key, draws.clone());
        Ok(draws)
    }

    /// Samples one pass. Outcomes are disclosed to the prover as they happen.
    pub fn sample_pass<R: Rng + ?Sized>(
        &mut self,
        rng: &mut R,
        prover: &mut dyn ProverStrategy,
    ) -> Result<SampledPass, Error> {
        self.passes += 1;
        let pass = self.passes;
        if !self.spec.precheck(&self.w) {
            return Ok(SampledPass { steps: Vec::new(), result: PassResult::Reject });
        }
        let mut cfg = Configuration::initial(self.spec);
        let mut steps = Vec::new();
        let mut history = Vec::new();
        loop {
            let symbol = *self
                .tape
                .get(cfg.head)
                .ok_or_else(|| Error::Config("head moved past the right endmarker".into()))?;
            if let Some(Rule::Communicate { .. }) = self.spec.rule(cfg.state, symbol) {
                let request = ProverRequest { pass, event: cfg.events + 1, history: &history };
                let choice: Choice = prover.respond(&request)?;
                let s = successors(self.spec, &cfg, symbol, Some(choice))?;
                cfg = s.into_iter().next().expect("communication has one successor").config;
                continue;
            }
            let draws = self.draws(&cfg, symbol)?;
            let u: f64 = rng.random();
            let pick = draws
                .iter()
                .position(|d| u < d.cumulative)
                .unwrap_or(draws.len() - 1);
            let s = &draws[pick].successor;
            let label = s.label.expect("quantum step has a label");
            steps.push(SampledStep { symbol, label, element: s.element.unwrap_or(0) });
            history.push(label);
            prover.observe(pass, label)?;
            let action = s.transition.action;
            let result = match action {
                OutcomeAction::Accept => Some(PassResult::Accept),
                OutcomeAction::Reject => Some(PassResult::Reject),
                OutcomeAction::Restart => Some(PassResult::Restart),
                _ if cfg.steps + 1 >= self.step_cap => Some(PassResult::Truncated),
                _ => None,
            };
            if let Some(result) = result {
                return Ok(SampledPass { steps, result });
            }
            cfg = Configuration {
                state: s.transition.next,
                head: moved(cfg.head, action)?,
                mass: ExactScalar::one(),
                register: s.config.register.clone(),
                steps: cfg.steps + 1,
                events: cfg.events,
            };
        }
    }
}

/// Samples a single pass with a fixed response list, deterministically from `seed`.
pub fn sample_pass(
    spec: &VerifierSpec,
    w: &str,
    responses: &[Choice],
    step_cap: usize,
    seed: u64,
) -> Result<SampledPass, Error> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut prover = FixedResponses(responses.to_vec());
    Sampler::new(spec, w, step_cap).sample_pass(&mut rng, &mut prover)
}
