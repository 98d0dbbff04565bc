use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use crate::error::Error;
use crate::exact::{check_completeness, OutcomeLabel, Superoperator};

/// Left endmarker.
pub const LEFT_END: char = '¢';
/// Right endmarker.
pub const RIGHT_END: char = '$';

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StateId(pub usize);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum StateKind {
    Reading,
    Communication,
    Accepting,
    Rejecting,
}

impl StateKind {
    pub fn is_halting(self) -> bool {
        matches!(self, StateKind::Accepting | StateKind::Rejecting)
    }
}

/// What the classical control does after a step. Accept, Reject and Restart
/// end the current pass.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum OutcomeAction {
    MoveRight,
    MoveLeft,
    Stay,
    Restart,
    Accept,
    Reject,
}

impl OutcomeAction {
    pub fn terminates(self) -> bool {
        matches!(self, OutcomeAction::Restart | OutcomeAction::Accept | OutcomeAction::Reject)
    }
}

/// A prover message. The protocol only ever distinguishes these two.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Choice {
    Select,
    Skip,
}

impl Choice {
    pub fn from_bool(selected: bool) -> Self {
        if selected {
            Choice::Select
        } else {
            Choice::Skip
        }
    }

    pub fn is_select(self) -> bool {
        self == Choice::Select
    }
}

impl fmt::Display for Choice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Choice::Select => "select",
            Choice::Skip => "skip",
        })
    }
}

impl std::str::FromStr for Choice {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self, Error> {
        match s.trim().to_ascii_lowercase().as_str() {
            "select" | "sel" | "1" => Ok(Choice::Select),
            "skip" | "0" => Ok(Choice::Skip),
            other => Err(Error::Parse {
                token: other.to_string(),
                position: 0,
                reason: "expected select or skip".into(),
            }),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Transition {
    pub next: StateId,
    pub action: OutcomeAction,
}

#[derive(Clone, Debug)]
pub enum QuantumOp {
    /// Resets the register to `(1, 0, 0)`. Its single outcome is reported as
    /// [`OutcomeLabel::MoveRight`].
    Initialize,
    Apply(Arc<Superoperator>),
}

impl QuantumOp {
    pub fn name(&self) -> &str {
        match self {
            QuantumOp::Initialize => "initialize",
            QuantumOp::Apply(sop) => &sop.name,
        }
    }
}

#[derive(Clone, Debug)]
pub enum Rule {
    Quantum {
        op: QuantumOp,
        transitions: Vec<(OutcomeLabel, Transition)>,
    },
    Communicate {
        on_select: Transition,
        on_skip: Transition,
    },
}

impl Rule {
    pub(crate) fn transition_for(&self, label: OutcomeLabel) -> Option<Transition> {
        match self {
            Rule::Quantum { transitions, .. } => {
                transitions.iter().find(|(l, _)| *l == label).map(|(_, t)| *t)
            }
            Rule::Communicate { .. } => None,
        }
    }
}

/// Classical control plus operator table of a verifier.
#[derive(Clone, Debug)]
pub struct VerifierSpec {
    name: String,
    states: Vec<(String, StateKind)>,
    start: StateId,
    /// Rules indexed by state, then looked up by symbol.
    rules: Vec<Vec<(char, Rule)>>,
    precheck: Option<fn(&str) -> bool>,
}

impl VerifierSpec {
    pub fn builder(name: impl Into<String>) -> VerifierSpecBuilder {
        VerifierSpecBuilder {
            name: name.into(),
            states: Vec::new(),
            start: None,
            rules: HashMap::new(),
            precheck: None,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn start(&self) -> StateId {
        self.start
    }

    pub fn state_name(&self, id: StateId) -> &str {
        &self.states[id.0].0
    }

    pub fn state_kind(&self, id: StateId) -> StateKind {
        self.states[id.0].1
    }

    pub fn rule(&self, state: StateId, symbol: char) -> Option<&Rule> {
        self.rules.get(state.0)?.iter().find(|(c, _)| *c == symbol).map(|(_, r)| r)
    }

    /// Deterministic classical check run on `w` before any quantum step.
    pub fn precheck(&self, w: &str) -> bool {
        self.precheck.is_none_or(|f| f(w))
    }

    /// Every distinct superoperator in the table, sorted by name.
    pub fn superoperators(&self) -> Vec<Arc<Superoperator>> {
        let mut ops: Vec<Arc<Superoperator>> = Vec::new();
        for (_, rule) in self.rules.iter().flatten() {
            if let Rule::Quantum { op: QuantumOp::Apply(sop), .. } = rule {
                if !ops.iter().any(|o| Arc::ptr_eq(o, sop) || o.name == sop.name) {
                    ops.push(sop.clone());
                }
            }
        }
        ops.sort_by(|a, b| a.name.cmp(&b.name));
        ops
    }

    /// Names of superoperators that fail the completeness relation.
    pub fn incomplete_operators(&self) -> Vec<String> {
        self.superoperators()
            .iter()
            .filter(|s| !check_completeness(s))
            .map(|s| s.name.clone())
            .collect()
    }
}

pub struct VerifierSpecBuilder {
    name: String,
    states: Vec<(String, StateKind)>,
    start: Option<StateId>,
    rules: HashMap<(StateId, char), Rule>,
    precheck: Option<fn(&str) -> bool>,
}

impl VerifierSpecBuilder {
    pub fn state(&mut self, name: impl Into<String>, kind: StateKind) -> StateId {
        self.states.push((name.into(), kind));
        StateId(self.states.len() - 1)
    }

    pub fn start(&mut self, id: StateId) -> &mut Self {
        self.start = Some(id);
        self
    }

    pub fn precheck(&mut self, f: fn(&str) -> bool) -> &mut Self {
        self.precheck = Some(f);
        self
    }

    pub fn quantum(
        &mut self,
        state: StateId,
        symbol: char,
        op: QuantumOp,
        transitions: &[(OutcomeLabel, Transition)],
    ) -> &mut Self {
        self.rules.insert(
            (state, symbol),
            Rule::Quantum { op, transitions: transitions.to_vec() },
        );
        self
    }

    pub fn communicate(
        &mut self,
        state: StateId,
        symbol: char,
        on_select: Transition,
        on_skip: Transition,
    ) -> &mut Self {
        self.rules.insert((state, symbol), Rule::Communicate { on_select, on_skip });
        self
    }

    pub fn build(&self) -> Result<VerifierSpec, Error> {
        let start = self.start.ok_or_else(|| Error::Config("no start state".into()))?;
        let kind = |id: StateId| {
            self.states
                .get(id.0)
                .map(|s| s.1)
                .ok_or_else(|| Error::Config(format!("unknown state id {}", id.0)))
        };
        if kind(start)? != StateKind::Reading {
            return Err(Error::Config("start state must be a reading state".into()));
        }
        let check_transition = |t: &Transition| -> Result<(), Error> {
            let k = kind(t.next)?;
            let ok = match t.action {
                OutcomeAction::Accept => k == StateKind::Accepting,
                OutcomeAction::Reject => k == StateKind::Rejecting,
                OutcomeAction::Restart => t.next == start,
                _ => !k.is_halting(),
            };
            if ok {
                Ok(())
            } else {
                Err(Error::Config(format!(
                    "action {:?} cannot lead to state {:?}",
                    t.action, self.states[t.next.0].0
                )))
            }
        };
        for ((state, symbol), rule) in &self.rules {
            let k = kind(*state)?;
            let sname = &self.states[state.0].0;
            match rule {
                Rule::Quantum { op, transitions } => {
                    if k != StateKind::Reading {
                        return Err(Error::Config(format!(
                            "quantum rule on non-reading state {sname:?}"
                        )));
                    }
                    let labels: Vec<OutcomeLabel> = match op {
                        QuantumOp::Initialize => vec![OutcomeLabel::MoveRight],
                        QuantumOp::Apply(sop) => {
                            if sop.elements.is_empty() {
                                return Err(Error::Config(format!(
                                    "superoperator {} has no elements",
                                    sop.name
                                )));
                            }
                            sop.elements.iter().map(|e| e.label()).collect()
                        }
                    };
                    for label in labels {
                        if !transitions.iter().any(|(l, _)| *l == label) {
                            return Err(Error::Config(format!(
                                "no transition for outcome {label} at ({sname}, {symbol:?})"
                            )));
                        }
                    }
                    for (_, t) in transitions {
                        check_transition(t)?;
                    }
                }
                Rule::Communicate { on_select, on_skip } => {
                    if k != StateKind::Communication {
                        return Err(Error::Config(format!(
                            "communication rule on non-communication state {sname:?}"
                        )));
                    }
                    check_transition(on_select)?;
                    check_transition(on_skip)?;
                }
            }
        }
        Ok(VerifierSpec {
            name: self.name.clone(),
            states: self.states.clone(),
            start,
            rules: (0..self.states.len())
                .map(|i| {
                    let mut row: Vec<(char, Rule)> = self
                        .rules
                        .iter()
                        .filter(|((state, _), _)| state.0 == i)
                        .map(|((_, symbol), rule)| (*symbol, rule.clone()))
                        .collect();
                    row.sort_by_key(|(symbol, _)| *symbol);
                    row
                })
                .collect(),
            precheck: self.precheck,
        })
    }
}
