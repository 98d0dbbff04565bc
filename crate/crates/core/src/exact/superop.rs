use std::fmt;

use super::register::{IntMat3, RawAmp3};
use super::{Amp3, ExactScalar, Mat3};

/// What the verifier observes when an operation element fires.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum OutcomeLabel {
    MoveRight,
    Restart,
    Accept,
    Reject,
}

impl OutcomeLabel {
    pub fn symbol(self) -> &'static str {
        match self {
            OutcomeLabel::MoveRight => "→",
            OutcomeLabel::Restart => "↻",
            OutcomeLabel::Accept => "A",
            OutcomeLabel::Reject => "R",
        }
    }

    /// ASCII name, used on the external prover wire.
    pub fn wire_name(self) -> &'static str {
        match self {
            OutcomeLabel::MoveRight => "RIGHT",
            OutcomeLabel::Restart => "RESTART",
            OutcomeLabel::Accept => "ACCEPT",
            OutcomeLabel::Reject => "REJECT",
        }
    }
}

impl fmt::Display for OutcomeLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OperationElement {
    matrix: Mat3,
    label: OutcomeLabel,
    integer: Option<IntMat3>,
}

impl OperationElement {
    pub fn new(matrix: Mat3, label: OutcomeLabel) -> Self {
        let integer = matrix.integer_form();
        OperationElement { matrix, label, integer }
    }

    pub fn matrix(&self) -> &Mat3 {
        &self.matrix
    }

    pub fn label(&self) -> OutcomeLabel {
        self.label
    }

    /// The post-state `E |psi>` and its squared norm.
    pub fn apply(&self, state: &Amp3) -> (Amp3, ExactScalar) {
        let post = self.apply_lazy(state);
        let norm = post.squared_norm();
        (post.into_amp3(), norm)
    }

    /// `E |psi>`, reduced to lowest terms only on demand.
    pub(crate) fn apply_lazy(&self, state: &Amp3) -> PostState {
        match self.integer.as_ref().and_then(|m| m.mul_vec_raw(state)) {
            Some(raw) => PostState::Raw(raw),
            None => PostState::Reduced(self.matrix.mul_vec(state)),
        }
    }
}

pub(crate) enum PostState {
    Raw(RawAmp3),
    Reduced(Amp3),
}

impl PostState {
    pub(crate) fn is_zero(&self) -> bool {
        match self {
            PostState::Raw(raw) => raw.is_zero(),
            PostState::Reduced(v) => v.is_zero(),
        }
    }

    pub(crate) fn squared_norm(&self) -> ExactScalar {
        match self {
            PostState::Raw(raw) => raw.squared_norm().unwrap_or_else(|| raw.reduce().squared_norm()),
            PostState::Reduced(v) => v.squared_norm(),
        }
    }

    pub(crate) fn into_amp3(self) -> Amp3 {
        match self {
            PostState::Raw(raw) => raw.reduce(),
            PostState::Reduced(v) => v,
        }
    }
}

/// A selective quantum operation: the ordered operation elements `E_1..E_k`.
///
/// Construction does not enforce the completeness relation so that broken
/// operators can be built for negative tests; [`check_completeness`] decides it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Superoperator {
    pub name: String,
    pub elements: Vec<OperationElement>,
}

impl Superoperator {
    pub fn new(name: impl Into<String>, elements: Vec<OperationElement>) -> Self {
        Superoperator { name: name.into(), elements }
    }

    /// `sum_i E_i^T E_i`. Entries are real, so the adjoint is the transpose.
    pub fn gram_sum(&self) -> Mat3 {
        self.elements
            .iter()
            .map(|e| e.matrix.transpose().mul_mat(&e.matrix))
            .fold(Mat3::default(), |acc, m| acc.add(&m))
    }

    pub fn is_complete(&self) -> bool {
        check_completeness(self)
    }
}

/// True iff `sum_i E_i^T E_i == I` exactly. An empty superoperator is never complete.
pub fn check_completeness(sop: &Superoperator) -> bool {
    !sop.elements.is_empty() && sop.gram_sum() == Mat3::identity()
}

/// One measurement outcome of [`apply`]: the unnormalized post-state and its weight.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Branch {
    pub label: OutcomeLabel,
    pub state: Amp3,
    pub weight: ExactScalar,
}

/// Applies every operation element to `state`, in element order.
///
/// Post-states are left unnormalized (`E_i |psi>`), so each weight is the
/// squared norm of its post-state and the weights sum to the squared norm of
/// the input whenever the operator is complete.
pub fn apply(sop: &Superoperator, state: &Amp3) -> Vec<Branch> {
    sop.elements
        .iter()
        .map(|e| {
            let (post, weight) = e.apply(state);
            Branch { label: e.label, state: post, weight }
        })
        .collect()
}
