use crate::error::Error;
use crate::exact::OutcomeLabel;

use super::spec::Choice;

/// What the prover sees when the verifier asks for a message.
#[derive(Clone, Copy, Debug)]
pub struct ProverRequest<'a> {
    /// 1-based pass number.
    pub pass: u64,
    /// 1-based communication event within the pass.
    pub event: usize,
    /// Outcomes observed so far in this pass.
    pub history: &'a [OutcomeLabel],
}

/// A deterministic prover. Every quantum outcome is disclosed to it through
/// [`ProverStrategy::observe`] as soon as the verifier sees it.
pub trait ProverStrategy {
    fn respond(&mut self, request: &ProverRequest<'_>) -> Result<Choice, Error>;

    fn observe(&mut self, _pass: u64, _label: OutcomeLabel) -> Result<(), Error> {
        Ok(())
    }
}

/// Answers the i-th request of every pass with the i-th stored message.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FixedResponses(pub Vec<Choice>);

impl ProverStrategy for FixedResponses {
    fn respond(&mut self, request: &ProverRequest<'_>) -> Result<Choice, Error> {
        self.0.get(request.event - 1).copied().ok_or_else(|| {
            Error::Protocol(format!(
                "prover has {} messages but event {} was requested",
                self.0.len(),
                request.event
            ))
        })
    }
}
