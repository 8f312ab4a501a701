use thiserror::Error;

use crate::geometry::Point2D;
use crate::propagation::Deployment;

use super::task::{PlanningTask, Scorer};
use super::trace::{Feedback, OptimizationTrace, Outcome, Step};
use super::OptimizeError;

/// What a proposer hands back for one iteration.
#[derive(Debug, Clone, PartialEq)]
pub enum Proposal {
    Aps(Vec<Point2D>),
    /// The proposer could not produce a usable deployment this round; the
    /// loop records a violation step and continues.
    Rejected { aps: Vec<Point2D>, reason: String },
}

#[derive(Debug, Error)]
pub enum ProposerError {
    #[error(transparent)]
    Llm(#[from] crate::llm::LlmError),
    #[error("{0}")]
    Other(String),
}

/// Maps a task and the feedback history so far to the next candidate.
pub trait Proposer {
    fn name(&self) -> &str;

    fn propose(&mut self, task: &PlanningTask, history: &[Step]) -> Result<Proposal, ProposerError>;
}

/// Runs propose/evaluate rounds until the coverage target is met or the
/// iteration budget runs out.
///
/// Invalid proposals become violation steps. A proposer error aborts the
/// run and returns the partial trace inside [`OptimizeError::ProposerFailure`].
pub fn optimize_loop(
    task: &PlanningTask,
    proposer: &mut dyn Proposer,
    scorer: &Scorer,
) -> Result<OptimizationTrace, OptimizeError> {
    task.validate()?;
    let mut trace = OptimizationTrace::new(task.fingerprint());
    for iteration in 1..=task.max_iterations {
        let proposal = match proposer.propose(task, &trace.steps) {
            Ok(p) => p,
            Err(source) => {
                return Err(OptimizeError::ProposerFailure {
                    source,
                    partial: Box::new(trace),
                })
            }
        };
        let (aps, feedback) = match proposal {
            Proposal::Aps(aps) => {
                let fb = scorer.feedback(iteration, &aps);
                (aps, fb)
            }
            Proposal::Rejected { aps, reason } => (aps, Feedback::violation(iteration, reason)),
        };
        let done = feedback.coverage() >= task.coverage_target;
        trace.push(Step {
            deployment: Deployment::new(aps, task.radio),
            feedback,
        });
        if done {
            trace.outcome = Outcome::Converged;
            break;
        }
    }
    Ok(trace)
}

/// Replays a fixed list of deployments, repeating the last one.
#[derive(Debug, Clone)]
pub struct ScriptedProposer {
    script: Vec<Vec<Point2D>>,
    next: usize,
}

impl ScriptedProposer {
    pub fn new(script: Vec<Vec<Point2D>>) -> Result<Self, OptimizeError> {
        if script.is_empty() {
            return Err(OptimizeError::InvalidParams("script must not be empty".into()));
        }
        Ok(Self { script, next: 0 })
    }
}

impl Proposer for ScriptedProposer {
    fn name(&self) -> &str {
        "scripted"
    }

    fn propose(&mut self, _task: &PlanningTask, _history: &[Step]) -> Result<Proposal, ProposerError> {
        let i = self.next.min(self.script.len() - 1);
        self.next += 1;
        Ok(Proposal::Aps(self.script[i].clone()))
    }
}
