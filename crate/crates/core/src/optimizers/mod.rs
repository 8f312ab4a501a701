//! The propose/evaluate loop, its proposers and the comparison baselines.
//!
//! Every optimizer emits an [`OptimizationTrace`]. Baselines treat coverage as
//! the only objective and the AP count as a hard budget. Ties are broken
//! lexicographically by (x, y) so runs are reproducible.

mod aco;
mod anneal;
mod candidates;
mod driver;
mod greedy;
mod oracle;
mod task;
mod trace;

use thiserror::Error;

pub use aco::{aco_optimize, AcoParams};
pub use anneal::{metropolis_accept, simulated_annealing_optimize, AnnealMove, AnnealParams, Annealer};
pub use candidates::CandidateCoverage;
pub use driver::{optimize_loop, Proposal, Proposer, ProposerError, ScriptedProposer};
pub use greedy::{GreedyProposer, MIN_IMPROVEMENT};
pub use oracle::{binomial, brute_force_oracle, OracleResult, MAX_COMBINATIONS};
pub use task::{PlanningTask, Scorer};
pub use trace::{read_jsonl, Feedback, OptimizationTrace, Outcome, Step, TraceRecord};

use crate::propagation::PropagationError;

#[derive(Debug, Error)]
pub enum OptimizeError {
    #[error("invalid task: {0}")]
    InvalidTask(String),
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("search space of {combinations} combinations exceeds the limit of {limit}")]
    SearchSpaceTooLarge { combinations: u128, limit: u128 },
    #[error(transparent)]
    Propagation(#[from] PropagationError),
    #[error("proposer failed after {} steps: {source}", partial.steps.len())]
    ProposerFailure {
        #[source]
        source: ProposerError,
        partial: Box<OptimizationTrace>,
    },
}
