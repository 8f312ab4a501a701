//! Joint building layout and network design by five cooperating agents:
//! layout, entity (doors), network design, correction and evaluation.
//!
//! Every agent has a deterministic rule backend so the pipeline runs offline;
//! layout and entity agents can also be driven by a chat model and fall back
//! to the rules when its replies are unusable.

mod entity;
mod evaluate;
mod iwn;
mod layout;
mod pipeline;
mod task;

use std::sync::Arc;

use thiserror::Error;

pub use entity::{entity_agent, ENTITY_PREAMBLE};
pub use evaluate::{
    best_index, evaluation_update_agent, Candidate, Evaluation, GlobalFeedback, JointScore, RationalityChecks,
};
pub use iwn::{correction_agent, gate, iwn_design_agent, IwnBackend};
pub use layout::{layout_agent, rule_layouts, LayoutProposal, LAYOUT_PREAMBLE};
pub use pipeline::{joint_design_pipeline, Backends, CandidateRecord, JointDesignOutcome, RoundRecord};
pub use task::{default_materials, office_radio, wall_index, JointDesignTask, OuterDoorSpec, RoomSpec, Side};

use crate::llm::{Completion, LlmError};
use crate::optimizers::OptimizeError;

/// Backend of the layout and entity agents.
#[derive(Clone, Default)]
pub enum Backend {
    #[default]
    Rule,
    Llm(Arc<dyn Completion>),
}

impl std::fmt::Debug for Backend {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Backend::Rule => f.write_str("Rule"),
            Backend::Llm(_) => f.write_str("Llm"),
        }
    }
}

#[derive(Debug, Error)]
pub enum AgentError {
    #[error("invalid joint design task: {0}")]
    InvalidTask(String),
    #[error("no feasible layout: {0}")]
    NoFeasibleLayout(String),
    #[error("no valid door placement: {0}")]
    NoValidDoorPlacement(String),
    #[error("layout rejected: {0}")]
    InvalidLayout(String),
    #[error("no valid AP position in the plan")]
    NoValidPosition,
    #[error(transparent)]
    Optimize(#[from] OptimizeError),
    #[error(transparent)]
    Llm(#[from] LlmError),
}
