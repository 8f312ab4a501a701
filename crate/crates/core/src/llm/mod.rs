//! LLM-backed proposer: prompt assembly, an OpenAI-compatible chat client and
//! strict response parsing.
//!
//! The wire format is documented in `docs/llm-wire-format.md`.

mod client;
mod parse;
mod prompt;
mod proposer;

use thiserror::Error;

pub use client::{llm_propose, ChatClient, Completion, LlmEndpointConfig};
pub use parse::{extract_object, parse_points, parse_proposal, proposal_json, ParseFailure};
pub use prompt::{
    build_prompt, build_prompt_with, describe_plan, render_step, PromptBundle, PromptOptions, DEFAULT_CHAR_CAP,
    DEFAULT_WINDOW, SYSTEM_PREAMBLE,
};
pub use proposer::LlmProposer;

pub use crate::optimizers::ScriptedProposer;

#[derive(Debug, Error)]
pub enum LlmError {
    #[error("endpoint unreachable after {attempts} attempts: {detail}")]
    EndpointUnreachable { attempts: usize, detail: String },
    #[error("authentication rejected (HTTP {status}): {detail}")]
    AuthFailure { status: u16, detail: String },
    #[error("rate limited after {attempts} attempts")]
    RateLimited { attempts: usize },
    #[error("unusable response: {0}")]
    BadResponse(String),
    #[error("prompt of {len} bytes exceeds the cap of {cap}")]
    PromptTooLong { len: usize, cap: usize },
    #[error("invalid endpoint config: {0}")]
    InvalidConfig(String),
}

impl LlmError {
    /// True for failures caused by the network or the remote service.
    pub fn is_network(&self) -> bool {
        matches!(
            self,
            LlmError::EndpointUnreachable { .. } | LlmError::AuthFailure { .. } | LlmError::RateLimited { .. }
        )
    }
}
