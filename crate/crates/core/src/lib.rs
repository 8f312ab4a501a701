//! Indoor access-point planning toolkit.
//!
//! A floor-plan aware multi-wall evaluator sits inside an iterative loop in
//! which a proposer (heuristic, metaheuristic, scripted or LLM-backed) suggests
//! AP deployments and receives coverage feedback until a target is met. A
//! multi-agent pipeline extends the loop to joint room layout and AP design.

pub mod agents;
pub mod cli;
pub mod experiments;
pub mod geometry;
pub mod llm;
pub mod optimizers;
pub mod propagation;
pub mod scenarios;

use sha2::{Digest, Sha256};

/// Hex SHA-256 of `bytes`, truncated to 16 characters.
pub(crate) fn fingerprint(bytes: &[u8]) -> String {
    let digest = Sha256::digest(bytes);
    hex::encode(&digest[..8])
}
