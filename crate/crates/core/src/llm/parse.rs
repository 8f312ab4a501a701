use serde::Deserialize;
use serde_json::Value;
use thiserror::Error;

use crate::geometry::Point2D;
use crate::optimizers::PlanningTask;
use crate::propagation::{check_aps, Deployment};

/// A model reply that could not be turned into a deployment. The reason is
/// fed back to the model in the next prompt.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{reason}")]
pub struct ParseFailure {
    pub reason: String,
}

impl ParseFailure {
    fn new(reason: impl Into<String>) -> Self {
        Self {
            reason: reason.into(),
        }
    }
}

/// The `{"aps": [{"x": .., "y": ..}]}` document a proposer must return.
pub fn proposal_json(aps: &[Point2D]) -> String {
    serde_json::json!({ "aps": aps }).to_string()
}

/// First JSON object in `text` that has a key named `key`, skipping any
/// surrounding prose or code fences.
pub fn extract_object(text: &str, key: &str) -> Option<serde_json::Map<String, Value>> {
    for (i, _) in text.match_indices('{') {
        let mut de = serde_json::Deserializer::from_str(&text[i..]);
        if let Ok(Value::Object(map)) = Value::deserialize(&mut de) {
            if map.contains_key(key) {
                return Some(map);
            }
        }
    }
    None
}

pub fn parse_points(value: &Value) -> Result<Vec<Point2D>, ParseFailure> {
    let Value::Array(items) = value else {
        return Err(ParseFailure::new("\"aps\" must be an array"));
    };
    items
        .iter()
        .enumerate()
        .map(|(i, item)| {
            let coord = |k: &str| {
                item.get(k)
                    .and_then(Value::as_f64)
                    .ok_or_else(|| ParseFailure::new(format!("ap {i} has no numeric \"{k}\"")))
            };
            Ok(Point2D::new(coord("x")?, coord("y")?))
        })
        .collect()
}

/// Extracts and validates a deployment from a model reply.
pub fn parse_proposal(response_text: &str, task: &PlanningTask) -> Result<Deployment, ParseFailure> {
    let obj = extract_object(response_text, "aps")
        .ok_or_else(|| ParseFailure::new("no JSON object with an \"aps\" array found"))?;
    let aps = parse_points(&obj["aps"])?;
    check_aps(&task.plan, &aps, Some(task.max_aps)).map_err(ParseFailure::new)?;
    Ok(Deployment::new(aps, task.radio))
}
