//! The chat-model proposer. Without arguments it talks to a canned
//! in-process model; pass a base URL to use a real chat-completions endpoint
//! (the key is read from OPENAI_API_KEY).
//!
//!     cargo run --example llm_proposer
//!     cargo run --example llm_proposer -- http://127.0.0.1:8000/v1 gpt-4o

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Arc;

use indoor_planner::agents::office_radio;
use indoor_planner::llm::{ChatClient, Completion, LlmEndpointConfig, LlmError, LlmProposer};
use indoor_planner::optimizers::{optimize_loop, OptimizeError, PlanningTask, Scorer};
use indoor_planner::scenarios::reference_office;

/// Replies from a fixed list; the first one is unusable on purpose.
struct CannedModel {
    replies: Vec<&'static str>,
    next: AtomicUsize,
}

impl Completion for CannedModel {
    fn complete(&self, _system: &str, user: &str, budget: &mut usize) -> Result<String, LlmError> {
        *budget -= 1;
        let i = self.next.fetch_add(1, Ordering::SeqCst);
        println!("--- prompt {i} ({} bytes), last line: {}", user.len(), user.lines().last().unwrap_or(""));
        Ok(self.replies[i.min(self.replies.len() - 1)].to_string())
    }

    fn max_attempts(&self) -> usize {
        3
    }
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let task = PlanningTask {
        radio: office_radio(),
        ..PlanningTask::new(reference_office(), 0.95, 80.0, 2, 5)
    };
    let args: Vec<String> = std::env::args().skip(1).collect();
    let client: Arc<dyn Completion> = match args.first() {
        Some(url) => Arc::new(ChatClient::new(LlmEndpointConfig {
            base_url: url.clone(),
            model: args.get(1).cloned().unwrap_or_else(|| "gpt-4o".into()),
            ..Default::default()
        })?),
        None => Arc::new(CannedModel {
            replies: vec![
                "I think one AP near the door is enough.",
                r#"{"aps": [{"x": 10.0, "y": 5.0}]}"#,
                r#"Two APs: {"aps": [{"x": 14.2, "y": 6.5}, {"x": 1.6, "y": 1.9}]}"#,
            ],
            next: AtomicUsize::new(0),
        }),
    };
    let knowledge = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/data/knowledge.txt"))?;
    let mut proposer = LlmProposer::new(client, knowledge);
    match optimize_loop(&task, &mut proposer, &Scorer::new(&task)?) {
        Ok(trace) => {
            for r in trace.records() {
                println!("{:>2}  {:.4}  {:?}", r.iteration, r.coverage, r.violation);
            }
            println!("{} after {} iterations", trace.outcome, trace.iterations());
        }
        Err(OptimizeError::ProposerFailure { source, partial }) => {
            println!("endpoint failed after {} steps: {source}", partial.steps.len());
        }
        Err(e) => return Err(e.into()),
    }
    Ok(())
}
