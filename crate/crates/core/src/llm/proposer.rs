use std::sync::Arc;

use crate::optimizers::{PlanningTask, Proposal, Proposer, ProposerError, Step};

use super::client::Completion;
use super::parse::parse_proposal;
use super::prompt::{build_prompt_with, PromptOptions};

/// Proposer that asks a chat model for each deployment.
///
/// Every iteration gets `max_attempts()` requests in total. Network retries
/// and unparseable replies draw from the same budget; a reply that cannot be
/// used is explained in the next prompt. If the budget runs out on bad
/// replies the iteration is recorded as rejected.
pub struct LlmProposer {
    client: Arc<dyn Completion>,
    knowledge: String,
    options: PromptOptions,
}

impl LlmProposer {
    pub fn new(client: Arc<dyn Completion>, knowledge: impl Into<String>) -> Self {
        Self {
            client,
            knowledge: knowledge.into(),
            options: PromptOptions::default(),
        }
    }

    pub fn with_options(mut self, options: PromptOptions) -> Self {
        self.options = options;
        self
    }
}

impl Proposer for LlmProposer {
    fn name(&self) -> &str {
        "llm"
    }

    fn propose(&mut self, task: &PlanningTask, history: &[Step]) -> Result<Proposal, ProposerError> {
        let mut budget = self.client.max_attempts();
        let mut options = self.options.clone();
        options.failures.clear();
        loop {
            let bundle = build_prompt_with(task, history, &self.knowledge, &options)?;
            let text = self
                .client
                .complete(&bundle.system_preamble, &bundle.user_message(), &mut budget)?;
            match parse_proposal(&text, task) {
                Ok(d) => return Ok(Proposal::Aps(d.aps)),
                Err(f) if budget == 0 => {
                    return Ok(Proposal::Rejected {
                        aps: Vec::new(),
                        reason: format!("unusable reply: {}", f.reason),
                    })
                }
                Err(f) => options.failures.push(f.reason),
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use std::sync::Mutex;

    use super::*;
    use crate::geometry::{FloorPlan, Point2D, Rect};
    use crate::llm::LlmError;
    use crate::optimizers::{optimize_loop, Outcome, Scorer};

    struct Canned {
        replies: Mutex<Vec<String>>,
        prompts: Mutex<Vec<String>>,
        attempts: usize,
    }

    impl Completion for Canned {
        fn complete(&self, _system: &str, user: &str, budget: &mut usize) -> Result<String, LlmError> {
            if *budget == 0 {
                return Err(LlmError::EndpointUnreachable {
                    attempts: 0,
                    detail: "none".into(),
                });
            }
            *budget -= 1;
            self.prompts.lock().unwrap().push(user.to_string());
            let mut r = self.replies.lock().unwrap();
            Ok(if r.len() > 1 { r.remove(0) } else { r[0].clone() })
        }

        fn max_attempts(&self) -> usize {
            self.attempts
        }
    }

    fn task() -> PlanningTask {
        let plan = FloorPlan::new(Rect::new(Point2D::new(0.0, 0.0), 20.0, 10.0));
        PlanningTask::new(plan, 0.5, 80.0, 2, 3)
    }

    #[test]
    fn failure_reason_reaches_next_prompt() {
        let canned = Arc::new(Canned {
            replies: Mutex::new(vec![r#"{"aps":[{"x":-1,"y":5}]}"#.into(), r#"{"aps":[{"x":10,"y":5}]}"#.into()]),
            prompts: Mutex::new(Vec::new()),
            attempts: 2,
        });
        let t = task();
        let mut p = LlmProposer::new(canned.clone(), "rules");
        let trace = optimize_loop(&t, &mut p, &Scorer::new(&t).unwrap()).unwrap();
        assert_eq!(trace.outcome, Outcome::Converged);
        let prompts = canned.prompts.lock().unwrap();
        assert_eq!(prompts.len(), 2);
        assert!(prompts[1].contains("ap 0 outside boundary"));
    }

    #[test]
    fn exhausted_budget_rejects() {
        let canned = Arc::new(Canned {
            replies: Mutex::new(vec!["nothing useful".into()]),
            prompts: Mutex::new(Vec::new()),
            attempts: 2,
        });
        let t = task();
        let mut p = LlmProposer::new(canned.clone(), "");
        let trace = optimize_loop(&t, &mut p, &Scorer::new(&t).unwrap()).unwrap();
        assert_eq!(trace.outcome, Outcome::Exhausted);
        assert!(trace.steps.iter().all(|s| s.feedback.is_violation()));
        assert_eq!(canned.prompts.lock().unwrap().len(), 3 * 2);
    }
}
