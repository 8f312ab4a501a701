mod common;

use std::sync::Arc;
use std::time::Duration;

use common::{MockServer, Reply};
use indoor_planner::geometry::Point2D;
use indoor_planner::llm::{build_prompt, llm_propose, proposal_json, ChatClient, LlmError, LlmProposer};
use indoor_planner::optimizers::{optimize_loop, OptimizeError, Outcome, PlanningTask, ProposerError, Scorer};

fn task(max_iterations: usize) -> PlanningTask {
    PlanningTask::new(common::empty_room(20.0, 10.0), 0.9, 70.0, 1, max_iterations)
}

fn centre_reply() -> String {
    format!("Place it in the middle.\n```json\n{}\n```", proposal_json(&[Point2D::new(10.0, 5.0)]))
}

fn run(server: &MockServer, task: &PlanningTask) -> Result<indoor_planner::optimizers::OptimizationTrace, OptimizeError> {
    run_with(server.config(), task)
}

fn run_with(
    config: indoor_planner::llm::LlmEndpointConfig,
    task: &PlanningTask,
) -> Result<indoor_planner::optimizers::OptimizationTrace, OptimizeError> {
    let client = Arc::new(ChatClient::new(config).unwrap());
    let mut proposer = LlmProposer::new(client, "Centre APs in open rooms.");
    optimize_loop(task, &mut proposer, &Scorer::new(task).unwrap())
}

fn unreachable_attempts(err: OptimizeError) -> (usize, usize) {
    match err {
        OptimizeError::ProposerFailure {
            source: ProposerError::Llm(LlmError::EndpointUnreachable { attempts, .. }),
            partial,
        } => (attempts, partial.steps.len()),
        other => panic!("expected EndpointUnreachable, got {other:?}"),
    }
}

#[test]
fn converges_with_valid_reply() {
    let server = MockServer::always(&centre_reply());
    let trace = run(&server, &task(5)).unwrap();
    assert_eq!(trace.outcome, Outcome::Converged);
    assert_eq!(trace.iterations(), 1);
    assert_eq!(server.hits(), 1);
    let body: serde_json::Value = serde_json::from_str(&server.bodies()[0]).unwrap();
    assert_eq!(body["model"], "mock");
    assert_eq!(body["messages"][0]["role"], "system");
    assert_eq!(body["messages"][1]["role"], "user");
    assert!(body["messages"][1]["content"].as_str().unwrap().contains("Centre APs in open rooms."));
}

#[test]
fn retries_server_errors() {
    let server = MockServer::start(vec![Reply::Status(500), Reply::Status(503)], Reply::Content(centre_reply()));
    let trace = run(&server, &task(5)).unwrap();
    assert_eq!(trace.outcome, Outcome::Converged);
    assert_eq!(server.hits(), 3);
}

#[test]
fn retries_rate_limits() {
    let server = MockServer::start(vec![Reply::Status(429)], Reply::Content(centre_reply()));
    assert_eq!(run(&server, &task(5)).unwrap().outcome, Outcome::Converged);
    assert_eq!(server.hits(), 2);
}

#[test]
fn gives_up_after_retries() {
    let server = MockServer::start(Vec::new(), Reply::Status(500));
    let (attempts, steps) = unreachable_attempts(run(&server, &task(5)).unwrap_err());
    assert_eq!(attempts, 3);
    assert_eq!(steps, 0);
    assert_eq!(server.hits(), 3);
}

#[test]
fn timeout_is_unreachable() {
    let server = MockServer::start(Vec::new(), Reply::Hang(Duration::from_secs(3)));
    let config = indoor_planner::llm::LlmEndpointConfig {
        timeout_secs: 0.3,
        max_retries: 1,
        ..server.config()
    };
    let (attempts, _) = unreachable_attempts(run_with(config, &task(5)).unwrap_err());
    assert_eq!(attempts, 2);
}

#[test]
fn closed_port_is_unreachable() {
    let port = std::net::TcpListener::bind("127.0.0.1:0").unwrap().local_addr().unwrap().port();
    let config = indoor_planner::llm::LlmEndpointConfig {
        base_url: format!("http://127.0.0.1:{port}/v1"),
        max_retries: 1,
        backoff_base_secs: 0.0,
        ..Default::default()
    };
    let bundle = build_prompt(&task(1), &[], "").unwrap();
    assert!(matches!(
        llm_propose(&bundle, &config),
        Err(LlmError::EndpointUnreachable { attempts: 2, .. })
    ));
}

#[test]
fn auth_failure_is_not_retried() {
    let server = MockServer::start(Vec::new(), Reply::Status(401));
    let err = run(&server, &task(5)).unwrap_err();
    assert!(matches!(
        err,
        OptimizeError::ProposerFailure {
            source: ProposerError::Llm(LlmError::AuthFailure { status: 401, .. }),
            ..
        }
    ));
    assert_eq!(server.hits(), 1);
}

#[test]
fn unparseable_reply_is_explained_and_retried() {
    let server = MockServer::start(vec![Reply::Content("I would rather not say.".into())], Reply::Content(centre_reply()));
    let trace = run(&server, &task(5)).unwrap();
    assert_eq!(trace.outcome, Outcome::Converged);
    assert_eq!(server.hits(), 2);
    assert!(server.bodies()[1].contains("could not be used"));
}

#[test]
fn persistent_garbage_becomes_violations() {
    let server = MockServer::always("no idea");
    let trace = run(&server, &task(2)).unwrap();
    assert_eq!(trace.outcome, Outcome::Exhausted);
    assert!(trace.steps.iter().all(|s| s.feedback.is_violation()));
    assert_eq!(trace.best, None);
    // Attempts per iteration are bounded by max_retries + 1.
    assert_eq!(server.hits(), 2 * 3);
}

#[test]
fn out_of_bounds_reply_is_rejected() {
    let bad = proposal_json(&[Point2D::new(25.0, 5.0)]);
    let server = MockServer::start(vec![Reply::Content(bad)], Reply::Content(centre_reply()));
    let trace = run(&server, &task(5)).unwrap();
    assert_eq!(trace.outcome, Outcome::Converged);
    assert!(server.bodies()[1].contains("outside boundary"));
}

#[test]
fn key_stays_out_of_logs() {
    let var = "INDOOR_PLANNER_SECRET_TEST_KEY";
    std::env::set_var(var, "sk-do-not-log-0123456789");
    let server = MockServer::always(&centre_reply());
    let dir = tempfile::tempdir().unwrap();
    let log = dir.path().join("llm.jsonl");
    let config = indoor_planner::llm::LlmEndpointConfig {
        api_key_env: var.into(),
        ..server.config()
    };
    let client = Arc::new(ChatClient::new(config).unwrap().with_log(&log).unwrap());
    let t = task(5);
    let mut proposer = LlmProposer::new(client.clone(), "");
    optimize_loop(&t, &mut proposer, &Scorer::new(&t).unwrap()).unwrap();
    let text = std::fs::read_to_string(&log).unwrap();
    assert!(!text.is_empty());
    assert!(!text.contains("sk-do-not-log"));
    assert!(!server.bodies().concat().contains("sk-do-not-log"));
    assert_eq!(client.calls(), 1);
}
