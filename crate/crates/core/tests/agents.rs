mod common;

use std::sync::Arc;

use common::MockServer;
use indoor_planner::agents::{
    entity_agent, joint_design_pipeline, layout_agent, AgentError, Backend, Backends, JointDesignTask, JointScore,
    RoomSpec,
};
use indoor_planner::geometry::validate_plan;
use indoor_planner::llm::ChatClient;

fn small_task() -> JointDesignTask {
    JointDesignTask {
        n_candidates: 4,
        max_rounds: 2,
        ..Default::default()
    }
}

fn llm(server: &MockServer) -> Backend {
    Backend::Llm(Arc::new(ChatClient::new(server.config()).unwrap()))
}

const CORNER_LAYOUT: &str = r#"{"layouts": [{"rooms": [
    {"label": "A", "x": 0, "y": 0, "width": 4, "depth": 3},
    {"label": "B", "x": 16, "y": 0, "width": 4, "depth": 3},
    {"label": "C", "x": 0, "y": 7, "width": 4, "depth": 3},
    {"label": "D", "x": 16, "y": 7, "width": 4, "depth": 3}
]}]}"#;

#[test]
fn rule_pipeline_is_deterministic() {
    let task = small_task();
    let history = || {
        let out = joint_design_pipeline(&task, &Backends::default()).unwrap();
        let mut buf = Vec::new();
        out.write_history(&mut buf).unwrap();
        (buf, out.trace.to_jsonl())
    };
    assert_eq!(history(), history());
}

#[test]
fn best_overall_never_drops() {
    let out = joint_design_pipeline(&small_task(), &Backends::default()).unwrap();
    assert_eq!(out.rounds.len(), 2);
    let best = out.best_overall_by_round();
    assert!(best.windows(2).all(|w| w[0] <= w[1]));
    let (r, c) = out.origin;
    assert_eq!(out.rounds[r].candidates[c].score, out.score);
    assert!(validate_plan(&out.best.plan, Some(&small_task().rules())).is_empty());
}

#[test]
fn llm_layouts_are_used() {
    let server = MockServer::always(CORNER_LAYOUT);
    let task = small_task();
    let out = layout_agent(&task, None, &llm(&server)).unwrap();
    assert_eq!(out.len(), task.n_candidates);
    assert_eq!(out[0].provenance, "llm");
    assert!(out[1..].iter().all(|p| p.provenance != "llm"));
    assert_eq!(server.hits(), 1);
}

#[test]
fn unusable_llm_layouts_fall_back_to_rules() {
    let server = MockServer::always(r#"{"layouts": [{"rooms": [{"label": "Z", "x": 0, "y": 0, "width": 4, "depth": 3}]}]}"#);
    let task = small_task();
    let out = layout_agent(&task, None, &llm(&server)).unwrap();
    assert_eq!(out.len(), task.n_candidates);
    assert!(out.iter().all(|p| p.provenance != "llm"));
    assert_eq!(server.hits(), 3);
    assert!(server.bodies()[1].contains("unknown room"));
}

#[test]
fn llm_door_sides_are_honoured() {
    let task = small_task();
    let layout = layout_agent(&task, None, &llm(&MockServer::always(CORNER_LAYOUT))).unwrap().remove(0);
    let doors = r#"{"doors": [{"room": "A", "side": "north"}, {"room": "B", "side": "north"},
        {"room": "C", "side": "south"}, {"room": "D", "side": "south"}]}"#;
    let server = MockServer::always(doors);
    let done = entity_agent(&layout, &task, &llm(&server)).unwrap();
    let plan = &done.plan;
    for room in &plan.rooms {
        let d = plan.room_doors(room);
        assert_eq!(d.len(), 1, "room {}", room.label);
        let mid = plan.opening_span(&plan.openings[d[0]]).unwrap().point_at(0.5);
        let expect_y = if room.origin.y == 0.0 { 3.0 } else { 7.0 };
        assert!((mid.y - expect_y).abs() < 1e-9, "room {} door at {mid:?}", room.label);
    }
    assert!(validate_plan(plan, Some(&task.rules())).is_empty());
}

#[test]
fn llm_pipeline_end_to_end() {
    let layout = MockServer::always(CORNER_LAYOUT);
    let backends = Backends {
        layout: llm(&layout),
        ..Default::default()
    };
    let out = joint_design_pipeline(&small_task(), &backends).unwrap();
    assert!(out.rounds[0].candidates.iter().any(|c| c.provenance == "llm"));
    assert!(out.score.coverage >= 0.95);
}

#[test]
fn oversized_room_is_infeasible() {
    let mut task = small_task();
    task.rooms.push(RoomSpec {
        label: "HUGE".into(),
        width: 30.0,
        depth: 3.0,
    });
    assert!(matches!(
        joint_design_pipeline(&task, &Backends::default()),
        Err(AgentError::NoFeasibleLayout(_) | AgentError::InvalidTask(_))
    ));
}

#[test]
fn score_ties_prefer_fewer_aps() {
    let one = JointScore::new(0.97, 1, 1.0, 0.7, 0.3);
    let two = JointScore::new(0.97, 2, 1.0, 0.7, 0.3);
    assert_eq!(one.overall, two.overall);
    assert_eq!(indoor_planner::agents::best_index(&[two, one]), Some(1));
    assert_eq!(one.iwn_efficiency, 0.97);
    assert_eq!(two.iwn_efficiency, 0.485);
}
