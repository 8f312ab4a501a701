mod common;

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use common::MockServer;
use indoor_planner::geometry::Point2D;
use indoor_planner::llm::proposal_json;

fn data(rel: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("data").join(rel)
}

fn cli(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_indoor-plan"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

/// Office config with overrides merged into its JSON.
fn config(dir: &Path, patch: serde_json::Value) -> PathBuf {
    let mut cfg: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(data("configs/office.json")).unwrap()).unwrap();
    cfg["plan"] = serde_json::Value::String(s(&data("reference_office.json")).into());
    for (k, v) in patch.as_object().unwrap() {
        cfg[k] = v.clone();
    }
    let path = dir.join("config.json");
    std::fs::write(&path, cfg.to_string()).unwrap();
    path
}

#[test]
fn validate_codes() {
    assert_eq!(code(&cli(&["validate", s(&data("reference_office.json"))])), 0);
    assert_eq!(code(&cli(&["validate", s(&data("reference_complex.json"))])), 0);
    assert_eq!(code(&cli(&["validate", "/nonexistent/plan.json"])), 2);

    let dir = tempfile::tempdir().unwrap();
    let broken = dir.path().join("broken.json");
    std::fs::write(&broken, "{ not json").unwrap();
    assert_eq!(code(&cli(&["validate", s(&broken)])), 2);

    let mut plan = indoor_planner::scenarios::reference_office();
    plan.add_wall(Point2D::new(-5.0, 1.0), Point2D::new(5.0, 1.0), "concrete", 0.2);
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, plan.to_json_pretty()).unwrap();
    let out = cli(&["validate", s(&bad)]);
    assert_eq!(code(&out), 1);
    assert!(stdout(&out).contains("violation"));
}

#[test]
fn evaluate_codes_and_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let plan = data("reference_office.json");
    let run = |name: &str| {
        let heat = dir.path().join(name);
        let out = cli(&["evaluate", s(&plan), "--ap", "10,5", "--ap", "3.5,8", "--heatmap", s(&heat)]);
        assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
        (stdout(&out), std::fs::read(heat).unwrap())
    };
    let (a, b) = (run("a.ppm"), run("b.ppm"));
    assert_eq!(a, b);
    assert!(a.0.contains("coverage_fraction: "));

    assert_eq!(code(&cli(&["evaluate", s(&plan), "--ap", "25,5"])), 1);
    assert_eq!(code(&cli(&["evaluate", s(&plan), "--ap", "ten,5"])), 2);
    assert_eq!(code(&cli(&["evaluate", s(&plan), "--ap", "10,5", "--cell-size", "0.3"])), 2);
}

#[test]
fn optimize_writes_run_directory() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(dir.path(), serde_json::json!({}));
    let plan_before = std::fs::read(data("reference_office.json")).unwrap();
    let run = |id: &str| {
        let out = cli(&["optimize", "--config", s(&cfg), "--out", s(dir.path()), "--run-id", id]);
        assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
        dir.path().join(id)
    };
    let (a, b) = (run("a"), run("b"));
    for f in ["trace.jsonl", "summary.txt", "heatmap.ppm", "plan.json"] {
        assert_eq!(std::fs::read(a.join(f)).unwrap(), std::fs::read(b.join(f)).unwrap(), "{f}");
    }
    let summary = std::fs::read_to_string(a.join("summary.txt")).unwrap();
    assert!(summary.starts_with("converged "), "{summary}");
    assert_eq!(std::fs::read(data("reference_office.json")).unwrap(), plan_before);
}

#[test]
fn seeded_optimizers_repeat_through_cli() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(dir.path(), serde_json::json!({}));
    for kind in ["aco", "anneal"] {
        let run = |id: &str| {
            let out = cli(&[
                "optimize", "--config", s(&cfg), "--optimizer", kind, "--seed", "5", "--max-iterations", "15",
                "--target", "1.0", "--out", s(dir.path()), "--run-id", id,
            ]);
            assert!(matches!(code(&out), 0 | 3));
            std::fs::read(dir.path().join(id).join("trace.jsonl")).unwrap()
        };
        assert_eq!(run(&format!("{kind}-1")), run(&format!("{kind}-2")));
    }
}

#[test]
fn optimize_codes() {
    let dir = tempfile::tempdir().unwrap();
    let plan = data("reference_office.json");
    let out_dir = dir.path().join("runs");
    let base = ["optimize", "--plan", s(&plan), "--out", s(&out_dir)];
    let with = |extra: &[&str]| {
        let mut a = base.to_vec();
        a.extend_from_slice(extra);
        code(&cli(&a))
    };
    assert_eq!(with(&["--optimizer", "aco"]), 2, "seed is required");
    assert_eq!(with(&["--target", "1.5"]), 2);
    assert_eq!(with(&["--threshold", "50", "--target", "1.0", "--max-iterations", "2"]), 3);
    assert_eq!(with(&["--optimizer", "scripted"]), 2, "no script");
}

#[test]
fn optimize_llm_against_mock() {
    let server = MockServer::always(&proposal_json(&[Point2D::new(14.1875, 6.5625), Point2D::new(1.625, 1.875)]));
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(
        dir.path(),
        serde_json::json!({"llm": {"base_url": server.base_url, "max_retries": 1, "backoff_base_secs": 0.0}}),
    );
    let out = cli(&["optimize", "--config", s(&cfg), "--optimizer", "llm", "--out", s(dir.path()), "--run-id", "llm"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    assert!(dir.path().join("llm/llm.jsonl").exists());
    assert!(server.hits() >= 1);
}

#[test]
fn optimize_llm_unreachable_is_network_error() {
    let port = std::net::TcpListener::bind("127.0.0.1:0").unwrap().local_addr().unwrap().port();
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(
        dir.path(),
        serde_json::json!({"llm": {"base_url": format!("http://127.0.0.1:{port}/v1"), "max_retries": 1, "backoff_base_secs": 0.0}}),
    );
    let out = cli(&["optimize", "--config", s(&cfg), "--optimizer", "llm", "--out", s(dir.path()), "--run-id", "down"]);
    assert_eq!(code(&out), 4);
    assert!(dir.path().join("down/trace.jsonl").exists());
}

#[test]
fn config_errors_are_input_errors() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(dir.path(), serde_json::json!({"unknown_section": 1}));
    assert_eq!(code(&cli(&["optimize", "--config", s(&cfg)])), 2);
    assert_eq!(code(&cli(&["optimize", "--config", "/nonexistent.json"])), 2);
    assert_eq!(code(&cli(&["no-such-command"])), 2);
}

#[test]
fn joint_design_small_run() {
    let dir = tempfile::tempdir().unwrap();
    let out = cli(&["joint-design", "--seed", "0", "--candidates", "2", "--rounds", "1", "--out", s(dir.path()), "--run-id", "j"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    for f in ["rounds.jsonl", "trace.jsonl", "summary.txt", "heatmap.ppm", "plan.json"] {
        assert!(dir.path().join("j").join(f).exists(), "{f}");
    }
    let rounds = std::fs::read_to_string(dir.path().join("j/rounds.jsonl")).unwrap();
    assert_eq!(rounds.lines().count(), 2);
}

#[test]
fn reproduce_rejects_bad_target() {
    assert_eq!(code(&cli(&["reproduce", "case1", "--target", "1.01"])), 2);
    assert_eq!(code(&cli(&["reproduce", "case2", "--target", "0"])), 2);
}
