use std::path::{Path, PathBuf};

use indoor_planner::agents::JointDesignTask;
use indoor_planner::cli::RunConfig;
use indoor_planner::geometry::{validate_plan, FloorPlan};
use indoor_planner::scenarios::{reference_complex, reference_office};

fn data(rel: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("data").join(rel)
}

#[test]
fn shipped_plans_match_scenarios() {
    assert_eq!(FloorPlan::load(data("reference_office.json")).unwrap(), reference_office());
    assert_eq!(FloorPlan::load(data("reference_complex.json")).unwrap(), reference_complex());
}

#[test]
fn shipped_plans_are_valid() {
    for plan in [reference_office(), reference_complex()] {
        assert!(validate_plan(&plan, None).is_empty());
    }
}

#[test]
fn shipped_configs_load() {
    let office = RunConfig::load(&data("configs/office.json")).unwrap();
    assert_eq!(office.plan.as_deref().map(FloorPlan::load).unwrap().unwrap(), reference_office());
    assert_eq!(office.radio, indoor_planner::agents::office_radio());
    let joint = RunConfig::load(&data("configs/joint_design.json")).unwrap();
    assert_eq!(joint.joint, JointDesignTask::default());
    assert_eq!(joint.seed, Some(0));
}
