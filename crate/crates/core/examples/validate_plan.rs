//! Loads the shipped office plan, checks it against the architectural rules,
//! then breaks it on purpose.
//!
//!     cargo run --example validate_plan

use indoor_planner::geometry::{validate_plan, ArchitecturalRules, FloorPlan, Point2D};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/data/reference_office.json");
    let mut plan = FloorPlan::load(path)?;
    println!(
        "{}: {} walls, {} openings, {} rooms",
        path,
        plan.walls.len(),
        plan.openings.len(),
        plan.rooms.len()
    );

    let rules = ArchitecturalRules::default();
    let violations = validate_plan(&plan, Some(&rules));
    println!("violations with default rules: {}", violations.len());

    // A wall poking out of the building.
    plan.add_wall(Point2D::new(18.0, 5.0), Point2D::new(22.0, 5.0), "concrete", 0.2);
    for v in validate_plan(&plan, Some(&rules)) {
        println!("  {v}");
    }
    Ok(())
}
