//! Exhaustive search over a 1 m lattice, for one and two APs.
//!
//!     cargo run --release --example oracle

use indoor_planner::agents::office_radio;
use indoor_planner::optimizers::{brute_force_oracle, PlanningTask};
use indoor_planner::scenarios::reference_office;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let task = PlanningTask {
        radio: office_radio(),
        ..PlanningTask::new(reference_office(), 0.95, 80.0, 2, 1)
    };
    for k in 1..=2 {
        let r = brute_force_oracle(&task, 1.0, k)?;
        let aps: Vec<String> = r.deployment.aps.iter().map(|p| format!("({}, {})", p.x, p.y)).collect();
        println!(
            "k={k}: coverage {:.4} at {} ({} subsets)",
            r.stats.coverage_fraction,
            aps.join(" "),
            r.evaluated
        );
    }
    Ok(())
}
