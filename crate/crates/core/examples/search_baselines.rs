//! Ant colony and simulated annealing on the same task, both seeded.
//!
//!     cargo run --release --example search_baselines [seed]

use indoor_planner::agents::office_radio;
use indoor_planner::optimizers::{aco_optimize, simulated_annealing_optimize, AcoParams, AnnealParams, PlanningTask};
use indoor_planner::scenarios::reference_office;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let seed = std::env::args().nth(1).map_or(Ok(0), |s| s.parse())?;
    let task = PlanningTask {
        radio: office_radio(),
        ..PlanningTask::new(reference_office(), 0.95, 80.0, 2, 200)
    };

    let aco = aco_optimize(&task, &AcoParams { seed, ..Default::default() })?;
    println!(
        "aco:    {} at iteration {}, best {:.4}",
        aco.outcome,
        aco.iterations(),
        aco.best_coverage()
    );

    let sa = simulated_annealing_optimize(&task, &AnnealParams { seed, ..Default::default() })?;
    println!(
        "anneal: {} at iteration {}, best {:.4}",
        sa.outcome,
        sa.iterations(),
        sa.best_coverage()
    );
    Ok(())
}
