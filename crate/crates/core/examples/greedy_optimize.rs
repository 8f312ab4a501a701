//! The rule-based proposer in the propose/evaluate loop.
//!
//!     cargo run --example greedy_optimize

use indoor_planner::agents::office_radio;
use indoor_planner::optimizers::{optimize_loop, GreedyProposer, PlanningTask, Scorer};
use indoor_planner::scenarios::reference_office;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let task = PlanningTask {
        radio: office_radio(),
        ..PlanningTask::new(reference_office(), 0.95, 80.0, 2, 10)
    };
    let trace = optimize_loop(&task, &mut GreedyProposer::new(), &Scorer::new(&task)?)?;
    for r in trace.records() {
        let aps: Vec<String> = r.aps.iter().map(|p| format!("({:.2}, {:.2})", p.x, p.y)).collect();
        println!("{:>2}  {:.4}  {}", r.iteration, r.coverage, aps.join(" "));
    }
    println!("{} after {} iterations", trace.outcome, trace.iterations());
    Ok(())
}
