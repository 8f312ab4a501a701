//! Joint design against the fixed office layout.
//!
//!     cargo run --release --example reproduce_case2

use indoor_planner::agents::{Backends, JointDesignTask};
use indoor_planner::experiments::{case2, efficiency_criterion};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let report = case2(&JointDesignTask::default(), &Backends::default())?;
    println!("{}", report.criterion());
    println!("best overall by round: {:?}", report.outcome.best_overall_by_round());
    println!("{}", efficiency_criterion());
    Ok(())
}
