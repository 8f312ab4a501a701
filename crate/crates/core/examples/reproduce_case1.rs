//! The informed proposer against ant colony search in the three-wing
//! complex, plus the oracle benchmark on an empty room.
//!
//!     cargo run --release --example reproduce_case1 [aco-seed]

use indoor_planner::experiments::{Case1Config, OracleBenchmark};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut config = Case1Config::default();
    if let Some(seed) = std::env::args().nth(1) {
        config.aco.seed = seed.parse()?;
    }
    println!("{}", OracleBenchmark::default().run()?.criterion());
    let report = config.run()?;
    println!("greedy first reaches the target at {:?}", report.greedy_iterations());
    println!("aco first reaches the target at {:?}", report.aco_iterations());
    println!("{}", report.criterion());
    Ok(())
}
