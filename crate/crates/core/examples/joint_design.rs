//! Joint room layout and AP design with the rule backends, round by round.
//!
//!     cargo run --release --example joint_design

use indoor_planner::agents::{joint_design_pipeline, Backends, JointDesignTask};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let task = JointDesignTask::default();
    let out = joint_design_pipeline(&task, &Backends::default())?;
    for r in &out.rounds {
        println!("round {}: best overall so far {:.4}", r.round, r.best_overall);
        for c in &r.candidates {
            println!(
                "  {} {:<10} gate {:<5} coverage {:.4} with {} APs, rationality {:.2}",
                c.candidate, c.provenance, c.passed_gate, c.score.coverage, c.score.ap_count, c.score.rationality
            );
        }
    }
    let s = out.score;
    println!(
        "winner: round {} candidate {}, {:.4} coverage with {} APs (efficiency {:.4})",
        out.origin.0, out.origin.1, s.coverage, s.ap_count, s.iwn_efficiency
    );
    for room in &out.best.plan.rooms {
        println!("  room {} at ({}, {}) {} x {}", room.label, room.origin.x, room.origin.y, room.width, room.depth);
    }
    Ok(())
}
