//! Coverage of a fixed two-AP deployment in the office, with the worst
//! regions and a PPM heatmap.
//!
//!     cargo run --example evaluate_coverage [out.ppm]

use indoor_planner::agents::office_radio;
use indoor_planner::geometry::Point2D;
use indoor_planner::propagation::{compute_grid, coverage_fraction, export_heatmap, worst_regions, Deployment};
use indoor_planner::scenarios::reference_office;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let plan = reference_office();
    let threshold = 80.0;
    let deployment = Deployment::new(vec![Point2D::new(5.0, 5.0), Point2D::new(15.0, 5.0)], office_radio());
    let grid = compute_grid(&plan, &deployment, 0.25)?;

    let stats = coverage_fraction(&grid, threshold);
    println!(
        "coverage {:.4} ({} of {} cells below {threshold} dB)",
        stats.coverage_fraction, stats.covered_cells, stats.total_cells
    );
    println!("worst cell at ({:.2}, {:.2})", stats.worst_cell.x, stats.worst_cell.y);
    for r in worst_regions(&grid, threshold, 3) {
        println!("  uncovered region: {r:?}");
    }

    let out = std::env::args()
        .nth(1)
        .unwrap_or_else(|| std::env::temp_dir().join("office.ppm").display().to_string());
    export_heatmap(&grid, threshold, &out)?;
    println!("heatmap written to {out}");
    Ok(())
}
