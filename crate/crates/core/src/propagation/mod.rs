//! Multi-wall pathloss evaluator, coverage grids and heatmap export.

mod grid;
pub mod heatmap;
mod model;
mod placement;
mod stats;

use thiserror::Error;

pub use grid::{
    check_aps, check_position, compute_grid, CoverageGrid, Deployment, Evaluator, DEFAULT_CELL_SIZE,
    WALL_CLEARANCE,
};
pub use heatmap::export_heatmap;
pub use model::{pathloss, RadioConfig};
pub use placement::{nearest_valid_position, placement_lattice, SNAP_CLEARANCE, SNAP_STEP};
pub use stats::{coverage_fraction, worst_regions, CoverageStats, RegionSummary, DEFAULT_TOP_K};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PropagationError {
    #[error("invalid deployment: {0}")]
    InvalidDeployment(String),
    #[error("cell size {0} does not tile the plan boundary")]
    InvalidCellSize(f64),
    #[error("invalid radio config: {0}")]
    InvalidConfig(String),
}
