use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::geometry::{FloorPlan, Point2D, Segment, SpatialIndex};

use super::model::RadioConfig;
use super::PropagationError;

/// Minimum AP-to-wall distance, meters.
pub const WALL_CLEARANCE: f64 = 1e-3;
pub const DEFAULT_CELL_SIZE: f64 = 0.25;
const INDEX_BIN_SIZE: f64 = 2.0;

/// A set of AP positions sharing one radio configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Deployment {
    pub aps: Vec<Point2D>,
    pub config: RadioConfig,
}

impl Deployment {
    pub fn new(aps: Vec<Point2D>, config: RadioConfig) -> Self {
        Self { aps, config }
    }

    /// Checks the deployment invariants against `plan`; `max_aps` is the task budget.
    pub fn check(&self, plan: &FloorPlan, max_aps: Option<usize>) -> Result<(), String> {
        check_aps(plan, &self.aps, max_aps)
    }
}

/// Returns a human-readable reason for the first AP invariant that fails.
pub fn check_aps(plan: &FloorPlan, aps: &[Point2D], max_aps: Option<usize>) -> Result<(), String> {
    if aps.is_empty() {
        return Err("no aps proposed".into());
    }
    if let Some(max) = max_aps {
        if aps.len() > max {
            return Err(format!("too many aps ({} > {max})", aps.len()));
        }
    }
    for (i, ap) in aps.iter().enumerate() {
        check_position(plan, ap).map_err(|e| format!("ap {i} {e}"))?;
    }
    Ok(())
}

/// Single-position part of [`check_aps`].
pub fn check_position(plan: &FloorPlan, p: &Point2D) -> Result<(), String> {
    if !p.is_finite() {
        return Err("has non-finite coordinates".into());
    }
    if !plan.boundary.strictly_contains(p) {
        return Err("outside boundary".into());
    }
    if let Some(w) = plan
        .walls
        .iter()
        .position(|w| w.segment().distance_to_point(p) <= WALL_CLEARANCE)
    {
        return Err(format!("on wall {w}"));
    }
    Ok(())
}

/// Best-server pathloss raster over the plan boundary.
///
/// `values` is row-major with row 0 along the southern (minimum y) edge.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoverageGrid {
    pub origin: Point2D,
    pub cell_size: f64,
    pub ncols: usize,
    pub nrows: usize,
    pub values: Vec<f64>,
}

impl CoverageGrid {
    pub fn cell_center(&self, col: usize, row: usize) -> Point2D {
        Point2D::new(
            self.origin.x + (col as f64 + 0.5) * self.cell_size,
            self.origin.y + (row as f64 + 0.5) * self.cell_size,
        )
    }

    pub fn value(&self, col: usize, row: usize) -> f64 {
        self.values[row * self.ncols + col]
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

fn grid_dims(plan: &FloorPlan, cell_size: f64) -> Result<(usize, usize), PropagationError> {
    if !(cell_size > 0.0 && cell_size.is_finite()) {
        return Err(PropagationError::InvalidCellSize(cell_size));
    }
    let fit = |len: f64| {
        let n = (len / cell_size).round();
        ((n * cell_size - len).abs() <= 1e-6 && n >= 1.0).then_some(n as usize)
    };
    match (fit(plan.boundary.width), fit(plan.boundary.depth)) {
        (Some(c), Some(r)) => Ok((c, r)),
        _ => Err(PropagationError::InvalidCellSize(cell_size)),
    }
}

/// Reusable grid evaluator: holds the plan, its spatial index, the radio
/// configuration and the cell layout.
#[derive(Debug, Clone)]
pub struct Evaluator {
    plan: FloorPlan,
    index: SpatialIndex,
    config: RadioConfig,
    cell_size: f64,
    ncols: usize,
    nrows: usize,
    centers: Vec<Point2D>,
}

impl Evaluator {
    pub fn new(plan: &FloorPlan, config: RadioConfig, cell_size: f64) -> Result<Self, PropagationError> {
        config.validate()?;
        let (ncols, nrows) = grid_dims(plan, cell_size)?;
        let o = plan.boundary.origin;
        let centers = (0..nrows)
            .flat_map(|r| {
                (0..ncols).map(move |c| {
                    Point2D::new(
                        o.x + (c as f64 + 0.5) * cell_size,
                        o.y + (r as f64 + 0.5) * cell_size,
                    )
                })
            })
            .collect();
        Ok(Self {
            plan: plan.clone(),
            index: SpatialIndex::build(plan, INDEX_BIN_SIZE),
            config,
            cell_size,
            ncols,
            nrows,
            centers,
        })
    }

    pub fn plan(&self) -> &FloorPlan {
        &self.plan
    }

    pub fn config(&self) -> &RadioConfig {
        &self.config
    }

    pub fn cell_size(&self) -> f64 {
        self.cell_size
    }

    pub fn cell_count(&self) -> usize {
        self.centers.len()
    }

    pub fn cell_centers(&self) -> &[Point2D] {
        &self.centers
    }

    /// Indexed multi-wall pathloss; equal to [`super::pathloss`].
    pub fn pathloss(&self, tx: Point2D, rx: Point2D) -> f64 {
        self.config.distance_loss(tx.distance(&rx)) + self.index.crossing_loss(&Segment::new(tx, rx))
    }

    /// Pathloss from one AP to every cell centre, row-major.
    pub fn ap_map(&self, ap: Point2D) -> Vec<f64> {
        self.centers.par_iter().map(|c| self.pathloss(ap, *c)).collect()
    }

    /// Combines per-AP maps into a best-server grid.
    pub fn grid_from_maps(&self, maps: &[&[f64]]) -> CoverageGrid {
        let mut values = vec![f64::INFINITY; self.centers.len()];
        for m in maps {
            for (v, x) in values.iter_mut().zip(m.iter()) {
                if *x < *v {
                    *v = *x;
                }
            }
        }
        self.wrap(values)
    }

    fn wrap(&self, values: Vec<f64>) -> CoverageGrid {
        CoverageGrid {
            origin: self.plan.boundary.origin,
            cell_size: self.cell_size,
            ncols: self.ncols,
            nrows: self.nrows,
            values,
        }
    }

    /// Best-server grid for a set of APs, after checking the AP invariants.
    pub fn grid(&self, aps: &[Point2D]) -> Result<CoverageGrid, PropagationError> {
        check_aps(&self.plan, aps, None).map_err(PropagationError::InvalidDeployment)?;
        let values = self
            .centers
            .par_iter()
            .map(|c| {
                aps.iter()
                    .map(|ap| self.pathloss(*ap, *c))
                    .fold(f64::INFINITY, f64::min)
            })
            .collect();
        Ok(self.wrap(values))
    }
}

/// Best-server pathloss grid for a deployment over the plan boundary.
pub fn compute_grid(
    plan: &FloorPlan,
    deployment: &Deployment,
    cell_size: f64,
) -> Result<CoverageGrid, PropagationError> {
    Evaluator::new(plan, deployment.config, cell_size)?.grid(&deployment.aps)
}
