use serde::{Deserialize, Serialize};

use crate::geometry::{FloorPlan, Point2D};
use crate::propagation::{
    coverage_fraction, worst_regions, Evaluator, RadioConfig, DEFAULT_CELL_SIZE, DEFAULT_TOP_K,
};

use super::trace::Feedback;
use super::OptimizeError;

/// Objectives and constraints of one AP planning run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlanningTask {
    pub plan: FloorPlan,
    /// Required covered share of cells, in (0, 1].
    pub coverage_target: f64,
    /// Pathloss threshold, dB; a cell is covered when strictly below it.
    pub threshold: f64,
    pub max_aps: usize,
    pub max_iterations: usize,
    pub cell_size: f64,
    pub radio: RadioConfig,
}

impl PlanningTask {
    pub fn new(plan: FloorPlan, coverage_target: f64, threshold: f64, max_aps: usize, max_iterations: usize) -> Self {
        Self {
            plan,
            coverage_target,
            threshold,
            max_aps,
            max_iterations,
            cell_size: DEFAULT_CELL_SIZE,
            radio: RadioConfig::default(),
        }
    }

    pub fn validate(&self) -> Result<(), OptimizeError> {
        let bad = |m: String| Err(OptimizeError::InvalidTask(m));
        if !(self.coverage_target > 0.0 && self.coverage_target <= 1.0) {
            return bad(format!("coverage target must be in (0, 1] (got {})", self.coverage_target));
        }
        if !self.threshold.is_finite() {
            return bad("threshold must be finite".into());
        }
        if self.max_aps == 0 {
            return bad("max_aps must be >= 1".into());
        }
        if self.max_iterations == 0 {
            return bad("max_iterations must be >= 1".into());
        }
        self.radio
            .validate()
            .map_err(|e| OptimizeError::InvalidTask(e.to_string()))
    }

    /// Short content hash identifying the task in traces.
    pub fn fingerprint(&self) -> String {
        crate::fingerprint(&serde_json::to_vec(self).expect("task serializes"))
    }

    pub fn evaluator(&self) -> Result<Evaluator, OptimizeError> {
        Ok(Evaluator::new(&self.plan, self.radio, self.cell_size)?)
    }
}

/// Turns AP lists into [`Feedback`] for one task.
#[derive(Debug, Clone)]
pub struct Scorer {
    evaluator: Evaluator,
    threshold: f64,
    max_aps: usize,
    top_k: usize,
}

impl Scorer {
    pub fn new(task: &PlanningTask) -> Result<Self, OptimizeError> {
        task.validate()?;
        Ok(Self {
            evaluator: task.evaluator()?,
            threshold: task.threshold,
            max_aps: task.max_aps,
            top_k: DEFAULT_TOP_K,
        })
    }

    pub fn with_top_k(mut self, k: usize) -> Self {
        self.top_k = k;
        self
    }

    pub fn evaluator(&self) -> &Evaluator {
        &self.evaluator
    }

    pub fn threshold(&self) -> f64 {
        self.threshold
    }

    /// Evaluates `aps`; invariant breaches yield a violation feedback.
    pub fn feedback(&self, iteration: usize, aps: &[Point2D]) -> Feedback {
        if let Err(reason) = crate::propagation::check_aps(self.evaluator.plan(), aps, Some(self.max_aps)) {
            return Feedback::violation(iteration, reason);
        }
        let grid = self
            .evaluator
            .grid(aps)
            .expect("aps were checked against the plan");
        Feedback {
            iteration,
            stats: Some(coverage_fraction(&grid, self.threshold)),
            regions: worst_regions(&grid, self.threshold, self.top_k),
            violation: None,
        }
    }
}
