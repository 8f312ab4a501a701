use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::geometry::{FloorPlan, Point2D};
use crate::propagation::{check_position, nearest_valid_position, Deployment, SNAP_CLEARANCE};

use super::task::{PlanningTask, Scorer};
use super::trace::{Feedback, OptimizationTrace, Outcome, Step};
use super::OptimizeError;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AnnealParams {
    /// Starting temperature in coverage-fraction units; 0 gives hill climbing.
    pub initial_temperature: f64,
    /// Multiplicative cooling per iteration, in (0, 1).
    pub cooling_rate: f64,
    /// Standard deviation of the Gaussian move, meters.
    pub move_scale: f64,
    /// AP count; defaults to the task budget.
    pub n_aps: Option<usize>,
    pub seed: u64,
}

impl Default for AnnealParams {
    fn default() -> Self {
        Self {
            initial_temperature: 0.02,
            cooling_rate: 0.98,
            move_scale: 2.0,
            n_aps: None,
            seed: 0,
        }
    }
}

impl AnnealParams {
    pub fn validate(&self, task: &PlanningTask) -> Result<(), OptimizeError> {
        let bad = |m: String| Err(OptimizeError::InvalidParams(m));
        if !(self.initial_temperature >= 0.0 && self.initial_temperature.is_finite()) {
            return bad(format!("temperature must be >= 0 (got {})", self.initial_temperature));
        }
        if !(self.cooling_rate > 0.0 && self.cooling_rate < 1.0) {
            return bad(format!("cooling rate must be in (0, 1) (got {})", self.cooling_rate));
        }
        if !(self.move_scale > 0.0 && self.move_scale.is_finite()) {
            return bad(format!("move scale must be > 0 (got {})", self.move_scale));
        }
        if let Some(n) = self.n_aps {
            if n == 0 || n > task.max_aps {
                return bad(format!("n_aps must be in 1..={} (got {n})", task.max_aps));
            }
        }
        Ok(())
    }
}

/// Metropolis rule on coverage gain `delta` at temperature `t`, given a
/// uniform draw `u` in [0, 1).
pub fn metropolis_accept(delta: f64, t: f64, u: f64) -> bool {
    delta >= 0.0 || (t > 0.0 && u < (delta / t).exp())
}

fn clip_into(plan: &FloorPlan, p: Point2D) -> Point2D {
    let (lo, hi) = (plan.boundary.min(), plan.boundary.max());
    let m = SNAP_CLEARANCE;
    let q = Point2D::new(p.x.clamp(lo.x + m, hi.x - m), p.y.clamp(lo.y + m, hi.y - m));
    if check_position(plan, &q).is_ok() {
        q
    } else {
        nearest_valid_position(plan, q).unwrap_or(q)
    }
}

/// Annealing state machine; [`simulated_annealing_optimize`] drives it.
#[derive(Debug)]
pub struct Annealer<'a> {
    scorer: &'a Scorer,
    params: AnnealParams,
    rng: ChaCha8Rng,
    normal: Normal<f64>,
    temperature: f64,
    current: Vec<Point2D>,
    current_coverage: f64,
}

/// Outcome of one annealing move.
#[derive(Debug, Clone)]
pub struct AnnealMove {
    pub aps: Vec<Point2D>,
    pub feedback: Feedback,
    pub accepted: bool,
    /// Coverage of the current state after the acceptance decision.
    pub current_coverage: f64,
}

impl<'a> Annealer<'a> {
    pub fn new(task: &PlanningTask, scorer: &'a Scorer, params: AnnealParams) -> Result<Self, OptimizeError> {
        params.validate(task)?;
        let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
        let n = params.n_aps.unwrap_or(task.max_aps);
        let b = &task.plan.boundary;
        let start = (0..n)
            .map(|_| {
                let p = Point2D::new(
                    b.origin.x + rng.gen::<f64>() * b.width,
                    b.origin.y + rng.gen::<f64>() * b.depth,
                );
                clip_into(&task.plan, p)
            })
            .collect();
        Ok(Self {
            scorer,
            params,
            rng,
            normal: Normal::new(0.0, params.move_scale).expect("move scale checked"),
            temperature: params.initial_temperature,
            current: start,
            current_coverage: f64::NEG_INFINITY,
        })
    }

    pub fn temperature(&self) -> f64 {
        self.temperature
    }

    /// Evaluates the next candidate: the start state on the first call,
    /// afterwards a Gaussian move of one randomly chosen AP.
    pub fn step(&mut self, iteration: usize) -> AnnealMove {
        let candidate = if self.current_coverage == f64::NEG_INFINITY {
            self.current.clone()
        } else {
            let mut c = self.current.clone();
            let i = self.rng.gen_range(0..c.len());
            let dx = self.normal.sample(&mut self.rng);
            let dy = self.normal.sample(&mut self.rng);
            c[i] = clip_into(self.scorer.evaluator().plan(), Point2D::new(c[i].x + dx, c[i].y + dy));
            c
        };
        let feedback = self.scorer.feedback(iteration, &candidate);
        let u: f64 = self.rng.gen();
        let cov = if feedback.is_violation() {
            f64::NEG_INFINITY
        } else {
            feedback.coverage()
        };
        let accepted = if self.current_coverage == f64::NEG_INFINITY {
            true
        } else {
            cov.is_finite() && metropolis_accept(cov - self.current_coverage, self.temperature, u)
        };
        if accepted {
            self.current = candidate.clone();
            self.current_coverage = cov;
        }
        self.temperature *= self.params.cooling_rate;
        AnnealMove {
            aps: candidate,
            feedback,
            accepted,
            current_coverage: self.current_coverage,
        }
    }
}

/// Seeded simulated annealing over continuous AP positions.
pub fn simulated_annealing_optimize(
    task: &PlanningTask,
    params: &AnnealParams,
) -> Result<OptimizationTrace, OptimizeError> {
    let scorer = Scorer::new(task)?;
    let mut annealer = Annealer::new(task, &scorer, *params)?;
    let mut trace = OptimizationTrace::new(task.fingerprint());
    for iteration in 1..=task.max_iterations {
        let mv = annealer.step(iteration);
        let done = mv.feedback.coverage() >= task.coverage_target;
        trace.push(Step {
            deployment: Deployment::new(mv.aps, task.radio),
            feedback: mv.feedback,
        });
        if done {
            trace.outcome = Outcome::Converged;
            break;
        }
    }
    Ok(trace)
}
