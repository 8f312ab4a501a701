use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::geometry::Point2D;
use crate::propagation::{placement_lattice, Deployment};

use super::candidates::CandidateCoverage;
use super::task::{PlanningTask, Scorer};
use super::trace::{OptimizationTrace, Outcome, Step};
use super::OptimizeError;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AcoParams {
    pub n_ants: usize,
    /// Pheromone exponent.
    pub alpha: f64,
    /// Heuristic exponent; the heuristic is uniform, so this has no effect
    /// unless a caller supplies one.
    pub beta: f64,
    /// Evaporation rate in (0, 1).
    pub rho: f64,
    pub lattice_spacing: f64,
    pub initial_pheromone: f64,
    pub seed: u64,
}

impl Default for AcoParams {
    fn default() -> Self {
        Self {
            n_ants: 20,
            alpha: 1.0,
            beta: 0.0,
            rho: 0.1,
            lattice_spacing: 1.0,
            initial_pheromone: 1.0,
            seed: 0,
        }
    }
}

impl AcoParams {
    pub fn validate(&self) -> Result<(), OptimizeError> {
        let bad = |m: String| Err(OptimizeError::InvalidParams(m));
        if self.n_ants == 0 {
            return bad("n_ants must be >= 1".into());
        }
        if !(self.rho > 0.0 && self.rho < 1.0) {
            return bad(format!("rho must be in (0, 1) (got {})", self.rho));
        }
        if !(self.lattice_spacing > 0.0) {
            return bad("lattice spacing must be > 0".into());
        }
        if !(self.initial_pheromone > 0.0) {
            return bad("initial pheromone must be > 0".into());
        }
        if !(self.alpha.is_finite() && self.beta.is_finite()) {
            return bad("alpha and beta must be finite".into());
        }
        Ok(())
    }
}

/// Draws `k` distinct candidates, each with probability proportional to
/// `pheromone^alpha * heuristic^beta` among those not yet taken.
fn construct(rng: &mut ChaCha8Rng, weights: &[f64], k: usize) -> Vec<usize> {
    let mut taken = vec![false; weights.len()];
    let mut chosen = Vec::with_capacity(k);
    for _ in 0..k.min(weights.len()) {
        let total: f64 = weights
            .iter()
            .zip(&taken)
            .filter(|(_, t)| !**t)
            .map(|(w, _)| *w)
            .sum();
        let mut r = rng.gen::<f64>() * total;
        let mut pick = None;
        for (i, w) in weights.iter().enumerate() {
            if taken[i] {
                continue;
            }
            pick = Some(i);
            if r < *w {
                break;
            }
            r -= w;
        }
        let i = pick.expect("at least one free candidate");
        taken[i] = true;
        chosen.push(i);
    }
    chosen.sort_unstable();
    chosen
}

/// Ant colony search over a placement lattice with a fixed AP budget.
///
/// Each iteration records the colony's best ant; the run stops early once
/// the coverage target is met.
pub fn aco_optimize(task: &PlanningTask, params: &AcoParams) -> Result<OptimizationTrace, OptimizeError> {
    params.validate()?;
    let scorer = Scorer::new(task)?;
    let lattice = placement_lattice(&task.plan, params.lattice_spacing);
    if lattice.is_empty() {
        return Err(OptimizeError::InvalidParams("placement lattice has no valid position".into()));
    }
    let cov = CandidateCoverage::build(scorer.evaluator(), task.threshold, lattice);
    aco_with_candidates(task, params, &scorer, &cov)
}

pub(crate) fn aco_with_candidates(
    task: &PlanningTask,
    params: &AcoParams,
    scorer: &Scorer,
    cov: &CandidateCoverage,
) -> Result<OptimizationTrace, OptimizeError> {
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let heuristic = 1.0_f64;
    let mut pheromone = vec![params.initial_pheromone; cov.len()];
    let mut trace = OptimizationTrace::new(task.fingerprint());

    for iteration in 1..=task.max_iterations {
        let weights: Vec<f64> = pheromone
            .iter()
            .map(|t| t.powf(params.alpha) * heuristic.powf(params.beta))
            .collect();
        let ants: Vec<(Vec<usize>, usize)> = (0..params.n_ants)
            .map(|_| {
                let chosen = construct(&mut rng, &weights, task.max_aps);
                let covered = cov.covered(&chosen);
                (chosen, covered)
            })
            .collect();

        for t in pheromone.iter_mut() {
            *t *= 1.0 - params.rho;
        }
        for (chosen, covered) in &ants {
            let deposit = *covered as f64 / cov.cells() as f64;
            for &c in chosen {
                pheromone[c] += deposit;
            }
        }

        // Iteration best: most cells covered, then lexicographic positions.
        let positions = |chosen: &[usize]| -> Vec<Point2D> { chosen.iter().map(|&c| cov.positions[c]).collect() };
        let (best_chosen, _) = ants
            .iter()
            .max_by(|a, b| {
                a.1.cmp(&b.1).then_with(|| {
                    let (pa, pb) = (positions(&a.0), positions(&b.0));
                    lex_cmp_points(&pb, &pa)
                })
            })
            .expect("n_ants >= 1");
        let aps = positions(best_chosen);
        let feedback = scorer.feedback(iteration, &aps);
        let done = feedback.coverage() >= task.coverage_target;
        trace.push(Step {
            deployment: Deployment::new(aps, task.radio),
            feedback,
        });
        if done {
            trace.outcome = Outcome::Converged;
            break;
        }
    }
    Ok(trace)
}

pub(crate) fn lex_cmp_points(a: &[Point2D], b: &[Point2D]) -> std::cmp::Ordering {
    for (p, q) in a.iter().zip(b) {
        let o = p.lex_cmp(q);
        if o.is_ne() {
            return o;
        }
    }
    a.len().cmp(&b.len())
}
