use crate::geometry::{FloorPlan, Point2D};
use crate::propagation::{check_position, nearest_valid_position};

use super::driver::{Proposal, Proposer, ProposerError};
use super::task::PlanningTask;
use super::trace::Step;

/// Minimum gain, as a coverage fraction, for a move to count as progress.
pub const MIN_IMPROVEMENT: f64 = 0.005;

/// Deterministic perception-driven refinement.
///
/// Starts with one AP at the plan centroid. Afterwards it works from the best
/// deployment so far: when the previous step gained less than
/// [`MIN_IMPROVEMENT`] and the AP budget allows, it adds an AP at the worst
/// region's centroid; otherwise it moves the AP nearest that centroid half way
/// towards it. After `n` consecutive non-improving moves the target rotates to
/// the `n`-th worst region so a stalled search does not repeat itself.
#[derive(Debug, Clone, Default)]
pub struct GreedyProposer;

impl GreedyProposer {
    pub fn new() -> Self {
        Self
    }
}

/// Keeps valid positions as they are; relocates invalid ones.
fn snap(plan: &FloorPlan, p: Point2D) -> Point2D {
    if check_position(plan, &p).is_ok() {
        p
    } else {
        nearest_valid_position(plan, p).unwrap_or(p)
    }
}

/// Coverage of the best step among `steps`, 0 if none.
fn best_of(steps: &[Step]) -> Option<(usize, f64)> {
    let mut best: Option<(usize, f64)> = None;
    for (i, s) in steps.iter().enumerate() {
        if s.feedback.is_violation() {
            continue;
        }
        let c = s.feedback.coverage();
        if best.is_none_or(|(_, b)| c > b) {
            best = Some((i, c));
        }
    }
    best
}

impl Proposer for GreedyProposer {
    fn name(&self) -> &str {
        "greedy"
    }

    fn propose(&mut self, task: &PlanningTask, history: &[Step]) -> Result<Proposal, ProposerError> {
        let plan = &task.plan;
        let Some((best_idx, best_cov)) = best_of(history) else {
            return Ok(Proposal::Aps(vec![snap(plan, plan.centroid())]));
        };
        let best = &history[best_idx];
        let mut aps = best.deployment.aps.clone();
        let regions = &best.feedback.regions;
        if regions.is_empty() {
            return Ok(Proposal::Aps(aps));
        }

        let before = best_of(&history[..history.len() - 1]).map_or(0.0, |(_, c)| c);
        let gain = best_cov - before;
        // Steps since the best one was found, all of which failed to improve.
        let stalled = history.len() - 1 - best_idx;

        if aps.len() < task.max_aps && gain < MIN_IMPROVEMENT {
            aps.push(snap(plan, regions[0].centroid));
            return Ok(Proposal::Aps(aps));
        }

        let target = regions[stalled % regions.len()].centroid;
        let (mover, _) = aps
            .iter()
            .enumerate()
            .map(|(i, p)| (i, p.distance(&target)))
            .min_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)))
            .expect("best deployment has at least one ap");
        let from = aps[mover];
        let halfway = from.add(&target.sub(&from).scale(0.5));
        aps[mover] = snap(plan, halfway);
        Ok(Proposal::Aps(aps))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Rect;
    use crate::optimizers::trace::Feedback;
    use crate::propagation::{CoverageStats, Deployment, RadioConfig, RegionSummary};

    fn task(max_aps: usize) -> PlanningTask {
        let plan = FloorPlan::new(Rect::new(Point2D::new(0.0, 0.0), 20.0, 10.0));
        PlanningTask::new(plan, 0.95, 60.0, max_aps, 10)
    }

    fn step(aps: Vec<Point2D>, coverage: f64, worst: Point2D, iteration: usize) -> Step {
        Step {
            deployment: Deployment::new(aps, RadioConfig::default()),
            feedback: Feedback {
                iteration,
                stats: Some(CoverageStats {
                    coverage_fraction: coverage,
                    threshold: 60.0,
                    covered_cells: 0,
                    total_cells: 0,
                    worst_cell: worst,
                }),
                regions: vec![RegionSummary {
                    centroid: worst,
                    pathloss: 70.0,
                    cells: 10,
                }],
                violation: None,
            },
        }
    }

    #[test]
    fn first_call_places_centroid() {
        let p = GreedyProposer.propose(&task(2), &[]).unwrap();
        assert_eq!(p, Proposal::Aps(vec![Point2D::new(10.0, 5.0)]));
    }

    #[test]
    fn stalled_move_adds_ap_at_worst_region() {
        let corner = Point2D::new(19.5, 9.5);
        let history = vec![
            step(vec![Point2D::new(10.0, 5.0)], 0.80, corner, 1),
            step(vec![Point2D::new(14.75, 7.25)], 0.78, corner, 2),
        ];
        let p = GreedyProposer.propose(&task(2), &history).unwrap();
        assert_eq!(p, Proposal::Aps(vec![Point2D::new(10.0, 5.0), corner]));
    }

    #[test]
    fn improving_move_keeps_moving() {
        let corner = Point2D::new(19.0, 9.0);
        let history = vec![step(vec![Point2D::new(10.0, 5.0)], 0.80, corner, 1)];
        let p = GreedyProposer.propose(&task(2), &history).unwrap();
        assert_eq!(p, Proposal::Aps(vec![Point2D::new(14.5, 7.0)]));
    }

    #[test]
    fn full_budget_always_moves() {
        let corner = Point2D::new(19.0, 9.0);
        let history = vec![
            step(vec![Point2D::new(10.0, 5.0)], 0.80, corner, 1),
            step(vec![Point2D::new(14.5, 7.0)], 0.70, corner, 2),
        ];
        let p = GreedyProposer.propose(&task(1), &history).unwrap();
        let Proposal::Aps(aps) = p else { panic!() };
        assert_eq!(aps.len(), 1);
    }
}
