use std::sync::Arc;

use crate::geometry::{check_circulation, validate_plan, ArchitecturalRules, FloorPlan, Point2D};
use crate::llm::{Completion, LlmProposer};
use crate::optimizers::{
    aco_optimize, optimize_loop, simulated_annealing_optimize, AcoParams, AnnealParams, GreedyProposer,
    OptimizationTrace, Outcome, PlanningTask, Scorer, ScriptedProposer,
};
use crate::propagation::{check_position, nearest_valid_position, Deployment};

use super::AgentError;

/// How the network design agent searches for a deployment.
#[derive(Clone, Default)]
pub enum IwnBackend {
    #[default]
    Greedy,
    Aco(AcoParams),
    Anneal(AnnealParams),
    Scripted(Vec<Vec<Point2D>>),
    Llm {
        client: Arc<dyn Completion>,
        knowledge: String,
    },
}

impl std::fmt::Debug for IwnBackend {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            IwnBackend::Greedy => f.write_str("Greedy"),
            IwnBackend::Aco(p) => f.debug_tuple("Aco").field(p).finish(),
            IwnBackend::Anneal(p) => f.debug_tuple("Anneal").field(p).finish(),
            IwnBackend::Scripted(s) => f.debug_tuple("Scripted").field(s).finish(),
            IwnBackend::Llm { .. } => f.write_str("Llm"),
        }
    }
}

/// Rejects plans that break `rules` or have no circulation.
pub fn gate(plan: &FloorPlan, rules: &ArchitecturalRules) -> Result<(), AgentError> {
    let v = validate_plan(plan, Some(rules));
    if !v.is_empty() {
        return Err(AgentError::InvalidLayout(
            v.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "),
        ));
    }
    if !check_circulation(plan, rules.circulation_step).unwrap_or(false) {
        return Err(AgentError::InvalidLayout("no circulation from the entrance".into()));
    }
    Ok(())
}

/// Runs the configured optimizer on `plan` with the objectives of `planning`.
///
/// The AP budget is raised one at a time from 1 to `planning.max_aps`, and
/// the trace of the first budget that reaches the target is returned (the
/// last one otherwise), so the design uses as few APs as the optimizer can
/// manage. Search backends then spend the full iteration budget at that AP
/// count on raising coverage further; the refined trace replaces the first
/// one if it does better.
pub fn iwn_design_agent(
    plan: &FloorPlan,
    planning: &PlanningTask,
    backend: &IwnBackend,
) -> Result<OptimizationTrace, AgentError> {
    let mut last = None;
    for budget in 1..=planning.max_aps.max(1) {
        let task = PlanningTask {
            plan: plan.clone(),
            max_aps: budget,
            ..planning.clone()
        };
        let trace = run_backend(&task, backend)?;
        if trace.outcome == Outcome::Converged {
            if matches!(backend, IwnBackend::Scripted(_) | IwnBackend::Llm { .. }) || trace.best_coverage() >= 1.0 {
                return Ok(trace);
            }
            let refine = PlanningTask {
                coverage_target: 1.0,
                ..task
            };
            let refined = run_backend(&refine, backend)?;
            return Ok(if refined.best_coverage() > trace.best_coverage() { refined } else { trace });
        }
        last = Some(trace);
    }
    Ok(last.expect("at least one budget"))
}

fn run_backend(task: &PlanningTask, backend: &IwnBackend) -> Result<OptimizationTrace, AgentError> {
    let trace = match backend {
        IwnBackend::Greedy => optimize_loop(task, &mut GreedyProposer::new(), &Scorer::new(task)?)?,
        IwnBackend::Aco(p) => aco_optimize(task, p)?,
        IwnBackend::Anneal(p) => simulated_annealing_optimize(
            task,
            &AnnealParams {
                n_aps: p.n_aps.map(|n| n.min(task.max_aps)),
                ..*p
            },
        )?,
        IwnBackend::Scripted(script) => {
            let mut proposer = ScriptedProposer::new(script.clone())?;
            optimize_loop(task, &mut proposer, &Scorer::new(task)?)?
        }
        IwnBackend::Llm { client, knowledge } => {
            let mut proposer = LlmProposer::new(client.clone(), knowledge.clone());
            optimize_loop(task, &mut proposer, &Scorer::new(task)?)?
        }
    };
    Ok(trace)
}

/// Moves APs that sit outside the boundary or on a wall to the nearest
/// valid lattice position; valid APs are kept as they are.
pub fn correction_agent(plan: &FloorPlan, deployment: &Deployment) -> Result<Deployment, AgentError> {
    let aps = deployment
        .aps
        .iter()
        .map(|p| {
            if check_position(plan, p).is_ok() {
                Ok(*p)
            } else {
                nearest_valid_position(plan, *p).ok_or(AgentError::NoValidPosition)
            }
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Deployment::new(aps, deployment.config))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Rect;
    use crate::propagation::SNAP_CLEARANCE;

    fn office() -> FloorPlan {
        let mut plan = FloorPlan::new(Rect::new(Point2D::new(0.0, 0.0), 20.0, 10.0));
        plan.add_material("concrete", 12.0);
        plan.add_outer_walls("concrete", 0.2);
        plan.add_wall(Point2D::new(10.0, 0.0), Point2D::new(10.0, 6.0), "concrete", 0.2);
        plan
    }

    fn dep(aps: Vec<Point2D>) -> Deployment {
        Deployment::new(aps, Default::default())
    }

    #[test]
    fn valid_is_identity() {
        let d = dep(vec![Point2D::new(3.3, 4.4)]);
        assert_eq!(correction_agent(&office(), &d).unwrap(), d);
    }

    #[test]
    fn outside_east_boundary() {
        let d = dep(vec![Point2D::new(20.2, 5.0)]);
        let out = correction_agent(&office(), &d).unwrap();
        let p = out.aps[0];
        assert!((p.x - (20.0 - SNAP_CLEARANCE)).abs() < 1e-9 && (p.y - 5.0).abs() < 1e-9, "{p}");
    }

    #[test]
    fn on_wall_moves_off() {
        let plan = office();
        let d = dep(vec![Point2D::new(10.0, 3.0)]);
        let out = correction_agent(&plan, &d).unwrap();
        let p = out.aps[0];
        assert!((p.x - 10.0).abs() >= SNAP_CLEARANCE - 1e-9);
        assert!(out.check(&plan, None).is_ok());
        assert_eq!(correction_agent(&plan, &out).unwrap(), out);
    }

    #[test]
    fn one_iteration_scripted() {
        let plan = office();
        let t = PlanningTask::new(plan.clone(), 0.999, 40.0, 1, 1);
        let backend = IwnBackend::Scripted(vec![vec![Point2D::new(5.0, 5.0)]]);
        let trace = iwn_design_agent(&plan, &t, &backend).unwrap();
        assert_eq!(trace.steps.len(), 1);
    }
}
