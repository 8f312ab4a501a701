//! Desk-scale experiments behind `reproduce` and the acceptance suite.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::agents::{joint_design_pipeline, AgentError, Backends, JointDesignOutcome, JointDesignTask};
use crate::geometry::{FloorPlan, Point2D, Rect};
use crate::optimizers::{
    aco_optimize, brute_force_oracle, optimize_loop, simulated_annealing_optimize, AcoParams, AnnealParams,
    GreedyProposer, OptimizationTrace, OptimizeError, PlanningTask, Scorer,
};
use crate::propagation::RadioConfig;
use crate::scenarios::{complex_radio, reference_complex, reference_office};

/// One line of a pass/fail table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriterionResult {
    pub id: u8,
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl fmt::Display for CriterionResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "[{status}] {}. {}: {}", self.id, self.name, self.detail)
    }
}

/// Empty 20 x 10 m room, 1 AP, 1 m lattice: every baseline against the oracle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct OracleBenchmark {
    pub threshold: f64,
    pub lattice_spacing: f64,
    pub iterations: usize,
    pub tolerance: f64,
    pub seed: u64,
}

impl Default for OracleBenchmark {
    fn default() -> Self {
        Self {
            threshold: 60.0,
            lattice_spacing: 1.0,
            iterations: 200,
            tolerance: 0.01,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleReport {
    pub oracle: f64,
    pub aco: f64,
    pub anneal: f64,
    pub greedy: f64,
    pub tolerance: f64,
}

impl OracleBenchmark {
    pub fn task(&self) -> PlanningTask {
        let plan = FloorPlan::new(Rect::new(Point2D::new(0.0, 0.0), 20.0, 10.0));
        PlanningTask::new(plan, 1.0, self.threshold, 1, self.iterations)
    }

    pub fn run(&self) -> Result<OracleReport, OptimizeError> {
        let task = self.task();
        let oracle = brute_force_oracle(&task, self.lattice_spacing, 1)?.stats.coverage_fraction;
        let aco = aco_optimize(
            &task,
            &AcoParams {
                lattice_spacing: self.lattice_spacing,
                seed: self.seed,
                ..Default::default()
            },
        )?;
        let anneal = simulated_annealing_optimize(
            &task,
            &AnnealParams {
                seed: self.seed,
                ..Default::default()
            },
        )?;
        let greedy_task = PlanningTask {
            max_iterations: self.iterations.min(10),
            ..task.clone()
        };
        let greedy = optimize_loop(&greedy_task, &mut GreedyProposer::new(), &Scorer::new(&greedy_task)?)?;
        Ok(OracleReport {
            oracle,
            aco: aco.best_coverage(),
            anneal: anneal.best_coverage(),
            greedy: greedy.best_coverage(),
            tolerance: self.tolerance,
        })
    }
}

impl OracleReport {
    pub fn criterion(&self) -> CriterionResult {
        let ok = |c: f64| c >= self.oracle - self.tolerance;
        CriterionResult {
            id: 2,
            name: "oracle equivalence".into(),
            passed: ok(self.aco) && ok(self.anneal) && ok(self.greedy),
            detail: format!(
                "oracle {:.4}, aco {:.4}, anneal {:.4}, greedy {:.4} (tolerance {:.2})",
                self.oracle, self.aco, self.anneal, self.greedy, self.tolerance
            ),
        }
    }
}

/// Deployment in the reference complex: greedy proposer against ACO.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Case1Config {
    pub threshold: f64,
    pub coverage_target: f64,
    pub max_aps: usize,
    pub greedy_iterations: usize,
    pub aco_iterations: usize,
    pub cell_size: f64,
    pub radio: RadioConfig,
    pub aco: AcoParams,
    /// Required ratio of ACO to greedy iterations.
    pub min_ratio: f64,
}

impl Default for Case1Config {
    fn default() -> Self {
        Self {
            threshold: 110.0,
            coverage_target: 0.95,
            max_aps: 3,
            greedy_iterations: 10,
            aco_iterations: 1000,
            cell_size: crate::propagation::DEFAULT_CELL_SIZE,
            radio: complex_radio(),
            aco: AcoParams::default(),
            min_ratio: 10.0,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Case1Report {
    pub config: Case1Config,
    pub greedy: OptimizationTrace,
    pub aco: OptimizationTrace,
}

impl Case1Config {
    pub fn task(&self, max_iterations: usize) -> PlanningTask {
        PlanningTask {
            plan: reference_complex(),
            coverage_target: self.coverage_target,
            threshold: self.threshold,
            max_aps: self.max_aps,
            max_iterations,
            cell_size: self.cell_size,
            radio: self.radio,
        }
    }

    pub fn validate(&self) -> Result<(), OptimizeError> {
        self.task(self.greedy_iterations).validate()?;
        self.task(self.aco_iterations).validate()?;
        self.aco.validate()
    }

    pub fn run(&self) -> Result<Case1Report, OptimizeError> {
        self.validate()?;
        let task = self.task(self.greedy_iterations);
        let greedy = optimize_loop(&task, &mut GreedyProposer::new(), &Scorer::new(&task)?)?;
        let aco = aco_optimize(&self.task(self.aco_iterations), &self.aco)?;
        Ok(Case1Report {
            config: self.clone(),
            greedy,
            aco,
        })
    }
}

impl Case1Report {
    pub fn greedy_iterations(&self) -> Option<usize> {
        self.greedy.first_reaching(self.config.coverage_target)
    }

    pub fn aco_iterations(&self) -> Option<usize> {
        self.aco.first_reaching(self.config.coverage_target)
    }

    pub fn criterion(&self) -> CriterionResult {
        let target = self.config.coverage_target;
        let name = "case 1, informed proposer vs ACO".to_string();
        let Some(g) = self.greedy_iterations().filter(|&g| g <= 10) else {
            return CriterionResult {
                id: 4,
                name,
                passed: false,
                detail: format!(
                    "greedy did not reach {:.0}% within 10 iterations (best {:.4})",
                    100.0 * target,
                    self.greedy.best_coverage()
                ),
            };
        };
        // An ACO run that never reaches the target counts as one past its budget.
        let (a, reached) = match self.aco_iterations() {
            Some(a) => (a, true),
            None => (self.aco.iterations() + 1, false),
        };
        let ratio = a as f64 / g as f64;
        let aco_text = if reached {
            format!("ACO seed {} at iteration {a}", self.config.aco.seed)
        } else {
            format!("ACO seed {} not within {} iterations", self.config.aco.seed, self.aco.iterations())
        };
        CriterionResult {
            id: 4,
            name,
            passed: ratio >= self.config.min_ratio,
            detail: format!(
                "greedy reached {:.0}% at iteration {g}, {aco_text}; ratio {}{ratio:.1} (need >= {:.0})",
                100.0 * target,
                if reached { "" } else { ">= " },
                self.config.min_ratio
            ),
        }
    }
}

/// Joint design on the reference task against the fixed office baseline.
#[derive(Debug, Clone)]
pub struct Case2Report {
    pub baseline: FloorPlan,
    /// Fewest APs the oracle needs on the baseline, with that coverage;
    /// `None` if even `max_aps` falls short.
    pub baseline_aps: Option<(usize, f64)>,
    pub outcome: JointDesignOutcome,
    pub coverage_target: f64,
}

/// Lattice spacing of the baseline oracle.
pub const BASELINE_LATTICE: f64 = 1.0;

/// Smallest AP count for which the oracle reaches the target on `plan`.
pub fn oracle_ap_count(task: &PlanningTask, spacing: f64) -> Result<Option<(usize, f64)>, OptimizeError> {
    for k in 1..=task.max_aps {
        let r = brute_force_oracle(task, spacing, k)?;
        if r.stats.coverage_fraction >= task.coverage_target {
            return Ok(Some((k, r.stats.coverage_fraction)));
        }
    }
    Ok(None)
}

pub fn case2(task: &JointDesignTask, backends: &Backends) -> Result<Case2Report, AgentError> {
    task.validate()?;
    let baseline = reference_office();
    let baseline_aps = oracle_ap_count(&task.planning_task(baseline.clone()), BASELINE_LATTICE)?;
    let outcome = joint_design_pipeline(task, backends)?;
    Ok(Case2Report {
        baseline,
        baseline_aps,
        outcome,
        coverage_target: task.coverage_target,
    })
}

impl Case2Report {
    pub fn criterion(&self) -> CriterionResult {
        let s = &self.outcome.score;
        let name = "case 2, joint design vs fixed layout".to_string();
        let reached = s.coverage >= self.coverage_target;
        let (passed, baseline) = match self.baseline_aps {
            Some((k, cov)) => (reached && s.ap_count < k, format!("baseline needs {k} APs ({cov:.4})")),
            None => (reached, "baseline misses the target with every allowed AP count".into()),
        };
        CriterionResult {
            id: 5,
            name,
            passed,
            detail: format!(
                "best design {:.4} with {} APs (efficiency {:.4}); {baseline}",
                s.coverage, s.ap_count, s.iwn_efficiency
            ),
        }
    }

    pub fn monotone(&self) -> bool {
        self.outcome.best_overall_by_round().windows(2).all(|w| w[1] >= w[0])
    }
}

/// The efficiency fixture: 0.954 coverage with 2 APs.
pub fn efficiency_criterion() -> CriterionResult {
    let s = crate::agents::JointScore::new(0.954, 2, 1.0, 0.7, 0.3);
    CriterionResult {
        id: 6,
        name: "IWN efficiency arithmetic".into(),
        passed: s.iwn_efficiency == 0.954 / 2.0 && (s.iwn_efficiency - 0.477).abs() < 1e-12,
        detail: format!("0.954 with 2 APs -> {}", s.iwn_efficiency),
    }
}

