use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::geometry::Point2D;
use crate::propagation::{CoverageStats, Deployment, RegionSummary};

/// Evaluator output for one proposal: the perception channel.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Feedback {
    pub iteration: usize,
    /// Absent when the proposal was rejected.
    pub stats: Option<CoverageStats>,
    pub regions: Vec<RegionSummary>,
    pub violation: Option<String>,
}

impl Feedback {
    pub fn violation(iteration: usize, reason: impl Into<String>) -> Self {
        Self {
            iteration,
            stats: None,
            regions: Vec::new(),
            violation: Some(reason.into()),
        }
    }

    /// Coverage fraction, 0 for rejected proposals.
    pub fn coverage(&self) -> f64 {
        self.stats.as_ref().map_or(0.0, |s| s.coverage_fraction)
    }

    pub fn is_violation(&self) -> bool {
        self.violation.is_some()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Step {
    pub deployment: Deployment,
    pub feedback: Feedback,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Outcome {
    Converged,
    Exhausted,
}

impl std::fmt::Display for Outcome {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Outcome::Converged => "converged",
            Outcome::Exhausted => "exhausted",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizationTrace {
    pub task_fingerprint: String,
    pub steps: Vec<Step>,
    pub outcome: Outcome,
    /// Index of the best step: highest coverage, earliest on ties. `None`
    /// if every step was rejected.
    pub best: Option<usize>,
}

impl OptimizationTrace {
    pub fn new(task_fingerprint: String) -> Self {
        Self {
            task_fingerprint,
            steps: Vec::new(),
            outcome: Outcome::Exhausted,
            best: None,
        }
    }

    pub fn push(&mut self, step: Step) {
        let improves = !step.feedback.is_violation()
            && match self.best {
                None => true,
                Some(b) => step.feedback.coverage() > self.steps[b].feedback.coverage(),
            };
        self.steps.push(step);
        if improves {
            self.best = Some(self.steps.len() - 1);
        }
    }

    pub fn best_step(&self) -> Option<&Step> {
        self.best.map(|b| &self.steps[b])
    }

    pub fn best_coverage(&self) -> f64 {
        self.best_step().map_or(0.0, |s| s.feedback.coverage())
    }

    pub fn iterations(&self) -> usize {
        self.steps.len()
    }

    /// Running maximum of coverage after each step.
    pub fn best_coverage_sequence(&self) -> Vec<f64> {
        let mut best = 0.0_f64;
        self.steps
            .iter()
            .map(|s| {
                best = best.max(s.feedback.coverage());
                best
            })
            .collect()
    }

    /// 1-based iteration at which coverage first reached `target`.
    pub fn first_reaching(&self, target: f64) -> Option<usize> {
        self.steps
            .iter()
            .position(|s| s.feedback.coverage() >= target)
            .map(|i| i + 1)
    }

    pub fn records(&self) -> Vec<TraceRecord> {
        let mut best = 0.0_f64;
        self.steps
            .iter()
            .map(|s| {
                let fb = &s.feedback;
                best = best.max(fb.coverage());
                TraceRecord {
                    iteration: fb.iteration,
                    aps: s.deployment.aps.clone(),
                    coverage: fb.coverage(),
                    best_coverage: best,
                    covered_cells: fb.stats.as_ref().map_or(0, |x| x.covered_cells),
                    total_cells: fb.stats.as_ref().map_or(0, |x| x.total_cells),
                    worst_regions: fb.regions.clone(),
                    violation: fb.violation.clone(),
                }
            })
            .collect()
    }

    /// Newline-delimited JSON, one [`TraceRecord`] per step.
    pub fn write_jsonl(&self, mut out: impl Write) -> std::io::Result<()> {
        for r in self.records() {
            serde_json::to_writer(&mut out, &r)?;
            out.write_all(b"\n")?;
        }
        Ok(())
    }

    pub fn to_jsonl(&self) -> String {
        let mut buf = Vec::new();
        self.write_jsonl(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("json is utf-8")
    }
}

/// One line of `trace.jsonl`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceRecord {
    pub iteration: usize,
    pub aps: Vec<Point2D>,
    pub coverage: f64,
    pub best_coverage: f64,
    pub covered_cells: usize,
    pub total_cells: usize,
    pub worst_regions: Vec<RegionSummary>,
    pub violation: Option<String>,
}

pub fn read_jsonl(input: impl BufRead) -> Result<Vec<TraceRecord>, serde_json::Error> {
    input
        .lines()
        .map(|l| l.map_err(serde_json::Error::io))
        .filter(|l| !matches!(l, Ok(s) if s.trim().is_empty()))
        .map(|l| serde_json::from_str(&l?))
        .collect()
}
