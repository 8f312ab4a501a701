use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::geometry::{check_circulation, validate_plan, Room, ViolationKind};
use crate::optimizers::OptimizationTrace;
use crate::propagation::{CoverageStats, Deployment};

use super::layout::LayoutProposal;
use super::task::JointDesignTask;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JointScore {
    pub coverage: f64,
    pub ap_count: usize,
    /// Coverage per AP; 0 when no AP is deployed.
    pub iwn_efficiency: f64,
    pub rationality: f64,
    pub overall: f64,
}

impl JointScore {
    pub fn new(coverage: f64, ap_count: usize, rationality: f64, w_coverage: f64, w_rationality: f64) -> Self {
        Self {
            coverage,
            ap_count,
            iwn_efficiency: if ap_count == 0 { 0.0 } else { coverage / ap_count as f64 },
            rationality,
            overall: w_coverage * coverage + w_rationality * rationality,
        }
    }
}

/// Pass/fail of the four architectural checks behind the rationality score.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RationalityChecks {
    pub anchoring: bool,
    pub door_rule: bool,
    pub circulation: bool,
    pub non_overlap: bool,
}

impl RationalityChecks {
    pub const NAMES: [&'static str; 4] = ["anchoring", "door rule", "circulation", "non-overlap"];

    pub fn evaluate(proposal: &LayoutProposal, task: &JointDesignTask) -> Self {
        let plan = &proposal.plan;
        let rules = crate::geometry::ArchitecturalRules {
            require_circulation: false,
            ..task.rules()
        };
        let v = validate_plan(plan, Some(&rules));
        let has = |kinds: &[ViolationKind]| v.iter().any(|v| kinds.contains(&v.kind));
        use ViolationKind::*;
        Self {
            anchoring: !has(&[RoomNotAnchored]),
            door_rule: !has(&[DoorCountViolation, DoorWidthViolation, DoorMaterialViolation]),
            circulation: check_circulation(plan, rules.circulation_step).unwrap_or(false),
            non_overlap: !has(&[RoomOverlapViolation]),
        }
    }

    pub fn passed(&self) -> [bool; 4] {
        [self.anchoring, self.door_rule, self.circulation, self.non_overlap]
    }

    /// Share of checks passed, each weighted equally.
    pub fn rationality(&self) -> f64 {
        self.passed().iter().filter(|&&p| p).count() as f64 / 4.0
    }
}

/// A layout that went through the pipeline, with its network design.
#[derive(Debug, Clone, PartialEq)]
pub struct Candidate {
    pub proposal: LayoutProposal,
    /// `None` when the layout failed the gate before network design.
    pub trace: Option<OptimizationTrace>,
    /// Corrected deployment and its stats.
    pub deployment: Option<Deployment>,
    pub stats: Option<CoverageStats>,
    pub gate_error: Option<String>,
}

impl Candidate {
    pub fn coverage(&self) -> f64 {
        self.stats.as_ref().map_or(0.0, |s| s.coverage_fraction)
    }

    pub fn ap_count(&self) -> usize {
        self.deployment.as_ref().map_or(0, |d| d.aps.len())
    }
}

/// Summary passed from the evaluation agent to the next round.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GlobalFeedback {
    pub round: usize,
    pub text: String,
    /// Rooms of the best layout found so far.
    pub best_rooms: Vec<Room>,
    /// How many candidates failed each check this round.
    pub failed_checks: BTreeMap<String, usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Evaluation {
    pub scores: Vec<JointScore>,
    pub checks: Vec<RationalityChecks>,
    pub best: usize,
    pub feedback: GlobalFeedback,
}

/// Index of the best score: highest overall, then fewer APs, then lower index.
pub fn best_index(scores: &[JointScore]) -> Option<usize> {
    (0..scores.len()).reduce(|a, b| {
        let (sa, sb) = (&scores[a], &scores[b]);
        if sb.overall > sa.overall || (sb.overall == sa.overall && sb.ap_count < sa.ap_count) {
            b
        } else {
            a
        }
    })
}

fn describe(i: usize, c: &Candidate, s: &JointScore) -> String {
    format!(
        "candidate {i} ({}): overall {:.3}, coverage {:.1}% with {} APs, rationality {:.2}",
        c.proposal.provenance,
        s.overall,
        s.coverage * 100.0,
        s.ap_count,
        s.rationality
    )
}

/// Scores every candidate and writes the feedback for the next round.
///
/// # Panics
///
/// Panics if `candidates` is empty.
pub fn evaluation_update_agent(candidates: &[Candidate], task: &JointDesignTask, round: usize) -> Evaluation {
    assert!(!candidates.is_empty(), "no candidates to evaluate");
    let checks: Vec<RationalityChecks> = candidates
        .iter()
        .map(|c| RationalityChecks::evaluate(&c.proposal, task))
        .collect();
    let scores: Vec<JointScore> = candidates
        .iter()
        .zip(&checks)
        .map(|(c, k)| JointScore::new(c.coverage(), c.ap_count(), k.rationality(), task.w_coverage, task.w_rationality))
        .collect();
    let best = best_index(&scores).expect("nonempty");
    let worst = (0..scores.len())
        .reduce(|a, b| if scores[b].overall < scores[a].overall { b } else { a })
        .expect("nonempty");

    let mut failed_checks = BTreeMap::new();
    for k in &checks {
        for (name, ok) in RationalityChecks::NAMES.iter().zip(k.passed()) {
            if !ok {
                *failed_checks.entry((*name).to_string()).or_insert(0) += 1;
            }
        }
    }

    let mut text = String::new();
    let _ = writeln!(text, "Round {round}: {} candidates.", candidates.len());
    let _ = writeln!(text, "Best {}.", describe(best, &candidates[best], &scores[best]));
    let _ = writeln!(text, "Worst {}.", describe(worst, &candidates[worst], &scores[worst]));
    let b = &candidates[best].proposal.plan;
    let rooms: Vec<String> = b
        .rooms
        .iter()
        .map(|r| format!("{} at ({:.2}, {:.2}) {:.2} x {:.2}", r.label, r.origin.x, r.origin.y, r.width, r.depth))
        .collect();
    let _ = writeln!(text, "Best rooms: {}.", rooms.join("; "));
    if failed_checks.is_empty() {
        let _ = write!(text, "All candidates passed every architectural check.");
    } else {
        let mut by_count: Vec<_> = failed_checks.iter().collect();
        by_count.sort_by(|a, b| b.1.cmp(a.1).then(a.0.cmp(b.0)));
        let list: Vec<String> = by_count.iter().map(|(k, n)| format!("{k} ({n})")).collect();
        let _ = write!(text, "Failed checks: {}.", list.join(", "));
    }

    Evaluation {
        feedback: GlobalFeedback {
            round,
            text,
            best_rooms: b.rooms.clone(),
            failed_checks,
        },
        scores,
        checks,
        best,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn efficiency_is_coverage_per_ap() {
        let s = JointScore::new(0.954, 2, 1.0, 0.7, 0.3);
        assert_eq!(s.iwn_efficiency, 0.954 / 2.0);
        assert!((s.iwn_efficiency - 0.477).abs() < 1e-12);
        let s = JointScore::new(0.956, 3, 1.0, 0.7, 0.3);
        assert!((s.iwn_efficiency - 0.3187).abs() < 1e-4);
        assert_eq!(JointScore::new(0.0, 0, 0.5, 0.7, 0.3).iwn_efficiency, 0.0);
    }

    #[test]
    fn rationality_counts_checks() {
        let k = RationalityChecks {
            anchoring: true,
            door_rule: true,
            circulation: false,
            non_overlap: true,
        };
        assert_eq!(k.rationality(), 0.75);
    }

    #[test]
    fn best_prefers_fewer_aps_on_ties() {
        let a = JointScore::new(1.0, 2, 1.0, 0.7, 0.3);
        let b = JointScore::new(1.0, 1, 1.0, 0.7, 0.3);
        let c = JointScore::new(1.0, 1, 1.0, 0.7, 0.3);
        assert_eq!(best_index(&[a, b, c]), Some(1));
    }
}
