use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::optimizers::{OptimizationTrace, Scorer};
use crate::propagation::Deployment;

use super::entity::entity_agent;
use super::evaluate::{evaluation_update_agent, Candidate, JointScore, RationalityChecks};
use super::iwn::{correction_agent, gate, iwn_design_agent, IwnBackend};
use super::layout::{layout_agent, LayoutProposal};
use super::task::JointDesignTask;
use super::{AgentError, Backend, GlobalFeedback};

/// Backends for the agents that can be model driven.
#[derive(Debug, Clone, Default)]
pub struct Backends {
    pub layout: Backend,
    pub entity: Backend,
    pub iwn: IwnBackend,
}

/// One candidate of one round, as written to the round history.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CandidateRecord {
    pub round: usize,
    pub candidate: usize,
    pub fingerprint: String,
    pub provenance: String,
    pub passed_gate: bool,
    pub gate_error: Option<String>,
    pub checks: RationalityChecks,
    pub score: JointScore,
    pub aps: Vec<crate::geometry::Point2D>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoundRecord {
    pub round: usize,
    pub candidates: Vec<CandidateRecord>,
    pub best_candidate: usize,
    /// Best overall score over this and all earlier rounds.
    pub best_overall: f64,
    pub feedback: String,
}

#[derive(Debug, Clone)]
pub struct JointDesignOutcome {
    pub best: LayoutProposal,
    pub trace: OptimizationTrace,
    pub deployment: Deployment,
    pub score: JointScore,
    /// Round and candidate index of the winner.
    pub origin: (usize, usize),
    pub rounds: Vec<RoundRecord>,
}

impl JointDesignOutcome {
    /// Round history as JSON lines, one record per candidate per round.
    pub fn write_history(&self, mut out: impl Write) -> std::io::Result<()> {
        for r in &self.rounds {
            for c in &r.candidates {
                let mut v = serde_json::to_value(c).expect("record serializes");
                v["feedback"] = serde_json::Value::String(r.feedback.clone());
                writeln!(out, "{v}")?;
            }
        }
        Ok(())
    }

    pub fn best_overall_by_round(&self) -> Vec<f64> {
        self.rounds.iter().map(|r| r.best_overall).collect()
    }
}

fn design(proposal: LayoutProposal, task: &JointDesignTask, backends: &Backends) -> Result<Candidate, AgentError> {
    let proposal = match entity_agent(&proposal, task, &backends.entity) {
        Ok(p) => p,
        Err(e @ (AgentError::NoValidDoorPlacement(_) | AgentError::InvalidLayout(_))) => {
            return Ok(rejected(proposal, e.to_string()))
        }
        Err(e) => return Err(e),
    };
    if let Err(e) = gate(&proposal.plan, &task.rules()) {
        return Ok(rejected(proposal, e.to_string()));
    }
    let planning = task.planning_task(proposal.plan.clone());
    let trace = iwn_design_agent(&proposal.plan, &planning, &backends.iwn)?;
    let chosen = trace.best_step().or(trace.steps.last()).map(|s| s.deployment.clone());
    let (deployment, stats) = match chosen {
        Some(d) if !d.aps.is_empty() => {
            let d = correction_agent(&proposal.plan, &d)?;
            let stats = Scorer::new(&planning)?.feedback(0, &d.aps).stats;
            (Some(d), stats)
        }
        _ => (None, None),
    };
    Ok(Candidate {
        proposal,
        trace: Some(trace),
        deployment,
        stats,
        gate_error: None,
    })
}

fn rejected(proposal: LayoutProposal, reason: String) -> Candidate {
    Candidate {
        proposal,
        trace: None,
        deployment: None,
        stats: None,
        gate_error: Some(reason),
    }
}

/// Runs layout, entity, network design, correction and evaluation for up to
/// `task.max_rounds` rounds and returns the best candidate seen.
///
/// Candidates of a round are designed in parallel. The best layout so far is
/// carried into the next round, so the best overall score never decreases.
pub fn joint_design_pipeline(task: &JointDesignTask, backends: &Backends) -> Result<JointDesignOutcome, AgentError> {
    task.validate()?;
    let mut feedback: Option<GlobalFeedback> = None;
    let mut rounds = Vec::new();
    let mut best: Option<(Candidate, JointScore, (usize, usize))> = None;

    for round in 0..task.max_rounds {
        let layouts = layout_agent(task, feedback.as_ref(), &backends.layout)?;
        let candidates: Vec<Candidate> = layouts
            .into_par_iter()
            .map(|p| design(p, task, backends))
            .collect::<Result<_, _>>()?;
        let eval = evaluation_update_agent(&candidates, task, round);

        let i = eval.best;
        let s = eval.scores[i];
        let improves = match &best {
            None => candidates[i].trace.is_some(),
            Some((_, b, _)) => {
                candidates[i].trace.is_some()
                    && (s.overall > b.overall || (s.overall == b.overall && s.ap_count < b.ap_count))
            }
        };
        if improves {
            best = Some((candidates[i].clone(), s, (round, i)));
        }

        let records = candidates
            .iter()
            .enumerate()
            .map(|(j, c)| CandidateRecord {
                round,
                candidate: j,
                fingerprint: c.proposal.fingerprint(),
                provenance: c.proposal.provenance.clone(),
                passed_gate: c.gate_error.is_none(),
                gate_error: c.gate_error.clone(),
                checks: eval.checks[j],
                score: eval.scores[j],
                aps: c.deployment.as_ref().map(|d| d.aps.clone()).unwrap_or_default(),
            })
            .collect();
        let mut fb = eval.feedback;
        if let Some((b, _, _)) = &best {
            fb.best_rooms = b.proposal.plan.rooms.clone();
        }
        rounds.push(RoundRecord {
            round,
            candidates: records,
            best_candidate: i,
            best_overall: best.as_ref().map_or(0.0, |b| b.1.overall),
            feedback: fb.text.clone(),
        });
        feedback = Some(fb);
    }

    let (c, score, origin) = best.ok_or_else(|| {
        AgentError::NoFeasibleLayout("no candidate layout passed the architectural gate".into())
    })?;
    let deployment = c
        .deployment
        .unwrap_or_else(|| Deployment::new(Vec::new(), task.radio));
    Ok(JointDesignOutcome {
        best: c.proposal,
        trace: c.trace.expect("gated candidates have a trace"),
        deployment,
        score,
        origin,
        rounds,
    })
}
