use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::geometry::{FloorPlan, OpeningKind};
use crate::optimizers::{PlanningTask, Step};

use super::LlmError;

pub const DEFAULT_WINDOW: usize = 5;
pub const DEFAULT_CHAR_CAP: usize = 24_000;

pub const SYSTEM_PREAMBLE: &str = "You are an indoor wireless network planning optimizer. \
You receive a floor plan, a coverage task, planning knowledge and the results of earlier \
attempts. Propose access point positions that reach the coverage target with as few \
access points as possible. Reply with one JSON object and nothing that contradicts it.";

/// The four parts of one optimization prompt.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PromptBundle {
    pub system_preamble: String,
    /// Serialized plan and task.
    pub description: String,
    /// Domain rules from the knowledge file.
    pub knowledge: String,
    /// Rendered recent feedback.
    pub perception: String,
}

impl PromptBundle {
    /// The single user message sent to the model.
    pub fn user_message(&self) -> String {
        format!(
            "## Description\n{}\n\n## Knowledge\n{}\n\n## Perception\n{}\n",
            self.description, self.knowledge, self.perception
        )
    }

    pub fn rendered_len(&self) -> usize {
        self.system_preamble.len() + self.user_message().len()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PromptOptions {
    /// Number of most recent steps rendered in the perception section.
    pub window: usize,
    /// Cap on [`PromptBundle::rendered_len`], in bytes.
    pub char_cap: usize,
    /// Reasons the previous responses in this iteration were unusable.
    pub failures: Vec<String>,
}

impl Default for PromptOptions {
    fn default() -> Self {
        Self {
            window: DEFAULT_WINDOW,
            char_cap: DEFAULT_CHAR_CAP,
            failures: Vec::new(),
        }
    }
}

pub fn describe_plan(plan: &FloorPlan, out: &mut String) {
    let b = &plan.boundary;
    let _ = writeln!(out, "Floor plan (meters; x east, y north):");
    let _ = writeln!(
        out,
        "boundary: origin ({:.2}, {:.2}), width {:.2}, depth {:.2}",
        b.origin.x, b.origin.y, b.width, b.depth
    );
    let mats: Vec<String> = plan
        .materials
        .iter()
        .map(|m| format!("{} {:.1} dB", m.name, m.attenuation))
        .collect();
    let _ = writeln!(out, "materials (loss per crossing): {}", mats.join("; "));
    let _ = writeln!(out, "walls:");
    for (i, w) in plan.walls.iter().enumerate() {
        let _ = writeln!(
            out,
            "  w{i} ({:.2}, {:.2}) -> ({:.2}, {:.2}) {}, {:.2} m",
            w.start.x, w.start.y, w.end.x, w.end.y, w.material, w.thickness
        );
    }
    if !plan.openings.is_empty() {
        let _ = writeln!(out, "openings:");
        for (i, o) in plan.openings.iter().enumerate() {
            let kind = match o.kind {
                OpeningKind::Door => "door",
                OpeningKind::Window => "window",
            };
            let _ = writeln!(
                out,
                "  o{i} {kind} on w{} at {:.2}-{:.2} m, {}",
                o.wall,
                o.offset,
                o.offset + o.width,
                o.material
            );
        }
    }
    if !plan.rooms.is_empty() {
        let _ = writeln!(out, "rooms:");
        for r in &plan.rooms {
            let _ = writeln!(
                out,
                "  {} origin ({:.2}, {:.2}), {:.2} x {:.2}",
                r.label, r.origin.x, r.origin.y, r.width, r.depth
            );
        }
    }
}

fn describe_task(task: &PlanningTask) -> String {
    let mut out = String::new();
    describe_plan(&task.plan, &mut out);
    let r = &task.radio;
    let _ = writeln!(
        out,
        "Task: place between 1 and {} access points so that at least {:.1}% of grid cells have pathloss below {:.1} dB.",
        task.max_aps,
        task.coverage_target * 100.0,
        task.threshold
    );
    let _ = writeln!(
        out,
        "Evaluation: {:.2} m grid cells; pathloss = {:.2} dB at {:.2} m + {:.1}*log10(d) + wall losses ({:.0} MHz).",
        task.cell_size,
        r.reference_pathloss,
        r.reference_distance,
        10.0 * r.pathloss_exponent,
        r.frequency_mhz
    );
    let _ = writeln!(
        out,
        "Access points must lie strictly inside the boundary and off every wall."
    );
    let _ = write!(
        out,
        "Answer with one JSON object: {{\"aps\": [{{\"x\": <meters>, \"y\": <meters>}}, ...]}}"
    );
    out
}

/// One perception line for a recorded step.
pub fn render_step(step: &Step) -> String {
    let fb = &step.feedback;
    let aps: Vec<String> = step
        .deployment
        .aps
        .iter()
        .map(|p| format!("({:.2}, {:.2})", p.x, p.y))
        .collect();
    let head = format!("iteration {}: APs [{}]", fb.iteration, aps.join(", "));
    match &fb.violation {
        Some(reason) => format!("{head} → rejected: {reason}"),
        None => {
            let regions: Vec<String> = fb
                .regions
                .iter()
                .map(|r| format!("({:.2}, {:.2}) {:.1} dB", r.centroid.x, r.centroid.y, r.pathloss))
                .collect();
            format!(
                "{head} → coverage {:.1}%, worst regions [{}]",
                fb.coverage() * 100.0,
                regions.join(", ")
            )
        }
    }
}

fn render_perception(history: &[Step], window: usize, failures: &[String]) -> String {
    let mut out = String::new();
    if history.is_empty() {
        out.push_str("No prior attempts.");
    } else if window == 0 {
        out.push_str("Previous attempts omitted to fit the prompt size limit.");
    } else {
        let start = history.len().saturating_sub(window);
        out.push_str("Previous attempts (oldest first):");
        for s in &history[start..] {
            out.push('\n');
            out.push_str(&render_step(s));
        }
    }
    for f in failures {
        let _ = write!(out, "\nYour last reply could not be used: {f}");
    }
    out
}

/// Assembles the description, knowledge and perception sections.
///
/// When the prompt would exceed `options.char_cap` the perception window is
/// shrunk first, then the knowledge text is cut. The description is never
/// shortened; if it alone does not fit, [`LlmError::PromptTooLong`] is returned.
pub fn build_prompt_with(
    task: &PlanningTask,
    history: &[Step],
    knowledge: &str,
    options: &PromptOptions,
) -> Result<PromptBundle, LlmError> {
    let mut bundle = PromptBundle {
        system_preamble: SYSTEM_PREAMBLE.to_string(),
        description: describe_task(task),
        knowledge: knowledge.trim_end().to_string(),
        perception: render_perception(history, options.window, &options.failures),
    };
    let mut window = options.window.min(history.len());
    while bundle.rendered_len() > options.char_cap && window > 0 {
        window -= 1;
        bundle.perception = render_perception(history, window, &options.failures);
    }
    if bundle.rendered_len() > options.char_cap {
        let excess = bundle.rendered_len() - options.char_cap;
        let mut keep = bundle.knowledge.len().saturating_sub(excess);
        while !bundle.knowledge.is_char_boundary(keep) {
            keep -= 1;
        }
        bundle.knowledge.truncate(keep);
    }
    if bundle.rendered_len() > options.char_cap {
        return Err(LlmError::PromptTooLong {
            len: bundle.rendered_len(),
            cap: options.char_cap,
        });
    }
    Ok(bundle)
}

pub fn build_prompt(task: &PlanningTask, history: &[Step], knowledge: &str) -> Result<PromptBundle, LlmError> {
    build_prompt_with(task, history, knowledge, &PromptOptions::default())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{Point2D, Rect};
    use crate::optimizers::{Feedback, Scorer};
    use crate::propagation::Deployment;

    fn task() -> PlanningTask {
        let plan = FloorPlan::new(Rect::new(Point2D::new(0.0, 0.0), 20.0, 10.0));
        PlanningTask::new(plan, 0.95, 60.0, 2, 10)
    }

    fn history(task: &PlanningTask, n: usize) -> Vec<Step> {
        let scorer = Scorer::new(task).unwrap();
        (1..=n)
            .map(|i| {
                let aps = vec![Point2D::new(i as f64, 5.0)];
                Step {
                    feedback: scorer.feedback(i, &aps),
                    deployment: Deployment::new(aps, task.radio),
                }
            })
            .collect()
    }

    #[test]
    fn empty_history() {
        let b = build_prompt(&task(), &[], "k").unwrap();
        assert_eq!(b.perception, "No prior attempts.");
        assert!(!b.description.is_empty());
    }

    #[test]
    fn window_keeps_last_steps() {
        let t = task();
        let b = build_prompt(&t, &history(&t, 7), "").unwrap();
        let lines: Vec<&str> = b.perception.lines().skip(1).collect();
        assert_eq!(lines.len(), 5);
        for (line, i) in lines.iter().zip(3..=7) {
            assert!(line.starts_with(&format!("iteration {i}: APs [({i}.00, 5.00)] → coverage")), "{line}");
        }
    }

    #[test]
    fn violation_line() {
        let t = task();
        let step = Step {
            deployment: Deployment::new(vec![Point2D::new(-1.0, 5.0)], t.radio),
            feedback: Feedback::violation(4, "ap 0 outside boundary"),
        };
        assert_eq!(
            render_step(&step),
            "iteration 4: APs [(-1.00, 5.00)] → rejected: ap 0 outside boundary"
        );
    }

    #[test]
    fn deterministic() {
        let t = task();
        let h = history(&t, 3);
        assert_eq!(build_prompt(&t, &h, "x").unwrap(), build_prompt(&t, &h, "x").unwrap());
    }

    #[test]
    fn cap_shrinks_window_then_knowledge() {
        let t = task();
        let h = history(&t, 7);
        let full = build_prompt(&t, &h, "abc").unwrap();
        let opts = PromptOptions {
            char_cap: full.rendered_len() - 10,
            ..Default::default()
        };
        let b = build_prompt_with(&t, &h, "abc", &opts).unwrap();
        assert_eq!(b.perception.lines().count(), 5);
        assert!(b.rendered_len() <= opts.char_cap);

        let bare = build_prompt(&t, &[], "").unwrap();
        let opts = PromptOptions {
            char_cap: bare.rendered_len() - 1,
            ..Default::default()
        };
        assert!(matches!(
            build_prompt_with(&t, &[], "", &opts),
            Err(LlmError::PromptTooLong { .. })
        ));
    }
}
