use std::collections::HashSet;
use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::geometry::{validate_plan, ArchitecturalRules, FloorPlan, Point2D, Rect, Room, GEOM_TOL};
use crate::llm::extract_object;

use super::task::JointDesignTask;
use super::{AgentError, Backend, GlobalFeedback};

/// A candidate building layout and where it came from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LayoutProposal {
    pub plan: FloorPlan,
    pub provenance: String,
    pub rationale: String,
}

impl LayoutProposal {
    pub fn fingerprint(&self) -> String {
        layout_key(&self.plan.rooms)
    }
}

/// Order-independent identity of a room arrangement.
pub(crate) fn layout_key(rooms: &[Room]) -> String {
    let mut parts: Vec<String> = rooms
        .iter()
        .map(|r| format!("{:.3},{:.3},{:.3},{:.3}", r.origin.x, r.origin.y, r.width, r.depth))
        .collect();
    parts.sort();
    crate::fingerprint(parts.join(";").as_bytes())
}

fn feasibility(task: &JointDesignTask) -> Result<(), AgentError> {
    let b = task.boundary();
    if !(b.width > 0.0 && b.depth > 0.0) {
        return Err(AgentError::NoFeasibleLayout(format!(
            "boundary {} x {} has no area",
            b.width, b.depth
        )));
    }
    let total: f64 = task.rooms.iter().map(|r| r.width * r.depth).sum();
    if total > b.area() {
        return Err(AgentError::NoFeasibleLayout(format!(
            "rooms need {total:.2} m2 but the boundary has {:.2} m2",
            b.area()
        )));
    }
    for r in &task.rooms {
        let fits = |w: f64, d: f64| w <= b.width + GEOM_TOL && d <= b.depth + GEOM_TOL;
        if !(r.width > 0.0 && r.depth > 0.0) || !(fits(r.width, r.depth) || fits(r.depth, r.width)) {
            return Err(AgentError::NoFeasibleLayout(format!(
                "room '{}' ({} x {}) does not fit the boundary",
                r.label, r.width, r.depth
            )));
        }
    }
    Ok(())
}

/// Offsets at the start, middle and end of a free length.
fn slot_offsets(len: f64) -> Vec<f64> {
    if len < -GEOM_TOL {
        return Vec::new();
    }
    let len = len.max(0.0);
    let mut out = vec![0.0, len / 2.0, len];
    out.dedup_by(|a, b| (*a - *b).abs() <= GEOM_TOL);
    out
}

/// Rectangles of size (w, d) in either orientation against an outer wall,
/// at the corners or centered on a wall.
fn anchored_slots(task: &JointDesignTask, w: f64, d: f64) -> Vec<Rect> {
    let (bw, bd) = (task.width, task.depth);
    let mut out: Vec<Rect> = Vec::new();
    let mut orientations = vec![(w, d)];
    if (w - d).abs() > GEOM_TOL {
        orientations.push((d, w));
    }
    for (w, d) in orientations {
        if w > bw + GEOM_TOL || d > bd + GEOM_TOL {
            continue;
        }
        for x in slot_offsets(bw - w) {
            out.push(Rect::new(Point2D::new(x, 0.0), w, d));
            out.push(Rect::new(Point2D::new(x, bd - d), w, d));
        }
        for y in slot_offsets(bd - d) {
            out.push(Rect::new(Point2D::new(0.0, y), w, d));
            out.push(Rect::new(Point2D::new(bw - w, y), w, d));
        }
    }
    let mut unique: Vec<Rect> = Vec::new();
    for r in out {
        if !unique.iter().any(|u| u.origin.distance(&r.origin) <= GEOM_TOL && (u.width - r.width).abs() <= GEOM_TOL) {
            unique.push(r);
        }
    }
    unique
}

fn separated(a: &Rect, b: &Rect, gap: f64) -> bool {
    let (a0, a1, b0, b1) = (a.min(), a.max(), b.min(), b.max());
    a1.x + gap <= b0.x + GEOM_TOL
        || b1.x + gap <= a0.x + GEOM_TOL
        || a1.y + gap <= b0.y + GEOM_TOL
        || b1.y + gap <= a0.y + GEOM_TOL
}

fn fits(task: &JointDesignTask, rect: &Rect, placed: &[Room]) -> bool {
    !rect.interiors_overlap(&task.entrance_zone(), GEOM_TOL)
        && placed.iter().all(|r| separated(rect, &r.rect(), task.room_gap))
}

fn is_corner(task: &JointDesignTask, r: &Rect) -> bool {
    let at = |lo: f64, hi: f64, len: f64| lo.abs() <= GEOM_TOL || (hi - len).abs() <= GEOM_TOL;
    at(r.min().x, r.max().x, task.width) && at(r.min().y, r.max().y, task.depth)
}

/// Places rooms `order` one by one at anchored slots, in random order or,
/// without `rng`, corners first.
fn place_rooms(
    task: &JointDesignTask,
    mut rooms: Vec<Room>,
    order: &[usize],
    rng: Option<&mut ChaCha8Rng>,
) -> Option<Vec<Room>> {
    let mut rng = rng;
    for &i in order {
        let spec = &task.rooms[i];
        let mut slots = anchored_slots(task, spec.width, spec.depth);
        match rng.as_deref_mut() {
            Some(rng) => slots.shuffle(rng),
            None => slots.sort_by_key(|s| !is_corner(task, s)),
        }
        let others: Vec<Room> = rooms
            .iter()
            .enumerate()
            .filter(|&(j, r)| j != i && r.width > 0.0)
            .map(|(_, r)| r.clone())
            .collect();
        let slot = slots.into_iter().find(|s| fits(task, s, &others))?;
        rooms[i] = Room::new(spec.label.clone(), slot.origin, slot.width, slot.depth);
    }
    Some(rooms)
}

fn empty_rooms(task: &JointDesignTask) -> Vec<Room> {
    task.rooms
        .iter()
        .map(|s| Room::new(s.label.clone(), Point2D::new(0.0, 0.0), 0.0, 0.0))
        .collect()
}

fn proposal(task: &JointDesignTask, rooms: &[Room], provenance: &str, rationale: String) -> LayoutProposal {
    LayoutProposal {
        plan: task.build_layout(rooms),
        provenance: provenance.into(),
        rationale,
    }
}

/// Seed used for a round: the task seed plus the round number.
pub(crate) fn round_seed(task: &JointDesignTask, feedback: Option<&GlobalFeedback>) -> (u64, usize) {
    let round = feedback.map_or(0, |f| f.round + 1);
    (task.seed.wrapping_add(round as u64), round)
}

/// Rule backend: corner and wall-center placements along the outer walls.
/// Round 0 starts with a corners-first layout; later rounds keep the best
/// layout so far and add single-room moves of it. The rest are random.
pub fn rule_layouts(task: &JointDesignTask, feedback: Option<&GlobalFeedback>) -> Result<Vec<LayoutProposal>, AgentError> {
    feasibility(task)?;
    let (seed, round) = round_seed(task, feedback);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = task.n_candidates;
    let all: Vec<usize> = (0..task.rooms.len()).collect();
    let mut seen = HashSet::new();
    let mut out = Vec::new();

    if let Some(best) = feedback.map(|f| &f.best_rooms).filter(|r| r.len() == task.rooms.len()) {
        if seen.insert(layout_key(best)) {
            out.push(proposal(task, best, "rule", format!("round {round}: best layout so far kept")));
        }
        let mutations = n / 2;
        let mut tries = 0;
        while out.len() < 1 + mutations && out.len() < n && tries < 20 * n {
            tries += 1;
            let i = rng.gen_range(0..task.rooms.len());
            if let Some(rooms) = place_rooms(task, best.clone(), &[i], Some(&mut rng)) {
                if seen.insert(layout_key(&rooms)) {
                    let why = format!("round {round}: best layout with room {} moved", task.rooms[i].label);
                    out.push(proposal(task, &rooms, "rule", why));
                }
            }
        }
    }

    if feedback.is_none() {
        if let Some(rooms) = place_rooms(task, empty_rooms(task), &all, None) {
            seen.insert(layout_key(&rooms));
            out.push(proposal(task, &rooms, "rule", "round 0: rooms in the corners first".into()));
        }
    }

    let mut tries = 0;
    while out.len() < n && tries < 50 * n {
        tries += 1;
        let mut order = all.clone();
        order.shuffle(&mut rng);
        if let Some(rooms) = place_rooms(task, empty_rooms(task), &order, Some(&mut rng)) {
            if seen.insert(layout_key(&rooms)) {
                out.push(proposal(task, &rooms, "rule", format!("round {round}: anchored random placement")));
            }
        }
    }
    if out.is_empty() {
        return Err(AgentError::NoFeasibleLayout(format!(
            "could not place {} rooms against the outer walls",
            task.rooms.len()
        )));
    }
    Ok(out)
}

fn describe_task(task: &JointDesignTask, feedback: Option<&GlobalFeedback>) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        "Building boundary: {:.2} m (x, east) by {:.2} m (y, north), origin at (0, 0).",
        task.width, task.depth
    );
    let d = &task.outer_door;
    let _ = writeln!(
        s,
        "Entrance: {:.2} m door on the {} wall centered at {:.2}; keep {:?} free.",
        d.width,
        d.side.name(),
        d.center,
        task.entrance_zone()
    );
    let _ = writeln!(s, "Rooms (fixed sizes, either orientation):");
    for r in &task.rooms {
        let _ = writeln!(s, "  {}: {:.2} x {:.2}", r.label, r.width, r.depth);
    }
    let _ = writeln!(
        s,
        "Rules: every room has an edge on the outer wall, rooms do not overlap, rooms stay inside the boundary. \
         Room walls are {}; the network must reach {:.1}% coverage below {:.1} dB with as few access points as possible.",
        task.room_wall_material,
        task.coverage_target * 100.0,
        task.threshold
    );
    match feedback {
        Some(f) => {
            let _ = writeln!(s, "Feedback from the previous round:\n{}", f.text);
        }
        None => {
            let _ = writeln!(s, "This is the first round.");
        }
    }
    let _ = write!(
        s,
        "Propose up to {} layouts as one JSON object: \
         {{\"layouts\": [{{\"rooms\": [{{\"label\": \"A\", \"x\": <m>, \"y\": <m>, \"width\": <m>, \"depth\": <m>}}, ...]}}, ...]}} \
         where (x, y) is the room's south-west corner.",
        task.n_candidates
    );
    s
}

pub const LAYOUT_PREAMBLE: &str = "You are the layout agent of a building design team. \
You place rooms inside a rectangular building so that the indoor wireless network \
is easy to plan. Reply with one JSON object.";

fn parse_room(task: &JointDesignTask, v: &Value) -> Result<Room, String> {
    let num = |k: &str| v.get(k).and_then(Value::as_f64).ok_or(format!("room without numeric \"{k}\""));
    let label = v.get("label").and_then(Value::as_str).ok_or("room without \"label\"")?;
    let spec = task
        .rooms
        .iter()
        .find(|r| r.label == label)
        .ok_or(format!("unknown room '{label}'"))?;
    let (x, y, w, d) = (num("x")?, num("y")?, num("width")?, num("depth")?);
    let same = |a: f64, b: f64| (a - b).abs() <= GEOM_TOL;
    if !((same(w, spec.width) && same(d, spec.depth)) || (same(w, spec.depth) && same(d, spec.width))) {
        return Err(format!("room '{label}' is {w} x {d}, expected {} x {}", spec.width, spec.depth));
    }
    Ok(Room::new(label, Point2D::new(x, y), w, d))
}

/// Rooms of every layout in a reply; layouts that break the room rules are
/// reported in the error list instead.
pub(crate) fn parse_layouts(task: &JointDesignTask, text: &str) -> Result<(Vec<Vec<Room>>, Vec<String>), String> {
    let obj = extract_object(text, "layouts").ok_or("no JSON object with a \"layouts\" array found")?;
    let items = obj["layouts"].as_array().ok_or("\"layouts\" must be an array")?;
    let rules = ArchitecturalRules {
        door_width: None,
        door_material: None,
        require_circulation: false,
        ..task.rules()
    };
    let mut ok = Vec::new();
    let mut errors = Vec::new();
    for (i, item) in items.iter().enumerate() {
        let rooms: Result<Vec<Room>, String> = match item.get("rooms").and_then(Value::as_array) {
            Some(rs) => rs.iter().map(|r| parse_room(task, r)).collect(),
            None => Err("missing \"rooms\" array".into()),
        };
        match rooms {
            Ok(rooms) => {
                let plan = task.build_layout(&rooms);
                let v = validate_plan(&plan, Some(&rules));
                if let Some(first) = v.first() {
                    errors.push(format!("layout {i}: {first}"));
                } else {
                    ok.push(rooms);
                }
            }
            Err(e) => errors.push(format!("layout {i}: {e}")),
        }
    }
    Ok((ok, errors))
}

fn llm_layouts(
    task: &JointDesignTask,
    feedback: Option<&GlobalFeedback>,
    client: &dyn crate::llm::Completion,
) -> Result<Vec<LayoutProposal>, AgentError> {
    let mut budget = client.max_attempts();
    let mut notes: Vec<String> = Vec::new();
    let mut out = Vec::new();
    let mut seen = HashSet::new();
    while budget > 0 && out.is_empty() {
        let mut user = describe_task(task, feedback);
        for n in &notes {
            let _ = write!(user, "\nYour last reply could not be used: {n}");
        }
        let text = client.complete(LAYOUT_PREAMBLE, &user, &mut budget)?;
        match parse_layouts(task, &text) {
            Ok((layouts, errors)) => {
                for rooms in layouts.into_iter().take(task.n_candidates) {
                    if seen.insert(layout_key(&rooms)) {
                        out.push(proposal(task, &rooms, "llm", "proposed by the layout model".into()));
                    }
                }
                if out.is_empty() {
                    notes.push(errors.first().cloned().unwrap_or("no layouts".into()));
                }
            }
            Err(e) => notes.push(e),
        }
    }
    if out.len() < task.n_candidates {
        for p in rule_layouts(task, feedback)? {
            if out.len() >= task.n_candidates {
                break;
            }
            if seen.insert(p.fingerprint()) {
                out.push(p);
            }
        }
    }
    Ok(out)
}

/// Proposes candidate layouts for one round.
///
/// The LLM backend falls back to rule layouts when the model's replies stay
/// unusable, and tops up a short reply with rule layouts.
pub fn layout_agent(
    task: &JointDesignTask,
    feedback: Option<&GlobalFeedback>,
    backend: &Backend,
) -> Result<Vec<LayoutProposal>, AgentError> {
    match backend {
        Backend::Rule => rule_layouts(task, feedback),
        Backend::Llm(client) => {
            feasibility(task)?;
            llm_layouts(task, feedback, client.as_ref())
        }
    }
}
