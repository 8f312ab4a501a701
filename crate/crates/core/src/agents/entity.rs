use std::fmt::Write as _;

use serde_json::Value;

use crate::geometry::{
    check_circulation, segment_contained_in, wall_crossings, FloorPlan, OpeningKind, Point2D, Room, Segment,
    DEFAULT_CIRCULATION_STEP, GEOM_TOL,
};
use crate::llm::extract_object;

use super::layout::LayoutProposal;
use super::task::{wall_index, JointDesignTask, Side};
use super::{AgentError, Backend};

/// Interior edges of `room` with the free distance in front of each, best first.
fn door_sides(plan: &FloorPlan, room: &Room) -> Vec<(Side, f64)> {
    let outer = plan.outer_edges();
    let reach = plan.boundary.width.hypot(plan.boundary.depth);
    let mut sides: Vec<(Side, f64)> = Side::ALL
        .into_iter()
        .zip(room.rect().edges())
        .filter(|(_, e)| !outer.iter().any(|o| segment_contained_in(e, o, GEOM_TOL)))
        .map(|(side, e)| {
            let d = e.direction();
            let n = Point2D::new(d.y, -d.x).scale(1.0 / d.norm());
            let mid = e.point_at(0.5);
            let ray = Segment::new(mid.add(&n.scale(1e-6)), mid.add(&n.scale(reach)));
            let free = wall_crossings(&ray, plan)
                .iter()
                .map(|c| c.distance)
                .fold(reach, f64::min);
            (side, free)
        })
        .collect();
    sides.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.index().cmp(&b.0.index())));
    sides
}

fn with_doors(task: &JointDesignTask, plan: &FloorPlan, choice: &[Side]) -> Result<FloorPlan, AgentError> {
    let mut out = plan.clone();
    for (room, side) in plan.rooms.iter().zip(choice) {
        let edge = room.rect().edges()[side.index()];
        let wall = wall_index(&out, &edge).ok_or_else(|| {
            AgentError::NoValidDoorPlacement(format!("room '{}' has no wall on its {} side", room.label, side.name()))
        })?;
        let len = out.walls[wall].length();
        out.add_centered_opening(wall, len / 2.0, task.door_width, OpeningKind::Door, &task.door_material);
    }
    Ok(out)
}

fn circulates(plan: &FloorPlan) -> bool {
    check_circulation(plan, DEFAULT_CIRCULATION_STEP).unwrap_or(false)
}

/// Doors from `preferred` where possible; if circulation fails, tries the
/// other sides of one room at a time.
fn place_doors(task: &JointDesignTask, plan: &FloorPlan, preferred: Vec<Option<Side>>) -> Result<FloorPlan, AgentError> {
    let options: Vec<Vec<Side>> = plan
        .rooms
        .iter()
        .zip(&preferred)
        .map(|(room, pref)| {
            let mut sides: Vec<Side> = door_sides(plan, room).into_iter().map(|(s, _)| s).collect();
            if let Some(p) = pref.filter(|p| sides.contains(p)) {
                sides.retain(|s| *s != p);
                sides.insert(0, p);
            }
            sides
        })
        .collect();
    if let Some((room, _)) = plan.rooms.iter().zip(&options).find(|(_, o)| o.is_empty()) {
        return Err(AgentError::NoValidDoorPlacement(format!(
            "room '{}' has no interior wall",
            room.label
        )));
    }
    let first: Vec<Side> = options.iter().map(|o| o[0]).collect();
    let candidate = with_doors(task, plan, &first)?;
    if circulates(&candidate) {
        return Ok(candidate);
    }
    for (i, opts) in options.iter().enumerate() {
        for &side in &opts[1..] {
            let mut choice = first.clone();
            choice[i] = side;
            let candidate = with_doors(task, plan, &choice)?;
            if circulates(&candidate) {
                return Ok(candidate);
            }
        }
    }
    Err(AgentError::NoValidDoorPlacement(
        "no door arrangement connects every room to the entrance".into(),
    ))
}

pub const ENTITY_PREAMBLE: &str = "You are the entity agent of a building design team. \
You choose which wall of each room gets its door. Reply with one JSON object.";

pub(crate) fn parse_door_sides(plan: &FloorPlan, text: &str) -> Result<Vec<Option<Side>>, String> {
    let obj = extract_object(text, "doors").ok_or("no JSON object with a \"doors\" array found")?;
    let items = obj["doors"].as_array().ok_or("\"doors\" must be an array")?;
    let mut out = vec![None; plan.rooms.len()];
    for item in items {
        let label = item.get("room").and_then(Value::as_str).ok_or("door without \"room\"")?;
        let side = item
            .get("side")
            .and_then(Value::as_str)
            .and_then(Side::parse)
            .ok_or(format!("door of room '{label}' has no valid \"side\""))?;
        let i = plan
            .rooms
            .iter()
            .position(|r| r.label == label)
            .ok_or(format!("unknown room '{label}'"))?;
        let legal = door_sides(plan, &plan.rooms[i]);
        if !legal.iter().any(|(s, _)| *s == side) {
            return Err(format!("room '{label}' has no interior wall on its {} side", side.name()));
        }
        out[i] = Some(side);
    }
    Ok(out)
}

fn door_prompt(plan: &FloorPlan, task: &JointDesignTask) -> String {
    let mut s = String::new();
    crate::llm::describe_plan(plan, &mut s);
    let _ = write!(
        s,
        "Each room needs exactly one {:.2} m {} door on a wall that is not an outer wall, \
         and every room must be reachable from the entrance. \
         Answer with {{\"doors\": [{{\"room\": \"A\", \"side\": \"north|south|east|west\"}}, ...]}}",
        task.door_width, task.door_material
    );
    s
}

/// Adds one door per room and returns the completed proposal.
///
/// The rule backend puts each door in the middle of the interior wall facing
/// the most free space. The LLM backend picks the walls; sides it leaves out
/// or gets wrong fall back to the rule choice.
pub fn entity_agent(
    proposal: &LayoutProposal,
    task: &JointDesignTask,
    backend: &Backend,
) -> Result<LayoutProposal, AgentError> {
    let plan = &proposal.plan;
    let mut preferred = vec![None; plan.rooms.len()];
    if let Backend::Llm(client) = backend {
        let mut budget = client.max_attempts();
        let base = door_prompt(plan, task);
        let mut notes = String::new();
        while budget > 0 {
            let text = client.complete(ENTITY_PREAMBLE, &format!("{base}{notes}"), &mut budget)?;
            match parse_door_sides(plan, &text) {
                Ok(sides) => {
                    preferred = sides;
                    break;
                }
                Err(e) => {
                    let _ = write!(notes, "\nYour last reply could not be used: {e}");
                }
            }
        }
    }
    let plan = place_doors(task, plan, preferred)?;
    Ok(LayoutProposal {
        plan,
        provenance: proposal.provenance.clone(),
        rationale: proposal.rationale.clone(),
    })
}
