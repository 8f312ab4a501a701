use std::collections::{HashSet, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::crossings::SpatialIndex;
use super::plan::{FloorPlan, OpeningKind, GEOM_TOL};
use super::primitives::{segment_contained_in, Point2D, Segment};

pub const DEFAULT_CIRCULATION_STEP: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ViolationKind {
    NonFiniteCoordinate,
    InvalidBoundary,
    InvalidMaterial,
    DuplicateMaterial,
    UnknownMaterial,
    DegenerateWall,
    InvalidThickness,
    WallOutsideBoundary,
    MissingHostWall,
    OpeningOutOfRange,
    InvalidOpeningWidth,
    InvalidRoomSize,
    RoomOutsideBoundary,
    RoomOverlapViolation,
    RoomSizeViolation,
    RoomNotAnchored,
    DoorCountViolation,
    DoorWidthViolation,
    DoorMaterialViolation,
    MissingOuterDoor,
    CirculationViolation,
}

impl fmt::Display for ViolationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// A single broken invariant or rule, addressed by field path.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub kind: ViolationKind,
    pub path: String,
    pub message: String,
}

impl Violation {
    fn new(kind: ViolationKind, path: impl Into<String>, message: impl Into<String>) -> Self {
        Self {
            kind,
            path: path.into(),
            message: message.into(),
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} at {}: {}", self.kind, self.path, self.message)
    }
}

/// Task-level architectural rules layered on top of the type invariants.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ArchitecturalRules {
    /// Required room sizes as (width, depth); either orientation matches.
    /// Empty means room sizes are unconstrained.
    pub room_sizes: Vec<(f64, f64)>,
    /// Each room needs an edge lying on an outer wall.
    pub require_anchoring: bool,
    /// Each room needs exactly one door of this width, if set.
    pub door_width: Option<f64>,
    pub door_material: Option<String>,
    pub require_circulation: bool,
    pub circulation_step: f64,
}

impl Default for ArchitecturalRules {
    fn default() -> Self {
        Self {
            room_sizes: Vec::new(),
            require_anchoring: false,
            door_width: None,
            door_material: None,
            require_circulation: false,
            circulation_step: DEFAULT_CIRCULATION_STEP,
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("invalid plan: {0}")]
    InvalidPlan(String),
}

/// Reports every violated invariant; an empty list means the plan is valid.
pub fn validate_plan(plan: &FloorPlan, rules: Option<&ArchitecturalRules>) -> Vec<Violation> {
    let mut out = Vec::new();
    check_types(plan, &mut out);
    if let Some(rules) = rules {
        check_rules(plan, rules, &out.is_empty(), &mut out);
    }
    out
}

fn check_point(p: &Point2D, path: &str, out: &mut Vec<Violation>) -> bool {
    if p.is_finite() {
        true
    } else {
        out.push(Violation::new(
            ViolationKind::NonFiniteCoordinate,
            path,
            "coordinate is not finite",
        ));
        false
    }
}

fn check_types(plan: &FloorPlan, out: &mut Vec<Violation>) {
    use ViolationKind::*;
    let b = &plan.boundary;
    check_point(&b.origin, "boundary.origin", out);
    if !(b.width.is_finite() && b.width > 0.0 && b.depth.is_finite() && b.depth > 0.0) {
        out.push(Violation::new(
            InvalidBoundary,
            "boundary",
            format!("width and depth must be > 0 (got {} x {})", b.width, b.depth),
        ));
    }

    let mut names = HashSet::new();
    for (i, m) in plan.materials.iter().enumerate() {
        let path = format!("materials[{i}]");
        if m.name.is_empty() {
            out.push(Violation::new(InvalidMaterial, format!("{path}.name"), "name is empty"));
        }
        if !(m.attenuation.is_finite() && m.attenuation >= 0.0) {
            out.push(Violation::new(
                InvalidMaterial,
                format!("{path}.attenuation"),
                format!("attenuation must be >= 0 (got {})", m.attenuation),
            ));
        }
        if !names.insert(m.name.as_str()) {
            out.push(Violation::new(
                DuplicateMaterial,
                format!("{path}.name"),
                format!("material '{}' defined twice", m.name),
            ));
        }
    }

    for (i, w) in plan.walls.iter().enumerate() {
        let path = format!("walls[{i}]");
        let finite = check_point(&w.start, &format!("{path}.start"), out)
            & check_point(&w.end, &format!("{path}.end"), out);
        if finite && w.length() <= 1e-6 {
            out.push(Violation::new(
                DegenerateWall,
                path.clone(),
                "endpoints coincide (length <= 1e-6 m)",
            ));
        }
        if !(w.thickness.is_finite() && w.thickness > 0.0) {
            out.push(Violation::new(
                InvalidThickness,
                format!("{path}.thickness"),
                format!("thickness must be > 0 (got {})", w.thickness),
            ));
        }
        if plan.material(&w.material).is_none() {
            out.push(Violation::new(
                UnknownMaterial,
                format!("{path}.material"),
                format!("unknown material '{}'", w.material),
            ));
        }
        if finite && !(b.contains(&w.start, GEOM_TOL) && b.contains(&w.end, GEOM_TOL)) {
            out.push(Violation::new(
                WallOutsideBoundary,
                path,
                "endpoint lies outside the boundary",
            ));
        }
    }

    for (i, o) in plan.openings.iter().enumerate() {
        let path = format!("openings[{i}]");
        if plan.material(&o.material).is_none() {
            out.push(Violation::new(
                UnknownMaterial,
                format!("{path}.material"),
                format!("unknown material '{}'", o.material),
            ));
        }
        if !(o.width.is_finite() && o.width > 0.0) {
            out.push(Violation::new(
                InvalidOpeningWidth,
                format!("{path}.width"),
                format!("width must be > 0 (got {})", o.width),
            ));
        }
        match plan.walls.get(o.wall) {
            None => out.push(Violation::new(
                MissingHostWall,
                format!("{path}.wall"),
                format!("wall {} does not exist", o.wall),
            )),
            Some(w) => {
                let len = w.length();
                if !(o.offset >= 0.0 && o.offset + o.width <= len + GEOM_TOL) {
                    out.push(Violation::new(
                        OpeningOutOfRange,
                        format!("{path}.offset"),
                        format!(
                            "span [{}, {}] exceeds wall length {len}",
                            o.offset,
                            o.offset + o.width
                        ),
                    ));
                }
            }
        }
    }

    for (i, r) in plan.rooms.iter().enumerate() {
        let path = format!("rooms[{i}]");
        check_point(&r.origin, &format!("{path}.origin"), out);
        if !(r.width.is_finite() && r.width > 0.0 && r.depth.is_finite() && r.depth > 0.0) {
            out.push(Violation::new(
                InvalidRoomSize,
                path.clone(),
                format!("width and depth must be > 0 (got {} x {})", r.width, r.depth),
            ));
        } else if !b.contains_rect(&r.rect(), GEOM_TOL) {
            out.push(Violation::new(
                RoomOutsideBoundary,
                path.clone(),
                format!("room '{}' extends past the boundary", r.label),
            ));
        }
    }
    for i in 0..plan.rooms.len() {
        for j in (i + 1)..plan.rooms.len() {
            if plan.rooms[i].rect().interiors_overlap(&plan.rooms[j].rect(), GEOM_TOL) {
                out.push(Violation::new(
                    RoomOverlapViolation,
                    format!("rooms[{j}]"),
                    format!(
                        "room '{}' overlaps room '{}'",
                        plan.rooms[j].label, plan.rooms[i].label
                    ),
                ));
            }
        }
    }
}

fn size_key(w: f64, d: f64) -> (f64, f64) {
    (w.max(d), w.min(d))
}

fn check_rules(plan: &FloorPlan, rules: &ArchitecturalRules, types_ok: &bool, out: &mut Vec<Violation>) {
    use ViolationKind::*;
    if !rules.room_sizes.is_empty() {
        let mut want: Vec<_> = rules.room_sizes.iter().map(|&(w, d)| size_key(w, d)).collect();
        let mut have: Vec<_> = plan.rooms.iter().map(|r| size_key(r.width, r.depth)).collect();
        let by_key = |a: &(f64, f64), b: &(f64, f64)| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1));
        want.sort_by(by_key);
        have.sort_by(by_key);
        let matches = want.len() == have.len()
            && want
                .iter()
                .zip(&have)
                .all(|(a, b)| (a.0 - b.0).abs() <= GEOM_TOL && (a.1 - b.1).abs() <= GEOM_TOL);
        if !matches {
            out.push(Violation::new(
                RoomSizeViolation,
                "rooms",
                format!("room sizes {have:?} do not match required {want:?}"),
            ));
        }
    }

    let outer = plan.outer_edges();
    for (i, room) in plan.rooms.iter().enumerate() {
        let path = format!("rooms[{i}]");
        if rules.require_anchoring {
            let anchored = room
                .rect()
                .edges()
                .iter()
                .any(|e| outer.iter().any(|o| segment_contained_in(e, o, GEOM_TOL)));
            if !anchored {
                out.push(Violation::new(
                    RoomNotAnchored,
                    path.clone(),
                    format!("room '{}' has no edge on an outer wall", room.label),
                ));
            }
        }
        if let Some(width) = rules.door_width {
            let doors = plan.room_doors(room);
            if doors.len() != 1 {
                out.push(Violation::new(
                    DoorCountViolation,
                    path.clone(),
                    format!("room '{}' has {} doors, expected 1", room.label, doors.len()),
                ));
            }
            for d in doors {
                let door = &plan.openings[d];
                if (door.width - width).abs() > GEOM_TOL {
                    out.push(Violation::new(
                        DoorWidthViolation,
                        format!("openings[{d}].width"),
                        format!(
                            "door of room '{}' is {} m wide, rule requires {} m",
                            room.label, door.width, width
                        ),
                    ));
                }
                if let Some(mat) = &rules.door_material {
                    if &door.material != mat {
                        out.push(Violation::new(
                            DoorMaterialViolation,
                            format!("openings[{d}].material"),
                            format!("door material '{}', rule requires '{}'", door.material, mat),
                        ));
                    }
                }
            }
        }
    }

    if rules.require_circulation && *types_ok {
        match check_circulation(plan, rules.circulation_step) {
            Ok(true) => {}
            Ok(false) => out.push(Violation::new(
                CirculationViolation,
                "openings",
                "some room door is unreachable from the outer door",
            )),
            Err(_) => out.push(Violation::new(
                MissingOuterDoor,
                "openings",
                "no door on an outer wall",
            )),
        }
    }
}

/// Flood-fill grid over the plan boundary; moves between neighbouring cell
/// centres are blocked by any wall crossing that is not through a door.
struct CirculationGrid<'a> {
    plan: &'a FloorPlan,
    index: SpatialIndex,
    step: f64,
    ncols: usize,
    nrows: usize,
}

impl<'a> CirculationGrid<'a> {
    fn new(plan: &'a FloorPlan, step: f64) -> Self {
        let b = &plan.boundary;
        Self {
            plan,
            index: SpatialIndex::build(plan, 1.0_f64.max(step)),
            step,
            ncols: ((b.width / step) - 1e-9).ceil().max(1.0) as usize,
            nrows: ((b.depth / step) - 1e-9).ceil().max(1.0) as usize,
        }
    }

    fn center(&self, c: usize, r: usize) -> Point2D {
        let o = self.plan.boundary.origin;
        Point2D::new(
            o.x + (c as f64 + 0.5) * self.step,
            o.y + (r as f64 + 0.5) * self.step,
        )
    }

    fn cell_of(&self, p: &Point2D) -> Option<usize> {
        let o = self.plan.boundary.origin;
        let c = ((p.x - o.x) / self.step).floor();
        let r = ((p.y - o.y) / self.step).floor();
        if c < 0.0 || r < 0.0 || c >= self.ncols as f64 || r >= self.nrows as f64 {
            return None;
        }
        Some(r as usize * self.ncols + c as usize)
    }

    fn passable(&self, a: usize, b: usize) -> bool {
        let pa = self.center(a % self.ncols, a / self.ncols);
        let pb = self.center(b % self.ncols, b / self.ncols);
        self.index
            .wall_crossings(&Segment::new(pa, pb), self.plan)
            .iter()
            .all(|c| c.opening.is_some_and(|o| self.plan.openings[o].kind == OpeningKind::Door))
    }

    fn flood(&self, start: usize) -> Vec<bool> {
        let mut seen = vec![false; self.ncols * self.nrows];
        let mut queue = VecDeque::from([start]);
        seen[start] = true;
        while let Some(cell) = queue.pop_front() {
            let (c, r) = (cell % self.ncols, cell / self.ncols);
            let mut next = Vec::with_capacity(4);
            if c > 0 {
                next.push(cell - 1);
            }
            if c + 1 < self.ncols {
                next.push(cell + 1);
            }
            if r > 0 {
                next.push(cell - self.ncols);
            }
            if r + 1 < self.nrows {
                next.push(cell + self.ncols);
            }
            for n in next {
                if !seen[n] && self.passable(cell, n) {
                    seen[n] = true;
                    queue.push_back(n);
                }
            }
        }
        seen
    }

    /// Cells just either side of an opening's midpoint.
    fn door_cells(&self, opening: usize) -> Vec<usize> {
        let o = &self.plan.openings[opening];
        let Some(span) = self.plan.opening_span(o) else {
            return Vec::new();
        };
        let mid = span.point_at(0.5);
        let d = span.direction();
        let n = Point2D::new(-d.y, d.x).scale(0.5 * self.step / d.norm());
        [mid.add(&n), mid.sub(&n)]
            .iter()
            .filter_map(|p| self.cell_of(p))
            .collect()
    }
}

/// True iff every room door is reachable from the outer door by grid flood fill.
pub fn check_circulation(plan: &FloorPlan, grid_step: f64) -> Result<bool, GeometryError> {
    if !(grid_step > 0.0) {
        return Err(GeometryError::InvalidPlan("grid step must be > 0".into()));
    }
    let outer = plan.outer_doors();
    let Some(&entry) = outer.first() else {
        return Err(GeometryError::InvalidPlan("no outer door".into()));
    };
    let grid = CirculationGrid::new(plan, grid_step);
    let Some(&start) = grid.door_cells(entry).first() else {
        return Err(GeometryError::InvalidPlan("outer door lies outside the grid".into()));
    };
    let reached = grid.flood(start);
    for room in &plan.rooms {
        for door in plan.room_doors(room) {
            if !grid.door_cells(door).iter().any(|&c| reached[c]) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{Rect, Room};

    fn office() -> FloorPlan {
        let mut plan = FloorPlan::new(Rect::new(Point2D::new(0.0, 0.0), 20.0, 10.0));
        plan.add_material("concrete", 12.0).add_material("wood_door", 3.0);
        let [_, _, _, west] = plan.add_outer_walls("concrete", 0.3);
        // West wall runs from (0,10) down to (0,0); offset 5 is its middle.
        plan.add_centered_opening(west, 5.0, 1.0, OpeningKind::Door, "wood_door");
        plan
    }

    #[test]
    fn empty_office_circulates() {
        assert_eq!(check_circulation(&office(), 0.1), Ok(true));
    }

    #[test]
    fn missing_outer_door_is_an_error() {
        let mut plan = office();
        plan.openings.clear();
        assert!(check_circulation(&plan, 0.1).is_err());
    }

    #[test]
    fn two_overlapping_rooms() {
        let mut plan = office();
        plan.rooms.push(Room::new("A", Point2D::new(0.0, 0.0), 4.0, 3.0));
        plan.rooms.push(Room::new("B", Point2D::new(3.0, 2.0), 4.0, 3.0));
        let v = validate_plan(&plan, None);
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].kind, ViolationKind::RoomOverlapViolation);
    }

    #[test]
    fn narrow_door_under_rule() {
        let mut plan = office();
        plan.rooms.push(Room::new("A", Point2D::new(0.0, 0.0), 4.0, 3.0));
        let east = plan.add_wall(Point2D::new(4.0, 0.0), Point2D::new(4.0, 3.0), "concrete", 0.1);
        plan.add_wall(Point2D::new(0.0, 3.0), Point2D::new(4.0, 3.0), "concrete", 0.1);
        plan.add_centered_opening(east, 1.5, 0.6, OpeningKind::Door, "wood_door");
        let rules = ArchitecturalRules {
            door_width: Some(0.8),
            ..Default::default()
        };
        let kinds: Vec<_> = validate_plan(&plan, Some(&rules)).iter().map(|v| v.kind).collect();
        assert_eq!(kinds, vec![ViolationKind::DoorWidthViolation]);
    }

    #[test]
    fn door_into_sealed_room_fails_circulation() {
        // Room A (6x6) is sealed; room B sits inside it and its only door
        // opens into A.
        let mut plan = office();
        let a = Point2D::new(10.0, 2.0);
        for (p, q) in [
            (a, Point2D::new(16.0, 2.0)),
            (Point2D::new(16.0, 2.0), Point2D::new(16.0, 8.0)),
            (Point2D::new(16.0, 8.0), Point2D::new(10.0, 8.0)),
            (Point2D::new(10.0, 8.0), a),
        ] {
            plan.add_wall(p, q, "concrete", 0.1);
        }
        let b_east = plan.add_wall(Point2D::new(14.0, 3.0), Point2D::new(14.0, 6.0), "concrete", 0.1);
        plan.add_wall(Point2D::new(11.0, 3.0), Point2D::new(14.0, 3.0), "concrete", 0.1);
        plan.add_wall(Point2D::new(11.0, 6.0), Point2D::new(14.0, 6.0), "concrete", 0.1);
        plan.add_wall(Point2D::new(11.0, 3.0), Point2D::new(11.0, 6.0), "concrete", 0.1);
        plan.add_centered_opening(b_east, 1.5, 0.8, OpeningKind::Door, "wood_door");
        plan.rooms.push(Room::new("B", Point2D::new(11.0, 3.0), 3.0, 3.0));
        assert_eq!(check_circulation(&plan, 0.1), Ok(false));
    }

    #[test]
    fn room_sizes_match_either_orientation() {
        let mut plan = office();
        plan.rooms.push(Room::new("A", Point2D::new(0.0, 0.0), 3.0, 4.0));
        let rules = ArchitecturalRules {
            room_sizes: vec![(4.0, 3.0)],
            ..Default::default()
        };
        assert!(validate_plan(&plan, Some(&rules)).is_empty());
        let rules = ArchitecturalRules {
            room_sizes: vec![(4.0, 3.0), (4.0, 3.0)],
            ..Default::default()
        };
        assert_eq!(validate_plan(&plan, Some(&rules))[0].kind, ViolationKind::RoomSizeViolation);
    }
}
