use serde::{Deserialize, Serialize};

use crate::geometry::{
    ArchitecturalRules, FloorPlan, Material, OpeningKind, Point2D, Rect, Room, Segment, DEFAULT_CIRCULATION_STEP,
    GEOM_TOL,
};
use crate::optimizers::PlanningTask;
use crate::propagation::{RadioConfig, DEFAULT_CELL_SIZE};

use super::AgentError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    South,
    East,
    North,
    West,
}

impl Side {
    pub const ALL: [Side; 4] = [Side::South, Side::East, Side::North, Side::West];

    /// Position in [`Rect::edges`] order.
    pub fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            Side::South => "south",
            Side::East => "east",
            Side::North => "north",
            Side::West => "west",
        }
    }

    pub fn parse(s: &str) -> Option<Side> {
        Side::ALL.into_iter().find(|side| side.name().eq_ignore_ascii_case(s.trim()))
    }
}

/// Entrance door in an outer wall.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OuterDoorSpec {
    pub side: Side,
    /// Door center: x for south/north walls, y for east/west walls.
    pub center: f64,
    pub width: f64,
    pub material: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoomSpec {
    pub label: String,
    pub width: f64,
    pub depth: f64,
}

/// Joint layout and network design problem.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct JointDesignTask {
    pub width: f64,
    pub depth: f64,
    pub outer_door: OuterDoorSpec,
    pub rooms: Vec<RoomSpec>,
    pub door_width: f64,
    pub door_material: String,
    pub materials: Vec<Material>,
    pub outer_wall_material: String,
    pub room_wall_material: String,
    pub wall_thickness: f64,
    pub coverage_target: f64,
    pub threshold: f64,
    pub max_aps: usize,
    pub max_iterations: usize,
    pub cell_size: f64,
    pub radio: RadioConfig,
    pub w_coverage: f64,
    pub w_rationality: f64,
    pub n_candidates: usize,
    pub max_rounds: usize,
    pub seed: u64,
    /// Minimum clear distance between generated rooms, meters.
    pub room_gap: f64,
}

pub fn default_materials() -> Vec<Material> {
    vec![
        Material::new("concrete", 12.0),
        Material::new("brick", 8.0),
        Material::new("drywall", 3.0),
        Material::new("glass_window", 2.0),
        Material::new("wood_door", 3.0),
    ]
}

/// Radio settings of the joint design task: the default model with a
/// pathloss exponent of 2.5 for a partitioned office.
pub fn office_radio() -> RadioConfig {
    RadioConfig {
        pathloss_exponent: 2.5,
        ..RadioConfig::default()
    }
}

impl Default for JointDesignTask {
    fn default() -> Self {
        let rooms = ["A", "B", "C", "D"]
            .iter()
            .map(|l| RoomSpec {
                label: (*l).to_string(),
                width: 4.0,
                depth: 3.0,
            })
            .collect();
        Self {
            width: 20.0,
            depth: 10.0,
            outer_door: OuterDoorSpec {
                side: Side::West,
                center: 5.0,
                width: 1.0,
                material: "wood_door".into(),
            },
            rooms,
            door_width: 0.8,
            door_material: "wood_door".into(),
            materials: default_materials(),
            outer_wall_material: "concrete".into(),
            room_wall_material: "concrete".into(),
            wall_thickness: 0.2,
            coverage_target: 0.95,
            threshold: 80.0,
            max_aps: 4,
            max_iterations: 10,
            cell_size: DEFAULT_CELL_SIZE,
            radio: office_radio(),
            w_coverage: 0.7,
            w_rationality: 0.3,
            n_candidates: 10,
            max_rounds: 5,
            seed: 0,
            room_gap: 1.0,
        }
    }
}

impl JointDesignTask {
    pub fn validate(&self) -> Result<(), AgentError> {
        let bad = |m: String| Err(AgentError::InvalidTask(m));
        if !(self.w_coverage >= 0.0 && self.w_rationality >= 0.0)
            || (self.w_coverage + self.w_rationality - 1.0).abs() > 1e-9
        {
            return bad(format!(
                "weights must be nonnegative and sum to 1 (got {} + {})",
                self.w_coverage, self.w_rationality
            ));
        }
        if self.n_candidates == 0 {
            return bad("n_candidates must be >= 1".into());
        }
        if self.max_rounds == 0 {
            return bad("max_rounds must be >= 1".into());
        }
        if !(self.door_width > 0.0) {
            return bad(format!("door width must be > 0 (got {})", self.door_width));
        }
        if !(self.room_gap >= 0.0) {
            return bad("room_gap must be >= 0".into());
        }
        if !(self.width > 0.0 && self.depth > 0.0 && self.width.is_finite() && self.depth.is_finite()) {
            return Err(AgentError::NoFeasibleLayout(format!(
                "boundary {} x {} has no area",
                self.width, self.depth
            )));
        }
        self.planning_task(self.base_plan()).validate()?;
        Ok(())
    }

    pub fn boundary(&self) -> Rect {
        Rect::new(Point2D::new(0.0, 0.0), self.width, self.depth)
    }

    pub fn rules(&self) -> ArchitecturalRules {
        ArchitecturalRules {
            room_sizes: self.rooms.iter().map(|r| (r.width, r.depth)).collect(),
            require_anchoring: true,
            door_width: Some(self.door_width),
            door_material: Some(self.door_material.clone()),
            require_circulation: true,
            circulation_step: DEFAULT_CIRCULATION_STEP,
        }
    }

    pub fn planning_task(&self, plan: FloorPlan) -> PlanningTask {
        PlanningTask {
            plan,
            coverage_target: self.coverage_target,
            threshold: self.threshold,
            max_aps: self.max_aps,
            max_iterations: self.max_iterations,
            cell_size: self.cell_size,
            radio: self.radio,
        }
    }

    /// Boundary walls, materials and the entrance door, without rooms.
    pub fn base_plan(&self) -> FloorPlan {
        let mut plan = FloorPlan::new(self.boundary());
        for m in &self.materials {
            plan.add_material(&m.name, m.attenuation);
        }
        let walls = plan.add_outer_walls(&self.outer_wall_material, self.wall_thickness);
        let d = &self.outer_door;
        let offset = match d.side {
            Side::South | Side::East => d.center,
            Side::North => self.width - d.center,
            Side::West => self.depth - d.center,
        };
        plan.add_centered_opening(walls[d.side.index()], offset, d.width, OpeningKind::Door, &d.material);
        plan
    }

    /// Area next to the entrance that rooms must leave free.
    pub fn entrance_zone(&self) -> Rect {
        let d = &self.outer_door;
        let half = d.width / 2.0 + 0.5;
        let reach = 1.5;
        match d.side {
            Side::South => Rect::new(Point2D::new(d.center - half, 0.0), 2.0 * half, reach),
            Side::North => Rect::new(Point2D::new(d.center - half, self.depth - reach), 2.0 * half, reach),
            Side::West => Rect::new(Point2D::new(0.0, d.center - half), reach, 2.0 * half),
            Side::East => Rect::new(Point2D::new(self.width - reach, d.center - half), reach, 2.0 * half),
        }
    }

    /// Base plan plus `rooms` and a partition wall on every room edge that is
    /// not on the boundary. Edges shared by two rooms get one wall.
    pub fn build_layout(&self, rooms: &[Room]) -> FloorPlan {
        let mut plan = self.base_plan();
        let outer = plan.outer_edges();
        let mut added: Vec<Segment> = Vec::new();
        for room in rooms {
            for edge in room.rect().edges() {
                if outer.iter().any(|o| crate::geometry::segment_contained_in(&edge, o, GEOM_TOL)) {
                    continue;
                }
                let dup = added.iter().any(|s| same_segment(s, &edge));
                if !dup {
                    plan.add_wall(edge.a, edge.b, &self.room_wall_material, self.wall_thickness);
                    added.push(edge);
                }
            }
            plan.rooms.push(room.clone());
        }
        plan
    }
}

fn same_segment(a: &Segment, b: &Segment) -> bool {
    let close = |p: &Point2D, q: &Point2D| p.distance(q) <= GEOM_TOL;
    (close(&a.a, &b.a) && close(&a.b, &b.b)) || (close(&a.a, &b.b) && close(&a.b, &b.a))
}

/// Index of the wall lying exactly on `edge`, in either direction.
pub fn wall_index(plan: &FloorPlan, edge: &Segment) -> Option<usize> {
    plan.walls.iter().position(|w| same_segment(&w.segment(), edge))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::validate_plan;

    #[test]
    fn base_plan_is_valid() {
        let t = JointDesignTask::default();
        let plan = t.base_plan();
        assert!(validate_plan(&plan, None).is_empty());
        let door = &plan.openings[0];
        let span = plan.opening_span(door).unwrap();
        assert!((span.point_at(0.5).y - 5.0).abs() < 1e-12);
        assert_eq!(span.point_at(0.5).x, 0.0);
    }

    #[test]
    fn shared_edges_get_one_wall() {
        let t = JointDesignTask::default();
        let rooms = [
            Room::new("A", Point2D::new(0.0, 0.0), 4.0, 3.0),
            Room::new("B", Point2D::new(4.0, 0.0), 4.0, 3.0),
        ];
        let plan = t.build_layout(&rooms);
        // 4 outer + A (north, east) + B (north, east); A's east is B's west.
        assert_eq!(plan.walls.len(), 4 + 2 + 2);
    }

    #[test]
    fn weights_must_sum_to_one() {
        let t = JointDesignTask {
            w_coverage: 0.5,
            ..Default::default()
        };
        assert!(matches!(t.validate(), Err(AgentError::InvalidTask(_))));
        let t = JointDesignTask {
            width: 0.0,
            ..Default::default()
        };
        assert!(matches!(t.validate(), Err(AgentError::NoFeasibleLayout(_))));
    }
}
