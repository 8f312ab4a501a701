//! Reference plans and tasks shipped with the crate.
//!
//! The same plans are stored as JSON under `data/`; a test keeps the two in
//! sync.

use crate::agents::{entity_agent, Backend, JointDesignTask, LayoutProposal};
use crate::geometry::{FloorPlan, OpeningKind, Point2D, Rect, Room};
use crate::propagation::RadioConfig;

/// Planning knowledge handed to LLM proposers.
pub const KNOWLEDGE: &str = include_str!("../data/knowledge.txt");

/// The fixed office layout used as the comparison baseline for joint design.
///
/// Four 3 x 4 m rooms in two pairs at opposite corners, doors placed by the
/// rule entity agent. In each pair the corner room sits behind its
/// neighbour when seen from most of the open floor.
pub fn reference_office() -> FloorPlan {
    let task = JointDesignTask::default();
    let rooms = [
        Room::new("A", Point2D::new(0.0, 0.0), 3.0, 4.0),
        Room::new("B", Point2D::new(3.0, 0.0), 3.0, 4.0),
        Room::new("C", Point2D::new(14.0, 6.0), 3.0, 4.0),
        Room::new("D", Point2D::new(17.0, 6.0), 3.0, 4.0),
    ];
    let layout = LayoutProposal {
        plan: task.build_layout(&rooms),
        provenance: "baseline".into(),
        rationale: String::new(),
    };
    entity_agent(&layout, &task, &Backend::Rule)
        .expect("baseline rooms have interior walls")
        .plan
}

/// A 30 x 20 m building of three 10 m wings split by reinforced concrete
/// walls. Each wing has a small central hall with six concrete offices
/// around it, all opening onto the hall.
pub fn reference_complex() -> FloorPlan {
    let mut plan = FloorPlan::new(Rect::new(Point2D::new(0.0, 0.0), 30.0, 20.0));
    for m in crate::agents::default_materials() {
        plan.add_material(&m.name, m.attenuation);
    }
    plan.add_material("reinforced_concrete", 25.0);
    let [south, _, north, west] = plan.add_outer_walls("concrete", 0.3);
    plan.add_centered_opening(west, 10.0, 1.2, OpeningKind::Door, "wood_door");
    for x in [2.5, 7.5, 12.5, 17.5, 22.5, 27.5] {
        plan.add_centered_opening(south, x, 1.5, OpeningKind::Window, "glass_window");
        plan.add_centered_opening(north, 30.0 - x, 1.5, OpeningKind::Window, "glass_window");
    }
    for x in [10.0, 20.0] {
        plan.add_wall(Point2D::new(x, 0.0), Point2D::new(x, 20.0), "reinforced_concrete", 0.3);
    }
    for (wing, x0) in ["W", "C", "E"].into_iter().zip([0.0, 10.0, 20.0]) {
        let p = |x: f64, y: f64| Point2D::new(x0 + x, y);
        let south_front = plan.add_wall(p(0.0, 7.0), p(10.0, 7.0), "concrete", 0.2);
        let north_front = plan.add_wall(p(0.0, 13.0), p(10.0, 13.0), "concrete", 0.2);
        for wall in [south_front, north_front] {
            plan.add_centered_opening(wall, 4.0, 0.9, OpeningKind::Door, "wood_door");
            plan.add_centered_opening(wall, 6.0, 0.9, OpeningKind::Door, "wood_door");
        }
        plan.add_wall(p(5.0, 0.0), p(5.0, 7.0), "concrete", 0.2);
        plan.add_wall(p(5.0, 13.0), p(5.0, 20.0), "concrete", 0.2);
        for x in [3.0, 7.0] {
            let side = plan.add_wall(p(x, 7.0), p(x, 13.0), "concrete", 0.2);
            plan.add_centered_opening(side, 3.0, 0.9, OpeningKind::Door, "wood_door");
        }
        let rooms = [
            ("S1", 0.0, 0.0, 5.0, 7.0),
            ("S2", 5.0, 0.0, 5.0, 7.0),
            ("W", 0.0, 7.0, 3.0, 6.0),
            ("HALL", 3.0, 7.0, 4.0, 6.0),
            ("E", 7.0, 7.0, 3.0, 6.0),
            ("N1", 0.0, 13.0, 5.0, 7.0),
            ("N2", 5.0, 13.0, 5.0, 7.0),
        ];
        for (label, x, y, w, d) in rooms {
            plan.rooms.push(Room::new(format!("{wing}-{label}"), p(x, y), w, d));
        }
    }
    plan
}

/// Radio settings of the deployment comparison on [`reference_complex`]:
/// 5.2 GHz with the free-space loss at 1 m and a dense-building exponent.
pub fn complex_radio() -> RadioConfig {
    RadioConfig {
        frequency_mhz: 5200.0,
        reference_pathloss: 46.77,
        reference_distance: 1.0,
        pathloss_exponent: 4.1,
    }
}
