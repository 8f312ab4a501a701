//! Floor-plan model, 2D primitives, plan validation and wall-crossing queries.
//!
//! Walls are zero-thickness segments here; `thickness` is carried as metadata.
//! Rooms are axis-aligned rectangles.

mod crossings;
mod plan;
mod primitives;
mod validate;

pub use crossings::{wall_crossings, Crossing, SpatialIndex};
pub use plan::{FloorPlan, LoadError, Material, Opening, OpeningKind, Room, Wall, GEOM_TOL};
pub use primitives::{segment_contained_in, segment_intersect, Point2D, Rect, Segment};
pub use validate::{
    check_circulation, validate_plan, ArchitecturalRules, GeometryError, Violation, ViolationKind,
    DEFAULT_CIRCULATION_STEP,
};
