use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::primitives::{segment_contained_in, Point2D, Rect, Segment};
use super::validate::{validate_plan, Violation};

/// Containment and collinearity tolerance, in meters.
pub const GEOM_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Material {
    pub name: String,
    /// Loss per crossing, dB.
    pub attenuation: f64,
}

impl Material {
    pub fn new(name: impl Into<String>, attenuation: f64) -> Self {
        Self {
            name: name.into(),
            attenuation,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Wall {
    pub start: Point2D,
    pub end: Point2D,
    pub material: String,
    pub thickness: f64,
}

impl Wall {
    pub fn new(start: Point2D, end: Point2D, material: impl Into<String>, thickness: f64) -> Self {
        Self {
            start,
            end,
            material: material.into(),
            thickness,
        }
    }

    pub fn segment(&self) -> Segment {
        Segment::new(self.start, self.end)
    }

    pub fn length(&self) -> f64 {
        self.start.distance(&self.end)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OpeningKind {
    Door,
    Window,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Opening {
    /// Index into the plan's wall list.
    pub wall: usize,
    /// Distance along the host wall from its start point.
    pub offset: f64,
    pub width: f64,
    pub kind: OpeningKind,
    pub material: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Room {
    pub label: String,
    pub origin: Point2D,
    pub width: f64,
    pub depth: f64,
}

impl Room {
    pub fn new(label: impl Into<String>, origin: Point2D, width: f64, depth: f64) -> Self {
        Self {
            label: label.into(),
            origin,
            width,
            depth,
        }
    }

    pub fn rect(&self) -> Rect {
        Rect::new(self.origin, self.width, self.depth)
    }
}

/// The indoor environment: outer boundary, partitions, openings and rooms.
///
/// Fields are plain data so plans can be built programmatically and checked
/// with [`validate_plan`]; [`FloorPlan::from_json_str`] enforces the type
/// invariants on load.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FloorPlan {
    pub boundary: Rect,
    #[serde(default)]
    pub materials: Vec<Material>,
    #[serde(default)]
    pub walls: Vec<Wall>,
    #[serde(default)]
    pub openings: Vec<Opening>,
    #[serde(default)]
    pub rooms: Vec<Room>,
}

#[derive(Debug, Error)]
pub enum LoadError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("invalid plan: {}", .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    Invalid(Vec<Violation>),
}

impl LoadError {
    pub(crate) fn from_json(err: serde_json::Error) -> Self {
        LoadError::Parse {
            line: err.line(),
            column: err.column(),
            message: err.to_string(),
        }
    }
}

impl FloorPlan {
    pub fn new(boundary: Rect) -> Self {
        Self {
            boundary,
            materials: Vec::new(),
            walls: Vec::new(),
            openings: Vec::new(),
            rooms: Vec::new(),
        }
    }

    /// Parses a plan document without checking invariants.
    pub fn parse_unchecked(text: &str) -> Result<Self, LoadError> {
        serde_json::from_str(text).map_err(LoadError::from_json)
    }

    /// Parses a plan document and rejects it if any type invariant fails.
    pub fn from_json_str(text: &str) -> Result<Self, LoadError> {
        let plan = Self::parse_unchecked(text)?;
        let violations = validate_plan(&plan, None);
        if violations.is_empty() {
            Ok(plan)
        } else {
            Err(LoadError::Invalid(violations))
        }
    }

    pub fn read_unchecked(path: impl AsRef<Path>) -> Result<Self, LoadError> {
        Self::parse_unchecked(&read_text(path.as_ref())?)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, LoadError> {
        Self::from_json_str(&read_text(path.as_ref())?)
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("plan serializes")
    }

    pub fn material(&self, name: &str) -> Option<&Material> {
        self.materials.iter().find(|m| m.name == name)
    }

    /// Attenuation of a named material; unknown names contribute nothing.
    pub fn attenuation(&self, name: &str) -> f64 {
        self.material(name).map_or(0.0, |m| m.attenuation)
    }

    pub fn centroid(&self) -> Point2D {
        self.boundary.center()
    }

    pub fn outer_edges(&self) -> [Segment; 4] {
        self.boundary.edges()
    }

    /// A wall is outer when it lies on one of the boundary edges.
    pub fn is_outer_wall(&self, wall: usize) -> bool {
        let seg = self.walls[wall].segment();
        self.outer_edges()
            .iter()
            .any(|edge| segment_contained_in(&seg, edge, GEOM_TOL))
    }

    /// The segment an opening occupies on its host wall.
    pub fn opening_span(&self, opening: &Opening) -> Option<Segment> {
        let wall = self.walls.get(opening.wall)?;
        let len = wall.length();
        if len <= 0.0 {
            return None;
        }
        let seg = wall.segment();
        Some(Segment::new(
            seg.point_at(opening.offset / len),
            seg.point_at((opening.offset + opening.width) / len),
        ))
    }

    /// Indices of doors cut into outer walls.
    pub fn outer_doors(&self) -> Vec<usize> {
        self.openings
            .iter()
            .enumerate()
            .filter(|(_, o)| {
                o.kind == OpeningKind::Door && o.wall < self.walls.len() && self.is_outer_wall(o.wall)
            })
            .map(|(i, _)| i)
            .collect()
    }

    /// Indices of doors lying on the perimeter of `room`.
    pub fn room_doors(&self, room: &Room) -> Vec<usize> {
        let edges = room.rect().edges();
        self.openings
            .iter()
            .enumerate()
            .filter(|(_, o)| o.kind == OpeningKind::Door)
            .filter(|(_, o)| {
                self.opening_span(o).is_some_and(|span| {
                    edges
                        .iter()
                        .any(|edge| segment_contained_in(&span, edge, GEOM_TOL))
                })
            })
            .map(|(i, _)| i)
            .collect()
    }

    pub fn add_material(&mut self, name: &str, attenuation: f64) -> &mut Self {
        if self.material(name).is_none() {
            self.materials.push(Material::new(name, attenuation));
        }
        self
    }

    /// Appends a wall and returns its index.
    pub fn add_wall(&mut self, start: Point2D, end: Point2D, material: &str, thickness: f64) -> usize {
        self.walls.push(Wall::new(start, end, material, thickness));
        self.walls.len() - 1
    }

    /// Adds the four boundary walls.
    pub fn add_outer_walls(&mut self, material: &str, thickness: f64) -> [usize; 4] {
        let edges = self.outer_edges();
        edges.map(|e| self.add_wall(e.a, e.b, material, thickness))
    }

    pub fn add_opening(
        &mut self,
        wall: usize,
        offset: f64,
        width: f64,
        kind: OpeningKind,
        material: &str,
    ) -> usize {
        self.openings.push(Opening {
            wall,
            offset,
            width,
            kind,
            material: material.to_string(),
        });
        self.openings.len() - 1
    }

    /// Centers an opening of `width` at `center_offset` along `wall`.
    pub fn add_centered_opening(
        &mut self,
        wall: usize,
        center_offset: f64,
        width: f64,
        kind: OpeningKind,
        material: &str,
    ) -> usize {
        self.add_opening(wall, center_offset - width / 2.0, width, kind, material)
    }

    /// Stable content hash of the plan (hex SHA-256 of its canonical JSON).
    pub fn fingerprint(&self) -> String {
        crate::fingerprint(&serde_json::to_vec(self).expect("plan serializes"))
    }
}

fn read_text(path: &Path) -> Result<String, LoadError> {
    std::fs::read_to_string(path).map_err(|source| LoadError::Io {
        path: path.display().to_string(),
        source,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_error_carries_line() {
        let err = FloorPlan::parse_unchecked("{\n  \"boundary\": 3\n}").unwrap_err();
        match err {
            LoadError::Parse { line, .. } => assert_eq!(line, 2),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn loader_rejects_invalid_with_field_path() {
        let text = r#"{
            "boundary": {"origin": {"x": 0, "y": 0}, "width": 10, "depth": 5},
            "materials": [{"name": "concrete", "attenuation": 12}],
            "walls": [{"start": {"x": 1, "y": 1}, "end": {"x": 1, "y": 4}, "material": "concrete", "thickness": -0.2}]
        }"#;
        let err = FloorPlan::from_json_str(text).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("walls[0].thickness"), "{msg}");
    }

    #[test]
    fn door_membership() {
        let mut plan = FloorPlan::new(Rect::new(Point2D::new(0.0, 0.0), 10.0, 5.0));
        plan.add_material("wood", 3.0).add_material("concrete", 12.0);
        let w = plan.add_wall(Point2D::new(4.0, 0.0), Point2D::new(4.0, 3.0), "concrete", 0.1);
        plan.add_centered_opening(w, 1.5, 0.8, OpeningKind::Door, "wood");
        plan.rooms
            .push(Room::new("A", Point2D::new(0.0, 0.0), 4.0, 3.0));
        assert_eq!(plan.room_doors(&plan.rooms[0].clone()), vec![0]);
        assert!(plan.outer_doors().is_empty());
    }
}
