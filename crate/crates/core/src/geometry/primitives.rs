use serde::{Deserialize, Serialize};

/// Parametric tolerance used to reject crossings that land on a segment endpoint.
pub(crate) const PARAM_EPS: f64 = 1e-9;

/// Point in the floor-plan frame, in meters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point2D {
    pub x: f64,
    pub y: f64,
}

impl Point2D {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    pub fn distance(&self, other: &Point2D) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    pub fn sub(&self, other: &Point2D) -> Point2D {
        Point2D::new(self.x - other.x, self.y - other.y)
    }

    pub fn add(&self, other: &Point2D) -> Point2D {
        Point2D::new(self.x + other.x, self.y + other.y)
    }

    pub fn scale(&self, k: f64) -> Point2D {
        Point2D::new(self.x * k, self.y * k)
    }

    pub fn dot(&self, other: &Point2D) -> f64 {
        self.x * other.x + self.y * other.y
    }

    pub fn cross(&self, other: &Point2D) -> f64 {
        self.x * other.y - self.y * other.x
    }

    pub fn norm(&self) -> f64 {
        self.x.hypot(self.y)
    }

    /// Lexicographic (x, y) ordering used for deterministic tie-breaks.
    pub fn lex_cmp(&self, other: &Point2D) -> std::cmp::Ordering {
        self.x
            .total_cmp(&other.x)
            .then_with(|| self.y.total_cmp(&other.y))
    }
}

impl std::fmt::Display for Point2D {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({:.2}, {:.2})", self.x, self.y)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment {
    pub a: Point2D,
    pub b: Point2D,
}

impl Segment {
    pub const fn new(a: Point2D, b: Point2D) -> Self {
        Self { a, b }
    }

    pub fn length(&self) -> f64 {
        self.a.distance(&self.b)
    }

    pub fn direction(&self) -> Point2D {
        self.b.sub(&self.a)
    }

    pub fn reversed(&self) -> Segment {
        Segment::new(self.b, self.a)
    }

    pub fn point_at(&self, t: f64) -> Point2D {
        self.a.add(&self.direction().scale(t))
    }

    /// Euclidean distance from `p` to the closest point of the segment.
    pub fn distance_to_point(&self, p: &Point2D) -> f64 {
        let d = self.direction();
        let len2 = d.dot(&d);
        if len2 == 0.0 {
            return self.a.distance(p);
        }
        let t = (p.sub(&self.a).dot(&d) / len2).clamp(0.0, 1.0);
        self.point_at(t).distance(p)
    }

    /// Parameter in [0, 1] of the orthogonal projection of `p`, clamped.
    pub fn project(&self, p: &Point2D) -> f64 {
        let d = self.direction();
        let len2 = d.dot(&d);
        if len2 == 0.0 {
            return 0.0;
        }
        (p.sub(&self.a).dot(&d) / len2).clamp(0.0, 1.0)
    }

    /// Axis-aligned bounding box as (min, max).
    pub fn bbox(&self) -> (Point2D, Point2D) {
        (
            Point2D::new(self.a.x.min(self.b.x), self.a.y.min(self.b.y)),
            Point2D::new(self.a.x.max(self.b.x), self.a.y.max(self.b.y)),
        )
    }

    /// Liang-Barsky clip test: does the segment touch the closed box?
    pub fn touches_box(&self, min: &Point2D, max: &Point2D) -> bool {
        let d = self.direction();
        let mut t0 = 0.0_f64;
        let mut t1 = 1.0_f64;
        for (p, q) in [
            (-d.x, self.a.x - min.x),
            (d.x, max.x - self.a.x),
            (-d.y, self.a.y - min.y),
            (d.y, max.y - self.a.y),
        ] {
            if p == 0.0 {
                if q < 0.0 {
                    return false;
                }
            } else {
                let r = q / p;
                if p < 0.0 {
                    t0 = t0.max(r);
                } else {
                    t1 = t1.min(r);
                }
                if t0 > t1 {
                    return false;
                }
            }
        }
        true
    }
}

/// Parameters `(t, u)` of the proper crossing of `a` and `b`, if any.
///
/// `t` runs along `a`, `u` along `b`. Parallel and collinear pairs, and pairs
/// meeting at an endpoint of either segment, do not cross.
pub(crate) fn crossing_params(a: &Segment, b: &Segment) -> Option<(f64, f64)> {
    let r = a.direction();
    let s = b.direction();
    let denom = r.cross(&s);
    let scale = r.norm() * s.norm();
    if scale == 0.0 || denom.abs() <= 1e-12 * scale {
        return None;
    }
    let qp = b.a.sub(&a.a);
    let t = qp.cross(&s) / denom;
    let u = qp.cross(&r) / denom;
    let inside = |v: f64| v > PARAM_EPS && v < 1.0 - PARAM_EPS;
    (inside(t) && inside(u)).then_some((t, u))
}

/// Interior intersection point of two properly crossing segments.
pub fn segment_intersect(a: &Segment, b: &Segment) -> Option<Point2D> {
    crossing_params(a, b).map(|(t, _)| a.point_at(t))
}

/// Axis-aligned rectangle given by its lower-left corner and extents.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rect {
    pub origin: Point2D,
    pub width: f64,
    pub depth: f64,
}

impl Rect {
    pub const fn new(origin: Point2D, width: f64, depth: f64) -> Self {
        Self {
            origin,
            width,
            depth,
        }
    }

    pub fn min(&self) -> Point2D {
        self.origin
    }

    pub fn max(&self) -> Point2D {
        Point2D::new(self.origin.x + self.width, self.origin.y + self.depth)
    }

    pub fn center(&self) -> Point2D {
        Point2D::new(
            self.origin.x + self.width / 2.0,
            self.origin.y + self.depth / 2.0,
        )
    }

    pub fn area(&self) -> f64 {
        self.width * self.depth
    }

    pub fn contains(&self, p: &Point2D, tol: f64) -> bool {
        let max = self.max();
        p.x >= self.origin.x - tol && p.x <= max.x + tol && p.y >= self.origin.y - tol && p.y <= max.y + tol
    }

    pub fn strictly_contains(&self, p: &Point2D) -> bool {
        let max = self.max();
        p.x > self.origin.x && p.x < max.x && p.y > self.origin.y && p.y < max.y
    }

    pub fn contains_rect(&self, other: &Rect, tol: f64) -> bool {
        self.contains(&other.min(), tol) && self.contains(&other.max(), tol)
    }

    /// True when the interiors intersect (shared edges do not count).
    pub fn interiors_overlap(&self, other: &Rect, tol: f64) -> bool {
        let (a0, a1) = (self.min(), self.max());
        let (b0, b1) = (other.min(), other.max());
        a0.x < b1.x - tol && b0.x < a1.x - tol && a0.y < b1.y - tol && b0.y < a1.y - tol
    }

    /// Edges in counter-clockwise order: south, east, north, west.
    pub fn edges(&self) -> [Segment; 4] {
        let (p0, p2) = (self.min(), self.max());
        let p1 = Point2D::new(p2.x, p0.y);
        let p3 = Point2D::new(p0.x, p2.y);
        [
            Segment::new(p0, p1),
            Segment::new(p1, p2),
            Segment::new(p2, p3),
            Segment::new(p3, p0),
        ]
    }
}

/// True if `inner` lies on the infinite line through `outer` and within its extent.
pub fn segment_contained_in(inner: &Segment, outer: &Segment, tol: f64) -> bool {
    outer.distance_to_point(&inner.a) <= tol && outer.distance_to_point(&inner.b) <= tol
}

#[cfg(test)]
mod tests {
    use super::*;

    fn seg(ax: f64, ay: f64, bx: f64, by: f64) -> Segment {
        Segment::new(Point2D::new(ax, ay), Point2D::new(bx, by))
    }

    #[test]
    fn axis_aligned_cross() {
        let p = segment_intersect(&seg(0.0, 0.0, 2.0, 0.0), &seg(1.0, -1.0, 1.0, 1.0)).unwrap();
        assert_eq!(p, Point2D::new(1.0, 0.0));
    }

    #[test]
    fn parallel_segments_do_not_cross() {
        assert!(segment_intersect(&seg(0.0, 0.0, 1.0, 0.0), &seg(0.0, 1.0, 1.0, 1.0)).is_none());
    }

    #[test]
    fn diagonal_cross() {
        // x = t, y = t meets x = u, y = 1 - u at t = u = 1/2.
        let p = segment_intersect(&seg(0.0, 0.0, 1.0, 1.0), &seg(0.0, 1.0, 1.0, 0.0)).unwrap();
        assert!((p.x - 0.5).abs() < 1e-12 && (p.y - 0.5).abs() < 1e-12);
    }

    #[test]
    fn touching_and_collinear_are_not_crossings() {
        assert!(segment_intersect(&seg(0.0, 0.0, 1.0, 0.0), &seg(1.0, 0.0, 1.0, 1.0)).is_none());
        assert!(segment_intersect(&seg(0.0, 0.0, 2.0, 0.0), &seg(1.0, 0.0, 1.0, 1.0)).is_none());
        assert!(segment_intersect(&seg(0.0, 0.0, 2.0, 0.0), &seg(1.0, 0.0, 3.0, 0.0)).is_none());
        assert!(segment_intersect(&seg(0.0, 0.0, 1.0, 0.0), &seg(2.0, -1.0, 2.0, 1.0)).is_none());
    }

    #[test]
    fn box_touch() {
        let s = seg(0.5, 0.5, 2.5, 0.5);
        assert!(s.touches_box(&Point2D::new(1.0, 0.0), &Point2D::new(2.0, 1.0)));
        assert!(!s.touches_box(&Point2D::new(3.0, 0.0), &Point2D::new(4.0, 1.0)));
        assert!(!s.touches_box(&Point2D::new(0.0, 1.0), &Point2D::new(1.0, 2.0)));
    }

    #[test]
    fn rect_overlap_ignores_shared_edges() {
        let a = Rect::new(Point2D::new(0.0, 0.0), 2.0, 2.0);
        let b = Rect::new(Point2D::new(2.0, 0.0), 2.0, 2.0);
        let c = Rect::new(Point2D::new(1.0, 1.0), 2.0, 2.0);
        assert!(!a.interiors_overlap(&b, 1e-6));
        assert!(a.interiors_overlap(&c, 1e-6));
    }
}
