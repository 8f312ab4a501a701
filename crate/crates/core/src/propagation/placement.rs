use crate::geometry::{FloorPlan, Point2D};

use super::grid::check_position;

/// Clearance kept from walls and the boundary when relocating an AP.
pub const SNAP_CLEARANCE: f64 = 0.1;
/// Spacing of the global search lattice used when relocating an AP.
pub const SNAP_STEP: f64 = 0.05;

fn clear_of_everything(plan: &FloorPlan, p: &Point2D, clearance: f64) -> bool {
    let (lo, hi) = (plan.boundary.min(), plan.boundary.max());
    let tol = 1e-9;
    p.x - lo.x >= clearance - tol
        && hi.x - p.x >= clearance - tol
        && p.y - lo.y >= clearance - tol
        && hi.y - p.y >= clearance - tol
        && plan
            .walls
            .iter()
            .all(|w| w.segment().distance_to_point(p) >= clearance - tol)
        && check_position(plan, p).is_ok()
}

/// Nearest point to `p` on the global `SNAP_STEP` lattice that keeps at least
/// `SNAP_CLEARANCE` from every wall and boundary edge. Ties go to the
/// lexicographically smaller point. `None` if the plan has no such point.
pub fn nearest_valid_position(plan: &FloorPlan, p: Point2D) -> Option<Point2D> {
    let step = SNAP_STEP;
    if !p.is_finite() {
        return None;
    }
    let (ci, cj) = ((p.x / step).round() as i64, (p.y / step).round() as i64);
    let start = Point2D::new(ci as f64 * step, cj as f64 * step);
    let offset = p.distance(&start);
    let (lo, hi) = (plan.boundary.min(), plan.boundary.max());
    let reach = [lo, hi, Point2D::new(lo.x, hi.y), Point2D::new(hi.x, lo.y)]
        .iter()
        .map(|c| c.distance(&start))
        .fold(0.0, f64::max);
    let max_ring = (reach / step).ceil() as i64 + 1;

    let mut best: Option<(f64, Point2D)> = None;
    for ring in 0..=max_ring {
        // Ring points sit at least ring * step from the start point.
        if best.is_some_and(|(d, _)| ring as f64 * step - offset > d) {
            break;
        }
        for (i, j) in ring_cells(ci, cj, ring) {
            let q = Point2D::new(i as f64 * step, j as f64 * step);
            if !clear_of_everything(plan, &q, SNAP_CLEARANCE) {
                continue;
            }
            let d = q.distance(&p);
            let better = match &best {
                None => true,
                Some((bd, bq)) => d < *bd || (d == *bd && q.lex_cmp(bq).is_lt()),
            };
            if better {
                best = Some((d, q));
            }
        }
    }
    best.map(|(_, q)| q)
}

fn ring_cells(ci: i64, cj: i64, r: i64) -> Vec<(i64, i64)> {
    if r == 0 {
        return vec![(ci, cj)];
    }
    let mut out = Vec::with_capacity((8 * r) as usize);
    for d in -r..=r {
        out.push((ci + d, cj - r));
        out.push((ci + d, cj + r));
    }
    for d in (-r + 1)..r {
        out.push((ci - r, cj + d));
        out.push((ci + r, cj + d));
    }
    out
}

/// Valid AP positions at the centres of a `spacing` lattice over the plan,
/// sorted lexicographically by (x, y).
pub fn placement_lattice(plan: &FloorPlan, spacing: f64) -> Vec<Point2D> {
    let o = plan.boundary.origin;
    let nx = (plan.boundary.width / spacing - 1e-9).ceil().max(0.0) as usize;
    let ny = (plan.boundary.depth / spacing - 1e-9).ceil().max(0.0) as usize;
    let mut out = Vec::with_capacity(nx * ny);
    for i in 0..nx {
        for j in 0..ny {
            let p = Point2D::new(
                o.x + (i as f64 + 0.5) * spacing,
                o.y + (j as f64 + 0.5) * spacing,
            );
            if check_position(plan, &p).is_ok() {
                out.push(p);
            }
        }
    }
    out
}
