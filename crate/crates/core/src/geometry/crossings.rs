use super::plan::FloorPlan;
use super::primitives::{crossing_params, Point2D, Segment};

/// Opening spans are matched with this slack, in meters along the wall.
const SPAN_TOL: f64 = 1e-9;
/// Bin assignment slack; makes the index conservative at bin edges.
const BIN_EPS: f64 = 1e-9;

/// One wall properly crossed by a path.
#[derive(Debug, Clone, PartialEq)]
pub struct Crossing<'a> {
    pub wall: usize,
    pub point: Point2D,
    /// Distance from the path's first endpoint.
    pub distance: f64,
    /// Effective material: the opening's if the crossing falls inside one.
    pub material: &'a str,
    pub attenuation: f64,
    pub opening: Option<usize>,
}

fn crossing_with_wall<'a>(path: &Segment, plan: &'a FloorPlan, wall_idx: usize) -> Option<Crossing<'a>> {
    let wall = &plan.walls[wall_idx];
    let (t, u) = crossing_params(path, &wall.segment())?;
    let along = u * wall.length();
    let opening = plan.openings.iter().position(|o| {
        o.wall == wall_idx && along >= o.offset - SPAN_TOL && along <= o.offset + o.width + SPAN_TOL
    });
    let material = match opening {
        Some(i) => plan.openings[i].material.as_str(),
        None => wall.material.as_str(),
    };
    Some(Crossing {
        wall: wall_idx,
        point: path.point_at(t),
        distance: t * path.length(),
        material,
        attenuation: plan.attenuation(material),
        opening,
    })
}

fn sort_crossings(crossings: &mut [Crossing<'_>]) {
    crossings.sort_by(|a, b| a.distance.total_cmp(&b.distance).then(a.wall.cmp(&b.wall)));
}

/// Every wall properly crossed by `path`, nearest first, by scanning all walls.
pub fn wall_crossings<'a>(path: &Segment, plan: &'a FloorPlan) -> Vec<Crossing<'a>> {
    let mut out: Vec<_> = (0..plan.walls.len())
        .filter_map(|i| crossing_with_wall(path, plan, i))
        .collect();
    sort_crossings(&mut out);
    out
}

#[derive(Debug, Clone)]
struct CompiledWall {
    segment: Segment,
    length: f64,
    attenuation: f64,
    /// (start, end, attenuation) along the wall, in plan order.
    openings: Vec<(f64, f64, f64)>,
}

/// Uniform-grid bins over the plan, each listing the walls that touch it.
///
/// Read-only after [`SpatialIndex::build`]. Also caches per-wall attenuation
/// so [`SpatialIndex::crossing_loss`] avoids material lookups.
#[derive(Debug, Clone)]
pub struct SpatialIndex {
    origin: Point2D,
    bin_size: f64,
    ncols: usize,
    nrows: usize,
    bins: Vec<Vec<u32>>,
    walls: Vec<CompiledWall>,
}

impl SpatialIndex {
    /// Builds the index. `bin_size` must be positive.
    pub fn build(plan: &FloorPlan, bin_size: f64) -> Self {
        assert!(bin_size > 0.0, "bin_size must be > 0");
        let mut lo = plan.boundary.min();
        let mut hi = plan.boundary.max();
        for w in &plan.walls {
            for p in [w.start, w.end] {
                lo = Point2D::new(lo.x.min(p.x), lo.y.min(p.y));
                hi = Point2D::new(hi.x.max(p.x), hi.y.max(p.y));
            }
        }
        let ncols = (((hi.x - lo.x) / bin_size).ceil() as usize).max(1);
        let nrows = (((hi.y - lo.y) / bin_size).ceil() as usize).max(1);

        let walls: Vec<CompiledWall> = plan
            .walls
            .iter()
            .enumerate()
            .map(|(i, w)| CompiledWall {
                segment: w.segment(),
                length: w.length(),
                attenuation: plan.attenuation(&w.material),
                openings: plan
                    .openings
                    .iter()
                    .filter(|o| o.wall == i)
                    .map(|o| (o.offset, o.offset + o.width, plan.attenuation(&o.material)))
                    .collect(),
            })
            .collect();

        let mut index = Self {
            origin: lo,
            bin_size,
            ncols,
            nrows,
            bins: vec![Vec::new(); ncols * nrows],
            walls,
        };
        for i in 0..index.walls.len() {
            let seg = index.walls[i].segment;
            index.for_each_bin(&seg, |bin, idx| idx.bins[bin].push(i as u32));
        }
        index
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.ncols, self.nrows)
    }

    pub fn origin(&self) -> Point2D {
        self.origin
    }

    /// Walls listed in bin (col, row).
    pub fn bin(&self, col: usize, row: usize) -> &[u32] {
        &self.bins[row * self.ncols + col]
    }

    /// Visits every bin the segment touches (supercover, slightly conservative).
    fn bins_of(&self, seg: &Segment) -> Vec<usize> {
        let mut out = Vec::new();
        let d = seg.direction();
        let bs = self.bin_size;
        let (lo, hi) = seg.bbox();
        let row_of = |y: f64| (((y - self.origin.y) / bs).floor().max(0.0) as usize).min(self.nrows - 1);
        let col_of = |x: f64| (((x - self.origin.x) / bs).floor().max(0.0) as usize).min(self.ncols - 1);
        let r0 = row_of(lo.y - BIN_EPS);
        let r1 = row_of(hi.y + BIN_EPS);
        for row in r0..=r1 {
            let y0 = self.origin.y + row as f64 * bs - BIN_EPS;
            let y1 = self.origin.y + (row + 1) as f64 * bs + BIN_EPS;
            let (ta, tb) = if d.y == 0.0 {
                (0.0, 1.0)
            } else {
                let a = (y0 - seg.a.y) / d.y;
                let b = (y1 - seg.a.y) / d.y;
                (a.min(b).max(0.0), a.max(b).min(1.0))
            };
            if ta > tb {
                continue;
            }
            let xa = seg.a.x + d.x * ta;
            let xb = seg.a.x + d.x * tb;
            let c0 = col_of(xa.min(xb) - BIN_EPS);
            let c1 = col_of(xa.max(xb) + BIN_EPS);
            out.extend((c0..=c1).map(|c| row * self.ncols + c));
        }
        out
    }

    fn for_each_bin(&mut self, seg: &Segment, mut f: impl FnMut(usize, &mut Self)) {
        for bin in self.bins_of(seg) {
            f(bin, self);
        }
    }

    /// Sorted, deduplicated wall indices that may cross `path`.
    pub fn candidates(&self, path: &Segment) -> Vec<usize> {
        let mut out: Vec<usize> = self
            .bins_of(path)
            .into_iter()
            .flat_map(|b| self.bins[b].iter().map(|&w| w as usize))
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    /// Same result as [`wall_crossings`], restricted to indexed candidates.
    pub fn wall_crossings<'a>(&self, path: &Segment, plan: &'a FloorPlan) -> Vec<Crossing<'a>> {
        let mut out: Vec<_> = self
            .candidates(path)
            .into_iter()
            .filter_map(|i| crossing_with_wall(path, plan, i))
            .collect();
        sort_crossings(&mut out);
        out
    }

    /// Total effective attenuation along `path`, in dB, summed nearest first.
    pub fn crossing_loss(&self, path: &Segment) -> f64 {
        let mut hits: Vec<(f64, usize, f64)> = Vec::new();
        for i in self.candidates(path) {
            let w = &self.walls[i];
            if let Some((t, u)) = crossing_params(path, &w.segment) {
                let along = u * w.length;
                let att = w
                    .openings
                    .iter()
                    .find(|(s, e, _)| along >= s - SPAN_TOL && along <= e + SPAN_TOL)
                    .map_or(w.attenuation, |&(_, _, a)| a);
                hits.push((t, i, att));
            }
        }
        hits.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        hits.iter().map(|h| h.2).sum()
    }
}
