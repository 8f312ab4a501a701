use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::geometry::Point2D;

use super::grid::CoverageGrid;

pub const DEFAULT_TOP_K: usize = 5;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoverageStats {
    pub coverage_fraction: f64,
    pub threshold: f64,
    pub covered_cells: usize,
    pub total_cells: usize,
    /// Centre of the cell with the highest pathloss.
    pub worst_cell: Point2D,
}

/// Share of cells strictly below `threshold`. Ties for the worst cell go to
/// the first in row-major order.
pub fn coverage_fraction(grid: &CoverageGrid, threshold: f64) -> CoverageStats {
    let covered = grid.values.iter().filter(|&&v| v < threshold).count();
    let mut worst = 0;
    for (i, v) in grid.values.iter().enumerate() {
        if *v > grid.values[worst] {
            worst = i;
        }
    }
    let total = grid.values.len();
    CoverageStats {
        coverage_fraction: if total == 0 {
            0.0
        } else {
            covered as f64 / total as f64
        },
        threshold,
        covered_cells: covered,
        total_cells: total,
        worst_cell: if total == 0 {
            grid.origin
        } else {
            grid.cell_center(worst % grid.ncols, worst / grid.ncols)
        },
    }
}

/// A poorly covered part of the grid, summarised for feedback.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionSummary {
    /// Cell of the region closest to its mean position.
    pub centroid: Point2D,
    /// Highest pathloss inside the region, dB.
    pub pathloss: f64,
    pub cells: usize,
}

/// Up to `k` worst regions.
///
/// Regions are 4-connected components of uncovered cells, largest first
/// (then higher pathloss, then lexicographic centroid). When every cell is
/// covered the `k` highest-pathloss cells are returned as single-cell regions.
pub fn worst_regions(grid: &CoverageGrid, threshold: f64, k: usize) -> Vec<RegionSummary> {
    let (nc, nr) = (grid.ncols, grid.nrows);
    let mut label = vec![usize::MAX; grid.len()];
    let mut regions = Vec::new();
    for start in 0..grid.len() {
        if grid.values[start] < threshold || label[start] != usize::MAX {
            continue;
        }
        let id = regions.len();
        let mut members = Vec::new();
        let mut queue = VecDeque::from([start]);
        label[start] = id;
        while let Some(cell) = queue.pop_front() {
            members.push(cell);
            let (c, r) = (cell % nc, cell / nc);
            let mut push = |n: usize| {
                if label[n] == usize::MAX && grid.values[n] >= threshold {
                    label[n] = id;
                    queue.push_back(n);
                }
            };
            if c > 0 {
                push(cell - 1);
            }
            if c + 1 < nc {
                push(cell + 1);
            }
            if r > 0 {
                push(cell - nc);
            }
            if r + 1 < nr {
                push(cell + nc);
            }
        }
        regions.push(summarize(grid, &members));
    }
    if regions.is_empty() {
        let mut cells: Vec<usize> = (0..grid.len()).collect();
        cells.sort_by(|a, b| grid.values[*b].total_cmp(&grid.values[*a]).then(a.cmp(b)));
        return cells
            .into_iter()
            .take(k)
            .map(|i| summarize(grid, &[i]))
            .collect();
    }
    regions.sort_by(|a, b| {
        b.cells
            .cmp(&a.cells)
            .then(b.pathloss.total_cmp(&a.pathloss))
            .then(a.centroid.lex_cmp(&b.centroid))
    });
    regions.truncate(k);
    regions
}

fn summarize(grid: &CoverageGrid, members: &[usize]) -> RegionSummary {
    let center = |i: usize| grid.cell_center(i % grid.ncols, i / grid.ncols);
    let n = members.len() as f64;
    let (sx, sy) = members
        .iter()
        .map(|&i| center(i))
        .fold((0.0, 0.0), |(x, y), p| (x + p.x, y + p.y));
    let mean = Point2D::new(sx / n, sy / n);
    let rep = members
        .iter()
        .copied()
        .min_by(|&a, &b| {
            center(a)
                .distance(&mean)
                .total_cmp(&center(b).distance(&mean))
                .then(a.cmp(&b))
        })
        .expect("non-empty region");
    RegionSummary {
        centroid: center(rep),
        pathloss: members
            .iter()
            .map(|&i| grid.values[i])
            .fold(f64::NEG_INFINITY, f64::max),
        cells: members.len(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(values: Vec<f64>, ncols: usize) -> CoverageGrid {
        let nrows = values.len() / ncols;
        CoverageGrid {
            origin: Point2D::new(0.0, 0.0),
            cell_size: 1.0,
            ncols,
            nrows,
            values,
        }
    }

    #[test]
    fn all_covered() {
        let s = coverage_fraction(&grid(vec![70.0; 4], 2), 110.0);
        assert_eq!(s.coverage_fraction, 1.0);
    }

    #[test]
    fn threshold_is_strict() {
        let s = coverage_fraction(&grid(vec![110.0; 4], 2), 110.0);
        assert_eq!(s.coverage_fraction, 0.0);
        assert_eq!(s.covered_cells, 0);
    }

    #[test]
    fn three_of_four() {
        let s = coverage_fraction(&grid(vec![70.0, 80.0, 120.0, 90.0], 2), 100.0);
        assert_eq!(s.coverage_fraction, 0.75);
        assert_eq!(s.worst_cell, Point2D::new(0.5, 1.5));
    }

    #[test]
    fn worst_cell_ties_take_first() {
        let s = coverage_fraction(&grid(vec![90.0, 95.0, 95.0, 60.0], 2), 100.0);
        assert_eq!(s.worst_cell, Point2D::new(1.5, 0.5));
    }

    #[test]
    fn regions_are_ranked_by_size() {
        // 4x2 grid: a 3-cell uncovered strip on the right, a lone cell at (0,1).
        let g = grid(
            vec![
                50.0, 50.0, 120.0, 130.0, //
                125.0, 50.0, 50.0, 121.0,
            ],
            4,
        );
        let r = worst_regions(&g, 100.0, 5);
        assert_eq!(r.len(), 2);
        assert_eq!(r[0].cells, 3);
        assert_eq!(r[0].pathloss, 130.0);
        assert_eq!(r[0].centroid, Point2D::new(3.5, 0.5));
        assert_eq!(r[1].cells, 1);
        assert_eq!(r[1].centroid, Point2D::new(0.5, 1.5));
    }

    #[test]
    fn fully_covered_grid_reports_worst_cells() {
        let g = grid(vec![50.0, 70.0, 60.0, 65.0], 2);
        let r = worst_regions(&g, 100.0, 2);
        assert_eq!(r.iter().map(|x| x.pathloss).collect::<Vec<_>>(), vec![70.0, 65.0]);
    }
}
