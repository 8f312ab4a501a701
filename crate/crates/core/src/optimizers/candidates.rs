use rayon::prelude::*;

use crate::geometry::Point2D;
use crate::propagation::Evaluator;

/// Per-position coverage bitsets over the evaluator's cells.
///
/// The covered count of a set of positions is the popcount of the OR of
/// their bitsets, which equals counting cells whose best-server pathloss is
/// below the threshold.
#[derive(Debug, Clone)]
pub struct CandidateCoverage {
    pub positions: Vec<Point2D>,
    bits: Vec<Vec<u64>>,
    cells: usize,
}

impl CandidateCoverage {
    pub fn build(evaluator: &Evaluator, threshold: f64, positions: Vec<Point2D>) -> Self {
        let cells = evaluator.cell_count();
        let words = cells.div_ceil(64);
        let bits = positions
            .par_iter()
            .map(|p| {
                let map = evaluator.ap_map(*p);
                let mut b = vec![0u64; words];
                for (i, v) in map.iter().enumerate() {
                    if *v < threshold {
                        b[i / 64] |= 1 << (i % 64);
                    }
                }
                b
            })
            .collect();
        Self {
            positions,
            bits,
            cells,
        }
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn cells(&self) -> usize {
        self.cells
    }

    pub fn covered(&self, chosen: &[usize]) -> usize {
        let words = self.cells.div_ceil(64);
        (0..words)
            .map(|w| {
                chosen
                    .iter()
                    .fold(0u64, |acc, &c| acc | self.bits[c][w])
                    .count_ones() as usize
            })
            .sum()
    }

    pub fn fraction(&self, chosen: &[usize]) -> f64 {
        self.covered(chosen) as f64 / self.cells as f64
    }
}
