//! Binary PPM (P6) heatmap export.
//!
//! One pixel per grid cell, north up: image row 0 is the grid's last row.
//! Covered cells map linearly from green (minimum pathloss in the grid) to
//! red (the threshold): `t = (v - min) / (threshold - min)` clamped to
//! [0, 1], colour `(round(255 t), round(255 (1 - t)), 0)`. If the threshold
//! does not exceed the minimum, `t = 0`. Cells at or above the threshold are
//! drawn in [`OUT_OF_COVERAGE`].

use std::io::Write;
use std::path::Path;

use super::grid::CoverageGrid;

pub const OUT_OF_COVERAGE: [u8; 3] = [0, 0, 0];

pub fn color_for(value: f64, min: f64, threshold: f64) -> [u8; 3] {
    if value >= threshold {
        return OUT_OF_COVERAGE;
    }
    let span = threshold - min;
    let t = if span > 0.0 {
        ((value - min) / span).clamp(0.0, 1.0)
    } else {
        0.0
    };
    [(255.0 * t).round() as u8, (255.0 * (1.0 - t)).round() as u8, 0]
}

pub fn render_ppm(grid: &CoverageGrid, threshold: f64) -> Vec<u8> {
    let min = grid.values.iter().copied().fold(f64::INFINITY, f64::min);
    let mut out = format!("P6\n{} {}\n255\n", grid.ncols, grid.nrows).into_bytes();
    out.reserve(grid.len() * 3);
    for row in (0..grid.nrows).rev() {
        for col in 0..grid.ncols {
            out.extend_from_slice(&color_for(grid.value(col, row), min, threshold));
        }
    }
    out
}

pub fn export_heatmap(grid: &CoverageGrid, threshold: f64, path: impl AsRef<Path>) -> std::io::Result<()> {
    let mut f = std::fs::File::create(path)?;
    f.write_all(&render_ppm(grid, threshold))?;
    f.flush()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Point2D;

    fn grid(values: Vec<f64>, ncols: usize) -> CoverageGrid {
        CoverageGrid {
            origin: Point2D::new(0.0, 0.0),
            cell_size: 1.0,
            ncols,
            nrows: values.len() / ncols,
            values,
        }
    }

    #[test]
    fn one_by_one() {
        let img = render_ppm(&grid(vec![60.0], 1), 80.0);
        assert_eq!(&img[..11], b"P6\n1 1\n255\n");
        assert_eq!(&img[11..], &[0, 255, 0]);
    }

    #[test]
    fn two_by_two_color_map() {
        // min 60, threshold 80: 60 -> t 0, 70 -> t 0.5 (128,128,0 after
        // rounding 127.5), 75 -> t 0.75 (191,64,0), 90 -> out of coverage.
        // Rows are written north first: row 1 (75, 90) then row 0 (60, 70).
        let img = render_ppm(&grid(vec![60.0, 70.0, 75.0, 90.0], 2), 80.0);
        let px = &img[11..];
        assert_eq!(px, &[191, 64, 0, 0, 0, 0, 0, 255, 0, 128, 128, 0]);
    }
}
