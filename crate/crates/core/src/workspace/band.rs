//! Cells close to the singular image curves.

use serde::Serialize;

use super::GridSpec;
use crate::model::SectionPoint;
use crate::singular::SectionCurve;

/// Distance from each cell centre to the nearest singular image segment,
/// kept only up to one cell diagonal.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BandMask {
    pub grid: GridSpec,
    #[serde(skip)]
    distance: Vec<f32>,
}

fn segment_distance(q: &SectionPoint, a: &SectionPoint, b: &SectionPoint) -> f64 {
    let (dx, dz) = (b.rho - a.rho, b.z - a.z);
    let len2 = dx * dx + dz * dz;
    let t = if len2 == 0.0 {
        0.0
    } else {
        (((q.rho - a.rho) * dx + (q.z - a.z) * dz) / len2).clamp(0.0, 1.0)
    };
    (q.rho - a.rho - t * dx).hypot(q.z - a.z - t * dz)
}

impl BandMask {
    pub fn new(grid: GridSpec, curves: &[SectionCurve]) -> Self {
        let (rows, cols) = (grid.rows(), grid.cols());
        let h = grid.cell();
        let radius = std::f64::consts::SQRT_2 * h;
        let mut distance = vec![f32::INFINITY; rows * cols];
        for c in curves {
            for (i, j) in c.segments() {
                let (a, b) = (&c.points[i], &c.points[j]);
                let lo_col = ((a.rho.min(b.rho) - radius) / h).floor().max(0.0) as usize;
                let hi_col = ((a.rho.max(b.rho) + radius) / h).ceil().max(0.0) as usize;
                let lo_row = ((a.z.min(b.z) - radius + grid.rmax) / h).floor().max(0.0) as usize;
                let hi_row = ((a.z.max(b.z) + radius + grid.rmax) / h).ceil().max(0.0) as usize;
                for row in lo_row..hi_row.min(rows) {
                    for col in lo_col..hi_col.min(cols) {
                        let d = segment_distance(&grid.center(row, col), a, b);
                        if d <= radius {
                            let slot = &mut distance[row * cols + col];
                            *slot = slot.min(d as f32);
                        }
                    }
                }
            }
        }
        BandMask { grid, distance }
    }

    pub fn diagonal(&self) -> f64 {
        std::f64::consts::SQRT_2 * self.grid.cell()
    }

    /// Whether the cell centre lies within `r` of a singular curve; `r` is
    /// capped at one cell diagonal.
    pub fn within(&self, row: usize, col: usize, r: f64) -> bool {
        (self.distance[row * self.grid.cols() + col] as f64) <= r
    }

    pub fn empty(grid: GridSpec) -> Self {
        BandMask {
            grid,
            distance: vec![f32::INFINITY; grid.rows() * grid.cols()],
        }
    }
}
