//! Voids and holes: unreachable parts of the section.

use serde::Serialize;

use super::{BandMask, IksField};
use crate::model::{DesignParams, SectionPoint};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Void {
    pub cells: usize,
    pub area: f64,
    pub representative: SectionPoint,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Cavities {
    pub voids: Vec<Void>,
    /// Enclosed unreachable components discarded because every cell lies
    /// within one cell diagonal of a singular curve.
    pub discarded: usize,
    /// `(z, ρ_min)` for every row holding a reachable cell.
    pub hole_profile: Vec<(f64, f64)>,
    pub hole_ratio: f64,
}

/// Voids and hole profile without a singular band.
pub fn cavities(field: &IksField) -> Cavities {
    cavities_masked(field, &BandMask::empty(field.grid))
}

/// 4-connected unreachable components away from the raster border and the
/// axis column; components entirely inside the singular band are count
/// noise along the curves and are discarded.
pub fn cavities_masked(field: &IksField, mask: &BandMask) -> Cavities {
    let g = field.grid;
    let (rows, cols) = (g.rows(), g.cols());
    let mut label = vec![usize::MAX; rows * cols];
    let mut voids = Vec::new();
    let mut discarded = 0;
    let mut stack = Vec::new();
    let diag = mask.diagonal();

    for start in 0..rows * cols {
        if field.counts[start] != 0 || label[start] != usize::MAX {
            continue;
        }
        label[start] = start;
        stack.push(start);
        let mut cells = 0usize;
        let mut border = false;
        let mut in_band = true;
        let (mut sum_row, mut sum_col) = (0usize, 0usize);
        while let Some(k) = stack.pop() {
            let (row, col) = (k / cols, k % cols);
            cells += 1;
            sum_row += row;
            sum_col += col;
            border |= row == 0 || row == rows - 1 || col == 0 || col == cols - 1;
            in_band &= mask.within(row, col, diag);
            let mut visit = |r: usize, c: usize| {
                let j = r * cols + c;
                if field.counts[j] == 0 && label[j] == usize::MAX {
                    label[j] = start;
                    stack.push(j);
                }
            };
            if row > 0 {
                visit(row - 1, col);
            }
            if row + 1 < rows {
                visit(row + 1, col);
            }
            if col > 0 {
                visit(row, col - 1);
            }
            if col + 1 < cols {
                visit(row, col + 1);
            }
        }
        if border {
            continue;
        }
        if in_band {
            discarded += 1;
            continue;
        }
        let h = g.cell();
        voids.push(Void {
            cells,
            area: cells as f64 * h * h,
            representative: g.center(sum_row / cells, sum_col / cells),
        });
    }

    let mut hole_profile = Vec::new();
    for row in 0..rows {
        if let Some(col) = (0..cols).find(|&c| field.get(row, c) > 0) {
            let c = g.center(row, col);
            hole_profile.push((c.z, c.rho - 0.5 * g.cell()));
        }
    }
    let hole_ratio = ratio_of(&hole_profile, g.rmax);
    Cavities {
        voids,
        discarded,
        hole_profile,
        hole_ratio,
    }
}

fn ratio_of(profile: &[(f64, f64)], rmax: f64) -> f64 {
    profile
        .iter()
        .map(|&(_, r)| r / rmax)
        .fold(0.0, f64::max)
        .clamp(0.0, 1.0)
}

impl Cavities {
    /// Adds the exact highest and lowest reachable points to the hole
    /// profile. Raster rows approach these apexes only as the square root
    /// of the cell size.
    pub fn with_apexes(mut self, p: &DesignParams, rmax: f64) -> Self {
        let z = (p.d3 + p.d4).hypot(p.r3);
        let rho = p.d2.hypot(p.r2);
        self.hole_profile.insert(0, (-z, rho));
        self.hole_profile.push((z, rho));
        self.hole_ratio = ratio_of(&self.hole_profile, rmax);
        self
    }
}
