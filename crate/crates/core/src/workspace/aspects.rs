//! Aspects: connected singularity-free regions of the joint torus.
//!
//! Within one aspect every path avoiding singularities is feasible, so the
//! share of the workspace reached from a single aspect measures the region
//! of feasible paths.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::Serialize;

use super::{BandMask, IksField};
use crate::ikquartic::{roots::RootTolerances, section_preimages, Elimination};
use crate::model::{reduced_singularity, singularity_gradient, DesignParams};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AspectSummary {
    pub count: usize,
    pub resolution: usize,
    /// Share of the torus covered by each aspect.
    pub joint_fraction: Vec<f64>,
    /// Share of the reachable off-band cells reached from each aspect.
    pub coverage: Vec<f64>,
    pub feasible_ratio: f64,
    /// Share of the torus inside the singular band.
    pub band_fraction: f64,
}

struct Torus {
    m: usize,
    /// Aspect index per cell, `usize::MAX` inside the singular band.
    label: Vec<usize>,
}

impl Torus {
    fn step(&self) -> f64 {
        2.0 * PI / self.m as f64
    }

    fn index(&self, theta: f64) -> usize {
        let k = ((theta + PI) / self.step()).floor() as isize;
        k.rem_euclid(self.m as isize) as usize
    }

    /// Aspect of the cell containing `(θ2, θ3)`, falling back to its
    /// neighbours when the cell lies in the band.
    fn lookup(&self, t2: f64, t3: f64) -> Option<usize> {
        let (i, j) = (self.index(t2) as isize, self.index(t3) as isize);
        let m = self.m as isize;
        let at = |di: isize, dj: isize| {
            let (a, b) = ((i + di).rem_euclid(m), (j + dj).rem_euclid(m));
            self.label[(b * m + a) as usize]
        };
        if at(0, 0) != usize::MAX {
            return Some(at(0, 0));
        }
        (-1..=1)
            .flat_map(|di| (-1..=1).map(move |dj| (di, dj)))
            .map(|(di, dj)| at(di, dj))
            .find(|&l| l != usize::MAX)
    }
}

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

/// Cells of the `m × m` torus that are singular: `S` changes sign towards
/// a neighbour or the first-order distance to `S = 0` is under a cell.
fn singular_cells(p: &DesignParams, m: usize) -> Vec<bool> {
    let h = 2.0 * PI / m as f64;
    let angle = |k: usize| -PI + (k as f64 + 0.5) * h;
    let values: Vec<(f64, bool)> = (0..m)
        .into_par_iter()
        .flat_map_iter(|j| {
            (0..m).map(move |i| {
                let (t2, t3) = (angle(i), angle(j));
                let s = reduced_singularity(p, t2, t3);
                let g = singularity_gradient(p, t2, t3);
                let near = s.abs() <= 0.75 * h * g[0].hypot(g[1]);
                (s, near)
            })
        })
        .collect();
    let mut band: Vec<bool> = values.iter().map(|&(_, near)| near).collect();
    for j in 0..m {
        for i in 0..m {
            let k = j * m + i;
            let right = j * m + (i + 1) % m;
            let up = ((j + 1) % m) * m + i;
            for other in [right, up] {
                if (values[k].0 > 0.0) != (values[other].0 > 0.0) {
                    band[k] = true;
                    band[other] = true;
                }
            }
        }
    }
    band
}

fn label_torus(band: &[bool], m: usize) -> (Torus, Vec<usize>) {
    let mut parent: Vec<usize> = (0..m * m).collect();
    for j in 0..m {
        for i in 0..m {
            let k = j * m + i;
            if band[k] {
                continue;
            }
            for other in [j * m + (i + 1) % m, ((j + 1) % m) * m + i] {
                if !band[other] {
                    let (a, b) = (find(&mut parent, k), find(&mut parent, other));
                    if a != b {
                        parent[a.max(b)] = a.min(b);
                    }
                }
            }
        }
    }
    let mut ids = vec![usize::MAX; m * m];
    let mut sizes = Vec::new();
    let mut label = vec![usize::MAX; m * m];
    for k in 0..m * m {
        if band[k] {
            continue;
        }
        let r = find(&mut parent, k);
        if ids[r] == usize::MAX {
            ids[r] = sizes.len();
            sizes.push(0);
        }
        label[k] = ids[r];
        sizes[ids[r]] += 1;
    }
    (Torus { m, label }, sizes)
}

/// Aspects on an `m × m` torus and their coverage of the reachable cells
/// of `field` outside the half-diagonal band.
///
/// Coverage is found by solving the inverse kinematics at each cell and
/// looking up the aspect of every solution.
pub fn aspects(p: &DesignParams, m: usize, field: &IksField, mask: &BandMask) -> AspectSummary {
    let m = m.max(4);
    let band = singular_cells(p, m);
    let (torus, sizes) = label_torus(&band, m);
    let total = (m * m) as f64;
    let joint_fraction: Vec<f64> = sizes.iter().map(|&s| s as f64 / total).collect();
    let band_fraction = band.iter().filter(|&&b| b).count() as f64 / total;

    let g = field.grid;
    let half = 0.5 * mask.diagonal();
    let per_row: Vec<(usize, Vec<usize>)> = (0..g.rows())
        .into_par_iter()
        .map(|row| {
            let mut reach = 0;
            let mut hits = vec![0usize; sizes.len()];
            let mut seen = Vec::with_capacity(4);
            for col in 0..g.cols() {
                if field.get(row, col) == 0 || mask.within(row, col, half) {
                    continue;
                }
                reach += 1;
                let c = g.center(row, col);
                let pre = section_preimages(
                    p,
                    c.rho * c.rho,
                    c.z,
                    RootTolerances::default(),
                    Elimination::Reduced,
                );
                seen.clear();
                for &(t2, t3, _) in &pre.points {
                    if let Some(l) = torus.lookup(t2, t3) {
                        if !seen.contains(&l) {
                            seen.push(l);
                            hits[l] += 1;
                        }
                    }
                }
            }
            (reach, hits)
        })
        .collect();
    let reach: usize = per_row.iter().map(|r| r.0).sum();
    let mut hits = vec![0usize; sizes.len()];
    for (_, h) in &per_row {
        for (a, b) in hits.iter_mut().zip(h) {
            *a += b;
        }
    }
    let coverage: Vec<f64> = hits
        .iter()
        .map(|&h| {
            if reach == 0 {
                0.0
            } else {
                h as f64 / reach as f64
            }
        })
        .collect();
    let feasible_ratio = coverage.iter().copied().fold(0.0, f64::max);
    AspectSummary {
        count: sizes.len(),
        resolution: m,
        joint_fraction,
        coverage,
        feasible_ratio,
        band_fraction,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::workspace::{iks_field, GridSpec};

    fn summary(p: &DesignParams, n: usize) -> AspectSummary {
        let g = GridSpec::for_design(p, n).unwrap();
        let f = iks_field(p, g).unwrap();
        aspects(p, 128, &f, &BandMask::empty(g))
    }

    #[test]
    fn fractions_partition_the_torus() {
        let p = DesignParams::new(1.0, 2.0, 2.5, 0.0, 0.0).unwrap();
        let s = summary(&p, 96);
        let sum: f64 = s.joint_fraction.iter().sum();
        assert!(sum <= 1.0 + 1e-12);
        assert!((sum + s.band_fraction - 1.0).abs() < 1e-12);
        assert!(s.coverage.iter().all(|&c| (0.0..=1.0).contains(&c)));
    }

    #[test]
    fn lines_of_e_split_the_torus_in_four() {
        // S vanishes on θ3 = 0, ±π/2, π only
        let p = DesignParams::new(1.0, 0.0, 1.5, 0.0, 0.0).unwrap();
        let s = summary(&p, 96);
        assert_eq!(s.count, 4);
        for f in &s.joint_fraction {
            assert!((f - s.joint_fraction[0]).abs() < 1e-9);
        }
    }

    #[test]
    fn lookup_wraps() {
        let band = vec![false; 16];
        let (torus, sizes) = label_torus(&band, 4);
        assert_eq!(sizes, vec![16]);
        assert_eq!(torus.lookup(PI, -PI), Some(0));
        assert_eq!(torus.lookup(3.0 * PI, 0.1), Some(0));
    }
}
