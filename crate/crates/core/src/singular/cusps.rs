//! Cusp points: three coincident solutions.
//!
//! Candidates are vertices of a section curve where the image reverses
//! direction or nearly stops. Each candidate is pulled onto the point where
//! the curve tangent lies in the kernel of the section Jacobian and then
//! has to show a root of multiplicity three.

use nalgebra::{Matrix2, Vector2};
use serde::Serialize;

use super::trace::{torus_distance, SectionCurve};
use crate::ikquartic::reduced_max_multiplicity;
use crate::model::{
    reduced_singularity, section_jacobian, section_point, singularity_gradient, wrap_angle,
    DesignParams, SectionPoint,
};

/// Relative tolerance of the triple-root witness.
pub const CUSP_WITNESS_TOL: f64 = 1e-7;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CuspCandidate {
    pub curve: usize,
    pub index: usize,
    pub location: SectionPoint,
    pub preimage: (f64, f64),
    /// Image speed relative to the curve's median speed.
    pub relative_speed: f64,
    pub reverses: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CuspPoint {
    pub location: SectionPoint,
    pub preimage: (f64, f64),
    /// Largest root multiplicity found at the location.
    pub multiplicity: u32,
}

/// Vertices where the image of a curve turns back or slows below
/// `speed_tol` times its median speed.
pub fn cusp_candidates(curves: &[SectionCurve], speed_tol: f64) -> Vec<CuspCandidate> {
    let mut out = Vec::new();
    for (ci, c) in curves.iter().enumerate() {
        let n = c.points.len();
        if n < 3 || c.tangential {
            continue;
        }
        let speed = |i: usize, j: usize| {
            let dq = torus_distance(c.preimages[i], c.preimages[j]);
            if dq == 0.0 {
                0.0
            } else {
                c.points[i].distance(&c.points[j]) / dq
            }
        };
        let segs: Vec<(usize, usize)> = c.segments().collect();
        let mut speeds: Vec<f64> = segs.iter().map(|&(i, j)| speed(i, j)).collect();
        let speeds_by_seg = speeds.clone();
        speeds.sort_by(f64::total_cmp);
        let median = speeds[speeds.len() / 2];
        if median == 0.0 {
            continue;
        }
        for k in 1..segs.len() {
            let (i, j) = segs[k - 1];
            let (_, l) = segs[k];
            let (ax, az) = (
                c.points[j].rho - c.points[i].rho,
                c.points[j].z - c.points[i].z,
            );
            let (bx, bz) = (
                c.points[l].rho - c.points[j].rho,
                c.points[l].z - c.points[j].z,
            );
            let reverses = ax * bx + az * bz < 0.0;
            let v = 0.5 * (speeds_by_seg[k - 1] + speeds_by_seg[k]);
            let slow = v < speed_tol * median && v <= speeds_by_seg[k - 1].max(speeds_by_seg[k]);
            if reverses || slow {
                out.push(CuspCandidate {
                    curve: ci,
                    index: j,
                    location: c.points[j],
                    preimage: c.preimages[j],
                    relative_speed: v / median,
                    reverses,
                });
            }
        }
    }
    out
}

/// `∇S · k`, with `k` spanning the kernel of the section Jacobian.
fn kernel_alignment(p: &DesignParams, t2: f64, t3: f64) -> f64 {
    let m = section_jacobian(p, t2, t3);
    let row = if m[0][0].hypot(m[0][1]) >= m[1][0].hypot(m[1][1]) {
        m[0]
    } else {
        m[1]
    };
    let norm = row[0].hypot(row[1]);
    if norm == 0.0 {
        return 0.0;
    }
    let k = (-row[1] / norm, row[0] / norm);
    let g = singularity_gradient(p, t2, t3);
    g[0] * k.0 + g[1] * k.1
}

/// Newton on `S = 0`, `∇S · k = 0` from `q`.
fn refine(p: &DesignParams, q: (f64, f64)) -> (f64, f64) {
    let f = |x: &Vector2<f64>| {
        Vector2::new(
            reduced_singularity(p, x[0], x[1]),
            kernel_alignment(p, x[0], x[1]),
        )
    };
    let mut x = Vector2::new(q.0, q.1);
    let mut fx = f(&x);
    let h = 1e-6;
    for _ in 0..30 {
        let fnorm = fx.norm();
        if fnorm < 1e-14 {
            break;
        }
        let dx = (f(&(x + Vector2::new(h, 0.0))) - f(&(x - Vector2::new(h, 0.0)))) / (2.0 * h);
        let dy = (f(&(x + Vector2::new(0.0, h))) - f(&(x - Vector2::new(0.0, h)))) / (2.0 * h);
        let jac = Matrix2::from_columns(&[dx, dy]);
        let Some(step) = jac.lu().solve(&-fx) else {
            break;
        };
        if step.norm() > 0.1 {
            break;
        }
        let trial = x + step;
        let ft = f(&trial);
        if ft.norm() >= fnorm {
            break;
        }
        x = trial;
        fx = ft;
    }
    (wrap_angle(x[0]), wrap_angle(x[1]))
}

/// Candidates confirmed by a root of multiplicity at least three.
pub fn find_cusps(p: &DesignParams, curves: &[SectionCurve], speed_tol: f64) -> Vec<CuspPoint> {
    confirm(p, &cusp_candidates(curves, speed_tol))
}

pub fn confirm(p: &DesignParams, candidates: &[CuspCandidate]) -> Vec<CuspPoint> {
    let mut out: Vec<CuspPoint> = Vec::new();
    for c in candidates {
        let q = refine(p, c.preimage);
        let location = section_point(p, q.0, q.1);
        let multiplicity = reduced_max_multiplicity(p, &location, CUSP_WITNESS_TOL);
        if multiplicity >= 3 && !out.iter().any(|o| o.location.distance(&location) < 1e-6) {
            out.push(CuspPoint {
                location,
                preimage: q,
                multiplicity,
            });
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::singular::{section_images, singular_branches};

    #[test]
    fn candidates_are_rejected_in_family() {
        // the constant-θ3 branch is traced back and forth in the image
        let p = DesignParams::new(0.0, 2.0, 1.5, 1.0, 0.0).unwrap();
        let curves = section_images(&singular_branches(&p, 256), &p);
        let candidates = cusp_candidates(&curves, 0.05);
        assert!(!candidates.is_empty());
        assert!(confirm(&p, &candidates).is_empty());
    }

    #[test]
    fn detects_cusps_of_a_cuspidal_arm() {
        // outside the ten families: d2 and r2 both nonzero
        let p = DesignParams::new(1.0, 2.0, 1.5, 0.2, 0.0).unwrap();
        let curves = section_images(&singular_branches(&p, 512), &p);
        let cusps = find_cusps(&p, &curves, 0.05);
        assert!(!cusps.is_empty());
        for c in &cusps {
            assert!(c.multiplicity >= 3);
        }
    }
}
