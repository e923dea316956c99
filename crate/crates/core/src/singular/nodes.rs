//! Node points: transverse crossings of two distinct singular sheets.

use std::collections::HashMap;

use nalgebra::{Matrix4, Vector4};
use serde::Serialize;

use super::trace::{torus_distance, torus_lerp, SectionCurve};
use crate::ikquartic::coincident_pairs;
use crate::model::{
    reduced_singularity, section_jacobian, section_sq, singularity_gradient, wrap_angle,
    DesignParams, SectionPoint,
};

/// Minimum `|sin|` of the angle between two crossing segments.
pub const MIN_CROSSING_SIN: f64 = 0.1;
/// Joint-space separation under which two preimages count as one point.
pub const MIN_PREIMAGE_GAP: f64 = 1e-5;
/// Crossings closer to the axis than this fraction of the extent, or than
/// two trace steps, are axis singularities rather than nodes.
pub const AXIS_EXCLUSION: f64 = 1e-3;
/// Relative tolerance of the coincident-solution witness.
pub const WITNESS_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NodePoint {
    pub location: SectionPoint,
    /// The two joint-space preimages `(θ2, θ3)`.
    pub preimages: [(f64, f64); 2],
    /// Distance between the images of the two preimages.
    pub residual: f64,
    /// Coincident solution pairs found at the location.
    pub witness_pairs: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum ResolutionWarning {
    /// Two nodes closer than three trace steps.
    CloseNodes {
        a: SectionPoint,
        b: SectionPoint,
        distance: f64,
    },
    /// A crossing whose location lacks two coincident solution pairs.
    Unconfirmed { location: SectionPoint, pairs: u32 },
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct NodeReport {
    pub nodes: Vec<NodePoint>,
    pub warnings: Vec<ResolutionWarning>,
}

struct Segment {
    curve: usize,
    index: usize,
    a: SectionPoint,
    b: SectionPoint,
    qa: (f64, f64),
    qb: (f64, f64),
}

fn cross(ax: f64, az: f64, bx: f64, bz: f64) -> f64 {
    ax * bz - az * bx
}

/// Parameters `(t, u, |sin|)` of a proper crossing.
fn intersect(s: &Segment, o: &Segment) -> Option<(f64, f64, f64)> {
    let (rx, rz) = (s.b.rho - s.a.rho, s.b.z - s.a.z);
    let (sx, sz) = (o.b.rho - o.a.rho, o.b.z - o.a.z);
    let denom = cross(rx, rz, sx, sz);
    let lens = rx.hypot(rz) * sx.hypot(sz);
    if lens == 0.0 {
        return None;
    }
    let sin = denom.abs() / lens;
    if sin <= MIN_CROSSING_SIN {
        return None;
    }
    let (qx, qz) = (o.a.rho - s.a.rho, o.a.z - s.a.z);
    let t = cross(qx, qz, sx, sz) / denom;
    let u = cross(qx, qz, rx, rz) / denom;
    ((0.0..1.0).contains(&t) && (0.0..1.0).contains(&u)).then_some((t, u, sin))
}

fn adjacent(s: &Segment, o: &Segment, curves: &[SectionCurve]) -> bool {
    if s.curve != o.curve {
        return false;
    }
    let n = curves[s.curve].points.len();
    let d = s.index.abs_diff(o.index);
    d <= 1 || (curves[s.curve].closed && d == n - 1)
}

/// Equations of a crossing: both preimages singular, equal images.
fn residual(p: &DesignParams, x: &Vector4<f64>) -> Vector4<f64> {
    let (ra, za) = section_sq(p, x[0], x[1]);
    let (rb, zb) = section_sq(p, x[2], x[3]);
    Vector4::new(
        reduced_singularity(p, x[0], x[1]),
        reduced_singularity(p, x[2], x[3]),
        ra - rb,
        za - zb,
    )
}

fn refine(p: &DesignParams, qa: (f64, f64), qb: (f64, f64)) -> ((f64, f64), (f64, f64)) {
    let mut x = Vector4::new(qa.0, qa.1, qb.0, qb.1);
    let mut f = residual(p, &x);
    for _ in 0..40 {
        let fnorm = f.norm();
        if fnorm < 1e-15 {
            break;
        }
        let ga = singularity_gradient(p, x[0], x[1]);
        let gb = singularity_gradient(p, x[2], x[3]);
        let ja = section_jacobian(p, x[0], x[1]);
        let jb = section_jacobian(p, x[2], x[3]);
        let m = Matrix4::new(
            ga[0], ga[1], 0.0, 0.0, 0.0, 0.0, gb[0], gb[1], ja[0][0], ja[0][1], -jb[0][0],
            -jb[0][1], ja[1][0], ja[1][1], -jb[1][0], -jb[1][1],
        );
        let Some(step) = m.lu().solve(&-f) else {
            break;
        };
        if !step.iter().all(|v| v.is_finite()) {
            break;
        }
        let mut scale = 1.0;
        let mut improved = false;
        for _ in 0..20 {
            let trial = x + step * scale;
            let ft = residual(p, &trial);
            if ft.norm() < fnorm {
                x = trial;
                f = ft;
                improved = true;
                break;
            }
            scale *= 0.5;
        }
        if !improved {
            break;
        }
    }
    (
        (wrap_angle(x[0]), wrap_angle(x[1])),
        (wrap_angle(x[2]), wrap_angle(x[3])),
    )
}

fn extent(curves: &[SectionCurve]) -> (f64, f64) {
    let mut rho_max = 0.0f64;
    let (mut zlo, mut zhi) = (f64::MAX, f64::MIN);
    for q in curves.iter().flat_map(|c| &c.points) {
        rho_max = rho_max.max(q.rho);
        zlo = zlo.min(q.z);
        zhi = zhi.max(q.z);
    }
    if zlo > zhi {
        return (0.0, 0.0);
    }
    (rho_max, rho_max.hypot(zhi - zlo))
}

/// Self- and mutual crossings of the section curves with distinct
/// preimages, refined and deduplicated within `tol`.
pub fn find_nodes(p: &DesignParams, curves: &[SectionCurve], tol: f64) -> NodeReport {
    let (rho_max, diameter) = extent(curves);
    if diameter == 0.0 {
        return NodeReport::default();
    }
    let segments: Vec<Segment> = curves
        .iter()
        .enumerate()
        .flat_map(|(ci, c)| {
            c.segments().map(move |(i, j)| Segment {
                curve: ci,
                index: i,
                a: c.points[i],
                b: c.points[j],
                qa: c.preimages[i],
                qb: c.preimages[j],
            })
        })
        .filter(|s| s.a.distance(&s.b) > 1e-12 * diameter)
        .collect();
    let mut lengths: Vec<f64> = segments.iter().map(|s| s.a.distance(&s.b)).collect();
    lengths.sort_by(f64::total_cmp);
    let step = lengths
        .get(lengths.len() / 2)
        .copied()
        .unwrap_or(diameter / 256.0);
    // each segment stays inside one trace cell
    let joint_step = segments
        .iter()
        .map(|s| torus_distance(s.qa, s.qb))
        .fold(0.0, f64::max);
    let axis = (AXIS_EXCLUSION * rho_max).max(2.0 * step);

    let cell = (diameter / 512.0).max(step);
    let key = |rho: f64, z: f64| ((rho / cell).floor() as i64, (z / cell).floor() as i64);
    let mut buckets: HashMap<(i64, i64), Vec<usize>> = HashMap::new();
    for (k, s) in segments.iter().enumerate() {
        let (i0, j0) = key(s.a.rho.min(s.b.rho), s.a.z.min(s.b.z));
        let (i1, j1) = key(s.a.rho.max(s.b.rho), s.a.z.max(s.b.z));
        for i in i0..=i1 {
            for j in j0..=j1 {
                buckets.entry((i, j)).or_default().push(k);
            }
        }
    }

    let mut pairs: Vec<(usize, usize)> = Vec::new();
    for list in buckets.values() {
        for (x, &a) in list.iter().enumerate() {
            for &b in &list[x + 1..] {
                pairs.push((a.min(b), a.max(b)));
            }
        }
    }
    pairs.sort_unstable();
    pairs.dedup();

    let mut candidates: Vec<NodePoint> = Vec::new();
    for (a, b) in pairs {
        let (s, o) = (&segments[a], &segments[b]);
        if adjacent(s, o, curves) {
            continue;
        }
        let Some((t, u, _)) = intersect(s, o) else {
            continue;
        };
        let raw = SectionPoint::new(
            s.a.rho + t * (s.b.rho - s.a.rho),
            s.a.z + t * (s.b.z - s.a.z),
        );
        if raw.rho < axis {
            continue;
        }
        let qa0 = torus_lerp(s.qa, s.qb, t);
        let qb0 = torus_lerp(o.qa, o.qb, u);
        // two branches crossing in joint space share their image there
        if torus_distance(qa0, qb0) < (3.0 * joint_step).max(MIN_PREIMAGE_GAP) {
            continue;
        }
        let (qa, qb) = refine(p, qa0, qb0);
        if torus_distance(qa, qb) < MIN_PREIMAGE_GAP {
            continue;
        }
        let (ra2, za) = section_sq(p, qa.0, qa.1);
        let (rb2, zb) = section_sq(p, qb.0, qb.1);
        let (ra, rb) = (ra2.sqrt(), rb2.sqrt());
        let residual = (ra - rb).hypot(za - zb);
        let refined = SectionPoint::new(0.5 * (ra + rb), 0.5 * (za + zb));
        // keep the polyline crossing when the refinement failed or drifted
        let location = if residual <= 1e-3 * step && refined.distance(&raw) <= 2.0 * step {
            refined
        } else {
            raw
        };
        candidates.push(NodePoint {
            location,
            preimages: [qa, qb],
            residual,
            witness_pairs: 0,
        });
    }

    candidates.sort_by(|a, b| {
        a.location
            .rho
            .total_cmp(&b.location.rho)
            .then(a.location.z.total_cmp(&b.location.z))
    });
    let mut merged: Vec<NodePoint> = Vec::new();
    for c in candidates {
        match merged
            .iter_mut()
            .find(|m| m.location.distance(&c.location) <= tol)
        {
            Some(m) if c.residual < m.residual => *m = c,
            Some(_) => {}
            None => merged.push(c),
        }
    }

    let mut report = NodeReport::default();
    for mut node in merged {
        node.witness_pairs = coincident_pairs(p, &node.location, WITNESS_TOL);
        if node.witness_pairs >= 2 {
            report.nodes.push(node);
        } else {
            report.warnings.push(ResolutionWarning::Unconfirmed {
                location: node.location,
                pairs: node.witness_pairs,
            });
        }
    }
    for (i, a) in report.nodes.iter().enumerate() {
        for b in &report.nodes[i + 1..] {
            let distance = a.location.distance(&b.location);
            if distance < 3.0 * step {
                report.warnings.push(ResolutionWarning::CloseNodes {
                    a: a.location,
                    b: b.location,
                    distance,
                });
            }
        }
    }
    report
}

/// Deduplication tolerance for a design: `1e-4` of the workspace diameter.
pub fn default_tolerance(p: &DesignParams) -> f64 {
    1e-4 * 2.0 * p.reach_bound()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::singular::{section_images, singular_branches};

    fn nodes(p: &DesignParams, n: usize) -> NodeReport {
        let curves = section_images(&singular_branches(p, n), p);
        find_nodes(p, &curves, default_tolerance(p))
    }

    #[test]
    fn four_nodes_for_long_last_link() {
        let p = DesignParams::new(0.0, 2.0, 3.0, 1.0, 0.0).unwrap();
        let r = nodes(&p, 512);
        assert_eq!(r.nodes.len(), 4, "{:?}", r);
    }

    #[test]
    fn no_nodes_for_short_last_link() {
        let p = DesignParams::new(0.0, 2.0, 1.0, 0.0, 0.0).unwrap();
        assert!(nodes(&p, 512).nodes.is_empty());
    }

    #[test]
    fn node_preimages_share_the_image() {
        let p = DesignParams::new(1.0, 1.4, 0.7, 0.0, 0.0).unwrap();
        let r = nodes(&p, 512);
        assert_eq!(r.nodes.len(), 2);
        for n in &r.nodes {
            assert!(torus_distance(n.preimages[0], n.preimages[1]) > 1e-6);
            assert!(n.residual < 1e-9);
            for q in n.preimages {
                assert!(reduced_singularity(&p, q.0, q.1).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn crossing_rejects_shallow_angles() {
        let seg = |a: (f64, f64), b: (f64, f64)| Segment {
            curve: 0,
            index: 0,
            a: SectionPoint::new(a.0, a.1),
            b: SectionPoint::new(b.0, b.1),
            qa: (0.0, 0.0),
            qb: (0.0, 0.0),
        };
        let x = seg((0.0, 0.0), (1.0, 1.0));
        let y = seg((0.0, 1.0), (1.0, 0.0));
        let (t, u, sin) = intersect(&x, &y).unwrap();
        assert!((t - 0.5).abs() < 1e-12 && (u - 0.5).abs() < 1e-12 && (sin - 1.0).abs() < 1e-12);
        let shallow = seg((0.0, 0.45), (1.0, 0.55));
        let flat = seg((0.0, 0.5), (1.0, 0.5));
        assert!(intersect(&shallow, &flat).is_none());
    }
}
