//! Zero set of the reduced singularity function on the joint torus.
//!
//! `S` is sampled on a periodic vertex grid and contoured with marching
//! squares; every contour vertex is an edge root refined by bisection, so
//! it lies on `S = 0` to machine precision. Zeros where `S` touches zero
//! without changing sign are found separately by minimizing `|S|` along
//! grid lines.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::Serialize;

use crate::model::{reduced_singularity, section_point, wrap_angle, DesignParams, SectionPoint};

/// Smallest accepted trace resolution.
pub const MIN_RESOLUTION: usize = 64;

/// Relative `|S|` accepted for a non-sign-changing zero.
pub const TANGENTIAL_TOL: f64 = 1e-12;

/// A branch of `S(θ2, θ3) = 0`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct JointCurve {
    pub id: usize,
    /// `(θ2, θ3)` samples, each wrapped to `(-π, π]`.
    pub points: Vec<(f64, f64)>,
    pub closed: bool,
    /// Set for branches along which `S` does not change sign.
    pub tangential: bool,
}

/// Image of a [`JointCurve`] in the half cross-section.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SectionCurve {
    pub id: usize,
    pub points: Vec<SectionPoint>,
    pub preimages: Vec<(f64, f64)>,
    pub closed: bool,
    pub tangential: bool,
}

impl SectionCurve {
    /// Segments as index pairs, including the closing one.
    pub fn segments(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let n = self.points.len();
        let count = if self.closed && n > 2 {
            n
        } else {
            n.saturating_sub(1)
        };
        (0..count).map(move |i| (i, (i + 1) % n))
    }
}

/// Wrapped difference `b - a` on the torus.
pub fn torus_delta(a: (f64, f64), b: (f64, f64)) -> (f64, f64) {
    (wrap_angle(b.0 - a.0), wrap_angle(b.1 - a.1))
}

pub fn torus_distance(a: (f64, f64), b: (f64, f64)) -> f64 {
    let (u, v) = torus_delta(a, b);
    u.hypot(v)
}

/// Point at fraction `s` from `a` to `b` along the short torus path.
pub fn torus_lerp(a: (f64, f64), b: (f64, f64), s: f64) -> (f64, f64) {
    let (u, v) = torus_delta(a, b);
    (wrap_angle(a.0 + s * u), wrap_angle(a.1 + s * v))
}

struct Grid {
    n2: usize,
    n3: usize,
    values: Vec<f32>,
}

impl Grid {
    fn theta2(&self, i: usize) -> f64 {
        -PI + (i as f64 + 0.5) * 2.0 * PI / self.n2 as f64
    }

    fn theta3(&self, j: usize) -> f64 {
        -PI + (j as f64 + 0.5) * 2.0 * PI / self.n3 as f64
    }

    fn at(&self, i: usize, j: usize) -> f32 {
        self.values[(j % self.n3) * self.n2 + i % self.n2]
    }

    fn positive(&self, i: usize, j: usize) -> bool {
        self.at(i, j) > 0.0
    }

    fn h_edge(&self, i: usize, j: usize) -> usize {
        (j % self.n3) * self.n2 + i % self.n2
    }

    fn v_edge(&self, i: usize, j: usize) -> usize {
        self.n2 * self.n3 + (j % self.n3) * self.n2 + i % self.n2
    }
}

fn sample(p: &DesignParams, n2: usize, n3: usize) -> Grid {
    let mut grid = Grid {
        n2,
        n3,
        values: Vec::new(),
    };
    let rows: Vec<Vec<f32>> = (0..n3)
        .into_par_iter()
        .map(|j| {
            let t3 = grid.theta3(j);
            (0..n2)
                .map(|i| reduced_singularity(p, grid.theta2(i), t3) as f32)
                .collect()
        })
        .collect();
    grid.values = rows.concat();
    grid
}

/// Bisection for the sign change of `f` on `[lo, hi]`.
fn bisect_sign(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let mut flo = f(lo);
    for _ in 0..64 {
        if hi - lo < 1e-14 {
            break;
        }
        let mid = 0.5 * (lo + hi);
        let fm = f(mid);
        if fm == 0.0 {
            return mid;
        }
        if (fm > 0.0) == (flo > 0.0) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

fn edge_root(p: &DesignParams, g: &Grid, edge: usize) -> (f64, f64) {
    let plane = g.n2 * g.n3;
    let horizontal = edge < plane;
    let k = edge % plane;
    let (i, j) = (k % g.n2, k / g.n2);
    let (t2, t3) = (g.theta2(i), g.theta3(j));
    if horizontal {
        let h = 2.0 * PI / g.n2 as f64;
        let r = bisect_sign(|x| reduced_singularity(p, x, t3), t2, t2 + h);
        (wrap_angle(r), t3)
    } else {
        let h = 2.0 * PI / g.n3 as f64;
        let r = bisect_sign(|x| reduced_singularity(p, t2, x), t3, t3 + h);
        (t2, wrap_angle(r))
    }
}

/// Links between crossing edges, two per crossing edge.
fn contour_links(g: &Grid) -> Vec<[usize; 2]> {
    let unset = usize::MAX;
    let mut links = vec![[unset; 2]; 2 * g.n2 * g.n3];
    let mut connect = |a: usize, b: usize| {
        for (x, y) in [(a, b), (b, a)] {
            let slot = &mut links[x];
            if slot[0] == unset {
                slot[0] = y;
            } else {
                slot[1] = y;
            }
        }
    };
    for j in 0..g.n3 {
        for i in 0..g.n2 {
            let c = [
                g.positive(i, j),
                g.positive(i + 1, j),
                g.positive(i + 1, j + 1),
                g.positive(i, j + 1),
            ];
            // bottom, right, top, left
            let edges = [
                g.h_edge(i, j),
                g.v_edge(i + 1, j),
                g.h_edge(i, j + 1),
                g.v_edge(i, j),
            ];
            let crossing = [c[0] != c[1], c[1] != c[2], c[2] != c[3], c[3] != c[0]];
            let count = crossing.iter().filter(|&&x| x).count();
            if count == 2 {
                let mut it = (0..4).filter(|&k| crossing[k]);
                let (a, b) = (it.next().unwrap_or(0), it.next().unwrap_or(0));
                connect(edges[a], edges[b]);
            } else if count == 4 {
                // two branches crossing inside the cell join opposite
                // edges, so each keeps its direction
                connect(edges[0], edges[2]);
                connect(edges[1], edges[3]);
            }
        }
    }
    links
}

fn walk_cycles(p: &DesignParams, g: &Grid, links: &[[usize; 2]]) -> Vec<Vec<(f64, f64)>> {
    let unset = usize::MAX;
    let mut seen = vec![false; links.len()];
    let mut cycles = Vec::new();
    for start in 0..links.len() {
        if seen[start] || links[start][0] == unset {
            continue;
        }
        let mut order = vec![start];
        seen[start] = true;
        let mut prev = start;
        let mut cur = links[start][0];
        while cur != start && cur != unset && !seen[cur] {
            seen[cur] = true;
            order.push(cur);
            let [a, b] = links[cur];
            let next = if a == prev { b } else { a };
            prev = cur;
            cur = next;
        }
        let points = order.par_iter().map(|&e| edge_root(p, g, e)).collect();
        cycles.push(points);
    }
    cycles
}

/// Golden-section minimum of `|f|` on `[a, b]`.
fn golden_min(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> (f64, f64) {
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = b - r * (b - a);
    let mut x2 = a + r * (b - a);
    let (mut f1, mut f2) = (f(x1).abs(), f(x2).abs());
    for _ in 0..80 {
        if f1 < f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - r * (b - a);
            f1 = f(x1).abs();
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + r * (b - a);
            f2 = f(x2).abs();
        }
    }
    if f1 < f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

/// Zeros of `S` without a sign change, located along grid rows and columns.
fn tangential_points(p: &DesignParams, g: &Grid) -> Vec<(f64, f64)> {
    let max = g.values.iter().fold(0.0f64, |m, v| m.max(v.abs() as f64));
    if max == 0.0 {
        return Vec::new();
    }
    let screen = 1e-2 * max;
    let accept = TANGENTIAL_TOL * max;
    let scan = |len: usize, value: &dyn Fn(usize) -> f32| -> Vec<usize> {
        (0..len)
            .filter(|&k| {
                let (a, b, c) = (value(k + len - 1), value(k), value(k + 1));
                (b.abs() as f64) < screen
                    && b.abs() <= a.abs()
                    && b.abs() < c.abs()
                    && (a > 0.0) == (b > 0.0)
                    && (b > 0.0) == (c > 0.0)
            })
            .collect()
    };

    let h2 = 2.0 * PI / g.n2 as f64;
    let h3 = 2.0 * PI / g.n3 as f64;
    let mut out: Vec<(f64, f64)> = (0..g.n2)
        .into_par_iter()
        .flat_map_iter(|i| {
            let t2 = g.theta2(i);
            scan(g.n3, &|j| g.at(i, j % g.n3))
                .into_iter()
                .filter_map(move |j| {
                    let t3 = g.theta3(j);
                    let (x, v) = golden_min(|x| reduced_singularity(p, t2, x), t3 - h3, t3 + h3);
                    (v <= accept).then(|| (t2, wrap_angle(x)))
                })
                .collect::<Vec<_>>()
        })
        .collect();
    let rows: Vec<(f64, f64)> = (0..g.n3)
        .into_par_iter()
        .flat_map_iter(|j| {
            let t3 = g.theta3(j);
            scan(g.n2, &|i| g.at(i % g.n2, j))
                .into_iter()
                .filter_map(move |i| {
                    let t2 = g.theta2(i);
                    let (x, v) = golden_min(|x| reduced_singularity(p, x, t3), t2 - h2, t2 + h2);
                    (v <= accept).then(|| (wrap_angle(x), t3))
                })
                .collect::<Vec<_>>()
        })
        .collect();
    let merge = 0.25 * h2.min(h3);
    for q in rows {
        if !out.iter().any(|&o| torus_distance(o, q) < merge) {
            out.push(q);
        }
    }
    out
}

/// Greedy nearest-neighbour chains; points farther apart than `reach`
/// are never joined.
fn chain(mut points: Vec<(f64, f64)>, reach: f64) -> Vec<(Vec<(f64, f64)>, bool)> {
    let mut chains = Vec::new();
    while let Some(seed) = points.pop() {
        let mut line = vec![seed];
        for forward in [true, false] {
            loop {
                let tip = if forward {
                    line[line.len() - 1]
                } else {
                    line[0]
                };
                let best = points
                    .iter()
                    .enumerate()
                    .map(|(k, &q)| (k, torus_distance(tip, q)))
                    .filter(|&(_, d)| d <= reach)
                    .min_by(|a, b| a.1.total_cmp(&b.1));
                let Some((k, _)) = best else { break };
                let q = points.swap_remove(k);
                if forward {
                    line.push(q);
                } else {
                    line.insert(0, q);
                }
            }
        }
        if line.len() < 2 {
            continue;
        }
        let closed = line.len() > 2 && torus_distance(line[0], line[line.len() - 1]) <= reach;
        chains.push((line, closed));
    }
    chains
}

/// All branches of `S = 0`, traced with `n` samples in `θ3` and `4n` in
/// `θ2`.
///
/// # Panics
///
/// Panics when `n < MIN_RESOLUTION`.
pub fn singular_branches(p: &DesignParams, n: usize) -> Vec<JointCurve> {
    assert!(
        n >= MIN_RESOLUTION,
        "trace resolution {n} below {MIN_RESOLUTION}"
    );
    // multiples of 4 keep the lines θ = 0, ±π/2, π off the vertices
    let n3 = n.div_ceil(4) * 4;
    let n2 = 4 * n3;
    let g = sample(p, n2, n3);
    let links = contour_links(&g);
    let mut curves: Vec<JointCurve> = walk_cycles(p, &g, &links)
        .into_iter()
        .filter(|c| c.len() >= 2)
        .map(|points| JointCurve {
            id: 0,
            closed: points.len() > 2,
            points,
            tangential: false,
        })
        .collect();

    let reach = 2.5 * (2.0 * PI / n3 as f64);
    for (points, closed) in chain(tangential_points(p, &g), reach) {
        curves.push(JointCurve {
            id: 0,
            points,
            closed,
            tangential: true,
        });
    }
    curves.sort_by(|a, b| {
        let ka = a
            .points
            .iter()
            .fold((f64::MAX, f64::MAX), |m, &q| min_pair(m, q));
        let kb = b
            .points
            .iter()
            .fold((f64::MAX, f64::MAX), |m, &q| min_pair(m, q));
        ka.0.total_cmp(&kb.0).then(ka.1.total_cmp(&kb.1))
    });
    for (k, c) in curves.iter_mut().enumerate() {
        c.id = k;
    }
    curves
}

fn min_pair(a: (f64, f64), b: (f64, f64)) -> (f64, f64) {
    if b.0 < a.0 || (b.0 == a.0 && b.1 < a.1) {
        b
    } else {
        a
    }
}

pub fn section_image(curve: &JointCurve, p: &DesignParams) -> SectionCurve {
    SectionCurve {
        id: curve.id,
        points: curve
            .points
            .iter()
            .map(|&(t2, t3)| section_point(p, t2, t3))
            .collect(),
        preimages: curve.points.clone(),
        closed: curve.closed,
        tangential: curve.tangential,
    }
}

pub fn section_images(curves: &[JointCurve], p: &DesignParams) -> Vec<SectionCurve> {
    curves.iter().map(|c| section_image(c, p)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn max_abs_s(p: &DesignParams) -> f64 {
        let mut m = 0.0f64;
        for i in 0..200 {
            for j in 0..200 {
                let t2 = -PI + 2.0 * PI * i as f64 / 200.0;
                let t3 = -PI + 2.0 * PI * j as f64 / 200.0;
                m = m.max(reduced_singularity(p, t2, t3).abs());
            }
        }
        m
    }

    #[test]
    fn samples_lie_on_zero_set() {
        let p = DesignParams::new(0.0, 2.0, 3.0, 1.0, 0.0).unwrap();
        let curves = singular_branches(&p, 128);
        assert!(!curves.is_empty());
        for c in &curves {
            for &(t2, t3) in &c.points {
                assert!(reduced_singularity(&p, t2, t3).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn consecutive_samples_are_close() {
        let p = DesignParams::new(1.0, 1.4, 0.7, 0.0, 0.5).unwrap();
        let curves = singular_branches(&p, 128);
        let step = 2.0 * PI / 128.0;
        for c in curves.iter().filter(|c| !c.tangential) {
            for w in c.points.windows(2) {
                assert!(torus_distance(w[0], w[1]) <= 1.5 * step, "{:?}", w);
            }
        }
    }

    #[test]
    fn tangential_branch_is_recovered() {
        // S = 2 d4² r2 cos θ2 cos² θ3 for this family
        let p = DesignParams::new(0.0, 0.0, 2.0, 1.5, 0.0).unwrap();
        let curves = singular_branches(&p, 64);
        let tang: Vec<_> = curves.iter().filter(|c| c.tangential).collect();
        assert!(!tang.is_empty());
        let scale = max_abs_s(&p);
        for c in tang {
            for &(t2, t3) in &c.points {
                assert!(t3.cos().abs() < 1e-5, "{t2} {t3}");
                assert!(reduced_singularity(&p, t2, t3).abs() <= TANGENTIAL_TOL * scale * 10.0);
            }
        }
    }

    #[test]
    fn crossing_lines_are_both_traced() {
        // S = -2 c3 d2 d4² s3 vanishes on four θ3 lines
        let p = DesignParams::new(1.0, 0.0, 1.5, 0.0, 0.0).unwrap();
        let curves = singular_branches(&p, 64);
        for target in [0.0, PI / 2.0, PI, -PI / 2.0] {
            let hit = curves
                .iter()
                .flat_map(|c| &c.points)
                .any(|&(_, t3)| wrap_angle(t3 - target).abs() < 1e-9);
            assert!(hit, "line θ3 = {target} missing");
        }
    }

    #[test]
    fn image_is_in_half_plane() {
        let p = DesignParams::new(0.0, 2.0, 1.5, 1.0, 0.0).unwrap();
        for c in singular_branches(&p, 128) {
            let s = section_image(&c, &p);
            assert_eq!(s.points.len(), c.points.len());
            assert!(s.points.iter().all(|q| q.rho >= 0.0));
        }
    }

    #[test]
    fn torus_helpers_wrap() {
        let a = (PI - 0.1, 0.0);
        let b = (-PI + 0.1, 0.0);
        assert!((torus_distance(a, b) - 0.2).abs() < 1e-12);
        let m = torus_lerp(a, b, 0.5);
        assert!((m.0.abs() - PI).abs() < 1e-12);
    }
}
