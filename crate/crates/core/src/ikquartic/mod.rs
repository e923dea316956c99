//! Inverse kinematics through the quartic in `t = tan(θ3/2)`.
//!
//! With `d2 > 0` the relations
//!
//! ```text
//! ρ² + z² = d2² + L² + r3² + Y² + 2 d2 (cos θ2 L + sin θ2 r3)
//! z       = cos θ2 r3 - sin θ2 L
//! ```
//!
//! are linear in `(cos θ2, sin θ2)`. Solving them and imposing
//! `cos² + sin² = 1` leaves one equation that is quadratic in
//! `(cos θ3, sin θ3)`; the half-angle substitution turns it into a quartic.
//! With `d2 = 0` the first relation no longer involves `θ2` and `θ3`
//! follows from a single trigonometric-linear equation.

pub mod roots;

use nalgebra::Vector3;
use serde::Serialize;
use thiserror::Error;

use crate::model::{
    arm_frame, fk, jacobian, CartesianPoint, DesignParams, JointConfig, SectionPoint,
};
use roots::{real_roots, RealRoot, RootTolerances};

/// Relative distance under which roots are merged.
pub const CLUSTER_TOL: f64 = 1e-7;
/// Leading coefficient below this fraction of the largest one marks a
/// root at `θ3 = π`.
pub const LEADING_TOL: f64 = 1e-10;
/// Default relative position residual accepted by [`ik`].
pub const RESIDUAL_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum IkError {
    /// The quartic needs `d2 > 0`; the trigonometric reduction needs `d2 = 0`.
    #[error("elimination path does not apply: d2 = {0}")]
    DegenerateElimination(f64),
    #[error("non-finite input")]
    NonFinite,
    #[error("tolerance must be positive, got {0}")]
    BadTolerance(f64),
}

/// `P(t) = a t⁴ + b t³ + c t² + d t + e`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Quartic {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
    pub e: f64,
}

impl Quartic {
    pub fn coeffs(&self) -> [f64; 5] {
        [self.a, self.b, self.c, self.d, self.e]
    }

    pub fn eval(&self, t: f64) -> f64 {
        roots::eval(&self.coeffs(), t)
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs().iter().fold(0.0, |m, c| m.max(c.abs()))
    }

    /// True when the odd coefficients vanish, i.e. `P(t) = P(-t)`. This is
    /// always the case for `r2 = 0`.
    pub fn is_even(&self) -> bool {
        let s = self.max_abs();
        self.b.abs() <= LEADING_TOL * s && self.d.abs() <= LEADING_TOL * s
    }

    pub fn roots(&self) -> RootSet {
        self.roots_with(RootTolerances::default())
    }

    /// Real roots, with the `θ3 = π` root reported when the degree drops.
    pub fn roots_with(&self, tol: RootTolerances) -> RootSet {
        let c = self.coeffs();
        let scale = self.max_abs();
        if scale == 0.0 {
            return RootSet::continuum();
        }
        let at_infinity = c
            .iter()
            .take_while(|x| x.abs() <= LEADING_TOL * scale)
            .count();
        let finite = real_roots(&c[at_infinity..], tol);
        let mut out: Vec<Root> = finite.into_iter().map(Root::from).collect();
        if at_infinity > 0 {
            out.push(Root {
                value: RootValue::AtInfinity,
                multiplicity: at_infinity as u32,
            });
        }
        RootSet {
            roots: out,
            continuum: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum RootValue {
    /// `t = tan(θ3/2)`.
    Finite(f64),
    /// `θ3 = π`.
    AtInfinity,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Root {
    pub value: RootValue,
    pub multiplicity: u32,
}

impl Root {
    pub fn theta3(&self) -> f64 {
        match self.value {
            RootValue::Finite(t) => 2.0 * t.atan(),
            RootValue::AtInfinity => std::f64::consts::PI,
        }
    }

    fn from_theta3(theta3: f64, multiplicity: u32) -> Root {
        let half = 0.5 * crate::model::wrap_angle(theta3);
        let value = if half.cos().abs() < 1e-12 {
            RootValue::AtInfinity
        } else {
            RootValue::Finite(half.tan())
        };
        Root {
            value,
            multiplicity,
        }
    }
}

impl From<RealRoot> for Root {
    fn from(r: RealRoot) -> Self {
        Root {
            value: RootValue::Finite(r.value),
            multiplicity: r.multiplicity,
        }
    }
}

/// Candidate `θ3` values with multiplicities. `continuum` marks the
/// degenerate case where every `θ3` satisfies the equation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RootSet {
    pub roots: Vec<Root>,
    pub continuum: bool,
}

impl RootSet {
    fn empty() -> Self {
        RootSet {
            roots: Vec::new(),
            continuum: false,
        }
    }

    fn continuum() -> Self {
        RootSet {
            roots: Vec::new(),
            continuum: true,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.roots.is_empty() && !self.continuum
    }

    pub fn total_multiplicity(&self) -> u32 {
        self.roots.iter().map(|r| r.multiplicity).sum()
    }

    /// Whether some root lies within the clustering tolerance of `theta3`.
    pub fn contains_theta3(&self, theta3: f64, tol: f64) -> bool {
        self.continuum
            || self
                .roots
                .iter()
                .any(|r| crate::model::wrap_angle(r.theta3() - theta3).abs() <= tol)
    }
}

fn check_finite(values: &[f64]) -> Result<(), IkError> {
    if values.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(IkError::NonFinite)
    }
}

/// Coefficients `k` of `k0 + kc c + ks s + kcc c² + kcs c s + kss s²`
/// (with `c = cos θ3`, `s = sin θ3`) whose zeros are the `θ3` solutions
/// for `d2 > 0`.
fn trig_quadratic(p: &DesignParams, rho2: f64, z: f64) -> [f64; 6] {
    let DesignParams { d2, d3, d4, r2, r3 } = *p;
    let g = rho2 + z * z - d2 * d2 - r3 * r3 - d3 * d3 - d4 * d4 - r2 * r2;
    let alpha = 2.0 * d3 * d4;
    let beta = 2.0 * r2 * d4;
    let f = 4.0 * d2 * d2;
    [
        g * g + f * (z * z - d3 * d3 - r3 * r3),
        -2.0 * g * alpha - f * 2.0 * d3 * d4,
        -2.0 * g * beta,
        alpha * alpha - f * d4 * d4,
        2.0 * alpha * beta,
        beta * beta,
    ]
}

/// The inverse kinematic quartic at a section point given as `(ρ², z)`.
pub fn quartic_at(p: &DesignParams, rho2: f64, z: f64) -> Result<Quartic, IkError> {
    check_finite(&[rho2, z])?;
    if p.d2 == 0.0 {
        return Err(IkError::DegenerateElimination(p.d2));
    }
    let [k0, kc, ks, kcc, kcs, kss] = trig_quadratic(p, rho2, z);
    Ok(Quartic {
        a: k0 - kc + kcc,
        b: 2.0 * ks - 2.0 * kcs,
        c: 2.0 * k0 - 2.0 * kcc + 4.0 * kss,
        d: 2.0 * ks + 2.0 * kcs,
        e: k0 + kc + kcc,
    })
}

/// Coefficients `(A, B, C)` of `A cos θ3 + B sin θ3 + C = 0`, the `d2 = 0`
/// reduction.
pub fn trig_linear(p: &DesignParams, rho2: f64, z: f64) -> (f64, f64, f64) {
    let DesignParams { d3, d4, r2, r3, .. } = *p;
    (
        2.0 * d3 * d4,
        2.0 * r2 * d4,
        d3 * d3 + d4 * d4 + r2 * r2 + r3 * r3 - rho2 - z * z,
    )
}

fn solve_trig_linear(a: f64, b: f64, c: f64, tangency: f64) -> RootSet {
    let r = a.hypot(b);
    let scale = r + c.abs();
    if scale == 0.0 {
        return RootSet::continuum();
    }
    if r <= 1e-14 * scale {
        return if c.abs() <= 1e-14 * scale.max(1.0) {
            RootSet::continuum()
        } else {
            RootSet::empty()
        };
    }
    // a cos θ + b sin θ = r cos(θ - φ)
    let k = -c / r;
    if k.abs() > 1.0 + tangency {
        return RootSet::empty();
    }
    let phi = b.atan2(a);
    if (k.abs() - 1.0).abs() <= tangency {
        let theta = if k > 0.0 {
            phi
        } else {
            phi + std::f64::consts::PI
        };
        return RootSet {
            roots: vec![Root::from_theta3(theta, 2)],
            continuum: false,
        };
    }
    let w = k.acos();
    RootSet {
        roots: vec![Root::from_theta3(phi - w, 1), Root::from_theta3(phi + w, 1)],
        continuum: false,
    }
}

/// `θ3` solutions for `d2 = 0`, as a root set in `t`.
pub fn theta3_candidates(p: &DesignParams, rho2: f64, z: f64) -> Result<RootSet, IkError> {
    check_finite(&[rho2, z])?;
    if p.d2 != 0.0 {
        return Err(IkError::DegenerateElimination(p.d2));
    }
    let (a, b, c) = trig_linear(p, rho2, z);
    Ok(solve_trig_linear(a, b, c, 1e-13))
}

/// How the `θ3` equation is solved for `d2 > 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Elimination {
    /// The quartic in `tan(θ3/2)`.
    Quartic,
    /// The quadratic in `cos θ3` when `r2 = 0`, falling back to the
    /// quartic otherwise. Faster, and used for counting.
    Reduced,
}

/// Roots of `k0 + kc c + kcc c² = 0` in `c = cos θ3`, as `θ3` roots.
fn solve_cos_quadratic(k0: f64, kc: f64, kcc: f64, tangency: f64) -> RootSet {
    let scale = k0.abs() + kc.abs() + kcc.abs();
    if scale == 0.0 {
        return RootSet::continuum();
    }
    let mut cs: Vec<(f64, u32)> = Vec::with_capacity(2);
    if kcc.abs() <= 1e-12 * scale {
        if kc.abs() <= 1e-12 * scale {
            return RootSet::empty();
        }
        cs.push((-k0 / kc, 1));
    } else {
        let disc = kc * kc - 4.0 * kcc * k0;
        let slack = tangency * (kc * kc + (4.0 * kcc * k0).abs());
        if disc < -slack {
            return RootSet::empty();
        }
        if disc <= slack {
            cs.push((-kc / (2.0 * kcc), 2));
        } else {
            // the form avoiding cancellation
            let q = -0.5 * (kc + kc.signum() * disc.sqrt());
            cs.push((q / kcc, 1));
            cs.push((k0 / q, 1));
        }
    }
    let mut roots = Vec::with_capacity(4);
    for (c, m) in cs {
        if c.abs() > 1.0 + 1e-12 {
            continue;
        }
        if c.abs() >= 1.0 - 1e-12 {
            let theta = if c > 0.0 { 0.0 } else { std::f64::consts::PI };
            roots.push(Root::from_theta3(theta, 2 * m));
        } else {
            let w = c.acos();
            roots.push(Root::from_theta3(-w, m));
            roots.push(Root::from_theta3(w, m));
        }
    }
    RootSet {
        roots,
        continuum: false,
    }
}

fn theta3_roots(
    p: &DesignParams,
    rho2: f64,
    z: f64,
    tol: RootTolerances,
    how: Elimination,
) -> RootSet {
    if p.d2 > 0.0 {
        if how == Elimination::Reduced && p.r2 == 0.0 {
            let [k0, kc, _, kcc, _, _] = trig_quadratic(p, rho2, z);
            return solve_cos_quadratic(k0, kc, kcc, tol.multiple.max(1e-13));
        }
        // d2 > 0 was just checked, so the elimination cannot fail
        quartic_at(p, rho2, z)
            .map(|q| q.roots_with(tol))
            .unwrap_or_else(|_| RootSet::empty())
    } else {
        let (a, b, c) = trig_linear(p, rho2, z);
        solve_trig_linear(a, b, c, tol.multiple.max(1e-13))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IkSolution {
    pub q: JointConfig,
    /// Distance from `fk(q)` to the requested point.
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IkSolutionSet {
    pub solutions: Vec<IkSolution>,
    /// Set when the query is singular: roots merged, twin solutions
    /// coincided, or a joint angle was undetermined.
    pub degenerate: bool,
}

impl IkSolutionSet {
    pub fn len(&self) -> usize {
        self.solutions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.solutions.is_empty()
    }

    pub fn contains(&self, q: &JointConfig, tol: f64) -> bool {
        self.solutions.iter().any(|s| s.q.distance(q) <= tol)
    }
}

/// Joint pairs over a section point.
#[derive(Debug, Clone, Default)]
pub(crate) struct Preimages {
    /// `(θ2, θ3, m)`, with `m` the number of solutions merged into the pair.
    pub points: Vec<(f64, f64, u32)>,
    /// `θ3` roots at which `θ2` is undetermined: a whole circle of
    /// solutions reaches the point.
    pub free: u32,
    pub degenerate: bool,
}

/// `(θ2, θ3)` pairs consistent with a section point.
pub(crate) fn section_preimages(
    p: &DesignParams,
    rho2: f64,
    z: f64,
    tol: RootTolerances,
    how: Elimination,
) -> Preimages {
    let mut out = Preimages::default();
    let set = theta3_roots(p, rho2, z, tol, how);
    if set.continuum {
        out.degenerate = true;
        return out;
    }
    let twin_tol = tol.multiple.max(1e-12);
    let free_tol = (tol.multiple * tol.multiple).max(1e-24);
    let scale = rho2 + z * z + p.reach_bound().powi(2);
    for root in &set.roots {
        if root.multiplicity > 1 {
            out.degenerate = true;
        }
        let theta3 = root.theta3();
        let (s3, c3) = theta3.sin_cos();
        let l = p.d3 + p.d4 * c3;
        let y = p.r2 + p.d4 * s3;
        let den = l * l + p.r3 * p.r3;
        if den <= free_tol * scale {
            out.degenerate = true;
            out.free += 1;
            continue;
        }
        if p.d2 > 0.0 {
            let w = (rho2 + z * z - p.d2 * p.d2 - den - y * y) / (2.0 * p.d2);
            let c2 = (p.r3 * z + l * w) / den;
            let s2 = (p.r3 * w - l * z) / den;
            out.points.push((s2.atan2(c2), theta3, root.multiplicity));
        } else {
            let x2 = rho2 - y * y;
            if x2 < -twin_tol * scale {
                continue;
            }
            let x = x2.max(0.0).sqrt();
            let signs: &[f64] = if x2 <= twin_tol * scale {
                out.degenerate = true;
                &[1.0]
            } else {
                &[1.0, -1.0]
            };
            let mult = if signs.len() == 1 {
                2 * root.multiplicity
            } else {
                root.multiplicity
            };
            for &sg in signs {
                let xs = sg * x;
                let c2 = (l * xs + p.r3 * z) / den;
                let s2 = (p.r3 * xs - l * z) / den;
                out.points.push((s2.atan2(c2), theta3, mult));
            }
        }
    }
    out
}

/// A few damped Gauss-Newton steps on `fk(q) = target`.
fn polish(p: &DesignParams, q: JointConfig, target: &CartesianPoint) -> JointConfig {
    let mut best = q;
    let mut best_err = fk(p, &q).0.distance(target);
    let mut cur = q;
    for _ in 0..4 {
        if best_err == 0.0 {
            break;
        }
        let (c, _) = fk(p, &cur);
        let r = Vector3::new(target.x - c.x, target.y - c.y, target.z - c.z);
        let j = jacobian(p, &cur);
        let svd = j.svd(true, true);
        let Ok(step) = svd.solve(&r, 1e-12 * (1.0 + svd.singular_values.max())) else {
            break;
        };
        cur = JointConfig::new(
            cur.theta1 + step[0],
            cur.theta2 + step[1],
            cur.theta3 + step[2],
        );
        let err = fk(p, &cur).0.distance(target);
        if err < best_err {
            best = cur;
            best_err = err;
        } else {
            break;
        }
    }
    best
}

/// All joint configurations reaching `point`.
///
/// Solutions farther than `tol * (1 + |point|)` from the point after
/// refinement are dropped; an empty set means the point is unreachable.
pub fn ik(p: &DesignParams, point: &CartesianPoint, tol: f64) -> Result<IkSolutionSet, IkError> {
    if !point.is_finite() {
        return Err(IkError::NonFinite);
    }
    if tol.is_nan() || tol <= 0.0 {
        return Err(IkError::BadTolerance(tol));
    }
    let rho2 = point.x * point.x + point.y * point.y;
    let pre = section_preimages(
        p,
        rho2,
        point.z,
        RootTolerances::default(),
        Elimination::Quartic,
    );
    let mut degenerate = pre.degenerate;
    let limit = tol * (1.0 + point.norm());

    let mut sols: Vec<IkSolution> = Vec::with_capacity(pre.points.len());
    for (theta2, theta3, _) in pre.points {
        let f = arm_frame(p, theta2, theta3);
        let theta1 = if rho2 == 0.0 || (f.x == 0.0 && f.y == 0.0) {
            degenerate = true;
            0.0
        } else {
            point.y.atan2(point.x) - f.y.atan2(f.x)
        };
        let q = polish(p, JointConfig::new(theta1, theta2, theta3), point);
        let residual = fk(p, &q).0.distance(point);
        if residual <= limit {
            sols.push(IkSolution { q, residual });
        }
    }

    sols.sort_by(|a, b| {
        a.q.theta3
            .total_cmp(&b.q.theta3)
            .then(a.q.theta2.total_cmp(&b.q.theta2))
    });
    let mut unique: Vec<IkSolution> = Vec::with_capacity(sols.len());
    for s in sols {
        if unique
            .iter()
            .any(|u| u.q.distance(&s.q) <= 10.0 * CLUSTER_TOL)
        {
            degenerate = true;
            continue;
        }
        unique.push(s);
    }
    Ok(IkSolutionSet {
        solutions: unique,
        degenerate,
    })
}

/// Number of distinct inverse kinematic solutions at any point with the
/// given section coordinates.
pub fn iks_count(p: &DesignParams, s: &SectionPoint) -> u8 {
    let rho2 = s.rho * s.rho;
    let set = theta3_roots(
        p,
        rho2,
        s.z,
        RootTolerances::default(),
        Elimination::Reduced,
    );
    if set.continuum {
        return 4;
    }
    if p.d2 > 0.0 {
        return set.roots.len().min(4) as u8;
    }
    let scale = rho2 + s.z * s.z + p.reach_bound().powi(2);
    let mut n = 0u8;
    for root in &set.roots {
        let y = p.r2 + p.d4 * root.theta3().sin();
        let x2 = rho2 - y * y;
        if x2 > 1e-12 * scale {
            n += 2;
        } else if x2 >= -1e-12 * scale {
            n += 1;
        }
    }
    n.min(4)
}

/// Relaxed tolerances used when certifying special points whose location
/// is only known to finite precision.
pub fn witness_tolerances(rel: f64) -> RootTolerances {
    RootTolerances {
        multiple: rel,
        cluster: rel.sqrt().max(CLUSTER_TOL),
    }
}

/// Number of coincident solution pairs at a section point: each
/// cluster of `m` merged solutions contributes `m / 2` pairs and a circle
/// of solutions (undetermined `θ2`) contributes two.
pub fn coincident_pairs(p: &DesignParams, s: &SectionPoint, rel: f64) -> u32 {
    let pre = section_preimages(
        p,
        s.rho * s.rho,
        s.z,
        witness_tolerances(rel),
        Elimination::Quartic,
    );
    pre.points.iter().map(|&(_, _, m)| m / 2).sum::<u32>() + 2 * pre.free
}

/// Largest root multiplicity of the inverse kinematic polynomial written
/// in its symmetry-reduced variable.
///
/// For an even quartic (`r2 = 0`) roots are counted in `v = t²`, since
/// `t` and `-t` describe mirror solutions; with `d2 = 0` the polynomial is
/// the quadratic in `t` behind the trigonometric-linear equation. Three
/// coincident solutions (a cusp) need a multiplicity of at least 3 here.
pub fn reduced_max_multiplicity(p: &DesignParams, s: &SectionPoint, rel: f64) -> u32 {
    let rho2 = s.rho * s.rho;
    let tol = witness_tolerances(rel);
    if p.d2 > 0.0 {
        let Ok(q) = quartic_at(p, rho2, s.z) else {
            return 0;
        };
        if q.is_even() {
            // P(t) = a v² + c v + e with v = t²
            let reduced = Quartic {
                a: 0.0,
                b: 0.0,
                c: q.a,
                d: q.c,
                e: q.e,
            };
            let scale = q.max_abs();
            let coeffs = [q.a, q.c, q.e];
            let inf = coeffs
                .iter()
                .take_while(|x| x.abs() <= LEADING_TOL * scale)
                .count() as u32;
            let finite = real_roots(&reduced.coeffs()[2 + inf as usize..], tol);
            return finite
                .iter()
                .map(|r| r.multiplicity)
                .chain(std::iter::once(inf))
                .max()
                .unwrap_or(0);
        }
        return q
            .roots_with(tol)
            .roots
            .iter()
            .map(|r| r.multiplicity)
            .max()
            .unwrap_or(0);
    }
    let (a, b, c) = trig_linear(p, rho2, s.z);
    solve_trig_linear(a, b, c, rel)
        .roots
        .iter()
        .map(|r| r.multiplicity)
        .max()
        .unwrap_or(0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::section_sq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn random_q(rng: &mut ChaCha8Rng) -> JointConfig {
        JointConfig::new(
            rng.gen_range(-PI..PI),
            rng.gen_range(-PI..PI),
            rng.gen_range(-PI..PI),
        )
    }

    /// Independent check: scan θ3 for the scalar consistency condition.
    fn scan_theta3(p: &DesignParams, rho2: f64, z: f64) -> Vec<f64> {
        let n = 100_000;
        let h = |t3: f64| {
            let (s3, c3) = t3.sin_cos();
            let l = p.d3 + p.d4 * c3;
            let y = p.r2 + p.d4 * s3;
            let w = (rho2 + z * z - p.d2 * p.d2 - l * l - p.r3 * p.r3 - y * y) / (2.0 * p.d2);
            z * z + w * w - l * l - p.r3 * p.r3
        };
        let mut out = Vec::new();
        let mut prev_t = -PI;
        let mut prev = h(prev_t);
        for i in 1..=n {
            let t = -PI + 2.0 * PI * i as f64 / n as f64;
            let f = h(t);
            if (f < 0.0) != (prev < 0.0) {
                let (mut lo, mut hi, mut flo) = (prev_t, t, prev);
                for _ in 0..80 {
                    let m = 0.5 * (lo + hi);
                    let fm = h(m);
                    if (fm < 0.0) == (flo < 0.0) {
                        lo = m;
                        flo = fm;
                    } else {
                        hi = m;
                    }
                }
                out.push(0.5 * (lo + hi));
            }
            prev = f;
            prev_t = t;
        }
        out
    }

    #[test]
    fn quartic_vanishes_at_generating_theta3() {
        let p = DesignParams::new(1.0, 2.0, 1.5, 0.0, 0.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..10_000 {
            let q = random_q(&mut rng);
            let (rho2, z) = section_sq(&p, q.theta2, q.theta3);
            let quartic = quartic_at(&p, rho2, z).unwrap();
            let t = (q.theta3 / 2.0).tan();
            let scale = quartic.max_abs();
            let val = quartic.eval(t) / (1.0 + t * t).powi(2);
            assert!(val.abs() <= 1e-9 * scale, "{q:?} {quartic:?}");
        }
    }

    #[test]
    fn quartic_roots_match_scan() {
        let p = DesignParams::new(1.0, 0.5, 2.0, 0.0, 0.5).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..30 {
            let rho2 = rng.gen_range(0.0..12.0f64);
            let z = rng.gen_range(-3.5..3.5);
            let scan = scan_theta3(&p, rho2, z);
            let set = quartic_at(&p, rho2, z).unwrap().roots();
            let mut got: Vec<f64> = set.roots.iter().map(|r| r.theta3()).collect();
            got.sort_by(f64::total_cmp);
            assert_eq!(got.len(), scan.len(), "rho2={rho2} z={z} {got:?} {scan:?}");
            for (a, b) in got.iter().zip(&scan) {
                assert!((a - b).abs() < 1e-6);
            }
        }
    }

    #[test]
    fn unreachable_point_has_no_roots() {
        let p = DesignParams::new(1.0, 2.0, 1.5, 0.0, 0.0).unwrap();
        let r = 2.0 * p.reach_bound();
        let q = quartic_at(&p, r * r, 0.3).unwrap();
        assert!(q.roots().is_empty());
        let s = SectionPoint::new(r, 0.3);
        assert_eq!(iks_count(&p, &s), 0);
    }

    #[test]
    fn quartic_roots_are_scale_free() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..200 {
            let p = DesignParams::new(
                rng.gen_range(0.2..2.0),
                rng.gen_range(0.0..2.0),
                rng.gen_range(0.2..2.0),
                rng.gen_range(0.0..2.0),
                rng.gen_range(0.0..2.0),
            )
            .unwrap();
            let l: f64 = rng.gen_range(0.1..10.0);
            let q = random_q(&mut rng);
            let (rho2, z) = section_sq(&p, q.theta2, q.theta3);
            let a = quartic_at(&p, rho2, z).unwrap().roots();
            let b = quartic_at(&p.scaled(l), l * l * rho2, l * z)
                .unwrap()
                .roots();
            assert_eq!(a.roots.len(), b.roots.len());
            for (x, y) in a.roots.iter().zip(&b.roots) {
                assert!(crate::model::wrap_angle(x.theta3() - y.theta3()).abs() < 1e-6);
            }
        }
    }

    #[test]
    fn d2_zero_is_rejected_by_quartic() {
        let p = DesignParams::new(0.0, 2.0, 1.5, 1.0, 0.0).unwrap();
        assert_eq!(
            quartic_at(&p, 1.0, 0.0),
            Err(IkError::DegenerateElimination(0.0))
        );
        let q = DesignParams::new(1.0, 2.0, 1.5, 0.0, 0.0).unwrap();
        assert_eq!(
            theta3_candidates(&q, 1.0, 0.0),
            Err(IkError::DegenerateElimination(1.0))
        );
    }

    #[test]
    fn trig_linear_contains_generating_angle() {
        let p = DesignParams::new(0.0, 0.0, 2.0, 1.5, 0.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..1000 {
            let q = random_q(&mut rng);
            let (rho2, z) = section_sq(&p, q.theta2, q.theta3);
            let set = theta3_candidates(&p, rho2, z).unwrap();
            let t = (q.theta3 / 2.0).tan();
            let hit = set.roots.iter().any(|r| match r.value {
                RootValue::Finite(x) => (x - t).abs() <= 1e-9 * (1.0 + t.abs()),
                RootValue::AtInfinity => t.abs() > 1e9,
            });
            assert!(hit, "{q:?} {set:?}");
        }
    }

    #[test]
    fn trig_linear_edge_cases() {
        let p = DesignParams::new(0.0, 2.0, 1.5, 1.0, 0.0).unwrap();
        let (a, b, _) = trig_linear(&p, 0.0, 0.0);
        // C far larger than √(A² + B²)
        let big = 10.0 * p.reach_bound();
        assert!(theta3_candidates(&p, big * big, 0.0).unwrap().is_empty());
        assert!(a.hypot(b) > 0.0);

        let flat = DesignParams::unchecked(0.0, 0.0, 1.0, 0.0, 1.0);
        // C = 1 + 1 - rho² - z² vanishes for rho² + z² = 2
        let all = theta3_candidates(&flat, 1.5, 0.5f64.sqrt()).unwrap();
        assert!(all.continuum);
        let none = theta3_candidates(&flat, 1.0, 0.0).unwrap();
        assert!(none.is_empty());
    }

    #[test]
    fn group_c_interior_has_four_solutions() {
        let p = DesignParams::new(0.0, 0.0, 2.0, 1.5, 0.0).unwrap();
        let s = SectionPoint::new(2.2, 0.4);
        assert_eq!(iks_count(&p, &s), 4);
        let set = ik(&p, &s.lift(), RESIDUAL_TOL).unwrap();
        assert_eq!(set.len(), 4);
        assert!(!set.degenerate);
    }

    #[test]
    fn round_trip_each_family() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for case in crate::model::FamilyCase::ALL {
            let [d2, r2, d3, r3] = case.pattern();
            for _ in 0..300 {
                let mut pick = |on: bool| if on { rng.gen_range(0.2..3.0) } else { 0.0 };
                let p =
                    DesignParams::new(pick(d2), pick(d3), pick(true), pick(r2), pick(r3)).unwrap();
                let q = random_q(&mut rng);
                let (point, _) = fk(&p, &q);
                let set = ik(&p, &point, RESIDUAL_TOL).unwrap();
                assert!(set.contains(&q, 1e-6), "{case} {p} {q:?} {set:?}");
                for s in &set.solutions {
                    assert!(s.residual <= RESIDUAL_TOL * (1.0 + point.norm()));
                }
            }
        }
    }

    #[test]
    fn count_matches_solution_list() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let designs = [
            DesignParams::new(0.0, 2.0, 1.5, 1.0, 0.0).unwrap(),
            DesignParams::new(1.0, 1.4, 0.7, 0.0, 0.0).unwrap(),
            DesignParams::new(1.0, 0.3, 2.0, 0.0, 0.5).unwrap(),
        ];
        for p in designs {
            let r = p.reach_bound();
            for _ in 0..500 {
                let s = SectionPoint::new(rng.gen_range(0.0..r), rng.gen_range(-r..r));
                let n = iks_count(&p, &s);
                let set = ik(&p, &s.lift(), RESIDUAL_TOL).unwrap();
                if !set.degenerate {
                    assert_eq!(n as usize, set.len(), "{p} {s:?}");
                    assert_eq!(n % 2, 0);
                }
            }
        }
    }

    #[test]
    fn cosine_quadratic_matches_quartic() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let p = DesignParams::new(1.0, 2.0, 2.5, 0.0, 0.3).unwrap();
        for _ in 0..2000 {
            let (rho2, z) = section_sq(&p, rng.gen_range(-PI..PI), rng.gen_range(-PI..PI));
            let tol = RootTolerances::default();
            let quick = theta3_roots(&p, rho2, z, tol, Elimination::Reduced);
            let full = theta3_roots(&p, rho2, z, tol, Elimination::Quartic);
            if full.roots.iter().any(|r| r.multiplicity > 1) {
                continue;
            }
            assert_eq!(quick.roots.len(), full.roots.len());
            for r in &quick.roots {
                assert!(full.contains_theta3(r.theta3(), 1e-6), "{rho2} {z}");
            }
        }
        // c = ±1 roots are double, like t = 0 and t = ∞ in the quartic
        let (rho2, z) = section_sq(&p, 0.4, 0.0);
        let quick = theta3_roots(&p, rho2, z, RootTolerances::default(), Elimination::Reduced);
        assert!(quick
            .roots
            .iter()
            .any(|r| r.theta3().abs() < 1e-9 && r.multiplicity == 2));
    }

    #[test]
    fn scaled_count() {
        let p = DesignParams::new(1.0, 3.0, 0.7, 0.0, 0.5).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..300 {
            let s = SectionPoint::new(rng.gen_range(0.0..5.0), rng.gen_range(-5.0..5.0));
            let l = 3.7;
            assert_eq!(
                iks_count(&p, &s),
                iks_count(&p.scaled(l), &SectionPoint::new(s.rho * l, s.z * l))
            );
        }
    }

    #[test]
    fn theta3_pi_is_recovered() {
        // θ3 = π makes the leading coefficient vanish
        let p = DesignParams::new(1.0, 2.0, 1.5, 0.0, 0.3).unwrap();
        let q = JointConfig::new(0.4, 0.9, PI);
        let (point, _) = fk(&p, &q);
        let (rho2, z) = section_sq(&p, q.theta2, q.theta3);
        let quartic = quartic_at(&p, rho2, z).unwrap();
        assert!(quartic.a.abs() <= LEADING_TOL * quartic.max_abs());
        let set = quartic.roots();
        assert!(set.roots.iter().any(|r| r.value == RootValue::AtInfinity));
        assert!(ik(&p, &point, RESIDUAL_TOL).unwrap().contains(&q, 1e-6));
    }

    #[test]
    fn rejects_non_finite() {
        let p = DesignParams::new(1.0, 2.0, 1.5, 0.0, 0.3).unwrap();
        assert_eq!(
            ik(&p, &CartesianPoint::new(f64::NAN, 0.0, 0.0), 1e-9),
            Err(IkError::NonFinite)
        );
        assert_eq!(
            ik(&p, &CartesianPoint::new(1.0, 0.0, 0.0), 0.0),
            Err(IkError::BadTolerance(0.0))
        );
    }

    #[test]
    fn mixed_family_quartic_triple_root() {
        // A generic quartic can carry a triple root; the witness sees it.
        let q = Quartic {
            a: 1.0,
            b: -1.0,
            c: -3.0,
            d: 5.0,
            e: -2.0,
        }; // (t - 1)³ (t + 2)
        let set = q.roots_with(witness_tolerances(1e-9));
        assert!(set.roots.iter().any(|r| r.multiplicity == 3));
    }
}
