//! Manipulator parameterization, forward kinematics and the singularity
//! function everything else builds on.
//!
//! The arm has three mutually orthogonal revolute axes with twist angles
//! fixed at -90° and 90°. Its geometry is described by five nonnegative
//! lengths `d2, d3, d4, r2, r3`. Writing `L = d3 + d4 cos θ3`, the wrist
//! center in the frame rotated by `θ1` is
//!
//! ```text
//! X = d2 + cos θ2 L + sin θ2 r3
//! Y = r2 + d4 sin θ3
//! Z = cos θ2 r3 - sin θ2 L
//! ```
//!
//! and the base-frame point is `(X, Y)` rotated by `θ1` about `z`.
//! The half cross-section coordinates `(ρ, z) = (√(X² + Y²), Z)` do not
//! depend on `θ1`.

use std::f64::consts::PI;
use std::fmt;

use nalgebra::Matrix3;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("parameter {name} = {value} must be finite and nonnegative")]
    InvalidParameter { name: &'static str, value: f64 },
    #[error("d4 must be strictly positive (a zero last link makes the arm singular everywhere)")]
    ZeroLastLink,
    #[error("{0}")]
    OutOfFamily(String),
}

/// The five DH lengths of an orthogonal 3R manipulator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DesignParams {
    pub d2: f64,
    pub d3: f64,
    pub d4: f64,
    pub r2: f64,
    pub r3: f64,
}

impl DesignParams {
    pub fn new(d2: f64, d3: f64, d4: f64, r2: f64, r3: f64) -> Result<Self, ModelError> {
        let p = DesignParams { d2, d3, d4, r2, r3 };
        p.validate()?;
        Ok(p)
    }

    /// Builds parameters without the `d4 > 0` and sign checks. Useful for
    /// degenerate geometry in tests; every operation still works but the
    /// classification layer will reject such designs.
    pub fn unchecked(d2: f64, d3: f64, d4: f64, r2: f64, r3: f64) -> Self {
        DesignParams { d2, d3, d4, r2, r3 }
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        for (name, value) in self.named() {
            if !value.is_finite() || value < 0.0 {
                return Err(ModelError::InvalidParameter { name, value });
            }
        }
        if self.d4 <= 0.0 {
            return Err(ModelError::ZeroLastLink);
        }
        Ok(())
    }

    pub fn named(&self) -> [(&'static str, f64); 5] {
        [
            ("d2", self.d2),
            ("d3", self.d3),
            ("d4", self.d4),
            ("r2", self.r2),
            ("r3", self.r3),
        ]
    }

    pub fn scaled(&self, factor: f64) -> Self {
        DesignParams {
            d2: self.d2 * factor,
            d3: self.d3 * factor,
            d4: self.d4 * factor,
            r2: self.r2 * factor,
            r3: self.r3 * factor,
        }
    }

    /// Sum of all lengths, an upper bound on the distance of the wrist
    /// center from the base origin.
    pub fn reach_bound(&self) -> f64 {
        self.d2 + self.d3 + self.d4 + self.r2 + self.r3
    }
}

impl fmt::Display for DesignParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "(d2={}, d3={}, d4={}, r2={}, r3={})",
            self.d2, self.d3, self.d4, self.r2, self.r3
        )
    }
}

/// One of the ten zero-patterns of `(d2, r2, d3, r3)` studied here.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum FamilyCase {
    A,
    B,
    C,
    D,
    E,
    F,
    G,
    H,
    I,
    J,
}

impl FamilyCase {
    pub const ALL: [FamilyCase; 10] = [
        FamilyCase::A,
        FamilyCase::B,
        FamilyCase::C,
        FamilyCase::D,
        FamilyCase::E,
        FamilyCase::F,
        FamilyCase::G,
        FamilyCase::H,
        FamilyCase::I,
        FamilyCase::J,
    ];

    /// Which of `(d2, r2, d3, r3)` are strictly positive for this case.
    pub fn pattern(self) -> [bool; 4] {
        use FamilyCase::*;
        match self {
            A => [false, true, true, false],
            B => [false, false, true, false],
            C => [false, true, false, false],
            D => [true, false, true, false],
            E => [true, false, false, false],
            F => [false, true, true, true],
            G => [false, false, true, true],
            H => [false, true, false, true],
            I => [true, false, true, true],
            J => [true, false, false, true],
        }
    }

    /// Whether the named parameter is nonzero in this case. `d4` is always
    /// nonzero.
    pub fn is_free(self, name: &str) -> Option<bool> {
        let [d2, r2, d3, r3] = self.pattern();
        match name {
            "d2" => Some(d2),
            "r2" => Some(r2),
            "d3" => Some(d3),
            "r3" => Some(r3),
            "d4" => Some(true),
            _ => None,
        }
    }

    pub fn letter(self) -> char {
        (b'A' + self as u8) as char
    }

    pub fn from_letter(c: char) -> Option<FamilyCase> {
        FamilyCase::ALL
            .into_iter()
            .find(|f| f.letter() == c.to_ascii_uppercase())
    }
}

impl fmt::Display for FamilyCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.letter())
    }
}

/// Maps a design to its zero-pattern case. Zero means exactly zero.
pub fn family_case(p: &DesignParams) -> Result<FamilyCase, ModelError> {
    p.validate()?;
    let key = [p.d2 > 0.0, p.r2 > 0.0, p.d3 > 0.0, p.r3 > 0.0];
    if key[0] && key[1] {
        return Err(ModelError::OutOfFamily(format!(
            "{p} has both d2 and r2 nonzero; that family has its own published \
             classification and is not one of the ten null-parameter cases"
        )));
    }
    FamilyCase::ALL
        .into_iter()
        .find(|f| f.pattern() == key)
        .ok_or_else(|| {
            ModelError::OutOfFamily(format!(
                "{p} has d2 = r2 = d3 = 0, which is not one of the ten null-parameter cases"
            ))
        })
}

/// Wraps an angle into `(-π, π]`.
pub fn wrap_angle(a: f64) -> f64 {
    let r = a.rem_euclid(2.0 * PI);
    if r > PI {
        r - 2.0 * PI
    } else {
        r
    }
}

/// Joint angles `(θ1, θ2, θ3)`, always kept in `(-π, π]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JointConfig {
    pub theta1: f64,
    pub theta2: f64,
    pub theta3: f64,
}

impl JointConfig {
    pub fn new(theta1: f64, theta2: f64, theta3: f64) -> Self {
        JointConfig {
            theta1: wrap_angle(theta1),
            theta2: wrap_angle(theta2),
            theta3: wrap_angle(theta3),
        }
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.theta1, self.theta2, self.theta3]
    }

    /// Largest per-joint angular distance, measured on the circle.
    pub fn distance(&self, other: &JointConfig) -> f64 {
        self.as_array()
            .iter()
            .zip(other.as_array())
            .map(|(a, b)| wrap_angle(a - b).abs())
            .fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CartesianPoint {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl CartesianPoint {
    pub fn new(x: f64, y: f64, z: f64) -> Self {
        CartesianPoint { x, y, z }
    }

    pub fn norm(&self) -> f64 {
        (self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }

    pub fn distance(&self, o: &CartesianPoint) -> f64 {
        CartesianPoint::new(self.x - o.x, self.y - o.y, self.z - o.z).norm()
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }
}

/// A point `(ρ, z)` of the half cross-section, `ρ ≥ 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SectionPoint {
    pub rho: f64,
    pub z: f64,
}

impl SectionPoint {
    pub fn new(rho: f64, z: f64) -> Self {
        debug_assert!(rho >= 0.0);
        SectionPoint { rho, z }
    }

    pub fn distance(&self, o: &SectionPoint) -> f64 {
        (self.rho - o.rho).hypot(self.z - o.z)
    }

    /// The Cartesian point with this section position and `y = 0`.
    pub fn lift(&self) -> CartesianPoint {
        CartesianPoint::new(self.rho, 0.0, self.z)
    }
}

/// Wrist-center coordinates in the frame rotated by `θ1`, together with
/// their partial derivatives with respect to `θ2` and `θ3`.
#[derive(Debug, Clone, Copy)]
pub(crate) struct ArmFrame {
    pub x: f64,
    pub y: f64,
    pub z: f64,
    /// ∂X/∂θ2 (= Z); ∂Y/∂θ2 is zero.
    pub x2: f64,
    /// ∂Z/∂θ2 (= d2 - X).
    pub z2: f64,
    pub x3: f64,
    pub y3: f64,
    pub z3: f64,
}

pub(crate) fn arm_frame(p: &DesignParams, theta2: f64, theta3: f64) -> ArmFrame {
    let (s2, c2) = theta2.sin_cos();
    let (s3, c3) = theta3.sin_cos();
    let l = p.d3 + p.d4 * c3;
    let x = p.d2 + c2 * l + s2 * p.r3;
    let y = p.r2 + p.d4 * s3;
    let z = c2 * p.r3 - s2 * l;
    ArmFrame {
        x,
        y,
        z,
        x2: z,
        z2: p.d2 - x,
        x3: -c2 * p.d4 * s3,
        y3: p.d4 * c3,
        z3: s2 * p.d4 * s3,
    }
}

/// `(ρ², z)` for the joint pair `(θ2, θ3)`.
pub fn section_sq(p: &DesignParams, theta2: f64, theta3: f64) -> (f64, f64) {
    let f = arm_frame(p, theta2, theta3);
    (f.x * f.x + f.y * f.y, f.z)
}

pub fn section_point(p: &DesignParams, theta2: f64, theta3: f64) -> SectionPoint {
    let (rho2, z) = section_sq(p, theta2, theta3);
    SectionPoint {
        rho: rho2.sqrt(),
        z,
    }
}

/// Forward kinematics: base-frame wrist center and its section coordinates.
pub fn fk(p: &DesignParams, q: &JointConfig) -> (CartesianPoint, SectionPoint) {
    let f = arm_frame(p, q.theta2, q.theta3);
    let (s1, c1) = q.theta1.sin_cos();
    let point = CartesianPoint::new(c1 * f.x - s1 * f.y, s1 * f.x + c1 * f.y, f.z);
    (
        point,
        SectionPoint {
            rho: f.x.hypot(f.y),
            z: f.z,
        },
    )
}

/// Analytic position Jacobian `∂(x, y, z)/∂(θ1, θ2, θ3)`.
pub fn jacobian(p: &DesignParams, q: &JointConfig) -> Matrix3<f64> {
    let f = arm_frame(p, q.theta2, q.theta3);
    let (s1, c1) = q.theta1.sin_cos();
    let x = c1 * f.x - s1 * f.y;
    let y = s1 * f.x + c1 * f.y;
    Matrix3::new(
        -y,
        c1 * f.x2,
        c1 * f.x3 - s1 * f.y3,
        x,
        s1 * f.x2,
        s1 * f.x3 + c1 * f.y3,
        0.0,
        f.z2,
        f.z3,
    )
}

/// Determinant of `∂(ρ², z)/∂(θ2, θ3)`.
///
/// Its zero set is the preimage of the singularity curves. It equals
/// `-2 det J`, so it also vanishes whenever the wrist center is on the
/// base axis.
pub fn reduced_singularity(p: &DesignParams, theta2: f64, theta3: f64) -> f64 {
    let f = arm_frame(p, theta2, theta3);
    let r2_t2 = 2.0 * f.x * f.x2;
    let r2_t3 = 2.0 * (f.x * f.x3 + f.y * f.y3);
    r2_t2 * f.z3 - r2_t3 * f.z2
}

/// `∂(ρ², z)/∂(θ2, θ3)` as `[[∂ρ²/∂θ2, ∂ρ²/∂θ3], [∂z/∂θ2, ∂z/∂θ3]]`.
pub fn section_jacobian(p: &DesignParams, theta2: f64, theta3: f64) -> [[f64; 2]; 2] {
    let f = arm_frame(p, theta2, theta3);
    [
        [2.0 * f.x * f.x2, 2.0 * (f.x * f.x3 + f.y * f.y3)],
        [f.z2, f.z3],
    ]
}

/// Gradient of [`reduced_singularity`] by central differences.
pub fn singularity_gradient(p: &DesignParams, theta2: f64, theta3: f64) -> [f64; 2] {
    let h = 1e-6;
    let g2 = (reduced_singularity(p, theta2 + h, theta3)
        - reduced_singularity(p, theta2 - h, theta3))
        / (2.0 * h);
    let g3 = (reduced_singularity(p, theta2, theta3 + h)
        - reduced_singularity(p, theta2, theta3 - h))
        / (2.0 * h);
    [g2, g3]
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn dh(alpha: f64, a: f64, theta: f64, d: f64) -> [[f64; 4]; 4] {
        // modified DH: Rx(alpha) Tx(a) Rz(theta) Tz(d)
        let (sa, ca) = alpha.sin_cos();
        let (st, ct) = theta.sin_cos();
        [
            [ct, -st, 0.0, a],
            [st * ca, ct * ca, -sa, -d * sa],
            [st * sa, ct * sa, ca, d * ca],
            [0.0, 0.0, 0.0, 1.0],
        ]
    }

    fn mul(a: &[[f64; 4]; 4], b: &[[f64; 4]; 4]) -> [[f64; 4]; 4] {
        let mut c = [[0.0; 4]; 4];
        for i in 0..4 {
            for j in 0..4 {
                c[i][j] = (0..4).map(|k| a[i][k] * b[k][j]).sum();
            }
        }
        c
    }

    /// Composes the four modified DH transforms with α2 = -90°, α3 = 90°.
    fn dh_chain(p: &DesignParams, q: &JointConfig) -> [f64; 3] {
        let t = [
            dh(0.0, 0.0, q.theta1, 0.0),
            dh(-PI / 2.0, p.d2, q.theta2, p.r2),
            dh(PI / 2.0, p.d3, q.theta3, p.r3),
            dh(0.0, p.d4, 0.0, 0.0),
        ];
        let m = t.iter().skip(1).fold(t[0], |acc, x| mul(&acc, x));
        [m[0][3], m[1][3], m[2][3]]
    }

    #[test]
    fn family_cases_match_patterns() {
        let a = DesignParams::new(0.0, 2.0, 1.5, 1.0, 0.0).unwrap();
        assert_eq!(family_case(&a).unwrap(), FamilyCase::A);
        let j = DesignParams::new(1.0, 0.0, 2.0, 0.0, 1.0).unwrap();
        assert_eq!(family_case(&j).unwrap(), FamilyCase::J);
        let out = DesignParams::new(1.0, 2.0, 1.0, 1.0, 0.0).unwrap();
        assert!(matches!(family_case(&out), Err(ModelError::OutOfFamily(_))));
        let none = DesignParams::new(0.0, 0.0, 1.0, 0.0, 1.0).unwrap();
        assert!(matches!(
            family_case(&none),
            Err(ModelError::OutOfFamily(_))
        ));
    }

    #[test]
    fn every_pattern_is_unique() {
        for (i, a) in FamilyCase::ALL.iter().enumerate() {
            for b in &FamilyCase::ALL[i + 1..] {
                assert_ne!(a.pattern(), b.pattern());
            }
            assert!(!(a.pattern()[0] && a.pattern()[1]));
            assert_eq!(FamilyCase::from_letter(a.letter()), Some(*a));
        }
    }

    #[test]
    fn rejects_bad_params() {
        assert_eq!(
            DesignParams::new(0.0, 1.0, 0.0, 1.0, 0.0),
            Err(ModelError::ZeroLastLink)
        );
        assert!(DesignParams::new(-1.0, 1.0, 1.0, 0.0, 0.0).is_err());
        assert!(DesignParams::new(0.0, f64::NAN, 1.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn angle_wrapping() {
        assert_eq!(wrap_angle(PI), PI);
        assert_eq!(wrap_angle(-PI), PI);
        assert!((wrap_angle(3.0 * PI / 2.0) + PI / 2.0).abs() < 1e-15);
        for a in [-10.0, -3.2, 0.0, 1.0, 7.5, 100.0] {
            let w = wrap_angle(a);
            assert!(w > -PI && w <= PI);
            assert_eq!(wrap_angle(w), w);
        }
    }

    #[test]
    fn zero_configuration() {
        let p = DesignParams::new(0.7, 1.3, 0.9, 0.4, 0.25).unwrap();
        let (c, s) = fk(&p, &JointConfig::new(0.0, 0.0, 0.0));
        assert!((c.x - (0.7 + 1.3 + 0.9)).abs() < 1e-15);
        assert!((c.y - 0.4).abs() < 1e-15);
        assert!((c.z - 0.25).abs() < 1e-15);
        assert!((s.rho - c.x.hypot(c.y)).abs() < 1e-15);
    }

    #[test]
    fn hand_composed_case() {
        let p = DesignParams::unchecked(0.0, 0.0, 1.0, 0.0, 0.0);
        let (c, _) = fk(&p, &JointConfig::new(0.0, PI / 2.0, 0.0));
        assert!(c.x.abs() < 1e-15 && c.y.abs() < 1e-15);
        assert!((c.z + 1.0).abs() < 1e-15);
    }

    #[test]
    fn matches_dh_composition() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..1000 {
            let p = DesignParams::unchecked(
                rng.gen_range(0.0..2.0),
                rng.gen_range(0.0..2.0),
                rng.gen_range(0.1..2.0),
                rng.gen_range(0.0..2.0),
                rng.gen_range(0.0..2.0),
            );
            let q = JointConfig::new(
                rng.gen_range(-PI..PI),
                rng.gen_range(-PI..PI),
                rng.gen_range(-PI..PI),
            );
            let (c, _) = fk(&p, &q);
            let o = dh_chain(&p, &q);
            assert!((c.x - o[0]).abs() < 1e-12, "{c:?} {o:?}");
            assert!((c.y - o[1]).abs() < 1e-12, "{c:?} {o:?}");
            assert!((c.z - o[2]).abs() < 1e-12, "{c:?} {o:?}");
        }
    }

    #[test]
    fn axisymmetric_section() {
        let p = DesignParams::new(1.0, 0.5, 2.0, 0.0, 0.5).unwrap();
        let q = JointConfig::new(0.3, -1.1, 2.2);
        let (_, a) = fk(&p, &q);
        let (_, b) = fk(&p, &JointConfig::new(q.theta1 + PI, q.theta2, q.theta3));
        assert!((a.rho - b.rho).abs() < 1e-14 && (a.z - b.z).abs() < 1e-14);
    }

    #[test]
    fn first_column_is_base_rotation() {
        let p = DesignParams::new(0.0, 2.0, 3.0, 1.0, 0.0).unwrap();
        let q = JointConfig::new(0.4, 1.2, -0.3);
        let (c, _) = fk(&p, &q);
        let j = jacobian(&p, &q);
        assert!((j[(0, 0)] + c.y).abs() < 1e-14);
        assert!((j[(1, 0)] - c.x).abs() < 1e-14);
        assert_eq!(j[(2, 0)], 0.0);
    }

    #[test]
    fn on_axis_configuration_is_singular() {
        // X = Y = 0: r2 = 0, θ3 = 0 and cos θ2 (d3 + d4) = -d2.
        let p = DesignParams::new(1.0, 1.0, 1.0, 0.0, 0.0).unwrap();
        let q = JointConfig::new(0.2, (-0.5f64).acos(), 0.0);
        let (_, s) = fk(&p, &q);
        assert!(s.rho < 1e-14);
        assert!(jacobian(&p, &q).determinant().abs() < 1e-12);
        assert!(reduced_singularity(&p, q.theta2, q.theta3).abs() < 1e-12);
    }

    #[test]
    fn determinant_relation() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let p = DesignParams::unchecked(
                rng.gen_range(0.0..2.0),
                rng.gen_range(0.0..2.0),
                rng.gen_range(0.1..2.0),
                rng.gen_range(0.0..2.0),
                rng.gen_range(0.0..2.0),
            );
            let q = JointConfig::new(rng.gen(), rng.gen_range(-PI..PI), rng.gen_range(-PI..PI));
            let det = jacobian(&p, &q).determinant();
            let s = reduced_singularity(&p, q.theta2, q.theta3);
            assert!((s + 2.0 * det).abs() < 1e-10 * (1.0 + s.abs()));
        }
    }

    #[test]
    fn z_mirror_for_zero_r3() {
        let p = DesignParams::new(1.0, 1.4, 0.7, 0.0, 0.0).unwrap();
        for (t2, t3) in [(0.3, 1.0), (-2.0, 0.4), (2.9, -2.5)] {
            let a = section_point(&p, t2, t3);
            let b = section_point(&p, -t2, t3);
            assert!((a.rho - b.rho).abs() < 1e-14 && (a.z + b.z).abs() < 1e-14);
        }
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn params() -> impl Strategy<Value = DesignParams> {
            (
                0.0..3.0f64,
                0.0..3.0f64,
                0.05..3.0f64,
                0.0..3.0f64,
                0.0..3.0f64,
            )
                .prop_map(|(a, b, c, d, e)| DesignParams::unchecked(a, b, c, d, e))
        }

        fn angle() -> impl Strategy<Value = f64> {
            -PI..PI
        }

        proptest! {
            #[test]
            fn theta1_shift_keeps_section(p in params(), t1 in angle(), t2 in angle(), t3 in angle(), d in -10.0..10.0f64) {
                let (_, a) = fk(&p, &JointConfig::new(t1, t2, t3));
                let (_, b) = fk(&p, &JointConfig::new(t1 + d, t2, t3));
                prop_assert!((a.rho - b.rho).abs() < 1e-12);
                prop_assert!((a.z - b.z).abs() < 1e-12);
            }

            #[test]
            fn scale_invariance(p in params(), t1 in angle(), t2 in angle(), t3 in angle(), l in 0.01..50.0f64) {
                let q = JointConfig::new(t1, t2, t3);
                let (a, _) = fk(&p, &q);
                let (b, _) = fk(&p.scaled(l), &q);
                let tol = 1e-12 * l * (1.0 + p.reach_bound());
                prop_assert!((a.x * l - b.x).abs() < tol);
                prop_assert!((a.y * l - b.y).abs() < tol);
                prop_assert!((a.z * l - b.z).abs() < tol);
            }

            #[test]
            fn normalization_is_idempotent(t1 in -100.0..100.0f64, t2 in -100.0..100.0f64, t3 in -100.0..100.0f64) {
                let q = JointConfig::new(t1, t2, t3);
                for a in q.as_array() {
                    prop_assert!(a > -PI && a <= PI);
                }
                prop_assert_eq!(JointConfig::new(q.theta1, q.theta2, q.theta3), q);
            }
        }
    }
}
