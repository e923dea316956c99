#![allow(dead_code)]

use ortho3r::{DesignParams, FamilyCase, JointConfig};
use rand::Rng;
use std::f64::consts::PI;

/// Random valid design of the given case, lengths in `[0.2, 3]`.
pub fn random_design<R: Rng>(rng: &mut R, case: FamilyCase) -> DesignParams {
    let [d2, r2, d3, r3] = case.pattern();
    let mut len = |on: bool| if on { rng.gen_range(0.2..3.0) } else { 0.0 };
    let (d2, r2, d3, r3) = (len(d2), len(r2), len(d3), len(r3));
    let d4 = rng.gen_range(0.2..3.0);
    DesignParams::new(d2, d3, d4, r2, r3).unwrap()
}

pub fn random_q<R: Rng>(rng: &mut R) -> JointConfig {
    JointConfig::new(
        rng.gen_range(-PI..PI),
        rng.gen_range(-PI..PI),
        rng.gen_range(-PI..PI),
    )
}

pub fn design(d: [f64; 5]) -> DesignParams {
    DesignParams::new(d[0], d[1], d[2], d[3], d[4]).unwrap()
}
