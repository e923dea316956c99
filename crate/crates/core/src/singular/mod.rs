//! Singularity curves in joint space and the section, with their node and
//! cusp points.

mod cusps;
mod nodes;
mod trace;

pub use cusps::{confirm, cusp_candidates, find_cusps, CuspCandidate, CuspPoint, CUSP_WITNESS_TOL};
pub use nodes::{
    default_tolerance, find_nodes, NodePoint, NodeReport, ResolutionWarning, AXIS_EXCLUSION,
    MIN_CROSSING_SIN, MIN_PREIMAGE_GAP, WITNESS_TOL,
};
pub use trace::{
    section_image, section_images, singular_branches, torus_delta, torus_distance, torus_lerp,
    JointCurve, SectionCurve, MIN_RESOLUTION, TANGENTIAL_TOL,
};

/// Default joint-space resolution for tracing.
pub const DEFAULT_RESOLUTION: usize = 1024;

/// Image speed ratio under which a vertex becomes a cusp candidate.
pub const DEFAULT_SPEED_TOL: f64 = 0.05;
