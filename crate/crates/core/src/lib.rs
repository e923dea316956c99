//! Kinematic analysis of 3R orthogonal manipulators with at least one
//! vanishing DH parameter: inverse kinematics, singular curves, workspace
//! topology and classification into 21 groups.

pub mod classify;
pub mod ikquartic;
pub mod model;
pub mod singular;
pub mod workspace;

pub use model::{CartesianPoint, DesignParams, FamilyCase, JointConfig, ModelError, SectionPoint};
