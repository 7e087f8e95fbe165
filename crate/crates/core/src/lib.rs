//! Decentralized collision avoidance for mixed teams of holonomic and
//! nonholonomic robots.
//!
//! Each robot filters a nominal command through a small quadratic program
//! whose pairwise constraints come from second-order barrier functions on
//! look-ahead reference points. The responsibility for each pairwise
//! constraint is split between the two robots according to what each can
//! actually do with its input.

pub mod allocation;
pub mod barrier;
pub mod error;
pub mod geometry;
pub mod harness;
pub mod kinematics;
pub mod nominal;
pub mod opspace;
pub mod qpsolve;

pub use error::{Error, GeometryError, Result};
pub use geometry::{HalfSpace, Mat2, Polytope2, Vec2};
pub use kinematics::{AgentModel, KinematicClass, KinematicSpec, VelocityState};
pub use opspace::Pose;
