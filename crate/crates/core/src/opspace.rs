//! Look-ahead reference point and the output-space dynamics.
//!
//! A nonholonomic robot is tracked through a point a distance `x_r` ahead of
//! its axle. Its velocity is `ṗ = J(φ)·ν` with `det J = x_r`, and its
//! acceleration is affine in the input, `p̈ = η(φ, ν) + G(φ)·u` with `G = J`.
//! For double integrators `p` is the centre itself, `G = I` and `η = 0`.

use serde::{Deserialize, Serialize};

use crate::geometry::{Mat2, Vec2};
use crate::kinematics::{AgentModel, KinematicSpec, VelocityState};

/// Planar pose.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Pose {
    pub phi: f64,
    pub x: f64,
    pub y: f64,
}

impl Pose {
    pub fn new(phi: f64, x: f64, y: f64) -> Self {
        Self { phi, x, y }
    }

    pub fn position(&self) -> Vec2 {
        Vec2::new(self.x, self.y)
    }
}

/// Wrap an angle into `(-π, π]`.
pub fn wrap_angle(a: f64) -> f64 {
    use std::f64::consts::{PI, TAU};
    let r = a.rem_euclid(TAU);
    if r > PI {
        r - TAU
    } else {
        r
    }
}

pub fn reference_point(spec: &KinematicSpec, pose: &Pose) -> Vec2 {
    let (s, c) = pose.phi.sin_cos();
    Vec2::new(pose.x + spec.x_r * c, pose.y + spec.x_r * s)
}

/// Input matrix `G(φ)`, equal to the velocity Jacobian `J(φ)`.
pub fn jacobian(spec: &KinematicSpec, phi: f64) -> Mat2 {
    if spec.class.is_holonomic() {
        return Mat2::identity();
    }
    let (s, c) = phi.sin_cos();
    Mat2::new(c, -spec.x_r * s, s, spec.x_r * c)
}

/// Reference-point velocity `J(φ)·ν`.
pub fn ref_velocity(spec: &KinematicSpec, phi: f64, nu: &VelocityState) -> Vec2 {
    jacobian(spec, phi) * nu.to_vec()
}

/// State-dependent drift `η = J̇·ν`.
pub fn drift(spec: &KinematicSpec, phi: f64, nu: &VelocityState) -> Vec2 {
    if spec.class.is_holonomic() {
        return Vec2::zeros();
    }
    let (s, c) = phi.sin_cos();
    let x_r = spec.x_r;
    let jdot = nu.omega * Mat2::new(-s, -x_r * c, c, -x_r * s);
    jdot * nu.to_vec()
}

/// Reference-point acceleration `η + G·u`.
pub fn op_accel(spec: &KinematicSpec, phi: f64, nu: &VelocityState, u: &Vec2) -> Vec2 {
    drift(spec, phi, nu) + jacobian(spec, phi) * u
}

/// Joint velocity producing a desired reference-point velocity, `J⁻¹·ṗ`.
pub fn inverse_velocity_map(spec: &KinematicSpec, phi: f64, pdot: &Vec2) -> VelocityState {
    if spec.class.is_holonomic() {
        return VelocityState::from_vec(*pdot);
    }
    let (s, c) = phi.sin_cos();
    VelocityState::new(
        c * pdot.x + s * pdot.y,
        (-s * pdot.x + c * pdot.y) / spec.x_r,
    )
}

/// Reference-point quantities of one robot at one instant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OpState {
    pub p: Vec2,
    pub pdot: Vec2,
    pub eta: Vec2,
    pub g: Mat2,
}

impl OpState {
    pub fn new(spec: &KinematicSpec, pose: &Pose, nu: &VelocityState) -> Self {
        let g = jacobian(spec, pose.phi);
        Self {
            p: reference_point(spec, pose),
            pdot: g * nu.to_vec(),
            eta: drift(spec, pose.phi, nu),
            g,
        }
    }
}

/// `sin(x)/x`, accurate near zero.
fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        1.0 - x * x / 6.0
    } else {
        x.sin() / x
    }
}

/// One integration step under a zero-order hold on `u`.
///
/// The velocity is updated first and brought into the admissible set. The
/// position then advances with the mean of the old and new velocity, which
/// is exact for a double integrator; nonholonomic poses follow the
/// constant-`(v, ω)` arc at that mean velocity, so the no-slip constraint
/// holds at every step.
pub fn integrate(
    model: &AgentModel,
    pose: &Pose,
    nu: &VelocityState,
    u: &Vec2,
    dt: f64,
) -> (Pose, VelocityState) {
    let next = model.realize_velocity(&VelocityState::from_vec(nu.to_vec() + u * dt));
    let mean = 0.5 * (nu.to_vec() + next.to_vec());
    if model.spec().class.is_holonomic() {
        let pose = Pose::new(pose.phi, pose.x + mean.x * dt, pose.y + mean.y * dt);
        return (pose, next);
    }
    let turn = mean.y * dt;
    let mid = pose.phi + 0.5 * turn;
    let arc = mean.x * dt * sinc(0.5 * turn);
    let pose = Pose::new(
        wrap_angle(pose.phi + turn),
        pose.x + arc * mid.cos(),
        pose.y + arc * mid.sin(),
    );
    (pose, next)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kinematics::KinematicClass;
    use std::f64::consts::PI;

    #[test]
    fn jacobian_example() {
        let spec = KinematicSpec::defaults(KinematicClass::Uni);
        let j = jacobian(&spec, 0.0);
        assert_eq!(j, Mat2::new(1.0, 0.0, 0.0, 0.1));
        let p = reference_point(&spec, &Pose::new(PI / 2.0, 1.0, 2.0));
        assert!((p - Vec2::new(1.0, 2.1)).norm() < 1e-12);
    }

    #[test]
    fn drift_example() {
        let spec = KinematicSpec::defaults(KinematicClass::Uni);
        let eta = drift(&spec, 0.0, &VelocityState::new(1.0, 2.0));
        assert!((eta - Vec2::new(-0.4, 2.0)).norm() < 1e-12, "{eta:?}");
    }

    #[test]
    fn di_is_trivial() {
        let spec = KinematicSpec::defaults(KinematicClass::Di);
        assert_eq!(jacobian(&spec, 1.3), Mat2::identity());
        assert_eq!(drift(&spec, 1.3, &VelocityState::new(0.4, -0.2)), Vec2::zeros());
        let p = reference_point(&spec, &Pose::new(1.3, 2.0, 3.0));
        assert_eq!(p, Vec2::new(2.0, 3.0));
    }

    #[test]
    fn wrap() {
        assert!((wrap_angle(3.0 * PI) - PI).abs() < 1e-12);
        assert!((wrap_angle(-PI) - PI).abs() < 1e-12);
        assert!((wrap_angle(0.5) - 0.5).abs() < 1e-15);
        assert!((wrap_angle(-7.0) - (-7.0 + 2.0 * PI)).abs() < 1e-12);
    }

    #[test]
    fn straight_line_step() {
        let model = AgentModel::new(KinematicSpec::defaults(KinematicClass::Uni)).unwrap();
        let (pose, nu) = integrate(
            &model,
            &Pose::default(),
            &VelocityState::new(0.5, 0.0),
            &Vec2::new(1.0, 0.0),
            0.1,
        );
        assert!((nu.v - 0.6).abs() < 1e-12);
        assert!((pose.x - 0.055).abs() < 1e-12 && pose.y.abs() < 1e-15);
    }

    #[test]
    fn full_circle_returns_home() {
        let model = AgentModel::new(KinematicSpec::defaults(KinematicClass::Uni)).unwrap();
        let nu = VelocityState::new(0.5, 1.0);
        let mut pose = Pose::default();
        let dt = 2.0 * PI / 200.0;
        for _ in 0..200 {
            pose = integrate(&model, &pose, &nu, &Vec2::zeros(), dt).0;
        }
        assert!(pose.position().norm() < 1e-10, "{pose:?}");
    }
}
