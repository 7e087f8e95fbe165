//! Nominal commands: an artificial potential field in the reference-point
//! plane, converted to each robot's own input by a proportional tracker.

use serde::{Deserialize, Serialize};

use crate::geometry::Vec2;
use crate::kinematics::{KinematicSpec, VelocityState};
use crate::opspace::{inverse_velocity_map, ref_velocity, Pose};

/// Potential-field and tracking gains.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NominalConfig {
    /// Weight of the attractive term; `1 - w` goes to repulsion.
    pub w: f64,
    pub k_att: f64,
    pub k_rep: f64,
    /// Neighbours farther than this exert no repulsion.
    pub d_cut: f64,
    /// Reference-point velocity gain for double integrators.
    pub k_p: f64,
    /// Forward-speed gain for nonholonomic robots.
    pub k_v: f64,
    /// Turn-rate gain for nonholonomic robots.
    pub k_phi: f64,
}

impl Default for NominalConfig {
    fn default() -> Self {
        Self {
            w: 0.9,
            k_att: 1.0,
            k_rep: 0.2,
            d_cut: 3.0,
            k_p: 2.0,
            k_v: 2.0,
            k_phi: 4.0,
        }
    }
}

/// Scale `v` down to norm `limit` if it is longer.
pub fn saturate(v: Vec2, limit: f64) -> Vec2 {
    let n = v.norm();
    if n > limit && n > 0.0 {
        v * (limit / n)
    } else {
        v
    }
}

/// Fixed escape direction for robot `index` when it sits exactly on top of a
/// neighbour, spread over the circle by the golden angle.
fn escape_direction(index: usize) -> Vec2 {
    let golden = 0.5 * (1.0 + 5f64.sqrt());
    let angle = (index as f64 * golden).rem_euclid(std::f64::consts::TAU);
    Vec2::new(angle.cos(), angle.sin())
}

/// Desired reference-point velocity of robot `index` at `p` heading for
/// `goal`, repelled by the reference points in `neighbors`.
pub fn apf_velocity(
    index: usize,
    p: &Vec2,
    goal: &Vec2,
    neighbors: &[Vec2],
    cfg: &NominalConfig,
    v_max: f64,
) -> Vec2 {
    let attract = saturate(cfg.k_att * (goal - p), v_max);
    let mut repel = Vec2::zeros();
    for q in neighbors {
        let away = p - q;
        let d = away.norm();
        if d >= cfg.d_cut {
            continue;
        }
        if d < 1e-9 {
            repel += v_max * escape_direction(index);
        } else {
            repel += cfg.k_rep * away / (d * d * d * d);
        }
    }
    saturate(cfg.w * attract + (1.0 - cfg.w) * repel, v_max)
}

/// Input that steers the reference point towards `pdot_nom`, clamped into the
/// per-axis acceleration limits.
pub fn velocity_to_accel(
    spec: &KinematicSpec,
    pose: &Pose,
    nu: &VelocityState,
    pdot_nom: &Vec2,
    cfg: &NominalConfig,
) -> Vec2 {
    let u = if spec.class.is_holonomic() {
        cfg.k_p * (pdot_nom - ref_velocity(spec, pose.phi, nu))
    } else {
        let want = inverse_velocity_map(spec, pose.phi, pdot_nom);
        Vec2::new(cfg.k_v * (want.v - nu.v), cfg.k_phi * (want.omega - nu.omega))
    };
    let (limit_1, limit_2) = if spec.class.is_holonomic() {
        (spec.a_max, spec.a_max)
    } else {
        (spec.a_max, spec.omega_dot_max)
    };
    Vec2::new(u.x.clamp(-limit_1, limit_1), u.y.clamp(-limit_2, limit_2))
}
