//! Pairwise second-order barrier on reference points.
//!
//! For robots `i` and `j` with reference points `p_i`, `p_j`:
//!
//! ```text
//! h  = |Δp|² - R²            Δp = p_i - p_j,  R = r_cbf,i + r_cbf,j
//! ḣ  = 2 Δp·Δṗ
//! Υ  = 2|Δṗ|² + (λ1+λ2)·ḣ + λ1·λ2·h
//! ```
//!
//! Safety of the pair requires `2Δp·(p̈_i - p̈_j) >= -Υ`. Robot `i` takes the
//! share `α` of `-Υ` and `j` takes `1 - α`, so each robot's constraint is a
//! single linear row in its own input.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Mat2, Vec2};
use crate::kinematics::KinematicSpec;
use crate::opspace::OpState;

/// Below this reference-point separation the barrier gradient is undefined.
pub const DEGENERATE_SEPARATION: f64 = 1e-9;

/// Class-K gains `λ1, λ2 > 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BarrierGains {
    pub lambda1: f64,
    pub lambda2: f64,
}

impl Default for BarrierGains {
    fn default() -> Self {
        Self {
            lambda1: 2.0,
            lambda2: 2.0,
        }
    }
}

/// Combined safety radius of a pair of robots.
pub fn safety_radius(a: &KinematicSpec, b: &KinematicSpec) -> f64 {
    a.r_cbf() + b.r_cbf()
}

/// Barrier quantities of an ordered pair `(i, j)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairTerms {
    pub dp: Vec2,
    pub dpdot: Vec2,
    pub radius: f64,
    pub h: f64,
    pub h_dot: f64,
    /// First-order barrier `ḣ + λ1·h`.
    pub psi: f64,
    pub upsilon: f64,
}

impl PairTerms {
    pub fn new(gains: &BarrierGains, radius: f64, i: &OpState, j: &OpState) -> Result<Self> {
        let dp = i.p - j.p;
        let dist = dp.norm();
        if dist < DEGENERATE_SEPARATION {
            return Err(Error::DegeneratePair(dist));
        }
        let dpdot = i.pdot - j.pdot;
        let h = dp.norm_squared() - radius * radius;
        let h_dot = 2.0 * dp.dot(&dpdot);
        let BarrierGains { lambda1, lambda2 } = *gains;
        Ok(Self {
            dp,
            dpdot,
            radius,
            h,
            h_dot,
            psi: h_dot + lambda1 * h,
            upsilon: 2.0 * dpdot.norm_squared() + (lambda1 + lambda2) * h_dot + lambda1 * lambda2 * h,
        })
    }

    /// The same pair seen from `j`.
    pub fn swapped(&self) -> Self {
        Self {
            dp: -self.dp,
            dpdot: -self.dpdot,
            ..*self
        }
    }

    /// Row `a·u >= b` for the robot whose input matrix is `g` and drift
    /// `eta`, carrying the share `alpha` of the demand.
    pub fn constraint_row(&self, g: &Mat2, eta: &Vec2, alpha: f64) -> (Vec2, f64) {
        let a = 2.0 * g.transpose() * self.dp;
        let b = -2.0 * self.dp.dot(eta) - alpha * self.upsilon;
        (a, b)
    }
}
