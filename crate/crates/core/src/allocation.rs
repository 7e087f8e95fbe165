//! Splitting pairwise barrier demand between the two robots of a pair.
//!
//! The demand `-Υ` of an active pair must be covered by the two robots'
//! reference-point accelerations along `Δp`. Each robot's avoidance
//! capability `ρ̄` is the largest contribution it can make from its current
//! acceleration set; its progress capability `σ` is how far it can push its
//! reference point towards its nominal velocity. The share `α` handed to
//! robot `i` starts from the progress weight `σ_i / (σ_i + σ_j)` and is then
//! clipped into the interval of shares both robots can actually deliver.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Polytope2, Vec2};
use crate::opspace::OpState;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AllocStrategy {
    /// Always `α = ½`.
    Equal,
    /// Progress weight only.
    #[serde(rename = "cap", alias = "capability")]
    CapabilityOnly,
    /// Progress weight clipped into the feasibility interval.
    Full,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AllocConfig {
    pub epsilon: f64,
    pub strategy: AllocStrategy,
}

impl Default for AllocConfig {
    fn default() -> Self {
        Self {
            epsilon: 1e-6,
            strategy: AllocStrategy::Full,
        }
    }
}

/// `ρ̄ = max(0, max_u 2Δp·(η + G·u))` over the acceleration set, with `Δp`
/// pointing away from the other robot.
pub fn avoidance_capability(dp: &Vec2, op: &OpState, accel: &Polytope2) -> f64 {
    let rho = accel.support(&(2.0 * op.g.transpose() * dp));
    (rho + 2.0 * dp.dot(&op.eta)).max(0.0)
}

/// `σ = max(0, max_u d·(G·u))` with `d = ṗ_nom - ṗ`.
pub fn progress_capability(pdot_nom: &Vec2, op: &OpState, accel: &Polytope2) -> f64 {
    let d = pdot_nom - op.pdot;
    accel.support(&(op.g.transpose() * d)).max(0.0)
}

/// `σ_i / (σ_i + σ_j + ε)`, or `½` when neither robot has any progress
/// capability.
pub fn progress_weight(sigma_i: f64, sigma_j: f64, epsilon: f64) -> f64 {
    if sigma_i <= 0.0 && sigma_j <= 0.0 {
        return 0.5;
    }
    sigma_i / (sigma_i + sigma_j + epsilon)
}

/// Shares `[α_min, α_max]` robot `i` can take while both robots can still
/// meet their part of the demand. Empty when `α_min > α_max`.
pub fn feasibility_interval(rho_i: f64, rho_j: f64, upsilon: f64) -> Result<(f64, f64)> {
    if upsilon >= 0.0 {
        return Err(Error::NonNegativeDemand(upsilon));
    }
    let demand = -upsilon;
    Ok(((1.0 - rho_j / demand).max(0.0), (rho_i / demand).min(1.0)))
}

/// Outcome of allocating one pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Allocation {
    /// Share of robot `i`; robot `j` takes `1 - alpha`.
    pub alpha: f64,
    pub alpha_prog: f64,
    /// Feasibility interval when the demand is positive.
    pub interval: Option<(f64, f64)>,
}

impl Allocation {
    pub fn interval_nonempty(&self) -> Option<bool> {
        self.interval.map(|(lo, hi)| lo <= hi)
    }
}

/// Capabilities of one robot with respect to one pair.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Capability {
    pub rho_bar: f64,
    pub sigma: f64,
}

pub fn allocate(cfg: &AllocConfig, upsilon: f64, i: &Capability, j: &Capability) -> Allocation {
    let alpha_prog = progress_weight(i.sigma, j.sigma, cfg.epsilon);
    let interval = feasibility_interval(i.rho_bar, j.rho_bar, upsilon).ok();
    let alpha = match cfg.strategy {
        AllocStrategy::Equal => 0.5,
        AllocStrategy::CapabilityOnly => alpha_prog,
        AllocStrategy::Full => match interval {
            None => alpha_prog,
            Some((lo, hi)) if lo <= hi => alpha_prog.clamp(lo, hi),
            Some(_) => 0.5,
        },
    };
    Allocation {
        alpha,
        alpha_prog,
        interval,
    }
}
