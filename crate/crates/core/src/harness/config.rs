use serde::{Deserialize, Serialize};

use crate::allocation::AllocConfig;
use crate::barrier::BarrierGains;
use crate::error::{Error, Result};

/// Controller under test.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Method {
    /// Capability-aware barrier filter on the robot's own input.
    #[serde(rename = "cahcbf")]
    CaHcbf,
    /// Potential field tracked without any safety filter.
    #[serde(rename = "apf")]
    ApfTracking,
    /// Reference-point barrier filter that treats every robot as a double
    /// integrator, then tracks the filtered acceleration.
    #[serde(rename = "hocbf")]
    ApfHocbf,
}

impl Method {
    pub fn label(self) -> &'static str {
        match self {
            Self::CaHcbf => "cahcbf",
            Self::ApfTracking => "apf",
            Self::ApfHocbf => "hocbf",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimConfig {
    pub dt: f64,
    pub max_steps: usize,
    pub goal_tol: f64,
    pub gains: BarrierGains,
    pub alloc: AllocConfig,
    pub method: Method,
    /// Pairs whose reference points are farther apart than this get no
    /// barrier row. `None` couples every pair.
    pub neighbor_radius: Option<f64>,
    pub seed: u64,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            dt: 0.05,
            max_steps: 1000,
            goal_tol: 0.3,
            gains: BarrierGains::default(),
            alloc: AllocConfig::default(),
            method: Method::CaHcbf,
            neighbor_radius: None,
            seed: 0,
        }
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str| Err(Error::Config(what.to_string()));
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return bad("dt must be positive");
        }
        if self.goal_tol.is_nan() || self.goal_tol <= 0.0 {
            return bad("goal_tol must be positive");
        }
        if !(self.gains.lambda1 > 0.0 && self.gains.lambda2 > 0.0) {
            return bad("barrier gains must be positive");
        }
        if self.alloc.epsilon.is_nan() || self.alloc.epsilon <= 0.0 {
            return bad("allocation epsilon must be positive");
        }
        if let Some(r) = self.neighbor_radius {
            if r.is_nan() || r <= 0.0 {
                return bad("neighbor_radius must be positive");
            }
        }
        Ok(())
    }
}
