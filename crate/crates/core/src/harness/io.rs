use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::nominal::NominalConfig;

use super::config::SimConfig;
use super::scenario::{AgentInit, Scenario};
use super::sim::{AgentRuntime, StepReport};

pub const TRAJECTORY_HEADER: &str = "trial,step,agent,class,phi,x,y,v,omega,u1,u2,qp_status";
pub const PAIRS_HEADER: &str = "trial,step,i,j,dist,radius,h,h_dot,upsilon,alpha,alpha_min,alpha_max";

/// Scenario file: agents plus optional simulation and nominal settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub agents: Vec<AgentInit>,
    #[serde(default)]
    pub sim: SimConfig,
    #[serde(default)]
    pub nominal: NominalConfig,
}

impl ScenarioFile {
    pub fn scenario(&self) -> Scenario {
        Scenario {
            agents: self.agents.clone(),
        }
    }
}

pub fn load_scenario(path: &Path) -> Result<ScenarioFile> {
    let text = fs::read_to_string(path)?;
    let file: ScenarioFile =
        serde_json::from_str(&text).map_err(|e| Error::Scenario(format!("{}: {e}", path.display())))?;
    file.scenario().validate()?;
    file.sim.validate()?;
    Ok(file)
}

/// Shortest-ish decimal with nine significant digits, in the spirit of
/// C's `%.9g`.
pub fn fmt_g9(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let sci = format!("{x:.8e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..9).contains(&exp) {
        let decimals = (8 - exp).max(0) as usize;
        trim_zeros(format!("{x:.decimals$}"))
    } else {
        format!("{}e{exp}", trim_zeros(mantissa.to_string()))
    }
}

fn trim_zeros(s: String) -> String {
    if !s.contains('.') {
        return s;
    }
    s.trim_end_matches('0').trim_end_matches('.').to_string()
}

pub fn write_trajectory_rows(out: &mut String, trial: usize, step: usize, agents: &[AgentRuntime]) {
    for (k, a) in agents.iter().enumerate() {
        let _ = writeln!(
            out,
            "{trial},{step},{k},{},{},{},{},{},{},{},{},{}",
            a.spec().class,
            fmt_g9(a.pose.phi),
            fmt_g9(a.pose.x),
            fmt_g9(a.pose.y),
            fmt_g9(a.nu.v),
            fmt_g9(a.nu.omega),
            fmt_g9(a.last_u.x),
            fmt_g9(a.last_u.y),
            a.last_status.label(),
        );
    }
}

pub fn write_pair_rows(out: &mut String, trial: usize, report: &StepReport) {
    for p in &report.pairs {
        let (lo, hi) = match p.interval {
            Some((lo, hi)) => (fmt_g9(lo), fmt_g9(hi)),
            None => (String::new(), String::new()),
        };
        let _ = writeln!(
            out,
            "{trial},{},{},{},{},{},{},{},{},{},{lo},{hi}",
            report.step,
            p.i,
            p.j,
            fmt_g9(p.dist),
            fmt_g9(p.radius),
            fmt_g9(p.h),
            fmt_g9(p.h_dot),
            fmt_g9(p.upsilon),
            fmt_g9(p.alpha),
        );
    }
}
