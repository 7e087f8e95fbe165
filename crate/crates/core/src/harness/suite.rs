use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::allocation::AllocStrategy;
use crate::error::Result;
use crate::nominal::NominalConfig;

use super::config::{Method, SimConfig};
use super::io::{write_pair_rows, write_trajectory_rows};
use super::metrics::{Aggregate, TrialMetrics};
use super::scenario::{random_scenario, Scenario};
use super::sim::Simulation;

/// What a run records besides per-trial metrics.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Default)]
pub enum LogLevel {
    #[default]
    Metrics,
    Trajectory,
    Pairs,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialOutput {
    pub metrics: TrialMetrics,
    /// Trajectory CSV rows (no header).
    pub trajectory: Option<String>,
    /// Pair CSV rows (no header).
    pub pairs: Option<String>,
}

/// Run one trial to completion.
pub fn run_trial(
    trial: usize,
    scenario: &Scenario,
    sim: SimConfig,
    nominal: NominalConfig,
    log: LogLevel,
) -> Result<TrialOutput> {
    let mut simulation = Simulation::new(scenario, sim, nominal)?;
    let mut trajectory = (log >= LogLevel::Trajectory).then(String::new);
    let mut pairs = (log >= LogLevel::Pairs).then(String::new);
    if let Some(out) = trajectory.as_mut() {
        write_trajectory_rows(out, trial, 0, simulation.agents());
    }
    let metrics = simulation.run(trial, |s, report| {
        if let Some(out) = trajectory.as_mut() {
            write_trajectory_rows(out, trial, report.step, s.agents());
        }
        if let Some(out) = pairs.as_mut() {
            write_pair_rows(out, trial, report);
        }
    })?;
    Ok(TrialOutput {
        metrics,
        trajectory,
        pairs,
    })
}

/// Seed of the `k`-th random trial under base seed `seed`.
pub fn trial_seed(seed: u64, k: usize) -> u64 {
    seed ^ k as u64
}

/// Run `trials` random scenarios of `n` robots in parallel. Results are in
/// trial order and do not depend on thread scheduling.
pub fn run_random_trials(
    n: usize,
    trials: usize,
    sim: SimConfig,
    nominal: NominalConfig,
    log: LogLevel,
) -> Result<Vec<TrialOutput>> {
    (0..trials)
        .into_par_iter()
        .map(|k| {
            let seed = trial_seed(sim.seed, k);
            let scenario = random_scenario(n, seed)?;
            run_trial(k, &scenario, SimConfig { seed, ..sim }, nominal, log)
        })
        .collect()
}

/// Metrics document written by the CLI.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub schema: u32,
    pub method: Method,
    pub strategy: AllocStrategy,
    pub w: f64,
    pub n_agents: usize,
    pub seed: u64,
    pub trials: Vec<TrialMetrics>,
    pub aggregate: Aggregate,
}

impl SuiteReport {
    pub fn new(sim: &SimConfig, nominal: &NominalConfig, n_agents: usize, trials: Vec<TrialMetrics>) -> Self {
        Self {
            schema: 1,
            method: sim.method,
            strategy: sim.alloc.strategy,
            w: nominal.w,
            n_agents,
            seed: sim.seed,
            aggregate: Aggregate::of(&trials),
            trials,
        }
    }
}
