//! Benchmark harness: scenarios, the synchronous simulation loop, metrics
//! and file output.

pub mod config;
pub mod io;
pub mod metrics;
pub mod scenario;
pub mod sim;
pub mod suite;

pub use config::{Method, SimConfig};
pub use metrics::{Aggregate, Stat, TrialMetrics};
pub use scenario::{random_scenario, two_agent_scenario, AgentInit, Encounter, Scenario};
pub use sim::{PairRecord, QpStatus, Simulation, StepReport};
pub use suite::{run_random_trials, run_trial, LogLevel, SuiteReport, TrialOutput};
