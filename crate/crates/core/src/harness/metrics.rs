use std::time::Duration;

use serde::{Deserialize, Serialize};

use crate::geometry::Vec2;

/// Tolerance on the reference-to-body separation implication.
const PHYSICAL_TOL: f64 = 1e-9;

/// Outcome of one trial.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialMetrics {
    pub trial: usize,
    pub seed: u64,
    pub n_agents: usize,
    pub arrived: usize,
    pub arrival_rate: f64,
    /// Number of maximal time intervals during which some pair's reference
    /// points were closer than their safety radius.
    pub violations: usize,
    /// Mean penetration `R - |Δp|` over all violating pair samples.
    pub mean_violation_depth: f64,
    pub max_violation_depth: f64,
    pub qp_infeasible_events: usize,
    pub degenerate_pairs: usize,
    /// Pair samples whose reference points were safely apart while the
    /// bodies' bounding discs overlapped. Must stay zero.
    pub physical_exceptions: usize,
    pub steps_run: usize,
    #[serde(skip)]
    pub wall_time: Duration,
}

/// Pairwise bookkeeping for one frame.
#[derive(Debug, Clone, Copy)]
pub struct BodyFrame {
    pub reference: Vec2,
    pub center: Vec2,
    pub r_cbf: f64,
    pub r_phys: f64,
}

/// Accumulates violation statistics frame by frame.
#[derive(Debug, Clone)]
pub struct MetricsTracker {
    n: usize,
    in_violation: Vec<bool>,
    events: usize,
    depth_sum: f64,
    depth_samples: usize,
    depth_max: f64,
    physical_exceptions: usize,
}

impl MetricsTracker {
    pub fn new(n: usize) -> Self {
        Self {
            n,
            in_violation: vec![false; n * n.saturating_sub(1) / 2],
            events: 0,
            depth_sum: 0.0,
            depth_samples: 0,
            depth_max: 0.0,
            physical_exceptions: 0,
        }
    }

    pub fn observe(&mut self, frame: &[BodyFrame]) {
        debug_assert_eq!(frame.len(), self.n);
        let mut k = 0;
        for i in 0..self.n {
            for j in (i + 1)..self.n {
                let (a, b) = (&frame[i], &frame[j]);
                let radius = a.r_cbf + b.r_cbf;
                let dist = (a.reference - b.reference).norm();
                if dist < radius {
                    let depth = radius - dist;
                    if !self.in_violation[k] {
                        self.events += 1;
                    }
                    self.in_violation[k] = true;
                    self.depth_sum += depth;
                    self.depth_samples += 1;
                    self.depth_max = self.depth_max.max(depth);
                } else {
                    self.in_violation[k] = false;
                    let body = (a.center - b.center).norm();
                    if body < a.r_phys + b.r_phys - PHYSICAL_TOL {
                        self.physical_exceptions += 1;
                    }
                }
                k += 1;
            }
        }
    }

    pub fn violations(&self) -> usize {
        self.events
    }

    pub fn physical_exceptions(&self) -> usize {
        self.physical_exceptions
    }

    pub fn mean_depth(&self) -> f64 {
        if self.depth_samples == 0 {
            0.0
        } else {
            self.depth_sum / self.depth_samples as f64
        }
    }

    pub fn max_depth(&self) -> f64 {
        self.depth_max
    }
}

/// Mean and sample standard deviation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Stat {
    pub mean: f64,
    pub std: f64,
}

impl Stat {
    pub fn of(values: impl IntoIterator<Item = f64>) -> Self {
        let v: Vec<f64> = values.into_iter().collect();
        if v.is_empty() {
            return Self { mean: 0.0, std: 0.0 };
        }
        let n = v.len() as f64;
        let mean = v.iter().sum::<f64>() / n;
        let std = if v.len() > 1 {
            (v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
        } else {
            0.0
        };
        Self { mean, std }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Aggregate {
    pub arrival_rate: Stat,
    pub violations: Stat,
    pub mean_violation_depth: Stat,
    pub qp_infeasible_events: Stat,
    pub steps_run: Stat,
}

impl Aggregate {
    pub fn of(trials: &[TrialMetrics]) -> Self {
        Self {
            arrival_rate: Stat::of(trials.iter().map(|t| t.arrival_rate)),
            violations: Stat::of(trials.iter().map(|t| t.violations as f64)),
            mean_violation_depth: Stat::of(trials.iter().map(|t| t.mean_violation_depth)),
            qp_infeasible_events: Stat::of(trials.iter().map(|t| t.qp_infeasible_events as f64)),
            steps_run: Stat::of(trials.iter().map(|t| t.steps_run as f64)),
        }
    }
}
