use std::time::Instant;

use crate::allocation::{allocate, avoidance_capability, progress_capability, Capability};
use crate::barrier::{safety_radius, PairTerms};
use crate::error::{Error, Result};
use crate::geometry::{Polytope2, Vec2};
use crate::kinematics::{AgentModel, KinematicSpec, VelocityState};
use crate::nominal::{apf_velocity, velocity_to_accel, NominalConfig};
use crate::opspace::{integrate, reference_point, OpState, Pose};
use crate::qpsolve::{solve_qp, LinearRow, QpOutcome};

use super::config::{Method, SimConfig};
use super::metrics::{BodyFrame, MetricsTracker, TrialMetrics};
use super::scenario::Scenario;

/// How an agent's input was produced in the last step.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QpStatus {
    Initial,
    Solved,
    /// The filter had no solution; the agent braked.
    Infeasible,
    /// Nominal input used without a safety filter.
    Unfiltered,
    /// Agent has arrived and no longer moves.
    Frozen,
}

impl QpStatus {
    pub fn label(self) -> &'static str {
        match self {
            Self::Initial => "initial",
            Self::Solved => "solved",
            Self::Infeasible => "infeasible",
            Self::Unfiltered => "unfiltered",
            Self::Frozen => "frozen",
        }
    }
}

#[derive(Debug, Clone)]
pub struct AgentRuntime {
    pub model: AgentModel,
    pub pose: Pose,
    pub nu: VelocityState,
    pub goal: Vec2,
    pub arrived: bool,
    pub arrival_step: Option<usize>,
    pub last_u: Vec2,
    pub last_status: QpStatus,
}

impl AgentRuntime {
    pub fn spec(&self) -> &KinematicSpec {
        self.model.spec()
    }

    pub fn reference(&self) -> Vec2 {
        reference_point(self.spec(), &self.pose)
    }

    fn body_frame(&self) -> BodyFrame {
        BodyFrame {
            reference: self.reference(),
            center: self.pose.position(),
            r_cbf: self.spec().r_cbf(),
            r_phys: self.spec().r_phys,
        }
    }
}

/// Barrier and allocation quantities of one coupled pair, taken before the
/// step's inputs were applied.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairRecord {
    pub i: usize,
    pub j: usize,
    pub dist: f64,
    pub radius: f64,
    pub h: f64,
    pub h_dot: f64,
    pub upsilon: f64,
    /// Share of `i`; `j` carries `1 - alpha`.
    pub alpha: f64,
    pub interval: Option<(f64, f64)>,
}

#[derive(Debug, Clone, Default)]
pub struct StepReport {
    /// Number of steps completed, including this one.
    pub step: usize,
    pub infeasible: usize,
    pub degenerate: usize,
    pub pairs: Vec<PairRecord>,
}

/// Synchronous multi-robot simulation of one trial.
#[derive(Debug, Clone)]
pub struct Simulation {
    cfg: SimConfig,
    nominal: NominalConfig,
    agents: Vec<AgentRuntime>,
    steps: usize,
    infeasible: usize,
    degenerate: usize,
    tracker: MetricsTracker,
}

impl Simulation {
    pub fn new(scenario: &Scenario, cfg: SimConfig, nominal: NominalConfig) -> Result<Self> {
        cfg.validate()?;
        scenario.validate()?;
        let agents = scenario
            .agents
            .iter()
            .map(|a| {
                Ok(AgentRuntime {
                    model: AgentModel::new(a.spec)?,
                    pose: a.pose(),
                    nu: VelocityState::ZERO,
                    goal: a.goal(),
                    arrived: false,
                    arrival_step: None,
                    last_u: Vec2::zeros(),
                    last_status: QpStatus::Initial,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let mut sim = Self {
            tracker: MetricsTracker::new(agents.len()),
            cfg,
            nominal,
            agents,
            steps: 0,
            infeasible: 0,
            degenerate: 0,
        };
        sim.mark_arrivals();
        sim.observe();
        Ok(sim)
    }

    pub fn config(&self) -> &SimConfig {
        &self.cfg
    }

    pub fn agents(&self) -> &[AgentRuntime] {
        &self.agents
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn time(&self) -> f64 {
        self.steps as f64 * self.cfg.dt
    }

    pub fn all_arrived(&self) -> bool {
        self.agents.iter().all(|a| a.arrived)
    }

    pub fn is_done(&self) -> bool {
        self.all_arrived() || self.steps >= self.cfg.max_steps
    }

    pub fn tracker(&self) -> &MetricsTracker {
        &self.tracker
    }

    fn observe(&mut self) {
        let frame: Vec<BodyFrame> = self.agents.iter().map(AgentRuntime::body_frame).collect();
        self.tracker.observe(&frame);
    }

    fn mark_arrivals(&mut self) {
        for a in &mut self.agents {
            if !a.arrived && (a.reference() - a.goal).norm() <= self.cfg.goal_tol {
                a.arrived = true;
                a.arrival_step = Some(self.steps);
                a.nu = VelocityState::ZERO;
            }
        }
    }

    /// Advance every agent by one step.
    pub fn step(&mut self) -> Result<StepReport> {
        let n = self.agents.len();
        let dt = self.cfg.dt;
        let ops: Vec<OpState> = self
            .agents
            .iter()
            .map(|a| OpState::new(a.spec(), &a.pose, &a.nu))
            .collect();

        let mut pdot_nom = vec![Vec2::zeros(); n];
        let mut u_nom = vec![Vec2::zeros(); n];
        let mut accel: Vec<Option<Polytope2>> = Vec::with_capacity(n);
        // Capabilities are measured on what the robot can really do, which
        // for steering robots excludes the steering floor.
        let mut realizable: Vec<Option<Polytope2>> = Vec::with_capacity(n);
        let mut neighbors = Vec::with_capacity(n);
        for (i, a) in self.agents.iter().enumerate() {
            if a.arrived {
                accel.push(None);
                realizable.push(None);
                continue;
            }
            neighbors.clear();
            neighbors.extend(ops.iter().enumerate().filter(|(k, _)| *k != i).map(|(_, o)| o.p));
            pdot_nom[i] = apf_velocity(i, &ops[i].p, &a.goal, &neighbors, &self.nominal, a.spec().v_max);
            u_nom[i] = velocity_to_accel(a.spec(), &a.pose, &a.nu, &pdot_nom[i], &self.nominal);
            let set = a.model.acceleration_set(&a.nu, dt)?;
            realizable.push(Some(if a.model.has_steer_floor() {
                a.model.realizable_acceleration_set(&a.nu, dt)?
            } else {
                set.clone()
            }));
            accel.push(Some(set));
        }

        let mut report = StepReport::default();
        let mut rows: Vec<Vec<LinearRow>> = vec![Vec::new(); n];
        if self.cfg.method != Method::ApfTracking {
            for i in 0..n {
                for j in (i + 1)..n {
                    let (ai, aj) = (&self.agents[i], &self.agents[j]);
                    if ai.arrived && aj.arrived {
                        continue;
                    }
                    let radius = safety_radius(ai.spec(), aj.spec());
                    let terms = match PairTerms::new(&self.cfg.gains, radius, &ops[i], &ops[j]) {
                        Ok(t) => t,
                        Err(Error::DegeneratePair(_)) => {
                            report.degenerate += 1;
                            continue;
                        }
                        Err(e) => return Err(e),
                    };
                    let dist = terms.dp.norm();
                    if self.cfg.neighbor_radius.is_some_and(|r| dist > r) {
                        continue;
                    }
                    let capability = |k: usize, dp: &Vec2| match &realizable[k] {
                        Some(set) => Capability {
                            rho_bar: avoidance_capability(dp, &ops[k], set),
                            sigma: progress_capability(&pdot_nom[k], &ops[k], set),
                        },
                        None => Capability::default(),
                    };
                    let ci = capability(i, &terms.dp);
                    let cj = capability(j, &-terms.dp);
                    let allocation = allocate(&self.cfg.alloc, terms.upsilon, &ci, &cj);
                    // An arrived robot is a static obstacle: the mover takes it all.
                    let alpha = if aj.arrived {
                        1.0
                    } else if ai.arrived {
                        0.0
                    } else if self.cfg.method == Method::ApfHocbf {
                        0.5
                    } else {
                        allocation.alpha
                    };
                    let swapped = terms.swapped();
                    match self.cfg.method {
                        Method::CaHcbf => {
                            let (a, b) = terms.constraint_row(&ops[i].g, &ops[i].eta, alpha);
                            rows[i].push(LinearRow::new(a, b));
                            let (a, b) = swapped.constraint_row(&ops[j].g, &ops[j].eta, 1.0 - alpha);
                            rows[j].push(LinearRow::new(a, b));
                        }
                        Method::ApfHocbf => {
                            rows[i].push(LinearRow::new(2.0 * terms.dp, -alpha * terms.upsilon));
                            rows[j].push(LinearRow::new(
                                2.0 * swapped.dp,
                                -(1.0 - alpha) * terms.upsilon,
                            ));
                        }
                        Method::ApfTracking => unreachable!(),
                    }
                    report.pairs.push(PairRecord {
                        i,
                        j,
                        dist,
                        radius,
                        h: terms.h,
                        h_dot: terms.h_dot,
                        upsilon: terms.upsilon,
                        alpha,
                        interval: allocation.interval,
                    });
                }
            }
        }

        for (i, a) in self.agents.iter_mut().enumerate() {
            let Some(set) = &accel[i] else {
                a.last_u = Vec2::zeros();
                a.last_status = QpStatus::Frozen;
                continue;
            };
            let (u, status) = match self.cfg.method {
                Method::ApfTracking => (set.project(&u_nom[i]), QpStatus::Unfiltered),
                Method::CaHcbf => match solve_qp(&u_nom[i], &rows[i], set) {
                    QpOutcome::Solved { u, .. } => (u, QpStatus::Solved),
                    QpOutcome::Infeasible => (a.model.braking_input(&a.nu, dt), QpStatus::Infeasible),
                },
                Method::ApfHocbf => {
                    let limit = a.spec().a_max;
                    let bounds = Polytope2::centered_box(limit, limit)?;
                    let a_nom = self.nominal.k_p * (pdot_nom[i] - ops[i].pdot);
                    match solve_qp(&a_nom, &rows[i], &bounds) {
                        QpOutcome::Solved { u: acc, .. } => {
                            // Track the filtered acceleration with the same
                            // controller that produced the nominal one.
                            let pdot_des = if self.nominal.k_p > 0.0 {
                                ops[i].pdot + acc / self.nominal.k_p
                            } else {
                                pdot_nom[i]
                            };
                            let u = velocity_to_accel(a.spec(), &a.pose, &a.nu, &pdot_des, &self.nominal);
                            (set.project(&u), QpStatus::Solved)
                        }
                        QpOutcome::Infeasible => {
                            (a.model.braking_input(&a.nu, dt), QpStatus::Infeasible)
                        }
                    }
                }
            };
            if status == QpStatus::Infeasible {
                report.infeasible += 1;
            }
            let (pose, nu) = integrate(&a.model, &a.pose, &a.nu, &u, dt);
            a.pose = pose;
            a.nu = nu;
            a.last_u = u;
            a.last_status = status;
        }

        self.steps += 1;
        self.infeasible += report.infeasible;
        self.degenerate += report.degenerate;
        self.mark_arrivals();
        self.observe();
        report.step = self.steps;
        Ok(report)
    }

    /// Step until every agent has arrived or the step budget runs out,
    /// calling `on_step` after each step.
    pub fn run(
        &mut self,
        trial: usize,
        mut on_step: impl FnMut(&Simulation, &StepReport),
    ) -> Result<TrialMetrics> {
        let started = Instant::now();
        while !self.is_done() {
            let report = self.step()?;
            on_step(self, &report);
        }
        Ok(self.metrics(trial, started.elapsed()))
    }

    pub fn metrics(&self, trial: usize, wall_time: std::time::Duration) -> TrialMetrics {
        let n = self.agents.len();
        let arrived = self.agents.iter().filter(|a| a.arrived).count();
        TrialMetrics {
            trial,
            seed: self.cfg.seed,
            n_agents: n,
            arrived,
            arrival_rate: arrived as f64 / n as f64,
            violations: self.tracker.violations(),
            mean_violation_depth: self.tracker.mean_depth(),
            max_violation_depth: self.tracker.max_depth(),
            qp_infeasible_events: self.infeasible,
            degenerate_pairs: self.degenerate,
            physical_exceptions: self.tracker.physical_exceptions(),
            steps_run: self.steps,
            wall_time,
        }
    }
}
