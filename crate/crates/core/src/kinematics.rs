//! Kinematic classes and their admissible control sets.
//!
//! Every robot is driven in a 2-D control plane: `(v, ω)` for the four
//! nonholonomic classes and `(vx, vy)` for the double integrator. The
//! velocity-level set `U` is a convex polygon per class, and the
//! acceleration-level set is whatever keeps `ν + u·Δt` inside `U` while
//! respecting the actuator bounds.
//!
//! The car-like curvature cone `|ω| <= |v|·tan(ψ_max)/ℓ` is a bow-tie, not a
//! convex set, so it is kept as two convex branches (forward and reverse
//! gear). The acceleration set always uses the branch the robot is currently
//! in; a car at rest may accelerate either way but only steer within the
//! steering floor.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{box_rows, HalfSpace, Polytope2, Vec2};

/// Slack allowed when checking that a velocity lies in its admissible set.
pub const STATE_SLACK: f64 = 1e-6;

/// Forward speed below which a car-like robot counts as stopped.
const REST_SPEED: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum KinematicClass {
    /// Holonomic double integrator.
    #[serde(rename = "DI", alias = "di")]
    Di,
    /// Unicycle.
    #[serde(rename = "UNI", alias = "uni")]
    Uni,
    /// Differential drive.
    #[serde(rename = "DD", alias = "dd")]
    Dd,
    /// Car-like (forward and reverse).
    #[serde(rename = "CL", alias = "cl")]
    Cl,
    /// Forward-only car.
    #[serde(rename = "FO", alias = "fo")]
    Fo,
}

impl KinematicClass {
    pub const ALL: [KinematicClass; 5] = [Self::Di, Self::Uni, Self::Dd, Self::Cl, Self::Fo];

    pub fn is_holonomic(self) -> bool {
        self == Self::Di
    }

    pub fn label(self) -> &'static str {
        match self {
            Self::Di => "DI",
            Self::Uni => "UNI",
            Self::Dd => "DD",
            Self::Cl => "CL",
            Self::Fo => "FO",
        }
    }

    fn steers(self) -> bool {
        matches!(self, Self::Cl | Self::Fo)
    }
}

impl fmt::Display for KinematicClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Radius of the circle circumscribing a `width × height` rectangle.
pub fn half_diagonal(width: f64, height: f64) -> f64 {
    0.5 * width.hypot(height)
}

/// Per-robot kinematic and physical parameters.
///
/// For DD robots `a_max` bounds each wheel's acceleration, giving the
/// diamond `|u1 ± (ℓ/2)·u2| <= a_max`. For DI robots `a_max` bounds both
/// Cartesian axes and `omega_*` are unused.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PartialSpec")]
pub struct KinematicSpec {
    pub class: KinematicClass,
    pub x_r: f64,
    pub v_max: f64,
    pub omega_max: f64,
    pub a_max: f64,
    pub omega_dot_max: f64,
    pub wheelbase: f64,
    pub psi_max: f64,
    pub r_phys: f64,
    pub steer_floor: f64,
}

impl KinematicSpec {
    /// Default parameters for a class.
    pub fn defaults(class: KinematicClass) -> Self {
        let base = Self {
            class,
            x_r: 0.0,
            v_max: 1.0,
            omega_max: 0.0,
            a_max: 2.0,
            omega_dot_max: 0.0,
            wheelbase: 0.0,
            psi_max: 0.0,
            r_phys: 0.3,
            steer_floor: 0.0,
        };
        match class {
            KinematicClass::Di => base,
            KinematicClass::Uni => Self {
                x_r: 0.1,
                omega_max: PI,
                omega_dot_max: 8.0,
                ..base
            },
            KinematicClass::Dd => Self {
                x_r: 0.1,
                wheelbase: 0.5,
                // implied by the wheel diamond: 2·a_max/ℓ
                omega_dot_max: 8.0,
                ..base
            },
            KinematicClass::Cl | KinematicClass::Fo => Self {
                x_r: 0.2,
                omega_dot_max: 10.0,
                wheelbase: 0.5,
                psi_max: FRAC_PI_4,
                r_phys: half_diagonal(0.3, 0.6),
                steer_floor: 0.1,
                ..base
            },
        }
    }

    pub fn validate(&self) -> Result<()> {
        fn check(ok: bool, name: &'static str, value: f64, reason: &'static str) -> Result<()> {
            if ok && value.is_finite() {
                Ok(())
            } else {
                Err(Error::InvalidSpec {
                    name,
                    value,
                    reason,
                })
            }
        }
        let c = self.class;
        check(self.v_max > 0.0, "v_max", self.v_max, "must be positive")?;
        check(self.a_max > 0.0, "a_max", self.a_max, "must be positive")?;
        check(self.r_phys >= 0.0, "r_phys", self.r_phys, "must be nonnegative")?;
        check(self.steer_floor >= 0.0, "steer_floor", self.steer_floor, "must be nonnegative")?;
        for (name, value) in [
            ("omega_max", self.omega_max),
            ("omega_dot_max", self.omega_dot_max),
            ("wheelbase", self.wheelbase),
            ("psi_max", self.psi_max),
        ] {
            check(value >= 0.0, name, value, "must be nonnegative")?;
        }
        if c.is_holonomic() {
            check(self.x_r == 0.0, "x_r", self.x_r, "double integrators have no look-ahead")?;
            return Ok(());
        }
        check(self.x_r > 0.0, "x_r", self.x_r, "must be positive for nonholonomic robots")?;
        check(self.omega_dot_max > 0.0, "omega_dot_max", self.omega_dot_max, "must be positive")?;
        match c {
            KinematicClass::Uni => {
                check(self.omega_max > 0.0, "omega_max", self.omega_max, "must be positive")
            }
            KinematicClass::Dd => {
                check(self.wheelbase > 0.0, "wheelbase", self.wheelbase, "must be positive")
            }
            _ => {
                check(self.wheelbase > 0.0, "wheelbase", self.wheelbase, "must be positive")?;
                check(
                    self.psi_max > 0.0 && self.psi_max < FRAC_PI_2,
                    "psi_max",
                    self.psi_max,
                    "must lie in (0, π/2)",
                )
            }
        }
    }

    /// Slope of the curvature cone, `tan(ψ_max)/ℓ`.
    pub fn curvature_gain(&self) -> f64 {
        self.psi_max.tan() / self.wheelbase
    }

    /// Look-ahead offset plus physical radius.
    pub fn r_cbf(&self) -> f64 {
        self.x_r + self.r_phys
    }
}

/// Deserialization shape: every key but `class` may be omitted.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct PartialSpec {
    class: KinematicClass,
    x_r: Option<f64>,
    v_max: Option<f64>,
    omega_max: Option<f64>,
    a_max: Option<f64>,
    omega_dot_max: Option<f64>,
    wheelbase: Option<f64>,
    psi_max: Option<f64>,
    r_phys: Option<f64>,
    steer_floor: Option<f64>,
}

impl TryFrom<PartialSpec> for KinematicSpec {
    type Error = String;

    fn try_from(p: PartialSpec) -> std::result::Result<Self, String> {
        let d = Self::defaults(p.class);
        let spec = Self {
            class: p.class,
            x_r: p.x_r.unwrap_or(d.x_r),
            v_max: p.v_max.unwrap_or(d.v_max),
            omega_max: p.omega_max.unwrap_or(d.omega_max),
            a_max: p.a_max.unwrap_or(d.a_max),
            omega_dot_max: p.omega_dot_max.unwrap_or(d.omega_dot_max),
            wheelbase: p.wheelbase.unwrap_or(d.wheelbase),
            psi_max: p.psi_max.unwrap_or(d.psi_max),
            r_phys: p.r_phys.unwrap_or(d.r_phys),
            steer_floor: p.steer_floor.unwrap_or(d.steer_floor),
        };
        spec.validate().map_err(|e| e.to_string())?;
        Ok(spec)
    }
}

/// Velocity-level state. For DI robots the components are `(vx, vy)`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct VelocityState {
    pub v: f64,
    pub omega: f64,
}

impl VelocityState {
    pub const ZERO: Self = Self { v: 0.0, omega: 0.0 };

    pub fn new(v: f64, omega: f64) -> Self {
        Self { v, omega }
    }

    pub fn to_vec(self) -> Vec2 {
        Vec2::new(self.v, self.omega)
    }

    pub fn from_vec(u: Vec2) -> Self {
        Self { v: u.x, omega: u.y }
    }
}

/// Velocity-level admissible set: one convex branch, or two for CL.
#[derive(Debug, Clone, PartialEq)]
pub struct VelocitySet {
    branches: Vec<Polytope2>,
}

impl VelocitySet {
    pub fn branches(&self) -> &[Polytope2] {
        &self.branches
    }

    pub fn contains(&self, nu: &VelocityState, tol: f64) -> bool {
        let p = nu.to_vec();
        self.branches.iter().any(|b| b.contains_tol(&p, tol))
    }

    /// Nearest admissible velocity (first branch wins ties).
    pub fn project(&self, nu: &VelocityState) -> VelocityState {
        let p = nu.to_vec();
        let mut best: Option<(f64, Vec2)> = None;
        for b in &self.branches {
            let q = b.project(&p);
            let d = (q - p).norm_squared();
            if best.is_none_or(|(bd, _)| d < bd) {
                best = Some((d, q));
            }
        }
        VelocityState::from_vec(best.expect("at least one branch").1)
    }
}

fn forward_cone_rows(spec: &KinematicSpec) -> Vec<HalfSpace> {
    let k = spec.curvature_gain();
    vec![
        HalfSpace::new(Vec2::new(1.0, 0.0), spec.v_max),
        HalfSpace::new(Vec2::new(-1.0, 0.0), 0.0),
        HalfSpace::new(Vec2::new(-k, 1.0), 0.0),
        HalfSpace::new(Vec2::new(-k, -1.0), 0.0),
    ]
}

fn reverse_cone_rows(spec: &KinematicSpec) -> Vec<HalfSpace> {
    let k = spec.curvature_gain();
    vec![
        HalfSpace::new(Vec2::new(-1.0, 0.0), spec.v_max),
        HalfSpace::new(Vec2::new(1.0, 0.0), 0.0),
        HalfSpace::new(Vec2::new(k, 1.0), 0.0),
        HalfSpace::new(Vec2::new(k, -1.0), 0.0),
    ]
}

/// Wheel-speed diamond `|x ± (ℓ/2)·y| <= bound`.
fn diamond_rows(bound: f64, wheelbase: f64) -> Vec<HalfSpace> {
    let h = 0.5 * wheelbase;
    vec![
        HalfSpace::new(Vec2::new(1.0, h), bound),
        HalfSpace::new(Vec2::new(-1.0, -h), bound),
        HalfSpace::new(Vec2::new(1.0, -h), bound),
        HalfSpace::new(Vec2::new(-1.0, h), bound),
    ]
}

/// Unpruned half-spaces of each velocity branch.
fn branch_rows(spec: &KinematicSpec) -> Vec<Vec<HalfSpace>> {
    match spec.class {
        KinematicClass::Di => vec![box_rows(spec.v_max, spec.v_max)],
        KinematicClass::Uni => vec![box_rows(spec.v_max, spec.omega_max)],
        KinematicClass::Dd => vec![diamond_rows(spec.v_max, spec.wheelbase)],
        KinematicClass::Fo => vec![forward_cone_rows(spec)],
        KinematicClass::Cl => vec![forward_cone_rows(spec), reverse_cone_rows(spec)],
    }
}

/// Velocity-level admissible set of a robot.
pub fn velocity_set(spec: &KinematicSpec) -> Result<VelocitySet> {
    spec.validate()?;
    let branches = branch_rows(spec)
        .into_iter()
        .map(Polytope2::new)
        .collect::<Result<Vec<_>, _>>()?;
    Ok(VelocitySet { branches })
}

/// Actuator bounds on the acceleration input, independent of the state.
pub fn acceleration_bounds(spec: &KinematicSpec) -> Result<Polytope2> {
    spec.validate()?;
    let rows = match spec.class {
        KinematicClass::Di => box_rows(spec.a_max, spec.a_max),
        KinematicClass::Dd => {
            let mut rows = diamond_rows(spec.a_max, spec.wheelbase);
            rows.extend(box_rows(spec.a_max, spec.omega_dot_max));
            rows
        }
        _ => box_rows(spec.a_max, spec.omega_dot_max),
    };
    Ok(Polytope2::new(rows)?)
}

/// Spec with its velocity set and actuator bounds precomputed.
#[derive(Debug, Clone)]
pub struct AgentModel {
    spec: KinematicSpec,
    velocity: VelocitySet,
    /// Branch rows before redundancy pruning: the widened steering rows
    /// must not stand in for the sign constraint on `v` they imply.
    rows: Vec<Vec<HalfSpace>>,
    bounds: Polytope2,
}

impl AgentModel {
    pub fn new(spec: KinematicSpec) -> Result<Self> {
        Ok(Self {
            velocity: velocity_set(&spec)?,
            rows: branch_rows(&spec),
            bounds: acceleration_bounds(&spec)?,
            spec,
        })
    }

    pub fn spec(&self) -> &KinematicSpec {
        &self.spec
    }

    pub fn velocity_set(&self) -> &VelocitySet {
        &self.velocity
    }

    pub fn acceleration_bounds(&self) -> &Polytope2 {
        &self.bounds
    }

    /// Accelerations `u` within the actuator bounds such that `ν + u·Δt`
    /// stays admissible. For CL/FO the steering rows are widened so that
    /// `(0, ±steer_floor)` is always allowed.
    pub fn acceleration_set(&self, nu: &VelocityState, dt: f64) -> Result<Polytope2> {
        self.build_acceleration_set(nu, dt, self.spec.steer_floor)
    }

    /// The acceleration set without the steering floor: inputs whose effect
    /// survives integration unchanged. Equal to [`Self::acceleration_set`]
    /// for classes that do not steer.
    pub fn realizable_acceleration_set(&self, nu: &VelocityState, dt: f64) -> Result<Polytope2> {
        self.build_acceleration_set(nu, dt, 0.0)
    }

    /// Whether the steering floor makes the two sets above differ.
    pub fn has_steer_floor(&self) -> bool {
        self.spec.class.steers() && self.spec.steer_floor > 0.0
    }

    fn build_acceleration_set(&self, nu: &VelocityState, dt: f64, floor: f64) -> Result<Polytope2> {
        if !self.velocity.contains(nu, STATE_SLACK) {
            return Err(Error::StateOutside {
                v: nu.v,
                omega: nu.omega,
            });
        }
        let p = nu.to_vec();
        let mut rows: Vec<HalfSpace> = self.bounds.halfspaces().to_vec();

        let branch = match self.spec.class {
            KinematicClass::Cl if nu.v.abs() <= REST_SPEED => None,
            KinematicClass::Cl if nu.v < 0.0 => Some(&self.rows[1]),
            _ => Some(&self.rows[0]),
        };
        match branch {
            Some(b) => rows.extend(
                b.iter()
                    .map(|h| HalfSpace::new(h.normal, (h.offset - h.normal.dot(&p)) / dt)),
            ),
            None => {
                // Stopped car: either gear, steering only within the floor.
                rows.extend(box_rows((self.spec.v_max - nu.v.abs()) / dt, floor));
            }
        }

        if self.spec.class.steers() && floor > 0.0 {
            for h in rows.iter_mut() {
                if let Some(unit) = h.normalized() {
                    *h = unit;
                    h.offset = h.offset.max(floor * h.normal.y.abs());
                }
            }
        }
        Ok(Polytope2::new(rows)?)
    }

    /// Nearest point of the velocity set.
    pub fn clamp_velocity(&self, nu: &VelocityState) -> VelocityState {
        self.velocity.project(nu)
    }

    /// Velocity actually reached after commanding `ν`. Steering robots keep
    /// their speed (clamped) and have the turn rate cut back to what the
    /// curvature limit allows at that speed, since steering at a standstill
    /// produces no yaw. Other classes take the nearest admissible point.
    pub fn realize_velocity(&self, nu: &VelocityState) -> VelocityState {
        if !self.spec.class.steers() {
            return self.clamp_velocity(nu);
        }
        let v_min = if self.spec.class == KinematicClass::Fo {
            0.0
        } else {
            -self.spec.v_max
        };
        let v = nu.v.clamp(v_min, self.spec.v_max);
        let w = self.spec.curvature_gain() * v.abs();
        VelocityState::new(v, nu.omega.clamp(-w, w))
    }

    /// Acceleration pointing from `ν` straight at zero velocity, scaled down
    /// uniformly until it fits the actuator bounds.
    pub fn braking_input(&self, nu: &VelocityState, dt: f64) -> Vec2 {
        let w = -nu.to_vec() / dt;
        let mut scale = 1.0_f64;
        for h in self.bounds.halfspaces() {
            let reach = h.normal.dot(&w);
            if reach > h.offset {
                scale = scale.min(h.offset / reach);
            }
        }
        w * scale.max(0.0)
    }
}

/// Acceleration-level admissible set for velocity `ν`.
pub fn acceleration_set(spec: &KinematicSpec, nu: &VelocityState, dt: f64) -> Result<Polytope2> {
    AgentModel::new(*spec)?.acceleration_set(nu, dt)
}

/// Nearest point of `velocity_set(spec)` to `ν`.
pub fn clamp_velocity(spec: &KinematicSpec, nu: &VelocityState) -> Result<VelocityState> {
    Ok(velocity_set(spec)?.project(nu))
}
