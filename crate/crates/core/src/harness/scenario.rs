use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Vec2;
use crate::kinematics::{KinematicClass, KinematicSpec};
use crate::opspace::{reference_point, Pose};

/// Half-width of the square sampling region.
pub const REGION_HALF_WIDTH: f64 = 5.5;
/// Minimum start-to-goal distance per robot.
pub const MIN_START_GOAL: f64 = 4.0;
/// Minimum pairwise separation between start reference points, and between
/// goals.
pub const MIN_SEPARATION: f64 = 1.5;

const MAX_ATTEMPTS: usize = 100_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AgentInit {
    pub spec: KinematicSpec,
    /// `[phi, x, y]`
    pub start: [f64; 3],
    /// `[x, y]`
    pub goal: [f64; 2],
}

impl AgentInit {
    pub fn new(spec: KinematicSpec, start: Pose, goal: Vec2) -> Self {
        Self {
            spec,
            start: [start.phi, start.x, start.y],
            goal: [goal.x, goal.y],
        }
    }

    pub fn pose(&self) -> Pose {
        Pose::new(self.start[0], self.start[1], self.start[2])
    }

    pub fn goal(&self) -> Vec2 {
        Vec2::new(self.goal[0], self.goal[1])
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub agents: Vec<AgentInit>,
}

impl Scenario {
    pub fn validate(&self) -> Result<()> {
        if self.agents.is_empty() {
            return Err(Error::Scenario("no agents".into()));
        }
        for (k, a) in self.agents.iter().enumerate() {
            a.spec.validate()?;
            let finite = a.start.iter().chain(a.goal.iter()).all(|v| v.is_finite());
            if !finite {
                return Err(Error::Scenario(format!("agent {k}: non-finite start or goal")));
            }
        }
        Ok(())
    }

    pub fn classes(&self) -> Vec<KinematicClass> {
        self.agents.iter().map(|a| a.spec.class).collect()
    }
}

/// Pose whose reference point sits at `p` with heading `phi`.
pub fn pose_from_reference(spec: &KinematicSpec, phi: f64, p: Vec2) -> Pose {
    Pose::new(phi, p.x - spec.x_r * phi.cos(), p.y - spec.x_r * phi.sin())
}

/// Random start-goal scenario with classes cycling DI, UNI, DD, CL, FO.
pub fn random_scenario(n: usize, seed: u64) -> Result<Scenario> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut attempts = 0usize;
    let mut try_again = || {
        attempts += 1;
        if attempts > MAX_ATTEMPTS {
            Err(Error::Scenario(format!(
                "could not place {n} robots after {MAX_ATTEMPTS} samples"
            )))
        } else {
            Ok(())
        }
    };
    let mut agents: Vec<AgentInit> = Vec::with_capacity(n);
    let mut refs: Vec<Vec2> = Vec::with_capacity(n);
    for i in 0..n {
        let spec = KinematicSpec::defaults(KinematicClass::ALL[i % 5]);
        let (start, p) = loop {
            try_again()?;
            let phi = PI - rng.random_range(0.0..2.0 * PI);
            let x = rng.random_range(-REGION_HALF_WIDTH..=REGION_HALF_WIDTH);
            let y = rng.random_range(-REGION_HALF_WIDTH..=REGION_HALF_WIDTH);
            let start = Pose::new(phi, x, y);
            let p = reference_point(&spec, &start);
            if refs.iter().all(|q| (p - q).norm() >= MIN_SEPARATION) {
                break (start, p);
            }
        };
        let goal = loop {
            try_again()?;
            let g = Vec2::new(
                rng.random_range(-REGION_HALF_WIDTH..=REGION_HALF_WIDTH),
                rng.random_range(-REGION_HALF_WIDTH..=REGION_HALF_WIDTH),
            );
            let spaced = agents
                .iter()
                .all(|a| (a.goal() - g).norm() >= MIN_SEPARATION);
            if (g - p).norm() >= MIN_START_GOAL && spaced {
                break g;
            }
        };
        refs.push(p);
        agents.push(AgentInit::new(spec, start, goal));
    }
    Ok(Scenario { agents })
}

/// Two-robot encounter with reference points `separation` apart.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Encounter {
    /// Facing each other along the x axis.
    HeadOn,
    /// Paths crossing at right angles at the origin.
    Crossing,
}

pub fn two_agent_scenario(
    a: KinematicClass,
    b: KinematicClass,
    encounter: Encounter,
    separation: f64,
) -> Scenario {
    let (sa, sb) = (KinematicSpec::defaults(a), KinematicSpec::defaults(b));
    let agents = match encounter {
        Encounter::HeadOn => {
            let h = 0.5 * separation;
            vec![
                AgentInit::new(sa, pose_from_reference(&sa, 0.0, Vec2::new(-h, 0.0)), Vec2::new(h + 1.0, 0.0)),
                AgentInit::new(sb, pose_from_reference(&sb, PI, Vec2::new(h, 0.0)), Vec2::new(-h - 1.0, 0.0)),
            ]
        }
        Encounter::Crossing => {
            let h = separation / 2f64.sqrt();
            vec![
                AgentInit::new(sa, pose_from_reference(&sa, 0.0, Vec2::new(-h, 0.0)), Vec2::new(h, 0.0)),
                AgentInit::new(
                    sb,
                    pose_from_reference(&sb, 0.5 * PI, Vec2::new(0.0, -h)),
                    Vec2::new(0.0, h),
                ),
            ]
        }
    };
    Scenario { agents }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn random_scenario_constraints() {
        let s = random_scenario(10, 7).unwrap();
        let classes = s.classes();
        for c in KinematicClass::ALL {
            assert_eq!(classes.iter().filter(|&&k| k == c).count(), 2);
        }
        let refs: Vec<Vec2> = s
            .agents
            .iter()
            .map(|a| reference_point(&a.spec, &a.pose()))
            .collect();
        for (i, a) in s.agents.iter().enumerate() {
            assert!((a.goal() - refs[i]).norm() >= MIN_START_GOAL);
            assert!(a.start[0] > -PI && a.start[0] <= PI);
            for j in 0..i {
                assert!((refs[i] - refs[j]).norm() >= MIN_SEPARATION);
            }
        }
    }

    #[test]
    fn random_scenario_is_deterministic() {
        assert_eq!(random_scenario(20, 3).unwrap(), random_scenario(20, 3).unwrap());
        assert_ne!(random_scenario(20, 3).unwrap(), random_scenario(20, 4).unwrap());
    }

    #[test]
    fn overcrowded_region_is_an_error() {
        assert!(matches!(random_scenario(200, 1), Err(Error::Scenario(_))));
    }

    #[test]
    fn encounters_are_separated() {
        for e in [Encounter::HeadOn, Encounter::Crossing] {
            let s = two_agent_scenario(KinematicClass::Cl, KinematicClass::Uni, e, 4.0);
            let p: Vec<Vec2> = s
                .agents
                .iter()
                .map(|a| reference_point(&a.spec, &a.pose()))
                .collect();
            assert!(((p[0] - p[1]).norm() - 4.0).abs() < 1e-12);
        }
    }

    #[test]
    fn json_shape() {
        let text = r#"{"agents":[{"spec":{"class":"DD"},"start":[0.0,1.0,2.0],"goal":[5.0,2.0]}]}"#;
        let s: Scenario = serde_json::from_str(text).unwrap();
        assert_eq!(s.agents[0].spec, KinematicSpec::defaults(KinematicClass::Dd));
        assert_eq!(s.agents[0].goal(), Vec2::new(5.0, 2.0));
    }
}
