//! Randomized invariants of the geometry, kinematics, solver and nominal
//! controller.

mod common;

use common::{brute_vertices, random_polygon, unit, RandomQp};
use hcbf_core::allocation::{allocate, AllocConfig, AllocStrategy, Capability};
use hcbf_core::geometry::enumerate_vertices;
use hcbf_core::harness::io::fmt_g9;
use hcbf_core::nominal::{apf_velocity, velocity_to_accel, NominalConfig};
use hcbf_core::opspace::{integrate, jacobian};
use hcbf_core::qpsolve::{solve_qp, QpOutcome};
use hcbf_core::{AgentModel, KinematicClass, KinematicSpec, Polytope2, Pose, Vec2, VelocityState};
use proptest::prelude::*;

const DT: f64 = 0.1;

fn class() -> impl Strategy<Value = KinematicClass> {
    prop::sample::select(KinematicClass::ALL.to_vec())
}

fn vec2(r: f64) -> impl Strategy<Value = Vec2> {
    (-r..r, -r..r).prop_map(|(x, y)| Vec2::new(x, y))
}

/// An admissible velocity: a random point pulled into the velocity set.
fn admissible(model: &AgentModel, raw: Vec2) -> VelocityState {
    model.clamp_velocity(&VelocityState::from_vec(raw))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn apf_is_translation_invariant(p in vec2(5.0), g in vec2(5.0), q in vec2(5.0), shift in vec2(20.0)) {
        let cfg = NominalConfig::default();
        let a = apf_velocity(0, &p, &g, &[q], &cfg, 1.0);
        let b = apf_velocity(0, &(p + shift), &(g + shift), &[q + shift], &cfg, 1.0);
        prop_assert!((a - b).norm() < 1e-9, "{a:?} vs {b:?}");
    }

    #[test]
    fn apf_respects_speed_limit(p in vec2(5.0), g in vec2(5.0), qs in prop::collection::vec(vec2(5.0), 0..6), w in 0.0..=1.0f64) {
        let cfg = NominalConfig { w, ..Default::default() };
        let v = apf_velocity(3, &p, &g, &qs, &cfg, 1.0);
        prop_assert!(v.norm() <= 1.0 + 1e-12);
    }

    #[test]
    fn tracker_output_within_actuator_box(c in class(), phi in -4.0..4.0f64, raw in vec2(4.0), target in vec2(2.0)) {
        let spec = KinematicSpec::defaults(c);
        let model = AgentModel::new(spec).unwrap();
        let nu = admissible(&model, raw);
        let u = velocity_to_accel(&spec, &Pose::new(phi, 0.0, 0.0), &nu, &target, &NominalConfig::default());
        let limit_2 = if c.is_holonomic() { spec.a_max } else { spec.omega_dot_max };
        prop_assert!(u.x.abs() <= spec.a_max + 1e-12 && u.y.abs() <= limit_2 + 1e-12, "{u:?}");
    }

    #[test]
    fn braking_is_admissible(c in class(), raw in vec2(4.0)) {
        let model = AgentModel::new(KinematicSpec::defaults(c)).unwrap();
        let nu = admissible(&model, raw);
        let set = model.acceleration_set(&nu, DT).unwrap();
        let u = model.braking_input(&nu, DT);
        prop_assert!(set.contains_tol(&u, 1e-9), "{c} ν={nu:?} u={u:?} excess {}", set.max_violation(&u));
    }

    #[test]
    fn braking_stops_in_bounded_steps(c in class(), raw in vec2(4.0)) {
        let model = AgentModel::new(KinematicSpec::defaults(c)).unwrap();
        let mut nu = admissible(&model, raw);
        // Each step removes one unit of the bounds' gauge of ν/Δt.
        let gauge = model
            .acceleration_bounds()
            .halfspaces()
            .iter()
            .map(|h| h.normal.dot(&(nu.to_vec() / DT)) / h.offset)
            .fold(0.0, f64::max);
        let budget = gauge.ceil() as usize + 1;
        let mut pose = Pose::default();
        for _ in 0..budget {
            let u = model.braking_input(&nu, DT);
            (pose, nu) = integrate(&model, &pose, &nu, &u, DT);
        }
        prop_assert!(nu.to_vec().norm() < 1e-9, "{c} still moving after {budget} steps: {nu:?}");
    }

    #[test]
    fn realized_velocity_is_admissible(c in class(), raw in vec2(6.0)) {
        let model = AgentModel::new(KinematicSpec::defaults(c)).unwrap();
        let nu = model.realize_velocity(&VelocityState::from_vec(raw));
        prop_assert!(model.velocity_set().contains(&nu, 1e-9), "{c} {nu:?}");
    }

    #[test]
    fn integration_keeps_velocity_admissible(c in class(), raw in vec2(4.0), u in vec2(12.0), phi in -4.0..4.0f64) {
        let model = AgentModel::new(KinematicSpec::defaults(c)).unwrap();
        let nu = admissible(&model, raw);
        let (_, next) = integrate(&model, &Pose::new(phi, 0.0, 0.0), &nu, &u, DT);
        prop_assert!(model.velocity_set().contains(&next, 1e-9), "{c} {next:?}");
    }

    #[test]
    fn jacobian_determinant_is_offset(c in class(), phi in -10.0..10.0f64) {
        let spec = KinematicSpec::defaults(c);
        let det = jacobian(&spec, phi).determinant();
        let expected = if c.is_holonomic() { 1.0 } else { spec.x_r };
        prop_assert!((det - expected).abs() < 1e-12);
    }

    #[test]
    fn qp_solution_is_feasible_and_not_beaten(seed in any::<u64>()) {
        let mut rng = common::rng(seed);
        let qp = RandomQp::sample(&mut rng, 4);
        let rows = qp.halfspaces();
        let QpOutcome::Solved { u, .. } = solve_qp(&qp.u_nom, &qp.rows, &qp.bounds()) else {
            return Ok(());
        };
        for h in &rows {
            prop_assert!(h.contains(&u, 1e-7 * h.normal.norm().max(1.0)));
        }
        let again = solve_qp(&u, &qp.rows, &qp.bounds()).solution().unwrap();
        prop_assert!((again - u).norm() <= 1e-9, "re-solve moved {u:?} to {again:?}");
        let best = (u - qp.u_nom).norm();
        for _ in 0..200 {
            use rand::Rng;
            let q = Vec2::new(rng.random_range(-qp.hx..qp.hx), rng.random_range(-qp.hy..qp.hy));
            if rows.iter().all(|h| h.contains(&q, 0.0)) {
                prop_assert!((q - qp.u_nom).norm() >= best - 1e-9);
            }
        }
    }

    #[test]
    fn full_allocation_stays_in_unit_interval(
        rho_i in 0.0..5.0f64, rho_j in 0.0..5.0f64,
        sigma_i in 0.0..5.0f64, sigma_j in 0.0..5.0f64,
        upsilon in -10.0..4.0f64,
    ) {
        let ci = Capability { rho_bar: rho_i, sigma: sigma_i };
        let cj = Capability { rho_bar: rho_j, sigma: sigma_j };
        let cfg = AllocConfig { strategy: AllocStrategy::Full, ..Default::default() };
        let a = allocate(&cfg, upsilon, &ci, &cj);
        prop_assert!((0.0..=1.0).contains(&a.alpha));
        // When both robots together can cover the demand, so can each share.
        if upsilon < 0.0 && rho_i + rho_j + upsilon > 1e-9 {
            prop_assert!(a.alpha * -upsilon <= rho_i + 1e-9);
            prop_assert!((1.0 - a.alpha) * -upsilon <= rho_j + 1e-9);
        }
    }

    #[test]
    fn fmt_g9_round_trips(x in prop::num::f64::NORMAL | prop::num::f64::ZERO) {
        let back: f64 = fmt_g9(x).parse().unwrap();
        prop_assert!((back - x).abs() <= 5e-9 * x.abs(), "{x} -> {}", fmt_g9(x));
    }

    #[test]
    fn projection_is_nearest_point(seed in any::<u64>(), p in vec2(4.0)) {
        let mut rng = common::rng(seed);
        let poly = Polytope2::new(random_polygon(&mut rng)).unwrap();
        let q = poly.project(&p);
        prop_assert!(poly.contains_tol(&q, 1e-9));
        for v in poly.vertices() {
            prop_assert!((p - q).norm() <= (p - v).norm() + 1e-9);
        }
        if poly.contains(&p) {
            prop_assert!((p - q).norm() < 1e-12);
        }
    }

    #[test]
    fn support_is_attained_at_a_vertex(seed in any::<u64>(), angle in 0.0..std::f64::consts::TAU) {
        let mut rng = common::rng(seed);
        let poly = Polytope2::new(random_polygon(&mut rng)).unwrap();
        let d = unit(angle);
        let best = poly.vertices().iter().map(|v| d.dot(v)).fold(f64::NEG_INFINITY, f64::max);
        prop_assert!((poly.support(&d) - best).abs() < 1e-12);
    }
}

#[test]
fn vertex_enumeration_matches_brute_force() {
    let mut rng = common::rng(909);
    for _ in 0..500 {
        let rows = random_polygon(&mut rng);
        let fast = enumerate_vertices(&rows).unwrap();
        let slow = brute_vertices(&rows);
        assert_eq!(fast.len(), slow.len(), "{rows:?}");
        for v in &fast {
            assert!(slow.iter().any(|w| (v - w).norm() < 1e-7), "{v:?} not a brute-force vertex");
        }
    }
}
