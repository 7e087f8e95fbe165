//! Exact two-variable safety-filter QP.
//!
//! ```text
//! minimize   |u - u_nom|²
//! subject to a_k·u >= b_k          (barrier rows)
//!            u ∈ bounds            (convex polygon)
//! ```
//!
//! The problem is the Euclidean projection of `u_nom` onto a convex polygon,
//! solved incrementally: constraints are added one at a time and whenever the
//! current optimum violates the new one, the optimum moves onto its boundary
//! line, where a one-dimensional problem over the earlier constraints decides
//! the new point.

use crate::geometry::{HalfSpace, Polytope2, Vec2};

/// Feasibility tolerance on unit-normal constraints.
pub const FEAS_TOL: f64 = 1e-9;

/// Constraints within this distance of the solution are reported active.
pub const ACTIVE_TOL: f64 = 1e-7;

/// Linear constraint `a·u >= b`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearRow {
    pub a: Vec2,
    pub b: f64,
}

impl LinearRow {
    pub fn new(a: Vec2, b: f64) -> Self {
        Self { a, b }
    }

    pub fn as_halfspace(&self) -> HalfSpace {
        HalfSpace::new(-self.a, -self.b)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum QpOutcome {
    /// Optimal input and the indices of active constraints. Barrier rows are
    /// numbered first, followed by the rows of the bounds polygon.
    Solved { u: Vec2, active: Vec<usize> },
    Infeasible,
}

impl QpOutcome {
    pub fn solution(&self) -> Option<Vec2> {
        match self {
            Self::Solved { u, .. } => Some(*u),
            Self::Infeasible => None,
        }
    }
}

/// Minimize `|u - u_nom|²` subject to `rows` and `bounds`.
pub fn solve_qp(u_nom: &Vec2, rows: &[LinearRow], bounds: &Polytope2) -> QpOutcome {
    let all: Vec<HalfSpace> = rows
        .iter()
        .map(LinearRow::as_halfspace)
        .chain(bounds.halfspaces().iter().copied())
        .collect();
    match project_onto(u_nom, &all) {
        Some(u) => {
            let active = all
                .iter()
                .enumerate()
                .filter(|(_, h)| match h.normalized() {
                    Some(unit) => unit.slack(&u).abs() <= ACTIVE_TOL,
                    None => false,
                })
                .map(|(k, _)| k)
                .collect();
            QpOutcome::Solved { u, active }
        }
        None => QpOutcome::Infeasible,
    }
}

/// Euclidean projection of `target` onto `{u : n_k·u <= c_k}`, or `None`
/// when the intersection is empty. The bounds rows come last in `rows`, so
/// they are processed first to keep every intermediate problem bounded.
pub fn project_onto(target: &Vec2, rows: &[HalfSpace]) -> Option<Vec2> {
    let mut units: Vec<HalfSpace> = Vec::with_capacity(rows.len());
    for h in rows.iter().rev() {
        match h.normalized() {
            Some(unit) => units.push(unit),
            None if h.offset >= -FEAS_TOL => {}
            None => return None,
        }
    }

    let mut x = *target;
    for k in 0..units.len() {
        if units[k].slack(&x) <= FEAS_TOL {
            continue;
        }
        x = project_on_line(target, &units[k], &units[..k])?;
    }
    Some(x)
}

/// Closest point to `target` on the boundary line of `line` that satisfies
/// every row of `earlier`.
fn project_on_line(target: &Vec2, line: &HalfSpace, earlier: &[HalfSpace]) -> Option<Vec2> {
    let origin = line.normal * line.offset;
    let dir = Vec2::new(-line.normal.y, line.normal.x);
    let mut lo = f64::NEG_INFINITY;
    let mut hi = f64::INFINITY;
    for h in earlier {
        let rate = h.normal.dot(&dir);
        let room = h.offset - h.normal.dot(&origin);
        if rate.abs() <= 1e-12 {
            if room < -FEAS_TOL {
                return None;
            }
        } else if rate > 0.0 {
            hi = hi.min(room / rate);
        } else {
            lo = lo.max(room / rate);
        }
    }
    if lo > hi + FEAS_TOL {
        return None;
    }
    let t = if lo > hi {
        0.5 * (lo + hi)
    } else {
        dir.dot(&(target - origin)).clamp(lo, hi)
    };
    Some(origin + dir * t)
}
