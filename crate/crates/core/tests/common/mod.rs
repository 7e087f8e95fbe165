//! Test-only oracles. Each one answers its question by brute force or by a
//! different method than the library, so the library is never checked
//! against itself.

#![allow(dead_code)]

use hcbf_core::geometry::{box_rows, HalfSpace};
use hcbf_core::qpsolve::LinearRow;
use hcbf_core::{Polytope2, Vec2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn unit(angle: f64) -> Vec2 {
    Vec2::new(angle.cos(), angle.sin())
}

/// A random two-variable QP: box bounds, up to `max_rows` barrier-like rows
/// and a nominal point that may lie outside the box.
#[derive(Debug, Clone)]
pub struct RandomQp {
    pub u_nom: Vec2,
    pub rows: Vec<LinearRow>,
    pub hx: f64,
    pub hy: f64,
}

impl RandomQp {
    pub fn sample(rng: &mut ChaCha8Rng, max_rows: usize) -> Self {
        let hx = rng.random_range(0.5..2.0);
        let hy = rng.random_range(0.5..2.0);
        let k = rng.random_range(0..=max_rows);
        let rows = (0..k)
            .map(|_| {
                let a = rng.random_range(0.2..3.0) * unit(rng.random_range(0.0..std::f64::consts::TAU));
                let b = rng.random_range(-2.0..1.0) * a.norm();
                LinearRow::new(a, b)
            })
            .collect();
        let u_nom = Vec2::new(rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0));
        Self { u_nom, rows, hx, hy }
    }

    pub fn bounds(&self) -> Polytope2 {
        Polytope2::centered_box(self.hx, self.hy).unwrap()
    }

    /// Every constraint as `n·u <= c`, in the solver's numbering: barrier
    /// rows first, then the box.
    pub fn halfspaces(&self) -> Vec<HalfSpace> {
        let mut all: Vec<HalfSpace> = self.rows.iter().map(|r| HalfSpace::new(-r.a, -r.b)).collect();
        all.extend(box_rows(self.hx, self.hy));
        all
    }
}

/// Fourier–Motzkin elimination of `y`, then an interval check on `x`.
pub fn fm_feasible(rows: &[HalfSpace]) -> bool {
    const ZERO: f64 = 1e-14;
    let mut upper = Vec::new(); // y <= (c - nx x) / ny
    let mut lower = Vec::new(); // y >= (c - nx x) / ny
    let mut in_x = Vec::new(); // a x <= b
    for h in rows {
        if h.normal.y > ZERO {
            upper.push(*h);
        } else if h.normal.y < -ZERO {
            lower.push(*h);
        } else {
            in_x.push((h.normal.x, h.offset));
        }
    }
    for p in &upper {
        for q in &lower {
            // (c_q - nx_q x)/ny_q <= (c_p - nx_p x)/ny_p
            // <=> (nx_p/ny_p - nx_q/ny_q) x <= c_p/ny_p - c_q/ny_q
            let a = p.normal.x / p.normal.y - q.normal.x / q.normal.y;
            let b = p.offset / p.normal.y - q.offset / q.normal.y;
            in_x.push((a, b));
        }
    }
    let (mut lo, mut hi) = (f64::NEG_INFINITY, f64::INFINITY);
    for (a, b) in in_x {
        if a > ZERO {
            hi = hi.min(b / a);
        } else if a < -ZERO {
            lo = lo.max(b / a);
        } else if b < -1e-12 {
            return false;
        }
    }
    lo <= hi + 1e-12
}

/// Column-scan grid oracle for `min |u - u_nom|` over the QP's feasible set.
/// Columns are spaced `step` apart in `x`; inside each column only lattice
/// points (also `step` apart) are considered. Rows are relaxed by `relax`.
/// Returns the smallest distance found, or `None` if no lattice point is
/// feasible.
pub fn grid_qp(qp: &RandomQp, step: f64, relax: f64) -> Option<f64> {
    let rows = qp.halfspaces();
    let nx = (2.0 * qp.hx / step).floor() as i64;
    let mut best: Option<f64> = None;
    for ix in 0..=nx {
        let x = -qp.hx + ix as f64 * step;
        let (mut lo, mut hi) = (f64::NEG_INFINITY, f64::INFINITY);
        let mut empty = false;
        for h in &rows {
            let scale = h.normal.norm();
            let c = h.offset + relax * scale - h.normal.x * x;
            if h.normal.y.abs() <= 1e-14 {
                if c < 0.0 {
                    empty = true;
                    break;
                }
            } else if h.normal.y > 0.0 {
                hi = hi.min(c / h.normal.y);
            } else {
                lo = lo.max(c / h.normal.y);
            }
        }
        if empty || lo > hi {
            continue;
        }
        // Lattice points of this column: y = -hy + k·step.
        let k_lo = ((lo + qp.hy) / step).ceil();
        let k_hi = ((hi + qp.hy) / step).floor();
        if k_lo > k_hi {
            continue;
        }
        let k = ((qp.u_nom.y + qp.hy) / step).round().clamp(k_lo, k_hi);
        let y = -qp.hy + k * step;
        let d = (Vec2::new(x, y) - qp.u_nom).norm();
        best = Some(best.map_or(d, |b: f64| b.min(d)));
    }
    best
}

/// Largest KKT stationarity residual `|u - u_nom + Σ λ_k n_k|` over
/// nonnegative multipliers on the reported active set (best choice of at
/// most two active rows, which suffices in the plane).
pub fn kkt_residual(u: &Vec2, u_nom: &Vec2, active: &[HalfSpace]) -> f64 {
    let g = u_nom - u; // must equal Σ λ_k n_k
    let units: Vec<Vec2> = active.iter().filter_map(|h| h.normalized()).map(|h| h.normal).collect();
    let mut best = g.norm();
    for (k, a) in units.iter().enumerate() {
        let lam = g.dot(a).max(0.0);
        best = best.min((g - lam * a).norm());
        for b in &units[k + 1..] {
            let m = hcbf_core::Mat2::from_columns(&[*a, *b]);
            if let Some(inv) = m.try_inverse() {
                let lam = inv * g;
                if lam.x >= -1e-12 && lam.y >= -1e-12 {
                    best = best.min((g - m * lam).norm());
                }
            }
        }
    }
    best
}

/// `max d·u` over a polygon by scanning columns `step` apart and solving
/// each column exactly.
pub fn grid_support(rows: &[HalfSpace], d: &Vec2, x_range: (f64, f64), step: f64) -> Option<f64> {
    let n = ((x_range.1 - x_range.0) / step).ceil() as i64;
    let mut best: Option<f64> = None;
    for ix in 0..=n {
        let x = (x_range.0 + ix as f64 * step).min(x_range.1);
        let (mut lo, mut hi) = (f64::NEG_INFINITY, f64::INFINITY);
        let mut empty = false;
        for h in rows {
            let c = h.offset - h.normal.x * x;
            if h.normal.y.abs() <= 1e-14 {
                empty |= c < 0.0;
            } else if h.normal.y > 0.0 {
                hi = hi.min(c / h.normal.y);
            } else {
                lo = lo.max(c / h.normal.y);
            }
        }
        if empty || lo > hi || !lo.is_finite() || !hi.is_finite() {
            continue;
        }
        let v = d.x * x + (d.y * lo).max(d.y * hi);
        best = Some(best.map_or(v, |b: f64| b.max(v)));
    }
    best
}

/// Vertices by brute force: every pairwise line intersection that satisfies
/// all rows.
pub fn brute_vertices(rows: &[HalfSpace]) -> Vec<Vec2> {
    let mut out: Vec<Vec2> = Vec::new();
    for (k, a) in rows.iter().enumerate() {
        for b in &rows[k + 1..] {
            let m = hcbf_core::Mat2::from_rows(&[a.normal.transpose(), b.normal.transpose()]);
            let Some(inv) = m.try_inverse() else { continue };
            let p = inv * Vec2::new(a.offset, b.offset);
            let inside = rows.iter().all(|h| h.normal.dot(&p) <= h.offset + 1e-9 * h.normal.norm().max(1.0));
            if inside && out.iter().all(|q| (q - p).norm() > 1e-7) {
                out.push(p);
            }
        }
    }
    out
}

/// A random bounded polygon: a box cut by a few random half-planes through
/// or near the interior.
pub fn random_polygon(rng: &mut ChaCha8Rng) -> Vec<HalfSpace> {
    let hx = rng.random_range(0.3..2.0);
    let hy = rng.random_range(0.3..2.0);
    let mut rows = box_rows(hx, hy);
    for _ in 0..rng.random_range(0..5) {
        let n = unit(rng.random_range(0.0..std::f64::consts::TAU));
        rows.push(HalfSpace::new(n, rng.random_range(0.05..1.0) * hx.min(hy)));
    }
    rows
}

/// `Υ` from its definition, written out independently of the barrier
/// module.
pub fn upsilon_reference(p_i: Vec2, v_i: Vec2, p_j: Vec2, v_j: Vec2, radius: f64, l1: f64, l2: f64) -> f64 {
    let (dx, dy) = (p_i.x - p_j.x, p_i.y - p_j.y);
    let (dvx, dvy) = (v_i.x - v_j.x, v_i.y - v_j.y);
    let h = dx * dx + dy * dy - radius * radius;
    let h_dot = 2.0 * (dx * dvx + dy * dvy);
    2.0 * (dvx * dvx + dvy * dvy) + (l1 + l2) * h_dot + l1 * l2 * h
}
