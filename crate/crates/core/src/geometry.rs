//! Convex polygons in a 2-D control plane.
//!
//! A [`Polytope2`] is stored in H-representation (`n·u <= c`) together with a
//! cached counter-clockwise vertex list. Vertices are enumerated by clipping a
//! large square against each half-space and then snapping every surviving
//! corner to the exact intersection of the two lines that produced it.

use nalgebra::{Matrix2, Vector2};

use crate::error::GeometryError;

pub type Vec2 = Vector2<f64>;
pub type Mat2 = Matrix2<f64>;

/// Membership and tightness tolerance on unit-normal half-spaces.
pub const EPS: f64 = 1e-9;

/// Half-width of the seed square used for clipping. Anything reaching
/// [`UNBOUNDED_MARK`] after clipping is treated as unbounded.
const SEED: f64 = 1e6;
const UNBOUNDED_MARK: f64 = 1e5;

/// Closed half-space `normal · u <= offset`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HalfSpace {
    pub normal: Vec2,
    pub offset: f64,
}

impl HalfSpace {
    pub fn new(normal: Vec2, offset: f64) -> Self {
        Self { normal, offset }
    }

    /// Signed violation `normal · p - offset` (positive outside).
    #[inline]
    pub fn slack(&self, p: &Vec2) -> f64 {
        self.normal.dot(p) - self.offset
    }

    #[inline]
    pub fn contains(&self, p: &Vec2, tol: f64) -> bool {
        self.slack(p) <= tol
    }

    /// Rescale to a unit normal. `None` when the normal is (numerically) zero.
    pub fn normalized(&self) -> Option<Self> {
        let len = self.normal.norm();
        if len < 1e-14 {
            return None;
        }
        Some(Self {
            normal: self.normal / len,
            offset: self.offset / len,
        })
    }
}

/// Intersection point of the boundary lines of two half-spaces.
pub fn line_intersection(a: &HalfSpace, b: &HalfSpace) -> Option<Vec2> {
    let m = Mat2::new(a.normal.x, a.normal.y, b.normal.x, b.normal.y);
    let det = m.determinant();
    let scale = a.normal.norm() * b.normal.norm();
    if det.abs() <= 1e-12 * scale {
        return None;
    }
    // Cramer's rule keeps this bitwise deterministic.
    let x = (a.offset * b.normal.y - a.normal.y * b.offset) / det;
    let y = (a.normal.x * b.offset - a.offset * b.normal.x) / det;
    Some(Vec2::new(x, y))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Edge {
    Seed,
    Face(usize),
}

/// Nonempty, bounded convex region of the plane.
#[derive(Debug, Clone, PartialEq)]
pub struct Polytope2 {
    halfspaces: Vec<HalfSpace>,
    vertices: Vec<Vec2>,
}

impl Polytope2 {
    /// Build from half-spaces. Normals are rescaled to unit length and
    /// redundant rows are dropped.
    pub fn new(halfspaces: Vec<HalfSpace>) -> Result<Self, GeometryError> {
        let mut rows = Vec::with_capacity(halfspaces.len());
        for hs in &halfspaces {
            match hs.normalized() {
                Some(h) => rows.push(h),
                // 0·u <= c: either vacuous or contradictory.
                None if hs.offset >= -EPS => {}
                None => return Err(GeometryError::Empty),
            }
        }
        let vertices = enumerate_vertices(&rows)?;
        let halfspaces = prune_redundant(&rows, &vertices);
        Ok(Self {
            halfspaces,
            vertices,
        })
    }

    /// Axis-aligned box `|u1| <= hx, |u2| <= hy`.
    pub fn centered_box(hx: f64, hy: f64) -> Result<Self, GeometryError> {
        Self::new(box_rows(hx, hy))
    }

    /// Region bounded by a counter-clockwise vertex loop (at least 3 points).
    pub fn from_ccw_vertices(vertices: &[Vec2]) -> Result<Self, GeometryError> {
        if vertices.len() < 3 {
            return Err(GeometryError::NoVertices);
        }
        let rows = vertices
            .iter()
            .zip(vertices.iter().cycle().skip(1))
            .map(|(a, b)| {
                let d = b - a;
                let n = Vec2::new(d.y, -d.x);
                HalfSpace::new(n, n.dot(a))
            })
            .collect();
        Self::new(rows)
    }

    pub fn halfspaces(&self) -> &[HalfSpace] {
        &self.halfspaces
    }

    /// Counter-clockwise vertex list, starting from the smallest polar angle
    /// about the vertex centroid.
    pub fn vertices(&self) -> &[Vec2] {
        &self.vertices
    }

    /// True when the region has no interior (a segment or a point).
    pub fn is_degenerate(&self) -> bool {
        self.vertices.len() < 3
    }

    pub fn contains(&self, p: &Vec2) -> bool {
        self.contains_tol(p, EPS)
    }

    pub fn contains_tol(&self, p: &Vec2, tol: f64) -> bool {
        self.halfspaces.iter().all(|h| h.contains(p, tol))
    }

    /// Largest violation over all rows; nonpositive inside.
    pub fn max_violation(&self, p: &Vec2) -> f64 {
        self.halfspaces
            .iter()
            .map(|h| h.slack(p))
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Maximum of `d · u` over the region.
    pub fn support(&self, d: &Vec2) -> f64 {
        self.vertices
            .iter()
            .map(|v| d.dot(v))
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Euclidean projection onto the region. Identity for interior points.
    pub fn project(&self, p: &Vec2) -> Vec2 {
        if self.contains_tol(p, 0.0) {
            return *p;
        }
        match self.vertices.len() {
            1 => self.vertices[0],
            2 => closest_on_segment(p, &self.vertices[0], &self.vertices[1]),
            _ => self
                .vertices
                .iter()
                .zip(self.vertices.iter().cycle().skip(1))
                .map(|(a, b)| closest_on_segment(p, a, b))
                .fold(None::<(f64, Vec2)>, |best, q| {
                    let d = (q - p).norm_squared();
                    match best {
                        Some((bd, _)) if bd <= d => best,
                        _ => Some((d, q)),
                    }
                })
                .map(|(_, q)| q)
                .expect("bounded polygon has edges"),
        }
    }

    /// Area via the shoelace formula (zero for degenerate regions).
    pub fn area(&self) -> f64 {
        if self.vertices.len() < 3 {
            return 0.0;
        }
        0.5 * self
            .vertices
            .iter()
            .zip(self.vertices.iter().cycle().skip(1))
            .map(|(a, b)| a.x * b.y - a.y * b.x)
            .sum::<f64>()
    }
}

/// The four rows of `|u1| <= hx, |u2| <= hy`.
pub fn box_rows(hx: f64, hy: f64) -> Vec<HalfSpace> {
    vec![
        HalfSpace::new(Vec2::new(1.0, 0.0), hx),
        HalfSpace::new(Vec2::new(-1.0, 0.0), hx),
        HalfSpace::new(Vec2::new(0.0, 1.0), hy),
        HalfSpace::new(Vec2::new(0.0, -1.0), hy),
    ]
}

fn closest_on_segment(p: &Vec2, a: &Vec2, b: &Vec2) -> Vec2 {
    let ab = b - a;
    let len2 = ab.norm_squared();
    if len2 == 0.0 {
        return *a;
    }
    let t = ((p - a).dot(&ab) / len2).clamp(0.0, 1.0);
    a + ab * t
}

/// Counter-clockwise vertices of the intersection of unit-normal half-spaces.
pub fn enumerate_vertices(rows: &[HalfSpace]) -> Result<Vec<Vec2>, GeometryError> {
    // Seed square, counter-clockwise; label = edge leaving the vertex.
    let mut poly: Vec<(Vec2, Edge)> = vec![
        (Vec2::new(SEED, -SEED), Edge::Seed),
        (Vec2::new(SEED, SEED), Edge::Seed),
        (Vec2::new(-SEED, SEED), Edge::Seed),
        (Vec2::new(-SEED, -SEED), Edge::Seed),
    ];

    for (k, h) in rows.iter().enumerate() {
        let mut out = Vec::with_capacity(poly.len() + 2);
        for i in 0..poly.len() {
            let (a, ea) = poly[i];
            let (b, _) = poly[(i + 1) % poly.len()];
            let da = h.slack(&a);
            let db = h.slack(&b);
            let a_in = da <= EPS;
            let b_in = db <= EPS;
            match (a_in, b_in) {
                (true, true) => out.push((a, ea)),
                (true, false) => {
                    out.push((a, ea));
                    out.push((crossing(&a, &b, da, db), Edge::Face(k)));
                }
                (false, true) => out.push((crossing(&a, &b, da, db), ea)),
                (false, false) => {}
            }
        }
        poly = out;
        if poly.is_empty() {
            return Err(GeometryError::Empty);
        }
    }

    // Snap each corner to the exact intersection of its two boundary lines.
    let n = poly.len();
    let mut snapped: Vec<Vec2> = Vec::with_capacity(n);
    for i in 0..n {
        let (p, leaving) = poly[i];
        let (_, incoming) = poly[(i + n - 1) % n];
        let q = match (incoming, leaving) {
            (Edge::Face(a), Edge::Face(b)) if a != b => {
                line_intersection(&rows[a], &rows[b]).unwrap_or(p)
            }
            _ => p,
        };
        snapped.push(q);
    }

    if snapped
        .iter()
        .any(|p| p.x.abs() > UNBOUNDED_MARK || p.y.abs() > UNBOUNDED_MARK)
    {
        return Err(GeometryError::Unbounded);
    }

    let mut pts = snapped;
    dedup_cyclic(&mut pts);
    drop_collinear(&mut pts);
    if pts.is_empty() {
        return Err(GeometryError::Empty);
    }
    Ok(order_ccw(pts))
}

fn crossing(a: &Vec2, b: &Vec2, da: f64, db: f64) -> Vec2 {
    let t = (da / (da - db)).clamp(0.0, 1.0);
    a + (b - a) * t
}

fn same_point(a: &Vec2, b: &Vec2) -> bool {
    let scale = 1.0_f64.max(a.norm()).max(b.norm());
    (a - b).norm() <= 1e-10 * scale
}

fn dedup_cyclic(pts: &mut Vec<Vec2>) {
    let mut out: Vec<Vec2> = Vec::with_capacity(pts.len());
    for p in pts.iter() {
        if out.iter().any(|q| same_point(p, q)) {
            continue;
        }
        out.push(*p);
    }
    *pts = out;
}

/// Remove vertices lying strictly inside a straight run. Reversal points of
/// flat (zero-area) loops are kept, which leaves the two segment endpoints.
fn drop_collinear(pts: &mut Vec<Vec2>) {
    loop {
        let n = pts.len();
        if n < 3 {
            return;
        }
        let mut removed = false;
        for i in 0..n {
            let a = pts[(i + n - 1) % n];
            let b = pts[i];
            let c = pts[(i + 1) % n];
            let u = b - a;
            let v = c - b;
            let cross = u.x * v.y - u.y * v.x;
            if cross.abs() <= 1e-12 * u.norm() * v.norm() && u.dot(&v) > 0.0 {
                pts.remove(i);
                removed = true;
                break;
            }
        }
        if !removed {
            // A flat loop can still carry an interior reversal point; keep
            // only its farthest pair.
            if pts.len() >= 3 && polygon_area(pts).abs() <= 1e-14 * diameter2(pts).max(1e-300) {
                *pts = farthest_pair(pts);
            }
            return;
        }
    }
}

fn polygon_area(pts: &[Vec2]) -> f64 {
    0.5 * pts
        .iter()
        .zip(pts.iter().cycle().skip(1))
        .map(|(a, b)| a.x * b.y - a.y * b.x)
        .sum::<f64>()
}

fn diameter2(pts: &[Vec2]) -> f64 {
    let mut best = 0.0_f64;
    for (i, a) in pts.iter().enumerate() {
        for b in &pts[i + 1..] {
            best = best.max((a - b).norm_squared());
        }
    }
    best
}

fn farthest_pair(pts: &[Vec2]) -> Vec<Vec2> {
    let mut best = (0.0, 0, 0);
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            let d = (pts[i] - pts[j]).norm_squared();
            if d > best.0 {
                best = (d, i, j);
            }
        }
    }
    vec![pts[best.1], pts[best.2]]
}

/// Sort by polar angle about the centroid, angles measured in `[0, 2π)`.
fn order_ccw(mut pts: Vec<Vec2>) -> Vec<Vec2> {
    if pts.len() < 2 {
        return pts;
    }
    let c = pts.iter().fold(Vec2::zeros(), |acc, p| acc + p) / pts.len() as f64;
    let angle = |p: &Vec2| {
        let a = (p.y - c.y).atan2(p.x - c.x);
        if a < -1e-12 {
            a + std::f64::consts::TAU
        } else {
            a.max(0.0)
        }
    };
    pts.sort_by(|a, b| angle(a).total_cmp(&angle(b)));
    pts
}

fn prune_redundant(rows: &[HalfSpace], vertices: &[Vec2]) -> Vec<HalfSpace> {
    let needed = if vertices.len() >= 3 { 2 } else { 1 };
    let mut kept: Vec<HalfSpace> = Vec::new();
    for h in rows {
        let tight = vertices.iter().filter(|v| h.slack(v).abs() <= EPS).count();
        if tight < needed {
            continue;
        }
        let duplicate = kept.iter().any(|k| {
            (k.normal - h.normal).norm() <= 1e-12 && (k.offset - h.offset).abs() <= 1e-12
        });
        if !duplicate {
            kept.push(*h);
        }
    }
    kept
}
