//! Points, disks and the predicates every other module is built on.
//!
//! All coordinates are `f64`. Coincidence tests (tangency, concurrency,
//! duplicate disks) use [`TOLERANCE`] in units of the instance's bounding-box
//! extent, so an instance living in the unit square is tested at `1e-9`
//! absolute. Disks are closed: a point on the boundary circle is inside.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::broadphase::{self, BoundaryGrid};

/// Relative tolerance for every geometric coincidence test.
pub const TOLERANCE: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("non-finite coordinate or radius")]
    NonFinite,
    #[error("disk radius must be positive, got {0}")]
    NonPositiveRadius(f64),
    #[error("circles {a} and {b} coincide")]
    Coincident { a: usize, b: usize },
    #[error("circles {a} and {b} are tangent")]
    Tangent { a: usize, b: usize },
    #[error("instance is not in general position: {0}")]
    GeneralPosition(GeneralPositionReport),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("query point lies on (or within tolerance of) circle {circle}; perturb the query point")]
    BoundaryQuery { circle: usize },
    #[error("disks {a} and {b} do not intersect")]
    NotIntersecting { a: usize, b: usize },
    #[error("disk id {0} appears on both sides of a bipartite query")]
    OverlappingSides(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    #[inline]
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn try_new(x: f64, y: f64) -> Result<Self, GeometryError> {
        if x.is_finite() && y.is_finite() {
            Ok(Self { x, y })
        } else {
            Err(GeometryError::NonFinite)
        }
    }

    #[inline]
    pub fn dist_sq(self, other: Point) -> f64 {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        dx * dx + dy * dy
    }

    #[inline]
    pub fn dist(self, other: Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    #[inline]
    pub fn offset(self, dx: f64, dy: f64) -> Point {
        Point::new(self.x + dx, self.y + dy)
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

/// A closed disk. `id` is the disk's index in its instance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Disk {
    pub center: Point,
    pub radius: f64,
    pub id: usize,
}

impl Disk {
    pub fn new(center: Point, radius: f64, id: usize) -> Result<Self, GeometryError> {
        if !(center.x.is_finite() && center.y.is_finite() && radius.is_finite()) {
            return Err(GeometryError::NonFinite);
        }
        if radius <= 0.0 {
            return Err(GeometryError::NonPositiveRadius(radius));
        }
        Ok(Self { center, radius, id })
    }

    #[inline]
    pub fn contains(&self, p: Point) -> bool {
        self.center.dist_sq(p) <= self.radius * self.radius
    }

    #[inline]
    pub fn intersects(&self, other: &Disk) -> bool {
        let r = self.radius + other.radius;
        self.center.dist_sq(other.center) <= r * r
    }

    /// Unsigned distance from `p` to the boundary circle.
    #[inline]
    pub fn boundary_distance(&self, p: Point) -> f64 {
        (self.center.dist(p) - self.radius).abs()
    }

    /// Point on the boundary circle at polar angle `theta`.
    #[inline]
    pub fn point_at(&self, theta: f64) -> Point {
        Point::new(
            self.center.x + self.radius * theta.cos(),
            self.center.y + self.radius * theta.sin(),
        )
    }

    /// Polar angle of `p` around the center, in `(-pi, pi]`.
    #[inline]
    pub fn angle_of(&self, p: Point) -> f64 {
        (p.y - self.center.y).atan2(p.x - self.center.x)
    }

    /// Circles cross at two points (neither disjoint nor nested).
    #[inline]
    pub(crate) fn crosses(&self, other: &Disk) -> bool {
        let d = self.center.dist(other.center);
        d < self.radius + other.radius && d > (self.radius - other.radius).abs()
    }
}

pub fn disks_intersect(a: &Disk, b: &Disk) -> bool {
    a.intersects(b)
}

pub fn contains(d: &Disk, p: Point) -> bool {
    d.contains(p)
}

/// Intersection points of the two boundary circles, at the default tolerance.
///
/// Tangent or coincident circles are general-position violations and are
/// reported as errors rather than as a single touching point.
pub fn circle_intersection_points(a: &Disk, b: &Disk) -> Result<Vec<Point>, GeometryError> {
    circle_intersection_points_tol(a, b, TOLERANCE)
}

pub(crate) fn circle_intersection_points_tol(
    a: &Disk,
    b: &Disk,
    tol: f64,
) -> Result<Vec<Point>, GeometryError> {
    let d = a.center.dist(b.center);
    let (ra, rb) = (a.radius, b.radius);
    if d <= tol && (ra - rb).abs() <= tol {
        return Err(GeometryError::Coincident { a: a.id, b: b.id });
    }
    if (d - (ra + rb)).abs() <= tol || (d - (ra - rb).abs()).abs() <= tol {
        return Err(GeometryError::Tangent { a: a.id, b: b.id });
    }
    if d > ra + rb || d < (ra - rb).abs() {
        return Ok(Vec::new());
    }
    // Radical line: the chord sits at distance `along` from a's center.
    let along = (d * d + ra * ra - rb * rb) / (2.0 * d);
    let h = (ra * ra - along * along).max(0.0).sqrt();
    let ux = (b.center.x - a.center.x) / d;
    let uy = (b.center.y - a.center.y) / d;
    let mx = a.center.x + along * ux;
    let my = a.center.y + along * uy;
    Ok(vec![
        Point::new(mx - h * uy, my + h * ux),
        Point::new(mx + h * uy, my - h * ux),
    ])
}

/// Number of disks containing `p`.
pub fn depth_at(p: Point, disks: &[Disk]) -> usize {
    disks.iter().filter(|d| d.contains(p)).count()
}

/// Ids of the disks containing `p`, ascending.
pub fn covering_ids(p: Point, disks: &[Disk]) -> Vec<usize> {
    let mut ids: Vec<usize> = disks.iter().filter(|d| d.contains(p)).map(|d| d.id).collect();
    ids.sort_unstable();
    ids
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundingBox {
    pub min: Point,
    pub max: Point,
}

impl BoundingBox {
    pub fn of_disks(disks: &[Disk]) -> Option<Self> {
        let first = disks.first()?;
        let mut min = Point::new(first.center.x - first.radius, first.center.y - first.radius);
        let mut max = Point::new(first.center.x + first.radius, first.center.y + first.radius);
        for d in &disks[1..] {
            min.x = min.x.min(d.center.x - d.radius);
            min.y = min.y.min(d.center.y - d.radius);
            max.x = max.x.max(d.center.x + d.radius);
            max.y = max.y.max(d.center.y + d.radius);
        }
        Some(Self { min, max })
    }

    pub fn width(&self) -> f64 {
        self.max.x - self.min.x
    }

    pub fn height(&self) -> f64 {
        self.max.y - self.min.y
    }

    pub fn extent(&self) -> f64 {
        self.width().max(self.height())
    }

    pub fn diagonal(&self) -> f64 {
        self.width().hypot(self.height())
    }
}

/// Length scale used to turn [`TOLERANCE`] into an absolute tolerance.
pub fn instance_scale(disks: &[Disk]) -> f64 {
    match BoundingBox::of_disks(disks) {
        Some(b) if b.extent() > 0.0 => b.extent(),
        _ => 1.0,
    }
}

/// Generation metadata carried alongside the disks.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct InstanceMeta {
    pub generator: Option<String>,
    pub seed: Option<u64>,
}

/// An ordered list of disks with ids `0..n` in list order.
#[derive(Debug, Clone, PartialEq)]
pub struct DiskInstance {
    disks: Vec<Disk>,
    pub meta: InstanceMeta,
}

impl DiskInstance {
    /// Builds an instance from `(x, y, r)` triples, assigning ids in order.
    pub fn from_circles<I>(circles: I) -> Result<Self, GeometryError>
    where
        I: IntoIterator<Item = (f64, f64, f64)>,
    {
        let disks = circles
            .into_iter()
            .enumerate()
            .map(|(id, (x, y, r))| Disk::new(Point::try_new(x, y)?, r, id))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self { disks, meta: InstanceMeta::default() })
    }

    pub fn with_meta(mut self, meta: InstanceMeta) -> Self {
        self.meta = meta;
        self
    }

    pub fn disks(&self) -> &[Disk] {
        &self.disks
    }

    pub fn len(&self) -> usize {
        self.disks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.disks.is_empty()
    }

    pub fn validate(&self) -> GeneralPositionReport {
        validate_general_position(&self.disks)
    }

    /// Errors with the full violation list unless the instance is in general position.
    pub fn ensure_general_position(&self) -> Result<(), GeometryError> {
        let report = self.validate();
        if report.is_ok() {
            Ok(())
        } else {
            Err(GeometryError::GeneralPosition(report))
        }
    }

    /// Parses the `x y r` text format; `#` lines and blank lines are skipped.
    pub fn parse(text: &str) -> Result<Self, GeometryError> {
        let mut circles = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            if fields.len() != 3 {
                return Err(GeometryError::Parse {
                    line: lineno + 1,
                    msg: format!("expected `x y r`, found {} fields", fields.len()),
                });
            }
            let mut vals = [0.0f64; 3];
            for (slot, field) in vals.iter_mut().zip(&fields) {
                *slot = field.parse().map_err(|e| GeometryError::Parse {
                    line: lineno + 1,
                    msg: format!("bad number `{field}`: {e}"),
                })?;
            }
            let id = circles.len();
            let disk = Point::try_new(vals[0], vals[1])
                .and_then(|c| Disk::new(c, vals[2], id))
                .map_err(|e| GeometryError::Parse { line: lineno + 1, msg: e.to_string() })?;
            circles.push(disk);
        }
        Ok(Self { disks: circles, meta: InstanceMeta::default() })
    }

    /// Serializes to the `x y r` format, one disk per line.
    pub fn to_text(&self) -> String {
        let mut out = String::with_capacity(self.disks.len() * 40);
        for d in &self.disks {
            out.push_str(&format!("{} {} {}\n", d.center.x, d.center.y, d.radius));
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    Duplicate { a: usize, b: usize },
    Tangent { a: usize, b: usize },
    Concurrent { circles: [usize; 3], at: Point },
    CloseVertices { first: (usize, usize), second: (usize, usize) },
}

impl Violation {
    pub fn disks(&self) -> Vec<usize> {
        match *self {
            Violation::Duplicate { a, b } | Violation::Tangent { a, b } => vec![a, b],
            Violation::Concurrent { circles, .. } => circles.to_vec(),
            Violation::CloseVertices { first, second } => vec![first.0, first.1, second.0, second.1],
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Duplicate { a, b } => write!(f, "duplicate disks {a} and {b}"),
            Violation::Tangent { a, b } => write!(f, "tangent circles {a} and {b}"),
            Violation::Concurrent { circles, at } => {
                write!(f, "circles {}, {}, {} meet near {at}", circles[0], circles[1], circles[2])
            }
            Violation::CloseVertices { first, second } => write!(
                f,
                "intersection points of ({}, {}) and ({}, {}) nearly coincide",
                first.0, first.1, second.0, second.1
            ),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct GeneralPositionReport {
    pub violations: Vec<Violation>,
}

impl GeneralPositionReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn offending_disks(&self) -> BTreeSet<usize> {
        self.violations.iter().flat_map(Violation::disks).collect()
    }
}

impl fmt::Display for GeneralPositionReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return write!(f, "ok");
        }
        write!(f, "{} violation(s)", self.violations.len())?;
        for v in self.violations.iter().take(8) {
            write!(f, "; {v}")?;
        }
        if self.violations.len() > 8 {
            write!(f, "; ...")?;
        }
        Ok(())
    }
}

/// Reports duplicate disks, tangencies, three circles through one point and
/// nearly coincident intersection points.
pub fn validate_general_position(disks: &[Disk]) -> GeneralPositionReport {
    let tol = TOLERANCE * instance_scale(disks);
    let mut violations = Vec::new();
    let mut vertices: Vec<(Point, (usize, usize))> = Vec::new();

    for (i, j) in broadphase::overlapping_pairs(disks, tol) {
        let (a, b) = (&disks[i], &disks[j]);
        match circle_intersection_points_tol(a, b, tol) {
            Err(GeometryError::Coincident { .. }) => {
                violations.push(Violation::Duplicate { a: a.id, b: b.id })
            }
            Err(GeometryError::Tangent { .. }) => violations.push(Violation::Tangent { a: a.id, b: b.id }),
            Err(_) => unreachable!("intersection only reports coincidence or tangency"),
            Ok(points) => {
                for p in points {
                    vertices.push((p, (i, j)));
                }
            }
        }
    }

    if !vertices.is_empty() {
        let grid = BoundaryGrid::new(disks, tol);
        let mut seen = BTreeSet::new();
        for &(p, (i, j)) in &vertices {
            for &k in grid.near(p) {
                let k = k as usize;
                if k == i || k == j {
                    continue;
                }
                if disks[k].boundary_distance(p) <= tol {
                    let mut triple = [disks[i].id, disks[j].id, disks[k].id];
                    triple.sort_unstable();
                    if seen.insert(triple) {
                        violations.push(Violation::Concurrent { circles: triple, at: p });
                    }
                }
            }
        }

        let mut order: Vec<usize> = (0..vertices.len()).collect();
        order.sort_by(|&u, &v| vertices[u].0.x.total_cmp(&vertices[v].0.x));
        for (pos, &u) in order.iter().enumerate() {
            let (pu, cu) = vertices[u];
            for &v in &order[pos + 1..] {
                let (pv, cv) = vertices[v];
                if pv.x - pu.x > tol {
                    break;
                }
                if pu.dist(pv) <= tol {
                    let ids = |c: (usize, usize)| (disks[c.0].id, disks[c.1].id);
                    let shared = [cu.0, cu.1].iter().filter(|x| **x == cv.0 || **x == cv.1).count();
                    // Three circles through one point already reported as concurrent.
                    if shared == 1 {
                        continue;
                    }
                    violations.push(Violation::CloseVertices { first: ids(cu), second: ids(cv) });
                }
            }
        }
    }

    GeneralPositionReport { violations }
}
