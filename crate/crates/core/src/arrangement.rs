//! Arrangement of disk boundary circles.
//!
//! Every circle is split into arcs at its crossing points, arc ends are
//! ordered around each vertex by tangent direction, face cycles are traced
//! from the resulting half-edges, and depths are assigned by a traversal from
//! the unbounded face: crossing an arc into its circle adds one.
//!
//! Circles in different connected components never cross, so each
//! component's outer boundary cycle is attached to the face that encloses
//! it by shooting a ray leftwards from the component's leftmost point.
//!
//! Indices stored here (`Arc::circle`, `ArrangementVertex::circles`, cover
//! lists) refer to positions in [`Arrangement::disks`]; use
//! [`Arrangement::disk_id`] to translate to instance ids.

use std::collections::HashMap;
use std::f64::consts::{PI, TAU};

use crate::broadphase::{self, BoundaryGrid};
use crate::geometry::{
    circle_intersection_points_tol, instance_scale, validate_general_position, BoundingBox, Disk,
    GeometryError, Point, TOLERANCE,
};
use crate::graph::{edge, DisjointSet, Edge};

pub type VertexId = usize;
pub type ArcId = usize;
pub type FaceId = usize;

/// The unbounded face always has id 0.
pub const UNBOUNDED_FACE: FaceId = 0;

#[derive(Debug, Clone, PartialEq)]
pub struct ArrangementVertex {
    pub location: Point,
    /// Local circle indices, ascending.
    pub circles: (usize, usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Arc {
    pub circle: usize,
    /// `(start, end)` in counter-clockwise order; `None` for a full circle.
    pub endpoints: Option<(VertexId, VertexId)>,
    pub start_angle: f64,
    /// Always greater than `start_angle`; may exceed `pi`.
    pub end_angle: f64,
    /// Face on the disk side of the arc.
    pub inside: FaceId,
    pub outside: FaceId,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FaceKind {
    Unbounded,
    Bounded,
    /// Deeper than the cap; member of the given hole region.
    Hole(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Face {
    pub id: FaceId,
    /// A point strictly inside the face.
    pub representative: Point,
    pub depth: usize,
    pub adjacent: Vec<FaceId>,
    pub arcs: Vec<ArcId>,
    pub kind: FaceKind,
}

/// Entity counts of the (possibly capped) arrangement. Hole regions count
/// as one face each.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Complexity {
    pub vertices: usize,
    pub arcs: usize,
    pub faces: usize,
    pub holes: usize,
}

/// A disk pair together with a common point of bounded depth.
#[derive(Debug, Clone, PartialEq)]
pub struct WitnessedEdge {
    /// Disk ids, ascending.
    pub pair: Edge,
    pub witness: Point,
    pub depth: usize,
}

#[derive(Debug, Clone)]
pub struct Arrangement {
    disks: Vec<Disk>,
    vertices: Vec<ArrangementVertex>,
    arcs: Vec<Arc>,
    faces: Vec<Face>,
    cap: Option<usize>,
    holes: Vec<Vec<FaceId>>,
    arcs_by_circle: Vec<Vec<ArcId>>,
    /// Arc through which each face is first reached from the unbounded face.
    parent_arc: Vec<Option<ArcId>>,
    children: Vec<Vec<FaceId>>,
    components: usize,
    tolerance: f64,
}

/// Builds the arrangement of the boundary circles of `disks`. With
/// `cap = Some(k)`, faces deeper than `k` are grouped into hole regions.
pub fn build_arrangement(disks: &[Disk], cap: Option<usize>) -> Result<Arrangement, GeometryError> {
    let report = validate_general_position(disks);
    if !report.is_ok() {
        return Err(GeometryError::GeneralPosition(report));
    }
    Ok(Arrangement::build_unchecked(disks, cap))
}

/// Number of faces of the arrangement of `n` circles is at most this.
pub fn face_bound(n: usize) -> usize {
    if n == 0 {
        1
    } else {
        n * n - n + 2
    }
}

impl Arrangement {
    fn build_unchecked(disks: &[Disk], cap: Option<usize>) -> Arrangement {
        let n = disks.len();
        let tolerance = TOLERANCE * instance_scale(disks);

        // Crossing points.
        let mut vertices = Vec::new();
        let mut on_circle: Vec<Vec<(f64, VertexId)>> = vec![Vec::new(); n];
        let mut crossing = DisjointSet::new(n);
        for (i, j) in broadphase::overlapping_pairs(disks, 0.0) {
            if !disks[i].crosses(&disks[j]) {
                continue;
            }
            let points = circle_intersection_points_tol(&disks[i], &disks[j], tolerance)
                .expect("general position was validated");
            crossing.union(i, j);
            for p in points {
                let v = vertices.len();
                vertices.push(ArrangementVertex { location: p, circles: (i, j) });
                on_circle[i].push((disks[i].angle_of(p), v));
                on_circle[j].push((disks[j].angle_of(p), v));
            }
        }

        // Split circles into arcs. `ends[v]` holds, per incident circle, the
        // arc leaving v counter-clockwise and the arc arriving at v.
        let mut arcs = Vec::new();
        let mut arcs_by_circle = vec![Vec::new(); n];
        let mut ends: Vec<Vec<(usize, ArcId, ArcId)>> = vec![Vec::with_capacity(2); vertices.len()];
        for (c, list) in on_circle.iter_mut().enumerate() {
            if list.is_empty() {
                arcs_by_circle[c].push(arcs.len());
                arcs.push(Arc {
                    circle: c,
                    endpoints: None,
                    start_angle: -PI,
                    end_angle: PI,
                    inside: 0,
                    outside: 0,
                });
                continue;
            }
            list.sort_by(|a, b| a.0.total_cmp(&b.0));
            let m = list.len();
            let first = arcs.len();
            for k in 0..m {
                let (theta, v) = list[k];
                let (next_theta, w) = list[(k + 1) % m];
                let end_angle = if k + 1 == m { next_theta + TAU } else { next_theta };
                arcs_by_circle[c].push(arcs.len());
                arcs.push(Arc {
                    circle: c,
                    endpoints: Some((v, w)),
                    start_angle: theta,
                    end_angle,
                    inside: 0,
                    outside: 0,
                });
            }
            for k in 0..m {
                let v = list[k].1;
                let out_arc = first + k;
                let in_arc = first + (k + m - 1) % m;
                ends[v].push((c, out_arc, in_arc));
            }
        }

        // Half-edge 2a runs counter-clockwise along arc a (disk on its left),
        // 2a + 1 runs clockwise (exterior on its left).
        let he_count = 2 * arcs.len();
        let mut next = vec![usize::MAX; he_count];
        for (a, arc) in arcs.iter().enumerate() {
            if arc.endpoints.is_none() {
                next[2 * a] = 2 * a;
                next[2 * a + 1] = 2 * a + 1;
            }
        }
        for (v, vertex) in vertices.iter().enumerate() {
            let p = vertex.location;
            let mut outgoing: Vec<(f64, usize)> = Vec::with_capacity(4);
            for &(c, out_arc, in_arc) in &ends[v] {
                let tx = -(p.y - disks[c].center.y);
                let ty = p.x - disks[c].center.x;
                outgoing.push((ty.atan2(tx), 2 * out_arc));
                outgoing.push(((-ty).atan2(-tx), 2 * in_arc + 1));
            }
            outgoing.sort_by(|a, b| a.0.total_cmp(&b.0));
            let k = outgoing.len();
            for idx in 0..k {
                // Incoming half-edge whose twin is outgoing[idx]; its successor
                // is the next outgoing half-edge clockwise.
                let twin = outgoing[idx].1;
                let incoming = twin ^ 1;
                next[incoming] = outgoing[(idx + k - 1) % k].1;
            }
        }

        // Boundary cycles.
        let mut cycle_of = vec![usize::MAX; he_count];
        let mut cycles = 0;
        for start in 0..he_count {
            if cycle_of[start] != usize::MAX {
                continue;
            }
            let mut he = start;
            loop {
                cycle_of[he] = cycles;
                he = next[he];
                if he == start {
                    break;
                }
            }
            cycles += 1;
        }

        let builder = Builder { disks, arcs: &arcs, arcs_by_circle: &arcs_by_circle };
        let component: Vec<usize> = (0..n).map(|c| crossing.find(c)).collect();

        // Attach each component's outer cycle to the face enclosing it.
        let unbounded_node = cycles;
        let mut merge = DisjointSet::new(cycles + 1);
        let mut leftmost: HashMap<usize, usize> = HashMap::new();
        for c in 0..n {
            let root = component[c];
            let entry = leftmost.entry(root).or_insert(c);
            let key = |d: &Disk| d.center.x - d.radius;
            if key(&disks[c]) < key(&disks[*entry]) {
                *entry = c;
            }
        }
        let mut roots: Vec<(usize, usize)> = leftmost.into_iter().collect();
        roots.sort_unstable();
        let components = roots.len();
        for &(root, c) in &roots {
            let d = &disks[c];
            let outer_he = 2 * builder.arc_at_angle(c, PI) + 1;
            let probe = Point::new(d.center.x - d.radius, d.center.y);
            let target = match builder.ray_left(probe, |k| component[k] == root) {
                None => unbounded_node,
                Some((k, hit)) => cycle_of[builder.half_edge_east_of(k, hit)],
            };
            merge.union(cycle_of[outer_he], target);
        }

        // Face ids: unbounded first, then in cycle order.
        let mut face_of_root = vec![usize::MAX; cycles + 1];
        let unbounded_root = merge.find(unbounded_node);
        face_of_root[unbounded_root] = UNBOUNDED_FACE;
        let mut face_count = 1;
        let mut face_of_cycle = vec![0; cycles];
        for (cyc, slot) in face_of_cycle.iter_mut().enumerate() {
            let r = merge.find(cyc);
            if face_of_root[r] == usize::MAX {
                face_of_root[r] = face_count;
                face_count += 1;
            }
            *slot = face_of_root[r];
        }
        for (a, arc) in arcs.iter_mut().enumerate() {
            arc.inside = face_of_cycle[cycle_of[2 * a]];
            arc.outside = face_of_cycle[cycle_of[2 * a + 1]];
        }

        // Faces, adjacency and depths by breadth-first search.
        let mut faces: Vec<Face> = (0..face_count)
            .map(|id| Face {
                id,
                representative: Point::default(),
                depth: 0,
                adjacent: Vec::new(),
                arcs: Vec::new(),
                kind: if id == UNBOUNDED_FACE { FaceKind::Unbounded } else { FaceKind::Bounded },
            })
            .collect();
        for (a, arc) in arcs.iter().enumerate() {
            faces[arc.inside].arcs.push(a);
            faces[arc.outside].arcs.push(a);
            faces[arc.inside].adjacent.push(arc.outside);
            faces[arc.outside].adjacent.push(arc.inside);
        }
        for f in &mut faces {
            f.adjacent.sort_unstable();
            f.adjacent.dedup();
        }
        let mut parent_arc = vec![None; face_count];
        let mut children = vec![Vec::new(); face_count];
        let mut visited = vec![false; face_count];
        visited[UNBOUNDED_FACE] = true;
        let mut queue = std::collections::VecDeque::from([UNBOUNDED_FACE]);
        while let Some(f) = queue.pop_front() {
            let depth = faces[f].depth;
            for i in 0..faces[f].arcs.len() {
                let a = faces[f].arcs[i];
                let arc = &arcs[a];
                let (g, gd) = if arc.outside == f {
                    (arc.inside, depth + 1)
                } else {
                    (arc.outside, depth.wrapping_sub(1))
                };
                if !visited[g] {
                    visited[g] = true;
                    faces[g].depth = gd;
                    parent_arc[g] = Some(a);
                    children[f].push(g);
                    queue.push_back(g);
                } else {
                    debug_assert_eq!(faces[g].depth, gd, "inconsistent depth across arc {a}");
                }
            }
        }
        debug_assert!(visited.iter().all(|&v| v), "face graph must be connected");

        // Representatives: step off the arc with the most clearance.
        let grid = BoundaryGrid::new(disks, tolerance);
        let far = BoundingBox::of_disks(disks)
            .map(|b| b.min.offset(-b.extent() - 1.0, -b.extent() - 1.0))
            .unwrap_or_default();
        faces[UNBOUNDED_FACE].representative = far;
        for f in 1..face_count {
            let mut best: Option<(f64, Point)> = None;
            for &a in faces[f].arcs.iter().take(12) {
                let arc = &arcs[a];
                let d = &disks[arc.circle];
                let mid = 0.5 * (arc.start_angle + arc.end_angle);
                let on = d.point_at(mid);
                let step = (0.5 * grid.clearance(disks, on, arc.circle)).min(0.5 * d.radius);
                let sign = if arc.inside == f { -1.0 } else { 1.0 };
                let p = Point::new(on.x + sign * step * mid.cos(), on.y + sign * step * mid.sin());
                if best.is_none_or(|(s, _)| step > s) {
                    best = Some((step, p));
                }
                if step >= 0.05 * grid.cell_size() {
                    break;
                }
            }
            faces[f].representative = best.expect("bounded face has a boundary arc").1;
        }

        let mut arr = Arrangement {
            disks: disks.to_vec(),
            vertices,
            arcs,
            faces,
            cap: None,
            holes: Vec::new(),
            arcs_by_circle,
            parent_arc,
            children,
            components,
            tolerance,
        };
        if let Some(k) = cap {
            arr.apply_cap(k);
        }
        arr
    }

    fn apply_cap(&mut self, k: usize) {
        self.cap = Some(k);
        let count = self.faces.len();
        let mut dsu = DisjointSet::new(count);
        for f in &self.faces {
            if f.depth > k {
                for &g in &f.adjacent {
                    if self.faces[g].depth > k {
                        dsu.union(f.id, g);
                    }
                }
            }
        }
        let mut hole_of_root: HashMap<usize, usize> = HashMap::new();
        for f in 0..count {
            if self.faces[f].depth > k {
                let r = dsu.find(f);
                let next = self.holes.len();
                let h = *hole_of_root.entry(r).or_insert(next);
                if h == self.holes.len() {
                    self.holes.push(Vec::new());
                }
                self.holes[h].push(f);
                self.faces[f].kind = FaceKind::Hole(h);
            }
        }
    }

    pub fn disks(&self) -> &[Disk] {
        &self.disks
    }

    pub fn disk_id(&self, local: usize) -> usize {
        self.disks[local].id
    }

    pub fn vertices(&self) -> &[ArrangementVertex] {
        &self.vertices
    }

    pub fn arcs(&self) -> &[Arc] {
        &self.arcs
    }

    pub fn faces(&self) -> &[Face] {
        &self.faces
    }

    pub fn face(&self, id: FaceId) -> &Face {
        &self.faces[id]
    }

    pub fn cap(&self) -> Option<usize> {
        self.cap
    }

    /// Hole regions of a capped arrangement, each a list of merged faces.
    pub fn holes(&self) -> &[Vec<FaceId>] {
        &self.holes
    }

    /// Connected components of the union of circles (crossing relation).
    pub fn component_count(&self) -> usize {
        self.components
    }

    pub fn tolerance(&self) -> f64 {
        self.tolerance
    }

    pub fn max_depth(&self) -> usize {
        self.faces.iter().map(|f| f.depth).max().unwrap_or(0)
    }

    /// Depth of an arc's points (closed disks: the deeper side).
    pub fn arc_depth(&self, a: ArcId) -> usize {
        self.faces[self.arcs[a].inside].depth
    }

    /// Depth at a vertex: the face inside both circles.
    pub fn vertex_depth(&self, v: VertexId) -> usize {
        let (c, _) = self.vertices[v].circles;
        self.arcs_by_circle[c]
            .iter()
            .filter(|&&a| matches!(self.arcs[a].endpoints, Some((s, e)) if s == v || e == v))
            .map(|&a| self.arc_depth(a))
            .max()
            .unwrap_or(0)
    }

    /// Entity counts, restricted to depth ≤ cap when capped.
    pub fn complexity(&self) -> Complexity {
        let k = self.cap.unwrap_or(usize::MAX);
        let vertices = (0..self.vertices.len()).filter(|&v| self.vertex_depth(v) <= k).count();
        let arcs = self
            .arcs
            .iter()
            .filter(|a| self.faces[a.inside].depth <= k || self.faces[a.outside].depth <= k)
            .count();
        let regular = self.faces.iter().filter(|f| f.depth <= k).count();
        Complexity { vertices, arcs, faces: regular + self.holes.len(), holes: self.holes.len() }
    }

    /// Visits every face with its covering set (local indices, unordered).
    pub fn visit_covers<F: FnMut(&Face, &[usize])>(&self, mut visit: F) {
        let n = self.disks.len();
        let mut members: Vec<usize> = Vec::new();
        let mut pos = vec![usize::MAX; n];
        let toggle = |c: usize, add: bool, members: &mut Vec<usize>, pos: &mut Vec<usize>| {
            if add {
                pos[c] = members.len();
                members.push(c);
            } else {
                let i = pos[c];
                let last = members.pop().expect("removing from empty cover");
                if last != c {
                    members[i] = last;
                    pos[last] = i;
                }
                pos[c] = usize::MAX;
            }
        };
        let mut stack: Vec<(FaceId, bool)> = vec![(UNBOUNDED_FACE, false)];
        while let Some((f, leaving)) = stack.pop() {
            let via = self.parent_arc[f].map(|a| (self.arcs[a].circle, self.arcs[a].inside == f));
            if leaving {
                if let Some((c, entered_inside)) = via {
                    toggle(c, !entered_inside, &mut members, &mut pos);
                }
                continue;
            }
            if let Some((c, entered_inside)) = via {
                toggle(c, entered_inside, &mut members, &mut pos);
            }
            visit(&self.faces[f], &members);
            stack.push((f, true));
            for &g in self.children[f].iter().rev() {
                stack.push((g, false));
            }
        }
    }

    /// Covering set of one face (local indices, ascending).
    pub fn face_cover(&self, f: FaceId) -> Vec<usize> {
        let mut inside = vec![false; self.disks.len()];
        let mut path = Vec::new();
        let mut cur = f;
        while let Some(a) = self.parent_arc[cur] {
            path.push(a);
            let arc = &self.arcs[a];
            cur = if arc.inside == cur { arc.outside } else { arc.inside };
        }
        // Walk from the unbounded face down to f.
        let mut at = cur;
        for &a in path.iter().rev() {
            let arc = &self.arcs[a];
            let to = if arc.inside == at { arc.outside } else { arc.inside };
            inside[arc.circle] = to == arc.inside;
            at = to;
        }
        (0..inside.len()).filter(|&c| inside[c]).collect()
    }

    /// Circles whose disk side bounds the face.
    pub fn inner_boundary_circles(&self, f: FaceId) -> Vec<usize> {
        let mut circles: Vec<usize> = self.faces[f]
            .arcs
            .iter()
            .filter(|&&a| self.arcs[a].inside == f)
            .map(|&a| self.arcs[a].circle)
            .collect();
        circles.sort_unstable();
        circles.dedup();
        circles
    }

    /// The face containing `p`. Points within tolerance of a circle are rejected.
    pub fn face_at(&self, p: Point) -> Result<FaceId, GeometryError> {
        if let Some(d) = self.disks.iter().find(|d| d.boundary_distance(p) <= self.tolerance) {
            return Err(GeometryError::BoundaryQuery { circle: d.id });
        }
        let builder = Builder { disks: &self.disks, arcs: &self.arcs, arcs_by_circle: &self.arcs_by_circle };
        Ok(match builder.ray_left(p, |_| false) {
            None => UNBOUNDED_FACE,
            Some((k, hit)) => {
                let he = builder.half_edge_east_of(k, hit);
                let arc = &self.arcs[he / 2];
                if he.is_multiple_of(2) {
                    arc.inside
                } else {
                    arc.outside
                }
            }
        })
    }

    /// Pairs with a common point of depth ≤ `k` (disk ids), each with its
    /// shallowest witness. `accept` filters candidate pairs by local index.
    fn shallow_pairs(&self, k: usize, accept: impl Fn(usize, usize) -> bool) -> Vec<WitnessedEdge> {
        // A pair's shallowest face f inside both disks has no boundary arc on
        // the disk side of any third circle (stepping across it would be
        // shallower and still inside both). So faces with three or more such
        // circles emit nothing, and the rest emit only pairs containing them.
        let mut best: HashMap<(u32, u32), (u32, u32)> = HashMap::new();
        let mut offer = |a: usize, b: usize, depth: usize, face: FaceId| {
            if !accept(a, b) {
                return;
            }
            let key = if a < b { (a as u32, b as u32) } else { (b as u32, a as u32) };
            let cand = (depth as u32, face as u32);
            best.entry(key).and_modify(|cur| *cur = (*cur).min(cand)).or_insert(cand);
        };
        let mut inner = Vec::with_capacity(4);
        self.visit_covers(|face, cover| {
            let d = cover.len();
            if d < 2 || d > k {
                return;
            }
            inner.clear();
            for &a in &face.arcs {
                let arc = &self.arcs[a];
                if arc.inside == face.id && !inner.contains(&arc.circle) {
                    inner.push(arc.circle);
                    if inner.len() > 2 {
                        return;
                    }
                }
            }
            match inner[..] {
                [a, b] => offer(a, b, d, face.id),
                [a] => {
                    for &b in cover {
                        if b != a {
                            offer(a, b, d, face.id);
                        }
                    }
                }
                _ => {
                    for (i, &a) in cover.iter().enumerate() {
                        for &b in &cover[i + 1..] {
                            offer(a, b, d, face.id);
                        }
                    }
                }
            }
        });
        let mut out: Vec<WitnessedEdge> = best
            .into_iter()
            .map(|((a, b), (depth, face))| WitnessedEdge {
                pair: edge(self.disks[a as usize].id, self.disks[b as usize].id),
                witness: self.faces[face as usize].representative,
                depth: depth as usize,
            })
            .collect();
        out.sort_by_key(|x| x.pair);
        out
    }

    /// k-shallow edges of this arrangement's disks.
    pub fn shallow_edges(&self, k: usize) -> Vec<WitnessedEdge> {
        self.shallow_pairs(k, |_, _| true)
    }
}

/// Geometry helpers shared by construction and point location.
struct Builder<'a> {
    disks: &'a [Disk],
    arcs: &'a [Arc],
    arcs_by_circle: &'a [Vec<ArcId>],
}

impl Builder<'_> {
    fn arc_at_angle(&self, c: usize, theta: f64) -> ArcId {
        let list = &self.arcs_by_circle[c];
        let first = self.arcs[list[0]].start_angle;
        let theta = if theta < first { theta + TAU } else { theta };
        let idx = list.partition_point(|&a| self.arcs[a].start_angle <= theta);
        list[idx.saturating_sub(1)]
    }

    /// Nearest circle crossing of the leftward horizontal ray from `p`,
    /// ignoring circles for which `skip` holds.
    fn ray_left(&self, p: Point, skip: impl Fn(usize) -> bool) -> Option<(usize, Point)> {
        let mut best: Option<(usize, f64)> = None;
        for (k, d) in self.disks.iter().enumerate() {
            let dy = p.y - d.center.y;
            if dy.abs() >= d.radius || skip(k) {
                continue;
            }
            let s = (d.radius * d.radius - dy * dy).sqrt();
            for x in [d.center.x + s, d.center.x - s] {
                if x < p.x && best.is_none_or(|(_, bx)| x > bx) {
                    best = Some((k, x));
                }
            }
        }
        best.map(|(k, x)| (k, Point::new(x, p.y)))
    }

    /// Half-edge on circle `k` at `hit` whose left side faces +x.
    fn half_edge_east_of(&self, k: usize, hit: Point) -> usize {
        let d = &self.disks[k];
        let a = self.arc_at_angle(k, d.angle_of(hit));
        if hit.x > d.center.x {
            2 * a + 1
        } else {
            2 * a
        }
    }
}

/// The k-shallow edges of the intersection graph of `disks`.
pub fn shallow_edges(disks: &[Disk], k: usize) -> Result<Vec<WitnessedEdge>, GeometryError> {
    Ok(build_arrangement(disks, None)?.shallow_edges(k))
}

/// Edges between `left` and `right` with a witness of depth ≤ `k`, where
/// depth counts disks of both sides.
pub fn shallow_edges_bipartite(
    left: &[Disk],
    right: &[Disk],
    k: usize,
) -> Result<Vec<WitnessedEdge>, GeometryError> {
    let ids: std::collections::HashSet<usize> = left.iter().map(|d| d.id).collect();
    if let Some(d) = right.iter().find(|d| ids.contains(&d.id)) {
        return Err(GeometryError::OverlappingSides(d.id));
    }
    let union: Vec<Disk> = left.iter().chain(right).copied().collect();
    let split = left.len();
    let arr = build_arrangement(&union, None)?;
    Ok(arr.shallow_pairs(k, |a, b| (a < split) != (b < split)))
}

/// Minimum depth over the closed lens of `a` and `b`, with a point attaining it.
///
/// Brute force: evaluates depth at points perturbed off every crossing point
/// inside the lens into each of its four quadrants, plus a few extra probes,
/// which meets every face of the arrangement that can attain the minimum.
pub fn min_depth_in_lens(a: &Disk, b: &Disk, disks: &[Disk]) -> Result<(usize, Point), GeometryError> {
    if !a.intersects(b) {
        return Err(GeometryError::NotIntersecting { a: a.id, b: b.id });
    }
    let scale = instance_scale(disks);
    let tol = TOLERANCE * scale;
    let mut relevant: Vec<Disk> = vec![*a, *b];
    relevant.extend(disks.iter().filter(|d| d.id != a.id && d.id != b.id && d.intersects(a) && d.intersects(b)));
    let in_lens = |p: Point| a.contains(p) && b.contains(p);
    let near_lens = |p: Point| a.center.dist(p) <= a.radius + tol && b.center.dist(p) <= b.radius + tol;

    let clearance = |p: Point, skip: &[usize]| {
        relevant
            .iter()
            .filter(|d| !skip.contains(&d.id))
            .map(|d| d.boundary_distance(p))
            .fold(f64::INFINITY, f64::min)
    };

    let mut probes: Vec<Point> = Vec::new();
    for i in 0..relevant.len() {
        for j in i + 1..relevant.len() {
            let (c, d) = (&relevant[i], &relevant[j]);
            let Ok(points) = circle_intersection_points_tol(c, d, tol) else { continue };
            for v in points {
                if !near_lens(v) {
                    continue;
                }
                let nc = ((v.x - c.center.x) / c.radius, (v.y - c.center.y) / c.radius);
                let nd = ((v.x - d.center.x) / d.radius, (v.y - d.center.y) / d.radius);
                let sum = (nc.0 + nd.0).hypot(nc.1 + nd.1);
                let diff = (nc.0 - nd.0).hypot(nc.1 - nd.1);
                let margin = 0.5 * sum.min(diff);
                let step = (0.25 * c.radius.min(d.radius) * margin)
                    .min(0.5 * clearance(v, &[c.id, d.id]))
                    .min(1e-3 * scale);
                for (sc, sd) in [(1.0, 1.0), (1.0, -1.0), (-1.0, 1.0), (-1.0, -1.0)] {
                    // Positive sign moves toward that circle's interior.
                    let ux = -(sc * nc.0 + sd * nd.0);
                    let uy = -(sc * nc.1 + sd * nd.1);
                    let len = ux.hypot(uy);
                    probes.push(Point::new(v.x + step * ux / len, v.y + step * uy / len));
                }
            }
        }
    }
    for d in [a, b] {
        let on = d.point_at(0.0);
        let step = (0.5 * clearance(on, &[d.id])).min(0.5 * d.radius);
        probes.push(on.offset(-step, 0.0));
        probes.push(d.center);
    }
    if let Ok(points) = circle_intersection_points_tol(a, b, tol) {
        if points.len() == 2 {
            probes.push(Point::new(0.5 * (points[0].x + points[1].x), 0.5 * (points[0].y + points[1].y)));
        }
    }

    probes
        .into_iter()
        .filter(|&p| in_lens(p))
        .map(|p| (crate::geometry::depth_at(p, disks), p))
        .min_by_key(|&(depth, _)| depth)
        .ok_or(GeometryError::NotIntersecting { a: a.id, b: b.id })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::depth_at;

    fn disk(id: usize, x: f64, y: f64, r: f64) -> Disk {
        Disk::new(Point::new(x, y), r, id).unwrap()
    }

    #[test]
    fn single_disk() {
        let arr = build_arrangement(&[disk(0, 0.0, 0.0, 1.0)], None).unwrap();
        assert_eq!(arr.faces().len(), 2);
        assert_eq!(arr.vertices().len(), 0);
        assert_eq!(arr.arcs().len(), 1);
        assert!(arr.arcs()[0].endpoints.is_none());
        let mut depths: Vec<usize> = arr.faces().iter().map(|f| f.depth).collect();
        depths.sort_unstable();
        assert_eq!(depths, vec![0, 1]);
        assert_eq!(arr.face(UNBOUNDED_FACE).kind, FaceKind::Unbounded);
    }

    #[test]
    fn lens_figure() {
        let arr = build_arrangement(&[disk(0, 0.0, 0.0, 1.0), disk(1, 1.0, 0.0, 1.0)], None).unwrap();
        assert_eq!(arr.vertices().len(), 2);
        assert_eq!(arr.arcs().len(), 4);
        let mut depths: Vec<usize> = arr.faces().iter().map(|f| f.depth).collect();
        depths.sort_unstable();
        assert_eq!(depths, vec![0, 1, 1, 2]);
        let deep = arr.face_at(Point::new(0.5, 0.0)).unwrap();
        assert_eq!(arr.face(deep).depth, 2);
        assert_eq!(arr.face_at(Point::new(50.0, 50.0)).unwrap(), UNBOUNDED_FACE);
        assert!(matches!(arr.face_at(Point::new(2.0, 0.0)), Err(GeometryError::BoundaryQuery { circle: 1 })));
    }

    #[test]
    fn nested_components_attach_to_enclosing_face() {
        // A ring of two crossing disks floating inside a big disk, plus a
        // separate disk outside.
        let disks = vec![
            disk(0, 0.0, 0.0, 10.0),
            disk(1, -1.0, 0.0, 1.5),
            disk(2, 1.0, 0.3, 1.5),
            disk(3, 30.0, 0.0, 1.0),
        ];
        let arr = build_arrangement(&disks, None).unwrap();
        assert_eq!(arr.component_count(), 3);
        for f in arr.faces() {
            assert_eq!(depth_at(f.representative, &disks), f.depth, "face {}", f.id);
            assert_eq!(arr.face_at(f.representative).unwrap(), f.id);
        }
        // Outside, big disk annulus, two crescents, lens, disk 3.
        assert_eq!(arr.faces().len(), 6);
        let annulus = arr.face_at(Point::new(0.0, 8.0)).unwrap();
        assert_eq!(arr.face(annulus).depth, 1);
        assert!(arr.face(annulus).adjacent.len() >= 3);
    }

    #[test]
    fn covers_match_brute_force() {
        let disks = vec![
            disk(0, 0.0, 0.0, 1.0),
            disk(1, 0.9, 0.1, 1.1),
            disk(2, 0.4, 0.8, 0.7),
            disk(3, 0.3, 0.2, 0.2),
        ];
        let arr = build_arrangement(&disks, None).unwrap();
        let mut seen = 0;
        arr.visit_covers(|face, cover| {
            let mut cover = cover.to_vec();
            cover.sort_unstable();
            let brute = crate::geometry::covering_ids(face.representative, &disks);
            assert_eq!(cover, brute);
            assert_eq!(arr.face_cover(face.id), brute);
            seen += 1;
        });
        assert_eq!(seen, arr.faces().len());
    }

    #[test]
    fn capped_arrangement_groups_deep_faces() {
        let disks = vec![disk(0, 0.0, 0.0, 1.0), disk(1, 0.7, 0.0, 1.0), disk(2, 0.35, 0.6, 1.0)];
        let arr = build_arrangement(&disks, Some(1)).unwrap();
        assert_eq!(arr.cap(), Some(1));
        assert_eq!(arr.holes().len(), 1);
        let c = arr.complexity();
        assert_eq!(c.faces, 1 + 3 + 1);
        assert_eq!(c.holes, 1);
        let full = build_arrangement(&disks, None).unwrap().complexity();
        assert_eq!(full.faces, 8);
        assert_eq!(full.vertices, 6);
    }

    #[test]
    fn shallow_edge_examples() {
        let apart = [disk(0, 0.0, 0.0, 1.0), disk(1, 5.0, 0.0, 1.0)];
        assert!(shallow_edges(&apart, 5).unwrap().is_empty());

        let lens = [disk(0, 0.0, 0.0, 1.0), disk(1, 1.0, 0.0, 1.0)];
        let edges = shallow_edges(&lens, 2).unwrap();
        assert_eq!(edges.len(), 1);
        assert_eq!(edges[0].pair, (0, 1));
        assert_eq!(edges[0].depth, 2);
        assert!(lens[0].contains(edges[0].witness) && lens[1].contains(edges[0].witness));
        assert!(shallow_edges(&lens, 1).unwrap().is_empty());

        let edges = shallow_edges_bipartite(&lens[..1], &lens[1..], 2).unwrap();
        assert_eq!(edges.len(), 1);
        assert!(matches!(
            shallow_edges_bipartite(&lens, &lens[1..], 2),
            Err(GeometryError::OverlappingSides(1))
        ));
    }

    #[test]
    fn lens_min_depth_examples() {
        let a = disk(0, 0.0, 0.0, 1.0);
        let b = disk(1, 1.0, 0.0, 1.0);
        let (depth, w) = min_depth_in_lens(&a, &b, &[a, b]).unwrap();
        assert_eq!(depth, 2);
        assert!(a.contains(w) && b.contains(w));

        let giant = disk(2, 0.5, 0.0, 10.0);
        assert_eq!(min_depth_in_lens(&a, &b, &[a, b, giant]).unwrap().0, 3);

        let far = disk(3, 9.0, 0.0, 1.0);
        assert!(matches!(min_depth_in_lens(&a, &far, &[a, far]), Err(GeometryError::NotIntersecting { .. })));
    }

    #[test]
    fn rejects_degenerate_input() {
        let tangent = [disk(0, 0.0, 0.0, 1.0), disk(1, 2.0, 0.0, 1.0)];
        match build_arrangement(&tangent, None) {
            Err(GeometryError::GeneralPosition(report)) => {
                assert_eq!(report.offending_disks().into_iter().collect::<Vec<_>>(), vec![0, 1])
            }
            other => panic!("expected general-position error, got {other:?}"),
        }
    }
}
