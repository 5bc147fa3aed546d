//! Attack sets, safe zones and end-to-end verification of a spanner
//! against vertex deletions.

use std::collections::{BTreeSet, HashMap};
use std::fmt::{self, Write as _};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rand::seq::index;
use rand::Rng;
use thiserror::Error;

use crate::arrangement::{build_arrangement, Arrangement, FaceId};
use crate::geometry::{covering_ids, DiskInstance, GeometryError, Point};
use crate::graph::{components_after_attack, ComponentLabels, DisjointSet, Graph};
use crate::rng::{substream, Purpose};
use crate::sparsifier::SpannerConfig;

/// Slack for the safety inequality.
const SAFETY_SLACK: f64 = 1e-9;
/// Counterexamples kept per report.
pub const MAX_COUNTEREXAMPLES: usize = 64;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AttackError {
    #[error("unknown attack strategy `{0}` (expected random_fraction:<rho>, neighborhood_kill:<id>, deepest_point:<count>, ids:<a,b,..>)")]
    UnknownStrategy(String),
    #[error("disk id {id} out of range for {n} disks")]
    InvalidTarget { id: usize, n: usize },
    #[error("fraction must lie in [0, 1], got {0}")]
    InvalidFraction(f64),
    #[error("neighborhood_kill needs a graph")]
    MissingGraph,
    #[error("spanner has {spanner} vertices but the instance has {instance} disks")]
    VertexMismatch { spanner: usize, instance: usize },
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

#[derive(Debug, Clone, PartialEq)]
pub enum Strategy {
    RandomFraction(f64),
    NeighborhoodKill(usize),
    DeepestPoint(usize),
    Ids(Vec<usize>),
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Strategy::RandomFraction(rho) => write!(f, "random_fraction:{rho}"),
            Strategy::NeighborhoodKill(t) => write!(f, "neighborhood_kill:{t}"),
            Strategy::DeepestPoint(c) => write!(f, "deepest_point:{c}"),
            Strategy::Ids(ids) => {
                let list: Vec<String> = ids.iter().map(usize::to_string).collect();
                write!(f, "ids:{}", list.join(","))
            }
        }
    }
}

impl FromStr for Strategy {
    type Err = AttackError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let unknown = || AttackError::UnknownStrategy(s.to_string());
        let (name, arg) = s.split_once(':').unwrap_or((s, ""));
        match name {
            "random_fraction" => arg.parse().map(Strategy::RandomFraction).map_err(|_| unknown()),
            "neighborhood_kill" => arg.parse().map(Strategy::NeighborhoodKill).map_err(|_| unknown()),
            "deepest_point" => arg.parse().map(Strategy::DeepestPoint).map_err(|_| unknown()),
            "ids" if arg.is_empty() => Ok(Strategy::Ids(Vec::new())),
            "ids" => arg
                .split(',')
                .map(|x| x.trim().parse::<usize>())
                .collect::<Result<Vec<_>, _>>()
                .map(Strategy::Ids)
                .map_err(|_| unknown()),
            _ => Err(unknown()),
        }
    }
}

/// Deleted disk ids with the strategy that produced them.
#[derive(Debug, Clone, PartialEq)]
pub struct AttackSet {
    pub deleted: BTreeSet<usize>,
    pub strategy: Strategy,
    pub seed: u64,
}

impl AttackSet {
    pub fn empty() -> Self {
        Self { deleted: BTreeSet::new(), strategy: Strategy::Ids(Vec::new()), seed: 0 }
    }

    pub fn from_ids(ids: impl IntoIterator<Item = usize>) -> Self {
        let deleted: BTreeSet<usize> = ids.into_iter().collect();
        Self { strategy: Strategy::Ids(deleted.iter().copied().collect()), deleted, seed: 0 }
    }

    pub fn len(&self) -> usize {
        self.deleted.len()
    }

    pub fn is_empty(&self) -> bool {
        self.deleted.is_empty()
    }

    /// Strategy and seed header lines, then one id per line.
    pub fn to_text(&self) -> String {
        let mut s = format!("# strategy: {}\n# seed: {}\n", self.strategy, self.seed);
        for id in &self.deleted {
            let _ = writeln!(s, "{id}");
        }
        s
    }

    /// Parses the attack file format; ids must be below `n`.
    pub fn parse(text: &str, n: usize) -> Result<Self, AttackError> {
        let mut strategy = None;
        let mut seed = 0;
        let mut deleted = BTreeSet::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if let Some(rest) = line.strip_prefix('#') {
                if let Some((k, v)) = rest.trim().split_once(": ") {
                    match k.trim() {
                        "strategy" => strategy = Some(v.trim().parse::<Strategy>()?),
                        "seed" => {
                            seed = v.trim().parse().map_err(|_| AttackError::Parse { line: i + 1, msg: "bad seed".into() })?
                        }
                        _ => {}
                    }
                }
                continue;
            }
            if line.is_empty() {
                continue;
            }
            let id: usize = line
                .parse()
                .map_err(|_| AttackError::Parse { line: i + 1, msg: format!("bad disk id `{line}`") })?;
            if id >= n {
                return Err(AttackError::InvalidTarget { id, n });
            }
            deleted.insert(id);
        }
        let strategy = strategy.unwrap_or_else(|| Strategy::Ids(deleted.iter().copied().collect()));
        Ok(Self { deleted, strategy, seed })
    }
}

/// Builds an attack. `graph` is consulted only by `neighborhood_kill`.
pub fn generate_attack(
    instance: &DiskInstance,
    strategy: &Strategy,
    graph: Option<&Graph>,
    seed: u64,
) -> Result<AttackSet, AttackError> {
    let n = instance.len();
    let mut rng = substream(seed, Purpose::Attack, 0, 0);
    let check = |id: usize| if id < n { Ok(id) } else { Err(AttackError::InvalidTarget { id, n }) };
    let deleted: BTreeSet<usize> = match strategy {
        Strategy::RandomFraction(rho) => {
            if !(0.0..=1.0).contains(rho) {
                return Err(AttackError::InvalidFraction(*rho));
            }
            (0..n).filter(|_| rng.gen_bool(*rho)).collect()
        }
        Strategy::NeighborhoodKill(target) => {
            let graph = graph.ok_or(AttackError::MissingGraph)?;
            check(*target)?;
            if graph.vertex_count() != n {
                return Err(AttackError::VertexMismatch { spanner: graph.vertex_count(), instance: n });
            }
            graph.adjacency()[*target].iter().copied().collect()
        }
        Strategy::DeepestPoint(count) => {
            if n == 0 {
                BTreeSet::new()
            } else {
                let arr = build_arrangement(instance.disks(), None)?;
                let deepest = arr.faces().iter().max_by_key(|f| (f.depth, std::cmp::Reverse(f.id))).expect("faces");
                let cover: Vec<usize> = arr.face_cover(deepest.id).into_iter().map(|c| arr.disk_id(c)).collect();
                let take = (*count).min(cover.len());
                index::sample(&mut rng, cover.len(), take).into_iter().map(|k| cover[k]).collect()
            }
        }
        Strategy::Ids(ids) => ids.iter().map(|&id| check(id)).collect::<Result<_, _>>()?,
    };
    Ok(AttackSet { deleted, strategy: strategy.clone(), seed })
}

/// `depth(D - B) >= eps * depth(D)` with uncovered points never safe.
pub fn safe_counts(depth: usize, surviving: usize, eps: f64) -> bool {
    depth > 0 && surviving as f64 + SAFETY_SLACK >= eps * depth as f64
}

pub fn is_safe_point(p: Point, instance: &DiskInstance, deleted: &BTreeSet<usize>, eps: f64) -> bool {
    let cover = covering_ids(p, instance.disks());
    let surviving = cover.iter().filter(|id| !deleted.contains(id)).count();
    safe_counts(cover.len(), surviving, eps)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SafeZoneReport {
    pub eps: f64,
    pub depth: Vec<usize>,
    pub surviving_depth: Vec<usize>,
    pub safe: Vec<bool>,
    /// Safe-zone component per face; `None` for unsafe faces.
    pub component: Vec<Option<usize>>,
    pub component_count: usize,
}

impl SafeZoneReport {
    pub fn safe_faces(&self) -> impl Iterator<Item = FaceId> + '_ {
        (0..self.safe.len()).filter(|&f| self.safe[f])
    }

    /// Faces of each component, ordered by smallest face id.
    pub fn components(&self) -> Vec<Vec<FaceId>> {
        let mut out = vec![Vec::new(); self.component_count];
        for (f, c) in self.component.iter().enumerate() {
            if let Some(c) = c {
                out[*c].push(f);
            }
        }
        out
    }
}

/// Safe faces and their components. Two safe faces are joined across a
/// shared arc; the arc's points are then safe as well, since its covering
/// set equals one of the two faces' covering sets.
pub fn safe_zone_in(arr: &Arrangement, deleted: &BTreeSet<usize>, eps: f64) -> SafeZoneReport {
    let count = arr.faces().len();
    let mut depth = vec![0; count];
    let mut surviving = vec![0; count];
    arr.visit_covers(|face, cover| {
        depth[face.id] = cover.len();
        surviving[face.id] = cover.iter().filter(|&&c| !deleted.contains(&arr.disk_id(c))).count();
    });
    let safe: Vec<bool> = (0..count).map(|f| safe_counts(depth[f], surviving[f], eps)).collect();
    let mut dsu = DisjointSet::new(count);
    for arc in arr.arcs() {
        if safe[arc.inside] && safe[arc.outside] {
            dsu.union(arc.inside, arc.outside);
        }
    }
    let mut label_of_root: HashMap<usize, usize> = HashMap::new();
    let mut component = vec![None; count];
    for f in 0..count {
        if safe[f] {
            let r = dsu.find(f);
            let next = label_of_root.len();
            component[f] = Some(*label_of_root.entry(r).or_insert(next));
        }
    }
    SafeZoneReport { eps, depth, surviving_depth: surviving, safe, component, component_count: label_of_root.len() }
}

pub fn safe_zone(instance: &DiskInstance, deleted: &BTreeSet<usize>, eps: f64) -> Result<SafeZoneReport, AttackError> {
    let arr = build_arrangement(instance.disks(), None)?;
    Ok(safe_zone_in(&arr, deleted, eps))
}

#[derive(Debug, Clone, PartialEq)]
pub struct Counterexample {
    pub face_a: FaceId,
    pub face_b: FaceId,
    pub point_a: Point,
    pub point_b: Point,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComponentVerdict {
    pub component: usize,
    pub faces: usize,
    /// A spanner component reached from every face, if one exists.
    pub common_label: Option<usize>,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerificationReport {
    pub eps: f64,
    pub attack_size: usize,
    pub safe_faces: usize,
    pub components: Vec<ComponentVerdict>,
    pub checked_pairs: u64,
    pub counterexamples: Vec<Counterexample>,
    /// Counterexamples found, including those not kept.
    pub counterexample_total: usize,
    pub spanner_labels: ComponentLabels,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.counterexample_total == 0
    }

    pub fn summary_line(&self) -> String {
        format!(
            "{} components={} checked_pairs={}",
            if self.passed() { "PASS" } else { "FAIL" },
            self.components.len(),
            self.checked_pairs
        )
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "verdict: {}", if self.passed() { "pass" } else { "fail" });
        let _ = writeln!(s, "eps: {}", self.eps);
        let _ = writeln!(s, "attack_size: {}", self.attack_size);
        let _ = writeln!(s, "safe_faces: {}", self.safe_faces);
        let _ = writeln!(s, "safe_components: {}", self.components.len());
        let _ = writeln!(s, "checked_pairs: {}", self.checked_pairs);
        let _ = writeln!(s, "spanner_components_after_attack: {}", self.spanner_labels.count);
        let _ = writeln!(s, "counterexamples: {}", self.counterexample_total);
        for c in &self.components {
            let label = c.common_label.map_or("none".to_string(), |l| l.to_string());
            let _ = writeln!(
                s,
                "component.{}: faces={} common_label={} verdict={}",
                c.component,
                c.faces,
                label,
                if c.passed { "pass" } else { "fail" }
            );
        }
        for (k, c) in self.counterexamples.iter().enumerate() {
            let _ = writeln!(s, "[counterexample {k}]");
            let _ = writeln!(s, "face_a: {} at {}", c.face_a, c.point_a);
            let _ = writeln!(s, "face_b: {} at {}", c.face_b, c.point_b);
            let _ = writeln!(s, "reason: {}", c.reason);
        }
        let _ = writeln!(s, "{}", self.summary_line());
        s
    }
}

/// Checks that every two safe faces in one safe component have surviving
/// covering disks in a common component of `spanner - B`.
pub fn verify_spanner(
    instance: &DiskInstance,
    spanner: &Graph,
    deleted: &BTreeSet<usize>,
    eps: f64,
) -> Result<VerificationReport, AttackError> {
    if spanner.vertex_count() != instance.len() {
        return Err(AttackError::VertexMismatch { spanner: spanner.vertex_count(), instance: instance.len() });
    }
    let arr = build_arrangement(instance.disks(), None)?;
    Ok(verify_in(&arr, spanner, deleted, eps))
}

/// [`verify_spanner`] over a prebuilt arrangement of the instance.
pub fn verify_in(arr: &Arrangement, spanner: &Graph, deleted: &BTreeSet<usize>, eps: f64) -> VerificationReport {
    let zone = safe_zone_in(arr, deleted, eps);
    let labels = components_after_attack(spanner, deleted);

    let mut reach: Vec<Vec<usize>> = vec![Vec::new(); arr.faces().len()];
    arr.visit_covers(|face, cover| {
        if zone.safe[face.id] {
            let mut ls: Vec<usize> = cover.iter().filter_map(|&c| labels.label(arr.disk_id(c))).collect();
            ls.sort_unstable();
            ls.dedup();
            reach[face.id] = ls;
        }
    });

    let rep = |f: FaceId| arr.face(f).representative;
    let mut counterexamples = Vec::new();
    let mut total = 0usize;
    let mut record = |a: FaceId, b: FaceId, reason: String, out: &mut Vec<Counterexample>| {
        total += 1;
        if out.len() < MAX_COUNTEREXAMPLES {
            out.push(Counterexample { face_a: a, face_b: b, point_a: rep(a), point_b: rep(b), reason });
        }
    };

    let mut verdicts = Vec::new();
    let mut checked_pairs = 0u64;
    for (k, faces) in zone.components().into_iter().enumerate() {
        checked_pairs += (faces.len() as u64) * (faces.len() as u64 - 1) / 2;
        let mut passed = true;
        for &f in &faces {
            if reach[f].is_empty() {
                passed = false;
                record(f, f, "safe face has no surviving covering disk".into(), &mut counterexamples);
            }
        }
        let mut common: Vec<usize> = reach[faces[0]].clone();
        for &f in &faces[1..] {
            common.retain(|l| reach[f].binary_search(l).is_ok());
        }
        if passed && common.is_empty() {
            // Pairwise check over distinct label sets.
            let mut distinct: Vec<(&[usize], FaceId)> = Vec::new();
            for &f in &faces {
                if !distinct.iter().any(|(s, _)| *s == reach[f].as_slice()) {
                    distinct.push((&reach[f], f));
                }
            }
            for (x, &(sa, fa)) in distinct.iter().enumerate() {
                for &(sb, fb) in &distinct[x + 1..] {
                    if !sa.iter().any(|l| sb.binary_search(l).is_ok()) {
                        passed = false;
                        record(
                            fa,
                            fb,
                            format!("no common spanner component: {sa:?} vs {sb:?}"),
                            &mut counterexamples,
                        );
                    }
                }
            }
        }
        verdicts.push(ComponentVerdict { component: k, faces: faces.len(), common_label: common.first().copied(), passed });
    }

    VerificationReport {
        eps,
        attack_size: deleted.len(),
        safe_faces: zone.safe.iter().filter(|&&s| s).count(),
        components: verdicts,
        checked_pairs,
        counterexamples,
        counterexample_total: total,
        spanner_labels: labels,
    }
}

/// Writes `instance.txt`, `attack.txt` and `bundle.txt` (configuration,
/// counterexamples and a replay command) into `dir`.
pub fn write_counterexample_bundle(
    dir: &Path,
    instance: &DiskInstance,
    cfg: &SpannerConfig,
    attack: &AttackSet,
    report: &VerificationReport,
) -> std::io::Result<PathBuf> {
    std::fs::create_dir_all(dir)?;
    std::fs::write(dir.join("instance.txt"), instance.to_text())?;
    std::fs::write(dir.join("attack.txt"), attack.to_text())?;
    let mut s = String::new();
    let _ = writeln!(s, "# eps: {}", cfg.eps);
    let _ = writeln!(s, "# preset: {}", cfg.preset);
    let _ = writeln!(s, "# c_alpha: {}", cfg.c_alpha);
    let _ = writeln!(s, "# c_exp_size: {}", cfg.c_exp_size);
    let _ = writeln!(s, "# c_exp_rep: {}", cfg.c_exp_rep);
    let _ = writeln!(s, "# seed: {}", cfg.seed);
    let _ = writeln!(s, "# verify_eps: {}", report.eps);
    let _ = writeln!(
        s,
        "# replay: disk-spanner build --in instance.txt --eps {} --preset {} --seed {} --out spanner.txt && \
         disk-spanner verify --in instance.txt --spanner spanner.txt --attack attack.txt --eps {}",
        cfg.eps, cfg.preset, cfg.seed, report.eps
    );
    s.push_str(&report.to_text());
    let path = dir.join("bundle.txt");
    std::fs::write(&path, s)?;
    Ok(path)
}
