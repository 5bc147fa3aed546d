//! The spanner construction: all α-shallow edges, then rounds of random
//! colorings adding α-shallow edges between consecutive color classes.

use std::collections::HashMap;
use std::fmt::{self, Write as _};
use std::str::FromStr;
use std::sync::OnceLock;
use std::time::{Duration, Instant};

use rand::seq::index;
use rayon::prelude::*;
use thiserror::Error;

use crate::arrangement::{build_arrangement, shallow_edges_bipartite, Arrangement};
use crate::connector::{class_pair_index, random_coloring, Coloring};
use crate::geometry::{Disk, DiskInstance, GeometryError};
use crate::graph::{intersection_graph, Edge, Graph};
use crate::rng::{substream, Purpose};

/// Faces sampled per round for the ignored-face telemetry.
pub const TELEMETRY_SAMPLE: usize = 10_000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpannerError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    /// Small constants for experiments; carries no guarantee.
    Calibration,
    /// The constants from the analysis.
    Paper,
    Custom,
}

impl Preset {
    pub fn name(&self) -> &'static str {
        match self {
            Preset::Calibration => "calibration",
            Preset::Paper => "paper",
            Preset::Custom => "custom",
        }
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Preset {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "calibration" => Ok(Preset::Calibration),
            "paper" => Ok(Preset::Paper),
            "custom" => Ok(Preset::Custom),
            other => Err(format!("unknown preset `{other}` (expected calibration or paper)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpannerConfig {
    pub eps: f64,
    pub c_alpha: f64,
    /// Connector size constant.
    pub c_exp_size: f64,
    /// Connector repetition constant.
    pub c_exp_rep: f64,
    pub seed: u64,
    pub preset: Preset,
}

impl SpannerConfig {
    pub fn calibration(eps: f64, seed: u64) -> Self {
        Self { eps, c_alpha: 1.0, c_exp_size: 12.8, c_exp_rep: 52.0, seed, preset: Preset::Calibration }
    }

    pub fn paper(eps: f64, seed: u64) -> Self {
        Self { eps, c_alpha: 1.0, c_exp_size: 640.0, c_exp_rep: 2600.0, seed, preset: Preset::Paper }
    }

    pub fn for_preset(preset: Preset, eps: f64, seed: u64) -> Self {
        match preset {
            Preset::Paper => Self::paper(eps, seed),
            _ => Self::calibration(eps, seed),
        }
    }

    pub fn validate(&self) -> Result<(), SpannerError> {
        if !(self.eps > 0.0 && self.eps < 1.0) {
            return Err(SpannerError::Config(format!("eps must lie in (0, 1), got {}", self.eps)));
        }
        for (name, v) in [("c_alpha", self.c_alpha), ("c_exp_size", self.c_exp_size), ("c_exp_rep", self.c_exp_rep)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(SpannerError::Config(format!("{name} must be positive, got {v}")));
            }
        }
        Ok(())
    }

    /// Colorings per round, `ceil(c_exp_rep / eps^2)`.
    pub fn repetitions(&self) -> usize {
        (self.c_exp_rep / (self.eps * self.eps)).ceil() as usize
    }
}

/// `ceil(c_alpha * c_exp_size * (eps^-2 + 4 ln n))`.
pub fn compute_alpha(n: usize, cfg: &SpannerConfig) -> usize {
    let n = n.max(1) as f64;
    let raw = cfg.c_alpha * cfg.c_exp_size * (1.0 / (cfg.eps * cfg.eps) + 4.0 * n.ln());
    (raw.ceil() as usize).max(1)
}

/// Rounds run for `alpha < n`: `1 + ceil(log2(n / alpha))`; zero otherwise.
pub fn round_count(n: usize, alpha: usize) -> usize {
    if alpha >= n {
        return 0;
    }
    let mut m = 0;
    while alpha << m < n {
        m += 1;
    }
    1 + m
}

/// Where an edge was first found.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Provenance {
    Base,
    Layer { round: usize, repetition: usize, color: u32 },
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Provenance::Base => f.write_str("base"),
            Provenance::Layer { round, repetition, color } => write!(f, "layer:{round}:{repetition}:{color}"),
        }
    }
}

impl FromStr for Provenance {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "base" {
            return Ok(Provenance::Base);
        }
        let parts: Vec<&str> = s.split(':').collect();
        match parts[..] {
            ["layer", i, j, t] => {
                let num = |x: &str| x.parse::<usize>().map_err(|e| format!("bad provenance `{s}`: {e}"));
                Ok(Provenance::Layer { round: num(i)?, repetition: num(j)?, color: num(t)? as u32 })
            }
            _ => Err(format!("bad provenance `{s}`")),
        }
    }
}

/// Spanner edges over disk ids `0..n`, sorted, each with its provenance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpannerGraph {
    n: usize,
    edges: Vec<(Edge, Provenance)>,
}

impl SpannerGraph {
    pub fn new(n: usize, mut edges: Vec<(Edge, Provenance)>) -> Self {
        edges.sort_unstable();
        edges.dedup_by_key(|e| e.0);
        Self { n, edges }
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(Edge, Provenance)] {
        &self.edges
    }

    pub fn graph(&self) -> Graph {
        Graph::from_edges(self.n, self.edges.iter().map(|e| e.0))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RoundReport {
    pub round: usize,
    pub alpha_i: usize,
    pub edges_added: usize,
    /// Class unions larger than α, summed over repetitions.
    pub heavy_unions: usize,
    pub sampled_faces: usize,
    /// Sampled faces exceeding α within some consecutive class union, per repetition.
    pub ignored_per_repetition: Vec<usize>,
}

impl RoundReport {
    pub fn ignored_faces(&self) -> usize {
        self.ignored_per_repetition.iter().sum()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BuildReport {
    pub n: usize,
    pub config: SpannerConfig,
    pub alpha: usize,
    pub repetitions: usize,
    pub full_graph_shortcut: bool,
    pub base_edges: usize,
    pub total_edges: usize,
    pub rounds: Vec<RoundReport>,
    pub timings: Vec<(String, Duration)>,
}

impl BuildReport {
    pub fn ignored_faces(&self) -> usize {
        self.rounds.iter().map(RoundReport::ignored_faces).sum()
    }

    /// `key: value` lines; wall-clock entries are prefixed `timing.`.
    pub fn to_text(&self) -> String {
        let c = &self.config;
        let mut s = String::new();
        let mut kv = |k: &str, v: String| {
            let _ = writeln!(s, "{k}: {v}");
        };
        kv("n", self.n.to_string());
        kv("eps", c.eps.to_string());
        kv("preset", c.preset.to_string());
        kv("c_alpha", c.c_alpha.to_string());
        kv("c_exp_size", c.c_exp_size.to_string());
        kv("c_exp_rep", c.c_exp_rep.to_string());
        kv("seed", c.seed.to_string());
        kv("alpha", self.alpha.to_string());
        kv("repetitions", self.repetitions.to_string());
        kv("round_count", self.rounds.len().to_string());
        kv("full_graph_shortcut", self.full_graph_shortcut.to_string());
        kv("base_edges", self.base_edges.to_string());
        kv("total_edges", self.total_edges.to_string());
        kv("ignored_faces", self.ignored_faces().to_string());
        for r in &self.rounds {
            let p = format!("round.{}", r.round);
            kv(&format!("{p}.alpha_i"), r.alpha_i.to_string());
            kv(&format!("{p}.edges_added"), r.edges_added.to_string());
            kv(&format!("{p}.heavy_unions"), r.heavy_unions.to_string());
            kv(&format!("{p}.sampled_faces"), r.sampled_faces.to_string());
            kv(&format!("{p}.ignored_faces"), r.ignored_faces().to_string());
            let hits: Vec<String> = r
                .ignored_per_repetition
                .iter()
                .enumerate()
                .filter(|(_, &k)| k > 0)
                .map(|(j, k)| format!("{}={k}", j + 1))
                .collect();
            if !hits.is_empty() {
                kv(&format!("{p}.ignored_by_repetition"), hits.join(","));
            }
        }
        for (phase, d) in &self.timings {
            kv(&format!("timing.{phase}_seconds"), format!("{:.6}", d.as_secs_f64()));
        }
        s
    }
}

/// Shared per-instance data for the rounds.
struct Context<'a> {
    disks: &'a [Disk],
    full_edges: &'a [Edge],
    arrangement: &'a Arrangement,
    seed: u64,
}

struct RepetitionOutput {
    edges: Vec<(Edge, u32)>,
    heavy: usize,
    ignored: usize,
}

/// Builds the spanner and its report.
pub fn build_spanner(instance: &DiskInstance, cfg: &SpannerConfig) -> Result<(SpannerGraph, BuildReport), SpannerError> {
    cfg.validate()?;
    let disks = instance.disks();
    let n = disks.len();
    let alpha = compute_alpha(n, cfg);
    let repetitions = cfg.repetitions();
    let mut timings = Vec::new();

    let t = Instant::now();
    if alpha >= n {
        // Otherwise the arrangement build validates.
        instance.ensure_general_position()?;
    }
    let full = intersection_graph(instance);
    timings.push(("intersection_graph".to_string(), t.elapsed()));

    let mut report = BuildReport {
        n,
        config: cfg.clone(),
        alpha,
        repetitions,
        full_graph_shortcut: alpha >= n,
        base_edges: 0,
        total_edges: 0,
        rounds: Vec::new(),
        timings: Vec::new(),
    };

    if alpha >= n {
        let edges: Vec<(Edge, Provenance)> = full.edges().iter().map(|&e| (e, Provenance::Base)).collect();
        report.base_edges = edges.len();
        report.total_edges = edges.len();
        report.timings = timings;
        return Ok((SpannerGraph::new(n, edges), report));
    }

    let t = Instant::now();
    let arrangement = build_arrangement(disks, None)?;
    timings.push(("arrangement".to_string(), t.elapsed()));

    let t = Instant::now();
    let mut found: HashMap<Edge, Provenance> = HashMap::new();
    for e in arrangement.shallow_edges(alpha) {
        found.insert(e.pair, Provenance::Base);
    }
    report.base_edges = found.len();
    timings.push(("base".to_string(), t.elapsed()));

    let ctx = Context { disks, full_edges: full.edges(), arrangement: &arrangement, seed: cfg.seed };
    for i in 1..=round_count(n, alpha) {
        let t = Instant::now();
        let (edges, mut round) = run_round(&ctx, i, alpha, repetitions)?;
        for (e, p) in edges {
            if let std::collections::hash_map::Entry::Vacant(slot) = found.entry(e) {
                slot.insert(p);
                round.edges_added += 1;
            }
        }
        report.rounds.push(round);
        timings.push((format!("round.{i}"), t.elapsed()));
    }

    let spanner = SpannerGraph::new(n, found.into_iter().collect());
    report.total_edges = spanner.edge_count();
    report.timings = timings;
    Ok((spanner, report))
}

/// Edges of round `i` in discovery order (repetition, then edge), each
/// first occurrence only, with the round's telemetry. `edges_added` is left
/// at zero for the caller to fill in against earlier layers.
fn run_round(
    ctx: &Context<'_>,
    i: usize,
    alpha: usize,
    repetitions: usize,
) -> Result<(Vec<(Edge, Provenance)>, RoundReport), SpannerError> {
    let alpha_i = alpha << (i - 1);
    let sample: OnceLock<Vec<Vec<u32>>> = OnceLock::new();
    let outputs: Vec<Result<RepetitionOutput, SpannerError>> = (1..=repetitions)
        .into_par_iter()
        .map(|j| run_repetition(ctx, i, j, alpha_i, alpha, &sample))
        .collect();

    let mut seen: HashMap<Edge, ()> = HashMap::new();
    let mut edges = Vec::new();
    let mut round = RoundReport {
        round: i,
        alpha_i,
        edges_added: 0,
        heavy_unions: 0,
        sampled_faces: 0,
        ignored_per_repetition: Vec::with_capacity(repetitions),
    };
    for (j, out) in outputs.into_iter().enumerate() {
        let out = out?;
        round.heavy_unions += out.heavy;
        round.ignored_per_repetition.push(out.ignored);
        for (e, t) in out.edges {
            if seen.insert(e, ()).is_none() {
                edges.push((e, Provenance::Layer { round: i, repetition: j + 1, color: t }));
            }
        }
    }
    round.sampled_faces = sample.get().map_or(0, Vec::len);
    Ok((edges, round))
}

fn run_repetition(
    ctx: &Context<'_>,
    i: usize,
    j: usize,
    alpha_i: usize,
    alpha: usize,
    sample: &OnceLock<Vec<Vec<u32>>>,
) -> Result<RepetitionOutput, SpannerError> {
    let n = ctx.disks.len();
    let xi = u32::try_from(alpha_i).unwrap_or(u32::MAX);
    let coloring = random_coloring(n, xi, &mut substream(ctx.seed, Purpose::Coloring, i as u64, j as u64));

    let mut class_size: HashMap<u32, usize> = HashMap::new();
    for &c in coloring.colors() {
        *class_size.entry(c).or_default() += 1;
    }
    let size = |c: u32| class_size.get(&c).copied().unwrap_or(0);
    let prev = |t: u32| if t == 1 { xi } else { t - 1 };

    // Class pairs whose union exceeds α need the bipartite arrangement.
    let mut heavy: Vec<u32> = class_size
        .keys()
        .flat_map(|&c| [c, if c == xi { 1 } else { c + 1 }])
        .filter(|&t| xi >= 2 && !(xi == 2 && t == 2))
        .filter(|&t| size(prev(t)) + size(t) > alpha)
        .collect();
    heavy.sort_unstable();
    heavy.dedup();

    let mut edges: Vec<(Edge, u32)> = ctx
        .full_edges
        .iter()
        .filter_map(|&(a, b)| {
            class_pair_index(coloring.color(a), coloring.color(b), xi)
                .filter(|t| heavy.binary_search(t).is_err())
                .map(|t| ((a, b), t))
        })
        .collect();

    let mut ignored = 0;
    if !heavy.is_empty() {
        let classes = class_members(&coloring, ctx.disks);
        let empty = Vec::new();
        for &t in &heavy {
            let left = classes.get(&prev(t)).unwrap_or(&empty);
            let right = classes.get(&t).unwrap_or(&empty);
            for e in shallow_edges_bipartite(left, right, alpha)? {
                edges.push((e.pair, t));
            }
        }
        let covers = sample.get_or_init(|| sample_covers(ctx, i, alpha_i));
        ignored = covers.iter().filter(|cover| exceeds_in_some_pair(cover, &coloring, alpha)).count();
    }
    edges.sort_unstable();
    Ok(RepetitionOutput { edges, heavy: heavy.len(), ignored })
}

fn class_members(coloring: &Coloring, disks: &[Disk]) -> HashMap<u32, Vec<Disk>> {
    let mut classes: HashMap<u32, Vec<Disk>> = HashMap::new();
    for d in disks {
        classes.entry(coloring.color(d.id)).or_default().push(*d);
    }
    classes
}

/// Covering sets of up to [`TELEMETRY_SAMPLE`] faces with depth in
/// `(alpha_i / 2, alpha_i]`.
fn sample_covers(ctx: &Context<'_>, i: usize, alpha_i: usize) -> Vec<Vec<u32>> {
    let faces = ctx.arrangement.faces();
    let candidates: Vec<usize> =
        faces.iter().filter(|f| 2 * f.depth > alpha_i && f.depth <= alpha_i).map(|f| f.id).collect();
    let mut rng = substream(ctx.seed, Purpose::Telemetry, i as u64, 0);
    let take = candidates.len().min(TELEMETRY_SAMPLE);
    let mut chosen: Vec<usize> = index::sample(&mut rng, candidates.len(), take).into_iter().map(|k| candidates[k]).collect();
    chosen.sort_unstable();
    let mut slot = vec![usize::MAX; faces.len()];
    for (k, &f) in chosen.iter().enumerate() {
        slot[f] = k;
    }
    let mut covers = vec![Vec::new(); chosen.len()];
    ctx.arrangement.visit_covers(|face, cover| {
        if slot[face.id] != usize::MAX {
            covers[slot[face.id]] = cover.iter().map(|&c| ctx.arrangement.disk_id(c) as u32).collect();
        }
    });
    covers
}

fn exceeds_in_some_pair(cover: &[u32], coloring: &Coloring, alpha: usize) -> bool {
    let xi = coloring.xi();
    let mut colors: Vec<u32> = cover.iter().map(|&d| coloring.color(d as usize)).collect();
    colors.sort_unstable();
    let mut counts: Vec<(u32, usize)> = Vec::new();
    for c in colors {
        match counts.last_mut() {
            Some((last, k)) if *last == c => *k += 1,
            _ => counts.push((c, 1)),
        }
    }
    let count_of = |c: u32| counts.binary_search_by_key(&c, |e| e.0).map_or(0, |k| counts[k].1);
    counts.iter().any(|&(c, k)| {
        let next = if c == xi { 1 } else { c + 1 };
        xi >= 2 && next != c && k + count_of(next) > alpha
    })
}

/// Output of one round computed on its own.
#[derive(Debug, Clone)]
pub struct RoundOutput {
    pub edges: Vec<(Edge, Provenance)>,
    pub report: RoundReport,
}

/// Runs round `i` of the construction in isolation (no base layer).
pub fn round_edges(
    instance: &DiskInstance,
    i: usize,
    alpha: usize,
    repetitions: usize,
    seed: u64,
) -> Result<RoundOutput, SpannerError> {
    if i == 0 || alpha == 0 {
        return Err(SpannerError::Config("round index and alpha must be positive".into()));
    }
    let arrangement = build_arrangement(instance.disks(), None)?;
    let full = intersection_graph(instance);
    let ctx = Context { disks: instance.disks(), full_edges: full.edges(), arrangement: &arrangement, seed };
    let (edges, mut report) = run_round(&ctx, i, alpha, repetitions)?;
    report.edges_added = edges.len();
    Ok(RoundOutput { edges, report })
}
