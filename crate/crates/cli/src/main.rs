//! `disk-spanner`: generate instances, build and attack spanners, verify,
//! report statistics, run brute-force oracles and benchmark sweeps.

use std::collections::{BTreeSet, VecDeque};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rand::Rng;
use sha2::{Digest, Sha256};

use spanner_core::arrangement::{build_arrangement, min_depth_in_lens};
use spanner_core::attack::{generate_attack, verify_spanner, write_counterexample_bundle, AttackSet, Strategy};
use spanner_core::bench::{edge_exponent, scaling_svg, sweep, to_csv};
use spanner_core::generate::{generate, Generator};
use spanner_core::geometry::depth_at;
use spanner_core::graph::{components_after_attack, intersection_graph, Graph};
use spanner_core::io::{format_spanner, format_witnessed_edges, parse_spanner, Manifest};
use spanner_core::rng::{substream, Purpose};
use spanner_core::sparsifier::{build_spanner, Preset, SpannerConfig};
use spanner_core::{shallow_edges, DiskInstance};

const TOOL: &str = "disk-spanner";

#[derive(Parser)]
#[command(name = TOOL, version, about = "Fault-tolerant sparse spanners for disk intersection graphs")]
struct Cli {
    /// Worker threads for parallel phases (default: all cores).
    #[arg(long, global = true, env = "SPANNER_THREADS")]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a random instance in general position.
    Gen(GenArgs),
    /// Build a spanner from an instance.
    Build(BuildArgs),
    /// Generate an attack set.
    Attack(AttackArgs),
    /// Check safe connectivity of a spanner under an attack.
    Verify(VerifyArgs),
    /// Print instance and spanner statistics.
    Stats(StatsArgs),
    /// Cross-check shallow edges and components against brute force.
    Oracle(OracleArgs),
    /// Sweep n and eps, writing CSV and an SVG plot.
    Bench(BenchArgs),
}

#[derive(Args)]
struct GenArgs {
    /// Number of disks.
    #[arg(long)]
    n: usize,
    /// uniform_unit, clustered, stacked or corridor.
    #[arg(long, default_value = "uniform_unit")]
    generator: Generator,
    /// Minimum radius for uniform_unit.
    #[arg(long, default_value_t = 0.02)]
    r_min: f64,
    /// Maximum radius for uniform_unit.
    #[arg(long, default_value_t = 0.08)]
    r_max: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output path (stdout if omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BuildArgs {
    /// Instance file.
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long, default_value_t = 0.5)]
    eps: f64,
    /// calibration or paper.
    #[arg(long, default_value = "calibration")]
    preset: Preset,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Override the alpha constant.
    #[arg(long)]
    c_alpha: Option<f64>,
    /// Override the connector size constant.
    #[arg(long)]
    c_exp_size: Option<f64>,
    /// Override the connector repetition constant.
    #[arg(long)]
    c_exp_rep: Option<f64>,
    /// Spanner output path (stdout if omitted).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Build report output path.
    #[arg(long)]
    report: Option<PathBuf>,
    /// Include wall-clock timings in the report (breaks byte reproducibility).
    #[arg(long)]
    timings: bool,
}

#[derive(Args)]
struct AttackArgs {
    /// Instance file.
    #[arg(long = "in")]
    input: PathBuf,
    /// random_fraction:<rho>, neighborhood_kill:<id>, deepest_point:<count> or ids:<a,b,..>.
    #[arg(long, conflicts_with = "rho")]
    strategy: Option<String>,
    /// Shorthand for random_fraction:<rho>.
    #[arg(long)]
    rho: Option<f64>,
    /// Graph for neighborhood_kill (default: intersection graph).
    #[arg(long)]
    spanner: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Instance file.
    #[arg(long = "in")]
    input: PathBuf,
    /// Spanner file; the full intersection graph is used if omitted.
    #[arg(long)]
    spanner: Option<PathBuf>,
    /// Attack file (empty attack if omitted).
    #[arg(long)]
    attack: Option<PathBuf>,
    #[arg(long, default_value_t = 0.5)]
    eps: f64,
    /// Verification report output path (stdout if omitted).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Directory for a counterexample bundle on failure.
    #[arg(long)]
    bundle_dir: Option<PathBuf>,
}

#[derive(Args)]
struct StatsArgs {
    /// Instance file.
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    spanner: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct OracleArgs {
    /// Check this instance instead of generated ones.
    #[arg(long = "in")]
    input: Option<PathBuf>,
    /// Number of generated instances.
    #[arg(long, default_value_t = 100)]
    count: usize,
    /// Largest generated n.
    #[arg(long, default_value_t = 60)]
    n_max: usize,
    #[arg(long, default_value = "uniform_unit")]
    generator: Generator,
    #[arg(long, default_value_t = 0.05)]
    r_min: f64,
    #[arg(long, default_value_t = 0.25)]
    r_max: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Shallowness levels; `n` stands for the instance size.
    #[arg(long, value_delimiter = ',', default_value = "2,5,n")]
    k: Vec<String>,
    /// Write the k = 2 witnessed edges of a single `--in` instance here.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long, default_value = "uniform_unit")]
    generator: Generator,
    /// Comma-separated sizes.
    #[arg(long, value_delimiter = ',', default_value = "100,300,1000")]
    n: Vec<usize>,
    /// Comma-separated eps values.
    #[arg(long, value_delimiter = ',', default_value = "0.5")]
    eps: Vec<f64>,
    #[arg(long, default_value = "calibration")]
    preset: Preset,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// CSV output path (stdout if omitted).
    #[arg(long)]
    out: Option<PathBuf>,
    /// SVG plot output path.
    #[arg(long)]
    svg: Option<PathBuf>,
}

/// Exit statuses.
enum Failure {
    Check(String),
    Usage(String),
    Io(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Check(_) => 1,
            Failure::Usage(_) => 2,
            Failure::Io(_) => 3,
        }
    }
}

fn usage(e: impl std::fmt::Display) -> Failure {
    Failure::Usage(e.to_string())
}

type Outcome = Result<(), Failure>;

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
}

/// Writes to `path`, or stdout when absent.
fn emit(path: Option<&Path>, text: &str) -> Outcome {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| Failure::Io(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn sha256(text: &str) -> String {
    hex::encode(Sha256::digest(text.as_bytes()))
}

fn manifest(command: &str) -> Manifest {
    let mut m = Manifest::new();
    m.set("tool", TOOL).set("version", env!("CARGO_PKG_VERSION")).set("command", command);
    m
}

fn path_str(p: Option<&Path>) -> String {
    p.map_or("-".to_string(), |p| p.display().to_string())
}

struct Loaded {
    instance: DiskInstance,
    hash: String,
}

fn load_instance(path: &Path) -> Result<Loaded, Failure> {
    let text = read(path)?;
    let instance = DiskInstance::parse(&text).map_err(|e| usage(format!("{}: {e}", path.display())))?;
    let hash = sha256(&instance.to_text());
    Ok(Loaded { instance, hash })
}

/// Rejects a companion file whose manifest names another instance.
fn check_hash(kind: &str, text: &str, loaded: &Loaded) -> Outcome {
    match Manifest::parse_header(text).get("instance_sha256") {
        Some(h) if h != loaded.hash => {
            Err(usage(format!("{kind} file was produced for instance {h}, not {}", loaded.hash)))
        }
        _ => Ok(()),
    }
}

fn load_spanner(path: &Path, loaded: &Loaded) -> Result<Graph, Failure> {
    let text = read(path)?;
    check_hash("spanner", &text, loaded)?;
    let s = parse_spanner(&text).map_err(|e| usage(format!("{}: {e}", path.display())))?;
    if s.vertex_count() != loaded.instance.len() {
        return Err(usage(format!(
            "spanner has {} vertices but the instance has {} disks",
            s.vertex_count(),
            loaded.instance.len()
        )));
    }
    Ok(s.graph())
}

fn cmd_gen(a: &GenArgs) -> Outcome {
    if a.n == 0 {
        return Err(usage("--n must be at least 1"));
    }
    let generator = match a.generator {
        Generator::UniformUnit { .. } => Generator::UniformUnit { r_min: a.r_min, r_max: a.r_max },
        g => g,
    };
    let inst = generate(generator, a.n, a.seed).map_err(usage)?;
    let body = inst.to_text();
    let mut m = manifest("gen");
    m.set("generator", generator).set("n", a.n).set("seed", a.seed);
    if let Generator::UniformUnit { r_min, r_max } = generator {
        m.set("r_min", r_min).set("r_max", r_max);
    }
    m.set("out", path_str(a.out.as_deref())).set("instance_sha256", sha256(&body));
    emit(a.out.as_deref(), &format!("{}{body}", m.to_header()))
}

fn cmd_build(a: &BuildArgs) -> Outcome {
    let loaded = load_instance(&a.input)?;
    let mut cfg = SpannerConfig::for_preset(a.preset, a.eps, a.seed);
    for (slot, v) in [(&mut cfg.c_alpha, a.c_alpha), (&mut cfg.c_exp_size, a.c_exp_size), (&mut cfg.c_exp_rep, a.c_exp_rep)] {
        if let Some(v) = v {
            *slot = v;
            cfg.preset = Preset::Custom;
        }
    }
    let (spanner, report) = build_spanner(&loaded.instance, &cfg).map_err(usage)?;
    let mut m = manifest("build");
    m.set("in", a.input.display())
        .set("eps", cfg.eps)
        .set("preset", cfg.preset)
        .set("c_alpha", cfg.c_alpha)
        .set("c_exp_size", cfg.c_exp_size)
        .set("c_exp_rep", cfg.c_exp_rep)
        .set("seed", cfg.seed)
        .set("out", path_str(a.out.as_deref()))
        .set("instance_sha256", &loaded.hash)
        .set("vertices", spanner.vertex_count())
        .set("edges", spanner.edge_count());
    emit(a.out.as_deref(), &format!("{}{}", m.to_header(), format_spanner(&spanner)))?;
    let n = spanner.vertex_count().max(2) as f64;
    eprintln!(
        "built spanner: n={} edges={} alpha={} rounds={} edges/(n ln^2 n)={:.4}",
        spanner.vertex_count(),
        spanner.edge_count(),
        report.alpha,
        report.rounds.len(),
        spanner.edge_count() as f64 / (n * n.ln().powi(2))
    );
    if let Some(path) = &a.report {
        let mut text = report.to_text();
        if !a.timings {
            text = text.lines().filter(|l| !l.starts_with("timing.")).map(|l| format!("{l}\n")).collect();
        }
        m.set("report", path.display());
        emit(Some(path), &format!("{}{text}", m.to_header()))?;
    }
    Ok(())
}

fn cmd_attack(a: &AttackArgs) -> Outcome {
    let loaded = load_instance(&a.input)?;
    let strategy: Strategy = match (&a.strategy, a.rho) {
        (Some(s), _) => s.parse().map_err(usage)?,
        (None, Some(rho)) => Strategy::RandomFraction(rho),
        (None, None) => return Err(usage("one of --strategy or --rho is required")),
    };
    let graph = match &a.spanner {
        Some(p) => load_spanner(p, &loaded)?,
        None => intersection_graph(&loaded.instance),
    };
    let attack = generate_attack(&loaded.instance, &strategy, Some(&graph), a.seed).map_err(usage)?;
    let mut m = manifest("attack");
    m.set("in", a.input.display())
        .set("graph", a.spanner.as_deref().map_or("intersection".to_string(), |p| p.display().to_string()))
        .set("out", path_str(a.out.as_deref()))
        .set("instance_sha256", &loaded.hash)
        .set("deleted", attack.len());
    // AttackSet::to_text supplies the strategy and seed keys.
    emit(a.out.as_deref(), &format!("{}{}", m.to_header(), attack.to_text()))
}

fn cmd_verify(a: &VerifyArgs) -> Outcome {
    let loaded = load_instance(&a.input)?;
    let graph = match &a.spanner {
        Some(p) => load_spanner(p, &loaded)?,
        None => intersection_graph(&loaded.instance),
    };
    let attack = match &a.attack {
        Some(p) => {
            let text = read(p)?;
            check_hash("attack", &text, &loaded)?;
            AttackSet::parse(&text, loaded.instance.len()).map_err(|e| usage(format!("{}: {e}", p.display())))?
        }
        None => AttackSet::empty(),
    };
    if !(a.eps > 0.0 && a.eps <= 1.0) {
        return Err(usage(format!("--eps must lie in (0, 1], got {}", a.eps)));
    }
    let report = verify_spanner(&loaded.instance, &graph, &attack.deleted, a.eps).map_err(usage)?;
    let mut m = manifest("verify");
    m.set("in", a.input.display())
        .set("spanner", a.spanner.as_deref().map_or("intersection".to_string(), |p| p.display().to_string()))
        .set("attack", path_str(a.attack.as_deref()))
        .set("eps", a.eps)
        .set("instance_sha256", &loaded.hash);
    emit(a.out.as_deref(), &format!("{}{}", m.to_header(), report.to_text()))?;
    if a.out.is_some() {
        println!("{}", report.summary_line());
    }
    if report.passed() {
        return Ok(());
    }
    if let Some(dir) = &a.bundle_dir {
        let text = a.spanner.as_deref().map(read).transpose()?;
        let header = text.as_deref().map(Manifest::parse_header).unwrap_or_default();
        let get = |k: &str| header.get(k).map(str::to_string);
        let preset: Preset = get("preset").and_then(|p| p.parse().ok()).unwrap_or(Preset::Calibration);
        let mut cfg = SpannerConfig::for_preset(preset, get("eps").and_then(|v| v.parse().ok()).unwrap_or(0.5), 0);
        cfg.seed = get("seed").and_then(|v| v.parse().ok()).unwrap_or(0);
        for (slot, key) in [(&mut cfg.c_alpha, "c_alpha"), (&mut cfg.c_exp_size, "c_exp_size"), (&mut cfg.c_exp_rep, "c_exp_rep")] {
            if let Some(v) = get(key).and_then(|v| v.parse().ok()) {
                *slot = v;
            }
        }
        let path = write_counterexample_bundle(dir, &loaded.instance, &cfg, &attack, &report)
            .map_err(|e| Failure::Io(format!("{}: {e}", dir.display())))?;
        eprintln!("counterexample bundle written to {}", path.display());
    }
    Err(Failure::Check(report.summary_line()))
}

fn cmd_stats(a: &StatsArgs) -> Outcome {
    let loaded = load_instance(&a.input)?;
    let inst = &loaded.instance;
    let full = intersection_graph(inst);
    let arr = build_arrangement(inst.disks(), None).map_err(usage)?;
    let spanner = a.spanner.as_deref().map(|p| load_spanner(p, &loaded)).transpose()?;
    let mut s = String::new();
    let _ = writeln!(s, "n: {}", inst.len());
    let _ = writeln!(s, "instance_sha256: {}", loaded.hash);
    let _ = writeln!(s, "full_edges: {}", full.edge_count());
    let _ = writeln!(s, "max_depth: {}", arr.max_depth());
    let c = arr.complexity();
    let _ = writeln!(s, "faces: {}", c.faces);
    let _ = writeln!(s, "vertices: {}", c.vertices);
    let _ = writeln!(s, "arcs: {}", c.arcs);
    let empty = BTreeSet::new();
    let _ = writeln!(s, "full_components: {}", components_after_attack(&full, &empty).count);
    degree_lines(&mut s, "full", &full);
    if let Some(g) = &spanner {
        let _ = writeln!(s, "spanner_edges: {}", g.edge_count());
        let ratio = if full.edge_count() == 0 { 1.0 } else { g.edge_count() as f64 / full.edge_count() as f64 };
        let _ = writeln!(s, "edge_ratio: {ratio:.6}");
        let _ = writeln!(s, "spanner_components: {}", components_after_attack(g, &empty).count);
        degree_lines(&mut s, "spanner", g);
    }
    emit(a.out.as_deref(), &s)
}

fn degree_lines(s: &mut String, prefix: &str, g: &Graph) {
    let deg = g.degrees();
    let n = deg.len().max(1) as f64;
    let max = deg.iter().copied().max().unwrap_or(0);
    let _ = writeln!(s, "{prefix}_degree_min: {}", deg.iter().copied().min().unwrap_or(0));
    let _ = writeln!(s, "{prefix}_degree_mean: {:.4}", deg.iter().sum::<usize>() as f64 / n);
    let _ = writeln!(s, "{prefix}_degree_max: {max}");
    // Power-of-two buckets: [0], [1], [2,3], [4,7], ...
    let mut buckets = vec![0usize; (usize::BITS - max.leading_zeros()) as usize + 1];
    for &d in &deg {
        buckets[(usize::BITS - d.leading_zeros()) as usize] += 1;
    }
    let hist: Vec<String> = buckets
        .iter()
        .enumerate()
        .map(|(b, c)| match b {
            0 => format!("0:{c}"),
            _ => format!("{}-{}:{c}", 1usize << (b - 1), (1usize << b) - 1),
        })
        .collect();
    let _ = writeln!(s, "{prefix}_degree_histogram: {}", hist.join(" "));
}

/// Mismatch descriptions between the library and brute force on one instance.
fn oracle_instance(inst: &DiskInstance, ks: &[Option<usize>], rng_seed: u64) -> Result<Vec<String>, Failure> {
    let disks = inst.disks();
    let n = disks.len();
    let full = intersection_graph(inst);
    let mut lens = Vec::with_capacity(full.edge_count());
    for &(a, b) in full.edges() {
        lens.push(((a, b), min_depth_in_lens(&disks[a], &disks[b], disks).map_err(usage)?.0));
    }
    let mut out = Vec::new();
    for k in ks {
        let k = k.unwrap_or(n);
        let got = shallow_edges(disks, k).map_err(usage)?;
        for e in &got {
            let (a, b) = e.pair;
            if !disks[a].contains(e.witness) || !disks[b].contains(e.witness) || depth_at(e.witness, disks) != e.depth
                || e.depth > k
            {
                out.push(format!("k={k}: bad witness for ({a}, {b})"));
            }
        }
        let got: BTreeSet<(usize, usize)> = got.iter().map(|e| e.pair).collect();
        let want: BTreeSet<(usize, usize)> = lens.iter().filter(|(_, d)| *d <= k).map(|(e, _)| *e).collect();
        for e in got.symmetric_difference(&want) {
            out.push(format!("k={k}: edge {e:?} {}", if got.contains(e) { "unexpected" } else { "missing" }));
        }
    }
    // Components after a random attack against BFS.
    let mut rng = substream(rng_seed, Purpose::Sampling, n as u64, 0);
    let b: BTreeSet<usize> = (0..n).filter(|_| rng.gen_bool(0.25)).collect();
    let labels = components_after_attack(&full, &b);
    let adj = full.adjacency();
    let mut seen = vec![usize::MAX; n];
    let mut count = 0;
    for s in (0..n).filter(|v| !b.contains(v)) {
        if seen[s] != usize::MAX {
            continue;
        }
        let mut q = VecDeque::from([s]);
        seen[s] = count;
        while let Some(v) = q.pop_front() {
            for &w in &adj[v] {
                if !b.contains(&w) && seen[w] == usize::MAX {
                    seen[w] = count;
                    q.push_back(w);
                }
            }
        }
        count += 1;
    }
    if count != labels.count {
        out.push(format!("components: {} vs BFS {count}", labels.count));
    }
    for u in 0..n {
        for v in u + 1..n {
            if b.contains(&u) || b.contains(&v) {
                continue;
            }
            if (labels.label(u) == labels.label(v)) != (seen[u] == seen[v]) {
                out.push(format!("components disagree on ({u}, {v})"));
            }
        }
    }
    Ok(out)
}

fn cmd_oracle(a: &OracleArgs) -> Outcome {
    let ks: Vec<Option<usize>> = a
        .k
        .iter()
        .map(|k| if k == "n" { Ok(None) } else { k.parse().map(Some).map_err(|_| usage(format!("bad k `{k}`"))) })
        .collect::<Result<_, _>>()?;
    let mut instances = Vec::new();
    match &a.input {
        Some(p) => instances.push(load_instance(p)?.instance),
        None => {
            if a.n_max < 1 {
                return Err(usage("--n-max must be at least 1"));
            }
            let generator = match a.generator {
                Generator::UniformUnit { .. } => Generator::UniformUnit { r_min: a.r_min, r_max: a.r_max },
                g => g,
            };
            for i in 0..a.count as u64 {
                let seed = a.seed.wrapping_add(i);
                let n = 1 + (seed.wrapping_mul(0x9E37_79B9_7F4A_7C15) >> 40) as usize % a.n_max;
                instances.push(generate(generator, n, seed).map_err(usage)?);
            }
        }
    }
    let mut mismatches = 0;
    for (i, inst) in instances.iter().enumerate() {
        let found = oracle_instance(inst, &ks, a.seed.wrapping_add(i as u64))?;
        for m in &found {
            eprintln!("instance {i} (n={}): {m}", inst.len());
        }
        mismatches += found.len();
    }
    if let (Some(out), Some(p)) = (&a.out, &a.input) {
        let loaded = load_instance(p)?;
        let edges = shallow_edges(loaded.instance.disks(), 2).map_err(usage)?;
        let mut m = manifest("oracle");
        m.set("in", p.display()).set("k", 2).set("instance_sha256", &loaded.hash);
        emit(Some(out), &format!("{}{}", m.to_header(), format_witnessed_edges(&edges)))?;
    }
    let line = format!(
        "{} instances={} mismatches={mismatches}",
        if mismatches == 0 { "PASS" } else { "FAIL" },
        instances.len()
    );
    println!("{line}");
    if mismatches == 0 {
        Ok(())
    } else {
        Err(Failure::Check(line))
    }
}

fn cmd_bench(a: &BenchArgs) -> Outcome {
    if a.n.is_empty() || a.eps.is_empty() {
        return Err(usage("--n and --eps need at least one value"));
    }
    let rows = sweep(a.generator, &a.n, &a.eps, a.preset, a.seed).map_err(usage)?;
    emit(a.out.as_deref(), &to_csv(&rows))?;
    for &eps in &a.eps {
        if let Some(fit) = edge_exponent(&rows, eps) {
            eprintln!("eps={eps}: fitted exponent of spanner edges vs n = {:.4} (r^2 {:.4})", fit.slope, fit.r_squared);
        }
    }
    if let Some(svg) = &a.svg {
        let title = format!("{} edges vs n ({} preset)", a.generator, a.preset);
        emit(Some(svg), &scaling_svg(&rows, &title))?;
    }
    Ok(())
}

fn run(cli: &Cli) -> Outcome {
    if let Some(t) = cli.threads {
        rayon::ThreadPoolBuilder::new().num_threads(t.max(1)).build_global().map_err(usage)?;
    }
    match &cli.command {
        Command::Gen(a) => cmd_gen(a),
        Command::Build(a) => cmd_build(a),
        Command::Attack(a) => cmd_attack(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Stats(a) => cmd_stats(a),
        Command::Oracle(a) => cmd_oracle(a),
        Command::Bench(a) => cmd_bench(a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => e.exit(),
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            match &f {
                Failure::Check(m) => eprintln!("{m}"),
                Failure::Usage(m) => eprintln!("error: {m}"),
                Failure::Io(m) => eprintln!("I/O error: {m}"),
            }
            ExitCode::from(f.code())
        }
    }
}
