//! Scaling sweeps: CSV rows, log-log fits and a static SVG plot.

use std::fmt::Write as _;
use std::time::Instant;

use crate::generate::{generate, Generator};
use crate::graph::intersection_graph;
use crate::sparsifier::{build_spanner, Preset, SpannerConfig, SpannerError};

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub generator: Generator,
    pub n: usize,
    pub eps: f64,
    pub preset: Preset,
    pub seed: u64,
    pub alpha: usize,
    pub rounds: usize,
    pub full_edges: usize,
    pub base_edges: usize,
    pub spanner_edges: usize,
    pub ignored_faces: usize,
    pub build_seconds: f64,
}

impl BenchRow {
    pub const CSV_HEADER: &'static str =
        "generator,n,eps,preset,seed,alpha,rounds,full_edges,base_edges,spanner_edges,edge_ratio,ignored_faces,build_seconds";

    /// Spanner edges over intersection-graph edges; 1 for edgeless inputs.
    pub fn edge_ratio(&self) -> f64 {
        if self.full_edges == 0 {
            1.0
        } else {
            self.spanner_edges as f64 / self.full_edges as f64
        }
    }

    pub fn to_csv(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{},{:.6},{},{:.3}",
            self.generator,
            self.n,
            self.eps,
            self.preset,
            self.seed,
            self.alpha,
            self.rounds,
            self.full_edges,
            self.base_edges,
            self.spanner_edges,
            self.edge_ratio(),
            self.ignored_faces,
            self.build_seconds
        )
    }
}

pub fn bench_point(generator: Generator, n: usize, cfg: &SpannerConfig) -> Result<BenchRow, SpannerError> {
    let instance = generate(generator, n, cfg.seed)?;
    let full_edges = intersection_graph(&instance).edge_count();
    let start = Instant::now();
    let (spanner, report) = build_spanner(&instance, cfg)?;
    let build_seconds = start.elapsed().as_secs_f64();
    Ok(BenchRow {
        generator,
        n,
        eps: cfg.eps,
        preset: cfg.preset,
        seed: cfg.seed,
        alpha: report.alpha,
        rounds: report.rounds.len(),
        full_edges,
        base_edges: report.base_edges,
        spanner_edges: spanner.edge_count(),
        ignored_faces: report.ignored_faces(),
        build_seconds,
    })
}

/// One row per (eps, n), eps-major.
pub fn sweep(
    generator: Generator,
    ns: &[usize],
    eps_values: &[f64],
    preset: Preset,
    seed: u64,
) -> Result<Vec<BenchRow>, SpannerError> {
    let mut rows = Vec::new();
    for &eps in eps_values {
        for &n in ns {
            rows.push(bench_point(generator, n, &SpannerConfig::for_preset(preset, eps, seed))?);
        }
    }
    Ok(rows)
}

pub fn to_csv(rows: &[BenchRow]) -> String {
    let mut s = format!("{}\n", BenchRow::CSV_HEADER);
    for r in rows {
        s.push_str(&r.to_csv());
        s.push('\n');
    }
    s
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Fit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

/// Least-squares line through `(ln x, ln y)`; points with a non-positive
/// coordinate are skipped. Needs two distinct x values.
pub fn loglog_fit(points: &[(f64, f64)]) -> Option<Fit> {
    let logs: Vec<(f64, f64)> =
        points.iter().filter(|(x, y)| *x > 0.0 && *y > 0.0).map(|(x, y)| (x.ln(), y.ln())).collect();
    let m = logs.len() as f64;
    if logs.len() < 2 {
        return None;
    }
    let mx = logs.iter().map(|p| p.0).sum::<f64>() / m;
    let my = logs.iter().map(|p| p.1).sum::<f64>() / m;
    let sxx: f64 = logs.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = logs.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let syy: f64 = logs.iter().map(|p| (p.1 - my).powi(2)).sum();
    if sxx <= 0.0 {
        return None;
    }
    let slope = sxy / sxx;
    let r_squared = if syy > 0.0 { sxy * sxy / (sxx * syy) } else { 1.0 };
    Some(Fit { slope, intercept: my - slope * mx, r_squared })
}

/// Fit of spanner edges against n over rows with the given eps.
pub fn edge_exponent(rows: &[BenchRow], eps: f64) -> Option<Fit> {
    let pts: Vec<(f64, f64)> =
        rows.iter().filter(|r| r.eps == eps).map(|r| (r.n as f64, r.spanner_edges as f64)).collect();
    loglog_fit(&pts)
}

/// Label, points and whether the line is dashed.
type Series = (String, Vec<(f64, f64)>, bool);

const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

/// Log-log plot of spanner and full edge counts against n, one pair of
/// series per eps.
pub fn scaling_svg(rows: &[BenchRow], title: &str) -> String {
    let (w, h, pad) = (640.0, 440.0, 60.0);
    let mut series: Vec<Series> = Vec::new();
    let mut eps_values: Vec<f64> = Vec::new();
    for r in rows {
        if !eps_values.contains(&r.eps) {
            eps_values.push(r.eps);
        }
    }
    for &eps in &eps_values {
        let sel: Vec<&BenchRow> = rows.iter().filter(|r| r.eps == eps).collect();
        series.push((format!("spanner eps={eps}"), sel.iter().map(|r| (r.n as f64, r.spanner_edges as f64)).collect(), false));
        series.push((format!("full eps={eps}"), sel.iter().map(|r| (r.n as f64, r.full_edges as f64)).collect(), true));
    }
    let pts = series.iter().flat_map(|s| s.1.iter()).filter(|p| p.0 > 0.0 && p.1 > 0.0);
    let (mut x0, mut x1, mut y0, mut y1) = (f64::MAX, f64::MIN, f64::MAX, f64::MIN);
    for &(x, y) in pts {
        x0 = x0.min(x.log10());
        x1 = x1.max(x.log10());
        y0 = y0.min(y.log10());
        y1 = y1.max(y.log10());
    }
    if x0 > x1 {
        (x0, x1, y0, y1) = (0.0, 1.0, 0.0, 1.0);
    }
    let (x0, x1) = (x0.floor(), x1.ceil().max(x0.floor() + 1.0));
    let (y0, y1) = (y0.floor(), y1.ceil().max(y0.floor() + 1.0));
    let sx = |x: f64| pad + (x.log10() - x0) / (x1 - x0) * (w - 2.0 * pad);
    let sy = |y: f64| h - pad - (y.log10() - y0) / (y1 - y0) * (h - 2.0 * pad);

    let mut s = String::new();
    let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" font-family="sans-serif" font-size="12">"#);
    let _ = writeln!(s, r#"<rect width="{w}" height="{h}" fill="white"/>"#);
    let _ = writeln!(s, r#"<text x="{}" y="24" text-anchor="middle" font-size="15">{}</text>"#, w / 2.0, escape(title));
    for d in x0 as i32..=x1 as i32 {
        let x = sx(10f64.powi(d));
        let _ = writeln!(s, r##"<line x1="{x:.1}" y1="{pad}" x2="{x:.1}" y2="{}" stroke="#ddd"/>"##, h - pad);
        let _ = writeln!(s, r#"<text x="{x:.1}" y="{}" text-anchor="middle">1e{d}</text>"#, h - pad + 18.0);
    }
    for d in y0 as i32..=y1 as i32 {
        let y = sy(10f64.powi(d));
        let _ = writeln!(s, r##"<line x1="{pad}" y1="{y:.1}" x2="{}" y2="{y:.1}" stroke="#ddd"/>"##, w - pad);
        let _ = writeln!(s, r#"<text x="{}" y="{:.1}" text-anchor="end">1e{d}</text>"#, pad - 6.0, y + 4.0);
    }
    let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="middle">n (disks)</text>"#, w / 2.0, h - 16.0);
    let _ = writeln!(s, r#"<text x="16" y="{}" transform="rotate(-90 16 {})" text-anchor="middle">edges</text>"#, h / 2.0, h / 2.0);
    for (k, (label, points, dashed)) in series.iter().enumerate() {
        let color = PALETTE[(k / 2) % PALETTE.len()];
        let coords: Vec<String> = points
            .iter()
            .filter(|p| p.0 > 0.0 && p.1 > 0.0)
            .map(|&(x, y)| format!("{:.1},{:.1}", sx(x), sy(y)))
            .collect();
        let dash = if *dashed { r#" stroke-dasharray="6 4""# } else { "" };
        let _ = writeln!(s, r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="2"{dash}/>"#, coords.join(" "));
        for c in &coords {
            let (cx, cy) = c.split_once(',').unwrap();
            let _ = writeln!(s, r#"<circle cx="{cx}" cy="{cy}" r="3" fill="{color}"/>"#);
        }
        let ly = pad + 16.0 * k as f64;
        let _ = writeln!(s, r#"<line x1="{}" y1="{ly}" x2="{}" y2="{ly}" stroke="{color}" stroke-width="2"{dash}/>"#, pad + 10.0, pad + 34.0);
        let _ = writeln!(s, r#"<text x="{}" y="{}">{}</text>"#, pad + 40.0, ly + 4.0, escape(label));
    }
    s.push_str("</svg>\n");
    s
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
