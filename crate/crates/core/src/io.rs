//! Text formats: `# key: value` manifest headers, witnessed edge lists,
//! plain edge lists and spanner files.

use std::fmt::Write as _;

use thiserror::Error;

use crate::arrangement::WitnessedEdge;
use crate::geometry::Point;
use crate::graph::{edge, Graph};
use crate::sparsifier::{Provenance, SpannerGraph};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("line {line}: {msg}")]
pub struct FormatError {
    pub line: usize,
    pub msg: String,
}

fn err(line: usize, msg: impl Into<String>) -> FormatError {
    FormatError { line, msg: msg.into() }
}

/// Ordered `key: value` pairs written as a `#` comment block.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Manifest {
    entries: Vec<(String, String)>,
}

impl Manifest {
    pub fn new() -> Self {
        Self::default()
    }

    /// Sets `key`, replacing an earlier value in place.
    pub fn set(&mut self, key: impl Into<String>, value: impl ToString) -> &mut Self {
        let key = key.into();
        let value = value.to_string().replace('\n', " ");
        match self.entries.iter_mut().find(|(k, _)| *k == key) {
            Some(slot) => slot.1 = value,
            None => self.entries.push((key, value)),
        }
        self
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn entries(&self) -> &[(String, String)] {
        &self.entries
    }

    pub fn to_header(&self) -> String {
        let mut s = String::new();
        for (k, v) in &self.entries {
            let _ = writeln!(s, "# {k}: {v}");
        }
        s
    }

    /// Reads the `# key: value` lines of the leading comment block.
    pub fn parse_header(text: &str) -> Manifest {
        let mut m = Manifest::new();
        for line in text.lines() {
            let Some(rest) = line.strip_prefix('#') else { break };
            if let Some((k, v)) = rest.trim().split_once(": ") {
                m.entries.push((k.trim().to_string(), v.trim().to_string()));
            }
        }
        m
    }
}

fn body_lines(text: &str) -> impl Iterator<Item = (usize, Vec<&str>)> {
    text.lines().enumerate().filter_map(|(i, raw)| {
        let line = raw.trim();
        (!line.is_empty() && !line.starts_with('#')).then(|| (i + 1, line.split_whitespace().collect()))
    })
}

fn field<T: std::str::FromStr>(line: usize, s: &str) -> Result<T, FormatError>
where
    T::Err: std::fmt::Display,
{
    s.parse().map_err(|e| err(line, format!("bad field `{s}`: {e}")))
}

/// `id1 id2 wx wy depth` per edge, in the given order.
pub fn format_witnessed_edges(edges: &[WitnessedEdge]) -> String {
    let mut s = String::new();
    for e in edges {
        let _ = writeln!(s, "{} {} {} {} {}", e.pair.0, e.pair.1, e.witness.x, e.witness.y, e.depth);
    }
    s
}

pub fn parse_witnessed_edges(text: &str) -> Result<Vec<WitnessedEdge>, FormatError> {
    body_lines(text)
        .map(|(line, f)| {
            if f.len() != 5 {
                return Err(err(line, "expected `id1 id2 wx wy depth`"));
            }
            Ok(WitnessedEdge {
                pair: edge(field(line, f[0])?, field(line, f[1])?),
                witness: Point::new(field(line, f[2])?, field(line, f[3])?),
                depth: field(line, f[4])?,
            })
        })
        .collect()
}

/// `id1 id2` per edge.
pub fn format_edges(graph: &Graph) -> String {
    let mut s = String::new();
    for &(a, b) in graph.edges() {
        let _ = writeln!(s, "{a} {b}");
    }
    s
}

/// `id1 id2 provenance` per edge.
pub fn format_spanner(spanner: &SpannerGraph) -> String {
    let mut s = String::new();
    for ((a, b), p) in spanner.edges() {
        let _ = writeln!(s, "{a} {b} {p}");
    }
    s
}

/// Parses a spanner file; the vertex count comes from the `vertices` header key.
pub fn parse_spanner(text: &str) -> Result<SpannerGraph, FormatError> {
    let manifest = Manifest::parse_header(text);
    let n: usize = field(0, manifest.get("vertices").ok_or_else(|| err(0, "missing `vertices` header"))?)?;
    let mut edges = Vec::new();
    for (line, f) in body_lines(text) {
        if f.len() != 3 {
            return Err(err(line, "expected `id1 id2 provenance`"));
        }
        let (a, b): (usize, usize) = (field(line, f[0])?, field(line, f[1])?);
        if a >= n || b >= n || a == b {
            return Err(err(line, format!("edge ({a}, {b}) invalid for {n} vertices")));
        }
        let p: Provenance = f[2].parse().map_err(|e: String| err(line, e))?;
        edges.push((edge(a, b), p));
    }
    Ok(SpannerGraph::new(n, edges))
}
