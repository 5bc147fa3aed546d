//! Random-coloring connectors over an abstract ground set `0..nu`.
//!
//! A connector is the union, over `M` independent uniform colorings with
//! `xi` colors, of all edges between items whose colors are consecutive
//! modulo `xi`.

use rand::seq::index;
use rand::Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::graph::{edge, Edge, Graph};
use crate::rng::{substream, Purpose};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConnectorError {
    #[error("invalid connector parameters: {0}")]
    InvalidParams(String),
    #[error("exhaustive check supports at most {max} vertices, got {nu}; use monte_carlo_connector")]
    TooLarge { nu: usize, max: usize },
}

/// Largest vertex count accepted by [`check_connector`].
pub const EXHAUSTIVE_LIMIT: usize = 24;

/// Colors in `1..=xi`, one per item.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Coloring {
    colors: Vec<u32>,
    xi: u32,
}

impl Coloring {
    pub fn new(colors: Vec<u32>, xi: u32) -> Self {
        assert!(xi >= 1, "at least one color");
        assert!(colors.iter().all(|&c| (1..=xi).contains(&c)), "color out of range");
        Self { colors, xi }
    }

    pub fn xi(&self) -> u32 {
        self.xi
    }

    pub fn len(&self) -> usize {
        self.colors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.colors.is_empty()
    }

    pub fn color(&self, v: usize) -> u32 {
        self.colors[v]
    }

    pub fn colors(&self) -> &[u32] {
        &self.colors
    }

    /// Items of each color; index 0 is color 1.
    pub fn classes(&self) -> Vec<Vec<usize>> {
        let mut classes = vec![Vec::new(); self.xi as usize];
        for (v, &c) in self.colors.iter().enumerate() {
            classes[c as usize - 1].push(v);
        }
        classes
    }
}

/// Independent uniform color in `1..=xi` per item, drawn in item order.
pub fn random_coloring<R: Rng + ?Sized>(nu: usize, xi: u32, rng: &mut R) -> Coloring {
    assert!(xi >= 1, "at least one color");
    let colors = (0..nu).map(|_| rng.gen_range(1..=xi)).collect();
    Coloring { colors, xi }
}

/// Whether colors `a` and `b` are consecutive modulo `xi`. With two colors
/// the single class pair counts once; with one color nothing is consecutive.
pub fn consecutive(a: u32, b: u32, xi: u32) -> bool {
    let (lo, hi) = (a.min(b), a.max(b));
    hi == lo + 1 || (xi >= 3 && lo == 1 && hi == xi)
}

/// The class-pair index `t` such that `{a, b} = {t - 1, t}` with color 0
/// standing for `xi`; the smallest such `t`. `None` if not consecutive.
pub fn class_pair_index(a: u32, b: u32, xi: u32) -> Option<u32> {
    if !consecutive(a, b, xi) {
        return None;
    }
    let (lo, hi) = (a.min(b), a.max(b));
    if lo == 1 && hi == xi {
        Some(1)
    } else {
        Some(hi)
    }
}

/// All pairs with consecutive colors, sorted.
pub fn consecutive_color_edges(coloring: &Coloring) -> Vec<Edge> {
    let classes = coloring.classes();
    let xi = coloring.xi as usize;
    let mut edges = Vec::new();
    let mut join = |x: &[usize], y: &[usize]| {
        for &a in x {
            for &b in y {
                edges.push(edge(a, b));
            }
        }
    };
    for t in 1..xi {
        join(&classes[t - 1], &classes[t]);
    }
    if xi >= 3 {
        join(&classes[xi - 1], &classes[0]);
    }
    edges.sort_unstable();
    edges
}

/// Number of distinct colors among `subset`.
pub fn distinct_colors(coloring: &Coloring, subset: &[usize]) -> usize {
    let mut seen = vec![false; coloring.xi as usize + 1];
    let mut count = 0;
    for &v in subset {
        let c = coloring.colors[v] as usize;
        if !seen[c] {
            seen[c] = true;
            count += 1;
        }
    }
    count
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConnectorParams {
    pub nu: usize,
    pub xi: u32,
    pub repetitions: usize,
    pub eps: f64,
    pub c_exp_size: f64,
    pub c_exp_rep: f64,
}

impl ConnectorParams {
    pub const PAPER_EXP_SIZE: f64 = 640.0;
    pub const PAPER_EXP_REP: f64 = 2600.0;

    /// Repetitions `ceil(c_exp_rep / eps^2)` with the default constants.
    pub fn with_default_constants(nu: usize, xi: u32, eps: f64) -> Result<Self, ConnectorError> {
        let repetitions = (Self::PAPER_EXP_REP / (eps * eps)).ceil() as usize;
        Self::new(nu, xi, repetitions, eps, Self::PAPER_EXP_SIZE, Self::PAPER_EXP_REP)
    }

    pub fn new(
        nu: usize,
        xi: u32,
        repetitions: usize,
        eps: f64,
        c_exp_size: f64,
        c_exp_rep: f64,
    ) -> Result<Self, ConnectorError> {
        let p = Self { nu, xi, repetitions, eps, c_exp_size, c_exp_rep };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<(), ConnectorError> {
        let bad = |m: String| Err(ConnectorError::InvalidParams(m));
        if self.nu == 0 {
            return bad("nu must be at least 1".into());
        }
        if (self.xi as usize) < self.nu || (self.xi as usize) > 2 * self.nu {
            return bad(format!("need nu <= xi <= 2 nu, got nu={} xi={}", self.nu, self.xi));
        }
        if !(self.eps > 0.0 && self.eps <= 1.0) {
            return bad(format!("eps must be in (0, 1], got {}", self.eps));
        }
        if !(self.c_exp_size > 0.0 && self.c_exp_rep > 0.0) {
            return bad("constants must be positive".into());
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct ConnectorGraph {
    pub graph: Graph,
    pub colorings: Vec<Coloring>,
}

/// Union of the consecutive-color edges of `params.repetitions` colorings;
/// coloring `j` uses substream `j` of `seed`. Zero repetitions give the
/// empty graph.
pub fn build_connector(params: &ConnectorParams, seed: u64) -> ConnectorGraph {
    let colorings: Vec<Coloring> = (0..params.repetitions)
        .into_par_iter()
        .map(|j| random_coloring(params.nu, params.xi, &mut substream(seed, Purpose::Connector, 0, j as u64)))
        .collect();
    let edges: Vec<Edge> = colorings.par_iter().flat_map_iter(consecutive_color_edges).collect();
    ConnectorGraph { graph: Graph::from_edges(params.nu, edges), colorings }
}

/// `ceil(x)` that ignores rounding noise just above an integer.
fn ceil_robust(x: f64) -> usize {
    (x - 1e-9).ceil().max(0.0) as usize
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ConnectorVerdict {
    Pass,
    /// `t` is the complement of `N(s)`.
    Violation { s: Vec<usize>, t: Vec<usize> },
}

impl ConnectorVerdict {
    pub fn passed(&self) -> bool {
        matches!(self, ConnectorVerdict::Pass)
    }
}

/// Exhaustively checks `|S| >= eps nu  =>  |N(S)| > (1 - eps) nu`. Since
/// `N` is monotone only subsets of size `ceil(eps nu)` are enumerated.
pub fn check_connector(graph: &Graph, eps: f64) -> Result<ConnectorVerdict, ConnectorError> {
    let nu = graph.vertex_count();
    if nu > EXHAUSTIVE_LIMIT {
        return Err(ConnectorError::TooLarge { nu, max: EXHAUSTIVE_LIMIT });
    }
    let s = ceil_robust(eps * nu as f64).max(1);
    if s > nu {
        return Ok(ConnectorVerdict::Pass);
    }
    let mut nbr = vec![0u32; nu];
    for &(a, b) in graph.edges() {
        nbr[a] |= 1 << b;
        nbr[b] |= 1 << a;
    }
    let threshold = (1.0 - eps) * nu as f64 + 1e-9;
    let full: u64 = 1 << nu;
    let mut subset: u64 = (1 << s) - 1;
    while subset < full {
        let mut reach = 0u32;
        let mut bits = subset;
        while bits != 0 {
            reach |= nbr[bits.trailing_zeros() as usize];
            bits &= bits - 1;
        }
        if (reach.count_ones() as f64) <= threshold {
            let members = |mask: u64| (0..nu).filter(|&v| mask >> v & 1 == 1).collect::<Vec<_>>();
            let outside = !(reach as u64) & (full - 1);
            return Ok(ConnectorVerdict::Violation { s: members(subset), t: members(outside) });
        }
        // Next subset with the same popcount.
        let c = subset & subset.wrapping_neg();
        let r = subset + c;
        subset = (((r ^ subset) >> 2) / c) | r;
    }
    Ok(ConnectorVerdict::Pass)
}

/// Fraction of sampled disjoint pairs `(S, T)`, both of size `ceil(eps nu)`,
/// with no edge from `S` to `T`. Zero when `2 ceil(eps nu) > nu`.
pub fn monte_carlo_connector<R: Rng + ?Sized>(graph: &Graph, eps: f64, trials: usize, rng: &mut R) -> f64 {
    let nu = graph.vertex_count();
    let s = ceil_robust(eps * nu as f64).max(1);
    if trials == 0 || 2 * s > nu {
        return 0.0;
    }
    let words = nu.div_ceil(64);
    let mut nbr = vec![0u64; nu * words];
    for &(a, b) in graph.edges() {
        nbr[a * words + b / 64] |= 1 << (b % 64);
        nbr[b * words + a / 64] |= 1 << (a % 64);
    }
    let mut reach = vec![0u64; words];
    let mut bad = 0usize;
    for _ in 0..trials {
        let picked = index::sample(rng, nu, 2 * s).into_vec();
        reach.iter_mut().for_each(|w| *w = 0);
        for &v in &picked[..s] {
            for (r, w) in reach.iter_mut().zip(&nbr[v * words..(v + 1) * words]) {
                *r |= w;
            }
        }
        if picked[s..].iter().all(|&v| reach[v / 64] >> (v % 64) & 1 == 0) {
            bad += 1;
        }
    }
    bad as f64 / trials as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::collections::{BTreeSet, HashMap};

    #[test]
    fn single_item_single_color() {
        let c = random_coloring(1, 1, &mut ChaCha8Rng::seed_from_u64(0));
        assert_eq!(c.colors(), &[1]);
        assert!(consecutive_color_edges(&c).is_empty());
    }

    #[test]
    fn coloring_is_reproducible() {
        let a = random_coloring(100, 7, &mut substream(3, Purpose::Connector, 0, 0));
        let b = random_coloring(100, 7, &mut substream(3, Purpose::Connector, 0, 0));
        assert_eq!(a, b);
    }

    #[test]
    fn color_frequencies_concentrate() {
        let c = random_coloring(10_000, 100, &mut ChaCha8Rng::seed_from_u64(11));
        let sigma = (10_000.0f64 * 0.01 * 0.99).sqrt();
        for class in c.classes() {
            assert!((class.len() as f64 - 100.0).abs() <= 5.0 * sigma, "class size {}", class.len());
        }
    }

    #[test]
    fn wraparound_and_degenerate_color_counts() {
        let tri = Coloring::new(vec![1, 2, 3], 3);
        assert_eq!(consecutive_color_edges(&tri), vec![(0, 1), (0, 2), (1, 2)]);
        assert!(consecutive_color_edges(&Coloring::new(vec![2, 2, 2], 3)).is_empty());
        assert_eq!(consecutive_color_edges(&Coloring::new(vec![1, 2], 2)), vec![(0, 1)]);
        assert!(consecutive_color_edges(&Coloring::new(vec![1, 1], 1)).is_empty());
        assert_eq!(class_pair_index(3, 1, 3), Some(1));
        assert_eq!(class_pair_index(2, 1, 3), Some(2));
        assert_eq!(class_pair_index(1, 2, 2), Some(1));
        assert_eq!(class_pair_index(1, 3, 4), None);
    }

    #[test]
    fn consecutive_edges_match_double_loop() {
        for seed in 0..20 {
            let xi = 2 + seed as u32 % 9;
            let c = random_coloring(50, xi, &mut ChaCha8Rng::seed_from_u64(seed));
            let mut brute = Vec::new();
            for u in 0..50 {
                for v in u + 1..50 {
                    let (a, b) = (c.color(u) as i64, c.color(v) as i64);
                    let diff = (a - b).rem_euclid(xi as i64);
                    if xi > 1 && (diff == 1 || diff == xi as i64 - 1) {
                        brute.push((u, v));
                    }
                }
            }
            assert_eq!(consecutive_color_edges(&c), brute, "xi = {xi}");
        }
    }

    #[test]
    fn single_coloring_is_union_of_complete_bipartite_blocks() {
        let c = random_coloring(40, 6, &mut ChaCha8Rng::seed_from_u64(5));
        let mut blocks: HashMap<(u32, u32), usize> = HashMap::new();
        for (u, v) in consecutive_color_edges(&c) {
            let (a, b) = (c.color(u), c.color(v));
            *blocks.entry((a.min(b), a.max(b))).or_default() += 1;
        }
        let classes = c.classes();
        for ((a, b), count) in blocks {
            assert_eq!(count, classes[a as usize - 1].len() * classes[b as usize - 1].len());
        }
    }

    #[test]
    fn connector_edges_replay_from_stored_colorings() {
        let p = ConnectorParams::new(30, 40, 12, 0.5, 1.0, 1.0).unwrap();
        let g = build_connector(&p, 9);
        assert_eq!(g.colorings.len(), 12);
        for &(u, v) in g.graph.edges() {
            assert!(g.colorings.iter().any(|c| consecutive(c.color(u), c.color(v), c.xi())));
        }
        let union: BTreeSet<Edge> = g.colorings.iter().rev().flat_map(consecutive_color_edges).collect();
        assert_eq!(g.graph.edges(), union.into_iter().collect::<Vec<_>>().as_slice());
    }

    #[test]
    fn zero_repetitions_give_empty_graph() {
        let p = ConnectorParams::new(8, 8, 0, 0.5, 1.0, 1.0).unwrap();
        assert_eq!(build_connector(&p, 1).graph.edge_count(), 0);
    }

    #[test]
    fn params_validation() {
        assert!(ConnectorParams::new(10, 9, 1, 0.5, 1.0, 1.0).is_err());
        assert!(ConnectorParams::new(10, 21, 1, 0.5, 1.0, 1.0).is_err());
        assert!(ConnectorParams::new(10, 20, 1, 0.0, 1.0, 1.0).is_err());
        assert_eq!(ConnectorParams::with_default_constants(16, 16, 0.5).unwrap().repetitions, 10_400);
    }

    #[test]
    fn edge_count_mean_matches_pair_probability() {
        let p = ConnectorParams::new(16, 32, 1, 0.5, 1.0, 1.0).unwrap();
        let total: usize = (0..1000).map(|s| build_connector(&p, s).graph.edge_count()).sum();
        let mean = total as f64 / 1000.0;
        let expected = 16.0 * 15.0 / 2.0 * 2.0 / 32.0;
        assert!((mean - expected).abs() <= 0.05 * expected, "mean {mean} vs {expected}");
    }

    #[test]
    fn complete_and_empty_graphs() {
        for eps in [1.0 / 3.0, 0.5, 0.9] {
            assert!(check_connector(&Graph::complete(6), eps).unwrap().passed());
        }
        match check_connector(&Graph::empty(6), 0.5).unwrap() {
            ConnectorVerdict::Violation { s, t } => {
                assert_eq!(s.len(), 3);
                assert_eq!(t.len(), 6);
            }
            ConnectorVerdict::Pass => panic!("empty graph cannot be a connector"),
        }
        for eps in [0.2, 0.5, 1.0] {
            assert!(!check_connector(&Graph::empty(6), eps).unwrap().passed());
        }
        assert!(matches!(check_connector(&Graph::empty(25), 0.5), Err(ConnectorError::TooLarge { .. })));

        let mut rng = ChaCha8Rng::seed_from_u64(2);
        assert_eq!(monte_carlo_connector(&Graph::complete(20), 0.25, 1000, &mut rng), 0.0);
        assert_eq!(monte_carlo_connector(&Graph::empty(20), 0.25, 1000, &mut rng), 1.0);
    }

    #[test]
    fn violator_is_genuine() {
        // Star: the leaves alone never reach each other.
        let g = Graph::from_edges(8, (1..8).map(|v| (0, v)));
        match check_connector(&g, 0.25).unwrap() {
            ConnectorVerdict::Violation { s, t } => {
                let adj = g.adjacency();
                let reach: BTreeSet<usize> = s.iter().flat_map(|&v| adj[v].iter().copied()).collect();
                assert!(reach.len() as f64 <= 0.75 * 8.0);
                assert!(t.iter().all(|v| !reach.contains(v)));
            }
            ConnectorVerdict::Pass => panic!("star is not a connector at eps = 1/4"),
        }
    }

    /// Subsets `S` of size `s` whose non-neighbors outside `S` number at least `s`.
    fn has_disjoint_violator(g: &Graph, s: usize) -> bool {
        let nu = g.vertex_count();
        let adj = g.adjacency();
        (0u32..1 << nu).filter(|m| m.count_ones() as usize == s).any(|m| {
            let mut reach = 0u32;
            for v in 0..nu {
                if m >> v & 1 == 1 {
                    for &w in &adj[v] {
                        reach |= 1 << w;
                    }
                }
            }
            ((!reach & !m) & ((1 << nu) - 1)).count_ones() as usize >= s
        })
    }

    #[test]
    fn monte_carlo_agrees_with_exhaustive_in_sign() {
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        for seed in 0..24u64 {
            let nu = 8 + (seed as usize % 5);
            let density = [0.15, 0.3, 0.5, 0.8][seed as usize % 4];
            let mut grng = ChaCha8Rng::seed_from_u64(seed);
            let edges: Vec<Edge> = (0..nu)
                .flat_map(|a| (a + 1..nu).map(move |b| (a, b)))
                .filter(|_| grng.gen_bool(density))
                .collect();
            let g = Graph::from_edges(nu, edges);
            let eps = 0.25;
            let s = ceil_robust(eps * nu as f64);
            let rate = monte_carlo_connector(&g, eps, 100_000, &mut rng);
            let exhaustive = check_connector(&g, eps).unwrap();
            if rate > 0.0 {
                assert!(!exhaustive.passed(), "sampled violation but exhaustive passed (seed {seed})");
            }
            assert_eq!(rate > 0.0, has_disjoint_violator(&g, s), "seed {seed}");
        }
    }

    #[test]
    fn distinct_color_counts() {
        let c = Coloring::new(vec![3, 3, 3, 3, 3, 1], 4);
        assert_eq!(distinct_colors(&c, &[0]), 1);
        assert_eq!(distinct_colors(&c, &[0, 1, 2, 3, 4]), 1);
        assert_eq!(distinct_colors(&c, &[0, 5]), 2);
    }
}
