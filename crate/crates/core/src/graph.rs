//! Undirected simple graphs over `0..n`, disjoint-set union, and component
//! labelings after vertex deletion.

use std::collections::BTreeSet;

use crate::broadphase;
use crate::geometry::DiskInstance;

/// Undirected edge with `.0 < .1`.
pub type Edge = (usize, usize);

#[inline]
pub fn edge(a: usize, b: usize) -> Edge {
    if a < b {
        (a, b)
    } else {
        (b, a)
    }
}

/// Simple undirected graph on vertices `0..n`; edges sorted and unique.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Graph {
    n: usize,
    edges: Vec<Edge>,
}

impl Graph {
    /// Normalizes, sorts and deduplicates. Self-loops are dropped.
    pub fn from_edges<I: IntoIterator<Item = Edge>>(n: usize, edges: I) -> Self {
        let mut edges: Vec<Edge> = edges
            .into_iter()
            .filter(|&(a, b)| a != b)
            .map(|(a, b)| edge(a, b))
            .collect();
        edges.sort_unstable();
        edges.dedup();
        if let Some(&(_, b)) = edges.iter().max_by_key(|e| e.1) {
            assert!(b < n, "edge endpoint {b} out of range for {n} vertices");
        }
        Self { n, edges }
    }

    pub fn complete(n: usize) -> Self {
        let edges = (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).collect();
        Self { n, edges }
    }

    pub fn empty(n: usize) -> Self {
        Self { n, edges: Vec::new() }
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn contains_edge(&self, a: usize, b: usize) -> bool {
        self.edges.binary_search(&edge(a, b)).is_ok()
    }

    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.n];
        for &(a, b) in &self.edges {
            adj[a].push(b);
            adj[b].push(a);
        }
        adj
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.n];
        for &(a, b) in &self.edges {
            deg[a] += 1;
            deg[b] += 1;
        }
        deg
    }

    /// Subgraph induced on `vertices`, relabelled to `0..vertices.len()` in the given order.
    pub fn induced(&self, vertices: &[usize]) -> Graph {
        let mut local = vec![usize::MAX; self.n];
        for (i, &v) in vertices.iter().enumerate() {
            local[v] = i;
        }
        let edges = self
            .edges
            .iter()
            .filter(|&&(a, b)| local[a] != usize::MAX && local[b] != usize::MAX)
            .map(|&(a, b)| (local[a], local[b]));
        Graph::from_edges(vertices.len(), edges)
    }

    pub fn is_subgraph_of(&self, other: &Graph) -> bool {
        self.n == other.n && self.edges.iter().all(|e| other.edges.binary_search(e).is_ok())
    }
}

impl AsRef<Graph> for Graph {
    fn as_ref(&self) -> &Graph {
        self
    }
}

/// The intersection graph: an edge for every pair of intersecting disks.
pub fn intersection_graph(instance: &DiskInstance) -> Graph {
    let disks = instance.disks();
    let edges = broadphase::overlapping_pairs(disks, 0.0)
        .into_iter()
        .map(|(i, j)| edge(disks[i].id, disks[j].id));
    Graph::from_edges(disks.len(), edges)
}

/// Union by rank with path compression.
#[derive(Debug, Clone)]
pub struct DisjointSet {
    parent: Vec<usize>,
    rank: Vec<u8>,
}

impl DisjointSet {
    pub fn new(n: usize) -> Self {
        Self { parent: (0..n).collect(), rank: vec![0; n] }
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        let mut root = x;
        while self.parent[root] != root {
            root = self.parent[root];
        }
        while self.parent[x] != root {
            let next = self.parent[x];
            self.parent[x] = root;
            x = next;
        }
        root
    }

    /// Returns `true` if the two sets were distinct.
    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (mut a, mut b) = (self.find(a), self.find(b));
        if a == b {
            return false;
        }
        if self.rank[a] < self.rank[b] {
            std::mem::swap(&mut a, &mut b);
        }
        self.parent[b] = a;
        if self.rank[a] == self.rank[b] {
            self.rank[a] += 1;
        }
        true
    }
}

/// Component label per vertex; `None` for deleted vertices. Labels are
/// dense, assigned in order of each component's smallest vertex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComponentLabels {
    pub labels: Vec<Option<usize>>,
    pub count: usize,
}

impl ComponentLabels {
    pub fn label(&self, v: usize) -> Option<usize> {
        self.labels[v]
    }

    /// Components as sorted vertex lists, ordered by smallest member.
    pub fn partition(&self) -> Vec<Vec<usize>> {
        let mut parts = vec![Vec::new(); self.count];
        for (v, l) in self.labels.iter().enumerate() {
            if let Some(l) = l {
                parts[*l].push(v);
            }
        }
        parts
    }
}

/// Connected components of the graph with the vertices of `deleted` removed.
pub fn components_after_attack(graph: &Graph, deleted: &BTreeSet<usize>) -> ComponentLabels {
    let n = graph.vertex_count();
    let alive: Vec<bool> = (0..n).map(|v| !deleted.contains(&v)).collect();
    let mut dsu = DisjointSet::new(n);
    for &(a, b) in graph.edges() {
        if alive[a] && alive[b] {
            dsu.union(a, b);
        }
    }
    let mut root_label = vec![usize::MAX; n];
    let mut labels = vec![None; n];
    let mut count = 0;
    for v in 0..n {
        if !alive[v] {
            continue;
        }
        let r = dsu.find(v);
        if root_label[r] == usize::MAX {
            root_label[r] = count;
            count += 1;
        }
        labels[v] = Some(root_label[r]);
    }
    ComponentLabels { labels, count }
}
