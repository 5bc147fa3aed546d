//! Fault-tolerant sparse spanners of disk intersection graphs.
//!
//! The crate builds the arrangement of disk boundaries, extracts edges with
//! shallow witnesses, combines them over random color classes into a sparse
//! subgraph, and checks that subgraph against vertex-deletion attacks.

pub mod arrangement;
pub mod attack;
pub mod bench;
mod broadphase;
pub mod connector;
pub mod generate;
pub mod geometry;
pub mod graph;
pub mod io;
pub mod rng;
pub mod sparsifier;

pub use arrangement::{build_arrangement, shallow_edges, shallow_edges_bipartite, Arrangement, WitnessedEdge};
pub use geometry::{Disk, DiskInstance, GeometryError, Point};
pub use graph::{components_after_attack, intersection_graph, Graph};
