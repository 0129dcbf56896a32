//! Hop-bounded maximum group friending on heterogeneous social graphs.
//!
//! A graph carries two disjoint symmetric relations over the same
//! vertices: unweighted friend edges and weighted potential edges. The
//! problem is to pick a group of at least `p` vertices, every pair within
//! `h` friend hops, maximizing the average potential-edge weight inside
//! the group. The crate provides an exact enumerator, the MaxGF
//! approximation solver, link prediction to derive potential edges, and a
//! sweep harness with FeaRatio/ObjRatio metrics.

pub mod eval;
pub mod exact;
pub mod graph;
pub mod linkpred;
pub mod maxgf;
pub mod solution;

pub use graph::{parse_graph, Group, HeteroGraph, Query, VertexId};
pub use solution::{Solution, SolutionDocument};

#[doc(hidden)]
pub mod test_fixtures {
    use crate::graph::{parse_graph, HeteroGraph};

    /// The five-vertex desk example used across the test suite.
    pub const GRAPH_X: &str = "\
# desk example
F 1 2
F 2 3
F 3 4
F 4 5
F 2 4
P 1 3 0.9
P 1 4 0.5
P 3 5 0.8
P 1 5 0.2
";

    pub fn graph_x() -> HeteroGraph {
        parse_graph(GRAPH_X).expect("fixture is well-formed")
    }
}
