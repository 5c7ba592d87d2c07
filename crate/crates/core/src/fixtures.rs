//! Small graphs with hand-checkable stationary distributions.

use crate::graph::WeightedDigraph;

/// Four-page toy site: `1→4, 2→1, 2→3, 3→2, 3→4, 4→2`, unit weights.
///
/// Loading this text indexes the pages in first-appearance order
/// (`1, 4, 2, 3`); [`toy_graph`] indexes them by page number instead.
pub const TOY_EDGE_LIST: &str = "1\t4\n2\t1\n2\t3\n3\t2\n3\t4\n4\t2\n";

/// The toy site with page `k` at index `k - 1`.
///
/// Its stationary distribution is `(2, 4, 2, 3) / 11`.
pub fn toy_graph() -> WeightedDigraph {
    let edges = [(0, 3), (1, 0), (1, 2), (2, 1), (2, 3), (3, 1)].map(|(s, d)| (s, d, 1.0));
    let labels = (1..=4).map(|k| k.to_string()).collect();
    WeightedDigraph::from_edges(4, edges, Some(labels))
        .expect("toy graph is valid")
        .0
}

/// Directed cycle `0 → 1 → … → n-1 → 0` with unit weights and numeric labels.
pub fn cycle(n: usize) -> WeightedDigraph {
    let edges = (0..n).map(|i| (i, (i + 1) % n, 1.0));
    WeightedDigraph::from_edges(n, edges, None)
        .expect("cycle is valid")
        .0
}
