//! Fixtures shared by the benchmarks.

use ftd_core::{gen_gnp, uncovered_edges, Graph, TriangleIndex};

/// First `G(n, p)` with `p = sqrt(np2 / n)` and every edge in a triangle.
pub fn covered_graph(n: usize, np2: f64) -> (Graph, TriangleIndex) {
    let p = (np2 / n as f64).sqrt().min(1.0);
    (0..)
        .map(|s| gen_gnp(n, p, s))
        .map(|g| {
            let ti = TriangleIndex::build(&g);
            (g, ti)
        })
        .find(|(g, ti)| uncovered_edges(g, ti).is_empty())
        .expect("some seed gives a covered graph")
}
