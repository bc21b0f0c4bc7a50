//! Inputs shared by the benchmarks.

use graphlap::{GraphBuilder, GraphFunction, VertexId, WeightedGraph};

/// An `n x n` grid with weights and conductances varying smoothly in position.
pub fn grid(n: u64) -> WeightedGraph {
    let id = |i: u64, j: u64| i * n + j;
    let mut b = GraphBuilder::new();
    for i in 0..n {
        for j in 0..n {
            b.add_vertex(id(i, j), 1.0 + ((i + 2 * j) % 5) as f64 * 0.25);
            if i > 0 {
                b.add_edge(id(i - 1, j), id(i, j), 1.0 + (j % 3) as f64);
            }
            if j > 0 {
                b.add_edge(id(i, j - 1), id(i, j), 1.0 + (i % 4) as f64 * 0.5);
            }
        }
    }
    b.build().expect("grid is well formed")
}

/// A deterministic oscillating function on every vertex of `g`.
pub fn wave(g: &WeightedGraph) -> GraphFunction {
    g.vertices().map(|x: VertexId| (x, (x as f64 * 0.37).sin())).collect()
}
