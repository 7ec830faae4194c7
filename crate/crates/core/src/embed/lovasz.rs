//! Splitting a graph into classes of bounded internal degree by local search
//! on the potential `Σ_i e(G[V_i]) / (d_i + 1)`.

use crate::error::{invalid, Result};
use crate::graph::{Graph, VertexSet};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DegreeSplit {
    /// `classes[i]` induces maximum degree at most `degrees[i]`.
    pub classes: Vec<VertexSet>,
    pub moves: usize,
    /// `Φ_initial · Π(d_i + 1)`, an upper bound on `moves`.
    pub move_bound: u128,
}

impl DegreeSplit {
    pub fn class_of(&self, v: usize) -> usize {
        self.classes.iter().position(|c| c.contains(v)).expect("classes cover V")
    }
}

/// Every vertex starts in class 0. While some vertex has more than `d_i`
/// neighbours inside its class `i`, the lowest such vertex moves to the class
/// `j` minimising `deg_{V_j}(v) / (d_j + 1)` (lowest `j` on ties). Each move
/// lowers the potential by at least `1 / Π(d_i + 1)`.
pub fn lovasz_partition(g: &Graph, degrees: &[usize]) -> Result<DegreeSplit> {
    let s = degrees.len();
    if s == 0 {
        return invalid("at least one degree bound is required");
    }
    let sum: usize = degrees.iter().sum();
    if sum + s < g.max_degree() + 1 {
        return invalid(format!("degree bounds sum to {sum}, need at least Δ - s + 1 = {} - {s} + 1", g.max_degree()));
    }
    let n = g.n();
    let mut class = vec![0usize; n];
    // inside[v][j] = neighbours of v in class j
    let mut inside: Vec<Vec<usize>> = (0..n)
        .map(|v| {
            let mut row = vec![0; s];
            row[0] = g.neighbors(v).len();
            row
        })
        .collect();
    let prod: u128 = degrees.iter().map(|&d| d as u128 + 1).product();
    let move_bound = g.edge_count() as u128 * prod / (degrees[0] as u128 + 1);
    let mut moves = 0;
    while let Some(v) = (0..n).find(|&v| inside[v][class[v]] > degrees[class[v]]) {
        // deg_j/(d_j+1) < deg_k/(d_k+1)  <=>  deg_j (d_k+1) < deg_k (d_j+1)
        let target =
            (0..s).min_by(|&a, &b| (inside[v][a] * (degrees[b] + 1)).cmp(&(inside[v][b] * (degrees[a] + 1))).then(a.cmp(&b))).unwrap();
        let from = class[v];
        debug_assert_ne!(from, target);
        for u in g.neighbors(v).iter() {
            inside[u][from] -= 1;
            inside[u][target] += 1;
        }
        class[v] = target;
        moves += 1;
    }
    let mut classes = vec![VertexSet::empty(n); s];
    for v in 0..n {
        classes[class[v]].insert(v);
    }
    for (c, &d) in classes.iter().zip(degrees) {
        assert!(g.induced(c)?.max_degree() <= d, "local search ended on a violating split");
    }
    Ok(DegreeSplit { classes, moves, move_bound })
}
