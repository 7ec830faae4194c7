//! Bitset graphs, vertex subsets, vertex weights and red/blue edge colorings.
//!
//! Vertices are dense ids `0..n`. Every adjacency row and every subset is a
//! word-packed bitset over the parent vertex range, so neighbourhood and
//! candidate-set intersections are a handful of `AND`s.

use std::fmt;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Exact rational used for weights, densities and thresholds.
pub type Rational = num_rational::Rational64;

const WORD_BITS: usize = 64;

#[inline]
fn words_for(universe: usize) -> usize {
    universe.div_ceil(WORD_BITS)
}

/// A subset of `0..universe`, stored as a bitset.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VertexSet {
    universe: usize,
    words: Vec<u64>,
}

impl VertexSet {
    pub fn empty(universe: usize) -> Self {
        VertexSet { universe, words: vec![0; words_for(universe)] }
    }

    pub fn full(universe: usize) -> Self {
        let mut s = VertexSet { universe, words: vec![u64::MAX; words_for(universe)] };
        s.trim();
        s
    }

    /// Builds a subset from vertex ids, rejecting ids outside the universe.
    pub fn from_vertices(universe: usize, vertices: impl IntoIterator<Item = usize>) -> Result<Self> {
        let mut s = VertexSet::empty(universe);
        for v in vertices {
            if v >= universe {
                return invalid(format!("vertex {v} outside 0..{universe}"));
            }
            s.insert(v);
        }
        Ok(s)
    }

    /// `{lo, lo+1, .., hi-1}`.
    pub fn range(universe: usize, lo: usize, hi: usize) -> Self {
        let mut s = VertexSet::empty(universe);
        for v in lo..hi.min(universe) {
            s.insert(v);
        }
        s
    }

    fn trim(&mut self) {
        let rem = self.universe % WORD_BITS;
        if rem != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << rem) - 1;
            }
        }
    }

    #[inline]
    pub fn universe(&self) -> usize {
        self.universe
    }

    #[inline]
    pub fn insert(&mut self, v: usize) -> bool {
        assert!(v < self.universe, "vertex {v} outside 0..{}", self.universe);
        let (w, b) = (v / WORD_BITS, v % WORD_BITS);
        let fresh = self.words[w] & (1 << b) == 0;
        self.words[w] |= 1 << b;
        fresh
    }

    #[inline]
    pub fn remove(&mut self, v: usize) -> bool {
        if v >= self.universe {
            return false;
        }
        let (w, b) = (v / WORD_BITS, v % WORD_BITS);
        let present = self.words[w] & (1 << b) != 0;
        self.words[w] &= !(1 << b);
        present
    }

    #[inline]
    pub fn contains(&self, v: usize) -> bool {
        v < self.universe && self.words[v / WORD_BITS] & (1 << (v % WORD_BITS)) != 0
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn clear(&mut self) {
        self.words.iter_mut().for_each(|w| *w = 0);
    }

    pub fn first(&self) -> Option<usize> {
        self.iter().next()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(i, &word)| {
            let mut w = word;
            std::iter::from_fn(move || {
                if w == 0 {
                    None
                } else {
                    let b = w.trailing_zeros() as usize;
                    w &= w - 1;
                    Some(i * WORD_BITS + b)
                }
            })
        })
    }

    pub fn to_vec(&self) -> Vec<usize> {
        self.iter().collect()
    }

    #[inline]
    pub fn intersect_with(&mut self, other: &VertexSet) {
        debug_assert_eq!(self.universe, other.universe);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a &= b;
        }
    }

    #[inline]
    pub fn union_with(&mut self, other: &VertexSet) {
        debug_assert_eq!(self.universe, other.universe);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a |= b;
        }
    }

    #[inline]
    pub fn difference_with(&mut self, other: &VertexSet) {
        debug_assert_eq!(self.universe, other.universe);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a &= !b;
        }
    }

    pub fn intersection(&self, other: &VertexSet) -> VertexSet {
        let mut s = self.clone();
        s.intersect_with(other);
        s
    }

    pub fn union(&self, other: &VertexSet) -> VertexSet {
        let mut s = self.clone();
        s.union_with(other);
        s
    }

    pub fn difference(&self, other: &VertexSet) -> VertexSet {
        let mut s = self.clone();
        s.difference_with(other);
        s
    }

    pub fn complement(&self) -> VertexSet {
        let mut s = VertexSet::full(self.universe);
        s.difference_with(self);
        s
    }

    /// `|self ∩ other|` without allocating.
    #[inline]
    pub fn intersection_len(&self, other: &VertexSet) -> usize {
        debug_assert_eq!(self.universe, other.universe);
        self.words.iter().zip(&other.words).map(|(a, b)| (a & b).count_ones() as usize).sum()
    }

    pub fn is_disjoint(&self, other: &VertexSet) -> bool {
        self.intersection_len(other) == 0
    }

    pub fn is_subset(&self, other: &VertexSet) -> bool {
        self.words.iter().zip(&other.words).all(|(a, b)| a & !b == 0)
    }
}

impl fmt::Debug for VertexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

/// Simple undirected loop-free graph on `0..n`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Graph {
    n: usize,
    adj: Vec<VertexSet>,
}

impl Graph {
    pub fn empty(n: usize) -> Self {
        Graph { n, adj: vec![VertexSet::empty(n); n] }
    }

    pub fn complete(n: usize) -> Self {
        let adj = (0..n)
            .map(|v| {
                let mut row = VertexSet::full(n);
                row.remove(v);
                row
            })
            .collect();
        Graph { n, adj }
    }

    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut g = Graph::empty(n);
        for (u, v) in edges {
            g.add_edge(u, v)?;
        }
        Ok(g)
    }

    pub fn add_edge(&mut self, u: usize, v: usize) -> Result<()> {
        if u >= self.n || v >= self.n {
            return invalid(format!("edge ({u},{v}) outside 0..{}", self.n));
        }
        if u == v {
            return invalid(format!("loop at vertex {u}"));
        }
        self.adj[u].insert(v);
        self.adj[v].insert(u);
        Ok(())
    }

    pub fn remove_edge(&mut self, u: usize, v: usize) {
        if u < self.n && v < self.n {
            self.adj[u].remove(v);
            self.adj[v].remove(u);
        }
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u < self.n && self.adj[u].contains(v)
    }

    #[inline]
    pub fn neighbors(&self, v: usize) -> &VertexSet {
        &self.adj[v]
    }

    pub fn vertices(&self) -> VertexSet {
        VertexSet::full(self.n)
    }

    pub fn degree(&self, v: usize) -> Result<usize> {
        if v >= self.n {
            return invalid(format!("vertex {v} outside 0..{}", self.n));
        }
        Ok(self.adj[v].len())
    }

    pub fn degrees(&self) -> Vec<usize> {
        self.adj.iter().map(VertexSet::len).collect()
    }

    pub fn max_degree(&self) -> usize {
        self.adj.iter().map(VertexSet::len).max().unwrap_or(0)
    }

    pub fn min_degree(&self) -> usize {
        self.adj.iter().map(VertexSet::len).min().unwrap_or(0)
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(VertexSet::len).sum::<usize>() / 2
    }

    /// All edges `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.edge_count());
        for u in 0..self.n {
            for v in self.adj[u].iter().filter(|&v| v > u) {
                out.push((u, v));
            }
        }
        out
    }

    fn check_subset(&self, x: &VertexSet) -> Result<()> {
        if x.universe() != self.n {
            return invalid(format!("subset over 0..{} used with a graph on {} vertices", x.universe(), self.n));
        }
        Ok(())
    }

    /// Common neighbourhood of a nonempty subset.
    pub fn common_neighbors(&self, x: &VertexSet) -> Result<VertexSet> {
        self.check_subset(x)?;
        if x.is_empty() {
            return invalid("codegree of the empty set is undefined");
        }
        let mut common = VertexSet::full(self.n);
        for v in x.iter() {
            common.intersect_with(&self.adj[v]);
        }
        Ok(common)
    }

    pub fn codegree(&self, x: &VertexSet) -> Result<usize> {
        Ok(self.common_neighbors(x)?.len())
    }

    /// Number of pairs `(x, y) ∈ X × Y` joined by an edge.
    pub fn edges_between(&self, x: &VertexSet, y: &VertexSet) -> usize {
        x.iter().map(|v| self.adj[v].intersection_len(y)).sum()
    }

    /// `e(X,Y) / (|X||Y|)` for disjoint nonempty `X`, `Y`.
    pub fn pair_density(&self, x: &VertexSet, y: &VertexSet) -> Result<Rational> {
        self.check_subset(x)?;
        self.check_subset(y)?;
        if x.is_empty() || y.is_empty() {
            return invalid("pair density needs nonempty sets");
        }
        if !x.is_disjoint(y) {
            return invalid("pair density needs disjoint sets");
        }
        let e = self.edges_between(x, y) as i64;
        Ok(Rational::new(e, (x.len() * y.len()) as i64))
    }

    /// Induced subgraph on `x`, relabelled by the order-preserving map from sorted `x`.
    pub fn induced(&self, x: &VertexSet) -> Result<Graph> {
        self.check_subset(x)?;
        let verts = x.to_vec();
        let mut index = vec![usize::MAX; self.n];
        for (i, &v) in verts.iter().enumerate() {
            index[v] = i;
        }
        let mut g = Graph::empty(verts.len());
        for (i, &v) in verts.iter().enumerate() {
            for u in self.adj[v].intersection(x).iter() {
                let j = index[u];
                if j > i {
                    g.adj[i].insert(j);
                    g.adj[j].insert(i);
                }
            }
        }
        Ok(g)
    }

    pub fn complement(&self) -> Graph {
        let adj = (0..self.n)
            .map(|v| {
                let mut row = self.adj[v].complement();
                row.remove(v);
                row
            })
            .collect();
        Graph { n: self.n, adj }
    }

    /// Proper 2-colouring by BFS (`false` side first), or `None` if an odd cycle exists.
    pub fn bipartition(&self) -> Option<Vec<bool>> {
        let mut side: Vec<Option<bool>> = vec![None; self.n];
        let mut queue = std::collections::VecDeque::new();
        for s in 0..self.n {
            if side[s].is_some() {
                continue;
            }
            side[s] = Some(false);
            queue.push_back(s);
            while let Some(v) = queue.pop_front() {
                let sv = side[v].unwrap();
                for u in self.adj[v].iter() {
                    match side[u] {
                        None => {
                            side[u] = Some(!sv);
                            queue.push_back(u);
                        }
                        Some(su) if su == sv => return None,
                        _ => {}
                    }
                }
            }
        }
        Some(side.into_iter().map(|s| s.unwrap_or(false)).collect())
    }

    /// Whether `self` is a subgraph of `other` on the same vertex set.
    pub fn is_spanning_subgraph_of(&self, other: &Graph) -> bool {
        self.n == other.n && self.adj.iter().zip(&other.adj).all(|(a, b)| a.is_subset(b))
    }
}

impl fmt::Debug for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Graph(n={}, edges={:?})", self.n, self.edges())
    }
}

/// A graph with an exact weight in `[0, 1]` on every vertex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightedGraph {
    graph: Graph,
    weights: Vec<Rational>,
}

impl WeightedGraph {
    pub fn new(graph: Graph, weights: Vec<Rational>) -> Result<Self> {
        if weights.len() != graph.n() {
            return invalid(format!("{} weights for a graph on {} vertices", weights.len(), graph.n()));
        }
        if let Some((v, w)) = weights.iter().enumerate().find(|(_, w)| **w < Rational::zero() || **w > Rational::one()) {
            return invalid(format!("weight {w} of vertex {v} outside [0,1]"));
        }
        Ok(WeightedGraph { graph, weights })
    }

    pub fn unit(graph: Graph) -> Self {
        let weights = vec![Rational::one(); graph.n()];
        WeightedGraph { graph, weights }
    }

    pub fn uniform(graph: Graph, w: Rational) -> Result<Self> {
        let n = graph.n();
        WeightedGraph::new(graph, vec![w; n])
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn weights(&self) -> &[Rational] {
        &self.weights
    }

    pub fn weight(&self, v: usize) -> Rational {
        self.weights[v]
    }

    pub fn total_weight(&self) -> Rational {
        self.weights.iter().copied().sum()
    }

    pub fn weight_of(&self, x: &VertexSet) -> Rational {
        x.iter().map(|v| self.weights[v]).sum()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Color {
    Red,
    Blue,
}

impl Color {
    pub const BOTH: [Color; 2] = [Color::Red, Color::Blue];

    pub fn other(self) -> Color {
        match self {
            Color::Red => Color::Blue,
            Color::Blue => Color::Red,
        }
    }

    pub fn letter(self) -> char {
        match self {
            Color::Red => 'R',
            Color::Blue => 'B',
        }
    }
}

impl fmt::Display for Color {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Color::Red => "red",
            Color::Blue => "blue",
        })
    }
}

/// Red/blue assignment on the edges of a host graph. Non-edges are uncoloured.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct EdgeColoring {
    host: Graph,
    red: Graph,
    blue: Graph,
}

impl EdgeColoring {
    pub fn monochromatic(host: Graph, color: Color) -> Self {
        let empty = Graph::empty(host.n());
        let (red, blue) = match color {
            Color::Red => (host.clone(), empty),
            Color::Blue => (empty, host.clone()),
        };
        EdgeColoring { host, red, blue }
    }

    /// Colours every host edge `(u, v)`, `u < v`, by `color(u, v)`.
    pub fn from_fn(host: Graph, mut color: impl FnMut(usize, usize) -> Color) -> Self {
        let mut red = Graph::empty(host.n());
        let mut blue = Graph::empty(host.n());
        for (u, v) in host.edges() {
            let g = match color(u, v) {
                Color::Red => &mut red,
                Color::Blue => &mut blue,
            };
            g.adj[u].insert(v);
            g.adj[v].insert(u);
        }
        EdgeColoring { host, red, blue }
    }

    /// Host edges listed in `red_edges` are red, every other host edge is blue.
    pub fn with_red_edges(host: Graph, red_edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut red = Graph::empty(host.n());
        for (u, v) in red_edges {
            if !host.has_edge(u, v) {
                return invalid(format!("red edge ({u},{v}) is not a host edge"));
            }
            red.add_edge(u, v)?;
        }
        let mut blue = host.clone();
        for (u, v) in red.edges() {
            blue.remove_edge(u, v);
        }
        Ok(EdgeColoring { host, red, blue })
    }

    /// Builds a colouring from its two colour classes; they must be edge-disjoint.
    pub fn from_color_classes(red: Graph, blue: Graph) -> Result<Self> {
        if red.n() != blue.n() {
            return invalid("colour classes on different vertex counts");
        }
        let mut host = red.clone();
        for (u, v) in blue.edges() {
            if red.has_edge(u, v) {
                return invalid(format!("edge ({u},{v}) is both red and blue"));
            }
            host.add_edge(u, v)?;
        }
        Ok(EdgeColoring { host, red, blue })
    }

    pub fn host(&self) -> &Graph {
        &self.host
    }

    pub fn n(&self) -> usize {
        self.host.n()
    }

    pub fn color(&self, u: usize, v: usize) -> Option<Color> {
        if self.red.has_edge(u, v) {
            Some(Color::Red)
        } else if self.blue.has_edge(u, v) {
            Some(Color::Blue)
        } else {
            None
        }
    }

    /// Borrowed colour class.
    pub fn class(&self, which: Color) -> &Graph {
        match which {
            Color::Red => &self.red,
            Color::Blue => &self.blue,
        }
    }

    pub fn color_subgraph(&self, which: Color) -> Graph {
        self.class(which).clone()
    }

    pub fn swapped(&self) -> EdgeColoring {
        EdgeColoring { host: self.host.clone(), red: self.blue.clone(), blue: self.red.clone() }
    }

    pub fn induced(&self, x: &VertexSet) -> Result<EdgeColoring> {
        Ok(EdgeColoring { host: self.host.induced(x)?, red: self.red.induced(x)?, blue: self.blue.induced(x)? })
    }
}

impl fmt::Debug for EdgeColoring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "EdgeColoring(n={}, red={:?}, blue={:?})", self.n(), self.red.edges(), self.blue.edges())
    }
}

/// `⌈q · k⌉` for a nonnegative rational `q`.
pub fn ceil_mul(q: Rational, k: usize) -> usize {
    let v = q * Rational::from_integer(k as i64);
    v.ceil().to_integer().max(0) as usize
}

/// `⌊q · k⌋` for a nonnegative rational `q`.
pub fn floor_mul(q: Rational, k: usize) -> usize {
    let v = q * Rational::from_integer(k as i64);
    v.floor().to_integer().max(0) as usize
}
