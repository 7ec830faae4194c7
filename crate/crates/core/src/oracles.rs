//! Exhaustive small-case oracles for the Ramsey number `r(G)`, the weighted
//! Ramsey number `r̂(G,w)` and the stable Ramsey number `r̂_ε(G,w)`.
//!
//! Colourings are enumerated depth-first over the host edges in the order
//! `(0,1), (0,2), (1,2), (0,3), ...`, red before blue. A branch is cut as
//! soon as the class that just grew contains the target, since every
//! completion then contains it too. The first colouring in this order that
//! avoids the target is the witness.

use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::error::{invalid, Result};
use crate::generators::min_degree_threshold;
use crate::graph::{Color, EdgeColoring, Graph, Rational, WeightedGraph};
use crate::morphisms::{find_capacity_homomorphism, find_weighted_embedding, CapacityProfile, VertexMap};

pub const RAMSEY_HARD_CAP: usize = 8;
pub const STABLE_HARD_CAP: usize = 6;
/// Prefix length at which the colouring tree is split into parallel jobs.
const SPLIT_DEPTH: usize = 10;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OracleValue {
    Value(usize),
    /// No arrival at any `n <= n_max`.
    Exceeds(usize),
    /// No arrival, and the chromatic-number criterion says none ever comes.
    InfiniteSuspected(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CertificateMode {
    Exhaustive,
    /// Colour-swap symmetry (and host isomorphism for the stable oracle)
    /// removed before enumeration.
    SymmetryPruned,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OracleResult {
    pub value: OracleValue,
    /// A colouring with no monochromatic copy at the largest `n` that failed.
    pub witness: Option<EdgeColoring>,
    pub certificate_mode: CertificateMode,
}

#[derive(Clone, Debug)]
pub struct OracleConfig {
    pub n_max: usize,
    pub workers: usize,
    pub iso_prune: bool,
}

impl OracleConfig {
    pub fn new(n_max: usize) -> Self {
        OracleConfig { n_max, workers: 1, iso_prune: true }
    }

    pub fn workers(mut self, workers: usize) -> Self {
        self.workers = workers;
        self
    }

    pub fn iso_prune(mut self, on: bool) -> Self {
        self.iso_prune = on;
        self
    }

    fn mode(&self) -> CertificateMode {
        if self.iso_prune {
            CertificateMode::SymmetryPruned
        } else {
            CertificateMode::Exhaustive
        }
    }

    fn pool(&self) -> Result<rayon::ThreadPool> {
        rayon::ThreadPoolBuilder::new()
            .num_threads(self.workers.max(1))
            .build()
            .map_err(|e| crate::Error::InvalidInput(format!("thread pool: {e}")))
    }
}

type Contains<'a> = dyn Fn(&Graph) -> bool + Sync + 'a;

/// Host edges in vertex-by-vertex order.
fn edge_order(host: &Graph) -> Vec<(usize, usize)> {
    let mut e = host.edges();
    e.sort_by_key(|&(u, v)| (v, u));
    e
}

struct ColoringSearch<'a> {
    n: usize,
    edges: Vec<(usize, usize)>,
    contains: &'a Contains<'a>,
}

impl ColoringSearch<'_> {
    fn classes(&self, prefix: &[Color]) -> (Graph, Graph) {
        let mut red = Graph::empty(self.n);
        let mut blue = Graph::empty(self.n);
        for (&(u, v), &c) in self.edges.iter().zip(prefix) {
            let g = if c == Color::Red { &mut red } else { &mut blue };
            g.add_edge(u, v).expect("host edge");
        }
        (red, blue)
    }

    /// Surviving colour prefixes of length `depth`, in search order.
    fn prefixes(&self, depth: usize, first_red_only: bool) -> Vec<Vec<Color>> {
        fn rec(
            s: &ColoringSearch,
            depth: usize,
            first_red_only: bool,
            red: &mut Graph,
            blue: &mut Graph,
            cur: &mut Vec<Color>,
            out: &mut Vec<Vec<Color>>,
        ) {
            let i = cur.len();
            if i == depth {
                out.push(cur.clone());
                return;
            }
            let (u, v) = s.edges[i];
            let colors: &[Color] = if i == 0 && first_red_only { &[Color::Red] } else { &Color::BOTH };
            for &c in colors {
                let g = if c == Color::Red { &mut *red } else { &mut *blue };
                g.add_edge(u, v).expect("host edge");
                let grown = if c == Color::Red { &*red } else { &*blue };
                if !(s.contains)(grown) {
                    cur.push(c);
                    rec(s, depth, first_red_only, red, blue, cur, out);
                    cur.pop();
                }
                let g = if c == Color::Red { &mut *red } else { &mut *blue };
                g.remove_edge(u, v);
            }
        }
        let mut out = Vec::new();
        let (mut red, mut blue) = self.classes(&[]);
        rec(self, depth, first_red_only, &mut red, &mut blue, &mut Vec::new(), &mut out);
        out
    }

    fn dfs(&self, i: usize, red: &mut Graph, blue: &mut Graph) -> Option<EdgeColoring> {
        if i == self.edges.len() {
            return Some(EdgeColoring::from_color_classes(red.clone(), blue.clone()).expect("disjoint classes"));
        }
        let (u, v) = self.edges[i];
        for c in Color::BOTH {
            let grown = if c == Color::Red { &mut *red } else { &mut *blue };
            grown.add_edge(u, v).expect("host edge");
            let cut = (self.contains)(grown);
            if !cut {
                if let Some(w) = self.dfs(i + 1, red, blue) {
                    return Some(w);
                }
            }
            let grown = if c == Color::Red { &mut *red } else { &mut *blue };
            grown.remove_edge(u, v);
        }
        None
    }
}

/// First colouring of `host` (in search order) with no class containing the
/// target, or `None` if every colouring has one.
fn first_bad_coloring(host: &Graph, contains: &Contains, cfg: &OracleConfig, pool: &rayon::ThreadPool) -> Option<EdgeColoring> {
    if contains(&Graph::empty(host.n())) {
        return None;
    }
    let search = ColoringSearch { n: host.n(), edges: edge_order(host), contains };
    let depth = search.edges.len().min(SPLIT_DEPTH);
    // Swapping colours maps bad colourings to bad colourings, so a bad
    // colouring exists iff one exists with the first edge red. Red is
    // searched first anyway, so the witness does not change.
    let prefixes = search.prefixes(depth, cfg.iso_prune);
    pool.install(|| {
        prefixes.par_iter().find_map_first(|p| {
            let (mut red, mut blue) = search.classes(p);
            search.dfs(p.len(), &mut red, &mut blue)
        })
    })
}

fn check_cap(n_max: usize, cap: usize) -> Result<()> {
    if n_max > cap {
        return invalid(format!("n_max {n_max} exceeds the hard cap {cap}"));
    }
    Ok(())
}

fn complete_host_oracle(contains: &Contains, cfg: &OracleConfig) -> Result<OracleResult> {
    check_cap(cfg.n_max, RAMSEY_HARD_CAP)?;
    let pool = cfg.pool()?;
    let mut witness = None;
    for n in 1..=cfg.n_max {
        match first_bad_coloring(&Graph::complete(n), contains, cfg, &pool) {
            Some(c) => witness = Some(c),
            None => {
                return Ok(OracleResult { value: OracleValue::Value(n), witness, certificate_mode: cfg.mode() });
            }
        }
    }
    Ok(OracleResult { value: OracleValue::Exceeds(cfg.n_max), witness, certificate_mode: cfg.mode() })
}

/// Injective copy of `g` in `h`: vertices of `g` are placed in breadth-first
/// order, each onto an unused common neighbour of its placed neighbours.
pub fn find_subgraph(g: &Graph, h: &Graph) -> Option<VertexMap> {
    fn rec(g: &Graph, h: &Graph, order: &[usize], i: usize, img: &mut [usize], used: &mut crate::VertexSet) -> bool {
        if i == order.len() {
            return true;
        }
        let v = order[i];
        let mut cand = used.complement();
        for u in g.neighbors(v).iter() {
            if img[u] != usize::MAX {
                cand.intersect_with(h.neighbors(img[u]));
            }
        }
        for t in cand.iter() {
            if h.degree(t).unwrap() < g.neighbors(v).len() {
                continue;
            }
            img[v] = t;
            used.insert(t);
            if rec(g, h, order, i + 1, img, used) {
                return true;
            }
            used.remove(t);
            img[v] = usize::MAX;
        }
        false
    }
    if g.n() > h.n() || g.edge_count() > h.edge_count() {
        return None;
    }
    let mut order = Vec::with_capacity(g.n());
    let mut seen = vec![false; g.n()];
    for s in 0..g.n() {
        if seen[s] {
            continue;
        }
        seen[s] = true;
        let mut head = order.len();
        order.push(s);
        while head < order.len() {
            let v = order[head];
            head += 1;
            for u in g.neighbors(v).iter() {
                if !seen[u] {
                    seen[u] = true;
                    order.push(u);
                }
            }
        }
    }
    let mut img = vec![usize::MAX; g.n()];
    let mut used = crate::VertexSet::empty(h.n());
    rec(g, h, &order, 0, &mut img, &mut used).then(|| VertexMap::new(img, h.n()).expect("in range"))
}

/// `r(G)` over complete hosts `K_1..K_{n_max}`, by injective copies.
pub fn ramsey_number(g: &Graph, cfg: &OracleConfig) -> Result<OracleResult> {
    let contains = |class: &Graph| find_subgraph(g, class).is_some();
    complete_host_oracle(&contains, cfg)
}

fn weighted_contains(gw: &WeightedGraph) -> impl Fn(&Graph) -> bool + Sync + '_ {
    let profile = CapacityProfile::weights(gw);
    move |class: &Graph| find_capacity_homomorphism(gw.graph(), class, &profile, None).expect("dimensions checked").found().is_some()
}

/// `r̂(G,w)` over complete hosts, by weight-capped homomorphisms.
pub fn weighted_ramsey(gw: &WeightedGraph, cfg: &OracleConfig) -> Result<OracleResult> {
    complete_host_oracle(&weighted_contains(gw), cfg)
}

/// A monochromatic weighted embedding, red tried first.
pub fn mono_copy_search(c: &EdgeColoring, gw: &WeightedGraph) -> Result<Option<(Color, VertexMap)>> {
    for col in Color::BOTH {
        if let Some(f) = find_weighted_embedding(gw, c.class(col))? {
            return Ok(Some((col, f)));
        }
    }
    Ok(None)
}

/// Smallest number of colours properly colouring `g`.
pub fn chromatic_number(g: &Graph) -> usize {
    fn colorable(g: &Graph, k: usize, v: usize, col: &mut [usize]) -> bool {
        if v == g.n() {
            return true;
        }
        // Colours beyond the largest used so far are interchangeable.
        let limit = col[..v].iter().map(|&c| c + 1).max().unwrap_or(0).min(k - 1);
        for c in 0..=limit {
            if g.neighbors(v).iter().filter(|&u| u < v).all(|u| col[u] != c) {
                col[v] = c;
                if colorable(g, k, v + 1, col) {
                    return true;
                }
            }
        }
        false
    }
    if g.n() == 0 {
        return 0;
    }
    let mut col = vec![0; g.n()];
    (1..=g.n()).find(|&k| colorable(g, k, 0, &mut col)).unwrap()
}

/// True when `eps >= 1/(r(K_χ) - 1)`, i.e. a balanced blow-up of a bad
/// colouring of `K_{r(K_χ)-1}` defeats every `n`.
pub fn stable_is_infinite(g: &Graph, eps: Rational) -> bool {
    let chi = chromatic_number(g);
    let r_clique: i64 = match chi {
        0 | 1 => return false,
        2 => 2,
        3 => 6,
        4 => 18,
        // r(K_5) >= 43, so eps >= 1/42 already suffices.
        _ => 43,
    };
    eps >= Rational::new(1, r_clique - 1)
}

/// Bitmask of the edge set under the vertex-by-vertex edge indexing.
fn edge_mask(g: &Graph, perm: &[usize]) -> u64 {
    let mut m = 0u64;
    for (u, v) in g.edges() {
        let (a, b) = {
            let (x, y) = (perm[u], perm[v]);
            if x < y {
                (x, y)
            } else {
                (y, x)
            }
        };
        m |= 1 << (b * (b - 1) / 2 + a);
    }
    m
}

fn next_permutation(p: &mut [usize]) -> bool {
    let Some(i) = (1..p.len()).rev().find(|&i| p[i - 1] < p[i]) else {
        return false;
    };
    let j = (i..p.len()).rev().find(|&j| p[j] > p[i - 1]).unwrap();
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

/// Isomorphism-invariant code: the least edge mask over all relabelings.
/// Intended for `n <= 8`.
pub fn canonical_code(g: &Graph) -> u64 {
    assert!(g.n() <= 11, "canonical_code enumerates n! relabelings");
    let mut perm: Vec<usize> = (0..g.n()).collect();
    let mut best = edge_mask(g, &perm);
    while next_permutation(&mut perm) {
        best = best.min(edge_mask(g, &perm));
    }
    best
}

/// One representative per isomorphism class of graphs on `n <= 6` vertices,
/// in order of first appearance among edge masks.
pub fn nonisomorphic_graphs(n: usize) -> Vec<Graph> {
    assert!(n <= 6, "enumeration of 2^(n choose 2) graphs");
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|v| (0..v).map(move |u| (u, v))).collect();
    let mut seen = std::collections::HashSet::new();
    let mut out = Vec::new();
    for mask in 0u64..1 << pairs.len() {
        let g = Graph::from_edges(n, pairs.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &e)| e)).expect("valid pairs");
        if seen.insert(canonical_code(&g)) {
            out.push(g);
        }
    }
    out
}

/// Edge-maximal graphs on `n` vertices with maximum degree at most `d`.
fn maximal_bounded_degree(n: usize, d: usize, dedup: bool) -> Vec<Graph> {
    fn rec(i: usize, pairs: &[(usize, usize)], d: usize, g: &mut Graph, deg: &mut [usize], out: &mut Vec<Graph>) {
        if i == pairs.len() {
            let maximal = pairs.iter().all(|&(u, v)| g.has_edge(u, v) || deg[u] == d || deg[v] == d);
            if maximal {
                out.push(g.clone());
            }
            return;
        }
        let (u, v) = pairs[i];
        if deg[u] < d && deg[v] < d {
            g.add_edge(u, v).unwrap();
            deg[u] += 1;
            deg[v] += 1;
            rec(i + 1, pairs, d, g, deg, out);
            g.remove_edge(u, v);
            deg[u] -= 1;
            deg[v] -= 1;
        }
        rec(i + 1, pairs, d, g, deg, out);
    }
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|v| (0..v).map(move |u| (u, v))).collect();
    let mut all = Vec::new();
    rec(0, &pairs, d, &mut Graph::empty(n), &mut vec![0; n], &mut all);
    if !dedup {
        return all;
    }
    let mut seen = std::collections::HashSet::new();
    all.into_iter().filter(|g| seen.insert(canonical_code(g))).collect()
}

/// `r̂_ε(G,w)`: every host on `n` vertices with minimum degree at least
/// `min(n-1, ⌈(1-ε)n⌉)` and every colouring of it must admit a monochromatic
/// weighted embedding.
///
/// Only edge-minimal hosts are enumerated (as complements of edge-maximal
/// graphs of bounded degree): a bad colouring of a host restricts to a bad
/// colouring of each of its admissible spanning subgraphs.
pub fn stable_ramsey(gw: &WeightedGraph, eps: Rational, cfg: &OracleConfig) -> Result<OracleResult> {
    check_cap(cfg.n_max, STABLE_HARD_CAP)?;
    if eps < Rational::zero() || eps >= Rational::one() {
        return invalid(format!("epsilon {eps} outside [0,1)"));
    }
    let pool = cfg.pool()?;
    let contains = weighted_contains(gw);
    let mut witness = None;
    for n in 1..=cfg.n_max {
        let d = min_degree_threshold(n, eps);
        let hosts: Vec<Graph> =
            maximal_bounded_degree(n, n.saturating_sub(1) - d, cfg.iso_prune).into_iter().map(|c| c.complement()).collect();
        let bad = hosts.iter().find_map(|h| first_bad_coloring(h, &contains, cfg, &pool));
        match bad {
            Some(c) => witness = Some(c),
            None => {
                return Ok(OracleResult { value: OracleValue::Value(n), witness, certificate_mode: cfg.mode() });
            }
        }
    }
    let value =
        if stable_is_infinite(gw.graph(), eps) { OracleValue::InfiniteSuspected(cfg.n_max) } else { OracleValue::Exceeds(cfg.n_max) };
    Ok(OracleResult { value, witness, certificate_mode: cfg.mode() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{make_named, NamedGraph};

    fn named(k: NamedGraph) -> Graph {
        make_named(&k).unwrap()
    }

    #[test]
    fn small_ramsey_values() {
        let r = ramsey_number(&Graph::complete(2), &OracleConfig::new(4)).unwrap();
        assert_eq!(r.value, OracleValue::Value(2));
        let r = ramsey_number(&named(NamedGraph::Path(3)), &OracleConfig::new(4)).unwrap();
        assert_eq!(r.value, OracleValue::Value(3));
        assert_eq!(ramsey_number(&Graph::complete(1), &OracleConfig::new(3)).unwrap().value, OracleValue::Value(1));
    }

    #[test]
    fn triangle_with_pentagon_witness() {
        let r = ramsey_number(&Graph::complete(3), &OracleConfig::new(6)).unwrap();
        assert_eq!(r.value, OracleValue::Value(6));
        let w = r.witness.unwrap();
        assert_eq!(w.n(), 5);
        for c in Color::BOTH {
            let class = w.class(c);
            assert_eq!(class.degrees(), vec![2; 5]);
            assert!(find_subgraph(&Graph::complete(3), class).is_none());
        }
    }

    #[test]
    fn cap_and_bounds() {
        assert!(ramsey_number(&Graph::complete(3), &OracleConfig::new(9)).is_err());
        let r = ramsey_number(&Graph::complete(3), &OracleConfig::new(4)).unwrap();
        assert_eq!(r.value, OracleValue::Exceeds(4));
        assert_eq!(r.witness.unwrap().n(), 4);
    }

    #[test]
    fn pentagon_pentagram_has_no_mono_triangle() {
        let c5 = named(NamedGraph::Cycle(5));
        let coloring = EdgeColoring::with_red_edges(Graph::complete(5), c5.edges()).unwrap();
        assert!(mono_copy_search(&coloring, &WeightedGraph::unit(Graph::complete(3))).unwrap().is_none());
        let all_red = EdgeColoring::monochromatic(Graph::complete(3), Color::Red);
        let (col, f) = mono_copy_search(&all_red, &WeightedGraph::unit(Graph::complete(3))).unwrap().unwrap();
        assert_eq!(col, Color::Red);
        assert!(f.is_injective());
    }

    #[test]
    fn complete_graphs_ignore_weights() {
        let k3 = WeightedGraph::uniform(Graph::complete(3), Rational::new(1, 3)).unwrap();
        assert_eq!(weighted_ramsey(&k3, &OracleConfig::new(6)).unwrap().value, OracleValue::Value(6));
    }

    #[test]
    fn worker_count_does_not_change_result() {
        let g = named(NamedGraph::Cycle(4));
        let a = ramsey_number(&g, &OracleConfig::new(5)).unwrap();
        let b = ramsey_number(&g, &OracleConfig::new(5).workers(4)).unwrap();
        let c = ramsey_number(&g, &OracleConfig::new(5).workers(3).iso_prune(false)).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.witness, c.witness);
        assert_eq!(c.certificate_mode, CertificateMode::Exhaustive);
    }

    #[test]
    fn chromatic_numbers() {
        assert_eq!(chromatic_number(&Graph::empty(0)), 0);
        assert_eq!(chromatic_number(&Graph::empty(3)), 1);
        assert_eq!(chromatic_number(&named(NamedGraph::Cycle(6))), 2);
        assert_eq!(chromatic_number(&named(NamedGraph::Cycle(5))), 3);
        assert_eq!(chromatic_number(&named(NamedGraph::Wheel(6))), 4);
        assert_eq!(chromatic_number(&Graph::complete(5)), 5);
    }

    #[test]
    fn graph_census() {
        let counts: Vec<usize> = (0..=5).map(|n| nonisomorphic_graphs(n).len()).collect();
        assert_eq!(counts, vec![1, 1, 2, 4, 11, 34]);
    }

    #[test]
    fn stable_k2() {
        let k2 = WeightedGraph::unit(Graph::complete(2));
        for eps in [Rational::zero(), Rational::new(1, 5), Rational::new(2, 5), Rational::new(49, 100)] {
            assert_eq!(stable_ramsey(&k2, eps, &OracleConfig::new(4)).unwrap().value, OracleValue::Value(2));
        }
    }

    #[test]
    fn stable_triangle_never_arrives_past_threshold() {
        let k3 = WeightedGraph::unit(Graph::complete(3));
        let r = stable_ramsey(&k3, Rational::new(1, 2), &OracleConfig::new(5)).unwrap();
        assert_eq!(r.value, OracleValue::InfiniteSuspected(5));
        let w = r.witness.unwrap();
        assert!(mono_copy_search(&w, &k3).unwrap().is_none());
    }

    #[test]
    fn stable_c4_half() {
        let c4 = WeightedGraph::unit(named(NamedGraph::Cycle(4)));
        let r = stable_ramsey(&c4, Rational::new(1, 2), &OracleConfig::new(6)).unwrap();
        assert_eq!(r.value, OracleValue::Exceeds(6));
        let w = r.witness.unwrap();
        assert_eq!(w.n(), 6);
        assert!(w.host().min_degree() >= 3);
        assert!(mono_copy_search(&w, &c4).unwrap().is_none());
    }
}
