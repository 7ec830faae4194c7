//! Named graph families, blow-ups and seeded random instances.

use std::fmt;
use std::str::FromStr;

use num_traits::{One, Zero};
use rand::seq::SliceRandom;
use rand::Rng as _;

use crate::error::{invalid, Error, Result};
use crate::graph::{ceil_mul, Color, EdgeColoring, Graph, Rational, VertexSet};
use crate::morphisms::VertexMap;
use crate::rng::seeded;

/// Graph families with a closed-form construction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum NamedGraph {
    /// Path on `n` vertices.
    Path(usize),
    Cycle(usize),
    Complete(usize),
    CompleteMultipartite(Vec<usize>),
    /// `W_k`: cycle on `0..k-1` plus hub `k-1`.
    Wheel(usize),
    /// `i ~ j` iff `0 < |i-j| <= r`.
    PathPower {
        n: usize,
        r: usize,
    },
    Hypercube(usize),
    /// `P_rungs × K_2`; rung `i` is `{2i, 2i+1}`.
    Ladder(usize),
}

pub fn make_named(kind: &NamedGraph) -> Result<Graph> {
    match *kind {
        NamedGraph::Path(n) => Graph::from_edges(n, (1..n).map(|i| (i - 1, i))),
        NamedGraph::Cycle(n) => {
            if n < 3 {
                return invalid(format!("cycle needs at least 3 vertices, got {n}"));
            }
            Graph::from_edges(n, (0..n).map(|i| (i, (i + 1) % n)))
        }
        NamedGraph::Complete(n) => Ok(Graph::complete(n)),
        NamedGraph::CompleteMultipartite(ref parts) => {
            if parts.contains(&0) {
                return invalid("multipartite part sizes must be positive");
            }
            let n = parts.iter().sum();
            let mut label = Vec::with_capacity(n);
            for (p, &size) in parts.iter().enumerate() {
                label.extend(std::iter::repeat_n(p, size));
            }
            let mut g = Graph::empty(n);
            for u in 0..n {
                for v in u + 1..n {
                    if label[u] != label[v] {
                        g.add_edge(u, v)?;
                    }
                }
            }
            Ok(g)
        }
        NamedGraph::Wheel(k) => {
            if k < 4 {
                return invalid(format!("wheel needs k >= 4, got {k}"));
            }
            let rim = k - 1;
            let hub = k - 1;
            Graph::from_edges(k, (0..rim).map(|i| (i, (i + 1) % rim)).chain((0..rim).map(|i| (i, hub))))
        }
        NamedGraph::PathPower { n, r } => {
            let mut g = Graph::empty(n);
            for i in 0..n {
                for j in i + 1..n.min(i + r + 1) {
                    g.add_edge(i, j)?;
                }
            }
            Ok(g)
        }
        NamedGraph::Hypercube(d) => {
            if d > 20 {
                return invalid(format!("hypercube dimension {d} too large"));
            }
            let n = 1usize << d;
            let mut g = Graph::empty(n);
            for v in 0..n {
                for b in 0..d {
                    let u = v ^ (1 << b);
                    if u > v {
                        g.add_edge(v, u)?;
                    }
                }
            }
            Ok(g)
        }
        NamedGraph::Ladder(rungs) => {
            let n = 2 * rungs;
            let mut g = Graph::empty(n);
            for i in 0..rungs {
                g.add_edge(2 * i, 2 * i + 1)?;
                if i + 1 < rungs {
                    g.add_edge(2 * i, 2 * i + 2)?;
                    g.add_edge(2 * i + 1, 2 * i + 3)?;
                }
            }
            Ok(g)
        }
    }
}

impl fmt::Display for NamedGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NamedGraph::Path(n) => write!(f, "path:{n}"),
            NamedGraph::Cycle(n) => write!(f, "cycle:{n}"),
            NamedGraph::Complete(n) => write!(f, "complete:{n}"),
            NamedGraph::CompleteMultipartite(p) => {
                let parts: Vec<String> = p.iter().map(|s| s.to_string()).collect();
                write!(f, "multipartite:{}", parts.join(","))
            }
            NamedGraph::Wheel(k) => write!(f, "wheel:{k}"),
            NamedGraph::PathPower { n, r } => write!(f, "path_power:{n},{r}"),
            NamedGraph::Hypercube(d) => write!(f, "hypercube:{d}"),
            NamedGraph::Ladder(r) => write!(f, "ladder:{r}"),
        }
    }
}

impl FromStr for NamedGraph {
    type Err = Error;

    /// Parses `kind:p1,p2,..`, e.g. `wheel:6`, `path_power:10,2`.
    fn from_str(s: &str) -> Result<Self> {
        let (kind, params) = s.split_once(':').unwrap_or((s, ""));
        let nums: Vec<usize> = if params.trim().is_empty() {
            Vec::new()
        } else {
            params
                .split(',')
                .map(|p| p.trim().parse::<usize>().map_err(|_| Error::InvalidInput(format!("bad parameter {p:?} in {s:?}"))))
                .collect::<Result<_>>()?
        };
        let one = |name: &str| -> Result<usize> {
            match nums.as_slice() {
                [x] => Ok(*x),
                _ => invalid(format!("{name} takes exactly one parameter")),
            }
        };
        Ok(match kind.trim() {
            "path" => NamedGraph::Path(one("path")?),
            "cycle" => NamedGraph::Cycle(one("cycle")?),
            "complete" => NamedGraph::Complete(one("complete")?),
            "multipartite" | "complete_multipartite" => NamedGraph::CompleteMultipartite(nums),
            "wheel" => NamedGraph::Wheel(one("wheel")?),
            "path_power" => match nums.as_slice() {
                [n, r] => NamedGraph::PathPower { n: *n, r: *r },
                _ => return invalid("path_power takes n,r"),
            },
            "hypercube" => NamedGraph::Hypercube(one("hypercube")?),
            "ladder" => NamedGraph::Ladder(one("ladder")?),
            other => return invalid(format!("unknown graph kind {other:?}")),
        })
    }
}

/// Base graph plus one positive part size per base vertex.
#[derive(Clone, Debug)]
pub struct BlowupSpec {
    base: Graph,
    part_sizes: Vec<usize>,
}

impl BlowupSpec {
    pub fn new(base: Graph, part_sizes: Vec<usize>) -> Result<Self> {
        if part_sizes.len() != base.n() {
            return invalid(format!("{} part sizes for a base graph on {} vertices", part_sizes.len(), base.n()));
        }
        if part_sizes.contains(&0) {
            return invalid("blow-up part sizes must be positive");
        }
        Ok(BlowupSpec { base, part_sizes })
    }

    pub fn balanced(base: Graph, size: usize) -> Result<Self> {
        let k = base.n();
        BlowupSpec::new(base, vec![size; k])
    }

    pub fn base(&self) -> &Graph {
        &self.base
    }

    pub fn part_sizes(&self) -> &[usize] {
        &self.part_sizes
    }
}

/// Vertices of part `i` of a part-major layout.
pub fn part_ranges(part_sizes: &[usize]) -> Vec<std::ops::Range<usize>> {
    let mut start = 0;
    part_sizes
        .iter()
        .map(|&s| {
            let r = start..start + s;
            start += s;
            r
        })
        .collect()
}

/// Blow-up of the base graph, with parts laid out consecutively, plus the
/// canonical projection back onto the base.
pub fn blowup(spec: &BlowupSpec) -> (Graph, VertexMap) {
    let ranges = part_ranges(&spec.part_sizes);
    let n: usize = spec.part_sizes.iter().sum();
    let mut image = vec![0; n];
    for (p, r) in ranges.iter().enumerate() {
        for v in r.clone() {
            image[v] = p;
        }
    }
    let mut g = Graph::empty(n);
    for (a, b) in spec.base.edges() {
        for u in ranges[a].clone() {
            for v in ranges[b].clone() {
                g.add_edge(u, v).expect("parts are disjoint");
            }
        }
    }
    let map = VertexMap::new(image, spec.base.n()).expect("parts index base vertices");
    (g, map)
}

/// Union of `max_degree` seeded random perfect matchings between the sides
/// `0..n` and `n..2n`, duplicates merged.
pub fn random_bounded_degree_bipartite(n_per_side: usize, max_degree: usize, seed: u64) -> Result<Graph> {
    if max_degree > n_per_side {
        return invalid(format!("max degree {max_degree} exceeds side size {n_per_side}"));
    }
    let mut rng = seeded(seed);
    let mut g = Graph::empty(2 * n_per_side);
    let mut perm: Vec<usize> = (0..n_per_side).collect();
    for _ in 0..max_degree {
        perm.shuffle(&mut rng);
        for (l, &r) in perm.iter().enumerate() {
            g.add_edge(l, n_per_side + r)?;
        }
    }
    Ok(g)
}

fn check_probability(p: Rational) -> Result<()> {
    if p < Rational::zero() || p > Rational::one() {
        return invalid(format!("probability {p} outside [0,1]"));
    }
    Ok(())
}

/// Exact Bernoulli trial with rational success probability.
fn bernoulli(rng: &mut crate::rng::Rng, p: Rational) -> bool {
    let (num, den) = (*p.numer(), *p.denom());
    rng.random_range(0..den) < num
}

/// Colours each host edge red independently with probability `red_prob`,
/// visiting edges in lexicographic order.
pub fn random_coloring(host: &Graph, red_prob: Rational, seed: u64) -> Result<EdgeColoring> {
    check_probability(red_prob)?;
    let mut rng = seeded(seed);
    Ok(EdgeColoring::from_fn(host.clone(), |_, _| if bernoulli(&mut rng, red_prob) { Color::Red } else { Color::Blue }))
}

/// The minimum degree a host on `n` vertices must reach for parameter `eps`:
/// `⌈(1-eps)n⌉`, clamped to `n-1` so that `K_n` always qualifies.
pub fn min_degree_threshold(n: usize, eps: Rational) -> usize {
    if n == 0 {
        return 0;
    }
    ceil_mul(Rational::one() - eps, n).min(n - 1)
}

/// Deletes random edges from `K_n` while both endpoints stay at degree at
/// least [`min_degree_threshold`]. The number of deletions is itself drawn
/// from the seed.
pub fn random_min_degree_host(n: usize, eps: Rational, seed: u64) -> Result<Graph> {
    check_eps(eps)?;
    let d = min_degree_threshold(n, eps);
    let max_deletions = n * (n.saturating_sub(1) - d) / 2;
    let target = seeded(seed ^ 0x5eed_7a26).random_range(0..=max_deletions);
    random_min_degree_host_with_target(n, eps, Some(target), seed)
}

/// As [`random_min_degree_host`], with an explicit deletion target
/// (`None` deletes until no edge is deletable).
pub fn random_min_degree_host_with_target(n: usize, eps: Rational, target: Option<usize>, seed: u64) -> Result<Graph> {
    check_eps(eps)?;
    let d = min_degree_threshold(n, eps);
    let mut g = Graph::complete(n);
    let mut edges = g.edges();
    edges.shuffle(&mut seeded(seed));
    let mut deg = vec![n.saturating_sub(1); n];
    let mut deleted = 0;
    // Degrees only decrease, so an edge skipped once stays undeletable.
    for (u, v) in edges {
        if target.is_some_and(|t| deleted >= t) {
            break;
        }
        if deg[u] > d && deg[v] > d {
            g.remove_edge(u, v);
            deg[u] -= 1;
            deg[v] -= 1;
            deleted += 1;
        }
    }
    debug_assert!(n == 0 || g.min_degree() >= d);
    Ok(g)
}

fn check_eps(eps: Rational) -> Result<()> {
    if eps < Rational::zero() || eps >= Rational::one() {
        return invalid(format!("epsilon {eps} outside [0,1)"));
    }
    Ok(())
}

/// Blow-up of `base` with `part_size` vertices per part where every pair
/// along a base edge is a random bipartite graph with edge probability
/// `edge_prob`. Parts carry no internal edges.
pub fn random_dense_blowup(base: &Graph, part_size: usize, edge_prob: Rational, seed: u64) -> Result<(Graph, Vec<VertexSet>)> {
    check_probability(edge_prob)?;
    let k = base.n();
    let n = k * part_size;
    let ranges = part_ranges(&vec![part_size; k]);
    let mut rng = seeded(seed);
    let mut g = Graph::empty(n);
    for (a, b) in base.edges() {
        for u in ranges[a].clone() {
            for v in ranges[b].clone() {
                if bernoulli(&mut rng, edge_prob) {
                    g.add_edge(u, v)?;
                }
            }
        }
    }
    let classes = ranges.into_iter().map(|r| VertexSet::range(n, r.start, r.end)).collect();
    Ok((g, classes))
}

/// Guest graph with `part_size` vertices over every base vertex and, along
/// every base edge, the union of `rounds` random perfect matchings between
/// the two parts. Returns the guest and its projection onto `base`.
pub fn random_guest_over(base: &Graph, part_size: usize, rounds: usize, seed: u64) -> Result<(Graph, VertexMap)> {
    let spec = BlowupSpec::balanced(base.clone(), part_size.max(1))?;
    let (_, map) = blowup(&spec);
    let ranges = part_ranges(spec.part_sizes());
    let n = base.n() * part_size;
    let mut rng = seeded(seed);
    let mut g = Graph::empty(n);
    let mut perm: Vec<usize> = (0..part_size).collect();
    for (a, b) in base.edges() {
        for _ in 0..rounds {
            perm.shuffle(&mut rng);
            for (i, &j) in perm.iter().enumerate() {
                g.add_edge(ranges[a].start + i, ranges[b].start + j)?;
            }
        }
    }
    if part_size == 0 {
        return Ok((g, VertexMap::new(Vec::new(), base.n())?));
    }
    Ok((g, map))
}
