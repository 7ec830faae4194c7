//! Dense witnesses `U_1..U_s` with degree budgets, their verification, and
//! the greedy weighted embedding into a graph that carries one.

use num_traits::{One, Zero};
use rand::Rng as _;

use super::lovasz::lovasz_partition;
use super::Outcome;
use crate::arith;
use crate::error::{invalid, Error, Result};
use crate::graph::{ceil_mul, Graph, Rational, VertexSet, WeightedGraph};
use crate::morphisms::{verify_capacity, verify_homomorphism, CapacityProfile, VertexMap};
use crate::regularity::{CheckMode, EXHAUSTIVE_SIDE_CAP};
use crate::rng::seeded;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DenseParams {
    pub alpha: Rational,
    pub beta: Rational,
    pub rho: Rational,
    pub delta: Rational,
    pub max_degree: usize,
}

impl DenseParams {
    pub fn new(alpha: Rational, beta: Rational, rho: Rational, delta: Rational, max_degree: usize) -> Result<Self> {
        let (zero, one) = (Rational::zero(), Rational::one());
        if alpha <= zero || alpha > one {
            return invalid(format!("alpha {alpha} outside (0,1]"));
        }
        if rho <= zero || rho > one {
            return invalid(format!("rho {rho} outside (0,1]"));
        }
        for (name, x) in [("beta", beta), ("delta", delta)] {
            if x < zero || x > one {
                return invalid(format!("{name} {x} outside [0,1]"));
            }
        }
        Ok(DenseParams { alpha, beta, rho, delta, max_degree })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DenseWitness {
    pub parts: Vec<VertexSet>,
    pub degrees: Vec<usize>,
}

impl DenseWitness {
    pub fn new(parts: Vec<VertexSet>, degrees: Vec<usize>) -> Result<Self> {
        if parts.len() != degrees.len() {
            return invalid(format!("{} parts but {} degree budgets", parts.len(), degrees.len()));
        }
        if parts.is_empty() {
            return invalid("a dense witness needs at least one part");
        }
        for i in 0..parts.len() {
            for j in i + 1..parts.len() {
                if parts[i].universe() != parts[j].universe() || !parts[i].is_disjoint(&parts[j]) {
                    return invalid(format!("parts {} and {} overlap", i + 1, j + 1));
                }
            }
        }
        Ok(DenseWitness { parts, degrees })
    }

    /// `s = 1`, `U_1 = V`, `d_1 = Δ`.
    pub fn trivial(n: usize, max_degree: usize) -> Self {
        DenseWitness { parts: vec![VertexSet::full(n)], degrees: vec![max_degree] }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DenseVerdict {
    /// `certified` is false when the bi-density part was only sampled.
    Pass {
        certified: bool,
    },
    Arithmetic {
        sum: usize,
        expected: i64,
    },
    PartTooSmall {
        part: usize,
        size: usize,
        required: usize,
    },
    CrossDegree {
        from: usize,
        to: usize,
        vertex: usize,
        neighbors: usize,
        required: usize,
    },
    BiDense {
        part: usize,
        x: VertexSet,
        y: VertexSet,
        density: Rational,
    },
}

impl DenseVerdict {
    pub fn passed(&self) -> bool {
        matches!(self, DenseVerdict::Pass { .. })
    }
}

/// Sparsest admissible pair inside `u`: both sides at least `min_size`,
/// density below `delta`. Ties prefer the larger area.
fn sparse_pair(g: &Graph, u: &VertexSet, min_size: usize, delta: Rational, mode: CheckMode) -> Option<(VertexSet, VertexSet, Rational)> {
    let verts = u.to_vec();
    let mut best: Option<(Rational, usize, VertexSet, VertexSet)> = None;
    let mut consider = |x: &VertexSet| {
        let a = x.len();
        let mut rest: Vec<(usize, usize)> =
            verts.iter().filter(|&&v| !x.contains(v)).map(|&v| (g.neighbors(v).intersection_len(x), v)).collect();
        rest.sort();
        let mut e = 0;
        for k in 1..=rest.len() {
            e += rest[k - 1].0;
            if k < min_size {
                continue;
            }
            let d = Rational::new(e as i64, (a * k) as i64);
            if d >= delta {
                continue;
            }
            let better = match &best {
                None => true,
                Some((bd, ba, _, _)) => d < *bd || (d == *bd && a * k > *ba),
            };
            if better {
                let y = VertexSet::from_vertices(g.n(), rest[..k].iter().map(|p| p.1)).unwrap();
                best = Some((d, a * k, x.clone(), y));
            }
        }
    };
    let min_size = min_size.max(1);
    if verts.len() < 2 * min_size {
        return None;
    }
    match mode {
        CheckMode::Exhaustive => {
            for mask in 1u32..1 << verts.len() {
                if (mask.count_ones() as usize) < min_size {
                    continue;
                }
                let x =
                    VertexSet::from_vertices(g.n(), verts.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &v)| v)).unwrap();
                consider(&x);
            }
        }
        CheckMode::Sampled { budget, seed } => {
            let mut rng = seeded(seed);
            for _ in 0..budget {
                let size = rng.random_range(min_size..=verts.len() - min_size);
                let picked = rand::seq::index::sample(&mut rng, verts.len(), size);
                let x = VertexSet::from_vertices(g.n(), picked.iter().map(|i| verts[i])).unwrap();
                consider(&x);
            }
        }
    }
    best.map(|(d, _, x, y)| (x, y, d))
}

/// Checks, in order: `Σd_i = Δ - s + 1`; `|U_i| >= αN`; for `i < j` every
/// vertex of `U_i` has at least `(1-β)|U_j|` neighbours in `U_j`; each
/// `Γ[U_i]` is bi-`(ρ^{2d_i}, δ)`-dense. The first violation is returned.
pub fn dense_witness_check(host: &Graph, w: &DenseWitness, p: &DenseParams, mode: CheckMode) -> Result<DenseVerdict> {
    let n = host.n();
    if w.parts.iter().any(|u| u.universe() != n) {
        return invalid("witness parts are not subsets of the host");
    }
    if let CheckMode::Exhaustive = mode {
        if let Some(u) = w.parts.iter().find(|u| u.len() > EXHAUSTIVE_SIDE_CAP) {
            return invalid(format!("exhaustive bi-density check needs parts of at most {EXHAUSTIVE_SIDE_CAP}, got {}", u.len()));
        }
    }
    let s = w.parts.len();
    let sum: usize = w.degrees.iter().sum();
    let expected = p.max_degree as i64 - s as i64 + 1;
    if sum as i64 != expected {
        return Ok(DenseVerdict::Arithmetic { sum, expected });
    }
    let min_size = ceil_mul(p.alpha, n);
    if let Some((i, u)) = w.parts.iter().enumerate().find(|(_, u)| u.len() < min_size) {
        return Ok(DenseVerdict::PartTooSmall { part: i, size: u.len(), required: min_size });
    }
    for i in 0..s {
        for j in i + 1..s {
            let required = ceil_mul(Rational::one() - p.beta, w.parts[j].len());
            for v in w.parts[i].iter() {
                let neighbors = host.neighbors(v).intersection_len(&w.parts[j]);
                if neighbors < required {
                    return Ok(DenseVerdict::CrossDegree { from: i, to: j, vertex: v, neighbors, required });
                }
            }
        }
    }
    for (i, u) in w.parts.iter().enumerate() {
        let min_side = arith::ceil(&(arith::pow(p.rho, 2 * w.degrees[i]) * arith::big_int(u.len())));
        if let Some((x, y, density)) = sparse_pair(host, u, min_side, p.delta, mode) {
            return Ok(DenseVerdict::BiDense { part: i, x, y, density });
        }
    }
    Ok(DenseVerdict::Pass { certified: matches!(mode, CheckMode::Exhaustive) })
}

/// Greedy weighted embedding. The guest is split with the witness's degree
/// budgets, embedded class by class with weights non-increasing inside each
/// class. `W_i` tracks the admissible images of each guest vertex; the image
/// of `v_t` is the lowest host vertex of `W_t` that keeps every later
/// same-class neighbour's set at least `δ/2` dense and has room for `w(v_t)`.
pub fn dense_greedy_embed(host: &Graph, w: &DenseWitness, p: &DenseParams, gw: &WeightedGraph) -> Result<Outcome<VertexMap>> {
    let g = gw.graph();
    if g.max_degree() > p.max_degree {
        return invalid(format!("guest has maximum degree {} > Δ = {}", g.max_degree(), p.max_degree));
    }
    if w.parts.iter().any(|u| u.universe() != host.n()) {
        return invalid("witness parts are not subsets of the host");
    }
    let split = lovasz_partition(g, &w.degrees)?;
    let mut order = Vec::with_capacity(g.n());
    for class in &split.classes {
        let mut vs = class.to_vec();
        vs.sort_by(|&a, &b| gw.weight(b).cmp(&gw.weight(a)).then(a.cmp(&b)));
        order.extend(vs);
    }
    let part_of: Vec<usize> = (0..g.n()).map(|v| split.class_of(v)).collect();
    let mut pos = vec![0; g.n()];
    for (t, &v) in order.iter().enumerate() {
        pos[v] = t;
    }
    let mut cand: Vec<VertexSet> = (0..g.n()).map(|v| w.parts[part_of[v]].clone()).collect();
    let mut load = vec![Rational::zero(); host.n()];
    let mut image = vec![usize::MAX; g.n()];
    let half_delta = p.delta / Rational::from_integer(2);
    for (t, &v) in order.iter().enumerate() {
        if cand[v].is_empty() {
            return Ok(Outcome::fail("candidates-exhausted", format!("no candidate image for guest vertex {v} at step {t}")));
        }
        let forward: Vec<usize> = g.neighbors(v).iter().filter(|&u| pos[u] > t && part_of[u] == part_of[v]).collect();
        let dense_ok = |x: usize| {
            forward.iter().all(|&i| {
                let hit = host.neighbors(x).intersection_len(&cand[i]);
                Rational::from_integer(hit as i64) >= half_delta * Rational::from_integer(cand[i].len() as i64)
            })
        };
        let filtered: Vec<usize> = cand[v].iter().filter(|&x| dense_ok(x)).collect();
        if filtered.is_empty() {
            return Ok(Outcome::fail("density-filter", format!("every candidate for guest vertex {v} starves a later neighbour")));
        }
        let Some(&x) = filtered.iter().find(|&&x| load[x] + gw.weight(v) <= Rational::one()) else {
            return Ok(Outcome::fail(
                "weight-capacity",
                format!("all {} filtered candidates for guest vertex {v} are full", filtered.len()),
            ));
        };
        image[v] = x;
        load[x] += gw.weight(v);
        for u in g.neighbors(v).iter() {
            if pos[u] > t {
                cand[u].intersect_with(host.neighbors(x));
            }
        }
    }
    let f = VertexMap::new(image, host.n())?;
    if !verify_homomorphism(g, host, &f)?.is_valid() || !verify_capacity(&f, &CapacityProfile::weights(gw))?.is_valid() {
        return Err(Error::Tripwire("greedy dense embedding failed independent verification".into()));
    }
    Ok(Outcome::Success(f))
}
