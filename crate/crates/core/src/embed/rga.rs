//! Random greedy embedding of a graph that maps homomorphically onto a
//! reduced graph, part by part, with a first-in first-out queue for
//! vertices whose free candidates run low.

use std::collections::VecDeque;

use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::seq::IndexedRandom;
use serde::Serialize;

use super::Outcome;
use crate::arith;
use crate::error::{invalid, Error, Result};
use crate::graph::{floor_mul, Graph, Rational, VertexSet};
use crate::morphisms::{verify_homomorphism, VertexMap};
use crate::regularity::Partition;
use crate::rng::{derive_seed, seeded};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RgaParams {
    pub eps: Rational,
    pub eps1: Rational,
    pub eps2: Rational,
    pub delta: Rational,
    pub xi: Rational,
}

impl RgaParams {
    /// `ε_1 = 1/8`, `ε_2 = ε_1³`, `ε = ε_2³`.
    pub fn with_defaults(delta: Rational, xi: Rational) -> Self {
        let eps1 = Rational::new(1, 8);
        let eps2 = eps1 * eps1 * eps1;
        // ε_2³ = 2^-27 still fits comfortably in 64-bit rationals.
        let eps = eps2 * eps2 * eps2;
        RgaParams { eps, eps1, eps2, delta, xi }
    }

    fn validate(&self) -> Result<()> {
        let (zero, one) = (Rational::zero(), Rational::one());
        for (name, x) in [("eps", self.eps), ("eps1", self.eps1), ("eps2", self.eps2)] {
            if x <= zero || x >= one {
                return invalid(format!("{name} = {x} outside (0,1)"));
            }
        }
        if self.delta <= self.eps || self.delta > one {
            return invalid(format!("delta = {} must lie in (eps, 1]", self.delta));
        }
        if self.xi < zero {
            return invalid(format!("xi = {} is negative", self.xi));
        }
        Ok(())
    }
}

/// One embedding step, recorded for invariant audits.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RgaStep {
    pub part: usize,
    pub vertex: usize,
    pub image: usize,
    pub from_queue: bool,
    /// `|U_s(x) \ φ(A_s)|` before the choice.
    pub free_candidates: usize,
    /// `|U'|` after removing the starving sets `Z_y`.
    pub admissible: usize,
    pub queue_len: usize,
    /// Invariant (i) held for every unembedded vertex after the step.
    pub invariant_i: bool,
    /// Invariant (iii) held after the step.
    pub invariant_iii: bool,
    /// Free candidate counts of unembedded same-part vertices did not grow.
    pub free_monotone: bool,
}

#[derive(Clone, Debug)]
pub struct RgaReport {
    pub outcome: Outcome<VertexMap>,
    /// Attempts actually run.
    pub attempts: usize,
    /// Failure of every unsuccessful attempt, in order.
    pub failures: Vec<super::Failure>,
    /// Steps of the last attempt run (empty unless tracing).
    pub trace: Vec<RgaStep>,
}

struct Instance<'a> {
    host: &'a Graph,
    partition: &'a Partition,
    g: &'a Graph,
    f: &'a VertexMap,
    params: RgaParams,
    m: usize,
    /// `⌈(δ-ε)^d |V_i|⌉` for `d = 0..=Δ(G)`.
    inv_i: Vec<usize>,
    inv_ii: usize,
}

impl Instance<'_> {
    fn attempt(&self, seed: u64, trace: &mut Vec<RgaStep>, record: bool) -> Outcome<VertexMap> {
        let (host, g, f, p) = (self.host, self.g, self.f, &self.params);
        let mut rng = seeded(seed);
        let n = g.n();
        let mut cand: Vec<VertexSet> = (0..n).map(|y| self.partition.classes()[f.get(y)].clone()).collect();
        let mut embedded_nbrs = vec![0usize; n];
        let mut image: Vec<Option<usize>> = vec![None; n];
        let mut used = VertexSet::empty(host.n());
        let lower = p.delta - p.eps;
        for part in 0..self.partition.k() {
            let members = f.preimage(part);
            let mut queue: VecDeque<usize> = VecDeque::new();
            let mut in_queue = vec![false; n];
            let mut next = 0;
            let mut last_free: Vec<usize> = members.iter().map(|&y| cand[y].difference(&used).len()).collect();
            for _ in 0..members.len() {
                let (x, from_queue) = match queue.pop_front() {
                    Some(x) => (x, true),
                    None => {
                        while image[members[next]].is_some() {
                            next += 1;
                        }
                        (members[next], false)
                    }
                };
                in_queue[x] = false;
                let free = cand[x].difference(&used);
                let forward: Vec<usize> = g.neighbors(x).iter().filter(|&y| image[y].is_none()).collect();
                let admissible: Vec<usize> = free
                    .iter()
                    .filter(|&v| {
                        forward.iter().all(|&y| {
                            let hit = host.neighbors(v).intersection_len(&cand[y]) as i64;
                            Rational::from_integer(hit) >= lower * Rational::from_integer(cand[y].len() as i64)
                        })
                    })
                    .collect();
                let Some(&v) = admissible.choose(&mut rng) else {
                    return Outcome::fail(
                        "empty-candidates",
                        format!("guest vertex {x} in part {part}: {} free candidates, none admissible", free.len()),
                    );
                };
                image[x] = Some(v);
                used.insert(v);
                for &y in &forward {
                    cand[y].intersect_with(host.neighbors(v));
                    embedded_nbrs[y] += 1;
                }
                let invariant_i = forward.iter().all(|&y| cand[y].len() >= self.inv_i[embedded_nbrs[y]]);
                let mut free_monotone = true;
                for (idx, &y) in members.iter().enumerate() {
                    if image[y].is_some() {
                        continue;
                    }
                    let now = cand[y].difference(&used).len();
                    free_monotone &= now <= last_free[idx];
                    last_free[idx] = now;
                    if !in_queue[y] && now < self.inv_ii {
                        in_queue[y] = true;
                        queue.push_back(y);
                    }
                }
                let q = Rational::from_integer(queue.len() as i64);
                let invariant_iii = q <= p.eps1 * Rational::from_integer(self.m as i64);
                if record {
                    trace.push(RgaStep {
                        part,
                        vertex: x,
                        image: v,
                        from_queue,
                        free_candidates: free.len(),
                        admissible: admissible.len(),
                        queue_len: queue.len(),
                        invariant_i,
                        invariant_iii,
                        free_monotone,
                    });
                }
                if !invariant_i {
                    return Outcome::fail("invariant-i", format!("candidate set fell below (δ-ε)^d |V_i| after placing {x}"));
                }
                if !invariant_iii {
                    return Outcome::fail("invariant-iii", format!("queue length {} exceeds ε_1 m", queue.len()));
                }
            }
        }
        let image: Vec<usize> = image.into_iter().map(|t| t.expect("every part processed")).collect();
        Outcome::Success(VertexMap::new(image, host.n()).expect("host vertices"))
    }
}

/// Verifies an RGA result: injective, edge-preserving into `host`, and each
/// guest vertex lands in the class its reduced-graph image names.
pub fn verify_blowup_embedding(host: &Graph, partition: &Partition, g: &Graph, f: &VertexMap, emb: &VertexMap) -> Result<bool> {
    Ok(emb.is_injective()
        && verify_homomorphism(g, host, emb)?.is_valid()
        && (0..g.n()).all(|x| partition.classes()[f.get(x)].contains(emb.get(x))))
}

/// Embeds `G` into `Γ` given a homomorphism `f: G -> R` onto the reduced
/// graph of `partition`. Each of `retries` attempts (at least one) uses a
/// seed derived from `seed`; the first success is returned.
#[allow(clippy::too_many_arguments)]
pub fn rga_blowup_embed(
    host: &Graph,
    partition: &Partition,
    reduced: &Graph,
    g: &Graph,
    f: &VertexMap,
    params: RgaParams,
    seed: u64,
    retries: usize,
    trace: bool,
) -> Result<RgaReport> {
    params.validate()?;
    if partition.n() != host.n() || reduced.n() != partition.k() {
        return invalid("partition, host and reduced graph dimensions disagree");
    }
    let verdict = verify_homomorphism(g, reduced, f)?;
    if !verdict.is_valid() {
        return invalid(format!("f is not a homomorphism into R: edges {:?} are not preserved", verdict.violations));
    }
    let m = f.preimage_sizes().into_iter().max().unwrap_or(0);
    let size = partition.class_size();
    let need = (Rational::one() + params.xi) * Rational::from_integer(m as i64);
    if Rational::from_integer(size as i64) < need {
        return invalid(format!("classes of size {size} are smaller than (1+ξ)m = {need}"));
    }
    let lower = arith::big(params.delta - params.eps);
    let size_big = arith::big_int(size);
    let mut pow = BigRational::one();
    let mut inv_i = Vec::with_capacity(g.max_degree() + 1);
    for _ in 0..=g.max_degree() {
        inv_i.push(arith::ceil(&(&pow * &size_big)));
        pow *= &lower;
    }
    let inst = Instance { host, partition, g, f, params, m, inv_i, inv_ii: floor_mul(params.eps2, size) };
    let attempts = retries.max(1);
    let mut failures = Vec::new();
    let mut steps = Vec::new();
    for a in 0..attempts {
        steps.clear();
        match inst.attempt(derive_seed(seed, a as u64), &mut steps, trace) {
            Outcome::Success(emb) => {
                if !verify_blowup_embedding(host, partition, g, f, &emb)? {
                    return Err(Error::Tripwire("blow-up embedding failed independent verification".into()));
                }
                return Ok(RgaReport { outcome: Outcome::Success(emb), attempts: a + 1, failures, trace: steps });
            }
            Outcome::Failure(e) => failures.push(e),
        }
    }
    let last = failures.last().cloned().expect("at least one attempt");
    Ok(RgaReport { outcome: Outcome::Failure(last), attempts, failures, trace: steps })
}
