//! Vertex maps, homomorphism and capacity verification, and backtracking
//! search for capacity-constrained homomorphisms.

use num_integer::Integer;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::graph::{Graph, Rational, VertexSet, WeightedGraph};

pub const DEFAULT_BUDGET: u64 = 10_000_000;

/// Total map `0..source_n -> 0..target_n`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct VertexMap {
    target_n: usize,
    image: Vec<usize>,
}

impl VertexMap {
    pub fn new(image: Vec<usize>, target_n: usize) -> Result<Self> {
        if let Some((v, &t)) = image.iter().enumerate().find(|(_, &t)| t >= target_n) {
            return invalid(format!("vertex {v} maps to {t}, target has {target_n} vertices"));
        }
        Ok(VertexMap { target_n, image })
    }

    pub fn identity(n: usize) -> Self {
        VertexMap { target_n: n, image: (0..n).collect() }
    }

    pub fn source_n(&self) -> usize {
        self.image.len()
    }

    pub fn target_n(&self) -> usize {
        self.target_n
    }

    pub fn image(&self) -> &[usize] {
        &self.image
    }

    pub fn get(&self, v: usize) -> usize {
        self.image[v]
    }

    pub fn preimage(&self, t: usize) -> Vec<usize> {
        (0..self.image.len()).filter(|&v| self.image[v] == t).collect()
    }

    pub fn preimage_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.target_n];
        for &t in &self.image {
            sizes[t] += 1;
        }
        sizes
    }

    pub fn is_injective(&self) -> bool {
        self.preimage_sizes().iter().all(|&s| s <= 1)
    }

    /// `outer ∘ self`.
    pub fn then(&self, outer: &VertexMap) -> Result<VertexMap> {
        if outer.source_n() != self.target_n {
            return invalid(format!("cannot compose: inner target has {} vertices, outer source {}", self.target_n, outer.source_n()));
        }
        Ok(VertexMap { target_n: outer.target_n, image: self.image.iter().map(|&t| outer.image[t]).collect() })
    }
}

/// Per-target limits on how much of the source may land on each vertex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CapacityProfile {
    /// `caps[t]` bounds `|f^{-1}(t)|`; `usize::MAX` means unbounded.
    CountCap(Vec<usize>),
    /// Source weights; every target takes total preimage weight at most 1.
    WeightCap(Vec<Rational>),
}

impl CapacityProfile {
    pub fn unbounded(target_n: usize) -> Self {
        CapacityProfile::CountCap(vec![usize::MAX; target_n])
    }

    pub fn uniform(target_n: usize, cap: usize) -> Self {
        CapacityProfile::CountCap(vec![cap; target_n])
    }

    pub fn weights(gw: &WeightedGraph) -> Self {
        CapacityProfile::WeightCap(gw.weights().to_vec())
    }

    fn check_dims(&self, source_n: usize, target_n: usize) -> Result<()> {
        match self {
            CapacityProfile::CountCap(caps) if caps.len() != target_n => {
                invalid(format!("{} count caps for {target_n} target vertices", caps.len()))
            }
            CapacityProfile::WeightCap(w) if w.len() != source_n => invalid(format!("{} weights for {source_n} source vertices", w.len())),
            CapacityProfile::WeightCap(w) => {
                if let Some(x) = w.iter().find(|x| **x < Rational::zero() || **x > Rational::one()) {
                    return invalid(format!("weight {x} outside [0,1]"));
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HomVerdict {
    /// Source edges whose images are not target edges.
    pub violations: Vec<(usize, usize)>,
}

impl HomVerdict {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CapacityVerdict {
    /// Target vertices whose load exceeds their capacity.
    pub overloaded: Vec<usize>,
}

impl CapacityVerdict {
    pub fn is_valid(&self) -> bool {
        self.overloaded.is_empty()
    }
}

pub fn verify_homomorphism(g: &Graph, h: &Graph, f: &VertexMap) -> Result<HomVerdict> {
    if f.source_n() != g.n() || f.target_n() != h.n() {
        return invalid(format!("map is {}->{}, graphs have {} and {} vertices", f.source_n(), f.target_n(), g.n(), h.n()));
    }
    let violations = g.edges().into_iter().filter(|&(u, v)| !h.has_edge(f.get(u), f.get(v))).collect();
    Ok(HomVerdict { violations })
}

pub fn verify_capacity(f: &VertexMap, profile: &CapacityProfile) -> Result<CapacityVerdict> {
    profile.check_dims(f.source_n(), f.target_n())?;
    let overloaded = match profile {
        CapacityProfile::CountCap(caps) => {
            f.preimage_sizes().into_iter().enumerate().filter(|&(t, s)| s > caps[t]).map(|(t, _)| t).collect()
        }
        CapacityProfile::WeightCap(w) => {
            let mut load = vec![Rational::zero(); f.target_n()];
            for (v, &t) in f.image().iter().enumerate() {
                load[t] += w[v];
            }
            (0..f.target_n()).filter(|&t| load[t] > Rational::one()).collect()
        }
    };
    Ok(CapacityVerdict { overloaded })
}

/// Verifies both the homomorphism and the capacity condition.
pub fn verify_map(g: &Graph, h: &Graph, f: &VertexMap, profile: &CapacityProfile) -> Result<bool> {
    Ok(verify_homomorphism(g, h, f)?.is_valid() && verify_capacity(f, profile)?.is_valid())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SearchOutcome {
    Found(VertexMap),
    /// The search space was exhausted.
    NotFound,
    BudgetExhausted,
}

impl SearchOutcome {
    pub fn found(self) -> Option<VertexMap> {
        match self {
            SearchOutcome::Found(f) => Some(f),
            _ => None,
        }
    }
}

/// Loads and capacities in integer units.
struct Capacity {
    cost: Vec<i128>,
    cap: Vec<i128>,
}

impl Capacity {
    fn new(profile: &CapacityProfile, source_n: usize) -> Result<Self> {
        Ok(match profile {
            CapacityProfile::CountCap(caps) => Capacity {
                cost: vec![1; source_n],
                cap: caps.iter().map(|&c| if c == usize::MAX { i128::MAX } else { c as i128 }).collect(),
            },
            CapacityProfile::WeightCap(w) => {
                let mut den: i128 = 1;
                for x in w {
                    den = den.lcm(&(*x.denom() as i128));
                    if den > i64::MAX as i128 {
                        return Err(Error::InvalidInput("weight denominators too large".into()));
                    }
                }
                Capacity { cost: w.iter().map(|x| *x.numer() as i128 * (den / *x.denom() as i128)).collect(), cap: Vec::new() }
                    .with_uniform_cap(den)
            }
        })
    }

    fn with_uniform_cap(mut self, c: i128) -> Self {
        self.cap = vec![c];
        self
    }

    fn cap(&self, t: usize) -> i128 {
        if self.cap.len() == 1 {
            self.cap[0]
        } else {
            self.cap[t]
        }
    }
}

struct Search<'a> {
    g: &'a Graph,
    h: &'a Graph,
    order: Vec<usize>,
    capacity: Capacity,
    load: Vec<i128>,
    image: Vec<Option<usize>>,
    budget: Option<u64>,
    nodes: u64,
}

enum Step {
    Done,
    Dead,
    OutOfBudget,
}

impl Search<'_> {
    /// Targets compatible with every already-mapped neighbour of `v`.
    fn candidates(&self, v: usize) -> VertexSet {
        let mut c = VertexSet::full(self.h.n());
        for u in self.g.neighbors(v).iter() {
            if let Some(t) = self.image[u] {
                c.intersect_with(self.h.neighbors(t));
            }
        }
        c
    }

    fn run(&mut self, depth: usize) -> Step {
        if depth == self.order.len() {
            return Step::Done;
        }
        let v = self.order[depth];
        for t in self.candidates(v).iter() {
            if self.load[t] + self.capacity.cost[v] > self.capacity.cap(t) {
                continue;
            }
            self.nodes += 1;
            if self.budget.is_some_and(|b| self.nodes > b) {
                return Step::OutOfBudget;
            }
            self.image[v] = Some(t);
            self.load[t] += self.capacity.cost[v];
            let alive = self.g.neighbors(v).iter().all(|u| self.image[u].is_some() || !self.candidates(u).is_empty());
            if alive {
                match self.run(depth + 1) {
                    Step::Dead => {}
                    other => return other,
                }
            }
            self.image[v] = None;
            self.load[t] -= self.capacity.cost[v];
        }
        Step::Dead
    }
}

/// Backtracking search for a homomorphism `G -> H` respecting `profile`.
///
/// Source vertices are tried by decreasing degree (weight mode: decreasing
/// weight, then degree), ties by lowest id; targets by lowest id.
/// `budget` bounds the number of assignments tried.
pub fn find_capacity_homomorphism(g: &Graph, h: &Graph, profile: &CapacityProfile, budget: Option<u64>) -> Result<SearchOutcome> {
    profile.check_dims(g.n(), h.n())?;
    let mut order: Vec<usize> = (0..g.n()).collect();
    match profile {
        CapacityProfile::CountCap(_) => order.sort_by_key(|&v| (std::cmp::Reverse(g.degree(v).unwrap()), v)),
        CapacityProfile::WeightCap(w) => {
            order.sort_by(|&a, &b| w[b].cmp(&w[a]).then(g.neighbors(b).len().cmp(&g.neighbors(a).len())).then(a.cmp(&b)))
        }
    }
    let capacity = Capacity::new(profile, g.n())?;
    let mut search = Search { g, h, order, capacity, load: vec![0; h.n()], image: vec![None; g.n()], budget, nodes: 0 };
    Ok(match search.run(0) {
        Step::Done => {
            let image = search.image.into_iter().map(|t| t.expect("complete assignment")).collect();
            let f = VertexMap::new(image, h.n())?;
            debug_assert!(verify_map(g, h, &f, profile).unwrap());
            SearchOutcome::Found(f)
        }
        Step::Dead => SearchOutcome::NotFound,
        Step::OutOfBudget => SearchOutcome::BudgetExhausted,
    })
}

/// Weighted embedding of `(G, w)` into `Γ`: a homomorphism with total
/// preimage weight at most 1 on every host vertex. Exhaustive.
pub fn find_weighted_embedding(gw: &WeightedGraph, host: &Graph) -> Result<Option<VertexMap>> {
    let profile = CapacityProfile::weights(gw);
    match find_capacity_homomorphism(gw.graph(), host, &profile, None)? {
        SearchOutcome::Found(f) => Ok(Some(f)),
        _ => Ok(None),
    }
}
