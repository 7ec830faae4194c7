//! Vertex labelings, exact bandwidth by branch-and-bound and a
//! Cuthill–McKee heuristic.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::graph::Graph;

/// Bijection vertex -> label, labels `0..n`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Labeling {
    perm: Vec<usize>,
}

impl Labeling {
    pub fn new(perm: Vec<usize>) -> Result<Self> {
        let n = perm.len();
        let mut seen = vec![false; n];
        for (v, &l) in perm.iter().enumerate() {
            if l >= n || seen[l] {
                return invalid(format!("labeling is not a bijection (vertex {v} -> {l})"));
            }
            seen[l] = true;
        }
        Ok(Labeling { perm })
    }

    pub fn identity(n: usize) -> Self {
        Labeling { perm: (0..n).collect() }
    }

    /// `order[i]` receives label `i`.
    pub fn from_order(order: &[usize]) -> Result<Self> {
        let n = order.len();
        let mut perm = vec![usize::MAX; n];
        for (l, &v) in order.iter().enumerate() {
            if v >= n || perm[v] != usize::MAX {
                return invalid(format!("order is not a permutation (entry {v})"));
            }
            perm[v] = l;
        }
        Ok(Labeling { perm })
    }

    pub fn n(&self) -> usize {
        self.perm.len()
    }

    pub fn label(&self, v: usize) -> usize {
        self.perm[v]
    }

    pub fn labels(&self) -> &[usize] {
        &self.perm
    }

    /// Vertices sorted by label.
    pub fn order(&self) -> Vec<usize> {
        let mut order = vec![0; self.perm.len()];
        for (v, &l) in self.perm.iter().enumerate() {
            order[l] = v;
        }
        order
    }
}

pub fn labeling_width(g: &Graph, l: &Labeling) -> Result<usize> {
    if l.n() != g.n() {
        return invalid(format!("labeling has {} entries for {} vertices", l.n(), g.n()));
    }
    Ok(g.edges().into_iter().map(|(u, v)| l.label(u).abs_diff(l.label(v))).max().unwrap_or(0))
}

/// Cuthill–McKee ordering: breadth-first from a minimum-degree vertex
/// (lowest id on ties), neighbours visited by increasing degree, restarting
/// in each remaining component. Returns the labeling and its width.
pub fn heuristic_labeling(g: &Graph) -> (Labeling, usize) {
    let n = g.n();
    let deg = g.degrees();
    let mut seen = vec![false; n];
    let mut order = Vec::with_capacity(n);
    while order.len() < n {
        let start = (0..n).filter(|&v| !seen[v]).min_by_key(|&v| (deg[v], v)).unwrap();
        seen[start] = true;
        let mut queue = VecDeque::from([start]);
        while let Some(v) = queue.pop_front() {
            order.push(v);
            let mut next: Vec<usize> = g.neighbors(v).iter().filter(|&u| !seen[u]).collect();
            next.sort_by_key(|&u| (deg[u], u));
            for u in next {
                seen[u] = true;
                queue.push_back(u);
            }
        }
    }
    let l = Labeling::from_order(&order).expect("BFS visits each vertex once");
    let w = labeling_width(g, &l).unwrap();
    (l, w)
}

/// `max(⌈Δ/2⌉, least k with kn - k(k+1)/2 >= |E|)`.
pub fn bandwidth_lower_bound(g: &Graph) -> usize {
    let n = g.n();
    let m = g.edge_count();
    let mut k = 0;
    while k * n - k * (k + 1) / 2 < m {
        k += 1;
    }
    k.max(g.max_degree().div_ceil(2))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BandwidthOutcome {
    Exact {
        width: usize,
        labeling: Labeling,
    },
    /// Budget ran out; `width` is the best labeling found so far.
    BudgetExhausted {
        width: usize,
        labeling: Labeling,
    },
}

impl BandwidthOutcome {
    pub fn exact(&self) -> Option<usize> {
        match self {
            BandwidthOutcome::Exact { width, .. } => Some(*width),
            BandwidthOutcome::BudgetExhausted { .. } => None,
        }
    }
}

struct Placer<'a> {
    g: &'a Graph,
    k: usize,
    pos: Vec<Option<usize>>,
    order: Vec<usize>,
    nodes: u64,
    budget: Option<u64>,
}

enum Placed {
    Yes,
    No,
    OutOfBudget,
}

impl Placer<'_> {
    /// Unplaced vertices with a placed neighbour must land within `k` of it;
    /// the sorted deadlines must leave room for each of them.
    fn deadlines_feasible(&self, p: usize) -> bool {
        let mut deadlines: Vec<usize> = Vec::new();
        for w in 0..self.g.n() {
            if self.pos[w].is_some() {
                continue;
            }
            let d = self.g.neighbors(w).iter().filter_map(|u| self.pos[u]).map(|q| q + self.k).min();
            if let Some(d) = d {
                deadlines.push(d);
            }
        }
        deadlines.sort_unstable();
        deadlines.iter().enumerate().all(|(i, &d)| d >= p + i)
    }

    fn place(&mut self, p: usize) -> Placed {
        let n = self.g.n();
        if p == n {
            return Placed::Yes;
        }
        for v in 0..n {
            if self.pos[v].is_some() {
                continue;
            }
            if self.g.neighbors(v).iter().any(|u| self.pos[u].is_some_and(|q| p - q > self.k)) {
                continue;
            }
            self.nodes += 1;
            if self.budget.is_some_and(|b| self.nodes > b) {
                return Placed::OutOfBudget;
            }
            self.pos[v] = Some(p);
            self.order.push(v);
            if self.deadlines_feasible(p + 1) {
                match self.place(p + 1) {
                    Placed::No => {}
                    other => return other,
                }
            }
            self.order.pop();
            self.pos[v] = None;
        }
        Placed::No
    }
}

/// Minimum width over all labelings. Positions are filled left to right;
/// a branch dies when a placed edge exceeds the target width or the
/// neighbours of placed vertices can no longer fit. The target starts one
/// below the heuristic width and drops after every improvement.
pub fn exact_bandwidth(g: &Graph, budget: Option<u64>) -> BandwidthOutcome {
    let (mut best_l, mut best) = heuristic_labeling(g);
    let lb = bandwidth_lower_bound(g);
    let mut nodes = 0;
    while best > lb {
        let mut placer = Placer {
            g,
            k: best - 1,
            pos: vec![None; g.n()],
            order: Vec::with_capacity(g.n()),
            nodes: 0,
            budget: budget.map(|b| b.saturating_sub(nodes)),
        };
        let outcome = placer.place(0);
        nodes += placer.nodes;
        match outcome {
            Placed::Yes => {
                best_l = Labeling::from_order(&placer.order).unwrap();
                best = labeling_width(g, &best_l).unwrap();
            }
            Placed::No => break,
            Placed::OutOfBudget => return BandwidthOutcome::BudgetExhausted { width: best, labeling: best_l },
        }
    }
    BandwidthOutcome::Exact { width: best, labeling: best_l }
}
