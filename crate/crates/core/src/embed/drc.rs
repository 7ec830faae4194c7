//! Dependent random choice: picking `X` as the common neighbourhood of a
//! Δ-tuple so that few Δ-tuples inside `X` have small codegree, and the
//! iterative bandwidth embedding built on top of it.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::seq::IndexedRandom;
use rand::Rng as _;
use rayon::prelude::*;
use serde::Serialize;

use super::Outcome;
use crate::arith;
use crate::bandwidth::{labeling_width, Labeling};
use crate::error::{invalid, Error, Result};
use crate::graph::{Graph, Rational, VertexSet};
use crate::morphisms::{verify_homomorphism, VertexMap};
use crate::rng::{derive_seed, seeded};

/// Largest `n^Δ` accepted by [`TupleMode::Exhaustive`].
pub const EXHAUSTIVE_TUPLE_CAP: u128 = 1 << 22;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TupleMode {
    /// Every ordered tuple in `domain^Δ`; the choice is certified optimal
    /// for the score.
    Exhaustive,
    Sampled {
        trials: usize,
        seed: u64,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DrcStats {
    pub size: usize,
    pub overlap: usize,
    /// Ordered tuples in `X^Δ` with fewer than the threshold common
    /// neighbours inside the domain.
    pub bad_tuples: u128,
    pub threshold: usize,
    pub tuples_scored: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DrcSelection {
    pub set: VertexSet,
    pub tuple: Vec<usize>,
    pub stats: DrcStats,
}

fn checked_pow(base: u128, e: usize) -> Result<u128> {
    (0..e).try_fold(1u128, |acc, _| acc.checked_mul(base)).ok_or_else(|| Error::InvalidInput("tuple count overflows u128".into()))
}

/// Tuple counter over `x^remaining` extending a prefix whose common
/// neighbourhood (inside the domain) is `common`. A branch stops as soon as
/// it is certainly bad (codegree already below `thr`) or certainly good
/// (each extension removes at most `max_loss` vertices).
struct BadCounter<'a> {
    g: &'a Graph,
    x: Vec<usize>,
    thr: usize,
    max_loss: usize,
    powers: Vec<u128>,
}

impl<'a> BadCounter<'a> {
    fn new(g: &'a Graph, domain: &VertexSet, x: &VertexSet, delta: usize, thr: usize) -> Self {
        let xs = x.to_vec();
        let max_loss = xs.iter().map(|&v| domain.difference(g.neighbors(v)).len()).max().unwrap_or(0);
        let powers = (0..=delta).map(|e| (xs.len() as u128).saturating_pow(e as u32)).collect();
        BadCounter { g, x: xs, thr, max_loss, powers }
    }

    fn count(&self, common: &VertexSet, remaining: usize) -> u128 {
        let c = common.len();
        if c < self.thr {
            return self.powers[remaining];
        }
        if remaining == 0 || c >= self.thr + remaining * self.max_loss {
            return 0;
        }
        self.x.iter().map(|&v| self.count(&common.intersection(self.g.neighbors(v)), remaining - 1)).sum()
    }
}

/// `ξ(X)`: ordered tuples in `X^Δ` with fewer than `thr` common neighbours
/// in `domain`.
pub fn bad_tuple_count(g: &Graph, domain: &VertexSet, x: &VertexSet, delta: usize, thr: usize) -> u128 {
    BadCounter::new(g, domain, x, delta, thr).count(domain, delta)
}

/// Bad tuples in `X^Δ` whose leading entries are `prefix`.
pub fn bad_extensions(g: &Graph, domain: &VertexSet, x: &VertexSet, delta: usize, thr: usize, prefix: &[usize]) -> u128 {
    let mut common = domain.clone();
    for &p in prefix {
        common.intersect_with(g.neighbors(p));
    }
    BadCounter::new(g, domain, x, delta, thr).count(&common, delta.saturating_sub(prefix.len()))
}

/// Unpruned enumeration of `X^Δ`: every tuple is visited, intersecting
/// prefix by prefix.
pub fn bad_tuple_count_naive(g: &Graph, domain: &VertexSet, x: &VertexSet, delta: usize, thr: usize) -> u128 {
    fn walk(g: &Graph, xs: &[usize], common: &VertexSet, remaining: usize, thr: usize) -> u128 {
        match remaining {
            0 => (common.len() < thr) as u128,
            1 => xs.iter().filter(|&&v| common.intersection_len(g.neighbors(v)) < thr).count() as u128,
            _ => xs.iter().map(|&v| walk(g, xs, &common.intersection(g.neighbors(v)), remaining - 1, thr)).sum(),
        }
    }
    walk(g, &x.to_vec(), domain, delta, thr)
}

fn tuple_at(domain: &[usize], delta: usize, mut code: u128) -> Vec<usize> {
    let b = domain.len() as u128;
    (0..delta)
        .map(|_| {
            let v = domain[(code % b) as usize];
            code /= b;
            v
        })
        .collect()
}

/// Chooses `X = domain ∩ N(v_1) ∩ … ∩ N(v_Δ)` over candidate tuples drawn
/// from `domain`. Tuple `j` scores `A_j / ΣA - B_j / (2 ΣB)` with
/// `A = |X_0 ∩ X|^Δ |X|^Δ` and `B = ξ(X) |X_0 ∩ X|^Δ`, compared exactly
/// as `2 A_j ΣB - B_j ΣA` (or `A_j` when `ΣB = 0`); the first tuple wins
/// ties. A tuple is bad when it has fewer than `⌈β·|V(G)|⌉` common
/// neighbours in `domain`. The returned stats are recounted naively.
pub fn drc_select(g: &Graph, domain: &VertexSet, x0: &VertexSet, delta: usize, beta: Rational, mode: TupleMode) -> Result<DrcSelection> {
    let n = g.n();
    if domain.universe() != n || x0.universe() != n {
        return invalid("domain and X_0 must be subsets of V(G)");
    }
    if beta < Rational::zero() {
        return invalid("β must be nonnegative");
    }
    let thr = arith::ceil(&(arith::big(beta) * arith::big_int(n)));
    let dom = domain.to_vec();
    let tuples: Vec<Vec<usize>> = if delta == 0 {
        vec![Vec::new()]
    } else if dom.is_empty() {
        return invalid("cannot draw tuples from an empty domain");
    } else {
        match mode {
            TupleMode::Exhaustive => {
                let total = checked_pow(dom.len() as u128, delta)?;
                if total > EXHAUSTIVE_TUPLE_CAP {
                    return invalid(format!("{total} tuples exceed the exhaustive cap {EXHAUSTIVE_TUPLE_CAP}"));
                }
                (0..total).map(|c| tuple_at(&dom, delta, c)).collect()
            }
            TupleMode::Sampled { trials, seed } => {
                if trials == 0 {
                    return invalid("trials must be at least 1");
                }
                let mut rng = seeded(seed);
                (0..trials).map(|_| (0..delta).map(|_| *dom.choose(&mut rng).unwrap()).collect()).collect()
            }
        }
    };
    let sets: Vec<VertexSet> = tuples
        .iter()
        .map(|t| {
            let mut x = domain.clone();
            for &v in t {
                x.intersect_with(g.neighbors(v));
            }
            x
        })
        .collect();
    let mut distinct: Vec<&VertexSet> = sets.iter().collect();
    distinct.sort();
    distinct.dedup();
    let xi: HashMap<&VertexSet, u128> = distinct.par_iter().map(|&x| (x, bad_tuple_count(g, domain, x, delta, thr))).collect();
    let mut a = Vec::with_capacity(sets.len());
    let mut b = Vec::with_capacity(sets.len());
    for x in &sets {
        let ov = checked_pow(x.intersection_len(x0) as u128, delta)?;
        let sz = checked_pow(x.len() as u128, delta)?;
        let overflow = || Error::InvalidInput("DRC score overflows 128 bits".into());
        a.push(BigInt::from(ov.checked_mul(sz).ok_or_else(overflow)?));
        b.push(BigInt::from(xi[x].checked_mul(ov).ok_or_else(overflow)?));
    }
    let sum_a: BigInt = a.iter().sum();
    let sum_b: BigInt = b.iter().sum();
    let score = |j: usize| -> BigInt {
        if sum_b.is_zero() {
            a[j].clone()
        } else {
            BigInt::from(2) * &a[j] * &sum_b - &b[j] * &sum_a
        }
    };
    let mut best = 0;
    let mut best_score = score(0);
    for j in 1..sets.len() {
        let s = score(j);
        if s > best_score {
            best = j;
            best_score = s;
        }
    }
    let set = sets[best].clone();
    let stats = DrcStats {
        size: set.len(),
        overlap: set.intersection_len(x0),
        bad_tuples: bad_tuple_count_naive(g, domain, &set, delta, thr),
        threshold: thr,
        tuples_scored: sets.len(),
    };
    Ok(DrcSelection { set, tuple: tuples[best].clone(), stats })
}

/// Exact check of the three set-selection properties for `X` in `G`:
/// `|X| ≥ α^{2Δ} n / 2`, `|X ∩ X_0| ≥ α^{2Δ} |X_0| / 2`, and at most
/// `(2β |X| / α^{2Δ})^Δ` ordered tuples of `X^Δ` with fewer than `βn`
/// common neighbours.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LemmaCheck {
    pub size_ok: bool,
    pub overlap_ok: bool,
    pub bad_ok: bool,
    pub bad_tuples: u128,
}

impl LemmaCheck {
    pub fn all(&self) -> bool {
        self.size_ok && self.overlap_ok && self.bad_ok
    }
}

pub fn check_selection(g: &Graph, x0: &VertexSet, x: &VertexSet, delta: usize, alpha: Rational, beta: Rational) -> LemmaCheck {
    let n = g.n();
    let a2d = arith::pow(alpha, 2 * delta);
    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    let size_ok = arith::big_int(x.len()) >= &half * &a2d * arith::big_int(n);
    let overlap_ok = arith::big_int(x.intersection_len(x0)) >= &half * &a2d * arith::big_int(x0.len());
    let thr = arith::ceil(&(arith::big(beta) * arith::big_int(n)));
    let bad_tuples = bad_tuple_count_naive(g, &VertexSet::full(n), x, delta, thr);
    let bound = if a2d.is_zero() {
        None
    } else {
        Some(num_traits::pow(BigRational::from_integer(BigInt::from(2)) * arith::big(beta) * arith::big_int(x.len()) / &a2d, delta))
    };
    let bad_ok = match bound {
        Some(b) => BigRational::from_integer(BigInt::from(bad_tuples)) <= b,
        None => false,
    };
    LemmaCheck { size_ok, overlap_ok, bad_ok, bad_tuples }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DrcEmbedParams {
    pub alpha: Rational,
    /// Replaces the default bandwidth fraction `α^{6Δ+1} / (256Δ)`.
    pub beta: Option<Rational>,
    pub trials: usize,
    pub seed: u64,
}

impl DrcEmbedParams {
    pub fn new(alpha: Rational, seed: u64) -> Self {
        DrcEmbedParams { alpha, beta: None, trials: 32, seed }
    }

    pub fn with_beta(mut self, beta: Rational) -> Self {
        self.beta = Some(beta);
        self
    }
}

/// `α^{6Δ+1} / (256Δ)`.
pub fn default_beta(alpha: Rational, delta: usize) -> BigRational {
    if delta == 0 {
        return BigRational::zero();
    }
    arith::pow(alpha, 6 * delta + 1) / arith::big_int(256 * delta)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DrcEpoch {
    pub t: usize,
    pub reservoir: usize,
    pub next_reservoir: usize,
    pub overlap: usize,
    pub placed_b: usize,
    pub placed_a: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DrcReport {
    pub outcome: Outcome<VertexMap>,
    pub width_budget: usize,
    pub beta: BigRational,
    pub epochs: Vec<DrcEpoch>,
}

/// Which reservoir a forward neighbour `a` of a `B`-vertex is checked
/// against: the current one if `a` completes in this epoch, the next one
/// if it completes in the following epoch.
struct Guard<'a> {
    reservoir: &'a VertexSet,
    domain: &'a VertexSet,
    limit: BigRational,
}

/// Embeds the bipartite `H` into `Γ` along the labeling `L` block by block.
/// `B` is the side of the BFS bipartition holding the smallest label of
/// each component, `W = ⌊βn⌋`, `B_t` holds the `B`-vertices with label
/// below `2tW` and `A_t` the other-side vertices whose neighbourhood lies in
/// `B_t`. Each epoch selects the next reservoir inside the unused host,
/// places `B_{t+1} ∖ B_t` into the intersection of the two reservoirs while
/// avoiding vertices that would extend an already placed partial
/// neighbourhood into too many bad tuples, and then places `A_{t+1}` into
/// common neighbourhoods. Isolated vertices take the lowest unused hosts.
pub fn drc_bandwidth_embed(host: &Graph, h: &Graph, labeling: &Labeling, params: &DrcEmbedParams) -> Result<DrcReport> {
    let n = host.n();
    let m = h.n();
    if labeling.n() != m {
        return invalid(format!("labeling covers {} vertices, H has {m}", labeling.n()));
    }
    if params.alpha <= Rational::zero() || params.alpha > Rational::one() {
        return invalid("α must lie in (0, 1]");
    }
    if params.trials == 0 {
        return invalid("trials must be at least 1");
    }
    let Some(side) = h.bipartition() else {
        return invalid("H is not bipartite");
    };
    let delta = h.max_degree();
    let beta = match params.beta {
        Some(b) if b <= Rational::zero() || b > Rational::one() => return invalid("β must lie in (0, 1]"),
        Some(b) => arith::big(b),
        None => default_beta(params.alpha, delta),
    };
    let w = arith::floor(&(&beta * arith::big_int(n)));
    if w == 0 && h.edge_count() > 0 {
        return Err(Error::DegenerateBandwidth { beta: beta.to_string(), n });
    }
    let width = labeling_width(h, labeling)?;
    if width > w {
        return invalid(format!("labeling width {width} exceeds ⌊βn⌋ = {w}"));
    }
    let need = arith::big_int(m) + arith::big(params.alpha) * arith::big_int(n);
    if arith::big_int(host.min_degree()) < need {
        return invalid(format!("host minimum degree {} is below |V(H)| + αn", host.min_degree()));
    }

    // Orient each component so that its lowest label lies in B.
    let mut in_b = vec![false; m];
    let mut seen = vec![false; m];
    let mut by_label: Vec<usize> = (0..m).collect();
    by_label.sort_by_key(|&v| labeling.label(v));
    for &s in &by_label {
        if seen[s] {
            continue;
        }
        let flip = side[s];
        let mut stack = vec![s];
        seen[s] = true;
        while let Some(v) = stack.pop() {
            in_b[v] = side[v] != flip;
            for u in h.neighbors(v).iter() {
                if !seen[u] {
                    seen[u] = true;
                    stack.push(u);
                }
            }
        }
    }
    let isolated: Vec<usize> = (0..m).filter(|&v| h.neighbors(v).is_empty()).collect();
    let b_order: Vec<usize> = by_label.iter().copied().filter(|&v| in_b[v] && !h.neighbors(v).is_empty()).collect();
    let a_side: Vec<usize> = (0..m).filter(|&v| !in_b[v] && !h.neighbors(v).is_empty()).collect();
    // epoch in which an A-vertex completes: smallest t with N(a) ⊆ B_t
    let block = 2 * w.max(1);
    let completes = |a: usize| -> usize { h.neighbors(a).iter().map(|b| labeling.label(b) / block + 1).max().unwrap_or(0) };

    let beta8 = &beta * arith::big_int(8);
    let beta8_q = to_rational(&beta8)?;
    let gamma = if delta == 0 {
        BigRational::zero()
    } else {
        BigRational::from_integer(BigInt::from(16)) * &beta / arith::pow(params.alpha, 2 * delta)
    };
    let thr = arith::ceil(&(&beta8 * arith::big_int(n)));
    let limit = |x: &VertexSet, e: usize| -> BigRational {
        if e == 0 {
            // the full tuple itself must be good
            BigRational::zero()
        } else {
            num_traits::pow(&gamma * arith::big_int(x.len()), e)
        }
    };

    let mut rng = seeded(params.seed);
    let mut image: Vec<Option<usize>> = vec![None; m];
    let mut used = VertexSet::empty(n);
    let full = VertexSet::full(n);
    let mut epochs = Vec::new();
    let fail = |stage: &'static str, detail: String, epochs: Vec<DrcEpoch>| {
        Ok(DrcReport { outcome: Outcome::fail(stage, detail), width_budget: w, beta: beta.clone(), epochs })
    };

    let select = |domain: &VertexSet, x0: &VertexSet, salt: u64| -> Result<VertexSet> {
        if domain.is_empty() {
            return Ok(VertexSet::empty(n));
        }
        let mode = TupleMode::Sampled { trials: params.trials, seed: derive_seed(params.seed, salt) };
        Ok(drc_select(host, domain, x0, delta, beta8_q, mode)?.set)
    };
    let mut prev_domain = full.clone();
    let mut x_t = select(&full, &full, 0)?;
    let mut b_next = 0;
    let mut t = 0;
    while b_next < b_order.len() || a_side.iter().any(|&a| image[a].is_none()) {
        let v_t = full.difference(&used);
        let x0 = x_t.difference(&used);
        let x_next = select(&v_t, &x0, t as u64 + 1)?;
        let mut epoch = DrcEpoch {
            t,
            reservoir: x_t.len(),
            next_reservoir: x_next.len(),
            overlap: x_t.intersection_len(&x_next),
            placed_b: 0,
            placed_a: 0,
        };
        let hi = (t + 1) * block;
        while b_next < b_order.len() && labeling.label(b_order[b_next]) < hi {
            let b = b_order[b_next];
            let mut cand = x_t.intersection(&x_next);
            cand.difference_with(&used);
            for a in h.neighbors(b).iter() {
                let ep = completes(a);
                let guard = if ep == t + 1 {
                    Guard { reservoir: &x_t, domain: &prev_domain, limit: BigRational::zero() }
                } else if ep == t + 2 {
                    Guard { reservoir: &x_next, domain: &v_t, limit: BigRational::zero() }
                } else {
                    continue;
                };
                let placed: Vec<usize> =
                    h.neighbors(a).iter().filter(|&u| u != b && image[u].is_some()).map(|u| image[u].unwrap()).collect();
                let guard = Guard { limit: limit(guard.reservoir, delta - placed.len() - 1), ..guard };
                let mut prefix = placed.clone();
                prefix.push(0);
                let keep: Vec<usize> = cand
                    .iter()
                    .filter(|&x| {
                        *prefix.last_mut().unwrap() = x;
                        let bad = bad_extensions(host, guard.domain, guard.reservoir, delta, thr, &prefix);
                        BigRational::from_integer(BigInt::from(bad)) <= guard.limit
                    })
                    .collect();
                cand = VertexSet::from_vertices(n, keep)?;
            }
            let pool = cand.to_vec();
            let Some(&x) = pool.choose(&mut rng) else {
                return fail("b-placement", format!("no admissible host vertex for B-vertex {b} in epoch {t}"), epochs);
            };
            image[b] = Some(x);
            used.insert(x);
            b_next += 1;
            epoch.placed_b += 1;
        }
        let v_t_now = full.difference(&used);
        let due: Vec<usize> = a_side.iter().copied().filter(|&a| image[a].is_none() && completes(a) == t + 1).collect();
        for a in due {
            let mut common = v_t_now.clone();
            for u in h.neighbors(a).iter() {
                common.intersect_with(host.neighbors(image[u].expect("neighbours of a completed vertex are placed")));
            }
            common.difference_with(&used);
            let pool = common.to_vec();
            if pool.is_empty() {
                return fail("a-placement", format!("no common neighbour left for A-vertex {a} in epoch {t}"), epochs);
            }
            let x = pool[rng.random_range(0..pool.len())];
            image[a] = Some(x);
            used.insert(x);
            epoch.placed_a += 1;
        }
        epochs.push(epoch);
        prev_domain = v_t;
        x_t = x_next;
        t += 1;
    }
    for &v in &isolated {
        let Some(x) = full.difference(&used).first() else {
            return fail("isolated-placement", format!("host exhausted before isolated vertex {v}"), epochs);
        };
        image[v] = Some(x);
        used.insert(x);
    }
    let f = VertexMap::new(image.into_iter().map(|x| x.expect("every vertex placed")).collect(), n)?;
    if !f.is_injective() || !verify_homomorphism(h, host, &f)?.is_valid() {
        return Err(Error::Tripwire("bandwidth embedding failed independent verification".into()));
    }
    Ok(DrcReport { outcome: Outcome::Success(f), width_budget: w, beta, epochs })
}

fn to_rational(q: &BigRational) -> Result<Rational> {
    use num_traits::ToPrimitive;
    match (q.numer().to_i64(), q.denom().to_i64()) {
        (Some(a), Some(b)) => Ok(Rational::new(a, b)),
        _ => invalid(format!("β = {q} does not fit 64-bit arithmetic")),
    }
}
