//! ε-regular pairs, reduced graphs and random equitable partitions.

use num_traits::{One, Signed, Zero};
use rand::seq::{IndexedRandom, SliceRandom};
use rand::Rng as _;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{invalid, Result};
use crate::graph::{ceil_mul, floor_mul, Graph, Rational, VertexSet};
use crate::rng::{derive_seed, seeded};

pub const EXHAUSTIVE_SIDE_CAP: usize = 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RegularityParams {
    eps: Rational,
    delta: Rational,
}

impl RegularityParams {
    pub fn new(eps: Rational, delta: Rational) -> Result<Self> {
        if eps <= Rational::zero() || eps >= Rational::one() {
            return invalid(format!("epsilon {eps} outside (0,1)"));
        }
        if delta < Rational::zero() || delta > Rational::one() {
            return invalid(format!("delta {delta} outside [0,1]"));
        }
        Ok(RegularityParams { eps, delta })
    }

    pub fn eps(&self) -> Rational {
        self.eps
    }

    pub fn delta(&self) -> Rational {
        self.delta
    }
}

/// `V_0 ∪ V_1 ∪ ... ∪ V_k` with equal-sized `V_1..V_k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Partition {
    n: usize,
    exceptional: VertexSet,
    classes: Vec<VertexSet>,
}

impl Partition {
    /// Unlisted vertices form the exceptional class.
    pub fn from_classes(n: usize, classes: Vec<VertexSet>) -> Result<Self> {
        let mut covered = VertexSet::empty(n);
        for (i, c) in classes.iter().enumerate() {
            if c.universe() != n {
                return invalid(format!("class {} lives on {} vertices, expected {n}", i + 1, c.universe()));
            }
            if !covered.is_disjoint(c) {
                return invalid(format!("class {} overlaps an earlier class", i + 1));
            }
            covered.union_with(c);
        }
        if let Some(c) = classes.iter().find(|c| c.len() != classes[0].len()) {
            return invalid(format!("class sizes differ ({} vs {})", c.len(), classes[0].len()));
        }
        Ok(Partition { n, exceptional: covered.complement(), classes })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.classes.len()
    }

    pub fn exceptional(&self) -> &VertexSet {
        &self.exceptional
    }

    /// `V_1..V_k`, zero-indexed.
    pub fn classes(&self) -> &[VertexSet] {
        &self.classes
    }

    pub fn class_size(&self) -> usize {
        self.classes.first().map_or(0, |c| c.len())
    }

    /// Class index of `v`, `None` for exceptional vertices.
    pub fn class_of(&self, v: usize) -> Option<usize> {
        self.classes.iter().position(|c| c.contains(v))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CheckMode {
    /// Every admissible sub-pair; sides of at most 16 vertices.
    Exhaustive,
    /// Random sub-pairs plus local search. Can refute, never certify.
    Sampled { budget: usize, seed: u64 },
}

impl CheckMode {
    pub fn name(&self) -> &'static str {
        match self {
            CheckMode::Exhaustive => "exhaustive",
            CheckMode::Sampled { .. } => "sampled",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RegularityVerdict {
    CertifiedRegular,
    Violated { x: VertexSet, y: VertexSet, sub_density: Rational, pair_density: Rational },
    Unrefuted { samples: usize },
}

impl RegularityVerdict {
    /// Certified or unrefuted.
    pub fn counts_as_regular(&self) -> bool {
        !matches!(self, RegularityVerdict::Violated { .. })
    }
}

/// Re-derives a violation from scratch.
pub fn witness_is_valid(g: &Graph, x: &VertexSet, y: &VertexSet, eps: Rational, v: &RegularityVerdict) -> bool {
    let RegularityVerdict::Violated { x: xs, y: ys, .. } = v else {
        return false;
    };
    if !xs.is_subset(x) || !ys.is_subset(y) {
        return false;
    }
    if xs.len() < ceil_mul(eps, x.len()) || ys.len() < ceil_mul(eps, y.len()) || xs.is_empty() || ys.is_empty() {
        return false;
    }
    let (Ok(d), Ok(ds)) = (g.pair_density(x, y), g.pair_density(xs, ys)) else {
        return false;
    };
    (d - ds).abs() > eps
}

/// Best violation found so far: largest deviation, then largest area.
struct Best {
    dev: Rational,
    area: usize,
    pair: Option<(VertexSet, VertexSet, Rational)>,
}

impl Best {
    fn new() -> Self {
        Best { dev: Rational::zero(), area: 0, pair: None }
    }

    fn offer(&mut self, dev: Rational, area: usize, make: impl FnOnce() -> (VertexSet, VertexSet, Rational)) {
        if dev > self.dev || (dev == self.dev && area > self.area && self.pair.is_some()) {
            self.dev = dev;
            self.area = area;
            self.pair = Some(make());
        }
    }
}

/// For a fixed subset `s_sub` of the short side, scans every admissible size
/// of the other side; for each size the extreme edge counts come from the
/// top and bottom of the sorted degree sequence into `s_sub`.
struct SideScan<'a> {
    g: &'a Graph,
    other: Vec<usize>,
    other_min: usize,
    d: Rational,
    eps: Rational,
}

impl SideScan<'_> {
    fn scan(&self, s_sub: &VertexSet, best: &mut Best) {
        let a = s_sub.len();
        let mut by_deg: Vec<(usize, usize)> = self.other.iter().map(|&t| (self.g.neighbors(t).intersection_len(s_sub), t)).collect();
        by_deg.sort_by_key(|&(d, t)| (std::cmp::Reverse(d), t));
        let total = by_deg.len();
        let mut top = 0;
        let mut bottom = 0;
        for k in 1..=total {
            top += by_deg[k - 1].0;
            bottom += by_deg[total - k].0;
            if k < self.other_min {
                continue;
            }
            let area = a * k;
            for (e, from_top) in [(top, true), (bottom, false)] {
                let ds = Rational::new(e as i64, area as i64);
                let dev = (ds - self.d).abs();
                if dev > self.eps {
                    best.offer(dev, area, || {
                        let picked: Vec<usize> = if from_top {
                            by_deg[..k].iter().map(|p| p.1).collect()
                        } else {
                            by_deg[total - k..].iter().map(|p| p.1).collect()
                        };
                        let t_sub = VertexSet::from_vertices(s_sub.universe(), picked).unwrap();
                        (s_sub.clone(), t_sub, ds)
                    });
                }
            }
        }
    }
}

pub fn regularity_check(g: &Graph, x: &VertexSet, y: &VertexSet, p: &RegularityParams, mode: CheckMode) -> Result<RegularityVerdict> {
    let d = g.pair_density(x, y)?;
    let swap = y.len() < x.len();
    let (short, long) = if swap { (y, x) } else { (x, y) };
    let short_v = short.to_vec();
    let short_min = ceil_mul(p.eps, short.len()).max(1);
    let scan = SideScan { g, other: long.to_vec(), other_min: ceil_mul(p.eps, long.len()).max(1), d, eps: p.eps };
    let mut best = Best::new();
    let samples = match mode {
        CheckMode::Exhaustive => {
            if x.len() > EXHAUSTIVE_SIDE_CAP || y.len() > EXHAUSTIVE_SIDE_CAP {
                return invalid(format!("exhaustive check needs sides of at most {EXHAUSTIVE_SIDE_CAP}, got {} and {}", x.len(), y.len()));
            }
            for mask in 1u32..1 << short_v.len() {
                if (mask.count_ones() as usize) < short_min {
                    continue;
                }
                let sub = VertexSet::from_vertices(g.n(), short_v.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &v)| v))?;
                scan.scan(&sub, &mut best);
            }
            None
        }
        CheckMode::Sampled { budget, seed } => {
            let mut rng = seeded(seed);
            for _ in 0..budget {
                let size = rng.random_range(short_min..=short_v.len());
                let mut sub = VertexSet::from_vertices(g.n(), short_v.choose_multiple(&mut rng, size).copied())?;
                let mut local = Best::new();
                scan.scan(&sub, &mut local);
                let mut cur = score(&sub, &scan);
                // Single-vertex flips while they increase the deviation.
                loop {
                    let mut improved = false;
                    for &v in &short_v {
                        let mut cand = sub.clone();
                        if cand.contains(v) {
                            if cand.len() <= short_min {
                                continue;
                            }
                            cand.remove(v);
                        } else {
                            cand.insert(v);
                        }
                        let s = score(&cand, &scan);
                        if s > cur {
                            cur = s;
                            sub = cand;
                            improved = true;
                        }
                    }
                    if !improved {
                        break;
                    }
                }
                scan.scan(&sub, &mut local);
                if let Some((a, b, ds)) = local.pair {
                    best.offer(local.dev, local.area, || (a, b, ds));
                }
            }
            Some(budget)
        }
    };
    Ok(match (best.pair, samples) {
        (Some((s_sub, t_sub, ds)), _) => {
            let (xs, ys) = if swap { (t_sub, s_sub) } else { (s_sub, t_sub) };
            RegularityVerdict::Violated { x: xs, y: ys, sub_density: ds, pair_density: d }
        }
        (None, None) => RegularityVerdict::CertifiedRegular,
        (None, Some(samples)) => RegularityVerdict::Unrefuted { samples },
    })
}

/// Largest deviation reachable from `sub` on the short side, admissible or not.
fn score(sub: &VertexSet, scan: &SideScan) -> Rational {
    let a = sub.len();
    let mut degs: Vec<usize> = scan.other.iter().map(|&t| scan.g.neighbors(t).intersection_len(sub)).collect();
    degs.sort_unstable_by(|a, b| b.cmp(a));
    let k = scan.other_min.max(1).min(degs.len());
    let top: usize = degs[..k].iter().sum();
    let bottom: usize = degs[degs.len() - k..].iter().sum();
    let area = (a * k) as i64;
    let hi = (Rational::new(top as i64, area) - scan.d).abs();
    let lo = (Rational::new(bottom as i64, area) - scan.d).abs();
    hi.max(lo)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PairVerdict {
    pub i: usize,
    pub j: usize,
    pub density: Rational,
    pub verdict: RegularityVerdict,
}

/// Verdicts for all class pairs `i < j`, in lexicographic order.
pub fn pair_verdicts(g: &Graph, partition: &Partition, p: &RegularityParams, mode: CheckMode) -> Result<Vec<PairVerdict>> {
    let k = partition.k();
    let pairs: Vec<(usize, usize)> = (0..k).flat_map(|i| (i + 1..k).map(move |j| (i, j))).collect();
    pairs
        .par_iter()
        .enumerate()
        .map(|(idx, &(i, j))| {
            let (x, y) = (&partition.classes()[i], &partition.classes()[j]);
            let pair_mode = match mode {
                CheckMode::Sampled { budget, seed } => CheckMode::Sampled { budget, seed: derive_seed(seed, idx as u64) },
                CheckMode::Exhaustive => CheckMode::Exhaustive,
            };
            Ok(PairVerdict { i, j, density: g.pair_density(x, y)?, verdict: regularity_check(g, x, y, p, pair_mode)? })
        })
        .collect()
}

/// Reduced graph on the classes: `{i,j}` is an edge when the pair is not
/// refuted and, with `with_density`, has density at least δ.
pub fn reduced_graph(g: &Graph, partition: &Partition, p: &RegularityParams, with_density: bool, mode: CheckMode) -> Result<Graph> {
    Ok(reduced_from_verdicts(partition.k(), &pair_verdicts(g, partition, p, mode)?, p, with_density))
}

pub fn reduced_from_verdicts(k: usize, verdicts: &[PairVerdict], p: &RegularityParams, with_density: bool) -> Graph {
    let mut r = Graph::empty(k);
    for pv in verdicts {
        if pv.verdict.counts_as_regular() && (!with_density || pv.density >= p.delta) {
            r.add_edge(pv.i, pv.j).expect("distinct classes");
        }
    }
    r
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct QualityReport {
    pub k: usize,
    pub class_size: usize,
    pub exceptional_size: usize,
    /// For each class, how many partners it forms a refuted pair with.
    pub irregular_per_class: Vec<usize>,
    /// `⌊εk⌋`.
    pub per_class_limit: usize,
    pub every_class_within_limit: bool,
    pub irregular_pairs: Vec<(usize, usize)>,
    /// `⌊εk²⌋`.
    pub total_limit: usize,
    pub total_within_limit: bool,
    pub exceptional_within_eps_n: bool,
    pub mode: String,
    pub attempts: usize,
    pub chosen_attempt: usize,
}

impl QualityReport {
    fn key(&self) -> (usize, usize) {
        (self.irregular_pairs.len(), self.irregular_per_class.iter().copied().max().unwrap_or(0))
    }
}

pub fn quality_report(n: usize, partition: &Partition, verdicts: &[PairVerdict], p: &RegularityParams, mode: CheckMode) -> QualityReport {
    let k = partition.k();
    let mut per = vec![0; k];
    let mut irregular = Vec::new();
    for pv in verdicts.iter().filter(|pv| !pv.verdict.counts_as_regular()) {
        per[pv.i] += 1;
        per[pv.j] += 1;
        irregular.push((pv.i, pv.j));
    }
    let per_class_limit = floor_mul(p.eps, k);
    let total_limit = floor_mul(p.eps, k * k);
    QualityReport {
        k,
        class_size: partition.class_size(),
        exceptional_size: partition.exceptional().len(),
        every_class_within_limit: per.iter().all(|&c| c <= per_class_limit),
        irregular_per_class: per,
        per_class_limit,
        total_within_limit: irregular.len() <= total_limit,
        irregular_pairs: irregular,
        total_limit,
        exceptional_within_eps_n: Rational::from_integer(partition.exceptional().len() as i64) <= p.eps * Rational::from_integer(n as i64),
        mode: mode.name().to_string(),
        attempts: 1,
        chosen_attempt: 0,
    }
}

/// Uniformly random partition into `k` classes of size `⌊n/k⌋`, leftovers in
/// `V_0`. Each of `retries` attempts uses a fresh derived seed; the attempt
/// with the fewest refuted pairs is kept (earliest on ties).
pub fn fixed_k_partition(
    g: &Graph,
    k: usize,
    p: &RegularityParams,
    mode: CheckMode,
    seed: u64,
    retries: usize,
) -> Result<(Partition, QualityReport, Vec<PairVerdict>)> {
    let n = g.n();
    if k == 0 || k > n {
        return invalid(format!("k = {k} must satisfy 1 <= k <= n = {n}"));
    }
    let size = n / k;
    let attempts = retries.max(1);
    let mut best: Option<(Partition, QualityReport, Vec<PairVerdict>)> = None;
    for attempt in 0..attempts {
        let s = derive_seed(seed, attempt as u64);
        let mut order: Vec<usize> = (0..n).collect();
        order.shuffle(&mut seeded(s));
        let classes = order[..k * size].chunks(size).map(|c| VertexSet::from_vertices(n, c.iter().copied())).collect::<Result<Vec<_>>>()?;
        let partition = Partition::from_classes(n, classes)?;
        let pair_mode = match mode {
            CheckMode::Sampled { budget, .. } => CheckMode::Sampled { budget, seed: derive_seed(s, 1 << 32) },
            CheckMode::Exhaustive => CheckMode::Exhaustive,
        };
        let verdicts = pair_verdicts(g, &partition, p, pair_mode)?;
        let mut report = quality_report(n, &partition, &verdicts, p, mode);
        report.attempts = attempts;
        report.chosen_attempt = attempt;
        if best.as_ref().is_none_or(|b| report.key() < b.1.key()) {
            best = Some((partition, report, verdicts));
        }
    }
    Ok(best.expect("at least one attempt"))
}
