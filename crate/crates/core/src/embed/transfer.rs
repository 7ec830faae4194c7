//! Transference: a monochromatic copy of `G` in a 2-coloured host from a
//! monochromatic injective copy of `H` in the coloured reduced graph.

use num_traits::One;
use serde::Serialize;

use super::rga::{rga_blowup_embed, RgaParams};
use super::Outcome;
use crate::error::{invalid, Error, Result};
use crate::graph::{Color, EdgeColoring, Graph, Rational};
use crate::morphisms::{find_capacity_homomorphism, verify_homomorphism, CapacityProfile, SearchOutcome, VertexMap, DEFAULT_BUDGET};
use crate::regularity::{fixed_k_partition, CheckMode, QualityReport, RegularityParams};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TransferParams {
    /// Regularity parameter of the partition.
    pub eps: Rational,
    /// A reduced edge takes the colour whose density in the pair is at
    /// least this (red wins at equality when it is 1/2).
    pub majority: Rational,
    pub xi: Rational,
    pub k: usize,
    pub mode: CheckMode,
    pub partition_retries: usize,
    pub embed_retries: usize,
    /// Defaults to `RgaParams::with_defaults(majority, xi)`.
    pub rga: Option<RgaParams>,
}

impl TransferParams {
    pub fn new(eps: Rational, xi: Rational, k: usize) -> Self {
        TransferParams {
            eps,
            majority: Rational::new(1, 2),
            xi,
            k,
            mode: CheckMode::Exhaustive,
            partition_retries: 1,
            embed_retries: 20,
            rga: None,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct TransferReport {
    #[serde(skip)]
    pub outcome: Outcome<(Color, VertexMap)>,
    pub quality: QualityReport,
    pub reduced_red_edges: usize,
    pub reduced_blue_edges: usize,
    /// Colours whose reduced graph admitted an injective copy of `H`.
    pub host_colors: Vec<char>,
    /// Largest preimage of the composed map `V(G) -> V(R)`.
    pub composed_max_preimage: usize,
    pub rga_attempts: usize,
}

/// Partitions the red graph into `k` classes, keeps the ε-regular pairs,
/// colours each kept pair by majority density, looks for an injective
/// homomorphism `g: H -> R_col` (red first), composes `h = g ∘ f` and runs
/// the blow-up embedding of `G` along `h` inside the colour class.
pub fn transference_pipeline(
    g: &Graph,
    h: &Graph,
    f: &VertexMap,
    coloring: &EdgeColoring,
    params: &TransferParams,
    seed: u64,
) -> Result<TransferReport> {
    let n = coloring.n();
    if coloring.host().edge_count() != n * n.saturating_sub(1) / 2 {
        return invalid("the colouring must be of a complete graph");
    }
    if params.k == 0 || params.k > n {
        return invalid(format!("k = {} must satisfy 1 <= k <= N = {n}", params.k));
    }
    let verdict = verify_homomorphism(g, h, f)?;
    if !verdict.is_valid() {
        return invalid(format!("f is not a homomorphism G -> H: edges {:?} are not preserved", verdict.violations));
    }
    let red = coloring.class(Color::Red);
    let reg = RegularityParams::new(params.eps, params.majority)?;
    let (partition, quality, verdicts) = fixed_k_partition(red, params.k, &reg, params.mode, seed, params.partition_retries)?;
    let k = params.k;
    let mut reduced = [Graph::empty(k), Graph::empty(k)];
    for v in verdicts.iter().filter(|v| v.verdict.counts_as_regular()) {
        let col = if v.density >= params.majority { Color::Red } else { Color::Blue };
        reduced[col as usize].add_edge(v.i, v.j)?;
    }
    let rga = params.rga.unwrap_or_else(|| RgaParams::with_defaults(params.majority, params.xi));
    let f_cap = f.preimage_sizes().into_iter().max().unwrap_or(0);
    let mut report = TransferReport {
        outcome: Outcome::fail("reduced-homomorphism", "H has no injective copy in either reduced colour class"),
        quality,
        reduced_red_edges: reduced[0].edge_count(),
        reduced_blue_edges: reduced[1].edge_count(),
        host_colors: Vec::new(),
        composed_max_preimage: 0,
        rga_attempts: 0,
    };
    let size = partition.class_size();
    for col in Color::BOTH {
        let r = &reduced[col as usize];
        let copy = find_capacity_homomorphism(h, r, &CapacityProfile::uniform(k, 1), Some(DEFAULT_BUDGET))?;
        let SearchOutcome::Found(gmap) = copy else {
            continue;
        };
        report.host_colors.push(col.letter());
        let hmap = f.then(&gmap)?;
        let m = hmap.preimage_sizes().into_iter().max().unwrap_or(0);
        if m > f_cap {
            return Err(Error::Tripwire(format!("composed map has a preimage of size {m} above the cap {f_cap}")));
        }
        report.composed_max_preimage = m;
        if Rational::from_integer(size as i64) < (Rational::one() + rga.xi) * Rational::from_integer(m as i64) {
            report.outcome = Outcome::fail("class-size", format!("classes of size {size} cannot host {m} vertices with slack {}", rga.xi));
            continue;
        }
        let run = rga_blowup_embed(coloring.class(col), &partition, r, g, &hmap, rga, seed, params.embed_retries, false)?;
        report.rga_attempts += run.attempts;
        match run.outcome {
            Outcome::Success(emb) => {
                if !emb.is_injective() || !verify_homomorphism(g, coloring.class(col), &emb)?.is_valid() {
                    return Err(Error::Tripwire("transferred embedding is not a monochromatic copy".into()));
                }
                report.outcome = Outcome::Success((col, emb));
                return Ok(report);
            }
            Outcome::Failure(fail) => {
                report.outcome = Outcome::fail("blow-up", format!("{} colour: {fail}", col.letter()));
            }
        }
    }
    Ok(report)
}
