//! Config-driven batch runs: every `(instance, seed)` cell is executed,
//! positive results are re-verified independently, and rows are emitted as
//! CSV in cell order together with a JSON summary.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};
use sha2::{Digest, Sha256};

use crate::bandwidth::{exact_bandwidth, heuristic_labeling, labeling_width, BandwidthOutcome};
use crate::codec::resolve_graph;
use crate::embed::dense::{dense_greedy_embed, DenseParams, DenseWitness};
use crate::embed::drc::{drc_bandwidth_embed, DrcEmbedParams};
use crate::embed::lovasz::lovasz_partition;
use crate::embed::rga::{rga_blowup_embed, verify_blowup_embedding, RgaParams};
use crate::embed::transfer::{transference_pipeline, TransferParams};
use crate::embed::wheel::wheel_mono_embed;
use crate::embed::Outcome;
use crate::error::{Error, Result};
use crate::generators::{
    min_degree_threshold, random_bounded_degree_bipartite, random_coloring, random_dense_blowup, random_guest_over, random_min_degree_host,
};
use crate::graph::{Graph, Rational, WeightedGraph};
use crate::morphisms::{find_capacity_homomorphism, verify_capacity, verify_homomorphism, verify_map, CapacityProfile, SearchOutcome};
use crate::oracles::{mono_copy_search, ramsey_number, stable_ramsey, weighted_ramsey, OracleConfig, OracleResult, OracleValue};
use crate::regularity::{fixed_k_partition, witness_is_valid, CheckMode, Partition, RegularityParams, RegularityVerdict};
use crate::rng::derive_seed;

pub const SCHEMA_VERSION: u32 = 1;
pub const CSV_HEADER: [&str; 9] = ["schema_version", "cell", "instance", "seed", "outcome", "value", "verified", "stage", "detail"];
pub const WORKERS_ENV: &str = "RF_WORKERS";

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Seeds {
    List(Vec<u64>),
    Range { start: u64, count: u64 },
}

impl Default for Seeds {
    fn default() -> Self {
        Seeds::List(Vec::new())
    }
}

impl Seeds {
    pub fn expand(&self) -> Vec<u64> {
        match self {
            Seeds::List(v) => v.clone(),
            Seeds::Range { start, count } => (*start..start + count).collect(),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Outputs {
    pub csv: Option<PathBuf>,
    pub summary: Option<PathBuf>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub task: String,
    #[serde(default)]
    pub instances: Vec<String>,
    #[serde(default)]
    pub params: Map<String, Value>,
    #[serde(default)]
    pub seeds: Seeds,
    #[serde(default = "one")]
    pub workers: usize,
    #[serde(default)]
    pub output: Outputs,
}

fn one() -> usize {
    1
}

impl ExperimentConfig {
    pub fn from_json(text: &str, path: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config { path: path.into(), message: e.to_string() })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let shown = path.display().to_string();
        let text = std::fs::read_to_string(path).map_err(|e| Error::Config { path: shown.clone(), message: e.to_string() })?;
        Self::from_json(&text, &shown)
    }

    /// SHA-256 of the canonical JSON of the config without `workers` and
    /// `output`, so neither changes the identity of an experiment.
    pub fn hash(&self) -> String {
        let mut v = serde_json::to_value(self).expect("config serializes");
        if let Value::Object(m) = &mut v {
            m.remove("workers");
            m.remove("output");
        }
        let digest = Sha256::digest(serde_json::to_vec(&v).expect("value serializes"));
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }
}

/// One CSV row.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CellRecord {
    pub cell: usize,
    pub instance: String,
    pub seed: u64,
    /// `some`, `none`, `value`, `exceeds`, `infinite`, `budget`,
    /// `degenerate` or `error`.
    pub outcome: String,
    pub value: String,
    pub verified: bool,
    pub stage: String,
    pub detail: String,
    #[serde(skip)]
    pub wall_ms: u128,
}

impl CellRecord {
    /// Rows that claim something and therefore must carry a passed check.
    pub fn is_positive(&self) -> bool {
        matches!(self.outcome.as_str(), "some" | "value" | "exceeds" | "infinite")
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InstanceSummary {
    pub instance: String,
    pub cells: usize,
    pub successes: usize,
    /// Set when every cell of the instance reported the same value.
    pub value: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Summary {
    pub schema_version: u32,
    pub config_hash: String,
    pub task: String,
    pub cells: usize,
    pub outcomes: BTreeMap<String, usize>,
    pub stages: BTreeMap<String, usize>,
    pub verified: usize,
    pub successes: usize,
    pub success_rate: Option<f64>,
    pub instances: Vec<InstanceSummary>,
    /// The common value when there is a single instance with one value.
    pub value: Option<String>,
}

#[derive(Clone, Debug)]
pub struct RunOutput {
    pub records: Vec<CellRecord>,
    pub summary: Summary,
    pub csv: String,
    pub summary_json: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Task {
    Ramsey,
    WRamsey,
    SRamsey,
    Bandwidth,
    Hom,
    Regularity,
    Lovasz,
    Dense,
    Wheel,
    Rga,
    Drc,
    Transfer,
}

impl Task {
    fn parse(s: &str) -> Option<Task> {
        Some(match s {
            "ramsey" => Task::Ramsey,
            "wramsey" => Task::WRamsey,
            "sramsey" => Task::SRamsey,
            "bandwidth" => Task::Bandwidth,
            "hom" => Task::Hom,
            "regularity" => Task::Regularity,
            "split-lovasz" | "lovasz" => Task::Lovasz,
            "embed-dense" => Task::Dense,
            "embed-wheel" => Task::Wheel,
            "embed-rga" => Task::Rga,
            "embed-drc" => Task::Drc,
            "transfer" => Task::Transfer,
            _ => return None,
        })
    }

    fn keys(self) -> &'static [&'static str] {
        match self {
            Task::Ramsey => &["n_max", "iso_prune"],
            Task::WRamsey => &["n_max", "iso_prune", "weight", "weights"],
            Task::SRamsey => &["n_max", "iso_prune", "weight", "weights", "eps"],
            Task::Bandwidth => &["budget", "heuristic"],
            Task::Hom => &["target", "cap", "budget"],
            Task::Regularity => &["k", "eps", "delta", "mode", "budget", "retries"],
            Task::Lovasz => &["degrees"],
            Task::Dense => &["host", "alpha", "beta", "rho", "delta", "weight"],
            Task::Wheel => &["k", "weight", "weights", "red_prob"],
            Task::Rga => &["part_size", "edge_prob", "guest_part", "rounds", "delta", "xi", "retries"],
            Task::Drc => &["host", "alpha", "beta", "trials"],
            Task::Transfer => &["base", "guest_part", "rounds", "k", "eps", "xi", "red_prob", "mode", "budget", "retries"],
        }
    }
}

/// Typed access to the `params` object.
struct Params<'a> {
    map: &'a Map<String, Value>,
}

impl Params<'_> {
    fn err<T>(&self, key: &str, what: &str) -> Result<T> {
        Err(Error::InvalidInput(format!("parameter {key:?} must be {what}")))
    }

    fn usize(&self, key: &str, default: usize) -> Result<usize> {
        match self.map.get(key) {
            None => Ok(default),
            Some(v) => v.as_u64().map(|x| x as usize).map_or_else(|| self.err(key, "a nonnegative integer"), Ok),
        }
    }

    fn bool(&self, key: &str, default: bool) -> Result<bool> {
        match self.map.get(key) {
            None => Ok(default),
            Some(v) => v.as_bool().map_or_else(|| self.err(key, "a boolean"), Ok),
        }
    }

    fn str(&self, key: &str) -> Result<Option<&str>> {
        match self.map.get(key) {
            None => Ok(None),
            Some(v) => v.as_str().map_or_else(|| self.err(key, "a string"), |s| Ok(Some(s))),
        }
    }

    fn rational_of(&self, key: &str, v: &Value) -> Result<Rational> {
        match v {
            Value::Number(x) if x.is_i64() => Ok(Rational::from_integer(x.as_i64().unwrap())),
            Value::String(s) => s.trim().parse::<Rational>().or_else(|_| self.err(key, "a rational such as \"1/4\"")),
            _ => self.err(key, "a rational such as \"1/4\""),
        }
    }

    fn rational(&self, key: &str, default: Rational) -> Result<Rational> {
        self.map.get(key).map_or(Ok(default), |v| self.rational_of(key, v))
    }

    fn opt_rational(&self, key: &str) -> Result<Option<Rational>> {
        self.map.get(key).map(|v| self.rational_of(key, v)).transpose()
    }

    fn usizes(&self, key: &str) -> Result<Option<Vec<usize>>> {
        match self.map.get(key) {
            None => Ok(None),
            Some(Value::Array(a)) => a
                .iter()
                .map(|v| v.as_u64().map(|x| x as usize).map_or_else(|| self.err(key, "a list of integers"), Ok))
                .collect::<Result<Vec<_>>>()
                .map(Some),
            Some(_) => self.err(key, "a list of integers"),
        }
    }

    fn weights(&self, n: usize) -> Result<Vec<Rational>> {
        if let Some(Value::Array(a)) = self.map.get("weights") {
            let w = a.iter().map(|v| self.rational_of("weights", v)).collect::<Result<Vec<_>>>()?;
            if w.len() != n {
                return self.err("weights", &format!("a list of {n} rationals"));
            }
            return Ok(w);
        }
        Ok(vec![self.rational("weight", Rational::from_integer(1))?; n])
    }

    fn mode(&self, seed: u64) -> Result<CheckMode> {
        match self.str("mode")?.unwrap_or("exhaustive") {
            "exhaustive" => Ok(CheckMode::Exhaustive),
            "sampled" => Ok(CheckMode::Sampled { budget: self.usize("budget", 2000)?, seed }),
            _ => self.err("mode", "\"exhaustive\" or \"sampled\""),
        }
    }
}

/// Graph source of an instance or of a `host`/`target` parameter. Seeded
/// kinds are drawn per cell.
#[derive(Clone, Debug)]
enum Source {
    Fixed(Graph),
    MinDegree { n: usize, eps: Rational },
    Bipartite { n: usize, max_degree: usize },
}

impl Source {
    fn parse(spec: &str) -> Result<Source> {
        let (kind, rest) = spec.split_once(':').unwrap_or((spec, ""));
        let fields: Vec<&str> = rest.split(',').map(str::trim).collect();
        let bad = || Error::InvalidInput(format!("cannot parse {spec:?}"));
        match kind {
            "random_min_degree" => {
                let [n, eps] = fields.as_slice() else { return Err(bad()) };
                Ok(Source::MinDegree { n: n.parse().map_err(|_| bad())?, eps: eps.parse().map_err(|_| bad())? })
            }
            "random_bipartite" => {
                let [n, d] = fields.as_slice() else { return Err(bad()) };
                Ok(Source::Bipartite { n: n.parse().map_err(|_| bad())?, max_degree: d.parse().map_err(|_| bad())? })
            }
            _ => resolve_graph(spec).map(Source::Fixed),
        }
    }

    fn draw(&self, seed: u64) -> Result<Graph> {
        match self {
            Source::Fixed(g) => Ok(g.clone()),
            Source::MinDegree { n, eps } => random_min_degree_host(*n, *eps, seed),
            Source::Bipartite { n, max_degree } => random_bounded_degree_bipartite(*n, *max_degree, seed),
        }
    }
}

struct Plan {
    task: Task,
    instances: Vec<(String, Source)>,
    params: Map<String, Value>,
    seeds: Vec<u64>,
    aux: BTreeMap<&'static str, Source>,
}

fn config_err(path: &str, e: impl std::fmt::Display) -> Error {
    Error::Config { path: path.into(), message: e.to_string() }
}

fn plan(cfg: &ExperimentConfig, path: &str) -> Result<Plan> {
    let task = Task::parse(&cfg.task).ok_or_else(|| config_err(path, format!("unknown task {:?}", cfg.task)))?;
    if let Some(k) = cfg.params.keys().find(|k| !task.keys().contains(&k.as_str())) {
        return Err(config_err(path, format!("parameter {k:?} is not used by task {:?} (known: {:?})", cfg.task, task.keys())));
    }
    let instances = cfg
        .instances
        .iter()
        .map(|s| Source::parse(s).map(|src| (s.clone(), src)).map_err(|e| config_err(path, e)))
        .collect::<Result<Vec<_>>>()?;
    let mut aux = BTreeMap::new();
    let p = Params { map: &cfg.params };
    for key in ["host", "target", "base"] {
        if let Some(spec) = p.str(key).map_err(|e| config_err(path, e))? {
            aux.insert(key, Source::parse(spec).map_err(|e| config_err(path, e))?);
        }
    }
    let required: &[&str] = match task {
        Task::Hom => &["target"],
        Task::Dense | Task::Drc => &["host"],
        Task::Transfer => &["base"],
        _ => &[],
    };
    if let Some(k) = required.iter().find(|k| !aux.contains_key(*k)) {
        return Err(config_err(path, format!("task {:?} needs parameter {k:?}", cfg.task)));
    }
    if task == Task::Lovasz && cfg.params.get("degrees").is_none() {
        return Err(config_err(path, "task \"split-lovasz\" needs parameter \"degrees\""));
    }
    if cfg.workers == 0 {
        return Err(config_err(path, "workers must be at least 1"));
    }
    Ok(Plan { task, instances, params: cfg.params.clone(), seeds: cfg.seeds.expand(), aux })
}

/// What a single cell produced before it is turned into a row.
struct Cell {
    outcome: &'static str,
    value: String,
    verified: bool,
    stage: String,
    detail: String,
}

impl Cell {
    fn new(outcome: &'static str, value: impl ToString, verified: bool) -> Self {
        Cell { outcome, value: value.to_string(), verified, stage: String::new(), detail: String::new() }
    }

    fn failed<T>(o: &Outcome<T>) -> Self {
        let f = o.failure().expect("failure");
        Cell { outcome: "none", value: String::new(), verified: false, stage: f.stage.into(), detail: f.detail.clone() }
    }
}

fn oracle_cell(r: &OracleResult, gw: &WeightedGraph, min_degree: impl Fn(usize) -> usize) -> Result<Cell> {
    let witness_ok = |expect_n: usize| -> Result<bool> {
        match &r.witness {
            None => Ok(expect_n == 0),
            Some(c) => Ok(c.n() == expect_n && c.host().min_degree() >= min_degree(expect_n) && mono_copy_search(c, gw)?.is_none()),
        }
    };
    Ok(match r.value {
        OracleValue::Value(n) => Cell::new("value", n, witness_ok(n - 1)?),
        OracleValue::Exceeds(n) => Cell::new("exceeds", n, witness_ok(n)?),
        OracleValue::InfiniteSuspected(n) => Cell::new("infinite", n, witness_ok(n)?),
    })
}

fn run_cell(plan: &Plan, source: &Source, seed: u64) -> Result<Cell> {
    let p = Params { map: &plan.params };
    let g = source.draw(derive_seed(seed, 1))?;
    let aux = |key: &str| -> Result<Graph> { plan.aux[key].draw(derive_seed(seed, 2)) };
    let oracle_cfg = || -> Result<OracleConfig> { Ok(OracleConfig::new(p.usize("n_max", 6)?).iso_prune(p.bool("iso_prune", true)?)) };
    match plan.task {
        Task::Ramsey => {
            let r = ramsey_number(&g, &oracle_cfg()?)?;
            oracle_cell(&r, &WeightedGraph::unit(g), |_| 0)
        }
        Task::WRamsey => {
            let gw = WeightedGraph::new(g.clone(), p.weights(g.n())?)?;
            let r = weighted_ramsey(&gw, &oracle_cfg()?)?;
            oracle_cell(&r, &gw, |_| 0)
        }
        Task::SRamsey => {
            let eps = p.rational("eps", Rational::new(1, 4))?;
            let gw = WeightedGraph::new(g.clone(), p.weights(g.n())?)?;
            let r = stable_ramsey(&gw, eps, &oracle_cfg()?)?;
            oracle_cell(&r, &gw, |n| min_degree_threshold(n, eps))
        }
        Task::Bandwidth => {
            if p.bool("heuristic", false)? {
                let (l, w) = heuristic_labeling(&g);
                return Ok(Cell::new("value", w, labeling_width(&g, &l)? == w));
            }
            let budget = p.usize("budget", 10_000_000)? as u64;
            Ok(match exact_bandwidth(&g, Some(budget)) {
                BandwidthOutcome::Exact { width, labeling } => Cell::new("value", width, labeling_width(&g, &labeling)? == width),
                BandwidthOutcome::BudgetExhausted { width, labeling } => {
                    let mut c = Cell::new("budget", width, labeling_width(&g, &labeling)? == width);
                    c.stage = "budget".into();
                    c
                }
            })
        }
        Task::Hom => {
            let h = aux("target")?;
            let profile = CapacityProfile::uniform(h.n(), p.usize("cap", usize::MAX)?);
            let budget = p.usize("budget", 10_000_000)? as u64;
            Ok(match find_capacity_homomorphism(&g, &h, &profile, Some(budget))? {
                SearchOutcome::Found(f) => Cell::new("some", crate::codec::write_map(&f), verify_map(&g, &h, &f, &profile)?),
                SearchOutcome::NotFound => Cell::new("none", "NONE", false),
                SearchOutcome::BudgetExhausted => Cell::new("budget", "UNKNOWN", false),
            })
        }
        Task::Regularity => {
            let rp = RegularityParams::new(p.rational("eps", Rational::new(1, 4))?, p.rational("delta", Rational::new(1, 2))?)?;
            let mode = p.mode(derive_seed(seed, 3))?;
            let (partition, report, verdicts) =
                fixed_k_partition(&g, p.usize("k", 4)?, &rp, mode, derive_seed(seed, 3), p.usize("retries", 1)?)?;
            let ok = verdicts.iter().all(|v| match &v.verdict {
                RegularityVerdict::Violated { .. } => {
                    witness_is_valid(&g, &partition.classes()[v.i], &partition.classes()[v.j], rp.eps(), &v.verdict)
                }
                _ => true,
            });
            let mut c = Cell::new("value", report.irregular_pairs.len(), ok);
            c.detail = format!("total_within_limit={}", report.total_within_limit);
            Ok(c)
        }
        Task::Lovasz => {
            let degrees = p.usizes("degrees")?.unwrap_or_default();
            let split = lovasz_partition(&g, &degrees)?;
            let ok = split.classes.iter().zip(&degrees).all(|(c, &d)| g.induced(c).map(|s| s.max_degree() <= d).unwrap_or(false));
            Ok(Cell::new("some", split.moves, ok))
        }
        Task::Dense => {
            let host = aux("host")?;
            let dp = DenseParams::new(
                p.rational("alpha", Rational::new(1, 2))?,
                p.rational("beta", Rational::new(0, 1))?,
                p.rational("rho", Rational::new(1, 2))?,
                p.rational("delta", Rational::new(1, 2))?,
                g.max_degree(),
            )?;
            let gw = WeightedGraph::uniform(g.clone(), p.rational("weight", Rational::from_integer(1))?)?;
            let out = dense_greedy_embed(&host, &DenseWitness::trivial(host.n(), g.max_degree()), &dp, &gw)?;
            Ok(match &out {
                Outcome::Success(f) => {
                    let ok =
                        verify_homomorphism(&g, &host, f)?.is_valid() && verify_capacity(f, &CapacityProfile::weights(&gw))?.is_valid();
                    Cell::new("some", crate::codec::write_map(f), ok)
                }
                Outcome::Failure(_) => Cell::failed(&out),
            })
        }
        Task::Wheel => {
            let k = p.usize("k", 5)?;
            let c = random_coloring(&g, p.rational("red_prob", Rational::new(1, 2))?, derive_seed(seed, 3))?;
            let weights = p.weights(k)?;
            let out = wheel_mono_embed(&c, k, &weights)?;
            Ok(match &out {
                Outcome::Success((col, f)) => {
                    let wheel = WeightedGraph::new(crate::generators::make_named(&crate::generators::NamedGraph::Wheel(k))?, weights)?;
                    let ok = verify_homomorphism(wheel.graph(), c.class(*col), f)?.is_valid()
                        && verify_capacity(f, &CapacityProfile::weights(&wheel))?.is_valid();
                    Cell::new("some", col.letter(), ok)
                }
                Outcome::Failure(_) => Cell::failed(&out),
            })
        }
        Task::Rga => {
            let part = p.usize("part_size", 30)?;
            let (host, classes) = random_dense_blowup(&g, part, p.rational("edge_prob", Rational::new(7, 8))?, derive_seed(seed, 3))?;
            let (guest, f) = random_guest_over(&g, p.usize("guest_part", 20)?, p.usize("rounds", 1)?, derive_seed(seed, 4))?;
            let partition = Partition::from_classes(host.n(), classes)?;
            let params = RgaParams::with_defaults(p.rational("delta", Rational::new(3, 4))?, p.rational("xi", Rational::new(1, 4))?);
            let report = rga_blowup_embed(&host, &partition, &g, &guest, &f, params, derive_seed(seed, 5), p.usize("retries", 20)?, false)?;
            Ok(match &report.outcome {
                Outcome::Success(emb) => Cell::new("some", report.attempts, verify_blowup_embedding(&host, &partition, &guest, &f, emb)?),
                Outcome::Failure(_) => Cell::failed(&report.outcome),
            })
        }
        Task::Drc => {
            let host = aux("host")?;
            let (labeling, _) = heuristic_labeling(&g);
            let mut dp = DrcEmbedParams::new(p.rational("alpha", Rational::new(1, 2))?, derive_seed(seed, 3));
            dp.beta = p.opt_rational("beta")?;
            dp.trials = p.usize("trials", dp.trials)?;
            let report = match drc_bandwidth_embed(&host, &g, &labeling, &dp) {
                Err(Error::DegenerateBandwidth { beta, n }) => {
                    let mut c = Cell::new("degenerate", 0, false);
                    c.stage = "bandwidth-budget".into();
                    c.detail = format!("floor({beta} * {n}) = 0");
                    return Ok(c);
                }
                other => other?,
            };
            Ok(match &report.outcome {
                Outcome::Success(f) => {
                    Cell::new("some", report.width_budget, f.is_injective() && verify_homomorphism(&g, &host, f)?.is_valid())
                }
                Outcome::Failure(_) => Cell::failed(&report.outcome),
            })
        }
        Task::Transfer => {
            let base = aux("base")?;
            let (guest, f) = random_guest_over(&base, p.usize("guest_part", 4)?, p.usize("rounds", 2)?, derive_seed(seed, 3))?;
            let c = random_coloring(&g, p.rational("red_prob", Rational::new(1, 2))?, derive_seed(seed, 4))?;
            let mut tp =
                TransferParams::new(p.rational("eps", Rational::new(1, 2))?, p.rational("xi", Rational::new(1, 4))?, p.usize("k", 6)?);
            tp.mode = p.mode(derive_seed(seed, 5))?;
            tp.embed_retries = p.usize("retries", tp.embed_retries)?;
            let report = transference_pipeline(&guest, &base, &f, &c, &tp, derive_seed(seed, 6))?;
            Ok(match &report.outcome {
                Outcome::Success((col, emb)) => {
                    Cell::new("some", col.letter(), emb.is_injective() && verify_homomorphism(&guest, c.class(*col), emb)?.is_valid())
                }
                Outcome::Failure(_) => Cell::failed(&report.outcome),
            })
        }
    }
}

fn csv_text(records: &[CellRecord]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| Error::Io(std::io::Error::other(e));
    w.write_record(CSV_HEADER).map_err(io)?;
    for r in records {
        w.write_record([
            SCHEMA_VERSION.to_string(),
            r.cell.to_string(),
            r.instance.clone(),
            r.seed.to_string(),
            r.outcome.clone(),
            r.value.clone(),
            r.verified.to_string(),
            r.stage.clone(),
            r.detail.clone(),
        ])
        .map_err(io)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(std::io::Error::other(e.to_string())))?;
    Ok(String::from_utf8(bytes).expect("csv is utf-8"))
}

fn summarize(cfg: &ExperimentConfig, records: &[CellRecord]) -> Summary {
    let mut outcomes = BTreeMap::new();
    let mut stages = BTreeMap::new();
    for r in records {
        *outcomes.entry(r.outcome.clone()).or_insert(0) += 1;
        if !r.stage.is_empty() {
            *stages.entry(r.stage.clone()).or_insert(0) += 1;
        }
    }
    let successes = records.iter().filter(|r| r.is_positive() && r.verified).count();
    let instances: Vec<InstanceSummary> = cfg
        .instances
        .iter()
        .map(|name| {
            let rows: Vec<&CellRecord> = records.iter().filter(|r| &r.instance == name).collect();
            let first = rows.first().map(|r| r.value.clone());
            let value = first.filter(|v| !v.is_empty() && rows.iter().all(|r| &r.value == v));
            InstanceSummary {
                instance: name.clone(),
                cells: rows.len(),
                successes: rows.iter().filter(|r| r.is_positive() && r.verified).count(),
                value,
            }
        })
        .collect();
    let value = match instances.as_slice() {
        [only] => only.value.clone(),
        _ => None,
    };
    Summary {
        schema_version: SCHEMA_VERSION,
        config_hash: cfg.hash(),
        task: cfg.task.clone(),
        cells: records.len(),
        outcomes,
        stages,
        verified: records.iter().filter(|r| r.verified).count(),
        successes,
        success_rate: (!records.is_empty()).then(|| successes as f64 / records.len() as f64),
        instances,
        value,
    }
}

/// Effective worker count: `RF_WORKERS` wins over the config.
pub fn effective_workers(cfg: &ExperimentConfig) -> Result<usize> {
    match std::env::var(WORKERS_ENV) {
        Ok(s) => s
            .trim()
            .parse::<usize>()
            .ok()
            .filter(|&w| w > 0)
            .ok_or_else(|| config_err(WORKERS_ENV, format!("expected a positive integer, found {s:?}"))),
        Err(_) => Ok(cfg.workers),
    }
}

/// Runs every cell with `workers` threads and returns rows in cell order.
/// A positive row that fails verification, or a tripwire raised inside an
/// algorithm, aborts the run.
pub fn run_with_workers(cfg: &ExperimentConfig, path: &str, workers: usize) -> Result<RunOutput> {
    let plan = plan(cfg, path)?;
    let cells: Vec<(usize, usize, u64)> =
        (0..plan.instances.len()).flat_map(|i| plan.seeds.iter().map(move |&s| (i, s))).enumerate().map(|(c, (i, s))| (c, i, s)).collect();
    let pool = rayon::ThreadPoolBuilder::new().num_threads(workers.max(1)).build().map_err(|e| config_err(path, e))?;
    let results: Vec<(usize, usize, u64, Result<Cell>, u128)> = pool.install(|| {
        cells
            .par_iter()
            .map(|&(c, i, s)| {
                let start = Instant::now();
                let r = run_cell(&plan, &plan.instances[i].1, s);
                (c, i, s, r, start.elapsed().as_millis())
            })
            .collect()
    });
    let mut records = Vec::with_capacity(results.len());
    for (cell, i, seed, r, wall_ms) in results {
        let instance = plan.instances[i].0.clone();
        let record = match r {
            Ok(c) => CellRecord {
                cell,
                instance,
                seed,
                outcome: c.outcome.into(),
                value: c.value,
                verified: c.verified,
                stage: c.stage,
                detail: c.detail,
                wall_ms,
            },
            Err(Error::Tripwire(msg)) => {
                return Err(Error::Tripwire(format!("cell {cell} ({instance}, seed {seed}): {msg}")));
            }
            Err(e) => CellRecord {
                cell,
                instance,
                seed,
                outcome: "error".into(),
                value: String::new(),
                verified: false,
                stage: "input".into(),
                detail: e.to_string(),
                wall_ms,
            },
        };
        if record.is_positive() && !record.verified {
            return Err(Error::Tripwire(format!(
                "cell {} ({}, seed {}) reported {} {} but failed independent verification",
                record.cell, record.instance, record.seed, record.outcome, record.value
            )));
        }
        records.push(record);
    }
    let summary = summarize(cfg, &records);
    let csv = csv_text(&records)?;
    let summary_json = serde_json::to_string_pretty(&summary).expect("summary serializes") + "\n";
    Ok(RunOutput { records, summary, csv, summary_json })
}

/// [`run_with_workers`] with the effective worker count, writing the
/// configured outputs.
pub fn run_experiment(cfg: &ExperimentConfig, path: &str) -> Result<RunOutput> {
    let out = run_with_workers(cfg, path, effective_workers(cfg)?)?;
    let write = |p: &PathBuf, text: &str| -> Result<()> {
        std::fs::write(p, text).map_err(|e| Error::Config { path: p.display().to_string(), message: e.to_string() })
    };
    if let Some(p) = &cfg.output.csv {
        write(p, &out.csv)?;
    }
    if let Some(p) = &cfg.output.summary {
        write(p, &out.summary_json)?;
    }
    Ok(out)
}
