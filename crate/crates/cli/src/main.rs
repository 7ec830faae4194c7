use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context};
use clap::{Args, Parser, Subcommand};
use serde_json::{json, Map, Value};

use ramsey_forge::bandwidth::{bandwidth_lower_bound, exact_bandwidth, heuristic_labeling, BandwidthOutcome};
use ramsey_forge::codec::{self, resolve_graph};
use ramsey_forge::embed::dense::{dense_greedy_embed, DenseParams, DenseWitness};
use ramsey_forge::embed::drc::{drc_bandwidth_embed, DrcEmbedParams};
use ramsey_forge::embed::lovasz::lovasz_partition;
use ramsey_forge::embed::rga::{rga_blowup_embed, RgaParams};
use ramsey_forge::embed::transfer::{transference_pipeline, TransferParams};
use ramsey_forge::embed::wheel::wheel_mono_embed;
use ramsey_forge::embed::Outcome;
use ramsey_forge::generators::{
    make_named, random_bounded_degree_bipartite, random_coloring, random_dense_blowup, random_guest_over, random_min_degree_host,
    NamedGraph,
};
use ramsey_forge::harness::{run_experiment, ExperimentConfig};
use ramsey_forge::morphisms::{find_capacity_homomorphism, CapacityProfile, SearchOutcome};
use ramsey_forge::oracles::{ramsey_number, stable_ramsey, weighted_ramsey, OracleConfig, OracleResult, OracleValue};
use ramsey_forge::regularity::{fixed_k_partition, regularity_check, CheckMode, RegularityParams, RegularityVerdict};
use ramsey_forge::{Error, Graph, Rational, VertexSet, WeightedGraph};

#[derive(Parser)]
#[command(name = "ramsey-forge", version, about = "Ramsey oracles and constructive graph embeddings")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 20)]
    retries: usize,
    /// JSON object of algorithm parameters; rationals as "p/q" strings.
    #[arg(long)]
    params: Option<String>,
    /// Print the per-step state alongside the result.
    #[arg(long)]
    trace: bool,
}

#[derive(Args)]
struct OracleArgs {
    /// Target graph: file path or generator spec such as `cycle:4`.
    graph: String,
    #[arg(long, default_value_t = 6)]
    nmax: usize,
    #[arg(long, default_value_t = 1)]
    workers: usize,
    #[arg(long)]
    no_iso_prune: bool,
    /// Write the witness colouring here.
    #[arg(long)]
    witness_out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a graph.
    Gen {
        /// path, cycle, complete, multipartite, wheel, path_power, hypercube,
        /// ladder, random_bipartite (n,Δ) or random_min_degree (n,ε)
        #[arg(long)]
        kind: String,
        /// Comma-separated parameters, e.g. `10,2`.
        #[arg(long, default_value = "")]
        params: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output file; `.g6` selects graph6, anything else the edge list.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Search a homomorphism with a capacity profile.
    Hom {
        #[arg(long)]
        source: String,
        #[arg(long)]
        target: String,
        /// Uniform count cap per target vertex.
        #[arg(long, conflicts_with = "weights")]
        cap: Option<usize>,
        /// Source weights `w0,w1,..`; each target vertex takes total weight <= 1.
        #[arg(long)]
        weights: Option<String>,
        #[arg(long)]
        budget: Option<u64>,
    },
    /// Bandwidth of a graph.
    Bandwidth {
        graph: String,
        #[arg(long, conflicts_with = "heuristic")]
        exact: bool,
        #[arg(long)]
        heuristic: bool,
        #[arg(long)]
        budget: Option<u64>,
    },
    /// Ramsey number r(G).
    Ramsey(OracleArgs),
    /// Weighted Ramsey number.
    Wramsey {
        #[command(flatten)]
        oracle: OracleArgs,
        #[arg(long)]
        weights: Option<String>,
    },
    /// ε-stable weighted Ramsey number.
    Sramsey {
        #[command(flatten)]
        oracle: OracleArgs,
        #[arg(long)]
        weights: Option<String>,
        #[arg(long)]
        eps: String,
    },
    /// Regularity of a pair or of a random k-partition.
    Regularity {
        graph: String,
        /// Two vertex lists `a,b,c;d,e,f`.
        #[arg(long, conflicts_with = "partition")]
        pairs: Option<String>,
        /// Number of classes of a random equitable partition.
        #[arg(long)]
        partition: Option<usize>,
        #[arg(long, default_value = "1/4")]
        epsilon: String,
        #[arg(long, default_value = "1/2")]
        delta: String,
        /// `exhaustive` or `sampled`.
        #[arg(long, default_value = "exhaustive")]
        mode: String,
        #[arg(long, default_value_t = 2000)]
        budget: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        retries: usize,
    },
    /// Greedy weighted embedding into a dense host (single-part witness).
    EmbedDense {
        #[arg(long)]
        host: String,
        #[arg(long)]
        guest: String,
        #[arg(long)]
        weights: Option<String>,
        #[command(flatten)]
        common: Common,
    },
    /// Monochromatic weighted wheel in a colouring.
    EmbedWheel {
        /// Colouring file (`u v R|B` rows).
        #[arg(long)]
        coloring: PathBuf,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        weights: Option<String>,
    },
    /// Random greedy blow-up embedding on a generated dense blow-up.
    EmbedRga {
        /// Base (reduced) graph spec.
        #[arg(long)]
        base: String,
        #[arg(long)]
        part_size: usize,
        #[arg(long, default_value = "7/8")]
        edge_prob: String,
        #[arg(long)]
        guest_part: usize,
        #[arg(long, default_value_t = 1)]
        rounds: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Bandwidth embedding of a bipartite guest via dependent random choice.
    EmbedDrc {
        /// Host spec or file; `random_min_degree:n,ε` draws from the seed.
        #[arg(long)]
        host: String,
        #[arg(long)]
        guest: String,
        #[command(flatten)]
        common: Common,
    },
    /// Transference through a regularity partition.
    Transfer {
        /// Colouring of a complete graph.
        #[arg(long, required_unless_present = "n")]
        coloring: Option<PathBuf>,
        /// Use a uniformly random colouring of K_n instead.
        #[arg(long)]
        n: Option<usize>,
        /// Reduced target H.
        #[arg(long)]
        base: String,
        /// Guest G is drawn over H with this many vertices per H-vertex.
        #[arg(long, default_value_t = 4)]
        guest_part: usize,
        #[arg(long, default_value_t = 2)]
        rounds: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Split into classes of bounded internal degree.
    SplitLovasz {
        graph: String,
        #[arg(long)]
        degrees: String,
    },
    /// Run an experiment config.
    Run {
        #[arg(long)]
        config: PathBuf,
    },
}

fn rational(s: &str) -> anyhow::Result<Rational> {
    s.trim().parse::<Rational>().map_err(|_| anyhow!("cannot parse rational {s:?}"))
}

fn list<T: std::str::FromStr>(s: &str) -> anyhow::Result<Vec<T>> {
    s.split(',').filter(|t| !t.trim().is_empty()).map(|t| t.trim().parse::<T>().map_err(|_| anyhow!("bad list entry {t:?}"))).collect()
}

fn weights(s: Option<&str>, n: usize) -> anyhow::Result<Vec<Rational>> {
    match s {
        None => Ok(vec![Rational::from_integer(1); n]),
        Some(s) => {
            let w = s.split(',').map(rational).collect::<anyhow::Result<Vec<_>>>()?;
            if w.len() != n {
                bail!("{} weights for {n} vertices", w.len());
            }
            Ok(w)
        }
    }
}

struct JsonParams(Map<String, Value>);

impl JsonParams {
    fn parse(s: Option<&str>) -> anyhow::Result<Self> {
        match s {
            None => Ok(JsonParams(Map::new())),
            Some(s) => match serde_json::from_str(s).context("--params must be a JSON object")? {
                Value::Object(m) => Ok(JsonParams(m)),
                _ => bail!("--params must be a JSON object"),
            },
        }
    }

    fn rational(&self, key: &str, default: Rational) -> anyhow::Result<Rational> {
        Ok(self.opt_rational(key)?.unwrap_or(default))
    }

    fn opt_rational(&self, key: &str) -> anyhow::Result<Option<Rational>> {
        match self.0.get(key) {
            None => Ok(None),
            Some(Value::String(s)) => rational(s).map(Some),
            Some(Value::Number(n)) if n.is_i64() => Ok(Some(Rational::from_integer(n.as_i64().unwrap()))),
            Some(v) => bail!("parameter {key} = {v} is not a rational"),
        }
    }

    fn usize(&self, key: &str, default: usize) -> anyhow::Result<usize> {
        match self.0.get(key) {
            None => Ok(default),
            Some(v) => v.as_u64().map(|x| x as usize).ok_or_else(|| anyhow!("parameter {key} must be a nonnegative integer")),
        }
    }
}

fn graph_source(spec: &str, seed: u64) -> anyhow::Result<Graph> {
    let (kind, rest) = spec.split_once(':').unwrap_or((spec, ""));
    match kind {
        "random_min_degree" => {
            let (n, eps) = rest.split_once(',').ok_or_else(|| anyhow!("random_min_degree:n,ε"))?;
            Ok(random_min_degree_host(n.trim().parse()?, rational(eps)?, seed)?)
        }
        "random_bipartite" => {
            let v: Vec<usize> = list(rest)?;
            let [n, d] = v.as_slice() else { bail!("random_bipartite:n,Δ") };
            Ok(random_bounded_degree_bipartite(*n, *d, seed)?)
        }
        _ => Ok(resolve_graph(spec)?),
    }
}

// A closed pipe (e.g. `| head`) is not an error worth a panic.
fn emit(text: &str) {
    use std::io::Write as _;
    let _ = std::io::stdout().lock().write_all(text.as_bytes());
}

fn print(v: Value) {
    emit(&format!("{}\n", serde_json::to_string_pretty(&v).expect("json")));
}

fn failure_json<T>(o: &Outcome<T>) -> Value {
    let f = o.failure().expect("failure");
    json!({"outcome": "none", "stage": f.stage, "detail": f.detail})
}

fn oracle(
    args: &OracleArgs,
    gw: &WeightedGraph,
    run: impl Fn(&WeightedGraph, &OracleConfig) -> ramsey_forge::Result<OracleResult>,
) -> anyhow::Result<()> {
    let cfg = OracleConfig::new(args.nmax).workers(args.workers).iso_prune(!args.no_iso_prune);
    let r = run(gw, &cfg)?;
    let (kind, n) = match r.value {
        OracleValue::Value(n) => ("value", n),
        OracleValue::Exceeds(n) => ("exceeds", n),
        OracleValue::InfiniteSuspected(n) => ("infinite_suspected", n),
    };
    if let (Some(path), Some(w)) = (&args.witness_out, &r.witness) {
        std::fs::write(path, codec::write_coloring(w)).with_context(|| format!("writing {}", path.display()))?;
    }
    print(json!({
        kind: n,
        "certificate_mode": format!("{:?}", r.certificate_mode),
        "witness_vertices": r.witness.as_ref().map(|w| w.n()),
    }));
    Ok(())
}

fn run(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::Gen { kind, params, seed, out } => {
            let spec = if params.is_empty() { kind.clone() } else { format!("{kind}:{params}") };
            let g = match kind.as_str() {
                "random_min_degree" | "random_bipartite" => graph_source(&spec, seed)?,
                _ => make_named(&spec.parse::<NamedGraph>()?)?,
            };
            match out {
                Some(p) => codec::write_graph(&p, &g)?,
                None => emit(&codec::write_edgelist(&g)),
            }
        }
        Command::Hom { source, target, cap, weights: w, budget } => {
            let g = resolve_graph(&source)?;
            let h = resolve_graph(&target)?;
            let profile = match (&w, cap) {
                (Some(ws), _) => CapacityProfile::weights(&WeightedGraph::new(g.clone(), weights(Some(ws), g.n())?)?),
                (None, Some(c)) => CapacityProfile::uniform(h.n(), c),
                (None, None) => CapacityProfile::unbounded(h.n()),
            };
            match find_capacity_homomorphism(&g, &h, &profile, budget)? {
                SearchOutcome::Found(f) => emit(&format!("{}\n", codec::write_map(&f))),
                SearchOutcome::NotFound => emit("NONE\n"),
                SearchOutcome::BudgetExhausted => emit("UNKNOWN\n"),
            }
        }
        Command::Bandwidth { graph, exact: _, heuristic, budget } => {
            let g = resolve_graph(&graph)?;
            if heuristic {
                let (l, w) = heuristic_labeling(&g);
                print(json!({"width": w, "exact": false, "lower_bound": bandwidth_lower_bound(&g), "labeling": l.labels()}));
            } else {
                let (exact, width, l) = match exact_bandwidth(&g, budget) {
                    BandwidthOutcome::Exact { width, labeling } => (true, width, labeling),
                    BandwidthOutcome::BudgetExhausted { width, labeling } => (false, width, labeling),
                };
                print(json!({"width": width, "exact": exact, "lower_bound": bandwidth_lower_bound(&g), "labeling": l.labels()}));
            }
        }
        Command::Ramsey(args) => {
            let gw = WeightedGraph::unit(resolve_graph(&args.graph)?);
            oracle(&args, &gw, |gw, cfg| ramsey_number(gw.graph(), cfg))?;
        }
        Command::Wramsey { oracle: args, weights: w } => {
            let g = resolve_graph(&args.graph)?;
            let gw = WeightedGraph::new(g.clone(), weights(w.as_deref(), g.n())?)?;
            oracle(&args, &gw, weighted_ramsey)?;
        }
        Command::Sramsey { oracle: args, weights: w, eps } => {
            let g = resolve_graph(&args.graph)?;
            let gw = WeightedGraph::new(g.clone(), weights(w.as_deref(), g.n())?)?;
            let eps = rational(&eps)?;
            oracle(&args, &gw, |gw, cfg| stable_ramsey(gw, eps, cfg))?;
        }
        Command::Regularity { graph, pairs, partition, epsilon, delta, mode, budget, seed, retries } => {
            let g = resolve_graph(&graph)?;
            let p = RegularityParams::new(rational(&epsilon)?, rational(&delta)?)?;
            let mode = match mode.as_str() {
                "exhaustive" => CheckMode::Exhaustive,
                "sampled" => CheckMode::Sampled { budget, seed },
                other => bail!("unknown mode {other:?}"),
            };
            if let Some(pairs) = pairs {
                let (a, b) = pairs.split_once(';').ok_or_else(|| anyhow!("--pairs takes `a,b,..;c,d,..`"))?;
                let x = VertexSet::from_vertices(g.n(), list::<usize>(a)?)?;
                let y = VertexSet::from_vertices(g.n(), list::<usize>(b)?)?;
                let v = regularity_check(&g, &x, &y, &p, mode)?;
                let out = match v {
                    RegularityVerdict::CertifiedRegular => json!({"verdict": "certified_regular"}),
                    RegularityVerdict::Unrefuted { samples } => json!({"verdict": "unrefuted", "samples": samples}),
                    RegularityVerdict::Violated { x, y, sub_density, pair_density } => json!({
                        "verdict": "violated", "x": x.to_vec(), "y": y.to_vec(),
                        "sub_density": sub_density.to_string(), "pair_density": pair_density.to_string(),
                    }),
                };
                print(json!({"mode": mode.name(), "pair": out}));
            } else {
                let k = partition.ok_or_else(|| anyhow!("give --pairs or --partition"))?;
                let (_, report, _) = fixed_k_partition(&g, k, &p, mode, seed, retries)?;
                print(serde_json::to_value(report)?);
            }
        }
        Command::EmbedDense { host, guest, weights: w, common } => {
            let host = graph_source(&host, common.seed)?;
            let g = resolve_graph(&guest)?;
            let jp = JsonParams::parse(common.params.as_deref())?;
            let dp = DenseParams::new(
                jp.rational("alpha", Rational::new(1, 2))?,
                jp.rational("beta", Rational::from_integer(0))?,
                jp.rational("rho", Rational::new(1, 2))?,
                jp.rational("delta", Rational::new(1, 2))?,
                g.max_degree(),
            )?;
            let gw = WeightedGraph::new(g.clone(), weights(w.as_deref(), g.n())?)?;
            let out = dense_greedy_embed(&host, &DenseWitness::trivial(host.n(), g.max_degree()), &dp, &gw)?;
            match &out {
                Outcome::Success(f) => print(json!({"outcome": "some", "map": f})),
                Outcome::Failure(_) => print(failure_json(&out)),
            }
        }
        Command::EmbedWheel { coloring, k, weights: w } => {
            let c = codec::read_coloring(&coloring)?;
            let out = wheel_mono_embed(&c, k, &weights(w.as_deref(), k)?)?;
            match &out {
                Outcome::Success((col, f)) => print(json!({"outcome": "some", "color": col.letter().to_string(), "map": f})),
                Outcome::Failure(_) => print(failure_json(&out)),
            }
        }
        Command::EmbedRga { base, part_size, edge_prob, guest_part, rounds, common } => {
            let r = resolve_graph(&base)?;
            let jp = JsonParams::parse(common.params.as_deref())?;
            let (host, classes) = random_dense_blowup(&r, part_size, rational(&edge_prob)?, common.seed)?;
            let (g, f) = random_guest_over(&r, guest_part, rounds, common.seed.wrapping_add(1))?;
            let partition = ramsey_forge::regularity::Partition::from_classes(host.n(), classes)?;
            let mut params = RgaParams::with_defaults(jp.rational("delta", Rational::new(3, 4))?, jp.rational("xi", Rational::new(1, 4))?);
            if let Some(e) = jp.opt_rational("eps")? {
                params.eps = e;
            }
            if let Some(e) = jp.opt_rational("eps1")? {
                params.eps1 = e;
            }
            if let Some(e) = jp.opt_rational("eps2")? {
                params.eps2 = e;
            }
            let report = rga_blowup_embed(&host, &partition, &r, &g, &f, params, common.seed, common.retries, common.trace)?;
            let mut out = match &report.outcome {
                Outcome::Success(emb) => json!({"outcome": "some", "map": emb}),
                Outcome::Failure(_) => failure_json(&report.outcome),
            };
            out["attempts"] = json!(report.attempts);
            out["failures"] = json!(report.failures.iter().map(|f| f.to_string()).collect::<Vec<_>>());
            if common.trace {
                out["trace"] = serde_json::to_value(&report.trace)?;
            }
            print(out);
        }
        Command::EmbedDrc { host, guest, common } => {
            let host = graph_source(&host, common.seed)?;
            let h = graph_source(&guest, common.seed.wrapping_add(1))?;
            let jp = JsonParams::parse(common.params.as_deref())?;
            let (labeling, width) = heuristic_labeling(&h);
            let mut dp = DrcEmbedParams::new(jp.rational("alpha", Rational::new(1, 2))?, common.seed);
            dp.beta = jp.opt_rational("beta")?;
            dp.trials = jp.usize("trials", dp.trials)?;
            let report = drc_bandwidth_embed(&host, &h, &labeling, &dp)?;
            let mut out = match &report.outcome {
                Outcome::Success(f) => json!({"outcome": "some", "map": f}),
                Outcome::Failure(_) => failure_json(&report.outcome),
            };
            out["labeling_width"] = json!(width);
            out["width_budget"] = json!(report.width_budget);
            out["beta"] = json!(report.beta.to_string());
            if common.trace {
                out["epochs"] = serde_json::to_value(&report.epochs)?;
            }
            print(out);
        }
        Command::Transfer { coloring, n, base, guest_part, rounds, common } => {
            let c = match (coloring, n) {
                (Some(p), _) => codec::read_coloring(&p)?,
                (None, Some(n)) => random_coloring(&Graph::complete(n), Rational::new(1, 2), common.seed)?,
                (None, None) => unreachable!("clap requires one"),
            };
            let h = resolve_graph(&base)?;
            let (g, f) = random_guest_over(&h, guest_part, rounds, common.seed.wrapping_add(1))?;
            let jp = JsonParams::parse(common.params.as_deref())?;
            let mut tp =
                TransferParams::new(jp.rational("eps", Rational::new(1, 2))?, jp.rational("xi", Rational::new(1, 4))?, jp.usize("k", 6)?);
            tp.embed_retries = common.retries;
            let report = transference_pipeline(&g, &h, &f, &c, &tp, common.seed)?;
            let mut out = match &report.outcome {
                Outcome::Success((col, emb)) => json!({"outcome": "some", "color": col.letter().to_string(), "map": emb}),
                Outcome::Failure(_) => failure_json(&report.outcome),
            };
            out["report"] = serde_json::to_value(&report)?;
            print(out);
        }
        Command::SplitLovasz { graph, degrees } => {
            let g = resolve_graph(&graph)?;
            let split = lovasz_partition(&g, &list::<usize>(&degrees)?)?;
            print(json!({
                "classes": split.classes.iter().map(|c| c.to_vec()).collect::<Vec<_>>(),
                "moves": split.moves,
                "move_bound": split.move_bound.to_string(),
            }));
        }
        Command::Run { config } => {
            let shown = config.display().to_string();
            let cfg = ExperimentConfig::load(Path::new(&config))?;
            let out = run_experiment(&cfg, &shown)?;
            if cfg.output.csv.is_none() {
                emit(&out.csv);
            }
            eprint!("{}", out.summary_json);
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            match e.downcast_ref::<Error>() {
                Some(Error::Tripwire(_)) => ExitCode::from(2),
                _ => ExitCode::from(1),
            }
        }
    }
}
