//! Acceptance suite: one PASS/FAIL line per criterion. Run with
//! `cargo test -p ramsey-forge-core --test acceptance`.

mod common;

use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::seq::SliceRandom;
use rand::Rng as _;

use common::{classes, edges_preserved, injective_copy, naive_ramsey};
use ramsey_forge::embed::drc::{check_selection, default_beta, drc_select, TupleMode};
use ramsey_forge::embed::lovasz::lovasz_partition;
use ramsey_forge::embed::rga::{rga_blowup_embed, RgaParams, RgaReport};
use ramsey_forge::embed::Outcome;
use ramsey_forge::generators::{make_named, random_dense_blowup, random_guest_over, random_min_degree_host, NamedGraph};
use ramsey_forge::harness::{run_with_workers, ExperimentConfig};
use ramsey_forge::oracles::{
    mono_copy_search, nonisomorphic_graphs, ramsey_number, stable_ramsey, weighted_ramsey, OracleConfig, OracleValue,
};
use ramsey_forge::regularity::{regularity_check, CheckMode, Partition, RegularityParams, RegularityVerdict};
use ramsey_forge::rng::{derive_seed, seeded};
use ramsey_forge::{Color, Graph, Rational, VertexMap, VertexSet, WeightedGraph};

const ORACLE_TIME_LIMIT: Duration = Duration::from_secs(60);
const DEGENERATION_TIME_LIMIT: Duration = Duration::from_secs(600);
const MONO_TIME_LIMIT: Duration = Duration::from_secs(300);
const LOVASZ_GRAPHS: u64 = 500;
const REGULARITY_PAIRS: u64 = 200;
const RGA_FUZZ: u64 = 1000;
const RGA_LIVENESS: u64 = 200;
const RGA_LIVENESS_FLOOR: usize = 190;
const DRC_RUNS: u64 = 100;
const DRC_FLOOR: usize = 95;
const DRC_EMBED_SEEDS: u64 = 50;
const DRC_EMBED_FLOOR: usize = 45;

type Verdict = Result<String, String>;
type Criterion = (&'static str, fn() -> Verdict);

fn ensure(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn named(k: NamedGraph) -> Graph {
    make_named(&k).unwrap()
}

fn value(v: OracleValue) -> Option<usize> {
    match v {
        OracleValue::Value(n) => Some(n),
        _ => None,
    }
}

fn is_five_cycle(g: &Graph) -> bool {
    if g.n() != 5 || g.degrees().iter().any(|&d| d != 2) {
        return false;
    }
    let mut seen = [false; 5];
    let mut stack = vec![0];
    while let Some(v) = stack.pop() {
        if !std::mem::replace(&mut seen[v], true) {
            stack.extend(g.neighbors(v).iter());
        }
    }
    seen.iter().all(|&s| s)
}

fn crit_ramsey_exactness() -> Verdict {
    let cases = [
        ("K_3", named(NamedGraph::Complete(3)), 6, 6),
        ("P_3", named(NamedGraph::Path(3)), 4, 3),
        ("C_4", named(NamedGraph::Cycle(4)), 7, 6),
    ];
    let mut notes = Vec::new();
    for (name, g, n_max, expect) in cases {
        let t = Instant::now();
        let naive = naive_ramsey(n_max, |class| injective_copy(&g, class).is_some());
        let t_naive = t.elapsed();
        let t = Instant::now();
        let pruned = ramsey_number(&g, &OracleConfig::new(n_max)).map_err(|e| e.to_string())?;
        let t_pruned = t.elapsed();
        let exhaustive = ramsey_number(&g, &OracleConfig::new(n_max).iso_prune(false)).map_err(|e| e.to_string())?;
        ensure(naive == Some(expect), format!("{name}: naive enumerator gave {naive:?}"))?;
        ensure(pruned.value == OracleValue::Value(expect), format!("{name}: oracle gave {:?}", pruned.value))?;
        ensure(exhaustive.value == pruned.value, format!("{name}: pruning changed the value"))?;
        ensure(t_pruned < ORACLE_TIME_LIMIT && t_naive < ORACLE_TIME_LIMIT, format!("{name}: too slow"))?;
        if name == "K_3" {
            let w = pruned.witness.as_ref().ok_or("K_3: no witness")?;
            ensure(w.n() == 5, "K_3 witness is not on 5 vertices")?;
            ensure(is_five_cycle(w.class(Color::Red)) && is_five_cycle(w.class(Color::Blue)), "K_3 witness is not the pentagon colouring")?;
            ensure(
                injective_copy(&g, w.class(Color::Red)).is_none() && injective_copy(&g, w.class(Color::Blue)).is_none(),
                "K_3 witness has a triangle",
            )?;
        }
        notes.push(format!("{name}={expect} ({:.2}s)", t_pruned.as_secs_f64()));
    }
    Ok(notes.join(", "))
}

fn crit_weighted_degeneration() -> Verdict {
    let t = Instant::now();
    let cfg = OracleConfig::new(6);
    let mut checked = 0;
    for g in (1..=5).flat_map(nonisomorphic_graphs) {
        let r = ramsey_number(&g, &cfg).map_err(|e| e.to_string())?.value;
        if let Some(r) = value(r) {
            let w = weighted_ramsey(&WeightedGraph::unit(g.clone()), &cfg).map_err(|e| e.to_string())?.value;
            ensure(w == OracleValue::Value(r), format!("{:?}: r = {r}, weighted = {w:?}", g.edges()))?;
            checked += 1;
        }
    }
    ensure(t.elapsed() < DEGENERATION_TIME_LIMIT, "over the time limit")?;
    Ok(format!("{checked} targets with r <= 6 agree ({:.1}s)", t.elapsed().as_secs_f64()))
}

fn crit_stable_identities() -> Verdict {
    let k2 = WeightedGraph::unit(Graph::complete(2));
    let eps_list = [(0, 1), (1, 10), (1, 5), (1, 4), (1, 3), (2, 5), (9, 20), (49, 100)];
    for (p, q) in eps_list {
        let v = stable_ramsey(&k2, Rational::new(p, q), &OracleConfig::new(5)).map_err(|e| e.to_string())?.value;
        ensure(v == OracleValue::Value(2), format!("K_2 at eps {p}/{q}: {v:?}"))?;
    }
    let cfg = OracleConfig::new(5);
    let mut checked = 0;
    for g in (1..=4).flat_map(nonisomorphic_graphs) {
        for w in [Rational::new(1, 1), Rational::new(1, 2)] {
            let gw = WeightedGraph::uniform(g.clone(), w).unwrap();
            let Some(r) = value(weighted_ramsey(&gw, &cfg).map_err(|e| e.to_string())?.value) else { continue };
            // eps = 0 and eps = 1/r both lie below 1/(r-1).
            let eps =
                if r == 1 { vec![Rational::new(0, 1), Rational::new(1, 2)] } else { vec![Rational::new(0, 1), Rational::new(1, r as i64)] };
            for e in eps {
                let s = stable_ramsey(&gw, e, &cfg).map_err(|e| e.to_string())?.value;
                ensure(s == OracleValue::Value(r), format!("{:?} w={w} eps={e}: stable {s:?} vs weighted {r}", g.edges()))?;
                checked += 1;
            }
        }
    }
    Ok(format!("K_2 = 2 at {} values of eps; {checked} stable/weighted pairs agree", eps_list.len()))
}

fn crit_mono_completeness() -> Verdict {
    let t = Instant::now();
    let k3 = WeightedGraph::unit(Graph::complete(3));
    let mut failures = 0;
    for mask in 0u64..1 << 15 {
        let (red, _) = classes(6, mask);
        let c = ramsey_forge::EdgeColoring::with_red_edges(Graph::complete(6), red.edges()).unwrap();
        match mono_copy_search(&c, &k3).map_err(|e| e.to_string())? {
            Some((col, f)) => {
                let img = f.image();
                let injective = img[0] != img[1] && img[1] != img[2] && img[0] != img[2];
                if !injective || !edges_preserved(k3.graph(), c.class(col), img) {
                    failures += 1;
                }
            }
            None => failures += 1,
        }
    }
    ensure(failures == 0, format!("{failures} colourings without a verified triangle"))?;
    ensure(t.elapsed() < MONO_TIME_LIMIT, "over the time limit")?;
    Ok(format!("32768 colourings, 0 failures ({:.1}s)", t.elapsed().as_secs_f64()))
}

fn compositions(total: usize, parts: usize) -> Vec<Vec<usize>> {
    if parts == 1 {
        return vec![vec![total]];
    }
    (0..=total)
        .flat_map(|first| {
            compositions(total - first, parts - 1).into_iter().map(move |mut rest| {
                rest.insert(0, first);
                rest
            })
        })
        .collect()
}

fn crit_lovasz() -> Verdict {
    let mut rng = seeded(0x10a5);
    let mut runs = 0;
    for _ in 0..LOVASZ_GRAPHS {
        let n = rng.random_range(1..=40);
        let cap = rng.random_range(1..=6);
        let g = common::random_graph(n, cap, 4 * n, &mut rng);
        let d = g.max_degree();
        for s in 1..=3usize {
            if d + 1 < s {
                continue;
            }
            for degrees in compositions(d + 1 - s, s) {
                let split = lovasz_partition(&g, &degrees).map_err(|e| e.to_string())?;
                let covered: usize = split.classes.iter().map(|c| c.len()).sum();
                ensure(covered == n, "classes do not partition V")?;
                for (c, &di) in split.classes.iter().zip(&degrees) {
                    let worst = c.iter().map(|v| g.neighbors(v).intersection_len(c)).max().unwrap_or(0);
                    ensure(worst <= di, format!("n={n} degrees {degrees:?}: class degree {worst} > {di}"))?;
                }
                ensure(split.moves as u128 <= split.move_bound, "move count above the potential bound")?;
                runs += 1;
            }
        }
    }
    Ok(format!("{LOVASZ_GRAPHS} graphs, {runs} splits, 0 violations"))
}

/// Adjacency rows of `X` as bitmasks over `Y`.
fn rows(g: &Graph, a: usize, b: usize) -> Vec<u32> {
    (0..a).map(|x| (0..b).filter(|&y| g.has_edge(x, a + y)).fold(0u32, |m, y| m | 1 << y)).collect()
}

fn min_side(p: i64, q: i64, size: usize) -> u32 {
    (((p * size as i64) + q - 1) / q).max(1) as u32
}

/// `q·|e'·|X||Y| − E·|X'||Y'|| > p·|X'||Y'|·|X||Y|`.
#[allow(clippy::too_many_arguments)]
fn deviates(p: i64, q: i64, e_sub: i64, xs: i64, ys: i64, e: i64, a: i64, b: i64) -> bool {
    q * (e_sub * a * b - e * xs * ys).abs() > p * xs * ys * a * b
}

/// Direct loop over every admissible sub-pair.
fn direct_violation(r: &[u32], b: usize, p: i64, q: i64) -> bool {
    let a = r.len();
    let e: i64 = r.iter().map(|m| m.count_ones() as i64).sum();
    let (mx, my) = (min_side(p, q, a), min_side(p, q, b));
    let mut e_of = vec![0i64; 1 << a];
    for ymask in 1u32..1 << b {
        if ymask.count_ones() < my {
            continue;
        }
        for xmask in 1usize..1 << a {
            let low = xmask.trailing_zeros() as usize;
            e_of[xmask] = e_of[xmask & (xmask - 1)] + (r[low] & ymask).count_ones() as i64;
            if (xmask.count_ones()) >= mx
                && deviates(p, q, e_of[xmask], xmask.count_ones() as i64, ymask.count_ones() as i64, e, a as i64, b as i64)
            {
                return true;
            }
        }
    }
    false
}

fn witness_checks_out(g: &Graph, a: usize, b: usize, p: i64, q: i64, v: &RegularityVerdict) -> bool {
    let RegularityVerdict::Violated { x, y, .. } = v else { return false };
    let r = rows(g, a, b);
    let e: i64 = r.iter().map(|m| m.count_ones() as i64).sum();
    let ymask = y.iter().fold(0u32, |m, v| m | 1 << (v - a));
    let e_sub: i64 = x.iter().map(|u| (r[u] & ymask).count_ones() as i64).sum();
    x.iter().all(|u| u < a)
        && x.len() as u32 >= min_side(p, q, a)
        && y.len() as u32 >= min_side(p, q, b)
        && deviates(p, q, e_sub, x.len() as i64, y.len() as i64, e, a as i64, b as i64)
}

fn bipartite(a: usize, b: usize, mut edge: impl FnMut(usize, usize) -> bool) -> Graph {
    let mut g = Graph::empty(a + b);
    for x in 0..a {
        for y in 0..b {
            if edge(x, y) {
                g.add_edge(x, a + y).unwrap();
            }
        }
    }
    g
}

fn crit_regularity() -> Verdict {
    let mut rng = seeded(0x4e6);
    let mut tally = [0usize; 2];
    for eps in [(1i64, 4i64), (1, 2)] {
        let params = RegularityParams::new(Rational::new(eps.0, eps.1), Rational::new(1, 2)).unwrap();
        for _ in 0..REGULARITY_PAIRS {
            let (a, b) = (rng.random_range(1..=12), rng.random_range(1..=12));
            let prob = rng.random_range(0.0..=1.0);
            let g = bipartite(a, b, |_, _| rng.random_bool(prob));
            let (x, y) = (VertexSet::range(a + b, 0, a), VertexSet::range(a + b, a, a + b));
            let v = regularity_check(&g, &x, &y, &params, CheckMode::Exhaustive).map_err(|e| e.to_string())?;
            ensure(!matches!(v, RegularityVerdict::Unrefuted { .. }), "exhaustive mode returned unrefuted")?;
            let direct = direct_violation(&rows(&g, a, b), b, eps.0, eps.1);
            ensure(direct == !v.counts_as_regular(), format!("{a}x{b} eps={}/{}: direct {direct}, checker {v:?}", eps.0, eps.1))?;
            if direct {
                ensure(witness_checks_out(&g, a, b, eps.0, eps.1, &v), "witness fails the integer recheck")?;
            }
            tally[direct as usize] += 1;
        }
        for _ in 0..50 {
            let (a, b): (usize, usize) = (rng.random_range(4..=12), rng.random_range(4..=12));
            let (ha, hb) = (a.div_ceil(2), b.div_ceil(2));
            let planted = bipartite(a, b, |x, y| x < ha && y < hb);
            let (x, y) = (VertexSet::range(a + b, 0, a), VertexSet::range(a + b, a, a + b));
            let v = regularity_check(&planted, &x, &y, &params, CheckMode::Exhaustive).map_err(|e| e.to_string())?;
            ensure(witness_checks_out(&planted, a, b, eps.0, eps.1, &v), format!("planted {ha}x{hb} block in {a}x{b} not refuted"))?;
            for full in [true, false] {
                let g = bipartite(a, b, |_, _| full);
                let v = regularity_check(&g, &x, &y, &params, CheckMode::Exhaustive).map_err(|e| e.to_string())?;
                ensure(
                    v == RegularityVerdict::CertifiedRegular,
                    format!("{} {a}x{b} pair not certified", if full { "complete" } else { "empty" }),
                )?;
            }
        }
    }
    Ok(format!("{} regular / {} irregular pairs agree; planted, complete and empty pairs handled", tally[0], tally[1]))
}

fn embedding_ok(host: &Graph, classes: &[VertexSet], guest: &Graph, f: &VertexMap, emb: &VertexMap) -> bool {
    let img = emb.image();
    let mut used = vec![false; host.n()];
    img.iter().all(|&t| !std::mem::replace(&mut used[t], true))
        && edges_preserved(guest, host, img)
        && (0..guest.n()).all(|x| classes[f.get(x)].contains(img[x]))
}

struct RgaCase {
    host: Graph,
    classes: Vec<VertexSet>,
    guest: Graph,
    f: VertexMap,
    report: RgaReport,
}

#[allow(clippy::too_many_arguments)]
fn rga_case(
    base: &Graph,
    part: usize,
    prob: Rational,
    guest_part: usize,
    rounds: usize,
    delta: Rational,
    retries: usize,
    seed: u64,
) -> Result<RgaCase, String> {
    let (host, classes) = random_dense_blowup(base, part, prob, derive_seed(seed, 1)).map_err(|e| e.to_string())?;
    let (guest, f) = random_guest_over(base, guest_part, rounds, derive_seed(seed, 2)).map_err(|e| e.to_string())?;
    let partition = Partition::from_classes(host.n(), classes.clone()).map_err(|e| e.to_string())?;
    let params = RgaParams::with_defaults(delta, Rational::new(1, 4));
    let report =
        rga_blowup_embed(&host, &partition, base, &guest, &f, params, derive_seed(seed, 3), retries, true).map_err(|e| e.to_string())?;
    Ok(RgaCase { host, classes, guest, f, report })
}

fn crit_rga() -> Verdict {
    let bases = [Graph::complete(2), named(NamedGraph::Cycle(3)), named(NamedGraph::Cycle(4))];
    let probs = [Rational::new(1, 2), Rational::new(5, 8), Rational::new(3, 4), Rational::new(7, 8), Rational::new(1, 1)];
    let mut rng = seeded(0x76a);
    let mut fuzz_successes = 0;
    for i in 0..RGA_FUZZ {
        let base = &bases[rng.random_range(0..bases.len())];
        let part = rng.random_range(5..=24);
        let guest_part = rng.random_range(1..=part * 4 / 5);
        let prob = probs[rng.random_range(0..probs.len())];
        let delta = [Rational::new(1, 2), Rational::new(3, 4)][rng.random_range(0..2)];
        let c = rga_case(base, part, prob, guest_part, rng.random_range(1..=3), delta, 3, derive_seed(0xf022, i))?;
        if let Outcome::Success(emb) = &c.report.outcome {
            ensure(embedding_ok(&c.host, &c.classes, &c.guest, &c.f, emb), format!("fuzz instance {i}: unsound embedding"))?;
            fuzz_successes += 1;
        }
    }
    let mut live = 0;
    for i in 0..RGA_LIVENESS {
        let base = &bases[i as usize % 3];
        let c = rga_case(base, 30, Rational::new(7, 8), 20, 1 + (i as usize / 3) % 2, Rational::new(3, 4), 20, derive_seed(0x11fe, i))?;
        for (a, b) in base.edges() {
            let d = c.host.pair_density(&c.classes[a], &c.classes[b]).unwrap();
            ensure(d >= Rational::new(3, 4), format!("liveness instance {i}: pair density {d} below 3/4"))?;
        }
        ensure(3 * c.guest.n() <= 2 * 30 * base.n(), "guest larger than 2/3 of the parts")?;
        if let Outcome::Success(emb) = &c.report.outcome {
            ensure(embedding_ok(&c.host, &c.classes, &c.guest, &c.f, emb), format!("liveness instance {i}: unsound embedding"))?;
            ensure(c.report.trace.len() == c.guest.n(), "trace does not cover every vertex")?;
            ensure(
                c.report.trace.iter().all(|s| s.invariant_i && s.invariant_iii && s.free_monotone),
                format!("liveness instance {i}: invariant broken in trace"),
            )?;
            live += 1;
        }
    }
    ensure(live >= RGA_LIVENESS_FLOOR, format!("liveness {live}/{RGA_LIVENESS} below {RGA_LIVENESS_FLOOR}"))?;
    Ok(format!("fuzz {fuzz_successes}/{RGA_FUZZ} successes all verified; liveness {live}/{RGA_LIVENESS} (floor {RGA_LIVENESS_FLOOR})"))
}

fn crit_drc() -> Verdict {
    let n = 64;
    let mut passes = 0;
    let mut agree = true;
    for seed in 0..DRC_RUNS {
        let g = random_min_degree_host(n, Rational::new(1, 4), derive_seed(seed, 1)).map_err(|e| e.to_string())?;
        let mut verts: Vec<usize> = (0..n).collect();
        verts.shuffle(&mut seeded(derive_seed(seed, 2)));
        let x0 = VertexSet::from_vertices(n, verts[..32].iter().copied()).unwrap();
        let sel = drc_select(&g, &VertexSet::full(n), &x0, 2, Rational::new(1, 64), TupleMode::Exhaustive).map_err(|e| e.to_string())?;
        let x = sel.set.to_vec();
        // α = 3/4, Δ = 2: α^4 = 81/256; β = 1/64, so ⌈βn⌉ = 1.
        let size_ok = 512 * x.len() >= 81 * n;
        let overlap_ok = 512 * sel.set.intersection_len(&x0) >= 81 * 32;
        let bad = x
            .iter()
            .flat_map(|&u| x.iter().map(move |&v| (u, v)))
            .filter(|&(u, v)| g.neighbors(u).intersection_len(g.neighbors(v)) < 1)
            .count();
        let bad_ok = 81 * 81 * bad <= (8 * x.len()).pow(2);
        let lib = check_selection(&g, &x0, &sel.set, 2, Rational::new(3, 4), Rational::new(1, 64));
        agree &= lib.all() == (size_ok && overlap_ok && bad_ok) && lib.bad_tuples == bad as u128;
        if size_ok && overlap_ok && bad_ok {
            passes += 1;
        }
    }
    ensure(agree, "library check disagrees with the direct recount")?;
    ensure(passes >= DRC_FLOOR, format!("{passes}/{DRC_RUNS} below {DRC_FLOOR}"))?;
    for seed in 0..DRC_RUNS {
        let mut rng = seeded(derive_seed(seed, 7));
        let m = rng.random_range(4..=40);
        let delta = rng.random_range(1..=3);
        let mode = if m <= 16 { TupleMode::Exhaustive } else { TupleMode::Sampled { trials: 8, seed } };
        let k = Graph::complete(m);
        let sel = drc_select(&k, &VertexSet::full(m), &VertexSet::full(m), delta, Rational::new(1, 8), mode).map_err(|e| e.to_string())?;
        let mut expect = VertexSet::full(m);
        for &v in &sel.tuple {
            expect.remove(v);
        }
        ensure(sel.tuple.len() == delta && sel.set == expect, format!("K_{m}, seed {seed}: X is not V minus the tuple"))?;
    }
    Ok(format!("{passes}/{DRC_RUNS} selections satisfy all three properties (floor {DRC_FLOOR}); K_n exact for {DRC_RUNS} seeds"))
}

fn run_cfg(json: &str, workers: usize) -> Result<ramsey_forge::harness::RunOutput, String> {
    let cfg = ExperimentConfig::from_json(json, "acceptance").map_err(|e| e.to_string())?;
    run_with_workers(&cfg, "acceptance", workers).map_err(|e| e.to_string())
}

fn crit_drc_end_to_end() -> Verdict {
    let beta = default_beta(Rational::new(1, 2), 3);
    ensure(beta == BigRational::new(BigInt::from(1), BigInt::from(402_653_184)), format!("default beta is {beta}"))?;
    ensure((&beta * BigInt::from(128)).floor() == BigRational::from_integer(BigInt::from(0)), "floor(beta * 128) is not 0")?;
    let ladder = named(NamedGraph::Ladder(16));
    ensure(4 * ladder.n() <= 128 && ladder.max_degree() == 3, "ladder is not a valid guest")?;
    let out = run_cfg(
        r#"{"task":"embed-drc","instances":["ladder:16"],"params":{"host":"complete:128","alpha":"1/2"},"seeds":{"start":0,"count":5}}"#,
        1,
    )?;
    ensure(out.records.iter().all(|r| r.outcome == "degenerate" && r.stage == "bandwidth-budget"), "degenerate budget not reported")?;
    let json = format!(
        r#"{{"task":"embed-drc","instances":["ladder:16"],"params":{{"host":"complete:128","alpha":"1/2","beta":"1/16"}},"seeds":{{"start":0,"count":{DRC_EMBED_SEEDS}}}}}"#
    );
    let out = run_cfg(&json, 1)?;
    let ok = out.records.iter().filter(|r| r.outcome == "some" && r.verified).count();
    ensure(ok >= DRC_EMBED_FLOOR, format!("{ok}/{DRC_EMBED_SEEDS} below {DRC_EMBED_FLOOR}"))?;
    Ok(format!("beta = 1/402653184 degenerates; beta = 1/16 embeds {ok}/{DRC_EMBED_SEEDS} (floor {DRC_EMBED_FLOOR})"))
}

fn crit_determinism() -> Verdict {
    let configs = [
        r#"{"task":"ramsey","instances":["complete:3","path:4"],"params":{"n_max":6},"seeds":[0,1]}"#,
        r#"{"task":"bandwidth","instances":["hypercube:3","cycle:9"],"seeds":[0,1,2]}"#,
        r#"{"task":"regularity","instances":["random_min_degree:48,1/2"],"params":{"k":4,"eps":"1/2","mode":"sampled","budget":40},"seeds":{"start":0,"count":6}}"#,
        r#"{"task":"embed-wheel","instances":["complete:14"],"params":{"k":5,"weight":"1/2"},"seeds":{"start":0,"count":8}}"#,
        r#"{"task":"embed-rga","instances":["complete:2","cycle:3"],"params":{"part_size":16,"guest_part":10},"seeds":{"start":0,"count":6}}"#,
        r#"{"task":"embed-drc","instances":["ladder:8"],"params":{"host":"complete:64","beta":"1/16"},"seeds":{"start":0,"count":6}}"#,
        r#"{"task":"transfer","instances":["complete:40"],"params":{"base":"complete:2","guest_part":4,"k":4},"seeds":{"start":0,"count":4}}"#,
    ];
    let mut rows = 0;
    for json in configs {
        let one = run_cfg(json, 1)?;
        let again = run_cfg(json, 1)?;
        let four = run_cfg(json, 4)?;
        ensure(one.csv == again.csv, format!("rerun differs: {json}"))?;
        ensure(one.csv == four.csv && one.summary_json == four.summary_json, format!("1 vs 4 workers differ: {json}"))?;
        rows += one.records.len();
    }
    Ok(format!("{} configs, {rows} rows byte-identical across reruns and 1/4 workers", configs.len()))
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("ramsey oracle exactness", crit_ramsey_exactness),
        ("weighted degeneration", crit_weighted_degeneration),
        ("stable ramsey identities", crit_stable_identities),
        ("mono-copy completeness on K_6", crit_mono_completeness),
        ("lovasz partition", crit_lovasz),
        ("regularity correctness", crit_regularity),
        ("rga soundness and liveness", crit_rga),
        ("drc selection", crit_drc),
        ("drc bandwidth embedding end to end", crit_drc_end_to_end),
        ("determinism across workers", crit_determinism),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let res = std::panic::catch_unwind(run).unwrap_or_else(|_| Err("panicked".into()));
        let secs = t.elapsed().as_secs_f64();
        match res {
            Ok(detail) => println!("PASS {:>2} {name}: {detail} [{secs:.1}s]", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {why} [{secs:.1}s]", i + 1);
            }
        }
    }
    println!("acceptance: {}/{} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
