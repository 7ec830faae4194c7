//! Monochromatic weighted wheels `W_k` via a high-degree hub and a greedy
//! cycle inside its neighbourhood.

use num_traits::{One, Zero};

use super::Outcome;
use crate::error::{invalid, Error, Result};
use crate::generators::{make_named, NamedGraph};
use crate::graph::{Color, EdgeColoring, Rational, VertexSet, WeightedGraph};
use crate::morphisms::{verify_capacity, verify_homomorphism, CapacityProfile, VertexMap};

/// Greedy weighted cycle `0..len` inside `s` in colour `col`. Cycle vertices
/// go heaviest first; each takes the admissible vertex with the most
/// `col`-neighbours in `s` (lowest id on ties).
fn greedy_cycle(c: &EdgeColoring, s: &VertexSet, col: Color, weights: &[Rational]) -> Option<Vec<usize>> {
    let len = weights.len();
    let class = c.class(col);
    let mut order: Vec<usize> = (0..len).collect();
    order.sort_by(|&a, &b| weights[b].cmp(&weights[a]).then(a.cmp(&b)));
    let score: Vec<usize> = (0..c.n()).map(|v| class.neighbors(v).intersection_len(s)).collect();
    let mut load = vec![Rational::zero(); c.n()];
    let mut image: Vec<Option<usize>> = vec![None; len];
    for &x in &order {
        let mut cand = s.clone();
        for nb in [(x + len - 1) % len, (x + 1) % len] {
            if let Some(t) = image[nb] {
                cand.intersect_with(class.neighbors(t));
            }
        }
        let pick =
            cand.iter().filter(|&u| load[u] + weights[x] <= Rational::one()).max_by(|&a, &b| score[a].cmp(&score[b]).then(b.cmp(&a)))?;
        image[x] = Some(pick);
        load[pick] += weights[x];
    }
    image.into_iter().collect()
}

fn attempt(c: &EdgeColoring, s: &VertexSet, col: Color, hub: usize, weights: &[Rational]) -> Option<(Color, VertexMap)> {
    let k = weights.len();
    let cycle = greedy_cycle(c, s, col, &weights[..k - 1])?;
    let mut image = cycle;
    image.push(hub);
    Some((col, VertexMap::new(image, c.n()).expect("host vertices")))
}

/// Hub `v_1` has the largest monochromatic degree (red first, lowest id on
/// ties); `X` is its neighbourhood in that colour. If some `v_2 ∈ X` has at
/// least `|X|/4` neighbours of the other colour inside `X`, the cycle is
/// sought inside that neighbourhood `Y`, in the other colour around `v_2`
/// and then in the first colour around `v_1`. Otherwise, or if that fails,
/// the cycle is sought in the first colour inside `X`.
///
/// The wheel is `W_k` with hub `k-1` and rim `0..k-1`.
pub fn wheel_mono_embed(c: &EdgeColoring, k: usize, weights: &[Rational]) -> Result<Outcome<(Color, VertexMap)>> {
    if k < 4 {
        return invalid(format!("wheel needs k >= 4, got {k}"));
    }
    if weights.len() != k {
        return invalid(format!("{} weights for a wheel on {k} vertices", weights.len()));
    }
    let wheel = WeightedGraph::new(make_named(&NamedGraph::Wheel(k))?, weights.to_vec())?;
    let n = c.n();
    if n == 0 {
        return Ok(Outcome::fail("hub", "empty host"));
    }
    let (v1, col1) = Color::BOTH
        .into_iter()
        .flat_map(|col| (0..n).map(move |v| (v, col)))
        .max_by(|&(a, ca), &(b, cb)| {
            c.class(ca).neighbors(a).len().cmp(&c.class(cb).neighbors(b).len()).then((cb as u8).cmp(&(ca as u8))).then(b.cmp(&a))
        })
        .unwrap();
    let col2 = col1.other();
    let x = c.class(col1).neighbors(v1).clone();
    let v2 = x.iter().find(|&u| 4 * c.class(col2).neighbors(u).intersection_len(&x) >= x.len());
    let mut tries: Vec<(VertexSet, Color, usize)> = Vec::new();
    if let Some(v2) = v2 {
        let y = c.class(col2).neighbors(v2).intersection(&x);
        tries.push((y.clone(), col2, v2));
        tries.push((y, col1, v1));
    }
    tries.push((x, col1, v1));
    for (s, col, hub) in tries {
        if s.is_empty() {
            continue;
        }
        if let Some((col, f)) = attempt(c, &s, col, hub, weights) {
            let ok = verify_homomorphism(wheel.graph(), c.class(col), &f)?.is_valid()
                && verify_capacity(&f, &CapacityProfile::weights(&wheel))?.is_valid();
            if !ok {
                return Err(Error::Tripwire("wheel embedding failed independent verification".into()));
            }
            return Ok(Outcome::Success((col, f)));
        }
    }
    Ok(Outcome::fail("greedy-cycle", format!("no branch around hub {v1} completed the rim")))
}
