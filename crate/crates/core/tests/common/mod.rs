//! Brute-force reference implementations. Nothing here prunes on edges:
//! every candidate map is built in full and only then checked.

#![allow(dead_code)]

use ramsey_forge::{Graph, Rational, VertexSet};

pub fn pairs(n: usize) -> Vec<(usize, usize)> {
    (0..n).flat_map(|v| (0..v).map(move |u| (u, v))).collect()
}

pub fn edges_preserved(g: &Graph, h: &Graph, img: &[usize]) -> bool {
    g.edges().into_iter().all(|(u, v)| h.has_edge(img[u], img[v]))
}

/// Every map `V(G) -> V(H)` in lexicographic order until `accept` says yes.
pub fn any_map(gn: usize, hn: usize, mut accept: impl FnMut(&[usize]) -> bool) -> bool {
    if gn == 0 {
        return accept(&[]);
    }
    if hn == 0 {
        return false;
    }
    let mut img = vec![0usize; gn];
    loop {
        if accept(&img) {
            return true;
        }
        let mut i = 0;
        loop {
            img[i] += 1;
            if img[i] < hn {
                break;
            }
            img[i] = 0;
            i += 1;
            if i == gn {
                return false;
            }
        }
    }
}

/// Injective maps only, each checked in full at the leaf.
pub fn injective_copy(g: &Graph, h: &Graph) -> Option<Vec<usize>> {
    fn rec(g: &Graph, h: &Graph, img: &mut Vec<usize>, used: &mut [bool]) -> bool {
        if img.len() == g.n() {
            return edges_preserved(g, h, img);
        }
        for t in 0..h.n() {
            if !used[t] {
                used[t] = true;
                img.push(t);
                if rec(g, h, img, used) {
                    return true;
                }
                img.pop();
                used[t] = false;
            }
        }
        false
    }
    if g.n() > h.n() {
        return None;
    }
    let mut img = Vec::new();
    rec(g, h, &mut img, &mut vec![false; h.n()]).then_some(img)
}

pub fn weight_ok(weights: &[Rational], hn: usize, img: &[usize]) -> bool {
    let mut load = vec![Rational::new(0, 1); hn];
    for (v, &t) in img.iter().enumerate() {
        load[t] += weights[v];
    }
    load.iter().all(|&l| l <= Rational::new(1, 1))
}

pub fn weighted_copy(g: &Graph, weights: &[Rational], h: &Graph) -> bool {
    any_map(g.n(), h.n(), |img| edges_preserved(g, h, img) && weight_ok(weights, h.n(), img))
}

/// Red/blue classes of the colouring of `K_n` encoded by `mask` over
/// [`pairs`] (bit set = red).
pub fn classes(n: usize, mask: u64) -> (Graph, Graph) {
    let mut red = Graph::empty(n);
    let mut blue = Graph::empty(n);
    for (i, (u, v)) in pairs(n).into_iter().enumerate() {
        if mask >> i & 1 == 1 {
            red.add_edge(u, v).unwrap();
        } else {
            blue.add_edge(u, v).unwrap();
        }
    }
    (red, blue)
}

/// Smallest `n <= n_max` with every colouring of `K_n` containing a
/// monochromatic copy in the sense of `contains`. `None` if no such `n`.
pub fn naive_ramsey(n_max: usize, contains: impl Fn(&Graph) -> bool) -> Option<usize> {
    (1..=n_max).find(|&n| {
        let m = n * n.saturating_sub(1) / 2;
        (0u64..1 << m).all(|mask| {
            let (r, b) = classes(n, mask);
            contains(&r) || contains(&b)
        })
    })
}

pub fn random_graph(n: usize, max_degree: usize, tries: usize, rng: &mut impl rand::Rng) -> Graph {
    let mut g = Graph::empty(n);
    if n < 2 {
        return g;
    }
    for _ in 0..tries {
        let u = rng.random_range(0..n);
        let v = rng.random_range(0..n);
        if u != v && !g.has_edge(u, v) && g.neighbors(u).len() < max_degree && g.neighbors(v).len() < max_degree {
            g.add_edge(u, v).unwrap();
        }
    }
    g
}

pub fn set(n: usize, vs: impl IntoIterator<Item = usize>) -> VertexSet {
    VertexSet::from_vertices(n, vs).unwrap()
}
