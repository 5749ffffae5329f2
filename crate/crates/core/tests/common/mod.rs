//! Brute-force reference implementations shared by the integration tests.

#![allow(dead_code)]

use ftd_core::numeric::CompensatedSum;
use ftd_core::rng::rng_from_seed;
use ftd_core::{Graph, TriangleIndex, Weighting};
use rand::Rng;

/// Every labelled pinwheel with base `(u, v)`: the center followed by the
/// perimeter `w_0 = u, …, w_{2k−1} = v`, found by plain depth-first search.
pub fn pinwheels(g: &Graph, u: u32, v: u32, k: usize) -> Vec<(u32, Vec<u32>)> {
    let mut out = Vec::new();
    for c in 0..g.n() as u32 {
        if c == u || c == v || !g.has_edge(c, u) || !g.has_edge(c, v) {
            continue;
        }
        let mut path = vec![u];
        extend(g, c, v, 2 * k, &mut path, &mut out);
    }
    out
}

fn extend(
    g: &Graph,
    c: u32,
    v: u32,
    len: usize,
    path: &mut Vec<u32>,
    out: &mut Vec<(u32, Vec<u32>)>,
) {
    let last = *path.last().unwrap();
    if path.len() == len - 1 {
        if g.has_edge(last, v) {
            let mut p = path.clone();
            p.push(v);
            out.push((c, p));
        }
        return;
    }
    for w in 0..g.n() as u32 {
        if w == c || w == v || path.contains(&w) || !g.has_edge(last, w) || !g.has_edge(c, w) {
            continue;
        }
        path.push(w);
        extend(g, c, v, len, path, out);
        path.pop();
    }
}

/// Signed triangles of one pinwheel: `(c, w_i, w_{i+1})` carries
/// `(−1)^{i+1}` and the base `(c, w_{2k−1}, w_0)` carries `+1`.
pub fn pinwheel_signs(c: u32, perim: &[u32]) -> Vec<([u32; 3], i64)> {
    let l = perim.len();
    let mut out = vec![(sorted([c, perim[l - 1], perim[0]]), 1)];
    for i in 0..l - 1 {
        out.push((
            sorted([c, perim[i], perim[i + 1]]),
            if i % 2 == 0 { -1 } else { 1 },
        ));
    }
    out
}

pub fn sorted(mut t: [u32; 3]) -> [u32; 3] {
    t.sort_unstable();
    t
}

/// `σ − Σ_e δ_e/|S(e)| Σ_{ψ ∈ S(e)} Φ_ψ` with `S(e)` over both orientations,
/// accumulated with compensated sums per triangle.
pub fn brute_apply_f(g: &Graph, ti: &TriangleIndex, sigma: &Weighting, k: usize) -> Vec<f64> {
    let mut acc: Vec<CompensatedSum> = sigma
        .values()
        .iter()
        .map(|&x| {
            let mut c = CompensatedSum::new();
            c.add(x);
            c
        })
        .collect();
    for e in 0..g.m() {
        let (u, v) = g.edge(e);
        let delta = sigma.edge_weight(ti, e) - 1.0;
        let mut all = pinwheels(g, u, v, k);
        all.extend(pinwheels(g, v, u, k));
        assert!(!all.is_empty(), "edge {u}-{v} has no pinwheel");
        let scale = delta / all.len() as f64;
        for (c, perim) in &all {
            for (t, s) in pinwheel_signs(*c, perim) {
                let id = ti.id(t[0], t[1], t[2]).expect("pinwheel triangle");
                acc[id].add(-scale * s as f64);
            }
        }
    }
    acc.iter().map(|c| c.value()).collect()
}

/// Labelled bowties for `(u, v)` by brute force over all 5-tuples.
pub fn bowtie_count(g: &Graph, u: u32, v: u32) -> u64 {
    let n = g.n() as u32;
    let mut count = 0;
    for c in 0..n {
        if c == u || c == v {
            continue;
        }
        for a1 in 0..n {
            for a2 in 0..n {
                let a = [a1, a2];
                if a.iter().any(|&x| x == u || x == v || x == c) || a1 == a2 {
                    continue;
                }
                if !(g.has_edge(u, a1)
                    && g.has_edge(u, a2)
                    && g.has_edge(a1, a2)
                    && g.has_edge(c, a1)
                    && g.has_edge(c, a2))
                {
                    continue;
                }
                for b1 in 0..n {
                    for b2 in 0..n {
                        let b = [b1, b2];
                        if b.iter()
                            .any(|&x| x == u || x == v || x == c || x == a1 || x == a2)
                            || b1 == b2
                        {
                            continue;
                        }
                        if g.has_edge(v, b1)
                            && g.has_edge(v, b2)
                            && g.has_edge(b1, b2)
                            && g.has_edge(c, b1)
                            && g.has_edge(c, b2)
                        {
                            count += 1;
                        }
                    }
                }
            }
        }
    }
    count
}

/// A seeded weighting with entries in `[0, 1)`.
pub fn random_weighting(len: usize, seed: u64) -> Weighting {
    let mut rng = rng_from_seed(seed);
    Weighting::from_vec((0..len).map(|_| rng.random::<f64>()).collect())
}
