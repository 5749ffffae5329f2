//! `(u, v)`-bowties.
//!
//! A bowtie on `(u, v)` is a choice of seven distinct vertices with triangles
//! `u a1 a2`, `c a1 a2`, `c b1 b2` and `v b1 b2`. Weighting the first and third
//! by `+1` and the others by `−1` moves one unit of vertex weight from `v` to
//! `u` and leaves every other vertex and the total untouched.

use rayon::prelude::*;

use super::{and_popcount, chunk_len, clear, contains, members};
use crate::error::{FtdError, GadgetWitness, Result};
use crate::graph::Graph;
use crate::triangles::TriangleIndex;
use crate::weighting::{vertex_defects, Weighting};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BowtieEmbedding {
    pub u: u32,
    pub v: u32,
    pub a1: u32,
    pub a2: u32,
    pub b1: u32,
    pub b2: u32,
    pub c: u32,
}

impl BowtieEmbedding {
    /// `+u a1 a2`, `+c b1 b2`, `−c a1 a2`, `−v b1 b2`.
    pub fn signed_triangles(&self) -> [([u32; 3], i32); 4] {
        let s = |mut t: [u32; 3]| {
            t.sort_unstable();
            t
        };
        [
            (s([self.u, self.a1, self.a2]), 1),
            (s([self.c, self.b1, self.b2]), 1),
            (s([self.c, self.a1, self.a2]), -1),
            (s([self.v, self.b1, self.b2]), -1),
        ]
    }

    pub fn vertices(&self) -> [u32; 7] {
        [self.u, self.v, self.a1, self.a2, self.b1, self.b2, self.c]
    }
}

/// `A = N(u) ∩ N(c) ∖ {v}` and `B = N(v) ∩ N(c) ∖ {u}`.
fn load_sides(g: &Graph, u: u32, v: u32, c: u32, a: &mut [u64], b: &mut [u64]) {
    let (ru, rv, rc) = (g.row(u), g.row(v), g.row(c));
    for i in 0..a.len() {
        a[i] = ru[i] & rc[i];
        b[i] = rv[i] & rc[i];
    }
    clear(a, v);
    clear(b, u);
}

fn inner_edges(g: &Graph, set: &[u64]) -> u64 {
    members(set)
        .map(|x| and_popcount(g.row(x), set) as u64)
        .sum::<u64>()
        / 2
}

/// Unordered edges inside `other` that avoid both endpoints of the edge `x y`.
#[inline]
fn disjoint_edges(g: &Graph, other: &[u64], other_edges: u64, x: u32, y: u32) -> u64 {
    let deg = |z: u32| {
        if contains(other, z) {
            and_popcount(g.row(z), other) as u64
        } else {
            0
        }
    };
    let (dx, dy) = (deg(x), deg(y));
    let both = contains(other, x) && contains(other, y);
    other_edges + both as u64 - dx - dy
}

/// Calls `f(x, y)` for each edge `x < y` inside `set`.
fn for_each_edge(g: &Graph, set: &[u64], mut f: impl FnMut(u32, u32)) {
    for x in members(set) {
        for (i, (&s, &r)) in set.iter().zip(g.row(x)).enumerate() {
            let mut w = s & r;
            while w != 0 {
                let y = i as u32 * 64 + w.trailing_zeros();
                w &= w - 1;
                if y > x {
                    f(x, y);
                }
            }
        }
    }
}

fn check_pair(g: &Graph, u: u32, v: u32) -> Result<()> {
    if u == v {
        return Err(FtdError::InvalidInput(format!(
            "bowtie needs distinct vertices, got {u} twice"
        )));
    }
    if u as usize >= g.n() || v as usize >= g.n() {
        return Err(FtdError::InvalidInput(format!(
            "vertex out of range in ({u},{v})"
        )));
    }
    Ok(())
}

fn count_unchecked(g: &Graph, u: u32, v: u32, a: &mut [u64], b: &mut [u64]) -> u64 {
    let mut total = 0u64;
    for c in 0..g.n() as u32 {
        if c == u || c == v {
            continue;
        }
        load_sides(g, u, v, c, a, b);
        let eb = inner_edges(g, b);
        if eb == 0 {
            continue;
        }
        for_each_edge(g, a, |x, y| total += disjoint_edges(g, b, eb, x, y));
    }
    4 * total
}

/// `|ℬ_{u,v}|`: labeled bowties, i.e. injections of `(a1, a2, b1, b2, c)`.
pub fn bowtie_count(g: &Graph, u: u32, v: u32) -> Result<u64> {
    check_pair(g, u, v)?;
    let (mut a, mut b) = (vec![0u64; g.words()], vec![0u64; g.words()]);
    Ok(count_unchecked(g, u, v, &mut a, &mut b))
}

/// `|ℬ_{u,v}|` for all ordered pairs, row-major `n × n` with zero diagonal.
pub fn bowtie_counts(g: &Graph) -> Vec<u64> {
    let n = g.n();
    let rows: Vec<Vec<u64>> = (0..n as u32)
        .into_par_iter()
        .map(|u| {
            let (mut a, mut b) = (vec![0u64; g.words()], vec![0u64; g.words()]);
            (0..n as u32)
                .map(|v| {
                    if u == v {
                        0
                    } else {
                        count_unchecked(g, u, v, &mut a, &mut b)
                    }
                })
                .collect()
        })
        .collect();
    rows.concat()
}

/// Every labeled `(u, v)`-bowtie, by direct enumeration.
pub fn enumerate_bowties(g: &Graph, u: u32, v: u32) -> Result<Vec<BowtieEmbedding>> {
    check_pair(g, u, v)?;
    let (mut a, mut b) = (vec![0u64; g.words()], vec![0u64; g.words()]);
    let mut out = Vec::new();
    for c in 0..g.n() as u32 {
        if c == u || c == v {
            continue;
        }
        load_sides(g, u, v, c, &mut a, &mut b);
        let mut a_edges = Vec::new();
        for_each_edge(g, &a, |x, y| {
            a_edges.push((x, y));
            a_edges.push((y, x));
        });
        let mut b_edges = Vec::new();
        for_each_edge(g, &b, |x, y| {
            b_edges.push((x, y));
            b_edges.push((y, x));
        });
        for &(a1, a2) in &a_edges {
            for &(b1, b2) in &b_edges {
                if b1 == a1 || b1 == a2 || b2 == a1 || b2 == a2 {
                    continue;
                }
                out.push(BowtieEmbedding {
                    u,
                    v,
                    a1,
                    a2,
                    b1,
                    b2,
                    c,
                });
            }
        }
    }
    Ok(out)
}

fn tri(ti: &TriangleIndex, a: u32, b: u32, c: u32) -> usize {
    ti.id(a, b, c).expect("bowtie triangle present in index")
}

/// Adds `κ · Σ_{ψ ∈ ℬ_{u,v}} ψ` to `delta`. Each unordered `a`-edge `α` meets
/// `4·compat(α)` labeled bowties, where `compat(α)` counts unordered `b`-edges
/// disjoint from `α`; the same holds symmetrically for `b`-edges.
fn accumulate_pair(
    g: &Graph,
    ti: &TriangleIndex,
    u: u32,
    v: u32,
    kappa: f64,
    a: &mut [u64],
    b: &mut [u64],
    delta: &mut [f64],
) {
    for c in 0..g.n() as u32 {
        if c == u || c == v {
            continue;
        }
        load_sides(g, u, v, c, a, b);
        let ea = inner_edges(g, a);
        let eb = inner_edges(g, b);
        if ea == 0 || eb == 0 {
            continue;
        }
        for_each_edge(g, a, |x, y| {
            let k = disjoint_edges(g, b, eb, x, y);
            if k > 0 {
                let w = 4.0 * kappa * k as f64;
                delta[tri(ti, u, x, y)] += w;
                delta[tri(ti, c, x, y)] -= w;
            }
        });
        for_each_edge(g, b, |x, y| {
            let k = disjoint_edges(g, a, ea, x, y);
            if k > 0 {
                let w = 4.0 * kappa * k as f64;
                delta[tri(ti, c, x, y)] += w;
                delta[tri(ti, v, x, y)] -= w;
            }
        });
    }
}

/// Vertex balancing: `σ − (1/n) Σ_u δ(u) Σ_{v ≠ u} |ℬ_{u,v}|⁻¹ Σ_{ψ ∈ ℬ_{u,v}} ψ`.
///
/// Fails with the first ordered pair `(u, v)` (in row-major order) that
/// needs a bowtie but has none.
pub fn bowtie_balance(g: &Graph, ti: &TriangleIndex, sigma: &Weighting) -> Result<Weighting> {
    let n = g.n();
    if sigma.len() != ti.len() {
        return Err(FtdError::Mismatch(format!(
            "weighting has {} entries, index has {} triangles",
            sigma.len(),
            ti.len()
        )));
    }
    let defects = vertex_defects(g, ti, sigma);
    let active: Vec<u32> = (0..n as u32)
        .filter(|&u| defects[u as usize] != 0.0)
        .collect();
    let chunk = chunk_len(active.len());
    let parts: Vec<Result<Vec<f64>>> = active
        .par_chunks(chunk)
        .map(|us| {
            let (mut a, mut b) = (vec![0u64; g.words()], vec![0u64; g.words()]);
            let mut delta = vec![0.0; ti.len()];
            for &u in us {
                for v in 0..n as u32 {
                    if v == u {
                        continue;
                    }
                    let count = count_unchecked(g, u, v, &mut a, &mut b);
                    if count == 0 {
                        return Err(FtdError::GadgetMissing(GadgetWitness::BowtiePair(u, v)));
                    }
                    let kappa = -defects[u as usize] / (n as f64 * count as f64);
                    accumulate_pair(g, ti, u, v, kappa, &mut a, &mut b, &mut delta);
                }
            }
            Ok(delta)
        })
        .collect();
    let mut out = sigma.clone();
    for part in parts {
        for (x, d) in out.values_mut().iter_mut().zip(part?) {
            *x += d;
        }
    }
    Ok(out)
}
