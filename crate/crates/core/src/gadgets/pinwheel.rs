//! Pinwheels: wheels `W_{2k}` (hub `c`, perimeter `w_0 … w_{2k−1}`) placed
//! with the base edge `w_0 w_{2k−1}` on a host edge.
//!
//! Triangle `c w_i w_{i+1}` carries sign `(−1)^{i+1}`, so the base triangle
//! `c w_{2k−1} w_0` has `+1`. Every vertex then has total weight zero and only
//! perimeter edges change, by `±1` according to their distance from the base.
//!
//! `𝒮(e)` collects the labeled pinwheels over both orientations of `e`. A
//! `2k`-cycle through `e` inside `G[N(c)]` accounts for exactly two of them.

use rayon::prelude::*;

use super::{chunk_len, contains, members};
use crate::error::{FtdError, GadgetWitness, Result};
use crate::graph::Graph;
use crate::triangles::TriangleIndex;
use crate::weighting::{edge_discrepancies, Weighting};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PinwheelEmbedding {
    pub base: (u32, u32),
    pub center: u32,
    /// `w_0 = base.0`, …, `w_{2k−1} = base.1`.
    pub perimeter: Vec<u32>,
}

impl PinwheelEmbedding {
    pub fn k(&self) -> usize {
        self.perimeter.len() / 2
    }

    /// `(c, w_i, w_{i+1 mod 2k})` with sign `(−1)^{i+1}`, sorted triple.
    pub fn signed_triangles(&self) -> Vec<([u32; 3], i32)> {
        let len = self.perimeter.len();
        (0..len)
            .map(|i| {
                let mut t = [
                    self.center,
                    self.perimeter[i],
                    self.perimeter[(i + 1) % len],
                ];
                t.sort_unstable();
                (t, if i % 2 == 1 { 1 } else { -1 })
            })
            .collect()
    }
}

fn check_k(k: usize) -> Result<()> {
    if k < 2 {
        return Err(FtdError::InvalidInput(format!(
            "wheel half-length must be at least 2, got {k}"
        )));
    }
    Ok(())
}

/// Simple paths `u = w_0, w_1, …, w_{2k−1} = v` with interior inside `N(c)`.
fn paths_in_neighbourhood(
    g: &Graph,
    c: u32,
    u: u32,
    v: u32,
    k: usize,
    mut visit: impl FnMut(&[u32]),
) {
    let len = 2 * k;
    let mut path = vec![u; len];
    path[len - 1] = v;
    let mut used = vec![0u64; g.words()];
    super::insert(&mut used, u);
    super::insert(&mut used, v);
    fn rec(
        g: &Graph,
        c: u32,
        depth: usize,
        path: &mut [u32],
        used: &mut [u64],
        visit: &mut dyn FnMut(&[u32]),
    ) {
        let len = path.len();
        let last = path[depth - 1];
        let (rl, rc) = (g.row(last), g.row(c));
        let end = path[len - 1];
        for (i, (&a, &b)) in rl.iter().zip(rc).enumerate() {
            let mut w = a & b & !used[i];
            if depth == len - 2 {
                w &= g.row(end)[i];
            }
            while w != 0 {
                let x = i as u32 * 64 + w.trailing_zeros();
                w &= w - 1;
                path[depth] = x;
                if depth == len - 2 {
                    visit(path);
                } else {
                    super::insert(used, x);
                    rec(g, c, depth + 1, path, used, visit);
                    super::clear(used, x);
                }
            }
        }
    }
    rec(g, c, 1, &mut path, &mut used, &mut visit);
}

fn check_edge(g: &Graph, u: u32, v: u32) -> Result<()> {
    if u as usize >= g.n() || v as usize >= g.n() || !g.has_edge(u, v) {
        return Err(FtdError::InvalidEdge(u, v));
    }
    Ok(())
}

/// `|𝒮(uv)|`, both orientations, by path counting per centre.
pub fn pinwheel_count(g: &Graph, u: u32, v: u32, k: usize) -> Result<u64> {
    check_k(k)?;
    check_edge(g, u, v)?;
    let mut paths = 0u64;
    for c in g.common_neighbors(u, v) {
        paths_in_neighbourhood(g, c, u, v, k, |_| paths += 1);
    }
    Ok(2 * paths)
}

/// Labeled pinwheels with `w_0 ↦ u` and `w_{2k−1} ↦ v` (one orientation).
pub fn enumerate_pinwheels(g: &Graph, u: u32, v: u32, k: usize) -> Result<Vec<PinwheelEmbedding>> {
    check_k(k)?;
    check_edge(g, u, v)?;
    let mut out = Vec::new();
    for c in g.common_neighbors(u, v) {
        paths_in_neighbourhood(g, c, u, v, k, |p| {
            out.push(PinwheelEmbedding {
                base: (u, v),
                center: c,
                perimeter: p.to_vec(),
            })
        });
    }
    Ok(out)
}

/// `G[N(c)]` with local vertex ids `0..l` in increasing global order.
struct Local {
    words: usize,
    rows: Vec<u64>,
    /// `l × l` table of local edge ids, `u32::MAX` for non-edges.
    edge_id: Vec<u32>,
    /// Global endpoints of each local edge, lexicographic.
    edges: Vec<(u32, u32)>,
}

impl Local {
    fn build(g: &Graph, c: u32) -> Self {
        let verts = g.neighbors(c);
        let l = verts.len();
        let words = l.div_ceil(64).max(1);
        let mut rows = vec![0u64; l * words];
        let mut edge_id = vec![u32::MAX; l * l];
        let mut edges = Vec::new();
        for i in 0..l {
            for j in i + 1..l {
                if g.has_edge(verts[i], verts[j]) {
                    rows[i * words + j / 64] |= 1 << (j % 64);
                    rows[j * words + i / 64] |= 1 << (i % 64);
                    edge_id[i * l + j] = edges.len() as u32;
                    edge_id[j * l + i] = edges.len() as u32;
                    edges.push((verts[i], verts[j]));
                }
            }
        }
        Local {
            words,
            rows,
            edge_id,
            edges,
        }
    }

    fn len(&self) -> usize {
        self.rows.len() / self.words
    }

    fn row(&self, i: usize) -> &[u64] {
        &self.rows[i * self.words..(i + 1) * self.words]
    }

    /// Calls `f` with the local edge ids `e_0, …, e_{2k−1}` of every
    /// undirected `2k`-cycle, each exactly once: the cycle starts at its
    /// least vertex `s` and `x_1 < x_{2k−1}`.
    fn for_each_cycle(&self, k: usize, mut f: impl FnMut(&[u32])) {
        let l = self.len();
        let len = 2 * k;
        if l < len {
            return;
        }
        let w = self.words;
        let mut allowed = vec![0u64; w];
        let mut visited = vec![0u64; w];
        let mut dist = vec![u32::MAX; l];
        let mut queue = Vec::with_capacity(l);
        let mut path = vec![0u32; len];
        let mut ids = vec![0u32; len];
        for s in 0..l {
            allowed.iter_mut().for_each(|x| *x = 0);
            for v in s + 1..l {
                super::insert(&mut allowed, v as u32);
            }
            // Distances from s inside {s} ∪ allowed bound the remaining length.
            dist.iter_mut().for_each(|d| *d = u32::MAX);
            dist[s] = 0;
            queue.clear();
            queue.push(s as u32);
            let mut head = 0;
            while head < queue.len() {
                let x = queue[head] as usize;
                head += 1;
                for y in members(self.row(x)) {
                    if contains(&allowed, y) && dist[y as usize] == u32::MAX {
                        dist[y as usize] = dist[x] + 1;
                        queue.push(y);
                    }
                }
            }
            visited.iter_mut().for_each(|x| *x = 0);
            path[0] = s as u32;
            super::insert(&mut visited, s as u32);
            self.extend(
                1,
                len,
                &allowed,
                &mut visited,
                &dist,
                &mut path,
                &mut ids,
                &mut f,
            );
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn extend(
        &self,
        depth: usize,
        len: usize,
        allowed: &[u64],
        visited: &mut [u64],
        dist: &[u32],
        path: &mut [u32],
        ids: &mut [u32],
        f: &mut impl FnMut(&[u32]),
    ) {
        let l = self.len();
        let last = path[depth - 1] as usize;
        let s = path[0] as usize;
        let closing = depth == len - 1;
        for i in 0..self.words {
            let mut cand = self.row(last)[i] & allowed[i] & !visited[i];
            if closing {
                cand &= self.row(s)[i];
            }
            while cand != 0 {
                let y = i as u32 * 64 + cand.trailing_zeros();
                cand &= cand - 1;
                if closing {
                    if y <= path[1] {
                        continue;
                    }
                } else if dist[y as usize] as usize > len - depth {
                    continue;
                }
                path[depth] = y;
                ids[depth - 1] = self.edge_id[last * l + y as usize];
                if closing {
                    ids[depth] = self.edge_id[y as usize * l + s];
                    f(ids);
                } else {
                    super::insert(visited, y);
                    self.extend(depth + 1, len, allowed, visited, dist, path, ids, f);
                    super::clear(visited, y);
                }
            }
        }
    }
}

/// `|𝒮(e)|` for every edge id, from one pass of cycle enumeration per centre.
pub fn pinwheel_counts(g: &Graph, k: usize) -> Result<Vec<u64>> {
    check_k(k)?;
    let per_center: Vec<Vec<(usize, u64)>> = (0..g.n() as u32)
        .into_par_iter()
        .map(|c| {
            let local = Local::build(g, c);
            let mut cnt = vec![0u64; local.edges.len()];
            local.for_each_cycle(k, |ids| {
                for &e in ids {
                    cnt[e as usize] += 1;
                }
            });
            local
                .edges
                .iter()
                .zip(cnt)
                .filter(|(_, x)| *x > 0)
                .map(|(&(a, b), x)| (g.edge_id(a, b).expect("local edge"), x))
                .collect()
        })
        .collect();
    let mut counts = vec![0u64; g.m()];
    for part in per_center {
        for (e, x) in part {
            counts[e] += 2 * x;
        }
    }
    Ok(counts)
}

fn first_missing(g: &Graph, counts: &[u64]) -> Result<()> {
    match counts.iter().position(|&x| x == 0) {
        Some(e) => {
            let (u, v) = g.edge(e);
            Err(FtdError::GadgetMissing(GadgetWitness::PinwheelEdge(u, v)))
        }
        None => Ok(()),
    }
}

fn local_triangles(ti: &TriangleIndex, c: u32, local: &Local) -> Vec<u32> {
    local
        .edges
        .iter()
        .map(|&(a, b)| ti.id(c, a, b).expect("hub triangle present") as u32)
        .collect()
}

fn local_edge_ids(g: &Graph, local: &Local) -> Vec<u32> {
    local
        .edges
        .iter()
        .map(|&(a, b)| g.edge_id(a, b).expect("local edge") as u32)
        .collect()
}

/// `x_e = 2 δ_e / |𝒮(e)|`.
fn scaled_discrepancies(ti: &TriangleIndex, sigma: &Weighting, counts: &[u64]) -> Vec<f64> {
    edge_discrepancies(ti, sigma)
        .into_iter()
        .zip(counts)
        .map(|(d, &s)| 2.0 * d / s as f64)
        .collect()
}

fn check_lengths(ti: &TriangleIndex, sigma: &Weighting, counts: &[u64]) -> Result<()> {
    if sigma.len() != ti.len() || counts.len() != ti.edge_count() {
        return Err(FtdError::Mismatch(format!(
            "weighting {} / triangles {}, counts {} / edges {}",
            sigma.len(),
            ti.len(),
            counts.len(),
            ti.edge_count()
        )));
    }
    Ok(())
}

/// `F(σ) = σ − Σ_e δ_e(σ) Φ_e`, aggregated over `2k`-cycles of each `G[N(c)]`.
///
/// For a cycle with edges `e_0 … e_{2k−1}` and triangles `t_j = c ∪ e_j` the
/// pinwheels based on its edges contribute `Δ(t_j) = −(−1)^j A` with
/// `A = Σ_j (−1)^j · 2δ_{e_j} / |𝒮(e_j)|`.
pub fn apply_f(
    g: &Graph,
    ti: &TriangleIndex,
    sigma: &Weighting,
    k: usize,
    pin_counts: &[u64],
) -> Result<Weighting> {
    check_k(k)?;
    check_lengths(ti, sigma, pin_counts)?;
    first_missing(g, pin_counts)?;
    let x = scaled_discrepancies(ti, sigma, pin_counts);
    let centers: Vec<u32> = (0..g.n() as u32).collect();
    let parts: Vec<Vec<(u32, f64)>> = centers
        .par_chunks(chunk_len(centers.len()))
        .map(|cs| {
            let mut out = Vec::new();
            for &c in cs {
                let local = Local::build(g, c);
                let tris = local_triangles(ti, c, &local);
                let gid = local_edge_ids(g, &local);
                let mut delta = vec![0.0; local.edges.len()];
                local.for_each_cycle(k, |ids| {
                    let a: f64 = ids
                        .iter()
                        .enumerate()
                        .map(|(j, &e)| {
                            if j % 2 == 0 {
                                x[gid[e as usize] as usize]
                            } else {
                                -x[gid[e as usize] as usize]
                            }
                        })
                        .sum();
                    for (j, &e) in ids.iter().enumerate() {
                        delta[e as usize] -= if j % 2 == 0 { a } else { -a };
                    }
                });
                out.extend(tris.into_iter().zip(delta));
            }
            out
        })
        .collect();
    let mut out = sigma.clone();
    let vals = out.values_mut();
    for part in parts {
        for (t, d) in part {
            vals[t as usize] += d;
        }
    }
    Ok(out)
}

/// One centre's share of `F`: `Δ(t_a) = −Σ_b K[a][b] x_b` with
/// `K[a][b] = Σ_{cycles ∋ a, b} (−1)^{pos(a) − pos(b)}`.
#[derive(Debug, Clone)]
struct CenterBlock {
    tris: Vec<u32>,
    edges: Vec<u32>,
    kmat: Vec<f64>,
}

/// `F` with all cycle enumeration done once; each application costs
/// `Σ_c e(G[N(c)])²`.
#[derive(Debug, Clone)]
pub struct PinwheelOperator {
    k: usize,
    counts: Vec<u64>,
    blocks: Vec<CenterBlock>,
}

impl PinwheelOperator {
    /// Fails on the first edge (by id) without pinwheels.
    pub fn build(g: &Graph, ti: &TriangleIndex, k: usize) -> Result<Self> {
        check_k(k)?;
        let per_center: Vec<(CenterBlock, Vec<u64>)> = (0..g.n() as u32)
            .into_par_iter()
            .map(|c| {
                let local = Local::build(g, c);
                let me = local.edges.len();
                let mut kmat = vec![0.0; me * me];
                let mut cnt = vec![0u64; me];
                local.for_each_cycle(k, |ids| {
                    for (i, &a) in ids.iter().enumerate() {
                        cnt[a as usize] += 1;
                        let row = &mut kmat[a as usize * me..(a as usize + 1) * me];
                        for (j, &b) in ids.iter().enumerate() {
                            row[b as usize] += if (i + j) % 2 == 0 { 1.0 } else { -1.0 };
                        }
                    }
                });
                let block = CenterBlock {
                    tris: local_triangles(ti, c, &local),
                    edges: local_edge_ids(g, &local),
                    kmat,
                };
                (block, cnt)
            })
            .collect();
        let mut counts = vec![0u64; g.m()];
        let mut blocks = Vec::with_capacity(per_center.len());
        for (block, cnt) in per_center {
            for (&e, x) in block.edges.iter().zip(cnt) {
                counts[e as usize] += 2 * x;
            }
            blocks.push(block);
        }
        first_missing(g, &counts)?;
        Ok(PinwheelOperator { k, counts, blocks })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// `|𝒮(e)|` per edge id.
    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn apply(&self, ti: &TriangleIndex, sigma: &Weighting) -> Result<Weighting> {
        check_lengths(ti, sigma, &self.counts)?;
        let x = scaled_discrepancies(ti, sigma, &self.counts);
        let parts: Vec<Vec<f64>> = self
            .blocks
            .par_iter()
            .map(|b| {
                let me = b.edges.len();
                let xl: Vec<f64> = b.edges.iter().map(|&e| x[e as usize]).collect();
                (0..me)
                    .map(|a| {
                        b.kmat[a * me..(a + 1) * me]
                            .iter()
                            .zip(&xl)
                            .map(|(k, x)| k * x)
                            .sum::<f64>()
                    })
                    .collect()
            })
            .collect();
        let mut out = sigma.clone();
        let vals = out.values_mut();
        for (b, y) in self.blocks.iter().zip(parts) {
            for (&t, d) in b.tris.iter().zip(y) {
                vals[t as usize] -= d;
            }
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::gen_gnp;
    use crate::weighting::{report, uniform_weighting};

    pub(crate) fn wheel(k: usize) -> Graph {
        let len = 2 * k as u32;
        let mut e: Vec<(u32, u32)> = (0..len).map(|i| (i, len)).collect();
        e.extend((0..len).map(|i| crate::graph::ordered(i, (i + 1) % len)));
        Graph::from_edges(len as usize + 1, e).unwrap()
    }

    #[test]
    fn counts_on_small_graphs() {
        assert_eq!(
            pinwheel_count(&Graph::complete(10), 0, 1, 4).unwrap(),
            80640
        );
        assert_eq!(pinwheel_count(&Graph::complete(5), 0, 1, 4).unwrap(), 0);
        assert_eq!(pinwheel_count(&wheel(4), 0, 7, 4).unwrap(), 2);
        assert!(matches!(
            pinwheel_count(&wheel(4), 0, 2, 4),
            Err(FtdError::InvalidEdge(0, 2))
        ));
        assert!(pinwheel_count(&wheel(4), 0, 7, 1).is_err());
    }

    #[test]
    fn cycle_counts_match_path_counts() {
        for seed in 0..6 {
            let g = gen_gnp(13, 0.75, seed);
            for k in [2, 3, 4] {
                let all = pinwheel_counts(&g, k).unwrap();
                for (e, &(u, v)) in g.edges().iter().enumerate() {
                    assert_eq!(all[e], pinwheel_count(&g, u, v, k).unwrap());
                    assert_eq!(
                        all[e],
                        2 * enumerate_pinwheels(&g, v, u, k).unwrap().len() as u64
                    );
                }
            }
        }
        let k10 = Graph::complete(10);
        assert!(pinwheel_counts(&k10, 4)
            .unwrap()
            .iter()
            .all(|&x| x == 80640));
    }

    #[test]
    fn operator_matches_direct_aggregation() {
        let g = gen_gnp(14, 0.8, 5);
        let ti = TriangleIndex::build(&g);
        let op = PinwheelOperator::build(&g, &ti, 4).unwrap();
        assert_eq!(op.counts(), pinwheel_counts(&g, 4).unwrap().as_slice());
        let mut w = uniform_weighting(&g, &ti).unwrap();
        for (i, x) in w.values_mut().iter_mut().enumerate() {
            *x += ((i * 7919) % 13) as f64 / 100.0;
        }
        let a = apply_f(&g, &ti, &w, 4, op.counts()).unwrap();
        let b = op.apply(&ti, &w).unwrap();
        assert!(a.max_abs_diff(&b) < 1e-12);
    }

    #[test]
    fn f_fixes_exact_input_and_reduces_discrepancy() {
        let g = Graph::complete(9);
        let ti = TriangleIndex::build(&g);
        let op = PinwheelOperator::build(&g, &ti, 4).unwrap();
        let w = uniform_weighting(&g, &ti).unwrap();
        assert!(op.apply(&ti, &w).unwrap().max_abs_diff(&w) < 1e-15);
        let mut bumped = w.clone();
        bumped.values_mut()[0] += 0.1;
        let before = report(&g, &ti, &bumped).delta_inf;
        let after = report(&g, &ti, &op.apply(&ti, &bumped).unwrap()).delta_inf;
        assert!(after < before, "{after} >= {before}");
    }

    #[test]
    fn missing_pinwheel_is_reported() {
        let g = Graph::complete(6);
        let ti = TriangleIndex::build(&g);
        assert!(matches!(
            PinwheelOperator::build(&g, &ti, 4),
            Err(FtdError::GadgetMissing(GadgetWitness::PinwheelEdge(0, 1)))
        ));
        let w = uniform_weighting(&g, &ti).unwrap();
        assert!(apply_f(&g, &ti, &w, 4, &vec![0; g.m()]).is_err());
    }
}
