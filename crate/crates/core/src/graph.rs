//! Simple undirected graphs with sorted adjacency lists and bitset rows.

use std::io::{BufRead, Write};

use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{FtdError, Result};
use crate::rng::rng_from_seed;

/// Undirected edge stored with `0 <= u < v`.
pub type Edge = (u32, u32);

#[inline]
pub fn ordered(a: u32, b: u32) -> Edge {
    if a < b {
        (a, b)
    } else {
        (b, a)
    }
}

#[derive(Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    words: usize,
    /// Lexicographically sorted; the position is the edge id.
    edges: Vec<Edge>,
    adj: Vec<Vec<u32>>,
    /// Edge id of `(v, adj[v][i])`, aligned with `adj`.
    adj_edge: Vec<Vec<u32>>,
    bits: Vec<u64>,
}

impl std::fmt::Debug for Graph {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Graph")
            .field("n", &self.n)
            .field("m", &self.edges.len())
            .finish()
    }
}

impl Graph {
    pub fn empty(n: usize) -> Self {
        Self::from_sorted_unique(n, Vec::new())
    }

    /// Builds a graph, rejecting self-loops, out-of-range endpoints and
    /// duplicate edges.
    pub fn from_edges<I>(n: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = Edge>,
    {
        let mut list = Vec::new();
        for (a, b) in edges {
            if a == b {
                return Err(FtdError::InvalidInput(format!("self-loop at vertex {a}")));
            }
            if a as usize >= n || b as usize >= n {
                return Err(FtdError::InvalidInput(format!(
                    "edge {a}-{b} out of range for n = {n}"
                )));
            }
            list.push(ordered(a, b));
        }
        list.sort_unstable();
        if let Some(w) = list.windows(2).find(|w| w[0] == w[1]) {
            return Err(FtdError::InvalidInput(format!(
                "duplicate edge {}-{}",
                w[0].0, w[0].1
            )));
        }
        Ok(Self::from_sorted_unique(n, list))
    }

    fn from_sorted_unique(n: usize, edges: Vec<Edge>) -> Self {
        let words = n.div_ceil(64).max(1);
        let mut adj = vec![Vec::new(); n];
        let mut adj_edge = vec![Vec::new(); n];
        let mut bits = vec![0u64; n * words];
        for (id, &(u, v)) in edges.iter().enumerate() {
            adj[u as usize].push(v);
            adj_edge[u as usize].push(id as u32);
            adj[v as usize].push(u);
            adj_edge[v as usize].push(id as u32);
            bits[u as usize * words + v as usize / 64] |= 1 << (v % 64);
            bits[v as usize * words + u as usize / 64] |= 1 << (u % 64);
        }
        // Edges arrive in lexicographic order, so for u every larger
        // neighbour is pushed in order, but smaller neighbours interleave.
        for v in 0..n {
            let mut pairs: Vec<(u32, u32)> = adj[v]
                .iter()
                .copied()
                .zip(adj_edge[v].iter().copied())
                .collect();
            pairs.sort_unstable();
            adj[v] = pairs.iter().map(|p| p.0).collect();
            adj_edge[v] = pairs.iter().map(|p| p.1).collect();
        }
        Graph {
            n,
            words,
            edges,
            adj,
            adj_edge,
            bits,
        }
    }

    pub fn complete(n: usize) -> Self {
        let mut edges = Vec::with_capacity(n * n.saturating_sub(1) / 2);
        for u in 0..n as u32 {
            for v in u + 1..n as u32 {
                edges.push((u, v));
            }
        }
        Self::from_sorted_unique(n, edges)
    }

    pub fn cycle(n: usize) -> Self {
        assert!(n >= 3, "cycle needs at least 3 vertices");
        let edges = (0..n as u32).map(|i| ordered(i, (i + 1) % n as u32));
        Self::from_edges(n, edges).expect("cycle edges are valid")
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn m(&self) -> usize {
        self.edges.len()
    }

    #[inline]
    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    #[inline]
    pub fn edge(&self, id: usize) -> Edge {
        self.edges[id]
    }

    #[inline]
    pub fn neighbors(&self, v: u32) -> &[u32] {
        &self.adj[v as usize]
    }

    /// Edge ids aligned with [`Graph::neighbors`].
    #[inline]
    pub fn incident_edges(&self, v: u32) -> &[u32] {
        &self.adj_edge[v as usize]
    }

    #[inline]
    pub fn degree(&self, v: u32) -> usize {
        self.adj[v as usize].len()
    }

    #[inline]
    pub fn words(&self) -> usize {
        self.words
    }

    /// Neighbourhood of `v` as a bitset row of [`Graph::words`] words.
    #[inline]
    pub fn row(&self, v: u32) -> &[u64] {
        let s = v as usize * self.words;
        &self.bits[s..s + self.words]
    }

    #[inline]
    pub fn has_edge(&self, u: u32, v: u32) -> bool {
        (self.bits[u as usize * self.words + v as usize / 64] >> (v % 64)) & 1 == 1
    }

    pub fn edge_id(&self, u: u32, v: u32) -> Option<usize> {
        if u as usize >= self.n || v as usize >= self.n {
            return None;
        }
        let (a, b) = if self.adj[u as usize].len() <= self.adj[v as usize].len() {
            (u, v)
        } else {
            (v, u)
        };
        self.adj[a as usize]
            .binary_search(&b)
            .ok()
            .map(|i| self.adj_edge[a as usize][i] as usize)
    }

    pub fn codegree(&self, u: u32, v: u32) -> usize {
        self.row(u)
            .iter()
            .zip(self.row(v))
            .map(|(a, b)| (a & b).count_ones() as usize)
            .sum()
    }

    /// Common neighbours of `u` and `v` in increasing order.
    pub fn common_neighbors(&self, u: u32, v: u32) -> impl Iterator<Item = u32> + '_ {
        let (ru, rv) = (self.row(u), self.row(v));
        ru.iter()
            .zip(rv)
            .enumerate()
            .flat_map(|(w, (a, b))| BitIter::new(a & b, w as u32 * 64))
    }

    /// Writes the text format: `n m`, then one `u v` line per edge in sorted order.
    pub fn write_to<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "{} {}", self.n, self.m())?;
        for &(u, v) in &self.edges {
            writeln!(out, "{u} {v}")?;
        }
        Ok(())
    }

    /// Parses the text format. Lines starting with `#` are comments.
    pub fn read_from<R: BufRead>(input: R) -> Result<Self> {
        let mut header: Option<(usize, usize)> = None;
        let mut edges = Vec::new();
        for (idx, line) in input.lines().enumerate() {
            let line = line?;
            let lineno = idx + 1;
            let t = line.trim();
            if t.is_empty() || t.starts_with('#') {
                continue;
            }
            let mut it = t.split_whitespace();
            let a = it.next();
            let b = it.next();
            let (Some(a), Some(b), None) = (a, b, it.next()) else {
                return Err(FtdError::parse(lineno, "expected two integers"));
            };
            let a: u64 = a
                .parse()
                .map_err(|_| FtdError::parse(lineno, format!("bad integer `{a}`")))?;
            let b: u64 = b
                .parse()
                .map_err(|_| FtdError::parse(lineno, format!("bad integer `{b}`")))?;
            match header {
                None => header = Some((a as usize, b as usize)),
                Some((n, _)) => {
                    if a >= b {
                        return Err(FtdError::parse(lineno, "edge must satisfy u < v"));
                    }
                    if b as usize >= n {
                        return Err(FtdError::parse(
                            lineno,
                            format!("vertex {b} out of range for n = {n}"),
                        ));
                    }
                    edges.push((a as u32, b as u32));
                }
            }
        }
        let (n, m) = header.ok_or_else(|| FtdError::parse(0, "missing `n m` header"))?;
        if edges.len() != m {
            return Err(FtdError::parse(
                0,
                format!("header declares {m} edges, found {}", edges.len()),
            ));
        }
        Graph::from_edges(n, edges)
    }
}

/// Iterates set bits of one word, offset by `base`.
pub(crate) struct BitIter {
    word: u64,
    base: u32,
}

impl BitIter {
    #[inline]
    pub(crate) fn new(word: u64, base: u32) -> Self {
        BitIter { word, base }
    }
}

impl Iterator for BitIter {
    type Item = u32;
    #[inline]
    fn next(&mut self) -> Option<u32> {
        if self.word == 0 {
            return None;
        }
        let tz = self.word.trailing_zeros();
        self.word &= self.word - 1;
        Some(self.base + tz)
    }
}

/// Samples `G(n, p)`.
///
/// Pairs `(u, v)` with `u < v` are visited in lexicographic order and each is
/// kept when a uniform draw from `[0, 1)` of a ChaCha8 stream seeded with
/// `seed` is below `p`.
pub fn gen_gnp(n: usize, p: f64, seed: u64) -> Graph {
    assert!((0.0..=1.0).contains(&p), "p must lie in [0, 1]");
    let mut rng = rng_from_seed(seed);
    let mut edges = Vec::new();
    for u in 0..n as u32 {
        for v in u + 1..n as u32 {
            if rng.random::<f64>() < p {
                edges.push((u, v));
            }
        }
    }
    Graph::from_sorted_unique(n, edges)
}

/// One run of the random graph process `G_0 ⊆ G_1 ⊆ … ⊆ K_n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProcessTrace {
    pub n: usize,
    /// All `C(n, 2)` pairs in insertion order.
    pub order: Vec<Edge>,
    /// First step `i > 0` at which every edge of `G_i` lies in a triangle.
    pub tau: Option<usize>,
}

impl ProcessTrace {
    /// `G_i`: the first `i` edges of the order.
    pub fn graph_at(&self, i: usize) -> Graph {
        Graph::from_edges(self.n, self.order[..i].iter().copied())
            .expect("process order holds distinct valid pairs")
    }

    pub fn write_to<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "{}", self.n)?;
        for (i, &(u, v)) in self.order.iter().enumerate() {
            writeln!(out, "{} {u} {v}", i + 1)?;
        }
        match self.tau {
            Some(t) => writeln!(out, "tau {t}")?,
            None => writeln!(out, "tau none")?,
        }
        Ok(())
    }
}

/// Runs the random graph process on `n >= 3` vertices and records the hitting
/// time of "every edge lies in a triangle".
pub fn gen_process(n: usize, seed: u64) -> Result<ProcessTrace> {
    if n < 3 {
        return Err(FtdError::InvalidInput(format!(
            "random graph process needs n >= 3, got {n}"
        )));
    }
    let mut rng = rng_from_seed(seed);
    let mut order = Vec::with_capacity(n * (n - 1) / 2);
    for u in 0..n as u32 {
        for v in u + 1..n as u32 {
            order.push((u, v));
        }
    }
    order.shuffle(&mut rng);
    let tau = hitting_time(n, &order);
    Ok(ProcessTrace { n, order, tau })
}

/// Replays `order` and returns the first prefix length `i > 0` at which
/// no edge is outside every triangle.
///
/// Inserting `uv` creates one triangle per common neighbour `w`; only the
/// coverage counts of `uv`, `uw` and `vw` change, so each step costs
/// `O(n / 64 + codeg(u, v))`.
pub fn hitting_time(n: usize, order: &[Edge]) -> Option<usize> {
    let words = n.div_ceil(64).max(1);
    let mut bits = vec![0u64; n * words];
    let mut cover = vec![0u32; n * n];
    let mut uncovered = 0usize;
    for (i, &(u, v)) in order.iter().enumerate() {
        let (ui, vi) = (u as usize, v as usize);
        for wd in 0..words {
            let mut common = bits[ui * words + wd] & bits[vi * words + wd];
            while common != 0 {
                let w = (wd * 64) as u32 + common.trailing_zeros();
                common &= common - 1;
                for (a, b) in [(u, w), (v, w)] {
                    let (a, b) = ordered(a, b);
                    let c = &mut cover[a as usize * n + b as usize];
                    if *c == 0 {
                        uncovered -= 1;
                    }
                    *c += 1;
                }
                cover[ui * n + vi] += 1;
            }
        }
        if cover[ui * n + vi] == 0 {
            uncovered += 1;
        }
        bits[ui * words + vi / 64] |= 1 << (vi % 64);
        bits[vi * words + ui / 64] |= 1 << (ui % 64);
        if uncovered == 0 {
            return Some(i + 1);
        }
    }
    None
}

/// Degree and codegree concentration against `np` and `np²`.
#[derive(Debug, Clone, PartialEq)]
pub struct GraphStats {
    pub n: usize,
    pub m: usize,
    pub p: f64,
    pub min_degree: usize,
    pub max_degree: usize,
    pub min_codegree: usize,
    pub max_codegree: usize,
    /// `max_v |deg(v) − np| / np`.
    pub degree_deviation: f64,
    /// `max_{u≠v} |codeg(u,v) − np²| / np²`.
    pub codegree_deviation: f64,
    /// Every degree is within a factor `1 ± n^{-0.2}` of `np`.
    pub degrees_concentrated: bool,
    /// Every codegree is within a factor `1 ± n^{-0.1}` of `np²`.
    pub codegrees_concentrated: bool,
}

fn relative_deviation(lo: usize, hi: usize, mean: f64) -> f64 {
    let d = (lo as f64 - mean).abs().max((hi as f64 - mean).abs());
    if mean > 0.0 {
        d / mean
    } else if d == 0.0 {
        0.0
    } else {
        f64::INFINITY
    }
}

pub fn graph_stats(g: &Graph, p: f64) -> GraphStats {
    let n = g.n();
    let nf = n as f64;
    let (min_degree, max_degree) = (0..n as u32)
        .map(|v| g.degree(v))
        .fold((usize::MAX, 0), |(lo, hi), d| (lo.min(d), hi.max(d)));
    let (mut min_codegree, mut max_codegree) = (usize::MAX, 0usize);
    for u in 0..n as u32 {
        for v in u + 1..n as u32 {
            let c = g.codegree(u, v);
            min_codegree = min_codegree.min(c);
            max_codegree = max_codegree.max(c);
        }
    }
    let (min_degree, max_degree) = if n == 0 {
        (0, 0)
    } else {
        (min_degree, max_degree)
    };
    if n < 2 {
        min_codegree = 0;
    }
    let degree_deviation = relative_deviation(min_degree, max_degree, nf * p);
    let codegree_deviation = relative_deviation(min_codegree, max_codegree, nf * p * p);
    GraphStats {
        n,
        m: g.m(),
        p,
        min_degree,
        max_degree,
        min_codegree,
        max_codegree,
        degree_deviation,
        codegree_deviation,
        degrees_concentrated: degree_deviation <= nf.powf(-0.2),
        codegrees_concentrated: codegree_deviation <= nf.powf(-0.1),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gnp_extremes() {
        let g = gen_gnp(5, 0.0, 7);
        assert_eq!((g.n(), g.m()), (5, 0));
        assert_eq!(gen_gnp(5, 1.0, 7), Graph::complete(5));
    }

    #[test]
    fn gnp_is_deterministic() {
        assert_eq!(gen_gnp(80, 0.3, 11), gen_gnp(80, 0.3, 11));
        assert_ne!(gen_gnp(80, 0.3, 11), gen_gnp(80, 0.3, 12));
    }

    #[test]
    fn gnp_edge_count_within_five_sigma() {
        let pairs = 1000.0 * 999.0 / 2.0;
        let mean = pairs * 0.1;
        let sigma = (pairs * 0.1 * 0.9f64).sqrt();
        for seed in 0..3 {
            let m = gen_gnp(1000, 0.1, seed).m() as f64;
            assert!((m - mean).abs() <= 5.0 * sigma, "m = {m}");
        }
    }

    #[test]
    fn adjacency_matches_edges() {
        let g = gen_gnp(70, 0.2, 3);
        let mut deg_sum = 0;
        for v in 0..70u32 {
            deg_sum += g.degree(v);
            for (&w, &e) in g.neighbors(v).iter().zip(g.incident_edges(v)) {
                assert!(g.has_edge(v, w));
                assert_eq!(g.edge(e as usize), ordered(v, w));
            }
            assert!(g.neighbors(v).windows(2).all(|w| w[0] < w[1]));
        }
        assert_eq!(deg_sum, 2 * g.m());
        for (id, &(u, v)) in g.edges().iter().enumerate() {
            assert_eq!(g.edge_id(u, v), Some(id));
            assert_eq!(g.edge_id(v, u), Some(id));
        }
    }

    #[test]
    fn codegree_and_common_neighbors_agree() {
        let g = gen_gnp(130, 0.3, 5);
        for u in 0..20u32 {
            for v in 0..130u32 {
                let brute: Vec<u32> = (0..130u32)
                    .filter(|&w| g.has_edge(u, w) && g.has_edge(v, w))
                    .collect();
                assert_eq!(g.common_neighbors(u, v).collect::<Vec<_>>(), brute);
                assert_eq!(g.codegree(u, v), brute.len());
            }
        }
    }

    #[test]
    fn rejects_bad_edges() {
        assert!(Graph::from_edges(3, [(0, 0)]).is_err());
        assert!(Graph::from_edges(3, [(0, 3)]).is_err());
        assert!(Graph::from_edges(3, [(0, 1), (1, 0)]).is_err());
    }

    #[test]
    fn file_roundtrip_and_errors() {
        let g = gen_gnp(12, 0.4, 1);
        let mut buf = Vec::new();
        g.write_to(&mut buf).unwrap();
        let back = Graph::read_from(&buf[..]).unwrap();
        assert_eq!(g, back);

        let with_comment = "# a triangle\n3 3\n0 1\n# mid\n0 2\n1 2\n";
        assert_eq!(
            Graph::read_from(with_comment.as_bytes()).unwrap(),
            Graph::complete(3)
        );

        let err = Graph::read_from("3 1\n0 5\n".as_bytes()).unwrap_err();
        assert!(matches!(err, FtdError::Parse { line: 2, .. }), "{err}");
        let err = Graph::read_from("3 1\n2 1\n".as_bytes()).unwrap_err();
        assert!(matches!(err, FtdError::Parse { line: 2, .. }));
        assert!(Graph::read_from("3 2\n0 1\n".as_bytes()).is_err());
    }

    #[test]
    fn process_small_cases() {
        let t = gen_process(3, 99).unwrap();
        assert_eq!(t.tau, Some(3));
        assert_eq!(t.graph_at(3), Graph::complete(3));
        assert!(gen_process(2, 0).is_err());
    }

    #[test]
    fn process_is_deterministic() {
        let a = gen_process(100, 4).unwrap();
        let b = gen_process(100, 4).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.order.len(), 4950);
    }

    #[test]
    fn stats_on_extremes() {
        let s = graph_stats(&Graph::complete(9), 1.0);
        assert_eq!((s.min_degree, s.max_degree), (8, 8));
        assert_eq!((s.min_codegree, s.max_codegree), (7, 7));
        let s = graph_stats(&Graph::empty(6), 0.0);
        assert_eq!((s.max_degree, s.max_codegree), (0, 0));
        assert!(s.degrees_concentrated && s.codegrees_concentrated);
    }
}
