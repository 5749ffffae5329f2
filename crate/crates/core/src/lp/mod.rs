//! FTD feasibility of `{Aρ = 1, ρ ≥ 0}` where `A` is the edge-triangle
//! incidence matrix, with witnesses and Farkas certificates.
//!
//! Small systems go straight to a dense phase-one simplex. Larger ones are
//! presolved (edges in a single triangle force it), then handled by a
//! max-entropy Newton method; infeasibility is certified by simplex on local
//! subsystems, whose Farkas vectors extend by zero to the whole graph.

mod newton;
mod simplex;

use std::collections::VecDeque;
use std::io::{BufRead, Write};

use num_rational::BigRational;
use num_traits::Signed;

use crate::error::{FtdError, Result};
use crate::graph::{ordered, Edge, Graph};
use crate::numeric::compensated_sum;
use crate::triangles::TriangleIndex;
use crate::weighting::Weighting;
use newton::{max_entropy, refine, NewtonOutcome, System};
use simplex::{phase_one, rational, Outcome, Scalar};

/// Largest vertex count accepted by [`decide_ftd_exact`].
pub const EXACT_MAX_N: usize = 12;

/// Farkas vector over edge ids.
#[derive(Debug, Clone, PartialEq)]
pub struct Certificate {
    pub y: Vec<f64>,
}

impl Certificate {
    /// `farkas n`, then one `u v y` line per nonzero entry.
    pub fn write_to<W: Write>(&self, g: &Graph, mut out: W) -> Result<()> {
        writeln!(out, "farkas {}", g.n())?;
        for (e, &y) in self.y.iter().enumerate() {
            if y != 0.0 {
                let (u, v) = g.edge(e);
                writeln!(out, "{u} {v} {y:.17e}")?;
            }
        }
        Ok(())
    }

    pub fn read_from<R: BufRead>(g: &Graph, input: R) -> Result<Self> {
        let mut lines = input.lines().enumerate();
        let (_, head) = lines
            .next()
            .ok_or_else(|| FtdError::parse(1, "empty certificate"))?;
        let head = head?;
        let n: usize = head
            .strip_prefix("farkas ")
            .and_then(|s| s.trim().parse().ok())
            .ok_or_else(|| FtdError::parse(1, "expected `farkas n`"))?;
        if n != g.n() {
            return Err(FtdError::Mismatch(format!(
                "certificate for {n} vertices, graph has {}",
                g.n()
            )));
        }
        let mut y = vec![0.0; g.m()];
        for (i, line) in lines {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let f: Vec<&str> = line.split_whitespace().collect();
            let bad = || FtdError::parse(i + 1, "expected `u v y`");
            if f.len() != 3 {
                return Err(bad());
            }
            let u: u32 = f[0].parse().map_err(|_| bad())?;
            let v: u32 = f[1].parse().map_err(|_| bad())?;
            let val: f64 = f[2].parse().map_err(|_| bad())?;
            let e = g.edge_id(u, v).ok_or(FtdError::InvalidEdge(u, v))?;
            y[e] = val;
        }
        Ok(Certificate { y })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum FeasibilityResult {
    Feasible(Weighting),
    Infeasible(Certificate),
    Uncovered(Edge),
    Inconclusive(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Decision {
    Feasible,
    Infeasible,
    Uncovered,
    Inconclusive,
}

impl std::fmt::Display for Decision {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Decision::Feasible => "FEASIBLE",
            Decision::Infeasible => "INFEASIBLE",
            Decision::Uncovered => "UNCOVERED",
            Decision::Inconclusive => "INCONCLUSIVE",
        })
    }
}

impl FeasibilityResult {
    pub fn decision(&self) -> Decision {
        match self {
            FeasibilityResult::Feasible(_) => Decision::Feasible,
            FeasibilityResult::Infeasible(_) => Decision::Infeasible,
            FeasibilityResult::Uncovered(_) => Decision::Uncovered,
            FeasibilityResult::Inconclusive(_) => Decision::Inconclusive,
        }
    }

    /// Whether an FTD exists. Undecided results count as neither.
    pub fn admits_ftd(&self) -> Option<bool> {
        match self {
            FeasibilityResult::Feasible(_) => Some(true),
            FeasibilityResult::Infeasible(_) | FeasibilityResult::Uncovered(_) => Some(false),
            FeasibilityResult::Inconclusive(_) => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpOptions {
    /// Report an uncovered edge without solving.
    pub uncovered_fast_path: bool,
    /// Systems with at most this many tableau entries skip Newton.
    pub direct_limit: usize,
    /// Upper bound on tableau entries for any dense solve.
    pub dense_limit: usize,
    pub newton_iters: usize,
    pub max_pivots: usize,
}

impl Default for LpOptions {
    fn default() -> Self {
        LpOptions {
            uncovered_fast_path: true,
            direct_limit: 50_000,
            dense_limit: 4_000_000,
            newton_iters: 200,
            max_pivots: 200_000,
        }
    }
}

pub fn decide_ftd(g: &Graph, ti: &TriangleIndex) -> FeasibilityResult {
    decide_ftd_with(g, ti, &LpOptions::default())
}

fn columns(ti: &TriangleIndex) -> Vec<[u32; 3]> {
    (0..ti.len()).map(|t| ti.triangle_edges(t)).collect()
}

pub fn decide_ftd_with(g: &Graph, ti: &TriangleIndex, opts: &LpOptions) -> FeasibilityResult {
    if !ti.matches(g) {
        return FeasibilityResult::Inconclusive("triangle index does not match graph".into());
    }
    let m = g.m();
    if m == 0 {
        return FeasibilityResult::Feasible(Weighting::zeros(ti.len()));
    }
    let cols = columns(ti);
    if let Some(&e) = ti.uncovered_edge_ids().first() {
        if opts.uncovered_fast_path {
            return FeasibilityResult::Uncovered(g.edge(e));
        }
        return certify_or(ti, &cols, &[e], opts, || {
            format!("edge {:?} is uncovered", g.edge(e))
        });
    }
    let full = m * (cols.len() + m);
    if full <= opts.direct_limit {
        return dense_full(ti, &cols, opts);
    }

    let pre = presolve(m, ti, &cols);
    if let Some(e) = pre.empty {
        let reasons = pre.reasons(ti, e);
        if let Some(c) = local_certificate_on(ti, &cols, &reasons, opts) {
            return FeasibilityResult::Infeasible(c);
        }
        return certify_or(ti, &cols, &[e], opts, || {
            format!(
                "presolve emptied edge {:?} but no local certificate was found",
                g.edge(e)
            )
        });
    }
    let mut rows_map = vec![u32::MAX; m];
    let mut rows = 0u32;
    for e in 0..m {
        if !pre.done[e] {
            rows_map[e] = rows;
            rows += 1;
        }
    }
    let alive: Vec<usize> = (0..cols.len())
        .filter(|&t| pre.fixed[t].is_none())
        .collect();
    let sub_cols: Vec<[u32; 3]> = alive
        .iter()
        .map(|&t| cols[t].map(|e| rows_map[e as usize]))
        .collect();
    let assemble = |x: &[f64]| -> Vec<f64> {
        let mut w: Vec<f64> = pre
            .fixed
            .iter()
            .map(|f| if *f == Some(true) { 1.0 } else { 0.0 })
            .collect();
        for (&t, &v) in alive.iter().zip(x) {
            w[t] = v;
        }
        w
    };
    if rows == 0 {
        return witness(ti, &cols, assemble(&[]));
    }
    let sys = System {
        rows: rows as usize,
        cols: &sub_cols,
    };
    let mut seeds: Vec<usize> = Vec::new();
    match max_entropy(&sys, 1e-11, opts.newton_iters) {
        NewtonOutcome::Converged(x) => {
            let r = witness(ti, &cols, assemble(&x));
            if r.decision() == Decision::Feasible {
                return r;
            }
        }
        NewtonOutcome::Stuck {
            x,
            lambda,
            residual,
        } => {
            if residual < 1e-6 {
                if let Some(xr) = refine(&sys, &x) {
                    let r = witness(ti, &cols, assemble(&xr));
                    if r.decision() == Decision::Feasible {
                        return r;
                    }
                }
            }
            seeds = top_rows(&lambda, &rows_map);
        }
        NewtonOutcome::Infeasible(lambda) => {
            seeds = top_rows(&lambda, &rows_map);
        }
    }
    if !seeds.is_empty() {
        if let Some(c) = local_certificate(ti, &cols, &seeds, opts) {
            return FeasibilityResult::Infeasible(c);
        }
    }
    if full <= opts.dense_limit {
        return dense_full(ti, &cols, opts);
    }
    FeasibilityResult::Inconclusive(format!(
        "no witness or certificate found ({m} edges, {} triangles)",
        cols.len()
    ))
}

/// Original edge ids ordered by decreasing dual value.
fn top_rows(lambda: &[f64], rows_map: &[u32]) -> Vec<usize> {
    let mut ids: Vec<usize> = (0..rows_map.len())
        .filter(|&e| rows_map[e] != u32::MAX)
        .collect();
    ids.sort_by(|&a, &b| {
        lambda[rows_map[b] as usize]
            .total_cmp(&lambda[rows_map[a] as usize])
            .then(a.cmp(&b))
    });
    ids
}

fn certify_or(
    ti: &TriangleIndex,
    cols: &[[u32; 3]],
    seeds: &[usize],
    opts: &LpOptions,
    msg: impl FnOnce() -> String,
) -> FeasibilityResult {
    match local_certificate(ti, cols, seeds, opts) {
        Some(c) => FeasibilityResult::Infeasible(c),
        None if ti.edge_count() * (cols.len() + ti.edge_count()) <= opts.dense_limit => {
            dense_full(ti, cols, opts)
        }
        None => FeasibilityResult::Inconclusive(msg()),
    }
}

struct Presolved {
    /// `Some(true)` forced to 1, `Some(false)` forced to 0.
    fixed: Vec<Option<bool>>,
    /// Edges already covered by a forced triangle.
    done: Vec<bool>,
    empty: Option<usize>,
    /// Edge whose single live triangle forced `t`.
    forced_by: Vec<u32>,
    /// Forced triangle covering a done edge.
    done_by: Vec<u32>,
    /// Done edge whose forced triangle killed `t`.
    killed_by: Vec<u32>,
}

impl Presolved {
    /// Edges whose rows alone reproduce the deductions that emptied `e`.
    fn reasons(&self, ti: &TriangleIndex, e: usize) -> Vec<usize> {
        let mut keep = vec![false; self.done.len()];
        let mut expanded = vec![false; self.done.len()];
        let mut stack = vec![e];
        keep[e] = true;
        while let Some(x) = stack.pop() {
            if std::mem::replace(&mut expanded[x], true) {
                continue;
            }
            for &s in ti.edge_triangles(x) {
                if self.fixed[s as usize] != Some(false) {
                    continue;
                }
                let f = self.killed_by[s as usize] as usize;
                keep[f] = true;
                let g = self.forced_by[self.done_by[f] as usize] as usize;
                keep[g] = true;
                stack.push(g);
            }
        }
        (0..keep.len()).filter(|&i| keep[i]).collect()
    }
}

fn presolve(m: usize, ti: &TriangleIndex, cols: &[[u32; 3]]) -> Presolved {
    let mut p = Presolved {
        fixed: vec![None; cols.len()],
        done: vec![false; m],
        empty: None,
        forced_by: vec![u32::MAX; cols.len()],
        done_by: vec![u32::MAX; m],
        killed_by: vec![u32::MAX; cols.len()],
    };
    let mut count: Vec<usize> = (0..m).map(|e| ti.edge_triangles(e).len()).collect();
    let mut queue: VecDeque<usize> = (0..m).filter(|&e| count[e] <= 1).collect();
    while let Some(e) = queue.pop_front() {
        if p.done[e] {
            continue;
        }
        if count[e] == 0 {
            p.empty = Some(e);
            return p;
        }
        if count[e] > 1 {
            continue;
        }
        let t = ti
            .edge_triangles(e)
            .iter()
            .map(|&t| t as usize)
            .find(|&t| p.fixed[t].is_none())
            .expect("one live triangle");
        p.fixed[t] = Some(true);
        p.forced_by[t] = e as u32;
        for &f in &cols[t] {
            p.done[f as usize] = true;
            p.done_by[f as usize] = t as u32;
        }
        for &f in &cols[t] {
            for &s in ti.edge_triangles(f as usize) {
                let s = s as usize;
                if p.fixed[s].is_some() {
                    continue;
                }
                p.fixed[s] = Some(false);
                p.killed_by[s] = f;
                for &h in &cols[s] {
                    let h = h as usize;
                    count[h] -= 1;
                    if !p.done[h] && count[h] <= 1 {
                        queue.push_back(h);
                    }
                }
            }
        }
    }
    p
}

/// Accept `x` after clamping round-off negatives and one refinement pass.
fn witness(ti: &TriangleIndex, cols: &[[u32; 3]], mut x: Vec<f64>) -> FeasibilityResult {
    let m = ti.edge_count();
    for v in x.iter_mut() {
        if *v < 0.0 && *v > -1e-9 {
            *v = 0.0;
        }
    }
    let residual = |x: &[f64]| {
        let mut sums = vec![0.0; m];
        for (v, c) in x.iter().zip(cols) {
            for &e in c {
                sums[e as usize] += v;
            }
        }
        sums.iter().fold(0.0f64, |a, s| a.max((s - 1.0).abs()))
    };
    let sys = System { rows: m, cols };
    if let Some(xr) = refine(&sys, &x) {
        if residual(&xr) <= residual(&x) {
            x = xr;
        }
    }
    let res = residual(&x);
    if res <= 1e-9 && x.iter().all(|&v| v >= 0.0) {
        FeasibilityResult::Feasible(Weighting::from_vec(x))
    } else {
        FeasibilityResult::Inconclusive(format!("witness residual {res:.3e} after refinement"))
    }
}

fn dense_full(ti: &TriangleIndex, cols: &[[u32; 3]], opts: &LpOptions) -> FeasibilityResult {
    let m = ti.edge_count();
    let lists: Vec<Vec<u32>> = cols.iter().map(|c| c.to_vec()).collect();
    match phase_one::<f64>(m, &lists, opts.max_pivots) {
        Outcome::Feasible(x) => witness(ti, cols, x),
        Outcome::Infeasible(y) => match finish_certificate(ti, y) {
            Some(c) => FeasibilityResult::Infeasible(c),
            None => FeasibilityResult::Inconclusive("Farkas vector failed its check".into()),
        },
        Outcome::PivotLimit => FeasibilityResult::Inconclusive("pivot limit reached".into()),
    }
}

/// Grow edge sets around `seeds` and solve each local relaxation densely.
fn local_certificate(
    ti: &TriangleIndex,
    cols: &[[u32; 3]],
    seeds: &[usize],
    opts: &LpOptions,
) -> Option<Certificate> {
    let m = ti.edge_count();
    let mut tried: Vec<Vec<usize>> = Vec::new();
    let mut candidates: Vec<Vec<usize>> = Vec::new();
    for r in 0..=4 {
        candidates.push(ball(ti, cols, &seeds[..1], r));
    }
    let mut k = 8;
    while k < seeds.len().min(4096) * 2 {
        let top = &seeds[..k.min(seeds.len())];
        candidates.push(top.to_vec());
        candidates.push(ball(ti, cols, top, 1));
        k *= 4;
    }
    for set in candidates {
        if set.len() == m || tried.contains(&set) {
            continue;
        }
        if let Some(c) = local_certificate_on(ti, cols, &set, opts) {
            return Some(c);
        }
        tried.push(set);
    }
    None
}

/// Dense phase one on the rows in `set` (sorted edge ids).
fn local_certificate_on(
    ti: &TriangleIndex,
    cols: &[[u32; 3]],
    set: &[usize],
    opts: &LpOptions,
) -> Option<Certificate> {
    let m = ti.edge_count();
    let mut local = vec![u32::MAX; m];
    for (i, &e) in set.iter().enumerate() {
        local[e] = i as u32;
    }
    let mut touched = vec![false; cols.len()];
    let mut lists = Vec::new();
    for &e in set {
        for &t in ti.edge_triangles(e) {
            if !std::mem::replace(&mut touched[t as usize], true) {
                let c: Vec<u32> = cols[t as usize]
                    .iter()
                    .filter(|&&f| local[f as usize] != u32::MAX)
                    .map(|&f| local[f as usize])
                    .collect();
                lists.push(c);
            }
        }
    }
    if set.len() * (lists.len() + set.len()) > opts.dense_limit {
        return None;
    }
    if let Outcome::Infeasible(y) = phase_one::<f64>(set.len(), &lists, opts.max_pivots) {
        let mut full = vec![0.0; m];
        for (&e, v) in set.iter().zip(y) {
            full[e] = v;
        }
        return finish_certificate(ti, full);
    }
    None
}

/// Edges within `r` triangle steps of `seeds`, sorted.
fn ball(ti: &TriangleIndex, cols: &[[u32; 3]], seeds: &[usize], r: usize) -> Vec<usize> {
    let mut seen = vec![false; ti.edge_count()];
    let mut frontier: Vec<usize> = seeds.to_vec();
    for &e in seeds {
        seen[e] = true;
    }
    for _ in 0..r {
        let mut next = Vec::new();
        for &e in &frontier {
            for &t in ti.edge_triangles(e) {
                for &f in &cols[t as usize] {
                    if !std::mem::replace(&mut seen[f as usize], true) {
                        next.push(f as usize);
                    }
                }
            }
        }
        frontier = next;
    }
    (0..seen.len()).filter(|&e| seen[e]).collect()
}

fn column_sums<'a>(ti: &'a TriangleIndex, y: &'a [f64]) -> impl Iterator<Item = f64> + 'a {
    (0..ti.len()).map(move |t| compensated_sum(ti.triangle_edges(t).iter().map(|&e| y[e as usize])))
}

/// Normalise to `Σy = 1`, push every column sum to at most zero by shifting
/// the support down, then rescale so `Σy ≥ 1`.
fn finish_certificate(ti: &TriangleIndex, mut y: Vec<f64>) -> Option<Certificate> {
    let s = compensated_sum(y.iter().copied());
    if !(s > 0.0) || y.iter().any(|v| !v.is_finite()) {
        return None;
    }
    y.iter_mut().for_each(|v| *v /= s);
    let worst = column_sums(ti, &y).fold(0.0f64, f64::max);
    if worst > 0.0 {
        let shift = worst * (1.0 + 1e-6);
        y.iter_mut()
            .filter(|v| **v != 0.0)
            .for_each(|v| *v -= shift);
    }
    for _ in 0..4 {
        let s = compensated_sum(y.iter().copied());
        if !(s > 0.0) {
            return None;
        }
        if s >= 1.0 {
            break;
        }
        let scale = (1.0 / s) * (1.0 + 4.0 * f64::EPSILON);
        y.iter_mut().for_each(|v| *v *= scale);
    }
    let c = Certificate { y };
    farkas_holds(ti, &c).then_some(c)
}

fn farkas_holds(ti: &TriangleIndex, c: &Certificate) -> bool {
    c.y.len() == ti.edge_count()
        && c.y.iter().all(|v| v.is_finite())
        && compensated_sum(c.y.iter().copied()) >= 1.0
        && column_sums(ti, &c.y).all(|s| s <= 1e-12)
}

/// Re-checks a result against the graph alone.
pub fn verify_certificate(g: &Graph, ti: &TriangleIndex, result: &FeasibilityResult) -> bool {
    if !ti.matches(g) {
        return false;
    }
    match result {
        FeasibilityResult::Feasible(w) => {
            w.len() == ti.len()
                && w.values().iter().all(|&v| v.is_finite() && v >= -1e-9)
                && (0..g.m()).all(|e| (w.edge_weight(ti, e) - 1.0).abs() <= 1e-9)
        }
        FeasibilityResult::Infeasible(c) => farkas_holds(ti, c),
        FeasibilityResult::Uncovered((u, v)) => g
            .edge_id(*u, *v)
            .is_some_and(|e| ti.edge_triangles(e).is_empty() && (*u, *v) == ordered(*u, *v)),
        FeasibilityResult::Inconclusive(_) => false,
    }
}

/// Rational-arithmetic decision for graphs with at most [`EXACT_MAX_N`]
/// vertices. Returned vectors are rounded from exact values that were
/// checked exactly.
pub fn decide_ftd_exact(
    g: &Graph,
    ti: &TriangleIndex,
    uncovered_fast_path: bool,
) -> Result<FeasibilityResult> {
    if g.n() > EXACT_MAX_N {
        return Err(FtdError::SizeLimit {
            free: g.n(),
            limit: EXACT_MAX_N,
        });
    }
    if !ti.matches(g) {
        return Err(FtdError::Mismatch(
            "triangle index does not match graph".into(),
        ));
    }
    let m = g.m();
    if m == 0 {
        return Ok(FeasibilityResult::Feasible(Weighting::zeros(ti.len())));
    }
    if uncovered_fast_path {
        if let Some(&e) = ti.uncovered_edge_ids().first() {
            return Ok(FeasibilityResult::Uncovered(g.edge(e)));
        }
    }
    let cols = columns(ti);
    let lists: Vec<Vec<u32>> = cols.iter().map(|c| c.to_vec()).collect();
    match phase_one::<BigRational>(m, &lists, usize::MAX) {
        Outcome::Feasible(x) => {
            let mut sums = vec![rational(0); m];
            for (v, c) in x.iter().zip(&cols) {
                for &e in c {
                    sums[e as usize] += v;
                }
            }
            if x.iter().any(|v| v.is_negative()) || sums.iter().any(|s| *s != rational(1)) {
                return Err(FtdError::Backend("exact witness failed its check".into()));
            }
            Ok(FeasibilityResult::Feasible(Weighting::from_vec(
                x.iter().map(Scalar::to_f64).collect(),
            )))
        }
        Outcome::Infeasible(y) => {
            let s: BigRational = y.iter().sum();
            if !s.is_positive() {
                return Err(FtdError::Backend(
                    "exact Farkas vector has nonpositive sum".into(),
                ));
            }
            let y: Vec<BigRational> = y.into_iter().map(|v| v / &s).collect();
            for c in &cols {
                let col = c.iter().fold(rational(0), |a, &e| a + &y[e as usize]);
                if col.is_positive() {
                    return Err(FtdError::Backend(
                        "exact Farkas vector failed its check".into(),
                    ));
                }
            }
            let yf = y.iter().map(Scalar::to_f64).collect();
            finish_certificate(ti, yf)
                .map(FeasibilityResult::Infeasible)
                .ok_or_else(|| FtdError::Backend("rounded Farkas vector failed its check".into()))
        }
        Outcome::PivotLimit => unreachable!("no pivot limit in exact mode"),
    }
}
