//! Triangle weightings and their vertex/edge discrepancy functionals.

use std::io::{BufRead, Write};

use crate::error::{FtdError, Result};
use crate::graph::Graph;
use crate::numeric::CompensatedSum;
use crate::triangles::TriangleIndex;

/// Real weight per triangle, aligned with [`TriangleIndex`] ids.
#[derive(Debug, Clone, PartialEq)]
pub struct Weighting {
    values: Vec<f64>,
}

impl Weighting {
    pub fn zeros(len: usize) -> Self {
        Weighting {
            values: vec![0.0; len],
        }
    }

    pub fn constant(len: usize, value: f64) -> Self {
        Weighting {
            values: vec![value; len],
        }
    }

    pub fn from_vec(values: Vec<f64>) -> Self {
        debug_assert!(values.iter().all(|x| x.is_finite()));
        Weighting { values }
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.values.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    #[inline]
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    #[inline]
    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.values
    }

    /// `a·self + b·other`.
    pub fn combine(&self, a: f64, other: &Weighting, b: f64) -> Weighting {
        assert_eq!(self.len(), other.len());
        Weighting::from_vec(
            self.values
                .iter()
                .zip(&other.values)
                .map(|(x, y)| a * x + b * y)
                .collect(),
        )
    }

    /// `max_T |self(T) − other(T)|`.
    pub fn max_abs_diff(&self, other: &Weighting) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .fold(0.0, |m, (x, y)| m.max((x - y).abs()))
    }

    pub fn total(&self) -> f64 {
        self.values
            .iter()
            .copied()
            .collect::<CompensatedSum>()
            .value()
    }

    /// `σ(e)`: total weight of triangles through edge id `e`.
    #[inline]
    pub fn edge_weight(&self, ti: &TriangleIndex, e: usize) -> f64 {
        ti.edge_triangles(e)
            .iter()
            .map(|&t| self.values[t as usize])
            .sum()
    }

    /// `σ(v)`: total weight of triangles through `v`.
    pub fn vertex_weight(&self, ti: &TriangleIndex, v: u32) -> f64 {
        ti.vertex_triangles(v)
            .iter()
            .map(|&t| self.values[t as usize])
            .collect::<CompensatedSum>()
            .value()
    }

    /// Writes `n t`, then `u v w value` per triangle with 17 significant digits.
    pub fn write_to<W: Write>(&self, ti: &TriangleIndex, mut out: W) -> Result<()> {
        if self.len() != ti.len() {
            return Err(FtdError::Mismatch(format!(
                "weighting has {} entries, index has {} triangles",
                self.len(),
                ti.len()
            )));
        }
        writeln!(out, "{} {}", ti.vertex_count(), ti.len())?;
        for (t, &[u, v, w]) in ti.triangles().iter().enumerate() {
            writeln!(out, "{u} {v} {w} {:.16e}", self.values[t])?;
        }
        Ok(())
    }

    /// Reads the weighting format and aligns it with `ti`; the file must list
    /// exactly the triangles of the index.
    pub fn read_from<R: BufRead>(ti: &TriangleIndex, input: R) -> Result<Self> {
        let mut header: Option<(usize, usize)> = None;
        let mut values = vec![f64::NAN; ti.len()];
        let mut seen = 0usize;
        for (idx, line) in input.lines().enumerate() {
            let line = line?;
            let lineno = idx + 1;
            let t = line.trim();
            if t.is_empty() || t.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = t.split_whitespace().collect();
            match header {
                None => {
                    let [n, count] = fields[..] else {
                        return Err(FtdError::parse(lineno, "expected `n t` header"));
                    };
                    let n: usize = n
                        .parse()
                        .map_err(|_| FtdError::parse(lineno, "bad vertex count"))?;
                    let count: usize = count
                        .parse()
                        .map_err(|_| FtdError::parse(lineno, "bad triangle count"))?;
                    if n != ti.vertex_count() || count != ti.len() {
                        return Err(FtdError::Mismatch(format!(
                            "weighting is for n = {n} with {count} triangles; graph has n = {} with {} triangles",
                            ti.vertex_count(),
                            ti.len()
                        )));
                    }
                    header = Some((n, count));
                }
                Some(_) => {
                    let [a, b, c, x] = fields[..] else {
                        return Err(FtdError::parse(lineno, "expected `u v w value`"));
                    };
                    let parse_v = |s: &str| {
                        s.parse::<u32>()
                            .map_err(|_| FtdError::parse(lineno, format!("bad vertex `{s}`")))
                    };
                    let (a, b, c) = (parse_v(a)?, parse_v(b)?, parse_v(c)?);
                    let x: f64 = x
                        .parse()
                        .map_err(|_| FtdError::parse(lineno, format!("bad value `{x}`")))?;
                    if !x.is_finite() {
                        return Err(FtdError::parse(lineno, "non-finite weight"));
                    }
                    let id = ti.id(a, b, c).ok_or_else(|| {
                        FtdError::parse(
                            lineno,
                            format!("{a} {b} {c} is not a triangle of the graph"),
                        )
                    })?;
                    if !values[id].is_nan() {
                        return Err(FtdError::parse(lineno, "duplicate triangle"));
                    }
                    values[id] = x;
                    seen += 1;
                }
            }
        }
        if header.is_none() {
            return Err(FtdError::parse(0, "missing `n t` header"));
        }
        if seen != ti.len() {
            return Err(FtdError::Mismatch(format!(
                "weighting lists {seen} of {} triangles",
                ti.len()
            )));
        }
        Ok(Weighting { values })
    }
}

/// Aggregate discrepancy measures of a weighting.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiscrepancyReport {
    /// `δ_∞ = max_e |σ(e) − 1|`.
    pub delta_inf: f64,
    /// `max_v |σ(v) − deg(v)/2|`.
    pub max_vertex_defect: f64,
    pub total_weight: f64,
    pub min_weight: f64,
    /// `Σ_e (σ(e) − 1)`.
    pub sum_edge_disc: f64,
}

/// Constant weighting `e(G) / (3·|T(G)|)`, whose total weight is `e(G)/3`.
pub fn uniform_weighting(g: &Graph, ti: &TriangleIndex) -> Result<Weighting> {
    if ti.is_empty() {
        if g.m() > 0 {
            return Err(FtdError::NoTriangles { edges: g.m() });
        }
        return Ok(Weighting::zeros(0));
    }
    Ok(Weighting::constant(
        ti.len(),
        g.m() as f64 / (3.0 * ti.len() as f64),
    ))
}

/// `δ(σ, v) = σ(v) − deg(v)/2`.
pub fn vertex_defect(g: &Graph, ti: &TriangleIndex, sigma: &Weighting, v: u32) -> f64 {
    sigma.vertex_weight(ti, v) - 0.5 * g.degree(v) as f64
}

pub fn vertex_defects(g: &Graph, ti: &TriangleIndex, sigma: &Weighting) -> Vec<f64> {
    (0..g.n() as u32)
        .map(|v| vertex_defect(g, ti, sigma, v))
        .collect()
}

/// `δ_e(σ) = σ(e) − 1` for the edge `{u, v}`.
pub fn edge_discrepancy(
    g: &Graph,
    ti: &TriangleIndex,
    sigma: &Weighting,
    u: u32,
    v: u32,
) -> Result<f64> {
    let e = g.edge_id(u, v).ok_or(FtdError::InvalidEdge(u, v))?;
    Ok(sigma.edge_weight(ti, e) - 1.0)
}

/// `δ_e(σ)` for every edge id.
pub fn edge_discrepancies(ti: &TriangleIndex, sigma: &Weighting) -> Vec<f64> {
    (0..ti.edge_count())
        .map(|e| sigma.edge_weight(ti, e) - 1.0)
        .collect()
}

pub fn report(g: &Graph, ti: &TriangleIndex, sigma: &Weighting) -> DiscrepancyReport {
    let mut delta_inf = 0.0f64;
    let mut sum_edge_disc = CompensatedSum::new();
    for e in 0..g.m() {
        let d = sigma.edge_weight(ti, e) - 1.0;
        delta_inf = delta_inf.max(d.abs());
        sum_edge_disc.add(d);
    }
    let max_vertex_defect = (0..g.n() as u32)
        .map(|v| vertex_defect(g, ti, sigma, v).abs())
        .fold(0.0, f64::max);
    let min_weight = sigma.values().iter().copied().fold(f64::INFINITY, f64::min);
    DiscrepancyReport {
        delta_inf,
        max_vertex_defect,
        total_weight: sigma.total(),
        min_weight: if sigma.is_empty() { 0.0 } else { min_weight },
        sum_edge_disc: sum_edge_disc.value(),
    }
}

/// `σ ≥ −tol`, `δ_∞(σ) ≤ tol`, and no edge outside every triangle.
pub fn is_ftd(g: &Graph, ti: &TriangleIndex, sigma: &Weighting, tol: f64) -> bool {
    if (0..g.m()).any(|e| ti.edge_triangles(e).is_empty()) {
        return false;
    }
    let r = report(g, ti, sigma);
    r.min_weight >= -tol && r.delta_inf <= tol
}
