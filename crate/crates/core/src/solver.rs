//! The three-stage construction: uniform weighting, bowtie vertex balancing,
//! then repeated edge correction until every edge sums to one.

use std::io::Write;
use std::time::{Duration, Instant};

use crate::error::{FtdError, GadgetWitness, Result};
use crate::gadgets::bowtie::{bowtie_balance, bowtie_counts};
use crate::gadgets::naive::naive_adjust;
use crate::gadgets::pinwheel::{pinwheel_counts, PinwheelOperator};
use crate::graph::{Edge, Graph};
use crate::triangles::TriangleIndex;
use crate::weighting::{
    edge_discrepancies, report, uniform_weighting, DiscrepancyReport, Weighting,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Operator {
    /// Wheel gadgets `W_{2k}`.
    Pinwheel,
    /// Spread each edge discrepancy over its triangles.
    Naive,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveOptions {
    pub k: usize,
    pub eps_stop: f64,
    pub eps_neg: f64,
    pub max_iters: usize,
    pub operator: Operator,
    pub record_trajectory: bool,
    /// Also log the neighbourhood discrepancy sum per iteration.
    pub record_neighbourhood: bool,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            k: 4,
            eps_stop: 1e-9,
            eps_neg: 1e-9,
            max_iters: 200,
            operator: Operator::Pinwheel,
            record_trajectory: true,
            record_neighbourhood: false,
        }
    }
}

impl SolveOptions {
    fn validate(&self) -> Result<()> {
        if !(self.eps_stop > 0.0) || !(self.eps_neg >= 0.0) || self.max_iters == 0 || self.k < 2 {
            return Err(FtdError::InvalidInput(format!(
                "bad solver options {self:?}"
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveStatus {
    FtdFound,
    Stalled,
    GadgetMissing(GadgetWitness),
    UncoveredEdge(Edge),
    MaxIters,
    /// Edge sums converged but some weight is below `−eps_neg`.
    NegativeWeight,
}

impl std::fmt::Display for SolveStatus {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SolveStatus::FtdFound => write!(f, "FTD_FOUND"),
            SolveStatus::Stalled => write!(f, "STALLED"),
            SolveStatus::GadgetMissing(w) => write!(f, "GADGET_MISSING({w})"),
            SolveStatus::UncoveredEdge((u, v)) => write!(f, "UNCOVERED_EDGE({u},{v})"),
            SolveStatus::MaxIters => write!(f, "MAX_ITERS"),
            SolveStatus::NegativeWeight => write!(f, "NEGATIVE_WEIGHT"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectoryPoint {
    /// 0 is the balanced weighting entering the correction loop.
    pub iter: usize,
    pub delta_inf: f64,
    pub min_weight: f64,
    pub max_vertex_defect: f64,
    pub total_weight: f64,
    /// `‖φ_t − φ_{t−1}‖_∞`, zero at `iter = 0`.
    pub step: f64,
    /// `max_{u ≠ v} |Σ_{z ∈ N(u) ∩ N(v)} δ_{uz}|` when requested.
    pub neighbourhood: Option<f64>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct StageTimings {
    pub uniform: Duration,
    pub balance: Duration,
    pub setup: Duration,
    pub iterate: Duration,
    pub total: Duration,
}

#[derive(Debug, Clone)]
pub struct SolveReport {
    pub status: SolveStatus,
    pub weighting: Weighting,
    /// After the uniform stage, if it ran.
    pub uniform: Option<DiscrepancyReport>,
    /// After balancing (or the uniform stage if balancing was skipped).
    pub balanced: Option<DiscrepancyReport>,
    pub balance_applied: bool,
    pub trajectory: Vec<TrajectoryPoint>,
    pub iterations: usize,
    pub final_report: Option<DiscrepancyReport>,
    pub timings: StageTimings,
}

impl SolveReport {
    pub fn is_ftd(&self) -> bool {
        self.status == SolveStatus::FtdFound
    }

    /// CSV with columns `iter,delta_inf,min_weight,max_vertex_defect,total_weight`.
    pub fn write_trajectory_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record([
            "iter",
            "delta_inf",
            "min_weight",
            "max_vertex_defect",
            "total_weight",
        ])?;
        for p in &self.trajectory {
            w.write_record([
                p.iter.to_string(),
                format!("{:.16e}", p.delta_inf),
                format!("{:.16e}", p.min_weight),
                format!("{:.16e}", p.max_vertex_defect),
                format!("{:.16e}", p.total_weight),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// `max_{u ≠ v} |Σ_{z ∈ N(u) ∩ N(v)} δ_{uz}|` over ordered pairs.
pub fn neighbourhood_discrepancy(g: &Graph, ti: &TriangleIndex, sigma: &Weighting) -> f64 {
    let d = edge_discrepancies(ti, sigma);
    let mut worst = 0.0f64;
    for u in 0..g.n() as u32 {
        for v in 0..g.n() as u32 {
            if u == v {
                continue;
            }
            let s: f64 = g
                .common_neighbors(u, v)
                .map(|z| d[g.edge_id(u, z).expect("edge")])
                .sum();
            worst = worst.max(s.abs());
        }
    }
    worst
}

fn point(
    g: &Graph,
    ti: &TriangleIndex,
    iter: usize,
    sigma: &Weighting,
    prev: Option<&Weighting>,
    opts: &SolveOptions,
) -> (TrajectoryPoint, DiscrepancyReport) {
    let r = report(g, ti, sigma);
    let p = TrajectoryPoint {
        iter,
        delta_inf: r.delta_inf,
        min_weight: r.min_weight,
        max_vertex_defect: r.max_vertex_defect,
        total_weight: r.total_weight,
        step: prev.map_or(0.0, |q| sigma.max_abs_diff(q)),
        neighbourhood: opts
            .record_neighbourhood
            .then(|| neighbourhood_discrepancy(g, ti, sigma)),
    };
    (p, r)
}

/// Stops when `δ_∞ ≤ eps_stop`, after `max_iters`, or when `δ_∞` has not
/// dropped by 1% over the last 10 iterations.
pub fn solve(g: &Graph, opts: &SolveOptions) -> Result<SolveReport> {
    opts.validate()?;
    let start = Instant::now();
    let ti = TriangleIndex::build(g);
    let mut rep = SolveReport {
        status: SolveStatus::MaxIters,
        weighting: Weighting::zeros(0),
        uniform: None,
        balanced: None,
        balance_applied: false,
        trajectory: Vec::new(),
        iterations: 0,
        final_report: None,
        timings: StageTimings::default(),
    };
    if let Some(&e) = ti.uncovered_edge_ids().first() {
        rep.status = SolveStatus::UncoveredEdge(g.edge(e));
        rep.timings.total = start.elapsed();
        return Ok(rep);
    }

    let t = Instant::now();
    let mut sigma = uniform_weighting(g, &ti)?;
    let r0 = report(g, &ti, &sigma);
    rep.uniform = Some(r0);
    rep.timings.uniform = t.elapsed();

    let t = Instant::now();
    if r0.max_vertex_defect > opts.eps_stop {
        match bowtie_balance(g, &ti, &sigma) {
            Ok(s) => {
                sigma = s;
                rep.balance_applied = true;
            }
            Err(FtdError::GadgetMissing(w)) => {
                rep.status = SolveStatus::GadgetMissing(w);
                rep.weighting = sigma;
                rep.timings.balance = t.elapsed();
                rep.timings.total = start.elapsed();
                return Ok(rep);
            }
            Err(e) => return Err(e),
        }
    }
    rep.timings.balance = t.elapsed();

    let (p0, mut r) = point(g, &ti, 0, &sigma, None, opts);
    rep.balanced = Some(r);
    if opts.record_trajectory {
        rep.trajectory.push(p0);
    }
    let mut history = vec![r.delta_inf];

    let mut op = None;
    if r.delta_inf > opts.eps_stop && opts.operator == Operator::Pinwheel {
        let t = Instant::now();
        match PinwheelOperator::build(g, &ti, opts.k) {
            Ok(o) => op = Some(o),
            Err(FtdError::GadgetMissing(w)) => {
                rep.status = SolveStatus::GadgetMissing(w);
                rep.weighting = sigma;
                rep.final_report = Some(r);
                rep.timings.setup = t.elapsed();
                rep.timings.total = start.elapsed();
                return Ok(rep);
            }
            Err(e) => return Err(e),
        }
        rep.timings.setup = t.elapsed();
    }

    let t = Instant::now();
    let mut status = None;
    while r.delta_inf > opts.eps_stop {
        if rep.iterations >= opts.max_iters {
            status = Some(SolveStatus::MaxIters);
            break;
        }
        let next = match &op {
            Some(o) => o.apply(&ti, &sigma)?,
            None => match naive_adjust(g, &ti, &sigma) {
                Ok(s) => s,
                Err(FtdError::GadgetMissing(w)) => {
                    status = Some(SolveStatus::GadgetMissing(w));
                    break;
                }
                Err(e) => return Err(e),
            },
        };
        rep.iterations += 1;
        let (p, rr) = point(g, &ti, rep.iterations, &next, Some(&sigma), opts);
        sigma = next;
        r = rr;
        if opts.record_trajectory {
            rep.trajectory.push(p);
        }
        history.push(r.delta_inf);
        let t_now = history.len() - 1;
        if !r.delta_inf.is_finite()
            || (t_now >= 10
                && r.delta_inf > opts.eps_stop
                && r.delta_inf > 0.99 * history[t_now - 10])
        {
            status = Some(SolveStatus::Stalled);
            break;
        }
    }
    rep.timings.iterate = t.elapsed();
    rep.status = status.unwrap_or(if r.min_weight >= -opts.eps_neg {
        SolveStatus::FtdFound
    } else {
        SolveStatus::NegativeWeight
    });
    rep.final_report = Some(r);
    rep.weighting = sigma;
    rep.timings.total = start.elapsed();
    Ok(rep)
}

/// Gadget counts against their expected orders `n⁵p¹⁰` and `2n⁷p¹⁵`.
#[derive(Debug, Clone, PartialEq)]
pub struct StageDiagnostics {
    pub n: usize,
    pub p: f64,
    pub k: usize,
    pub bowtie_min: u64,
    pub bowtie_max: u64,
    pub bowtie_expected: f64,
    pub bowtie_deviation: f64,
    pub pinwheel_min: u64,
    pub pinwheel_max: u64,
    pub pinwheel_expected: f64,
    pub pinwheel_deviation: f64,
}

fn deviation(lo: u64, hi: u64, mean: f64) -> f64 {
    if mean == 0.0 {
        return if hi == 0 { 0.0 } else { f64::INFINITY };
    }
    ((lo as f64 - mean).abs().max((hi as f64 - mean).abs())) / mean
}

/// Min and max of `|ℬ_{u,v}|` over ordered pairs and `|𝒮(e)|` over edges.
/// The expected values use the `W_8` exponents regardless of `k`.
pub fn stage_diagnostics(g: &Graph, p: f64, k: usize) -> Result<StageDiagnostics> {
    let n = g.n();
    let nf = n as f64;
    let b = bowtie_counts(g);
    let (mut bmin, mut bmax) = (u64::MAX, 0);
    for u in 0..n {
        for v in 0..n {
            if u != v {
                bmin = bmin.min(b[u * n + v]);
                bmax = bmax.max(b[u * n + v]);
            }
        }
    }
    if n < 2 {
        bmin = 0;
    }
    let s = pinwheel_counts(g, k)?;
    let pmin = s.iter().copied().min().unwrap_or(0);
    let pmax = s.iter().copied().max().unwrap_or(0);
    let be = nf.powi(5) * p.powi(10);
    let pe = 2.0 * nf.powi(7) * p.powi(15);
    Ok(StageDiagnostics {
        n,
        p,
        k,
        bowtie_min: bmin,
        bowtie_max: bmax,
        bowtie_expected: be,
        bowtie_deviation: deviation(bmin, bmax, be),
        pinwheel_min: pmin,
        pinwheel_max: pmax,
        pinwheel_expected: pe,
        pinwheel_deviation: deviation(pmin, pmax, pe),
    })
}
