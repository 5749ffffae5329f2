//! Random-graph experiments: threshold scans around `p_Δ`, hitting-time
//! trials on the random graph process, solver convergence profiles, plots.

use std::io::{Read, Write};
use std::path::Path;
use std::time::Instant;

use plotters::prelude::*;
use rayon::prelude::*;

use crate::error::{FtdError, Result};
use crate::graph::{gen_gnp, gen_process};
use crate::lp::{decide_ftd, Decision};
use crate::rng::trial_seed;
use crate::solver::{solve, SolveOptions, SolveStatus, TrajectoryPoint};
use crate::triangles::TriangleIndex;

/// Largest triangle count the oracle is asked to handle.
pub const ORACLE_CAPACITY: usize = 50_000;

/// `√(3 ln n / (2n))`.
pub fn p_delta(n: usize) -> f64 {
    let n = n as f64;
    (3.0 * n.ln() / (2.0 * n)).sqrt()
}

/// `C(n,3)·p³`.
pub fn expected_triangles(n: usize, p: f64) -> f64 {
    let n = n as f64;
    n * (n - 1.0) * (n - 2.0) / 6.0 * p.powi(3)
}

fn capacity_guard(n: usize, p: f64) -> Result<()> {
    let t = expected_triangles(n, p);
    if t > ORACLE_CAPACITY as f64 {
        return Err(FtdError::Capacity {
            triangles: t.round() as usize,
            capacity: ORACLE_CAPACITY,
        });
    }
    Ok(())
}

fn with_pool<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    match threads {
        None => Ok(f()),
        Some(k) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(k.max(1))
                .build()
                .map_err(|e| FtdError::InvalidInput(format!("thread pool: {e}")))?;
            Ok(pool.install(f))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    /// Buckets from the LP oracle.
    Lp,
    /// `ftd` counts solver successes; every other covered graph is an anomaly.
    Solver,
    /// Buckets from the LP oracle; solver successes reported alongside.
    Both,
}

impl std::str::FromStr for Method {
    type Err = FtdError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "lp" => Ok(Method::Lp),
            "solver" => Ok(Method::Solver),
            "both" => Ok(Method::Both),
            _ => Err(FtdError::InvalidInput(format!("unknown method {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanConfig {
    pub n: usize,
    pub c_grid: Vec<f64>,
    pub trials: usize,
    pub seed: u64,
    pub method: Method,
    pub threads: Option<usize>,
    /// Write measured seconds; otherwise `secs` is 0 and output is byte-stable.
    pub record_timing: bool,
}

impl ScanConfig {
    pub fn new(n: usize, c_grid: Vec<f64>, trials: usize, seed: u64) -> Self {
        ScanConfig {
            n,
            c_grid,
            trials,
            seed,
            method: Method::Lp,
            threads: None,
            record_timing: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanRow {
    pub n: usize,
    pub c: f64,
    pub p: f64,
    pub trials: usize,
    pub uncovered: usize,
    pub ftd: usize,
    pub anomaly: usize,
    /// Oracle gave no verdict; kept out of the three buckets.
    pub inconclusive: usize,
    /// Solver successes, for [`Method::Both`].
    pub solver_ftd: Option<usize>,
    pub seed: u64,
    /// Mean decision time per trial.
    pub secs: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Bucket {
    Uncovered,
    Ftd,
    Anomaly,
    Inconclusive,
}

/// Trial `i` at every grid point uses seed `seed ^ i`, so rows share their
/// uniform draws and larger `c` gives a supergraph.
pub fn threshold_scan(cfg: &ScanConfig) -> Result<Vec<ScanRow>> {
    if cfg.trials == 0 || cfg.c_grid.iter().any(|&c| !(c > 0.0)) || cfg.n < 3 {
        return Err(FtdError::InvalidInput(
            "scan needs n ≥ 3, trials ≥ 1 and c > 0".into(),
        ));
    }
    let pd = p_delta(cfg.n);
    for &c in &cfg.c_grid {
        let p = c * pd;
        if p > 1.0 {
            return Err(FtdError::InvalidInput(format!("c = {c} gives p = {p} > 1")));
        }
        if cfg.method != Method::Solver {
            capacity_guard(cfg.n, p)?;
        }
    }
    let mut rows = Vec::with_capacity(cfg.c_grid.len());
    for &c in &cfg.c_grid {
        let p = c * pd;
        let outcomes: Vec<(Bucket, bool, f64)> = with_pool(cfg.threads, || {
            (0..cfg.trials as u64)
                .into_par_iter()
                .map(|i| classify(cfg.n, p, trial_seed(cfg.seed, i), cfg.method))
                .collect()
        })?;
        let count = |b: Bucket| outcomes.iter().filter(|o| o.0 == b).count();
        let secs = if cfg.record_timing {
            outcomes.iter().map(|o| o.2).sum::<f64>() / cfg.trials as f64
        } else {
            0.0
        };
        let row = ScanRow {
            n: cfg.n,
            c,
            p,
            trials: cfg.trials,
            uncovered: count(Bucket::Uncovered),
            ftd: count(Bucket::Ftd),
            anomaly: count(Bucket::Anomaly),
            inconclusive: count(Bucket::Inconclusive),
            solver_ftd: (cfg.method == Method::Both)
                .then(|| outcomes.iter().filter(|o| o.1).count()),
            seed: cfg.seed,
            secs,
        };
        if row.inconclusive > 0 {
            log::warn!(
                "c = {c}: {} trials without an oracle verdict",
                row.inconclusive
            );
        }
        log::info!(
            "c = {c}: uncovered {} ftd {} anomaly {}",
            row.uncovered,
            row.ftd,
            row.anomaly
        );
        rows.push(row);
    }
    Ok(rows)
}

fn classify(n: usize, p: f64, seed: u64, method: Method) -> (Bucket, bool, f64) {
    let start = Instant::now();
    let g = gen_gnp(n, p, seed);
    let ti = TriangleIndex::build(&g);
    if !ti.uncovered_edge_ids().is_empty() {
        return (Bucket::Uncovered, false, start.elapsed().as_secs_f64());
    }
    let solver_ok = || {
        solve(
            &g,
            &SolveOptions {
                record_trajectory: false,
                ..SolveOptions::default()
            },
        )
        .map(|r| r.status == SolveStatus::FtdFound)
        .unwrap_or(false)
    };
    let (bucket, solved) = match method {
        Method::Solver => {
            let ok = solver_ok();
            (if ok { Bucket::Ftd } else { Bucket::Anomaly }, ok)
        }
        Method::Lp | Method::Both => {
            let b = match decide_ftd(&g, &ti).decision() {
                Decision::Feasible => Bucket::Ftd,
                Decision::Infeasible => Bucket::Anomaly,
                Decision::Uncovered => Bucket::Uncovered,
                Decision::Inconclusive => Bucket::Inconclusive,
            };
            (b, method == Method::Both && solver_ok())
        }
    };
    (bucket, solved, start.elapsed().as_secs_f64())
}

/// Columns `n,c,p,trials,uncovered,ftd,anomaly,seed,secs`.
pub fn write_scan_csv<W: Write>(rows: &[ScanRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "n",
        "c",
        "p",
        "trials",
        "uncovered",
        "ftd",
        "anomaly",
        "seed",
        "secs",
    ])?;
    for r in rows {
        w.write_record([
            r.n.to_string(),
            format!("{}", r.c),
            format!("{:.6}", r.p),
            r.trials.to_string(),
            r.uncovered.to_string(),
            r.ftd.to_string(),
            r.anomaly.to_string(),
            r.seed.to_string(),
            format!("{:.6}", r.secs),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HittingRecord {
    pub n: usize,
    pub trial: usize,
    pub seed: u64,
    pub tau: usize,
    pub verdict: Decision,
    /// `(Δ, verdict at τ + Δ)` for each requested offset.
    pub later: Vec<(usize, Decision)>,
}

pub fn hitting_time_trials(
    n: usize,
    trials: usize,
    seed: u64,
    offsets: &[usize],
    threads: Option<usize>,
) -> Result<Vec<HittingRecord>> {
    if n < 3 || trials == 0 {
        return Err(FtdError::InvalidInput(
            "hitting needs n ≥ 3 and trials ≥ 1".into(),
        ));
    }
    // The hitting time sits near p_Δ; leave room for the later offsets.
    capacity_guard(n, (1.25 * p_delta(n)).min(1.0))?;
    let records: Vec<Result<HittingRecord>> = with_pool(threads, || {
        (0..trials)
            .into_par_iter()
            .map(|i| {
                let s = trial_seed(seed, i as u64);
                let trace = gen_process(n, s)?;
                let tau = trace
                    .tau
                    .expect("K_n has every edge in a triangle for n ≥ 3");
                let decide_at = |k: usize| {
                    let g = trace.graph_at(k.min(trace.order.len()));
                    let ti = TriangleIndex::build(&g);
                    decide_ftd(&g, &ti).decision()
                };
                Ok(HittingRecord {
                    n,
                    trial: i,
                    seed: s,
                    tau,
                    verdict: decide_at(tau),
                    later: offsets.iter().map(|&d| (d, decide_at(tau + d))).collect(),
                })
            })
            .collect()
    })?;
    records.into_iter().collect()
}

/// Columns `n,trial,seed,tau,verdict`, then one `verdict+Δ` column per offset.
pub fn write_hitting_csv<W: Write>(records: &[HittingRecord], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut head: Vec<String> = ["n", "trial", "seed", "tau", "verdict"]
        .map(String::from)
        .to_vec();
    if let Some(r) = records.first() {
        head.extend(r.later.iter().map(|(d, _)| format!("verdict+{d}")));
    }
    w.write_record(&head)?;
    for r in records {
        let mut rec = vec![
            r.n.to_string(),
            r.trial.to_string(),
            r.seed.to_string(),
            r.tau.to_string(),
            r.verdict.to_string(),
        ];
        rec.extend(r.later.iter().map(|(_, v)| v.to_string()));
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Debug, Clone)]
pub struct ProfileRun {
    pub seed: u64,
    pub status: SolveStatus,
    pub trajectory: Vec<TrajectoryPoint>,
}

#[derive(Debug, Clone)]
pub struct ConvergenceProfile {
    pub n: usize,
    pub p: f64,
    pub runs: Vec<ProfileRun>,
    /// Set when `np² < 4`.
    pub warning: Option<String>,
}

pub fn convergence_profile(
    n: usize,
    p: f64,
    seeds: &[u64],
    opts: &SolveOptions,
) -> Result<ConvergenceProfile> {
    if !(0.0..=1.0).contains(&p) {
        return Err(FtdError::InvalidInput(format!("p = {p} outside [0, 1]")));
    }
    let np2 = n as f64 * p * p;
    let warning = (np2 < 4.0).then(|| {
        let w = format!("np² = {np2:.2} is below 4; gadgets are likely to be missing");
        log::warn!("{w}");
        w
    });
    let opts = SolveOptions {
        record_trajectory: true,
        ..opts.clone()
    };
    let runs = seeds
        .iter()
        .map(|&seed| {
            let rep = solve(&gen_gnp(n, p, seed), &opts)?;
            Ok(ProfileRun {
                seed,
                status: rep.status,
                trajectory: rep.trajectory,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ConvergenceProfile {
        n,
        p,
        runs,
        warning,
    })
}

impl ConvergenceProfile {
    /// Columns `seed,status,iter,delta_inf,min_weight,max_vertex_defect,total_weight`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record([
            "seed",
            "status",
            "iter",
            "delta_inf",
            "min_weight",
            "max_vertex_defect",
            "total_weight",
        ])?;
        for run in &self.runs {
            for p in &run.trajectory {
                w.write_record([
                    run.seed.to_string(),
                    run.status.to_string(),
                    p.iter.to_string(),
                    format!("{:.16e}", p.delta_inf),
                    format!("{:.16e}", p.min_weight),
                    format!("{:.16e}", p.max_vertex_defect),
                    format!("{:.16e}", p.total_weight),
                ])?;
            }
        }
        w.flush()?;
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlotKind {
    Scan,
    Trajectory,
}

impl std::str::FromStr for PlotKind {
    type Err = FtdError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "scan" => Ok(PlotKind::Scan),
            "trajectory" => Ok(PlotKind::Trajectory),
            _ => Err(FtdError::InvalidInput(format!("unknown plot kind {s:?}"))),
        }
    }
}

struct Table {
    head: Vec<String>,
    rows: Vec<(usize, Vec<String>)>,
}

impl Table {
    fn read<R: Read>(input: R) -> Result<Table> {
        let mut r = csv::ReaderBuilder::new()
            .has_headers(true)
            .from_reader(input);
        let head = r
            .headers()
            .map_err(|e| FtdError::parse(1, e.to_string()))?
            .iter()
            .map(String::from)
            .collect();
        let mut rows = Vec::new();
        for (i, rec) in r.records().enumerate() {
            let rec = rec.map_err(|e| FtdError::parse(i + 2, e.to_string()))?;
            rows.push((i + 2, rec.iter().map(String::from).collect()));
        }
        Ok(Table { head, rows })
    }

    fn col(&self, name: &str) -> Result<usize> {
        self.head
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| FtdError::parse(1, format!("missing column {name:?}")))
    }

    fn num(&self, line: usize, row: &[String], col: usize) -> Result<f64> {
        row.get(col).and_then(|s| s.parse().ok()).ok_or_else(|| {
            FtdError::parse(line, format!("bad number in column {:?}", self.head[col]))
        })
    }
}

/// Renders `csv_path` as an SVG at `out_path`. Nothing is written on error.
pub fn emit_plot(csv_path: &Path, kind: PlotKind, out_path: &Path) -> Result<()> {
    let file = std::fs::File::open(csv_path)?;
    let table = Table::read(file).map_err(|e| e.with_path(csv_path))?;
    if table.rows.is_empty() {
        return Err(FtdError::parse(2, "no data rows").with_path(csv_path));
    }
    let svg = match kind {
        PlotKind::Scan => scan_svg(&table),
        PlotKind::Trajectory => trajectory_svg(&table),
    }
    .map_err(|e| e.with_path(csv_path))?;
    std::fs::write(out_path, svg)?;
    Ok(())
}

fn draw_err<E: std::fmt::Debug>(e: E) -> FtdError {
    FtdError::Backend(format!("plot: {e:?}"))
}

fn scan_svg(t: &Table) -> Result<String> {
    let (ci, ti, ui, fi, ai) = (
        t.col("c")?,
        t.col("trials")?,
        t.col("uncovered")?,
        t.col("ftd")?,
        t.col("anomaly")?,
    );
    let mut bars = Vec::new();
    for (line, row) in &t.rows {
        let trials = t.num(*line, row, ti)?;
        if !(trials > 0.0) {
            return Err(FtdError::parse(*line, "trials must be positive"));
        }
        let f = |i| -> Result<f64> { Ok(t.num(*line, row, i)? / trials) };
        bars.push((t.num(*line, row, ci)?, f(ui)?, f(fi)?, f(ai)?));
    }
    let mut svg = String::new();
    {
        let root = SVGBackend::with_string(&mut svg, (640, 400)).into_drawing_area();
        root.fill(&WHITE).map_err(draw_err)?;
        let k = bars.len();
        let mut chart = ChartBuilder::on(&root)
            .margin(20)
            .x_label_area_size(40)
            .y_label_area_size(50)
            .caption("outcome fractions by c", ("sans-serif", 18))
            .build_cartesian_2d(0.0..k as f64, 0.0..1.0)
            .map_err(draw_err)?;
        let labels: Vec<String> = bars.iter().map(|b| format!("{}", b.0)).collect();
        chart
            .configure_mesh()
            .disable_x_mesh()
            .x_labels(k.max(2))
            .x_label_formatter(&|x| {
                let i = x.floor() as usize;
                if (x - i as f64 - 0.5).abs() < 1e-9 || k == 1 {
                    labels.get(i).cloned().unwrap_or_default()
                } else {
                    String::new()
                }
            })
            .x_desc("c")
            .y_desc("fraction of trials")
            .draw()
            .map_err(draw_err)?;
        let colors = [
            RGBColor(200, 80, 60),
            RGBColor(60, 140, 80),
            RGBColor(60, 90, 200),
        ];
        let names = ["uncovered", "ftd", "anomaly"];
        for (s, (color, name)) in colors.into_iter().zip(names).enumerate() {
            let rects: Vec<_> = bars
                .iter()
                .enumerate()
                .map(|(i, b)| {
                    let parts = [b.1, b.2, b.3];
                    let lo: f64 = parts[..s].iter().sum();
                    let x = i as f64;
                    Rectangle::new([(x + 0.15, lo), (x + 0.85, lo + parts[s])], color.filled())
                })
                .collect();
            chart
                .draw_series(rects)
                .map_err(draw_err)?
                .label(name)
                .legend(move |(x, y)| {
                    Rectangle::new([(x, y - 5), (x + 10, y + 5)], color.filled())
                });
        }
        chart
            .configure_series_labels()
            .background_style(WHITE.mix(0.8))
            .border_style(BLACK)
            .draw()
            .map_err(draw_err)?;
        root.present().map_err(draw_err)?;
    }
    Ok(svg)
}

fn trajectory_svg(t: &Table) -> Result<String> {
    let (ii, di) = (t.col("iter")?, t.col("delta_inf")?);
    let si = t.col("seed").ok();
    let mut series: Vec<(String, Vec<(f64, f64)>)> = Vec::new();
    for (line, row) in &t.rows {
        let key = si.map_or_else(String::new, |c| row.get(c).cloned().unwrap_or_default());
        let it = t.num(*line, row, ii)?;
        let d = t.num(*line, row, di)?.max(1e-18);
        match series.last_mut() {
            Some((k, pts)) if *k == key => pts.push((it, d)),
            _ => series.push((key, vec![(it, d)])),
        }
    }
    let xmax = series
        .iter()
        .flat_map(|s| s.1.iter().map(|p| p.0))
        .fold(1.0f64, f64::max);
    let ymin = series
        .iter()
        .flat_map(|s| s.1.iter().map(|p| p.1))
        .fold(f64::INFINITY, f64::min);
    let ymax = series
        .iter()
        .flat_map(|s| s.1.iter().map(|p| p.1))
        .fold(0.0f64, f64::max);
    let (ylo, yhi) = (ymin / 2.0, (ymax * 2.0).max(ymin * 4.0));
    let mut svg = String::new();
    {
        let root = SVGBackend::with_string(&mut svg, (640, 400)).into_drawing_area();
        root.fill(&WHITE).map_err(draw_err)?;
        let mut chart = ChartBuilder::on(&root)
            .margin(20)
            .x_label_area_size(40)
            .y_label_area_size(70)
            .caption("edge discrepancy by iteration", ("sans-serif", 18))
            .build_cartesian_2d(0.0..xmax, (ylo..yhi).log_scale())
            .map_err(draw_err)?;
        chart
            .configure_mesh()
            .x_desc("iteration")
            .y_desc("max |edge sum - 1|")
            .y_label_formatter(&|y| format!("{y:.0e}"))
            .draw()
            .map_err(draw_err)?;
        for (i, (_, pts)) in series.iter().enumerate() {
            let color = Palette99::pick(i).to_rgba();
            chart
                .draw_series(LineSeries::new(pts.iter().copied(), color.stroke_width(2)))
                .map_err(draw_err)?;
        }
        root.present().map_err(draw_err)?;
    }
    Ok(svg)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn p_delta_values() {
        assert!((p_delta(300) - (3.0 * 300f64.ln() / 600.0).sqrt()).abs() < 1e-15);
        assert!((expected_triangles(10, 1.0) - 120.0).abs() < 1e-9);
    }

    #[test]
    fn small_scan_partitions_and_is_deterministic() {
        let mut cfg = ScanConfig::new(30, vec![0.8, 1.6], 6, 9);
        cfg.record_timing = false;
        let a = threshold_scan(&cfg).unwrap();
        for r in &a {
            assert_eq!(r.uncovered + r.ftd + r.anomaly + r.inconclusive, r.trials);
        }
        let mut x = Vec::new();
        let mut y = Vec::new();
        write_scan_csv(&a, &mut x).unwrap();
        write_scan_csv(&threshold_scan(&cfg).unwrap(), &mut y).unwrap();
        assert_eq!(x, y);
    }

    #[test]
    fn capacity_is_refused() {
        let cfg = ScanConfig::new(2000, vec![1.0], 1, 0);
        assert!(matches!(
            threshold_scan(&cfg),
            Err(FtdError::Capacity { .. })
        ));
    }

    #[test]
    fn hitting_on_three_vertices() {
        let recs = hitting_time_trials(3, 4, 1, &[], None).unwrap();
        for r in recs {
            assert_eq!(r.tau, 3);
            assert_eq!(r.verdict, Decision::Feasible);
        }
    }

    #[test]
    fn profile_on_k12_has_no_iterations() {
        let prof = convergence_profile(12, 1.0, &[1, 2], &SolveOptions::default()).unwrap();
        for run in &prof.runs {
            assert_eq!(run.status, SolveStatus::FtdFound);
            assert_eq!(run.trajectory.len(), 1);
        }
        assert!(prof.warning.is_none());
        let low = convergence_profile(40, 0.3, &[0], &SolveOptions::default()).unwrap();
        assert!(low.warning.is_some());
    }

    #[test]
    fn plots() {
        let dir = tempfile::tempdir().unwrap();
        let csv = dir.path().join("scan.csv");
        std::fs::write(&csv, "n,c,p,trials,uncovered,ftd,anomaly,seed,secs\n").unwrap();
        let out = dir.path().join("scan.svg");
        assert!(emit_plot(&csv, PlotKind::Scan, &out).is_err());
        assert!(!out.exists());
        std::fs::write(
            &csv,
            "n,c,p,trials,uncovered,ftd,anomaly,seed,secs\n300,1,0.17,10,3,6,1,0,0\n",
        )
        .unwrap();
        emit_plot(&csv, PlotKind::Scan, &out).unwrap();
        let svg = std::fs::read_to_string(&out).unwrap();
        assert!(svg.starts_with("<svg"));
        let tr = dir.path().join("t.csv");
        std::fs::write(&tr, "iter,delta_inf\n0,1\n1,0.5\n2,0.25\nx,1\n").unwrap();
        match emit_plot(&tr, PlotKind::Trajectory, &dir.path().join("t.svg")) {
            Err(FtdError::Parse { line, .. }) => assert_eq!(line, 5),
            r => panic!("{r:?}"),
        }
    }
}
