use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use ftd_core::experiments::{
    convergence_profile, emit_plot, hitting_time_trials, threshold_scan, write_hitting_csv,
    write_scan_csv, Method, PlotKind, ScanConfig,
};
use ftd_core::gadgets::{build_family, index_p, index_q, Family};
use ftd_core::lp::{decide_ftd_exact, decide_ftd_with, LpOptions};
use ftd_core::solver::stage_diagnostics;
use ftd_core::verify::{p_case, q_case, run_case, verify_paper_suite, Check, SuiteReport};
use ftd_core::weighting::{is_ftd, report};
use ftd_core::{
    gen_gnp, gen_process, graph_stats, FeasibilityResult, FtdError, Graph, Operator, RootedPattern,
    SolveOptions, TriangleIndex, Weighting,
};
use num_rational::Rational64;

#[derive(Parser, Debug)]
#[command(
    name = "ftd",
    version,
    about = "Fractional triangle decompositions of graphs"
)]
struct Cli {
    /// Root directory for every written artifact.
    #[arg(long, global = true, default_value = ".")]
    out_dir: PathBuf,
    /// Worker threads (results do not depend on it).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Sample G(n,p) or a random graph process stopped at its hitting time.
    Gen {
        #[arg(long)]
        n: usize,
        #[arg(long, conflicts_with = "process", required_unless_present = "process")]
        p: Option<f64>,
        /// Run the edge process and write G at the hitting time plus the trace.
        #[arg(long)]
        process: bool,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = "graph.txt")]
        out: PathBuf,
    },
    /// Run the three-stage construction.
    Solve {
        #[command(flatten)]
        input: GraphInput,
        #[arg(long, default_value_t = 4)]
        k: usize,
        #[arg(long, default_value_t = 1e-9)]
        eps_stop: f64,
        #[arg(long, default_value_t = 1e-9)]
        eps_neg: f64,
        #[arg(long, default_value_t = 200)]
        max_iters: usize,
        #[arg(long, value_enum, default_value_t = OperatorArg::Pinwheel)]
        operator: OperatorArg,
        #[arg(long, default_value = "weighting.txt")]
        weighting: PathBuf,
        #[arg(long, default_value = "trajectory.csv")]
        trajectory: PathBuf,
    },
    /// Report discrepancies of a weighting.
    Check {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        weighting: PathBuf,
        #[arg(long, default_value_t = 2e-9)]
        tol: f64,
    },
    /// Decide whether an FTD exists and write the witness or certificate.
    Oracle {
        #[command(flatten)]
        input: GraphInput,
        /// Rational arithmetic (at most 12 vertices).
        #[arg(long)]
        exact: bool,
        /// Solve the LP even when an edge lies in no triangle.
        #[arg(long)]
        no_fast_path: bool,
        #[arg(long, default_value = "witness.txt")]
        witness: PathBuf,
        #[arg(long, default_value = "certificate.txt")]
        certificate: PathBuf,
    },
    /// Exhaustive rooted density and degeneracy checks on small patterns.
    Verify {
        /// `suite` (everything), `P`, `Q`, or a family such as `W(3)` or `wheel(4)`.
        #[arg(long, default_value = "suite", conflicts_with = "pattern")]
        family: String,
        /// Pattern file instead of a built-in family.
        #[arg(long)]
        pattern: Option<PathBuf>,
        /// Comma-separated root names for a single family.
        #[arg(long)]
        roots: Option<String>,
        /// Density bound as a fraction, e.g. 11/4.
        #[arg(long, conflicts_with = "degenerate")]
        alpha: Option<String>,
        /// Check rooted k-degeneracy instead.
        #[arg(long)]
        degenerate: Option<usize>,
        /// Directory holding H{i}.pattern files for the suite.
        #[arg(long)]
        h_dir: Option<PathBuf>,
        #[arg(long, default_value = "verify.csv")]
        csv: PathBuf,
    },
    /// Classify G(n, c·p_Δ) samples over a grid of c.
    Scan {
        #[arg(long, default_value_t = 300)]
        n: usize,
        #[arg(long, value_delimiter = ',', default_value = "0.8,1.0,1.3")]
        c: Vec<f64>,
        #[arg(long, default_value_t = 50)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = MethodArg::Lp)]
        method: MethodArg,
        /// Write 0 in the secs column so reruns are byte-identical.
        #[arg(long)]
        no_timing: bool,
        #[arg(long, default_value = "scan.csv")]
        out: PathBuf,
    },
    /// Decide FTD existence at the hitting time of the random graph process.
    Hitting {
        #[arg(long, default_value_t = 200)]
        n: usize,
        #[arg(long, default_value_t = 20)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Also decide at tau + offset, e.g. 10,50.
        #[arg(long, value_delimiter = ',')]
        offsets: Vec<usize>,
        #[arg(long, default_value = "hitting.csv")]
        out: PathBuf,
    },
    /// Solver trajectories on G(n,p) for several seeds.
    Profile {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        p: f64,
        #[arg(long, value_delimiter = ',', default_value = "0,1,2,3,4")]
        seeds: Vec<u64>,
        #[arg(long, default_value_t = 4)]
        k: usize,
        #[arg(long, default_value_t = 200)]
        max_iters: usize,
        #[arg(long, default_value = "profile.csv")]
        out: PathBuf,
    },
    /// Render a scan or trajectory CSV as SVG.
    Plot {
        #[arg(long)]
        csv: PathBuf,
        #[arg(long, value_enum)]
        kind: KindArg,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Degree, codegree and gadget-count statistics.
    Stats {
        #[command(flatten)]
        input: GraphInput,
        /// Edge probability to compare against; defaults to the density.
        #[arg(long = "ref-p")]
        ref_p: Option<f64>,
        #[arg(long, default_value_t = 4)]
        k: usize,
        /// Skip bowtie and pinwheel counts.
        #[arg(long)]
        no_gadgets: bool,
    },
}

#[derive(Args, Debug)]
struct GraphInput {
    /// Graph file; otherwise sample G(n,p).
    #[arg(long, conflicts_with_all = ["n", "p"])]
    graph: Option<PathBuf>,
    #[arg(long, requires = "p")]
    n: Option<usize>,
    #[arg(long, requires = "n")]
    p: Option<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum OperatorArg {
    Pinwheel,
    Naive,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum MethodArg {
    Lp,
    Solver,
    Both,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum KindArg {
    Scan,
    Trajectory,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    if let Some(t) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(t.max(1))
            .build_global()
        {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    }
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            let guard = e.chain().any(|c| {
                matches!(
                    c.downcast_ref::<FtdError>(),
                    Some(FtdError::Capacity { .. } | FtdError::SizeLimit { .. })
                )
            });
            ExitCode::from(if guard { 2 } else { 1 })
        }
    }
}

fn artifact(out_dir: &Path, name: &Path) -> Result<PathBuf> {
    std::fs::create_dir_all(out_dir).with_context(|| format!("creating {}", out_dir.display()))?;
    Ok(out_dir.join(name))
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(
        File::create(path).with_context(|| format!("creating {}", path.display()))?,
    ))
}

fn read_graph(path: &Path) -> Result<Graph> {
    let f = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    Ok(Graph::read_from(BufReader::new(f)).map_err(|e| e.with_path(path))?)
}

fn load(input: &GraphInput) -> Result<(Graph, String)> {
    match (&input.graph, input.n, input.p) {
        (Some(path), _, _) => Ok((read_graph(path)?, format!("graph={}", path.display()))),
        (None, Some(n), Some(p)) => {
            if !(0.0..=1.0).contains(&p) {
                bail!("p = {p} outside [0, 1]");
            }
            Ok((
                gen_gnp(n, p, input.seed),
                format!("n={n} p={p} seed={}", input.seed),
            ))
        }
        _ => bail!("give --graph FILE or both --n and --p"),
    }
}

fn parse_ratio(s: &str) -> Result<Rational64> {
    let (a, b) = s.split_once('/').unwrap_or((s, "1"));
    let (a, b): (i64, i64) = (a.trim().parse()?, b.trim().parse()?);
    if b == 0 {
        bail!("zero denominator in {s:?}");
    }
    Ok(Rational64::new(a, b))
}

fn run(cli: &Cli) -> Result<()> {
    let out_dir = &cli.out_dir;
    match &cli.cmd {
        Cmd::Gen {
            n,
            p,
            process,
            seed,
            out,
        } => {
            let path = artifact(out_dir, out)?;
            let g = if *process {
                let trace = gen_process(*n, *seed)?;
                let tau = trace
                    .tau
                    .context("process never reached its hitting time")?;
                let tpath = path.with_extension("trace");
                trace.write_to(create(&tpath)?)?;
                println!("# gen n={n} process seed={seed}");
                println!("tau {tau}");
                println!("trace {}", tpath.display());
                trace.graph_at(tau)
            } else {
                let p = p.expect("clap enforces p");
                if !(0.0..=1.0).contains(&p) {
                    bail!("p = {p} outside [0, 1]");
                }
                println!("# gen n={n} p={p} seed={seed}");
                gen_gnp(*n, p, *seed)
            };
            g.write_to(create(&path)?)?;
            println!("edges {}", g.m());
            println!("graph {}", path.display());
        }
        Cmd::Solve {
            input,
            k,
            eps_stop,
            eps_neg,
            max_iters,
            operator,
            weighting,
            trajectory,
        } => {
            let (g, src) = load(input)?;
            let opts = SolveOptions {
                k: *k,
                eps_stop: *eps_stop,
                eps_neg: *eps_neg,
                max_iters: *max_iters,
                operator: match operator {
                    OperatorArg::Pinwheel => Operator::Pinwheel,
                    OperatorArg::Naive => Operator::Naive,
                },
                record_trajectory: true,
                record_neighbourhood: false,
            };
            let rep = ftd_core::solve(&g, &opts)?;
            println!(
                "# solve {src} k={k} eps_stop={eps_stop:e} eps_neg={eps_neg:e} max_iters={max_iters} operator={operator:?}"
            );
            println!("status {}", rep.status);
            println!("iterations {}", rep.iterations);
            if let Some(r) = rep.final_report {
                println!("delta_inf {:.6e}", r.delta_inf);
                println!("min_weight {:.6e}", r.min_weight);
                println!("max_vertex_defect {:.6e}", r.max_vertex_defect);
                println!("total_weight {:.12}", r.total_weight);
            }
            println!("seconds {:.3}", rep.timings.total.as_secs_f64());
            if rep.weighting.len() == TriangleIndex::build(&g).len() {
                let ti = TriangleIndex::build(&g);
                let wpath = artifact(out_dir, weighting)?;
                rep.weighting.write_to(&ti, create(&wpath)?)?;
                println!("weighting {}", wpath.display());
            }
            let tpath = artifact(out_dir, trajectory)?;
            rep.write_trajectory_csv(create(&tpath)?)?;
            println!("trajectory {}", tpath.display());
        }
        Cmd::Check {
            graph,
            weighting,
            tol,
        } => {
            let g = read_graph(graph)?;
            let ti = TriangleIndex::build(&g);
            let f = File::open(weighting)
                .with_context(|| format!("opening {}", weighting.display()))?;
            let w =
                Weighting::read_from(&ti, BufReader::new(f)).map_err(|e| e.with_path(weighting))?;
            let r = report(&g, &ti, &w);
            println!(
                "# check graph={} weighting={} tol={tol:e}",
                graph.display(),
                weighting.display()
            );
            println!("delta_inf {:.6e}", r.delta_inf);
            println!("max_vertex_defect {:.6e}", r.max_vertex_defect);
            println!("total_weight {:.12}", r.total_weight);
            println!("min_weight {:.6e}", r.min_weight);
            println!("sum_edge_disc {:.6e}", r.sum_edge_disc);
            println!("ftd {}", is_ftd(&g, &ti, &w, *tol));
        }
        Cmd::Oracle {
            input,
            exact,
            no_fast_path,
            witness,
            certificate,
        } => {
            let (g, src) = load(input)?;
            let ti = TriangleIndex::build(&g);
            let res = if *exact {
                decide_ftd_exact(&g, &ti, !no_fast_path)?
            } else {
                let opts = LpOptions {
                    uncovered_fast_path: !no_fast_path,
                    ..LpOptions::default()
                };
                decide_ftd_with(&g, &ti, &opts)
            };
            println!("# oracle {src} exact={exact} fast_path={}", !no_fast_path);
            println!("verdict {}", res.decision());
            println!("verified {}", ftd_core::verify_certificate(&g, &ti, &res));
            match &res {
                FeasibilityResult::Feasible(w) => {
                    let path = artifact(out_dir, witness)?;
                    w.write_to(&ti, create(&path)?)?;
                    println!("witness {}", path.display());
                }
                FeasibilityResult::Infeasible(c) => {
                    let path = artifact(out_dir, certificate)?;
                    c.write_to(&g, create(&path)?)?;
                    println!("certificate {}", path.display());
                }
                FeasibilityResult::Uncovered((u, v)) => println!("uncovered {u} {v}"),
                FeasibilityResult::Inconclusive(why) => println!("reason {why}"),
            }
        }
        Cmd::Verify {
            family,
            pattern,
            roots,
            alpha,
            degenerate,
            h_dir,
            csv,
        } => {
            let check = match (alpha, degenerate) {
                (_, Some(k)) => Some(Check::Degenerate(*k)),
                (Some(a), None) => Some(Check::Alpha(parse_ratio(a)?)),
                (None, None) => None,
            };
            let eleven_quarters = Check::Alpha(Rational64::new(11, 4));
            let report = if let Some(path) = pattern {
                let f = File::open(path).with_context(|| format!("opening {}", path.display()))?;
                let p =
                    RootedPattern::read_from(BufReader::new(f)).map_err(|e| e.with_path(path))?;
                let p = with_roots(p, roots.as_deref())?;
                let name = p.name.clone();
                SuiteReport {
                    rows: vec![run_case(name, &p, check.unwrap_or(eleven_quarters))?],
                }
            } else {
                match family.as_str() {
                    "suite" => verify_paper_suite(h_dir.as_deref())?,
                    "P" => {
                        let c = check.unwrap_or(eleven_quarters);
                        let rows = index_p()
                            .into_iter()
                            .map(|(i, j)| {
                                run_case(format!("P({i},{j})"), &p_case(i, j)?, c.clone())
                            })
                            .collect::<ftd_core::Result<_>>()?;
                        SuiteReport { rows }
                    }
                    "Q" => {
                        let c = check.unwrap_or(eleven_quarters);
                        let rows = index_q()
                            .into_iter()
                            .map(|(i, j, m)| {
                                run_case(format!("Q({i},{j},{m})"), &q_case(i, j, m)?, c.clone())
                            })
                            .collect::<ftd_core::Result<_>>()?;
                        SuiteReport { rows }
                    }
                    other => {
                        let f: Family = other.parse()?;
                        let p = with_roots(build_family(f)?, roots.as_deref())?;
                        SuiteReport {
                            rows: vec![run_case(other, &p, check.unwrap_or(eleven_quarters))?],
                        }
                    }
                }
            };
            println!(
                "# verify family={family} pattern={} roots={} alpha={} degenerate={}",
                pattern
                    .as_ref()
                    .map_or("-".into(), |p| p.display().to_string()),
                roots.as_deref().unwrap_or("-"),
                alpha.as_deref().unwrap_or("-"),
                degenerate.map_or("-".into(), |k| k.to_string()),
            );
            let mut stdout = std::io::stdout().lock();
            report.write_table(&mut stdout)?;
            stdout.flush()?;
            drop(stdout);
            let path = artifact(out_dir, csv)?;
            report.write_csv(create(&path)?)?;
            println!("csv {}", path.display());
            if !report.all_pass() {
                println!("result FAIL");
            } else {
                println!("result PASS");
            }
        }
        Cmd::Scan {
            n,
            c,
            trials,
            seed,
            method,
            no_timing,
            out,
        } => {
            let cfg = ScanConfig {
                n: *n,
                c_grid: c.clone(),
                trials: *trials,
                seed: *seed,
                method: match method {
                    MethodArg::Lp => Method::Lp,
                    MethodArg::Solver => Method::Solver,
                    MethodArg::Both => Method::Both,
                },
                threads: cli.threads,
                record_timing: !no_timing,
            };
            let rows = threshold_scan(&cfg)?;
            let path = artifact(out_dir, out)?;
            write_scan_csv(&rows, create(&path)?)?;
            println!("# scan n={n} c={c:?} trials={trials} seed={seed} method={method:?}");
            for r in &rows {
                print!(
                    "c={} p={:.4} uncovered={} ftd={} anomaly={}",
                    r.c, r.p, r.uncovered, r.ftd, r.anomaly
                );
                if r.inconclusive > 0 {
                    print!(" inconclusive={}", r.inconclusive);
                }
                if let Some(s) = r.solver_ftd {
                    print!(" solver_ftd={s}");
                }
                println!();
            }
            println!("csv {}", path.display());
        }
        Cmd::Hitting {
            n,
            trials,
            seed,
            offsets,
            out,
        } => {
            let recs = hitting_time_trials(*n, *trials, *seed, offsets, cli.threads)?;
            let path = artifact(out_dir, out)?;
            write_hitting_csv(&recs, create(&path)?)?;
            let feasible = recs
                .iter()
                .filter(|r| r.verdict == ftd_core::Decision::Feasible)
                .count();
            println!("# hitting n={n} trials={trials} seed={seed} offsets={offsets:?}");
            println!("feasible_at_tau {feasible}/{trials}");
            println!("csv {}", path.display());
        }
        Cmd::Profile {
            n,
            p,
            seeds,
            k,
            max_iters,
            out,
        } => {
            let opts = SolveOptions {
                k: *k,
                max_iters: *max_iters,
                ..SolveOptions::default()
            };
            let prof = convergence_profile(*n, *p, seeds, &opts)?;
            let path = artifact(out_dir, out)?;
            prof.write_csv(create(&path)?)?;
            println!("# profile n={n} p={p} seeds={seeds:?} k={k} max_iters={max_iters}");
            if let Some(w) = &prof.warning {
                println!("warning {w}");
            }
            for run in &prof.runs {
                println!(
                    "seed {} {} iterations {}",
                    run.seed,
                    run.status,
                    run.trajectory.len().saturating_sub(1)
                );
            }
            println!("csv {}", path.display());
        }
        Cmd::Plot { csv, kind, out } => {
            let kind = match kind {
                KindArg::Scan => PlotKind::Scan,
                KindArg::Trajectory => PlotKind::Trajectory,
            };
            let name = out.clone().unwrap_or_else(|| {
                PathBuf::from(csv.file_name().map_or("plot".into(), |s| s.to_owned()))
                    .with_extension("svg")
            });
            let path = artifact(out_dir, &name)?;
            emit_plot(csv, kind, &path)?;
            println!("svg {}", path.display());
        }
        Cmd::Stats {
            input,
            ref_p,
            k,
            no_gadgets,
        } => {
            let (g, src) = load(input)?;
            let n = g.n();
            let density = if n < 2 {
                0.0
            } else {
                g.m() as f64 / (n * (n - 1) / 2) as f64
            };
            let p = ref_p.or(input.p).unwrap_or(density);
            let s = graph_stats(&g, p);
            println!("# stats {src} ref_p={p} k={k}");
            println!("{s:#?}");
            if !no_gadgets {
                println!("{:#?}", stage_diagnostics(&g, p, *k)?);
            }
        }
    }
    Ok(())
}

fn with_roots(p: RootedPattern, roots: Option<&str>) -> Result<RootedPattern> {
    match roots {
        None => Ok(p),
        Some(list) => {
            let names: Vec<&str> = list
                .split(',')
                .map(str::trim)
                .filter(|s| !s.is_empty())
                .collect();
            Ok(p.with_named_roots(&names)?)
        }
    }
}
