use ftd_core::solver::neighbourhood_discrepancy;
use ftd_core::weighting::report;
use ftd_core::{
    decide_ftd, gen_gnp, solve, uncovered_edges, Graph, Operator, SolveOptions, SolveStatus,
    TriangleIndex,
};

fn covered(n: usize) -> Graph {
    let p = (8.0 / n as f64).sqrt();
    (0..)
        .map(|s| gen_gnp(n, p, s))
        .find(|g| uncovered_edges(g, &TriangleIndex::build(g)).is_empty())
        .unwrap()
}

#[test]
fn complete_graphs_are_uniform() {
    for n in 4..=12 {
        let g = Graph::complete(n);
        let r = solve(&g, &SolveOptions::default()).unwrap();
        assert_eq!(r.status, SolveStatus::FtdFound, "K{n}");
        assert!(!r.balance_applied);
        assert_eq!(r.iterations, 0);
        for &w in r.weighting.values() {
            assert!((w - 1.0 / (n as f64 - 2.0)).abs() < 1e-12);
        }
    }
}

#[test]
fn pendant_reports_uncovered_edge() {
    let g = Graph::from_edges(5, [(0, 1), (0, 2), (1, 2), (2, 3), (3, 4)]).unwrap();
    let r = solve(&g, &SolveOptions::default()).unwrap();
    assert_eq!(r.status, SolveStatus::UncoveredEdge((2, 3)));
    assert!(!r.is_ftd());
}

#[test]
fn invalid_options_are_rejected() {
    let g = Graph::complete(5);
    for opts in [
        SolveOptions {
            eps_stop: 0.0,
            ..SolveOptions::default()
        },
        SolveOptions {
            max_iters: 0,
            ..SolveOptions::default()
        },
        SolveOptions {
            k: 1,
            ..SolveOptions::default()
        },
    ] {
        assert!(solve(&g, &opts).is_err());
    }
}

#[test]
fn covered_graph_converges_geometrically() {
    let g = covered(40);
    let ti = TriangleIndex::build(&g);
    let r = solve(
        &g,
        &SolveOptions {
            record_neighbourhood: true,
            ..SolveOptions::default()
        },
    )
    .unwrap();
    assert!(r.balance_applied);
    assert!(
        matches!(
            r.status,
            SolveStatus::FtdFound | SolveStatus::NegativeWeight
        ),
        "{}",
        r.status
    );
    let fin = report(&g, &ti, &r.weighting);
    assert!(fin.delta_inf <= 1e-9);
    let total = r.trajectory[0].total_weight;
    for w in r.trajectory.windows(2) {
        assert!(w[1].max_vertex_defect <= 1e-9);
        assert!((w[1].total_weight - total).abs() <= 1e-9);
        assert!(w[1].neighbourhood.is_some());
        if w[1].iter >= 2 {
            assert!(w[1].delta_inf <= 0.7 * w[0].delta_inf + 1e-12);
        }
    }
    assert!(neighbourhood_discrepancy(&g, &ti, &r.weighting) <= 1e-8);
    if r.status == SolveStatus::FtdFound {
        assert_eq!(decide_ftd(&g, &ti).admits_ftd(), Some(true));
    }
}

#[test]
fn naive_operator_runs() {
    let g = gen_gnp(20, 0.8, 11);
    let r = solve(
        &g,
        &SolveOptions {
            operator: Operator::Naive,
            max_iters: 50,
            ..SolveOptions::default()
        },
    )
    .unwrap();
    assert!(r.iterations <= 50);
    assert!(!r.trajectory.is_empty());
}

#[test]
fn trajectory_csv_layout() {
    let g = covered(40);
    let r = solve(&g, &SolveOptions::default()).unwrap();
    let mut buf = Vec::new();
    r.write_trajectory_csv(&mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next(),
        Some("iter,delta_inf,min_weight,max_vertex_defect,total_weight")
    );
    assert_eq!(lines.count(), r.trajectory.len());
}

#[test]
fn sparse_example_reaches_zero_discrepancy() {
    let g = gen_gnp(50, 0.4, 1);
    let ti = TriangleIndex::build(&g);
    let r = solve(&g, &SolveOptions::default()).unwrap();
    match r.status {
        SolveStatus::FtdFound | SolveStatus::NegativeWeight => {
            assert!(report(&g, &ti, &r.weighting).delta_inf <= 1e-9);
        }
        SolveStatus::UncoveredEdge(_) | SolveStatus::GadgetMissing(_) => {}
        s => panic!("unexpected status {s}"),
    }
}
