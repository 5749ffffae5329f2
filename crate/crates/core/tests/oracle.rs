use ftd_core::lp::{decide_ftd_exact, decide_ftd_with, Certificate, LpOptions, EXACT_MAX_N};
use ftd_core::{
    decide_ftd, gen_gnp, verify_certificate, Decision, FeasibilityResult, FtdError, Graph,
    TriangleIndex,
};

fn decide(g: &Graph) -> (TriangleIndex, FeasibilityResult) {
    let ti = TriangleIndex::build(g);
    let r = decide_ftd(g, &ti);
    (ti, r)
}

fn wheel(rim: u32) -> Graph {
    let mut edges: Vec<(u32, u32)> = (1..=rim).map(|i| (0, i)).collect();
    edges.extend((1..=rim).map(|i| (i, i % rim + 1)));
    Graph::from_edges(rim as usize + 1, edges).unwrap()
}

#[test]
fn complete_graphs_get_uniform_weights() {
    for n in 3..9 {
        let g = Graph::complete(n);
        let (ti, r) = decide(&g);
        assert!(verify_certificate(&g, &ti, &r));
        let FeasibilityResult::Feasible(w) = r else {
            panic!("K{n}: {:?}", r.decision())
        };
        if n <= 5 {
            // each edge lies in n-2 triangles and the weighting is unique here
            for &x in w.values() {
                assert!((x - 1.0 / (n as f64 - 2.0)).abs() < 1e-9);
            }
        }
    }
}

#[test]
fn octahedron_is_feasible() {
    let g = Graph::from_edges(
        6,
        (0..6u32).flat_map(|a| {
            (a + 1..6)
                .filter(move |&b| b != a + 3 || a >= 3)
                .map(move |b| (a, b))
        }),
    )
    .unwrap();
    assert_eq!(g.m(), 12);
    let (ti, r) = decide(&g);
    assert_eq!(r.decision(), Decision::Feasible);
    assert!(verify_certificate(&g, &ti, &r));
}

#[test]
fn diamond_and_odd_wheel_are_infeasible() {
    let diamond = Graph::from_edges(4, [(0, 1), (0, 2), (1, 2), (1, 3), (2, 3)]).unwrap();
    for g in [diamond, wheel(5), wheel(4)] {
        let (ti, r) = decide(&g);
        assert_eq!(r.decision(), Decision::Infeasible);
        assert!(verify_certificate(&g, &ti, &r));
    }
}

#[test]
fn pendant_edge() {
    let g = Graph::from_edges(4, [(0, 1), (0, 2), (1, 2), (2, 3)]).unwrap();
    let (ti, r) = decide(&g);
    assert_eq!(r, FeasibilityResult::Uncovered((2, 3)));
    assert!(verify_certificate(&g, &ti, &r));
    let slow = decide_ftd_with(
        &g,
        &ti,
        &LpOptions {
            uncovered_fast_path: false,
            ..LpOptions::default()
        },
    );
    assert_eq!(slow.decision(), Decision::Infeasible);
    assert!(verify_certificate(&g, &ti, &slow));
}

#[test]
fn perturbed_witnesses_are_rejected() {
    let g = Graph::complete(6);
    let (ti, r) = decide(&g);
    let FeasibilityResult::Feasible(w) = &r else {
        panic!()
    };
    let mut v = w.values().to_vec();
    v[3] += 1e-6;
    assert!(!verify_certificate(
        &g,
        &ti,
        &FeasibilityResult::Feasible(ftd_core::Weighting::from_vec(v))
    ));
    assert!(!verify_certificate(
        &g,
        &ti,
        &FeasibilityResult::Uncovered((0, 1))
    ));
    assert!(!verify_certificate(
        &g,
        &ti,
        &FeasibilityResult::Inconclusive("x".into())
    ));

    let h = wheel(5);
    let (hi, r) = decide(&h);
    let FeasibilityResult::Infeasible(c) = &r else {
        panic!()
    };
    let flipped = Certificate {
        y: c.y.iter().map(|x| -x).collect(),
    };
    assert!(!verify_certificate(
        &h,
        &hi,
        &FeasibilityResult::Infeasible(flipped)
    ));
    let tiny = Certificate {
        y: c.y.iter().map(|x| x * 1e-3).collect(),
    };
    assert!(!verify_certificate(
        &h,
        &hi,
        &FeasibilityResult::Infeasible(tiny)
    ));
}

#[test]
fn certificate_file_round_trip() {
    let g = wheel(7);
    let (ti, r) = decide(&g);
    let FeasibilityResult::Infeasible(c) = r else {
        panic!()
    };
    let mut buf = Vec::new();
    c.write_to(&g, &mut buf).unwrap();
    let back = Certificate::read_from(&g, &buf[..]).unwrap();
    assert_eq!(back, c);
    assert!(verify_certificate(
        &g,
        &ti,
        &FeasibilityResult::Infeasible(back)
    ));
    assert!(Certificate::read_from(&Graph::complete(3), &buf[..]).is_err());
}

#[test]
fn exact_oracle_size_limit() {
    let g = Graph::complete(EXACT_MAX_N + 1);
    let ti = TriangleIndex::build(&g);
    assert!(matches!(
        decide_ftd_exact(&g, &ti, true),
        Err(FtdError::SizeLimit { .. })
    ));
}

#[test]
fn float_and_exact_agree_on_random_graphs() {
    let mut seen = [0usize; 3];
    for seed in 0..400u64 {
        let n = 5 + (seed % 6) as usize;
        let p = [0.5, 0.7, 0.85, 0.95][(seed / 6 % 4) as usize];
        let g = gen_gnp(n, p, seed);
        let ti = TriangleIndex::build(&g);
        let a = decide_ftd(&g, &ti);
        let b = decide_ftd_exact(&g, &ti, true).unwrap();
        assert_eq!(a.decision(), b.decision(), "n={n} p={p} seed={seed}");
        assert!(verify_certificate(&g, &ti, &a) && verify_certificate(&g, &ti, &b));
        seen[match a.decision() {
            Decision::Feasible => 0,
            Decision::Infeasible => 1,
            _ => 2,
        }] += 1;
    }
    assert!(seen.iter().all(|&c| c > 0), "{seen:?}");
}

#[test]
fn moderate_random_graphs_are_decided() {
    for seed in 0..20u64 {
        let n = 30 + seed as usize;
        let g = gen_gnp(n, 0.5, seed);
        let (ti, r) = decide(&g);
        assert_ne!(r.decision(), Decision::Inconclusive);
        assert!(verify_certificate(&g, &ti, &r));
    }
}
