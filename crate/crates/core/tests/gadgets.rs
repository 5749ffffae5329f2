mod common;

use ftd_core::gadgets::*;
use ftd_core::weighting::{edge_discrepancies, report, uniform_weighting, vertex_defects};
use ftd_core::{gen_gnp, Graph, TriangleIndex, Weighting};

#[test]
fn bowtie_counts_match_brute_force() {
    for seed in 0..6 {
        let g = gen_gnp(9, 0.7, seed);
        let all = bowtie_counts(&g);
        for u in 0..9u32 {
            for v in 0..9u32 {
                if u == v {
                    continue;
                }
                let want = common::bowtie_count(&g, u, v);
                assert_eq!(bowtie_count(&g, u, v).unwrap(), want);
                assert_eq!(all[u as usize * 9 + v as usize], want);
                assert_eq!(enumerate_bowties(&g, u, v).unwrap().len() as u64, want);
            }
        }
    }
}

#[test]
fn bowtie_counts_match_rooted_extensions() {
    let p = build_family(Family::Bowtie).unwrap();
    let g = gen_gnp(10, 0.75, 4);
    for (u, v) in [(0, 1), (3, 7), (9, 2)] {
        assert_eq!(
            rooted_extension_count(&p, &g, &[u, v]).unwrap(),
            bowtie_count(&g, u, v).unwrap()
        );
    }
    assert_eq!(bowtie_count(&Graph::complete(7), 0, 1).unwrap(), 120);
    assert_eq!(bowtie_count(&Graph::cycle(5), 0, 1).unwrap(), 0);
}

#[test]
fn pinwheel_counts_match_brute_force_and_extensions() {
    let w8 = build_family(Family::Wheel(4)).unwrap();
    for seed in 0..4 {
        let g = gen_gnp(12, 0.75, seed);
        let counts = pinwheel_counts(&g, 4).unwrap();
        for e in 0..g.m() {
            let (u, v) = g.edge(e);
            let brute = common::pinwheels(&g, u, v, 4).len() + common::pinwheels(&g, v, u, 4).len();
            assert_eq!(counts[e], brute as u64);
            assert_eq!(pinwheel_count(&g, u, v, 4).unwrap(), brute as u64);
            assert_eq!(enumerate_pinwheels(&g, u, v, 4).unwrap().len() * 2, brute);
            if e % 7 == 0 {
                let x = rooted_extension_count(&w8, &g, &[u, v]).unwrap();
                assert_eq!(2 * x, brute as u64);
            }
        }
    }
    let k10 = Graph::complete(10);
    assert_eq!(pinwheel_count(&k10, 0, 1, 4).unwrap(), 80640);
    assert_eq!(rooted_extension_count(&w8, &k10, &[0, 1]).unwrap(), 40320);
    assert_eq!(pinwheel_count(&Graph::complete(5), 0, 1, 4).unwrap(), 0);
}

#[test]
fn wheel_itself_has_two_pinwheels_on_its_base() {
    let w = build_family(Family::Wheel(4)).unwrap();
    let u = w.vertex("w0").unwrap();
    let v = w.vertex("w7").unwrap();
    assert_eq!(pinwheel_count(&w.graph, u, v, 4).unwrap(), 2);
}

#[test]
fn apply_f_matches_brute_force() {
    for (n, p, seed) in [(12, 0.85, 1), (11, 0.8, 2), (13, 0.7, 3)] {
        let g = gen_gnp(n, p, seed);
        let ti = TriangleIndex::build(&g);
        let sigma = common::random_weighting(ti.len(), seed);
        let want = common::brute_apply_f(&g, &ti, &sigma, 4);
        let counts = pinwheel_counts(&g, 4).unwrap();
        let direct = apply_f(&g, &ti, &sigma, 4, &counts).unwrap();
        let op = PinwheelOperator::build(&g, &ti, 4).unwrap();
        let agg = op.apply(&ti, &sigma).unwrap();
        for t in 0..ti.len() {
            assert!(
                (direct.values()[t] - want[t]).abs() <= 1e-12,
                "direct t={t} {} {} (n={n})",
                direct.values()[t],
                want[t]
            );
            assert!(
                (agg.values()[t] - want[t]).abs() <= 1e-12,
                "operator t={t} {} {}",
                agg.values()[t],
                want[t]
            );
        }
    }
}

#[test]
fn apply_f_keeps_vertex_weights_and_fixes_exact_input() {
    let g = gen_gnp(13, 0.75, 8);
    let ti = TriangleIndex::build(&g);
    let sigma = common::random_weighting(ti.len(), 5);
    let op = PinwheelOperator::build(&g, &ti, 4).unwrap();
    let next = op.apply(&ti, &sigma).unwrap();
    let before = vertex_defects(&g, &ti, &sigma);
    let after = vertex_defects(&g, &ti, &next);
    for (a, b) in before.iter().zip(&after) {
        assert!((a - b).abs() < 1e-11);
    }
    assert!((sigma.total() - next.total()).abs() < 1e-10);

    let k9 = Graph::complete(9);
    let ti = TriangleIndex::build(&k9);
    let exact = uniform_weighting(&k9, &ti).unwrap();
    let op = PinwheelOperator::build(&k9, &ti, 4).unwrap();
    assert_eq!(op.apply(&ti, &exact).unwrap().max_abs_diff(&exact), 0.0);
    let mut bumped = exact.clone();
    bumped.values_mut()[0] += 0.1;
    let d0 = report(&k9, &ti, &bumped).delta_inf;
    let d1 = report(&k9, &ti, &op.apply(&ti, &bumped).unwrap()).delta_inf;
    assert!(d1 < d0, "{d1} !< {d0}");
}

#[test]
fn missing_gadgets_are_named() {
    let g = Graph::complete(6);
    let ti = TriangleIndex::build(&g);
    assert!(matches!(
        PinwheelOperator::build(&g, &ti, 4),
        Err(ftd_core::FtdError::GadgetMissing(
            ftd_core::GadgetWitness::PinwheelEdge(0, 1)
        ))
    ));
}

/// `φ − (1/n) Σ_u δ(u) Σ_{v≠u} (1/|B_uv|) Σ_{ψ∈B_uv} ψ` summed embedding by embedding.
fn brute_balance(g: &Graph, ti: &TriangleIndex, sigma: &Weighting) -> Vec<f64> {
    let n = g.n();
    let defects = vertex_defects(g, ti, sigma);
    let mut out = sigma.values().to_vec();
    for u in 0..n as u32 {
        for v in 0..n as u32 {
            if u == v || defects[u as usize] == 0.0 {
                continue;
            }
            let all = enumerate_bowties(g, u, v).unwrap();
            assert!(!all.is_empty());
            let scale = -defects[u as usize] / (n as f64 * all.len() as f64);
            for b in &all {
                for (t, s) in b.signed_triangles() {
                    let t = common::sorted(t);
                    out[ti.id(t[0], t[1], t[2]).unwrap()] += scale * s as f64;
                }
            }
        }
    }
    out
}

#[test]
fn bowtie_balance_matches_brute_force() {
    for seed in 0..3 {
        let g = gen_gnp(11, 0.8, seed);
        let ti = TriangleIndex::build(&g);
        let phi = uniform_weighting(&g, &ti).unwrap();
        let got = bowtie_balance(&g, &ti, &phi).unwrap();
        let want = brute_balance(&g, &ti, &phi);
        for t in 0..ti.len() {
            assert!((got.values()[t] - want[t]).abs() < 1e-12);
        }
        let r = report(&g, &ti, &got);
        assert!(r.max_vertex_defect <= 1e-9);
        assert!((r.total_weight - g.m() as f64 / 3.0).abs() <= 1e-9);
    }
}

#[test]
fn bowtie_balance_on_gnp_40() {
    let g = gen_gnp(40, 0.45, 17);
    let ti = TriangleIndex::build(&g);
    let phi = uniform_weighting(&g, &ti).unwrap();
    let out = bowtie_balance(&g, &ti, &phi).unwrap();
    let r = report(&g, &ti, &out);
    assert!(r.max_vertex_defect <= 1e-9);
    assert!((r.total_weight - phi.total()).abs() <= 1e-9);
}

#[test]
fn naive_adjust_spreads_discrepancy() {
    let g = gen_gnp(15, 0.6, 2);
    let ti = TriangleIndex::build(&g);
    let sigma = common::random_weighting(ti.len(), 1);
    let d = edge_discrepancies(&ti, &sigma);
    let out = naive_adjust(&g, &ti, &sigma).unwrap();
    for t in 0..ti.len() {
        let want: f64 = ti
            .triangle_edges(t)
            .iter()
            .map(|&e| -d[e as usize] / ti.edge_triangles(e as usize).len() as f64)
            .sum();
        assert!((out.values()[t] - sigma.values()[t] - want).abs() < 1e-12);
    }
}

#[test]
fn family_shapes() {
    let shape = |f| {
        let p = build_family(f).unwrap();
        (p.n(), p.graph.m())
    };
    assert_eq!(shape(Family::Wheel(4)), (9, 16));
    assert_eq!(shape(Family::Bowtie), (7, 10));
    for i in 1..=7 {
        assert_eq!(shape(Family::W(i)), (17, 33));
    }
    for (i, j) in index_t() {
        assert_eq!(shape(Family::Wij(i, j)), (24, 48));
    }
    assert_eq!(
        (
            index_t().len(),
            index_v().len(),
            index_p().len(),
            index_q().len()
        ),
        (2, 3, 37, 12)
    );
}
