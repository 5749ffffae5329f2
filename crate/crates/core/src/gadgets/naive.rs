//! Spreading each edge's discrepancy evenly over its triangles.

use crate::error::{FtdError, GadgetWitness, Result};
use crate::graph::Graph;
use crate::triangles::TriangleIndex;
use crate::weighting::{edge_discrepancies, Weighting};

/// `Δ(T) = −Σ_{e ⊂ T} δ_e(σ) / |T(e)|`.
pub fn naive_adjust(g: &Graph, ti: &TriangleIndex, sigma: &Weighting) -> Result<Weighting> {
    if let Some(&e) = ti.uncovered_edge_ids().first() {
        let (u, v) = g.edge(e);
        return Err(FtdError::GadgetMissing(GadgetWitness::CoverEdge(u, v)));
    }
    let share: Vec<f64> = edge_discrepancies(ti, sigma)
        .into_iter()
        .enumerate()
        .map(|(e, d)| d / ti.edge_triangles(e).len() as f64)
        .collect();
    let mut out = sigma.clone();
    for (t, x) in out.values_mut().iter_mut().enumerate() {
        *x -= ti
            .triangle_edges(t)
            .iter()
            .map(|&e| share[e as usize])
            .sum::<f64>();
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::weighting::{report, uniform_weighting};

    #[test]
    fn exact_input_is_fixed() {
        let g = Graph::complete(6);
        let ti = TriangleIndex::build(&g);
        let w = uniform_weighting(&g, &ti).unwrap();
        assert_eq!(naive_adjust(&g, &ti, &w).unwrap(), w);
    }

    #[test]
    fn single_triangle_from_zero() {
        // Each of the three edges hands its full deficit to the only triangle.
        let g = Graph::complete(3);
        let ti = TriangleIndex::build(&g);
        let out = naive_adjust(&g, &ti, &Weighting::zeros(1)).unwrap();
        assert_eq!(out.values(), &[3.0]);
        let back = naive_adjust(&g, &ti, &Weighting::constant(1, 1.0)).unwrap();
        assert_eq!(back.values(), &[1.0]);
    }

    #[test]
    fn k4_from_zero_overshoots() {
        let g = Graph::complete(4);
        let ti = TriangleIndex::build(&g);
        let out = naive_adjust(&g, &ti, &Weighting::zeros(4)).unwrap();
        assert!(out.values().iter().all(|&x| x == 1.5));
        // Every edge now carries 3, so the discrepancy grows from 1 to 2.
        assert_eq!(report(&g, &ti, &out).delta_inf, 2.0);
    }

    #[test]
    fn uncovered_edge_is_refused() {
        let g = Graph::from_edges(4, [(0, 1), (0, 2), (1, 2), (2, 3)]).unwrap();
        let ti = TriangleIndex::build(&g);
        assert!(matches!(
            naive_adjust(&g, &ti, &Weighting::constant(1, 1.0)),
            Err(FtdError::GadgetMissing(GadgetWitness::CoverEdge(2, 3)))
        ));
    }
}
