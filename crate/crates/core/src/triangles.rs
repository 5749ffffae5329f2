//! Canonical triangle list with edge and vertex incidence.

use crate::graph::{Edge, Graph};

/// Compressed list-of-lists.
#[derive(Debug, Clone, PartialEq, Eq)]
struct Csr {
    offsets: Vec<u32>,
    items: Vec<u32>,
}

impl Csr {
    fn build(rows: usize, pairs: impl Iterator<Item = (usize, u32)> + Clone) -> Self {
        let mut offsets = vec![0u32; rows + 1];
        for (r, _) in pairs.clone() {
            offsets[r + 1] += 1;
        }
        for i in 0..rows {
            offsets[i + 1] += offsets[i];
        }
        let mut fill = offsets.clone();
        let mut items = vec![0u32; offsets[rows] as usize];
        for (r, x) in pairs {
            items[fill[r] as usize] = x;
            fill[r] += 1;
        }
        Csr { offsets, items }
    }

    #[inline]
    fn row(&self, r: usize) -> &[u32] {
        &self.items[self.offsets[r] as usize..self.offsets[r + 1] as usize]
    }
}

/// Triangles of a host graph, ids assigned in lexicographic order of the
/// sorted vertex triple.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TriangleIndex {
    n: usize,
    m: usize,
    triangles: Vec<[u32; 3]>,
    /// Edge ids `[uv, uw, vw]` of each triangle `u < v < w`.
    tri_edges: Vec<[u32; 3]>,
    edge_inc: Csr,
    vertex_inc: Csr,
}

impl TriangleIndex {
    /// Enumerates every triangle once: for each edge `u < v` in lexicographic
    /// order, every common neighbour `w > v` in increasing order.
    pub fn build(g: &Graph) -> Self {
        let mut triangles = Vec::new();
        let mut tri_edges = Vec::new();
        for (uv, &(u, v)) in g.edges().iter().enumerate() {
            for w in g.common_neighbors(u, v).filter(|&w| w > v) {
                triangles.push([u, v, w]);
                let uw = g.edge_id(u, w).expect("triangle edge") as u32;
                let vw = g.edge_id(v, w).expect("triangle edge") as u32;
                tri_edges.push([uv as u32, uw, vw]);
            }
        }
        let edge_inc = Csr::build(
            g.m(),
            tri_edges
                .iter()
                .enumerate()
                .flat_map(|(t, es)| es.iter().map(move |&e| (e as usize, t as u32))),
        );
        let vertex_inc = Csr::build(
            g.n(),
            triangles
                .iter()
                .enumerate()
                .flat_map(|(t, vs)| vs.iter().map(move |&v| (v as usize, t as u32))),
        );
        TriangleIndex {
            n: g.n(),
            m: g.m(),
            triangles,
            tri_edges,
            edge_inc,
            vertex_inc,
        }
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.triangles.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.triangles.is_empty()
    }

    /// Vertex count of the host graph.
    #[inline]
    pub fn vertex_count(&self) -> usize {
        self.n
    }

    /// Edge count of the host graph.
    #[inline]
    pub fn edge_count(&self) -> usize {
        self.m
    }

    #[inline]
    pub fn triangles(&self) -> &[[u32; 3]] {
        &self.triangles
    }

    #[inline]
    pub fn triangle(&self, t: usize) -> [u32; 3] {
        self.triangles[t]
    }

    #[inline]
    pub fn triangle_edges(&self, t: usize) -> [u32; 3] {
        self.tri_edges[t]
    }

    /// Triangle ids containing edge `e`.
    #[inline]
    pub fn edge_triangles(&self, e: usize) -> &[u32] {
        self.edge_inc.row(e)
    }

    /// Triangle ids containing vertex `v`, i.e. `T_G(v)`.
    #[inline]
    pub fn vertex_triangles(&self, v: u32) -> &[u32] {
        self.vertex_inc.row(v as usize)
    }

    /// Looks up the id of the triangle on three vertices given in any order.
    pub fn id(&self, a: u32, b: u32, c: u32) -> Option<usize> {
        let mut t = [a, b, c];
        t.sort_unstable();
        self.triangles.binary_search(&t).ok()
    }

    /// Edges lying in no triangle.
    pub fn uncovered_edge_ids(&self) -> Vec<usize> {
        (0..self.m)
            .filter(|&e| self.edge_triangles(e).is_empty())
            .collect()
    }

    /// Checks that the index was built from a graph with the given shape.
    pub fn matches(&self, g: &Graph) -> bool {
        self.n == g.n() && self.m == g.m()
    }
}

/// Edges of `g` contained in no triangle.
pub fn uncovered_edges(g: &Graph, ti: &TriangleIndex) -> Vec<Edge> {
    ti.uncovered_edge_ids()
        .into_iter()
        .map(|e| g.edge(e))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::gen_gnp;

    fn brute_triangles(g: &Graph) -> Vec<[u32; 3]> {
        let n = g.n() as u32;
        let mut out = Vec::new();
        for a in 0..n {
            for b in a + 1..n {
                for c in b + 1..n {
                    if g.has_edge(a, b) && g.has_edge(a, c) && g.has_edge(b, c) {
                        out.push([a, b, c]);
                    }
                }
            }
        }
        out
    }

    #[test]
    fn complete_graphs() {
        let ti = TriangleIndex::build(&Graph::complete(4));
        assert_eq!(ti.len(), 4);
        assert!((0..6).all(|e| ti.edge_triangles(e).len() == 2));
        let ti = TriangleIndex::build(&Graph::complete(5));
        assert_eq!(ti.len(), 10);
        assert!((0..10).all(|e| ti.edge_triangles(e).len() == 3));
    }

    #[test]
    fn five_cycle_has_none() {
        let g = Graph::cycle(5);
        let ti = TriangleIndex::build(&g);
        assert!(ti.is_empty());
        assert_eq!(uncovered_edges(&g, &ti).len(), 5);
    }

    #[test]
    fn pendant_edge_is_uncovered() {
        let g = Graph::from_edges(4, [(0, 1), (0, 2), (1, 2), (2, 3)]).unwrap();
        let ti = TriangleIndex::build(&g);
        assert_eq!(uncovered_edges(&g, &ti), vec![(2, 3)]);
        assert!(uncovered_edges(
            &Graph::complete(4),
            &TriangleIndex::build(&Graph::complete(4))
        )
        .is_empty());
    }

    #[test]
    fn matches_brute_force_and_incidence_sums() {
        for seed in 0..30 {
            let n = 5 + (seed as usize % 26);
            let g = gen_gnp(n, 0.5, seed);
            let ti = TriangleIndex::build(&g);
            assert_eq!(ti.triangles(), brute_triangles(&g).as_slice());
            let edge_sum: usize = (0..g.m()).map(|e| ti.edge_triangles(e).len()).sum();
            let vert_sum: usize = (0..n as u32).map(|v| ti.vertex_triangles(v).len()).sum();
            assert_eq!(edge_sum, 3 * ti.len());
            assert_eq!(vert_sum, 3 * ti.len());
            for (t, &[a, b, c]) in ti.triangles().iter().enumerate() {
                assert_eq!(ti.id(c, a, b), Some(t));
                for e in ti.triangle_edges(t) {
                    let (x, y) = g.edge(e as usize);
                    assert!([a, b, c].contains(&x) && [a, b, c].contains(&y));
                    assert!(ti.edge_triangles(e as usize).contains(&(t as u32)));
                }
            }
        }
    }
}
