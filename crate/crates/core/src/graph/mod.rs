//! Graph storage: out-CSR, in-CSR (transpose) and COO views of one edge
//! multiset, with optional non-negative integer weights.

mod gen;
mod load;

pub use gen::{
    clique, erdos_renyi, path, preferential_attachment, random_edges, star, with_random_weights,
};
pub use load::{load_edge_list, parse_edge_list, LoadOptions, LoadStats};

use crate::error::{Error, Result};

pub type VertexId = u32;
pub type Weight = u32;

/// Borrowed view of one CSR direction.
#[derive(Clone, Copy)]
pub struct Csr<'a> {
    pub offsets: &'a [usize],
    pub neighbors: &'a [VertexId],
    pub weights: Option<&'a [Weight]>,
}

impl Csr<'_> {
    #[inline]
    pub fn degree(&self, v: VertexId) -> usize {
        self.offsets[v as usize + 1] - self.offsets[v as usize]
    }

    #[inline]
    pub fn range(&self, v: VertexId) -> std::ops::Range<usize> {
        self.offsets[v as usize]..self.offsets[v as usize + 1]
    }

    #[inline]
    pub fn weight(&self, e: usize) -> Weight {
        self.weights.map_or(1, |w| w[e])
    }
}

#[derive(Clone, Debug)]
pub struct Graph {
    num_vertices: usize,
    out_offsets: Vec<usize>,
    out_neighbors: Vec<VertexId>,
    out_weights: Option<Vec<Weight>>,
    in_offsets: Vec<usize>,
    in_neighbors: Vec<VertexId>,
    in_weights: Option<Vec<Weight>>,
    coo_src: Vec<VertexId>,
    coo_dst: Vec<VertexId>,
    coo_weights: Option<Vec<Weight>>,
    symmetric: bool,
}

/// Stable counting sort of edge indices by `key`, producing CSR offsets and
/// the permutation that orders edges by key.
fn bucket_by(num_vertices: usize, key: &[VertexId]) -> (Vec<usize>, Vec<usize>) {
    let mut offsets = vec![0usize; num_vertices + 1];
    for &k in key {
        offsets[k as usize + 1] += 1;
    }
    for v in 0..num_vertices {
        offsets[v + 1] += offsets[v];
    }
    let mut cursor = offsets.clone();
    let mut perm = vec![0usize; key.len()];
    for (e, &k) in key.iter().enumerate() {
        perm[cursor[k as usize]] = e;
        cursor[k as usize] += 1;
    }
    (offsets, perm)
}

impl Graph {
    /// Builds all three views from a COO edge list. Edge order is kept as
    /// given for the COO view; CSR rows keep the same relative order.
    pub fn from_edges(
        num_vertices: usize,
        edges: Vec<(VertexId, VertexId)>,
        weights: Option<Vec<Weight>>,
    ) -> Result<Graph> {
        if let Some(w) = &weights {
            if w.len() != edges.len() {
                return Err(Error::WeightCount {
                    got: w.len(),
                    expected: edges.len(),
                });
            }
        }
        if num_vertices > VertexId::MAX as usize {
            return Err(Error::VertexOutOfRange {
                vertex: num_vertices as u64,
                num_vertices: VertexId::MAX as usize,
            });
        }
        for &(s, d) in &edges {
            let m = s.max(d);
            if m as usize >= num_vertices {
                return Err(Error::VertexOutOfRange {
                    vertex: m as u64,
                    num_vertices,
                });
            }
        }
        let (coo_src, coo_dst): (Vec<_>, Vec<_>) = edges.into_iter().unzip();

        let (out_offsets, out_perm) = bucket_by(num_vertices, &coo_src);
        let out_neighbors = out_perm.iter().map(|&e| coo_dst[e]).collect();
        let out_weights = weights
            .as_ref()
            .map(|w| out_perm.iter().map(|&e| w[e]).collect());

        let (in_offsets, in_perm) = bucket_by(num_vertices, &coo_dst);
        let in_neighbors = in_perm.iter().map(|&e| coo_src[e]).collect();
        let in_weights = weights
            .as_ref()
            .map(|w| in_perm.iter().map(|&e| w[e]).collect());

        let mut g = Graph {
            num_vertices,
            out_offsets,
            out_neighbors,
            out_weights,
            in_offsets,
            in_neighbors,
            in_weights,
            coo_src,
            coo_dst,
            coo_weights: weights,
            symmetric: false,
        };
        g.symmetric = g.check_symmetric();
        Ok(g)
    }

    /// Arc (u,v) present for every arc (v,u), counting multiplicity.
    fn check_symmetric(&self) -> bool {
        let mut fwd: Vec<(VertexId, VertexId)> = self.edges().collect();
        let mut rev: Vec<(VertexId, VertexId)> = self.edges().map(|(s, d)| (d, s)).collect();
        fwd.sort_unstable();
        rev.sort_unstable();
        fwd == rev
    }

    pub fn num_vertices(&self) -> usize {
        self.num_vertices
    }

    pub fn num_edges(&self) -> usize {
        self.coo_src.len()
    }

    pub fn is_weighted(&self) -> bool {
        self.coo_weights.is_some()
    }

    pub fn is_symmetric(&self) -> bool {
        self.symmetric
    }

    pub fn out_csr(&self) -> Csr<'_> {
        Csr {
            offsets: &self.out_offsets,
            neighbors: &self.out_neighbors,
            weights: self.out_weights.as_deref(),
        }
    }

    pub fn in_csr(&self) -> Csr<'_> {
        Csr {
            offsets: &self.in_offsets,
            neighbors: &self.in_neighbors,
            weights: self.in_weights.as_deref(),
        }
    }

    pub fn out_offsets(&self) -> &[usize] {
        &self.out_offsets
    }

    pub fn out_neighbors(&self) -> &[VertexId] {
        &self.out_neighbors
    }

    /// Weights aligned with `out_neighbors`.
    pub fn weights(&self) -> Option<&[Weight]> {
        self.out_weights.as_deref()
    }

    pub fn coo_src(&self) -> &[VertexId] {
        &self.coo_src
    }

    pub fn coo_dst(&self) -> &[VertexId] {
        &self.coo_dst
    }

    pub fn coo_weights(&self) -> Option<&[Weight]> {
        self.coo_weights.as_deref()
    }

    /// COO edges in stored order.
    pub fn edges(&self) -> impl Iterator<Item = (VertexId, VertexId)> + '_ {
        self.coo_src.iter().copied().zip(self.coo_dst.iter().copied())
    }

    pub fn out_degree(&self, v: VertexId) -> Result<usize> {
        if v as usize >= self.num_vertices {
            return Err(Error::VertexOutOfRange {
                vertex: v as u64,
                num_vertices: self.num_vertices,
            });
        }
        Ok(self.out_offsets[v as usize + 1] - self.out_offsets[v as usize])
    }

    pub fn in_degree(&self, v: VertexId) -> usize {
        self.in_offsets[v as usize + 1] - self.in_offsets[v as usize]
    }

    /// Reverses every edge.
    pub fn transpose(&self) -> Graph {
        let edges = self.edges().map(|(s, d)| (d, s)).collect();
        Graph::from_edges(self.num_vertices, edges, self.coo_weights.clone())
            .expect("transpose of a valid graph is valid")
    }

    /// Adds the reverse of every edge and collapses duplicate arcs, keeping
    /// the weight of the first occurrence. Returns the graph and the number
    /// of arcs collapsed.
    pub fn symmetrized(&self) -> (Graph, usize) {
        let mut arcs: Vec<(VertexId, VertexId, usize)> = Vec::with_capacity(2 * self.num_edges());
        for (e, (s, d)) in self.edges().enumerate() {
            arcs.push((s, d, 2 * e));
            arcs.push((d, s, 2 * e + 1));
        }
        // sort by arc, then by the order it was produced so the first
        // occurrence survives dedup
        arcs.sort_unstable();
        let before = arcs.len();
        arcs.dedup_by_key(|a| (a.0, a.1));
        let collapsed = before - arcs.len();
        let weights = self
            .coo_weights
            .as_ref()
            .map(|w| arcs.iter().map(|a| w[a.2 / 2]).collect());
        let edges = arcs.into_iter().map(|a| (a.0, a.1)).collect();
        let g = Graph::from_edges(self.num_vertices, edges, weights)
            .expect("symmetrization of a valid graph is valid");
        (g, collapsed)
    }

    /// Same topology with the given COO-aligned weights.
    pub fn with_weights(&self, weights: Vec<Weight>) -> Result<Graph> {
        Graph::from_edges(self.num_vertices, self.edges().collect(), Some(weights))
    }

    /// Sorted (src, dst, weight) triples, for order-insensitive comparison.
    pub fn edge_multiset(&self) -> Vec<(VertexId, VertexId, Weight)> {
        let mut v: Vec<_> = (0..self.num_edges())
            .map(|e| {
                (
                    self.coo_src[e],
                    self.coo_dst[e],
                    self.coo_weights.as_ref().map_or(1, |w| w[e]),
                )
            })
            .collect();
        v.sort_unstable();
        v
    }

    /// Edge multiset reconstructed from the out-CSR view.
    pub fn csr_edge_multiset(&self) -> Vec<(VertexId, VertexId, Weight)> {
        let csr = self.out_csr();
        let mut v = Vec::with_capacity(self.num_edges());
        for u in 0..self.num_vertices as VertexId {
            for e in csr.range(u) {
                v.push((u, csr.neighbors[e], csr.weight(e)));
            }
        }
        v.sort_unstable();
        v
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn out_degree_from_offsets() {
        // offsets [0,2,2,5]
        let g = Graph::from_edges(3, vec![(0, 1), (0, 2), (2, 0), (2, 1), (2, 2)], None).unwrap();
        assert_eq!(g.out_offsets(), &[0, 2, 2, 5]);
        assert_eq!(g.out_degree(0).unwrap(), 2);
        assert_eq!(g.out_degree(1).unwrap(), 0);
        assert_eq!(g.out_degree(2).unwrap(), 3);
        assert!(matches!(g.out_degree(3), Err(Error::VertexOutOfRange { .. })));
    }

    #[test]
    fn rejects_out_of_range_endpoint() {
        assert!(Graph::from_edges(2, vec![(0, 2)], None).is_err());
        assert!(Graph::from_edges(2, vec![(0, 1)], Some(vec![1, 2])).is_err());
    }

    #[test]
    fn symmetrize_collapses_duplicates() {
        let g = Graph::from_edges(3, vec![(0, 1), (1, 0), (1, 2), (1, 1)], None).unwrap();
        let (s, collapsed) = g.symmetrized();
        assert_eq!(collapsed, 3);
        assert!(s.is_symmetric());
        assert_eq!(
            s.edge_multiset().iter().map(|t| (t.0, t.1)).collect::<Vec<_>>(),
            vec![(0, 1), (1, 0), (1, 1), (1, 2), (2, 1)]
        );
    }

    fn arb_graph() -> impl Strategy<Value = Graph> {
        (1usize..40).prop_flat_map(|n| {
            prop::collection::vec((0..n as u32, 0..n as u32, 0u32..100), 0..120).prop_map(
                move |es| {
                    let w = es.iter().map(|e| e.2).collect();
                    Graph::from_edges(n, es.iter().map(|e| (e.0, e.1)).collect(), Some(w)).unwrap()
                },
            )
        })
    }

    proptest! {
        #[test]
        fn csr_and_coo_agree(g in arb_graph()) {
            prop_assert_eq!(g.csr_edge_multiset(), g.edge_multiset());
            let csr = g.out_csr();
            prop_assert_eq!(csr.offsets[0], 0);
            prop_assert_eq!(csr.offsets[g.num_vertices()], g.num_edges());
            prop_assert!(csr.offsets.windows(2).all(|w| w[0] <= w[1]));
            let inc = g.in_csr();
            let mut from_in = Vec::new();
            for v in 0..g.num_vertices() as u32 {
                for e in inc.range(v) {
                    from_in.push((inc.neighbors[e], v, inc.weight(e)));
                }
            }
            from_in.sort_unstable();
            prop_assert_eq!(from_in, g.edge_multiset());
        }

        #[test]
        fn transpose_is_an_involution(g in arb_graph()) {
            prop_assert_eq!(g.transpose().transpose().edge_multiset(), g.edge_multiset());
        }

        #[test]
        fn symmetrized_has_every_reverse_arc(g in arb_graph()) {
            let (s, _) = g.symmetrized();
            let arcs: std::collections::HashSet<_> = s.edges().collect();
            for &(u, v) in &arcs {
                prop_assert!(arcs.contains(&(v, u)));
            }
            prop_assert_eq!(arcs.len(), s.num_edges());
        }
    }
}
