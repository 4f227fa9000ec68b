//! Seeded synthetic graph generators.

use std::collections::HashSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Graph, VertexId, Weight};

/// Undirected path 0-1-..-(n-1), both arc directions.
pub fn path(n: usize) -> Graph {
    let mut edges = Vec::with_capacity(2 * n);
    for v in 1..n as VertexId {
        edges.push((v - 1, v));
        edges.push((v, v - 1));
    }
    Graph::from_edges(n, edges, None).expect("path graph")
}

/// Undirected star with center 0 and `leaves` leaves.
pub fn star(leaves: usize) -> Graph {
    let mut edges = Vec::new();
    for v in 1..=leaves as VertexId {
        edges.push((0, v));
        edges.push((v, 0));
    }
    Graph::from_edges(leaves + 1, edges, None).expect("star graph")
}

/// Complete undirected graph without self-loops.
pub fn clique(n: usize) -> Graph {
    let mut edges = Vec::new();
    for u in 0..n as VertexId {
        for v in 0..n as VertexId {
            if u != v {
                edges.push((u, v));
            }
        }
    }
    Graph::from_edges(n, edges, None).expect("clique")
}

/// Undirected G(n, p) without self-loops; each pair is kept with
/// probability `p` and stored in both directions.
pub fn erdos_renyi(n: usize, p: f64, seed: u64) -> Graph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    for u in 0..n as VertexId {
        for v in (u + 1)..n as VertexId {
            if rng.gen_bool(p) {
                edges.push((u, v));
                edges.push((v, u));
            }
        }
    }
    Graph::from_edges(n, edges, None).expect("G(n,p)")
}

/// Directed multigraph with `m` uniformly random arcs.
pub fn random_edges(n: usize, m: usize, seed: u64) -> Graph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let edges = (0..m)
        .map(|_| (rng.gen_range(0..n as VertexId), rng.gen_range(0..n as VertexId)))
        .collect();
    Graph::from_edges(n, edges, None).expect("random graph")
}

/// Undirected preferential-attachment graph: each new vertex attaches to
/// `m` distinct earlier vertices chosen proportionally to degree.
pub fn preferential_attachment(n: usize, m: usize, seed: u64) -> Graph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m = m.max(1);
    let mut endpoints: Vec<VertexId> = Vec::new();
    let mut edges = Vec::new();
    let core = (m + 1).min(n);
    for u in 0..core as VertexId {
        for v in (u + 1)..core as VertexId {
            edges.push((u, v));
            endpoints.extend([u, v]);
        }
    }
    for v in core as VertexId..n as VertexId {
        let mut targets = HashSet::new();
        while targets.len() < m.min(v as usize) {
            let t = endpoints[rng.gen_range(0..endpoints.len())];
            targets.insert(t);
        }
        let mut targets: Vec<_> = targets.into_iter().collect();
        targets.sort_unstable();
        for t in targets {
            edges.push((v, t));
            endpoints.extend([v, t]);
        }
    }
    let both = edges.iter().flat_map(|&(u, v)| [(u, v), (v, u)]).collect();
    Graph::from_edges(n, both, None).expect("preferential attachment")
}

/// Uniform random integer weights in `[lo, hi]`, seeded.
pub fn with_random_weights(g: &Graph, lo: Weight, hi: Weight, seed: u64) -> Graph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let w = (0..g.num_edges()).map(|_| rng.gen_range(lo..=hi)).collect();
    g.with_weights(w).expect("weights match edge count")
}
