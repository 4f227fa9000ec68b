//! Serial reference implementations. They read only the raw edge list and
//! build their own adjacency, sharing no traversal code with the engine.

use std::cmp::Reverse;
use std::collections::{BTreeSet, BinaryHeap, VecDeque};

use crate::error::{Error, Result};
use crate::graph::{Graph, VertexId};

/// Largest graph the oracles accept.
pub const ORACLE_LIMIT: usize = 10_000;
/// Largest graph for the dense PageRank operator.
pub const DENSE_PR_LIMIT: usize = 4096;

pub fn check_size(g: &Graph, limit: usize) -> Result<()> {
    if g.num_vertices() > limit {
        Err(Error::OracleTooLarge {
            num_vertices: g.num_vertices(),
            limit,
        })
    } else {
        Ok(())
    }
}

fn adjacency(g: &Graph) -> Vec<Vec<(usize, u64)>> {
    let mut adj = vec![Vec::new(); g.num_vertices()];
    let w = g.coo_weights();
    for (e, (u, v)) in g.edges().enumerate() {
        adj[u as usize].push((v as usize, w.map_or(1, |w| u64::from(w[e]))));
    }
    adj
}

/// Undirected adjacency: the edges as given for a symmetric graph, else
/// each distinct unordered pair once in both directions.
fn undirected(g: &Graph) -> Vec<Vec<usize>> {
    let mut adj = vec![Vec::new(); g.num_vertices()];
    if g.is_symmetric() {
        for (u, v) in g.edges() {
            adj[u as usize].push(v as usize);
        }
    } else {
        let pairs: BTreeSet<(usize, usize)> = g
            .edges()
            .flat_map(|(u, v)| [(u as usize, v as usize), (v as usize, u as usize)])
            .collect();
        for (u, v) in pairs {
            adj[u].push(v);
        }
    }
    adj
}

/// BFS levels from `source`; -1 when unreachable.
pub fn bfs_oracle(g: &Graph, source: VertexId) -> Result<Vec<i64>> {
    check_size(g, ORACLE_LIMIT)?;
    let adj = adjacency(g);
    let mut level = vec![-1i64; g.num_vertices()];
    let mut queue = VecDeque::new();
    level[source as usize] = 0;
    queue.push_back(source as usize);
    while let Some(u) = queue.pop_front() {
        for &(v, _) in &adj[u] {
            if level[v] == -1 {
                level[v] = level[u] + 1;
                queue.push_back(v);
            }
        }
    }
    Ok(level)
}

/// Dijkstra distances from `source`; `u64::MAX` when unreachable. An
/// unweighted graph uses unit weights.
pub fn dijkstra_oracle(g: &Graph, source: VertexId) -> Result<Vec<u64>> {
    check_size(g, ORACLE_LIMIT)?;
    let adj = adjacency(g);
    let mut dist = vec![u64::MAX; g.num_vertices()];
    let mut heap = BinaryHeap::new();
    dist[source as usize] = 0;
    heap.push(Reverse((0u64, source as usize)));
    while let Some(Reverse((d, u))) = heap.pop() {
        if d > dist[u] {
            continue;
        }
        for &(v, w) in &adj[u] {
            let nd = d + w;
            if nd < dist[v] {
                dist[v] = nd;
                heap.push(Reverse((nd, v)));
            }
        }
    }
    Ok(dist)
}

/// PageRank by iterating the dense transition operator, with damping 0.85,
/// uniform teleport, uniform dangling redistribution and the same stopping
/// rule as the engine (L1 change below `tolerance` or `max_iters`).
pub fn pagerank_dense_oracle(g: &Graph, max_iters: usize, tolerance: f64) -> Result<Vec<f64>> {
    check_size(g, DENSE_PR_LIMIT)?;
    let n = g.num_vertices();
    if n == 0 {
        return Err(Error::EmptyGraph);
    }
    let d = 0.85;
    let mut outdeg = vec![0usize; n];
    for (u, _) in g.edges() {
        outdeg[u as usize] += 1;
    }
    // m[v * n + u]: probability of stepping u -> v
    let mut m = vec![0.0f64; n * n];
    for (u, v) in g.edges() {
        m[v as usize * n + u as usize] += 1.0 / outdeg[u as usize] as f64;
    }
    let mut rank = vec![1.0 / n as f64; n];
    let mut change = f64::INFINITY;
    let mut iters = 0;
    while iters < max_iters && change >= tolerance {
        let dangling: f64 = (0..n).filter(|&u| outdeg[u] == 0).map(|u| rank[u]).sum();
        let next: Vec<f64> = (0..n)
            .map(|v| {
                let row: f64 = (0..n).map(|u| m[v * n + u] * rank[u]).sum();
                (1.0 - d) / n as f64 + d * (row + dangling / n as f64)
            })
            .collect();
        change = next.iter().zip(&rank).map(|(a, b)| (a - b).abs()).sum();
        rank = next;
        iters += 1;
    }
    Ok(rank)
}

/// Component labels (smallest vertex id per component), treating every
/// edge as undirected.
pub fn cc_unionfind_oracle(g: &Graph) -> Result<Vec<u32>> {
    check_size(g, ORACLE_LIMIT)?;
    let n = g.num_vertices();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    for (u, v) in g.edges() {
        let (a, b) = (find(&mut parent, u as usize), find(&mut parent, v as usize));
        if a != b {
            parent[a.max(b)] = a.min(b);
        }
    }
    Ok((0..n).map(|v| find(&mut parent, v) as u32).collect())
}

/// Brandes betweenness over undirected shortest paths from `sources`,
/// halved so each unordered pair counts once.
pub fn brandes_oracle(g: &Graph, sources: &[VertexId]) -> Result<Vec<f64>> {
    check_size(g, ORACLE_LIMIT)?;
    let n = g.num_vertices();
    let adj = undirected(g);
    let mut bc = vec![0.0f64; n];
    for &s in sources {
        let s = s as usize;
        let mut order = Vec::new();
        let mut preds: Vec<Vec<usize>> = vec![Vec::new(); n];
        let mut sigma = vec![0.0f64; n];
        let mut dist = vec![-1i64; n];
        sigma[s] = 1.0;
        dist[s] = 0;
        let mut queue = VecDeque::from([s]);
        while let Some(v) = queue.pop_front() {
            order.push(v);
            for &w in &adj[v] {
                if dist[w] < 0 {
                    dist[w] = dist[v] + 1;
                    queue.push_back(w);
                }
                if dist[w] == dist[v] + 1 {
                    sigma[w] += sigma[v];
                    preds[w].push(v);
                }
            }
        }
        let mut delta = vec![0.0f64; n];
        for &w in order.iter().rev() {
            for &v in &preds[w] {
                delta[v] += sigma[v] / sigma[w] * (1.0 + delta[w]);
            }
            if w != s {
                bc[w] += delta[w];
            }
        }
    }
    Ok(bc.into_iter().map(|x| x / 2.0).collect())
}
