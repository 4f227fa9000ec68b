//! Checks algorithm outputs against the serial oracles.
//!
//! BFS is compared by levels (parents depend on the schedule) and every
//! parent must be a real in-neighbor one level up. SSSP distances and CC
//! labels must match exactly, PR within [`PR_TOLERANCE`] and BC within
//! [`BC_TOLERANCE`] in the max norm.

use std::collections::HashSet;

use serde::Serialize;

use crate::algos::{self, levels_from_parents, AlgoOptions, Algorithm, Values};
use crate::engine::Engine;
use crate::error::Result;
use crate::graph::{Graph, VertexId};
use crate::oracle;
use crate::sched::ScheduleProgram;

pub const PR_TOLERANCE: f64 = 1e-8;
pub const BC_TOLERANCE: f64 = 1e-6;

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub algorithm: String,
    pub pass: bool,
    /// Vertices whose value disagrees with the oracle.
    pub mismatches: usize,
    /// Largest absolute difference for floating-point outputs.
    pub max_error: f64,
    pub detail: String,
}

impl Report {
    fn new(alg: Algorithm, mismatches: usize, max_error: f64, detail: String) -> Report {
        Report {
            algorithm: alg.name().to_string(),
            pass: mismatches == 0,
            mismatches,
            max_error,
            detail,
        }
    }
}

fn exact<T: PartialEq + std::fmt::Debug>(alg: Algorithm, got: &[T], want: &[T]) -> Report {
    if got.len() != want.len() {
        return Report::new(alg, want.len().max(1), 0.0, format!("length {} != {}", got.len(), want.len()));
    }
    let bad: Vec<usize> = (0..got.len()).filter(|&i| got[i] != want[i]).collect();
    let detail = bad
        .first()
        .map(|&i| format!("vertex {i}: got {:?}, expected {:?}", got[i], want[i]))
        .unwrap_or_default();
    Report::new(alg, bad.len(), 0.0, detail)
}

fn close(alg: Algorithm, got: &[f64], want: &[f64], tol: f64) -> Report {
    if got.len() != want.len() {
        return Report::new(alg, want.len().max(1), f64::INFINITY, "length mismatch".into());
    }
    let mut worst = 0.0f64;
    let mut bad = 0;
    let mut detail = String::new();
    for (i, (a, b)) in got.iter().zip(want).enumerate() {
        let err = (a - b).abs();
        if !(err <= tol) {
            if bad == 0 {
                detail = format!("vertex {i}: got {a}, expected {b}");
            }
            bad += 1;
        }
        worst = worst.max(if err.is_nan() { f64::INFINITY } else { err });
    }
    Report::new(alg, bad, worst, detail)
}

/// BFS parents against oracle levels, including parent-edge validity.
pub fn check_bfs(g: &Graph, source: VertexId, parents: &[i64]) -> Result<Report> {
    let want = oracle::bfs_oracle(g, source)?;
    let Some(levels) = levels_from_parents(parents) else {
        return Ok(Report::new(Algorithm::Bfs, 1, 0.0, "parents do not form a tree".into()));
    };
    let mut r = exact(Algorithm::Bfs, &levels, &want);
    let edges: HashSet<(VertexId, VertexId)> = g.edges().collect();
    let bad_edges: Vec<usize> = (0..parents.len())
        .filter(|&v| {
            let p = parents[v];
            p >= 0 && p as usize != v && !edges.contains(&(p as VertexId, v as VertexId))
        })
        .collect();
    if let Some(&v) = bad_edges.first() {
        r.mismatches += bad_edges.len();
        r.pass = false;
        r.detail = format!("parent of {v} is {} but there is no such edge", parents[v]);
    }
    if parents.get(source as usize) != Some(&(source as i64)) {
        r.mismatches += 1;
        r.pass = false;
        r.detail = "source is not its own parent".into();
    }
    Ok(r)
}

/// Compares `values` (produced for `alg` on `g`) with the matching oracle.
pub fn compare(g: &Graph, alg: Algorithm, values: &Values, opts: &AlgoOptions) -> Result<Report> {
    Ok(match (alg, values) {
        (Algorithm::Bfs, Values::Parents(p)) => check_bfs(g, opts.source, p)?,
        (Algorithm::Sssp, Values::Distances(d)) => exact(alg, d, &oracle::dijkstra_oracle(g, opts.source)?),
        (Algorithm::PageRank, Values::Ranks(r)) => close(
            alg,
            r,
            &oracle::pagerank_dense_oracle(g, opts.max_iters, opts.tolerance)?,
            PR_TOLERANCE,
        ),
        (Algorithm::Cc, Values::Labels(l)) => exact(alg, l, &oracle::cc_unionfind_oracle(g)?),
        (Algorithm::Bc, Values::Centrality(c)) => {
            let sources = opts.sources.clone().unwrap_or_else(|| vec![opts.source]);
            close(alg, c, &oracle::brandes_oracle(g, &sources)?, BC_TOLERANCE)
        }
        _ => Report::new(alg, 1, 0.0, "output kind does not match the algorithm".into()),
    })
}

/// Compares two outputs of the same algorithm with the oracle notions of
/// equality (BFS by levels).
pub fn compare_values(alg: Algorithm, got: &Values, reference: &Values) -> Report {
    match (got, reference) {
        (Values::Parents(a), Values::Parents(b)) => match (levels_from_parents(a), levels_from_parents(b)) {
            (Some(a), Some(b)) => exact(alg, &a, &b),
            _ => Report::new(alg, 1, 0.0, "parents do not form a tree".into()),
        },
        (Values::Distances(a), Values::Distances(b)) => exact(alg, a, b),
        (Values::Labels(a), Values::Labels(b)) => exact(alg, a, b),
        (Values::Ranks(a), Values::Ranks(b)) => close(alg, a, b, PR_TOLERANCE),
        (Values::Centrality(a), Values::Centrality(b)) => close(alg, a, b, BC_TOLERANCE),
        _ => Report::new(alg, 1, 0.0, "output kinds differ".into()),
    }
}

/// True when the oracles accept a graph of this size for `alg`.
pub fn oracle_fits(g: &Graph, alg: Algorithm) -> bool {
    let limit = if alg == Algorithm::PageRank {
        oracle::DENSE_PR_LIMIT
    } else {
        oracle::ORACLE_LIMIT
    };
    g.num_vertices() <= limit
}

/// Runs `alg` under `program` and checks the result.
pub fn verify(
    engine: &mut Engine<'_>,
    alg: Algorithm,
    program: &ScheduleProgram,
    opts: &AlgoOptions,
) -> Result<Report> {
    let g = engine.graph();
    oracle::check_size(g, oracle::ORACLE_LIMIT)?;
    let r = algos::run(engine, alg, program, opts)?;
    compare(g, alg, &r.values, opts)
}
