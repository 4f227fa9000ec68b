//! The five algorithms, written against the engine and exposing labeled
//! schedule attachment points.
//!
//! | algorithm | labels |
//! |-----------|--------|
//! | bfs, pr, sssp, cc | `s0` (main loop), `s0:s1` (edge apply) |
//! | bc | `s0`/`s0:s1` (forward), `s1`/`s1:s1` (backward) |
//!
//! Loop labels take a simple schedule whose `kernel_fusion` flag controls
//! dispatch fusion. Apply labels take a simple or hybrid schedule.

mod bc;
mod bfs;
mod cc;
mod pr;
mod sssp;

use serde::Serialize;

pub use bc::bc;
pub use bfs::{bfs, levels_from_parents};
pub use cc::cc_soman;
pub use pr::{pagerank, DAMPING};
pub use sssp::{sssp_delta, sssp_delta_traced};

use crate::engine::{Engine, RunStats};
use crate::error::{Error, Result};
use crate::graph::{Graph, VertexId};
use crate::sched::{Binding, Schedule, ScheduleProgram};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Algorithm {
    Bfs,
    PageRank,
    Sssp,
    Cc,
    Bc,
}

impl Algorithm {
    pub const ALL: [Algorithm; 5] = [
        Algorithm::Bfs,
        Algorithm::PageRank,
        Algorithm::Sssp,
        Algorithm::Cc,
        Algorithm::Bc,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Bfs => "bfs",
            Algorithm::PageRank => "pr",
            Algorithm::Sssp => "sssp",
            Algorithm::Cc => "cc",
            Algorithm::Bc => "bc",
        }
    }

    pub fn from_name(s: &str) -> Option<Algorithm> {
        Algorithm::ALL.into_iter().find(|a| a.name() == s)
    }

    pub fn labels(self) -> &'static [&'static str] {
        match self {
            Algorithm::Bc => &["s0", "s0:s1", "s1", "s1:s1"],
            _ => &["s0", "s0:s1"],
        }
    }

    /// Label and a one-line description of what it controls.
    pub fn label_docs(self) -> Vec<(&'static str, &'static str)> {
        match self {
            Algorithm::Bc => vec![
                ("s0", "forward BFS loop (fusion flag)"),
                ("s0:s1", "forward edge apply counting shortest paths"),
                ("s1", "backward dependency loop (fusion flag)"),
                ("s1:s1", "backward edge apply (always PUSH)"),
            ],
            Algorithm::PageRank => vec![
                ("s0", "power-iteration loop (fusion flag)"),
                ("s0:s1", "rank gather over all edges"),
            ],
            Algorithm::Sssp => vec![
                ("s0", "bucket loop (fusion flag)"),
                ("s0:s1", "edge relaxation; its delta sets the bucket width"),
            ],
            Algorithm::Cc => vec![
                ("s0", "hook and jump loop (fusion flag)"),
                ("s0:s1", "hooking over all edges"),
            ],
            Algorithm::Bfs => vec![
                ("s0", "frontier loop (fusion flag)"),
                ("s0:s1", "edge apply setting parents"),
            ],
        }
    }

    pub fn needs_weights(self) -> bool {
        self == Algorithm::Sssp
    }

    pub fn needs_symmetric(self) -> bool {
        matches!(self, Algorithm::Cc | Algorithm::Bc)
    }
}

impl std::fmt::Display for Algorithm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug)]
pub struct AlgoOptions {
    pub source: VertexId,
    /// BC sources; defaults to `[source]`.
    pub sources: Option<Vec<VertexId>>,
    /// Overrides the delta of the SSSP apply schedule.
    pub delta: Option<u64>,
    pub max_iters: usize,
    pub tolerance: f64,
    pub reuse_frontier: bool,
}

impl Default for AlgoOptions {
    fn default() -> Self {
        AlgoOptions {
            source: 0,
            sources: None,
            delta: None,
            max_iters: 100,
            tolerance: 1e-10,
            reuse_frontier: true,
        }
    }
}

/// Per-vertex output of one algorithm.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Values {
    Parents(Vec<i64>),
    Ranks(Vec<f64>),
    Distances(Vec<u64>),
    Labels(Vec<u32>),
    Centrality(Vec<f64>),
}

impl Values {
    pub fn len(&self) -> usize {
        match self {
            Values::Parents(v) => v.len(),
            Values::Ranks(v) | Values::Centrality(v) => v.len(),
            Values::Distances(v) => v.len(),
            Values::Labels(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// One value per line, `inf` for unreachable distances.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        match self {
            Values::Parents(v) => v.iter().for_each(|x| s.push_str(&format!("{x}\n"))),
            Values::Ranks(v) | Values::Centrality(v) => v.iter().for_each(|x| s.push_str(&format!("{x:e}\n"))),
            Values::Distances(v) => v.iter().for_each(|&x| {
                if x == crate::priority::INF {
                    s.push_str("inf\n")
                } else {
                    s.push_str(&format!("{x}\n"))
                }
            }),
            Values::Labels(v) => v.iter().for_each(|x| s.push_str(&format!("{x}\n"))),
        }
        s
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct AlgoResult {
    pub values: Values,
    pub stats: RunStats,
}

/// Runs `alg` on the engine's graph under `program`.
pub fn run(engine: &mut Engine<'_>, alg: Algorithm, program: &ScheduleProgram, opts: &AlgoOptions) -> Result<AlgoResult> {
    program.check_labels(alg.labels())?;
    let values = match alg {
        Algorithm::Bfs => Values::Parents(bfs(engine, opts.source, program, opts)?),
        Algorithm::PageRank => Values::Ranks(pagerank(engine, program, opts.max_iters, opts.tolerance)?),
        Algorithm::Sssp => Values::Distances(sssp_delta(engine, opts.source, program, opts.delta)?),
        Algorithm::Cc => Values::Labels(cc_soman(engine, program)?),
        Algorithm::Bc => {
            let sources = opts.sources.clone().unwrap_or_else(|| vec![opts.source]);
            Values::Centrality(bc(engine, &sources, program)?)
        }
    };
    Ok(AlgoResult {
        values,
        stats: engine.stats().clone(),
    })
}

/// Fusion flag of a loop label and the binding of its apply label.
pub(crate) fn plan(program: &ScheduleProgram, loop_label: &str, apply_label: &str) -> Result<(bool, Binding)> {
    let fusion = match program.get(loop_label) {
        None => false,
        Some(Binding::Simple(s)) => {
            s.check()?;
            s.kernel_fusion
        }
        Some(Binding::Hybrid(_)) => return Err(Error::LoopLabelNeedsSimple(loop_label.to_string())),
    };
    let apply = program.get(apply_label).cloned().unwrap_or_default();
    let violations = apply.validate();
    if !violations.is_empty() {
        return Err(Error::InvalidSchedule(violations));
    }
    Ok((fusion, apply))
}

pub(crate) fn check_source(g: &Graph, v: VertexId) -> Result<()> {
    if (v as usize) < g.num_vertices() {
        Ok(())
    } else {
        Err(Error::VertexOutOfRange {
            vertex: v as u64,
            num_vertices: g.num_vertices(),
        })
    }
}

/// Runs `f` on a symmetrized copy when the engine's graph is directed,
/// carrying the counters back.
pub(crate) fn on_symmetric<T>(
    engine: &mut Engine<'_>,
    what: &str,
    f: impl FnOnce(&mut Engine<'_>) -> Result<T>,
) -> Result<T> {
    let g = engine.graph();
    if g.is_symmetric() {
        return f(engine);
    }
    log::warn!("{what} expects an undirected graph; symmetrizing on the fly");
    let (sym, _) = g.symmetrized();
    let mut inner = Engine::new(&sym, engine.exec().clone())?;
    let r = f(&mut inner);
    *engine.stats_mut() = inner.stats().clone();
    r
}

/// The schedule used for a phase pinned to one direction.
pub(crate) fn force_push(b: &Binding) -> Binding {
    let fix = |s: &Schedule| {
        let mut s = s.clone();
        if s.direction != crate::sched::Direction::Push {
            log::warn!("backward BC apply runs PUSH only; ignoring {}", s.direction);
            s.direction = crate::sched::Direction::Push;
        }
        s
    };
    match b {
        Binding::Simple(s) => Binding::Simple(fix(s)),
        Binding::Hybrid(h) => Binding::Simple(fix(&h.s1)),
    }
}

#[cfg(test)]
mod tests;
