//! Execution engine: runs edge traversals under a schedule on a simulated
//! CTA/warp/thread hierarchy, tracks frontiers and counts dispatches.
//!
//! A *dispatch* is one entry into the worker pool from the driver. Every
//! traversal or vertex phase issued outside a dispatch opens its own; a
//! fused loop opens a single dispatch around all of its rounds.

mod data;
mod exec;
pub mod lb;

use std::collections::HashMap;
use std::sync::Arc;
use std::time::{Duration, Instant};

use serde::Serialize;

pub use data::{EdgeFunction, PullEdge, PushEdge, Scalar, VertexArray, VertexCtx};

use crate::blocking::{block_edges, default_segment_size, BlockedGraph, DEFAULT_CACHE_BUDGET};
use crate::error::{Error, Result};
use crate::frontier::{DedupTable, OutputFrontier, Repr, VertexSubset};
use crate::graph::{Graph, VertexId};
use crate::par::Pool;
use crate::sched::{Binding, DedupStrategy, Direction, HybridSchedule, LoadBalance, Schedule, ScheduleProgram};
use exec::Traversal;

/// Shape of the simulated hierarchy and the worker count.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ExecConfig {
    pub num_workers: usize,
    pub cta_size: usize,
    pub warp_size: usize,
    /// Run every parallel loop sequentially in task order.
    pub deterministic: bool,
}

impl Default for ExecConfig {
    fn default() -> Self {
        ExecConfig {
            num_workers: std::thread::available_parallelism().map_or(1, |n| n.get()),
            cta_size: 256,
            warp_size: 32,
            deterministic: false,
        }
    }
}

impl ExecConfig {
    pub fn with_workers(num_workers: usize) -> Self {
        ExecConfig {
            num_workers,
            ..Default::default()
        }
    }

    pub fn deterministic() -> Self {
        ExecConfig {
            deterministic: true,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.num_workers == 0 {
            return Err(Error::InvalidExec("num_workers must be at least 1".into()));
        }
        if self.warp_size == 0 || self.cta_size == 0 {
            return Err(Error::InvalidExec("cta_size and warp_size must be at least 1".into()));
        }
        if self.cta_size % self.warp_size != 0 {
            return Err(Error::InvalidExec(format!(
                "warp_size {} does not divide cta_size {}",
                self.warp_size, self.cta_size
            )));
        }
        Ok(())
    }
}

/// Counters collected over one algorithm run.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct RunStats {
    pub dispatch_count: u64,
    pub edges_traversed: u64,
    pub rounds: u64,
    pub direction_log: Vec<Direction>,
    pub frontier_conversions: u64,
    pub frontier_allocations: u64,
    pub reused_frontiers: u64,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub bucket_log: Vec<u64>,
}

/// Body of a driver loop run by [`Engine::fused_loop`].
pub trait LoopBody<'g>: Send {
    /// True when a round may allocate a fresh frontier, which rules out
    /// kernel fusion.
    fn allocates_frontier(&self) -> bool {
        false
    }

    /// Checked before every round.
    fn finished(&self) -> bool;

    fn round(&mut self, engine: &mut Engine<'g>) -> Result<()>;
}

pub struct Engine<'g> {
    graph: &'g Graph,
    exec: ExecConfig,
    pool: Pool,
    stats: RunStats,
    spare: Vec<VertexSubset>,
    dedup: [Option<DedupTable>; 3],
    blocked: HashMap<usize, Arc<BlockedGraph>>,
    cache_budget: usize,
    in_dispatch: bool,
    fused: bool,
}

fn dedup_slot(s: DedupStrategy) -> usize {
    match s {
        DedupStrategy::MonotonicCounters => 0,
        DedupStrategy::Bitmap => 1,
        DedupStrategy::Boolmap => 2,
    }
}

impl<'g> Engine<'g> {
    pub fn new(graph: &'g Graph, exec: ExecConfig) -> Result<Self> {
        exec.validate()?;
        Ok(Engine {
            graph,
            pool: Pool::new(exec.num_workers, exec.deterministic),
            exec,
            stats: RunStats::default(),
            spare: Vec::new(),
            dedup: Default::default(),
            blocked: HashMap::new(),
            cache_budget: DEFAULT_CACHE_BUDGET,
            in_dispatch: false,
            fused: false,
        })
    }

    pub fn graph(&self) -> &'g Graph {
        self.graph
    }

    pub fn exec(&self) -> &ExecConfig {
        &self.exec
    }

    pub fn stats(&self) -> &RunStats {
        &self.stats
    }

    pub fn stats_mut(&mut self) -> &mut RunStats {
        &mut self.stats
    }

    pub fn set_cache_budget(&mut self, bytes: usize) {
        self.cache_budget = bytes.max(1);
    }

    /// Resets counters, the frontier pool and dedup tables. Blocked graphs
    /// stay cached.
    pub fn begin_run(&mut self) {
        self.stats = RunStats::default();
        self.spare.clear();
        self.dedup = Default::default();
        self.in_dispatch = false;
        self.fused = false;
    }

    /// Installs a precomputed blocked graph for its segment size.
    pub fn set_blocked(&mut self, bg: BlockedGraph) -> Result<()> {
        if bg.num_vertices() != self.graph.num_vertices() || bg.num_edges() != self.graph.num_edges() {
            return Err(Error::BadBlockedFile(format!(
                "sidecar is for {} vertices / {} edges, graph has {} / {}",
                bg.num_vertices(),
                bg.num_edges(),
                self.graph.num_vertices(),
                self.graph.num_edges()
            )));
        }
        self.blocked.insert(bg.vertices_per_segment(), Arc::new(bg));
        Ok(())
    }

    pub fn segment_size(&self, s: &Schedule) -> usize {
        s.blocking_size
            .map_or_else(|| default_segment_size(8, self.cache_budget), |n| n as usize)
    }

    /// Builds the blocked edge lists any schedule in `program` needs and
    /// returns the time spent.
    pub fn prepare(&mut self, program: &ScheduleProgram) -> Result<Duration> {
        let start = Instant::now();
        for (_, b) in program.bindings() {
            let halves = match b {
                Binding::Simple(s) => vec![s],
                Binding::Hybrid(h) => vec![&h.s1, &h.s2],
            };
            for s in halves {
                self.blocked_for(s)?;
            }
        }
        Ok(start.elapsed())
    }

    fn blocked_for(&mut self, s: &Schedule) -> Result<Option<Arc<BlockedGraph>>> {
        if !s.blocking {
            return Ok(None);
        }
        let n = self.segment_size(s);
        if let Some(bg) = self.blocked.get(&n) {
            return Ok(Some(bg.clone()));
        }
        let bg = Arc::new(block_edges(self.graph, n)?);
        self.blocked.insert(n, bg.clone());
        Ok(Some(bg))
    }

    fn take_buffer(&mut self, reuse: bool) -> VertexSubset {
        if reuse {
            if let Some(b) = self.spare.pop() {
                self.stats.reused_frontiers += 1;
                return b;
            }
        }
        self.stats.frontier_allocations += 1;
        VertexSubset::empty(self.graph.num_vertices())
    }

    /// Returns a frontier's storage to the pool.
    pub fn recycle(&mut self, mut vs: VertexSubset) {
        if vs.universe() == self.graph.num_vertices() {
            vs.clear();
            self.spare.push(vs);
        }
    }

    /// Sparse frontier holding `ids`, built in pooled storage.
    pub fn new_frontier(&mut self, ids: &[VertexId]) -> Result<VertexSubset> {
        let n = self.graph.num_vertices();
        if let Some(&bad) = ids.iter().find(|&&v| v as usize >= n) {
            return Err(Error::VertexOutOfRange {
                vertex: bad as u64,
                num_vertices: n,
            });
        }
        let mut vs = self.take_buffer(true);
        vs.assign_sparse(ids);
        Ok(vs)
    }

    pub fn full_frontier(&mut self) -> VertexSubset {
        self.stats.frontier_allocations += 1;
        VertexSubset::full(self.graph.num_vertices())
    }

    /// Converts `vs` to a sparse list if it is dense.
    pub fn sparsify(&mut self, vs: &mut VertexSubset) {
        if vs.repr() != Repr::Sparse {
            vs.convert_on(Repr::Sparse, &self.pool);
            self.stats.frontier_conversions += 1;
        }
    }

    fn dispatch<R: Send>(&mut self, op: impl FnOnce(&mut Self) -> R + Send) -> R {
        if self.in_dispatch {
            return op(self);
        }
        self.stats.dispatch_count += 1;
        self.in_dispatch = true;
        let pool = self.pool.clone();
        let r = pool.install(|| op(self));
        self.in_dispatch = false;
        r
    }

    /// Runs `f` on every scanned edge of the active set and returns the new
    /// frontier. The input is consumed; with `reuse` its storage goes back
    /// to the pool and the output comes from the pool.
    pub fn edgeset_apply<F: EdgeFunction>(
        &mut self,
        input: VertexSubset,
        f: &F,
        s: &Schedule,
        reuse: bool,
    ) -> Result<VertexSubset> {
        self.dispatch(|eng| eng.apply_inner(input, f, s, reuse))
    }

    /// Traversal whose user function never enqueues; no frontier is built.
    pub fn edgeset_apply_no_output<F: EdgeFunction>(
        &mut self,
        input: &mut VertexSubset,
        f: &F,
        s: &Schedule,
    ) -> Result<()> {
        self.dispatch(|eng| {
            eng.check_input(input, s)?;
            eng.stats.direction_log.push(s.direction);
            if input.is_empty() {
                return Ok(());
            }
            eng.prepare_input(input, s);
            let blocked = eng.blocked_for(s)?;
            let t = Traversal {
                graph: eng.graph,
                pool: &eng.pool,
                exec: &eng.exec,
                schedule: s,
                input,
                blocked: blocked.as_deref(),
                f,
                out: None,
            };
            let n = t.run();
            eng.stats.edges_traversed += n;
            Ok(())
        })
    }

    /// Applies a bound schedule, choosing a hybrid half by input size.
    pub fn apply<F: EdgeFunction>(
        &mut self,
        input: VertexSubset,
        f: &F,
        binding: &Binding,
        reuse: bool,
    ) -> Result<VertexSubset> {
        match binding {
            Binding::Simple(s) => self.edgeset_apply(input, f, s, reuse),
            Binding::Hybrid(h) => self.hybrid_apply(input, f, h, reuse),
        }
    }

    pub fn apply_no_output<F: EdgeFunction>(
        &mut self,
        input: &mut VertexSubset,
        f: &F,
        binding: &Binding,
    ) -> Result<()> {
        let s = self.pick(input, binding)?.clone();
        self.edgeset_apply_no_output(input, f, &s)
    }

    pub fn hybrid_apply<F: EdgeFunction>(
        &mut self,
        input: VertexSubset,
        f: &F,
        h: &HybridSchedule,
        reuse: bool,
    ) -> Result<VertexSubset> {
        let s = if h.picks_second(input.len(), self.graph.num_vertices())? {
            &h.s2
        } else {
            &h.s1
        };
        self.edgeset_apply(input, f, s, reuse)
    }

    fn pick<'b>(&self, input: &VertexSubset, binding: &'b Binding) -> Result<&'b Schedule> {
        Ok(match binding {
            Binding::Simple(s) => s,
            Binding::Hybrid(h) => {
                if h.picks_second(input.len(), self.graph.num_vertices())? {
                    &h.s2
                } else {
                    &h.s1
                }
            }
        })
    }

    fn check_input(&self, input: &VertexSubset, s: &Schedule) -> Result<()> {
        s.check()?;
        if input.universe() != self.graph.num_vertices() {
            return Err(Error::UniverseMismatch {
                got: input.universe(),
                expected: self.graph.num_vertices(),
            });
        }
        Ok(())
    }

    /// Converts the input to what the schedule's traversal reads.
    fn prepare_input(&mut self, input: &mut VertexSubset, s: &Schedule) {
        let target = match (s.direction, s.load_balance) {
            (Direction::Push, LoadBalance::EdgeOnly) => {
                (input.repr() == Repr::Sparse).then(|| s.pull_frontier.repr())
            }
            (Direction::Push, _) => (input.repr() != Repr::Sparse).then_some(Repr::Sparse),
            (Direction::Pull, _) => (input.repr() != s.pull_frontier.repr()).then(|| s.pull_frontier.repr()),
        };
        if let Some(t) = target {
            input.convert_on(t, &self.pool);
            self.stats.frontier_conversions += 1;
        }
    }

    fn output_capacity(&self, input: &VertexSubset, s: &Schedule) -> usize {
        let g = self.graph;
        let bound = match (s.direction, input.repr()) {
            (Direction::Push, Repr::Sparse) => {
                let csr = g.out_csr();
                input
                    .sparse_slots()
                    .iter()
                    .map(|v| csr.degree(v.load(std::sync::atomic::Ordering::Relaxed)))
                    .sum()
            }
            (Direction::Push, _) => g.num_edges(),
            (Direction::Pull, _) => g.num_vertices(),
        };
        if s.dedup_table().is_some() {
            bound.min(g.num_vertices())
        } else {
            bound
        }
    }

    fn apply_inner<F: EdgeFunction>(
        &mut self,
        mut input: VertexSubset,
        f: &F,
        s: &Schedule,
        reuse: bool,
    ) -> Result<VertexSubset> {
        self.check_input(&input, s)?;
        if self.fused && !reuse {
            return Err(Error::FusionRequiresReuse);
        }
        self.stats.direction_log.push(s.direction);
        let buf = self.take_buffer(reuse);
        if input.is_empty() {
            if reuse {
                self.recycle(input);
            }
            return Ok(buf);
        }
        self.prepare_input(&mut input, s);
        let blocked = self.blocked_for(s)?;
        let capacity = self.output_capacity(&input, s);
        let n = self.graph.num_vertices();
        if let Some(st) = s.dedup_table() {
            self.dedup[dedup_slot(st)]
                .get_or_insert_with(|| DedupTable::new(n, st))
                .advance_round();
        }
        let table = s.dedup_table().and_then(|st| self.dedup[dedup_slot(st)].as_ref());
        let out = OutputFrontier::open(buf, s.frontier_creation, table, capacity);
        let scanned = Traversal {
            graph: self.graph,
            pool: &self.pool,
            exec: &self.exec,
            schedule: s,
            input: &input,
            blocked: blocked.as_deref(),
            f,
            out: Some(&out),
        }
        .run();
        let result = out.finish();
        self.stats.edges_traversed += scanned;
        if reuse {
            self.recycle(input);
        }
        Ok(result)
    }

    /// Runs `f` once per vertex in `0..num_vertices`, each call owning its
    /// vertex.
    pub fn vertex_map(&mut self, f: impl Fn(VertexCtx) + Sync + Send) {
        let n = self.graph.num_vertices();
        self.dispatch(|eng| {
            eng.pool.for_each_range(n, |r| {
                for v in r {
                    f(VertexCtx { v: v as VertexId });
                }
            })
        });
    }

    /// Sum of `f(v)` over all vertices; the result does not depend on the
    /// worker count.
    pub fn vertex_sum(&mut self, f: impl Fn(VertexId) -> f64 + Sync + Send) -> f64 {
        let n = self.graph.num_vertices();
        self.dispatch(|eng| eng.pool.sum_f64(n, |v| f(v as VertexId)))
    }

    /// Ordered map over `0..tasks` on the pool.
    pub fn par_map<T: Send>(&mut self, tasks: usize, f: impl Fn(usize) -> T + Sync + Send) -> Vec<T> {
        self.dispatch(|eng| eng.pool.map(tasks, f))
    }

    /// Runs `body` until it reports completion. With `fusion`, all rounds
    /// share one dispatch and every traversal must reuse frontier storage;
    /// without it each round is its own dispatch.
    pub fn fused_loop<B: LoopBody<'g>>(&mut self, body: &mut B, fusion: bool) -> Result<()> {
        if fusion && body.allocates_frontier() {
            return Err(Error::FusionRequiresReuse);
        }
        if fusion {
            self.dispatch(|eng| {
                eng.fused = true;
                let mut r = Ok(());
                while r.is_ok() && !body.finished() {
                    eng.stats.rounds += 1;
                    r = body.round(eng);
                }
                eng.fused = false;
                r
            })
        } else {
            while !body.finished() {
                self.dispatch(|eng| {
                    eng.stats.rounds += 1;
                    body.round(eng)
                })?;
            }
            Ok(())
        }
    }
}
