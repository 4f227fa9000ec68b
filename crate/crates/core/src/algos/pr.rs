use super::plan;
use crate::engine::{EdgeFunction, Engine, LoopBody, PullEdge, PushEdge, VertexArray};
use crate::error::{Error, Result};
use crate::frontier::VertexSubset;
use crate::graph::VertexId;
use crate::sched::{Binding, ScheduleProgram};

pub const DAMPING: f64 = 0.85;

struct Gather<'a> {
    contrib: &'a VertexArray<f64>,
    sum: &'a VertexArray<f64>,
}

impl EdgeFunction for Gather<'_> {
    fn push(&self, e: &PushEdge<'_>) -> bool {
        e.atomic_add(self.sum, e.dst, self.contrib.get(e.src));
        false
    }

    fn pull(&self, e: &PullEdge<'_>) -> bool {
        e.store_dst(self.sum, self.sum.get(e.dst) + self.contrib.get(e.src));
        false
    }
}

struct Body<'a> {
    all: VertexSubset,
    rank: VertexArray<f64>,
    next: VertexArray<f64>,
    contrib: VertexArray<f64>,
    sum: VertexArray<f64>,
    degree: &'a [usize],
    apply: Binding,
    iters: usize,
    max_iters: usize,
    tolerance: f64,
    change: f64,
}

impl<'g> LoopBody<'g> for Body<'_> {
    fn finished(&self) -> bool {
        self.iters >= self.max_iters || self.change < self.tolerance
    }

    fn round(&mut self, engine: &mut Engine<'g>) -> Result<()> {
        let n = self.degree.len() as f64;
        let (rank, contrib, sum, degree) = (&self.rank, &self.contrib, &self.sum, self.degree);
        engine.vertex_map(|c| {
            let d = degree[c.v as usize];
            c.store(contrib, if d == 0 { 0.0 } else { rank.get(c.v) / d as f64 });
            c.store(sum, 0.0);
        });
        engine.apply_no_output(&mut self.all, &Gather { contrib, sum }, &self.apply)?;
        let dangling = engine.vertex_sum(|v| if degree[v as usize] == 0 { rank.get(v) } else { 0.0 });
        let base = (1.0 - DAMPING) / n + DAMPING * dangling / n;
        let next = &self.next;
        engine.vertex_map(|c| c.store(next, base + DAMPING * sum.get(c.v)));
        self.change = engine.vertex_sum(|v| (next.get(v) - rank.get(v)).abs());
        std::mem::swap(&mut self.rank, &mut self.next);
        self.iters += 1;
        Ok(())
    }
}

/// Power iteration with damping 0.85, uniform teleport and dangling mass
/// spread uniformly. Stops after `max_iters` iterations or once the L1
/// change of an iteration drops below `tolerance`.
pub fn pagerank(engine: &mut Engine<'_>, program: &ScheduleProgram, max_iters: usize, tolerance: f64) -> Result<Vec<f64>> {
    let g = engine.graph();
    let n = g.num_vertices();
    if n == 0 {
        return Err(Error::EmptyGraph);
    }
    let (fusion, apply) = plan(program, "s0", "s0:s1")?;
    engine.begin_run();
    let degree: Vec<usize> = (0..n as VertexId).map(|v| g.out_csr().degree(v)).collect();
    let mut body = Body {
        all: engine.full_frontier(),
        rank: VertexArray::new(n, 1.0 / n as f64),
        next: VertexArray::new(n, 0.0),
        contrib: VertexArray::new(n, 0.0),
        sum: VertexArray::new(n, 0.0),
        degree: &degree,
        apply,
        iters: 0,
        max_iters,
        tolerance,
        change: f64::INFINITY,
    };
    engine.fused_loop(&mut body, fusion)?;
    Ok(body.rank.to_vec())
}
