use super::{check_source, plan, AlgoOptions};
use crate::engine::{EdgeFunction, Engine, LoopBody, PullEdge, PushEdge, VertexArray};
use crate::error::Result;
use crate::frontier::VertexSubset;
use crate::graph::VertexId;
use crate::sched::{Binding, ScheduleProgram};

struct SetParent<'a> {
    parent: &'a VertexArray<i64>,
}

impl EdgeFunction for SetParent<'_> {
    fn filter(&self, dst: VertexId) -> bool {
        self.parent.get(dst) == -1
    }

    fn push(&self, e: &PushEdge<'_>) -> bool {
        e.compare_and_swap(self.parent, e.dst, -1, e.src as i64)
    }

    fn pull(&self, e: &PullEdge<'_>) -> bool {
        e.store_dst(self.parent, e.src as i64);
        true
    }
}

struct Body<'a> {
    frontier: Option<VertexSubset>,
    parent: &'a VertexArray<i64>,
    apply: Binding,
    reuse: bool,
}

impl<'g> LoopBody<'g> for Body<'_> {
    fn allocates_frontier(&self) -> bool {
        !self.reuse
    }

    fn finished(&self) -> bool {
        self.frontier.as_ref().is_none_or(VertexSubset::is_empty)
    }

    fn round(&mut self, engine: &mut Engine<'g>) -> Result<()> {
        let input = self.frontier.take().expect("frontier present while running");
        let udf = SetParent { parent: self.parent };
        self.frontier = Some(engine.apply(input, &udf, &self.apply, self.reuse)?);
        Ok(())
    }
}

/// Breadth-first search from `source`. Returns parents: `source` maps to
/// itself, unreached vertices to -1.
pub fn bfs(engine: &mut Engine<'_>, source: VertexId, program: &ScheduleProgram, opts: &AlgoOptions) -> Result<Vec<i64>> {
    let g = engine.graph();
    check_source(g, source)?;
    let (fusion, apply) = plan(program, "s0", "s0:s1")?;
    engine.begin_run();
    let mut parent = VertexArray::new(g.num_vertices(), -1i64);
    parent.set(source, source as i64);
    let frontier = engine.new_frontier(&[source])?;
    let mut body = Body {
        frontier: Some(frontier),
        parent: &parent,
        apply,
        reuse: opts.reuse_frontier,
    };
    engine.fused_loop(&mut body, fusion)?;
    Ok(parent.to_vec())
}

/// BFS levels implied by a parent array (-1 where unreached). Returns
/// `None` when the parents do not form a tree rooted at a self-parent.
pub fn levels_from_parents(parent: &[i64]) -> Option<Vec<i64>> {
    let n = parent.len();
    let mut level = vec![-2i64; n];
    for start in 0..n {
        if level[start] != -2 {
            continue;
        }
        let mut chain = Vec::new();
        let mut v = start;
        let base = loop {
            if level[v] != -2 {
                break level[v];
            }
            let p = parent[v];
            if p == -1 {
                level[v] = -1;
                break -1;
            }
            if p < 0 || p as usize >= n || chain.len() > n {
                return None;
            }
            if p as usize == v {
                level[v] = 0;
                break 0;
            }
            chain.push(v);
            v = p as usize;
        };
        for (k, &u) in chain.iter().rev().enumerate() {
            if base < 0 {
                return None;
            }
            level[u] = base + 1 + k as i64;
        }
    }
    Some(level)
}
