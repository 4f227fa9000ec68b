use std::sync::atomic::{AtomicBool, Ordering::Relaxed};

use super::{on_symmetric, plan};
use crate::engine::{EdgeFunction, Engine, LoopBody, PullEdge, PushEdge, VertexArray};
use crate::error::Result;
use crate::frontier::VertexSubset;
use crate::graph::VertexId;
use crate::sched::{Binding, ScheduleProgram};

struct Hook<'a> {
    label: &'a VertexArray<u64>,
    changed: &'a AtomicBool,
}

impl Hook<'_> {
    #[inline]
    fn hook(&self, u: VertexId, v: VertexId) {
        let (a, b) = (self.label.get(u), self.label.get(v));
        if a == b {
            return;
        }
        let (lo, hi) = (a.min(b), a.max(b));
        if self.label.get(hi as VertexId) == hi && self.label.compare_and_swap(hi as VertexId, hi, lo) {
            self.changed.store(true, Relaxed);
        }
    }
}

impl EdgeFunction for Hook<'_> {
    fn push(&self, e: &PushEdge<'_>) -> bool {
        self.hook(e.src, e.dst);
        false
    }

    fn pull(&self, e: &PullEdge<'_>) -> bool {
        self.hook(e.src, e.dst);
        false
    }
}

struct Body {
    all: VertexSubset,
    label: VertexArray<u64>,
    apply: Binding,
    done: bool,
}

impl<'g> LoopBody<'g> for Body {
    fn finished(&self) -> bool {
        self.done
    }

    fn round(&mut self, engine: &mut Engine<'g>) -> Result<()> {
        let changed = AtomicBool::new(false);
        let udf = Hook {
            label: &self.label,
            changed: &changed,
        };
        engine.apply_no_output(&mut self.all, &udf, &self.apply)?;
        let label = &self.label;
        loop {
            let jumped = AtomicBool::new(false);
            engine.vertex_map(|c| {
                let p = label.get(c.v);
                let pp = label.get(p as VertexId);
                if p != pp {
                    c.store(label, pp);
                    jumped.store(true, Relaxed);
                }
            });
            if !jumped.into_inner() {
                break;
            }
        }
        self.done = !changed.into_inner();
        Ok(())
    }
}

/// Connected components by hooking and pointer jumping. `labels[v]` is
/// the smallest vertex id in `v`'s component. Directed inputs are
/// symmetrized first.
pub fn cc_soman(engine: &mut Engine<'_>, program: &ScheduleProgram) -> Result<Vec<u32>> {
    on_symmetric(engine, "cc", |engine| {
        let (fusion, apply) = plan(program, "s0", "s0:s1")?;
        engine.begin_run();
        let n = engine.graph().num_vertices();
        let mut body = Body {
            all: engine.full_frontier(),
            label: VertexArray::from_vec((0..n as u64).collect()),
            apply,
            done: false,
        };
        engine.fused_loop(&mut body, fusion)?;
        let roots = body.label.to_vec();
        let mut min_of = vec![u32::MAX; n];
        for (v, &r) in roots.iter().enumerate() {
            min_of[r as usize] = min_of[r as usize].min(v as u32);
        }
        Ok(roots.iter().map(|&r| min_of[r as usize]).collect())
    })
}
