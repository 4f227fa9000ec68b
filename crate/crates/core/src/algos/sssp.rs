use super::{check_source, plan};
use crate::engine::{EdgeFunction, Engine, LoopBody, PullEdge, PushEdge};
use crate::error::{Error, Result};
use crate::graph::VertexId;
use crate::priority::{BucketQueue, INF};
use crate::sched::{Binding, ScheduleProgram};

struct Relax<'a> {
    q: &'a BucketQueue,
}

impl Relax<'_> {
    #[inline]
    fn relax(&self, src: VertexId, dst: VertexId, w: u32, out: Option<&crate::frontier::OutputFrontier<'_>>) {
        let d = self.q.priorities().get(src);
        if d != INF {
            self.q.update_priority_min(dst, d + u64::from(w), out);
        }
    }
}

impl EdgeFunction for Relax<'_> {
    fn push(&self, e: &PushEdge<'_>) -> bool {
        self.relax(e.src, e.dst, e.weight, e.output());
        false
    }

    fn pull(&self, e: &PullEdge<'_>) -> bool {
        self.relax(e.src, e.dst, e.weight, e.output());
        false
    }
}

struct Body {
    q: BucketQueue,
    apply: Binding,
    trace: Option<Vec<(u64, Vec<VertexId>)>>,
}

impl<'g> LoopBody<'g> for Body {
    fn finished(&self) -> bool {
        self.q.is_finished()
    }

    fn round(&mut self, engine: &mut Engine<'g>) -> Result<()> {
        if self.q.current().is_empty() {
            if !self.q.advance()? {
                return Ok(());
            }
            if let Some(t) = &mut self.trace {
                t.push((self.q.current_bucket_index(), self.q.current().members()));
            }
        }
        let input = self.q.take_current();
        let out = engine.apply(input, &Relax { q: &self.q }, &self.apply, true)?;
        self.q.set_current(out);
        Ok(())
    }
}

fn run(
    engine: &mut Engine<'_>,
    source: VertexId,
    program: &ScheduleProgram,
    delta: Option<u64>,
    trace: bool,
) -> Result<(Vec<u64>, Vec<(u64, Vec<VertexId>)>)> {
    let g = engine.graph();
    if !g.is_weighted() {
        return Err(Error::UnweightedGraph);
    }
    check_source(g, source)?;
    let (fusion, apply) = plan(program, "s0", "s0:s1")?;
    let delta = delta.unwrap_or(apply.primary().delta);
    engine.begin_run();
    let mut q = BucketQueue::new(g.num_vertices(), delta)?;
    q.seed(source, 0);
    q.open_current();
    let first = (q.current_bucket_index(), q.current().members());
    let mut body = Body {
        q,
        apply,
        trace: trace.then(|| vec![first]),
    };
    engine.fused_loop(&mut body, fusion)?;
    engine.stats_mut().bucket_log = body.q.bucket_log().to_vec();
    Ok((body.q.into_priorities().to_vec(), body.trace.unwrap_or_default()))
}

/// Delta-stepping shortest paths from `source`. Unreachable vertices get
/// [`INF`]. `delta` overrides the bucket width of the apply schedule.
pub fn sssp_delta(engine: &mut Engine<'_>, source: VertexId, program: &ScheduleProgram, delta: Option<u64>) -> Result<Vec<u64>> {
    Ok(run(engine, source, program, delta, false)?.0)
}

/// Like [`sssp_delta`], also returning each bucket's index and members at
/// the moment it became current.
pub fn sssp_delta_traced(
    engine: &mut Engine<'_>,
    source: VertexId,
    program: &ScheduleProgram,
    delta: Option<u64>,
) -> Result<(Vec<u64>, Vec<(u64, Vec<VertexId>)>)> {
    run(engine, source, program, delta, true)
}
