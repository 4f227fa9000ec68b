use super::{check_source, force_push, on_symmetric, plan};
use crate::engine::{EdgeFunction, Engine, LoopBody, PullEdge, PushEdge, VertexArray};
use crate::error::{Error, Result};
use crate::frontier::VertexSubset;
use crate::graph::VertexId;
use crate::sched::{Binding, ScheduleProgram};

/// Forward step from level `round` to `round + 1`: claims the depth of
/// new vertices and accumulates shortest-path counts.
struct Forward<'a> {
    depth: &'a VertexArray<i64>,
    sigma: &'a VertexArray<f64>,
    round: i64,
}

impl EdgeFunction for Forward<'_> {
    fn filter(&self, dst: VertexId) -> bool {
        let d = self.depth.get(dst);
        d == -1 || d == self.round + 1
    }

    fn push(&self, e: &PushEdge<'_>) -> bool {
        let first = e.compare_and_swap(self.depth, e.dst, -1, self.round + 1);
        e.atomic_add(self.sigma, e.dst, self.sigma.get(e.src));
        first
    }

    fn pull(&self, e: &PullEdge<'_>) -> bool {
        let first = self.depth.get(e.dst) == -1;
        e.store_dst(self.depth, self.round + 1);
        e.store_dst(self.sigma, self.sigma.get(e.dst) + self.sigma.get(e.src));
        first
    }
}

/// Backward step: every vertex `w` at level `level + 1` pushes its
/// dependency share to predecessors at `level`.
struct Backward<'a> {
    depth: &'a VertexArray<i64>,
    sigma: &'a VertexArray<f64>,
    delta: &'a VertexArray<f64>,
    level: i64,
}

impl Backward<'_> {
    #[inline]
    fn share(&self, w: VertexId, v: VertexId) -> f64 {
        self.sigma.get(v) / self.sigma.get(w) * (1.0 + self.delta.get(w))
    }
}

impl EdgeFunction for Backward<'_> {
    fn filter(&self, dst: VertexId) -> bool {
        self.depth.get(dst) == self.level
    }

    fn push(&self, e: &PushEdge<'_>) -> bool {
        e.atomic_add(self.delta, e.dst, self.share(e.src, e.dst));
        false
    }

    fn pull(&self, e: &PullEdge<'_>) -> bool {
        e.store_dst(self.delta, self.delta.get(e.dst) + self.share(e.src, e.dst));
        false
    }
}

struct ForwardBody<'a> {
    frontier: Option<VertexSubset>,
    levels: Vec<VertexSubset>,
    depth: &'a VertexArray<i64>,
    sigma: &'a VertexArray<f64>,
    apply: &'a Binding,
}

impl<'g> LoopBody<'g> for ForwardBody<'_> {
    fn allocates_frontier(&self) -> bool {
        true
    }

    fn finished(&self) -> bool {
        self.frontier.as_ref().is_none_or(VertexSubset::is_empty)
    }

    fn round(&mut self, engine: &mut Engine<'g>) -> Result<()> {
        let input = self.frontier.take().expect("frontier present while running");
        self.levels.push(input.clone());
        let udf = Forward {
            depth: self.depth,
            sigma: self.sigma,
            round: self.levels.len() as i64 - 1,
        };
        self.frontier = Some(engine.apply(input, &udf, self.apply, false)?);
        Ok(())
    }
}

struct BackwardBody<'a> {
    levels: Vec<VertexSubset>,
    depth: &'a VertexArray<i64>,
    sigma: &'a VertexArray<f64>,
    delta: &'a VertexArray<f64>,
    apply: &'a Binding,
}

impl<'g> LoopBody<'g> for BackwardBody<'_> {
    fn finished(&self) -> bool {
        self.levels.len() < 2
    }

    fn round(&mut self, engine: &mut Engine<'g>) -> Result<()> {
        let mut top = self.levels.pop().expect("at least two levels");
        let udf = Backward {
            depth: self.depth,
            sigma: self.sigma,
            delta: self.delta,
            level: self.levels.len() as i64 - 1,
        };
        engine.apply_no_output(&mut top, &udf, self.apply)
    }
}

/// Betweenness centrality restricted to `sources` (Brandes). Scores are
/// unnormalized and halved so each unordered pair counts once. Directed
/// inputs are symmetrized first.
pub fn bc(engine: &mut Engine<'_>, sources: &[VertexId], program: &ScheduleProgram) -> Result<Vec<f64>> {
    if sources.is_empty() {
        return Err(Error::NoSources);
    }
    for &s in sources {
        check_source(engine.graph(), s)?;
    }
    on_symmetric(engine, "bc", |engine| {
        let (fwd_fusion, fwd) = plan(program, "s0", "s0:s1")?;
        let (back_fusion, back) = plan(program, "s1", "s1:s1")?;
        let back = force_push(&back);
        let n = engine.graph().num_vertices();
        engine.begin_run();
        let mut score = vec![0.0f64; n];
        for &s in sources {
            let mut depth = VertexArray::new(n, -1i64);
            let mut sigma = VertexArray::new(n, 0.0f64);
            depth.set(s, 0);
            sigma.set(s, 1.0);
            let frontier = engine.new_frontier(&[s])?;
            let mut forward = ForwardBody {
                frontier: Some(frontier),
                levels: Vec::new(),
                depth: &depth,
                sigma: &sigma,
                apply: &fwd,
            };
            engine.fused_loop(&mut forward, fwd_fusion)?;
            let delta = VertexArray::new(n, 0.0f64);
            let mut backward = BackwardBody {
                levels: forward.levels,
                depth: &depth,
                sigma: &sigma,
                delta: &delta,
                apply: &back,
            };
            engine.fused_loop(&mut backward, back_fusion)?;
            for (v, d) in delta.to_vec().into_iter().enumerate() {
                if v != s as usize {
                    score[v] += d;
                }
            }
        }
        Ok(score.into_iter().map(|x| x / 2.0).collect())
    })
}
