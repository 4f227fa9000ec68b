//! Edge traversal for one round: maps the active items onto logical CTAs,
//! warps and threads according to the load-balancing strategy and runs the
//! user function on every scanned edge.

use std::borrow::Cow;
use std::ops::Range;
use std::sync::atomic::{AtomicU32, AtomicU64, Ordering::Relaxed};

use super::data::{EdgeFunction, PullEdge, PushEdge};
use super::lb::{even_split, locate, partition_etwc, prefix_sum, snap_up, twc_class, TwcQueues};
use super::ExecConfig;
use crate::blocking::{apply_blocked_on, BlockedGraph};
use crate::frontier::{OutputFrontier, VertexSubset};
use crate::graph::{Csr, Graph, VertexId, Weight};
use crate::par::Pool;
use crate::sched::{Direction, LoadBalance, Schedule};

#[derive(Clone, Copy)]
enum Items<'a> {
    List(&'a [AtomicU32]),
    All(usize),
}

impl Items<'_> {
    #[inline]
    fn len(&self) -> usize {
        match self {
            Items::List(l) => l.len(),
            Items::All(n) => *n,
        }
    }

    #[inline]
    fn get(&self, i: usize) -> VertexId {
        match self {
            Items::List(l) => l[i].load(Relaxed),
            Items::All(_) => i as VertexId,
        }
    }
}

pub(crate) struct Traversal<'a, F> {
    pub graph: &'a Graph,
    pub pool: &'a Pool,
    pub exec: &'a ExecConfig,
    pub schedule: &'a Schedule,
    pub input: &'a VertexSubset,
    pub blocked: Option<&'a BlockedGraph>,
    pub f: &'a F,
    pub out: Option<&'a OutputFrontier<'a>>,
}

impl<F: EdgeFunction> Traversal<'_, F> {
    /// Runs the round and returns the number of edges scanned.
    pub fn run(&self) -> u64 {
        let pull = self.schedule.direction == Direction::Pull;
        let (csr, items) = if pull {
            (self.graph.in_csr(), Items::All(self.graph.num_vertices()))
        } else {
            (self.graph.out_csr(), Items::List(self.input.sparse_slots()))
        };
        let total = AtomicU64::new(0);
        let add = |n: u64| {
            total.fetch_add(n, Relaxed);
        };
        let (warp, cta) = (self.exec.warp_size, self.exec.cta_size);
        match self.schedule.load_balance {
            LoadBalance::VertexBased => self.pool.for_each_range(items.len(), |r| {
                add(r.map(|i| self.visit(csr, items.get(i), None, 1)).sum())
            }),
            LoadBalance::Cm => {
                let ctas = even_split(items.len(), self.pool.workers());
                self.pool.for_each(ctas.len(), |c| {
                    add(ctas[c].clone().map(|i| self.visit(csr, items.get(i), None, cta)).sum())
                });
            }
            LoadBalance::Wm => {
                let warps = even_split(items.len(), self.pool.workers() * (cta / warp));
                self.pool.for_each(warps.len(), |w| {
                    add(warps[w].clone().map(|i| self.visit(csr, items.get(i), None, warp)).sum())
                });
            }
            LoadBalance::Strict => add(self.strict(csr, items, pull)),
            LoadBalance::EdgeOnly if pull => add(self.strict(csr, items, true)),
            LoadBalance::EdgeOnly => add(self.edge_only_push()),
            LoadBalance::Etwc => {
                let blocks = items.len().div_ceil(cta);
                self.pool.for_each(blocks, |b| {
                    let mut stages: [Vec<(VertexId, Range<usize>)>; 3] = Default::default();
                    for i in b * cta..((b + 1) * cta).min(items.len()) {
                        let v = items.get(i);
                        let s = partition_etwc(csr.range(v), warp, cta);
                        for (q, r) in stages.iter_mut().zip([s.thread, s.warp, s.cta]) {
                            if !r.is_empty() {
                                q.push((v, r));
                            }
                        }
                    }
                    let mut n = 0;
                    for (q, gran) in stages.iter().zip([1, warp, cta]) {
                        for (v, r) in q {
                            n += self.visit(csr, *v, Some(r.clone()), gran);
                        }
                    }
                    add(n);
                });
            }
            LoadBalance::Twc => {
                const CHUNK: usize = 1 << 12;
                let parts: Vec<TwcQueues> = self.pool.map(items.len().div_ceil(CHUNK), |c| {
                    let mut q = TwcQueues::default();
                    for i in c * CHUNK..((c + 1) * CHUNK).min(items.len()) {
                        twc_class(&mut q, i, csr.degree(items.get(i)), warp, cta);
                    }
                    q
                });
                let mut q = TwcQueues::default();
                for p in parts {
                    q.cta.extend(p.cta);
                    q.warp.extend(p.warp);
                    q.thread.extend(p.thread);
                }
                self.pool.for_each(q.cta.len(), |k| add(self.visit(csr, items.get(q.cta[k]), None, cta)));
                self.pool.for_each_range(q.warp.len(), |r| {
                    add(r.map(|k| self.visit(csr, items.get(q.warp[k]), None, warp)).sum())
                });
                self.pool.for_each_range(q.thread.len(), |r| {
                    add(r.map(|k| self.visit(csr, items.get(q.thread[k]), None, 1)).sum())
                });
            }
        }
        total.into_inner()
    }

    /// Scans `edges` (default: all of `v`'s edges) with `gran` cooperating
    /// lanes, lane `l` taking every `gran`-th edge starting at offset `l`.
    #[inline]
    fn visit(&self, csr: Csr<'_>, v: VertexId, edges: Option<Range<usize>>, gran: usize) -> u64 {
        let edges = edges.unwrap_or_else(|| csr.range(v));
        let lanes = gran.clamp(1, edges.len().max(1));
        let mut scanned = 0;
        match self.schedule.direction {
            Direction::Push => {
                for lane in 0..lanes {
                    let mut e = edges.start + lane;
                    while e < edges.end {
                        self.push_edge(v, csr.neighbors[e], csr.weight(e));
                        e += lanes;
                    }
                }
                scanned = edges.len() as u64;
            }
            Direction::Pull => {
                for lane in 0..lanes {
                    let mut e = edges.start + lane;
                    while e < edges.end {
                        if !self.f.filter(v) {
                            return scanned;
                        }
                        scanned += 1;
                        let src = csr.neighbors[e];
                        if self.input.contains(src) {
                            let ctx = PullEdge {
                                src,
                                dst: v,
                                weight: csr.weight(e),
                                out: self.out,
                            };
                            if self.f.pull(&ctx) {
                                ctx.enqueue(v);
                            }
                        }
                        e += lanes;
                    }
                }
            }
        }
        scanned
    }

    #[inline]
    fn push_edge(&self, src: VertexId, dst: VertexId, weight: Weight) {
        if !self.f.filter(dst) {
            return;
        }
        let ctx = PushEdge {
            src,
            dst,
            weight,
            out: self.out,
        };
        if self.f.push(&ctx) {
            ctx.enqueue(dst);
        }
    }

    /// Even split of the concatenated edge sequence. When pulling, ranges
    /// are snapped to item boundaries so each destination has one owner.
    fn strict(&self, csr: Csr<'_>, items: Items<'_>, snap: bool) -> u64 {
        let prefix: Cow<'_, [usize]> = match items {
            Items::All(_) => Cow::Borrowed(csr.offsets),
            Items::List(_) => Cow::Owned(prefix_sum((0..items.len()).map(|i| csr.degree(items.get(i))))),
        };
        let ranges = even_split(*prefix.last().unwrap_or(&0), self.pool.workers());
        let total = AtomicU64::new(0);
        self.pool.for_each(ranges.len(), |w| {
            let (mut lo, mut hi) = (ranges[w].start, ranges[w].end);
            if snap {
                lo = snap_up(&prefix, lo);
                hi = snap_up(&prefix, hi);
            }
            let mut n = 0;
            let mut pos = lo;
            let mut i = if lo < hi { locate(&prefix, lo) } else { 0 };
            while pos < hi {
                let (a, b) = (prefix[i], prefix[i + 1]);
                if b > pos {
                    let v = items.get(i);
                    let base = csr.offsets[v as usize];
                    let end = hi.min(b);
                    n += self.visit(csr, v, Some(base + pos - a..base + end - a), 1);
                    pos = end;
                }
                i += 1;
            }
            total.fetch_add(n, Relaxed);
        });
        total.into_inner()
    }

    /// Flat scan of the edge list (or the blocked edge list), keeping edges
    /// whose source is active.
    fn edge_only_push(&self) -> u64 {
        let g = self.graph;
        let input = self.input;
        let all = input.is_full();
        let active = |u: VertexId| all || input.contains(u);
        if let Some(bg) = self.blocked {
            apply_blocked_on(
                bg,
                &|u, v, w| {
                    if active(u) {
                        self.push_edge(u, v, w);
                    }
                },
                self.pool,
            );
        } else {
            let (src, dst, w) = (g.coo_src(), g.coo_dst(), g.coo_weights());
            self.pool.for_each_range(g.num_edges(), |r| {
                for e in r {
                    let u = src[e];
                    if active(u) {
                        self.push_edge(u, dst[e], w.map_or(1, |w| w[e]));
                    }
                }
            });
        }
        if all {
            return g.num_edges() as u64;
        }
        let csr = g.out_csr();
        let parts = even_split(g.num_vertices(), self.pool.workers() * 4);
        self.pool
            .map(parts.len(), |p| {
                parts[p]
                    .clone()
                    .filter(|&v| input.contains(v as VertexId))
                    .map(|v| csr.degree(v as VertexId) as u64)
                    .sum::<u64>()
            })
            .into_iter()
            .sum()
    }
}
