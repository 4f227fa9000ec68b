//! Active-vertex sets in sparse, bitmap or boolmap form, the concurrent
//! output builder used during traversals, and deduplication tables.
//!
//! A [`VertexSubset`] keeps storage for all three representations and
//! reuses it across conversions, so a recycled subset never reallocates
//! once it has grown to the working size.

use std::sync::atomic::{AtomicU32, AtomicU64, AtomicU8, AtomicUsize, Ordering::Relaxed};
use std::sync::Mutex;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::VertexId;
use crate::par::Pool;
use crate::sched::{DedupStrategy, FrontierCreation};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Repr {
    Sparse,
    Bitmap,
    Boolmap,
}

pub struct VertexSubset {
    universe: usize,
    repr: Repr,
    size: usize,
    sparse: Vec<AtomicU32>,
    bits: Vec<AtomicU64>,
    bytes: Vec<AtomicU8>,
}

impl Clone for VertexSubset {
    fn clone(&self) -> Self {
        let mut out = VertexSubset::empty(self.universe);
        out.repr = self.repr;
        out.size = self.size;
        match self.repr {
            Repr::Sparse => out.sparse = copy_atomics(&self.sparse[..self.size]),
            Repr::Bitmap => out.bits = copy_atomics64(&self.bits),
            Repr::Boolmap => out.bytes = copy_atomics8(&self.bytes),
        }
        out
    }
}

fn copy_atomics(s: &[AtomicU32]) -> Vec<AtomicU32> {
    s.iter().map(|x| AtomicU32::new(x.load(Relaxed))).collect()
}
fn copy_atomics64(s: &[AtomicU64]) -> Vec<AtomicU64> {
    s.iter().map(|x| AtomicU64::new(x.load(Relaxed))).collect()
}
fn copy_atomics8(s: &[AtomicU8]) -> Vec<AtomicU8> {
    s.iter().map(|x| AtomicU8::new(x.load(Relaxed))).collect()
}

fn zeroed<T>(v: &mut Vec<T>, len: usize, zero: impl Fn() -> T, reset: impl Fn(&T)) {
    v.truncate(len);
    v.iter().for_each(reset);
    v.resize_with(len, zero);
}

impl std::fmt::Debug for VertexSubset {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("VertexSubset")
            .field("universe", &self.universe)
            .field("repr", &self.repr)
            .field("size", &self.size)
            .finish()
    }
}

impl VertexSubset {
    /// Empty sparse subset.
    pub fn empty(universe: usize) -> Self {
        VertexSubset {
            universe,
            repr: Repr::Sparse,
            size: 0,
            sparse: Vec::new(),
            bits: Vec::new(),
            bytes: Vec::new(),
        }
    }

    /// Sparse subset holding `ids` in the given order (duplicates kept).
    pub fn from_vertices(universe: usize, ids: &[VertexId]) -> Result<Self> {
        if let Some(&bad) = ids.iter().find(|&&v| v as usize >= universe) {
            return Err(Error::VertexOutOfRange {
                vertex: bad as u64,
                num_vertices: universe,
            });
        }
        let mut vs = VertexSubset::empty(universe);
        vs.sparse = ids.iter().map(|&v| AtomicU32::new(v)).collect();
        vs.size = ids.len();
        Ok(vs)
    }

    /// Every vertex, as a boolmap.
    pub fn full(universe: usize) -> Self {
        let mut vs = VertexSubset::empty(universe);
        vs.bytes = (0..universe).map(|_| AtomicU8::new(1)).collect();
        vs.repr = Repr::Boolmap;
        vs.size = universe;
        vs
    }

    pub fn universe(&self) -> usize {
        self.universe
    }

    pub fn repr(&self) -> Repr {
        self.repr
    }

    /// Number of entries; counts duplicates in a sparse subset.
    pub fn len(&self) -> usize {
        self.size
    }

    pub fn is_empty(&self) -> bool {
        self.size == 0
    }

    /// True when the subset is a dense representation of every vertex.
    pub fn is_full(&self) -> bool {
        self.repr != Repr::Sparse && self.size == self.universe
    }

    /// Sparse entries; empty unless the representation is sparse.
    pub(crate) fn sparse_slots(&self) -> &[AtomicU32] {
        if self.repr == Repr::Sparse {
            &self.sparse[..self.size]
        } else {
            &[]
        }
    }

    /// Membership test for dense representations; sparse falls back to a
    /// linear scan.
    #[inline]
    pub fn contains(&self, v: VertexId) -> bool {
        let v = v as usize;
        match self.repr {
            Repr::Boolmap => self.bytes[v].load(Relaxed) != 0,
            Repr::Bitmap => self.bits[v / 64].load(Relaxed) & (1 << (v % 64)) != 0,
            Repr::Sparse => self.sparse[..self.size].iter().any(|x| x.load(Relaxed) as usize == v),
        }
    }

    /// Entries as stored: sparse order for sparse, ascending otherwise.
    pub fn to_vec(&self) -> Vec<VertexId> {
        match self.repr {
            Repr::Sparse => self.sparse[..self.size].iter().map(|x| x.load(Relaxed)).collect(),
            _ => (0..self.universe as VertexId).filter(|&v| self.contains(v)).collect(),
        }
    }

    /// Distinct members in ascending order.
    pub fn members(&self) -> Vec<VertexId> {
        let mut v = self.to_vec();
        v.sort_unstable();
        v.dedup();
        v
    }

    /// Returns a copy in the target representation.
    pub fn converted(&self, target: Repr) -> VertexSubset {
        let mut c = self.clone();
        c.convert(target);
        c
    }

    /// Converts in place, reusing this subset's storage.
    pub fn convert(&mut self, target: Repr) {
        self.convert_on(target, &Pool::new(1, true));
    }

    pub(crate) fn convert_on(&mut self, target: Repr, pool: &Pool) {
        if target == self.repr {
            return;
        }
        let n = self.universe;
        match (self.repr, target) {
            (Repr::Sparse, Repr::Boolmap) => {
                zeroed(&mut self.bytes, n, || AtomicU8::new(0), |x| x.store(0, Relaxed));
                let count = AtomicUsize::new(0);
                let (ids, bytes) = (&self.sparse[..self.size], &self.bytes);
                pool.for_each_range(ids.len(), |r| {
                    let fresh = ids[r]
                        .iter()
                        .filter(|x| bytes[x.load(Relaxed) as usize].swap(1, Relaxed) == 0)
                        .count();
                    count.fetch_add(fresh, Relaxed);
                });
                self.size = count.into_inner();
            }
            (Repr::Sparse, Repr::Bitmap) => {
                zeroed(&mut self.bits, n.div_ceil(64), || AtomicU64::new(0), |x| x.store(0, Relaxed));
                let count = AtomicUsize::new(0);
                let (ids, bits) = (&self.sparse[..self.size], &self.bits);
                pool.for_each_range(ids.len(), |r| {
                    let fresh = ids[r]
                        .iter()
                        .filter(|x| {
                            let v = x.load(Relaxed) as usize;
                            let m = 1u64 << (v % 64);
                            bits[v / 64].fetch_or(m, Relaxed) & m == 0
                        })
                        .count();
                    count.fetch_add(fresh, Relaxed);
                });
                self.size = count.into_inner();
            }
            (Repr::Boolmap, Repr::Bitmap) => {
                zeroed(&mut self.bits, n.div_ceil(64), || AtomicU64::new(0), |x| x.store(0, Relaxed));
                let (bytes, bits) = (&self.bytes, &self.bits);
                pool.for_each_range(bits.len(), |r| {
                    for w in r {
                        let mut word = 0u64;
                        for b in 0..64.min(n - w * 64) {
                            word |= u64::from(bytes[w * 64 + b].load(Relaxed) != 0) << b;
                        }
                        bits[w].store(word, Relaxed);
                    }
                });
            }
            (Repr::Bitmap, Repr::Boolmap) => {
                zeroed(&mut self.bytes, n, || AtomicU8::new(0), |x| x.store(0, Relaxed));
                let (bytes, bits) = (&self.bytes, &self.bits);
                pool.for_each_range(n, |r| {
                    for v in r {
                        let set = bits[v / 64].load(Relaxed) >> (v % 64) & 1;
                        bytes[v].store(set as u8, Relaxed);
                    }
                });
            }
            (_, Repr::Sparse) => {
                // per-chunk buffers concatenated in chunk order
                const CHUNK: usize = 1 << 14;
                let chunks = n.div_ceil(CHUNK);
                let this = &*self;
                let parts: Vec<Vec<VertexId>> = pool.map(chunks, |c| {
                    (c * CHUNK..((c + 1) * CHUNK).min(n))
                        .filter(|&v| this.contains(v as VertexId))
                        .map(|v| v as VertexId)
                        .collect()
                });
                let total: usize = parts.iter().map(Vec::len).sum();
                if self.sparse.len() < total {
                    self.sparse.resize_with(total, || AtomicU32::new(0));
                }
                let mut i = 0;
                for v in parts.into_iter().flatten() {
                    self.sparse[i].store(v, Relaxed);
                    i += 1;
                }
                self.size = total;
            }
            _ => unreachable!(),
        }
        self.repr = target;
    }

    /// Replaces the contents with `ids` as a sparse subset, reusing storage.
    pub(crate) fn assign_sparse(&mut self, ids: &[VertexId]) {
        if self.sparse.len() < ids.len() {
            self.sparse.resize_with(ids.len(), || AtomicU32::new(0));
        }
        for (slot, &v) in self.sparse.iter().zip(ids) {
            slot.store(v, Relaxed);
        }
        self.repr = Repr::Sparse;
        self.size = ids.len();
    }

    /// Empties the subset, keeping its storage for reuse.
    pub(crate) fn clear(&mut self) {
        self.repr = Repr::Sparse;
        self.size = 0;
    }
}

/// Per-vertex claim table used to deduplicate a sparse output frontier.
pub struct DedupTable {
    strategy: DedupStrategy,
    counters: Vec<AtomicU32>,
    bits: Vec<AtomicU64>,
    bytes: Vec<AtomicU8>,
    round: u32,
}

impl DedupTable {
    pub fn new(universe: usize, strategy: DedupStrategy) -> Self {
        let mut t = DedupTable {
            strategy,
            counters: Vec::new(),
            bits: Vec::new(),
            bytes: Vec::new(),
            round: 1,
        };
        match strategy {
            DedupStrategy::MonotonicCounters => {
                t.counters = (0..universe).map(|_| AtomicU32::new(0)).collect()
            }
            DedupStrategy::Bitmap => {
                t.bits = (0..universe.div_ceil(64)).map(|_| AtomicU64::new(0)).collect()
            }
            DedupStrategy::Boolmap => t.bytes = (0..universe).map(|_| AtomicU8::new(0)).collect(),
        }
        t
    }

    pub fn strategy(&self) -> DedupStrategy {
        self.strategy
    }

    pub fn current_round(&self) -> u32 {
        self.round
    }

    /// Opens the next round. Counters are never cleared: a stale stamp
    /// simply differs from the new round number.
    pub fn advance_round(&mut self) {
        self.round += 1;
    }

    /// Atomically claims `v` for this round; true for the first caller only.
    #[inline]
    pub fn try_claim(&self, v: VertexId) -> bool {
        let v = v as usize;
        match self.strategy {
            DedupStrategy::MonotonicCounters => self.counters[v].swap(self.round, Relaxed) != self.round,
            DedupStrategy::Bitmap => {
                let m = 1u64 << (v % 64);
                self.bits[v / 64].fetch_or(m, Relaxed) & m == 0
            }
            DedupStrategy::Boolmap => self.bytes[v].swap(1, Relaxed) == 0,
        }
    }

    /// Clears bitmap/boolmap claims of the given vertices.
    fn release(&self, ids: impl Iterator<Item = VertexId>) {
        match self.strategy {
            DedupStrategy::MonotonicCounters => {}
            DedupStrategy::Bitmap => ids.for_each(|v| {
                self.bits[v as usize / 64].fetch_and(!(1 << (v % 64)), Relaxed);
            }),
            DedupStrategy::Boolmap => ids.for_each(|v| self.bytes[v as usize].store(0, Relaxed)),
        }
    }
}

/// Write side of a frontier during one traversal round. Accepts concurrent
/// enqueues from any worker.
pub struct OutputFrontier<'a> {
    vs: VertexSubset,
    creation: FrontierCreation,
    dedup: Option<&'a DedupTable>,
    tail: AtomicUsize,
    capacity: usize,
    spill: Mutex<Vec<VertexId>>,
}

impl<'a> OutputFrontier<'a> {
    /// Opens `buf` for writing. `capacity` is the expected number of sparse
    /// enqueues; overflow goes to a locked spill list.
    pub fn open(
        mut buf: VertexSubset,
        creation: FrontierCreation,
        dedup: Option<&'a DedupTable>,
        capacity: usize,
    ) -> Self {
        let n = buf.universe;
        buf.size = 0;
        match creation {
            FrontierCreation::Fused => {
                buf.repr = Repr::Sparse;
                if buf.sparse.len() < capacity {
                    buf.sparse.resize_with(capacity, || AtomicU32::new(0));
                }
            }
            FrontierCreation::UnfusedBoolmap => {
                buf.repr = Repr::Boolmap;
                zeroed(&mut buf.bytes, n, || AtomicU8::new(0), |x| x.store(0, Relaxed));
            }
            FrontierCreation::UnfusedBitmap => {
                buf.repr = Repr::Bitmap;
                zeroed(&mut buf.bits, n.div_ceil(64), || AtomicU64::new(0), |x| x.store(0, Relaxed));
            }
        }
        let capacity = buf.sparse.len();
        OutputFrontier {
            vs: buf,
            creation,
            dedup,
            tail: AtomicUsize::new(0),
            capacity,
            spill: Mutex::new(Vec::new()),
        }
    }

    pub fn universe(&self) -> usize {
        self.vs.universe
    }

    /// Adds `v`; returns whether it was accepted. Dense outputs deduplicate
    /// by test-and-set; sparse outputs use the dedup table when present.
    #[inline]
    pub fn enqueue(&self, v: VertexId) -> bool {
        match self.creation {
            FrontierCreation::Fused => {
                if let Some(d) = self.dedup {
                    if !d.try_claim(v) {
                        return false;
                    }
                }
                let slot = self.tail.fetch_add(1, Relaxed);
                if slot < self.capacity {
                    self.vs.sparse[slot].store(v, Relaxed);
                } else {
                    self.spill.lock().unwrap_or_else(|e| e.into_inner()).push(v);
                }
                true
            }
            FrontierCreation::UnfusedBoolmap => {
                let fresh = self.vs.bytes[v as usize].swap(1, Relaxed) == 0;
                if fresh {
                    self.tail.fetch_add(1, Relaxed);
                }
                fresh
            }
            FrontierCreation::UnfusedBitmap => {
                let m = 1u64 << (v % 64);
                let fresh = self.vs.bits[v as usize / 64].fetch_or(m, Relaxed) & m == 0;
                if fresh {
                    self.tail.fetch_add(1, Relaxed);
                }
                fresh
            }
        }
    }

    pub fn finish(self) -> VertexSubset {
        let OutputFrontier {
            mut vs,
            creation,
            dedup,
            tail,
            capacity,
            spill,
        } = self;
        let count = tail.into_inner();
        if creation == FrontierCreation::Fused {
            let spill = spill.into_inner().unwrap_or_else(|e| e.into_inner());
            vs.size = count.min(capacity);
            vs.sparse.truncate(vs.size);
            vs.sparse.extend(spill.into_iter().map(AtomicU32::new));
            vs.size = count;
            if let Some(d) = dedup {
                d.release(vs.sparse[..vs.size].iter().map(|x| x.load(Relaxed)));
            }
        } else {
            vs.size = count;
        }
        vs
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::sync::Barrier;

    #[test]
    fn from_vertices_sizes() {
        assert_eq!(VertexSubset::from_vertices(4, &[2]).unwrap().len(), 1);
        assert_eq!(VertexSubset::from_vertices(4, &[]).unwrap().len(), 0);
        let vs = VertexSubset::from_vertices(4, &[0, 3]).unwrap();
        assert_eq!(vs.len(), 2);
        let bm = vs.converted(Repr::Bitmap);
        assert_eq!(bm.bits[0].load(Relaxed), 0b1001);
        assert!(VertexSubset::from_vertices(4, &[4]).is_err());
    }

    #[test]
    fn conversions() {
        let vs = VertexSubset::from_vertices(4, &[1, 3, 1]).unwrap();
        assert_eq!(vs.len(), 3);
        let bm = vs.converted(Repr::Bitmap);
        assert_eq!(bm.len(), 2);
        assert_eq!(bm.members(), vec![1, 3]);

        let bits = VertexSubset::from_vertices(4, &[2, 0]).unwrap().converted(Repr::Bitmap);
        assert_eq!(bits.converted(Repr::Sparse).to_vec(), vec![0, 2]);

        let all = VertexSubset::full(5);
        assert_eq!(all.converted(Repr::Sparse).to_vec(), vec![0, 1, 2, 3, 4]);
        assert!(all.is_full());
    }

    #[test]
    fn monotonic_counters_dedup_per_round() {
        let mut table = DedupTable::new(8, DedupStrategy::MonotonicCounters);
        let out = OutputFrontier::open(VertexSubset::empty(8), FrontierCreation::Fused, Some(&table), 4);
        assert!(out.enqueue(5));
        assert!(!out.enqueue(5));
        let vs = out.finish();
        assert_eq!(vs.to_vec(), vec![5]);

        table.advance_round();
        let out = OutputFrontier::open(vs, FrontierCreation::Fused, Some(&table), 4);
        assert!(out.enqueue(5));
    }

    #[test]
    fn no_dedup_keeps_duplicates() {
        let out = OutputFrontier::open(VertexSubset::empty(8), FrontierCreation::Fused, None, 1);
        assert!(out.enqueue(5));
        assert!(out.enqueue(5));
        assert!(out.enqueue(6)); // spills past capacity
        let vs = out.finish();
        assert_eq!(vs.to_vec(), vec![5, 5, 6]);
        assert_eq!(vs.len(), 3);
    }

    #[test]
    fn bitmap_claims_are_released_after_finish() {
        for strategy in [DedupStrategy::Bitmap, DedupStrategy::Boolmap] {
            let table = DedupTable::new(100, strategy);
            let out = OutputFrontier::open(VertexSubset::empty(100), FrontierCreation::Fused, Some(&table), 10);
            assert!(out.enqueue(70));
            assert!(!out.enqueue(70));
            out.finish();
            let out = OutputFrontier::open(VertexSubset::empty(100), FrontierCreation::Fused, Some(&table), 10);
            assert!(out.enqueue(70));
        }
    }

    #[test]
    fn concurrent_enqueue_accepts_once() {
        let modes = [
            (FrontierCreation::Fused, Some(DedupStrategy::MonotonicCounters)),
            (FrontierCreation::Fused, Some(DedupStrategy::Bitmap)),
            (FrontierCreation::Fused, Some(DedupStrategy::Boolmap)),
            (FrontierCreation::UnfusedBitmap, None),
            (FrontierCreation::UnfusedBoolmap, None),
        ];
        for (creation, strategy) in modes {
            let table = strategy.map(|s| DedupTable::new(64, s));
            let out = OutputFrontier::open(VertexSubset::empty(64), creation, table.as_ref(), 64);
            let accepted = AtomicUsize::new(0);
            let barrier = Barrier::new(8);
            std::thread::scope(|s| {
                for _ in 0..8 {
                    s.spawn(|| {
                        barrier.wait();
                        for v in 0..64 {
                            if out.enqueue(v) {
                                accepted.fetch_add(1, Relaxed);
                            }
                        }
                    });
                }
            });
            assert_eq!(accepted.into_inner(), 64, "{creation:?}");
            let vs = out.finish();
            assert_eq!(vs.len(), 64);
            assert_eq!(vs.members(), (0..64).collect::<Vec<_>>());
        }
    }

    proptest! {
        #[test]
        fn member_set_matches_enqueued(ids in prop::collection::vec(0u32..50, 0..100), mode in 0usize..6) {
            let (creation, strategy) = [
                (FrontierCreation::Fused, None),
                (FrontierCreation::Fused, Some(DedupStrategy::MonotonicCounters)),
                (FrontierCreation::Fused, Some(DedupStrategy::Bitmap)),
                (FrontierCreation::Fused, Some(DedupStrategy::Boolmap)),
                (FrontierCreation::UnfusedBitmap, None),
                (FrontierCreation::UnfusedBoolmap, None),
            ][mode];
            let table = strategy.map(|s| DedupTable::new(50, s));
            let out = OutputFrontier::open(VertexSubset::empty(50), creation, table.as_ref(), 16);
            for &v in &ids {
                out.enqueue(v);
            }
            let vs = out.finish();
            let mut expect = ids.clone();
            expect.sort_unstable();
            expect.dedup();
            prop_assert_eq!(vs.members(), expect.clone());
            if strategy.is_some() || creation != FrontierCreation::Fused {
                prop_assert_eq!(vs.len(), expect.len());
            } else {
                prop_assert_eq!(vs.len(), ids.len());
            }
        }

        #[test]
        fn conversions_preserve_members(ids in prop::collection::vec(0u32..130, 0..200)) {
            let vs = VertexSubset::from_vertices(130, &ids).unwrap();
            let expect = vs.members();
            for path in [
                [Repr::Bitmap, Repr::Boolmap, Repr::Sparse],
                [Repr::Boolmap, Repr::Bitmap, Repr::Sparse],
                [Repr::Sparse, Repr::Boolmap, Repr::Sparse],
            ] {
                let mut c = vs.clone();
                for r in path {
                    c.convert(r);
                    prop_assert_eq!(c.members(), expect.clone());
                }
                prop_assert_eq!(c.to_vec(), expect.clone());
            }
        }
    }
}
