//! Vertex-data arrays and the edge contexts handed to user functions.
//!
//! During a traversal, vertex data is reachable only through `&VertexArray`.
//! Reads are always allowed. Writes go through the edge context: a
//! [`PushEdge`] offers atomic read-modify-write helpers only, while a
//! [`PullEdge`] additionally lets the destination's owner store plainly.

use std::marker::PhantomData;
use std::sync::atomic::{AtomicU64, Ordering::Relaxed};

use crate::frontier::OutputFrontier;
use crate::graph::{VertexId, Weight};

/// A value that fits in 64 bits and can live in a [`VertexArray`].
pub trait Scalar: Copy + PartialOrd + Send + Sync + 'static {
    fn to_bits(self) -> u64;
    fn from_bits(bits: u64) -> Self;
    fn plus(self, other: Self) -> Self;
}

impl Scalar for u64 {
    fn to_bits(self) -> u64 {
        self
    }
    fn from_bits(bits: u64) -> Self {
        bits
    }
    fn plus(self, other: Self) -> Self {
        self.wrapping_add(other)
    }
}

impl Scalar for i64 {
    fn to_bits(self) -> u64 {
        self as u64
    }
    fn from_bits(bits: u64) -> Self {
        bits as i64
    }
    fn plus(self, other: Self) -> Self {
        self.wrapping_add(other)
    }
}

impl Scalar for f64 {
    fn to_bits(self) -> u64 {
        f64::to_bits(self)
    }
    fn from_bits(bits: u64) -> Self {
        f64::from_bits(bits)
    }
    fn plus(self, other: Self) -> Self {
        self + other
    }
}

/// Per-vertex data shared by all workers.
pub struct VertexArray<T> {
    cells: Vec<AtomicU64>,
    _t: PhantomData<T>,
}

impl<T: Scalar> VertexArray<T> {
    pub fn new(len: usize, init: T) -> Self {
        VertexArray {
            cells: (0..len).map(|_| AtomicU64::new(init.to_bits())).collect(),
            _t: PhantomData,
        }
    }

    pub fn from_vec(values: Vec<T>) -> Self {
        VertexArray {
            cells: values.into_iter().map(|v| AtomicU64::new(v.to_bits())).collect(),
            _t: PhantomData,
        }
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    #[inline]
    pub fn get(&self, i: VertexId) -> T {
        T::from_bits(self.cells[i as usize].load(Relaxed))
    }

    /// Exclusive write outside of traversals.
    pub fn set(&mut self, i: VertexId, v: T) {
        *self.cells[i as usize].get_mut() = v.to_bits();
    }

    pub fn fill(&mut self, v: T) {
        self.cells.iter_mut().for_each(|c| *c.get_mut() = v.to_bits());
    }

    pub fn to_vec(&self) -> Vec<T> {
        self.cells.iter().map(|c| T::from_bits(c.load(Relaxed))).collect()
    }

    #[inline]
    pub(crate) fn store(&self, i: VertexId, v: T) {
        self.cells[i as usize].store(v.to_bits(), Relaxed);
    }

    #[inline]
    pub(crate) fn compare_and_swap(&self, i: VertexId, current: T, new: T) -> bool {
        self.cells[i as usize]
            .compare_exchange(current.to_bits(), new.to_bits(), Relaxed, Relaxed)
            .is_ok()
    }

    /// Lowers the value to `v` if smaller; true when it changed.
    #[inline]
    pub(crate) fn fetch_min(&self, i: VertexId, v: T) -> bool {
        let cell = &self.cells[i as usize];
        let mut old = cell.load(Relaxed);
        loop {
            if !(v < T::from_bits(old)) {
                return false;
            }
            match cell.compare_exchange_weak(old, v.to_bits(), Relaxed, Relaxed) {
                Ok(_) => return true,
                Err(x) => old = x,
            }
        }
    }

    #[inline]
    pub(crate) fn fetch_add(&self, i: VertexId, v: T) -> T {
        let cell = &self.cells[i as usize];
        let mut old = cell.load(Relaxed);
        loop {
            let new = T::from_bits(old).plus(v).to_bits();
            match cell.compare_exchange_weak(old, new, Relaxed, Relaxed) {
                Ok(_) => return T::from_bits(old),
                Err(x) => old = x,
            }
        }
    }
}

impl<T: Scalar + std::fmt::Debug> std::fmt::Debug for VertexArray<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_list().entries(self.to_vec()).finish()
    }
}

macro_rules! atomic_helpers {
    () => {
        /// Compare-and-swap on any vertex slot.
        #[inline]
        pub fn compare_and_swap<T: Scalar>(&self, a: &VertexArray<T>, i: VertexId, current: T, new: T) -> bool {
            a.compare_and_swap(i, current, new)
        }

        /// Atomic minimum; true when the slot decreased.
        #[inline]
        pub fn atomic_min<T: Scalar>(&self, a: &VertexArray<T>, i: VertexId, v: T) -> bool {
            a.fetch_min(i, v)
        }

        /// Atomic add, returning the previous value.
        #[inline]
        pub fn atomic_add<T: Scalar>(&self, a: &VertexArray<T>, i: VertexId, v: T) -> T {
            a.fetch_add(i, v)
        }

        /// Adds `v` to the output frontier; false when rejected as a
        /// duplicate or when the traversal produces no output.
        #[inline]
        pub fn enqueue(&self, v: VertexId) -> bool {
            self.out.is_some_and(|o| o.enqueue(v))
        }

        pub fn output(&self) -> Option<&OutputFrontier<'o>> {
            self.out
        }
    };
}

/// Edge seen by a pushing source. Many sources may target the same
/// destination concurrently.
pub struct PushEdge<'o> {
    pub src: VertexId,
    pub dst: VertexId,
    pub weight: Weight,
    pub(crate) out: Option<&'o OutputFrontier<'o>>,
}

impl<'o> PushEdge<'o> {
    atomic_helpers!();
}

/// Edge seen by a pulling destination, which owns `dst` for the round.
pub struct PullEdge<'o> {
    pub src: VertexId,
    pub dst: VertexId,
    pub weight: Weight,
    pub(crate) out: Option<&'o OutputFrontier<'o>>,
}

impl<'o> PullEdge<'o> {
    atomic_helpers!();

    /// Plain store to the destination's slot.
    #[inline]
    pub fn store_dst<T: Scalar>(&self, a: &VertexArray<T>, v: T) {
        a.store(self.dst, v);
    }
}

/// Owner handle for one vertex in a vertex-parallel phase.
pub struct VertexCtx {
    pub v: VertexId,
}

impl VertexCtx {
    #[inline]
    pub fn store<T: Scalar>(&self, a: &VertexArray<T>, value: T) {
        a.store(self.v, value);
    }
}

/// User function applied to traversed edges.
///
/// `push`/`pull` return true to enqueue the destination in the output
/// frontier. A call must enqueue at most one vertex in total.
pub trait EdgeFunction: Sync {
    /// Destination filter; edges into rejected vertices are skipped.
    fn filter(&self, _dst: VertexId) -> bool {
        true
    }

    fn push(&self, e: &PushEdge<'_>) -> bool;

    fn pull(&self, e: &PullEdge<'_>) -> bool;
}
