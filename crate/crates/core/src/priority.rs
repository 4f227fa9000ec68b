//! Delta-bucketed priority queue for ordered traversals.
//!
//! Vertex `v` sits in bucket `priority[v] / delta`. Only the current bucket
//! is materialized as a frontier; vertices whose priority lands in a later
//! bucket go to an overflow list that is re-bucketed on [`BucketQueue::advance`].

use std::sync::atomic::{AtomicU8, Ordering::Relaxed};
use std::sync::Mutex;

use crate::engine::VertexArray;
use crate::error::{Error, Result};
use crate::frontier::{OutputFrontier, VertexSubset};
use crate::graph::VertexId;

/// Priority of a vertex that has not been reached.
pub const INF: u64 = u64::MAX;

pub struct BucketQueue {
    delta: u64,
    priorities: VertexArray<u64>,
    current_bucket: u64,
    current: VertexSubset,
    far: Mutex<Vec<VertexId>>,
    in_far: Vec<AtomicU8>,
    log: Vec<u64>,
}

impl BucketQueue {
    pub fn new(num_vertices: usize, delta: u64) -> Result<Self> {
        if delta == 0 {
            return Err(Error::InvalidSchedule(vec![crate::sched::Violation::ZeroDelta]));
        }
        Ok(BucketQueue {
            delta,
            priorities: VertexArray::new(num_vertices, INF),
            current_bucket: 0,
            current: VertexSubset::empty(num_vertices),
            far: Mutex::new(Vec::new()),
            in_far: (0..num_vertices).map(|_| AtomicU8::new(0)).collect(),
            log: Vec::new(),
        })
    }

    /// Seeds `v` with priority `p`; it lands in the current bucket when
    /// that bucket matches, otherwise in the overflow list.
    pub fn seed(&mut self, v: VertexId, p: u64) {
        self.priorities.set(v, p);
        if p / self.delta == self.current_bucket {
            let mut ids = self.current.to_vec();
            ids.push(v);
            self.current.assign_sparse(&ids);
        } else {
            self.push_far(v);
        }
    }

    pub fn delta(&self) -> u64 {
        self.delta
    }

    pub fn priorities(&self) -> &VertexArray<u64> {
        &self.priorities
    }

    pub fn into_priorities(self) -> VertexArray<u64> {
        self.priorities
    }

    pub fn current_bucket_index(&self) -> u64 {
        self.current_bucket
    }

    pub fn current(&self) -> &VertexSubset {
        &self.current
    }

    /// Takes the current bucket's frontier, leaving it empty.
    pub fn take_current(&mut self) -> VertexSubset {
        let n = self.current.universe();
        std::mem::replace(&mut self.current, VertexSubset::empty(n))
    }

    /// Puts a frontier back as the current bucket.
    pub fn set_current(&mut self, vs: VertexSubset) {
        self.current = vs;
    }

    /// Vertices in the overflow list, including stale entries.
    pub fn far(&self) -> Vec<VertexId> {
        self.far.lock().unwrap_or_else(|e| e.into_inner()).clone()
    }

    /// Bucket indices in the order they became current.
    pub fn bucket_log(&self) -> &[u64] {
        &self.log
    }

    pub fn is_finished(&self) -> bool {
        self.current.is_empty() && self.far.lock().unwrap_or_else(|e| e.into_inner()).is_empty()
    }

    fn push_far(&self, v: VertexId) {
        if self.in_far[v as usize].swap(1, Relaxed) == 0 {
            self.far.lock().unwrap_or_else(|e| e.into_inner()).push(v);
        }
    }

    /// Atomically lowers `v`'s priority to `candidate`. On success the
    /// vertex joins the current bucket through `current_out` when its new
    /// bucket is the current one (or earlier), else the overflow list.
    /// Without `current_out` every improved vertex is parked in the
    /// overflow list, so callers outside a traversal should only lower
    /// priorities into later buckets.
    pub fn update_priority_min(&self, v: VertexId, candidate: u64, current_out: Option<&OutputFrontier<'_>>) -> bool {
        if !self.priorities.fetch_min(v, candidate) {
            return false;
        }
        match current_out {
            Some(out) if candidate / self.delta <= self.current_bucket => {
                out.enqueue(v);
            }
            _ => self.push_far(v),
        }
        true
    }

    /// Moves the lowest non-empty later bucket into the current frontier.
    /// Returns false when no vertex is left. The current bucket must have
    /// been drained first.
    pub fn advance(&mut self) -> Result<bool> {
        if !self.current.is_empty() {
            return Err(Error::CurrentBucketNotEmpty);
        }
        let far = std::mem::take(self.far.get_mut().unwrap_or_else(|e| e.into_inner()));
        let old = self.current_bucket;
        let started = !self.log.is_empty();
        let bucket = |v: VertexId| self.priorities.get(v) / self.delta;
        let live: Vec<VertexId> = far
            .into_iter()
            .filter(|&v| {
                let keep = !started || bucket(v) > old;
                if !keep {
                    self.in_far[v as usize].store(0, Relaxed);
                }
                keep
            })
            .collect();
        let Some(next) = live.iter().map(|&v| bucket(v)).min() else {
            return Ok(false);
        };
        let (now, later): (Vec<VertexId>, Vec<VertexId>) = live.into_iter().partition(|&v| bucket(v) == next);
        for &v in &now {
            self.in_far[v as usize].store(0, Relaxed);
        }
        *self.far.get_mut().unwrap_or_else(|e| e.into_inner()) = later;
        self.current.assign_sparse(&now);
        self.current_bucket = next;
        self.log.push(next);
        Ok(true)
    }

    /// Marks the current bucket as processed for the log when it was
    /// seeded directly rather than through [`BucketQueue::advance`].
    pub fn open_current(&mut self) {
        if self.log.is_empty() && !self.current.is_empty() {
            self.log.push(self.current_bucket);
        }
    }
}
