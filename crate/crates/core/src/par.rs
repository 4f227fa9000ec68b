//! Worker pool used by every parallel loop in the crate.
//!
//! With the `parallel` feature the pool is a cached rayon `ThreadPool` per
//! worker count. A pool with one worker, a deterministic pool, or a build
//! without the feature runs tasks sequentially in index order.

use std::ops::Range;

#[cfg(feature = "parallel")]
use std::{
    collections::HashMap,
    sync::{Arc, Mutex, OnceLock},
};

#[cfg(feature = "parallel")]
use rayon::prelude::*;

#[derive(Clone)]
pub(crate) struct Pool {
    workers: usize,
    sequential: bool,
    #[cfg(feature = "parallel")]
    inner: Option<Arc<rayon::ThreadPool>>,
}

#[cfg(feature = "parallel")]
fn shared_pool(workers: usize) -> Arc<rayon::ThreadPool> {
    static POOLS: OnceLock<Mutex<HashMap<usize, Arc<rayon::ThreadPool>>>> = OnceLock::new();
    let mut pools = POOLS
        .get_or_init(Default::default)
        .lock()
        .unwrap_or_else(|e| e.into_inner());
    pools
        .entry(workers)
        .or_insert_with(|| {
            Arc::new(
                rayon::ThreadPoolBuilder::new()
                    .num_threads(workers)
                    .thread_name(|i| format!("graphsched-{i}"))
                    .build()
                    .expect("failed to build worker pool"),
            )
        })
        .clone()
}

impl Pool {
    pub(crate) fn new(workers: usize, deterministic: bool) -> Self {
        let workers = workers.max(1);
        let sequential = deterministic || workers == 1 || !cfg!(feature = "parallel");
        Pool {
            workers,
            sequential,
            #[cfg(feature = "parallel")]
            inner: (!sequential).then(|| shared_pool(workers)),
        }
    }

    pub(crate) fn workers(&self) -> usize {
        self.workers
    }

    /// Runs `op` on the pool. Nested calls from a pool thread run inline.
    pub(crate) fn install<R: Send>(&self, op: impl FnOnce() -> R + Send) -> R {
        #[cfg(feature = "parallel")]
        if let Some(pool) = &self.inner {
            return pool.install(op);
        }
        op()
    }

    /// Runs `f(task)` for every task in `0..tasks`, returning after all
    /// tasks finish (the join acts as a barrier).
    pub(crate) fn for_each(&self, tasks: usize, f: impl Fn(usize) + Sync + Send) {
        #[cfg(feature = "parallel")]
        if let Some(pool) = &self.inner {
            pool.install(|| (0..tasks).into_par_iter().for_each(&f));
            return;
        }
        (0..tasks).for_each(f);
    }

    /// Ordered map over tasks.
    pub(crate) fn map<T: Send>(&self, tasks: usize, f: impl Fn(usize) -> T + Sync + Send) -> Vec<T> {
        #[cfg(feature = "parallel")]
        if let Some(pool) = &self.inner {
            return pool.install(|| (0..tasks).into_par_iter().map(&f).collect());
        }
        (0..tasks).map(f).collect()
    }

    /// Splits `0..n` into contiguous chunks and runs `f` on each.
    pub(crate) fn for_each_range(&self, n: usize, f: impl Fn(Range<usize>) + Sync + Send) {
        let grain = self.grain(n);
        let tasks = n.div_ceil(grain);
        self.for_each(tasks, |t| f(t * grain..((t + 1) * grain).min(n)));
    }

    /// Ordered sum of per-chunk partial results; the chunking depends only
    /// on `n`, so floating-point results do not depend on the worker count.
    pub(crate) fn sum_f64(&self, n: usize, f: impl Fn(usize) -> f64 + Sync + Send) -> f64 {
        const CHUNK: usize = 4096;
        let tasks = n.div_ceil(CHUNK);
        self.map(tasks, |t| (t * CHUNK..((t + 1) * CHUNK).min(n)).map(&f).sum::<f64>())
            .into_iter()
            .sum()
    }

    fn grain(&self, n: usize) -> usize {
        if self.sequential {
            n.max(1)
        } else {
            n.div_ceil(self.workers * 8).max(256)
        }
    }
}

/// Splits `0..n` into `parts` contiguous ranges whose lengths differ by at
/// most one; earlier ranges receive the extra elements.
pub fn even_split(n: usize, parts: usize) -> Vec<Range<usize>> {
    let parts = parts.max(1);
    let base = n / parts;
    let extra = n % parts;
    let mut start = 0;
    (0..parts)
        .map(|i| {
            let len = base + usize::from(i < extra);
            let r = start..start + len;
            start += len;
            r
        })
        .collect()
}
