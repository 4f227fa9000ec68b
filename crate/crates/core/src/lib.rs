//! Graph analytics engine whose performance behavior is selected by a
//! small scheduling language.
//!
//! Every traversal optimization is an independent schedule dimension:
//! traversal direction, load balancing (including ETWC), EdgeBlocking,
//! frontier representation and creation, deduplication, kernel fusion and
//! delta-bucketed priorities. Execution happens on a simulated
//! CTA/warp/thread hierarchy mapped onto a CPU worker pool.
//!
//! The `parallel` feature (on by default) backs the worker pool with rayon.
//! Without it every parallel loop runs sequentially in task order.

pub mod algos;
pub mod blocking;
pub mod engine;
pub mod error;
pub mod frontier;
pub mod graph;
pub mod oracle;
mod par;
pub mod priority;
pub mod sched;
pub mod tune;
pub mod verify;

pub use error::{Error, Result};
pub use graph::{Graph, VertexId, Weight};

/// Returns true when the crate was built with the rayon-backed pool.
pub fn parallel_enabled() -> bool {
    cfg!(feature = "parallel")
}
