use std::path::PathBuf;

use thiserror::Error;

use crate::sched::Violation;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("line {line}: {msg}")]
    MalformedInput { line: usize, msg: String },

    #[error("no edges")]
    NoEdges,

    #[error("vertex {vertex} out of range (num_vertices = {num_vertices})")]
    VertexOutOfRange { vertex: u64, num_vertices: usize },

    #[error("weights length {got} does not match edge count {expected}")]
    WeightCount { got: usize, expected: usize },

    #[error("vertices per segment must be at least 1")]
    ZeroSegmentSize,

    #[error("bad blocked graph file: {0}")]
    BadBlockedFile(String),

    #[error("schedule syntax error at {line}:{col}: {msg}")]
    ScheduleSyntax { line: usize, col: usize, msg: String },

    #[error("invalid schedule: {}", join_violations(.0))]
    InvalidSchedule(Vec<Violation>),

    #[error("unknown schedule label {label:?} (known labels: {known})")]
    UnknownLabel { label: String, known: String },

    #[error("loop label {0:?} accepts only a SimpleGPUSchedule")]
    LoopLabelNeedsSimple(String),

    #[error("hybrid threshold argv[{0}] is unresolved")]
    UnresolvedThreshold(usize),

    #[error("hybrid threshold {0} must lie in (0, 1)")]
    ThresholdRange(f64),

    #[error("frontier universe {got} does not match graph vertex count {expected}")]
    UniverseMismatch { got: usize, expected: usize },

    #[error("kernel fusion requires frontier reuse, but the loop body allocates new frontiers")]
    FusionRequiresReuse,

    #[error("advance called while the current bucket is non-empty")]
    CurrentBucketNotEmpty,

    #[error("invalid execution config: {0}")]
    InvalidExec(String),

    #[error("graph has no edge weights")]
    UnweightedGraph,

    #[error("graph has no vertices")]
    EmptyGraph,

    #[error("source list is empty")]
    NoSources,

    #[error("graph too large for serial oracle ({num_vertices} > {limit} vertices)")]
    OracleTooLarge { num_vertices: usize, limit: usize },

    #[error("no valid schedules for {0}")]
    NoValidSchedules(String),
}

fn join_violations(v: &[Violation]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join("; ")
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
