//! The scheduling language: schedule objects, validation, the text
//! parser/printer and enumeration of the schedule space.
//!
//! A program is a list of statements:
//!
//! ```text
//! SimpleGPUSchedule s1;
//! s1.configDirection(PUSH);
//! SimpleGPUSchedule s2 = s1;
//! s2.configDirection(PULL, BITMAP);
//! HybridGPUSchedule h1(INPUT_VERTEXSET_SIZE, "argv[3]", s1, s2);
//! apply("s0:s1", h1);
//! ```

mod parse;
mod print;
mod space;

use std::collections::HashMap;
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};

pub use space::{documented_space, enumerate_space, DocumentedSpace, Space, SpaceSelector};

macro_rules! token_enum {
    ($(#[$m:meta])* $name:ident { $($variant:ident => $tok:literal),+ $(,)? }) => {
        $(#[$m])*
        #[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
        pub enum $name {
            $(#[serde(rename = $tok)] $variant),+
        }

        impl $name {
            pub const ALL: &'static [$name] = &[$($name::$variant),+];

            pub fn token(self) -> &'static str {
                match self {
                    $($name::$variant => $tok),+
                }
            }

            pub fn from_token(t: &str) -> Option<Self> {
                match t {
                    $($tok => Some($name::$variant),)+
                    _ => None,
                }
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(self.token())
            }
        }
    };
}

token_enum!(Direction { Push => "PUSH", Pull => "PULL" });

token_enum!(
    /// Dense frontier form used for membership tests while pulling.
    DenseRepr { Boolmap => "BOOLMAP", Bitmap => "BITMAP" }
);

token_enum!(LoadBalance {
    VertexBased => "VERTEX_BASED",
    Cm => "CM",
    Wm => "WM",
    Strict => "STRICT",
    EdgeOnly => "EDGE_ONLY",
    Etwc => "ETWC",
    Twc => "TWC",
});

token_enum!(FrontierCreation {
    Fused => "FUSED",
    UnfusedBoolmap => "UNFUSED_BOOLMAP",
    UnfusedBitmap => "UNFUSED_BITMAP",
});

token_enum!(DedupStrategy {
    MonotonicCounters => "MONOTONIC_COUNTERS",
    Bitmap => "BITMAP",
    Boolmap => "BOOLMAP",
});

token_enum!(HybridCriteria { InputVertexsetSize => "INPUT_VERTEXSET_SIZE" });

impl DenseRepr {
    pub fn repr(self) -> crate::frontier::Repr {
        match self {
            DenseRepr::Boolmap => crate::frontier::Repr::Boolmap,
            DenseRepr::Bitmap => crate::frontier::Repr::Bitmap,
        }
    }
}

/// One traversal configuration.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Schedule {
    pub direction: Direction,
    pub pull_frontier: DenseRepr,
    pub load_balance: LoadBalance,
    pub blocking: bool,
    /// Vertices per segment; `None` derives it from the cache budget.
    pub blocking_size: Option<u32>,
    pub frontier_creation: FrontierCreation,
    pub dedup: bool,
    pub dedup_strategy: DedupStrategy,
    pub delta: u64,
    pub kernel_fusion: bool,
}

impl Default for Schedule {
    fn default() -> Self {
        Schedule {
            direction: Direction::Push,
            pull_frontier: DenseRepr::Boolmap,
            load_balance: LoadBalance::VertexBased,
            blocking: false,
            blocking_size: None,
            frontier_creation: FrontierCreation::Fused,
            dedup: true,
            dedup_strategy: DedupStrategy::MonotonicCounters,
            delta: 1,
            kernel_fusion: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    BlockingRequiresEdgeOnly,
    BlockingRequiresPush,
    ZeroBlockingSize,
    ZeroDelta,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Violation::BlockingRequiresEdgeOnly => "blocking requires EDGE_ONLY",
            Violation::BlockingRequiresPush => "blocking requires PUSH",
            Violation::ZeroBlockingSize => "blocking size must be at least 1",
            Violation::ZeroDelta => "delta must be at least 1",
        })
    }
}

impl Schedule {
    /// Every broken invariant; empty when the schedule is runnable.
    pub fn validate(&self) -> Vec<Violation> {
        let mut v = Vec::new();
        if self.blocking && self.load_balance != LoadBalance::EdgeOnly {
            v.push(Violation::BlockingRequiresEdgeOnly);
        }
        if self.blocking && self.direction == Direction::Pull {
            v.push(Violation::BlockingRequiresPush);
        }
        if self.blocking_size == Some(0) {
            v.push(Violation::ZeroBlockingSize);
        }
        if self.delta == 0 {
            v.push(Violation::ZeroDelta);
        }
        v
    }

    pub fn check(&self) -> Result<()> {
        let v = self.validate();
        if v.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidSchedule(v))
        }
    }

    /// The dedup table strategy in effect, if any.
    pub fn dedup_table(&self) -> Option<DedupStrategy> {
        (self.dedup && self.frontier_creation == FrontierCreation::Fused).then_some(self.dedup_strategy)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Threshold {
    Fraction(f64),
    /// Resolved from the run's positional arguments.
    Argv(usize),
}

#[derive(Clone, Debug, PartialEq)]
pub struct HybridSchedule {
    pub criteria: HybridCriteria,
    pub threshold: Threshold,
    pub s1: Schedule,
    pub s2: Schedule,
}

impl HybridSchedule {
    pub fn validate(&self) -> Vec<Violation> {
        let mut v = self.s1.validate();
        v.extend(self.s2.validate());
        v
    }

    pub fn fraction(&self) -> Result<f64> {
        match self.threshold {
            Threshold::Fraction(f) => Ok(f),
            Threshold::Argv(k) => Err(Error::UnresolvedThreshold(k)),
        }
    }

    /// True when the second schedule handles an input of `frontier_size`
    /// active vertices out of `num_vertices` (strictly greater switches).
    pub fn picks_second(&self, frontier_size: usize, num_vertices: usize) -> Result<bool> {
        Ok(frontier_size as f64 > self.fraction()? * num_vertices as f64)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Binding {
    Simple(Schedule),
    Hybrid(HybridSchedule),
}

impl Binding {
    pub fn validate(&self) -> Vec<Violation> {
        match self {
            Binding::Simple(s) => s.validate(),
            Binding::Hybrid(h) => h.validate(),
        }
    }

    /// The schedule that carries loop-level and priority settings.
    pub fn primary(&self) -> &Schedule {
        match self {
            Binding::Simple(s) => s,
            Binding::Hybrid(h) => &h.s1,
        }
    }
}

impl Default for Binding {
    fn default() -> Self {
        Binding::Simple(Schedule::default())
    }
}

/// Label path to schedule bindings, in application order.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ScheduleProgram {
    bindings: Vec<(String, Binding)>,
}

impl ScheduleProgram {
    pub fn parse(text: &str) -> Result<ScheduleProgram> {
        parse::parse(text)
    }

    pub fn single(label: &str, binding: Binding) -> Self {
        let mut p = ScheduleProgram::default();
        p.bind(label, binding);
        p
    }

    pub fn bindings(&self) -> &[(String, Binding)] {
        &self.bindings
    }

    pub fn get(&self, label: &str) -> Option<&Binding> {
        self.bindings.iter().find(|(l, _)| l == label).map(|(_, b)| b)
    }

    /// Binds or rebinds `label`.
    pub fn bind(&mut self, label: &str, binding: Binding) {
        match self.bindings.iter_mut().find(|(l, _)| l == label) {
            Some(slot) => slot.1 = binding,
            None => self.bindings.push((label.to_string(), binding)),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.bindings.is_empty()
    }

    /// Every label must be one of `known`.
    pub fn check_labels(&self, known: &[&str]) -> Result<()> {
        for (l, _) in &self.bindings {
            if !known.contains(&l.as_str()) {
                return Err(Error::UnknownLabel {
                    label: l.clone(),
                    known: known.join(", "),
                });
            }
        }
        Ok(())
    }

    /// Replaces `argv[k]` thresholds with values from `args`.
    pub fn resolve_args(&mut self, args: &HashMap<usize, String>) -> Result<()> {
        for (_, b) in &mut self.bindings {
            if let Binding::Hybrid(h) = b {
                if let Threshold::Argv(k) = h.threshold {
                    let Some(raw) = args.get(&k) else {
                        return Err(Error::UnresolvedThreshold(k));
                    };
                    let f: f64 = raw.trim().parse().map_err(|_| Error::UnresolvedThreshold(k))?;
                    if !(f > 0.0 && f < 1.0) {
                        return Err(Error::ThresholdRange(f));
                    }
                    h.threshold = Threshold::Fraction(f);
                }
            }
        }
        Ok(())
    }

    /// Applies `f` to every simple schedule, including hybrid halves.
    pub fn for_each_schedule_mut(&mut self, mut f: impl FnMut(&mut Schedule)) {
        for (_, b) in &mut self.bindings {
            match b {
                Binding::Simple(s) => f(s),
                Binding::Hybrid(h) => {
                    f(&mut h.s1);
                    f(&mut h.s2);
                }
            }
        }
    }
}
