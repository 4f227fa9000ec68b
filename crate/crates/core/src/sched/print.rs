use std::fmt::{self, Write};

use super::{Binding, HybridSchedule, Schedule, ScheduleProgram, Threshold};

fn switch(b: bool) -> &'static str {
    if b {
        "ENABLED"
    } else {
        "DISABLED"
    }
}

impl Schedule {
    /// Config statements that rebuild this schedule from the defaults.
    pub fn config_lines(&self, var: &str) -> Vec<String> {
        let lb = match (self.blocking, self.blocking_size) {
            (false, None) => format!("{}", self.load_balance),
            (true, None) => format!("{}, BLOCKED", self.load_balance),
            (b, Some(n)) => format!("{}, {}, {n}", self.load_balance, if b { "BLOCKED" } else { "UNBLOCKED" }),
        };
        vec![
            format!("{var}.configDirection({}, {});", self.direction, self.pull_frontier),
            format!("{var}.configLoadBalance({lb});"),
            format!("{var}.configFrontierCreation({});", self.frontier_creation),
            format!("{var}.configDeduplication({}, {});", switch(self.dedup), self.dedup_strategy),
            format!("{var}.configDelta({});", self.delta),
            format!("{var}.configKernelFusion({});", switch(self.kernel_fusion)),
        ]
    }
}

/// Single-line form, e.g. for CSV cells.
impl fmt::Display for Schedule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SimpleGPUSchedule s; {}", self.config_lines("s").join(" "))
    }
}

fn write_simple(out: &mut String, var: &str, s: &Schedule) {
    let _ = writeln!(out, "SimpleGPUSchedule {var};");
    for l in s.config_lines(var) {
        let _ = writeln!(out, "{l}");
    }
}

fn write_hybrid(out: &mut String, var: &str, h: &HybridSchedule) {
    write_simple(out, &format!("{var}_s1"), &h.s1);
    write_simple(out, &format!("{var}_s2"), &h.s2);
    let threshold = match h.threshold {
        Threshold::Fraction(x) => format!("{x:?}"),
        Threshold::Argv(k) => format!("\"argv[{k}]\""),
    };
    let _ = writeln!(
        out,
        "HybridGPUSchedule {var}({}, {threshold}, {var}_s1, {var}_s2);",
        h.criteria
    );
}

/// Canonical text; parsing it yields an equal program.
impl fmt::Display for ScheduleProgram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut out = String::new();
        for (i, (label, b)) in self.bindings().iter().enumerate() {
            let var = format!("b{i}");
            match b {
                Binding::Simple(s) => write_simple(&mut out, &var, s),
                Binding::Hybrid(h) => write_hybrid(&mut out, &var, h),
            }
            let _ = writeln!(out, "apply({label:?}, {var});");
        }
        f.write_str(&out)
    }
}
