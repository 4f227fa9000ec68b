use std::fmt;

use super::{DedupStrategy, DenseRepr, Direction, FrontierCreation, LoadBalance, Schedule};

/// Which schedule dimensions to vary; unselected dimensions keep the base
/// schedule's value.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SpaceSelector {
    pub direction: bool,
    pub pull_frontier: bool,
    pub load_balance: bool,
    pub blocking: bool,
    pub frontier_creation: bool,
    pub dedup: bool,
    pub kernel_fusion: bool,
}

impl SpaceSelector {
    /// Every dimension, both directions.
    pub fn full() -> Self {
        SpaceSelector {
            direction: true,
            ..SpaceSelector::single_direction()
        }
    }

    /// Every dimension except direction.
    pub fn single_direction() -> Self {
        SpaceSelector {
            direction: false,
            pull_frontier: true,
            load_balance: true,
            blocking: true,
            frontier_creation: true,
            dedup: true,
            kernel_fusion: true,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Space {
    /// Size of the plain cross product of the selected dimensions.
    pub raw: usize,
    /// Valid, non-redundant schedules in enumeration order.
    pub schedules: Vec<Schedule>,
}

impl Space {
    pub fn valid(&self) -> usize {
        self.schedules.len()
    }
}

fn pick<T: Copy>(vary: bool, all: &[T], base: T) -> Vec<T> {
    if vary {
        all.to_vec()
    } else {
        vec![base]
    }
}

/// Dedup choices as (enabled, strategy) pairs.
fn dedup_choices(vary: bool, base: &Schedule) -> Vec<(bool, DedupStrategy)> {
    if !vary {
        return vec![(base.dedup, base.dedup_strategy)];
    }
    let mut v: Vec<_> = DedupStrategy::ALL.iter().map(|&s| (true, s)).collect();
    v.push((false, DedupStrategy::MonotonicCounters));
    v
}

/// Cross product of the selected dimensions with invalid schedules removed.
///
/// Settings that cannot change behavior are collapsed to their default:
/// the pull-side frontier representation of a PUSH schedule and the
/// strategy of a disabled deduplication.
pub fn enumerate_space(sel: &SpaceSelector, base: &Schedule) -> Space {
    let dirs = pick(sel.direction, Direction::ALL, base.direction);
    let reprs = pick(sel.pull_frontier, DenseRepr::ALL, base.pull_frontier);
    let lbs = pick(sel.load_balance, LoadBalance::ALL, base.load_balance);
    let blocks = pick(sel.blocking, &[false, true], base.blocking);
    let fcs = pick(sel.frontier_creation, FrontierCreation::ALL, base.frontier_creation);
    let dedups = dedup_choices(sel.dedup, base);
    let fusions = pick(sel.kernel_fusion, &[false, true], base.kernel_fusion);

    let raw = dirs.len() * reprs.len() * lbs.len() * blocks.len() * fcs.len() * dedups.len() * fusions.len();
    let mut schedules = Vec::new();
    for &direction in &dirs {
        for &pull_frontier in &reprs {
            if sel.pull_frontier && direction == Direction::Push && pull_frontier != DenseRepr::Boolmap {
                continue;
            }
            for &load_balance in &lbs {
                for &blocking in &blocks {
                    for &frontier_creation in &fcs {
                        for &(dedup, dedup_strategy) in &dedups {
                            for &kernel_fusion in &fusions {
                                let s = Schedule {
                                    direction,
                                    pull_frontier,
                                    load_balance,
                                    blocking,
                                    frontier_creation,
                                    dedup,
                                    dedup_strategy,
                                    kernel_fusion,
                                    ..base.clone()
                                };
                                if s.validate().is_empty() {
                                    schedules.push(s);
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    Space { raw, schedules }
}

/// Closed-form size of the full space, per direction, as documented by
/// the CLI's `list-labels --space`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DocumentedSpace {
    pub load_balancers: usize,
    pub pull_reprs: usize,
    pub creations: usize,
    pub dedups: usize,
    pub fusions: usize,
    pub push: usize,
    pub pull: usize,
}

impl DocumentedSpace {
    pub fn total(&self) -> usize {
        self.push + self.pull
    }
}

pub fn documented_space() -> DocumentedSpace {
    let load_balancers = LoadBalance::ALL.len();
    let pull_reprs = DenseRepr::ALL.len();
    let creations = FrontierCreation::ALL.len();
    let dedups = 1 + DedupStrategy::ALL.len();
    let fusions = 2;
    // blocking doubles EDGE_ONLY, and only when pushing
    let push = (load_balancers + 1) * creations * dedups * fusions;
    let pull = load_balancers * pull_reprs * creations * dedups * fusions;
    DocumentedSpace {
        load_balancers,
        pull_reprs,
        creations,
        dedups,
        fusions,
        push,
        pull,
    }
}

impl fmt::Display for DocumentedSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |xs: Vec<&str>| xs.join(", ");
        writeln!(f, "dimension          values")?;
        writeln!(f, "direction          PUSH, PULL")?;
        writeln!(f, "pull_frontier      {}  (PULL only)", join(DenseRepr::ALL.iter().map(|x| x.token()).collect()))?;
        writeln!(f, "load_balance       {}", join(LoadBalance::ALL.iter().map(|x| x.token()).collect()))?;
        writeln!(f, "blocking           UNBLOCKED, BLOCKED  (EDGE_ONLY + PUSH only)")?;
        writeln!(f, "frontier_creation  {}", join(FrontierCreation::ALL.iter().map(|x| x.token()).collect()))?;
        writeln!(
            f,
            "deduplication      DISABLED, {}",
            join(DedupStrategy::ALL.iter().map(|x| x.token()).collect())
        )?;
        writeln!(f, "kernel_fusion      DISABLED, ENABLED")?;
        writeln!(
            f,
            "PUSH: ({} + 1) x {} x {} x {} = {}",
            self.load_balancers, self.creations, self.dedups, self.fusions, self.push
        )?;
        writeln!(
            f,
            "PULL: {} x {} x {} x {} x {} = {}",
            self.load_balancers, self.pull_reprs, self.creations, self.dedups, self.fusions, self.pull
        )?;
        write!(f, "total: {}", self.total())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn selected_products() {
        let sel = SpaceSelector {
            load_balance: true,
            frontier_creation: true,
            ..SpaceSelector::default()
        };
        let s = enumerate_space(&sel, &Schedule::default());
        assert_eq!(s.raw, 21);
        assert_eq!(s.valid(), 21);

        let sel = SpaceSelector {
            direction: true,
            ..SpaceSelector::default()
        };
        assert_eq!(enumerate_space(&sel, &Schedule::default()).valid(), 2);
    }

    #[test]
    fn full_space_matches_closed_form() {
        let doc = documented_space();
        assert_eq!((doc.push, doc.pull, doc.total()), (192, 336, 528));
        let push = enumerate_space(&SpaceSelector::single_direction(), &Schedule::default());
        assert_eq!(push.raw, 2 * 7 * 2 * 3 * 4 * 2);
        assert_eq!(push.valid(), doc.push);
        let pull_base = Schedule {
            direction: Direction::Pull,
            ..Schedule::default()
        };
        assert_eq!(enumerate_space(&SpaceSelector::single_direction(), &pull_base).valid(), doc.pull);
        assert_eq!(enumerate_space(&SpaceSelector::full(), &Schedule::default()).valid(), doc.total());
    }

    #[test]
    fn every_option_is_reachable() {
        let space = enumerate_space(&SpaceSelector::full(), &Schedule::default()).schedules;
        assert!(space.iter().all(|s| s.validate().is_empty()));
        for &lb in LoadBalance::ALL {
            assert!(space.iter().any(|s| s.load_balance == lb));
        }
        for &r in DenseRepr::ALL {
            assert!(space.iter().any(|s| s.pull_frontier == r));
        }
        for &fc in FrontierCreation::ALL {
            assert!(space.iter().any(|s| s.frontier_creation == fc));
        }
        for &ds in DedupStrategy::ALL {
            assert!(space.iter().any(|s| s.dedup && s.dedup_strategy == ds));
        }
        assert!(space.iter().any(|s| !s.dedup));
        assert!(space.iter().any(|s| s.blocking));
        assert!(space.iter().any(|s| s.kernel_fusion));
        assert!(space.iter().any(|s| s.direction == Direction::Pull));
        assert_eq!(space[0], Schedule::default());
    }
}
