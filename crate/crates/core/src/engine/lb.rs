//! Work partitions for the load-balancing strategies.

use std::ops::Range;

pub use crate::par::even_split;

/// One vertex's edge range split for ETWC: a CTA-multiple head, then a
/// warp-multiple middle, then the remainder handled by a single thread.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EtwcSplit {
    pub cta: Range<usize>,
    pub warp: Range<usize>,
    pub thread: Range<usize>,
}

pub fn partition_etwc(edges: Range<usize>, warp_size: usize, cta_size: usize) -> EtwcSplit {
    let deg = edges.len();
    let a = edges.start + deg / cta_size * cta_size;
    let rest = edges.end - a;
    let b = a + rest / warp_size * warp_size;
    EtwcSplit {
        cta: edges.start..a,
        warp: a..b,
        thread: b..edges.end,
    }
}

/// Item indices grouped by TWC size class.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TwcQueues {
    pub cta: Vec<usize>,
    pub warp: Vec<usize>,
    pub thread: Vec<usize>,
}

/// Degree above `cta_size` goes to a CTA, above `warp_size` to a warp, the
/// rest to a thread.
pub fn partition_twc(degrees: &[usize], warp_size: usize, cta_size: usize) -> TwcQueues {
    let mut q = TwcQueues::default();
    for (i, &d) in degrees.iter().enumerate() {
        twc_class(&mut q, i, d, warp_size, cta_size);
    }
    q
}

#[inline]
pub(crate) fn twc_class(q: &mut TwcQueues, i: usize, d: usize, warp_size: usize, cta_size: usize) {
    if d > cta_size {
        q.cta.push(i);
    } else if d > warp_size {
        q.warp.push(i);
    } else {
        q.thread.push(i);
    }
}

/// Exclusive prefix sum of item degrees and each worker's range of the
/// concatenated edge sequence.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StrictPlan {
    pub prefix: Vec<usize>,
    pub ranges: Vec<Range<usize>>,
}

pub fn partition_strict(degrees: &[usize], workers: usize) -> StrictPlan {
    let prefix = prefix_sum(degrees.iter().copied());
    let ranges = even_split(*prefix.last().unwrap_or(&0), workers);
    StrictPlan { prefix, ranges }
}

pub(crate) fn prefix_sum(degrees: impl Iterator<Item = usize>) -> Vec<usize> {
    let mut prefix = vec![0];
    let mut acc = 0;
    for d in degrees {
        acc += d;
        prefix.push(acc);
    }
    prefix
}

impl StrictPlan {
    /// The item whose edges contain position `pos`.
    pub fn owner(&self, pos: usize) -> usize {
        locate(&self.prefix, pos)
    }

    /// Worker ranges moved to item boundaries: an item that straddles two
    /// ranges belongs entirely to the range holding its first edge.
    pub fn owner_ranges(&self) -> Vec<Range<usize>> {
        self.ranges
            .iter()
            .map(|r| snap_up(&self.prefix, r.start)..snap_up(&self.prefix, r.end))
            .collect()
    }
}

#[inline]
pub(crate) fn locate(prefix: &[usize], pos: usize) -> usize {
    prefix.partition_point(|&p| p <= pos) - 1
}

/// Smallest item boundary at or after `pos`.
#[inline]
pub(crate) fn snap_up(prefix: &[usize], pos: usize) -> usize {
    let i = prefix.partition_point(|&p| p < pos);
    prefix[i.min(prefix.len() - 1)]
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn etwc_examples() {
        let s = partition_etwc(0..300, 32, 256);
        assert_eq!((s.cta.len(), s.warp.len(), s.thread.len()), (256, 32, 12));
        assert_eq!(s.cta, 0..256);
        assert_eq!(s.warp, 256..288);
        assert_eq!(s.thread, 288..300);

        let s = partition_etwc(10..42, 32, 256);
        assert_eq!((s.cta.len(), s.warp.len(), s.thread.len()), (0, 32, 0));
        let s = partition_etwc(0..31, 32, 256);
        assert_eq!((s.cta.len(), s.warp.len(), s.thread.len()), (0, 0, 31));
        let s = partition_etwc(5..5, 32, 256);
        assert!(s.cta.is_empty() && s.warp.is_empty() && s.thread.is_empty());
    }

    #[test]
    fn strict_example() {
        let p = partition_strict(&[3, 1, 4], 2);
        assert_eq!(p.prefix, vec![0, 3, 4, 8]);
        assert_eq!(p.ranges, vec![0..4, 4..8]);
        assert_eq!(p.owner(0), 0);
        assert_eq!(p.owner(3), 1);
        assert_eq!(p.owner(4), 2);
        assert_eq!(p.owner_ranges(), vec![0..4, 4..8]);
        let p = partition_strict(&[5, 1], 2);
        assert_eq!(p.ranges, vec![0..3, 3..6]);
        assert_eq!(p.owner_ranges(), vec![0..5, 5..6]);
    }

    #[test]
    fn twc_example() {
        let q = partition_twc(&[300, 40, 3], 32, 256);
        assert_eq!(q.cta, vec![0]);
        assert_eq!(q.warp, vec![1]);
        assert_eq!(q.thread, vec![2]);
        let q = partition_twc(&[256, 32, 33], 32, 256);
        assert_eq!(q.warp, vec![0, 2]);
        assert_eq!(q.thread, vec![1]);
    }

    #[test]
    fn cm_split() {
        let parts = even_split(5, 2);
        assert_eq!(parts.iter().map(|r| r.len()).collect::<Vec<_>>(), vec![3, 2]);
    }

    proptest! {
        #[test]
        fn etwc_covers_range(start in 0usize..1000, deg in 0usize..2000, wexp in 0u32..4, cexp in 0u32..4) {
            let warp = 1usize << wexp;
            let cta = warp << cexp;
            let s = partition_etwc(start..start + deg, warp, cta);
            prop_assert_eq!(s.cta.start, start);
            prop_assert_eq!(s.cta.end, s.warp.start);
            prop_assert_eq!(s.warp.end, s.thread.start);
            prop_assert_eq!(s.thread.end, start + deg);
            prop_assert_eq!(s.cta.len() % cta, 0);
            prop_assert_eq!(s.warp.len() % warp, 0);
            prop_assert!(s.warp.len() < cta);
            prop_assert!(s.thread.len() < warp);
        }

        #[test]
        fn strict_ranges_cover_all_edges(degrees in prop::collection::vec(0usize..50, 0..40), workers in 1usize..9) {
            let p = partition_strict(&degrees, workers);
            let total: usize = degrees.iter().sum();
            let mut pos = 0;
            for r in &p.ranges {
                prop_assert_eq!(r.start, pos);
                pos = r.end;
            }
            prop_assert_eq!(pos, total);
            let lens: Vec<_> = p.ranges.iter().map(|r| r.len()).collect();
            prop_assert!(lens.iter().max().unwrap() - lens.iter().min().unwrap() <= 1);
            let mut pos = 0;
            for r in p.owner_ranges() {
                prop_assert_eq!(r.start, pos);
                prop_assert!(p.prefix.contains(&r.start) && p.prefix.contains(&r.end));
                pos = r.end;
            }
            prop_assert_eq!(pos, total);
        }
    }
}
