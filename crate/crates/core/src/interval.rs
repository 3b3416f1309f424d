// SPDX-License-Identifier: MIT OR Apache-2.0

//! Half-open sample-index intervals and the run-extraction primitive.
//!
//! All interval arithmetic in this crate uses `[start, end)` over sample
//! indices. An inclusive pair `(first, last)` maps to `[first, last + 1)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Interval {
    pub start: usize,
    pub end: usize,
}

impl Interval {
    pub fn new(start: usize, end: usize) -> Result<Self> {
        if start >= end {
            return Err(Error::invalid(format!(
                "interval [{start}, {end}) is empty or reversed"
            )));
        }
        Ok(Self { start, end })
    }

    /// One-sample interval at `index`.
    pub fn point(index: usize) -> Self {
        Self {
            start: index,
            end: index + 1,
        }
    }

    pub fn len(&self) -> usize {
        self.end - self.start
    }

    pub fn is_empty(&self) -> bool {
        self.end <= self.start
    }

    pub fn overlaps(&self, other: &Interval) -> bool {
        overlaps(self, other)
    }

    pub fn contains(&self, index: usize) -> bool {
        self.start <= index && index < self.end
    }
}

/// True iff the two half-open intervals share at least one sample.
pub fn overlaps(a: &Interval, b: &Interval) -> bool {
    a.start < b.end && a.end > b.start
}

/// Maximal runs of ones as sorted, disjoint half-open intervals.
pub fn extract_intervals(binary: &[u8]) -> Result<Vec<Interval>> {
    let mut out = Vec::new();
    let mut run_start: Option<usize> = None;
    for (i, &v) in binary.iter().enumerate() {
        match (v, run_start) {
            (1, None) => run_start = Some(i),
            (0, Some(start)) => {
                out.push(Interval { start, end: i });
                run_start = None;
            }
            (0 | 1, _) => {}
            (value, _) => return Err(Error::NonBinary { index: i, value }),
        }
    }
    if let Some(start) = run_start {
        out.push(Interval {
            start,
            end: binary.len(),
        });
    }
    Ok(out)
}

/// Writes ones over every interval into a zero sequence of length `n`.
/// Interval parts beyond `n` are ignored.
pub fn rasterize(intervals: &[Interval], n: usize) -> Vec<u8> {
    let mut out = vec![0u8; n];
    for iv in intervals {
        let end = iv.end.min(n);
        if iv.start < end {
            out[iv.start..end].fill(1);
        }
    }
    out
}

/// Converts seconds to a sample count, rounding half away from zero.
pub fn seconds_to_samples(seconds: f64, rate_hz: f64) -> usize {
    let raw = (seconds * rate_hz).round();
    if raw <= 0.0 {
        0
    } else {
        raw as usize
    }
}

pub(crate) fn ensure_sorted(intervals: &[Interval], what: &'static str) -> Result<()> {
    for (index, pair) in intervals.windows(2).enumerate() {
        if pair[1].start < pair[0].start {
            return Err(Error::Unsorted {
                what,
                index: index + 1,
            });
        }
    }
    Ok(())
}

/// Every interval non-empty, sorted, and pairwise disjoint.
pub fn is_sorted_disjoint(intervals: &[Interval]) -> bool {
    intervals.iter().all(|iv| iv.start < iv.end)
        && intervals.windows(2).all(|p| p[0].end <= p[1].start)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn iv(start: usize, end: usize) -> Interval {
        Interval { start, end }
    }

    #[test]
    fn extracts_maximal_runs() {
        assert_eq!(
            extract_intervals(&[0, 1, 1, 0, 1]).unwrap(),
            vec![iv(1, 3), iv(4, 5)]
        );
        assert!(extract_intervals(&[0, 0, 0]).unwrap().is_empty());
        assert_eq!(extract_intervals(&[1, 1, 1, 1]).unwrap(), vec![iv(0, 4)]);
        assert!(extract_intervals(&[]).unwrap().is_empty());
    }

    #[test]
    fn non_binary_value_names_its_index() {
        match extract_intervals(&[0, 1, 2, 0]) {
            Err(Error::NonBinary { index, value }) => {
                assert_eq!(index, 2);
                assert_eq!(value, 2);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn overlap_examples() {
        assert!(!overlaps(&iv(0, 5), &iv(5, 9)));
        assert!(overlaps(&iv(0, 5), &iv(4, 9)));
        assert!(overlaps(&iv(2, 3), &iv(0, 10)));
    }

    #[test]
    fn constructor_rejects_empty() {
        assert!(Interval::new(3, 3).is_err());
        assert!(Interval::new(4, 3).is_err());
        assert_eq!(Interval::new(3, 4).unwrap(), Interval::point(3));
    }

    #[test]
    fn rounding_is_half_away_from_zero() {
        assert_eq!(seconds_to_samples(2.5, 1.0), 3);
        assert_eq!(seconds_to_samples(1.5, 1.0), 2);
        assert_eq!(seconds_to_samples(0.49, 1.0), 0);
        assert_eq!(seconds_to_samples(15.0, 256.0), 3840);
        assert_eq!(seconds_to_samples(1.0 / 512.0, 256.0), 1);
    }

    proptest! {
        #[test]
        fn rasterize_inverts_extraction(bits in prop::collection::vec(0u8..=1, 0..10_000)) {
            let intervals = extract_intervals(&bits).unwrap();
            prop_assert_eq!(rasterize(&intervals, bits.len()), bits);
            prop_assert!(is_sorted_disjoint(&intervals));
            for pair in intervals.windows(2) {
                prop_assert!(pair[1].start - pair[0].end >= 1);
            }
        }

        #[test]
        fn overlap_is_symmetric_and_reflexive(
            a in (0usize..200, 1usize..50),
            b in (0usize..200, 1usize..50),
        ) {
            let a = iv(a.0, a.0 + a.1);
            let b = iv(b.0, b.0 + b.1);
            prop_assert_eq!(overlaps(&a, &b), overlaps(&b, &a));
            prop_assert!(overlaps(&a, &a));
            let brute = (a.start..a.end).any(|i| b.contains(i));
            prop_assert_eq!(overlaps(&a, &b), brute);
        }
    }
}
