// SPDX-License-Identifier: MIT OR Apache-2.0

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::types::MatchResult;

/// Number of grid thresholds: `0.00, 0.01, ..., 1.00`.
pub const GRID_SIZE: usize = 101;

/// `t_k = k / 100` for `k = 0..=100`.
pub fn threshold_grid() -> Vec<f64> {
    (0..GRID_SIZE).map(|k| k as f64 / 100.0).collect()
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct MetricSet {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub f2: f64,
}

/// `(1 + beta^2) P R / (beta^2 P + R)`, zero when the denominator is zero.
pub fn f_beta(precision: f64, recall: f64, beta: f64) -> f64 {
    let b2 = beta * beta;
    let denom = b2 * precision + recall;
    if denom == 0.0 {
        0.0
    } else {
        (1.0 + b2) * precision * recall / denom
    }
}

impl MetricSet {
    /// Empty denominators give 0, except that no events and no predictions
    /// at all is scored as perfect agreement (all metrics 1).
    pub fn from_counts(tp: usize, fp: usize, fn_: usize) -> Self {
        if tp == 0 && fp == 0 && fn_ == 0 {
            return Self {
                precision: 1.0,
                recall: 1.0,
                f1: 1.0,
                f2: 1.0,
            };
        }
        let ratio = |num: usize, den: usize| {
            if den == 0 {
                0.0
            } else {
                num as f64 / den as f64
            }
        };
        let precision = ratio(tp, tp + fp);
        let recall = ratio(tp, tp + fn_);
        Self {
            precision,
            recall,
            f1: f_beta(precision, recall, 1.0),
            f2: f_beta(precision, recall, 2.0),
        }
    }

    /// Arithmetic mean of each metric; `None` for an empty slice.
    pub fn mean<'a>(sets: impl IntoIterator<Item = &'a MetricSet>) -> Option<MetricSet> {
        let mut acc = MetricSet::default();
        let mut count = 0usize;
        for m in sets {
            acc.precision += m.precision;
            acc.recall += m.recall;
            acc.f1 += m.f1;
            acc.f2 += m.f2;
            count += 1;
        }
        if count == 0 {
            return None;
        }
        let c = count as f64;
        Some(MetricSet {
            precision: acc.precision / c,
            recall: acc.recall / c,
            f1: acc.f1 / c,
            f2: acc.f2 / c,
        })
    }
}

pub fn compute_metrics(counts: &MatchResult) -> MetricSet {
    MetricSet::from_counts(counts.tp, counts.fp, counts.fn_)
}

/// Per-subject F2 over a threshold grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThresholdSweep {
    pub thresholds: Vec<f64>,
    /// `per_subject_f2[subject][k]` is the F2 of that subject at `thresholds[k]`.
    pub per_subject_f2: Vec<Vec<f64>>,
}

impl ThresholdSweep {
    /// Subject-mean F2 for each threshold, summed in subject order.
    pub fn mean_f2(&self) -> Result<Vec<f64>> {
        if self.per_subject_f2.is_empty() {
            return Err(Error::EmptyFold("training"));
        }
        if self.thresholds.is_empty() {
            return Err(Error::invalid("threshold grid is empty"));
        }
        let k = self.thresholds.len();
        if let Some(row) = self.per_subject_f2.iter().find(|r| r.len() != k) {
            return Err(Error::LengthMismatch {
                expected: k,
                found: row.len(),
            });
        }
        let count = self.per_subject_f2.len() as f64;
        Ok((0..k)
            .map(|j| self.per_subject_f2.iter().map(|row| row[j]).sum::<f64>() / count)
            .collect())
    }
}

/// Threshold with the highest subject-mean F2; ties go to the smallest
/// threshold.
pub fn select_threshold(sweep: &ThresholdSweep) -> Result<f64> {
    let means = sweep.mean_f2()?;
    Ok(sweep.thresholds[argmax_first(&means)])
}

pub(crate) fn argmax_first(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate().skip(1) {
        if v > values[best] {
            best = i;
        }
    }
    best
}
