// SPDX-License-Identifier: MIT OR Apache-2.0

//! Ground-truth buffering and greedy one-to-one event counting.

use crate::config::EvalConfig;
use crate::error::Result;
use crate::interval::{ensure_sorted, overlaps, seconds_to_samples, Interval};
use crate::types::MatchResult;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MatchConfig {
    pub buffer_before_s: f64,
    pub buffer_after_s: f64,
    /// `None` disables the duration limit.
    pub max_duration_s: Option<f64>,
    pub rate_hz: f64,
    pub n_samples: usize,
}

impl MatchConfig {
    pub fn from_eval(config: &EvalConfig, rate_hz: f64, n_samples: usize) -> Self {
        Self {
            buffer_before_s: config.buffer_before_s,
            buffer_after_s: config.buffer_after_s,
            max_duration_s: config.max_duration_s,
            rate_hz,
            n_samples,
        }
    }

    /// Whether a predicted interval is short enough to count as a hit.
    pub fn is_eligible(&self, pred: &Interval) -> bool {
        match self.max_duration_s {
            Some(d) => (pred.len() as f64) <= d * self.rate_hz,
            None => true,
        }
    }
}

/// Widens every ground-truth interval by the configured buffers, clamped to
/// `[0, n)`. Order is kept; widened intervals may overlap and are not merged.
pub fn extend_ground_truth(gt: &[Interval], cfg: &MatchConfig) -> Vec<Interval> {
    let before = seconds_to_samples(cfg.buffer_before_s, cfg.rate_hz);
    let after = seconds_to_samples(cfg.buffer_after_s, cfg.rate_hz);
    gt.iter()
        .map(|iv| Interval {
            start: iv.start.saturating_sub(before),
            end: (iv.end + after).min(cfg.n_samples.max(iv.end)),
        })
        .collect()
}

/// Each extended ground-truth interval, in order, claims the earliest
/// unclaimed prediction that overlaps it and is not longer than the duration
/// limit. Unclaimed ground truth is a false negative; every unclaimed
/// prediction is a false positive.
pub fn match_and_count(
    gt_ext: &[Interval],
    pred: &[Interval],
    cfg: &MatchConfig,
) -> Result<MatchResult> {
    ensure_sorted(gt_ext, "ground-truth")?;
    ensure_sorted(pred, "predicted")?;

    let mut claimed = vec![false; pred.len()];
    let mut pairs = Vec::new();
    for (g, gt) in gt_ext.iter().enumerate() {
        let hit = pred
            .iter()
            .enumerate()
            .take_while(|(_, p)| p.start < gt.end)
            .find(|(j, p)| !claimed[*j] && overlaps(gt, p) && cfg.is_eligible(p));
        if let Some((j, _)) = hit {
            claimed[j] = true;
            pairs.push((g, j));
        }
    }
    let tp = pairs.len();
    Ok(MatchResult {
        tp,
        fp: pred.len() - tp,
        fn_: gt_ext.len() - tp,
        matched_pairs: pairs,
    })
}
