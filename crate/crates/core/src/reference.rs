// SPDX-License-Identifier: MIT OR Apache-2.0

//! Slow reference formulation of the greedy counting rule, kept separate
//! from [`crate::matching`] so the two can be cross-checked.
//!
//! It builds the full overlap/eligibility matrix with inclusive endpoint
//! arithmetic and then replays the claims over an explicit matched set.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::interval::Interval;
use crate::matching::MatchConfig;
use crate::types::MatchResult;

pub fn reference_match_oracle(
    gt_ext: &[Interval],
    pred: &[Interval],
    cfg: &MatchConfig,
) -> Result<MatchResult> {
    for (what, list) in [("ground-truth", gt_ext), ("predicted", pred)] {
        if let Some(k) = (1..list.len()).find(|&k| list[k].start < list[k - 1].start) {
            return Err(Error::Unsorted { what, index: k });
        }
    }

    let limit = cfg.max_duration_s.map(|d| d * cfg.rate_hz);
    // candidate[g][p]: prediction p overlaps ground truth g and is short enough.
    let candidate: Vec<Vec<bool>> = gt_ext
        .iter()
        .map(|g| {
            let (g_first, g_last) = (g.start as i64, g.end as i64 - 1);
            pred.iter()
                .map(|p| {
                    let (p_first, p_last) = (p.start as i64, p.end as i64 - 1);
                    let overlap = p_first <= g_last && p_last >= g_first;
                    let duration = (p_last - p_first + 1) as f64;
                    overlap && limit.is_none_or(|l| duration <= l)
                })
                .collect()
        })
        .collect();

    let mut matched: BTreeSet<usize> = BTreeSet::new();
    let mut pairs = Vec::new();
    let (mut tp, mut fn_) = (0usize, 0usize);
    for (g, row) in candidate.iter().enumerate() {
        let choice = (0..pred.len())
            .filter(|p| row[*p] && !matched.contains(p))
            .min_by_key(|&p| (pred[p].start, p));
        match choice {
            Some(p) => {
                matched.insert(p);
                pairs.push((g, p));
                tp += 1;
            }
            None => fn_ += 1,
        }
    }
    let fp = (0..pred.len()).filter(|p| !matched.contains(p)).count();
    Ok(MatchResult {
        tp,
        fp,
        fn_,
        matched_pairs: pairs,
    })
}
