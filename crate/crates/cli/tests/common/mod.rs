// SPDX-License-Identifier: MIT OR Apache-2.0

#![allow(dead_code)]

use alpec::interval::{rasterize, seconds_to_samples};
use alpec::synth::generate_subject;
use alpec::{Interval, MatchConfig, ScoreSeries, SubjectRecord, SynthParams};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Up to `max_count` sorted, disjoint intervals inside `[0, n)`.
pub fn random_intervals(
    rng: &mut ChaCha8Rng,
    max_count: usize,
    max_len: usize,
    n: usize,
) -> Vec<Interval> {
    let count = rng.random_range(0..=max_count);
    let mut out = Vec::with_capacity(count);
    let mut cursor = 0usize;
    for _ in 0..count {
        let gap = rng.random_range(0..=60);
        let len = rng.random_range(1..=max_len);
        let start = cursor + gap + usize::from(!out.is_empty());
        if start + len > n {
            break;
        }
        out.push(Interval {
            start,
            end: start + len,
        });
        cursor = start + len;
    }
    out
}

/// Random counting problem: ground truth, predictions and a configuration
/// with random buffers, duration limit and sampling rate.
pub struct MatchInstance {
    pub gt: Vec<Interval>,
    pub pred: Vec<Interval>,
    pub cfg: MatchConfig,
}

pub fn random_instance(rng: &mut ChaCha8Rng) -> MatchInstance {
    let n = 4000;
    let gt = random_intervals(rng, 50, 40, n);
    let pred = random_intervals(rng, 50, 150, n);
    let rate_hz = [0.5, 1.0, 2.0, 4.0][rng.random_range(0..4)];
    let max_duration_s = if rng.random_bool(0.2) {
        None
    } else {
        Some(rng.random_range(1..=80) as f64)
    };
    let cfg = MatchConfig {
        buffer_before_s: rng.random_range(0..=30) as f64,
        buffer_after_s: rng.random_range(0..=30) as f64,
        max_duration_s,
        rate_hz,
        n_samples: n,
    };
    MatchInstance { gt, pred, cfg }
}

/// Subjects from the generator with pointwise scores of 1.0 on the
/// intervals `shape` returns for each onset sample.
pub fn shaped_dataset(
    params: &SynthParams,
    shape: impl Fn(usize, usize) -> Vec<Interval>,
) -> Vec<SubjectRecord> {
    (0..params.n_subjects)
        .map(|i| {
            let mut s = generate_subject(params, i).unwrap();
            let n = s.scores.n_samples();
            let f = s.scores.sampling_rate_hz();
            let mut preds: Vec<Interval> = s
                .events
                .iter()
                .flat_map(|e| shape(seconds_to_samples(e.onset_s, f), n))
                .collect();
            preds.sort();
            let values = rasterize(&preds, n).into_iter().map(f64::from).collect();
            s.scores = ScoreSeries::pointwise(values, f).unwrap();
            s
        })
        .collect()
}

/// `[start, end)` clipped to `[0, n)`.
pub fn clipped(start: i64, end: i64, n: usize) -> Vec<Interval> {
    let (s, e) = (start.max(0) as usize, end.clamp(0, n as i64) as usize);
    if s < e {
        vec![Interval { start: s, end: e }]
    } else {
        Vec::new()
    }
}
