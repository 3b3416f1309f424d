// SPDX-License-Identifier: MIT OR Apache-2.0

//! Prediction post-processing: smoothing, thresholding, window expansion
//! and interval merging.

use crate::config::{EvalConfig, MergeMode};
use crate::error::{Error, Result};
use crate::interval::{extract_intervals, seconds_to_samples, Interval};
use crate::types::{window_count, Resolution, ScoreSeries, SubjectRecord};

/// Centered moving average over `round(w * f)` samples. The window shrinks
/// at the sequence edges. `w = 0` returns the input unchanged.
pub fn smooth_scores(scores: &ScoreSeries, w_s: f64) -> Result<ScoreSeries> {
    if scores.resolution() != Resolution::Pointwise {
        return Err(Error::invalid("smoothing applies only to pointwise scores"));
    }
    if !(w_s.is_finite() && w_s >= 0.0) {
        return Err(Error::invalid(format!(
            "smoothing window must be >= 0, got {w_s}"
        )));
    }
    if w_s == 0.0 {
        return Ok(scores.clone());
    }
    let len = seconds_to_samples(w_s, scores.sampling_rate_hz());
    if len == 0 {
        return Err(Error::invalid(format!(
            "smoothing window of {w_s} s is shorter than one sample"
        )));
    }
    let smoothed = moving_average(scores.values(), len);
    ScoreSeries::pointwise(smoothed, scores.sampling_rate_hz())
}

fn moving_average(values: &[f64], len: usize) -> Vec<f64> {
    let n = values.len();
    let mut prefix = Vec::with_capacity(n + 1);
    prefix.push(0.0);
    let mut acc = 0.0;
    for &v in values {
        acc += v;
        prefix.push(acc);
    }
    let before = len / 2;
    let after = len - 1 - before;
    (0..n)
        .map(|i| {
            let lo = i.saturating_sub(before);
            let hi = (i + after + 1).min(n);
            ((prefix[hi] - prefix[lo]) / (hi - lo) as f64).clamp(0.0, 1.0)
        })
        .collect()
}

/// `1` where `score >= t`.
pub fn threshold(values: &[f64], t: f64) -> Vec<u8> {
    values.iter().map(|&p| u8::from(p >= t)).collect()
}

/// Assigns each window label to the samples it covers. The last window may
/// cover fewer than `window_samples` samples.
pub fn expand_window_labels(labels: &[u8], window_samples: usize, n: usize) -> Result<Vec<u8>> {
    expand_windows(labels, window_samples, n)
}

/// Same block expansion for per-window scores.
pub fn expand_window_values(values: &[f64], window_samples: usize, n: usize) -> Result<Vec<f64>> {
    expand_windows(values, window_samples, n)
}

fn expand_windows<T: Copy>(per_window: &[T], window_samples: usize, n: usize) -> Result<Vec<T>> {
    if window_samples == 0 {
        return Err(Error::invalid("window size must cover at least one sample"));
    }
    let expected = window_count(n, window_samples);
    if per_window.len() != expected {
        return Err(Error::LengthMismatch {
            expected,
            found: per_window.len(),
        });
    }
    let mut out = Vec::with_capacity(n);
    for (k, &v) in per_window.iter().enumerate() {
        let end = ((k + 1) * window_samples).min(n);
        out.extend(std::iter::repeat_n(v, end - k * window_samples));
    }
    Ok(out)
}

/// Smallest index attaining the maximum score inside `iv`.
fn argmax(scores: &[f64], iv: Interval) -> usize {
    let mut best = iv.start;
    for i in iv.start + 1..iv.end {
        if scores[i] > scores[best] {
            best = i;
        }
    }
    best
}

/// Merges consecutive intervals closer than `delta_s` seconds in a single
/// left-to-right pass. In onset-maxima mode the merged interval's
/// representative maximum is recomputed before comparing with the next one.
pub fn merge_intervals(
    intervals: &[Interval],
    scores: Option<&[f64]>,
    delta_s: f64,
    rate_hz: f64,
    mode: MergeMode,
) -> Result<Vec<Interval>> {
    let limit = delta_s * rate_hz;
    let scores = match mode {
        MergeMode::OnsetMaxima => {
            let scores = scores.ok_or(Error::MissingScores)?;
            if intervals.last().is_some_and(|iv| iv.end > scores.len()) {
                return Err(Error::MissingScores);
            }
            Some(scores)
        }
        MergeMode::EndpointGap => None,
    };

    let mut iter = intervals.iter().copied();
    let Some(mut current) = iter.next() else {
        return Ok(Vec::new());
    };
    let mut current_peak = scores.map(|s| argmax(s, current));
    let mut out = Vec::with_capacity(intervals.len());
    for next in iter {
        if next.start < current.end {
            return Err(Error::invalid("merge input must be sorted and disjoint"));
        }
        let merge = match (scores, current_peak) {
            (Some(s), Some(peak)) => (argmax(s, next).abs_diff(peak) as f64) < limit,
            _ => ((next.start - current.end) as f64) < limit,
        };
        if merge {
            current.end = next.end;
            current_peak = scores.map(|s| argmax(s, current));
        } else {
            out.push(current);
            current = next;
            current_peak = scores.map(|s| argmax(s, current));
        }
    }
    out.push(current);
    Ok(out)
}

/// Per-subject scores prepared once (smoothed or expanded to pointwise) so
/// that a threshold sweep only repeats the cheap steps.
#[derive(Clone, Debug)]
pub struct PreparedScores {
    rate_hz: f64,
    n: usize,
    /// Pointwise scores after smoothing, or window values block-expanded.
    pointwise: Vec<f64>,
    windows: Option<WindowedScores>,
}

#[derive(Clone, Debug)]
struct WindowedScores {
    values: Vec<f64>,
    window_samples: usize,
    labels: bool,
}

impl PreparedScores {
    pub fn new(scores: &ScoreSeries, config: &EvalConfig) -> Result<Self> {
        let rate_hz = scores.sampling_rate_hz();
        let n = scores.n_samples();
        match scores.resolution() {
            Resolution::Pointwise => {
                let smoothed = smooth_scores(scores, config.smoothing_s)?;
                Ok(Self {
                    rate_hz,
                    n,
                    pointwise: smoothed.values().to_vec(),
                    windows: None,
                })
            }
            Resolution::Windowed { window_samples } => Ok(Self {
                rate_hz,
                n,
                pointwise: expand_window_values(scores.values(), window_samples, n)?,
                windows: Some(WindowedScores {
                    values: scores.values().to_vec(),
                    window_samples,
                    labels: scores.is_label_sequence(),
                }),
            }),
        }
    }

    pub fn n_samples(&self) -> usize {
        self.n
    }

    pub fn rate_hz(&self) -> f64 {
        self.rate_hz
    }

    /// True when the input is already final binary window labels.
    pub fn is_labels(&self) -> bool {
        self.windows.as_ref().is_some_and(|w| w.labels)
    }

    pub fn pointwise_scores(&self) -> &[f64] {
        &self.pointwise
    }

    /// Window size in samples and the per-window binary predictions, for
    /// windowed inputs.
    pub fn window_binary(&self, t: Option<f64>) -> Result<Option<(usize, Vec<u8>)>> {
        let Some(w) = &self.windows else {
            return Ok(None);
        };
        let t = self.resolve_threshold(t)?;
        Ok(Some((w.window_samples, threshold(&w.values, t))))
    }

    /// Pointwise binary predictions before merging.
    pub fn binary(&self, t: Option<f64>) -> Result<Vec<u8>> {
        match self.window_binary(t)? {
            Some((window_samples, labels)) => expand_window_labels(&labels, window_samples, self.n),
            None => Ok(threshold(&self.pointwise, self.resolve_threshold(t)?)),
        }
    }

    /// Thresholded, expanded, extracted and merged prediction intervals.
    pub fn intervals(&self, t: Option<f64>, config: &EvalConfig) -> Result<Vec<Interval>> {
        let raw = extract_intervals(&self.binary(t)?)?;
        merge_intervals(
            &raw,
            Some(&self.pointwise),
            config.merge_distance_s,
            self.rate_hz,
            config.merge_mode(),
        )
    }

    fn resolve_threshold(&self, t: Option<f64>) -> Result<f64> {
        match t {
            Some(t) if (0.0..=1.0).contains(&t) => Ok(t),
            Some(t) => Err(Error::invalid(format!("threshold {t} outside [0, 1]"))),
            // Labels are 0/1, so any threshold in (0, 1] reproduces them.
            None if self.is_labels() => Ok(1.0),
            None => Err(Error::invalid(
                "probability scores need a threshold; only binary window labels skip thresholding",
            )),
        }
    }
}

/// Full prediction post-processing for one subject at threshold `t`
/// (`None` only for binary window labels).
pub fn post_process(
    subject: &SubjectRecord,
    t: Option<f64>,
    config: &EvalConfig,
) -> Result<Vec<Interval>> {
    PreparedScores::new(&subject.scores, config)?.intervals(t, config)
}
