// SPDX-License-Identifier: MIT OR Apache-2.0

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Resolution {
    /// One value per sample.
    Pointwise,
    /// One value per consecutive, non-overlapping window of `window_samples`
    /// samples; the last window may be partial.
    Windowed { window_samples: usize },
}

impl Resolution {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Pointwise => "pointwise",
            Self::Windowed { .. } => "windowed",
        }
    }
}

/// Number of windows needed to cover `n` samples.
pub fn window_count(n: usize, window_samples: usize) -> usize {
    n.div_ceil(window_samples)
}

/// Per-subject detector output: probability scores, or binary window labels.
#[derive(Clone, Debug, PartialEq)]
pub struct ScoreSeries {
    values: Vec<f64>,
    resolution: Resolution,
    sampling_rate_hz: f64,
    n_samples: usize,
}

impl ScoreSeries {
    pub fn pointwise(values: Vec<f64>, sampling_rate_hz: f64) -> Result<Self> {
        let n = values.len();
        Self::new(values, Resolution::Pointwise, sampling_rate_hz, n)
    }

    pub fn windowed(
        values: Vec<f64>,
        sampling_rate_hz: f64,
        n_samples: usize,
        window_samples: usize,
    ) -> Result<Self> {
        Self::new(
            values,
            Resolution::Windowed { window_samples },
            sampling_rate_hz,
            n_samples,
        )
    }

    pub fn new(
        values: Vec<f64>,
        resolution: Resolution,
        sampling_rate_hz: f64,
        n_samples: usize,
    ) -> Result<Self> {
        if !(sampling_rate_hz.is_finite() && sampling_rate_hz > 0.0) {
            return Err(Error::invalid(format!(
                "sampling rate must be positive, got {sampling_rate_hz}"
            )));
        }
        let expected = match resolution {
            Resolution::Pointwise => n_samples,
            Resolution::Windowed { window_samples } => {
                if window_samples == 0 {
                    return Err(Error::invalid("window size must cover at least one sample"));
                }
                window_count(n_samples, window_samples)
            }
        };
        if values.len() != expected {
            return Err(Error::LengthMismatch {
                expected,
                found: values.len(),
            });
        }
        if let Some((i, v)) = values
            .iter()
            .enumerate()
            .find(|(_, v)| !(0.0..=1.0).contains(*v))
        {
            return Err(Error::invalid(format!(
                "score {v} at index {i} lies outside [0, 1]"
            )));
        }
        Ok(Self {
            values,
            resolution,
            sampling_rate_hz,
            n_samples,
        })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn resolution(&self) -> Resolution {
        self.resolution
    }

    pub fn sampling_rate_hz(&self) -> f64 {
        self.sampling_rate_hz
    }

    pub fn n_samples(&self) -> usize {
        self.n_samples
    }

    /// Windowed series whose values are all exactly 0 or 1 are treated as
    /// final class labels and are never thresholded.
    pub fn is_label_sequence(&self) -> bool {
        matches!(self.resolution, Resolution::Windowed { .. })
            && self.values.iter().all(|&v| v == 0.0 || v == 1.0)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EventAnnotation {
    pub subject_id: String,
    pub label: String,
    pub onset_s: f64,
    pub duration_s: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Fold {
    Train,
    Validation,
    Test,
}

impl Fold {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Train => "train",
            Self::Validation => "validation",
            Self::Test => "test",
        }
    }
}

impl fmt::Display for Fold {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Fold {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "train" => Ok(Self::Train),
            "validation" => Ok(Self::Validation),
            "test" => Ok(Self::Test),
            other => Err(Error::invalid(format!(
                "unknown fold '{other}'; expected train, validation or test"
            ))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SubjectRecord {
    pub subject_id: String,
    pub scores: ScoreSeries,
    pub events: Vec<EventAnnotation>,
    pub fold: Fold,
}

impl SubjectRecord {
    /// Checks that every event lies inside the recording.
    pub fn validate(&self) -> Result<()> {
        let length_s = self.scores.n_samples() as f64 / self.scores.sampling_rate_hz();
        for (i, ev) in self.events.iter().enumerate() {
            if !(ev.onset_s >= 0.0 && ev.duration_s >= 0.0) {
                return Err(Error::invalid(format!(
                    "subject {}: event {i} has negative onset or duration",
                    self.subject_id
                )));
            }
            if ev.onset_s + ev.duration_s > length_s {
                return Err(Error::invalid(format!(
                    "subject {}: event {i} ends at {} s, past the recording end at {length_s} s",
                    self.subject_id,
                    ev.onset_s + ev.duration_s
                )));
            }
        }
        Ok(())
    }
}

/// Counting outcome for one subject.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatchResult {
    pub tp: usize,
    pub fp: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
    /// `(ground-truth index, predicted index)` per true positive.
    #[serde(default)]
    pub matched_pairs: Vec<(usize, usize)>,
}

impl MatchResult {
    pub fn from_counts(tp: usize, fp: usize, fn_: usize) -> Self {
        Self {
            tp,
            fp,
            fn_,
            matched_pairs: Vec::new(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn windowed_length_uses_ceiling() {
        assert!(ScoreSeries::windowed(vec![0.0; 3], 1.0, 90, 30).is_ok());
        assert!(ScoreSeries::windowed(vec![0.0; 3], 1.0, 61, 30).is_ok());
        match ScoreSeries::windowed(vec![0.0; 4], 1.0, 90, 30) {
            Err(Error::LengthMismatch { expected, found }) => {
                assert_eq!((expected, found), (3, 4));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn rejects_out_of_range_scores() {
        assert!(ScoreSeries::pointwise(vec![0.2, 1.5], 1.0).is_err());
        assert!(ScoreSeries::pointwise(vec![f64::NAN], 1.0).is_err());
        assert!(ScoreSeries::pointwise(vec![0.0, 1.0], 0.0).is_err());
    }

    #[test]
    fn label_detection() {
        let labels = ScoreSeries::windowed(vec![0.0, 1.0], 1.0, 60, 30).unwrap();
        assert!(labels.is_label_sequence());
        let probs = ScoreSeries::windowed(vec![0.0, 0.4], 1.0, 60, 30).unwrap();
        assert!(!probs.is_label_sequence());
        let pointwise = ScoreSeries::pointwise(vec![0.0, 1.0], 1.0).unwrap();
        assert!(!pointwise.is_label_sequence());
    }

    #[test]
    fn events_must_fit_in_recording() {
        let record = SubjectRecord {
            subject_id: "s".into(),
            scores: ScoreSeries::pointwise(vec![0.0; 10], 1.0).unwrap(),
            events: vec![EventAnnotation {
                subject_id: "s".into(),
                label: "arousal".into(),
                onset_s: 8.0,
                duration_s: 3.0,
            }],
            fold: Fold::Train,
        };
        assert!(record.validate().is_err());
    }
}
