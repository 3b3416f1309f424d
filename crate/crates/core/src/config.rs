// SPDX-License-Identifier: MIT OR Apache-2.0

//! Evaluation configuration and its flat `key=value` file format.
//!
//! Every key has a default, so an empty file is a valid configuration:
//!
//! ```text
//! d=60          # max predicted interval duration in seconds, or "unbounded"
//! delta=10      # merge distance in seconds
//! b_before=15   # ground-truth buffer before, seconds
//! b_after=15    # ground-truth buffer after, seconds
//! b=15          # shorthand setting both buffers
//! w=3           # smoothing window in seconds, 0 disables
//! l=10          # interval length for onset-interval targets, seconds
//! s=30          # window size for windowed evaluation, seconds
//! task=iod      # fed | iod | pod
//! scheme=alpec  # alpec | pe | we
//! iod_alignment=centered   # centered | leading
//! merge=auto    # auto | onset_maxima | endpoint_gap
//! eval_fold=held_out       # held_out | validation | test
//! ```

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::types::Fold;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TaskMode {
    /// Full events: onset plus annotated duration.
    Fed,
    /// Fixed-length interval around each onset.
    Iod,
    /// One-sample point at each onset.
    Pod,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SchemeMode {
    Alpec,
    Pe,
    We,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum IodAlignment {
    /// `[onset - l/2, onset + l/2)`
    Centered,
    /// `[onset, onset + l)`
    Leading,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MergeMode {
    /// Distance between the score maxima of consecutive intervals.
    OnsetMaxima,
    /// Gap between the end of one interval and the start of the next.
    EndpointGap,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EvalFold {
    /// Every subject outside the training fold.
    HeldOut,
    Validation,
    Test,
}

impl EvalFold {
    pub fn includes(&self, fold: Fold) -> bool {
        match self {
            Self::HeldOut => fold != Fold::Train,
            Self::Validation => fold == Fold::Validation,
            Self::Test => fold == Fold::Test,
        }
    }
}

macro_rules! str_enum {
    ($ty:ty { $($variant:ident => $name:literal),+ $(,)? }) => {
        impl $ty {
            pub fn as_str(&self) -> &'static str {
                match self { $(Self::$variant => $name),+ }
            }
        }

        impl fmt::Display for $ty {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(self.as_str())
            }
        }

        impl FromStr for $ty {
            type Err = Error;

            fn from_str(s: &str) -> Result<Self> {
                match s.trim().to_ascii_lowercase().as_str() {
                    $($name => Ok(Self::$variant),)+
                    other => Err(Error::invalid(format!(
                        "unknown {} '{other}'; expected one of: {}",
                        stringify!($ty),
                        [$($name),+].join(", ")
                    ))),
                }
            }
        }
    };
}

str_enum!(TaskMode { Fed => "fed", Iod => "iod", Pod => "pod" });
str_enum!(SchemeMode { Alpec => "alpec", Pe => "pe", We => "we" });
str_enum!(IodAlignment { Centered => "centered", Leading => "leading" });
str_enum!(MergeMode { OnsetMaxima => "onset_maxima", EndpointGap => "endpoint_gap" });
str_enum!(EvalFold { HeldOut => "held_out", Validation => "validation", Test => "test" });

/// All post-processing and counting hyperparameters. Durations are seconds.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvalConfig {
    /// Longest predicted interval that may become a true positive;
    /// `None` means unbounded.
    #[serde(rename = "d")]
    pub max_duration_s: Option<f64>,
    #[serde(rename = "delta")]
    pub merge_distance_s: f64,
    #[serde(rename = "b_before")]
    pub buffer_before_s: f64,
    #[serde(rename = "b_after")]
    pub buffer_after_s: f64,
    #[serde(rename = "w")]
    pub smoothing_s: f64,
    #[serde(rename = "l")]
    pub iod_length_s: f64,
    #[serde(rename = "s")]
    pub window_s: f64,
    pub task: TaskMode,
    pub scheme: SchemeMode,
    pub iod_alignment: IodAlignment,
    /// Explicit merge rule; `None` picks it from the task.
    pub merge: Option<MergeMode>,
    pub eval_fold: EvalFold,
}

impl Default for EvalConfig {
    fn default() -> Self {
        Self {
            max_duration_s: Some(60.0),
            merge_distance_s: 10.0,
            buffer_before_s: 15.0,
            buffer_after_s: 15.0,
            smoothing_s: 3.0,
            iod_length_s: 10.0,
            window_s: 30.0,
            task: TaskMode::Iod,
            scheme: SchemeMode::Alpec,
            iod_alignment: IodAlignment::Centered,
            merge: None,
            eval_fold: EvalFold::HeldOut,
        }
    }
}

impl EvalConfig {
    /// Full-event targets merge on interval gaps; onset targets merge on
    /// score maxima.
    pub fn merge_mode(&self) -> MergeMode {
        self.merge.unwrap_or(match self.task {
            TaskMode::Fed => MergeMode::EndpointGap,
            TaskMode::Iod | TaskMode::Pod => MergeMode::OnsetMaxima,
        })
    }

    pub fn validate(&self) -> Result<()> {
        let durations = [
            ("delta", self.merge_distance_s),
            ("b_before", self.buffer_before_s),
            ("b_after", self.buffer_after_s),
            ("w", self.smoothing_s),
            ("l", self.iod_length_s),
            ("s", self.window_s),
        ];
        for (key, value) in durations {
            if !(value.is_finite() && value >= 0.0) {
                return Err(Error::invalid(format!(
                    "{key} must be a finite duration >= 0, got {value}"
                )));
            }
        }
        if let Some(d) = self.max_duration_s {
            if !(d.is_finite() && d > 0.0) {
                return Err(Error::invalid(format!(
                    "d must be > 0 or unbounded, got {d}"
                )));
            }
        }
        if self.window_s <= 0.0 {
            return Err(Error::invalid("s must be > 0"));
        }
        Ok(())
    }

    /// Applies one `key=value` setting.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let value = value.trim();
        match key.trim() {
            "d" => self.max_duration_s = parse_optional_seconds(value)?,
            "delta" => self.merge_distance_s = parse_seconds(key, value)?,
            "b_before" => self.buffer_before_s = parse_seconds(key, value)?,
            "b_after" => self.buffer_after_s = parse_seconds(key, value)?,
            "b" => {
                let b = parse_seconds(key, value)?;
                self.buffer_before_s = b;
                self.buffer_after_s = b;
            }
            "w" => self.smoothing_s = parse_optional_seconds(value)?.unwrap_or(0.0),
            "l" => self.iod_length_s = parse_seconds(key, value)?,
            "s" => self.window_s = parse_seconds(key, value)?,
            "task" => self.task = value.parse()?,
            "scheme" => self.scheme = value.parse()?,
            "iod_alignment" => self.iod_alignment = value.parse()?,
            "merge" => {
                self.merge = match value {
                    "auto" => None,
                    other => Some(other.parse()?),
                }
            }
            "eval_fold" => self.eval_fold = value.parse()?,
            other => return Err(Error::invalid(format!("unknown config key '{other}'"))),
        }
        Ok(())
    }

    pub fn parse_str(text: &str, path: &Path) -> Result<Self> {
        let mut config = Self::default();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(Error::parse(
                    path,
                    idx + 1,
                    format!("expected key=value, got '{line}'"),
                ));
            };
            config
                .set(key, value)
                .map_err(|e| Error::parse(path, idx + 1, e.to_string()))?;
        }
        config.validate().map_err(|e| Error::Validation {
            path: path.to_path_buf(),
            message: e.to_string(),
        })?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse_str(&text, path)
    }

    /// One-line `key=value` summary in file syntax.
    pub fn summary(&self) -> String {
        let d = match self.max_duration_s {
            Some(d) => d.to_string(),
            None => "unbounded".to_string(),
        };
        let merge = self.merge.map_or("auto", |m| m.as_str());
        format!(
            "d={d} delta={} b_before={} b_after={} w={} l={} s={} task={} scheme={} iod_alignment={} merge={merge} eval_fold={}",
            self.merge_distance_s,
            self.buffer_before_s,
            self.buffer_after_s,
            self.smoothing_s,
            self.iod_length_s,
            self.window_s,
            self.task,
            self.scheme,
            self.iod_alignment,
            self.eval_fold,
        )
    }
}

fn parse_seconds(key: &str, value: &str) -> Result<f64> {
    let v: f64 = value
        .parse()
        .map_err(|_| Error::invalid(format!("{key}: '{value}' is not a number")))?;
    if !(v.is_finite() && v >= 0.0) {
        return Err(Error::invalid(format!("{key} must be >= 0, got {v}")));
    }
    Ok(v)
}

/// `none`/`unbounded` map to `None`.
pub fn parse_optional_seconds(value: &str) -> Result<Option<f64>> {
    match value.trim().to_ascii_lowercase().as_str() {
        "none" | "unbounded" => Ok(None),
        other => parse_seconds("value", other).map(Some),
    }
}
