// SPDX-License-Identifier: MIT OR Apache-2.0

#![forbid(unsafe_code)]

//! Event-level post-processing and evaluation for detectors that flag short
//! events (such as sleep arousals) in long recordings.
//!
//! Predictions are thresholded, turned into intervals and merged; ground
//! truth is widened by tolerance buffers; each ground-truth event claims at
//! most one sufficiently short overlapping prediction. Precision, recall and
//! F2 are computed per subject and averaged over subjects, with the decision
//! threshold picked on a separate training fold. Per-sample and per-window
//! baseline schemes, a synthetic data generator and file formats for
//! datasets and reports are included.

pub mod ablation;
pub mod config;
pub mod error;
pub mod evaluate;
pub mod interval;
pub mod io;
pub mod matching;
pub mod metrics;
pub mod postproc;
pub mod reference;
pub mod schemes;
pub mod synth;
pub mod types;

pub use ablation::{run_ablation, AblationParam, AblationRow};
pub use config::{EvalConfig, EvalFold, IodAlignment, MergeMode, SchemeMode, TaskMode};
pub use error::{Error, Result};
pub use evaluate::{evaluate, evaluate_alpec, sweep_dataset, Report, SubjectResult, SweepSummary};
pub use interval::{extract_intervals, overlaps, Interval};
pub use matching::{extend_ground_truth, match_and_count, MatchConfig};
pub use metrics::{compute_metrics, select_threshold, threshold_grid, MetricSet, ThresholdSweep};
pub use postproc::{expand_window_labels, merge_intervals, post_process, smooth_scores, threshold};
pub use reference::reference_match_oracle;
pub use schemes::{build_targets, evaluate_pointwise, evaluate_windowed, window_labels_presence};
pub use synth::{generate_dataset, generate_subject, predict, PredictorKind, SynthParams};
pub use types::{EventAnnotation, Fold, MatchResult, Resolution, ScoreSeries, SubjectRecord};
