// SPDX-License-Identifier: MIT OR Apache-2.0

//! End-to-end evaluation: threshold selection on the training fold, then
//! per-subject counting and subject-mean aggregation on the held-out fold.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::{EvalConfig, SchemeMode};
use crate::error::{Error, Result};
use crate::interval::{rasterize, seconds_to_samples, Interval};
use crate::matching::{extend_ground_truth, match_and_count, MatchConfig};
use crate::metrics::{select_threshold, threshold_grid, MetricSet, ThresholdSweep};
use crate::postproc::PreparedScores;
use crate::schemes::{build_targets, evaluate_pointwise, evaluate_windowed, WindowPrediction};
use crate::types::{Fold, MatchResult, SubjectRecord};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SubjectResult {
    pub subject_id: String,
    pub fold: Fold,
    pub metrics: MetricSet,
    pub counts: MatchResult,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub scheme: SchemeMode,
    /// `None` when the inputs were binary window labels.
    pub t_opt: Option<f64>,
    pub per_subject: Vec<SubjectResult>,
    /// Subject-mean of every metric.
    pub aggregate: MetricSet,
    pub config: EvalConfig,
}

impl Report {
    /// Recomputes the aggregate from the per-subject rows.
    pub fn check_consistency(&self) -> Result<()> {
        let mean = MetricSet::mean(self.per_subject.iter().map(|s| &s.metrics))
            .ok_or(Error::EmptyFold("evaluation"))?;
        if mean != self.aggregate {
            return Err(Error::invalid(format!(
                "aggregate {:?} differs from subject mean {mean:?}",
                self.aggregate
            )));
        }
        for s in &self.per_subject {
            let c = &s.counts;
            if c.matched_pairs.len() > c.tp {
                return Err(Error::invalid(format!(
                    "subject {} lists more matched pairs than true positives",
                    s.subject_id
                )));
            }
        }
        Ok(())
    }
}

/// Subject-mean F2 for every grid threshold plus the selected threshold.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepSummary {
    pub thresholds: Vec<f64>,
    pub mean_f2: Vec<f64>,
    pub t_opt: f64,
    pub sweep: ThresholdSweep,
}

/// A subject with its targets and prepared scores.
struct Prepared<'a> {
    record: &'a SubjectRecord,
    scores: PreparedScores,
    targets: Vec<Interval>,
    match_cfg: MatchConfig,
    gt_ext: Vec<Interval>,
}

impl<'a> Prepared<'a> {
    fn new(record: &'a SubjectRecord, config: &EvalConfig) -> Result<Self> {
        record.validate()?;
        let rate = record.scores.sampling_rate_hz();
        let n = record.scores.n_samples();
        let scores = PreparedScores::new(&record.scores, config)?;
        let targets = build_targets(&record.events, config, rate, n)
            .map_err(|e| Error::invalid(format!("subject {}: {e}", record.subject_id)))?;
        let match_cfg = MatchConfig::from_eval(config, rate, n);
        let gt_ext = extend_ground_truth(&targets, &match_cfg);
        Ok(Self {
            record,
            scores,
            targets,
            match_cfg,
            gt_ext,
        })
    }

    fn counts(&self, t: Option<f64>, config: &EvalConfig) -> Result<MatchResult> {
        let n = self.scores.n_samples();
        match config.scheme {
            SchemeMode::Alpec => {
                let preds = self.scores.intervals(t, config)?;
                match_and_count(&self.gt_ext, &preds, &self.match_cfg)
            }
            SchemeMode::Pe => {
                evaluate_pointwise(&rasterize(&self.targets, n), &self.scores.binary(t)?)
            }
            SchemeMode::We => {
                let gt = rasterize(&self.targets, n);
                match self.scores.window_binary(t)? {
                    Some((window_samples, labels)) => {
                        evaluate_windowed(&gt, WindowPrediction::Windows(&labels), window_samples)
                    }
                    None => {
                        let window_samples =
                            seconds_to_samples(config.window_s, self.scores.rate_hz());
                        let pred = self.scores.binary(t)?;
                        evaluate_windowed(&gt, WindowPrediction::Pointwise(&pred), window_samples)
                    }
                }
            }
        }
    }

    fn f2_row(&self, grid: &[f64], config: &EvalConfig) -> Result<Vec<f64>> {
        grid.par_iter()
            .map(|&t| {
                self.counts(Some(t), config)
                    .map(|c| MetricSet::from_counts(c.tp, c.fp, c.fn_).f2)
            })
            .collect()
    }
}

fn prepare_all<'a>(
    subjects: &[&'a SubjectRecord],
    config: &EvalConfig,
) -> Result<Vec<Prepared<'a>>> {
    subjects
        .par_iter()
        .map(|s| Prepared::new(s, config))
        .collect()
}

fn check_unique_ids(dataset: &[SubjectRecord]) -> Result<()> {
    let mut seen = std::collections::HashSet::new();
    for s in dataset {
        if !seen.insert(s.subject_id.as_str()) {
            return Err(Error::invalid(format!(
                "duplicate subject id '{}'",
                s.subject_id
            )));
        }
    }
    Ok(())
}

fn sweep_prepared(train: &[Prepared<'_>], config: &EvalConfig) -> Result<ThresholdSweep> {
    if train.is_empty() {
        return Err(Error::EmptyFold("training"));
    }
    let thresholds = threshold_grid();
    let per_subject_f2 = train
        .par_iter()
        .map(|p| p.f2_row(&thresholds, config))
        .collect::<Result<Vec<_>>>()?;
    Ok(ThresholdSweep {
        thresholds,
        per_subject_f2,
    })
}

/// Per-subject F2 over the threshold grid for the training fold.
pub fn sweep_dataset(dataset: &[SubjectRecord], config: &EvalConfig) -> Result<SweepSummary> {
    config.validate()?;
    check_unique_ids(dataset)?;
    let train: Vec<&SubjectRecord> = dataset.iter().filter(|s| s.fold == Fold::Train).collect();
    let train = prepare_all(&train, config)?;
    let sweep = sweep_prepared(&train, config)?;
    let mean_f2 = sweep.mean_f2()?;
    let t_opt = select_threshold(&sweep)?;
    Ok(SweepSummary {
        thresholds: sweep.thresholds.clone(),
        mean_f2,
        t_opt,
        sweep,
    })
}

/// Runs the configured scheme over the dataset.
///
/// Probability scores get a threshold selected on the training fold (highest
/// subject-mean F2, smallest threshold on ties). Binary window labels are
/// used as they are. Metrics are then computed for every subject in the
/// evaluation fold and averaged over subjects.
pub fn evaluate(dataset: &[SubjectRecord], config: &EvalConfig) -> Result<Report> {
    config.validate()?;
    check_unique_ids(dataset)?;

    let held_out: Vec<&SubjectRecord> = dataset
        .iter()
        .filter(|s| config.eval_fold.includes(s.fold))
        .collect();
    if held_out.is_empty() {
        return Err(Error::EmptyFold("evaluation"));
    }
    let held_out = prepare_all(&held_out, config)?;

    let labels = held_out.iter().filter(|p| p.scores.is_labels()).count();
    let t_opt = if labels == held_out.len() {
        None
    } else if labels == 0 {
        let train: Vec<&SubjectRecord> = dataset.iter().filter(|s| s.fold == Fold::Train).collect();
        let train = prepare_all(&train, config)?;
        Some(select_threshold(&sweep_prepared(&train, config)?)?)
    } else {
        return Err(Error::invalid(
            "evaluation fold mixes binary window labels with probability scores",
        ));
    };

    let per_subject = held_out
        .par_iter()
        .map(|p| {
            let counts = p.counts(t_opt, config)?;
            Ok(SubjectResult {
                subject_id: p.record.subject_id.clone(),
                fold: p.record.fold,
                metrics: MetricSet::from_counts(counts.tp, counts.fp, counts.fn_),
                counts,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let aggregate = MetricSet::mean(per_subject.iter().map(|s| &s.metrics))
        .ok_or(Error::EmptyFold("evaluation"))?;

    let report = Report {
        scheme: config.scheme,
        t_opt,
        per_subject,
        aggregate,
        config: config.clone(),
    };
    report.check_consistency()?;
    Ok(report)
}

/// [`evaluate`] with the scheme forced to event-level counting.
pub fn evaluate_alpec(dataset: &[SubjectRecord], config: &EvalConfig) -> Result<Report> {
    let config = EvalConfig {
        scheme: SchemeMode::Alpec,
        ..config.clone()
    };
    evaluate(dataset, &config)
}

/// Runs `f` on a dedicated pool of `threads` workers.
pub fn with_threads<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> Result<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.max(1))
        .build()
        .map_err(|e| Error::invalid(format!("cannot start worker pool: {e}")))?;
    Ok(pool.install(f))
}
