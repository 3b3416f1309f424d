// SPDX-License-Identifier: MIT OR Apache-2.0

//! Seeded synthetic subjects and baseline predictors.
//!
//! Randomness comes from ChaCha8 seeded with `seed`; each subject draws from
//! its own stream (`2 * index` for onsets, `2 * index + 1` for predictions),
//! so serial and parallel generation yield the same dataset.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::config::EvalConfig;
use crate::error::{Error, Result};
use crate::interval::{rasterize, seconds_to_samples, Interval};
use crate::schemes::{build_targets, window_labels_presence};
use crate::types::{window_count, EventAnnotation, Fold, ScoreSeries, SubjectRecord};

pub const EVENT_LABEL: &str = "arousal";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ArousalCount {
    Fixed(usize),
    /// Uniform over `min..=max`.
    Range {
        min: usize,
        max: usize,
    },
}

#[derive(Clone, Debug, PartialEq)]
pub struct SynthParams {
    pub n_subjects: usize,
    pub night_length_s: f64,
    pub rate_hz: f64,
    pub arousals: ArousalCount,
    pub min_onset_gap_s: f64,
    pub event_duration_s: f64,
    /// Leading share of subjects assigned to the training fold; the rest
    /// go to validation.
    pub train_fraction: f64,
    pub seed: u64,
}

impl Default for SynthParams {
    fn default() -> Self {
        Self {
            n_subjects: 20,
            night_length_s: 28_800.0,
            rate_hz: 1.0,
            arousals: ArousalCount::Fixed(167),
            min_onset_gap_s: 13.0,
            event_duration_s: 3.0,
            train_fraction: 0.5,
            seed: 0,
        }
    }
}

impl SynthParams {
    pub fn n_samples(&self) -> usize {
        seconds_to_samples(self.night_length_s, self.rate_hz)
    }

    fn fold(&self, index: usize) -> Fold {
        let n_train = (self.n_subjects as f64 * self.train_fraction).round() as usize;
        if index < n_train {
            Fold::Train
        } else {
            Fold::Validation
        }
    }
}

fn stream(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

pub fn subject_id(index: usize) -> String {
    format!("sub{index:04}")
}

/// Places the arousal onsets for one subject uniformly at random subject to
/// the minimum onset spacing. Scores are left at zero; see [`predict`].
pub fn generate_subject(params: &SynthParams, index: usize) -> Result<SubjectRecord> {
    let mut rng = stream(params.seed, 2 * index as u64);
    let count = match params.arousals {
        ArousalCount::Fixed(k) => k,
        ArousalCount::Range { min, max } if min <= max => rng.random_range(min..=max),
        ArousalCount::Range { min, max } => {
            return Err(Error::invalid(format!(
                "arousal range {min}..={max} is empty"
            )))
        }
    };
    let infeasible = || Error::InfeasiblePacking {
        count,
        gap_s: params.min_onset_gap_s,
        night_s: params.night_length_s,
    };
    if count as f64 * params.min_onset_gap_s >= params.night_length_s {
        return Err(infeasible());
    }

    let f = params.rate_hz;
    let n = params.n_samples();
    let gap = seconds_to_samples(params.min_onset_gap_s, f);
    let duration = seconds_to_samples(params.event_duration_s, f);
    let used = (count.saturating_sub(1) * gap + duration) as i64;
    let slack = n as i64 - used;
    if slack < 0 {
        return Err(infeasible());
    }
    let mut offsets: Vec<usize> = (0..count)
        .map(|_| rng.random_range(0..=slack as usize))
        .collect();
    offsets.sort_unstable();

    let id = subject_id(index);
    let events = offsets
        .iter()
        .enumerate()
        .map(|(i, &u)| EventAnnotation {
            subject_id: id.clone(),
            label: EVENT_LABEL.to_string(),
            onset_s: (u + i * gap) as f64 / f,
            duration_s: params.event_duration_s,
        })
        .collect();
    Ok(SubjectRecord {
        subject_id: id,
        scores: ScoreSeries::pointwise(vec![0.0; n], f)?,
        events,
        fold: params.fold(index),
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum PredictorKind {
    /// Every window labeled 0.
    Constant0,
    /// Every window labeled 1.
    Constant1,
    /// Each window labeled 1 with probability 0.5.
    RandomUniform,
    /// Each window labeled 1 with the subject's positive-window rate.
    RandomStratified,
    /// Pointwise 1.0 on the target intervals, each shifted by a uniform
    /// offset in `[-jitter_s, jitter_s]`, dropped with probability
    /// `miss_rate`, and followed by a spurious copy elsewhere with
    /// probability `extra_rate`.
    JitteredOracle {
        jitter_s: f64,
        miss_rate: f64,
        extra_rate: f64,
    },
}

impl PredictorKind {
    pub fn validate(&self) -> Result<()> {
        if let Self::JitteredOracle {
            jitter_s,
            miss_rate,
            extra_rate,
        } = *self
        {
            if !(jitter_s.is_finite() && jitter_s >= 0.0) {
                return Err(Error::invalid(format!(
                    "jitter must be >= 0, got {jitter_s}"
                )));
            }
            for (name, rate) in [("miss_rate", miss_rate), ("extra_rate", extra_rate)] {
                if !(0.0..=1.0).contains(&rate) {
                    return Err(Error::invalid(format!(
                        "{name} must lie in [0, 1], got {rate}"
                    )));
                }
            }
        }
        Ok(())
    }
}

impl fmt::Display for PredictorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Constant0 => f.write_str("constant_0"),
            Self::Constant1 => f.write_str("constant_1"),
            Self::RandomUniform => f.write_str("random_uniform"),
            Self::RandomStratified => f.write_str("random_stratified"),
            Self::JitteredOracle {
                jitter_s,
                miss_rate,
                extra_rate,
            } => write!(f, "jittered_oracle({jitter_s},{miss_rate},{extra_rate})"),
        }
    }
}

impl FromStr for PredictorKind {
    type Err = Error;

    /// Accepts `constant_0`, `constant_1`, `random_uniform`,
    /// `random_stratified` and `jittered_oracle(jitter_s,miss_rate,extra_rate)`;
    /// trailing jittered-oracle arguments default to 0.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let kind = match s {
            "constant_0" | "constant0" => Self::Constant0,
            "constant_1" | "constant1" => Self::Constant1,
            "random_uniform" => Self::RandomUniform,
            "random_stratified" => Self::RandomStratified,
            "jittered_oracle" => Self::JitteredOracle {
                jitter_s: 0.0,
                miss_rate: 0.0,
                extra_rate: 0.0,
            },
            other => {
                let args = other
                    .strip_prefix("jittered_oracle(")
                    .and_then(|rest| rest.strip_suffix(')'))
                    .ok_or_else(|| Error::invalid(format!("unknown predictor '{other}'")))?;
                let nums = args
                    .split(',')
                    .map(|a| a.trim().parse::<f64>())
                    .collect::<std::result::Result<Vec<_>, _>>()
                    .map_err(|_| Error::invalid(format!("bad predictor arguments in '{other}'")))?;
                if nums.is_empty() || nums.len() > 3 {
                    return Err(Error::invalid(format!(
                        "jittered_oracle takes 1 to 3 arguments, got '{other}'"
                    )));
                }
                let arg = |i: usize| nums.get(i).copied().unwrap_or(0.0);
                Self::JitteredOracle {
                    jitter_s: arg(0),
                    miss_rate: arg(1),
                    extra_rate: arg(2),
                }
            }
        };
        kind.validate()?;
        Ok(kind)
    }
}

/// Fraction of windows containing at least one target sample.
pub fn positive_window_prior(targets: &[Interval], n: usize, window_samples: usize) -> Result<f64> {
    let windows = window_labels_presence(&rasterize(targets, n), window_samples)?;
    if windows.is_empty() {
        return Ok(0.0);
    }
    Ok(windows.iter().filter(|&&w| w == 1).count() as f64 / windows.len() as f64)
}

/// Arousal count whose targets are expected to make `prior` of all windows
/// positive, treating onsets as independent uniform arrivals. A target of
/// `target_len_s` touches `(s + l - 1/f) / s` windows on average.
pub fn arousal_count_for_prior(
    prior: f64,
    night_length_s: f64,
    window_s: f64,
    target_len_s: f64,
    rate_hz: f64,
) -> Result<usize> {
    if !(0.0..1.0).contains(&prior) {
        return Err(Error::invalid(format!(
            "prior must lie in [0, 1), got {prior}"
        )));
    }
    let windows = (night_length_s / window_s).ceil();
    let reach = (window_s + target_len_s - 1.0 / rate_hz) / window_s;
    Ok((-(1.0 - prior).ln() * windows / reach).round() as usize)
}

/// Scores for one subject under a baseline predictor. Window-level kinds
/// use windows of `config.window_s`; target-based kinds use the configured
/// task to build targets.
pub fn predict(
    kind: PredictorKind,
    subject: &SubjectRecord,
    config: &EvalConfig,
    seed: u64,
) -> Result<ScoreSeries> {
    kind.validate()?;
    let f = subject.scores.sampling_rate_hz();
    let n = subject.scores.n_samples();
    let window_samples = seconds_to_samples(config.window_s, f);
    if window_samples == 0 {
        return Err(Error::invalid("window size is shorter than one sample"));
    }
    let windows = window_count(n, window_samples);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let windowed = |values: Vec<f64>| ScoreSeries::windowed(values, f, n, window_samples);

    match kind {
        PredictorKind::Constant0 => windowed(vec![0.0; windows]),
        PredictorKind::Constant1 => windowed(vec![1.0; windows]),
        PredictorKind::RandomUniform => windowed(
            (0..windows)
                .map(|_| f64::from(u8::from(rng.random_bool(0.5))))
                .collect(),
        ),
        PredictorKind::RandomStratified => {
            let targets = build_targets(&subject.events, config, f, n)?;
            let prior = positive_window_prior(&targets, n, window_samples)?;
            windowed(
                (0..windows)
                    .map(|_| f64::from(u8::from(rng.random_bool(prior))))
                    .collect(),
            )
        }
        PredictorKind::JitteredOracle {
            jitter_s,
            miss_rate,
            extra_rate,
        } => {
            let targets = build_targets(&subject.events, config, f, n)?;
            let jitter = seconds_to_samples(jitter_s, f) as i64;
            let mut shifted = Vec::with_capacity(targets.len());
            for target in &targets {
                let missed = rng.random_bool(miss_rate);
                let offset = rng.random_range(-jitter..=jitter);
                let extra = rng.random_bool(extra_rate);
                if !missed {
                    let start = (target.start as i64 + offset).clamp(0, n as i64) as usize;
                    let end = (target.end as i64 + offset).clamp(0, n as i64) as usize;
                    if start < end {
                        shifted.push(Interval { start, end });
                    }
                }
                if extra {
                    let len = target.len().min(n);
                    let start = rng.random_range(0..=n - len);
                    shifted.push(Interval {
                        start,
                        end: start + len,
                    });
                }
            }
            let values = rasterize(&shifted, n).into_iter().map(f64::from).collect();
            ScoreSeries::pointwise(values, f)
        }
    }
}

/// SplitMix64 finalizer, used to derive per-subject prediction seeds.
fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn prediction_seed(seed: u64, index: usize) -> u64 {
    mix(seed ^ mix(2 * index as u64 + 1))
}

/// Generates every subject and its predictions.
pub fn generate_dataset(
    params: &SynthParams,
    kind: PredictorKind,
    config: &EvalConfig,
) -> Result<Vec<SubjectRecord>> {
    (0..params.n_subjects)
        .into_par_iter()
        .map(|index| {
            let mut subject = generate_subject(params, index)?;
            subject.scores = predict(kind, &subject, config, prediction_seed(params.seed, index))?;
            Ok(subject)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::TaskMode;

    fn small(count: usize, seed: u64) -> SynthParams {
        SynthParams {
            n_subjects: 1,
            night_length_s: 600.0,
            arousals: ArousalCount::Fixed(count),
            seed,
            ..SynthParams::default()
        }
    }

    #[test]
    fn onsets_respect_spacing() {
        let s = generate_subject(&small(10, 7), 0).unwrap();
        assert_eq!(s.events.len(), 10);
        for pair in s.events.windows(2) {
            assert!(pair[1].onset_s - pair[0].onset_s >= 13.0);
        }
        assert!(s.events.iter().all(|e| e.duration_s == 3.0));
        s.validate().unwrap();
    }

    #[test]
    fn same_seed_same_onsets() {
        let a = generate_subject(&small(10, 7), 0).unwrap();
        let b = generate_subject(&small(10, 7), 0).unwrap();
        assert_eq!(a, b);
        let c = generate_subject(&small(10, 8), 0).unwrap();
        assert_ne!(a.events, c.events);
    }

    #[test]
    fn infeasible_packing_is_an_error() {
        assert!(matches!(
            generate_subject(&small(100, 7), 0),
            Err(Error::InfeasiblePacking { .. })
        ));
    }

    #[test]
    fn range_counts_stay_in_range() {
        let params = SynthParams {
            arousals: ArousalCount::Range { min: 5, max: 9 },
            night_length_s: 600.0,
            n_subjects: 30,
            ..SynthParams::default()
        };
        for i in 0..30 {
            let k = generate_subject(&params, i).unwrap().events.len();
            assert!((5..=9).contains(&k));
        }
    }

    #[test]
    fn folds_split_by_fraction() {
        let params = SynthParams {
            n_subjects: 4,
            ..SynthParams::default()
        };
        let folds: Vec<Fold> = (0..4).map(|i| params.fold(i)).collect();
        assert_eq!(
            folds,
            vec![Fold::Train, Fold::Train, Fold::Validation, Fold::Validation]
        );
    }

    #[test]
    fn constant_predictors() {
        let subject = generate_subject(&small(10, 1), 0).unwrap();
        let config = EvalConfig::default();
        let ones = predict(PredictorKind::Constant1, &subject, &config, 0).unwrap();
        assert_eq!(ones.values(), &[1.0; 20][..]);
        assert!(ones.is_label_sequence());
        let zeros = predict(PredictorKind::Constant0, &subject, &config, 0).unwrap();
        assert!(zeros.values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn zero_jitter_oracle_rasterizes_targets() {
        let subject = generate_subject(&small(10, 3), 0).unwrap();
        for task in [TaskMode::Fed, TaskMode::Iod, TaskMode::Pod] {
            let config = EvalConfig {
                task,
                ..EvalConfig::default()
            };
            let kind = PredictorKind::JitteredOracle {
                jitter_s: 0.0,
                miss_rate: 0.0,
                extra_rate: 0.0,
            };
            let scores = predict(kind, &subject, &config, 11).unwrap();
            let targets = build_targets(&subject.events, &config, 1.0, 600).unwrap();
            let expected: Vec<f64> = rasterize(&targets, 600)
                .into_iter()
                .map(f64::from)
                .collect();
            assert_eq!(scores.values(), expected.as_slice());
        }
    }

    #[test]
    fn stratified_rate_tracks_prior() {
        let params = SynthParams {
            n_subjects: 1,
            night_length_s: 28_800.0 * 4.0,
            arousals: ArousalCount::Fixed(660),
            ..SynthParams::default()
        };
        let subject = generate_subject(&params, 0).unwrap();
        let config = EvalConfig::default();
        let n = params.n_samples();
        let targets = build_targets(&subject.events, &config, 1.0, n).unwrap();
        let prior = positive_window_prior(&targets, n, 30).unwrap();
        let labels = predict(PredictorKind::RandomStratified, &subject, &config, 5).unwrap();
        assert!(labels.values().len() >= 1000);
        let rate = labels.values().iter().sum::<f64>() / labels.values().len() as f64;
        assert!((rate - prior).abs() <= 0.05, "rate {rate} prior {prior}");
    }

    #[test]
    fn predictor_parsing() {
        assert_eq!(
            "constant1".parse::<PredictorKind>().unwrap(),
            PredictorKind::Constant1
        );
        assert_eq!(
            "jittered_oracle(12, 0.1, 0)"
                .parse::<PredictorKind>()
                .unwrap(),
            PredictorKind::JitteredOracle {
                jitter_s: 12.0,
                miss_rate: 0.1,
                extra_rate: 0.0
            }
        );
        assert!("jittered_oracle(1,2)".parse::<PredictorKind>().is_err());
        assert!("oracle".parse::<PredictorKind>().is_err());
        let k = PredictorKind::JitteredOracle {
            jitter_s: 2.5,
            miss_rate: 0.25,
            extra_rate: 0.5,
        };
        assert_eq!(k.to_string().parse::<PredictorKind>().unwrap(), k);
    }

    #[test]
    fn prior_helper_lands_near_target() {
        let k = arousal_count_for_prior(0.2, 28_800.0, 30.0, 10.0, 1.0).unwrap();
        assert!((150..=180).contains(&k), "{k}");
    }

    #[test]
    fn parallel_generation_matches_serial() {
        let params = SynthParams {
            n_subjects: 6,
            night_length_s: 3600.0,
            arousals: ArousalCount::Fixed(40),
            seed: 99,
            ..SynthParams::default()
        };
        let config = EvalConfig::default();
        let parallel = generate_dataset(&params, PredictorKind::RandomUniform, &config).unwrap();
        let serial: Vec<_> = (0..6)
            .map(|i| {
                let mut s = generate_subject(&params, i).unwrap();
                s.scores = predict(
                    PredictorKind::RandomUniform,
                    &s,
                    &config,
                    prediction_seed(99, i),
                )
                .unwrap();
                s
            })
            .collect();
        assert_eq!(parallel, serial);
    }
}
