// SPDX-License-Identifier: MIT OR Apache-2.0

//! Ground-truth target construction and the per-sample / per-window
//! baseline counting schemes.

use crate::config::{EvalConfig, IodAlignment, TaskMode};
use crate::error::{Error, Result};
use crate::interval::{seconds_to_samples, Interval};
use crate::types::{window_count, EventAnnotation, MatchResult};

/// Converts annotations into target intervals for the configured task.
///
/// * `fed`: `[onset, onset + duration)`, at least one sample long
/// * `iod`: an `l`-second interval around the onset (centered or leading)
/// * `pod`: the single onset sample
///
/// Intervals are clamped to `[0, n)`. Events must be sorted by onset and the
/// resulting intervals must not overlap.
pub fn build_targets(
    events: &[EventAnnotation],
    config: &EvalConfig,
    rate_hz: f64,
    n: usize,
) -> Result<Vec<Interval>> {
    if let Some(k) = (1..events.len()).find(|&k| events[k].onset_s < events[k - 1].onset_s) {
        return Err(Error::invalid(format!(
            "events must be sorted by onset; event {k} precedes event {}",
            k - 1
        )));
    }
    let iod_len = seconds_to_samples(config.iod_length_s, rate_hz).max(1);
    let mut targets = Vec::with_capacity(events.len());
    for (k, ev) in events.iter().enumerate() {
        let onset = seconds_to_samples(ev.onset_s, rate_hz);
        let (start, end) = match config.task {
            TaskMode::Fed => {
                let end = seconds_to_samples(ev.onset_s + ev.duration_s, rate_hz);
                (onset, end.max(onset + 1))
            }
            TaskMode::Iod => match config.iod_alignment {
                IodAlignment::Centered => {
                    let start = onset as i64 - (iod_len / 2) as i64;
                    (
                        start.max(0) as usize,
                        (start + iod_len as i64).max(1) as usize,
                    )
                }
                IodAlignment::Leading => (onset, onset + iod_len),
            },
            TaskMode::Pod => (onset, onset + 1),
        };
        let end = end.min(n);
        if start >= end {
            return Err(Error::invalid(format!(
                "event {k} at {} s falls outside the {n}-sample recording",
                ev.onset_s
            )));
        }
        targets.push(Interval { start, end });
    }
    let pairs: Vec<(usize, usize)> = (1..targets.len())
        .filter(|&k| targets[k].start < targets[k - 1].end)
        .map(|k| (k - 1, k))
        .collect();
    if !pairs.is_empty() {
        return Err(Error::OverlappingTargets { pairs });
    }
    Ok(targets)
}

/// A window is positive iff any of its samples is positive. The final
/// window may be partial.
pub fn window_labels_presence(binary: &[u8], window_samples: usize) -> Result<Vec<u8>> {
    if window_samples == 0 {
        return Err(Error::invalid("window size must cover at least one sample"));
    }
    Ok(binary
        .chunks(window_samples)
        .map(|w| u8::from(w.iter().any(|&v| v != 0)))
        .collect())
}

/// Per-element confusion counts between two equal-length binary sequences.
pub fn evaluate_pointwise(gt: &[u8], pred: &[u8]) -> Result<MatchResult> {
    if gt.len() != pred.len() {
        return Err(Error::LengthMismatch {
            expected: gt.len(),
            found: pred.len(),
        });
    }
    let (mut tp, mut fp, mut fn_) = (0, 0, 0);
    for (&g, &p) in gt.iter().zip(pred) {
        match (g != 0, p != 0) {
            (true, true) => tp += 1,
            (false, true) => fp += 1,
            (true, false) => fn_ += 1,
            (false, false) => {}
        }
    }
    Ok(MatchResult::from_counts(tp, fp, fn_))
}

/// Prediction given to windowed evaluation.
#[derive(Clone, Copy, Debug)]
pub enum WindowPrediction<'a> {
    /// Pointwise binary; reduced with the presence criterion.
    Pointwise(&'a [u8]),
    /// Already one label per window.
    Windows(&'a [u8]),
}

/// Reduces ground truth (and pointwise predictions) to window labels and
/// counts per window.
pub fn evaluate_windowed(
    gt: &[u8],
    pred: WindowPrediction<'_>,
    window_samples: usize,
) -> Result<MatchResult> {
    let gt_windows = window_labels_presence(gt, window_samples)?;
    let pred_windows = match pred {
        WindowPrediction::Pointwise(p) => {
            if p.len() != gt.len() {
                return Err(Error::LengthMismatch {
                    expected: gt.len(),
                    found: p.len(),
                });
            }
            window_labels_presence(p, window_samples)?
        }
        WindowPrediction::Windows(w) => {
            let expected = window_count(gt.len(), window_samples);
            if w.len() != expected {
                return Err(Error::LengthMismatch {
                    expected,
                    found: w.len(),
                });
            }
            w.to_vec()
        }
    };
    evaluate_pointwise(&gt_windows, &pred_windows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::postproc::expand_window_labels;
    use proptest::prelude::*;

    fn ev(onset_s: f64, duration_s: f64) -> EventAnnotation {
        EventAnnotation {
            subject_id: "s".into(),
            label: "arousal".into(),
            onset_s,
            duration_s,
        }
    }

    fn cfg(task: TaskMode) -> EvalConfig {
        EvalConfig {
            task,
            ..EvalConfig::default()
        }
    }

    #[test]
    fn target_examples() {
        let e = [ev(100.0, 3.0)];
        let iv = |s, e| Interval { start: s, end: e };
        assert_eq!(
            build_targets(&e, &cfg(TaskMode::Fed), 1.0, 1000).unwrap(),
            vec![iv(100, 103)]
        );
        assert_eq!(
            build_targets(&e, &cfg(TaskMode::Iod), 1.0, 1000).unwrap(),
            vec![iv(95, 105)]
        );
        assert_eq!(
            build_targets(&e, &cfg(TaskMode::Pod), 1.0, 1000).unwrap(),
            vec![iv(100, 101)]
        );
        let leading = EvalConfig {
            iod_alignment: IodAlignment::Leading,
            ..cfg(TaskMode::Iod)
        };
        assert_eq!(
            build_targets(&e, &leading, 1.0, 1000).unwrap(),
            vec![iv(100, 110)]
        );
        assert_eq!(
            build_targets(&e, &cfg(TaskMode::Iod), 256.0, 256_000).unwrap(),
            vec![iv(25_600 - 1280, 25_600 + 1280)]
        );
    }

    #[test]
    fn targets_clamp_to_recording() {
        let iv = |s, e| Interval { start: s, end: e };
        let t = build_targets(
            &[ev(2.0, 0.0), ev(997.0, 3.0)],
            &cfg(TaskMode::Iod),
            1.0,
            1000,
        )
        .unwrap();
        assert_eq!(t, vec![iv(0, 7), iv(992, 1000)]);
        let t = build_targets(&[ev(50.0, 0.0)], &cfg(TaskMode::Fed), 1.0, 1000).unwrap();
        assert_eq!(t, vec![iv(50, 51)]);
    }

    #[test]
    fn overlapping_targets_are_reported() {
        let events = [
            ev(100.0, 3.0),
            ev(108.0, 3.0),
            ev(200.0, 3.0),
            ev(205.0, 3.0),
        ];
        match build_targets(&events, &cfg(TaskMode::Iod), 1.0, 1000) {
            Err(Error::OverlappingTargets { pairs }) => assert_eq!(pairs, vec![(0, 1), (2, 3)]),
            other => panic!("unexpected {other:?}"),
        }
        assert!(build_targets(&events, &cfg(TaskMode::Pod), 1.0, 1000).is_ok());
        assert!(
            build_targets(&[ev(5.0, 1.0), ev(1.0, 1.0)], &cfg(TaskMode::Pod), 1.0, 100).is_err()
        );
    }

    #[test]
    fn thirteen_second_spacing_never_overlaps() {
        let events: Vec<_> = (0..50).map(|k| ev(10.0 + 13.0 * k as f64, 3.0)).collect();
        for task in [TaskMode::Fed, TaskMode::Iod, TaskMode::Pod] {
            assert!(build_targets(&events, &cfg(task), 1.0, 1000).is_ok());
        }
    }

    #[test]
    fn presence_examples() {
        let mut x = vec![0u8; 90];
        x[35] = 1;
        assert_eq!(window_labels_presence(&x, 30).unwrap(), vec![0, 1, 0]);
        assert_eq!(window_labels_presence(&[0; 90], 30).unwrap(), vec![0, 0, 0]);
        let mut y = vec![0u8; 61];
        y[60] = 1;
        assert_eq!(window_labels_presence(&y, 30).unwrap(), vec![0, 0, 1]);
    }

    #[test]
    fn pointwise_examples() {
        let r = evaluate_pointwise(&[1, 0, 1, 0], &[1, 1, 0, 0]).unwrap();
        assert_eq!((r.tp, r.fp, r.fn_), (1, 1, 1));
        let gt = [1, 1, 0, 1, 0, 0];
        let r = evaluate_pointwise(&gt, &gt).unwrap();
        assert_eq!((r.tp, r.fp, r.fn_), (3, 0, 0));
        let r = evaluate_pointwise(&gt, &[1; 6]).unwrap();
        assert_eq!((r.tp, r.fp, r.fn_), (3, 3, 0));
        assert!(evaluate_pointwise(&gt, &[1; 5]).is_err());
    }

    #[test]
    fn windowed_examples() {
        // 10 windows of 30 samples, 2 of them positive.
        let mut gt = vec![0u8; 300];
        gt[40] = 1;
        gt[250] = 1;
        let r = evaluate_windowed(&gt, WindowPrediction::Windows(&[1; 10]), 30).unwrap();
        assert_eq!((r.tp, r.fp, r.fn_), (2, 8, 0));
        let gt_windows = window_labels_presence(&gt, 30).unwrap();
        let r = evaluate_windowed(&gt, WindowPrediction::Windows(&gt_windows), 30).unwrap();
        assert_eq!((r.tp, r.fp, r.fn_), (2, 0, 0));
        let r = evaluate_windowed(&gt, WindowPrediction::Pointwise(&[0; 300]), 30).unwrap();
        assert_eq!((r.tp, r.fp, r.fn_), (0, 0, 2));
        assert!(evaluate_windowed(&gt, WindowPrediction::Windows(&[1; 11]), 30).is_err());
    }

    proptest! {
        #[test]
        fn presence_inverts_expansion(
            labels in prop::collection::vec(0u8..=1, 1..200),
            window in 1usize..40,
            trim in 0usize..40,
        ) {
            let trim = trim % window;
            let n = labels.len() * window - trim;
            let expanded = expand_window_labels(&labels, window, n).unwrap();
            prop_assert_eq!(window_labels_presence(&expanded, window).unwrap(), labels);
        }

        #[test]
        fn unit_windows_match_pointwise(
            pairs in prop::collection::vec((0u8..=1, 0u8..=1), 0..300),
        ) {
            let (gt, pred): (Vec<u8>, Vec<u8>) = pairs.into_iter().unzip();
            let a = evaluate_windowed(&gt, WindowPrediction::Pointwise(&pred), 1).unwrap();
            let b = evaluate_pointwise(&gt, &pred).unwrap();
            prop_assert_eq!(&a, &b);
            prop_assert_eq!(b.tp + b.fn_, gt.iter().filter(|&&g| g == 1).count());
        }
    }
}
