// SPDX-License-Identifier: MIT OR Apache-2.0

use alpec::ablation::{format_ablation, run_ablation, AblationParam};
use alpec::io::{load_dataset, write_dataset};
use alpec::synth::ArousalCount;
use alpec::{
    evaluate, extend_ground_truth, generate_dataset, match_and_count, reference_match_oracle,
    sweep_dataset, EvalConfig, Interval, MatchConfig, PredictorKind, SchemeMode, SynthParams,
    TaskMode,
};
use proptest::prelude::*;

fn small_params(seed: u64) -> SynthParams {
    SynthParams {
        n_subjects: 6,
        night_length_s: 7200.0,
        arousals: ArousalCount::Fixed(60),
        seed,
        ..SynthParams::default()
    }
}

fn jittered(jitter_s: f64) -> PredictorKind {
    PredictorKind::JitteredOracle {
        jitter_s,
        miss_rate: 0.0,
        extra_rate: 0.0,
    }
}

fn sorted_disjoint(max: usize) -> impl Strategy<Value = Vec<Interval>> {
    prop::collection::vec((0usize..40, 1usize..60), 0..max).prop_map(|parts| {
        let mut cursor = 0;
        parts
            .into_iter()
            .map(|(gap, len)| {
                let start = cursor + gap + 1;
                cursor = start + len;
                Interval { start, end: cursor }
            })
            .collect()
    })
}

proptest! {
    #[test]
    fn matcher_agrees_with_oracle(
        gt in sorted_disjoint(30),
        pred in sorted_disjoint(30),
        b in (0u32..25, 0u32..25),
        d in prop::option::of(1u32..90),
        rate in prop::sample::select(vec![0.5, 1.0, 2.0]),
    ) {
        let n = 4000;
        let cfg = MatchConfig {
            buffer_before_s: f64::from(b.0),
            buffer_after_s: f64::from(b.1),
            max_duration_s: d.map(f64::from),
            rate_hz: rate,
            n_samples: n,
        };
        let gt: Vec<Interval> = gt.into_iter().filter(|iv| iv.end <= n).collect();
        let pred: Vec<Interval> = pred.into_iter().filter(|iv| iv.end <= n).collect();
        let ext = extend_ground_truth(&gt, &cfg);
        prop_assert_eq!(
            match_and_count(&ext, &pred, &cfg).unwrap(),
            reference_match_oracle(&ext, &pred, &cfg).unwrap()
        );
    }
}

#[test]
fn wider_buffers_recover_jittered_events() {
    let base = EvalConfig {
        task: TaskMode::Fed,
        ..EvalConfig::default()
    };
    let data = generate_dataset(&small_params(1), jittered(20.0), &base).unwrap();
    let rows = run_ablation(&data, &base, AblationParam::B, &[Some(15.0), Some(25.0)]).unwrap();
    assert!(rows[1].recall > rows[0].recall, "{rows:?}");
    let table = format_ablation(AblationParam::B, &rows);
    assert!(table.starts_with("b,precision,recall,f2,t_opt\n15,"));
}

#[test]
fn unbounded_duration_never_lowers_recall() {
    let config = EvalConfig::default();
    let data = generate_dataset(&small_params(2), jittered(3.0), &config).unwrap();
    let rows = run_ablation(
        &data,
        &config,
        AblationParam::D,
        &[Some(5.0), Some(60.0), None],
    )
    .unwrap();
    assert!(
        rows[0].recall <= rows[1].recall && rows[1].recall <= rows[2].recall,
        "{rows:?}"
    );
}

#[test]
fn sweep_selects_reported_threshold() {
    let config = EvalConfig::default();
    let data = generate_dataset(&small_params(3), jittered(4.0), &config).unwrap();
    let summary = sweep_dataset(&data, &config).unwrap();
    let report = evaluate(&data, &config).unwrap();
    assert_eq!(report.t_opt, Some(summary.t_opt));
    let best = summary.mean_f2.iter().cloned().fold(f64::MIN, f64::max);
    let first_best = summary.mean_f2.iter().position(|&v| v == best).unwrap();
    assert_eq!(summary.thresholds[first_best], summary.t_opt);
}

#[test]
fn reloaded_dataset_gives_identical_report() {
    let config = EvalConfig::default();
    let data =
        generate_dataset(&small_params(4), PredictorKind::RandomStratified, &config).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let manifest = write_dataset(&data, dir.path()).unwrap();
    let loaded = load_dataset(&manifest, config.window_s).unwrap();
    for scheme in [SchemeMode::Alpec, SchemeMode::Pe, SchemeMode::We] {
        let c = EvalConfig {
            scheme,
            ..config.clone()
        };
        assert_eq!(evaluate(&data, &c).unwrap(), evaluate(&loaded, &c).unwrap());
    }
}

#[test]
fn window_size_mismatch_is_rejected_on_load() {
    let config = EvalConfig::default();
    let data = generate_dataset(&small_params(5), PredictorKind::RandomUniform, &config).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let manifest = write_dataset(&data, dir.path()).unwrap();
    assert!(load_dataset(&manifest, 7.0).is_err());
}
