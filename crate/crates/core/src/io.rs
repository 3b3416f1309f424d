// SPDX-License-Identifier: MIT OR Apache-2.0

//! Dataset and report files.
//!
//! A dataset is a manifest plus one annotation file and one score file per
//! subject. Manifest:
//!
//! ```text
//! # comments start with '#'
//! sampling_rate_hz=1
//! # subject_id fold n_samples annotations_path scores_path
//! sub0000 train 28800 sub0000.events.csv sub0000.scores.txt
//! ```
//!
//! Paths are relative to the manifest's directory. Annotation files hold one
//! `label,onset_s,duration_s` record per line. Score files start with
//! `sampling_rate_hz=<f> n=<count> resolution=<pointwise|windowed>` followed
//! by one value per line.

use std::collections::HashSet;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::evaluate::Report;
use crate::interval::seconds_to_samples;
use crate::types::{window_count, EventAnnotation, Fold, Resolution, ScoreSeries, SubjectRecord};

pub const MANIFEST_NAME: &str = "manifest.txt";

#[derive(Clone, Debug, PartialEq)]
pub struct ManifestEntry {
    pub subject_id: String,
    pub fold: Fold,
    pub n_samples: usize,
    pub annotations_path: PathBuf,
    pub scores_path: PathBuf,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DatasetManifest {
    pub sampling_rate_hz: f64,
    pub subjects: Vec<ManifestEntry>,
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty())
}

fn parse_rate(path: &Path, line: usize, value: &str) -> Result<f64> {
    match value.parse::<f64>() {
        Ok(f) if f.is_finite() && f > 0.0 => Ok(f),
        _ => Err(Error::parse(
            path,
            line,
            format!("invalid sampling rate '{value}'"),
        )),
    }
}

impl DatasetManifest {
    pub fn parse(text: &str, path: &Path) -> Result<Self> {
        let base = path.parent().unwrap_or(Path::new(""));
        let mut lines = content_lines(text);
        let (line, header) = lines
            .next()
            .ok_or_else(|| Error::parse(path, 1, "empty manifest"))?;
        let rate = header
            .strip_prefix("sampling_rate_hz=")
            .ok_or_else(|| Error::parse(path, line, "expected 'sampling_rate_hz=<f>' header"))?;
        let sampling_rate_hz = parse_rate(path, line, rate.trim())?;

        let mut seen = HashSet::new();
        let mut subjects = Vec::new();
        for (line, row) in lines {
            let fields: Vec<&str> = row.split_whitespace().collect();
            let [id, fold, n, annotations, scores] = fields[..] else {
                return Err(Error::parse(
                    path,
                    line,
                    format!("expected 5 fields (subject_id fold n_samples annotations scores), found {}", fields.len()),
                ));
            };
            let fold: Fold = fold
                .parse()
                .map_err(|e: Error| Error::parse(path, line, e.to_string()))?;
            let n_samples = n
                .parse::<usize>()
                .map_err(|_| Error::parse(path, line, format!("invalid sample count '{n}'")))?;
            if !seen.insert(id.to_string()) {
                return Err(Error::parse(
                    path,
                    line,
                    format!("duplicate subject_id '{id}'"),
                ));
            }
            subjects.push(ManifestEntry {
                subject_id: id.to_string(),
                fold,
                n_samples,
                annotations_path: base.join(annotations),
                scores_path: base.join(scores),
            });
        }
        Ok(Self {
            sampling_rate_hz,
            subjects,
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::parse(&read(path)?, path)
    }
}

pub fn parse_annotations(
    text: &str,
    path: &Path,
    subject_id: &str,
) -> Result<Vec<EventAnnotation>> {
    let mut events = Vec::new();
    for (line, row) in content_lines(text) {
        let fields: Vec<&str> = row.split(',').map(str::trim).collect();
        if fields.first() == Some(&"label") {
            continue;
        }
        let [label, onset, duration] = fields[..] else {
            return Err(Error::parse(
                path,
                line,
                "expected 'label,onset_s,duration_s'",
            ));
        };
        let number = |v: &str, what: &str| match v.parse::<f64>() {
            Ok(x) if x.is_finite() && x >= 0.0 => Ok(x),
            _ => Err(Error::parse(path, line, format!("invalid {what} '{v}'"))),
        };
        events.push(EventAnnotation {
            subject_id: subject_id.to_string(),
            label: label.to_string(),
            onset_s: number(onset, "onset")?,
            duration_s: number(duration, "duration")?,
        });
    }
    Ok(events)
}

/// Parses a score file. `window_s` sizes the windows of windowed files.
pub fn parse_scores(text: &str, path: &Path, window_s: f64) -> Result<ScoreSeries> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim()));
    let (_, header) = lines
        .next()
        .ok_or_else(|| Error::parse(path, 1, "missing score header"))?;
    let mut rate = None;
    let mut n = None;
    let mut resolution = None;
    for token in header.split_whitespace() {
        match token.split_once('=') {
            Some(("sampling_rate_hz", v)) => rate = Some(parse_rate(path, 1, v)?),
            Some(("n", v)) => {
                n =
                    Some(v.parse::<usize>().map_err(|_| {
                        Error::parse(path, 1, format!("invalid sample count '{v}'"))
                    })?)
            }
            Some(("resolution", v)) => resolution = Some(v.to_string()),
            _ => {
                return Err(Error::parse(
                    path,
                    1,
                    format!("unexpected header token '{token}'"),
                ))
            }
        }
    }
    let malformed = || {
        Error::parse(
            path,
            1,
            "header must be 'sampling_rate_hz=<f> n=<count> resolution=<pointwise|windowed>'",
        )
    };
    let (rate, n) = (rate.ok_or_else(malformed)?, n.ok_or_else(malformed)?);
    let resolution = match resolution.as_deref() {
        Some("pointwise") => Resolution::Pointwise,
        Some("windowed") => {
            let window_samples = seconds_to_samples(window_s, rate);
            if window_samples == 0 {
                return Err(Error::parse(
                    path,
                    1,
                    "window size is shorter than one sample",
                ));
            }
            Resolution::Windowed { window_samples }
        }
        Some(other) => {
            return Err(Error::parse(
                path,
                1,
                format!("unknown resolution '{other}'"),
            ))
        }
        None => return Err(malformed()),
    };

    let mut values = Vec::new();
    for (line, raw) in lines {
        if raw.is_empty() || raw.starts_with('#') {
            continue;
        }
        let v: f64 = raw
            .parse()
            .map_err(|_| Error::parse(path, line, format!("invalid number '{raw}'")))?;
        if !(0.0..=1.0).contains(&v) {
            return Err(Error::parse(
                path,
                line,
                format!("score {v} outside [0, 1]"),
            ));
        }
        values.push(v);
    }
    let expected = match resolution {
        Resolution::Pointwise => n,
        Resolution::Windowed { window_samples } => window_count(n, window_samples),
    };
    if values.len() != expected {
        return Err(Error::Validation {
            path: path.to_path_buf(),
            message: format!(
                "length mismatch: header implies {expected} {} values, found {}",
                resolution.as_str(),
                values.len()
            ),
        });
    }
    ScoreSeries::new(values, resolution, rate, n).map_err(|e| Error::Validation {
        path: path.to_path_buf(),
        message: e.to_string(),
    })
}

fn load_subject(
    entry: &ManifestEntry,
    manifest: &DatasetManifest,
    window_s: f64,
) -> Result<SubjectRecord> {
    let scores = parse_scores(&read(&entry.scores_path)?, &entry.scores_path, window_s)?;
    let mismatch = |message: String| Error::Validation {
        path: entry.scores_path.clone(),
        message,
    };
    if scores.sampling_rate_hz() != manifest.sampling_rate_hz {
        return Err(mismatch(format!(
            "sampling rate {} differs from the manifest's {}",
            scores.sampling_rate_hz(),
            manifest.sampling_rate_hz
        )));
    }
    if scores.n_samples() != entry.n_samples {
        return Err(mismatch(format!(
            "n={} differs from the manifest's {}",
            scores.n_samples(),
            entry.n_samples
        )));
    }
    let events = parse_annotations(
        &read(&entry.annotations_path)?,
        &entry.annotations_path,
        &entry.subject_id,
    )?;
    let record = SubjectRecord {
        subject_id: entry.subject_id.clone(),
        scores,
        events,
        fold: entry.fold,
    };
    record.validate().map_err(|e| Error::Validation {
        path: entry.annotations_path.clone(),
        message: e.to_string(),
    })?;
    Ok(record)
}

/// Loads and validates every subject listed in the manifest. Windowed score
/// files are interpreted with windows of `window_s` seconds.
pub fn load_dataset(manifest_path: &Path, window_s: f64) -> Result<Vec<SubjectRecord>> {
    let manifest = DatasetManifest::load(manifest_path)?;
    let results: Vec<Result<SubjectRecord>> = manifest
        .subjects
        .par_iter()
        .map(|entry| load_subject(entry, &manifest, window_s))
        .collect();
    results.into_iter().collect()
}

fn write(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).map_err(|e| Error::io(path, e))
}

pub fn format_scores(scores: &ScoreSeries) -> String {
    let mut out = format!(
        "sampling_rate_hz={} n={} resolution={}\n",
        scores.sampling_rate_hz(),
        scores.n_samples(),
        scores.resolution().as_str()
    );
    for v in scores.values() {
        let _ = writeln!(out, "{v}");
    }
    out
}

pub fn format_annotations(events: &[EventAnnotation]) -> String {
    let mut out = String::from("label,onset_s,duration_s\n");
    for e in events {
        let _ = writeln!(out, "{},{},{}", e.label, e.onset_s, e.duration_s);
    }
    out
}

/// Writes a manifest plus per-subject files into `dir`; returns the
/// manifest path.
pub fn write_dataset(dataset: &[SubjectRecord], dir: &Path) -> Result<PathBuf> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let rate = dataset.first().map_or(1.0, |s| s.scores.sampling_rate_hz());
    if dataset.iter().any(|s| s.scores.sampling_rate_hz() != rate) {
        return Err(Error::invalid("all subjects must share one sampling rate"));
    }
    let mut manifest =
        format!("# subject_id fold n_samples annotations scores\nsampling_rate_hz={rate}\n");
    for s in dataset {
        let events_name = format!("{}.events.csv", s.subject_id);
        let scores_name = format!("{}.scores.txt", s.subject_id);
        write(&dir.join(&events_name), &format_annotations(&s.events))?;
        write(&dir.join(&scores_name), &format_scores(&s.scores))?;
        let _ = writeln!(
            manifest,
            "{} {} {} {events_name} {scores_name}",
            s.subject_id,
            s.fold,
            s.scores.n_samples()
        );
    }
    let path = dir.join(MANIFEST_NAME);
    write(&path, &manifest)?;
    Ok(path)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReportFormat {
    Json,
    Csv,
}

impl std::str::FromStr for ReportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(Self::Json),
            "csv" => Ok(Self::Csv),
            other => Err(Error::invalid(format!(
                "unknown format '{other}'; expected json or csv"
            ))),
        }
    }
}

pub fn report_to_json(report: &Report) -> Result<String> {
    let mut text = serde_json::to_string_pretty(report).map_err(|e| Error::Json {
        path: PathBuf::from("<report>"),
        source: e,
    })?;
    text.push('\n');
    Ok(text)
}

/// One row per subject, then a `mean` row of column means. Numbers carry
/// six decimals; counts are integers except in the mean row.
pub fn report_to_csv(report: &Report) -> String {
    let t_opt = report
        .t_opt
        .map_or_else(|| "none".to_string(), |t| format!("{t:.2}"));
    let mut out = format!(
        "# t_opt={t_opt} scheme={}\n# config: {}\nsubject_id,tp,fp,fn,precision,recall,f1,f2\n",
        report.scheme,
        report.config.summary()
    );
    for s in &report.per_subject {
        let m = &s.metrics;
        let _ = writeln!(
            out,
            "{},{},{},{},{:.6},{:.6},{:.6},{:.6}",
            s.subject_id, s.counts.tp, s.counts.fp, s.counts.fn_, m.precision, m.recall, m.f1, m.f2
        );
    }
    let count = report.per_subject.len().max(1) as f64;
    let mean_count = |get: fn(&crate::types::MatchResult) -> usize| {
        report
            .per_subject
            .iter()
            .map(|s| get(&s.counts))
            .sum::<usize>() as f64
            / count
    };
    let a = &report.aggregate;
    let _ = writeln!(
        out,
        "mean,{:.6},{:.6},{:.6},{:.6},{:.6},{:.6},{:.6}",
        mean_count(|c| c.tp),
        mean_count(|c| c.fp),
        mean_count(|c| c.fn_),
        a.precision,
        a.recall,
        a.f1,
        a.f2
    );
    out
}

pub fn write_report(report: &Report, format: ReportFormat, path: &Path) -> Result<()> {
    report.check_consistency()?;
    let text = match format {
        ReportFormat::Json => report_to_json(report)?,
        ReportFormat::Csv => report_to_csv(report),
    };
    write(path, &text)
}

pub fn read_report(path: &Path) -> Result<Report> {
    let text = read(path)?;
    serde_json::from_str(&text).map_err(|e| Error::Json {
        path: path.to_path_buf(),
        source: e,
    })
}
