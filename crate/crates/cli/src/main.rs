// SPDX-License-Identifier: MIT OR Apache-2.0

#![forbid(unsafe_code)]

//! Command-line front end: synthesize datasets, evaluate score files,
//! sweep thresholds, run ablations and convert reports.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use alpec::ablation::{format_ablation, run_ablation, AblationParam};
use alpec::config::parse_optional_seconds;
use alpec::io::{
    load_dataset, read_report, report_to_csv, report_to_json, write_dataset, ReportFormat,
};
use alpec::synth::{
    arousal_count_for_prior, generate_dataset, ArousalCount, PredictorKind, SynthParams,
};
use alpec::{evaluate, sweep_dataset, EvalConfig, SchemeMode, SubjectRecord, TaskMode};
use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

const THREADS_VAR: &str = "ALPEC_THREADS";

#[derive(Parser)]
#[command(
    name = "alpec",
    version,
    about = "Event-level evaluation of event detectors"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a dataset and write a report.
    Evaluate {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        scheme: Option<SchemeMode>,
        #[arg(long)]
        task: Option<TaskMode>,
        #[command(flatten)]
        output: Output,
        #[arg(long, default_value = "json")]
        format: ReportFormat,
    },
    /// Subject-mean F2 on the training fold for every grid threshold.
    Sweep {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        output: Output,
    },
    /// Vary one parameter and report precision, recall and F2 per value.
    Ablate {
        #[command(flatten)]
        input: Input,
        /// One of w, l, d, delta, b.
        #[arg(long)]
        param: AblationParam,
        /// Comma-separated values; "none" disables smoothing or the duration limit.
        #[arg(long)]
        values: String,
        #[command(flatten)]
        output: Output,
    },
    /// Generate a synthetic dataset with baseline predictions.
    Synth(SynthArgs),
    /// Convert a JSON report to another format.
    Report {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, default_value = "csv")]
        format: ReportFormat,
        #[command(flatten)]
        output: Output,
    },
}

#[derive(Args)]
struct Input {
    #[arg(long)]
    manifest: PathBuf,
    /// key=value configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Override one configuration key; repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
}

#[derive(Args)]
struct Output {
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SynthArgs {
    #[arg(long, default_value_t = 20)]
    subjects: usize,
    #[arg(long, default_value_t = 28_800.0)]
    night_s: f64,
    /// Sampling rate in Hz.
    #[arg(long, default_value_t = 1.0)]
    f: f64,
    /// Arousals per subject, either `N` or `MIN..MAX`.
    #[arg(long, conflicts_with = "prior")]
    arousals: Option<String>,
    /// Pick the arousal count that gives this positive-window fraction.
    #[arg(long)]
    prior: Option<f64>,
    /// Minimum spacing between onsets, seconds.
    #[arg(long, default_value_t = 13.0)]
    gap: f64,
    /// Annotated event duration, seconds.
    #[arg(long, default_value_t = 3.0)]
    duration: f64,
    #[arg(long, default_value_t = 0.5)]
    train_fraction: f64,
    /// constant_0, constant_1, random_uniform, random_stratified or
    /// jittered_oracle(JITTER_S,MISS_RATE,EXTRA_RATE).
    #[arg(long, default_value = "constant_1")]
    predictor: PredictorKind,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Configuration used for targets and window size.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
    #[arg(long)]
    out_dir: PathBuf,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match init_threads().and_then(|()| run(cli)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

/// Caps the global worker pool at `ALPEC_THREADS` when it is set.
fn init_threads() -> Result<()> {
    let Ok(value) = std::env::var(THREADS_VAR) else {
        return Ok(());
    };
    let threads: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .with_context(|| format!("{THREADS_VAR} must be a positive integer, got '{value}'"))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .context("cannot start worker pool")
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Evaluate {
            input,
            scheme,
            task,
            output,
            format,
        } => {
            let mut config = input.config()?;
            if let Some(scheme) = scheme {
                config.scheme = scheme;
            }
            if let Some(task) = task {
                config.task = task;
            }
            let dataset = input.dataset(&config)?;
            let report = evaluate(&dataset, &config)?;
            let text = match format {
                ReportFormat::Json => report_to_json(&report)?,
                ReportFormat::Csv => report_to_csv(&report),
            };
            output.emit(&text)
        }
        Command::Sweep { input, output } => {
            let config = input.config()?;
            let dataset = input.dataset(&config)?;
            let summary = sweep_dataset(&dataset, &config)?;
            let mut text = format!("# t_opt={:.2}\nthreshold,mean_f2\n", summary.t_opt);
            for (t, f2) in summary.thresholds.iter().zip(&summary.mean_f2) {
                let _ = writeln!(text, "{t:.2},{f2:.6}");
            }
            output.emit(&text)
        }
        Command::Ablate {
            input,
            param,
            values,
            output,
        } => {
            let config = input.config()?;
            let values = values
                .split(',')
                .map(parse_optional_seconds)
                .collect::<alpec::Result<Vec<_>>>()?;
            let dataset = input.dataset(&config)?;
            let rows = run_ablation(&dataset, &config, param, &values)?;
            output.emit(&format_ablation(param, &rows))
        }
        Command::Synth(args) => synth(args),
        Command::Report {
            input,
            format,
            output,
        } => {
            let report = read_report(&input)?;
            report.check_consistency()?;
            let text = match format {
                ReportFormat::Json => report_to_json(&report)?,
                ReportFormat::Csv => report_to_csv(&report),
            };
            output.emit(&text)
        }
    }
}

impl Input {
    fn config(&self) -> Result<EvalConfig> {
        load_config(self.config.as_deref(), &self.overrides)
    }

    fn dataset(&self, config: &EvalConfig) -> Result<Vec<SubjectRecord>> {
        Ok(load_dataset(&self.manifest, config.window_s)?)
    }
}

impl Output {
    fn emit(&self, text: &str) -> Result<()> {
        match &self.out {
            Some(path) => {
                fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))
            }
            None => {
                print!("{text}");
                Ok(())
            }
        }
    }
}

fn load_config(path: Option<&Path>, overrides: &[String]) -> Result<EvalConfig> {
    let mut config = match path {
        Some(p) => EvalConfig::load(p)?,
        None => EvalConfig::default(),
    };
    for item in overrides {
        let Some((key, value)) = item.split_once('=') else {
            bail!("override '{item}' is not of the form key=value");
        };
        config.set(key.trim(), value.trim())?;
    }
    config.validate()?;
    Ok(config)
}

fn synth(args: SynthArgs) -> Result<()> {
    let config = load_config(args.config.as_deref(), &args.overrides)?;
    let arousals = match (&args.arousals, args.prior) {
        (Some(text), _) => parse_arousals(text)?,
        (None, Some(prior)) => {
            let target_len = match config.task {
                TaskMode::Fed => args.duration,
                TaskMode::Iod => config.iod_length_s,
                TaskMode::Pod => 1.0 / args.f,
            };
            ArousalCount::Fixed(arousal_count_for_prior(
                prior,
                args.night_s,
                config.window_s,
                target_len,
                args.f,
            )?)
        }
        (None, None) => SynthParams::default().arousals,
    };
    let params = SynthParams {
        n_subjects: args.subjects,
        night_length_s: args.night_s,
        rate_hz: args.f,
        arousals,
        min_onset_gap_s: args.gap,
        event_duration_s: args.duration,
        train_fraction: args.train_fraction,
        seed: args.seed,
    };
    let dataset = generate_dataset(&params, args.predictor, &config)?;
    let manifest = write_dataset(&dataset, &args.out_dir)?;
    println!("{}", manifest.display());
    Ok(())
}

fn parse_arousals(text: &str) -> Result<ArousalCount> {
    let parse = |s: &str| {
        s.trim()
            .parse::<usize>()
            .with_context(|| format!("invalid arousal count '{s}'"))
    };
    Ok(match text.split_once("..") {
        Some((min, max)) => ArousalCount::Range {
            min: parse(min)?,
            max: parse(max)?,
        },
        None => ArousalCount::Fixed(parse(text)?),
    })
}
