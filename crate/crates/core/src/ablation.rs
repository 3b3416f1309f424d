// SPDX-License-Identifier: MIT OR Apache-2.0

//! One-parameter-at-a-time hyperparameter sweeps.

use std::fmt::{self, Write as _};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::config::EvalConfig;
use crate::error::{Error, Result};
use crate::evaluate::evaluate;
use crate::types::SubjectRecord;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AblationParam {
    /// Smoothing window.
    W,
    /// Onset-interval target length.
    L,
    /// Maximum predicted interval duration.
    D,
    /// Merge distance.
    Delta,
    /// Both ground-truth buffers.
    B,
}

impl AblationParam {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::W => "w",
            Self::L => "l",
            Self::D => "d",
            Self::Delta => "delta",
            Self::B => "b",
        }
    }

    /// Copy of `base` with this parameter set; `None` means "none"
    /// (no smoothing, or no duration limit).
    pub fn apply(&self, base: &EvalConfig, value: Option<f64>) -> Result<EvalConfig> {
        let mut c = base.clone();
        let required = || {
            value.ok_or_else(|| {
                Error::invalid(format!("parameter {} needs a number", self.as_str()))
            })
        };
        match self {
            Self::W => c.smoothing_s = value.unwrap_or(0.0),
            Self::L => c.iod_length_s = required()?,
            Self::D => c.max_duration_s = value,
            Self::Delta => c.merge_distance_s = required()?,
            Self::B => {
                let b = required()?;
                c.buffer_before_s = b;
                c.buffer_after_s = b;
            }
        }
        c.validate()?;
        Ok(c)
    }
}

impl fmt::Display for AblationParam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for AblationParam {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "w" => Ok(Self::W),
            "l" => Ok(Self::L),
            "d" => Ok(Self::D),
            "delta" => Ok(Self::Delta),
            "b" => Ok(Self::B),
            other => Err(Error::invalid(format!(
                "unknown ablation parameter '{other}'; expected w, l, d, delta or b"
            ))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AblationRow {
    pub value: Option<f64>,
    pub t_opt: Option<f64>,
    pub precision: f64,
    pub recall: f64,
    pub f2: f64,
}

/// Re-runs the evaluation for each value, all other settings fixed.
pub fn run_ablation(
    dataset: &[SubjectRecord],
    base: &EvalConfig,
    param: AblationParam,
    values: &[Option<f64>],
) -> Result<Vec<AblationRow>> {
    if values.is_empty() {
        return Err(Error::invalid("ablation needs at least one value"));
    }
    values
        .iter()
        .map(|&value| {
            let config = param.apply(base, value)?;
            let report = evaluate(dataset, &config)?;
            Ok(AblationRow {
                value,
                t_opt: report.t_opt,
                precision: report.aggregate.precision,
                recall: report.aggregate.recall,
                f2: report.aggregate.f2,
            })
        })
        .collect()
}

/// Table with one row per value: `<param>,precision,recall,f2,t_opt`.
pub fn format_ablation(param: AblationParam, rows: &[AblationRow]) -> String {
    let mut out = format!("{param},precision,recall,f2,t_opt\n");
    for r in rows {
        let value = r
            .value
            .map_or_else(|| "none".to_string(), |v| v.to_string());
        let t = r
            .t_opt
            .map_or_else(|| "none".to_string(), |t| format!("{t:.2}"));
        let _ = writeln!(
            out,
            "{value},{:.6},{:.6},{:.6},{t}",
            r.precision, r.recall, r.f2
        );
    }
    out
}
