//! Result files: learning-curve CSV, `index,value` series CSV and the run
//! manifest.
//!
//! Numbers are written with 17 significant digits in scientific notation,
//! independent of locale, so every value reads back bit-exactly.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::time::SystemTime;

use thiserror::Error;

use crate::config::to_config_string;
use crate::sim::{LearningCurve, SimConfig};

/// Header line of the learning-curve CSV.
pub const CURVE_HEADER: &str = "algorithm,iteration,mse_db,trials_diverged";

/// Header line of a series CSV.
pub const SERIES_HEADER: &str = "index,value";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormatError {
    #[error("missing or wrong header, expected `{expected}`")]
    Header { expected: &'static str },
    #[error("line {line}: {reason}")]
    Row { line: usize, reason: String },
}

fn num(v: f64) -> String {
    format!("{v:.16e}")
}

/// One data row of the learning-curve CSV.
#[derive(Debug, Clone, PartialEq)]
pub struct CurveRow {
    pub algorithm: String,
    /// 1-based: the error after the `iteration`-th update.
    pub iteration: usize,
    pub mse_db: f64,
    pub trials_diverged: usize,
}

/// Renders curves as CSV sorted by `(algorithm, iteration)`. Curves whose
/// trials all diverged contribute no rows.
pub fn curves_to_csv(curves: &[LearningCurve]) -> String {
    let mut sorted: Vec<&LearningCurve> = curves.iter().collect();
    sorted.sort_by(|a, b| a.algorithm.cmp(&b.algorithm));
    let mut out = String::with_capacity(64 * curves.iter().map(|c| c.mse_db.len()).sum::<usize>() + 64);
    out.push_str(CURVE_HEADER);
    out.push('\n');
    for curve in sorted {
        for (i, v) in curve.mse_db.iter().enumerate() {
            let _ = writeln!(out, "{},{},{},{}", curve.algorithm, i + 1, num(*v), curve.trials_diverged);
        }
    }
    out
}

fn data_lines<'a>(
    text: &'a str,
    header: &'static str,
) -> Result<impl Iterator<Item = (usize, &'a str)>, FormatError> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h.trim_end_matches('\r') == header => {}
        _ => return Err(FormatError::Header { expected: header }),
    }
    Ok(lines
        .map(|(i, l)| (i + 1, l.trim_end_matches('\r')))
        .filter(|(_, l)| !l.is_empty()))
}

fn field<T: std::str::FromStr>(line: usize, name: &str, raw: &str) -> Result<T, FormatError> {
    raw.parse().map_err(|_| FormatError::Row {
        line,
        reason: format!("bad {name} `{raw}`"),
    })
}

/// Parses a learning-curve CSV.
pub fn parse_curves_csv(text: &str) -> Result<Vec<CurveRow>, FormatError> {
    data_lines(text, CURVE_HEADER)?
        .map(|(line, l)| {
            let parts: Vec<&str> = l.split(',').collect();
            let [algorithm, iteration, mse_db, diverged] = parts[..] else {
                return Err(FormatError::Row {
                    line,
                    reason: format!("expected 4 fields, found {}", parts.len()),
                });
            };
            if algorithm.is_empty() {
                return Err(FormatError::Row {
                    line,
                    reason: "empty algorithm name".into(),
                });
            }
            let mse_db: f64 = field(line, "mse_db", mse_db)?;
            if !mse_db.is_finite() {
                return Err(FormatError::Row {
                    line,
                    reason: "non-finite mse_db".into(),
                });
            }
            Ok(CurveRow {
                algorithm: algorithm.to_string(),
                iteration: field(line, "iteration", iteration)?,
                mse_db,
                trials_diverged: field(line, "trials_diverged", diverged)?,
            })
        })
        .collect()
}

/// Renders a vector as `index,value` CSV.
pub fn series_to_csv(values: &[f64]) -> String {
    let mut out = String::from(SERIES_HEADER);
    out.push('\n');
    for (i, v) in values.iter().enumerate() {
        let _ = writeln!(out, "{i},{}", num(*v));
    }
    out
}

/// Parses `index,value` CSV. Indices must run 0, 1, 2, ... in order.
pub fn parse_series_csv(text: &str) -> Result<Vec<f64>, FormatError> {
    let mut values = Vec::new();
    for (line, l) in data_lines(text, SERIES_HEADER)? {
        let Some((index, value)) = l.split_once(',') else {
            return Err(FormatError::Row {
                line,
                reason: "expected 2 fields".into(),
            });
        };
        let index: usize = field(line, "index", index)?;
        if index != values.len() {
            return Err(FormatError::Row {
                line,
                reason: format!("index {index} out of sequence, expected {}", values.len()),
            });
        }
        let value: f64 = field(line, "value", value)?;
        if !value.is_finite() {
            return Err(FormatError::Row {
                line,
                reason: "non-finite value".into(),
            });
        }
        values.push(value);
    }
    Ok(values)
}

/// Provenance record written next to every result CSV.
#[derive(Debug, Clone, PartialEq)]
pub struct RunManifest {
    pub config_path: Option<PathBuf>,
    pub config: SimConfig,
    pub output_path: PathBuf,
    pub tool_version: String,
    pub started: SystemTime,
    pub finished: SystemTime,
}

fn unix_seconds(t: SystemTime) -> f64 {
    t.duration_since(SystemTime::UNIX_EPOCH)
        .map(|d| d.as_secs_f64())
        .unwrap_or(0.0)
}

fn quoted(s: &str) -> String {
    toml::Value::String(s.to_string()).to_string()
}

impl RunManifest {
    /// Key-value text: provenance keys under `[manifest]`, then the
    /// resolved configuration in configuration-file syntax.
    pub fn render(&self) -> String {
        let mut out = String::from("[manifest]\n");
        let _ = writeln!(out, "tool_version = {}", quoted(&self.tool_version));
        if let Some(path) = &self.config_path {
            let _ = writeln!(out, "config_path = {}", quoted(&path.display().to_string()));
        }
        let _ = writeln!(out, "output_path = {}", quoted(&self.output_path.display().to_string()));
        let _ = writeln!(out, "seed = {}", self.config.master_seed);
        let _ = writeln!(out, "started_unix = {:?}", unix_seconds(self.started));
        let _ = writeln!(out, "finished_unix = {:?}", unix_seconds(self.finished));
        out.push('\n');
        out.push_str(&to_config_string(&self.config));
        out
    }
}
