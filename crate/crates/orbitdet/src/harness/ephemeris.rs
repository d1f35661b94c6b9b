//! Plain-text ephemeris exchange files and external-prediction scoring.
//!
//! One record per line: `epoch_s, x_km, y_km, z_km` (comma-separated, ECEF
//! positions). `#` starts a comment and blank lines are skipped. Writing uses
//! `", "` between fields; readers accept any whitespace around the commas.

use std::path::Path;

use thiserror::Error;

use crate::state::Vec3;

use super::report::{RunOutcome, RunReport};
use super::HarnessError;

/// Records must agree on epoch within this tolerance (s).
const EPOCH_ALIGN_TOL_S: f64 = 1e-3;

#[derive(Debug, Error)]
pub enum ScoreError {
    #[error("i/o error reading ephemeris: {0}")]
    Io(#[from] std::io::Error),
    #[error("line {line}: malformed ephemeris record: {message}")]
    Format { line: usize, message: String },
    #[error("length mismatch: predictions have {predictions} records, truth has {truth}; first missing record is {record}")]
    LengthMismatch {
        predictions: usize,
        truth: usize,
        record: usize,
    },
    #[error("record {record}: epochs misaligned (prediction {predicted} s vs truth {truth} s)")]
    EpochMisaligned {
        record: usize,
        predicted: f64,
        truth: f64,
    },
    #[error("ephemeris file contains no records")]
    Empty,
}

/// One timestamped ECEF position.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EphemerisRecord {
    pub epoch_s: f64,
    pub position: Vec3,
}

pub fn read_ephemeris(path: &Path) -> Result<Vec<EphemerisRecord>, ScoreError> {
    let text = std::fs::read_to_string(path)?;
    parse_ephemeris(&text)
}

pub fn parse_ephemeris(text: &str) -> Result<Vec<EphemerisRecord>, ScoreError> {
    let mut records = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = match raw.find('#') {
            Some(pos) => &raw[..pos],
            None => raw,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != 4 {
            return Err(ScoreError::Format {
                line: line_no,
                message: format!("expected 4 comma-separated fields, found {}", fields.len()),
            });
        }
        let mut parsed = [0.0f64; 4];
        for (i, f) in fields.iter().enumerate() {
            parsed[i] = f.parse::<f64>().map_err(|e| ScoreError::Format {
                line: line_no,
                message: format!("field {} `{f}` is not a number ({e})", i + 1),
            })?;
        }
        if !parsed.iter().all(|v| v.is_finite()) {
            return Err(ScoreError::Format {
                line: line_no,
                message: "record contains a non-finite value".to_string(),
            });
        }
        records.push(EphemerisRecord {
            epoch_s: parsed[0],
            position: Vec3::new(parsed[1], parsed[2], parsed[3]),
        });
    }
    Ok(records)
}

/// Serializes records in the exact exchange format.
pub fn write_ephemeris(records: &[EphemerisRecord]) -> String {
    let mut out = String::from("# epoch_s, x_km, y_km, z_km\n");
    for r in records {
        out.push_str(&format!(
            "{}, {}, {}, {}\n",
            r.epoch_s, r.position.x, r.position.y, r.position.z
        ));
    }
    out
}

/// Scores externally produced position predictions against a truth file with
/// the same RMSE aggregates as the Monte-Carlo reports.
pub fn score_predictions(
    prediction_path: &Path,
    truth_path: &Path,
) -> Result<RunReport, HarnessError> {
    let predictions = read_ephemeris(prediction_path)?;
    let truth = read_ephemeris(truth_path)?;
    let label = prediction_path.display().to_string();
    Ok(score_records(&predictions, &truth, &label)?)
}

/// The in-memory half of [`score_predictions`].
pub fn score_records(
    predictions: &[EphemerisRecord],
    truth: &[EphemerisRecord],
    label: &str,
) -> Result<RunReport, ScoreError> {
    if predictions.is_empty() || truth.is_empty() {
        return Err(ScoreError::Empty);
    }
    if predictions.len() != truth.len() {
        return Err(ScoreError::LengthMismatch {
            predictions: predictions.len(),
            truth: truth.len(),
            record: predictions.len().min(truth.len()) + 1,
        });
    }
    let mut step_series = Vec::with_capacity(truth.len());
    let mut sum_sq = 0.0;
    for (i, (p, t)) in predictions.iter().zip(truth).enumerate() {
        if (p.epoch_s - t.epoch_s).abs() > EPOCH_ALIGN_TOL_S {
            return Err(ScoreError::EpochMisaligned {
                record: i + 1,
                predicted: p.epoch_s,
                truth: t.epoch_s,
            });
        }
        let err = (p.position - t.position).norm();
        sum_sq += err * err;
        step_series.push((t.epoch_s, err));
    }
    let rmse = (sum_sq / truth.len() as f64).sqrt();

    Ok(RunReport {
        scenario: label.to_string(),
        variant: "score".to_string(),
        runs_requested: 1,
        base_seed: 0,
        outcomes: vec![RunOutcome {
            run: 0,
            result: Ok(rmse),
        }],
        failures: 0,
        average_rmse_km: rmse,
        best_rmse_km: rmse,
        top25_rmse_km: rmse,
        step_series,
    })
}
