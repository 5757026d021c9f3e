use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::Serialize;

use super::config::RunConfig;
use super::SweepRecord;
use crate::error::HarnessError;

pub const CSV_HEADER: &str = "experiment,condition,speaker_h,assumed_h,state_id,metric,value";

/// Sorts records into emission order:
/// (experiment, condition, speaker_h, assumed_h, state_id), stable otherwise.
pub fn sort_records(records: &mut [SweepRecord]) {
    records.sort_by(|a, b| {
        (&a.experiment, &a.condition, a.speaker_h, a.assumed_h, a.state_id).cmp(&(
            &b.experiment,
            &b.condition,
            b.speaker_h,
            b.assumed_h,
            b.state_id,
        ))
    });
}

fn fmt_value(v: f64) -> String {
    // Collapse negative zero so identical quantities print identically.
    let v = if v == 0.0 { 0.0 } else { v };
    format!("{v}")
}

pub fn to_csv(records: &[SweepRecord]) -> String {
    let mut out = String::with_capacity(64 * (records.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for r in records {
        let assumed = r.assumed_h.map(|h| h.to_string()).unwrap_or_default();
        let state = r.state_id.map(|s| s.to_string()).unwrap_or_default();
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{}",
            r.experiment,
            r.condition,
            r.speaker_h,
            assumed,
            state,
            r.metric.as_str(),
            fmt_value(r.value)
        );
    }
    out
}

#[derive(Debug, Clone, Serialize)]
pub struct MeanRow {
    pub experiment: String,
    pub condition: String,
    pub speaker_h: u32,
    pub assumed_h: Option<u32>,
    pub metric: &'static str,
    pub mean: f64,
    pub rows: usize,
}

#[derive(Debug, Serialize)]
pub struct Summary<'a> {
    pub config: &'a RunConfig,
    pub means: Vec<MeanRow>,
}

/// State-prior-weighted means of sorted records, grouped by everything but
/// the state id.
pub fn aggregate(records: &[SweepRecord], state_prior: &[f64]) -> Vec<MeanRow> {
    let mut out: Vec<MeanRow> = Vec::new();
    let mut weights: Vec<f64> = Vec::new();
    for r in records {
        let w = r.state_id.map(|s| state_prior[s]).unwrap_or(1.0);
        let pos = out.iter().rposition(|m| {
            m.experiment == r.experiment
                && m.condition == r.condition
                && m.speaker_h == r.speaker_h
                && m.assumed_h == r.assumed_h
                && m.metric == r.metric.as_str()
        });
        match pos {
            Some(i) => {
                out[i].mean += w * r.value;
                out[i].rows += 1;
                weights[i] += w;
            }
            None => {
                out.push(MeanRow {
                    experiment: r.experiment.clone(),
                    condition: r.condition.clone(),
                    speaker_h: r.speaker_h,
                    assumed_h: r.assumed_h,
                    metric: r.metric.as_str(),
                    mean: w * r.value,
                    rows: 1,
                });
                weights.push(w);
            }
        }
    }
    for (m, w) in out.iter_mut().zip(weights) {
        m.mean /= w;
    }
    out
}

#[derive(Debug, Clone)]
pub struct OutputPaths {
    pub csv: PathBuf,
    pub summary: PathBuf,
}

/// Writes `<dir>/<stem>.csv` and `<dir>/<stem>_summary.json`.
pub fn emit_outputs(
    records: &[SweepRecord],
    cfg: &RunConfig,
    state_prior: &[f64],
    dir: &Path,
    stem: &str,
) -> Result<OutputPaths, HarnessError> {
    if records.is_empty() {
        return Err(HarnessError::Config("no records to write".into()));
    }
    let mut sorted = records.to_vec();
    sort_records(&mut sorted);

    std::fs::create_dir_all(dir).map_err(|e| HarnessError::io(dir, e))?;
    let csv = dir.join(format!("{stem}.csv"));
    std::fs::write(&csv, to_csv(&sorted)).map_err(|e| HarnessError::io(&csv, e))?;

    let summary = Summary {
        config: cfg,
        means: aggregate(&sorted, state_prior),
    };
    let mut json = serde_json::to_string_pretty(&summary)
        .map_err(|e| HarnessError::Config(format!("summary serialization: {e}")))?;
    json.push('\n');
    let summary_path = dir.join(format!("{stem}_summary.json"));
    std::fs::write(&summary_path, json).map_err(|e| HarnessError::io(&summary_path, e))?;

    Ok(OutputPaths {
        csv,
        summary: summary_path,
    })
}
