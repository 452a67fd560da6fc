// SPDX-License-Identifier: Apache-2.0

use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

/// Measurements from one solver run.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Sample {
    pub objective: f64,
    pub wall_time_s: f64,
    pub extractions: u64,
    pub relaxations: u64,
    pub peak_frontier: u64,
    /// Stored search states; `None` where the solver has no such notion.
    pub peak_states: Option<u64>,
}

/// One CSV row. Counters are averages when the row summarises several runs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunMetrics {
    pub param: String,
    pub value: String,
    pub algo: String,
    pub seed: u64,
    pub objective: Option<f64>,
    pub relative_error: Option<f64>,
    pub wall_time_s: f64,
    pub extractions: f64,
    pub relaxations: f64,
    pub peak_frontier: f64,
    pub peak_states: Option<f64>,
}

impl RunMetrics {
    pub fn single(param: &str, value: &str, algo: &str, seed: u64, s: &Sample, relative_error: Option<f64>) -> Self {
        RunMetrics {
            param: param.into(),
            value: value.into(),
            algo: algo.into(),
            seed,
            objective: Some(s.objective),
            relative_error,
            wall_time_s: s.wall_time_s,
            extractions: s.extractions as f64,
            relaxations: s.relaxations as f64,
            peak_frontier: s.peak_frontier as f64,
            peak_states: s.peak_states.map(|x| x as f64),
        }
    }
}

/// `(heuristic - exact) / exact`; zero when both are zero.
pub fn relative_error(heuristic: f64, exact: f64) -> f64 {
    if exact == 0.0 {
        if heuristic == 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    } else {
        (heuristic - exact) / exact
    }
}

pub fn mean(xs: &[f64]) -> Option<f64> {
    (!xs.is_empty()).then(|| xs.iter().sum::<f64>() / xs.len() as f64)
}

pub fn median(xs: &[f64]) -> Option<f64> {
    if xs.is_empty() {
        return None;
    }
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    Some(if v.len() % 2 == 1 { v[m] } else { (v[m - 1] + v[m]) / 2.0 })
}

pub fn write_csv<W: Write>(out: W, rows: &[RunMetrics]) -> anyhow::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    if rows.is_empty() {
        w.write_record([
            "param",
            "value",
            "algo",
            "seed",
            "objective",
            "relative_error",
            "wall_time_s",
            "extractions",
            "relaxations",
            "peak_frontier",
            "peak_states",
        ])?;
    }
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_csv_file(path: &Path, rows: &[RunMetrics]) -> anyhow::Result<()> {
    let f = std::fs::File::create(path)?;
    write_csv(std::io::BufWriter::new(f), rows)
}

pub fn read_csv_file(path: &Path) -> anyhow::Result<Vec<RunMetrics>> {
    let mut r = csv::Reader::from_path(path)?;
    Ok(r.deserialize().collect::<Result<_, _>>()?)
}
