//! Run artefacts: the per-step CSV series, a JSON summary and field dumps.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::case::Case;
use crate::error::{Error, Result};
use crate::simulate::{FlipTotals, RunReport, RunStatus, StepRecord};
use crate::state::State;
use crate::vtk;

/// Writes one row per accepted step, header only when there are none.
pub fn write_csv(path: &Path, steps: &[StepRecord]) -> Result<()> {
    let csv_err = |source| Error::Csv {
        path: path.to_path_buf(),
        source,
    };
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .from_path(path)
        .map_err(csv_err)?;
    w.write_record(CSV_COLUMNS).map_err(csv_err)?;
    for s in steps {
        w.serialize(s).map_err(csv_err)?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn read_csv(path: &Path) -> Result<Vec<StepRecord>> {
    let csv_err = |source| Error::Csv {
        path: path.to_path_buf(),
        source,
    };
    let mut r = csv::Reader::from_path(path).map_err(csv_err)?;
    r.deserialize().map(|row| row.map_err(csv_err)).collect()
}

pub const CSV_COLUMNS: [&str; 18] = [
    "t",
    "dt",
    "newton_iters",
    "cum_newton_iters",
    "cuts",
    "cum_cuts",
    "flips_2d",
    "flips_1d",
    "flips_mortar",
    "cum_flips_2d",
    "cum_flips_1d",
    "cum_flips_mortar",
    "cum_wasted_flips_2d",
    "cum_wasted_flips_1d",
    "cum_wasted_flips_mortar",
    "mass_phase0",
    "mass_phase1",
    "clip_events",
];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub case: String,
    pub scheme: String,
    pub status: RunStatus,
    pub t_final: f64,
    pub t_end: f64,
    pub buoyancy_number: f64,
    pub steps: usize,
    pub cum_newton_iters: u64,
    pub cum_cuts: u64,
    pub cum_flips: FlipTotals,
    pub cum_wasted_flips: FlipTotals,
    pub initial_mass: [f64; 2],
    pub max_mass_drift: [f64; 2],
    pub message: Option<String>,
}

impl Summary {
    pub fn new(case: &Case, report: &RunReport) -> Self {
        Summary {
            case: case.config.name.clone(),
            scheme: report.scheme.clone(),
            status: report.status,
            t_final: report.t_final,
            t_end: case.config.time.t_end,
            buoyancy_number: case.buoyancy_number(),
            steps: report.steps.len(),
            cum_newton_iters: report.cum_newton_iters,
            cum_cuts: report.cum_cuts,
            cum_flips: report.cum_flips,
            cum_wasted_flips: report.cum_wasted_flips,
            initial_mass: report.initial_mass,
            max_mass_drift: report.max_mass_drift(),
            message: report.message.clone(),
        }
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let text = serde_json::to_string_pretty(self).expect("summary serialises");
        fs::write(path, text + "\n").map_err(|e| Error::io(path, e))
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        serde_json::from_str(&text).map_err(|e| Error::Parse {
            source_name: path.display().to_string(),
            line: e.line(),
            message: e.to_string(),
        })
    }
}

/// File name of the field dump at time `t`.
pub fn field_file_name(t: f64) -> String {
    format!("fields_{t:.6}.vtk")
}

/// Writes `report.csv`, `summary.json` and one VTK file per stored state
/// into `dir`, creating it if needed. Returns the written paths.
pub fn write_outputs(dir: &Path, case: &Case, report: &RunReport, fields: &[(f64, State)]) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut written = Vec::new();
    let csv_path = dir.join("report.csv");
    write_csv(&csv_path, &report.steps)?;
    written.push(csv_path);
    let summary_path = dir.join("summary.json");
    Summary::new(case, report).write(&summary_path)?;
    written.push(summary_path);
    for (t, state) in fields {
        let path = dir.join(field_file_name(*t));
        vtk::write(&path, &case.domain, state, &format!("{} t={t}", case.config.name))?;
        written.push(path);
    }
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn record(k: u64) -> StepRecord {
        StepRecord {
            t: 0.1 * k as f64 + 1.0 / 3.0,
            dt: 0.1,
            newton_iters: k,
            cum_newton_iters: 3 * k,
            cuts: 0,
            cum_cuts: k / 2,
            flips_2d: k,
            flips_1d: 1,
            flips_mortar: 2,
            cum_flips_2d: 10 * k,
            cum_flips_1d: k,
            cum_flips_mortar: 2 * k,
            cum_wasted_flips_2d: 0,
            cum_wasted_flips_1d: 0,
            cum_wasted_flips_mortar: 0,
            mass_phase0: 0.127 + 1e-17 * k as f64,
            mass_phase1: std::f64::consts::PI,
            clip_events: 0,
        }
    }

    #[test]
    fn csv_round_trip_is_exact() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("r.csv");
        let steps: Vec<_> = (0..5).map(record).collect();
        write_csv(&path, &steps).unwrap();
        assert_eq!(read_csv(&path).unwrap(), steps);
    }

    #[test]
    fn empty_series_is_header_only() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("r.csv");
        write_csv(&path, &[]).unwrap();
        let text = fs::read_to_string(&path).unwrap();
        assert_eq!(text.trim_end(), CSV_COLUMNS.join(","));
        assert!(read_csv(&path).unwrap().is_empty());
    }

    #[test]
    fn io_errors_name_the_path() {
        let err = write_csv(Path::new("/nonexistent/dir/r.csv"), &[]).unwrap_err();
        assert!(err.to_string().contains("/nonexistent/dir/r.csv"));
    }
}
