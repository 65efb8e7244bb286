//! Running a loaded case end to end and keeping field snapshots.

use std::ops::ControlFlow;
use std::path::{Path, PathBuf};

use crate::case::Case;
use crate::error::Result;
use crate::flux::Scheme;
use crate::report;
use crate::simulate::{advance, RunReport, StepRecord, TimeControl};
use crate::state::State;

/// Overrides applied on top of the time section of a case.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct RunOptions {
    pub dt_max: Option<f64>,
    pub tol: Option<f64>,
    pub t_end: Option<f64>,
    pub max_iter: Option<usize>,
    /// Number of evenly spaced field snapshots after the initial one.
    pub snapshots: usize,
}

impl RunOptions {
    pub fn control(&self, case: &Case) -> TimeControl {
        let mut c = case.config.time_control();
        if let Some(v) = self.t_end {
            c.t_end = v;
        }
        if let Some(v) = self.dt_max {
            c.dt_max = v;
        }
        if let Some(v) = self.tol {
            c.newton.tol = v;
        }
        if let Some(v) = self.max_iter {
            c.newton.max_iter = v;
        }
        c
    }
}

pub struct RunOutput {
    pub state: State,
    pub report: RunReport,
    /// `(t, state)` snapshots, starting with the initial state.
    pub fields: Vec<(f64, State)>,
}

pub fn run_case(case: &Case, scheme: Scheme, options: &RunOptions) -> Result<RunOutput> {
    run_case_until(case, scheme, options, |_| false)
}

/// Like [`run_case`], but ends the run with status `Stopped` after the first
/// accepted step for which `stop` holds.
pub fn run_case_until(
    case: &Case,
    scheme: Scheme,
    options: &RunOptions,
    mut stop: impl FnMut(&StepRecord) -> bool,
) -> Result<RunOutput> {
    let model = case.model(scheme)?;
    let control = options.control(case);
    let mut fields = vec![(0.0, case.initial.clone())];
    let every = control.t_end / options.snapshots.max(1) as f64;
    let mut next = every;
    let (state, report) = advance(&model, &control, &case.initial, |rec, st| {
        if options.snapshots > 0 && rec.t >= next - 1e-9 * every {
            fields.push((rec.t, st.clone()));
            while next <= rec.t + 1e-9 * every {
                next += every;
            }
        }
        Ok(if stop(rec) {
            ControlFlow::Break(())
        } else {
            ControlFlow::Continue(())
        })
    })?;
    let last_t = fields.last().map_or(0.0, |f| f.0);
    if report.t_final > last_t {
        fields.push((report.t_final, state.clone()));
    }
    Ok(RunOutput { state, report, fields })
}

/// Runs and writes `report.csv`, `summary.json` and the snapshots to `dir`.
pub fn run_to_dir(case: &Case, scheme: Scheme, options: &RunOptions, dir: &Path) -> Result<(RunOutput, Vec<PathBuf>)> {
    let out = run_case(case, scheme, options)?;
    let files = report::write_outputs(dir, case, &out.report, &out.fields)?;
    Ok((out, files))
}
