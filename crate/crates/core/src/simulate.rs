//! Time marching with step halving on Newton failure.

use std::ops::ControlFlow;

use serde::{Deserialize, Serialize};

use crate::assembly::{FlipCounts, Model};
use crate::error::Result;
use crate::newton::{newton_solve, NewtonParams};
use crate::state::{BlockOrder, DofMap, State};

/// Smallest time step before a run is abandoned.
pub const DT_MIN: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TimeControl {
    pub t_end: f64,
    pub dt_max: f64,
    pub dt_min: f64,
    pub newton: NewtonParams,
    pub order: BlockOrder,
}

impl TimeControl {
    pub fn new(t_end: f64, dt_max: f64) -> Self {
        TimeControl {
            t_end,
            dt_max,
            dt_min: DT_MIN,
            newton: NewtonParams::default(),
            order: BlockOrder::Natural,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RunStatus {
    Completed,
    DtUnderflow,
    /// The step callback asked to stop before `t_end`.
    Stopped,
}

impl RunStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            RunStatus::Completed => "completed",
            RunStatus::DtUnderflow => "dt_underflow",
            RunStatus::Stopped => "stopped",
        }
    }
}

/// One accepted time step.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    pub t: f64,
    pub dt: f64,
    /// Iterations spent on this step, including discarded attempts.
    pub newton_iters: u64,
    pub cum_newton_iters: u64,
    pub cuts: u64,
    pub cum_cuts: u64,
    pub flips_2d: u64,
    pub flips_1d: u64,
    pub flips_mortar: u64,
    pub cum_flips_2d: u64,
    pub cum_flips_1d: u64,
    pub cum_flips_mortar: u64,
    pub cum_wasted_flips_2d: u64,
    pub cum_wasted_flips_1d: u64,
    pub cum_wasted_flips_mortar: u64,
    pub mass_phase0: f64,
    pub mass_phase1: f64,
    pub clip_events: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub scheme: String,
    pub status: RunStatus,
    /// Time of the last accepted state.
    pub t_final: f64,
    pub initial_mass: [f64; 2],
    pub steps: Vec<StepRecord>,
    pub cum_newton_iters: u64,
    pub cum_cuts: u64,
    pub cum_flips: FlipTotals,
    pub cum_wasted_flips: FlipTotals,
    /// Last failure message when the run stopped early.
    pub message: Option<String>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FlipTotals {
    pub d2: u64,
    pub d1: u64,
    pub mortar: u64,
}

impl FlipTotals {
    fn add(&mut self, f: &FlipCounts) {
        self.d2 += f.by_dim[2] + f.by_dim[3];
        self.d1 += f.by_dim[1];
        self.mortar += f.mortar;
    }
}

impl RunReport {
    /// Largest relative change of either phase mass between consecutive
    /// accepted states.
    pub fn max_mass_drift(&self) -> [f64; 2] {
        let mut prev = self.initial_mass;
        let mut worst = [0.0f64; 2];
        for s in &self.steps {
            let now = [s.mass_phase0, s.mass_phase1];
            for l in 0..2 {
                let d = (now[l] - prev[l]).abs() / prev[l].abs().max(f64::MIN_POSITIVE);
                worst[l] = worst[l].max(d);
            }
            prev = now;
        }
        worst
    }
}

/// Marches `initial` to `control.t_end`. `on_step` sees every accepted
/// state and may break off the run, which then ends with status `Stopped`.
/// A run that cannot proceed above `dt_min` returns normally with status
/// `DtUnderflow`.
pub fn advance(
    model: &Model,
    control: &TimeControl,
    initial: &State,
    mut on_step: impl FnMut(&StepRecord, &State) -> Result<ControlFlow<()>>,
) -> Result<(State, RunReport)> {
    initial.check_shape(&model.domain)?;
    let dofs = DofMap::new(&model.domain, control.order);
    let mut state = initial.clone();
    let mut report = RunReport {
        scheme: model.scheme.to_string(),
        status: RunStatus::Completed,
        t_final: 0.0,
        initial_mass: model.masses(initial),
        steps: Vec::new(),
        cum_newton_iters: 0,
        cum_cuts: 0,
        cum_flips: FlipTotals::default(),
        cum_wasted_flips: FlipTotals::default(),
        message: None,
    };
    let end_tol = 1e-12 * control.t_end.abs().max(1.0);
    let mut t = 0.0;
    let mut dt = control.dt_max.min(control.t_end);

    while control.t_end - t > end_tol {
        let mut iters = 0u64;
        let mut cuts = 0u64;
        let outcome = loop {
            let out = newton_solve(model, &dofs, &state, &state, dt, &control.newton);
            iters += out.iterations as u64;
            if out.converged {
                break Some(out);
            }
            report.cum_wasted_flips.add(&out.flips);
            report.message = out.failure.clone();
            log::debug!("t = {t}: step {dt:e} failed ({:?}), halving", out.failure);
            cuts += 1;
            dt *= 0.5;
            if dt < control.dt_min {
                break None;
            }
        };
        report.cum_newton_iters += iters;
        report.cum_cuts += cuts;
        let Some(out) = outcome else {
            report.status = RunStatus::DtUnderflow;
            report.t_final = t;
            log::warn!("time step fell below {:e} at t = {t}", control.dt_min);
            return Ok((state, report));
        };

        t += dt;
        state = out.state;
        report.cum_flips.add(&out.flips);
        let [m0, m1] = model.masses(&state);
        let rec = StepRecord {
            t,
            dt,
            newton_iters: iters,
            cum_newton_iters: report.cum_newton_iters,
            cuts,
            cum_cuts: report.cum_cuts,
            flips_2d: out.flips.by_dim[2] + out.flips.by_dim[3],
            flips_1d: out.flips.by_dim[1],
            flips_mortar: out.flips.mortar,
            cum_flips_2d: report.cum_flips.d2,
            cum_flips_1d: report.cum_flips.d1,
            cum_flips_mortar: report.cum_flips.mortar,
            cum_wasted_flips_2d: report.cum_wasted_flips.d2,
            cum_wasted_flips_1d: report.cum_wasted_flips.d1,
            cum_wasted_flips_mortar: report.cum_wasted_flips.mortar,
            mass_phase0: m0,
            mass_phase1: m1,
            clip_events: out.clip_events as u64,
        };
        log::debug!("t = {t:.6}: dt = {dt:e}, {iters} iterations, {cuts} cuts");
        let flow = on_step(&rec, &state)?;
        report.steps.push(rec);
        report.t_final = t;
        report.message = None;
        if flow.is_break() {
            report.status = RunStatus::Stopped;
            return Ok((state, report));
        }
        dt = control.dt_max.min(control.t_end - t);
    }
    Ok((state, report))
}
