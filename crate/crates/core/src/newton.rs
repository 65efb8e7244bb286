//! Newton iteration for one implicit Euler step.

use faer::prelude::Solve;
use faer::sparse::{SparseColMat, Triplet};
use faer::Col;
use serde::{Deserialize, Serialize};

use crate::assembly::{FlipCounts, Model, Upwinds};
use crate::error::{Error, Result};
use crate::state::{DofMap, State};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NewtonParams {
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for NewtonParams {
    fn default() -> Self {
        NewtonParams {
            tol: 1e-6,
            max_iter: 15,
        }
    }
}

#[derive(Clone, Debug)]
pub struct NewtonOutcome {
    pub state: State,
    pub converged: bool,
    pub iterations: usize,
    /// `|dx| / sqrt(n)` of the last update.
    pub error: f64,
    pub flips: FlipCounts,
    pub clip_events: usize,
    /// Why the iteration stopped without converging, if it did.
    pub failure: Option<String>,
}

/// Solves `J dx = -r` with a sparse LU factorisation.
pub fn solve_linear(n: usize, triplets: &[(usize, usize, f64)], residual: &[f64]) -> Result<Vec<f64>> {
    let entries: Vec<Triplet<usize, usize, f64>> = triplets
        .iter()
        .map(|&(r, c, v)| Triplet::new(r, c, v))
        .collect();
    let a = SparseColMat::<usize, f64>::try_new_from_triplets(n, n, &entries)
        .map_err(|e| Error::LinearSolve(format!("{e:?}")))?;
    let lu = a.sp_lu().map_err(|e| Error::LinearSolve(format!("{e:?}")))?;
    let rhs = Col::<f64>::from_fn(n, |i| -residual[i]);
    let dx = lu.solve(&rhs);
    let dx: Vec<f64> = (0..n).map(|i| dx[i]).collect();
    if dx.iter().any(|v| !v.is_finite()) {
        return Err(Error::LinearSolve("singular or ill-conditioned Jacobian".into()));
    }
    Ok(dx)
}

/// Iterates from `start` towards the state at the end of a step of length
/// `dt` that began at `prev`. Saturations are clipped after every update;
/// the error is measured on the raw update.
pub fn newton_solve(
    model: &Model,
    dofs: &DofMap,
    start: &State,
    prev: &State,
    dt: f64,
    params: &NewtonParams,
) -> NewtonOutcome {
    let mut state = start.clone();
    let mut x = dofs.gather(&state);
    let n = x.len();
    let mut flips = FlipCounts::default();
    let mut clip_events = 0;
    let mut last: Option<Upwinds> = None;
    let mut error = f64::INFINITY;

    let fail = |state: State, iterations, error, flips, clip_events, why: String| NewtonOutcome {
        state,
        converged: false,
        iterations,
        error,
        flips,
        clip_events,
        failure: Some(why),
    };

    for it in 1..=params.max_iter {
        let (r, jac, upwinds) = match model.linearize(dofs, &x, prev, dt) {
            Ok(v) => v,
            Err(e) => return fail(state, it, error, flips, clip_events, e.to_string()),
        };
        if let Some(before) = &last {
            flips.add(&upwinds.flips(before, &model.domain));
        }
        last = Some(upwinds);

        let dx = match solve_linear(n, &jac, &r) {
            Ok(dx) => dx,
            Err(e) => return fail(state, it, error, flips, clip_events, e.to_string()),
        };
        error = (dx.iter().map(|v| v * v).sum::<f64>() / n.max(1) as f64).sqrt();
        for (xi, d) in x.iter_mut().zip(&dx) {
            *xi += d;
        }
        dofs.scatter(&x, &mut state);
        clip_events += state.clip_saturation();
        x = dofs.gather(&state);
        log::trace!("newton iteration {it}: err = {error:e}");

        if error < params.tol {
            return NewtonOutcome {
                state,
                converged: true,
                iterations: it,
                error,
                flips,
                clip_events,
                failure: None,
            };
        }
    }
    let why = format!("no convergence in {} iterations (err = {error:e})", params.max_iter);
    fail(state, params.max_iter, error, flips, clip_events, why)
}
