//! Spatial convergence from a single implicit step of smooth data.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::case::{Case, CaseConfig, MeshKind};
use crate::error::{Error, Result};
use crate::flux::Scheme;
use crate::newton::newton_solve;
use crate::state::{BlockOrder, DofMap, State};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InterfaceMesh {
    /// Fracture and mortar cells follow the matrix faces.
    Conforming,
    /// `n - 1` fracture cells and `n + 1` mortar cells per fracture.
    NonConforming,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StudyParams {
    pub scheme: Scheme,
    /// Matrix cells per side of each level.
    pub levels: Vec<usize>,
    pub reference: usize,
    pub dt: f64,
}

impl StudyParams {
    pub fn new(scheme: Scheme, dt: f64) -> Self {
        StudyParams {
            scheme,
            levels: vec![8, 16, 32],
            reference: 128,
            dt,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LevelError {
    pub n: usize,
    pub h: f64,
    pub error_p: f64,
    pub error_s: f64,
    /// Observed orders against the previous level.
    pub order_p: Option<f64>,
    pub order_s: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StudyResult {
    pub interface: InterfaceMesh,
    pub levels: Vec<LevelError>,
}

impl StudyResult {
    /// Observed saturation order between the last two levels.
    pub fn final_order(&self) -> Option<f64> {
        self.levels.last().and_then(|l| l.order_s)
    }
}

/// Smooth heavy-phase saturation on the unit square used as initial data.
/// It is 1 on the bottom and 0 on the top wall, where the buoyancy flux then
/// vanishes and no shock forms against the wall.
pub fn smooth_saturation(x: f64, y: f64) -> f64 {
    let warped = y + 0.1 * (PI * y).sin() * (PI * x).sin();
    0.5 + 0.5 * (PI * warped).cos()
}

fn level_config(base: &CaseConfig, n: usize, interface: InterfaceMesh) -> CaseConfig {
    let mut cfg = base.clone();
    let aspect = cfg.mesh.ly / cfg.mesh.lx;
    cfg.mesh.kind = MeshKind::Quad;
    cfg.mesh.nx = n;
    cfg.mesh.ny = ((n as f64) * aspect).round().max(1.0) as usize;
    cfg.mesh.path = None;
    for f in &mut cfg.fractures {
        match interface {
            InterfaceMesh::Conforming => {
                f.cells = None;
                f.mortar_cells = None;
            }
            InterfaceMesh::NonConforming => {
                f.cells = Some(n.saturating_sub(1).max(1));
                f.mortar_cells = Some(n + 1);
            }
        }
    }
    cfg
}

/// Solves one step of length `dt` from the smooth initial data on an
/// `n`-cell level and returns the case together with the new state.
/// Every level starts from the cell averages of the same fine samples: a
/// matrix cell of an `n`-cell level averages `(reference / n)^2` midpoint
/// samples, so the initial data of all levels agree exactly after projection.
pub fn single_step(
    base: &CaseConfig,
    n: usize,
    reference: usize,
    interface: InterfaceMesh,
    scheme: Scheme,
    dt: f64,
) -> Result<(Case, State)> {
    let case = Case::from_config(level_config(base, n, interface), None)?;
    let model = case.model(scheme)?;
    let (lo, hi) = case.mesh.bounds();
    let top = hi[1];
    let rho_mean = 0.5 * (base.fluid.heavy.density + base.fluid.light.density);
    let mut start = State::zeros(&case.domain);
    for (i, sub) in case.domain.subdomains.iter().enumerate() {
        for (c, cell) in sub.grid.cells.iter().enumerate() {
            let (x, y) = (cell.center[0], cell.center[1]);
            let unit = |x: f64, y: f64| smooth_saturation((x - lo[0]) / (hi[0] - lo[0]), (y - lo[1]) / (hi[1] - lo[1]));
            start.s0[i][c] = if sub.dim == 2 {
                cell_average(&cell.vertices, (reference / n).max(1), unit)
            } else {
                unit(x, y)
            };
            start.p[i][c] = base.initial.top_pressure + rho_mean * base.gravity * (top - y);
        }
    }
    let dofs = DofMap::new(&case.domain, BlockOrder::Natural);
    let mut params = base.time_control().newton;
    params.tol = params.tol.min(1e-10);
    params.max_iter = params.max_iter.max(30);
    let out = newton_solve(&model, &dofs, &start, &start, dt, &params);
    if !out.converged {
        return Err(Error::Parameter(format!(
            "convergence study step on level {n} did not converge: {}",
            out.failure.unwrap_or_default()
        )));
    }
    Ok((case, out.state))
}

/// Midpoint-rule average of `f` over `r x r` sub-rectangles of the bounding
/// box of an axis-aligned cell.
fn cell_average(vertices: &[crate::grid::Vec3], r: usize, f: impl Fn(f64, f64) -> f64) -> f64 {
    let (mut x0, mut x1, mut y0, mut y1) = (f64::MAX, f64::MIN, f64::MAX, f64::MIN);
    for v in vertices {
        x0 = x0.min(v[0]);
        x1 = x1.max(v[0]);
        y0 = y0.min(v[1]);
        y1 = y1.max(v[1]);
    }
    let (hx, hy) = ((x1 - x0) / r as f64, (y1 - y0) / r as f64);
    let mut sum = 0.0;
    for a in 0..r {
        for b in 0..r {
            sum += f(x0 + (a as f64 + 0.5) * hx, y0 + (b as f64 + 0.5) * hy);
        }
    }
    sum / (r * r) as f64
}

/// Cell-average L2 errors of the matrix pressure and saturation against a
/// finer nested solution.
fn matrix_errors(coarse: &Case, cs: &State, fine: &Case, fs: &State) -> Result<(f64, f64)> {
    let cg = &coarse.domain.subdomains[0].grid;
    let fg = &fine.domain.subdomains[0].grid;
    let (lo, hi) = coarse.mesh.bounds();
    let (nx, ny) = (coarse.config.mesh.nx, coarse.config.mesh.ny);
    let locate = |x: f64, y: f64| -> (usize, usize) {
        let i = (((x - lo[0]) / (hi[0] - lo[0])) * nx as f64).floor() as usize;
        let j = (((y - lo[1]) / (hi[1] - lo[1])) * ny as f64).floor() as usize;
        (i.min(nx - 1), j.min(ny - 1))
    };
    let mut index = vec![usize::MAX; nx * ny];
    for (c, cell) in cg.cells.iter().enumerate() {
        let (i, j) = locate(cell.center[0], cell.center[1]);
        index[j * nx + i] = c;
    }
    if index.contains(&usize::MAX) {
        return Err(Error::Geometry("coarse level is not a structured quad grid".into()));
    }
    let mut sum = vec![[0.0f64; 3]; cg.num_cells()];
    for (c, cell) in fg.cells.iter().enumerate() {
        let (i, j) = locate(cell.center[0], cell.center[1]);
        let k = index[j * nx + i];
        sum[k][0] += cell.measure * fs.p[0][c];
        sum[k][1] += cell.measure * fs.s0[0][c];
        sum[k][2] += cell.measure;
    }
    let (mut ep, mut es) = (0.0, 0.0);
    for (k, cell) in cg.cells.iter().enumerate() {
        let [p, s, w] = sum[k];
        if w <= 0.0 {
            return Err(Error::Geometry("reference grid is not nested in the level".into()));
        }
        ep += cell.measure * (cs.p[0][k] - p / w).powi(2);
        es += cell.measure * (cs.s0[0][k] - s / w).powi(2);
    }
    Ok((ep.sqrt(), es.sqrt()))
}

/// Runs the study for one interface-mesh family against a conforming
/// reference on the finest grid.
pub fn study(base: &CaseConfig, params: &StudyParams, interface: InterfaceMesh) -> Result<StudyResult> {
    let reference = single_step(
        base,
        params.reference,
        params.reference,
        InterfaceMesh::Conforming,
        params.scheme,
        params.dt,
    )?;
    study_against(base, params, interface, &reference)
}

/// Runs both interface-mesh families against one shared reference.
pub fn study_both(base: &CaseConfig, params: &StudyParams) -> Result<Vec<StudyResult>> {
    let reference = single_step(
        base,
        params.reference,
        params.reference,
        InterfaceMesh::Conforming,
        params.scheme,
        params.dt,
    )?;
    [InterfaceMesh::Conforming, InterfaceMesh::NonConforming]
        .into_iter()
        .map(|i| study_against(base, params, i, &reference))
        .collect()
}

pub fn study_against(
    base: &CaseConfig,
    params: &StudyParams,
    interface: InterfaceMesh,
    reference: &(Case, State),
) -> Result<StudyResult> {
    for &n in &params.levels {
        if n == 0 || params.reference % n != 0 {
            return Err(Error::Parameter(format!(
                "level {n} does not divide the reference resolution {}",
                params.reference
            )));
        }
    }
    let mut levels: Vec<LevelError> = Vec::new();
    for &n in &params.levels {
        let (case, state) = single_step(base, n, params.reference, interface, params.scheme, params.dt)?;
        let (error_p, error_s) = matrix_errors(&case, &state, &reference.0, &reference.1)?;
        let h = case.config.mesh.lx / n as f64;
        let order = |e_prev: f64, e: f64, h_prev: f64| (e_prev / e).ln() / (h_prev / h).ln();
        let (order_p, order_s) = match levels.last() {
            Some(prev) => (
                Some(order(prev.error_p, error_p, prev.h)),
                Some(order(prev.error_s, error_s, prev.h)),
            ),
            None => (None, None),
        };
        levels.push(LevelError {
            n,
            h,
            error_p,
            error_s,
            order_p,
            order_s,
        });
    }
    Ok(StudyResult { interface, levels })
}
