//! Mortar coupling: the interface flux law, interface upwinding and the
//! terms a mortar contributes to the balances of its two neighbours.
//!
//! A non-negative `zeta` means flow from the higher-dimensional side into
//! the lower-dimensional one. The mass flux `rho lambda zeta` of a mortar
//! cell leaves the higher side through the boundary faces it overlaps and
//! enters the lower side through the cells it overlaps, both distributed
//! with the area-weighted maps so that the two amounts are equal.

use crate::error::Result;
use crate::flux::CellState;
use crate::grid::SubdomainGrid;
use crate::scalar::Scalar;
use crate::topology::{MortarInterface, Projections};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum InterfaceSide {
    Higher,
    Lower,
}

impl InterfaceSide {
    pub fn of(zeta: f64) -> InterfaceSide {
        if zeta < 0.0 {
            InterfaceSide::Lower
        } else {
            InterfaceSide::Higher
        }
    }
}

/// Projects a field onto mortar cell `p` from the side `zeta` flows out of.
/// `high` is indexed by higher-grid faces, `low` by lower-grid cells.
pub fn interface_upwind<T: Scalar>(
    proj: &Projections,
    p: usize,
    zeta: f64,
    high: impl Fn(usize) -> T,
    low: impl Fn(usize) -> T,
) -> T {
    match InterfaceSide::of(zeta) {
        InterfaceSide::Higher => proj.high_avg.project_row(p, high),
        InterfaceSide::Lower => proj.low_avg.project_row(p, low),
    }
}

/// Constitutive law of one mortar cell:
/// `zeta - f k |c| [(2 / eps) (p_h - p_l) - rho g cos]`.
#[allow(clippy::too_many_arguments)]
pub fn mortar_law<T: Scalar>(
    zeta: &T,
    codim_factor: f64,
    normal_permeability: f64,
    measure: f64,
    aperture_low: f64,
    p_high: &T,
    p_low: &T,
    rho: &T,
    gravity_cosine: f64,
) -> T {
    let jump = (p_high.clone() - p_low.clone()).scale(2.0 / aperture_low);
    let drive = jump - rho.scale(gravity_cosine);
    zeta.clone() - drive.scale(codim_factor * normal_permeability * measure)
}

/// Mortar quantities evaluated at one state.
#[derive(Clone, Debug)]
pub struct MortarEval<T> {
    /// Constitutive-law residual per phase and mortar cell.
    pub residual: [Vec<T>; 2],
    /// Interface mass flux `rho^zeta lambda^zeta zeta` per phase and mortar cell.
    pub mass_flux: [Vec<T>; 2],
    pub sides: Vec<[InterfaceSide; 2]>,
}

/// Evaluates the law and the upwinded mass fluxes of a whole mortar.
pub fn evaluate_mortar<T: Scalar>(
    mortar: &MortarInterface,
    aperture_low: f64,
    gravity: f64,
    high_grid: &SubdomainGrid,
    high: &[CellState<T>],
    low: &[CellState<T>],
    zeta: &[Vec<T>; 2],
) -> Result<MortarEval<T>> {
    let proj = mortar.projections()?;
    let np = mortar.num_cells();
    let face_cell = |f: usize| high_grid.faces[f].left;
    let mut residual = [Vec::with_capacity(np), Vec::with_capacity(np)];
    let mut mass_flux = [Vec::with_capacity(np), Vec::with_capacity(np)];
    let mut sides = Vec::with_capacity(np);
    for p in 0..np {
        let p_high = proj.high_avg.project_row(p, |f| high[face_cell(f)].p.clone());
        let p_low = proj.low_avg.project_row(p, |c| low[c].p.clone());
        let mut side = [InterfaceSide::Higher; 2];
        for l in 0..2 {
            let z = &zeta[l][p];
            side[l] = InterfaceSide::of(z.value());
            let rho = interface_upwind(
                proj,
                p,
                z.value(),
                |f| high[face_cell(f)].rho[l].clone(),
                |c| low[c].rho[l].clone(),
            );
            let rho_lambda = interface_upwind(
                proj,
                p,
                z.value(),
                |f| {
                    let c = &high[face_cell(f)];
                    c.rho[l].clone() * c.lambda[l].clone()
                },
                |c| low[c].rho[l].clone() * low[c].lambda[l].clone(),
            );
            residual[l].push(mortar_law(
                z,
                mortar.codim_factor,
                mortar.normal_permeability,
                mortar.measures[p],
                aperture_low,
                &p_high,
                &p_low,
                &rho,
                gravity * mortar.vertical_cosine[p],
            ));
            mass_flux[l].push(rho_lambda * z.clone());
        }
        sides.push(side);
    }
    Ok(MortarEval {
        residual,
        mass_flux,
        sides,
    })
}

/// Outflow through each face of the higher grid carried by one mortar's
/// cell fluxes; faces the mortar does not touch get zero.
pub fn higher_side_bc<T: Scalar>(
    mortar: &MortarInterface,
    high_grid: &SubdomainGrid,
    flux: &[T],
) -> Result<Vec<T>> {
    let proj = mortar.projections()?;
    let mut out = vec![T::zero(); high_grid.num_faces()];
    for (p, y) in flux.iter().enumerate() {
        for &(f, w) in proj.high_avg.row(p) {
            out[f] = out[f].clone() + y.scale(w);
        }
    }
    Ok(out)
}

/// Inflow into each cell of the lower grid carried by one mortar's cell fluxes.
pub fn lower_side_inflow<T: Scalar>(mortar: &MortarInterface, ncells: usize, flux: &[T]) -> Result<Vec<T>> {
    let proj = mortar.projections()?;
    let mut out = vec![T::zero(); ncells];
    for (p, y) in flux.iter().enumerate() {
        for &(c, w) in proj.low_avg.row(p) {
            out[c] = out[c].clone() + y.scale(w);
        }
    }
    Ok(out)
}

/// Coupling sources of a lower-side subdomain: `psi = inflow - f` for the
/// total (`psi^p`) and phase-0 (`psi^s`) balances. `withdrawal` holds the
/// per-cell sink rates `f` of both balances, if any.
pub fn coupling_sources<T: Scalar>(
    mortars: &[(&MortarInterface, &MortarEval<T>)],
    ncells: usize,
    withdrawal: Option<&[[f64; 2]]>,
) -> Result<(Vec<T>, Vec<T>)> {
    let mut psi_p = vec![T::zero(); ncells];
    let mut psi_s = vec![T::zero(); ncells];
    for (mortar, eval) in mortars {
        let total: Vec<T> = eval.mass_flux[0]
            .iter()
            .zip(&eval.mass_flux[1])
            .map(|(a, b)| a.clone() + b.clone())
            .collect();
        let in_p = lower_side_inflow(mortar, ncells, &total)?;
        let in_s = lower_side_inflow(mortar, ncells, &eval.mass_flux[0])?;
        for c in 0..ncells {
            psi_p[c] = psi_p[c].clone() + in_p[c].clone();
            psi_s[c] = psi_s[c].clone() + in_s[c].clone();
        }
    }
    if let Some(f) = withdrawal {
        for c in 0..ncells {
            psi_p[c] = psi_p[c].clone() - T::from_f64(f[c][0]);
            psi_s[c] = psi_s[c].clone() - T::from_f64(f[c][1]);
        }
    }
    Ok((psi_p, psi_s))
}

/// Total and phase-0 balance of a point subdomain: accumulation minus the
/// net interface inflow `psi`.
pub fn zero_d_balance<T: Scalar>(accumulation: [T; 2], psi_p: &T, psi_s: &T) -> [T; 2] {
    let [acc_t, acc_0] = accumulation;
    [acc_t - psi_p.clone(), acc_0 - psi_s.clone()]
}
