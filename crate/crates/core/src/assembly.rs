//! Residual of the fully implicit system over all subdomains and mortars.
//!
//! Per cell of subdomain `i`:
//!
//! ```text
//! eps^a |c| (U_T - U_T_prev) / dt + eps^a sum_f Q_T,f + outflow_mortar - psi^p
//! eps^a |c| (U_0 - U_0_prev) / dt + eps^a sum_f Q_0,f + outflow_mortar - psi^s
//! ```
//!
//! and per mortar cell the constitutive law of each phase. Evaluated with
//! `f64` this is the residual alone; with [`Ad`] it also carries the exact
//! Jacobian.

use crate::ad::Ad;
use crate::error::{Error, Result};
use crate::fluid::{accumulation, FluidPair};
use crate::flux::{BlendParams, CellState, FaceGeometry, Scheme, UpwindBits};
use crate::mortar::{coupling_sources, evaluate_mortar, higher_side_bc, InterfaceSide, MortarEval};
use crate::scalar::Scalar;
use crate::state::{DofMap, State};
use crate::topology::MixedDimDomain;

/// A domain together with the physics and the flux scheme.
#[derive(Clone, Debug)]
pub struct Model {
    pub domain: MixedDimDomain,
    pub fluid: FluidPair,
    pub gravity: f64,
    pub scheme: Scheme,
    pub blend: BlendParams,
    transmissibility: Vec<Vec<f64>>,
    dz: Vec<Vec<f64>>,
}

/// Upwind decisions of one residual evaluation.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Upwinds {
    pub faces: Vec<Vec<UpwindBits>>,
    pub mortars: Vec<Vec<[InterfaceSide; 2]>>,
}

/// Faces whose upwind decisions changed, by subdomain dimension, and
/// changed interface upwind sides per mortar cell and phase.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct FlipCounts {
    pub by_dim: [u64; 4],
    pub mortar: u64,
}

impl FlipCounts {
    pub fn add(&mut self, other: &FlipCounts) {
        for d in 0..4 {
            self.by_dim[d] += other.by_dim[d];
        }
        self.mortar += other.mortar;
    }

    pub fn total(&self) -> u64 {
        self.by_dim.iter().sum::<u64>() + self.mortar
    }
}

impl Upwinds {
    pub fn flips(&self, before: &Upwinds, domain: &MixedDimDomain) -> FlipCounts {
        let mut out = FlipCounts::default();
        for (i, (now, then)) in self.faces.iter().zip(&before.faces).enumerate() {
            let d = domain.subdomains[i].dim;
            out.by_dim[d] += now.iter().zip(then).filter(|(a, b)| a != b).count() as u64;
        }
        for (now, then) in self.mortars.iter().zip(&before.mortars) {
            for (a, b) in now.iter().zip(then) {
                out.mortar += (a[0] != b[0]) as u64 + (a[1] != b[1]) as u64;
            }
        }
        out
    }
}

#[derive(Clone, Debug)]
pub struct Evaluation<T> {
    pub residual: Vec<T>,
    pub upwinds: Upwinds,
}

impl Model {
    pub fn new(domain: MixedDimDomain, fluid: FluidPair, gravity: f64, scheme: Scheme) -> Result<Self> {
        fluid.validate()?;
        let violations = domain.validate();
        if !violations.is_empty() {
            let list: Vec<String> = violations.iter().map(|v| v.to_string()).collect();
            return Err(Error::Topology(list.join("; ")));
        }
        let transmissibility = domain
            .subdomains
            .iter()
            .map(|s| s.grid.tpfa_transmissibilities())
            .collect::<Result<Vec<_>>>()?;
        let dz = domain
            .subdomains
            .iter()
            .map(|s| s.grid.elevation_jumps())
            .collect();
        Ok(Model {
            domain,
            blend: BlendParams::from_relperm(&fluid.relperm),
            fluid,
            gravity,
            scheme,
            transmissibility,
            dz,
        })
    }

    pub fn with_scheme(&self, scheme: Scheme) -> Model {
        Model {
            scheme,
            ..self.clone()
        }
    }

    pub fn transmissibilities(&self, sub: usize) -> &[f64] {
        &self.transmissibility[sub]
    }

    pub fn face_geometry(&self, sub: usize, face: usize) -> FaceGeometry {
        FaceGeometry {
            transmissibility: self.transmissibility[sub][face],
            dz: self.dz[sub][face],
            gravity: self.gravity,
        }
    }

    /// Total mass of each phase, `sum eps^a |c| phi rho_l S_l`.
    pub fn masses(&self, state: &State) -> [f64; 2] {
        let mut m = [0.0; 2];
        for (i, sub) in self.domain.subdomains.iter().enumerate() {
            for (c, cell) in sub.grid.cells.iter().enumerate() {
                let [r0, r1] = self.fluid.densities(&state.p[i][c]);
                let (u0, u1) = accumulation(sub.grid.porosity[c], &r0, &r1, &state.s0[i][c]);
                let w = sub.codim_extension * cell.measure;
                m[0] += w * u0;
                m[1] += w * u1;
            }
        }
        m
    }

    /// Residual at the unknown vector `x` for one implicit Euler step of
    /// length `dt` starting from `prev`.
    pub fn evaluate<T: Scalar>(&self, dofs: &DofMap, x: &[f64], prev: &State, dt: f64) -> Result<Evaluation<T>> {
        let domain = &self.domain;
        let mut residual = vec![T::zero(); dofs.len()];

        let cells: Vec<Vec<CellState<T>>> = domain
            .subdomains
            .iter()
            .enumerate()
            .map(|(i, sub)| {
                (0..sub.grid.num_cells())
                    .map(|c| {
                        let (kp, ks) = (dofs.p(i, c), dofs.s(i, c));
                        CellState::new(&self.fluid, T::variable(x[kp], kp), T::variable(x[ks], ks))
                    })
                    .collect()
            })
            .collect();

        let mut faces_up = Vec::with_capacity(domain.subdomains.len());
        for (i, sub) in domain.subdomains.iter().enumerate() {
            let grid = &sub.grid;
            let ext = sub.codim_extension;
            for (c, cell) in grid.cells.iter().enumerate() {
                let st = &cells[i][c];
                let phi = grid.porosity[c];
                let (u0, u1) = accumulation(phi, &st.rho[0], &st.rho[1], &st.s0);
                let [r0, r1] = self.fluid.densities(&prev.p[i][c]);
                let (v0, v1) = accumulation(phi, &r0, &r1, &prev.s0[i][c]);
                let w = ext * cell.measure / dt;
                let kp = dofs.p(i, c);
                let ks = dofs.s(i, c);
                residual[kp] = (u0.clone() + u1 - T::from_f64(v0 + v1)).scale(w);
                residual[ks] = (u0 - T::from_f64(v0)).scale(w);
            }
            let mut up = vec![UpwindBits::default(); grid.num_faces()];
            for (f, face) in grid.faces.iter().enumerate() {
                let Some(n) = face.right else { continue };
                let m = face.left;
                let q = self.scheme.face_flux(
                    &self.blend,
                    &self.face_geometry(i, f),
                    &cells[i][m],
                    &cells[i][n],
                );
                up[f] = q.upwind;
                let qt = q.total.scale(ext);
                let q0 = q.phase0.scale(ext);
                add(&mut residual, dofs.p(i, m), qt.clone());
                add(&mut residual, dofs.p(i, n), -qt);
                add(&mut residual, dofs.s(i, m), q0.clone());
                add(&mut residual, dofs.s(i, n), -q0);
            }
            faces_up.push(up);
        }

        let mut evals: Vec<MortarEval<T>> = Vec::with_capacity(domain.mortars.len());
        for (j, mortar) in domain.mortars.iter().enumerate() {
            let zeta = [0, 1].map(|l| {
                (0..mortar.num_cells())
                    .map(|p| {
                        let k = dofs.zeta(j, l, p);
                        T::variable(x[k], k)
                    })
                    .collect::<Vec<T>>()
            });
            let hi = mortar.higher;
            let lo = mortar.lower;
            let eval = evaluate_mortar(
                mortar,
                domain.subdomains[lo].aperture,
                self.gravity,
                &domain.subdomains[hi].grid,
                &cells[hi],
                &cells[lo],
                &zeta,
            )?;
            for l in 0..2 {
                for (p, r) in eval.residual[l].iter().enumerate() {
                    residual[dofs.zeta(j, l, p)] = r.clone();
                }
            }

            let grid = &domain.subdomains[hi].grid;
            let total: Vec<T> = eval.mass_flux[0]
                .iter()
                .zip(&eval.mass_flux[1])
                .map(|(a, b)| a.clone() + b.clone())
                .collect();
            let out_t = higher_side_bc(mortar, grid, &total)?;
            let out_0 = higher_side_bc(mortar, grid, &eval.mass_flux[0])?;
            for &f in &mortar.high_faces {
                let c = grid.faces[f].left;
                add(&mut residual, dofs.p(hi, c), out_t[f].clone());
                add(&mut residual, dofs.s(hi, c), out_0[f].clone());
            }
            evals.push(eval);
        }

        for (i, sub) in domain.subdomains.iter().enumerate() {
            if sub.higher_mortars.is_empty() {
                continue;
            }
            let attached: Vec<_> = sub
                .higher_mortars
                .iter()
                .map(|&j| (&domain.mortars[j], &evals[j]))
                .collect();
            let (psi_p, psi_s) = coupling_sources(&attached, sub.grid.num_cells(), None)?;
            for c in 0..sub.grid.num_cells() {
                add(&mut residual, dofs.p(i, c), -psi_p[c].clone());
                add(&mut residual, dofs.s(i, c), -psi_s[c].clone());
            }
        }

        self.check_finite(dofs, &residual)?;
        Ok(Evaluation {
            residual,
            upwinds: Upwinds {
                faces: faces_up,
                mortars: evals.into_iter().map(|e| e.sides).collect(),
            },
        })
    }

    fn check_finite<T: Scalar>(&self, dofs: &DofMap, residual: &[T]) -> Result<()> {
        let Some(k) = residual.iter().position(|r| !r.is_finite()) else {
            return Ok(());
        };
        for (i, sub) in self.domain.subdomains.iter().enumerate() {
            for c in 0..sub.grid.num_cells() {
                if dofs.p(i, c) == k {
                    return Err(assembly_error(format!("subdomain {i} cell {c} (pressure equation)")));
                }
                if dofs.s(i, c) == k {
                    return Err(assembly_error(format!("subdomain {i} cell {c} (phase-0 balance)")));
                }
            }
        }
        for (j, m) in self.domain.mortars.iter().enumerate() {
            for l in 0..2 {
                for p in 0..m.num_cells() {
                    if dofs.zeta(j, l, p) == k {
                        return Err(assembly_error(format!("mortar {j} cell {p} phase {l}")));
                    }
                }
            }
        }
        Err(assembly_error(format!("row {k}")))
    }

    /// Residual values and Jacobian triplets `(row, col, value)`.
    pub fn linearize(
        &self,
        dofs: &DofMap,
        x: &[f64],
        prev: &State,
        dt: f64,
    ) -> Result<(Vec<f64>, Vec<(usize, usize, f64)>, Upwinds)> {
        let eval = self.evaluate::<Ad>(dofs, x, prev, dt)?;
        let mut values = Vec::with_capacity(eval.residual.len());
        let mut triplets = Vec::new();
        for (row, r) in eval.residual.iter().enumerate() {
            values.push(r.val());
            triplets.extend(r.partials().map(|(col, d)| (row, col, d)));
        }
        Ok((values, triplets, eval.upwinds))
    }
}

fn assembly_error(location: String) -> Error {
    Error::Assembly { location }
}

fn add<T: Scalar>(r: &mut [T], k: usize, v: T) {
    r[k] = r[k].clone() + v;
}
