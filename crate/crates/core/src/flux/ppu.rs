//! Phase-potential upwinding: each phase's mobility and density are taken
//! from the cell its own potential difference flows out of.

use super::{CellState, FaceFlux, FaceGeometry, Side, UpwindBits};
use crate::scalar::Scalar;

/// Driving value `T (dp + g rho_avg dz)` of phase `phase`.
pub fn driving_flux<T: Scalar>(geom: &FaceGeometry, m: &CellState<T>, n: &CellState<T>, phase: usize) -> T {
    let rho_avg = (m.rho[phase].clone() + n.rho[phase].clone()).scale(0.5);
    let dp = m.p.clone() - n.p.clone();
    (dp + rho_avg.scale(geom.gravity * geom.dz)).scale(geom.transmissibility)
}

/// Mass flux `rho_up lambda_up q` of one phase and the side it was upwinded from.
pub fn phase_flux<T: Scalar>(
    geom: &FaceGeometry,
    m: &CellState<T>,
    n: &CellState<T>,
    phase: usize,
) -> (T, Side) {
    let q = driving_flux(geom, m, n, phase);
    let side = Side::of(q.value());
    let rho = side.pick(&m.rho[phase], &n.rho[phase]).clone();
    let lambda = side.pick(&m.lambda[phase], &n.lambda[phase]).clone();
    (rho * lambda * q, side)
}

pub fn face_flux<T: Scalar>(geom: &FaceGeometry, m: &CellState<T>, n: &CellState<T>) -> FaceFlux<T> {
    let (q0, s0) = phase_flux(geom, m, n, 0);
    let (q1, s1) = phase_flux(geom, m, n, 1);
    let mut upwind = UpwindBits::default();
    upwind.push(0, s0);
    upwind.push(1, s1);
    FaceFlux {
        total: q0.clone() + q1,
        phase0: q0,
        upwind,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fluid::{FluidPair, Phase};

    fn fluid() -> FluidPair {
        FluidPair::new(Phase::new(1.0, 1.0), Phase::new(0.5, 1.0))
    }

    fn geom(dz: f64, g: f64) -> FaceGeometry {
        FaceGeometry {
            transmissibility: 1.0,
            dz,
            gravity: g,
        }
    }

    #[test]
    fn uniform_pressure_without_gravity_is_static() {
        let f = fluid();
        let m = CellState::<f64>::new(&f, 3.0, 0.3);
        let n = CellState::<f64>::new(&f, 3.0, 0.8);
        let q = face_flux(&geom(1.0, 0.0), &m, &n);
        assert_eq!(q.total, 0.0);
        assert_eq!(q.phase0, 0.0);
    }

    #[test]
    fn hand_evaluated_two_cell_flux() {
        let f = fluid();
        let m = CellState::<f64>::new(&f, 2.0, 0.5);
        let n = CellState::<f64>::new(&f, 1.0, 1.0);
        let (q0, side) = phase_flux(&geom(0.0, 0.0), &m, &n, 0);
        assert_eq!(side, Side::Left);
        assert_eq!(q0, 0.25);
    }

    #[test]
    fn single_phase_reduces_to_darcy() {
        let f = fluid();
        let m = CellState::<f64>::new(&f, 1.5, 1.0);
        let n = CellState::<f64>::new(&f, 0.2, 1.0);
        let g = geom(0.3, 1.0);
        let q = face_flux(&g, &m, &n);
        assert!((q.phase0 - (1.3 + 0.3)).abs() < 1e-15);
        assert_eq!(q.total, q.phase0);
    }

    #[test]
    fn heavy_phase_falls_in_a_static_column() {
        // m above n, hydrostatic in the light phase: the heavy phase must move down.
        let f = fluid();
        let dz = 1.0;
        let m = CellState::<f64>::new(&f, 0.0, 1.0);
        let n = CellState::<f64>::new(&f, 0.5 * dz, 0.0);
        let (_, side) = phase_flux(&geom(dz, 1.0), &m, &n, 0);
        assert!(driving_flux(&geom(dz, 1.0), &m, &n, 0) > 0.0);
        assert_eq!(side, Side::Left);
    }
}
