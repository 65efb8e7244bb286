//! Hybrid upwinding.
//!
//! The total flux uses mobilities blended smoothly between the two cells, the
//! viscous part of the phase-0 flux is upwinded with the total velocity and
//! the buoyancy part with the gravity function `omega`.

use serde::{Deserialize, Serialize};

use super::{CellState, FaceFlux, FaceGeometry, Side, UpwindBits};
use crate::fluid::RelPerm;
use crate::scalar::{min_by_value, Scalar};

/// Denominator floor for fractional-flow quotients.
const LAMBDA_FLOOR: f64 = 1e-300;
const ABSENT_PHASE: f64 = 1.5e-154;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlendParams {
    pub cap: f64,
    pub kr_at_one: f64,
    pub max_curvature: f64,
}

impl BlendParams {
    pub fn from_relperm(kr: &RelPerm) -> Self {
        BlendParams {
            cap: 1e6,
            kr_at_one: kr.at_one(),
            max_curvature: kr.max_curvature(),
        }
    }
}

impl Default for BlendParams {
    fn default() -> Self {
        BlendParams::from_relperm(&RelPerm::quadratic())
    }
}

/// `(S_m rho_m + S_n rho_n) / (S_m + S_n)`, arithmetic mean when the phase is
/// (numerically) absent on both sides.
pub fn saturation_weighted_density<T: Scalar>(s_m: &T, rho_m: &T, s_n: &T, rho_n: &T) -> T {
    let s = s_m.clone() + s_n.clone();
    // Keeps 1 / s^2 representable in the derivative.
    if s.value() <= ABSENT_PHASE {
        return (rho_m.clone() + rho_n.clone()).scale(0.5);
    }
    (s_m.clone() * rho_m.clone() + s_n.clone() * rho_n.clone()) / s
}

/// `0.5 + atan(c dphi) / pi`.
pub fn blend_weight<T: Scalar>(dphi: &T, c: &T) -> T {
    T::from_f64(0.5) + (c.clone() * dphi.clone()).atan().scale(std::f64::consts::FRAC_1_PI)
}

/// `min(max|k_r''| / (k_r(1) rho_face), cap)`.
pub fn blend_coefficient<T: Scalar>(rho_face: &T, params: &BlendParams) -> T {
    let raw = T::from_f64(params.max_curvature / params.kr_at_one) / rho_face.clone();
    min_by_value(raw, T::from_f64(params.cap))
}

/// Face density of both phases.
pub fn face_densities<T: Scalar>(m: &CellState<T>, n: &CellState<T>) -> [T; 2] {
    [0, 1].map(|l| {
        saturation_weighted_density(&m.saturation(l), &m.rho[l], &n.saturation(l), &n.rho[l])
    })
}

#[derive(Clone, Debug)]
pub struct TotalFlux<T> {
    /// `sum_l rho_face_l q_l`.
    pub mass: T,
    /// `q_0 + q_1`.
    pub volumetric: T,
}

/// Weighted-average total flux.
pub fn total_flux<T: Scalar>(
    blend: &BlendParams,
    geom: &FaceGeometry,
    m: &CellState<T>,
    n: &CellState<T>,
    rho_face: &[T; 2],
) -> TotalFlux<T> {
    let dp = m.p.clone() - n.p.clone();
    let mut mass = T::zero();
    let mut volumetric = T::zero();
    for l in 0..2 {
        let dphi = dp.clone() + rho_face[l].scale(geom.gravity * geom.dz);
        let c = blend_coefficient(&rho_face[l], blend);
        let beta = blend_weight(&dphi, &c);
        let lambda = beta.clone() * m.lambda[l].clone() + (T::one() - beta) * n.lambda[l].clone();
        let q = lambda * dphi.scale(geom.transmissibility);
        mass = mass + rho_face[l].clone() * q.clone();
        volumetric = volumetric + q;
    }
    TotalFlux { mass, volumetric }
}

/// `rho_0^V lambda_0^V / lambda_T^V q_T` with everything upwinded by `q_T`.
pub fn viscous_flux<T: Scalar>(m: &CellState<T>, n: &CellState<T>, q_t: &T) -> (T, Side) {
    let side = Side::of(q_t.value());
    let up = side.pick(m, n);
    let lambda_t = floor(up.lambda[0].clone() + up.lambda[1].clone());
    let v = up.rho[0].clone() * up.lambda[0].clone() / lambda_t * q_t.clone();
    (v, side)
}

#[derive(Clone, Debug)]
pub struct GravityFlux<T> {
    pub mass: T,
    pub volumetric: T,
    pub omega: [Side; 2],
    pub density_side: Side,
}

/// Buoyancy flux of phase 0.
///
/// `omega_l = lambda_k^g (rho_l - rho_k) g dz`, where `lambda_k^g` is the
/// counter phase's mobility taken from the cell it rises or sinks from.
pub fn gravity_flux<T: Scalar>(
    geom: &FaceGeometry,
    m: &CellState<T>,
    n: &CellState<T>,
    rho_face: &[T; 2],
) -> GravityFlux<T> {
    let g_dz = geom.gravity * geom.dz;
    let mut lambda_g: [T; 2] = [T::zero(), T::zero()];
    let mut omega = [Side::Left; 2];
    for l in 0..2 {
        let k = 1 - l;
        let buoyancy = (rho_face[l].clone() - rho_face[k].clone()).scale(g_dz);
        let counter = Side::of(-buoyancy.value());
        let lambda_k = counter.pick(&m.lambda[k], &n.lambda[k]).clone();
        let w = lambda_k * buoyancy.clone();
        omega[l] = tie_by(w.value(), buoyancy.value());
        lambda_g[l] = omega[l].pick(&m.lambda[l], &n.lambda[l]).clone();
    }
    let lambda_t = floor(lambda_g[0].clone() + lambda_g[1].clone());
    let [l0, l1] = lambda_g;
    let drive = (rho_face[0].clone() - rho_face[1].clone()).scale(geom.transmissibility * g_dz);
    let q = (l0 * l1 / lambda_t) * drive.clone();
    let density_side = tie_by(q.value(), drive.value());
    let rho = density_side.pick(&m.rho[0], &n.rho[0]).clone();
    GravityFlux {
        mass: rho * q.clone(),
        volumetric: q,
        omega,
        density_side,
    }
}

/// Side of `v`; a vanishing `v` (the mobility factor is zero, so the choice
/// does not affect the flux) follows the sign of its buoyancy factor.
fn tie_by(v: f64, buoyancy: f64) -> Side {
    if v == 0.0 {
        Side::of(buoyancy)
    } else {
        Side::of(v)
    }
}

fn floor<T: Scalar>(x: T) -> T {
    if x.value() < LAMBDA_FLOOR {
        T::from_f64(LAMBDA_FLOOR)
    } else {
        x
    }
}

pub fn face_flux<T: Scalar>(
    blend: &BlendParams,
    geom: &FaceGeometry,
    m: &CellState<T>,
    n: &CellState<T>,
) -> FaceFlux<T> {
    let rho_face = face_densities(m, n);
    let total = total_flux(blend, geom, m, n, &rho_face);
    let (v0, viscous_side) = viscous_flux(m, n, &total.volumetric);
    let g0 = gravity_flux(geom, m, n, &rho_face);
    let mut upwind = UpwindBits::default();
    upwind.push(0, viscous_side);
    upwind.push(1, g0.omega[0]);
    upwind.push(2, g0.omega[1]);
    upwind.push(3, g0.density_side);
    FaceFlux {
        total: total.mass,
        phase0: v0 + g0.mass,
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
    fn weighted_density_examples() {
        assert_eq!(saturation_weighted_density(&0.3, &1.0, &0.3, &2.0), 1.5);
        assert_eq!(saturation_weighted_density(&0.4, &1.7, &0.0, &2.0), 1.7);
        assert_eq!(saturation_weighted_density(&0.25, &1.0, &0.75, &0.5), 0.625);
        assert_eq!(saturation_weighted_density(&0.0, &1.0, &0.0, &0.5), 0.75);
    }

    #[test]
    fn blend_weight_examples() {
        assert_eq!(blend_weight(&0.0, &2.0), 0.5);
        assert!((blend_weight(&1.0f64, &2.0) - 0.852_416_382_349_566_7).abs() < 1e-12);
        assert!(blend_weight(&1e12, &2.0) > 1.0 - 1e-9);
    }

    #[test]
    fn blend_coefficient_examples() {
        let p = BlendParams::default();
        assert_eq!(blend_coefficient(&1.0, &p), 2.0);
        assert_eq!(blend_coefficient(&0.5, &p), 4.0);
        assert_eq!(blend_coefficient(&1e-9, &p), 1e6);
    }

    #[test]
    fn viscous_flux_examples() {
        let f = fluid();
        let m = CellState::<f64>::new(&f, 0.0, 0.5);
        let n = CellState::<f64>::new(&f, 0.0, 0.0);
        assert_eq!(viscous_flux(&m, &n, &0.0).0, 0.0);
        assert_eq!(viscous_flux(&m, &n, &2.0).0, 1.0);
        assert_eq!(viscous_flux(&m, &n, &-2.0).0, 0.0);
    }

    #[test]
    fn gravity_flux_hand_evaluation() {
        let f = fluid();
        let m = CellState::<f64>::new(&f, 0.0, 0.5);
        let n = CellState::<f64>::new(&f, 0.0, 0.5);
        let rho = face_densities(&m, &n);
        let g = gravity_flux(&geom(1.0, 1.0), &m, &n, &rho);
        assert!((g.volumetric - 0.0625).abs() < 1e-15);
        assert!((g.mass - 0.0625).abs() < 1e-15);
    }

    #[test]
    fn gravity_flux_vanishes_without_buoyancy() {
        let f = fluid();
        let m = CellState::<f64>::new(&f, 0.3, 0.2);
        let n = CellState::<f64>::new(&f, 0.1, 0.9);
        let rho = face_densities(&m, &n);
        assert_eq!(gravity_flux(&geom(0.0, 1.0), &m, &n, &rho).mass, 0.0);
        let same = FluidPair::new(Phase::new(1.0, 1.0), Phase::new(1.0, 1.0));
        let m = CellState::<f64>::new(&same, 0.3, 0.2);
        let n = CellState::<f64>::new(&same, 0.1, 0.9);
        let rho = face_densities(&m, &n);
        assert_eq!(gravity_flux(&geom(1.0, 1.0), &m, &n, &rho).mass, 0.0);
    }

    #[test]
    fn sharp_interface_segregates() {
        // Heavy phase alone in the upper cell m, light alone in the lower cell n.
        let f = fluid();
        let m = CellState::<f64>::new(&f, 0.0, 1.0);
        let n = CellState::<f64>::new(&f, 0.75, 0.0);
        let rho = face_densities(&m, &n);
        let g = gravity_flux(&geom(1.0, 1.0), &m, &n, &rho);
        assert_eq!(g.omega, [Side::Left, Side::Right]);
        assert!(g.mass > 0.0);
    }

    #[test]
    fn single_phase_total_flux_is_darcy() {
        let f = fluid();
        let m = CellState::<f64>::new(&f, 1.5, 1.0);
        let n = CellState::<f64>::new(&f, 0.2, 1.0);
        let q = face_flux(&BlendParams::default(), &geom(0.3, 1.0), &m, &n);
        assert!((q.total - 1.6).abs() < 1e-15);
        assert!((q.phase0 - 1.6).abs() < 1e-15);
    }
}
