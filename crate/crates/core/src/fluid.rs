//! Constitutive laws: slightly compressible phase density, power-law
//! relative permeability, phase potential and accumulation.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Phase {
    pub ref_density: f64,
    pub compressibility: f64,
    pub ref_pressure: f64,
    pub viscosity: f64,
}

impl Phase {
    pub fn new(ref_density: f64, viscosity: f64) -> Self {
        Phase {
            ref_density,
            compressibility: 0.0,
            ref_pressure: 0.0,
            viscosity,
        }
    }

    pub fn with_compressibility(mut self, c: f64, ref_pressure: f64) -> Self {
        self.compressibility = c;
        self.ref_pressure = ref_pressure;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.ref_density > 0.0) || !(self.viscosity > 0.0) || !(self.compressibility >= 0.0) {
            return Err(Error::Parameter(format!(
                "phase needs positive density/viscosity and non-negative compressibility: {self:?}"
            )));
        }
        Ok(())
    }

    /// `rho_ref * exp(c (p - p_ref))`.
    pub fn density<T: Scalar>(&self, p: &T) -> T {
        if self.compressibility == 0.0 {
            return T::from_f64(self.ref_density);
        }
        (p.clone() - T::from_f64(self.ref_pressure))
            .scale(self.compressibility)
            .exp()
            .scale(self.ref_density)
    }

    pub fn density_derivative(&self, p: f64) -> f64 {
        self.compressibility * self.density(&p)
    }
}

/// Relative permeability `k_r(S) = S^n` with integer `n >= 2`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RelPerm {
    pub exponent: u32,
}

impl Default for RelPerm {
    fn default() -> Self {
        RelPerm { exponent: 2 }
    }
}

impl RelPerm {
    pub fn quadratic() -> Self {
        RelPerm::default()
    }

    pub fn eval<T: Scalar>(&self, s: &T) -> T {
        (1..self.exponent).fold(s.clone(), |acc, _| acc * s.clone())
    }

    pub fn at_one(&self) -> f64 {
        1.0
    }

    /// `max_S |k_r''(S)|` over `[0, 1]`, attained at `S = 1`.
    pub fn max_curvature(&self) -> f64 {
        let n = self.exponent as f64;
        n * (n - 1.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FluidPair {
    /// Index 0 is the heavy phase.
    pub phases: [Phase; 2],
    pub relperm: RelPerm,
}

impl FluidPair {
    pub fn new(heavy: Phase, light: Phase) -> Self {
        FluidPair {
            phases: [heavy, light],
            relperm: RelPerm::quadratic(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.phases[0].validate()?;
        self.phases[1].validate()?;
        if self.relperm.exponent < 2 {
            return Err(Error::Parameter("relative permeability exponent must be >= 2".into()));
        }
        Ok(())
    }

    /// `k_r(S) / mu` for the phase whose own saturation is `s`.
    pub fn mobility<T: Scalar>(&self, phase: usize, s: &T) -> T {
        debug_assert!(
            (0.0..=1.0).contains(&s.value()),
            "saturation {} outside [0, 1]",
            s.value()
        );
        self.relperm
            .eval(s)
            .scale(1.0 / self.phases[phase].viscosity)
    }

    /// Both phase mobilities from the heavy-phase saturation.
    pub fn mobilities<T: Scalar>(&self, s0: &T) -> [T; 2] {
        let s1 = T::one() - s0.clone();
        [self.mobility(0, s0), self.mobility(1, &s1)]
    }

    pub fn densities<T: Scalar>(&self, p: &T) -> [T; 2] {
        [self.phases[0].density(p), self.phases[1].density(p)]
    }
}

/// Checked scalar mobility `S^2 / mu`.
pub fn mobility(s: f64, viscosity: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&s) {
        return Err(Error::Contract(format!("saturation {s} outside [0, 1]")));
    }
    Ok(RelPerm::quadratic().eval(&s) / viscosity)
}

/// `p + rho g z`.
pub fn phase_potential<T: Scalar>(p: &T, rho: &T, z: f64, gravity: f64) -> T {
    p.clone() + rho.scale(gravity * z)
}

/// Accumulation `(phi rho0 S0, phi rho1 (1 - S0))`.
pub fn accumulation<T: Scalar>(porosity: f64, rho0: &T, rho1: &T, s0: &T) -> (T, T) {
    let u0 = (rho0.clone() * s0.clone()).scale(porosity);
    let u1 = (rho1.clone() * (T::one() - s0.clone())).scale(porosity);
    (u0, u1)
}
