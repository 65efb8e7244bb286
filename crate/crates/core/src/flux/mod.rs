//! Face fluxes between two neighbouring cells.
//!
//! Faces are oriented from the `m` (left) cell to the `n` (right) cell and a
//! positive flux leaves `m`. Both schemes return the total mass flux entering
//! the pressure equation and the phase-0 mass flux entering the saturation
//! equation, together with the discrete upwind decisions taken on the way.

pub mod hu;
pub mod ppu;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::fluid::FluidPair;
use crate::scalar::Scalar;

pub use hu::BlendParams;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Side {
    Left,
    Right,
}

impl Side {
    /// Ties go to the left cell.
    pub fn of(v: f64) -> Side {
        if v >= 0.0 {
            Side::Left
        } else {
            Side::Right
        }
    }

    pub fn pick<'a, T>(self, m: &'a T, n: &'a T) -> &'a T {
        match self {
            Side::Left => m,
            Side::Right => n,
        }
    }
}

/// `x_m` when `v >= 0`, else `x_n`.
pub fn upwind<T: Clone>(x_m: &T, x_n: &T, v: f64) -> T {
    Side::of(v).pick(x_m, x_n).clone()
}

fn clamp_unit<T: Scalar>(s: &T) -> T {
    match s.value() {
        v if v < 0.0 => T::zero(),
        v if v > 1.0 => T::one(),
        _ => s.clone(),
    }
}

/// Everything a face flux needs to know about one cell.
#[derive(Clone, Debug)]
pub struct CellState<T> {
    pub p: T,
    pub s0: T,
    pub rho: [T; 2],
    pub lambda: [T; 2],
}

impl<T: Scalar> CellState<T> {
    /// `s0` may lie marginally outside `[0, 1]`; mobilities and face
    /// densities see it clamped, the accumulation sees the raw value.
    pub fn new(fluid: &FluidPair, p: T, s0: T) -> Self {
        let rho = fluid.densities(&p);
        let lambda = fluid.mobilities(&clamp_unit(&s0));
        CellState { p, s0, rho, lambda }
    }

    /// Clamped saturation of `phase`.
    pub fn saturation(&self, phase: usize) -> T {
        let s = clamp_unit(&self.s0);
        if phase == 0 {
            s
        } else {
            T::one() - s
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FaceGeometry {
    pub transmissibility: f64,
    /// `z_m - z_n`.
    pub dz: f64,
    pub gravity: f64,
}

/// Upwind decisions of one face packed as bits (set bit = left side).
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct UpwindBits(pub u8);

impl UpwindBits {
    pub fn push(&mut self, slot: u8, side: Side) {
        if side == Side::Left {
            self.0 |= 1 << slot;
        } else {
            self.0 &= !(1 << slot);
        }
    }

    pub fn side(&self, slot: u8) -> Side {
        if self.0 & (1 << slot) != 0 {
            Side::Left
        } else {
            Side::Right
        }
    }

    /// Number of decisions that differ.
    pub fn flips(&self, other: UpwindBits) -> u32 {
        (self.0 ^ other.0).count_ones()
    }
}

#[derive(Clone, Debug)]
pub struct FaceFlux<T> {
    /// Total mass flux (pressure equation).
    pub total: T,
    /// Phase-0 mass flux (saturation equation).
    pub phase0: T,
    pub upwind: UpwindBits,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scheme {
    Ppu,
    #[default]
    Hu,
}

impl Scheme {
    pub fn face_flux<T: Scalar>(
        &self,
        blend: &BlendParams,
        geom: &FaceGeometry,
        m: &CellState<T>,
        n: &CellState<T>,
    ) -> FaceFlux<T> {
        match self {
            Scheme::Ppu => ppu::face_flux(geom, m, n),
            Scheme::Hu => hu::face_flux(blend, geom, m, n),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Scheme::Ppu => "ppu",
            Scheme::Hu => "hu",
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "ppu" => Ok(Scheme::Ppu),
            "hu" => Ok(Scheme::Hu),
            other => Err(Error::Parameter(format!("unknown scheme `{other}` (expected ppu or hu)"))),
        }
    }
}
