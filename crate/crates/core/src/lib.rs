//! Mixed-dimensional, two-phase, immiscible flow in fractured porous media.
//!
//! Subdomains of decreasing dimension (matrix, fractures, intersections) are
//! coupled through mortar interfaces. Face fluxes are discretised with either
//! phase-potential upwinding or hybrid upwinding and the fully implicit
//! system is solved with Newton's method on an AD Jacobian.

pub mod ad;
pub mod assembly;
pub mod case;
pub mod convergence;
pub mod driver;
pub mod error;
pub mod fluid;
pub mod flux;
pub mod grid;
pub mod mesh;
pub mod mortar;
pub mod newton;
pub mod report;
pub mod scalar;
pub mod simulate;
pub mod state;
pub mod topology;
pub mod vtk;

pub use ad::Ad;
pub use error::{Error, Result};
pub use scalar::Scalar;

/// Floating-point type used for fields and geometry.
pub type Real = f64;
/// Scalar carrying exact derivatives with respect to the unknowns.
pub type Dual = Ad;
