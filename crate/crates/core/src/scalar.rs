//! Scalar abstraction shared by the constitutive laws, face fluxes and the
//! residual assembly.
//!
//! Everything that depends on the unknowns is written once against
//! [`Scalar`] and instantiated with plain floats (`f64`, `f32`) for cheap
//! evaluation or with [`crate::ad::Ad`] when the Jacobian is needed.

use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_traits::{One, Zero};

pub trait Scalar:
    Clone
    + Debug
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    /// A constant (no dependence on the unknowns).
    fn from_f64(x: f64) -> Self;

    /// Unknown number `index` taking value `x`. Plain floats drop the index.
    fn variable(x: f64, index: usize) -> Self;

    fn value(&self) -> f64;

    fn exp(&self) -> Self;

    fn atan(&self) -> Self;

    fn scale(&self, factor: f64) -> Self {
        self.clone() * Self::from_f64(factor)
    }

    fn is_finite(&self) -> bool {
        self.value().is_finite()
    }
}

macro_rules! float_scalar {
    ($t:ty) => {
        impl Scalar for $t {
            #[inline]
            fn from_f64(x: f64) -> Self {
                x as $t
            }

            #[inline]
            fn variable(x: f64, _index: usize) -> Self {
                x as $t
            }

            #[inline]
            fn value(&self) -> f64 {
                *self as f64
            }

            #[inline]
            fn exp(&self) -> Self {
                <$t>::exp(*self)
            }

            #[inline]
            fn atan(&self) -> Self {
                <$t>::atan(*self)
            }

            #[inline]
            fn scale(&self, factor: f64) -> Self {
                *self * factor as $t
            }
        }
    };
}

float_scalar!(f64);
float_scalar!(f32);

/// Picks the scalar with the smaller value, keeping its derivatives.
pub fn min_by_value<T: Scalar>(a: T, b: T) -> T {
    if a.value() <= b.value() {
        a
    } else {
        b
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly<T: Scalar>(x: T) -> T {
        x.clone() * x.clone() + T::from_f64(3.0) * x - T::one()
    }

    #[test]
    fn same_code_runs_in_both_precisions() {
        assert_eq!(poly(2.0f64), 9.0);
        assert_eq!(poly(2.0f32), 9.0);
    }

    #[test]
    fn min_by_value_keeps_smaller() {
        assert_eq!(min_by_value(3.0, 2.0), 2.0);
        assert_eq!(min_by_value(-1.0f32, 2.0), -1.0);
    }
}
