//! Forward-mode automatic differentiation with sparse partials.
//!
//! An [`Ad`] carries a value together with its partial derivatives with
//! respect to the global unknown vector. Partials are kept sorted by unknown
//! index so binary operations are linear merges, and the sparsity of the
//! result is exactly the union of the operands' stencils.

use std::ops::{Add, Div, Mul, Neg, Sub};

use num_traits::{One, Zero};
use smallvec::SmallVec;

use crate::scalar::Scalar;

type Partials = SmallVec<[(u32, f64); 8]>;

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Ad {
    value: f64,
    partials: Partials,
}

impl Ad {
    pub fn constant(value: f64) -> Self {
        Ad {
            value,
            partials: Partials::new(),
        }
    }

    pub fn var(value: f64, index: usize) -> Self {
        let mut partials = Partials::new();
        partials.push((index as u32, 1.0));
        Ad { value, partials }
    }

    pub fn val(&self) -> f64 {
        self.value
    }

    /// `(unknown index, derivative)` pairs in increasing index order.
    pub fn partials(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.partials.iter().map(|&(i, d)| (i as usize, d))
    }

    pub fn derivative(&self, index: usize) -> f64 {
        let key = index as u32;
        self.partials
            .binary_search_by_key(&key, |&(i, _)| i)
            .map(|pos| self.partials[pos].1)
            .unwrap_or(0.0)
    }

    pub fn stencil_len(&self) -> usize {
        self.partials.len()
    }

    /// `a * x + b * y` on the partials.
    fn combine(a: f64, x: &Partials, b: f64, y: &Partials) -> Partials {
        let mut out = Partials::with_capacity(x.len() + y.len());
        let (mut i, mut j) = (0, 0);
        while i < x.len() && j < y.len() {
            let (xi, xd) = x[i];
            let (yj, yd) = y[j];
            if xi == yj {
                out.push((xi, a * xd + b * yd));
                i += 1;
                j += 1;
            } else if xi < yj {
                out.push((xi, a * xd));
                i += 1;
            } else {
                out.push((yj, b * yd));
                j += 1;
            }
        }
        out.extend(x[i..].iter().map(|&(k, d)| (k, a * d)));
        out.extend(y[j..].iter().map(|&(k, d)| (k, b * d)));
        out
    }

    /// Applies the chain rule for a unary function with value `f` and
    /// derivative `df` at `self.value`.
    fn chain(&self, f: f64, df: f64) -> Self {
        Ad {
            value: f,
            partials: self.partials.iter().map(|&(i, d)| (i, df * d)).collect(),
        }
    }
}

impl From<f64> for Ad {
    fn from(value: f64) -> Self {
        Ad::constant(value)
    }
}

impl Add for Ad {
    type Output = Ad;
    fn add(self, rhs: Ad) -> Ad {
        if rhs.partials.is_empty() {
            return Ad {
                value: self.value + rhs.value,
                partials: self.partials,
            };
        }
        if self.partials.is_empty() {
            return Ad {
                value: self.value + rhs.value,
                partials: rhs.partials,
            };
        }
        Ad {
            value: self.value + rhs.value,
            partials: Ad::combine(1.0, &self.partials, 1.0, &rhs.partials),
        }
    }
}

impl Sub for Ad {
    type Output = Ad;
    fn sub(self, rhs: Ad) -> Ad {
        if rhs.partials.is_empty() {
            return Ad {
                value: self.value - rhs.value,
                partials: self.partials,
            };
        }
        Ad {
            value: self.value - rhs.value,
            partials: Ad::combine(1.0, &self.partials, -1.0, &rhs.partials),
        }
    }
}

impl Mul for Ad {
    type Output = Ad;
    fn mul(self, rhs: Ad) -> Ad {
        let value = self.value * rhs.value;
        if rhs.partials.is_empty() {
            return self.chain(value, rhs.value);
        }
        if self.partials.is_empty() {
            return rhs.chain(value, self.value);
        }
        Ad {
            value,
            partials: Ad::combine(rhs.value, &self.partials, self.value, &rhs.partials),
        }
    }
}

impl Div for Ad {
    type Output = Ad;
    fn div(self, rhs: Ad) -> Ad {
        let inv = 1.0 / rhs.value;
        let value = self.value * inv;
        if rhs.partials.is_empty() {
            return self.chain(value, inv);
        }
        // d(x/y) = dx/y - x dy/y^2
        Ad {
            value,
            partials: Ad::combine(inv, &self.partials, -value * inv, &rhs.partials),
        }
    }
}

impl Neg for Ad {
    type Output = Ad;
    fn neg(self) -> Ad {
        self.chain(-self.value, -1.0)
    }
}

impl Zero for Ad {
    fn zero() -> Self {
        Ad::constant(0.0)
    }
    fn is_zero(&self) -> bool {
        self.value == 0.0 && self.partials.is_empty()
    }
}

impl One for Ad {
    fn one() -> Self {
        Ad::constant(1.0)
    }
}

impl Scalar for Ad {
    fn from_f64(x: f64) -> Self {
        Ad::constant(x)
    }

    fn variable(x: f64, index: usize) -> Self {
        Ad::var(x, index)
    }

    fn value(&self) -> f64 {
        self.value
    }

    fn exp(&self) -> Self {
        let e = self.value.exp();
        self.chain(e, e)
    }

    fn atan(&self) -> Self {
        let x = self.value;
        self.chain(x.atan(), 1.0 / (1.0 + x * x))
    }

    fn scale(&self, factor: f64) -> Self {
        self.chain(self.value * factor, factor)
    }

    fn is_finite(&self) -> bool {
        self.value.is_finite() && self.partials.iter().all(|(_, d)| d.is_finite())
    }
}
