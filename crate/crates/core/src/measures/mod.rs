//! Generating measures, Gauss rules, Cauchy transforms and the Nikishin /
//! Angelesco systems built from them.

mod density;
mod measure;
pub mod quadrature;
mod system;
pub mod system_file;

use std::fmt;

use rug::Float;

use crate::error::{invalid, Result};
use crate::precision::{parse_real, Cplx, Real};

pub use density::{DensityClass, Table};
pub use measure::{Measure, Sign};
pub use quadrature::{GaussRule, Recurrence};
pub use system::{product_measure, AngelescoSystem, NikishinSystem};

/// A closed real interval `[a, b]` with `a < b`.
#[derive(Clone, Debug, PartialEq)]
pub struct Interval {
    a: Real,
    b: Real,
}

impl Interval {
    pub fn new(a: Real, b: Real) -> Result<Self> {
        if !(a < b) {
            return invalid(format!("interval needs a < b, got [{}, {}]", a.to_f64(), b.to_f64()));
        }
        Ok(Interval { a, b })
    }

    pub fn from_f64(prec: u32, a: f64, b: f64) -> Result<Self> {
        Interval::new(Float::with_val(prec, a), Float::with_val(prec, b))
    }

    pub fn parse(prec: u32, a: &str, b: &str) -> Result<Self> {
        Interval::new(parse_real(prec, a)?, parse_real(prec, b)?)
    }

    pub fn a(&self) -> &Real {
        &self.a
    }

    pub fn b(&self) -> &Real {
        &self.b
    }

    pub fn prec(&self) -> u32 {
        self.a.prec()
    }

    pub fn bounds_f64(&self) -> (f64, f64) {
        (self.a.to_f64(), self.b.to_f64())
    }

    pub fn center(&self) -> Real {
        Float::with_val(self.prec(), &self.a + &self.b) / 2u32
    }

    pub fn half_length(&self) -> Real {
        Float::with_val(self.prec(), &self.b - &self.a) / 2u32
    }

    pub fn length_f64(&self) -> f64 {
        Float::with_val(self.prec(), &self.b - &self.a).to_f64()
    }

    pub fn contains(&self, x: &Real) -> bool {
        *x >= self.a && *x <= self.b
    }

    pub fn contains_f64(&self, x: f64) -> bool {
        let (a, b) = self.bounds_f64();
        x >= a && x <= b
    }

    pub fn disjoint(&self, other: &Interval) -> bool {
        self.b < other.a || other.b < self.a
    }

    pub fn hull(&self, other: &Interval) -> Interval {
        let a = if self.a < other.a { &self.a } else { &other.a };
        let b = if self.b > other.b { &self.b } else { &other.b };
        Interval {
            a: a.clone(),
            b: b.clone(),
        }
    }

    /// Map `u in [-1, 1]` to the interval.
    pub fn from_unit(&self, u: &Real) -> Real {
        Float::with_val(self.prec(), u * &self.half_length()) + self.center()
    }

    /// Map a point of the interval to `[-1, 1]`.
    pub fn to_unit(&self, x: &Real) -> Real {
        Float::with_val(self.prec(), x - &self.center()) / self.half_length()
    }

    /// Euclidean distance from `z` to the interval, in `f64`.
    pub fn distance(&self, z: &Cplx) -> f64 {
        let (a, b) = self.bounds_f64();
        let (x, y) = z.to_f64();
        let dx = if x < a {
            a - x
        } else if x > b {
            x - b
        } else {
            0.0
        };
        dx.hypot(y)
    }

    /// Bernstein-ellipse parameter `|u + sqrt(u^2 - 1)|` of `z`, `u` the unit image.
    pub fn ellipse_rho(&self, z: &Cplx) -> f64 {
        let (a, b) = self.bounds_f64();
        let (x, y) = z.to_f64();
        let u = num_complex::Complex64::new((2.0 * x - a - b) / (b - a), 2.0 * y / (b - a));
        let s = (u * u - 1.0).sqrt();
        (u + s).norm().max((u - s).norm())
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (a, b) = self.bounds_f64();
        write!(f, "[{a}, {b}]")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interval_geometry() {
        let i = Interval::from_f64(64, -1.0, 1.0).unwrap();
        let j = Interval::from_f64(64, 2.0, 3.0).unwrap();
        assert!(i.disjoint(&j));
        assert_eq!(i.hull(&j).bounds_f64(), (-1.0, 3.0));
        assert!(Interval::from_f64(64, 1.0, 1.0).is_err());
        let z = Cplx::from_f64(64, 2.0, 0.0);
        assert!((i.ellipse_rho(&z) - (2.0 + 3f64.sqrt())).abs() < 1e-12);
        assert_eq!(i.distance(&Cplx::from_f64(64, 0.0, 0.5)), 0.5);
    }
}
