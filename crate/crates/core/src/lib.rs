//! Multiple orthogonal polynomials for Nikishin and Angelesco systems.
//!
//! Everything touching polynomial coefficients, quadrature and Cauchy
//! transforms runs at a configurable MPFR precision; equilibrium problems
//! are solved in `f64`.

pub mod asymptotics;
pub mod error;
pub mod hermite_pade;
pub mod linalg;
pub mod measures;
pub mod poly;
pub mod potential;
pub mod precision;
pub mod zeros;

pub use error::{Error, Result};
pub use hermite_pade::{MultiIndex, TypeIFamily, TypeIIFamily};
pub use measures::{AngelescoSystem, DensityClass, Interval, Measure, NikishinSystem};
pub use num_complex::Complex64;
pub use poly::Polynomial;
pub use precision::{Cplx, Real, DEFAULT_PRECISION};
