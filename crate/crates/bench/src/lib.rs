//! Fixtures shared by the benchmarks.

use std::sync::Arc;

use nikhp_core::{DensityClass, Interval, Measure, NikishinSystem};

/// Chebyshev weight on [-1, 1] and Lebesgue measure on [2, 3].
pub fn reference_system(prec: u32, nq: usize) -> Arc<NikishinSystem> {
    let s1 = Measure::new(Interval::from_f64(prec, -1.0, 1.0).unwrap(), DensityClass::chebyshev(prec), nq).unwrap();
    let s2 = Measure::new(Interval::from_f64(prec, 2.0, 3.0).unwrap(), DensityClass::Legendre, nq).unwrap();
    NikishinSystem::new(vec![s1, s2]).unwrap()
}
