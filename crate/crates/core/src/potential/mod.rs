//! Logarithmic potentials and equilibrium problems on grids.

mod grid;
mod solver;

use num_complex::Complex64;
use serde::Serialize;

pub use grid::{arcsine_potential, cell_pair, cell_potential, chebyshev_edges, Arcsine, GridMeasure};
pub use solver::{
    solve_external_field_equilibrium, solve_vector_equilibrium, EquilibriumSolution,
    ExternalFieldSolution, InteractionMatrix, SolverStep, KKT_TOLERANCE, MIN_GRID,
};

use crate::error::{invalid, Result};

/// `U_j(z) = P_j V^{lambda_j} - P_{j+1} V^{lambda_{j+1}} - 2 sum_{k<=j} omega_k / P_k`,
/// 1-based, the last term of the difference dropped at `j = m`.
pub fn u_function(sol: &EquilibriumSolution, j: usize, z: Complex64) -> Result<f64> {
    let m = sol.m();
    if j == 0 || j > m {
        return invalid(format!("U index {j} outside 1..={m}"));
    }
    let Some(t) = sol.matrix.tails() else {
        return invalid("U needs a matrix built from proportions");
    };
    let mut u = t[j - 1] * sol.potential(j, z);
    if j < m {
        u -= t[j] * sol.potential(j + 1, z);
    }
    Ok(u - 2.0 * sol.omega_sum(j)?)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct XiValue {
    pub value: f64,
    /// The `k` attaining the maximum, so `z` lies in the region `D^j_k`.
    pub region: usize,
}

/// `xi_j(z) = max_{k<=j} U_k(z)`, ties resolved towards the smaller `k`.
pub fn xi_function(sol: &EquilibriumSolution, j: usize, z: Complex64) -> Result<XiValue> {
    if j == 0 || j > sol.m() {
        return invalid(format!("xi index {j} outside 1..={}", sol.m()));
    }
    let mut best = XiValue {
        value: f64::NEG_INFINITY,
        region: 0,
    };
    for k in 1..=j {
        let u = u_function(sol, k, z)?;
        if u > best.value {
            best = XiValue { value: u, region: k };
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn reference() -> EquilibriumSolution {
        let c = InteractionMatrix::nikishin(&[0.5, 0.5]).unwrap();
        solve_vector_equilibrium(&[(-1.0, 1.0), (2.0, 3.0)], &c, 300).unwrap()
    }

    #[test]
    fn u_on_one_interval() {
        let c = InteractionMatrix::nikishin(&[1.0]).unwrap();
        let sol = solve_vector_equilibrium(&[(-1.0, 1.0)], &c, 1000).unwrap();
        let u = u_function(&sol, 1, Complex64::new(0.2, 0.0)).unwrap();
        assert!((u + 2f64.ln()).abs() < 1e-3, "{u}");
        let xi = xi_function(&sol, 1, Complex64::new(0.2, 0.0)).unwrap();
        assert_eq!(xi, XiValue { value: u, region: 1 });
        assert!(u_function(&sol, 2, Complex64::new(0.0, 0.0)).is_err());
    }

    #[test]
    fn u_far_field_and_continuity() {
        let sol = reference();
        let p = [0.5, 0.5];
        for j in 1..=2 {
            let a = u_function(&sol, j, Complex64::new(1e4, 0.0)).unwrap() + p[j - 1] * 1e4f64.ln();
            let b = u_function(&sol, j, Complex64::new(0.0, 1e4)).unwrap() + p[j - 1] * 1e4f64.ln();
            let c = u_function(&sol, j, Complex64::new(-7e3, 7e3)).unwrap() + p[j - 1] * (7e3 * 2f64.sqrt()).ln();
            assert!((a - b).abs() < 1e-3 && (a - c).abs() < 1e-3, "{a} {b} {c}");
        }
        // vertical segment through Delta_2
        let vals: Vec<f64> = (-20..=20)
            .map(|i| u_function(&sol, 2, Complex64::new(2.5, i as f64 * 1e-4)).unwrap())
            .collect();
        assert!(vals.windows(2).all(|w| (w[0] - w[1]).abs() < 1e-3));
    }

    #[test]
    fn xi_is_monotone_and_rate_is_negative() {
        let sol = reference();
        for z in [
            Complex64::new(1.5, 0.0),
            Complex64::new(3.5, 0.0),
            Complex64::new(0.0, 1.0),
            Complex64::new(2.5, 0.5),
            Complex64::new(-4.0, -2.0),
        ] {
            let x1 = xi_function(&sol, 1, z).unwrap();
            let x2 = xi_function(&sol, 2, z).unwrap();
            assert!(x2.value >= x1.value);
            assert!(sol.potential(1, z) + x2.value < 0.0, "{z}");
        }
    }
}
