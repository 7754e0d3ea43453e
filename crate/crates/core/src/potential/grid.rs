use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{invalid, Result};
use crate::zeros::Distribution;

/// Three-point Gauss-Legendre rule on `[-1, 1]`.
const GL3_X: [f64; 3] = [-0.774_596_669_241_483_4, 0.0, 0.774_596_669_241_483_4];
const GL3_W: [f64; 3] = [5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0];

/// A measure with piecewise-constant density on Chebyshev-spaced cells.
/// `weights[i]` is the mass carried by `[edges[i], edges[i+1]]`.
#[derive(Clone, Debug, Serialize)]
pub struct GridMeasure {
    a: f64,
    b: f64,
    edges: Vec<f64>,
    weights: Vec<f64>,
}

/// Edges `c - h cos(pi i / g)`, `i = 0..g`.
pub fn chebyshev_edges(a: f64, b: f64, g: usize) -> Vec<f64> {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut e: Vec<f64> = (0..=g)
        .map(|i| c - h * (PI * i as f64 / g as f64).cos())
        .collect();
    e[0] = a;
    e[g] = b;
    e
}

impl GridMeasure {
    pub fn new(a: f64, b: f64, edges: Vec<f64>, weights: Vec<f64>) -> Result<GridMeasure> {
        if !(a < b) {
            return invalid(format!("grid support [{a}, {b}] is empty"));
        }
        if edges.len() != weights.len() + 1 || weights.is_empty() {
            return invalid("grid needs one more edge than weights");
        }
        if edges.windows(2).any(|w| !(w[0] < w[1])) {
            return invalid("grid edges must increase");
        }
        if weights.iter().any(|w| !(*w >= 0.0)) {
            return invalid("grid weights must be non-negative");
        }
        Ok(GridMeasure {
            a,
            b,
            edges,
            weights,
        })
    }

    /// Arcsine distribution of `[a, b]` with total mass `mass`.
    pub fn arcsine(a: f64, b: f64, g: usize, mass: f64) -> GridMeasure {
        // each Chebyshev cell carries exactly 1/g of the arcsine mass
        let edges = chebyshev_edges(a, b, g);
        let weights = vec![mass / g as f64; g];
        GridMeasure {
            a,
            b,
            edges,
            weights,
        }
    }

    pub fn support(&self) -> (f64, f64) {
        (self.a, self.b)
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn edges(&self) -> &[f64] {
        &self.edges
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Cell midpoints.
    pub fn nodes(&self) -> Vec<f64> {
        self.edges.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect()
    }

    pub fn mass(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// Density value on cell `i`.
    pub fn density(&self, i: usize) -> f64 {
        self.weights[i] / (self.edges[i + 1] - self.edges[i])
    }

    /// `V(z) = int log(1/|z - t|) dmu(t)`, exact per cell.
    pub fn log_potential(&self, z: Complex64) -> f64 {
        self.edges
            .windows(2)
            .zip(&self.weights)
            .filter(|(_, w)| **w != 0.0)
            .map(|(e, w)| w * cell_potential(e[0], e[1], z))
            .sum()
    }
}

/// Mean of `log(1/|z - t|)` over `t` in `[t0, t1]`.
pub fn cell_potential(t0: f64, t1: f64, z: Complex64) -> f64 {
    let width = t1 - t0;
    let dist = if z.re < t0 {
        Complex64::new(t0 - z.re, z.im).norm()
    } else if z.re > t1 {
        Complex64::new(z.re - t1, z.im).norm()
    } else {
        z.im.abs()
    };
    if dist > 20.0 * width {
        let c = 0.5 * (t0 + t1);
        let h = 0.5 * width;
        return -GL3_X
            .iter()
            .zip(GL3_W)
            .map(|(x, w)| 0.5 * w * (z - (c + h * x)).norm().ln())
            .sum::<f64>();
    }
    let y = z.im.abs();
    let f = |u: f64| -> f64 {
        if y == 0.0 {
            if u == 0.0 {
                0.0
            } else {
                u * u.abs().ln() - u
            }
        } else {
            0.5 * u * (u * u + y * y).ln() - u + y * (u / y).atan()
        }
    };
    -(f(t1 - z.re) - f(t0 - z.re)) / width
}

/// Mean of `log(1/|s - t|)` over `s` in cell `a` and `t` in cell `b`.
pub fn cell_pair(a0: f64, a1: f64, b0: f64, b1: f64) -> f64 {
    let wa = a1 - a0;
    let wb = b1 - b0;
    let gap = if a1 <= b0 {
        b0 - a1
    } else if b1 <= a0 {
        a0 - b1
    } else {
        0.0
    };
    if gap > 10.0 * wa.max(wb) {
        let (ca, ha) = (0.5 * (a0 + a1), 0.5 * wa);
        let (cb, hb) = (0.5 * (b0 + b1), 0.5 * wb);
        let mut s = 0.0;
        for (x, u) in GL3_X.iter().zip(GL3_W) {
            for (y, v) in GL3_X.iter().zip(GL3_W) {
                s += u * v * ((ca + ha * x) - (cb + hb * y)).abs().ln();
            }
        }
        return -0.25 * s;
    }
    let h = |u: f64| -> f64 {
        if u == 0.0 {
            0.0
        } else {
            0.5 * u * u * u.abs().ln() - 0.75 * u * u
        }
    };
    let v = h(a1 - b0) - h(a0 - b0) - h(a1 - b1) + h(a0 - b1);
    -v / (wa * wb)
}

/// Closed-form potential of the unit arcsine measure of `[a, b]`.
pub fn arcsine_potential(a: f64, b: f64, z: Complex64) -> f64 {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let w = (z - c) / h;
    let r = w + (w - 1.0).sqrt() * (w + 1.0).sqrt();
    -(r.norm() * h / 2.0).ln()
}

/// Arcsine distribution function of `[a, b]`.
#[derive(Clone, Copy, Debug)]
pub struct Arcsine {
    pub a: f64,
    pub b: f64,
}

impl Distribution for Arcsine {
    fn cdf(&self, x: f64) -> f64 {
        let c = 0.5 * (self.a + self.b);
        let h = 0.5 * (self.b - self.a);
        0.5 + ((x - c) / h).clamp(-1.0, 1.0).asin() / PI
    }

    fn cdf_left(&self, x: f64) -> f64 {
        self.cdf(x)
    }

    fn breakpoints(&self) -> Vec<f64> {
        chebyshev_edges(self.a, self.b, 4096)
    }
}

impl Distribution for GridMeasure {
    fn cdf(&self, x: f64) -> f64 {
        let total = self.mass();
        if x < self.a {
            return 0.0;
        }
        if x >= self.b {
            return 1.0;
        }
        let i = self.edges.partition_point(|e| *e <= x) - 1;
        let before: f64 = self.weights[..i].iter().sum();
        let frac = (x - self.edges[i]) / (self.edges[i + 1] - self.edges[i]);
        (before + frac * self.weights[i]) / total
    }

    fn cdf_left(&self, x: f64) -> f64 {
        self.cdf(x)
    }

    fn breakpoints(&self) -> Vec<f64> {
        self.edges.clone()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::zeros::kolmogorov_distance;
    use approx::assert_relative_eq;

    #[test]
    fn arcsine_potential_is_log_two_on_the_interval() {
        let mu = GridMeasure::arcsine(-1.0, 1.0, 2000, 1.0);
        let v = mu.log_potential(Complex64::new(0.0, 0.0));
        assert!((v - 2f64.ln()).abs() < 1e-4, "{v}");
        assert_relative_eq!(arcsine_potential(-1.0, 1.0, Complex64::new(0.3, 0.0)), 2f64.ln(), epsilon = 1e-12);
        let z = Complex64::new(3.0, 0.0);
        let exact = -((3.0 + 8f64.sqrt()) / 2.0).ln();
        assert_relative_eq!(arcsine_potential(-1.0, 1.0, z), exact, epsilon = 1e-12);
        assert!((mu.log_potential(z) - exact).abs() < 1e-6);
    }

    #[test]
    fn far_field_and_symmetry() {
        let mu = GridMeasure::new(0.0, 1e-3, vec![0.0, 1e-3], vec![1.0]).unwrap();
        let v = mu.log_potential(Complex64::new(1e6, 0.0));
        assert!((v + 1e6f64.ln()).abs() < 1e-8);
        let nu = GridMeasure::arcsine(-1.0, 2.0, 300, 1.0);
        let z = Complex64::new(0.4, 0.7);
        assert_relative_eq!(nu.log_potential(z), nu.log_potential(z.conj()), epsilon = 1e-14);
    }

    #[test]
    fn cell_pair_agrees_with_nested_potential() {
        // adjacent unit cells, both evaluation branches
        let exact = cell_pair(0.0, 1.0, 1.0, 2.0);
        let n = 4000;
        let avg: f64 = (0..n)
            .map(|i| cell_potential(1.0, 2.0, Complex64::new((i as f64 + 0.5) / n as f64, 0.0)))
            .sum::<f64>()
            / n as f64;
        assert!((exact - avg).abs() < 1e-6, "{exact} {avg}");
        // self-interaction of [0, 1] is 3/2
        assert_relative_eq!(cell_pair(0.0, 1.0, 0.0, 1.0), 1.5, epsilon = 1e-14);
        let far = cell_pair(0.0, 0.01, 5.0, 5.01);
        assert!((far + (5.0f64).ln()).abs() < 1e-5);
    }

    #[test]
    fn coarse_and_fine_arcsine_grids() {
        let fine = GridMeasure::arcsine(-1.0, 1.0, 2000, 1.0);
        let coarse = GridMeasure::arcsine(-1.0, 1.0, 500, 1.0);
        assert!(kolmogorov_distance(&fine, &coarse) < 2e-3);
        let d = kolmogorov_distance(&fine, &Arcsine { a: -1.0, b: 1.0 });
        assert!(d < 2e-4, "{d}");
        assert_relative_eq!(fine.mass(), 1.0, epsilon = 1e-12);
    }
}
