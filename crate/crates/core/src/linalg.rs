//! Dense linear algebra at working precision, plus two `f64` eigenvalue
//! helpers used to seed root and node polishing.

use nalgebra::{DMatrix, SymmetricEigen};
use rug::Float;

use crate::error::{Error, Result};
use crate::precision::Real;

#[derive(Clone, Debug)]
pub struct RealMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Real>,
}

impl RealMatrix {
    pub fn zeros(rows: usize, cols: usize, prec: u32) -> Self {
        RealMatrix {
            rows,
            cols,
            data: vec![Float::new(prec); rows * cols],
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Real {
        &self.data[i * self.cols + j]
    }

    pub fn get_mut(&mut self, i: usize, j: usize) -> &mut Real {
        &mut self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Real) {
        self.data[i * self.cols + j] = v;
    }

    fn prec(&self) -> u32 {
        self.data.first().map(|x| x.prec()).unwrap_or(64)
    }

    /// Scales every row to unit Euclidean norm; returns the applied factors.
    pub fn equilibrate_rows(&mut self) -> Vec<Real> {
        let p = self.prec();
        let mut factors = Vec::with_capacity(self.rows);
        for i in 0..self.rows {
            let mut n = Float::new(p);
            for j in 0..self.cols {
                n += crate::precision::sq(self.get(i, j));
            }
            let n = n.sqrt();
            let f = if n.is_zero() {
                Float::with_val(p, 1)
            } else {
                Float::with_val(p, 1) / n
            };
            for j in 0..self.cols {
                *self.get_mut(i, j) *= &f;
            }
            factors.push(f);
        }
        factors
    }

    /// Scales every column to unit Euclidean norm; returns the applied factors.
    pub fn equilibrate_cols(&mut self) -> Vec<Real> {
        let p = self.prec();
        let mut factors = Vec::with_capacity(self.cols);
        for j in 0..self.cols {
            let mut n = Float::new(p);
            for i in 0..self.rows {
                n += crate::precision::sq(self.get(i, j));
            }
            let n = n.sqrt();
            let f = if n.is_zero() {
                Float::with_val(p, 1)
            } else {
                Float::with_val(p, 1) / n
            };
            for i in 0..self.rows {
                *self.get_mut(i, j) *= &f;
            }
            factors.push(f);
        }
        factors
    }
}

/// Solves the square system `a x = b` by Householder QR.
pub fn solve_qr(a: &RealMatrix, b: &[Real]) -> Result<Vec<Real>> {
    let n = a.rows;
    if a.cols != n || b.len() != n {
        return Err(Error::Invalid(format!(
            "solve_qr expects a square system, got {}x{} with rhs {}",
            a.rows,
            a.cols,
            b.len()
        )));
    }
    if n == 0 {
        return Ok(Vec::new());
    }
    let p = a.prec();
    let mut r = a.clone();
    let mut y: Vec<Real> = b.to_vec();
    for k in 0..n {
        let mut norm = Float::new(p);
        for i in k..n {
            norm += crate::precision::sq(r.get(i, k));
        }
        let norm = norm.sqrt();
        if norm.is_zero() {
            return Err(Error::NonConvergence(format!("singular column {k} in QR")));
        }
        let alpha = if r.get(k, k).is_sign_negative() {
            norm
        } else {
            -norm
        };
        let mut v: Vec<Real> = (k..n).map(|i| r.get(i, k).clone()).collect();
        v[0] -= &alpha;
        let mut vnorm2 = Float::new(p);
        for x in &v {
            vnorm2 += crate::precision::sq(x);
        }
        if vnorm2.is_zero() {
            continue;
        }
        for j in k..n {
            let mut dot = Float::new(p);
            for (t, vi) in v.iter().enumerate() {
                dot += Float::with_val(p, vi * r.get(k + t, j));
            }
            let f = Float::with_val(p, &dot * 2u32) / &vnorm2;
            for (t, vi) in v.iter().enumerate() {
                *r.get_mut(k + t, j) -= Float::with_val(p, vi * &f);
            }
        }
        let mut dot = Float::new(p);
        for (t, vi) in v.iter().enumerate() {
            dot += Float::with_val(p, vi * &y[k + t]);
        }
        let f = Float::with_val(p, &dot * 2u32) / &vnorm2;
        for (t, vi) in v.iter().enumerate() {
            y[k + t] -= Float::with_val(p, vi * &f);
        }
    }
    let mut x = vec![Float::new(p); n];
    for i in (0..n).rev() {
        let mut s = y[i].clone();
        for j in i + 1..n {
            s -= Float::with_val(p, r.get(i, j) * &x[j]);
        }
        if r.get(i, i).is_zero() {
            return Err(Error::NonConvergence(format!("zero pivot {i} in QR")));
        }
        x[i] = s / r.get(i, i);
    }
    Ok(x)
}

/// Singular values (descending) by one-sided Jacobi rotations.
pub fn singular_values(a: &RealMatrix) -> Vec<Real> {
    let (m, n) = (a.rows, a.cols);
    let p = a.prec();
    // work on columns; transpose when wide so that columns are the short side
    let (rows, cols, mut w) = if m >= n {
        let cols: Vec<Vec<Real>> = (0..n)
            .map(|j| (0..m).map(|i| a.get(i, j).clone()).collect())
            .collect();
        (m, n, cols)
    } else {
        let cols: Vec<Vec<Real>> = (0..m)
            .map(|i| (0..n).map(|j| a.get(i, j).clone()).collect())
            .collect();
        (n, m, cols)
    };
    let eps = {
        let mut e = Float::with_val(p, 1);
        e >>= p as i32 - 8;
        e
    };
    for _sweep in 0..80 {
        let mut rotated = false;
        for i in 0..cols {
            for j in i + 1..cols {
                let mut alpha = Float::new(p);
                let mut beta = Float::new(p);
                let mut gamma = Float::new(p);
                for k in 0..rows {
                    alpha += crate::precision::sq(&w[i][k]);
                    beta += crate::precision::sq(&w[j][k]);
                    gamma += Float::with_val(p, &w[i][k] * &w[j][k]);
                }
                if gamma.is_zero() {
                    continue;
                }
                let scale = Float::with_val(p, &alpha * &beta).sqrt() * &eps;
                if Float::with_val(p, gamma.abs_ref()) <= scale {
                    continue;
                }
                rotated = true;
                let zeta = Float::with_val(p, &beta - &alpha) / Float::with_val(p, &gamma * 2u32);
                let root = Float::with_val(p, 1 + Float::with_val(p, zeta.square_ref())).sqrt();
                let mut t = Float::with_val(p, 1) / (Float::with_val(p, zeta.abs_ref()) + root);
                if zeta.is_sign_negative() {
                    t = -t;
                }
                let c = Float::with_val(p, 1)
                    / Float::with_val(p, 1 + Float::with_val(p, t.square_ref())).sqrt();
                let s = Float::with_val(p, &c * &t);
                for k in 0..rows {
                    let xi = w[i][k].clone();
                    let xj = w[j][k].clone();
                    w[i][k] = Float::with_val(p, &c * &xi) - Float::with_val(p, &s * &xj);
                    w[j][k] = Float::with_val(p, &s * &xi) + Float::with_val(p, &c * &xj);
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let mut sv: Vec<Real> = w
        .iter()
        .map(|col| {
            let mut n = Float::new(p);
            for x in col {
                n += crate::precision::sq(x);
            }
            n.sqrt()
        })
        .collect();
    sv.sort_by(|x, y| y.partial_cmp(x).unwrap());
    sv
}

/// `sigma_min / sigma_max`, zero for an empty or null matrix.
pub fn relative_margin(a: &RealMatrix) -> f64 {
    let sv = singular_values(a);
    match (sv.first(), sv.last()) {
        (Some(hi), Some(lo)) if !hi.is_zero() => Float::with_val(hi.prec(), lo / hi).to_f64(),
        _ => 0.0,
    }
}

/// Eigenvalues (ascending) of the symmetric tridiagonal matrix with the
/// given diagonal and off-diagonal.
pub fn tridiagonal_eigenvalues(diag: &[f64], off: &[f64]) -> Vec<f64> {
    let n = diag.len();
    let mut m = DMatrix::<f64>::zeros(n, n);
    for i in 0..n {
        m[(i, i)] = diag[i];
        if i + 1 < n {
            m[(i, i + 1)] = off[i];
            m[(i + 1, i)] = off[i];
        }
    }
    let mut ev: Vec<f64> = SymmetricEigen::new(m).eigenvalues.iter().copied().collect();
    ev.sort_by(|a, b| a.partial_cmp(b).unwrap());
    ev
}

/// Complex eigenvalues of the colleague matrix of `sum c_k T_k(u)`.
/// The leading coefficient must be nonzero.
pub fn colleague_eigenvalues(cheb: &[f64]) -> Vec<(f64, f64)> {
    let n = cheb.len() - 1;
    if n == 0 {
        return Vec::new();
    }
    if n == 1 {
        return vec![(-cheb[0] / cheb[1], 0.0)];
    }
    let mut m = DMatrix::<f64>::zeros(n, n);
    m[(0, 1)] = 1.0;
    for i in 1..n {
        m[(i, i - 1)] = 0.5;
        if i + 1 < n {
            m[(i, i + 1)] = 0.5;
        }
    }
    let lead = cheb[n];
    for j in 0..n {
        m[(n - 1, j)] -= cheb[j] / (2.0 * lead);
    }
    m.complex_eigenvalues()
        .iter()
        .map(|z| (z.re, z.im))
        .collect()
}
