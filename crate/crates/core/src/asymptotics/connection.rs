use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::hermite_pade::TypeIIFamily;
use crate::measures::NikishinSystem;
use crate::precision::{Cplx, Real};

/// Relative residuals of the exact identities linking forward and reversed
/// Nikishin chains and the two families of remainders at one point.
#[derive(Clone, Debug, Serialize)]
pub struct ConnectionResiduals {
    pub j: usize,
    pub point: String,
    /// `s_hat_{1,j} - s_hat_{1,j-1} s_hat_{j,j} + ... + (-1)^j s_hat_{j,1}`.
    pub miracle: f64,
    /// `Psi_j` against its expansion in `Phi_1, ..., Phi_j`.
    pub con1: f64,
    /// `Phi_j` against its expansion in `Psi_1, ..., Psi_j`.
    pub con2: f64,
    /// `D D^{-1} Psi - Psi` over all rows.
    pub inversion: f64,
}

impl ConnectionResiduals {
    pub fn max(&self) -> f64 {
        self.miracle.max(self.con1).max(self.con2).max(self.inversion)
    }
}

fn sign(k: usize) -> i32 {
    if k % 2 == 0 {
        1
    } else {
        -1
    }
}

fn signed(v: Cplx, s: i32) -> Cplx {
    if s < 0 {
        -&v
    } else {
        v
    }
}

/// `|sum terms| / sum |terms|`.
fn relative(terms: &[Cplx]) -> f64 {
    let p = terms[0].prec();
    let mut s = Cplx::zero(p);
    let mut a = Real::new(p);
    for t in terms {
        s = &s + t;
        a += t.abs();
    }
    if a.is_zero() {
        return 0.0;
    }
    (s.abs() / a).to_f64()
}

/// The lower triangular `D` with `(Psi_1..Psi_m)^t = D (Phi_1..Phi_m)^t`,
/// entries `(-1)^{i+1} s_hat_{j,i+1}` below the diagonal and
/// `(-1)^{j+1}` on it (1-based, row `j`, column `i`).
pub fn d_matrix(system: &NikishinSystem, z: &Cplx) -> Result<Vec<Vec<Cplx>>> {
    let m = system.m();
    let p = system.prec();
    let mut d = vec![vec![Cplx::zero(p); m]; m];
    for j in 1..=m {
        for i in 1..j {
            d[j - 1][i - 1] = signed(system.s_hat(j, i + 1, z)?, sign(i + 1));
        }
        d[j - 1][j - 1] = signed(Cplx::one(p), sign(j + 1));
    }
    Ok(d)
}

/// The inverse of [`d_matrix`], entries `(-1)^{i+1} s_hat_{i+1,j}` below
/// the diagonal.
pub fn d_inverse_matrix(system: &NikishinSystem, z: &Cplx) -> Result<Vec<Vec<Cplx>>> {
    let m = system.m();
    let p = system.prec();
    let mut d = vec![vec![Cplx::zero(p); m]; m];
    for j in 1..=m {
        for i in 1..j {
            d[j - 1][i - 1] = signed(system.s_hat(i + 1, j, z)?, sign(i + 1));
        }
        d[j - 1][j - 1] = signed(Cplx::one(p), sign(j + 1));
    }
    Ok(d)
}

fn apply(d: &[Vec<Cplx>], v: &[Cplx]) -> Vec<Cplx> {
    d.iter()
        .map(|row| {
            let mut s = Cplx::zero(v[0].prec());
            for (a, b) in row.iter().zip(v) {
                s = &s + &(a * b);
            }
            s
        })
        .collect()
}

/// Evaluates the chain identity, both connection formulas for `Psi_{n,j}`
/// and `Phi_{n,j}`, and the inversion `D D^{-1}` at `z`, for `2 <= j <= m`.
pub fn connection_check(family: &TypeIIFamily, j: usize, z: &Cplx) -> Result<ConnectionResiduals> {
    let system = family.system().as_nikishin()?.clone();
    let m = system.m();
    if j < 2 || j > m {
        return invalid(format!("connection index {j} outside 2..={m}"));
    }
    for k in 1..=m {
        let iv = system.interval(k);
        if iv.distance(z) == 0.0 {
            return Err(Error::OnSupport(format!("{z} lies on {iv}")));
        }
    }
    let p = system.prec();

    let mut terms = Vec::with_capacity(j + 1);
    for i in 0..j {
        let tail = if i == 0 {
            Cplx::one(p)
        } else {
            system.s_hat(j, j - i + 1, z)?
        };
        terms.push(signed(&system.s_hat(1, j - i, z)? * &tail, sign(i)));
    }
    terms.push(signed(system.s_hat(j, 1, z)?, sign(j)));
    let miracle = relative(&terms);

    let phi: Vec<Cplx> = (1..=m)
        .map(|k| family.remainder_phi(k, z))
        .collect::<Result<_>>()?;
    let psi: Vec<Cplx> = (1..=m).map(|k| family.psi(k, z)).collect::<Result<_>>()?;

    let mut terms = vec![-&psi[j - 1]];
    for k in 2..=j {
        terms.push(signed(&system.s_hat(j, k, z)? * &phi[k - 2], sign(k)));
    }
    terms.push(signed(phi[j - 1].clone(), sign(j + 1)));
    let con1 = relative(&terms);

    let mut terms = vec![-&phi[j - 1]];
    for k in 2..=j {
        terms.push(signed(&system.s_hat(k, j, z)? * &psi[k - 2], sign(k)));
    }
    terms.push(signed(psi[j - 1].clone(), sign(j + 1)));
    let con2 = relative(&terms);

    let d = d_matrix(&system, z)?;
    let di = d_inverse_matrix(&system, z)?;
    let back = apply(&d, &apply(&di, &psi));
    let scale = psi.iter().fold(Real::new(p), |a, v| a.max(&v.abs()));
    let mut worst = Real::new(p);
    for (a, b) in back.iter().zip(&psi) {
        worst = worst.max(&(a - b).abs());
    }
    let inversion = if scale.is_zero() {
        0.0
    } else {
        (worst / scale).to_f64()
    };

    Ok(ConnectionResiduals {
        j,
        point: super::point_label(z),
        miracle,
        con1,
        con2,
        inversion,
    })
}
