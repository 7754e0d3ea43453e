//! Three-term recurrences and Gauss rules at working precision.

use rug::Float;

use crate::error::{Error, Result};
use crate::linalg::tridiagonal_eigenvalues;
use crate::precision::Real;

use super::Interval;

/// Monic recurrence `p_{k+1} = (x - alpha_k) p_k - beta_k p_{k-1}`, with
/// `beta_0` the total mass.
#[derive(Clone, Debug)]
pub struct Recurrence {
    pub alpha: Vec<Real>,
    pub beta: Vec<Real>,
}

impl Recurrence {
    pub fn len(&self) -> usize {
        self.alpha.len()
    }

    pub fn is_empty(&self) -> bool {
        self.alpha.is_empty()
    }
}

#[derive(Clone, Debug)]
pub struct GaussRule {
    pub nodes: Vec<Real>,
    pub weights: Vec<Real>,
}

impl GaussRule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn mass(&self) -> Real {
        let p = self.weights.first().map(|w| w.prec()).unwrap_or(64);
        let mut s = Float::new(p);
        for w in &self.weights {
            s += w;
        }
        s
    }
}

/// Largest rule size supported at precision `prec`.
pub fn max_nodes(prec: u32) -> usize {
    (8 * prec as usize).min(2000)
}

/// Recurrence for `(1 - t)^alpha (1 + t)^beta` on `[-1, 1]`, mapped to
/// `interval` as `(b - x)^alpha (x - a)^beta` and multiplied by `scale`.
pub fn jacobi_recurrence(
    n: usize,
    alpha: &Real,
    beta: &Real,
    interval: &Interval,
    scale: &Real,
) -> Result<Recurrence> {
    let p = interval.prec();
    if *alpha <= -1 || *beta <= -1 {
        return Err(Error::Invalid(format!(
            "Jacobi exponents must exceed -1, got ({}, {})",
            alpha.to_f64(),
            beta.to_f64()
        )));
    }
    let ab = Float::with_val(p, alpha + beta);
    let c = interval.center();
    let h = interval.half_length();
    let h2 = Float::with_val(p, h.square_ref());
    let mut ra = Vec::with_capacity(n);
    let mut rb = Vec::with_capacity(n);
    for k in 0..n {
        let kk = Float::with_val(p, k);
        let two_k_ab = Float::with_val(p, &kk * 2u32) + &ab;
        let a_k = if k == 0 {
            Float::with_val(p, beta - alpha) / Float::with_val(p, &ab + 2u32)
        } else {
            let num = Float::with_val(p, beta.square_ref()) - Float::with_val(p, alpha.square_ref());
            let den = Float::with_val(p, &two_k_ab * Float::with_val(p, &two_k_ab + 2u32));
            if num.is_zero() {
                Float::new(p)
            } else {
                num / den
            }
        };
        ra.push(Float::with_val(p, &a_k * &h) + &c);
        let b_k = if k == 0 {
            let e = Float::with_val(p, &ab + 1u32);
            let mut two_pow = Float::with_val(p, 2u32);
            two_pow = crate::precision::powf(&two_pow, &e);
            let g1 = Float::with_val(p, alpha + 1u32).gamma();
            let g2 = Float::with_val(p, beta + 1u32).gamma();
            let g3 = Float::with_val(p, &ab + 2u32).gamma();
            let mu0 = two_pow * g1 * g2 / g3;
            let hp = crate::precision::powf(&h, &e);
            mu0 * hp * scale
        } else if k == 1 {
            let num = Float::with_val(p, alpha + 1u32) * Float::with_val(p, beta + 1u32) * 4u32;
            let s = Float::with_val(p, &ab + 2u32);
            let den = Float::with_val(p, s.square_ref()) * Float::with_val(p, &ab + 3u32);
            num / den * &h2
        } else {
            let num = Float::with_val(p, &kk * 4u32)
                * Float::with_val(p, &kk + alpha)
                * Float::with_val(p, &kk + beta)
                * Float::with_val(p, &kk + &ab);
            let den = Float::with_val(p, two_k_ab.square_ref())
                * Float::with_val(p, &two_k_ab + 1u32)
                * Float::with_val(p, &two_k_ab - 1u32);
            num / den * &h2
        };
        rb.push(b_k);
    }
    Ok(Recurrence {
        alpha: ra,
        beta: rb,
    })
}

/// Stieltjes procedure on a discrete measure; returns `n` coefficients.
pub fn stieltjes(nodes: &[Real], weights: &[Real], n: usize) -> Result<Recurrence> {
    if n > nodes.len() {
        return Err(Error::Quadrature(format!(
            "Stieltjes needs at least {n} support points, got {}",
            nodes.len()
        )));
    }
    let p = nodes[0].prec();
    let m = nodes.len();
    let mut prev = vec![Float::new(p); m];
    let mut cur = vec![Float::with_val(p, 1); m];
    let mut alpha = Vec::with_capacity(n);
    let mut beta = Vec::with_capacity(n);
    let mut norm_prev = Float::with_val(p, 1);
    for k in 0..n {
        let mut norm = Float::new(p);
        let mut xnorm = Float::new(p);
        for i in 0..m {
            let wp2 = Float::with_val(p, cur[i].square_ref()) * &weights[i];
            xnorm += Float::with_val(p, &wp2 * &nodes[i]);
            norm += wp2;
        }
        if norm.is_zero() {
            return Err(Error::Quadrature(format!("Stieltjes breakdown at degree {k}")));
        }
        let a = Float::with_val(p, &xnorm / &norm);
        let b = if k == 0 {
            norm.clone()
        } else {
            Float::with_val(p, &norm / &norm_prev)
        };
        let mut next = Vec::with_capacity(m);
        for i in 0..m {
            let v = Float::with_val(p, &nodes[i] - &a) * &cur[i] - Float::with_val(p, &b * &prev[i]);
            next.push(v);
        }
        // beta_0 multiplies p_{-1} = 0 above, so it is safe to use the mass
        alpha.push(a);
        beta.push(b);
        norm_prev = norm;
        prev = std::mem::replace(&mut cur, next);
    }
    Ok(Recurrence { alpha, beta })
}

/// `n`-point Gauss rule from the first `n` recurrence coefficients.
pub fn gauss_from_recurrence(rec: &Recurrence, n: usize) -> Result<GaussRule> {
    if n == 0 {
        return Err(Error::Quadrature("rule size must be positive".into()));
    }
    if rec.len() < n {
        return Err(Error::Quadrature(format!(
            "need {n} recurrence coefficients, have {}",
            rec.len()
        )));
    }
    let p = rec.alpha[0].prec();
    if n > max_nodes(p) {
        return Err(Error::Quadrature(format!(
            "{n} nodes exceed the supported depth {} at {p} bits",
            max_nodes(p)
        )));
    }
    let diag: Vec<f64> = rec.alpha[..n].iter().map(|a| a.to_f64()).collect();
    let off: Vec<f64> = rec.beta[1..n].iter().map(|b| b.to_f64().sqrt()).collect();
    let guesses = tridiagonal_eigenvalues(&diag, &off);

    // Christoffel normalisers h_k = beta_0 ... beta_k
    let mut h = Vec::with_capacity(n);
    let mut acc = Float::with_val(p, 1);
    for b in &rec.beta[..n] {
        acc *= b;
        h.push(acc.clone());
    }

    let eval = |x: &Real| -> (Real, Real, Real) {
        // returns (p_n, p_n', sum p_k^2 / h_k)
        let mut pm1 = Float::new(p);
        let mut p0 = Float::with_val(p, 1);
        let mut dm1 = Float::new(p);
        let mut d0 = Float::new(p);
        let mut christ = Float::with_val(p, &p0 / &h[0]);
        for k in 0..n {
            let xa = Float::with_val(p, x - &rec.alpha[k]);
            let bk = &rec.beta[k];
            let p1 = if k == 0 {
                Float::with_val(p, &xa * &p0)
            } else {
                Float::with_val(p, &xa * &p0) - Float::with_val(p, bk * &pm1)
            };
            let d1 = if k == 0 {
                Float::with_val(p, &xa * &d0) + &p0
            } else {
                Float::with_val(p, &xa * &d0) + &p0 - Float::with_val(p, bk * &dm1)
            };
            if k + 1 < n {
                christ += Float::with_val(p, p1.square_ref()) / &h[k + 1];
            }
            pm1 = p0;
            p0 = p1;
            dm1 = d0;
            d0 = d1;
        }
        (p0, d0, christ)
    };

    let tol = {
        let mut t = Float::with_val(p, 1);
        t >>= p as i32 - 4;
        t
    };
    let mut nodes = Vec::with_capacity(n);
    let mut weights = Vec::with_capacity(n);
    for g in guesses {
        let mut x = Float::with_val(p, g);
        let mut converged = false;
        for _ in 0..60 {
            let (v, d, _) = eval(&x);
            if d.is_zero() {
                break;
            }
            let dx = v / d;
            x -= &dx;
            let scale = Float::with_val(p, x.abs_ref()).max(&Float::with_val(p, 1));
            if Float::with_val(p, dx.abs_ref()) <= Float::with_val(p, &tol * &scale) {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(Error::Quadrature(format!("node polishing stalled near {g}")));
        }
        let (_, _, christ) = eval(&x);
        weights.push(Float::with_val(p, 1) / christ);
        nodes.push(x);
    }
    for w in nodes.windows(2) {
        if !(w[0] < w[1]) {
            return Err(Error::Quadrature(
                "Gauss nodes collapsed during polishing".into(),
            ));
        }
    }
    Ok(GaussRule { nodes, weights })
}

/// Gauss-Jacobi rule for `(b - x)^alpha (x - a)^beta` on `interval`.
pub fn gauss_jacobi(n: usize, alpha: &Real, beta: &Real, interval: &Interval) -> Result<GaussRule> {
    let one = Float::with_val(interval.prec(), 1);
    let rec = jacobi_recurrence(n, alpha, beta, interval, &one)?;
    gauss_from_recurrence(&rec, n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::precision::{int, pi, real};

    fn unit(p: u32) -> Interval {
        Interval::from_f64(p, -1.0, 1.0).unwrap()
    }

    #[test]
    fn two_point_legendre() {
        let p = 256;
        let r = gauss_jacobi(2, &int(p, 0), &int(p, 0), &unit(p)).unwrap();
        let s = Float::with_val(p, 3).sqrt().recip();
        assert!(Float::with_val(p, &r.nodes[1] - &s).abs() < 1e-70);
        assert!(Float::with_val(p, &r.nodes[0] + &s).abs() < 1e-70);
        for w in &r.weights {
            assert!(Float::with_val(p, w - 1u32).abs() < 1e-70);
        }
    }

    #[test]
    fn one_point_chebyshev() {
        let p = 256;
        let h = real(p, -0.5);
        let r = gauss_jacobi(1, &h, &h, &unit(p)).unwrap();
        assert!(Float::with_val(p, r.nodes[0].abs_ref()) < 1e-70);
        assert!(Float::with_val(p, &r.weights[0] - &pi(p)).abs() < 1e-70);
    }

    #[test]
    fn chebyshev_nodes_are_cosines() {
        let p = 200;
        let h = real(p, -0.5);
        let n = 17;
        let r = gauss_jacobi(n, &h, &h, &unit(p)).unwrap();
        for (i, x) in r.nodes.iter().enumerate() {
            let k = (n - 1 - i) as u32;
            let th = pi(p) * Float::with_val(p, 2 * k + 1) / Float::with_val(p, 2 * n as u32);
            assert!(Float::with_val(p, x - th.cos()).abs() < 1e-55);
        }
    }

    #[test]
    fn stieltjes_recovers_jacobi_coefficients() {
        let p = 200;
        let i = unit(p);
        let a = real(p, 0.5);
        let b = real(p, -0.25);
        let fine = gauss_jacobi(30, &a, &b, &i).unwrap();
        let rec = stieltjes(&fine.nodes, &fine.weights, 10).unwrap();
        let exact = jacobi_recurrence(10, &a, &b, &i, &int(p, 1)).unwrap();
        for k in 0..10 {
            assert!(Float::with_val(p, &rec.alpha[k] - &exact.alpha[k]).abs() < 1e-50);
            assert!(Float::with_val(p, &rec.beta[k] - &exact.beta[k]).abs() < 1e-50);
        }
    }

    #[test]
    fn mapped_rule_integrates_monomials() {
        let p = 200;
        let i = Interval::from_f64(p, 2.0, 3.0).unwrap();
        let r = gauss_jacobi(6, &int(p, 0), &int(p, 0), &i).unwrap();
        // int_2^3 x^5 dx = (3^6 - 2^6) / 6
        let mut s = Float::new(p);
        for (x, w) in r.nodes.iter().zip(&r.weights) {
            s += Float::with_val(p, x.square_ref()) * Float::with_val(p, x.square_ref()) * x * w;
        }
        let exact = Float::with_val(p, 729 - 64) / 6u32;
        assert!(Float::with_val(p, s - exact).abs() < 1e-50);
    }

    #[test]
    fn rejects_nonintegrable_exponents() {
        let p = 64;
        assert!(gauss_jacobi(3, &int(p, -1), &int(p, 0), &unit(p)).is_err());
    }
}
