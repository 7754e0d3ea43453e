//! Real polynomials in the monomial basis, optionally carrying their roots.

use rug::Float;

use crate::error::{Error, Result};
use crate::precision::{to_decimal, Cplx, Real};

#[derive(Clone, Debug)]
pub struct Polynomial {
    coeffs: Vec<Real>,
    /// Present when the polynomial is `lead * prod (x - r)` with known real roots.
    roots: Option<Vec<Real>>,
}

impl Polynomial {
    /// Coefficients in ascending degree; trailing zeros are trimmed.
    pub fn new(mut coeffs: Vec<Real>) -> Self {
        while coeffs.len() > 1 && coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Polynomial {
            coeffs,
            roots: None,
        }
    }

    pub fn zero(prec: u32) -> Self {
        Polynomial::new(vec![Float::new(prec)])
    }

    pub fn one(prec: u32) -> Self {
        Polynomial::new(vec![Float::with_val(prec, 1)])
    }

    /// Monic polynomial with the given roots.
    pub fn from_roots(prec: u32, roots: &[Real]) -> Self {
        let mut c = vec![Float::with_val(prec, 1)];
        for r in roots {
            let mut next = vec![Float::new(prec); c.len() + 1];
            for (i, ci) in c.iter().enumerate() {
                next[i + 1] += ci;
                next[i] -= Float::with_val(prec, ci * r);
            }
            c = next;
        }
        Polynomial {
            coeffs: c,
            roots: Some(roots.to_vec()),
        }
    }

    pub fn parse(prec: u32, coeffs: &[String]) -> Result<Self> {
        let c = coeffs
            .iter()
            .map(|s| crate::precision::parse_real(prec, s))
            .collect::<Result<Vec<_>>>()?;
        if c.is_empty() {
            return Err(Error::Parse("empty coefficient list".into()));
        }
        Ok(Polynomial::new(c))
    }

    pub fn coeffs(&self) -> &[Real] {
        &self.coeffs
    }

    pub fn roots(&self) -> Option<&[Real]> {
        self.roots.as_deref()
    }

    pub fn prec(&self) -> u32 {
        self.coeffs[0].prec()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0].is_zero()
    }

    /// Degree, with the zero polynomial reported as degree 0.
    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn leading(&self) -> &Real {
        self.coeffs.last().unwrap()
    }

    pub fn is_monic(&self) -> bool {
        *self.leading() == 1
    }

    pub fn eval(&self, x: &Real) -> Real {
        let p = self.prec().max(x.prec());
        if let Some(roots) = &self.roots {
            let mut v = self.leading().clone();
            v.set_prec(p);
            for r in roots {
                v *= Float::with_val(p, x - r);
            }
            return v;
        }
        let mut acc = Float::new(p);
        for c in self.coeffs.iter().rev() {
            acc *= x;
            acc += c;
        }
        acc
    }

    pub fn eval_complex(&self, z: &Cplx) -> Cplx {
        let p = self.prec().max(z.prec());
        if let Some(roots) = &self.roots {
            let mut v = Cplx::from_real(Float::with_val(p, self.leading()));
            for r in roots {
                v = &v * &z.sub_real(r);
            }
            return v;
        }
        let mut re = Float::new(p);
        let mut im = Float::new(p);
        for c in self.coeffs.iter().rev() {
            let nre = Float::with_val(p, &re * &z.re) - Float::with_val(p, &im * &z.im);
            let nim = Float::with_val(p, &re * &z.im) + Float::with_val(p, &im * &z.re);
            re = nre + c;
            im = nim;
        }
        Cplx::new(re, im)
    }

    pub fn derivative(&self) -> Polynomial {
        let p = self.prec();
        if self.coeffs.len() == 1 {
            return Polynomial::zero(p);
        }
        let c = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, c)| Float::with_val(p, c * k as u32))
            .collect();
        Polynomial::new(c)
    }

    pub fn scaled(&self, s: &Real) -> Polynomial {
        let p = self.prec();
        let c = self.coeffs.iter().map(|c| Float::with_val(p, c * s)).collect();
        let mut out = Polynomial::new(c);
        if self.roots.is_some() && !s.is_zero() {
            out.roots = self.roots.clone();
        }
        out
    }

    pub fn to_decimal_strings(&self) -> Vec<String> {
        self.coeffs.iter().map(to_decimal).collect()
    }

    /// Attaches known roots; the polynomial must be `leading * prod (x - r)`.
    pub fn with_roots(mut self, roots: Vec<Real>) -> Polynomial {
        debug_assert_eq!(roots.len(), self.degree());
        self.roots = Some(roots);
        self
    }
}

/// Monomial coefficients of `sum c_k T_k(u)`.
pub fn chebyshev_to_monomial(cheb: &[Real]) -> Vec<Real> {
    let n = cheb.len();
    let p = cheb.first().map(|c| c.prec()).unwrap_or(64);
    if n == 0 {
        return vec![Float::new(p)];
    }
    let mut out = vec![Float::new(p); n];
    let mut t_prev: Vec<Real> = vec![Float::with_val(p, 1)];
    let mut t_cur: Vec<Real> = vec![Float::new(p), Float::with_val(p, 1)];
    out[0] += &cheb[0];
    if n > 1 {
        for (i, c) in t_cur.iter().enumerate() {
            out[i] += Float::with_val(p, c * &cheb[1]);
        }
    }
    for k in 2..n {
        let mut t_next = vec![Float::new(p); k + 1];
        for (i, c) in t_cur.iter().enumerate() {
            t_next[i + 1] += Float::with_val(p, c * 2u32);
        }
        for (i, c) in t_prev.iter().enumerate() {
            t_next[i] -= c;
        }
        for (i, c) in t_next.iter().enumerate() {
            out[i] += Float::with_val(p, c * &cheb[k]);
        }
        t_prev = t_cur;
        t_cur = t_next;
    }
    out
}

/// Chebyshev coefficients of the monomial series `sum a_k u^k`.
pub fn monomial_to_chebyshev(mono: &[Real]) -> Vec<Real> {
    let n = mono.len();
    let p = mono.first().map(|c| c.prec()).unwrap_or(64);
    let mut acc: Vec<Real> = vec![Float::new(p)];
    for a in mono.iter().rev() {
        // acc <- u * acc + a
        let mut next = vec![Float::new(p); acc.len() + 1];
        for (k, c) in acc.iter().enumerate() {
            if k == 0 {
                next[1] += c;
            } else {
                let h = Float::with_val(p, c / 2u32);
                next[k + 1] += &h;
                next[k - 1] += &h;
            }
        }
        next[0] += a;
        acc = next;
    }
    acc.truncate(n.max(1));
    acc
}

/// Coefficients in `x` of `q((x - c) / h)` given coefficients of `q` in `u`.
pub fn compose_affine(q: &[Real], c: &Real, h: &Real) -> Vec<Real> {
    let p = q.first().map(|v| v.prec()).unwrap_or(64);
    let inv_h = Float::with_val(p, 1) / h;
    let shift = -Float::with_val(p, c * &inv_h);
    let mut acc: Vec<Real> = vec![Float::new(p)];
    for a in q.iter().rev() {
        let mut next = vec![Float::new(p); acc.len() + 1];
        for (k, v) in acc.iter().enumerate() {
            next[k + 1] += Float::with_val(p, v * &inv_h);
            next[k] += Float::with_val(p, v * &shift);
        }
        next[0] += a;
        acc = next;
    }
    acc.truncate(q.len().max(1));
    acc
}

/// Coefficients in `u` of `r(c + h u)` given coefficients of `r` in `x`.
pub fn substitute_affine(r: &[Real], c: &Real, h: &Real) -> Vec<Real> {
    let p = r.first().map(|v| v.prec()).unwrap_or(64);
    let mut acc: Vec<Real> = vec![Float::new(p)];
    for a in r.iter().rev() {
        let mut next = vec![Float::new(p); acc.len() + 1];
        for (k, v) in acc.iter().enumerate() {
            next[k + 1] += Float::with_val(p, v * h);
            next[k] += Float::with_val(p, v * c);
        }
        next[0] += a;
        acc = next;
    }
    acc.truncate(r.len().max(1));
    acc
}

/// Values `T_0(u), ..., T_n(u)`.
pub fn chebyshev_values(u: &Real, n: usize) -> Vec<Real> {
    let p = u.prec();
    let mut out = Vec::with_capacity(n + 1);
    out.push(Float::with_val(p, 1));
    if n >= 1 {
        out.push(u.clone());
    }
    for k in 2..=n {
        let next = Float::with_val(p, &out[k - 1] * u) * 2u32 - &out[k - 2];
        out.push(next);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::precision::real;

    fn reals(v: &[f64]) -> Vec<Real> {
        v.iter().map(|x| real(128, *x)).collect()
    }

    #[test]
    fn chebyshev_round_trip() {
        let cheb = reals(&[0.5, -1.0, 2.0, 0.25, 3.0]);
        let mono = chebyshev_to_monomial(&cheb);
        // T_4 = 8u^4 - 8u^2 + 1 contributes 24 u^4
        assert_eq!(mono[4].to_f64(), 24.0);
        let back = monomial_to_chebyshev(&mono);
        for (a, b) in cheb.iter().zip(&back) {
            assert!((Float::with_val(128, a - b)).abs() < 1e-30);
        }
    }

    #[test]
    fn affine_maps_invert() {
        let q = reals(&[1.0, -2.0, 0.5, 3.0]);
        let c = real(128, 2.5);
        let h = real(128, 0.5);
        let x = compose_affine(&q, &c, &h);
        let u = substitute_affine(&x, &c, &h);
        for (a, b) in q.iter().zip(&u) {
            assert!((Float::with_val(128, a - b)).abs() < 1e-30);
        }
    }

    #[test]
    fn roots_and_coefficients_agree() {
        let p = Polynomial::from_roots(128, &reals(&[-1.0, 0.5, 2.0]));
        let plain = Polynomial::new(p.coeffs().to_vec());
        for x in [-3.0, 0.1, 7.5] {
            let x = real(128, x);
            let d = Float::with_val(128, p.eval(&x) - plain.eval(&x));
            assert!(d.abs() < 1e-30);
        }
        let z = Cplx::from_f64(128, 1.0, 1.0);
        let d = (&p.eval_complex(&z) - &plain.eval_complex(&z)).abs();
        assert!(d < 1e-30);
        assert!(p.is_monic());
        assert_eq!(p.derivative().degree(), 2);
    }
}
