use std::sync::{Arc, OnceLock};

use rug::Float;

use super::{
    basis_table, chebyshev_on, equilibrated_solve, polynomial_part, rank_tolerance, ratio_f64,
    relative_integral, replay, MultiIndex,
};
use crate::error::{invalid, Error, Result};
use crate::linalg::RealMatrix;
use crate::measures::NikishinSystem;
use crate::poly::Polynomial;
use crate::precision::{rel_diff, Cplx, Real};
use crate::zeros::{form_zeros, poly_real_zeros, sign_change_zeros, ZeroList};

/// Type I data for one multi-index: `a_{n,0}, ..., a_{n,m}`, the linear
/// forms built from them and the polynomials `A_{n,k}` carrying their zeros.
#[derive(Debug)]
pub struct TypeIFamily {
    index: MultiIndex,
    system: Arc<NikishinSystem>,
    a: Vec<Polynomial>,
    margin: f64,
    residual: f64,
    /// form_nodes[k-1]: the form of order k at the nodes of sigma_k
    form_nodes: Vec<OnceLock<Vec<Real>>>,
    zero_lists: Vec<OnceLock<std::result::Result<ZeroList, Error>>>,
    zero_polys: OnceLock<std::result::Result<Vec<Polynomial>, Error>>,
}

/// Solves `int x^nu (a_1 + sum_{k>=2} a_k s_hat_{2,k}) dsigma_1 = 0`,
/// `nu <= |n| - 2`, with `deg a_j <= n_j - 1`. The last non-zero `a_j` is
/// made monic and `a_0` is minus the polynomial part at infinity of
/// `sum a_j s_hat_{1,j}`.
pub fn solve_type_i(system: Arc<NikishinSystem>, n: &MultiIndex) -> Result<TypeIFamily> {
    let m = system.m();
    if n.m() != m {
        return invalid(format!("index {n} has {} components, system has {m}", n.m()));
    }
    let total = n.total();
    let nq = system.quadrature_size();
    if nq < total {
        return Err(Error::Quadrature(format!(
            "{nq} nodes cannot resolve degree {} for index {n}",
            2 * total - 2
        )));
    }
    let prec = system.prec();
    let basis = system.interval(1).clone();
    let last = (1..=m).rev().find(|&j| n.get(j) > 0).unwrap();
    // column layout: block j holds the Chebyshev coefficients of a_j
    let mut offsets = vec![0; m + 2];
    for j in 1..=m {
        offsets[j + 1] = offsets[j] + n.get(j);
    }
    let pivot = offsets[last] + n.get(last) - 1;
    let mut sol = vec![Float::new(prec); total];
    sol[pivot] = Float::with_val(prec, 1);
    let mut margin = 1.0;
    if total > 1 {
        let rows = total - 1;
        let nodes = system.generator(1).nodes();
        let table = basis_table(&basis, nodes, total);
        let mut full = RealMatrix::zeros(rows, total, prec);
        for k in 1..=m {
            let mu = system.s(1, k);
            for nu in 0..rows {
                for i in 0..n.get(k) {
                    let mut s = Float::new(prec);
                    for (t, w) in table.iter().zip(mu.weights()) {
                        s += Float::with_val(prec, &t[nu] * &t[i]) * w;
                    }
                    full.set(nu, offsets[k] + i, mu.sign().apply(s));
                }
            }
        }
        let mut a = RealMatrix::zeros(rows, rows, prec);
        let mut b = vec![Float::new(prec); rows];
        for r in 0..rows {
            let mut c = 0;
            for col in 0..total {
                if col == pivot {
                    b[r] = -full.get(r, col).clone();
                } else {
                    a.set(r, c, full.get(r, col).clone());
                    c += 1;
                }
            }
        }
        let (x, mg) = equilibrated_solve(a, b)?;
        margin = mg;
        let mut it = x.into_iter();
        for (col, slot) in sol.iter_mut().enumerate() {
            if col != pivot {
                *slot = it.next().unwrap();
            }
        }
        // every a_j must reach full degree
        let scale = sol
            .iter()
            .map(|c| c.to_f64().abs())
            .fold(0.0, f64::max);
        for j in 1..=m {
            if n.get(j) > 0 {
                let lead = sol[offsets[j] + n.get(j) - 1].to_f64().abs() / scale;
                margin = margin.min(lead);
            }
        }
    }
    if margin < rank_tolerance(prec) {
        return Err(Error::Normality {
            index: format!("type I {n}"),
            margin,
        });
    }
    let mut polys: Vec<Vec<Real>> = (1..=m)
        .map(|j| {
            if n.get(j) == 0 {
                vec![Float::new(prec)]
            } else {
                chebyshev_on(&basis, &sol[offsets[j]..offsets[j + 1]])
            }
        })
        .collect();
    let lead = polys[last - 1].last().unwrap().clone();
    for p in polys.iter_mut() {
        for c in p.iter_mut() {
            *c /= &lead;
        }
    }
    let mut a0 = vec![Float::new(prec); total.max(1)];
    for (j, pj) in polys.iter().enumerate() {
        let mu = system.s(1, j + 1).moments(total.max(1));
        for (slot, c) in a0.iter_mut().zip(polynomial_part(pj, &mu)) {
            *slot -= c;
        }
    }
    let mut a = vec![Polynomial::new(a0)];
    a.extend(polys.into_iter().map(Polynomial::new));
    for j in 1..=m {
        let want = n.get(j).checked_sub(1);
        let got = if a[j].is_zero() { None } else { Some(a[j].degree()) };
        if want != got {
            return Err(Error::Normality {
                index: format!("type I {n}"),
                margin: 0.0,
            });
        }
    }
    let mut fam = TypeIFamily::assemble(system, n.clone(), a, margin, 0.0);
    fam.residual = fam.orto1_residuals(1)?.into_iter().fold(0.0, f64::max);
    Ok(fam)
}

impl TypeIFamily {
    pub(crate) fn assemble(
        system: Arc<NikishinSystem>,
        index: MultiIndex,
        a: Vec<Polynomial>,
        margin: f64,
        residual: f64,
    ) -> TypeIFamily {
        let m = system.m();
        TypeIFamily {
            index,
            system,
            a,
            margin,
            residual,
            form_nodes: (0..m).map(|_| OnceLock::new()).collect(),
            zero_lists: (0..m).map(|_| OnceLock::new()).collect(),
            zero_polys: OnceLock::new(),
        }
    }

    pub fn index(&self) -> &MultiIndex {
        &self.index
    }

    pub fn system(&self) -> &Arc<NikishinSystem> {
        &self.system
    }

    pub fn m(&self) -> usize {
        self.system.m()
    }

    pub fn prec(&self) -> u32 {
        self.system.prec()
    }

    /// `a_{n,j}`, `j = 0..m`.
    pub fn a(&self, j: usize) -> &Polynomial {
        &self.a[j]
    }

    pub fn polynomials(&self) -> &[Polynomial] {
        &self.a
    }

    /// Smaller of the moment-matrix margin and the relative size of the
    /// leading coefficients.
    pub fn margin(&self) -> f64 {
        self.margin
    }

    pub fn residual(&self) -> f64 {
        self.residual
    }

    /// `form_k(z) = a_{n,k}(z) + sum_{j>k} a_{n,j}(z) s_hat_{k+1,j}(z)`,
    /// `k = 0..m`.
    pub fn form(&self, k: usize, z: &Cplx) -> Result<Cplx> {
        let m = self.m();
        if k > m {
            return invalid(format!("form index {k} exceeds m = {m}"));
        }
        let mut v = self.a[k].eval_complex(z);
        for j in k + 1..=m {
            if self.a[j].is_zero() {
                continue;
            }
            let s = self.system.s_hat(k + 1, j, z)?;
            v = &v + &(&self.a[j].eval_complex(z) * &s);
        }
        Ok(v)
    }

    pub fn form_real(&self, k: usize, x: &Real) -> Result<Real> {
        let m = self.m();
        if k > m {
            return invalid(format!("form index {k} exceeds m = {m}"));
        }
        let mut v = self.a[k].eval(x);
        for j in k + 1..=m {
            if self.a[j].is_zero() {
                continue;
            }
            v += self.a[j].eval(x) * self.system.s_hat_real(k + 1, j, x)?;
        }
        Ok(v)
    }

    /// The form of order `k >= 1` at the nodes of `sigma_k`.
    fn form_at_nodes(&self, k: usize) -> &[Real] {
        self.form_nodes[k - 1].get_or_init(|| {
            let p = self.prec();
            let nodes = self.system.generator(k).nodes();
            let mut v: Vec<Real> = nodes.iter().map(|x| self.a[k].eval(x)).collect();
            for j in k + 1..=self.m() {
                if self.a[j].is_zero() {
                    continue;
                }
                let s = self.system.s_hat_at_nodes(k + 1, j);
                for ((slot, x), sx) in v.iter_mut().zip(nodes).zip(s) {
                    *slot += Float::with_val(p, self.a[j].eval(x) * sx);
                }
            }
            v
        })
    }

    /// Zeros of the form of order `k` on `Delta_k`, `k = 1..m`. For a
    /// decreasing index the count must be `N_{n,k} - 1`; otherwise all sign
    /// changes found are reported.
    pub fn form_zeros(&self, k: usize) -> Result<&ZeroList> {
        if k == 0 || k > self.m() {
            return invalid(format!("form index {k} has no zero set on a support"));
        }
        let r = self.zero_lists[k - 1].get_or_init(|| self.locate(k));
        r.as_ref().map_err(replay)
    }

    fn locate(&self, k: usize) -> Result<ZeroList> {
        let interval = self.system.interval(k);
        let tail = self.index.tail(k);
        if tail == 0 {
            return invalid(format!("form of order {k} vanishes identically"));
        }
        let expected = tail - 1;
        if k == self.m() {
            let z = poly_real_zeros(&self.a[k], interval)?;
            if self.index.is_decreasing() && z.len() != expected {
                return Err(Error::CountMismatch {
                    expected,
                    found: z.len(),
                    interval: interval.to_string(),
                });
            }
            return Ok(z);
        }
        let p = self.prec();
        let f = |x: &Real| {
            self.form_real(k, x)
                .unwrap_or_else(|_| Float::with_val(p, f64::NAN))
        };
        if self.index.is_decreasing() {
            form_zeros(&f, interval, expected)
        } else {
            let g = 8 * (expected + 1) + 64;
            let z = sign_change_zeros(&f, interval, g)?;
            if z.len() >= expected {
                return Ok(z);
            }
            sign_change_zeros(&f, interval, 4 * g)
        }
    }

    /// `A_{n,0}, ..., A_{n,m+1}` with `A_{n,0} = A_{n,m+1} = 1`. Needs
    /// `n_m >= 1` so that every form is non-trivial.
    pub fn zero_polys(&self) -> Result<&[Polynomial]> {
        let r = self.zero_polys.get_or_init(|| {
            let m = self.m();
            if self.index.get(m) == 0 {
                return invalid("zero polynomials need n_m >= 1");
            }
            let p = self.prec();
            let mut out = vec![Polynomial::one(p)];
            for k in 1..=m {
                out.push(Polynomial::from_roots(p, &self.form_zeros(k)?.points));
            }
            out.push(Polynomial::one(p));
            Ok(out)
        });
        r.as_deref().map_err(replay)
    }

    /// `H_{n,k}(z) = A_{n,k+1}(z) form_k(z) / A_{n,k}(z)`, `k = 0..m`.
    pub fn h(&self, k: usize, z: &Cplx) -> Result<Cplx> {
        let zp = self.zero_polys()?;
        if k > self.m() {
            return invalid(format!("H index {k} out of range"));
        }
        let den = zp[k].eval_complex(z);
        if den.is_zero() {
            return Err(Error::OnSupport(format!("{z} is a zero of A_{{n,{k}}}")));
        }
        let num = &zp[k + 1].eval_complex(z) * &self.form(k, z)?;
        Ok(&num / &den)
    }

    /// Relative residuals of `int x^nu form_k dsigma_k / A_{n,k-1} = 0`,
    /// `nu <= N_{n,k} - 2`. At `k = 1` these are the defining conditions and
    /// need no zero polynomials.
    pub fn orto1_residuals(&self, k: usize) -> Result<Vec<f64>> {
        if k == 0 || k > self.m() {
            return invalid(format!("orthogonality index {k} out of range"));
        }
        let sigma = self.system.generator(k);
        let p = self.prec();
        let mut vals = self.form_at_nodes(k).to_vec();
        if k > 1 {
            let zp = self.zero_polys()?;
            for (v, x) in vals.iter_mut().zip(sigma.nodes()) {
                *v /= zp[k - 1].eval(x);
            }
        }
        let count = self.index.tail(k).saturating_sub(1);
        let mut out = Vec::with_capacity(count);
        for _ in 0..count {
            let (s, a) = relative_integral(sigma, &vals);
            out.push(ratio_f64(&s, &a));
            for (v, x) in vals.iter_mut().zip(sigma.nodes()) {
                *v = Float::with_val(p, &*v * x);
            }
        }
        Ok(out)
    }

    /// Relative gap between `H_{n,k}(z)` and
    /// `int A_{n,k+1}^2 H_{n,k+1} dsigma_{k+1} / ((z - x) A_{n,k} A_{n,k+2})`,
    /// `k = 0..m-1`. The integrand reduces to `A_{n,k+1} form_{k+1} / A_{n,k}`.
    pub fn orto2_residual(&self, k: usize, z: &Cplx) -> Result<f64> {
        if k >= self.m() {
            return invalid(format!("orto2 index {k} out of range"));
        }
        let zp = self.zero_polys()?;
        let sigma = self.system.generator(k + 1);
        let p = self.prec();
        let at_nodes: Vec<Real> = self
            .form_at_nodes(k + 1)
            .iter()
            .zip(sigma.nodes())
            .map(|(v, x)| Float::with_val(p, v * zp[k + 1].eval(x)) / zp[k].eval(x))
            .collect();
        let integrand = |x: &Real| -> Real {
            let f = self
                .form_real(k + 1, x)
                .unwrap_or_else(|_| Float::with_val(p, f64::NAN));
            f * zp[k + 1].eval(x) / zp[k].eval(x)
        };
        let rhs = sigma.cauchy_integral(z, Some(&at_nodes), &integrand)?;
        let lhs = self.h(k, z)?;
        Ok(rel_diff(&lhs, &rhs).to_f64())
    }

    /// `|z|^{|n|} |a_0 + sum a_j s_hat_{1,j}|` at `z`, bounded as `z -> inf`.
    pub fn remainder_scaled(&self, z: &Cplx) -> Result<Real> {
        let v = self.form(0, z)?.abs();
        let r = z.abs();
        let t = self.index.total() as u32;
        Ok(v * Float::with_val(self.prec(), rug::ops::Pow::pow(&r, t)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::{DensityClass, Interval, Measure};
    use crate::precision::{pi, real};

    const P: u32 = 256;

    fn reference(nq: usize) -> Arc<NikishinSystem> {
        let s1 = Measure::new(Interval::from_f64(P, -1.0, 1.0).unwrap(), DensityClass::chebyshev(P), nq).unwrap();
        let s2 = Measure::new(Interval::from_f64(P, 2.0, 3.0).unwrap(), DensityClass::Legendre, nq).unwrap();
        NikishinSystem::new(vec![s1, s2]).unwrap()
    }

    fn normalized_chebyshev(nq: usize) -> Arc<NikishinSystem> {
        let s = Measure::with_scale(
            Interval::from_f64(P, -1.0, 1.0).unwrap(),
            DensityClass::chebyshev(P),
            pi(P).recip(),
            nq,
        )
        .unwrap();
        NikishinSystem::new(vec![s]).unwrap()
    }

    fn close(a: &Real, b: f64, tol: f64) -> bool {
        Float::with_val(P, a - b).abs().to_f64() < tol
    }

    #[test]
    fn degree_one_is_trivial() {
        let f = solve_type_i(reference(24), &MultiIndex::new(vec![0, 1]).unwrap()).unwrap();
        assert!(f.a(1).is_zero());
        assert!(close(&f.a(2).coeffs()[0], 1.0, 1e-70));
        assert!(f.a(0).is_zero());
        let g = solve_type_i(normalized_chebyshev(16), &MultiIndex::new(vec![1]).unwrap()).unwrap();
        assert!(g.a(0).is_zero());
        assert_eq!(g.a(1).degree(), 0);
    }

    #[test]
    fn chebyshev_degree_two() {
        let f = solve_type_i(normalized_chebyshev(24), &MultiIndex::new(vec![2]).unwrap()).unwrap();
        let a1 = f.a(1).coeffs();
        assert!(close(&a1[1], 1.0, 1e-60));
        assert!(close(&a1[0], 0.0, 1e-60));
        assert_eq!(f.a(0).degree(), 0);
        assert!(close(&f.a(0).coeffs()[0], -1.0, 1e-60));
    }

    #[test]
    fn one_one_matches_quadrature_oracle() {
        let f = solve_type_i(reference(32), &MultiIndex::new(vec![1, 1]).unwrap()).unwrap();
        assert!(close(&f.a(2).coeffs()[0], 1.0, 1e-70));
        let big = reference(64);
        let want = -(big.s(1, 2).moments(1)[0].clone() / big.s(1, 1).moments(1)[0].clone());
        let got = &f.a(1).coeffs()[0];
        assert!(Float::with_val(P, got - &want).abs().to_f64() < 1e-25);
        // orto1* at k = 0, nu = 0
        assert!(f.orto1_residuals(1).unwrap()[0] < 1e-50);
    }

    #[test]
    fn two_one_forms() {
        let f = solve_type_i(reference(48), &MultiIndex::new(vec![2, 1]).unwrap()).unwrap();
        assert_eq!(f.form_zeros(1).unwrap().len(), 2);
        assert_eq!(f.form_zeros(2).unwrap().len(), 0);
        let r = f.orto1_residuals(1).unwrap();
        assert_eq!(r.len(), 2);
        assert!(r.iter().all(|v| *v < 1e-50), "{r:?}");
        let z = Cplx::parse(P, "5+2i").unwrap();
        assert!(f.orto2_residual(0, &z).unwrap() < 1e-40);
        assert!(f.orto2_residual(1, &z).unwrap() < 1e-40);
        let hm = f.h(2, &z).unwrap();
        assert!((&hm - &Cplx::one(P)).abs().to_f64() < 1e-60);
        // a_0 + sum a_j s_hat_{1,j} = O(1/z^3)
        let big = Cplx::from_f64(P, 1e3, 0.0);
        let huge = Cplx::from_f64(P, 1e4, 0.0);
        let r1 = f.remainder_scaled(&big).unwrap().to_f64();
        let r2 = f.remainder_scaled(&huge).unwrap().to_f64();
        assert!(r1.is_finite() && r2 < 2.0 * r1);
        let _ = real(P, 0.0);
    }

    #[test]
    fn three_two_forms_have_expected_zero_counts() {
        let f = solve_type_i(reference(64), &MultiIndex::new(vec![3, 2]).unwrap()).unwrap();
        assert_eq!(f.form_zeros(1).unwrap().len(), 4);
        assert_eq!(f.form_zeros(2).unwrap().len(), 1);
        let zp = f.zero_polys().unwrap();
        assert_eq!(zp.iter().map(|p| p.degree()).collect::<Vec<_>>(), vec![0, 4, 1, 0]);
        let r = f.orto1_residuals(2).unwrap();
        assert_eq!(r.len(), 1);
        assert!(r[0] < 1e-40, "{r:?}");
    }
}
