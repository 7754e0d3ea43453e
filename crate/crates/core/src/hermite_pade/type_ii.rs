use std::sync::OnceLock;

use rug::Float;

use super::{
    attach_roots, basis_table, chebyshev_on, equilibrated_solve, polynomial_part, rank_tolerance,
    ratio_f64, relative_integral, replay, MultiIndex, SystemRef,
};
use crate::error::{invalid, Error, Result};
use crate::linalg::RealMatrix;
use crate::measures::Interval;
use crate::poly::Polynomial;
use crate::precision::{rel_diff, Cplx, Real};
use crate::zeros::{form_zeros, poly_real_zeros, sign_change_zeros, ZeroList};

/// Type II data for one multi-index: `Q_n`, the numerators `P_{n,j}` and
/// lazily built second-kind functions `Psi_{n,k}` with their zero
/// polynomials `Q_{n,k}`.
#[derive(Debug)]
pub struct TypeIIFamily {
    index: MultiIndex,
    system: SystemRef,
    q: Polynomial,
    p: Vec<Polynomial>,
    margin: f64,
    residual: f64,
    /// Q at the nodes of the j-th orthogonality measure
    q_nodes: Vec<OnceLock<Vec<Real>>>,
    /// psi_nodes[k]: Psi_{n,k} at the nodes of sigma_{k+1}
    psi_nodes: Vec<OnceLock<Vec<Real>>>,
    psi_zero_lists: Vec<OnceLock<std::result::Result<ZeroList, Error>>>,
    zero_polys: OnceLock<std::result::Result<Vec<Polynomial>, Error>>,
}

/// Solves `int x^nu Q_n ds_{1,j} = 0`, `nu < n_j` (Nikishin), or the same
/// against `sigma_j` (Angelesco), for monic `Q_n` of degree `|n|`.
pub fn solve_type_ii(system: impl Into<SystemRef>, n: &MultiIndex) -> Result<TypeIIFamily> {
    let system = system.into();
    let m = system.m();
    if n.m() != m {
        return invalid(format!("index {n} has {} components, system has {m}", n.m()));
    }
    let total = n.total();
    let nq = system.quadrature_size();
    if nq < total + 1 {
        return Err(Error::Quadrature(format!(
            "{nq} nodes cannot resolve degree {} for index {n}",
            2 * total
        )));
    }
    let prec = system.prec();
    let basis = system.basis_interval();
    let mut a = RealMatrix::zeros(total, total, prec);
    let mut b = vec![Float::new(prec); total];
    let mut row = 0;
    for j in 1..=m {
        if n.get(j) == 0 {
            continue;
        }
        let mu = system.orthogonality_measure(j);
        let table = basis_table(&basis, mu.nodes(), total);
        for nu in 0..n.get(j) {
            let mut acc = vec![Float::new(prec); total + 1];
            for (t, w) in table.iter().zip(mu.weights()) {
                let wt = Float::with_val(prec, &t[nu] * w);
                for (i, slot) in acc.iter_mut().enumerate() {
                    *slot += Float::with_val(prec, &wt * &t[i]);
                }
            }
            for i in 0..total {
                a.set(row, i, mu.sign().apply(acc[i].clone()));
            }
            b[row] = -mu.sign().apply(acc[total].clone());
            row += 1;
        }
    }
    let (x, margin) = equilibrated_solve(a, b)?;
    if margin < rank_tolerance(prec) {
        return Err(Error::Normality {
            index: format!("type II {n}"),
            margin,
        });
    }
    let mut cheb = x;
    cheb.push(Float::with_val(prec, 1));
    let mono = chebyshev_on(&basis, &cheb);
    let lead = mono.last().unwrap().clone();
    let mono: Vec<Real> = mono.into_iter().map(|c| c / &lead).collect();
    let mut q = Polynomial::new(mono);
    if q.degree() != total {
        return Err(Error::Normality {
            index: format!("type II {n}"),
            margin: 0.0,
        });
    }
    q = attach_roots(q, &basis);
    let p = (1..=m)
        .map(|j| {
            let mu = system.orthogonality_measure(j).moments(total.max(1));
            Polynomial::new(polynomial_part(q.coeffs(), &mu))
        })
        .collect();
    let mut fam = TypeIIFamily::assemble(system, n.clone(), q, p, margin, 0.0);
    fam.residual = fam
        .orthogonality_residuals(None)?
        .into_iter()
        .fold(0.0, f64::max);
    Ok(fam)
}

impl TypeIIFamily {
    pub(crate) fn assemble(
        system: SystemRef,
        index: MultiIndex,
        q: Polynomial,
        p: Vec<Polynomial>,
        margin: f64,
        residual: f64,
    ) -> TypeIIFamily {
        let m = system.m();
        TypeIIFamily {
            index,
            system,
            q,
            p,
            margin,
            residual,
            q_nodes: (0..m).map(|_| OnceLock::new()).collect(),
            psi_nodes: (0..m).map(|_| OnceLock::new()).collect(),
            psi_zero_lists: (0..m).map(|_| OnceLock::new()).collect(),
            zero_polys: OnceLock::new(),
        }
    }

    pub fn index(&self) -> &MultiIndex {
        &self.index
    }

    pub fn system(&self) -> &SystemRef {
        &self.system
    }

    pub fn prec(&self) -> u32 {
        self.system.prec()
    }

    pub fn m(&self) -> usize {
        self.system.m()
    }

    /// Monic `Q_n`.
    pub fn q(&self) -> &Polynomial {
        &self.q
    }

    /// `P_{n,j}`, 1-based.
    pub fn pade_numerator(&self, j: usize) -> &Polynomial {
        &self.p[j - 1]
    }

    pub fn numerators(&self) -> &[Polynomial] {
        &self.p
    }

    /// `sigma_min / sigma_max` of the equilibrated moment matrix.
    pub fn margin(&self) -> f64 {
        self.margin
    }

    /// Largest relative orthogonality residual against the solving rule.
    pub fn residual(&self) -> f64 {
        self.residual
    }

    fn q_at_nodes(&self, j: usize) -> &[Real] {
        self.q_nodes[j - 1].get_or_init(|| {
            let mu = self.system.orthogonality_measure(j);
            mu.nodes().iter().map(|x| self.q.eval(x)).collect()
        })
    }

    /// Relative residuals `|int x^nu Q ds| / int |x^nu Q| d|s|` of every
    /// defining condition, integrated against `check` (or the own system).
    pub fn orthogonality_residuals(&self, check: Option<&SystemRef>) -> Result<Vec<f64>> {
        let sys = check.unwrap_or(&self.system);
        if sys.m() != self.m() {
            return invalid("check system has a different number of measures");
        }
        let mut out = Vec::new();
        for j in 1..=self.m() {
            let mu = sys.orthogonality_measure(j);
            let qv: Vec<Real> = mu.nodes().iter().map(|x| self.q.eval(x)).collect();
            let mut vals = qv.clone();
            for _nu in 0..self.index.get(j) {
                let (s, a) = relative_integral(mu, &vals);
                out.push(ratio_f64(&s, &a));
                for (v, x) in vals.iter_mut().zip(mu.nodes()) {
                    *v *= x;
                }
            }
        }
        Ok(out)
    }

    /// `Phi_{n,j}(z) = int Q_n(x) ds_{1,j}(x) / (z - x)`.
    pub fn remainder_phi(&self, j: usize, z: &Cplx) -> Result<Cplx> {
        let mu = self.system.orthogonality_measure(j);
        let nodes = self.q_at_nodes(j);
        finite(mu.cauchy_integral(z, Some(nodes), &|x: &Real| self.q.eval(x))?)
    }

    /// `Q_n s_hat_{1,j} - P_{n,j}` at `z`, the same remainder through its
    /// other representation.
    pub fn remainder_direct(&self, j: usize, z: &Cplx) -> Result<Cplx> {
        let s = self.system.orthogonality_measure(j).cauchy_transform(z)?;
        Ok(&(&self.q.eval_complex(z) * &s) - &self.p[j - 1].eval_complex(z))
    }

    /// `Psi_{n,k}`: `Psi_{n,0} = Q_n`, then iterated Cauchy transforms
    /// through `sigma_1, ..., sigma_k`.
    pub fn psi(&self, k: usize, z: &Cplx) -> Result<Cplx> {
        if k == 0 {
            return Ok(self.q.eval_complex(z));
        }
        let sys = self.system.as_nikishin()?;
        if k > sys.m() {
            return invalid(format!("Psi index {k} exceeds m = {}", sys.m()));
        }
        let nodes = self.psi_at_nodes(k - 1)?;
        let p = self.prec();
        let f = |x: &Real| {
            self.psi_real(k - 1, x)
                .unwrap_or_else(|_| Float::with_val(p, f64::NAN))
        };
        finite(sys.generator(k).cauchy_integral(z, Some(nodes), &f)?)
    }

    pub fn psi_real(&self, k: usize, x: &Real) -> Result<Real> {
        if k == 0 {
            return Ok(self.q.eval(x));
        }
        let sys = self.system.as_nikishin()?;
        if k > sys.m() {
            return invalid(format!("Psi index {k} exceeds m = {}", sys.m()));
        }
        let nodes = self.psi_at_nodes(k - 1)?;
        let p = self.prec();
        let f = |t: &Real| {
            self.psi_real(k - 1, t)
                .unwrap_or_else(|_| Float::with_val(p, f64::NAN))
        };
        let v = sys.generator(k).cauchy_integral_real(x, Some(nodes), &f)?;
        if !v.is_finite() {
            return Err(Error::Quadrature(format!("Psi_{k} is not finite at {}", x.to_f64())));
        }
        Ok(v)
    }

    /// `Psi_{n,k}` at the nodes of `sigma_{k+1}`.
    fn psi_at_nodes(&self, k: usize) -> Result<&[Real]> {
        let cell = &self.psi_nodes[k];
        if let Some(v) = cell.get() {
            return Ok(v);
        }
        let sys = self.system.as_nikishin()?;
        let vals = sys
            .generator(k + 1)
            .nodes()
            .iter()
            .map(|x| self.psi_real(k, x))
            .collect::<Result<Vec<_>>>()?;
        let _ = cell.set(vals);
        Ok(cell.get().unwrap())
    }

    /// Zeros of `Psi_{n,k}` on `Delta_{k+1}`, `k = 0..m-1`. For a
    /// decreasing index the count must be `N_{n,k+1}`; otherwise every sign
    /// change found is reported.
    pub fn psi_zeros(&self, k: usize) -> Result<&ZeroList> {
        let sys = self.system.as_nikishin()?;
        if k >= sys.m() {
            return invalid(format!("Psi_{k} has no zeros off its support"));
        }
        let cell = &self.psi_zero_lists[k];
        let r = cell.get_or_init(|| self.locate_psi_zeros(k));
        r.as_ref().map_err(replay)
    }

    fn locate_psi_zeros(&self, k: usize) -> Result<ZeroList> {
        let sys = self.system.as_nikishin()?;
        let interval: &Interval = sys.interval(k + 1);
        let expected = self.index.tail(k + 1);
        if k == 0 {
            let z = poly_real_zeros(&self.q, interval)?;
            if z.len() != expected {
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
            self.psi_real(k, x)
                .unwrap_or_else(|_| Float::with_val(p, f64::NAN))
        };
        if self.index.is_decreasing() {
            form_zeros(&f, interval, expected)
        } else {
            let z = sign_change_zeros(&f, interval, 8 * (expected + 1) + 64)?;
            if z.len() >= expected {
                return Ok(z);
            }
            sign_change_zeros(&f, interval, 4 * (8 * (expected + 1) + 64))
        }
    }

    /// `Q_{n,0}, ..., Q_{n,m+1}` with `Q_{n,0} = Q_{n,m+1} = 1`,
    /// `Q_{n,1} = Q_n` and `Q_{n,k+1}` monic with the zeros of `Psi_{n,k}`
    /// on `Delta_{k+1}`.
    pub fn zero_polys(&self) -> Result<&[Polynomial]> {
        let r = self.zero_polys.get_or_init(|| {
            let sys = self.system.as_nikishin()?;
            let m = sys.m();
            let p = self.prec();
            let mut out = vec![Polynomial::one(p)];
            for k in 0..m {
                let z = self.psi_zeros(k)?;
                out.push(Polynomial::from_roots(p, &z.points));
            }
            out.push(Polynomial::one(p));
            Ok(out)
        });
        r.as_deref().map_err(replay)
    }

    /// `H_{n,k} = Q_{n,k-1} Psi_{n,k-1} / Q_{n,k}`, `k = 1..m+1`.
    pub fn h(&self, k: usize, z: &Cplx) -> Result<Cplx> {
        let zp = self.zero_polys()?;
        if k == 0 || k > self.m() + 1 {
            return invalid(format!("H index {k} out of range"));
        }
        let den = zp[k].eval_complex(z);
        if den.is_zero() {
            return Err(Error::OnSupport(format!("{z} is a zero of Q_{{n,{k}}}")));
        }
        let num = &zp[k - 1].eval_complex(z) * &self.psi(k - 1, z)?;
        Ok(&num / &den)
    }

    /// Relative residuals of
    /// `int x^nu Q_{n,k} H_{n,k} dsigma_k / (Q_{n,k-1} Q_{n,k+1}) = 0`,
    /// `nu < N_{n,k}`. The factors `Q_{n,k}` and `Q_{n,k-1}` cancel against
    /// `H_{n,k}`, leaving `Psi_{n,k-1} / Q_{n,k+1}`.
    pub fn rel3_residuals(&self, k: usize) -> Result<Vec<f64>> {
        let sys = self.system.as_nikishin()?;
        let zp = self.zero_polys()?;
        let sigma = sys.generator(k);
        let psi = self.psi_at_nodes(k - 1)?;
        let mut vals: Vec<Real> = psi
            .iter()
            .zip(sigma.nodes())
            .map(|(v, x)| Float::with_val(self.prec(), v / zp[k + 1].eval(x)))
            .collect();
        let mut out = Vec::new();
        for _ in 0..self.index.tail(k) {
            let (s, a) = relative_integral(sigma, &vals);
            out.push(ratio_f64(&s, &a));
            for (v, x) in vals.iter_mut().zip(sigma.nodes()) {
                *v *= x;
            }
        }
        Ok(out)
    }

    /// Relative gap between `H_{n,k+1}(z)` and
    /// `int Q_{n,k}^2 H_{n,k} dsigma_k / ((z - x) Q_{n,k-1} Q_{n,k+1})`.
    pub fn rel4_residual(&self, k: usize, z: &Cplx) -> Result<f64> {
        let sys = self.system.as_nikishin()?;
        let zp = self.zero_polys()?;
        let sigma = sys.generator(k);
        let p = self.prec();
        let integrand = |x: &Real| -> Real {
            let psi = self
                .psi_real(k - 1, x)
                .unwrap_or_else(|_| Float::with_val(p, f64::NAN));
            psi * zp[k].eval(x) / zp[k + 1].eval(x)
        };
        let psi = self.psi_at_nodes(k - 1)?;
        let at_nodes: Vec<Real> = psi
            .iter()
            .zip(sigma.nodes())
            .map(|(v, x)| Float::with_val(p, v * zp[k].eval(x)) / zp[k + 1].eval(x))
            .collect();
        let rhs = finite(sigma.cauchy_integral(z, Some(&at_nodes), &integrand)?)?;
        let lhs = self.h(k + 1, z)?;
        Ok(rel_diff(&lhs, &rhs).to_f64())
    }

    /// `int |Q_{n,j}^2 H_{n,j}| dsigma_j / |Q_{n,j-1} Q_{n,j+1}|`, which is
    /// `K_{n,j}^{-2}`.
    pub fn k_integral(&self, j: usize) -> Result<Real> {
        let sys = self.system.as_nikishin()?;
        let zp = self.zero_polys()?;
        let sigma = sys.generator(j);
        let psi = self.psi_at_nodes(j - 1)?;
        let p = self.prec();
        let mut s = Float::new(p);
        for ((v, x), w) in psi.iter().zip(sigma.nodes()).zip(sigma.weights()) {
            let t = Float::with_val(p, v * zp[j].eval(x)) / zp[j + 1].eval(x);
            s += Float::with_val(p, t.abs_ref()) * w;
        }
        Ok(s)
    }

    /// `K_{n,j} = k_integral(j)^{-1/2}`.
    pub fn k_constant(&self, j: usize) -> Result<Real> {
        let i = self.k_integral(j)?;
        Ok(i.sqrt().recip())
    }
}

fn finite(v: Cplx) -> Result<Cplx> {
    if v.re.is_finite() && v.im.is_finite() {
        Ok(v)
    } else {
        Err(Error::Quadrature("transform evaluation produced a non-finite value".into()))
    }
}
