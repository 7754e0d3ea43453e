//! Type I and type II Hermite-Padé polynomials of Nikishin and Angelesco
//! systems, and the functions built from them.

mod certify;
mod record;
mod type_i;
mod type_ii;

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use rug::Float;

use crate::error::{invalid, Error, Result};
use crate::linalg::{relative_margin, solve_qr, RealMatrix};
use crate::measures::{AngelescoSystem, Interval, Measure, NikishinSystem};
use crate::poly::{chebyshev_to_monomial, chebyshev_values, compose_affine, Polynomial};
use crate::precision::{pow2, Real};

pub use certify::{at_system_probe, certify_perfectness, ProbeReport, ProbeTrial, CertifyReport, CertifyRow};
pub use record::{FamilyKind, FamilyRecord, FAMILY_SCHEMA};
pub use type_i::{solve_type_i, TypeIFamily};
pub use type_ii::{solve_type_ii, TypeIIFamily};

/// `n = (n_1, ..., n_m)` with `|n| >= 1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize)]
#[serde(transparent)]
pub struct MultiIndex {
    components: Vec<usize>,
}

impl MultiIndex {
    pub fn new(components: Vec<usize>) -> Result<MultiIndex> {
        if components.is_empty() {
            return invalid("multi-index needs at least one component");
        }
        if components.iter().sum::<usize>() == 0 {
            return invalid("multi-index must be non-zero");
        }
        Ok(MultiIndex { components })
    }

    /// `(k, ..., k)` with `m` entries.
    pub fn diagonal(m: usize, k: usize) -> Result<MultiIndex> {
        MultiIndex::new(vec![k; m])
    }

    pub fn m(&self) -> usize {
        self.components.len()
    }

    pub fn components(&self) -> &[usize] {
        &self.components
    }

    /// `n_j`, 1-based.
    pub fn get(&self, j: usize) -> usize {
        self.components[j - 1]
    }

    pub fn total(&self) -> usize {
        self.components.iter().sum()
    }

    /// `N_{n,k} = n_k + ... + n_m`, 1-based, with `N_{n,m+1} = 0`.
    pub fn tail(&self, k: usize) -> usize {
        self.components[k - 1..].iter().sum()
    }

    /// `n + e_l`, 1-based.
    pub fn bump(&self, l: usize) -> MultiIndex {
        let mut c = self.components.clone();
        c[l - 1] += 1;
        MultiIndex { components: c }
    }

    /// `n_1 >= n_2 >= ... >= n_m`.
    pub fn is_decreasing(&self) -> bool {
        self.components.windows(2).all(|w| w[0] >= w[1])
    }

    /// All non-zero indices with `m` components and `|n| <= budget`, ordered
    /// by total and then lexicographically.
    pub fn enumerate(m: usize, budget: usize) -> Vec<MultiIndex> {
        let mut out = Vec::new();
        for total in 1..=budget {
            let mut cur = vec![0; m];
            compositions(total, 0, &mut cur, &mut out);
        }
        out
    }
}

fn compositions(left: usize, pos: usize, cur: &mut Vec<usize>, out: &mut Vec<MultiIndex>) {
    if pos + 1 == cur.len() {
        cur[pos] = left;
        out.push(MultiIndex {
            components: cur.clone(),
        });
        return;
    }
    for v in (0..=left).rev() {
        cur[pos] = v;
        compositions(left - v, pos + 1, cur, out);
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.components.iter().map(|c| c.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

impl FromStr for MultiIndex {
    type Err = Error;

    /// Accepts `(2,1)`, `2,1` or `[2, 1]`.
    fn from_str(s: &str) -> Result<MultiIndex> {
        let t = s.trim().trim_start_matches(['(', '[']).trim_end_matches([')', ']']);
        let comps = t
            .split(',')
            .map(|p| {
                p.trim()
                    .parse::<usize>()
                    .map_err(|e| Error::Parse(format!("multi-index `{s}`: {e}")))
            })
            .collect::<Result<Vec<_>>>()?;
        MultiIndex::new(comps)
    }
}

/// The system a type II family was solved for.
#[derive(Clone, Debug)]
pub enum SystemRef {
    Nikishin(Arc<NikishinSystem>),
    Angelesco(Arc<AngelescoSystem>),
}

impl SystemRef {
    pub fn m(&self) -> usize {
        match self {
            SystemRef::Nikishin(s) => s.m(),
            SystemRef::Angelesco(s) => s.m(),
        }
    }

    pub fn prec(&self) -> u32 {
        match self {
            SystemRef::Nikishin(s) => s.prec(),
            SystemRef::Angelesco(s) => s.prec(),
        }
    }

    pub fn quadrature_size(&self) -> usize {
        match self {
            SystemRef::Nikishin(s) => s.quadrature_size(),
            SystemRef::Angelesco(s) => s.measure(1).quadrature_size(),
        }
    }

    pub fn content_hash(&self) -> &str {
        match self {
            SystemRef::Nikishin(s) => s.content_hash(),
            SystemRef::Angelesco(s) => s.content_hash(),
        }
    }

    /// Measure defining the `j`-th block of type II conditions:
    /// `s_{1,j}` for Nikishin, `sigma_j` for Angelesco.
    pub fn orthogonality_measure(&self, j: usize) -> &Arc<Measure> {
        match self {
            SystemRef::Nikishin(s) => s.s(1, j),
            SystemRef::Angelesco(s) => s.measure(j),
        }
    }

    /// Interval carrying the polynomial basis used by the solver.
    pub fn basis_interval(&self) -> Interval {
        match self {
            SystemRef::Nikishin(s) => s.interval(1).clone(),
            SystemRef::Angelesco(s) => s.hull(),
        }
    }

    pub fn as_nikishin(&self) -> Result<&Arc<NikishinSystem>> {
        match self {
            SystemRef::Nikishin(s) => Ok(s),
            SystemRef::Angelesco(_) => invalid("operation is defined for Nikishin systems only"),
        }
    }
}

impl From<Arc<NikishinSystem>> for SystemRef {
    fn from(s: Arc<NikishinSystem>) -> Self {
        SystemRef::Nikishin(s)
    }
}

impl From<Arc<AngelescoSystem>> for SystemRef {
    fn from(s: Arc<AngelescoSystem>) -> Self {
        SystemRef::Angelesco(s)
    }
}

/// Smallest relative singular value accepted as full rank.
pub fn rank_tolerance(prec: u32) -> f64 {
    pow2(prec, -(prec as i32) / 2).to_f64()
}

/// Chebyshev values `T_0..T_deg` on `basis` at every node.
fn basis_table(basis: &Interval, nodes: &[Real], deg: usize) -> Vec<Vec<Real>> {
    nodes
        .iter()
        .map(|x| chebyshev_values(&basis.to_unit(x), deg))
        .collect()
}

/// Monomial coefficients in `x` of `sum c_i T_i((x - c)/h)`.
fn chebyshev_on(basis: &Interval, cheb: &[Real]) -> Vec<Real> {
    let u = chebyshev_to_monomial(cheb);
    compose_affine(&u, &basis.center(), &basis.half_length())
}

/// Polynomial part at infinity of `a(z) * s_hat(z)` from the moments
/// `mu_i = int x^i ds`: the coefficient of `z^r` is `sum_k a_k mu_{k-1-r}`.
fn polynomial_part(a: &[Real], moments: &[Real]) -> Vec<Real> {
    let p = a[0].prec();
    let d = a.len() - 1;
    if d == 0 {
        return vec![Float::new(p)];
    }
    (0..d)
        .map(|r| {
            let mut s = Float::new(p);
            for k in r + 1..=d {
                s += Float::with_val(p, &a[k] * &moments[k - 1 - r]);
            }
            s
        })
        .collect()
}

/// Solves a square system after row and column equilibration and returns
/// the solution together with its relative margin `sigma_min / sigma_max`.
fn equilibrated_solve(mut a: RealMatrix, mut b: Vec<Real>) -> Result<(Vec<Real>, f64)> {
    let rows = a.equilibrate_rows();
    for (bi, f) in b.iter_mut().zip(&rows) {
        *bi *= f;
    }
    let cols = a.equilibrate_cols();
    let margin = relative_margin(&a);
    let mut x = solve_qr(&a, &b)?;
    for (xi, f) in x.iter_mut().zip(&cols) {
        *xi *= f;
    }
    Ok((x, margin))
}

/// `|int f g dsigma| / int |f g| d|sigma|` with `f g` given at the nodes.
fn relative_integral(measure: &Measure, vals: &[Real]) -> (Real, Real) {
    let p = measure.prec();
    let mut s = Float::new(p);
    let mut a = Float::new(p);
    for (v, w) in vals.iter().zip(measure.weights()) {
        let t = Float::with_val(p, v * w);
        a += Float::with_val(p, t.abs_ref());
        s += t;
    }
    (measure.sign().apply(s), a)
}

fn ratio_f64(num: &Real, den: &Real) -> f64 {
    if den.is_zero() {
        if num.is_zero() {
            0.0
        } else {
            f64::INFINITY
        }
    } else {
        Float::with_val(num.prec(), num.abs_ref()).to_f64() / den.to_f64()
    }
}

/// Rebuilds a polynomial as `lead * prod (x - r)` when all its roots were
/// located, so that evaluation near the roots stays accurate.
fn attach_roots(p: Polynomial, interval: &Interval) -> Polynomial {
    if p.degree() == 0 {
        return p;
    }
    match crate::zeros::poly_real_zeros(&p, interval) {
        Ok(z) if z.len() == p.degree() && z.all_simple => p.with_roots(z.points),
        _ => p,
    }
}

/// Clones a cached error for repeated reporting.
fn replay(e: &Error) -> Error {
    e.duplicate()
}
