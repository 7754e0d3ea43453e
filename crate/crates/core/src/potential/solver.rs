use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use super::grid::{cell_pair, chebyshev_edges, GridMeasure};
use crate::error::{invalid, Error, Result};

/// Symmetric positive definite interaction matrix, optionally built from
/// limit proportions `p` as the tridiagonal Nikishin matrix with diagonal
/// `P_j^2` and off-diagonal `-P_j P_{j+1} / 2`.
#[derive(Clone, Debug, Serialize)]
pub struct InteractionMatrix {
    entries: Vec<Vec<f64>>,
    p: Option<Vec<f64>>,
    tails: Option<Vec<f64>>,
}

impl InteractionMatrix {
    /// Nikishin matrix for proportions `p_1 >= ... >= p_m > 0` summing to 1.
    pub fn nikishin(p: &[f64]) -> Result<InteractionMatrix> {
        if p.is_empty() {
            return invalid("proportions are empty");
        }
        if p.iter().any(|v| !(*v > 0.0 && *v <= 1.0)) {
            return invalid(format!("proportions {p:?} must lie in (0, 1]"));
        }
        let s: f64 = p.iter().sum();
        if (s - 1.0).abs() > 1e-12 {
            return invalid(format!("proportions sum to {s}, not 1"));
        }
        if p.windows(2).any(|w| w[0] < w[1]) {
            return invalid(format!("proportions {p:?} must be non-increasing"));
        }
        let m = p.len();
        let tails: Vec<f64> = (0..m).map(|j| p[j..].iter().sum()).collect();
        let mut e = vec![vec![0.0; m]; m];
        for j in 0..m {
            e[j][j] = tails[j] * tails[j];
            if j + 1 < m {
                e[j][j + 1] = -tails[j] * tails[j + 1] / 2.0;
                e[j + 1][j] = e[j][j + 1];
            }
        }
        let c = InteractionMatrix {
            entries: e,
            p: Some(p.to_vec()),
            tails: Some(tails),
        };
        c.check_positive()?;
        Ok(c)
    }

    pub fn general(entries: Vec<Vec<f64>>) -> Result<InteractionMatrix> {
        let m = entries.len();
        if m == 0 || entries.iter().any(|r| r.len() != m) {
            return invalid("interaction matrix must be square and non-empty");
        }
        for j in 0..m {
            for k in 0..m {
                if entries[j][k] != entries[k][j] {
                    return invalid("interaction matrix must be symmetric");
                }
            }
        }
        let c = InteractionMatrix {
            entries,
            p: None,
            tails: None,
        };
        c.check_positive()?;
        Ok(c)
    }

    fn check_positive(&self) -> Result<()> {
        for (r, d) in self.leading_minors().iter().enumerate() {
            if !(*d > 0.0) {
                return invalid(format!("leading minor of order {} is {d}", r + 1));
            }
        }
        Ok(())
    }

    /// Determinants of the leading principal sections.
    pub fn leading_minors(&self) -> Vec<f64> {
        let m = self.m();
        (1..=m)
            .map(|r| {
                DMatrix::from_fn(r, r, |i, j| self.entries[i][j]).determinant()
            })
            .collect()
    }

    pub fn m(&self) -> usize {
        self.entries.len()
    }

    pub fn get(&self, j: usize, k: usize) -> f64 {
        self.entries[j][k]
    }

    pub fn entries(&self) -> &[Vec<f64>] {
        &self.entries
    }

    pub fn proportions(&self) -> Option<&[f64]> {
        self.p.as_deref()
    }

    /// `P_1, ..., P_m`.
    pub fn tails(&self) -> Option<&[f64]> {
        self.tails.as_deref()
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SolverStep {
    pub iteration: usize,
    pub energy: f64,
    pub kkt: f64,
    pub active: usize,
}

/// Solution of a (vector) equilibrium problem on grids.
#[derive(Clone, Debug, Serialize)]
pub struct EquilibriumSolution {
    pub sets: Vec<(f64, f64)>,
    pub matrix: InteractionMatrix,
    pub lambdas: Vec<GridMeasure>,
    /// `omega_j`, the constant value of `W_j` on the support of `lambda_j`.
    pub omegas: Vec<f64>,
    /// Discrete KKT residual of the returned weights.
    pub kkt: f64,
    /// Largest spread of the pointwise `W_j` over the support cells.
    pub spread: f64,
    pub log: Vec<SolverStep>,
}

impl EquilibriumSolution {
    pub fn m(&self) -> usize {
        self.lambdas.len()
    }

    /// `W_j(z) = sum_k c_{j,k} V^{lambda_k}(z)`, 1-based.
    pub fn w_potential(&self, j: usize, z: Complex64) -> f64 {
        (0..self.m())
            .map(|k| {
                let c = self.matrix.get(j - 1, k);
                if c == 0.0 {
                    0.0
                } else {
                    c * self.lambdas[k].log_potential(z)
                }
            })
            .sum()
    }

    /// `V^{lambda_j}(z)`, 1-based.
    pub fn potential(&self, j: usize, z: Complex64) -> f64 {
        self.lambdas[j - 1].log_potential(z)
    }

    /// `omega'_j = P_j^2 omega_j - P_j P_{j-1} omega_{j-1}`.
    pub fn omegas_prime(&self) -> Option<Vec<f64>> {
        let t = self.matrix.tails()?;
        Some(
            (0..t.len())
                .map(|j| {
                    let prev = if j == 0 { 0.0 } else { t[j] * t[j - 1] * self.omegas[j - 1] };
                    t[j] * t[j] * self.omegas[j] - prev
                })
                .collect(),
        )
    }

    /// `sum_{k<=j} omega_k / P_k`, 1-based.
    pub fn omega_sum(&self, j: usize) -> Result<f64> {
        let t = self
            .matrix
            .tails()
            .ok_or_else(|| Error::Invalid("matrix has no proportions".into()))?;
        Ok((0..j).map(|k| self.omegas[k] / t[k]).sum())
    }
}

/// Scalar equilibrium in an external field.
#[derive(Clone, Debug, Serialize)]
pub struct ExternalFieldSolution {
    pub lambda: GridMeasure,
    /// The equilibrium constant `w`.
    pub w: f64,
    pub kkt: f64,
    pub spread: f64,
    pub log: Vec<SolverStep>,
}

/// KKT tolerance of the discrete problem.
pub const KKT_TOLERANCE: f64 = 1e-6;
/// Smallest accepted number of cells per set.
pub const MIN_GRID: usize = 200;
const MAX_ACTIVE_SET_STEPS: usize = 60;
const MAX_GRADIENT_STEPS: usize = 100_000;

struct Problem {
    edges: Vec<Vec<f64>>,
    offsets: Vec<usize>,
    masses: Vec<f64>,
    /// cell-averaged field per block
    field: Vec<f64>,
    /// cell-pair kernel with the interaction coefficients folded in
    a: DMatrix<f64>,
}

impl Problem {
    fn build(sets: &[(f64, f64)], c: &[Vec<f64>], g: usize, masses: Vec<f64>, field: Vec<f64>) -> Problem {
        let m = sets.len();
        let edges: Vec<Vec<f64>> = sets.iter().map(|(a, b)| chebyshev_edges(*a, *b, g)).collect();
        let mut offsets = vec![0];
        for e in &edges {
            offsets.push(offsets.last().unwrap() + e.len() - 1);
        }
        let n = offsets[m];
        let cells: Vec<(usize, f64, f64)> = edges
            .iter()
            .enumerate()
            .flat_map(|(j, e)| e.windows(2).map(move |w| (j, w[0], w[1])))
            .collect();
        let rows: Vec<Vec<f64>> = cells
            .par_iter()
            .map(|&(j, a0, a1)| {
                cells
                    .iter()
                    .map(|&(k, b0, b1)| {
                        let ck = c[j][k];
                        if ck == 0.0 {
                            0.0
                        } else {
                            ck * cell_pair(a0, a1, b0, b1)
                        }
                    })
                    .collect()
            })
            .collect();
        let a = DMatrix::from_fn(n, n, |i, j| rows[i][j]);
        Problem {
            edges,
            offsets,
            masses,
            field,
            a,
        }
    }

    fn n(&self) -> usize {
        self.a.nrows()
    }

    fn m(&self) -> usize {
        self.masses.len()
    }

    fn block_of(&self, i: usize) -> usize {
        self.offsets.partition_point(|o| *o <= i) - 1
    }

    /// Discrete `W` per cell: `A w + field`.
    fn gradient(&self, w: &DVector<f64>) -> DVector<f64> {
        &self.a * w + DVector::from_column_slice(&self.field)
    }

    fn energy(&self, w: &DVector<f64>) -> f64 {
        w.dot(&(&self.a * w)) + 2.0 * w.dot(&DVector::from_column_slice(&self.field))
    }

    /// Returns per-block constants and the KKT residual.
    fn kkt(&self, w: &DVector<f64>) -> (Vec<f64>, f64) {
        let gr = self.gradient(w);
        let mut omegas = vec![0.0; self.m()];
        let mut res: f64 = 0.0;
        for j in 0..self.m() {
            let (lo, hi) = (self.offsets[j], self.offsets[j + 1]);
            let thr = self.masses[j] / (10.0 * (hi - lo) as f64);
            let mut on: Vec<f64> = (lo..hi).filter(|&i| w[i] > thr).map(|i| gr[i]).collect();
            if on.is_empty() {
                on = (lo..hi).filter(|&i| w[i] > 0.0).map(|i| gr[i]).collect();
            }
            on.sort_by(|a, b| a.partial_cmp(b).unwrap());
            let om = on[on.len() / 2];
            omegas[j] = om;
            for i in lo..hi {
                if w[i] > 0.0 {
                    res = res.max((gr[i] - om).abs());
                }
                res = res.max(om - gr[i]);
            }
        }
        (omegas, res)
    }

    /// Solves the stationarity equations with the cells outside `active`
    /// pinned to zero.
    fn solve_active(&self, active: &[bool]) -> Option<(DVector<f64>, Vec<f64>)> {
        let idx: Vec<usize> = (0..self.n()).filter(|&i| active[i]).collect();
        let na = idx.len();
        let m = self.m();
        let mut k = DMatrix::zeros(na + m, na + m);
        let mut rhs = DVector::zeros(na + m);
        for (r, &i) in idx.iter().enumerate() {
            for (s, &j) in idx.iter().enumerate() {
                k[(r, s)] = self.a[(i, j)];
            }
            let b = self.block_of(i);
            k[(r, na + b)] = -1.0;
            k[(na + b, r)] = 1.0;
            rhs[r] = -self.field[i];
        }
        for j in 0..m {
            rhs[na + j] = self.masses[j];
        }
        let sol = k.lu().solve(&rhs)?;
        let mut w = DVector::zeros(self.n());
        for (r, &i) in idx.iter().enumerate() {
            w[i] = sol[r];
        }
        Some((w, (0..m).map(|j| sol[na + j]).collect()))
    }

    fn solve(&self) -> Result<(DVector<f64>, Vec<SolverStep>)> {
        let n = self.n();
        let mut active = vec![true; n];
        let mut log = Vec::new();
        let mut best: Option<DVector<f64>> = None;
        for it in 0..MAX_ACTIVE_SET_STEPS {
            let Some((w, omegas)) = self.solve_active(&active) else {
                break;
            };
            let negative: Vec<usize> = (0..n).filter(|&i| active[i] && w[i] < 0.0).collect();
            if !negative.is_empty() {
                for i in negative {
                    active[i] = false;
                }
                log.push(SolverStep {
                    iteration: it,
                    energy: f64::NAN,
                    kkt: f64::NAN,
                    active: active.iter().filter(|a| **a).count(),
                });
                continue;
            }
            let gr = self.gradient(&w);
            let violators: Vec<usize> = (0..n)
                .filter(|&i| !active[i] && gr[i] < omegas[self.block_of(i)] - 1e-12)
                .collect();
            let (_, res) = self.kkt(&w);
            log.push(SolverStep {
                iteration: it,
                energy: self.energy(&w),
                kkt: res,
                active: active.iter().filter(|a| **a).count(),
            });
            if violators.is_empty() {
                best = Some(w);
                break;
            }
            for i in violators {
                active[i] = true;
            }
        }
        if let Some(w) = best {
            return Ok((w, log));
        }
        // fall back to projected gradient from the uniform start
        let (w, mut more) = self.projected_gradient()?;
        log.append(&mut more);
        Ok((w, log))
    }

    /// Projected gradient onto the product of simplices with
    /// Barzilai-Borwein steps and halving until the energy decreases.
    fn projected_gradient(&self) -> Result<(DVector<f64>, Vec<SolverStep>)> {
        let n = self.n();
        let mut w = DVector::zeros(n);
        for j in 0..self.m() {
            let (lo, hi) = (self.offsets[j], self.offsets[j + 1]);
            for i in lo..hi {
                w[i] = self.masses[j] / (hi - lo) as f64;
            }
        }
        let mut e = self.energy(&w);
        let mut g = self.gradient(&w) * 2.0;
        let mut step = 1.0 / self.a.norm();
        let mut log = Vec::new();
        for it in 0..MAX_GRADIENT_STEPS {
            let mut t = step;
            let (next, en) = loop {
                let cand = self.project(&(&w - &g * t));
                let en = self.energy(&cand);
                if en <= e || t < 1e-300 {
                    break (cand, en);
                }
                t *= 0.5;
            };
            let g2 = self.gradient(&next) * 2.0;
            let s = &next - &w;
            let y = &g2 - &g;
            let sy = s.dot(&y);
            step = if sy > 0.0 { s.dot(&s) / sy } else { step * 2.0 };
            w = next;
            g = g2;
            e = en;
            if it % 100 == 0 {
                let (_, res) = self.kkt(&w);
                log.push(SolverStep {
                    iteration: it,
                    energy: e,
                    kkt: res,
                    active: w.iter().filter(|v| **v > 0.0).count(),
                });
                if res < KKT_TOLERANCE * 1e-2 {
                    return Ok((w, log));
                }
            }
        }
        let (_, res) = self.kkt(&w);
        if res < KKT_TOLERANCE {
            return Ok((w, log));
        }
        Err(Error::NonConvergence(format!(
            "equilibrium solver stopped with KKT residual {res:e}"
        )))
    }

    fn project(&self, v: &DVector<f64>) -> DVector<f64> {
        let mut out = v.clone();
        for j in 0..self.m() {
            let (lo, hi) = (self.offsets[j], self.offsets[j + 1]);
            let mut s: Vec<f64> = v.rows(lo, hi - lo).iter().copied().collect();
            s.sort_by(|a, b| b.partial_cmp(a).unwrap());
            let mut acc = 0.0;
            let mut theta = 0.0;
            for (k, x) in s.iter().enumerate() {
                acc += x;
                let t = (acc - self.masses[j]) / (k + 1) as f64;
                if x - t > 0.0 {
                    theta = t;
                }
            }
            for i in lo..hi {
                out[i] = (v[i] - theta).max(0.0);
            }
        }
        out
    }

    fn measures(&self, sets: &[(f64, f64)], w: &DVector<f64>) -> Result<Vec<GridMeasure>> {
        (0..self.m())
            .map(|j| {
                let (lo, hi) = (self.offsets[j], self.offsets[j + 1]);
                let weights = (lo..hi).map(|i| w[i].max(0.0)).collect();
                GridMeasure::new(sets[j].0, sets[j].1, self.edges[j].clone(), weights)
            })
            .collect()
    }
}

/// Median of `values` over the cells with weight above `mass / (10 G)`.
fn heavy_median(mu: &GridMeasure, values: &[f64]) -> f64 {
    let thr = mu.mass() / (10.0 * mu.len() as f64);
    let mut on: Vec<f64> = mu
        .weights()
        .iter()
        .zip(values)
        .filter(|(w, _)| **w > thr)
        .map(|(_, v)| *v)
        .collect();
    on.sort_by(|a, b| a.partial_cmp(b).unwrap());
    on[on.len() / 2]
}

fn spread(mu: &GridMeasure, values: &[f64], omega: f64) -> f64 {
    let thr = mu.mass() / (10.0 * mu.len() as f64);
    mu.weights()
        .iter()
        .zip(values)
        .filter(|(w, _)| **w > thr)
        .map(|(_, v)| (v - omega).abs())
        .fold(0.0, f64::max)
}

fn check_sets(sets: &[(f64, f64)], c: &InteractionMatrix, g: usize) -> Result<()> {
    if sets.len() != c.m() {
        return invalid(format!("{} sets for a matrix of order {}", sets.len(), c.m()));
    }
    if g < MIN_GRID {
        return invalid(format!("grid size {g} is below {MIN_GRID}"));
    }
    for (j, (a, b)) in sets.iter().enumerate() {
        if !(a < b) {
            return invalid(format!("set {} is empty", j + 1));
        }
        for (k, (c2, d2)) in sets.iter().enumerate().skip(j + 1) {
            let overlap = a.max(*c2) <= b.min(*d2);
            if overlap && c.get(j, k) < 0.0 {
                return invalid(format!(
                    "sets {} and {} meet but interact with a negative coefficient",
                    j + 1,
                    k + 1
                ));
            }
        }
    }
    Ok(())
}

/// Vector equilibrium of unit masses on `sets` for the interaction matrix
/// `c`, on `g` cells per set.
pub fn solve_vector_equilibrium(
    sets: &[(f64, f64)],
    c: &InteractionMatrix,
    g: usize,
) -> Result<EquilibriumSolution> {
    check_sets(sets, c, g)?;
    let m = sets.len();
    let prob = Problem::build(sets, c.entries(), g, vec![1.0; m], vec![0.0; m * g]);
    let (w, log) = prob.solve()?;
    let (_, kkt) = prob.kkt(&w);
    let lambdas = prob.measures(sets, &w)?;
    let mut sol = EquilibriumSolution {
        sets: sets.to_vec(),
        matrix: c.clone(),
        lambdas,
        omegas: vec![0.0; m],
        kkt,
        spread: 0.0,
        log,
    };
    let mut worst: f64 = 0.0;
    for j in 1..=m {
        let nodes = sol.lambdas[j - 1].nodes();
        let vals: Vec<f64> = nodes
            .par_iter()
            .map(|x| sol.w_potential(j, Complex64::new(*x, 0.0)))
            .collect();
        let om = heavy_median(&sol.lambdas[j - 1], &vals);
        worst = worst.max(spread(&sol.lambdas[j - 1], &vals, om));
        sol.omegas[j - 1] = om;
    }
    sol.spread = worst;
    Ok(sol)
}

/// Unit equilibrium measure on `[a, b]` in the external field `phi`:
/// `V^lambda + phi = w` on the support and `>= w` on `[a, b]`.
pub fn solve_external_field_equilibrium(
    set: (f64, f64),
    phi: &(dyn Fn(f64) -> f64 + Sync),
    g: usize,
) -> Result<ExternalFieldSolution> {
    let c = InteractionMatrix::general(vec![vec![1.0]])?;
    check_sets(&[set], &c, g)?;
    let edges = chebyshev_edges(set.0, set.1, g);
    // three-point Gauss average of phi per cell
    let xs = [-0.774_596_669_241_483_4, 0.0, 0.774_596_669_241_483_4];
    let ws = [5.0 / 18.0, 8.0 / 18.0, 5.0 / 18.0];
    let field: Vec<f64> = edges
        .par_windows(2)
        .map(|e| {
            let (cc, h) = (0.5 * (e[0] + e[1]), 0.5 * (e[1] - e[0]));
            xs.iter().zip(ws).map(|(x, w)| w * phi(cc + h * x)).sum()
        })
        .collect();
    let prob = Problem::build(&[set], c.entries(), g, vec![1.0], field);
    let (w, log) = prob.solve()?;
    let (_, kkt) = prob.kkt(&w);
    let lambda = prob.measures(&[set], &w)?.remove(0);
    let nodes = lambda.nodes();
    let vals: Vec<f64> = nodes
        .par_iter()
        .map(|x| lambda.log_potential(Complex64::new(*x, 0.0)) + phi(*x))
        .collect();
    let om = heavy_median(&lambda, &vals);
    let sp = spread(&lambda, &vals, om);
    Ok(ExternalFieldSolution {
        lambda,
        w: om,
        kkt,
        spread: sp,
        log,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potential::grid::{arcsine_potential, Arcsine};
    use crate::zeros::kolmogorov_distance;
    use approx::assert_relative_eq;

    #[test]
    fn nikishin_matrices() {
        let c = InteractionMatrix::nikishin(&[0.5, 0.5]).unwrap();
        assert_eq!(c.entries(), &[vec![1.0, -0.25], vec![-0.25, 0.25]]);
        let c = InteractionMatrix::nikishin(&[1.0]).unwrap();
        assert_eq!(c.entries(), &[vec![1.0]]);
        let t = 1.0 / 3.0;
        let c = InteractionMatrix::nikishin(&[t, t, t]).unwrap();
        assert_relative_eq!(c.get(0, 0), 1.0, epsilon = 1e-15);
        assert_relative_eq!(c.get(1, 1), 4.0 / 9.0, epsilon = 1e-15);
        assert_relative_eq!(c.get(2, 2), 1.0 / 9.0, epsilon = 1e-15);
        assert_relative_eq!(c.get(0, 1), -1.0 / 3.0, epsilon = 1e-15);
        assert_relative_eq!(c.get(1, 2), -1.0 / 9.0, epsilon = 1e-15);
        assert_eq!(c.get(0, 2), 0.0);
        assert!(c.leading_minors().iter().all(|d| *d > 0.0));
    }

    #[test]
    fn bad_proportions() {
        assert!(InteractionMatrix::nikishin(&[0.3, 0.7]).is_err());
        assert!(InteractionMatrix::nikishin(&[0.5, 0.4]).is_err());
        assert!(InteractionMatrix::nikishin(&[1.5, -0.5]).is_err());
        assert!(InteractionMatrix::nikishin(&[]).is_err());
        assert!(InteractionMatrix::general(vec![vec![1.0, 2.0], vec![2.0, 1.0]]).is_err());
    }

    #[test]
    fn arcsine_recovered() {
        let c = InteractionMatrix::general(vec![vec![1.0]]).unwrap();
        let sol = solve_vector_equilibrium(&[(-1.0, 1.0)], &c, 2000).unwrap();
        assert!(sol.kkt < KKT_TOLERANCE, "{}", sol.kkt);
        assert!((sol.omegas[0] - 2f64.ln()).abs() < 1e-3, "{}", sol.omegas[0]);
        let d = kolmogorov_distance(&sol.lambdas[0], &Arcsine { a: -1.0, b: 1.0 });
        assert!(d < 1e-3, "{d}");
        assert_relative_eq!(sol.lambdas[0].mass(), 1.0, epsilon = 1e-12);
        let z = Complex64::new(0.3, 0.4);
        assert!((sol.potential(1, z) - arcsine_potential(-1.0, 1.0, z)).abs() < 1e-3);
    }

    #[test]
    fn capacity_scaling() {
        let c = InteractionMatrix::nikishin(&[1.0]).unwrap();
        let one = solve_vector_equilibrium(&[(-1.0, 1.0)], &c, 400).unwrap();
        let two = solve_vector_equilibrium(&[(-2.0, 2.0)], &c, 400).unwrap();
        assert!(two.omegas[0].abs() < 1e-3, "{}", two.omegas[0]);
        assert!((two.omegas[0] - one.omegas[0] + 2f64.ln()).abs() < 1e-3);
    }

    #[test]
    fn two_sets_certify() {
        let c = InteractionMatrix::nikishin(&[0.5, 0.5]).unwrap();
        let sol = solve_vector_equilibrium(&[(-1.0, 1.0), (2.0, 3.0)], &c, 400).unwrap();
        for l in &sol.lambdas {
            assert_relative_eq!(l.mass(), 1.0, epsilon = 1e-10);
        }
        assert!(sol.kkt < KKT_TOLERANCE, "{}", sol.kkt);
        assert!(sol.spread < 1e-3, "{}", sol.spread);
        // W_j >= omega_j across the set; the endpoints themselves sit inside
        // a cell whose density is flattened, so they are skipped
        for j in 1..=2 {
            let (a, b) = sol.sets[j - 1];
            for i in 1..50 {
                let x = a + (b - a) * i as f64 / 50.0;
                let w = sol.w_potential(j, Complex64::new(x, 0.0));
                assert!(w > sol.omegas[j - 1] - 1e-3, "{j} {x} {w} {}", sol.omegas[j - 1]);
            }
        }
        let wp = sol.omegas_prime().unwrap();
        assert_relative_eq!(wp[0], sol.omegas[0], epsilon = 1e-15);
        assert_relative_eq!(wp[1], 0.25 * sol.omegas[1] - 0.5 * sol.omegas[0], epsilon = 1e-15);
    }

    #[test]
    fn external_field_shift_and_cross_check() {
        let zero = solve_external_field_equilibrium((-1.0, 1.0), &|_| 0.0, 1000).unwrap();
        assert!((zero.w - 2f64.ln()).abs() < 1e-3);
        let shifted = solve_external_field_equilibrium((-1.0, 1.0), &|_| 0.7, 1000).unwrap();
        assert!((shifted.w - zero.w - 0.7).abs() < 1e-9);
        assert!(kolmogorov_distance(&zero.lambda, &shifted.lambda) < 1e-9);

        let c = InteractionMatrix::nikishin(&[0.5, 0.5]).unwrap();
        let vec = solve_vector_equilibrium(&[(-1.0, 1.0), (2.0, 3.0)], &c, 400).unwrap();
        let ratio = c.get(0, 1) / c.get(0, 0);
        let l2 = vec.lambdas[1].clone();
        let phi = move |x: f64| ratio * l2.log_potential(Complex64::new(x, 0.0));
        let ext = solve_external_field_equilibrium((-1.0, 1.0), &phi, 400).unwrap();
        assert!(kolmogorov_distance(&ext.lambda, &vec.lambdas[0]) < 1e-6);
        assert!((ext.w - vec.omegas[0] / c.get(0, 0)).abs() < 1e-6);
    }

    #[test]
    fn small_grids_are_rejected() {
        let c = InteractionMatrix::nikishin(&[1.0]).unwrap();
        assert!(solve_vector_equilibrium(&[(-1.0, 1.0)], &c, 50).is_err());
        assert!(solve_vector_equilibrium(&[(1.0, -1.0)], &c, 300).is_err());
    }
}
