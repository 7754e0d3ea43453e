use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use rug::Float;
use serde::Serialize;

use super::{rank_tolerance, solve_type_i, solve_type_ii, MultiIndex, SystemRef};
use crate::error::{invalid, Result};
use crate::measures::{Interval, NikishinSystem};
use crate::poly::chebyshev_values;
use crate::precision::{pi, Real};

#[derive(Clone, Debug, Serialize)]
pub struct CertifyRow {
    pub index: Vec<usize>,
    /// `"I"` or `"II"`.
    pub kind: &'static str,
    pub margin: Option<f64>,
    pub residual: Option<f64>,
    pub pass: bool,
    pub error: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct CertifyReport {
    pub budget: usize,
    pub tolerance: f64,
    pub rows: Vec<CertifyRow>,
    pub pass: bool,
}

impl CertifyReport {
    pub fn failures(&self) -> impl Iterator<Item = &CertifyRow> {
        self.rows.iter().filter(|r| !r.pass)
    }

    /// Smallest recorded margin over both kinds.
    pub fn min_margin(&self) -> f64 {
        self.rows
            .iter()
            .filter_map(|r| r.margin)
            .fold(f64::INFINITY, f64::min)
    }
}

/// Solves both problems for every non-zero index with `|n| <= budget`
/// and records margins. Failures become report rows.
pub fn certify_perfectness(system: &Arc<NikishinSystem>, budget: usize) -> CertifyReport {
    let tol = rank_tolerance(system.prec());
    let indices = MultiIndex::enumerate(system.m(), budget);
    let sref = SystemRef::from(system.clone());
    let rows: Vec<CertifyRow> = indices
        .par_iter()
        .flat_map_iter(|n| {
            let one = match solve_type_i(system.clone(), n) {
                Ok(f) => row(n, "I", Some(f.margin()), Some(f.residual()), tol, None),
                Err(e) => row(n, "I", None, None, tol, Some(e.to_string())),
            };
            let two = match solve_type_ii(sref.clone(), n) {
                Ok(f) => row(n, "II", Some(f.margin()), Some(f.residual()), tol, None),
                Err(e) => row(n, "II", None, None, tol, Some(e.to_string())),
            };
            [one, two]
        })
        .collect();
    let pass = rows.iter().all(|r| r.pass);
    CertifyReport {
        budget,
        tolerance: tol,
        rows,
        pass,
    }
}

fn row(
    n: &MultiIndex,
    kind: &'static str,
    margin: Option<f64>,
    residual: Option<f64>,
    tol: f64,
    error: Option<String>,
) -> CertifyRow {
    CertifyRow {
        index: n.components().to_vec(),
        kind,
        pass: error.is_none() && margin.is_some_and(|m| m > tol),
        margin,
        residual,
        error,
    }
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct ProbeTrial {
    pub sign_changes: usize,
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct ProbeReport {
    /// `(n_0, n_1, ..., n_m)`.
    pub index: Vec<usize>,
    pub interval: (f64, f64),
    pub bound: usize,
    pub seed: u64,
    pub trials: Vec<ProbeTrial>,
    pub pass: bool,
}

/// Draws random `p_0, ..., p_m` with `deg p_k <= n_k - 1` and counts sign
/// changes of `p_0 + sum p_k s_hat_{1,k}` on `probe` (which must avoid
/// `Delta_1`). `n` lists `n_0, ..., n_m`; with only `m` entries `p_0 = 0`.
/// Coefficients are uniform in `[-1, 1]` in the Chebyshev basis of `probe`.
pub fn at_system_probe(
    system: &NikishinSystem,
    n: &[usize],
    trials: usize,
    probe: &Interval,
    seed: u64,
) -> Result<ProbeReport> {
    let m = system.m();
    let full: Vec<usize> = match n.len() {
        l if l == m + 1 => n.to_vec(),
        l if l == m => std::iter::once(0).chain(n.iter().copied()).collect(),
        l => return invalid(format!("probe index has {l} entries, expected {m} or {}", m + 1)),
    };
    let total: usize = full.iter().sum();
    if total == 0 {
        return invalid("probe index must be non-zero");
    }
    if !probe.disjoint(system.interval(1)) {
        return invalid(format!("probe interval {probe} meets {}", system.interval(1)));
    }
    let p = system.prec();
    let grid = chebyshev_points(probe, 32 * total + 256);
    let deg = full.iter().copied().max().unwrap();
    // basis[g][i] = T_i on the probe, transforms[g][k] = s_hat_{1,k}
    let basis: Vec<Vec<Real>> = grid
        .iter()
        .map(|x| chebyshev_values(&probe.to_unit(x), deg))
        .collect();
    let mut transforms = Vec::with_capacity(grid.len());
    for x in &grid {
        let mut row = vec![Float::with_val(p, 1)];
        for k in 1..=m {
            row.push(system.s_hat_real(1, k, x)?);
        }
        transforms.push(row);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let bound = total - 1;
    let mut out = Vec::with_capacity(trials);
    for _ in 0..trials {
        let coeffs: Vec<Vec<f64>> = full
            .iter()
            .map(|&nk| (0..nk).map(|_| rng.random_range(-1.0..=1.0)).collect())
            .collect();
        let mut prev = 0i8;
        let mut changes = 0;
        for (b, t) in basis.iter().zip(&transforms) {
            let mut v = Float::new(p);
            for (k, ck) in coeffs.iter().enumerate() {
                if ck.is_empty() {
                    continue;
                }
                let mut pk = Float::new(p);
                for (i, c) in ck.iter().enumerate() {
                    pk += Float::with_val(p, &b[i] * *c);
                }
                v += pk * &t[k];
            }
            let s = if v.is_zero() {
                0
            } else if v.is_sign_negative() {
                -1
            } else {
                1
            };
            if s != 0 {
                if prev != 0 && s != prev {
                    changes += 1;
                }
                prev = s;
            }
        }
        out.push(ProbeTrial {
            sign_changes: changes,
            pass: changes <= bound,
        });
    }
    let pass = out.iter().all(|t| t.pass);
    Ok(ProbeReport {
        index: full,
        interval: probe.bounds_f64(),
        bound,
        seed,
        trials: out,
        pass,
    })
}

fn chebyshev_points(interval: &Interval, g: usize) -> Vec<Real> {
    let p = interval.prec();
    let pi = pi(p);
    (0..g)
        .map(|i| {
            let th = Float::with_val(p, &pi * (2 * (g - 1 - i) + 1) as u32) / (2 * g) as u32;
            interval.from_unit(&th.cos())
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::{DensityClass, Measure};

    const P: u32 = 256;

    fn reference(nq: usize) -> Arc<NikishinSystem> {
        let s1 = Measure::new(Interval::from_f64(P, -1.0, 1.0).unwrap(), DensityClass::chebyshev(P), nq).unwrap();
        let s2 = Measure::new(Interval::from_f64(P, 2.0, 3.0).unwrap(), DensityClass::Legendre, nq).unwrap();
        NikishinSystem::new(vec![s1, s2]).unwrap()
    }

    #[test]
    fn single_measure_budget_five() {
        let s = Measure::new(Interval::from_f64(P, 0.0, 1.0).unwrap(), DensityClass::Legendre, 24).unwrap();
        let sys = NikishinSystem::new(vec![s]).unwrap();
        let r = certify_perfectness(&sys, 5);
        assert_eq!(r.rows.len(), 10);
        assert!(r.pass, "{:?}", r.failures().collect::<Vec<_>>());
    }

    #[test]
    fn reference_budget_six() {
        let r = certify_perfectness(&reference(40), 6);
        assert_eq!(r.rows.len(), 54);
        assert!(r.pass, "{:?}", r.failures().collect::<Vec<_>>());
        assert!(r.min_margin() > 2f64.powi(-128));
    }

    #[test]
    fn probe_counts_are_bounded_and_reproducible() {
        let sys = reference(32);
        let probe = Interval::from_f64(P, 2.5, 2.9).unwrap();
        let a = at_system_probe(&sys, &[1, 1], 100, &probe, 7).unwrap();
        assert!(a.pass);
        assert_eq!(a.bound, 1);
        let b = at_system_probe(&sys, &[1, 1], 100, &probe, 7).unwrap();
        assert_eq!(a.trials, b.trials);
        let c = at_system_probe(&sys, &[1, 0], 5, &probe, 1).unwrap();
        assert!(c.trials.iter().all(|t| t.sign_changes == 0));
    }

    #[test]
    fn probe_rejects_overlap() {
        let sys = reference(16);
        let probe = Interval::from_f64(P, 0.5, 2.0).unwrap();
        assert!(at_system_probe(&sys, &[1, 1], 1, &probe, 0).is_err());
    }
}
