//! Harnesses comparing computed Hermite-Padé data against the limits
//! predicted by the vector equilibrium problem and the ratio boundary
//! value problem.

mod connection;
mod ratio;
mod weak;

use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{invalid, Result};
use crate::hermite_pade::{solve_type_i, solve_type_ii, MultiIndex, TypeIFamily, TypeIIFamily};
use crate::measures::NikishinSystem;
use crate::potential::{solve_vector_equilibrium, EquilibriumSolution, InteractionMatrix};
use crate::precision::Cplx;

pub use connection::{connection_check, d_inverse_matrix, d_matrix, ConnectionResiduals};
pub use ratio::{
    ratio_report, type_i_ratio_report, BoundaryRow, LaurentFit, RatioLimitEstimate, RatioOptions,
    RatioReport, TypeIRatioReport, EPSILON_LADDER,
};
pub use weak::{rate_report, weak_report, RateReport, RateRow, WeakReport};

/// A sequence of decreasing multi-indices with limit proportions `p` and
/// `n_1 - n_m <= diameter` throughout.
#[derive(Clone, Debug, Serialize)]
pub struct DegreeSchedule {
    proportions: Vec<f64>,
    indices: Vec<MultiIndex>,
    diameter: usize,
}

impl DegreeSchedule {
    /// `(k, ..., k)` for `k = from..=to`.
    pub fn diagonal(m: usize, from: usize, to: usize) -> Result<DegreeSchedule> {
        if m == 0 || from == 0 || from > to {
            return invalid(format!("diagonal schedule {from}..={to} with m = {m} is empty"));
        }
        let indices = (from..=to)
            .map(|k| MultiIndex::diagonal(m, k))
            .collect::<Result<Vec<_>>>()?;
        Ok(DegreeSchedule {
            proportions: vec![1.0 / m as f64; m],
            indices,
            diameter: 0,
        })
    }

    /// Every total `from..=to`, distributing degrees as evenly as possible
    /// with the earlier components taking the remainder.
    pub fn staircase(m: usize, from: usize, to: usize) -> Result<DegreeSchedule> {
        if m == 0 || from == 0 || from > to {
            return invalid(format!("staircase schedule {from}..={to} with m = {m} is empty"));
        }
        let indices = (from..=to)
            .map(|t| MultiIndex::new((0..m).map(|j| t / m + usize::from(j < t % m)).collect()))
            .collect::<Result<Vec<_>>>()?;
        Ok(DegreeSchedule {
            proportions: vec![1.0 / m as f64; m],
            indices,
            diameter: usize::from(m > 1),
        })
    }

    pub fn custom(proportions: Vec<f64>, indices: Vec<MultiIndex>, diameter: usize) -> Result<DegreeSchedule> {
        InteractionMatrix::nikishin(&proportions)?;
        if indices.is_empty() {
            return invalid("schedule is empty");
        }
        for n in &indices {
            if n.m() != proportions.len() {
                return invalid(format!("index {n} does not have {} components", proportions.len()));
            }
            if !n.is_decreasing() {
                return invalid(format!("index {n} is not decreasing"));
            }
            let c = n.components();
            if c[0] - c[c.len() - 1] > diameter {
                return invalid(format!("index {n} exceeds the diameter bound {diameter}"));
            }
        }
        Ok(DegreeSchedule {
            proportions,
            indices,
            diameter,
        })
    }

    pub fn m(&self) -> usize {
        self.proportions.len()
    }

    pub fn proportions(&self) -> &[f64] {
        &self.proportions
    }

    pub fn indices(&self) -> &[MultiIndex] {
        &self.indices
    }

    pub fn diameter(&self) -> usize {
        self.diameter
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }
}

/// Where the harnesses get their families from. The command line tool
/// plugs a disk cache in here.
pub trait FamilySource: Sync {
    fn type_ii(&self, n: &MultiIndex) -> Result<Arc<TypeIIFamily>>;
    fn type_i(&self, n: &MultiIndex) -> Result<Arc<TypeIFamily>>;
}

/// Solves every request afresh.
pub struct DirectSource(pub Arc<NikishinSystem>);

impl FamilySource for DirectSource {
    fn type_ii(&self, n: &MultiIndex) -> Result<Arc<TypeIIFamily>> {
        solve_type_ii(self.0.clone(), n).map(Arc::new)
    }

    fn type_i(&self, n: &MultiIndex) -> Result<Arc<TypeIFamily>> {
        solve_type_i(self.0.clone(), n).map(Arc::new)
    }
}

/// Vector equilibrium on the supports of `system` with the Nikishin
/// interaction matrix of `proportions`.
pub fn nikishin_equilibrium(
    system: &NikishinSystem,
    proportions: &[f64],
    grid: usize,
) -> Result<EquilibriumSolution> {
    if proportions.len() != system.m() {
        return invalid("proportions and system disagree on m");
    }
    let c = InteractionMatrix::nikishin(proportions)?;
    let sets: Vec<(f64, f64)> = (1..=system.m()).map(|j| system.interval(j).bounds_f64()).collect();
    solve_vector_equilibrium(&sets, &c, grid)
}

/// A named pass/fail line of a harness.
#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

impl Check {
    pub fn new(name: impl Into<String>, pass: bool, detail: impl Into<String>) -> Check {
        Check {
            name: name.into(),
            pass,
            detail: detail.into(),
        }
    }
}

pub(crate) fn to_c64(z: &Cplx) -> Complex64 {
    let (re, im) = z.to_f64();
    Complex64::new(re, im)
}

pub(crate) fn point_label(z: &Cplx) -> String {
    let (re, im) = z.to_f64();
    format!("{re}{im:+}i")
}

/// `|a / b - 1|`, the relative error used for logarithms of nth roots.
pub(crate) fn rel_log_error(measured: f64, predicted: f64) -> f64 {
    (measured / predicted - 1.0).abs()
}

pub(crate) fn solve_all_ii(
    src: &dyn FamilySource,
    indices: &[MultiIndex],
) -> Result<Vec<Arc<TypeIIFamily>>> {
    indices.par_iter().map(|n| src.type_ii(n)).collect()
}

pub(crate) fn solve_all_i(src: &dyn FamilySource, indices: &[MultiIndex]) -> Result<Vec<Arc<TypeIFamily>>> {
    indices.par_iter().map(|n| src.type_i(n)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn schedules() {
        let d = DegreeSchedule::diagonal(2, 2, 4).unwrap();
        assert_eq!(d.indices()[2].components(), &[4, 4]);
        assert_eq!(d.diameter(), 0);
        let s = DegreeSchedule::staircase(3, 1, 5).unwrap();
        let got: Vec<Vec<usize>> = s.indices().iter().map(|n| n.components().to_vec()).collect();
        assert_eq!(got, vec![vec![1, 0, 0], vec![1, 1, 0], vec![1, 1, 1], vec![2, 1, 1], vec![2, 2, 1]]);
        assert!(s.indices().iter().all(|n| n.is_decreasing()));
        assert!(DegreeSchedule::diagonal(2, 3, 2).is_err());
        let bad = vec![MultiIndex::new(vec![3, 1]).unwrap()];
        assert!(DegreeSchedule::custom(vec![0.5, 0.5], bad, 1).is_err());
        let rising = vec![MultiIndex::new(vec![1, 2]).unwrap()];
        assert!(DegreeSchedule::custom(vec![0.5, 0.5], rising, 3).is_err());
    }
}
