use std::sync::{Arc, OnceLock};

use rug::Float;
use sha2::{Digest, Sha256};

use crate::error::{invalid, Result};
use crate::precision::{Cplx, Real};

use super::{Interval, Measure};

/// `<alpha, beta>`: `d alpha` multiplied by the Cauchy transform of `beta`.
pub fn product_measure(alpha: &Arc<Measure>, beta: &Arc<Measure>) -> Result<Measure> {
    Measure::product(alpha, beta)
}

/// Nikishin system `N(sigma_1, ..., sigma_m)` with every nested measure
/// `s_{j,k}` precomputed. Indices are 1-based as in the usual notation;
/// `s(j, k)` with `j > k` is the reversed chain.
#[derive(Debug)]
pub struct NikishinSystem {
    generators: Vec<Arc<Measure>>,
    /// chains[j-1][k-1] = s_{j,k}
    chains: Vec<Vec<Arc<Measure>>>,
    /// node_cache[j-1][k-1]: s_hat_{j,k} at the nodes of sigma_{j-1}
    node_cache: Vec<Vec<OnceLock<Vec<Real>>>>,
    hash: String,
}

impl NikishinSystem {
    pub fn new(generators: Vec<Measure>) -> Result<Arc<NikishinSystem>> {
        let m = generators.len();
        if m == 0 {
            return invalid("a Nikishin system needs at least one generator");
        }
        let prec = generators[0].prec();
        let nq = generators[0].quadrature_size();
        for g in &generators {
            if g.prec() != prec {
                return invalid("generators must share one precision");
            }
            if g.quadrature_size() != nq {
                return invalid("generators must share one quadrature size");
            }
            if g.class().is_none() {
                return invalid("generators must be plain densities");
            }
        }
        for w in generators.windows(2) {
            if !w[0].interval().disjoint(w[1].interval()) {
                return invalid(format!(
                    "consecutive supports {} and {} overlap",
                    w[0].interval(),
                    w[1].interval()
                ));
            }
        }
        let generators: Vec<Arc<Measure>> = generators.into_iter().map(Arc::new).collect();
        let mut chains: Vec<Vec<Option<Arc<Measure>>>> = vec![vec![None; m]; m];
        for j in 0..m {
            chains[j][j] = Some(generators[j].clone());
        }
        for k in 0..m {
            for j in (0..k).rev() {
                let inner = chains[j + 1][k].clone().unwrap();
                chains[j][k] = Some(Arc::new(product_measure(&generators[j], &inner)?));
            }
            for j in k + 1..m {
                let inner = chains[j - 1][k].clone().unwrap();
                chains[j][k] = Some(Arc::new(product_measure(&generators[j], &inner)?));
            }
        }
        let chains = chains
            .into_iter()
            .map(|row| row.into_iter().map(Option::unwrap).collect())
            .collect();
        let hash = content_hash("nikishin", &generators);
        let node_cache = (0..m).map(|_| (0..m).map(|_| OnceLock::new()).collect()).collect();
        Ok(Arc::new(NikishinSystem {
            generators,
            chains,
            node_cache,
            hash,
        }))
    }

    pub fn m(&self) -> usize {
        self.generators.len()
    }

    pub fn prec(&self) -> u32 {
        self.generators[0].prec()
    }

    pub fn quadrature_size(&self) -> usize {
        self.generators[0].quadrature_size()
    }

    /// `sigma_j`, 1-based.
    pub fn generator(&self, j: usize) -> &Arc<Measure> {
        &self.generators[j - 1]
    }

    pub fn generators(&self) -> &[Arc<Measure>] {
        &self.generators
    }

    /// `Delta_j`, 1-based.
    pub fn interval(&self, j: usize) -> &Interval {
        self.generators[j - 1].interval()
    }

    /// `s_{j,k}`, 1-based.
    pub fn s(&self, j: usize, k: usize) -> &Arc<Measure> {
        &self.chains[j - 1][k - 1]
    }

    /// `s_{1,k}` for `k = 1..m`.
    pub fn product_measures(&self) -> Vec<&Arc<Measure>> {
        (1..=self.m()).map(|k| self.s(1, k)).collect()
    }

    /// Cauchy transform of `s_{j,k}`.
    pub fn s_hat(&self, j: usize, k: usize, z: &Cplx) -> Result<Cplx> {
        self.s(j, k).cauchy_transform(z)
    }

    pub fn s_hat_real(&self, j: usize, k: usize, x: &Real) -> Result<Real> {
        self.s(j, k).cauchy_transform_real(x)
    }

    /// `s_hat_{j,k}` at the nodes of `sigma_{j-1}`, for `2 <= j <= k`.
    /// Read off the weights of `s_{j-1,k} = <sigma_{j-1}, s_{j,k}>`.
    pub fn s_hat_at_nodes(&self, j: usize, k: usize) -> &[Real] {
        assert!(j >= 2 && j <= k && k <= self.m(), "s_hat_at_nodes({j}, {k})");
        self.node_cache[j - 1][k - 1].get_or_init(|| {
            let prod = self.s(j - 1, k);
            let base = self.generator(j - 1);
            prod.weights()
                .iter()
                .zip(base.weights())
                .map(|(w, b)| prod.sign().apply(Float::with_val(w.prec(), w / b)))
                .collect()
        })
    }

    /// Hex SHA-256 of the canonical generator descriptions.
    pub fn content_hash(&self) -> &str {
        &self.hash
    }
}

/// Angelesco system: pairwise disjoint supports, orthogonality against
/// each `sigma_j` separately.
#[derive(Debug)]
pub struct AngelescoSystem {
    measures: Vec<Arc<Measure>>,
    hash: String,
}

impl AngelescoSystem {
    pub fn new(measures: Vec<Measure>) -> Result<Arc<AngelescoSystem>> {
        if measures.is_empty() {
            return invalid("an Angelesco system needs at least one measure");
        }
        for i in 0..measures.len() {
            for j in i + 1..measures.len() {
                if !measures[i].interval().disjoint(measures[j].interval()) {
                    return invalid(format!(
                        "supports {} and {} overlap",
                        measures[i].interval(),
                        measures[j].interval()
                    ));
                }
            }
        }
        let measures: Vec<Arc<Measure>> = measures.into_iter().map(Arc::new).collect();
        let hash = content_hash("angelesco", &measures);
        Ok(Arc::new(AngelescoSystem { measures, hash }))
    }

    pub fn m(&self) -> usize {
        self.measures.len()
    }

    pub fn prec(&self) -> u32 {
        self.measures[0].prec()
    }

    pub fn measure(&self, j: usize) -> &Arc<Measure> {
        &self.measures[j - 1]
    }

    pub fn measures(&self) -> &[Arc<Measure>] {
        &self.measures
    }

    /// Convex hull of all supports.
    pub fn hull(&self) -> Interval {
        let mut h = self.measures[0].interval().clone();
        for m in &self.measures[1..] {
            h = h.hull(m.interval());
        }
        h
    }

    pub fn content_hash(&self) -> &str {
        &self.hash
    }
}

fn content_hash(kind: &str, measures: &[Arc<Measure>]) -> String {
    let mut h = Sha256::new();
    h.update(kind.as_bytes());
    for m in measures {
        h.update(b"\n");
        h.update(m.descriptor().as_bytes());
        h.update(format!("|prec={}", m.prec()).as_bytes());
    }
    hex::encode(h.finalize())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::DensityClass;
    use crate::precision::real;
    use rug::Float;

    fn reference(p: u32, nq: usize) -> Arc<NikishinSystem> {
        let s1 = Measure::new(Interval::from_f64(p, -1.0, 1.0).unwrap(), DensityClass::chebyshev(p), nq).unwrap();
        let s2 = Measure::new(Interval::from_f64(p, 2.0, 3.0).unwrap(), DensityClass::Legendre, nq).unwrap();
        NikishinSystem::new(vec![s1, s2]).unwrap()
    }

    #[test]
    fn nested_measures_and_signs() {
        let sys = reference(200, 40);
        assert_eq!(sys.m(), 2);
        // s_{1,2} = sigma_1 times a negative transform on [-1, 1]
        assert!(*sys.s(1, 2).mass() < 0);
        // s_{2,1} = sigma_2 times a positive transform on [2, 3]
        assert!(*sys.s(2, 1).mass() > 0);
        let x = real(200, 0.25);
        let v = sys.s_hat_real(2, 2, &x).unwrap();
        let exact = (Float::with_val(200, 1.75) / Float::with_val(200, 2.75)).ln();
        assert!(Float::with_val(200, v - exact).abs() < 1e-50);
    }

    #[test]
    fn overlapping_supports_rejected() {
        let p = 64;
        let a = Measure::new(Interval::from_f64(p, -1.0, 1.0).unwrap(), DensityClass::Legendre, 8).unwrap();
        let b = Measure::new(Interval::from_f64(p, 0.5, 2.0).unwrap(), DensityClass::Legendre, 8).unwrap();
        assert!(NikishinSystem::new(vec![a, b]).is_err());
    }

    #[test]
    fn hash_tracks_intervals() {
        let p = 128;
        let mk = |b: f64| {
            let s1 = Measure::new(Interval::from_f64(p, -1.0, 1.0).unwrap(), DensityClass::Legendre, 8).unwrap();
            let s2 = Measure::new(Interval::from_f64(p, 2.0, b).unwrap(), DensityClass::Legendre, 8).unwrap();
            NikishinSystem::new(vec![s1, s2]).unwrap().content_hash().to_string()
        };
        assert_eq!(mk(3.0), mk(3.0));
        assert_ne!(mk(3.0), mk(3.5));
    }
}
