use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{attach_roots, MultiIndex, SystemRef, TypeIFamily, TypeIIFamily};
use crate::error::{invalid, Error, Result};
use crate::measures::NikishinSystem;
use crate::poly::Polynomial;

pub const FAMILY_SCHEMA: &str = "nikhp-family/1";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FamilyKind {
    TypeI,
    TypeII,
}

/// Serialized family. Type I stores `a_0..a_m`; type II stores `Q` followed
/// by `P_1..P_m`. Coefficients are ascending decimal strings at full
/// precision, so a record reloads to the same polynomials bit for bit.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FamilyRecord {
    pub schema: String,
    pub kind: FamilyKind,
    pub system_hash: String,
    pub precision: u32,
    pub quadrature: usize,
    pub index: Vec<usize>,
    pub polynomials: Vec<Vec<String>>,
    pub margin: f64,
    pub residual: f64,
}

impl FamilyRecord {
    pub fn from_type_i(f: &TypeIFamily) -> FamilyRecord {
        FamilyRecord {
            schema: FAMILY_SCHEMA.to_string(),
            kind: FamilyKind::TypeI,
            system_hash: f.system().content_hash().to_string(),
            precision: f.prec(),
            quadrature: f.system().quadrature_size(),
            index: f.index().components().to_vec(),
            polynomials: f.polynomials().iter().map(|p| p.to_decimal_strings()).collect(),
            margin: f.margin(),
            residual: f.residual(),
        }
    }

    pub fn from_type_ii(f: &TypeIIFamily) -> FamilyRecord {
        let mut polys = vec![f.q().to_decimal_strings()];
        polys.extend(f.numerators().iter().map(|p| p.to_decimal_strings()));
        FamilyRecord {
            schema: FAMILY_SCHEMA.to_string(),
            kind: FamilyKind::TypeII,
            system_hash: f.system().content_hash().to_string(),
            precision: f.prec(),
            quadrature: f.system().quadrature_size(),
            index: f.index().components().to_vec(),
            polynomials: polys,
            margin: f.margin(),
            residual: f.residual(),
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("record serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<FamilyRecord> {
        let r: FamilyRecord =
            serde_json::from_str(text).map_err(|e| Error::Parse(format!("family record: {e}")))?;
        if r.schema != FAMILY_SCHEMA {
            return Err(Error::Parse(format!("unknown family schema `{}`", r.schema)));
        }
        Ok(r)
    }

    fn check(&self, kind: FamilyKind, sys: &SystemRef) -> Result<MultiIndex> {
        if self.kind != kind {
            return invalid(format!("record holds {:?}, not {kind:?}", self.kind));
        }
        if self.system_hash != sys.content_hash() {
            return invalid("record was computed for a different system");
        }
        if self.precision != sys.prec() || self.quadrature != sys.quadrature_size() {
            return invalid("record precision or quadrature size differs from the system");
        }
        if self.polynomials.len() != sys.m() + 1 {
            return invalid("record has the wrong number of polynomials");
        }
        MultiIndex::new(self.index.clone())
    }

    fn polys(&self) -> Result<Vec<Polynomial>> {
        self.polynomials
            .iter()
            .map(|c| Polynomial::parse(self.precision, c))
            .collect()
    }

    pub fn rebuild_type_i(&self, system: Arc<NikishinSystem>) -> Result<TypeIFamily> {
        let n = self.check(FamilyKind::TypeI, &SystemRef::from(system.clone()))?;
        Ok(TypeIFamily::assemble(system, n, self.polys()?, self.margin, self.residual))
    }

    pub fn rebuild_type_ii(&self, system: SystemRef) -> Result<TypeIIFamily> {
        let n = self.check(FamilyKind::TypeII, &system)?;
        let mut polys = self.polys()?;
        let q = attach_roots(polys.remove(0), &system.basis_interval());
        Ok(TypeIIFamily::assemble(system, n, q, polys, self.margin, self.residual))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hermite_pade::{solve_type_i, solve_type_ii};
    use crate::measures::{DensityClass, Interval, Measure};

    const P: u32 = 192;

    fn reference() -> Arc<NikishinSystem> {
        let s1 = Measure::new(Interval::from_f64(P, -1.0, 1.0).unwrap(), DensityClass::chebyshev(P), 24).unwrap();
        let s2 = Measure::new(Interval::from_f64(P, 2.0, 3.0).unwrap(), DensityClass::Legendre, 24).unwrap();
        NikishinSystem::new(vec![s1, s2]).unwrap()
    }

    #[test]
    fn type_ii_round_trip_is_exact() {
        let sys = reference();
        let n = MultiIndex::new(vec![2, 1]).unwrap();
        let f = solve_type_ii(sys.clone(), &n).unwrap();
        let rec = FamilyRecord::from_type_ii(&f);
        let text = rec.to_json();
        assert_eq!(text, FamilyRecord::from_type_ii(&f).to_json());
        let back = FamilyRecord::from_json(&text).unwrap();
        assert_eq!(back, rec);
        let g = back.rebuild_type_ii(SystemRef::from(sys)).unwrap();
        assert_eq!(g.q().coeffs(), f.q().coeffs());
        assert_eq!(g.pade_numerator(2).coeffs(), f.pade_numerator(2).coeffs());
    }

    #[test]
    fn type_i_round_trip_and_mismatch() {
        let sys = reference();
        let n = MultiIndex::new(vec![1, 2]).unwrap();
        let f = solve_type_i(sys.clone(), &n).unwrap();
        let rec = FamilyRecord::from_type_i(&f);
        let g = FamilyRecord::from_json(&rec.to_json()).unwrap().rebuild_type_i(sys.clone()).unwrap();
        for j in 0..=2 {
            assert_eq!(g.a(j).coeffs(), f.a(j).coeffs());
        }
        assert!(rec.rebuild_type_ii(SystemRef::from(sys)).is_err());
        let mut bad = rec.to_json();
        bad = bad.replace(FAMILY_SCHEMA, "nikhp-family/9");
        assert!(FamilyRecord::from_json(&bad).is_err());
    }
}
