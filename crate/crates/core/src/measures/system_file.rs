//! `nikhp-system/1` TOML files describing a Nikishin or Angelesco system.
//!
//! ```toml
//! schema = "nikhp-system/1"
//! kind = "nikishin"
//! precision = 256
//! quadrature = 64
//!
//! [[measure]]
//! interval = ["-1", "1"]
//! density = "jacobi"
//! alpha = "-1/2"
//! beta = "-1/2"
//!
//! [[measure]]
//! interval = ["2", "3"]
//! density = "legendre"
//! ```
//!
//! Real parameters are strings (or integers) so they can be read at any
//! precision; TOML floats are rejected.

use std::path::Path;
use std::sync::Arc;

use toml::Value;

use crate::error::{Error, Result};
use crate::poly::Polynomial;
use crate::precision::parse_real;

use super::{AngelescoSystem, DensityClass, Interval, Measure, NikishinSystem, Table};

pub const SYSTEM_SCHEMA: &str = "nikhp-system/1";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SystemKind {
    Nikishin,
    Angelesco,
}

#[derive(Clone, Debug, PartialEq)]
pub enum DensitySpec {
    Jacobi { alpha: String, beta: String },
    Legendre,
    Chebyshev,
    Modulated { coefficients: Vec<String>, alpha: String, beta: String },
    Tabulated { points: Vec<(String, String)> },
}

#[derive(Clone, Debug, PartialEq)]
pub struct MeasureSpec {
    pub interval: (String, String),
    pub density: DensitySpec,
    pub scale: String,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SystemFile {
    pub kind: SystemKind,
    pub precision: Option<u32>,
    pub quadrature: Option<usize>,
    pub measures: Vec<MeasureSpec>,
}

fn perr(msg: impl Into<String>) -> Error {
    Error::Parse(msg.into())
}

/// A real-number field: string or integer, never a float.
fn number(v: &Value, what: &str) -> Result<String> {
    match v {
        Value::String(s) => Ok(s.clone()),
        Value::Integer(i) => Ok(i.to_string()),
        Value::Float(f) => Err(perr(format!(
            "{what}: float literal {f} is not accepted, write it as a string such as \"{f}\""
        ))),
        other => Err(perr(format!("{what}: expected a string, got {}", other.type_str()))),
    }
}

fn count(v: &Value, what: &str) -> Result<u64> {
    match v {
        Value::Integer(i) if *i >= 0 => Ok(*i as u64),
        _ => Err(perr(format!("{what}: expected a non-negative integer"))),
    }
}

impl SystemFile {
    pub fn parse(text: &str, base_dir: Option<&Path>) -> Result<SystemFile> {
        let root: toml::Table = text.parse().map_err(|e: toml::de::Error| perr(e.to_string()))?;
        match root.get("schema") {
            Some(Value::String(s)) if s == SYSTEM_SCHEMA => {}
            Some(Value::String(s)) => return Err(perr(format!("unsupported schema `{s}`"))),
            _ => return Err(perr(format!("missing `schema = \"{SYSTEM_SCHEMA}\"`"))),
        }
        let kind = match root.get("kind").and_then(Value::as_str) {
            Some("nikishin") | None => SystemKind::Nikishin,
            Some("angelesco") => SystemKind::Angelesco,
            Some(other) => return Err(perr(format!("unknown system kind `{other}`"))),
        };
        let precision = root
            .get("precision")
            .map(|v| count(v, "precision"))
            .transpose()?
            .map(|p| p as u32);
        let quadrature = root
            .get("quadrature")
            .map(|v| count(v, "quadrature"))
            .transpose()?
            .map(|q| q as usize);
        for key in root.keys() {
            if !matches!(key.as_str(), "schema" | "kind" | "precision" | "quadrature" | "measure") {
                return Err(perr(format!("unknown key `{key}`")));
            }
        }
        let list = match root.get("measure") {
            Some(Value::Array(a)) if !a.is_empty() => a,
            _ => return Err(perr("at least one [[measure]] table is required")),
        };
        let mut measures = Vec::with_capacity(list.len());
        for (i, m) in list.iter().enumerate() {
            let what = format!("measure[{}]", i + 1);
            let t = m.as_table().ok_or_else(|| perr(format!("{what}: expected a table")))?;
            measures.push(measure_spec(t, &what, base_dir)?);
        }
        Ok(SystemFile {
            kind,
            precision,
            quadrature,
            measures,
        })
    }

    pub fn load(path: &Path) -> Result<SystemFile> {
        let text = std::fs::read_to_string(path)?;
        SystemFile::parse(&text, path.parent())
    }

    pub fn m(&self) -> usize {
        self.measures.len()
    }

    pub fn build_measures(&self, prec: u32, nq: usize) -> Result<Vec<Measure>> {
        self.measures.iter().map(|s| s.build(prec, nq)).collect()
    }

    pub fn build_nikishin(&self, prec: u32, nq: usize) -> Result<Arc<NikishinSystem>> {
        if self.kind != SystemKind::Nikishin {
            return Err(Error::Invalid("system file describes an Angelesco system".into()));
        }
        NikishinSystem::new(self.build_measures(prec, nq)?)
    }

    pub fn build_angelesco(&self, prec: u32, nq: usize) -> Result<Arc<AngelescoSystem>> {
        AngelescoSystem::new(self.build_measures(prec, nq)?)
    }
}

fn measure_spec(t: &toml::Table, what: &str, base_dir: Option<&Path>) -> Result<MeasureSpec> {
    for key in t.keys() {
        if !matches!(
            key.as_str(),
            "interval" | "density" | "alpha" | "beta" | "scale" | "coefficients" | "points" | "table"
        ) {
            return Err(perr(format!("{what}: unknown key `{key}`")));
        }
    }
    let interval = match t.get("interval") {
        Some(Value::Array(a)) if a.len() == 2 => (
            number(&a[0], &format!("{what}.interval"))?,
            number(&a[1], &format!("{what}.interval"))?,
        ),
        _ => return Err(perr(format!("{what}: `interval` must be a two-element array"))),
    };
    let field = |k: &str, default: &str| -> Result<String> {
        match t.get(k) {
            Some(v) => number(v, &format!("{what}.{k}")),
            None => Ok(default.to_string()),
        }
    };
    let density = match t.get("density").and_then(Value::as_str) {
        Some("jacobi") => DensitySpec::Jacobi {
            alpha: field("alpha", "0")?,
            beta: field("beta", "0")?,
        },
        Some("legendre") => DensitySpec::Legendre,
        Some("chebyshev") => DensitySpec::Chebyshev,
        Some("modulated") => {
            let coefficients = match t.get("coefficients") {
                Some(Value::Array(a)) if !a.is_empty() => a
                    .iter()
                    .map(|v| number(v, &format!("{what}.coefficients")))
                    .collect::<Result<Vec<_>>>()?,
                _ => return Err(perr(format!("{what}: `coefficients` must be a non-empty array"))),
            };
            DensitySpec::Modulated {
                coefficients,
                alpha: field("alpha", "0")?,
                beta: field("beta", "0")?,
            }
        }
        Some("tabulated") => {
            let points = match (t.get("points"), t.get("table")) {
                (Some(Value::Array(rows)), None) => rows
                    .iter()
                    .map(|r| match r {
                        Value::Array(p) if p.len() == 2 => Ok((
                            number(&p[0], &format!("{what}.points"))?,
                            number(&p[1], &format!("{what}.points"))?,
                        )),
                        _ => Err(perr(format!("{what}: each point must be [x, w]"))),
                    })
                    .collect::<Result<Vec<_>>>()?,
                (None, Some(Value::String(file))) => {
                    let path = match base_dir {
                        Some(d) => d.join(file),
                        None => file.into(),
                    };
                    read_table_rows(&path)?
                }
                _ => {
                    return Err(perr(format!(
                        "{what}: tabulated densities need exactly one of `points` or `table`"
                    )))
                }
            };
            DensitySpec::Tabulated { points }
        }
        Some(other) => return Err(perr(format!("{what}: unknown density `{other}`"))),
        None => return Err(perr(format!("{what}: missing `density`"))),
    };
    Ok(MeasureSpec {
        interval,
        density,
        scale: field("scale", "1")?,
    })
}

fn read_table_rows(path: &Path) -> Result<Vec<(String, String)>> {
    let text = std::fs::read_to_string(path)?;
    let mut rows = Vec::new();
    for line in text.lines() {
        let line = line.split('#').next().unwrap().trim();
        if line.is_empty() {
            continue;
        }
        let parts: Vec<&str> = line
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|s| !s.is_empty())
            .collect();
        if parts.len() != 2 {
            return Err(perr(format!("{}: bad table row `{line}`", path.display())));
        }
        rows.push((parts[0].to_string(), parts[1].to_string()));
    }
    Ok(rows)
}

impl MeasureSpec {
    pub fn build(&self, prec: u32, nq: usize) -> Result<Measure> {
        let interval = Interval::parse(prec, &self.interval.0, &self.interval.1)?;
        let class = match &self.density {
            DensitySpec::Jacobi { alpha, beta } => DensityClass::Jacobi {
                alpha: parse_real(prec, alpha)?,
                beta: parse_real(prec, beta)?,
            },
            DensitySpec::Legendre => DensityClass::Legendre,
            DensitySpec::Chebyshev => DensityClass::chebyshev(prec),
            DensitySpec::Modulated {
                coefficients,
                alpha,
                beta,
            } => DensityClass::Modulated {
                q: Polynomial::parse(prec, coefficients)?,
                alpha: parse_real(prec, alpha)?,
                beta: parse_real(prec, beta)?,
            },
            DensitySpec::Tabulated { points } => DensityClass::Tabulated(Table::parse(prec, points)?),
        };
        Measure::with_scale(interval, class, parse_real(prec, &self.scale)?, nq)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const REF: &str = r#"
schema = "nikhp-system/1"
kind = "nikishin"
precision = 192

[[measure]]
interval = ["-1", "1"]
density = "jacobi"
alpha = "-1/2"
beta = "-1/2"

[[measure]]
interval = [2, 3]
density = "legendre"
"#;

    #[test]
    fn parses_reference_system() {
        let f = SystemFile::parse(REF, None).unwrap();
        assert_eq!(f.kind, SystemKind::Nikishin);
        assert_eq!(f.precision, Some(192));
        assert_eq!(f.m(), 2);
        let sys = f.build_nikishin(192, 16).unwrap();
        assert_eq!(sys.m(), 2);
    }

    #[test]
    fn rejects_float_literals() {
        let bad = REF.replace("interval = [2, 3]", "interval = [2.0, 3]");
        let err = SystemFile::parse(&bad, None).unwrap_err().to_string();
        assert!(err.contains("float literal"), "{err}");
    }

    #[test]
    fn rejects_unknown_schema_and_keys() {
        let bad = REF.replace("nikhp-system/1", "nikhp-system/9");
        assert!(SystemFile::parse(&bad, None).is_err());
        let bad = REF.replace("density = \"legendre\"", "density = \"legendre\"\ncolour = \"red\"");
        assert!(SystemFile::parse(&bad, None).is_err());
    }

    #[test]
    fn tabulated_and_modulated_forms() {
        let text = r#"
schema = "nikhp-system/1"
kind = "angelesco"
[[measure]]
interval = ["-1", "0"]
density = "tabulated"
points = [["-1", "1"], ["-0.5", "2"], ["0", "1"]]
[[measure]]
interval = ["1", "2"]
density = "modulated"
coefficients = ["3", "-1"]
"#;
        let f = SystemFile::parse(text, None).unwrap();
        assert_eq!(f.kind, SystemKind::Angelesco);
        let sys = f.build_angelesco(128, 8).unwrap();
        assert_eq!(sys.m(), 2);
    }
}
