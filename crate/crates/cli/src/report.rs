//! CSV tables and the JSON run summary.

use std::fs;
use std::path::Path;

use anyhow::{Context, Result};
use nikhp_core::asymptotics::Check;
use serde::Serialize;
use serde_json::Value;

pub const REPORT_SCHEMA: &str = "nikhp-report/1";

/// One CSV artifact, rendered in memory.
#[derive(Clone, Debug)]
pub struct Table {
    pub name: String,
    pub text: String,
}

impl Table {
    pub fn new<T: Serialize>(name: &str, rows: &[T]) -> Result<Table> {
        let mut w = csv::Writer::from_writer(Vec::new());
        for r in rows {
            w.serialize(r)?;
        }
        let bytes = w.into_inner().map_err(|e| anyhow::anyhow!("{e}"))?;
        Ok(Table {
            name: format!("{name}.csv"),
            text: String::from_utf8(bytes)?,
        })
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SystemInfo {
    pub kind: &'static str,
    pub m: usize,
    pub hash: String,
    pub precision: u32,
    pub quadrature: usize,
}

/// The machine-readable record of one run. Holds no timings or absolute
/// paths, so identical runs produce identical bytes.
#[derive(Clone, Debug, Serialize)]
pub struct Summary {
    pub schema: &'static str,
    pub command: String,
    pub system: SystemInfo,
    pub seed: u64,
    pub parameters: Value,
    pub checks: Vec<Check>,
    pub pass: bool,
    pub artifacts: Vec<String>,
    pub results: Value,
}

impl Summary {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("summary serializes");
        s.push('\n');
        s
    }
}

pub fn write_all(dir: &Path, tables: &[Table], summary: &Summary) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    for t in tables {
        let p = dir.join(&t.name);
        fs::write(&p, &t.text).with_context(|| format!("writing {}", p.display()))?;
    }
    let p = dir.join("summary.json");
    fs::write(&p, summary.to_json()).with_context(|| format!("writing {}", p.display()))?;
    Ok(())
}

/// `f64` cells that may be infinite or missing are written as text.
pub fn cell(x: f64) -> String {
    if x.is_finite() {
        format!("{x:e}")
    } else {
        String::new()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[derive(Serialize)]
    struct Row {
        total: usize,
        index: String,
        value: f64,
    }

    #[test]
    fn csv_header_and_rows() {
        let t = Table::new(
            "x",
            &[Row {
                total: 3,
                index: "(2,1)".into(),
                value: 0.5,
            }],
        )
        .unwrap();
        assert_eq!(t.name, "x.csv");
        assert_eq!(t.text, "total,index,value\n3,\"(2,1)\",0.5\n");
    }

    #[test]
    fn cells() {
        assert_eq!(cell(f64::INFINITY), "");
        assert_eq!(cell(1.5e-3), "1.5e-3");
    }
}
