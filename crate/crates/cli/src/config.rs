//! `nikhp-experiment/1` files.
//!
//! ```toml
//! schema = "nikhp-experiment/1"
//! command = "weak"
//! system = "reference.toml"
//! precision = 384
//! quadrature = 64
//! grid = 800
//! points = ["2i", "5+1i", "-3", "1.5+0.5i"]
//! tolerance = "0.15"
//!
//! [schedule]
//! kind = "diagonal"
//! from = 2
//! to = 16
//! ```
//!
//! Real-valued settings are strings. Paths are relative to the file.

use std::fmt;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};

pub const EXPERIMENT_SCHEMA: &str = "nikhp-experiment/1";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Certify,
    Zeros,
    Interlace,
    Equilibrium,
    Weak,
    Rate,
    Ratio,
    Connection,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Certify => "certify",
            Command::Zeros => "zeros",
            Command::Interlace => "interlace",
            Command::Equilibrium => "equilibrium",
            Command::Weak => "weak",
            Command::Rate => "rate",
            Command::Ratio => "ratio",
            Command::Connection => "connection",
        }
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ScheduleSpec {
    Diagonal {
        from: usize,
        to: usize,
    },
    Staircase {
        from: usize,
        to: usize,
    },
    Custom {
        proportions: Vec<String>,
        indices: Vec<Vec<usize>>,
        diameter: usize,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProbeSpec {
    /// `n_0, ..., n_m`, or `n_1, ..., n_m` with `p_0 = 0`.
    pub index: Vec<usize>,
    pub interval: [String; 2],
    #[serde(default = "default_trials")]
    pub trials: usize,
}

fn default_trials() -> usize {
    16
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RatioSpec {
    pub samples: Option<usize>,
    pub radius: Option<String>,
    pub boundary_points: Option<usize>,
    #[serde(default)]
    pub type_i: bool,
}

/// An experiment as written in the file, before command line overrides.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub schema: String,
    pub command: Option<Command>,
    pub system: PathBuf,
    pub precision: Option<u32>,
    pub quadrature: Option<usize>,
    pub grid: Option<usize>,
    #[serde(default)]
    pub points: Vec<String>,
    pub output: Option<PathBuf>,
    pub seed: Option<u64>,
    pub schedule: Option<ScheduleSpec>,
    /// Largest `|n|` for certify, zeros and interlace.
    pub budget: Option<usize>,
    /// Component of the rate harness.
    pub component: Option<usize>,
    /// Bumped component of the ratio harness.
    pub bump: Option<usize>,
    /// Multi-index of the connection harness.
    pub index: Option<Vec<usize>>,
    /// Equilibrium proportions; uniform when absent.
    pub proportions: Option<Vec<String>>,
    /// Pass threshold of the command's main comparison.
    pub tolerance: Option<String>,
    pub probe: Option<ProbeSpec>,
    pub ratio: Option<RatioSpec>,
    #[serde(skip)]
    base_dir: PathBuf,
}

impl ExperimentConfig {
    pub fn parse(text: &str, base_dir: &Path) -> Result<ExperimentConfig> {
        let mut cfg: ExperimentConfig = toml::from_str(text)?;
        if cfg.schema != EXPERIMENT_SCHEMA {
            bail!("schema: expected `{EXPERIMENT_SCHEMA}`, found `{}`", cfg.schema);
        }
        if let Some(p) = cfg.precision {
            check_precision(p)?;
        }
        if cfg.quadrature == Some(0) {
            bail!("quadrature: must be positive");
        }
        if let Some(s) = &cfg.schedule {
            match s {
                ScheduleSpec::Diagonal { from, to } | ScheduleSpec::Staircase { from, to } => {
                    if *from == 0 || from > to {
                        bail!("schedule: range {from}..={to} is empty");
                    }
                }
                ScheduleSpec::Custom { indices, .. } => {
                    if indices.is_empty() {
                        bail!("schedule.indices: must not be empty");
                    }
                }
            }
        }
        cfg.base_dir = base_dir.to_path_buf();
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<ExperimentConfig> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let base = path.parent().unwrap_or(Path::new("."));
        ExperimentConfig::parse(&text, base).with_context(|| format!("in {}", path.display()))
    }

    pub fn resolve(&self, p: &Path) -> PathBuf {
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.base_dir.join(p)
        }
    }

    pub fn system_path(&self) -> PathBuf {
        self.resolve(&self.system)
    }
}

pub fn check_precision(p: u32) -> Result<()> {
    if p < 64 {
        bail!("precision: {p} bits is below the minimum of 64");
    }
    Ok(())
}

/// Reads a decimal string setting as `f64`.
pub fn decimal(field: &str, s: &str) -> Result<f64> {
    let v: f64 = s
        .trim()
        .parse()
        .with_context(|| format!("{field}: `{s}` is not a decimal number"))?;
    if !v.is_finite() {
        bail!("{field}: `{s}` is not finite");
    }
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;

    const BASE: &str = "schema = \"nikhp-experiment/1\"\nsystem = \"sys.toml\"\n";

    #[test]
    fn minimal_file() {
        let c = ExperimentConfig::parse(BASE, Path::new("/tmp/x")).unwrap();
        assert_eq!(c.system_path(), PathBuf::from("/tmp/x/sys.toml"));
        assert!(c.command.is_none());
    }

    #[test]
    fn schedule_table() {
        let t = format!("{BASE}command = \"weak\"\n[schedule]\nkind = \"staircase\"\nfrom = 1\nto = 9\n");
        let c = ExperimentConfig::parse(&t, Path::new(".")).unwrap();
        assert_eq!(c.command, Some(Command::Weak));
        assert_eq!(c.schedule, Some(ScheduleSpec::Staircase { from: 1, to: 9 }));
    }

    #[test]
    fn float_literals_are_rejected() {
        let t = format!("{BASE}tolerance = 0.15\n");
        let e = ExperimentConfig::parse(&t, Path::new(".")).unwrap_err();
        assert!(format!("{e:#}").contains("tolerance"), "{e:#}");
    }

    #[test]
    fn unknown_fields_and_low_precision() {
        let e = ExperimentConfig::parse(&format!("{BASE}gird = 3\n"), Path::new(".")).unwrap_err();
        assert!(format!("{e:#}").contains("gird"));
        let e = ExperimentConfig::parse(&format!("{BASE}precision = 32\n"), Path::new(".")).unwrap_err();
        assert!(format!("{e:#}").contains("precision"));
        let e = ExperimentConfig::parse("schema = \"x\"\nsystem = \"s\"\n", Path::new(".")).unwrap_err();
        assert!(format!("{e:#}").contains("schema"));
    }

    #[test]
    fn decimals() {
        assert_eq!(decimal("t", "1e-30").unwrap(), 1e-30);
        assert!(decimal("t", "abc").is_err());
        assert!(decimal("t", "inf").is_err());
    }
}
