//! Experiment driver behind the `nikhp` binary.

pub mod cache;
mod commands;
pub mod config;
pub mod report;

use std::fmt;
use std::path::{Path, PathBuf};

use anyhow::anyhow;
use log::info;
use nikhp_core::hermite_pade::SystemRef;
use nikhp_core::measures::system_file::{SystemFile, SystemKind};
use nikhp_core::DEFAULT_PRECISION;

use cache::{default_cache_dir, FamilyCache};
use config::{check_precision, Command, ExperimentConfig};
use report::{SystemInfo, Summary, REPORT_SCHEMA};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_CRITERIA: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_SOLVER: i32 = 3;

pub const DEFAULT_QUADRATURE: usize = 64;

/// Why a run produced no report.
#[derive(Debug)]
pub enum Failure {
    Config(anyhow::Error),
    Solver(anyhow::Error),
}

impl Failure {
    pub fn config(e: impl Into<anyhow::Error>) -> Failure {
        Failure::Config(e.into())
    }

    pub fn solver(e: impl Into<anyhow::Error>) -> Failure {
        Failure::Solver(e.into())
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Config(_) => EXIT_CONFIG,
            Failure::Solver(_) => EXIT_SOLVER,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Config(e) => write!(f, "configuration error: {e:#}"),
            Failure::Solver(e) => write!(f, "solver failure: {e:#}"),
        }
    }
}

impl From<nikhp_core::Error> for Failure {
    fn from(e: nikhp_core::Error) -> Failure {
        Failure::Solver(e.into())
    }
}

/// Command line settings that take precedence over the file.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub out: Option<PathBuf>,
    pub precision: Option<u32>,
    pub workers: Option<usize>,
    pub seed: Option<u64>,
    pub cache_dir: Option<PathBuf>,
}

pub struct Outcome {
    pub summary: Summary,
    pub out_dir: PathBuf,
}

impl Outcome {
    pub fn exit_code(&self) -> i32 {
        if self.summary.pass {
            EXIT_PASS
        } else {
            EXIT_CRITERIA
        }
    }
}

pub(crate) struct Ctx {
    pub cfg: ExperimentConfig,
    pub system: SystemRef,
    pub cache: FamilyCache,
    pub prec: u32,
    pub seed: u64,
}

pub fn run(command: Command, config_path: &Path, ov: &Overrides) -> Result<Outcome, Failure> {
    let cfg = ExperimentConfig::load(config_path).map_err(Failure::config)?;
    if let Some(c) = cfg.command {
        if c != command {
            return Err(Failure::config(anyhow!(
                "command: the file is written for `{c}`, not `{command}`"
            )));
        }
    }
    let sys_path = cfg.system_path();
    let file = SystemFile::load(&sys_path)
        .map_err(|e| Failure::config(anyhow!("system file {}: {e}", sys_path.display())))?;
    let prec = ov
        .precision
        .or(cfg.precision)
        .or(file.precision)
        .unwrap_or(DEFAULT_PRECISION);
    check_precision(prec).map_err(Failure::config)?;
    let nq = cfg.quadrature.or(file.quadrature).unwrap_or(DEFAULT_QUADRATURE);
    let build = |e: nikhp_core::Error| match e {
        nikhp_core::Error::Parse(_) | nikhp_core::Error::Invalid(_) => {
            Failure::config(anyhow!("system file {}: {e}", sys_path.display()))
        }
        e => Failure::solver(e),
    };
    let (system, kind): (SystemRef, _) = match file.kind {
        SystemKind::Nikishin => (file.build_nikishin(prec, nq).map_err(build)?.into(), "nikishin"),
        SystemKind::Angelesco => (file.build_angelesco(prec, nq).map_err(build)?.into(), "angelesco"),
    };
    let out_dir = match (&ov.out, &cfg.output) {
        (Some(o), _) => o.clone(),
        (None, Some(o)) => cfg.resolve(o),
        (None, None) => PathBuf::from("nikhp-out").join(command.name()),
    };
    let seed = ov.seed.or(cfg.seed).unwrap_or(0);
    let cache_dir = ov.cache_dir.clone().unwrap_or_else(default_cache_dir);
    let info = SystemInfo {
        kind,
        m: system.m(),
        hash: system.content_hash().to_string(),
        precision: prec,
        quadrature: nq,
    };
    let ctx = Ctx {
        cfg,
        cache: FamilyCache::new(cache_dir, system.clone()),
        system,
        prec,
        seed,
    };

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(ov.workers.unwrap_or(0))
        .build()
        .map_err(Failure::solver)?;
    let started = std::time::Instant::now();
    let out = pool.install(|| commands::execute(command, &ctx))?;
    let stats = ctx.cache.stats();
    info!(
        "{command} finished in {:.2} s; cache: {} hits, {} misses, {} repaired",
        started.elapsed().as_secs_f64(),
        stats.hits,
        stats.misses,
        stats.repaired
    );

    let summary = Summary {
        schema: REPORT_SCHEMA,
        command: command.name().to_string(),
        system: info,
        seed,
        parameters: out.parameters,
        pass: out.checks.iter().all(|c| c.pass),
        checks: out.checks,
        artifacts: out.tables.iter().map(|t| t.name.clone()).collect(),
        results: out.results,
    };
    report::write_all(&out_dir, &out.tables, &summary).map_err(Failure::solver)?;
    Ok(Outcome { summary, out_dir })
}
