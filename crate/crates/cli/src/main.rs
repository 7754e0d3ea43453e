use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use nikhp_cli::config::Command;
use nikhp_cli::{run, Overrides};

/// Hermite-Padé experiments on Nikishin and Angelesco systems.
#[derive(Parser, Debug)]
#[command(name = "nikhp", version)]
struct Args {
    #[arg(value_enum)]
    command: Command,

    /// Experiment file (`nikhp-experiment/1`).
    #[arg(long)]
    config: PathBuf,

    /// Report directory; overrides `output` in the file.
    #[arg(long)]
    out: Option<PathBuf>,

    /// Working precision in bits.
    #[arg(long)]
    precision: Option<u32>,

    /// Worker threads; all cores when absent.
    #[arg(long)]
    workers: Option<usize>,

    #[arg(long)]
    seed: Option<u64>,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let ov = Overrides {
        out: args.out,
        precision: args.precision,
        workers: args.workers,
        seed: args.seed,
        cache_dir: None,
    };
    match run(args.command, &args.config, &ov) {
        Ok(outcome) => {
            for c in &outcome.summary.checks {
                let tag = if c.pass { "PASS" } else { "FAIL" };
                println!("{tag} {}: {}", c.name, c.detail);
            }
            println!("reports written to {}", outcome.out_dir.display());
            ExitCode::from(outcome.exit_code() as u8)
        }
        Err(f) => {
            eprintln!("error: {f}");
            ExitCode::from(f.exit_code() as u8)
        }
    }
}
