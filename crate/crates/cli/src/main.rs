//! `wavesig`: run, sweep and validate scenario files.
//!
//! Exit codes: 0 all invariants pass, 1 an invariant failed, 2 usage or validation
//! error, 3 numerical failure.

mod config;
mod experiments;
mod report;
mod scenario;
mod svg;
mod sweep;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::Overrides;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Numerical(#[from] wavesig::Error),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("serialization: {0}")]
    Serialize(#[from] toml::ser::Error),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Numerical(wavesig::Error::Io(_) | wavesig::Error::Parse(_)) => 2,
            CliError::Numerical(_) => 3,
            CliError::Usage(_) | CliError::Io(_) | CliError::Serialize(_) => 2,
        }
    }
}

#[derive(Parser)]
#[command(name = "wavesig", version, about = "Analytic-signal wave mechanics experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// Scenario file (TOML).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory, overriding `output_dir`.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Seed for random test states, overriding `seed`.
    #[arg(long)]
    seed: Option<u64>,
    /// Override a config value, e.g. `--set particle.light_speed=20`. Repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
}

impl Common {
    fn overrides(&self) -> Overrides {
        Overrides {
            out: self.out.clone(),
            seed: self.seed,
            set: self.set.clone(),
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment and write its report.
    Run(Common),
    /// Run an experiment over a parameter range and fit a power law.
    Sweep {
        #[command(flatten)]
        common: Common,
        /// light_speed, grid_density or dt.
        #[arg(long)]
        param: Option<String>,
        /// Comma-separated values.
        #[arg(long, value_delimiter = ',')]
        values: Vec<f64>,
        /// Expected fitted exponent.
        #[arg(long, allow_hyphen_values = true)]
        expect_exponent: Option<f64>,
        /// Worker threads for concurrent runs.
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// Check a scenario file and print it with defaults filled in.
    Validate(Common),
}

fn load_table(common: &Common, extra: &[String]) -> Result<toml::Table, CliError> {
    let mut table = match &common.config {
        Some(p) => config::read_table(p)?,
        None => toml::Table::new(),
    };
    let mut overrides = common.overrides();
    overrides.set.extend_from_slice(extra);
    config::apply_overrides(&mut table, &overrides)?;
    Ok(table)
}

fn base_dir(common: &Common) -> PathBuf {
    common
        .config
        .as_deref()
        .and_then(|p| p.parent())
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from("."))
}

fn execute(cli: Cli) -> Result<bool, CliError> {
    match cli.command {
        Command::Run(common) => {
            let table = load_table(&common, &[])?;
            let config = config::from_table(table, &base_dir(&common))?;
            let report = experiments::run(config)?;
            print!("{}", report.summary());
            println!("report: {}", report.dir().join("report.toml").display());
            Ok(report.pass)
        }
        Command::Sweep { common, param, values, expect_exponent, jobs } => {
            let mut extra = Vec::new();
            if let Some(p) = param {
                extra.push(format!("sweep.parameter=\"{p}\""));
            }
            if !values.is_empty() {
                let list: Vec<String> = values.iter().map(|v| format!("{v:?}")).collect();
                extra.push(format!("sweep.values=[{}]", list.join(",")));
            }
            if let Some(e) = expect_exponent {
                extra.push(format!("sweep.expected_exponent={e:?}"));
            }
            let table = load_table(&common, &extra)?;
            let config = config::from_table(table.clone(), &base_dir(&common))?;
            let (sweep, runs) = sweep::run(table, &config, jobs)?;
            for (point, run) in sweep.points.iter().zip(&runs) {
                let verdict = if run.pass { "PASS" } else { "FAIL" };
                println!("{verdict} {} = {} -> {} = {:.4e}", sweep.parameter, point.value, sweep.metric, point.metric);
            }
            println!("{} {}", if sweep.pass { "PASS" } else { "FAIL" }, sweep.confidence);
            println!("report: {}", config.output_dir.join("sweep.toml").display());
            Ok(sweep.pass)
        }
        Command::Validate(common) => {
            let table = load_table(&common, &[])?;
            let config = config::from_table(table, &base_dir(&common))?;
            print!("{}", toml::to_string(&config)?);
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match execute(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
