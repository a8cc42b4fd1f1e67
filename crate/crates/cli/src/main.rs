//! `co2dist`: distribution fitting, lognormality tests, Gibrat regressions,
//! parameter trends and target allocation for emissions panels.

mod commands;
mod report;
mod scenario;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Result};
use clap::{Parser, Subcommand};

use commands::{DataArgs, SimulateArgs};

#[derive(Debug, Parser)]
#[command(name = "co2dist", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Per-year descriptive statistics.
    Summarize(DataArgs),
    /// Fit six size distributions per year and rank them by AIC.
    Rank(DataArgs),
    /// Seven lognormality tests per year.
    Test {
        #[command(flatten)]
        data: DataArgs,
        /// Two significance levels, larger first.
        #[arg(long, default_value = "0.05,0.01")]
        alpha: String,
    },
    /// Gibrat's-law regressions M1–M4 for consecutive years.
    Gibrat {
        #[command(flatten)]
        data: DataArgs,
        #[arg(long, default_value = "0.05,0.01")]
        alpha: String,
        /// Heteroskedasticity-consistent (HC0) standard errors.
        #[arg(long)]
        robust: bool,
    },
    /// Linear trends of the yearly lognormal parameters and forecasts.
    Trend {
        #[command(flatten)]
        data: DataArgs,
        /// Forecast years.
        #[arg(long, value_delimiter = ',', default_value = "2025,2030,2035")]
        predict: Vec<i32>,
        /// Base year for the global ratio R.
        #[arg(long, default_value_t = 1990)]
        base_year: i32,
    },
    /// National targets for a policy scenario.
    Policy {
        #[command(flatten)]
        data: DataArgs,
        /// TOML scenario file
        #[arg(long)]
        scenario: PathBuf,
    },
    /// Write a synthetic proportionate-growth panel (long format).
    Simulate(SimulateArgs),
}

fn parse_alphas(s: &str) -> Result<(f64, f64)> {
    let v: Vec<f64> = s
        .split(',')
        .map(|a| a.trim().parse::<f64>())
        .collect::<Result<_, _>>()?;
    match v[..] {
        [hi, lo] if 0.0 < lo && lo < hi && hi < 1.0 => Ok((hi, lo)),
        _ => bail!("--alpha expects two levels `hi,lo` with 0 < lo < hi < 1, got `{s}`"),
    }
}

fn run(cli: Cli) -> Result<()> {
    let outputs = match &cli.command {
        Command::Summarize(d) => commands::summarize(d)?,
        Command::Rank(d) => commands::rank(d)?,
        Command::Test { data, alpha } => commands::test(data, parse_alphas(alpha)?)?,
        Command::Gibrat {
            data,
            alpha,
            robust,
        } => commands::gibrat(data, parse_alphas(alpha)?, *robust)?,
        Command::Trend {
            data,
            predict,
            base_year,
        } => commands::trend(data, predict, *base_year)?,
        Command::Policy { data, scenario } => commands::policy(data, scenario)?,
        Command::Simulate(s) => commands::simulate(s)?,
    };
    for path in outputs.commit()? {
        println!("{}", path.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
