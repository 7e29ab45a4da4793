use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use levdecay::analysis::{DEFAULT_ROLLING_WINDOW, DEFAULT_STRIDE};
use levdecay::market_data::DEFAULT_BASE_REAL_LOG_RETURN;
use levdecay::model::{DEFAULT_LEVERAGED_FEE, DEFAULT_UNLEVERAGED_FEE, TRADING_DAYS_PER_YEAR};

mod commands;
mod output;

/// Leveraged index fund volatility-decay reports over local CSV data.
#[derive(Parser, Debug)]
#[command(name = "levdecay", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Rolling sqrt(v), the root mean squared daily change, over a daily price file.
    /// Writes rolling_vol.csv (end_date,sqrt_v) and rolling_vol.svg.
    RollingVol(RollingVolArgs),

    /// Compare the sign of the quadratic excess approximation n·g(L) against the
    /// exact leveraged-minus-unleveraged log-return on every window.
    /// Writes validation_records.csv, validation_skipped.csv, validation_summary.csv
    /// and validation.svg.
    Validate(ValidateArgs),

    /// Dominance interval [v-, v+] and optimal leverage for projected mean
    /// log-returns. Writes thresholds.csv, optimal_leverage.csv,
    /// optimal_leverage.svg and dominance_bounds.svg.
    Thresholds(ThresholdArgs),

    /// Annual real returns from a year,P,D,J file with their cumulative log sum
    /// and trend slope. Writes real_returns.csv, real_returns_trend.csv and
    /// real_returns.svg.
    RealReturns(RealReturnArgs),
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Csv,
    Chart,
    Both,
}

#[derive(Args, Debug, Clone)]
pub struct OutputArgs {
    /// Directory receiving every output file (created if missing)
    #[arg(long, short = 'o', default_value = ".")]
    pub out_dir: PathBuf,

    /// Which outputs to write
    #[arg(long, value_enum, default_value_t = Format::Both)]
    pub format: Format,

    /// Print the primary table to standard output instead of writing files
    #[arg(long)]
    pub stdout: bool,
}

#[derive(Args, Debug)]
pub struct RollingVolArgs {
    /// Daily CSV with date and adj_close columns
    #[arg(long, short = 'i')]
    pub input: PathBuf,

    /// Trailing window in trading days
    #[arg(long, default_value_t = DEFAULT_ROLLING_WINDOW)]
    pub window: usize,

    /// Trading days between window placements
    #[arg(long, default_value_t = DEFAULT_STRIDE)]
    pub stride: usize,

    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Debug)]
pub struct ValidateArgs {
    /// Daily CSV with date and adj_close columns
    #[arg(long, short = 'i')]
    pub input: PathBuf,

    /// Leverage multiples to check, comma separated
    #[arg(long, value_delimiter = ',', default_value = "2,3")]
    pub leverages: Vec<f64>,

    /// Window lengths in trading days, comma separated
    #[arg(long, value_delimiter = ',', default_value = "252,1260,2520")]
    pub windows: Vec<usize>,

    /// Trading days between window placements
    #[arg(long, default_value_t = DEFAULT_STRIDE)]
    pub stride: usize,

    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Debug)]
pub struct ThresholdArgs {
    /// Annual expense ratio of the unleveraged fund
    #[arg(long, default_value_t = DEFAULT_UNLEVERAGED_FEE)]
    pub r0: f64,

    /// Annual expense ratio of the leveraged fund
    #[arg(long, default_value_t = DEFAULT_LEVERAGED_FEE)]
    pub r1: f64,

    /// Long-run annual inflation rates as fractions, comma separated
    #[arg(long, value_delimiter = ',', default_value = "0,0.01,0.02,0.03,0.04")]
    pub inflations: Vec<f64>,

    /// Mean annual real log-return the projections build on
    #[arg(long, default_value_t = DEFAULT_BASE_REAL_LOG_RETURN)]
    pub base_real: f64,

    /// sqrt(v) values at which thresholds.csv reports the optimal leverage
    #[arg(long, value_delimiter = ',', default_value = "0.01,0.0158,0.02")]
    pub probe_sqrt_v: Vec<f64>,

    /// Smallest sqrt(v) on the optimal leverage grid
    #[arg(long, default_value_t = 0.005)]
    pub grid_min: f64,

    /// Largest sqrt(v) on the optimal leverage grid
    #[arg(long, default_value_t = 0.03)]
    pub grid_max: f64,

    /// Number of sqrt(v) grid points
    #[arg(long, default_value_t = 101)]
    pub grid_points: usize,

    /// Trading days per year used for fees and daily returns
    #[arg(long, default_value_t = TRADING_DAYS_PER_YEAR)]
    pub trading_days: f64,

    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Debug)]
pub struct RealReturnArgs {
    /// Annual CSV with header year,P,D,J
    #[arg(long, short = 'i')]
    pub input: PathBuf,

    #[command(flatten)]
    pub output: OutputArgs,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::RollingVol(args) => commands::rolling_vol(&args),
        Command::Validate(args) => commands::validate(&args),
        Command::Thresholds(args) => commands::thresholds(&args),
        Command::RealReturns(args) => commands::real_returns(&args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("levdecay: error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use levdecay::analysis::{
        DEFAULT_INFLATIONS, DEFAULT_VALIDATION_LEVERAGES, DEFAULT_VALIDATION_WINDOWS,
    };

    #[test]
    fn list_defaults_match_library_constants() {
        let cli = Cli::parse_from(["levdecay", "validate", "-i", "x.csv"]);
        let Command::Validate(v) = cli.command else { panic!() };
        assert_eq!(v.leverages, DEFAULT_VALIDATION_LEVERAGES);
        assert_eq!(v.windows, DEFAULT_VALIDATION_WINDOWS);

        let cli = Cli::parse_from(["levdecay", "thresholds"]);
        let Command::Thresholds(t) = cli.command else { panic!() };
        assert_eq!(t.inflations, DEFAULT_INFLATIONS);
        assert_eq!(t.probe_sqrt_v, [0.01, 0.0158, 0.02]);
    }

    #[test]
    fn cli_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
