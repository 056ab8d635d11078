//! `splinecast`: gap filling, unit-root testing, ARIMA order selection,
//! fitting, diagnostics, backtesting and forecasting for daily series.

use std::path::PathBuf;
use std::process::ExitCode;

use chrono::NaiveDate;
use clap::{Args, Parser, Subcommand};
use splinecast_core::arima::ArimaOrder;
use splinecast_core::evaluation::Criterion;
use splinecast_core::spline::BoundaryCondition;

mod commands;
mod config;
mod error;

use commands::Alpha;
use error::CliError;

#[derive(Parser, Debug)]
#[command(name = "splinecast", version, about = "Spline gap filling and ARIMA forecasting for daily series")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

/// Options shared by every pipeline stage.
#[derive(Args, Debug, Clone, Default)]
pub struct Common {
    /// Input CSV: a header row, an ISO date column and numeric columns
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Value column to analyse
    #[arg(long)]
    pub column: Option<String>,
    /// Date column name [default: Date]
    #[arg(long)]
    pub date_column: Option<String>,
    /// `key = value` config file; flags take precedence over its entries
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Directory for output files [default: .]
    #[arg(long)]
    pub output_dir: Option<PathBuf>,
    /// Prefix of output file names [default: the column name]
    #[arg(long)]
    pub name: Option<String>,
    /// Spline end condition used to fill gaps: natural, not_a_knot or periodic [default: natural]
    #[arg(long)]
    pub boundary: Option<BoundaryCondition>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Fill missing calendar days by cubic-spline interpolation
    Interpolate {
        #[command(flatten)]
        common: Common,
    },
    /// Augmented Dickey-Fuller tests; by default differences until the unit root is rejected
    Adf {
        #[command(flatten)]
        common: Common,
        /// Test only this differencing order
        #[arg(long)]
        diff: Option<usize>,
        /// Largest differencing order tried [default: 2]
        #[arg(long)]
        d_max: Option<usize>,
        /// Test level: 0.01, 0.05 or 0.10 [default: 0.05]
        #[arg(long)]
        adf_alpha: Option<Alpha>,
        /// Maximum augmentation lag [default: 12 (n/100)^(1/4)]
        #[arg(long)]
        adf_max_lag: Option<usize>,
    },
    /// Sample ACF and PACF of the differenced series
    Acf {
        #[command(flatten)]
        common: Common,
        /// Differencing order [default: 0]
        #[arg(long)]
        diff: Option<usize>,
        /// Largest lag [default: min(40, n/2 - 1)]
        #[arg(long)]
        max_lag: Option<usize>,
    },
    /// Information criteria over a (p, q) grid
    Grid {
        #[command(flatten)]
        common: Common,
        /// Differencing order [default: 0]
        #[arg(long)]
        diff: Option<usize>,
        /// Largest AR order [default: 5]
        #[arg(long)]
        p_max: Option<usize>,
        /// Largest MA order [default: 5]
        #[arg(long)]
        q_max: Option<usize>,
        /// Fit the cells one after another instead of in parallel
        #[arg(long)]
        sequential: bool,
    },
    /// Fit one ARIMA order and run the Ljung-Box diagnostics
    Fit {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        model: ModelArgs,
        /// Ljung-Box lags checked [default: 10]
        #[arg(long)]
        diagnostics_max_lag: Option<usize>,
        /// Reduce Ljung-Box degrees of freedom by p + q
        #[arg(long)]
        df_adjust: bool,
    },
    /// Fit one order on the whole series and forecast past its end
    Forecast {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        model: ModelArgs,
        /// Steps ahead [default: 31]
        #[arg(long)]
        horizon: Option<usize>,
    },
    /// Expanding-window backtest of one order
    Backtest {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        model: ModelArgs,
        /// Comma-separated test-set lengths
        #[arg(long, value_delimiter = ',', required = true)]
        test_lengths: Vec<usize>,
    },
    /// Whole pipeline: fill, test, select, fit, diagnose, forecast
    Auto {
        #[command(flatten)]
        common: Common,
        /// Largest differencing order tried [default: 2]
        #[arg(long)]
        d_max: Option<usize>,
        /// Largest AR order in the grid [default: 5]
        #[arg(long)]
        p_max: Option<usize>,
        /// Largest MA order in the grid [default: 5]
        #[arg(long)]
        q_max: Option<usize>,
        /// aic, bic or hqic [default: bic]
        #[arg(long)]
        criterion: Option<Criterion>,
        /// ADF test level: 0.01, 0.05 or 0.10 [default: 0.05]
        #[arg(long)]
        adf_alpha: Option<Alpha>,
        /// Maximum ADF augmentation lag [default: Schwert bound]
        #[arg(long)]
        adf_max_lag: Option<usize>,
        /// Ljung-Box lags checked by the white-noise gate [default: 10]
        #[arg(long)]
        diagnostics_max_lag: Option<usize>,
        /// Forecast steps [default: 31]
        #[arg(long)]
        horizon: Option<usize>,
        /// Reduce Ljung-Box degrees of freedom by p + q
        #[arg(long)]
        df_adjust: bool,
        /// Fit grid cells one after another instead of in parallel
        #[arg(long)]
        sequential: bool,
    },
    /// Write a seeded ARIMA series with randomly removed days as CSV
    Simulate(SimulateArgs),
}

/// Model order for single-model stages.
#[derive(Args, Debug, Clone)]
pub struct ModelArgs {
    /// Order as p,d,q
    #[arg(long)]
    pub order: ArimaOrder,
    /// Estimate an intercept [default: true when d = 0]
    #[arg(long)]
    pub constant: Option<bool>,
}

impl ModelArgs {
    pub fn order(&self) -> ArimaOrder {
        match self.constant {
            Some(c) => self.order.with_constant(c),
            None => self.order,
        }
    }
}

#[derive(Args, Debug, Clone)]
pub struct SimulateArgs {
    /// Order as p,d,q; p and q must match the lengths of --phi and --theta
    #[arg(long)]
    pub order: ArimaOrder,
    /// Comma-separated AR coefficients
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub phi: Vec<f64>,
    /// Comma-separated MA coefficients (plus-sign convention)
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub theta: Vec<f64>,
    /// Intercept of the differenced process
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub constant: f64,
    /// Innovation standard deviation
    #[arg(long, default_value_t = 1.0)]
    pub sigma: f64,
    /// Starting level of the integrated path
    #[arg(long, default_value_t = 100.0, allow_hyphen_values = true)]
    pub start_level: f64,
    /// Number of calendar days
    #[arg(long)]
    pub n: usize,
    /// Number of interior days to drop
    #[arg(long, conflicts_with = "gap_rate")]
    pub gaps: Option<usize>,
    /// Fraction of interior days to drop
    #[arg(long)]
    pub gap_rate: Option<f64>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value = "2010-01-04")]
    pub start_date: NaiveDate,
    /// Name of the value column
    #[arg(long, default_value = "Value")]
    pub column: String,
    #[arg(long, default_value = "Date")]
    pub date_column: String,
    /// Output CSV path
    #[arg(long)]
    pub output: PathBuf,
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Interpolate { common } => commands::interpolate(&common.resolve()?),
        Command::Adf {
            common,
            diff,
            d_max,
            adf_alpha,
            adf_max_lag,
        } => {
            let ctx = common.resolve()?;
            let opts = commands::AdfOptions::resolve(&ctx, d_max, adf_alpha, adf_max_lag)?;
            commands::adf(&ctx, diff, &opts).map(|_| ())
        }
        Command::Acf { common, diff, max_lag } => commands::acf(&common.resolve()?, diff.unwrap_or(0), max_lag),
        Command::Grid {
            common,
            diff,
            p_max,
            q_max,
            sequential,
        } => {
            let ctx = common.resolve()?;
            let bounds = commands::GridBounds::resolve(&ctx, p_max, q_max, !sequential)?;
            commands::grid(&ctx, diff.unwrap_or(0), &bounds).map(|_| ())
        }
        Command::Fit {
            common,
            model,
            diagnostics_max_lag,
            df_adjust,
        } => {
            let ctx = common.resolve()?;
            let diag = commands::Diagnostics::resolve(&ctx, diagnostics_max_lag, df_adjust)?;
            commands::fit(&ctx, model.order(), &diag).map(|_| ())
        }
        Command::Forecast { common, model, horizon } => {
            let ctx = common.resolve()?;
            let horizon = commands::resolve_horizon(&ctx, horizon)?;
            commands::forecast(&ctx, model.order(), horizon)
        }
        Command::Backtest {
            common,
            model,
            test_lengths,
        } => commands::backtest(&common.resolve()?, model.order(), &test_lengths),
        Command::Auto {
            common,
            d_max,
            p_max,
            q_max,
            criterion,
            adf_alpha,
            adf_max_lag,
            diagnostics_max_lag,
            horizon,
            df_adjust,
            sequential,
        } => {
            let ctx = common.resolve()?;
            let settings = commands::AutoSettings {
                adf: commands::AdfOptions::resolve(&ctx, d_max, adf_alpha, adf_max_lag)?,
                grid: commands::GridBounds::resolve(&ctx, p_max, q_max, !sequential)?,
                criterion: config::pick(criterion, &ctx.cfg, "criterion", Criterion::Bic)?,
                diagnostics: commands::Diagnostics::resolve(&ctx, diagnostics_max_lag, df_adjust)?,
                horizon: commands::resolve_horizon(&ctx, horizon)?,
            };
            commands::auto(&ctx, &settings)
        }
        Command::Simulate(args) => commands::simulate(&args),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code as u8)
        }
    }
}
