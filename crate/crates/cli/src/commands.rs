//! Implementation of each subcommand. Every artifact is written by exactly
//! one function here, so `auto` and the single-stage commands produce
//! identical bytes.

use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::str::FromStr;

use serde::Serialize;
use splinecast_core::arima::{self, min_root_modulus, ArimaOrder, CoefRow, FittedArima, MAX_HORIZON, MAX_ORDER};
use splinecast_core::evaluation::{grid_search_with, rolling_backtest, Criterion, GridOptions, OrderGrid};
use splinecast_core::series::{difference, load_csv, to_daily_grid, TimeSeries, DATE_FORMAT};
use splinecast_core::simulate::{gap_mask, simulate_arima, to_raw_series, ArimaSpec};
use splinecast_core::spline::{interpolate_missing, write_filled_csv, BoundaryCondition};
use splinecast_core::stats::{acf as sample_acf, ljung_box, pacf as sample_pacf, write_ljung_box_csv, LjungBoxRow};
use splinecast_core::unitroot::{adf_test, AdfResult, LagSelection};

use crate::config::{pick, pick_opt, ConfigFile};
use crate::error::CliError;
use crate::{Common, SimulateArgs};

/// Ljung-Box p-values must exceed this at every checked lag.
const WHITE_NOISE_LEVEL: f64 = 0.05;
/// Candidates tried by `auto` before giving up on the white-noise gate.
const MAX_CANDIDATES: usize = 3;

/// Resolved input/output settings shared by every stage.
pub struct Context {
    pub cfg: ConfigFile,
    pub input: PathBuf,
    pub column: String,
    pub date_column: String,
    pub output_dir: PathBuf,
    pub name: String,
    pub boundary: BoundaryCondition,
}

impl Common {
    pub fn resolve(&self) -> Result<Context, CliError> {
        let cfg = match &self.config {
            Some(path) => ConfigFile::load(path)?,
            None => ConfigFile::default(),
        };
        let input = pick_opt(self.input.clone(), &cfg, "input")?
            .ok_or_else(|| CliError::usage("no input file (use --input or `input` in the config)"))?;
        let column = pick_opt(self.column.clone(), &cfg, "value_column")?
            .ok_or_else(|| CliError::usage("no value column (use --column or `value_column` in the config)"))?;
        let name = pick_opt(self.name.clone(), &cfg, "name")?.unwrap_or_else(|| column.clone());
        Ok(Context {
            date_column: pick(self.date_column.clone(), &cfg, "date_column", "Date".to_string())?,
            output_dir: pick(self.output_dir.clone(), &cfg, "output_dir", PathBuf::from("."))?,
            boundary: pick(self.boundary, &cfg, "boundary", BoundaryCondition::Natural)?,
            input,
            column,
            name,
            cfg,
        })
    }
}

/// Input series on the daily grid, before and after gap filling.
pub struct Loaded {
    pub grid: TimeSeries,
    pub filled: TimeSeries,
    pub filled_idx: Vec<usize>,
    pub values: Vec<f64>,
}

impl Context {
    fn load(&self) -> Result<Loaded, CliError> {
        let raw = load_csv(&self.input, &self.column, &self.date_column)?;
        let grid = to_daily_grid(&raw)?;
        let (filled, filled_idx) = interpolate_missing(&grid, self.boundary)?;
        let values = filled.dense()?;
        Ok(Loaded {
            grid,
            filled,
            filled_idx,
            values,
        })
    }

    /// Writes `<output_dir>/<name>_<suffix>` from an in-memory buffer.
    fn write_artifact<F>(&self, suffix: &str, body: F) -> Result<PathBuf, CliError>
    where
        F: FnOnce(&mut Vec<u8>) -> std::io::Result<()>,
    {
        fs::create_dir_all(&self.output_dir)
            .map_err(|e| CliError::data(format!("cannot create {}: {e}", self.output_dir.display())))?;
        let path = self.output_dir.join(format!("{}_{suffix}", self.name));
        let mut buf = Vec::new();
        body(&mut buf)?;
        fs::write(&path, buf).map_err(|e| CliError::data(format!("cannot write {}: {e}", path.display())))?;
        Ok(path)
    }

    fn write_json<T: Serialize>(&self, suffix: &str, value: &T) -> Result<PathBuf, CliError> {
        self.write_artifact(suffix, |buf| {
            serde_json::to_writer_pretty(&mut *buf, value)?;
            buf.push(b'\n');
            Ok(())
        })
    }
}

fn differenced(values: &[f64], d: usize) -> Result<Vec<f64>, CliError> {
    Ok(difference(values, d)?.values)
}

fn check_order_bound(what: &str, v: usize) -> Result<usize, CliError> {
    if v > MAX_ORDER {
        return Err(CliError::usage(format!("{what} must be at most {MAX_ORDER}, got {v}")));
    }
    Ok(v)
}

// ---------------------------------------------------------------- interpolate

fn write_filled(ctx: &Context, data: &Loaded) -> Result<PathBuf, CliError> {
    ctx.write_artifact("filled.csv", |buf| write_filled_csv(&data.filled, &data.filled_idx, buf))
}

pub fn interpolate(ctx: &Context) -> Result<(), CliError> {
    let data = ctx.load()?;
    let path = write_filled(ctx, &data)?;
    println!(
        "{}: {} days, {} gaps filled ({} boundary) -> {}",
        ctx.name,
        data.grid.len(),
        data.filled_idx.len(),
        ctx.boundary.as_str(),
        path.display()
    );
    Ok(())
}

// ------------------------------------------------------------------------ adf

/// ADF significance level restricted to the tabulated ones.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Alpha(pub f64);

impl FromStr for Alpha {
    type Err = String;

    /// Accepts `0.05` or `5%`.
    fn from_str(s: &str) -> Result<Self, String> {
        let s = s.trim();
        let v = match s.strip_suffix('%') {
            Some(pct) => pct.trim().parse::<f64>().map(|v| v / 100.0),
            None => s.parse::<f64>(),
        }
        .map_err(|_| format!("bad significance level `{s}`"))?;
        [0.01, 0.05, 0.10]
            .into_iter()
            .find(|a| (a - v).abs() < 1e-12)
            .map(Alpha)
            .ok_or_else(|| format!("significance level must be 0.01, 0.05 or 0.10, got `{s}`"))
    }
}

pub struct AdfOptions {
    pub d_max: usize,
    pub alpha: f64,
    pub max_lag: Option<usize>,
}

impl AdfOptions {
    pub fn resolve(ctx: &Context, d_max: Option<usize>, alpha: Option<Alpha>, max_lag: Option<usize>) -> Result<Self, CliError> {
        Ok(Self {
            d_max: check_order_bound("d_max", pick(d_max, &ctx.cfg, "d_max", 2)?)?,
            alpha: pick(alpha, &ctx.cfg, "adf_alpha", Alpha(0.05))?.0,
            max_lag: pick_opt(max_lag, &ctx.cfg, "adf_max_lag")?,
        })
    }
}

#[derive(Debug, Serialize)]
pub struct AdfEntry {
    pub d: usize,
    #[serde(flatten)]
    pub result: AdfResult,
    pub reject_at_alpha: bool,
}

#[derive(Debug, Serialize)]
pub struct AdfReport {
    pub alpha: f64,
    pub tests: Vec<AdfEntry>,
    pub selected_d: usize,
    /// Whether the series differenced `selected_d` times rejects the unit root.
    pub stationary: bool,
}

fn adf_entry(values: &[f64], d: usize, opts: &AdfOptions) -> Result<AdfEntry, CliError> {
    let x = differenced(values, d)?;
    let result = adf_test(&x, opts.max_lag, LagSelection::Aic)?;
    let reject_at_alpha = result.statistic < result.critical_values.at(opts.alpha)?;
    Ok(AdfEntry {
        d,
        result,
        reject_at_alpha,
    })
}

/// Either the single test at `diff`, or tests at `d = 0, 1, …` until one rejects.
fn adf_report(values: &[f64], diff: Option<usize>, opts: &AdfOptions) -> Result<AdfReport, CliError> {
    let mut tests = Vec::new();
    if let Some(d) = diff {
        check_order_bound("diff", d)?;
        let entry = adf_entry(values, d, opts)?;
        let stationary = entry.reject_at_alpha;
        tests.push(entry);
        return Ok(AdfReport {
            alpha: opts.alpha,
            tests,
            selected_d: d,
            stationary,
        });
    }
    for d in 0..=opts.d_max {
        let entry = adf_entry(values, d, opts)?;
        let reject = entry.reject_at_alpha;
        tests.push(entry);
        if reject {
            return Ok(AdfReport {
                alpha: opts.alpha,
                tests,
                selected_d: d,
                stationary: true,
            });
        }
    }
    Ok(AdfReport {
        alpha: opts.alpha,
        tests,
        selected_d: opts.d_max,
        stationary: false,
    })
}

fn print_adf(report: &AdfReport) {
    for t in &report.tests {
        println!(
            "  d={}: ADF {:.4} ({}, lags {}, n {}), reject at {}: {}",
            t.d, t.result.statistic, t.result.p_value, t.result.lags_used, t.result.n_effective, report.alpha, t.reject_at_alpha
        );
    }
}

pub fn adf(ctx: &Context, diff: Option<usize>, opts: &AdfOptions) -> Result<AdfReport, CliError> {
    let data = ctx.load()?;
    let report = adf_report(&data.values, diff, opts)?;
    let path = ctx.write_json("adf.json", &report)?;
    print_adf(&report);
    println!("selected d = {} (stationary: {}) -> {}", report.selected_d, report.stationary, path.display());
    Ok(report)
}

// ------------------------------------------------------------------------ acf

fn write_correlograms(ctx: &Context, values: &[f64], d: usize, max_lag: Option<usize>) -> Result<(PathBuf, PathBuf), CliError> {
    check_order_bound("diff", d)?;
    let x = differenced(values, d)?;
    let max_lag = match max_lag {
        Some(l) => l,
        None => 40.min((x.len() / 2).saturating_sub(1)),
    };
    if max_lag == 0 {
        return Err(CliError::data(format!("series of {} points is too short for a correlogram", x.len())));
    }
    let r = sample_acf(&x, max_lag)?;
    let pr = sample_pacf(&x, max_lag)?;
    let a = ctx.write_artifact("acf.csv", |buf| r.write_csv(buf))?;
    let p = ctx.write_artifact("pacf.csv", |buf| pr.write_csv(buf))?;
    Ok((a, p))
}

pub fn acf(ctx: &Context, diff: usize, max_lag: Option<usize>) -> Result<(), CliError> {
    let data = ctx.load()?;
    let (a, p) = write_correlograms(ctx, &data.values, diff, max_lag)?;
    println!("correlograms of d={diff} series -> {}, {}", a.display(), p.display());
    Ok(())
}

// ----------------------------------------------------------------------- grid

pub struct GridBounds {
    pub p_max: usize,
    pub q_max: usize,
    pub parallel: bool,
}

impl GridBounds {
    pub fn resolve(ctx: &Context, p_max: Option<usize>, q_max: Option<usize>, parallel: bool) -> Result<Self, CliError> {
        Ok(Self {
            p_max: check_order_bound("p_max", pick(p_max, &ctx.cfg, "p_max", 5)?)?,
            q_max: check_order_bound("q_max", pick(q_max, &ctx.cfg, "q_max", 5)?)?,
            parallel,
        })
    }
}

fn run_grid(ctx: &Context, values: &[f64], d: usize, bounds: &GridBounds) -> Result<OrderGrid, CliError> {
    check_order_bound("diff", d)?;
    let opts = GridOptions {
        parallel: bounds.parallel,
        include_constant: None,
    };
    let grid = grid_search_with(values, d, bounds.p_max, bounds.q_max, &opts)?;
    let path = ctx.write_artifact("grid.csv", |buf| grid.write_csv(buf))?;
    let failed = grid.cells.iter().filter(|c| !c.converged).count();
    println!(
        "grid d={d} p<={} q<={}: best by aic {:?}, bic {:?}, hqic {:?}; {failed} cells unconverged or failed -> {}",
        bounds.p_max,
        bounds.q_max,
        grid.best_by_aic,
        grid.best_by_bic,
        grid.best_by_hqic,
        path.display()
    );
    Ok(grid)
}

pub fn grid(ctx: &Context, d: usize, bounds: &GridBounds) -> Result<OrderGrid, CliError> {
    let data = ctx.load()?;
    run_grid(ctx, &data.values, d, bounds)
}

// ------------------------------------------------------------------------ fit

pub struct Diagnostics {
    pub max_lag: usize,
    pub df_adjust: bool,
}

impl Diagnostics {
    pub fn resolve(ctx: &Context, max_lag: Option<usize>, df_adjust: bool) -> Result<Self, CliError> {
        let max_lag = pick(max_lag, &ctx.cfg, "diagnostics_max_lag", 10)?;
        if max_lag == 0 {
            return Err(CliError::usage("diagnostics_max_lag must be positive"));
        }
        Ok(Self {
            max_lag,
            df_adjust: df_adjust || ctx.cfg.get("df_adjust")?.unwrap_or(false),
        })
    }
}

/// Fit report mirroring a statsmodels-style summary table.
#[derive(Debug, Serialize)]
pub struct FitReport<'a> {
    pub model: String,
    pub include_constant: bool,
    pub n_obs: usize,
    pub n_effective: usize,
    pub loglik: f64,
    pub aic: f64,
    pub bic: f64,
    pub hqic: f64,
    pub converged: bool,
    pub coefficients: &'a [CoefRow],
    pub ljung_box_max_lag: usize,
    pub ljung_box_min_p: f64,
    pub ljung_box_passed: bool,
    pub warnings: Vec<String>,
}

pub struct Diagnosed {
    pub fitted: FittedArima,
    pub lb: Vec<LjungBoxRow>,
    pub passed: bool,
}

fn diagnose(fitted: FittedArima, diag: &Diagnostics) -> Result<Diagnosed, CliError> {
    let params = fitted.order.p + fitted.order.q;
    let lb = ljung_box(fitted.diagnostic_residuals(), diag.max_lag, params, diag.df_adjust)?;
    let passed = lb.iter().all(|r| r.p_value > WHITE_NOISE_LEVEL);
    Ok(Diagnosed { fitted, lb, passed })
}

fn write_fit(ctx: &Context, d: &Diagnosed, diag: &Diagnostics) -> Result<(PathBuf, PathBuf), CliError> {
    let f = &d.fitted;
    let mut warnings = Vec::new();
    if !f.converged {
        warnings.push("optimizer did not meet its tolerance within the evaluation budget".to_string());
    }
    if f.coef_table.iter().any(|r| !r.available()) {
        warnings.push("standard errors unavailable: Hessian not negative definite".to_string());
    }
    let min_p = d.lb.iter().map(|r| r.p_value).fold(1.0, f64::min);
    if !d.passed {
        let lag = d.lb.iter().find(|r| r.p_value <= WHITE_NOISE_LEVEL).map_or(0, |r| r.lag);
        warnings.push(format!(
            "Ljung-Box gate failed: p-value {min_p:.4} <= {WHITE_NOISE_LEVEL} (first at lag {lag}); residuals are not white noise"
        ));
    }
    let report = FitReport {
        model: f.model_name(),
        include_constant: f.order.include_constant,
        n_obs: f.n_obs,
        n_effective: f.n_effective,
        loglik: f.loglik,
        aic: f.aic,
        bic: f.bic,
        hqic: f.hqic,
        converged: f.converged,
        coefficients: &f.coef_table,
        ljung_box_max_lag: diag.max_lag,
        ljung_box_min_p: min_p,
        ljung_box_passed: d.passed,
        warnings,
    };
    let fit_path = ctx.write_json("fit.json", &report)?;
    let lb_path = ctx.write_artifact("ljungbox.csv", |buf| write_ljung_box_csv(&d.lb, buf))?;
    Ok((fit_path, lb_path))
}

fn print_fit(d: &Diagnosed) {
    let f = &d.fitted;
    println!(
        "{}: loglik {:.3}, aic {:.3}, bic {:.3}, hqic {:.3}, converged {}",
        f.model_name(),
        f.loglik,
        f.aic,
        f.bic,
        f.hqic,
        f.converged
    );
    for r in &f.coef_table {
        match (r.std_err, r.z, r.p) {
            (Some(se), Some(z), Some(p)) => println!("  {:<8} {:>12.6} se {:.6} z {:.3} p {:.4}", r.name, r.coef, se, z, p),
            _ => println!("  {:<8} {:>12.6} (no standard error)", r.name, r.coef),
        }
    }
    println!("  Ljung-Box white-noise gate passed: {}", d.passed);
}

pub fn fit(ctx: &Context, order: ArimaOrder, diag: &Diagnostics) -> Result<Diagnosed, CliError> {
    let data = ctx.load()?;
    let d = diagnose(arima::fit(&data.values, order)?, diag)?;
    let (a, b) = write_fit(ctx, &d, diag)?;
    print_fit(&d);
    println!("-> {}, {}", a.display(), b.display());
    Ok(d)
}

// ------------------------------------------------------------------- forecast

pub fn resolve_horizon(ctx: &Context, horizon: Option<usize>) -> Result<usize, CliError> {
    let h = pick(horizon, &ctx.cfg, "forecast_horizon", 31)?;
    if h == 0 || h > MAX_HORIZON {
        return Err(CliError::usage(format!("forecast horizon must be in 1..={MAX_HORIZON}, got {h}")));
    }
    Ok(h)
}

fn write_forecast(ctx: &Context, data: &Loaded, fitted: &FittedArima, horizon: usize) -> Result<PathBuf, CliError> {
    let fc = arima::forecast(fitted, &data.values, horizon)?;
    let last = data.grid.end_date();
    ctx.write_artifact("forecast.csv", |buf| fc.write_csv(last, buf))
}

pub fn forecast(ctx: &Context, order: ArimaOrder, horizon: usize) -> Result<(), CliError> {
    let data = ctx.load()?;
    let fitted = arima::fit(&data.values, order)?;
    let path = write_forecast(ctx, &data, &fitted, horizon)?;
    println!("{} forecast, {horizon} steps from {} -> {}", fitted.model_name(), data.grid.end_date().format(DATE_FORMAT), path.display());
    Ok(())
}

// ------------------------------------------------------------------- backtest

pub fn backtest(ctx: &Context, order: ArimaOrder, test_lengths: &[usize]) -> Result<(), CliError> {
    let data = ctx.load()?;
    let report = rolling_backtest(&data.values, order, test_lengths)?;
    let path = ctx.write_artifact("backtest.csv", |buf| report.write_csv(buf))?;
    for r in &report.rows {
        println!(
            "  L={}: mse {:.6} over {} windows ({} skipped)",
            r.test_length, r.mse, r.n_windows, r.skipped
        );
    }
    println!("{order} backtest -> {}", path.display());
    Ok(())
}

// ----------------------------------------------------------------------- auto

pub struct AutoSettings {
    pub adf: AdfOptions,
    pub grid: GridBounds,
    pub criterion: Criterion,
    pub diagnostics: Diagnostics,
    pub horizon: usize,
}

pub fn auto(ctx: &Context, s: &AutoSettings) -> Result<(), CliError> {
    let data = ctx.load()?;
    write_filled(ctx, &data)?;
    println!("{}: {} days, {} gaps filled", ctx.name, data.grid.len(), data.filled_idx.len());

    let adf = adf_report(&data.values, None, &s.adf)?;
    ctx.write_json("adf.json", &adf)?;
    print_adf(&adf);
    let d = adf.selected_d;
    if !adf.stationary {
        eprintln!("warning: unit root not rejected up to d = {}; continuing with d = {d}", s.adf.d_max);
    }

    write_correlograms(ctx, &data.values, d, None)?;
    let grid = run_grid(ctx, &data.values, d, &s.grid)?;
    let include_constant = grid.include_constant;

    let mut fallback: Option<Diagnosed> = None;
    let mut accepted: Option<Diagnosed> = None;
    for (p, q) in grid.ranked(s.criterion).into_iter().take(MAX_CANDIDATES) {
        let order = ArimaOrder::new(p, d, q).with_constant(include_constant);
        let fitted = match arima::fit(&data.values, order) {
            Ok(f) => f,
            Err(e) => {
                eprintln!("warning: {order} failed to refit: {e}");
                continue;
            }
        };
        let diagnosed = diagnose(fitted, &s.diagnostics)?;
        println!("candidate {order} by {}: white-noise gate passed: {}", s.criterion, diagnosed.passed);
        if diagnosed.passed {
            accepted = Some(diagnosed);
            break;
        }
        fallback.get_or_insert(diagnosed);
    }
    let gate_passed = accepted.is_some();
    let chosen = accepted
        .or(fallback)
        .ok_or_else(|| CliError::numerical("no candidate order could be fitted"))?;
    write_fit(ctx, &chosen, &s.diagnostics)?;
    print_fit(&chosen);
    let path = write_forecast(ctx, &data, &chosen.fitted, s.horizon)?;
    println!("forecast {} steps -> {}", s.horizon, path.display());
    if !gate_passed {
        return Err(CliError::numerical(format!(
            "no candidate among the best {MAX_CANDIDATES} passed the Ljung-Box gate; best-effort {} written with a warning",
            chosen.fitted.model_name()
        )));
    }
    Ok(())
}

// ------------------------------------------------------------------- simulate

pub fn simulate(args: &SimulateArgs) -> Result<(), CliError> {
    let order = args.order;
    if args.phi.len() != order.p || args.theta.len() != order.q {
        return Err(CliError::usage(format!(
            "{order} needs {} AR and {} MA coefficients, got {} and {}",
            order.p,
            order.q,
            args.phi.len(),
            args.theta.len()
        )));
    }
    let neg_theta: Vec<f64> = args.theta.iter().map(|t| -t).collect();
    if min_root_modulus(&args.phi) <= 1.0 || min_root_modulus(&neg_theta) <= 1.0 {
        return Err(CliError::usage("AR and MA polynomials must have all roots outside the unit circle"));
    }
    if args.n < 2 {
        return Err(CliError::usage("need at least 2 days"));
    }
    let gaps = match (args.gaps, args.gap_rate) {
        (Some(g), _) => g,
        (None, Some(rate)) if (0.0..1.0).contains(&rate) => ((args.n - 2) as f64 * rate).round() as usize,
        (None, Some(rate)) => return Err(CliError::usage(format!("gap rate must be in [0, 1), got {rate}"))),
        (None, None) => 0,
    };
    let spec = ArimaSpec {
        phi: args.phi.clone(),
        theta: args.theta.clone(),
        constant: args.constant,
        sigma: args.sigma,
        d: order.d,
        start_level: args.start_level,
    };
    let values = simulate_arima(&spec, args.n, args.seed)?;
    let keep = gap_mask(args.n, gaps, args.seed.wrapping_add(1))?;
    let raw = to_raw_series(args.start_date, &values, &keep, &args.column)?;

    let mut buf = Vec::new();
    writeln!(buf, "{},{}", args.date_column, args.column)?;
    for (date, v) in &raw.observations {
        writeln!(buf, "{},{v}", date.format(DATE_FORMAT))?;
    }
    if let Some(dir) = args.output.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(dir)?;
    }
    fs::write(&args.output, buf)
        .map_err(|e| CliError::data(format!("cannot write {}: {e}", args.output.display())))?;
    println!(
        "{order}: {} days, {} rows, {gaps} gaps -> {}",
        args.n,
        raw.len(),
        args.output.display()
    );
    Ok(())
}
