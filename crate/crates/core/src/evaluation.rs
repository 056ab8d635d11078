//! Order selection over a (p, q) grid and expanding-window backtests.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use crate::arima::{fit, forecast, ArimaOrder, MAX_ORDER};
use crate::error::{Error, Result};

/// Criteria within this distance count as tied.
const TIE_TOL: f64 = 1e-9;

/// Information criterion used to rank models.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Criterion {
    Aic,
    #[default]
    Bic,
    Hqic,
}

impl Criterion {
    pub fn as_str(self) -> &'static str {
        match self {
            Criterion::Aic => "aic",
            Criterion::Bic => "bic",
            Criterion::Hqic => "hqic",
        }
    }
}

impl fmt::Display for Criterion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Criterion {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "aic" => Ok(Criterion::Aic),
            "bic" => Ok(Criterion::Bic),
            "hqic" => Ok(Criterion::Hqic),
            other => Err(Error::InvalidArgument(format!(
                "unknown criterion `{other}` (expected aic, bic or hqic)"
            ))),
        }
    }
}

/// Outcome of fitting one (p, q) cell. Criteria are `NaN` when the fit failed.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridCell {
    pub p: usize,
    pub q: usize,
    pub aic: f64,
    pub bic: f64,
    pub hqic: f64,
    pub converged: bool,
    /// Error message of a failed fit.
    pub error: Option<String>,
}

impl GridCell {
    pub fn value(&self, criterion: Criterion) -> f64 {
        match criterion {
            Criterion::Aic => self.aic,
            Criterion::Bic => self.bic,
            Criterion::Hqic => self.hqic,
        }
    }

    fn eligible(&self) -> bool {
        self.converged && self.aic.is_finite() && self.bic.is_finite() && self.hqic.is_finite()
    }
}

/// Criteria over `[0..=p_max] × [0..=q_max]` at fixed `d`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OrderGrid {
    pub d: usize,
    pub include_constant: bool,
    /// Cells sorted by `(p, q)`.
    pub cells: Vec<GridCell>,
    pub best_by_aic: (usize, usize),
    pub best_by_bic: (usize, usize),
    pub best_by_hqic: (usize, usize),
}

impl OrderGrid {
    pub fn cell(&self, p: usize, q: usize) -> Option<&GridCell> {
        self.cells.iter().find(|c| c.p == p && c.q == q)
    }

    pub fn best(&self, criterion: Criterion) -> (usize, usize) {
        match criterion {
            Criterion::Aic => self.best_by_aic,
            Criterion::Bic => self.best_by_bic,
            Criterion::Hqic => self.best_by_hqic,
        }
    }

    /// Converged cells from best to worst under `criterion`; near-ties are
    /// ordered by smaller `p + q`, then smaller `p`.
    pub fn ranked(&self, criterion: Criterion) -> Vec<(usize, usize)> {
        let mut rest: Vec<&GridCell> = self.cells.iter().filter(|c| c.eligible()).collect();
        let mut out = Vec::with_capacity(rest.len());
        while let Some(i) = argmin(&rest, criterion) {
            let c = rest.remove(i);
            out.push((c.p, c.q));
        }
        out
    }

    /// Writes `p,q,aic,bic,hqic,converged`; failed cells leave the criteria empty.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "p,q,aic,bic,hqic,converged")?;
        for c in &self.cells {
            if c.error.is_some() {
                writeln!(out, "{},{},,,,false", c.p, c.q)?;
            } else {
                writeln!(out, "{},{},{},{},{},{}", c.p, c.q, c.aic, c.bic, c.hqic, c.converged)?;
            }
        }
        Ok(())
    }
}

/// Index of the best cell: lowest criterion, near-ties resolved by parsimony.
fn argmin(cells: &[&GridCell], criterion: Criterion) -> Option<usize> {
    let mut idx: Vec<usize> = (0..cells.len()).collect();
    idx.sort_by_key(|&i| (cells[i].p + cells[i].q, cells[i].p));
    let mut best: Option<usize> = None;
    for i in idx {
        match best {
            None => best = Some(i),
            Some(b) if cells[i].value(criterion) < cells[b].value(criterion) - TIE_TOL => best = Some(i),
            _ => {}
        }
    }
    best
}

/// Settings for [`grid_search_with`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GridOptions {
    /// Fit cells on the rayon pool.
    pub parallel: bool,
    /// Overrides the default intercept rule (`d = 0` ⇒ constant).
    pub include_constant: Option<bool>,
}

impl Default for GridOptions {
    fn default() -> Self {
        Self {
            parallel: true,
            include_constant: None,
        }
    }
}

/// Fits every `(p, q)` in the grid and picks the argmin of each criterion.
pub fn grid_search(series: &[f64], d: usize, p_max: usize, q_max: usize) -> Result<OrderGrid> {
    grid_search_with(series, d, p_max, q_max, &GridOptions::default())
}

pub fn grid_search_with(series: &[f64], d: usize, p_max: usize, q_max: usize, opts: &GridOptions) -> Result<OrderGrid> {
    if p_max > MAX_ORDER || q_max > MAX_ORDER || d > MAX_ORDER {
        return Err(Error::InvalidArgument(format!(
            "grid bounds must be at most {MAX_ORDER} (p_max = {p_max}, q_max = {q_max}, d = {d})"
        )));
    }
    let include_constant = opts.include_constant.unwrap_or(d == 0);
    let needed = ArimaOrder::new(p_max, d, q_max).min_series_len();
    if series.len() < needed {
        return Err(Error::TooShort {
            needed,
            got: series.len(),
        });
    }
    let pairs: Vec<(usize, usize)> = (0..=p_max)
        .flat_map(|p| (0..=q_max).map(move |q| (p, q)))
        .filter(|&(p, q)| p + q > 0 || d > 0 || include_constant)
        .collect();
    let run = |&(p, q): &(usize, usize)| {
        let order = ArimaOrder::new(p, d, q).with_constant(include_constant);
        match fit(series, order) {
            Ok(f) => GridCell {
                p,
                q,
                aic: f.aic,
                bic: f.bic,
                hqic: f.hqic,
                converged: f.converged,
                error: None,
            },
            Err(e) => GridCell {
                p,
                q,
                aic: f64::NAN,
                bic: f64::NAN,
                hqic: f64::NAN,
                converged: false,
                error: Some(e.to_string()),
            },
        }
    };
    // collect keeps input order, so the merge is deterministic either way
    let cells: Vec<GridCell> = if opts.parallel {
        pairs.par_iter().map(run).collect()
    } else {
        pairs.iter().map(run).collect()
    };
    let eligible: Vec<&GridCell> = cells.iter().filter(|c| c.eligible()).collect();
    let pick = |criterion| {
        argmin(&eligible, criterion)
            .map(|i| (eligible[i].p, eligible[i].q))
            .ok_or(Error::AllCandidatesFailed)
    };
    Ok(OrderGrid {
        d,
        include_constant,
        best_by_aic: pick(Criterion::Aic)?,
        best_by_bic: pick(Criterion::Bic)?,
        best_by_hqic: pick(Criterion::Hqic)?,
        cells,
    })
}

/// Mean squared difference of two equally long, non-empty vectors.
pub fn mse(predicted: &[f64], observed: &[f64]) -> Result<f64> {
    if predicted.len() != observed.len() {
        return Err(Error::Dimension(format!(
            "{} predictions vs {} observations",
            predicted.len(),
            observed.len()
        )));
    }
    if predicted.is_empty() {
        return Err(Error::EmptySeries);
    }
    Ok(sse(predicted, observed) / predicted.len() as f64)
}

fn sse(predicted: &[f64], observed: &[f64]) -> f64 {
    predicted.iter().zip(observed).map(|(p, o)| (p - o) * (p - o)).sum()
}

/// One test length of a backtest.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BacktestRow {
    pub test_length: usize,
    pub mse: f64,
    /// Folds that were fitted and scored.
    pub n_windows: usize,
    /// Folds skipped because the window was too short or the fit failed.
    pub skipped: usize,
    pub total_predictions: usize,
}

impl BacktestRow {
    /// Folds in the schedule: `⌊n / L⌋ - 1`.
    pub fn planned_folds(&self) -> usize {
        self.n_windows + self.skipped
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BacktestReport {
    pub order: ArimaOrder,
    pub rows: Vec<BacktestRow>,
}

impl BacktestReport {
    /// Writes `test_length,mse,n_windows`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "test_length,mse,n_windows")?;
        for r in &self.rows {
            writeln!(out, "{},{},{}", r.test_length, r.mse, r.n_windows)?;
        }
        Ok(())
    }
}

/// Squared-error sum of one fold, or `None` when the fold is skipped.
fn score_fold(series: &[f64], order: ArimaOrder, window: usize, len: usize) -> Option<f64> {
    if window < order.min_series_len() {
        return None;
    }
    let train = &series[..window];
    let fitted = fit(train, order).ok()?;
    let fc = forecast(&fitted, train, len).ok()?;
    Some(sse(&fc.point, &series[window..window + len]))
}

/// Expanding-window backtest: for each test length `L` the window starts at
/// `L` points, forecasts the next `L` in one batch, then grows by `L`.
pub fn rolling_backtest(series: &[f64], order: ArimaOrder, test_lengths: &[usize]) -> Result<BacktestReport> {
    order.validate()?;
    if series.iter().any(|v| !v.is_finite()) {
        return Err(Error::MissingValues);
    }
    if test_lengths.is_empty() {
        return Err(Error::InvalidArgument("no test lengths given".into()));
    }
    let n = series.len();
    let mut rows = Vec::with_capacity(test_lengths.len());
    for &len in test_lengths {
        if len == 0 || 2 * len >= n {
            return Err(Error::InvalidArgument(format!(
                "test length {len} must be positive and below half the series length {n}"
            )));
        }
        let windows: Vec<usize> = (1..n / len).map(|k| k * len).collect();
        let scores: Vec<Option<f64>> = windows
            .par_iter()
            .map(|&w| score_fold(series, order, w, len))
            .collect();
        let done: Vec<f64> = scores.iter().flatten().copied().collect();
        if done.is_empty() {
            return Err(Error::InvalidArgument(format!(
                "every fold for test length {len} was skipped (windows shorter than {} or failed fits)",
                order.min_series_len()
            )));
        }
        let total_predictions = done.len() * len;
        rows.push(BacktestRow {
            test_length: len,
            mse: done.iter().sum::<f64>() / total_predictions as f64,
            n_windows: done.len(),
            skipped: windows.len() - done.len(),
            total_predictions,
        });
    }
    Ok(BacktestReport { order, rows })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::simulate::{simulate_arima, ArimaSpec};

    fn cell(p: usize, q: usize, bic: f64) -> GridCell {
        GridCell {
            p,
            q,
            aic: bic,
            bic,
            hqic: bic,
            converged: true,
            error: None,
        }
    }

    #[test]
    fn tie_break_prefers_parsimony() {
        let cells = [cell(2, 1, 10.0), cell(1, 2, 10.0 + 5e-10), cell(0, 3, 10.0), cell(3, 3, 12.0)];
        let refs: Vec<&GridCell> = cells.iter().collect();
        let i = argmin(&refs, Criterion::Bic).unwrap();
        assert_eq!((cells[i].p, cells[i].q), (0, 3));
        let cells = [cell(2, 1, 10.0), cell(1, 2, 10.0)];
        let refs: Vec<&GridCell> = cells.iter().collect();
        assert_eq!(cells[argmin(&refs, Criterion::Bic).unwrap()].p, 1);
    }

    #[test]
    fn strict_improvement_beats_parsimony() {
        let cells = [cell(0, 1, 10.0), cell(2, 2, 9.0)];
        let refs: Vec<&GridCell> = cells.iter().collect();
        assert_eq!(argmin(&refs, Criterion::Bic), Some(1));
    }

    #[test]
    fn mse_arithmetic() {
        assert_eq!(mse(&[1.0, 2.0], &[1.0, 4.0]).unwrap(), 2.0);
        assert_eq!(mse(&[3.0; 4], &[3.0; 4]).unwrap(), 0.0);
        assert!(mse(&[1.0], &[1.0, 2.0]).is_err());
        assert!(mse(&[], &[]).is_err());
    }

    #[test]
    fn criterion_parsing() {
        assert_eq!("BIC".parse::<Criterion>().unwrap(), Criterion::Bic);
        assert!("mdl".parse::<Criterion>().is_err());
    }

    #[test]
    fn ramp_backtest_closed_form() {
        let x: Vec<f64> = (0..400).map(|t| t as f64).collect();
        let order = ArimaOrder::new(0, 1, 0);
        let r = rolling_backtest(&x, order, &[25]).unwrap();
        let row = &r.rows[0];
        // flat forecast misses step h by exactly h
        let expect = (1..=25).map(|h| (h * h) as f64).sum::<f64>() / 25.0;
        assert!((row.mse - expect).abs() < 1e-9);
        assert_eq!(row.planned_folds(), 400 / 25 - 1);
        assert_eq!(row.skipped, 0);
        assert_eq!(row.total_predictions, row.n_windows * 25);
    }

    #[test]
    fn short_windows_are_skipped() {
        let x: Vec<f64> = (0..200).map(|t| (t as f64 * 0.7).sin() + t as f64).collect();
        let r = rolling_backtest(&x, ArimaOrder::new(0, 1, 0), &[10]).unwrap();
        let row = &r.rows[0];
        assert_eq!(row.skipped, 2);
        assert_eq!(row.planned_folds(), 19);
    }

    #[test]
    fn oversized_test_length_rejected() {
        let x: Vec<f64> = (0..100).map(|t| t as f64).collect();
        assert!(rolling_backtest(&x, ArimaOrder::new(0, 1, 0), &[50]).is_err());
    }

    #[test]
    fn grid_csv_and_selection_dominance() {
        let x = simulate_arima(&ArimaSpec::arma(&[0.6], &[]), 400, 12).unwrap();
        let g = grid_search(&x, 0, 1, 1).unwrap();
        assert_eq!(g.cells.len(), 4);
        let (bp, bq) = g.best_by_bic;
        let best = g.cell(bp, bq).unwrap().bic;
        for c in g.cells.iter().filter(|c| c.converged) {
            assert!(best <= c.bic);
        }
        let mut buf = Vec::new();
        g.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 5);
        assert!(text.starts_with("p,q,aic,bic,hqic,converged\n"));
        assert_eq!(g.ranked(Criterion::Bic)[0], g.best_by_bic);
    }

    #[test]
    fn pure_differencing_cell_skipped_without_constant() {
        let x = simulate_arima(&ArimaSpec::arma(&[0.6], &[]), 300, 13).unwrap();
        let opts = GridOptions {
            parallel: false,
            include_constant: Some(false),
        };
        let g = grid_search_with(&x, 0, 1, 1, &opts).unwrap();
        assert!(g.cell(0, 0).is_none());
        assert_eq!(g.cells.len(), 3);
    }
}
