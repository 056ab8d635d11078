//! Augmented Dickey-Fuller test (constant, no trend).
//!
//! Regression: `Δx_t = α + γ x_{t-1} + Σ_{i=1..k} β_i Δx_{t-i} + e_t`; the
//! statistic is the t-ratio of `γ`. Critical values come from a bundled
//! finite-sample table interpolated linearly in `1/n`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{from_rows, Matrix};
use crate::stats::ols;

/// Sample sizes of the bundled table; the last row is the asymptotic one.
const TABLE_SIZES: [f64; 5] = [25.0, 50.0, 100.0, 250.0, 500.0];

/// Critical values `[1%, 5%, 10%]` for the constant-only regression at
/// [`TABLE_SIZES`], then at `n = ∞`. Evaluated from MacKinnon's (2010)
/// response surfaces.
const TABLE: [[f64; 3]; 6] = [
    [-3.7239, -2.9865, -2.6328],
    [-3.5685, -2.9214, -2.5987],
    [-3.4975, -2.8909, -2.5824],
    [-3.4568, -2.8732, -2.5730],
    [-3.4435, -2.8673, -2.5699],
    [-3.4304, -2.8615, -2.5668],
];

/// Smallest effective sample the table covers.
pub const MIN_EFFECTIVE_SAMPLE: usize = 20;

/// ADF critical values at the three conventional levels.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CriticalValues {
    #[serde(rename = "1%")]
    pub one_pct: f64,
    #[serde(rename = "5%")]
    pub five_pct: f64,
    #[serde(rename = "10%")]
    pub ten_pct: f64,
}

impl CriticalValues {
    /// Critical value at `alpha` ∈ {0.01, 0.05, 0.10}.
    pub fn at(&self, alpha: f64) -> Result<f64> {
        match alpha {
            a if (a - 0.01).abs() < 1e-12 => Ok(self.one_pct),
            a if (a - 0.05).abs() < 1e-12 => Ok(self.five_pct),
            a if (a - 0.10).abs() < 1e-12 => Ok(self.ten_pct),
            other => Err(Error::InvalidArgument(format!(
                "ADF level {other} not tabulated (use 0.01, 0.05 or 0.10)"
            ))),
        }
    }
}

/// Critical values for a regression with `n_effective` observations.
///
/// Sizes between 20 and 25 use the n = 25 row.
pub fn adf_critical_values(n_effective: usize) -> Result<CriticalValues> {
    if n_effective < MIN_EFFECTIVE_SAMPLE {
        return Err(Error::TooShort {
            needed: MIN_EFFECTIVE_SAMPLE,
            got: n_effective,
        });
    }
    let inv = 1.0 / (n_effective as f64).max(TABLE_SIZES[0]);
    // table abscissae in 1/n, descending: 1/25, 1/50, ..., 1/500, 0
    let abscissa = |i: usize| if i < TABLE_SIZES.len() { 1.0 / TABLE_SIZES[i] } else { 0.0 };
    let i = (0..TABLE.len() - 1)
        .find(|&i| inv <= abscissa(i) && inv >= abscissa(i + 1))
        .unwrap_or(TABLE.len() - 2);
    let (u0, u1) = (abscissa(i), abscissa(i + 1));
    let w = (u0 - inv) / (u0 - u1);
    let lerp = |k: usize| TABLE[i][k] + w * (TABLE[i + 1][k] - TABLE[i][k]);
    Ok(CriticalValues {
        one_pct: lerp(0),
        five_pct: lerp(1),
        ten_pct: lerp(2),
    })
}

/// How the number of augmentation lags is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LagSelection {
    /// Use exactly the maximum lag.
    Fixed,
    /// Minimise the regression AIC over `0..=max_lag` on a common sample.
    #[default]
    Aic,
}

/// Outcome of one ADF test.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AdfResult {
    #[serde(rename = "adf_statistic")]
    pub statistic: f64,
    pub p_value: String,
    pub lags_used: usize,
    pub n_effective: usize,
    pub critical_values: CriticalValues,
    pub reject_unit_root_at_5pct: bool,
}

/// `⌊12 (n / 100)^{1/4}⌋`.
pub fn schwert_max_lag(n: usize) -> usize {
    (12.0 * (n as f64 / 100.0).powf(0.25)).floor() as usize
}

/// Bracketed p-value from the critical values.
fn p_bracket(stat: f64, cv: &CriticalValues) -> String {
    if stat < cv.one_pct {
        "p < 0.01"
    } else if stat < cv.five_pct {
        "0.01 < p < 0.05"
    } else if stat < cv.ten_pct {
        "0.05 < p < 0.10"
    } else {
        "p > 0.10"
    }
    .to_string()
}

/// Design and response of the ADF regression with `k` lags, using
/// observations `t` from `start` on (`start ≥ k + 1`).
fn regression(x: &[f64], dx: &[f64], k: usize, start: usize) -> (Matrix, Vec<f64>) {
    // dx[t - 1] = x[t] - x[t - 1]
    let rows: Vec<Vec<f64>> = (start..x.len())
        .map(|t| {
            let mut row = Vec::with_capacity(k + 2);
            row.push(1.0);
            row.push(x[t - 1]);
            row.extend((1..=k).map(|i| dx[t - 1 - i]));
            row
        })
        .collect();
    let y = (start..x.len()).map(|t| dx[t - 1]).collect();
    (from_rows(&rows).expect("rows have equal length"), y)
}

/// Runs the ADF test. `max_lag = None` uses the Schwert bound.
pub fn adf_test(values: &[f64], max_lag: Option<usize>, selection: LagSelection) -> Result<AdfResult> {
    let n = values.len();
    let max_lag = max_lag.unwrap_or_else(|| schwert_max_lag(n));
    if n < max_lag + 10 {
        return Err(Error::TooShort {
            needed: max_lag + 10,
            got: n,
        });
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidArgument("non-finite value in ADF input".into()));
    }
    let first = values[0];
    if values.iter().all(|v| *v == first) {
        return Err(Error::ConstantSeries);
    }
    let dx: Vec<f64> = values.windows(2).map(|w| w[1] - w[0]).collect();

    let lags = match selection {
        LagSelection::Fixed => max_lag,
        LagSelection::Aic => {
            let start = max_lag + 1;
            let mut best = (f64::INFINITY, 0);
            for k in 0..=max_lag {
                let (design, y) = regression(values, &dx, k, start);
                let fit = ols(&design, &y)?;
                let m = y.len() as f64;
                let loglik = -0.5 * m * ((2.0 * std::f64::consts::PI * fit.rss / m).ln() + 1.0);
                let aic = -2.0 * loglik + 2.0 * (k + 2) as f64;
                if aic < best.0 {
                    best = (aic, k);
                }
            }
            best.1
        }
    };

    let (design, y) = regression(values, &dx, lags, lags + 1);
    let n_effective = y.len();
    let fit = ols(&design, &y)?;
    let statistic = fit.t_ratio(1);
    if !statistic.is_finite() {
        return Err(Error::ConstantSeries);
    }
    let critical_values = adf_critical_values(n_effective)?;
    Ok(AdfResult {
        statistic,
        p_value: p_bracket(statistic, &critical_values),
        lags_used: lags,
        n_effective,
        critical_values,
        reject_unit_root_at_5pct: statistic < critical_values.five_pct,
    })
}
