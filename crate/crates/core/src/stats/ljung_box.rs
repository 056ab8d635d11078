use std::io::Write;

use super::correlogram::acf;
use super::dist::chi2_sf;
use crate::error::Result;

/// One line of a Ljung-Box table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LjungBoxRow {
    pub lag: usize,
    pub q_stat: f64,
    pub df: usize,
    pub p_value: f64,
}

/// Ljung-Box statistics `Q(h) = n (n + 2) Σ_{k≤h} ρ̂_k² / (n - k)` for `h = 1..=max_lag`.
///
/// Degrees of freedom are `h` unless `df_adjust` is set, in which case they
/// are `max(h - fitted_params, 1)`.
pub fn ljung_box(residuals: &[f64], max_lag: usize, fitted_params: usize, df_adjust: bool) -> Result<Vec<LjungBoxRow>> {
    let rho = acf(residuals, max_lag)?;
    let n = residuals.len() as f64;
    let mut acc = 0.0;
    rho.coefficients
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let lag = i + 1;
            acc += r * r / (n - lag as f64);
            let q_stat = n * (n + 2.0) * acc;
            let df = if df_adjust {
                lag.saturating_sub(fitted_params).max(1)
            } else {
                lag
            };
            Ok(LjungBoxRow {
                lag,
                q_stat,
                df,
                p_value: chi2_sf(q_stat, df)?,
            })
        })
        .collect()
}

/// Writes `lag,q_stat,df,p_value`.
pub fn write_ljung_box_csv<W: Write>(rows: &[LjungBoxRow], mut out: W) -> std::io::Result<()> {
    writeln!(out, "lag,q_stat,df,p_value")?;
    for r in rows {
        writeln!(out, "{},{},{},{}", r.lag, r.q_stat, r.df, r.p_value)?;
    }
    Ok(())
}
