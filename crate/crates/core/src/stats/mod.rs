//! Statistical building blocks: distribution tails, least squares,
//! correlograms and the Ljung-Box portmanteau test.

mod correlogram;
mod dist;
mod ljung_box;
mod ols;

pub use correlogram::{acf, durbin_levinson, pacf, Correlogram};
pub use dist::{chi2_sf, ln_gamma, normal_sf, regularized_gamma_q, two_sided_normal_p};
pub use ljung_box::{ljung_box, write_ljung_box_csv, LjungBoxRow};
pub use ols::{ols, OlsFit};

/// Arithmetic mean; `NaN` for an empty slice.
pub fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}
