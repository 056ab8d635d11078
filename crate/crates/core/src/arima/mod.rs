//! ARIMA(p, d, q) models estimated by conditional sum of squares.
//!
//! The model for the `d`-times differenced series `w_t` is
//!
//! ```text
//! w_t = c + φ_1 w_{t-1} + … + φ_p w_{t-p} + ε_t + θ_1 ε_{t-1} + … + θ_q ε_{t-q}
//! ```
//!
//! MA terms enter with a plus sign, so the MA characteristic polynomial is
//! `1 + θ_1 z + … + θ_q z^q`. Software that writes the MA side with minus
//! signs reports `-θ`.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};

mod css;
mod fit;
mod forecast;
mod inference;
mod optimizer;
mod roots;

pub use css::{css_objective, css_residuals, CssValue};
pub use fit::{fit, fit_with, FitOptions, FittedArima};
pub use forecast::{forecast, ForecastResult, MAX_HORIZON};
pub use inference::{information_criteria, standard_errors, CoefRow, InformationCriteria};
pub use optimizer::{nelder_mead, NelderMeadOptions, NelderMeadResult};
pub use roots::{characteristic_roots, min_root_modulus, RootSet};

/// Largest p, d or q accepted.
pub const MAX_ORDER: usize = 10;

/// Model order plus whether an intercept is estimated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct ArimaOrder {
    pub p: usize,
    pub d: usize,
    pub q: usize,
    pub include_constant: bool,
}

impl ArimaOrder {
    /// Order with the default intercept rule: estimated only when `d = 0`.
    pub fn new(p: usize, d: usize, q: usize) -> Self {
        Self {
            p,
            d,
            q,
            include_constant: d == 0,
        }
    }

    pub fn with_constant(mut self, include_constant: bool) -> Self {
        self.include_constant = include_constant;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.p > MAX_ORDER || self.d > MAX_ORDER || self.q > MAX_ORDER {
            return Err(Error::InvalidArgument(format!(
                "{self}: p, d and q must each be at most {MAX_ORDER}"
            )));
        }
        Ok(())
    }

    /// Number of estimated mean-equation parameters (AR + MA + intercept).
    pub fn n_coefficients(&self) -> usize {
        self.p + self.q + usize::from(self.include_constant)
    }

    /// Parameters counted by the information criteria (coefficients + variance).
    pub fn n_params(&self) -> usize {
        self.n_coefficients() + 1
    }

    /// Shortest series `fit` accepts.
    pub fn min_series_len(&self) -> usize {
        20 + self.p + self.d + self.q
    }
}

impl fmt::Display for ArimaOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ARIMA({},{},{})", self.p, self.d, self.q)
    }
}

impl FromStr for ArimaOrder {
    type Err = Error;

    /// Parses `p,d,q`.
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(',').map(str::trim).collect();
        let parse = |v: &str| {
            v.parse::<usize>()
                .map_err(|_| Error::InvalidArgument(format!("bad order `{s}` (expected p,d,q)")))
        };
        match parts.as_slice() {
            [p, d, q] => {
                let order = ArimaOrder::new(parse(p)?, parse(d)?, parse(q)?);
                order.validate()?;
                Ok(order)
            }
            _ => Err(Error::InvalidArgument(format!("bad order `{s}` (expected p,d,q)"))),
        }
    }
}

/// Coefficients of a fitted or hypothesised model.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ArimaParams {
    pub phi: Vec<f64>,
    pub theta: Vec<f64>,
    /// Intercept `c` of the differenced-series equation; zero without a constant.
    pub constant: f64,
    pub sigma2: f64,
}

impl ArimaParams {
    /// Smallest modulus among the AR roots of `1 - Σ φ_i z^i`.
    pub fn ar_min_modulus(&self) -> f64 {
        min_root_modulus(&self.phi)
    }

    /// Smallest modulus among the MA roots of `1 + Σ θ_j z^j`.
    pub fn ma_min_modulus(&self) -> f64 {
        let neg: Vec<f64> = self.theta.iter().map(|t| -t).collect();
        min_root_modulus(&neg)
    }

    /// Process mean `c / (1 - Σ φ_i)` of the differenced series.
    pub fn mean(&self) -> f64 {
        self.constant / (1.0 - self.phi.iter().sum::<f64>())
    }
}
