//! Spline gap filling and ARIMA modelling for daily time series.
//!
//! The pipeline mirrors the usual Box-Jenkins workflow: grid the raw
//! observations on calendar days ([`series`]), fill gaps with a cubic spline
//! ([`spline`]), test for a unit root ([`unitroot`]), pick an order by
//! information criteria ([`evaluation`]), fit by conditional sum of squares
//! ([`arima`]), check residual whiteness ([`stats`]) and forecast.

pub mod arima;
pub mod error;
pub mod evaluation;
pub mod linalg;
pub mod series;
pub mod simulate;
pub mod spline;
pub mod stats;
pub mod unitroot;

pub use error::{Error, ErrorKind, Result};
