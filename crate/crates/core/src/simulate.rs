//! Seeded simulators for ARIMA processes and gapped daily fixtures.
//!
//! All generators use ChaCha8 so that a seed reproduces the same stream on
//! every platform and crate version.

use chrono::{Duration, NaiveDate};
use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};
use crate::series::RawSeries;

/// Draws discarded before the recorded ARMA path starts.
pub const BURN_IN: usize = 500;

/// `n` i.i.d. `N(0, sigma²)` draws.
pub fn gaussian_noise(n: usize, sigma: f64, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let normal = Normal::new(0.0, sigma).expect("finite sigma");
    (0..n).map(|_| normal.sample(&mut rng)).collect()
}

/// Parameters of a simulated ARIMA path.
#[derive(Debug, Clone, PartialEq)]
pub struct ArimaSpec {
    pub phi: Vec<f64>,
    pub theta: Vec<f64>,
    pub constant: f64,
    pub sigma: f64,
    pub d: usize,
    /// Starting level of every integration step.
    pub start_level: f64,
}

impl ArimaSpec {
    pub fn arma(phi: &[f64], theta: &[f64]) -> Self {
        Self {
            phi: phi.to_vec(),
            theta: theta.to_vec(),
            constant: 0.0,
            sigma: 1.0,
            d: 0,
            start_level: 0.0,
        }
    }
}

/// Runs `x_t = c + Σ φ_i x_{t-i} + e_t + Σ θ_j e_{t-j}` over the given innovations,
/// starting from zero history.
pub fn arma_filter(phi: &[f64], theta: &[f64], constant: f64, innovations: &[f64]) -> Vec<f64> {
    let mut x = Vec::with_capacity(innovations.len());
    for t in 0..innovations.len() {
        let mut v = constant + innovations[t];
        for (i, p) in phi.iter().enumerate() {
            if t > i {
                v += p * x[t - 1 - i];
            }
        }
        for (j, q) in theta.iter().enumerate() {
            if t > j {
                v += q * innovations[t - 1 - j];
            }
        }
        x.push(v);
    }
    x
}

/// Simulates `n` observations of the ARIMA process described by `spec`.
pub fn simulate_arima(spec: &ArimaSpec, n: usize, seed: u64) -> Result<Vec<f64>> {
    if !(spec.sigma > 0.0) {
        return Err(Error::InvalidArgument("sigma must be positive".into()));
    }
    let e = gaussian_noise(n + BURN_IN, spec.sigma, seed);
    let mut path = arma_filter(&spec.phi, &spec.theta, spec.constant, &e).split_off(BURN_IN);
    for _ in 0..spec.d {
        let mut level = spec.start_level;
        path = path
            .iter()
            .map(|w| {
                level += w;
                level
            })
            .collect();
    }
    if spec.d == 0 {
        for v in &mut path {
            *v += spec.start_level;
        }
    }
    Ok(path)
}

/// Keep-mask over `n` slots with exactly `gaps` interior slots removed.
/// The first and last slots are always kept.
pub fn gap_mask(n: usize, gaps: usize, seed: u64) -> Result<Vec<bool>> {
    if n < 2 || gaps > n - 2 {
        return Err(Error::InvalidArgument(format!(
            "cannot remove {gaps} interior slots from {n}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut keep = vec![true; n];
    for i in index::sample(&mut rng, n - 2, gaps) {
        keep[i + 1] = false;
    }
    Ok(keep)
}

/// Lays `values` on consecutive days from `start`, dropping slots where `keep` is false.
pub fn to_raw_series(start: NaiveDate, values: &[f64], keep: &[bool], column: &str) -> Result<RawSeries> {
    let obs = values
        .iter()
        .zip(keep)
        .enumerate()
        .filter(|(_, (_, k))| **k)
        .map(|(i, (v, _))| (start + Duration::days(i as i64), *v))
        .collect();
    RawSeries::new(obs, column)
}
