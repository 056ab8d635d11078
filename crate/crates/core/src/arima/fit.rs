use serde::Serialize;

use super::css::{css_residuals, css_rss, profiled_loglik};
use super::inference::{information_criteria, standard_errors, unavailable_rows, CoefRow};
use super::optimizer::{nelder_mead, NelderMeadOptions};
use super::roots::min_root_modulus;
use super::{ArimaOrder, ArimaParams};
use crate::error::{Error, Result};
use crate::linalg::from_rows;
use crate::series::difference;
use crate::stats::{acf, durbin_levinson, mean, ols};

/// Roots closer to the unit circle than this are penalised during the search.
const ROOT_MARGIN: f64 = 1.001;
const PENALTY_SCALE: f64 = 1e6;
/// A returned model must keep every root modulus above `1 + ROOT_GATE`.
const ROOT_GATE: f64 = 1e-8;

/// Optimizer settings for [`fit`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitOptions {
    /// Additional simplex runs from jittered starts after the first one.
    pub restarts: usize,
    /// Evaluation budget per run is `evals_per_param · (p + q + 1)`.
    pub evals_per_param: usize,
    pub rel_tol: f64,
}

impl Default for FitOptions {
    fn default() -> Self {
        Self {
            restarts: 3,
            evals_per_param: 2000,
            rel_tol: 1e-10,
        }
    }
}

/// An estimated model together with its diagnostics.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FittedArima {
    pub order: ArimaOrder,
    pub params: ArimaParams,
    pub loglik: f64,
    pub aic: f64,
    pub bic: f64,
    pub hqic: f64,
    pub coef_table: Vec<CoefRow>,
    /// One residual per differenced observation; the first `p` are zero.
    pub residuals: Vec<f64>,
    /// Length of the differenced series.
    pub n_obs: usize,
    /// Observations entering the likelihood, `n_obs - p`.
    pub n_effective: usize,
    /// Leading residuals conditioned on the zero presample, `max(p, q)`.
    pub presample: usize,
    pub converged: bool,
}

impl FittedArima {
    /// Builds the report for given coefficients on `series` (levels);
    /// `σ²` is profiled from the data.
    pub fn from_params(series: &[f64], order: ArimaOrder, phi: &[f64], theta: &[f64], constant: f64) -> Result<Self> {
        order.validate()?;
        check_finite(series)?;
        let diff = difference(series, order.d)?.values;
        let constant = if order.include_constant { constant } else { 0.0 };
        build(order, phi.to_vec(), theta.to_vec(), constant, &diff, true)
    }

    /// `model` string of the fit report, e.g. `ARIMA(2,1,2)`.
    pub fn model_name(&self) -> String {
        self.order.to_string()
    }

    /// Residuals excluding the first `p` (which have no complete AR history).
    pub fn diagnostic_residuals(&self) -> &[f64] {
        &self.residuals[self.order.p..]
    }
}

fn check_finite(series: &[f64]) -> Result<()> {
    if series.iter().any(|v| !v.is_finite()) {
        return Err(Error::MissingValues);
    }
    Ok(())
}

fn build(order: ArimaOrder, phi: Vec<f64>, theta: Vec<f64>, constant: f64, diff: &[f64], converged: bool) -> Result<FittedArima> {
    if phi.len() != order.p || theta.len() != order.q {
        return Err(Error::Dimension(format!(
            "{order} given {} AR and {} MA coefficients",
            phi.len(),
            theta.len()
        )));
    }
    let residuals = css_residuals(&phi, &theta, constant, diff);
    let n_effective = diff.len() - order.p;
    let rss: f64 = residuals[order.p..].iter().map(|e| e * e).sum();
    if !(rss > 0.0) || !rss.is_finite() {
        return Err(Error::ConstantSeries);
    }
    let sigma2 = rss / n_effective as f64;
    let loglik = profiled_loglik(rss, n_effective);
    let ic = information_criteria(loglik, order.n_params(), n_effective)?;
    let mut fitted = FittedArima {
        order,
        params: ArimaParams {
            phi,
            theta,
            constant,
            sigma2,
        },
        loglik,
        aic: ic.aic,
        bic: ic.bic,
        hqic: ic.hqic,
        coef_table: Vec::new(),
        residuals,
        n_obs: diff.len(),
        n_effective,
        presample: order.p.max(order.q),
        converged,
    };
    fitted.coef_table = match standard_errors(&fitted, diff) {
        Ok(rows) => rows,
        Err(Error::NotPositiveDefinite) => unavailable_rows(&fitted),
        Err(e) => return Err(e),
    };
    Ok(fitted)
}

/// Yule-Walker AR(p) coefficients, or `None` when unusable.
fn yule_walker(x: &[f64], p: usize) -> Option<Vec<f64>> {
    let rho = acf(x, p).ok()?;
    let (phi, _) = durbin_levinson(&rho.coefficients, p).ok()?;
    phi.iter().all(|v| v.is_finite()).then_some(phi)
}

/// Hannan-Rissanen MA start: long-AR residuals as proxy innovations, then a
/// regression of `x_t` on its own lags and the lagged proxies.
fn hannan_rissanen(x: &[f64], p: usize, q: usize) -> Option<Vec<f64>> {
    let n = x.len();
    let m = ((n / 10).min(20)).max(p + q).max(1);
    let mu = mean(x);
    let y: Vec<f64> = x.iter().map(|v| v - mu).collect();
    let a = yule_walker(&y, m)?;
    let mut e = vec![0.0; n];
    for t in m..n {
        e[t] = y[t] - a.iter().enumerate().map(|(i, ai)| ai * y[t - 1 - i]).sum::<f64>();
    }
    let start = m + q.max(p);
    if n <= start + p + q + 1 {
        return None;
    }
    let rows: Vec<Vec<f64>> = (start..n)
        .map(|t| {
            (1..=p)
                .map(|i| y[t - i])
                .chain((1..=q).map(|j| e[t - j]))
                .collect()
        })
        .collect();
    let design = from_rows(&rows).ok()?;
    let fit = ols(&design, &y[start..]).ok()?;
    Some(fit.coefficients[p..].to_vec())
}

fn admissible_start(coeffs: Option<Vec<f64>>, len: usize, negate: bool) -> Vec<f64> {
    match coeffs {
        Some(c) => {
            let poly: Vec<f64> = if negate { c.iter().map(|v| -v).collect() } else { c.clone() };
            if min_root_modulus(&poly) > ROOT_MARGIN {
                c
            } else {
                vec![0.0; len]
            }
        }
        None => vec![0.0; len],
    }
}

fn root_margin(phi: &[f64], theta: &[f64]) -> f64 {
    let neg: Vec<f64> = theta.iter().map(|t| -t).collect();
    min_root_modulus(phi).min(min_root_modulus(&neg))
}

/// Deterministic ±1 pattern for restart `r`.
fn jitter(r: usize, i: usize) -> f64 {
    let sign = match r % 3 {
        1 => 1.0,
        2 if i.is_multiple_of(2) => 1.0,
        _ => -1.0,
    };
    0.05 * sign
}

/// Fits `order` to the level series by conditional sum of squares with
/// default optimizer settings.
pub fn fit(series: &[f64], order: ArimaOrder) -> Result<FittedArima> {
    fit_with(series, order, &FitOptions::default())
}

/// [`fit`] with explicit optimizer settings.
///
/// A search that exhausts its budget, or ends within the penalised margin
/// around the unit circle, is returned with `converged = false`. An optimum
/// with a root on or inside the unit circle is an error.
pub fn fit_with(series: &[f64], order: ArimaOrder, opts: &FitOptions) -> Result<FittedArima> {
    order.validate()?;
    check_finite(series)?;
    let needed = order.min_series_len();
    if series.len() < needed {
        return Err(Error::TooShort {
            needed,
            got: series.len(),
        });
    }
    let diff = difference(series, order.d)?.values;
    let (p, q) = (order.p, order.q);
    let mu0 = mean(&diff);
    let var = diff.iter().map(|v| (v - mu0).powi(2)).sum::<f64>() / diff.len() as f64;
    if var == 0.0 && (p + q > 0 || order.include_constant) {
        return Err(Error::ConstantSeries);
    }

    if p + q == 0 {
        let c = if order.include_constant { mu0 } else { 0.0 };
        return build(order, Vec::new(), Vec::new(), c, &diff, true);
    }

    // search space: [φ.., θ.., u] with intercept mean μ = mu0 + scale · u
    let scale = var.sqrt();
    let n_eff = diff.len() - p;
    let dim = p + q + usize::from(order.include_constant);
    let unpack = |v: &[f64]| -> (Vec<f64>, Vec<f64>, f64) {
        let phi = v[..p].to_vec();
        let theta = v[p..p + q].to_vec();
        let c = if order.include_constant {
            (mu0 + scale * v[p + q]) * (1.0 - phi.iter().sum::<f64>())
        } else {
            0.0
        };
        (phi, theta, c)
    };
    let mut scratch = Vec::new();
    let mut objective = |v: &[f64]| -> f64 {
        let (phi, theta, c) = unpack(v);
        let rss = css_rss(&phi, &theta, c, &diff, &mut scratch);
        let nll = -profiled_loglik(rss, n_eff);
        if !nll.is_finite() {
            return f64::INFINITY;
        }
        let margin = root_margin(&phi, &theta);
        if margin.is_nan() {
            return f64::INFINITY;
        }
        if margin < ROOT_MARGIN {
            nll + PENALTY_SCALE * (ROOT_MARGIN - margin).powi(2)
        } else {
            nll
        }
    };

    let mut x0 = admissible_start(if p > 0 { yule_walker(&diff, p) } else { Some(Vec::new()) }, p, false);
    x0.extend(admissible_start(if q > 0 { hannan_rissanen(&diff, p, q) } else { Some(Vec::new()) }, q, true));
    if order.include_constant {
        x0.push(0.0);
    }
    debug_assert_eq!(x0.len(), dim);

    let nm = NelderMeadOptions {
        rel_tol: opts.rel_tol,
        max_evals: opts.evals_per_param * (p + q + 1),
        initial_step: 0.1,
    };
    let mut runs = vec![nelder_mead(&mut objective, &x0, &nm)];
    for r in 1..=opts.restarts {
        let best = runs
            .iter()
            .min_by(|a, b| a.value.total_cmp(&b.value))
            .expect("at least one run");
        let start: Vec<f64> = best.x.iter().enumerate().map(|(i, v)| v + jitter(r, i)).collect();
        runs.push(nelder_mead(&mut objective, &start, &nm));
    }
    let best = runs
        .iter()
        .min_by(|a, b| a.value.total_cmp(&b.value))
        .expect("at least one run");
    let tol = opts.rel_tol * best.value.abs().max(1.0);
    let met_tolerance = runs.iter().any(|r| r.converged && r.value <= best.value + tol);

    let (phi, theta, c) = unpack(&best.x);
    let margin = root_margin(&phi, &theta);
    if !(margin > 1.0 + ROOT_GATE) {
        return Err(Error::Inadmissible(format!(
            "{order}: optimum has a characteristic root of modulus {margin:.6} (not outside the unit circle)"
        )));
    }
    build(order, phi, theta, c, &diff, met_tolerance && margin >= ROOT_MARGIN)
}
