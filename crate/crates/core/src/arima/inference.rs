use serde::Serialize;

use super::css::{css_rss, profiled_loglik};
use super::FittedArima;
use crate::error::{Error, Result};
use crate::linalg::{spd_inverse, Matrix};
use crate::stats::two_sided_normal_p;

/// Normal quantile used for the 95% intervals.
const Z_95: f64 = 1.96;

/// AIC, BIC and HQIC of one fit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InformationCriteria {
    pub aic: f64,
    pub bic: f64,
    pub hqic: f64,
}

/// Information criteria for log-likelihood `loglik` with `k` parameters and `n` observations.
pub fn information_criteria(loglik: f64, k: usize, n: usize) -> Result<InformationCriteria> {
    if k == 0 || n <= k {
        return Err(Error::InvalidArgument(format!(
            "information criteria need 0 < k < n (k = {k}, n = {n})"
        )));
    }
    let (kf, nf) = (k as f64, n as f64);
    let base = -2.0 * loglik;
    Ok(InformationCriteria {
        aic: base + 2.0 * kf,
        bic: base + kf * nf.ln(),
        hqic: base + 2.0 * kf * nf.ln().ln(),
    })
}

/// One row of the coefficient table. Inference fields are `None` when the
/// Hessian at the optimum was not negative definite.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoefRow {
    pub name: String,
    pub coef: f64,
    pub std_err: Option<f64>,
    pub z: Option<f64>,
    pub p: Option<f64>,
    pub ci_low: Option<f64>,
    pub ci_high: Option<f64>,
}

impl CoefRow {
    pub fn new(name: impl Into<String>, coef: f64, std_err: Option<f64>) -> Self {
        let se = std_err.filter(|s| s.is_finite() && *s > 0.0);
        let z = se.map(|s| coef / s);
        Self {
            name: name.into(),
            coef,
            std_err: se,
            z,
            p: z.map(two_sided_normal_p),
            ci_low: se.map(|s| coef - Z_95 * s),
            ci_high: se.map(|s| coef + Z_95 * s),
        }
    }

    pub fn available(&self) -> bool {
        self.std_err.is_some()
    }
}

/// Row names in table order: `const`, `ar.L*`, `ma.L*`.
pub(crate) fn coefficient_names(p: usize, q: usize, constant: bool) -> Vec<String> {
    let mut names = Vec::with_capacity(p + q + 1);
    if constant {
        names.push("const".to_string());
    }
    names.extend((1..=p).map(|i| format!("ar.L{i}")));
    names.extend((1..=q).map(|j| format!("ma.L{j}")));
    names
}

/// Profiled CSS log-likelihood as a function of `[const?, φ.., θ..]`.
pub(crate) struct ProfileLoglik<'a> {
    pub diff: &'a [f64],
    pub p: usize,
    pub q: usize,
    pub constant: bool,
}

impl ProfileLoglik<'_> {
    pub fn eval(&self, beta: &[f64], scratch: &mut Vec<f64>) -> f64 {
        let off = usize::from(self.constant);
        let c = if self.constant { beta[0] } else { 0.0 };
        let phi = &beta[off..off + self.p];
        let theta = &beta[off + self.p..off + self.p + self.q];
        let rss = css_rss(phi, theta, c, self.diff, scratch);
        profiled_loglik(rss, self.diff.len() - self.p)
    }

    /// Central-difference Hessian with steps `1e-4 · max(1, |β_i|)`.
    pub fn hessian(&self, beta: &[f64]) -> Matrix {
        let k = beta.len();
        let mut scratch = Vec::new();
        let steps: Vec<f64> = beta.iter().map(|b| 1e-4 * b.abs().max(1.0)).collect();
        let f0 = self.eval(beta, &mut scratch);
        let mut h = Matrix::zeros(k, k);
        let mut x = beta.to_vec();
        for i in 0..k {
            x[i] = beta[i] + steps[i];
            let fp = self.eval(&x, &mut scratch);
            x[i] = beta[i] - steps[i];
            let fm = self.eval(&x, &mut scratch);
            x[i] = beta[i];
            h[(i, i)] = (fp - 2.0 * f0 + fm) / (steps[i] * steps[i]);
            for j in 0..i {
                let mut corner = |si: f64, sj: f64| {
                    x[i] = beta[i] + si * steps[i];
                    x[j] = beta[j] + sj * steps[j];
                    let v = self.eval(&x, &mut scratch);
                    x[i] = beta[i];
                    x[j] = beta[j];
                    v
                };
                let v = (corner(1.0, 1.0) - corner(1.0, -1.0) - corner(-1.0, 1.0) + corner(-1.0, -1.0))
                    / (4.0 * steps[i] * steps[j]);
                h[(i, j)] = v;
                h[(j, i)] = v;
            }
        }
        h
    }
}

/// Coefficient table for `fitted`: covariance from the inverse negative
/// Hessian of the profiled log-likelihood, plus an analytic `sigma2` row
/// (`se = σ² √(2 / n_effective)`).
///
/// Fails with [`Error::NotPositiveDefinite`] when the negative Hessian cannot
/// be inverted.
pub fn standard_errors(fitted: &FittedArima, diff_values: &[f64]) -> Result<Vec<CoefRow>> {
    let order = fitted.order;
    if diff_values.len() <= order.p + order.q {
        return Err(Error::TooShort {
            needed: order.p + order.q + 1,
            got: diff_values.len(),
        });
    }
    let params = &fitted.params;
    let mut beta = Vec::with_capacity(order.n_coefficients());
    if order.include_constant {
        beta.push(params.constant);
    }
    beta.extend(&params.phi);
    beta.extend(&params.theta);

    let mut rows = Vec::with_capacity(beta.len() + 1);
    if !beta.is_empty() {
        let profile = ProfileLoglik {
            diff: diff_values,
            p: order.p,
            q: order.q,
            constant: order.include_constant,
        };
        let mut neg = profile.hessian(&beta);
        for i in 0..beta.len() {
            for j in 0..beta.len() {
                neg[(i, j)] = -neg[(i, j)];
            }
        }
        let cov = spd_inverse(&neg)?;
        let names = coefficient_names(order.p, order.q, order.include_constant);
        for (i, (name, b)) in names.into_iter().zip(&beta).enumerate() {
            let var = cov[(i, i)];
            if !(var > 0.0) {
                return Err(Error::NotPositiveDefinite);
            }
            rows.push(CoefRow::new(name, *b, Some(var.sqrt())));
        }
    }
    let n_eff = (diff_values.len() - order.p) as f64;
    rows.push(CoefRow::new(
        "sigma2",
        params.sigma2,
        Some(params.sigma2 * (2.0 / n_eff).sqrt()),
    ));
    Ok(rows)
}

/// Same table with every inference field unavailable.
pub(crate) fn unavailable_rows(fitted: &FittedArima) -> Vec<CoefRow> {
    let order = fitted.order;
    let params = &fitted.params;
    let mut coefs = Vec::new();
    if order.include_constant {
        coefs.push(params.constant);
    }
    coefs.extend(&params.phi);
    coefs.extend(&params.theta);
    let mut rows: Vec<CoefRow> = coefficient_names(order.p, order.q, order.include_constant)
        .into_iter()
        .zip(coefs)
        .map(|(n, c)| CoefRow::new(n, c, None))
        .collect();
    rows.push(CoefRow::new("sigma2", params.sigma2, None));
    rows
}
