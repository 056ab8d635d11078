use super::{ArimaOrder, ArimaParams};
use crate::error::{Error, Result};

/// Residual sum of squares and profiled log-likelihood of a CSS evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CssValue {
    pub rss: f64,
    pub loglik: f64,
    /// Number of innovations entering the likelihood, `n - p`.
    pub n_effective: usize,
}

/// Innovations of the ARMA recursion with zero presample innovations.
///
/// The first `p` entries (no complete AR history) are returned as zero.
pub fn css_residuals(phi: &[f64], theta: &[f64], constant: f64, x: &[f64]) -> Vec<f64> {
    let (p, q) = (phi.len(), theta.len());
    let n = x.len();
    // eps[t + q] holds ε_t; the q leading slots are the zero presample.
    let mut eps = vec![0.0; n + q];
    for t in p..n {
        let mut e = x[t] - constant;
        for (i, ph) in phi.iter().enumerate() {
            e -= ph * x[t - 1 - i];
        }
        for (j, th) in theta.iter().enumerate() {
            e -= th * eps[t + q - 1 - j];
        }
        eps[t + q] = e;
    }
    eps.split_off(q)
}

/// RSS-only variant of [`css_residuals`], used inside the optimizer.
pub(crate) fn css_rss(phi: &[f64], theta: &[f64], constant: f64, x: &[f64], scratch: &mut Vec<f64>) -> f64 {
    let (p, q) = (phi.len(), theta.len());
    let n = x.len();
    scratch.clear();
    scratch.resize(n + q, 0.0);
    let mut rss = 0.0;
    for t in p..n {
        let mut e = x[t] - constant;
        for (i, ph) in phi.iter().enumerate() {
            e -= ph * x[t - 1 - i];
        }
        for (j, th) in theta.iter().enumerate() {
            e -= th * scratch[t + q - 1 - j];
        }
        scratch[t + q] = e;
        rss += e * e;
    }
    rss
}

/// Gaussian log-likelihood with `σ² = RSS / n_effective` profiled out.
pub(crate) fn profiled_loglik(rss: f64, n_effective: usize) -> f64 {
    let m = n_effective as f64;
    -0.5 * m * ((2.0 * std::f64::consts::PI * rss / m).ln() + 1.0)
}

/// Conditional sum of squares and log-likelihood of `params` on the
/// differenced series `diff_values`.
pub fn css_objective(params: &ArimaParams, diff_values: &[f64], order: &ArimaOrder) -> Result<CssValue> {
    if params.phi.len() != order.p || params.theta.len() != order.q {
        return Err(Error::Dimension(format!(
            "{order} given {} AR and {} MA coefficients",
            params.phi.len(),
            params.theta.len()
        )));
    }
    let needed = order.p + order.q + 1;
    if diff_values.len() < needed {
        return Err(Error::TooShort {
            needed,
            got: diff_values.len(),
        });
    }
    let constant = if order.include_constant { params.constant } else { 0.0 };
    let resid = css_residuals(&params.phi, &params.theta, constant, diff_values);
    let rss: f64 = resid[order.p..].iter().map(|e| e * e).sum();
    let n_effective = diff_values.len() - order.p;
    Ok(CssValue {
        rss,
        loglik: profiled_loglik(rss, n_effective),
        n_effective,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::simulate::{arma_filter, gaussian_noise};

    fn params(phi: &[f64], theta: &[f64], constant: f64) -> ArimaParams {
        ArimaParams {
            phi: phi.to_vec(),
            theta: theta.to_vec(),
            constant,
            sigma2: 1.0,
        }
    }

    #[test]
    fn white_noise_order() {
        let x = [0.5, -1.0, 2.0, 0.25, -0.75];
        let order = ArimaOrder::new(0, 0, 0).with_constant(false);
        let v = css_objective(&params(&[], &[], 0.0), &x, &order).unwrap();
        let m2: f64 = x.iter().map(|v| v * v).sum::<f64>() / 5.0;
        let iid: f64 = x
            .iter()
            .map(|v| -0.5 * (2.0 * std::f64::consts::PI * m2).ln() - v * v / (2.0 * m2))
            .sum();
        assert!((v.loglik - iid).abs() < 1e-12);
        assert_eq!(css_residuals(&[], &[], 0.0, &x), x.to_vec());
    }

    #[test]
    fn ar1_inversion_recovers_innovations() {
        let e = gaussian_noise(200, 1.0, 21);
        let x = arma_filter(&[0.6], &[], 0.0, &e);
        let resid = css_residuals(&[0.6], &[], 0.0, &x);
        assert_eq!(resid[0], 0.0);
        for t in 1..200 {
            assert!((resid[t] - e[t]).abs() < 1e-10);
        }
    }

    #[test]
    fn arma11_hand_unrolled() {
        let x = [0.3, -0.1, 0.8, 1.2, -0.4, 0.0, 0.9, -1.1, 0.5, 0.2];
        let (phi, theta, c) = (0.4, -0.3, 0.1);
        // ε_0 = 0 (presample), then ε_t = x_t - c - φ x_{t-1} - θ ε_{t-1}
        let mut e_prev = 0.0;
        let mut rss = 0.0;
        for t in 1..10 {
            let e = x[t] - c - phi * x[t - 1] - theta * e_prev;
            rss += e * e;
            e_prev = e;
        }
        let order = ArimaOrder::new(1, 0, 1);
        let v = css_objective(&params(&[phi], &[theta], c), &x, &order).unwrap();
        assert!((v.rss - rss).abs() < 1e-12);
        assert_eq!(v.n_effective, 9);
        let mut scratch = Vec::new();
        assert!((css_rss(&[phi], &[theta], c, &x, &mut scratch) - rss).abs() < 1e-12);
    }

    #[test]
    fn short_series_rejected() {
        let order = ArimaOrder::new(2, 0, 2);
        assert!(css_objective(&params(&[0.1, 0.1], &[0.1, 0.1], 0.0), &[1.0; 4], &order).is_err());
    }
}
