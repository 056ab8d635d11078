use std::io::Write;

use crate::error::{Error, Result};

/// Sample autocorrelations (or partial autocorrelations) for lags `1..=max_lag`.
#[derive(Debug, Clone, PartialEq)]
pub struct Correlogram {
    /// `coefficients[k - 1]` is the value at lag `k`.
    pub coefficients: Vec<f64>,
    pub n: usize,
    /// Half-width of the white-noise band, `1.96 / sqrt(n)`.
    pub band: f64,
}

impl Correlogram {
    fn new(coefficients: Vec<f64>, n: usize) -> Self {
        Self {
            coefficients,
            n,
            band: 1.96 / (n as f64).sqrt(),
        }
    }

    pub fn at_lag(&self, lag: usize) -> f64 {
        if lag == 0 {
            1.0
        } else {
            self.coefficients[lag - 1]
        }
    }

    pub fn max_lag(&self) -> usize {
        self.coefficients.len()
    }

    /// Writes `lag,coefficient,band`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "lag,coefficient,band")?;
        for (k, c) in self.coefficients.iter().enumerate() {
            writeln!(out, "{},{},{}", k + 1, c, self.band)?;
        }
        Ok(())
    }
}

fn check(values: &[f64], max_lag: usize) -> Result<()> {
    if max_lag == 0 {
        return Err(Error::InvalidArgument("max_lag must be positive".into()));
    }
    if values.len() <= max_lag {
        return Err(Error::TooShort {
            needed: max_lag + 1,
            got: values.len(),
        });
    }
    Ok(())
}

/// Autocovariances `c_0..=c_max_lag` with divisor `n`.
fn autocovariances(values: &[f64], max_lag: usize) -> Vec<f64> {
    let n = values.len();
    let mean = values.iter().sum::<f64>() / n as f64;
    let centred: Vec<f64> = values.iter().map(|v| v - mean).collect();
    (0..=max_lag)
        .map(|k| centred[..n - k].iter().zip(&centred[k..]).map(|(a, b)| a * b).sum::<f64>() / n as f64)
        .collect()
}

/// Sample ACF: `ρ_k = Σ (x_t - x̄)(x_{t+k} - x̄) / Σ (x_t - x̄)²`.
pub fn acf(values: &[f64], max_lag: usize) -> Result<Correlogram> {
    check(values, max_lag)?;
    let cov = autocovariances(values, max_lag);
    if !(cov[0] > 0.0) {
        return Err(Error::ConstantSeries);
    }
    let coefficients = cov[1..].iter().map(|c| c / cov[0]).collect();
    Ok(Correlogram::new(coefficients, values.len()))
}

/// Durbin-Levinson recursion on autocorrelations `rho[0..order]` (lags `1..=order`).
///
/// Returns the AR(`order`) Yule-Walker coefficients and the partial
/// autocorrelations `φ_11 .. φ_{order,order}`.
pub fn durbin_levinson(rho: &[f64], order: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    if rho.len() < order {
        return Err(Error::Dimension(format!(
            "{} autocorrelations for order {order}",
            rho.len()
        )));
    }
    let mut phi: Vec<f64> = Vec::with_capacity(order);
    let mut partial = Vec::with_capacity(order);
    let mut v = 1.0;
    for k in 0..order {
        let num = rho[k] - phi.iter().enumerate().map(|(j, p)| p * rho[k - 1 - j]).sum::<f64>();
        if !(v > 0.0) {
            return Err(Error::ZeroPivot { row: k });
        }
        let kappa = num / v;
        let prev = phi.clone();
        for j in 0..k {
            phi[j] = prev[j] - kappa * prev[k - 1 - j];
        }
        phi.push(kappa);
        partial.push(kappa);
        v *= 1.0 - kappa * kappa;
    }
    Ok((phi, partial))
}

/// Sample PACF by the Durbin-Levinson recursion on the sample ACF.
pub fn pacf(values: &[f64], max_lag: usize) -> Result<Correlogram> {
    check(values, max_lag)?;
    if 2 * max_lag >= values.len() {
        return Err(Error::TooShort {
            needed: 2 * max_lag + 1,
            got: values.len(),
        });
    }
    let rho = acf(values, max_lag)?;
    let (_, partial) = durbin_levinson(&rho.coefficients, max_lag)?;
    Ok(Correlogram::new(partial, values.len()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ramp_lag_one() {
        let c = acf(&[1.0, 2.0, 3.0, 4.0, 5.0], 1).unwrap();
        assert!((c.coefficients[0] - 0.4).abs() < 1e-15);
        assert_eq!(c.at_lag(0), 1.0);
    }

    #[test]
    fn alternating_sequence() {
        let x: Vec<f64> = (0..100).map(|i| if i % 2 == 0 { 1.0 } else { -1.0 }).collect();
        let c = acf(&x, 1).unwrap();
        assert!((c.coefficients[0] + 99.0 / 100.0).abs() < 1e-14);
    }

    #[test]
    fn band_width() {
        let x: Vec<f64> = (0..400).map(|i| ((i * 37) % 17) as f64).collect();
        assert!((acf(&x, 3).unwrap().band - 1.96 / 20.0).abs() < 1e-15);
    }

    #[test]
    fn constant_series_rejected() {
        assert!(matches!(acf(&[2.0; 10], 2), Err(Error::ConstantSeries)));
        assert!(matches!(acf(&[1.0, 2.0], 2), Err(Error::TooShort { .. })));
    }

    #[test]
    fn pacf_first_equals_acf_first() {
        let x: Vec<f64> = (0..50).map(|i| ((i * i) % 13) as f64 - (i as f64).sqrt()).collect();
        let a = acf(&x, 5).unwrap();
        let p = pacf(&x, 5).unwrap();
        assert_eq!(a.coefficients[0], p.coefficients[0]);
    }

    #[test]
    fn pacf_lag_limit() {
        let x: Vec<f64> = (0..10).map(|i| (i as f64).sin()).collect();
        assert!(pacf(&x, 5).is_err());
        assert!(pacf(&x, 4).is_ok());
    }

    #[test]
    fn durbin_levinson_ar1_autocorrelations() {
        // exact AR(1) autocorrelations 0.6^k give phi = [0.6, 0, 0]
        let rho: Vec<f64> = (1..=3).map(|k| 0.6f64.powi(k)).collect();
        let (phi, partial) = durbin_levinson(&rho, 3).unwrap();
        assert!((phi[0] - 0.6).abs() < 1e-15);
        assert!(phi[1].abs() < 1e-15 && phi[2].abs() < 1e-15);
        assert!(partial[1].abs() < 1e-15);
    }

    #[test]
    fn csv_layout() {
        let c = acf(&[1.0, 2.0, 3.0, 4.0, 5.0], 2).unwrap();
        let mut buf = Vec::new();
        c.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("lag,coefficient,band\n1,0.4,"));
        assert_eq!(text.lines().count(), 3);
    }
}
