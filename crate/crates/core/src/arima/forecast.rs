use std::io::Write;

use chrono::{Duration, NaiveDate};
use serde::Serialize;

use super::css::css_residuals;
use super::FittedArima;
use crate::error::{Error, Result};
use crate::series::{difference, DATE_FORMAT};

/// Largest horizon accepted by [`forecast`].
pub const MAX_HORIZON: usize = 10_000;

/// Multi-step forecasts on the level scale with 95% intervals.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ForecastResult {
    pub horizon: usize,
    pub point: Vec<f64>,
    pub stderr: Vec<f64>,
    pub ci_low: Vec<f64>,
    pub ci_high: Vec<f64>,
}

impl ForecastResult {
    /// Writes `date,point,stderr,ci_low,ci_high`, dating step `h` as `last_date + h` days.
    pub fn write_csv<W: Write>(&self, last_date: NaiveDate, mut out: W) -> std::io::Result<()> {
        writeln!(out, "date,point,stderr,ci_low,ci_high")?;
        for h in 0..self.horizon {
            let date = last_date + Duration::days(h as i64 + 1);
            writeln!(
                out,
                "{},{},{},{},{}",
                date.format(DATE_FORMAT),
                self.point[h],
                self.stderr[h],
                self.ci_low[h],
                self.ci_high[h]
            )?;
        }
        Ok(())
    }
}

/// Coefficients `a_i` of the integrated AR operator
/// `φ(B)(1 - B)^d = 1 - a_1 B - … - a_{p+d} B^{p+d}`.
pub(crate) fn integrated_ar(phi: &[f64], d: usize) -> Vec<f64> {
    let mut poly = Vec::with_capacity(phi.len() + d + 1);
    poly.push(1.0);
    poly.extend(phi.iter().map(|v| -v));
    for _ in 0..d {
        let mut next = poly.clone();
        next.push(0.0);
        for i in 1..next.len() {
            next[i] -= poly[i - 1];
        }
        poly = next;
    }
    poly[1..].iter().map(|v| -v).collect()
}

/// Forecasts `horizon` steps past the end of `origin_series` (levels).
///
/// Future innovations are set to zero and in-sample ones taken from the CSS
/// residuals; intervals use the ψ-weights of the integrated process.
pub fn forecast(fitted: &FittedArima, origin_series: &[f64], horizon: usize) -> Result<ForecastResult> {
    if horizon == 0 || horizon > MAX_HORIZON {
        return Err(Error::InvalidArgument(format!(
            "forecast horizon must be in 1..={MAX_HORIZON}, got {horizon}"
        )));
    }
    if origin_series.iter().any(|v| !v.is_finite()) {
        return Err(Error::MissingValues);
    }
    let order = fitted.order;
    let params = &fitted.params;
    let needed = order.p + order.d + 1;
    if origin_series.len() < needed {
        return Err(Error::TooShort {
            needed,
            got: origin_series.len(),
        });
    }
    let diff = difference(origin_series, order.d)?.values;
    let resid = css_residuals(&params.phi, &params.theta, params.constant, &diff);

    let a = integrated_ar(&params.phi, order.d);
    let theta = &params.theta;
    let n = origin_series.len();
    let mut levels = origin_series.to_vec();
    levels.reserve(horizon);
    // innovation at level index t is the residual of differenced index t - d
    let eps_at = |t: usize| if t >= order.d { resid[t - order.d] } else { 0.0 };
    for h in 0..horizon {
        let t = n + h;
        let mut v = params.constant;
        for (i, ai) in a.iter().enumerate() {
            v += ai * levels[t - 1 - i];
        }
        for (j, th) in theta.iter().enumerate() {
            if let Some(s) = (t - 1).checked_sub(j).filter(|s| *s < n) {
                v += th * eps_at(s);
            }
        }
        levels.push(v);
    }
    let point = levels.split_off(n);

    let mut psi = Vec::with_capacity(horizon);
    let mut stderr = Vec::with_capacity(horizon);
    let mut acc = 0.0;
    for j in 0..horizon {
        let mut v = if j == 0 { 1.0 } else { theta.get(j - 1).copied().unwrap_or(0.0) };
        for (i, ai) in a.iter().enumerate().take(j) {
            v += ai * psi[j - 1 - i];
        }
        psi.push(v);
        acc += v * v;
        stderr.push((params.sigma2 * acc).sqrt());
    }
    let ci_low = point.iter().zip(&stderr).map(|(p, s)| p - 1.96 * s).collect();
    let ci_high = point.iter().zip(&stderr).map(|(p, s)| p + 1.96 * s).collect();
    Ok(ForecastResult {
        horizon,
        point,
        stderr,
        ci_low,
        ci_high,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arima::{fit, ArimaOrder};
    use crate::simulate::gaussian_noise;

    #[test]
    fn integrated_operator() {
        assert_eq!(integrated_ar(&[], 1), vec![1.0]);
        assert_eq!(integrated_ar(&[], 2), vec![2.0, -1.0]);
        // (1 - 0.5B)(1 - B) = 1 - 1.5B + 0.5B²
        assert_eq!(integrated_ar(&[0.5], 1), vec![1.5, -0.5]);
    }

    fn walk(n: usize, seed: u64) -> Vec<f64> {
        gaussian_noise(n, 1.0, seed)
            .iter()
            .scan(10.0, |s, e| {
                *s += e;
                Some(*s)
            })
            .collect()
    }

    #[test]
    fn random_walk_is_flat() {
        let x = walk(200, 1);
        let f = fit(&x, ArimaOrder::new(0, 1, 0)).unwrap();
        let fc = forecast(&f, &x, 25).unwrap();
        let last = *x.last().unwrap();
        let sigma = f.params.sigma2.sqrt();
        for h in 0..25 {
            assert_eq!(fc.point[h], last);
            let expect = sigma * ((h + 1) as f64).sqrt();
            assert!((fc.stderr[h] - expect).abs() <= 1e-12 * expect);
        }
    }

    #[test]
    fn ar1_geometric_decay() {
        let mut x = gaussian_noise(60, 1.0, 2);
        *x.last_mut().unwrap() = 8.0;
        let order = ArimaOrder::new(1, 0, 0).with_constant(false);
        let f = FittedArima::from_params(&x, order, &[0.5], &[], 0.0).unwrap();
        let fc = forecast(&f, &x, 4).unwrap();
        assert_eq!(fc.point, vec![4.0, 2.0, 1.0, 0.5]);
        for w in fc.stderr.windows(2) {
            assert!(w[1] >= w[0]);
        }
    }

    #[test]
    fn horizon_bounds() {
        let x = walk(100, 3);
        let f = fit(&x, ArimaOrder::new(0, 1, 0)).unwrap();
        assert!(forecast(&f, &x, 0).is_err());
        assert!(forecast(&f, &x, MAX_HORIZON + 1).is_err());
        assert_eq!(forecast(&f, &x, MAX_HORIZON).unwrap().point.len(), MAX_HORIZON);
    }

    #[test]
    fn csv_layout() {
        let x = walk(100, 4);
        let f = fit(&x, ArimaOrder::new(0, 1, 0)).unwrap();
        let fc = forecast(&f, &x, 2).unwrap();
        let mut buf = Vec::new();
        fc.write_csv(NaiveDate::from_ymd_opt(2022, 12, 31).unwrap(), &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "date,point,stderr,ci_low,ci_high");
        assert!(lines[1].starts_with("2023-01-01,"));
        assert!(lines[2].starts_with("2023-01-02,"));
    }
}
