//! Brute-force reference implementations used to cross-check the library.
//!
//! Everything here is deliberately naive: dense Gaussian elimination, direct
//! double loops, explicit simulation. Only the RNG helper comes from the crate.
#![allow(dead_code)]

use splinecast_core::simulate::gaussian_noise;
use splinecast_core::spline::BoundaryCondition;

/// Gaussian elimination with partial pivoting on a dense system.
pub fn solve_dense(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Vec<f64> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
            .unwrap();
        a.swap(col, piv);
        b.swap(col, piv);
        assert!(a[col][col].abs() > 1e-300, "singular oracle system");
        for row in col + 1..n {
            let f = a[row][col] / a[col][col];
            if f == 0.0 {
                continue;
            }
            for k in col..n {
                a[row][k] -= f * a[col][k];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let s: f64 = (i + 1..n).map(|k| a[i][k] * x[k]).sum();
        x[i] = (b[i] - s) / a[i][i];
    }
    x
}

/// Spline from the full `4(n-1)` coefficient system, one `[a, b, c, d]`
/// per interval in the local variable `t = x - x_i`.
pub fn dense_spline(xs: &[f64], ys: &[f64], bc: BoundaryCondition) -> Vec<[f64; 4]> {
    let m = xs.len() - 1;
    let dim = 4 * m;
    let mut rows: Vec<Vec<f64>> = Vec::with_capacity(dim);
    let mut rhs = Vec::with_capacity(dim);
    let mut eq = |entries: &[(usize, f64)], r: f64| {
        let mut row = vec![0.0; dim];
        for &(k, v) in entries {
            row[k] += v;
        }
        rows.push(row);
        rhs.push(r);
    };
    let (a, b, c, d) = (|i: usize| 4 * i, |i: usize| 4 * i + 1, |i: usize| 4 * i + 2, |i: usize| 4 * i + 3);
    for i in 0..m {
        let h = xs[i + 1] - xs[i];
        eq(&[(d(i), 1.0)], ys[i]);
        eq(&[(a(i), h * h * h), (b(i), h * h), (c(i), h), (d(i), 1.0)], ys[i + 1]);
        if i + 1 < m {
            eq(&[(a(i), 3.0 * h * h), (b(i), 2.0 * h), (c(i), 1.0), (c(i + 1), -1.0)], 0.0);
            eq(&[(a(i), 6.0 * h), (b(i), 2.0), (b(i + 1), -2.0)], 0.0);
        }
    }
    let hl = xs[m] - xs[m - 1];
    match bc {
        BoundaryCondition::Natural => {
            eq(&[(b(0), 2.0)], 0.0);
            eq(&[(a(m - 1), 6.0 * hl), (b(m - 1), 2.0)], 0.0);
        }
        BoundaryCondition::NotAKnot => {
            eq(&[(a(0), 1.0), (a(1), -1.0)], 0.0);
            eq(&[(a(m - 2), 1.0), (a(m - 1), -1.0)], 0.0);
        }
        BoundaryCondition::Periodic => {
            eq(&[(c(0), 1.0), (a(m - 1), -3.0 * hl * hl), (b(m - 1), -2.0 * hl), (c(m - 1), -1.0)], 0.0);
            eq(&[(b(0), 2.0), (a(m - 1), -6.0 * hl), (b(m - 1), -2.0)], 0.0);
        }
    }
    let sol = solve_dense(rows, rhs);
    sol.chunks(4).map(|w| [w[0], w[1], w[2], w[3]]).collect()
}

/// Sample autocorrelations at lags `1..=max_lag` straight from the definition.
pub fn acf_double_loop(x: &[f64], max_lag: usize) -> Vec<f64> {
    let n = x.len();
    let mean = x.iter().sum::<f64>() / n as f64;
    let mut c0 = 0.0;
    for t in 0..n {
        c0 += (x[t] - mean) * (x[t] - mean);
    }
    (1..=max_lag)
        .map(|k| {
            let mut ck = 0.0;
            for t in 0..n - k {
                ck += (x[t] - mean) * (x[t + k] - mean);
            }
            ck / c0
        })
        .collect()
}

/// Partial autocorrelations as the last coefficient of each Yule-Walker system.
pub fn pacf_yule_walker(x: &[f64], max_lag: usize) -> Vec<f64> {
    let rho = acf_double_loop(x, max_lag);
    let r = |k: usize| if k == 0 { 1.0 } else { rho[k - 1] };
    (1..=max_lag)
        .map(|k| {
            let a: Vec<Vec<f64>> = (0..k)
                .map(|i| (0..k).map(|j| r(i.abs_diff(j))).collect())
                .collect();
            let b: Vec<f64> = (1..=k).map(r).collect();
            *solve_dense(a, b).last().unwrap()
        })
        .collect()
}

/// Least squares through the normal equations `XᵀX β = Xᵀy`.
pub fn ols_normal_equations(rows: &[Vec<f64>], y: &[f64]) -> Vec<f64> {
    let k = rows[0].len();
    let mut xtx = vec![vec![0.0; k]; k];
    let mut xty = vec![0.0; k];
    for (row, yi) in rows.iter().zip(y) {
        for i in 0..k {
            xty[i] += row[i] * yi;
            for j in 0..k {
                xtx[i][j] += row[i] * row[j];
            }
        }
    }
    solve_dense(xtx, xty)
}

/// Cumulative sum of standard normal draws.
pub fn random_walk(n: usize, seed: u64) -> Vec<f64> {
    gaussian_noise(n, 1.0, seed)
        .iter()
        .scan(0.0, |s, e| {
            *s += e;
            Some(*s)
        })
        .collect()
}

/// Mean and standard deviation of simulated future levels, per horizon.
pub struct McForecast {
    pub mean: Vec<f64>,
    pub sd: Vec<f64>,
    pub paths: usize,
}

/// Simulates `paths` continuations of an ARMA(p, q) on the `d ∈ {0, 1}`
/// differenced scale, integrating back onto levels.
///
/// `w` is the differenced history and `eps` its in-sample innovations.
#[allow(clippy::too_many_arguments)]
pub fn mc_forecast(
    phi: &[f64],
    theta: &[f64],
    constant: f64,
    sigma: f64,
    d: usize,
    last_level: f64,
    w: &[f64],
    eps: &[f64],
    horizon: usize,
    paths: usize,
    seed: u64,
) -> McForecast {
    assert!(d <= 1);
    let shocks = gaussian_noise(paths * horizon, sigma, seed);
    let mut sum = vec![0.0; horizon];
    let mut sum2 = vec![0.0; horizon];
    for path in 0..paths {
        let mut ws = w.to_vec();
        let mut es = eps.to_vec();
        let mut level = last_level;
        for h in 0..horizon {
            let e = shocks[path * horizon + h];
            let t = ws.len();
            let mut v = constant + e;
            for (i, p) in phi.iter().enumerate() {
                v += p * ws[t - 1 - i];
            }
            for (j, q) in theta.iter().enumerate() {
                v += q * es[t - 1 - j];
            }
            ws.push(v);
            es.push(e);
            let y = if d == 1 {
                level += v;
                level
            } else {
                v
            };
            sum[h] += y;
            sum2[h] += y * y;
        }
    }
    let n = paths as f64;
    let mean: Vec<f64> = sum.iter().map(|s| s / n).collect();
    let sd = sum2
        .iter()
        .zip(&mean)
        .map(|(s2, m)| ((s2 / n - m * m) * n / (n - 1.0)).sqrt())
        .collect();
    McForecast { mean, sd, paths }
}
