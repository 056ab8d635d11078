mod common;

use num_complex::Complex64;
use proptest::prelude::*;
use splinecast_core::arima::{
    characteristic_roots, css_objective, fit, forecast, min_root_modulus, ArimaOrder, ArimaParams,
};
use splinecast_core::series::difference;
use splinecast_core::simulate::{gaussian_noise, simulate_arima, ArimaSpec};

#[test]
fn arma11_recovery() {
    let x = simulate_arima(&ArimaSpec::arma(&[0.6], &[0.3]), 10_000, 44).unwrap();
    let f = fit(&x, ArimaOrder::new(1, 0, 1)).unwrap();
    assert!(f.converged);
    assert!((f.params.phi[0] - 0.6).abs() <= 0.06, "{:?}", f.params);
    assert!((f.params.theta[0] - 0.3).abs() <= 0.06, "{:?}", f.params);
}

/// Stationary AR coefficients from partial autocorrelations in (-0.9, 0.9).
fn stationary_coeffs(order: usize, z: &[f64]) -> Vec<f64> {
    let mut phi: Vec<f64> = Vec::new();
    for k in 0..order {
        let r = 0.9 * z[k].tanh();
        let prev = phi.clone();
        phi = (0..k).map(|j| prev[j] - r * prev[k - 1 - j]).collect();
        phi.push(r);
    }
    phi
}

#[test]
fn fitted_models_keep_roots_outside_unit_circle() {
    let mut fitted = 0;
    let mut attempts = 0u64;
    while fitted < 1000 {
        assert!(attempts < 1100, "too many failed fits: {fitted} of {attempts}");
        let z = gaussian_noise(6, 1.0, 70_000 + attempts);
        let (p, q) = (1 + attempts as usize % 2, attempts as usize / 2 % 3);
        let phi = stationary_coeffs(p, &z);
        let theta: Vec<f64> = stationary_coeffs(q, &z[3..]).iter().map(|v| -v).collect();
        let x = simulate_arima(&ArimaSpec::arma(&phi, &theta), 120, 80_000 + attempts).unwrap();
        attempts += 1;
        let Ok(f) = fit(&x, ArimaOrder::new(p, 0, q)) else { continue };
        assert!(f.params.ar_min_modulus() > 1.0, "{:?}", f.params);
        assert!(f.params.ma_min_modulus() > 1.0, "{:?}", f.params);
        fitted += 1;
    }
}

#[test]
fn unit_root_polynomial_detected() {
    assert!((min_root_modulus(&[1.5, -0.5]) - 1.0).abs() <= 1e-8);
}

#[test]
fn degree_five_roots_rebuild_polynomial() {
    let roots = [
        Complex64::new(1.3, 0.0),
        Complex64::new(-2.1, 0.0),
        Complex64::new(0.4, 1.5),
        Complex64::new(0.4, -1.5),
        Complex64::new(-3.0, 0.0),
    ];
    // Π (1 - z / r) = 1 - c_1 z - … - c_5 z^5
    let mut poly = vec![Complex64::new(1.0, 0.0)];
    for r in &roots {
        let mut next = poly.clone();
        next.push(Complex64::new(0.0, 0.0));
        for i in 1..next.len() {
            next[i] -= poly[i - 1] / r;
        }
        poly = next;
    }
    let coeffs: Vec<f64> = poly[1..].iter().map(|c| -c.re).collect();
    let set = characteristic_roots(&coeffs).unwrap();
    assert_eq!(set.roots.len(), 5);
    for r in &roots {
        let nearest = set.roots.iter().map(|s| (s - r).norm()).fold(f64::INFINITY, f64::min);
        assert!(nearest <= 1e-8, "root {r} missed by {nearest:e}");
    }
    assert!((set.min_modulus - 1.3).abs() <= 1e-8);
}

#[test]
fn css_optimum_is_local() {
    let x = simulate_arima(
        &ArimaSpec {
            constant: 0.5,
            ..ArimaSpec::arma(&[0.5, -0.2], &[0.4])
        },
        1500,
        55,
    )
    .unwrap();
    let order = ArimaOrder::new(2, 0, 1);
    let f = fit(&x, order).unwrap();
    let best = css_objective(&f.params, &x, &order).unwrap().loglik;
    assert!((best - f.loglik).abs() <= 1e-9 * best.abs());
    let perturbed = |k: usize, delta: f64| {
        let mut p: ArimaParams = f.params.clone();
        match k {
            0 => p.constant += delta,
            1 | 2 => p.phi[k - 1] += delta,
            _ => p.theta[0] += delta,
        }
        css_objective(&p, &x, &order).unwrap().loglik
    };
    for k in 0..4 {
        for delta in [-1e-3, 1e-3] {
            let ll = perturbed(k, delta);
            assert!(ll <= best + 1e-6, "param {k} {delta:+}: {ll} > {best}");
        }
    }
}

fn check_against_monte_carlo(x: &[f64], order: ArimaOrder, seed: u64) {
    let f = fit(x, order).unwrap();
    let fc = forecast(&f, x, 10).unwrap();
    let w = difference(x, order.d).unwrap().values;
    let mc = common::mc_forecast(
        &f.params.phi,
        &f.params.theta,
        f.params.constant,
        f.params.sigma2.sqrt(),
        order.d,
        *x.last().unwrap(),
        &w,
        &f.residuals,
        10,
        20_000,
        seed,
    );
    let n = mc.paths as f64;
    for h in 0..10 {
        let se_mean = mc.sd[h] / n.sqrt();
        assert!(
            (fc.point[h] - mc.mean[h]).abs() <= 3.0 * se_mean,
            "h={}: point {} vs MC {} (se {se_mean})",
            h + 1,
            fc.point[h],
            mc.mean[h]
        );
        let se_sd = mc.sd[h] / (2.0 * n).sqrt();
        assert!(
            (fc.stderr[h] - mc.sd[h]).abs() <= 3.0 * se_sd,
            "h={}: stderr {} vs MC {}",
            h + 1,
            fc.stderr[h],
            mc.sd[h]
        );
    }
}

#[test]
fn forecast_agrees_with_monte_carlo_integrated() {
    let x = simulate_arima(
        &ArimaSpec {
            d: 1,
            start_level: 50.0,
            ..ArimaSpec::arma(&[0.6], &[0.3])
        },
        600,
        61,
    )
    .unwrap();
    check_against_monte_carlo(&x, ArimaOrder::new(1, 1, 1), 62);
}

#[test]
fn forecast_agrees_with_monte_carlo_stationary() {
    let x = simulate_arima(
        &ArimaSpec {
            constant: 2.0,
            ..ArimaSpec::arma(&[0.7], &[-0.4])
        },
        600,
        63,
    )
    .unwrap();
    check_against_monte_carlo(&x, ArimaOrder::new(1, 0, 1), 64);
}

#[test]
fn random_walk_forecast_is_flat() {
    let x = common::random_walk(400, 3);
    let f = fit(&x, ArimaOrder::new(0, 1, 0)).unwrap();
    let fc = forecast(&f, &x, 25).unwrap();
    let sigma = f.params.sigma2.sqrt();
    for h in 0..25 {
        assert_eq!(fc.point[h], x[399]);
        assert!((fc.stderr[h] - sigma * ((h + 1) as f64).sqrt()).abs() <= 1e-12 * sigma);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn forecast_intervals_are_well_formed(phi in -0.8f64..0.8, seed in 0u64..1000, d in 0usize..=2) {
        let spec = ArimaSpec { d, ..ArimaSpec::arma(&[phi], &[]) };
        let x = simulate_arima(&spec, 200, seed).unwrap();
        let f = fit(&x, ArimaOrder::new(1, d, 0)).unwrap();
        let fc = forecast(&f, &x, 30).unwrap();
        for h in 0..30 {
            prop_assert!(fc.ci_low[h] <= fc.point[h] && fc.point[h] <= fc.ci_high[h]);
            let half = fc.ci_high[h] - fc.point[h];
            prop_assert!((half - (fc.point[h] - fc.ci_low[h])).abs() <= 1e-9 * half.max(1.0));
            if h > 0 {
                prop_assert!(fc.stderr[h] >= fc.stderr[h - 1]);
            }
        }
    }

    #[test]
    fn fit_is_deterministic(seed in 0u64..1000) {
        let x = simulate_arima(&ArimaSpec::arma(&[0.4], &[0.2]), 150, seed).unwrap();
        let order = ArimaOrder::new(1, 0, 1);
        prop_assert_eq!(fit(&x, order).unwrap(), fit(&x, order).unwrap());
    }
}
