use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Roots of `1 - c_1 z - … - c_k z^k`.
#[derive(Debug, Clone, PartialEq)]
pub struct RootSet {
    pub roots: Vec<Complex64>,
    pub min_modulus: f64,
}

/// Evaluates a polynomial given by descending coefficients, with its derivative.
fn horner(coeffs: &[f64], z: Complex64) -> (Complex64, Complex64) {
    let mut p = Complex64::new(0.0, 0.0);
    let mut dp = Complex64::new(0.0, 0.0);
    for &c in coeffs {
        dp = dp * z + p;
        p = p * z + c;
    }
    (p, dp)
}

/// One or two Newton steps on an eigenvalue estimate, kept only while the
/// residual shrinks.
fn polish(coeffs: &[f64], mut w: Complex64) -> Complex64 {
    for _ in 0..2 {
        let (p, dp) = horner(coeffs, w);
        let step = p / dp;
        if !step.is_finite() || step.norm() == 0.0 {
            break;
        }
        let candidate = w - step;
        if horner(coeffs, candidate).0.norm() < p.norm() {
            w = candidate;
        } else {
            break;
        }
    }
    w
}

/// All `k` roots of `1 - c_1 z - … - c_k z^k` (`c_k ≠ 0`) and their smallest modulus.
///
/// Solved as the reciprocals of the eigenvalues of the companion matrix of
/// the monic reversed polynomial `w^k - c_1 w^{k-1} - … - c_k`.
pub fn characteristic_roots(coeffs: &[f64]) -> Result<RootSet> {
    let k = coeffs.len();
    if k == 0 {
        return Err(Error::InvalidArgument("polynomial has degree 0".into()));
    }
    if coeffs[k - 1] == 0.0 {
        return Err(Error::InvalidArgument("leading coefficient is zero".into()));
    }
    if coeffs.iter().any(|c| !c.is_finite()) {
        return Err(Error::InvalidArgument("non-finite polynomial coefficient".into()));
    }
    // companion matrix of the reversed polynomial: first row c, ones below the diagonal
    let companion = DMatrix::from_fn(k, k, |i, j| {
        if i == 0 {
            coeffs[j]
        } else if i == j + 1 {
            1.0
        } else {
            0.0
        }
    });
    let mut reversed = Vec::with_capacity(k + 1);
    reversed.push(1.0);
    reversed.extend(coeffs.iter().map(|c| -c));
    let roots: Vec<Complex64> = companion
        .complex_eigenvalues()
        .iter()
        .map(|w| polish(&reversed, *w).inv())
        .collect();
    let min_modulus = roots.iter().map(|r| r.norm()).fold(f64::INFINITY, f64::min);
    Ok(RootSet { roots, min_modulus })
}

/// Smallest root modulus of `1 - c_1 z - … - c_k z^k`; trailing zero
/// coefficients lower the degree, and a constant polynomial gives `∞`.
pub fn min_root_modulus(coeffs: &[f64]) -> f64 {
    let k = coeffs.iter().rposition(|c| *c != 0.0).map_or(0, |i| i + 1);
    if k == 0 {
        return f64::INFINITY;
    }
    if k == 1 {
        return 1.0 / coeffs[0].abs();
    }
    characteristic_roots(&coeffs[..k]).map_or(f64::NAN, |r| r.min_modulus)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn eval(coeffs: &[f64], z: Complex64) -> Complex64 {
        let mut acc = Complex64::new(1.0, 0.0);
        let mut pow = Complex64::new(1.0, 0.0);
        for c in coeffs {
            pow *= z;
            acc -= *c * pow;
        }
        acc
    }

    #[test]
    fn linear_case() {
        let r = characteristic_roots(&[0.5]).unwrap();
        assert!((r.roots[0] - Complex64::new(2.0, 0.0)).norm() < 1e-14);
        assert!((r.min_modulus - 2.0).abs() < 1e-14);
    }

    #[test]
    fn unit_root_detected() {
        let r = characteristic_roots(&[1.5, -0.5]).unwrap();
        let mut re: Vec<f64> = r.roots.iter().map(|z| z.re).collect();
        re.sort_by(f64::total_cmp);
        assert!((re[0] - 1.0).abs() < 1e-8 && (re[1] - 2.0).abs() < 1e-8);
        assert!((r.min_modulus - 1.0).abs() < 1e-8);
    }

    #[test]
    fn complex_pair() {
        // 1 - z + 0.5 z² has roots 1 ± i
        let r = characteristic_roots(&[1.0, -0.5]).unwrap();
        assert!((r.min_modulus - 2f64.sqrt()).abs() < 1e-12);
        for z in &r.roots {
            assert!(eval(&[1.0, -0.5], *z).norm() < 1e-12);
        }
    }

    #[test]
    fn residuals_small_for_degree_ten() {
        let c = [0.3, -0.2, 0.1, 0.05, -0.04, 0.03, 0.02, -0.01, 0.01, 0.005];
        let r = characteristic_roots(&c).unwrap();
        assert_eq!(r.roots.len(), 10);
        for z in &r.roots {
            assert!(eval(&c, *z).norm() <= 1e-8, "{z}");
        }
    }

    #[test]
    fn degenerate_inputs() {
        assert!(characteristic_roots(&[]).is_err());
        assert!(characteristic_roots(&[0.5, 0.0]).is_err());
        assert_eq!(min_root_modulus(&[0.0, 0.0]), f64::INFINITY);
        assert!((min_root_modulus(&[0.5, 0.0]) - 2.0).abs() < 1e-14);
    }

    #[test]
    fn repeated_root() {
        // (1 - 0.5 z)² = 1 - z + 0.25 z²
        let r = characteristic_roots(&[1.0, -0.25]).unwrap();
        assert!((r.min_modulus - 2.0).abs() < 1e-6);
    }
}
