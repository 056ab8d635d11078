use crate::error::{Error, Result};
use crate::linalg::{least_squares, Matrix};

/// Relative pivot tolerance below which the design is treated as rank deficient.
const RANK_TOL: f64 = 1e-12;

/// Ordinary least-squares estimates with classical standard errors.
#[derive(Debug, Clone, PartialEq)]
pub struct OlsFit {
    pub coefficients: Vec<f64>,
    pub std_errors: Vec<f64>,
    pub residuals: Vec<f64>,
    /// Residual sum of squares.
    pub rss: f64,
}

impl OlsFit {
    pub fn t_ratio(&self, j: usize) -> f64 {
        self.coefficients[j] / self.std_errors[j]
    }
}

/// Least squares of `response` on the columns of `design`, solved by Householder QR.
///
/// Standard errors are `sqrt(diag(s² (XᵀX)⁻¹))` with `s² = RSS / (rows - cols)`.
pub fn ols(design: &Matrix, response: &[f64]) -> Result<OlsFit> {
    let (rows, cols) = design.shape();
    if response.len() != rows {
        return Err(Error::Dimension(format!(
            "design has {rows} rows but response has {}",
            response.len()
        )));
    }
    if rows < cols || cols == 0 {
        return Err(Error::Dimension(format!("{rows} rows for {cols} columns")));
    }
    let ls = least_squares(design, response, RANK_TOL)?;
    let coefficients = ls.solution;
    let residuals: Vec<f64> = (0..rows)
        .map(|i| response[i] - design.row(i).iter().zip(&coefficients).map(|(x, b)| x * b).sum::<f64>())
        .collect();
    let rss: f64 = residuals.iter().map(|r| r * r).sum();
    let dof = rows - cols;
    let s2 = if dof > 0 { rss / dof as f64 } else { f64::NAN };
    let std_errors = (0..cols).map(|j| (s2 * ls.gram_inverse[(j, j)]).sqrt()).collect();
    Ok(OlsFit {
        coefficients,
        std_errors,
        residuals,
        rss,
    })
}
