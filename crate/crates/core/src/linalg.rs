//! Thin helpers over `nalgebra` for the small dense problems in this crate:
//! least squares by Householder QR with a rank check, and SPD inversion.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

pub type Matrix = DMatrix<f64>;

/// Builds a matrix from equally long rows.
pub fn from_rows(rows: &[Vec<f64>]) -> Result<Matrix> {
    let cols = rows.first().map_or(0, Vec::len);
    if rows.iter().any(|r| r.len() != cols) {
        return Err(Error::Dimension("ragged rows".into()));
    }
    Ok(Matrix::from_row_iterator(rows.len(), cols, rows.iter().flatten().copied()))
}

/// Least-squares solution of `A x ≈ b` with `(AᵀA)⁻¹`.
pub struct LeastSquares {
    pub solution: Vec<f64>,
    pub gram_inverse: Matrix,
}

/// Solves `A x ≈ b` by QR, failing when a diagonal entry of `R` falls below
/// `rel_tol` times the largest column norm of `A`.
pub fn least_squares(a: &Matrix, b: &[f64], rel_tol: f64) -> Result<LeastSquares> {
    let (m, n) = a.shape();
    if m < n {
        return Err(Error::Dimension(format!("{m} rows < {n} columns")));
    }
    if b.len() != m {
        return Err(Error::Dimension(format!("{m} rows but {} responses", b.len())));
    }
    let scale = a.column_iter().map(|c| c.norm()).fold(0.0, f64::max);
    let qr = a.clone().qr();
    let r = qr.r();
    if let Some(column) = (0..n).find(|&k| {
        let d = r[(k, k)].abs();
        d == 0.0 || d <= rel_tol * scale
    }) {
        return Err(Error::RankDeficient { column });
    }
    let mut y = DVector::from_column_slice(b);
    qr.q_tr_mul(&mut y);
    let solution = r
        .solve_upper_triangular(&y.rows(0, n).into_owned())
        .ok_or(Error::RankDeficient { column: 0 })?;
    let r_inv = r
        .solve_upper_triangular(&Matrix::identity(n, n))
        .ok_or(Error::RankDeficient { column: 0 })?;
    Ok(LeastSquares {
        solution: solution.iter().copied().collect(),
        gram_inverse: &r_inv * r_inv.transpose(),
    })
}

/// Inverse of a symmetric positive-definite matrix via Cholesky.
pub fn spd_inverse(a: &Matrix) -> Result<Matrix> {
    if !a.is_square() {
        return Err(Error::Dimension("Cholesky needs a square matrix".into()));
    }
    if a.iter().any(|v| !v.is_finite()) {
        return Err(Error::NotPositiveDefinite);
    }
    a.clone()
        .cholesky()
        .map(|c| c.inverse())
        .ok_or(Error::NotPositiveDefinite)
}
