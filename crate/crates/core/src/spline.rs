//! Cubic spline interpolation and gap filling.
//!
//! The spline is built from its knot second derivatives ("moments"), which
//! satisfy a tridiagonal system (cyclic for periodic ends). Each interval is
//! stored as a cubic in the local variable `t = x - x_i`; the global monomial
//! form `a x³ + b x² + c x + d` is produced on export only, because day
//! offsets in the thousands make the global coefficients badly conditioned.

use std::io::Write;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::series::{TimeSeries, DATE_FORMAT};

/// End conditions that close the spline system.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BoundaryCondition {
    /// Zero second derivative at both ends.
    #[default]
    Natural,
    /// Third derivative continuous across the second and penultimate knots.
    NotAKnot,
    /// First and second derivatives match at the two ends.
    Periodic,
}

impl BoundaryCondition {
    pub fn as_str(self) -> &'static str {
        match self {
            BoundaryCondition::Natural => "natural",
            BoundaryCondition::NotAKnot => "not_a_knot",
            BoundaryCondition::Periodic => "periodic",
        }
    }
}

impl FromStr for BoundaryCondition {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "natural" => Ok(Self::Natural),
            "not_a_knot" | "not-a-knot" => Ok(Self::NotAKnot),
            "periodic" => Ok(Self::Periodic),
            other => Err(Error::InvalidArgument(format!(
                "unknown boundary condition `{other}` (expected natural, not_a_knot or periodic)"
            ))),
        }
    }
}

/// Local-form coefficients of one interval: `s(t) = a t³ + b t² + c t + d`, `t = x - x_left`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalCubic {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl LocalCubic {
    fn value(&self, t: f64) -> f64 {
        ((self.a * t + self.b) * t + self.c) * t + self.d
    }

    fn derivative(&self, t: f64, order: usize) -> f64 {
        match order {
            0 => self.value(t),
            1 => (3.0 * self.a * t + 2.0 * self.b) * t + self.c,
            2 => 6.0 * self.a * t + 2.0 * self.b,
            3 => 6.0 * self.a,
            _ => 0.0,
        }
    }

    /// Re-expands around `x = 0` given the interval's left knot.
    pub fn to_global(&self, x_left: f64) -> [f64; 4] {
        let (a, b, c, d, h) = (self.a, self.b, self.c, self.d, x_left);
        [
            a,
            b - 3.0 * a * h,
            c - 2.0 * b * h + 3.0 * a * h * h,
            d - c * h + b * h * h - a * h * h * h,
        ]
    }
}

/// Piecewise cubic interpolant with `n - 1` pieces for `n` knots.
#[derive(Debug, Clone, PartialEq)]
pub struct CubicSpline {
    knots_x: Vec<f64>,
    pieces: Vec<LocalCubic>,
    boundary: BoundaryCondition,
}

impl CubicSpline {
    pub fn knots(&self) -> &[f64] {
        &self.knots_x
    }

    pub fn pieces(&self) -> &[LocalCubic] {
        &self.pieces
    }

    pub fn boundary(&self) -> BoundaryCondition {
        self.boundary
    }

    /// Global monomial coefficients `[a, b, c, d]` of every interval.
    pub fn global_coefficients(&self) -> Vec<[f64; 4]> {
        self.pieces
            .iter()
            .zip(&self.knots_x)
            .map(|(p, &x)| p.to_global(x))
            .collect()
    }

    fn interval(&self, x: f64) -> Result<usize> {
        let lo = self.knots_x[0];
        let hi = *self.knots_x.last().unwrap();
        if !(x >= lo && x <= hi) {
            return Err(Error::OutOfRange { x, lo, hi });
        }
        // last index i with knots_x[i] <= x, capped to the last piece
        let i = self.knots_x.partition_point(|&k| k <= x);
        Ok(i.saturating_sub(1).min(self.pieces.len() - 1))
    }

    /// `S(x)`; no extrapolation outside the knot range.
    pub fn evaluate(&self, x: f64) -> Result<f64> {
        self.derivative(x, 0)
    }

    /// `order`-th derivative of the piece containing `x`.
    pub fn derivative(&self, x: f64, order: usize) -> Result<f64> {
        let i = self.interval(x)?;
        Ok(self.pieces[i].derivative(x - self.knots_x[i], order))
    }

    /// `order`-th derivative of piece `piece` at `x`, without range checks.
    /// Used to compare one-sided limits at a shared knot.
    pub fn piece_derivative(&self, piece: usize, x: f64, order: usize) -> f64 {
        self.pieces[piece].derivative(x - self.knots_x[piece], order)
    }

    /// Writes `interval_index,x_left,x_right,a,b,c,d` in global monomial form.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "interval_index,x_left,x_right,a,b,c,d")?;
        for (i, g) in self.global_coefficients().iter().enumerate() {
            writeln!(
                out,
                "{},{},{},{},{},{},{}",
                i,
                self.knots_x[i],
                self.knots_x[i + 1],
                g[0],
                g[1],
                g[2],
                g[3]
            )?;
        }
        Ok(())
    }
}

/// Thomas algorithm for a tridiagonal system.
///
/// `sub[i]` multiplies `x[i]` in row `i + 1`; `sup[i]` multiplies `x[i + 1]` in row `i`.
pub fn solve_tridiagonal(sub: &[f64], diag: &[f64], sup: &[f64], rhs: &[f64]) -> Result<Vec<f64>> {
    let n = diag.len();
    if n == 0 {
        return Err(Error::Dimension("empty tridiagonal system".into()));
    }
    if sub.len() != n - 1 || sup.len() != n - 1 || rhs.len() != n {
        return Err(Error::Dimension(format!(
            "tridiagonal system of order {n} with sub {}, sup {}, rhs {}",
            sub.len(),
            sup.len(),
            rhs.len()
        )));
    }
    let scale = diag.iter().chain(sub).chain(sup).fold(0.0f64, |m, v| m.max(v.abs()));
    let tiny = f64::EPSILON * scale;
    let mut c = vec![0.0; n];
    let mut d = vec![0.0; n];
    let mut pivot = diag[0];
    if pivot.abs() <= tiny {
        return Err(Error::ZeroPivot { row: 0 });
    }
    if n > 1 {
        c[0] = sup[0] / pivot;
    }
    d[0] = rhs[0] / pivot;
    for i in 1..n {
        pivot = diag[i] - sub[i - 1] * c[i - 1];
        if pivot.abs() <= tiny {
            return Err(Error::ZeroPivot { row: i });
        }
        if i < n - 1 {
            c[i] = sup[i] / pivot;
        }
        d[i] = (rhs[i] - sub[i - 1] * d[i - 1]) / pivot;
    }
    for i in (0..n - 1).rev() {
        d[i] -= c[i] * d[i + 1];
    }
    Ok(d)
}

/// Cyclic tridiagonal solve (corner entries `corner_low = A[n-1][0]`,
/// `corner_high = A[0][n-1]`) by the Sherman-Morrison correction. Needs `n ≥ 3`.
pub fn solve_cyclic_tridiagonal(
    sub: &[f64],
    diag: &[f64],
    sup: &[f64],
    corner_low: f64,
    corner_high: f64,
    rhs: &[f64],
) -> Result<Vec<f64>> {
    let n = diag.len();
    if n < 3 {
        return Err(Error::Dimension("cyclic system needs at least 3 unknowns".into()));
    }
    let gamma = -diag[0];
    let mut diag_mod = diag.to_vec();
    diag_mod[0] -= gamma;
    diag_mod[n - 1] -= corner_low * corner_high / gamma;
    let x = solve_tridiagonal(sub, &diag_mod, sup, rhs)?;
    let mut u = vec![0.0; n];
    u[0] = gamma;
    u[n - 1] = corner_low;
    let z = solve_tridiagonal(sub, &diag_mod, sup, &u)?;
    let vx = x[0] + corner_high / gamma * x[n - 1];
    let vz = z[0] + corner_high / gamma * z[n - 1];
    let denom = 1.0 + vz;
    if denom.abs() <= f64::EPSILON {
        return Err(Error::ZeroPivot { row: n - 1 });
    }
    let f = vx / denom;
    Ok(x.iter().zip(&z).map(|(xi, zi)| xi - f * zi).collect())
}

/// Fits the interpolating cubic spline through `(xs[i], ys[i])`.
pub fn fit_cubic_spline(xs: &[f64], ys: &[f64], boundary: BoundaryCondition) -> Result<CubicSpline> {
    let n = xs.len();
    if ys.len() != n {
        return Err(Error::Dimension(format!("{n} abscissae but {} ordinates", ys.len())));
    }
    let min_points = if boundary == BoundaryCondition::NotAKnot { 4 } else { 2 };
    if n < min_points {
        return Err(Error::TooShort {
            needed: min_points,
            got: n,
        });
    }
    if let Some(i) = xs.windows(2).position(|w| !(w[1] > w[0])) {
        return Err(Error::NotIncreasing { index: i + 1 });
    }
    if xs.iter().chain(ys).any(|v| !v.is_finite()) {
        return Err(Error::InvalidArgument("non-finite spline data".into()));
    }
    if boundary == BoundaryCondition::Periodic {
        let (first, last) = (ys[0], ys[n - 1]);
        if (first - last).abs() > 1e-12 * first.abs().max(last.abs()) {
            return Err(Error::PeriodicMismatch { first, last });
        }
    }

    let h: Vec<f64> = xs.windows(2).map(|w| w[1] - w[0]).collect();
    let slope: Vec<f64> = ys.windows(2).zip(&h).map(|(w, hi)| (w[1] - w[0]) / hi).collect();
    let moments = if n == 2 {
        vec![0.0; 2]
    } else {
        match boundary {
            BoundaryCondition::Natural => natural_moments(&h, &slope)?,
            BoundaryCondition::NotAKnot => not_a_knot_moments(&h, &slope)?,
            BoundaryCondition::Periodic => periodic_moments(&h, &slope)?,
        }
    };

    let pieces = (0..n - 1)
        .map(|i| LocalCubic {
            a: (moments[i + 1] - moments[i]) / (6.0 * h[i]),
            b: moments[i] / 2.0,
            c: slope[i] - h[i] * (2.0 * moments[i] + moments[i + 1]) / 6.0,
            d: ys[i],
        })
        .collect();
    Ok(CubicSpline {
        knots_x: xs.to_vec(),
        pieces,
        boundary,
    })
}

/// Row `i` (interior knot) of the moment equations:
/// `h[i-1] M[i-1] + 2 (h[i-1] + h[i]) M[i] + h[i] M[i+1] = 6 (slope[i] - slope[i-1])`.
fn interior_rhs(slope: &[f64], i: usize) -> f64 {
    6.0 * (slope[i] - slope[i - 1])
}

fn natural_moments(h: &[f64], slope: &[f64]) -> Result<Vec<f64>> {
    let n = h.len() + 1;
    let m = n - 2;
    let diag: Vec<f64> = (1..=m).map(|i| 2.0 * (h[i - 1] + h[i])).collect();
    let off: Vec<f64> = (1..m).map(|i| h[i]).collect();
    let rhs: Vec<f64> = (1..=m).map(|i| interior_rhs(slope, i)).collect();
    let inner = solve_tridiagonal(&off, &diag, &off, &rhs)?;
    let mut moments = Vec::with_capacity(n);
    moments.push(0.0);
    moments.extend(inner);
    moments.push(0.0);
    Ok(moments)
}

fn not_a_knot_moments(h: &[f64], slope: &[f64]) -> Result<Vec<f64>> {
    let n = h.len() + 1;
    let m = n - 2;
    // Eliminate M[0] and M[n-1] through the third-derivative continuity at
    // knots 1 and n-2:  M0 = M1 + h0 (M1 - M2) / h1, likewise at the far end.
    let mut diag: Vec<f64> = (1..=m).map(|i| 2.0 * (h[i - 1] + h[i])).collect();
    let mut sub: Vec<f64> = (2..=m).map(|i| h[i - 1]).collect();
    let mut sup: Vec<f64> = (1..m).map(|i| h[i]).collect();
    let rhs: Vec<f64> = (1..=m).map(|i| interior_rhs(slope, i)).collect();

    let (h0, h1) = (h[0], h[1]);
    let (hl, hp) = (h[n - 2], h[n - 3]);
    // With m == 2 both modified rows share the same 2x2 block.
    diag[0] = (h0 + h1) * (h0 + 2.0 * h1) / h1;
    sup[0] = (h1 * h1 - h0 * h0) / h1;
    diag[m - 1] = (hl + hp) * (hl + 2.0 * hp) / hp;
    sub[m - 2] = (hp * hp - hl * hl) / hp;
    let inner = solve_tridiagonal(&sub, &diag, &sup, &rhs)?;
    let m0 = inner[0] + h0 * (inner[0] - inner[1]) / h1;
    let ml = inner[m - 1] + hl * (inner[m - 1] - inner[m - 2]) / hp;
    let mut moments = Vec::with_capacity(n);
    moments.push(m0);
    moments.extend(inner);
    moments.push(ml);
    Ok(moments)
}

fn periodic_moments(h: &[f64], slope: &[f64]) -> Result<Vec<f64>> {
    // Unknowns M[0..n-1) with M[n-1] = M[0]; row i couples i-1, i, i+1 cyclically.
    let intervals = h.len();
    let m = intervals;
    let prev = |i: usize| (i + m - 1) % m;
    let diag: Vec<f64> = (0..m).map(|i| 2.0 * (h[prev(i)] + h[i])).collect();
    let rhs: Vec<f64> = (0..m).map(|i| 6.0 * (slope[i] - slope[prev(i)])).collect();
    let inner = if m == 2 {
        // Both neighbours of each unknown are the other unknown.
        let coupling = h[0] + h[1];
        let det = diag[0] * diag[1] - coupling * coupling;
        if det.abs() <= f64::EPSILON * diag[0] * diag[1] {
            return Err(Error::ZeroPivot { row: 1 });
        }
        vec![
            (rhs[0] * diag[1] - coupling * rhs[1]) / det,
            (diag[0] * rhs[1] - coupling * rhs[0]) / det,
        ]
    } else {
        let sub: Vec<f64> = (1..m).map(|i| h[i - 1]).collect();
        let sup: Vec<f64> = (0..m - 1).map(|i| h[i]).collect();
        // A[m-1][0] = h[m-1] (next of last wraps to 0), A[0][m-1] = h[m-1] (prev of 0).
        solve_cyclic_tridiagonal(&sub, &diag, &sup, h[m - 1], h[m - 1], &rhs)?
    };
    let mut moments = inner;
    moments.push(moments[0]);
    Ok(moments)
}

/// Fills every missing slot of `series` by spline evaluation at its day offset.
///
/// Present values are copied unchanged. Returns the filled series and the
/// indices that were filled.
pub fn interpolate_missing(series: &TimeSeries, boundary: BoundaryCondition) -> Result<(TimeSeries, Vec<usize>)> {
    let (xs, ys): (Vec<f64>, Vec<f64>) = series
        .values
        .iter()
        .enumerate()
        .filter_map(|(i, v)| v.map(|v| (i as f64, v)))
        .unzip();
    if xs.len() < 2 {
        return Err(Error::TooShort {
            needed: 2,
            got: xs.len(),
        });
    }
    if series.values.first().is_some_and(Option::is_none) || series.values.last().is_some_and(Option::is_none) {
        return Err(Error::InvalidArgument(
            "first and last slots must be present (no extrapolation)".into(),
        ));
    }
    let missing = series.missing_indices();
    if missing.is_empty() {
        return Ok((series.clone(), missing));
    }
    let spline = fit_cubic_spline(&xs, &ys, boundary)?;
    let mut filled = series.clone();
    for &i in &missing {
        filled.values[i] = Some(spline.evaluate(i as f64)?);
    }
    Ok((filled, missing))
}

/// Writes `date,value,was_interpolated` for a gap-free series.
pub fn write_filled_csv<W: Write>(series: &TimeSeries, filled: &[usize], mut out: W) -> std::io::Result<()> {
    writeln!(out, "date,value,was_interpolated")?;
    let mut next = filled.iter().peekable();
    for (i, v) in series.values.iter().enumerate() {
        let flag = if next.peek() == Some(&&i) {
            next.next();
            1
        } else {
            0
        };
        let v = v.map(|v| v.to_string()).unwrap_or_default();
        writeln!(out, "{},{},{}", series.date_at(i).format(DATE_FORMAT), v, flag)?;
    }
    Ok(())
}
