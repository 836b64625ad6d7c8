//! Least-squares helpers.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    pub slope_se: f64,
    pub r2: f64,
}

pub fn line_fit(x: &[f64], y: &[f64]) -> Option<LineFit> {
    let n = x.len();
    if n < 2 || y.len() != n {
        return None;
    }
    let mx = x.iter().sum::<f64>() / n as f64;
    let my = y.iter().sum::<f64>() / n as f64;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    let mut syy = 0.0;
    for (a, b) in x.iter().zip(y) {
        sxx += (a - mx) * (a - mx);
        sxy += (a - mx) * (b - my);
        syy += (b - my) * (b - my);
    }
    if sxx == 0.0 {
        return None;
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let sse: f64 = x
        .iter()
        .zip(y)
        .map(|(a, b)| {
            let e = b - intercept - slope * a;
            e * e
        })
        .sum();
    let slope_se = if n > 2 {
        (sse / (n - 2) as f64 / sxx).sqrt()
    } else {
        0.0
    };
    let r2 = if syy > 0.0 { (1.0 - sse / syy).clamp(0.0, 1.0) } else { 1.0 };
    Some(LineFit { slope, intercept, slope_se, r2 })
}

/// Multiple regression via SVD least squares. Returns (coefficients, residuals).
pub fn ols(x: &DMatrix<f64>, y: &DVector<f64>) -> Option<(DVector<f64>, DVector<f64>)> {
    let svd = x.clone().svd(true, true);
    let beta = svd.solve(y, 1e-12).ok()?;
    let resid = y - x * &beta;
    Some((beta, resid))
}

/// Residuals of a polynomial fit of the given order on t = 0..n-1.
pub fn poly_detrend(y: &[f64], order: usize) -> Option<Vec<f64>> {
    let n = y.len();
    if order == 1 {
        let t: Vec<f64> = (0..n).map(|i| i as f64).collect();
        let f = line_fit(&t, y)?;
        return Some(
            y.iter()
                .enumerate()
                .map(|(i, v)| v - f.intercept - f.slope * i as f64)
                .collect(),
        );
    }
    let scale = (n.max(2) - 1) as f64;
    let x = DMatrix::from_fn(n, order + 1, |i, j| (i as f64 / scale).powi(j as i32));
    let (_, r) = ols(&x, &DVector::from_column_slice(y))?;
    Some(r.iter().copied().collect())
}
