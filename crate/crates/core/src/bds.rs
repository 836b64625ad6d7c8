//! BDS test of the i.i.d. null from correlation integrals.

use crate::embedding::TrajectoryMatrix;
use crate::error::{need, Error, Result};
use crate::stats;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Norm {
    #[default]
    Max,
    Euclidean,
}

fn dist(a: &[f64], b: &[f64], norm: Norm) -> f64 {
    match norm {
        Norm::Max => a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max),
        Norm::Euclidean => a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt(),
    }
}

/// Number of pairs i<j with distance strictly below epsilon.
pub fn pair_count(matrix: &TrajectoryMatrix, epsilon: f64, norm: Norm) -> u64 {
    let mut c = 0u64;
    for i in 0..matrix.rows {
        let a = matrix.row(i);
        for j in i + 1..matrix.rows {
            if dist(a, matrix.row(j), norm) < epsilon {
                c += 1;
            }
        }
    }
    c
}

/// C = 2 * #close pairs / (M (M - 1)).
pub fn correlation_integral(matrix: &TrajectoryMatrix, epsilon: f64, norm: Norm) -> Result<f64> {
    need(matrix.rows, 2)?;
    if !(epsilon > 0.0) {
        return Err(Error::InvalidInput("epsilon must be positive".into()));
    }
    let m = matrix.rows as f64;
    Ok(2.0 * pair_count(matrix, epsilon, norm) as f64 / (m * (m - 1.0)))
}

fn degrees(x: &[f64], epsilon: f64) -> Vec<u64> {
    let n = x.len();
    let mut deg = vec![0u64; n];
    for i in 0..n {
        for j in i + 1..n {
            if (x[i] - x[j]).abs() < epsilon {
                deg[i] += 1;
                deg[j] += 1;
            }
        }
    }
    deg
}

/// Fraction of ordered triples (i, j, k), all distinct, with j close to both i and k.
pub fn k_statistic(x: &[f64], epsilon: f64) -> Result<f64> {
    need(x.len(), 3)?;
    let n = x.len() as f64;
    let s: u64 = degrees(x, epsilon).iter().map(|&d| d * d.saturating_sub(1)).sum();
    Ok(s as f64 / (n * (n - 1.0) * (n - 2.0)))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BdsDimension {
    pub m: usize,
    #[serde(rename = "W")]
    pub w: f64,
    /// C(N, m, eps) over the N - m + 1 embedded points.
    pub c_m: f64,
    /// C(N, 1, eps)^m on the matching last N - m + 1 observations.
    pub c1_pow_m: f64,
    pub sigma_hat: f64,
    pub p_value: f64,
    pub close_pairs: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BdsResult {
    pub dims: Vec<BdsDimension>,
    pub epsilon: f64,
    pub n: usize,
    pub c1: f64,
    pub k: f64,
    pub norm: Norm,
}

impl BdsResult {
    /// Family-wise decision over all dimensions at level alpha (Bonferroni).
    pub fn rejects(&self, alpha: f64) -> bool {
        let a = alpha / self.dims.len() as f64;
        self.dims.iter().any(|d| d.p_value < a)
    }

    pub fn min_p(&self) -> f64 {
        self.dims.iter().map(|d| d.p_value).fold(1.0, f64::min)
    }
}

/// Variance term: K^m + 2 sum_{j=1}^{m-1} K^{m-j} C^{2j} + (m-1)^2 C^{2m} - m^2 K C^{2m-2}.
pub fn bds_variance(k: f64, c: f64, m: usize) -> f64 {
    let mf = m as f64;
    let mut s = k.powi(m as i32);
    for j in 1..m {
        s += 2.0 * k.powi((m - j) as i32) * c.powi(2 * j as i32);
    }
    s + (mf - 1.0).powi(2) * c.powi(2 * m as i32) - mf * mf * k * c.powi(2 * m as i32 - 2)
}

pub fn bds_test(x: &[f64], m_max: usize, eps_multiple: f64) -> Result<BdsResult> {
    bds_test_with(x, m_max, eps_multiple, Norm::Max)
}

pub fn bds_test_with(x: &[f64], m_max: usize, eps_multiple: f64, norm: Norm) -> Result<BdsResult> {
    if m_max < 2 {
        return Err(Error::InvalidInput("m_max must be >= 2".into()));
    }
    need(x.len(), m_max + 3)?;
    let sd = stats::sd(x);
    if !(sd > 0.0) {
        return Err(Error::Degenerate("zero-variance series".into()));
    }
    let epsilon = eps_multiple * sd;
    let n = x.len();
    let deg = degrees(x, epsilon);
    let nf = n as f64;
    let total_pairs: u64 = deg.iter().sum::<u64>() / 2;
    let c1 = 2.0 * total_pairs as f64 / (nf * (nf - 1.0));
    let k = deg.iter().map(|&d| d * d.saturating_sub(1)).sum::<u64>() as f64 / (nf * (nf - 1.0) * (nf - 2.0));

    // close[m] counts pairs of m-histories; trunc[m] counts scalar pairs among the last N-m+1 points
    let mut close = vec![0u64; m_max + 1];
    let mut trunc = vec![0u64; m_max + 1];
    let mut run = vec![0usize; n];
    for d in 1..n {
        let len = n - d;
        let mut r = 0usize;
        for i in (0..len).rev() {
            r = if (x[i] - x[i + d]).abs() < epsilon { r + 1 } else { 0 };
            run[i] = r;
        }
        for m in 2..=m_max {
            if len < m {
                break;
            }
            // history pairs start at i with i + d + m - 1 <= n - 1
            close[m] += run[..=len - m].iter().filter(|&&r| r >= m).count() as u64;
            trunc[m] += run[m - 1..len].iter().filter(|&&r| r >= 1).count() as u64;
        }
    }
    if norm == Norm::Euclidean {
        for m in 2..=m_max {
            let tm = crate::embedding::reconstruct_mod(x, 1, m)?;
            close[m] = pair_count(&tm, epsilon, norm);
        }
    }
    let s_dist = statrs::distribution::Normal::standard();
    let dims = (2..=m_max)
        .map(|m| {
            let mm = (n - m + 1) as f64;
            let denom = mm * (mm - 1.0) / 2.0;
            let c_m = close[m] as f64 / denom;
            let c1_pow_m = (trunc[m] as f64 / denom).powi(m as i32);
            let v = bds_variance(k, c1, m);
            let sigma_hat = 2.0 * v.max(0.0).sqrt();
            let w = if sigma_hat > 0.0 { mm.sqrt() * (c_m - c1_pow_m) / sigma_hat } else { f64::NAN };
            let p_value = if w.is_finite() {
                use statrs::distribution::ContinuousCDF;
                (2.0 * s_dist.sf(w.abs())).min(1.0)
            } else {
                f64::NAN
            };
            BdsDimension { m, w, c_m, c1_pow_m, sigma_hat, p_value, close_pairs: close[m] }
        })
        .collect();
    Ok(BdsResult { dims, epsilon, n, c1, k, norm })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::embedding::reconstruct_mod;

    #[test]
    fn integral_examples() {
        let same = TrajectoryMatrix { data: vec![1.0, 2.0, 1.0, 2.0], rows: 2, m: 2 };
        assert_eq!(correlation_integral(&same, 0.1, Norm::Max).unwrap(), 1.0);
        let far = TrajectoryMatrix { data: vec![0.0, 10.0], rows: 2, m: 1 };
        assert_eq!(correlation_integral(&far, 1.0, Norm::Max).unwrap(), 0.0);
        let line = TrajectoryMatrix { data: vec![0.0, 1.0, 2.0], rows: 3, m: 1 };
        assert!((correlation_integral(&line, 1.5, Norm::Max).unwrap() - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn k_examples() {
        assert_eq!(k_statistic(&[3.0; 10], 0.1).unwrap(), 1.0);
        assert_eq!(k_statistic(&[0.0, 10.0, 20.0, 30.0], 1.0).unwrap(), 0.0);
    }

    #[test]
    fn run_length_counts_match_brute_force() {
        let x = crate::synth::normals(300, 9);
        let r = bds_test(&x, 5, 0.7).unwrap();
        for d in &r.dims {
            let tm = reconstruct_mod(&x, 1, d.m).unwrap();
            assert_eq!(d.close_pairs, pair_count(&tm, r.epsilon, Norm::Max));
        }
    }

    #[test]
    fn variance_positive_at_m2() {
        for &(k, c) in &[(0.2, 0.4), (0.05, 0.2), (0.5, 0.7)] {
            if k >= c * c {
                assert!(bds_variance(k, c, 2) >= 0.0);
            }
        }
    }

    #[test]
    fn logistic_rejects() {
        let x = crate::synth::logistic(4.0, 2000, 1);
        let r = bds_test(&x, 6, 0.5).unwrap();
        assert!(r.dims.iter().all(|d| d.p_value < 1e-6));
    }

    #[test]
    fn matches_reference_implementation() {
        // statsmodels.tsa.stattools.bds on the same deterministic series
        let x: Vec<f64> = (0..400)
            .map(|t| {
                let t = t as f64;
                (t * 1.7).sin() + (t * 0.3).cos().powi(3) + 0.5 * (t * t * 0.01).sin()
            })
            .collect();
        let want = [-0.0008108398468019597, 5.392420203775069, 19.68474388930373, 37.083292255166654, 71.18187480190842];
        let r = bds_test(&x, 6, 0.5).unwrap();
        for (d, w) in r.dims.iter().zip(want) {
            assert!((d.w - w).abs() < 1e-9 * w.abs().max(1.0), "m={}: {} vs {}", d.m, d.w, w);
        }
    }

    #[test]
    fn constant_series_errors() {
        assert!(bds_test(&[1.0; 100], 3, 0.5).is_err());
    }
}
