//! Delay-coordinate reconstruction and the diagnostics used to pick (tau, m).

use crate::error::{need, Error, Result};
use crate::stats;
use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum EmbedMethod {
    MOD,
    SSA,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EmbeddingConfig {
    pub tau: usize,
    pub m: usize,
    pub method: EmbedMethod,
    /// Initial SSA window; ignored for MOD.
    pub p: usize,
}

/// Row-major matrix of reconstructed state vectors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryMatrix {
    pub data: Vec<f64>,
    pub rows: usize,
    pub m: usize,
}

impl TrajectoryMatrix {
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.m..(i + 1) * self.m]
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self.data[i * self.m + j]).collect()
    }
}

pub fn reconstruct_mod(x: &[f64], tau: usize, m: usize) -> Result<TrajectoryMatrix> {
    if tau == 0 || m == 0 {
        return Err(Error::InvalidInput("tau and m must be >= 1".into()));
    }
    let span = (m - 1) * tau;
    if x.len() <= span {
        return Err(Error::TooShort { need: span + 1, got: x.len() });
    }
    let rows = x.len() - span;
    let mut data = Vec::with_capacity(rows * m);
    for i in 0..rows {
        for k in 0..m {
            data.push(x[i + k * tau]);
        }
    }
    Ok(TrajectoryMatrix { data, rows, m })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SsaResult {
    pub matrix: TrajectoryMatrix,
    pub singular_values: Vec<f64>,
}

/// Projects the demeaned delay matrix (window p) onto its first m right singular vectors.
pub fn reconstruct_ssa(x: &[f64], p: usize, m: usize) -> Result<SsaResult> {
    if m > p || m == 0 {
        return Err(Error::InvalidInput(format!("need 1 <= m <= p, got m={m}, p={p}")));
    }
    need(x.len(), 2 * p)?;
    let mu = stats::mean(x);
    let d: Vec<f64> = x.iter().map(|v| v - mu).collect();
    let rows = x.len() - p + 1;
    let xm = DMatrix::from_fn(rows, p, |i, j| d[i + j]);
    let svd = xm.clone().svd(false, true);
    let vt = svd.v_t.ok_or_else(|| Error::Degenerate("SVD failed".into()))?;
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));
    let v = DMatrix::from_fn(p, m, |i, j| vt[(order[j], i)]);
    let proj = &xm * v;
    let mut data = Vec::with_capacity(rows * m);
    for i in 0..rows {
        for j in 0..m {
            data.push(proj[(i, j)]);
        }
    }
    Ok(SsaResult {
        matrix: TrajectoryMatrix { data, rows, m },
        singular_values: order.iter().map(|&k| svd.singular_values[k]).collect(),
    })
}

/// First lag with non-positive autocorrelation, searched up to N/4.
pub fn acf_first_zero(x: &[f64]) -> Result<Option<usize>> {
    need(x.len(), 20)?;
    let lim = x.len() / 4;
    let r = stats::acf(x, lim);
    if !r[0].is_finite() {
        return Err(Error::Degenerate("constant series".into()));
    }
    Ok((1..r.len()).find(|&k| r[k] <= 1e-10))
}

pub fn default_bins(n: usize) -> usize {
    ((n as f64).cbrt().ceil() as usize).max(4)
}

fn bin_index(v: f64, lo: f64, width: f64, bins: usize) -> usize {
    if width == 0.0 {
        return 0;
    }
    (((v - lo) / width) as usize).min(bins - 1)
}

fn entropy2(counts: &mut [u64], total: u64) -> f64 {
    counts.sort_unstable();
    let t = total as f64;
    counts
        .iter()
        .filter(|&&c| c > 0)
        .map(|&c| {
            let p = c as f64 / t;
            -p * p.log2()
        })
        .sum()
}

/// Mutual information in bits between two equally long sequences using a shared
/// equal-width grid of `bins` cells over [lo, hi].
pub fn mutual_information(a: &[f64], b: &[f64], lo: f64, hi: f64, bins: usize) -> f64 {
    let width = (hi - lo) / bins as f64;
    let n = a.len() as u64;
    let mut ja = vec![0u64; bins];
    let mut jb = vec![0u64; bins];
    let mut joint = vec![0u64; bins * bins];
    for (&u, &v) in a.iter().zip(b) {
        let i = bin_index(u, lo, width, bins);
        let j = bin_index(v, lo, width, bins);
        ja[i] += 1;
        jb[j] += 1;
        joint[i * bins + j] += 1;
    }
    let h = entropy2(&mut ja, n) + entropy2(&mut jb, n) - entropy2(&mut joint, n);
    h.max(0.0)
}

/// I(tau) for tau = 0..=max_tau, in bits.
pub fn ami(x: &[f64], max_tau: usize, bins: Option<usize>) -> Result<Vec<f64>> {
    need(x.len(), 200)?;
    let bins = bins.unwrap_or_else(|| default_bins(x.len()));
    if bins < 4 {
        return Err(Error::InvalidInput("bins must be >= 4".into()));
    }
    if max_tau >= x.len() {
        return Err(Error::InvalidInput("max_tau exceeds series length".into()));
    }
    let lo = x.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = x.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok((0..=max_tau)
        .map(|t| mutual_information(&x[..x.len() - t], &x[t..], lo, hi, bins))
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AmiMinimum {
    pub tau: usize,
    pub no_minimum: bool,
    pub curve: Vec<f64>,
}

pub fn ami_first_min(x: &[f64], max_tau: usize, bins: Option<usize>) -> Result<AmiMinimum> {
    let curve = ami(x, max_tau, bins)?;
    let found = (1..curve.len().saturating_sub(1)).find(|&t| curve[t] < curve[t - 1] && curve[t] <= curve[t + 1]);
    Ok(match found {
        Some(tau) => AmiMinimum { tau, no_minimum: false, curve },
        None => AmiMinimum { tau: max_tau, no_minimum: true, curve },
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FnnParams {
    pub rtol: f64,
    pub atol: f64,
    pub threshold: f64,
}

impl Default for FnnParams {
    fn default() -> Self {
        FnnParams { rtol: 15.0, atol: 2.0, threshold: 0.01 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FnnResult {
    pub m_star: Option<usize>,
    /// fractions[k] is the false-neighbour fraction at m = k + 1.
    pub fractions: Vec<f64>,
    pub noise_dominated: bool,
}

/// Nearest neighbour of row i (Euclidean), ties to the smaller index.
fn nearest(data: &[f64], rows: usize, m: usize, i: usize) -> Option<(usize, f64)> {
    let xi = &data[i * m..(i + 1) * m];
    let mut best: Option<(usize, f64)> = None;
    for j in 0..rows {
        if j == i {
            continue;
        }
        let xj = &data[j * m..(j + 1) * m];
        let d2: f64 = xi.iter().zip(xj).map(|(a, b)| (a - b) * (a - b)).sum();
        if best.map_or(true, |(_, b)| d2 < b) {
            best = Some((j, d2));
        }
    }
    best
}

/// Fraction of false nearest neighbours for one dimension m.
pub fn fnn_fraction(x: &[f64], tau: usize, m: usize, p: FnnParams) -> Result<f64> {
    let span = m * tau;
    if x.len() <= span + 1 {
        return Err(Error::TooShort { need: span + 2, got: x.len() });
    }
    let rows = x.len() - span;
    let tm = reconstruct_mod(&x[..rows + (m - 1) * tau], tau, m)?;
    let ra = stats::sd(x);
    let mut false_n = 0usize;
    for i in 0..rows {
        let (j, d2) = nearest(&tm.data, rows, m, i).ok_or_else(|| Error::Degenerate("no neighbours".into()))?;
        let ext = (x[i + span] - x[j + span]).abs();
        let rm = d2.sqrt();
        let ratio_false = if rm > 0.0 { ext / rm > p.rtol } else { ext > 0.0 };
        let lonely = ((d2 + ext * ext).sqrt() / ra) > p.atol;
        if ratio_false || lonely {
            false_n += 1;
        }
    }
    Ok(false_n as f64 / rows as f64)
}

pub fn fnn(x: &[f64], tau: usize, max_m: usize, params: FnnParams) -> Result<FnnResult> {
    need(x.len(), 500)?;
    let fractions = (1..=max_m)
        .map(|m| fnn_fraction(x, tau, m, params))
        .collect::<Result<Vec<_>>>()?;
    let m_star = fractions.iter().position(|&f| f < params.threshold).map(|k| k + 1);
    Ok(FnnResult { m_star, noise_dominated: m_star.is_none(), fractions })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mod_shapes() {
        let x: Vec<f64> = (1..=10).map(|v| v as f64).collect();
        let t = reconstruct_mod(&x, 2, 3).unwrap();
        assert_eq!(t.rows, 6);
        assert_eq!(t.row(0), &[1.0, 3.0, 5.0]);
        let t = reconstruct_mod(&x, 1, 1).unwrap();
        assert_eq!(t.data, x);
        let t = reconstruct_mod(&x[..5], 2, 3).unwrap();
        assert_eq!(t.rows, 1);
        assert!(reconstruct_mod(&x[..4], 2, 3).is_err());
    }

    #[test]
    fn cosine_quarter_period() {
        let x: Vec<f64> = (0..200).map(|t| (2.0 * std::f64::consts::PI * t as f64 / 20.0).cos()).collect();
        assert_eq!(acf_first_zero(&x).unwrap(), Some(5));
        assert!(acf_first_zero(&[1.0; 40]).is_err());
    }

    #[test]
    fn positive_acf_has_no_zero() {
        let ramp: Vec<f64> = (0..200).map(|t| t as f64).collect();
        assert_eq!(acf_first_zero(&ramp).unwrap(), None);
    }

    #[test]
    fn self_information_is_entropy() {
        let x = crate::synth::normals(1000, 5);
        let c = ami(&x, 3, Some(10)).unwrap();
        assert!(c.iter().all(|&v| v >= 0.0));
        assert!(c[0] > c[1] && c[0] > c[2]);
    }

    #[test]
    fn ssa_sinusoid_rank_two() {
        let x: Vec<f64> = (0..400).map(|t| (2.0 * std::f64::consts::PI * t as f64 / 20.0).sin()).collect();
        let s = reconstruct_ssa(&x, 10, 10).unwrap();
        assert!(s.singular_values.windows(2).all(|w| w[0] >= w[1]));
        assert!(s.singular_values[2] / s.singular_values[0] < 1e-6);
        assert!(reconstruct_ssa(&x, 5, 6).is_err());
    }
}
