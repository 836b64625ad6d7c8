//! Long-memory exponent estimators and the conversions between them.

use crate::error::{need, Error, Result};
use crate::regress::{line_fit, poly_detrend, LineFit};
use crate::spectral::periodogram;
use crate::stats;
use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Method {
    RS,
    RSAnisLloyd,
    DFA,
    GHE,
    WGHE,
    GPH,
    Spectral,
    ACF,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HurstEstimate {
    pub method: Method,
    #[serde(rename = "H")]
    pub h: f64,
    /// alpha for DFA, beta for Spectral, delta for ACF, d for GPH, H(q) for GHE.
    pub raw_exponent: f64,
    pub stderr: f64,
    pub r2: f64,
    pub grid: Vec<f64>,
    pub points: Vec<FitPoint>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub q: Option<f64>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub flags: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitPoint {
    pub log_x: f64,
    pub log_y: f64,
}

fn points(lx: &[f64], ly: &[f64]) -> Vec<FitPoint> {
    lx.iter().zip(ly).map(|(&log_x, &log_y)| FitPoint { log_x, log_y }).collect()
}

fn fit(lx: &[f64], ly: &[f64]) -> Result<LineFit> {
    line_fit(lx, ly).ok_or_else(|| Error::Degenerate("log-log regression needs two distinct x".into()))
}

/// Log-spaced window sizes between `lo` and `hi`, at least 10 requested points.
pub fn default_grid(n: usize) -> Vec<usize> {
    log_grid(8, n / 4)
}

pub fn log_grid(lo: usize, hi: usize) -> Vec<usize> {
    if hi <= lo {
        return vec![lo];
    }
    let oct = (hi as f64 / lo as f64).log2();
    let npts = ((2.0 * oct) as usize + 1).max(10);
    let (a, b) = ((lo as f64).ln(), (hi as f64).ln());
    let mut g: Vec<usize> = (0..npts)
        .map(|i| (a + (b - a) * i as f64 / (npts - 1) as f64).exp().round() as usize)
        .collect();
    g.dedup();
    g
}

/// Mean rescaled range over the floor(N/n) non-overlapping blocks of length n.
/// Blocks with zero standard deviation are skipped; None if all are.
pub fn rescaled_range(x: &[f64], n: usize) -> Option<f64> {
    let mut acc = 0.0;
    let mut used = 0usize;
    for b in x.chunks_exact(n) {
        let m = stats::mean(b);
        let (mut y, mut lo, mut hi) = (0.0, 0.0f64, 0.0f64);
        let mut ss = 0.0;
        for v in b {
            let d = v - m;
            y += d;
            lo = lo.min(y);
            hi = hi.max(y);
            ss += d * d;
        }
        let s = (ss / (n - 1) as f64).sqrt();
        if s > 0.0 {
            acc += (hi - lo) / s;
            used += 1;
        }
    }
    (used > 0).then(|| acc / used as f64)
}

/// Expected R/S of white noise (Anis-Lloyd with the Peters small-sample factor).
pub fn rs_expected(n: usize) -> Result<f64> {
    if n < 2 {
        return Err(Error::InvalidInput("rs_expected needs n >= 2".into()));
    }
    let nf = n as f64;
    let s: f64 = (1..n).map(|i| ((nf - i as f64) / i as f64).sqrt()).sum();
    let f = (nf - 0.5) / nf;
    let lead = if n <= 340 {
        (ln_gamma((nf - 1.0) / 2.0) - ln_gamma(nf / 2.0)).exp() / std::f64::consts::PI.sqrt()
    } else {
        1.0 / (nf * std::f64::consts::PI / 2.0).sqrt()
    };
    Ok(f * lead * s)
}

fn rs_points(x: &[f64], grid: &[usize]) -> Result<(Vec<f64>, Vec<f64>, Vec<String>)> {
    need(x.len(), 64)?;
    let mut lx = Vec::new();
    let mut ly = Vec::new();
    let mut flags = Vec::new();
    for &n in grid {
        if n < 3 || n > x.len() {
            return Err(Error::InvalidInput(format!("window {n} outside 3..={}", x.len())));
        }
        match rescaled_range(x, n) {
            Some(v) => {
                lx.push(n as f64);
                ly.push(v);
            }
            None => flags.push(format!("window {n} dropped: all blocks constant")),
        }
    }
    Ok((lx, ly, flags))
}

pub fn rs_hurst(x: &[f64], grid: Option<&[usize]>) -> Result<HurstEstimate> {
    let g = grid.map(|g| g.to_vec()).unwrap_or_else(|| default_grid(x.len()));
    let (n, rs, flags) = rs_points(x, &g)?;
    let lx: Vec<f64> = n.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = rs.iter().map(|v| v.ln()).collect();
    let f = fit(&lx, &ly)?;
    Ok(HurstEstimate {
        method: Method::RS,
        h: f.slope,
        raw_exponent: f.slope,
        stderr: f.slope_se,
        r2: f.r2,
        grid: n,
        points: points(&lx, &ly),
        q: None,
        flags,
    })
}

pub fn rs_hurst_corrected(x: &[f64], grid: Option<&[usize]>) -> Result<HurstEstimate> {
    let g = grid.map(|g| g.to_vec()).unwrap_or_else(|| default_grid(x.len()));
    let (n, rs, flags) = rs_points(x, &g)?;
    let lx: Vec<f64> = n.iter().map(|v| v.ln()).collect();
    let ly = n
        .iter()
        .zip(&rs)
        .map(|(&k, v)| Ok(v.ln() - rs_expected(k as usize)?.ln()))
        .collect::<Result<Vec<f64>>>()?;
    let f = fit(&lx, &ly)?;
    Ok(HurstEstimate {
        method: Method::RSAnisLloyd,
        h: 0.5 + f.slope,
        raw_exponent: f.slope,
        stderr: f.slope_se,
        r2: f.r2,
        grid: n,
        points: points(&lx, &ly),
        q: None,
        flags,
    })
}

/// Mean per-window RMS fluctuation of the profile after polynomial detrending.
pub fn dfa_fluctuation(profile: &[f64], n: usize, order: usize) -> Result<f64> {
    let mut acc = 0.0;
    let mut cnt = 0usize;
    for b in profile.chunks_exact(n) {
        let r = poly_detrend(b, order).ok_or_else(|| Error::Degenerate(format!("detrend failed at n={n}")))?;
        acc += (r.iter().map(|e| e * e).sum::<f64>() / n as f64).sqrt();
        cnt += 1;
    }
    if cnt == 0 {
        return Err(Error::InvalidInput(format!("window {n} longer than series")));
    }
    Ok(acc / cnt as f64)
}

pub fn dfa(x: &[f64], grid: Option<&[usize]>, detrend_order: usize) -> Result<HurstEstimate> {
    need(x.len(), 100)?;
    let g = grid.map(|g| g.to_vec()).unwrap_or_else(|| default_grid(x.len()));
    let m = stats::mean(x);
    let profile: Vec<f64> = stats::cumsum(&x.iter().map(|v| v - m).collect::<Vec<_>>());
    let mut lx = Vec::new();
    let mut ly = Vec::new();
    for &n in &g {
        if n < detrend_order + 2 {
            return Err(Error::InvalidInput(format!("window {n} too small for detrend order {detrend_order}")));
        }
        let f = dfa_fluctuation(&profile, n, detrend_order)?;
        if f <= 0.0 {
            return Err(Error::Degenerate(format!("zero fluctuation at n={n}")));
        }
        lx.push((n as f64).ln());
        ly.push(f.ln());
    }
    let f = fit(&lx, &ly)?;
    let alpha = f.slope;
    let mut flags = Vec::new();
    let h = if alpha > 1.0 {
        flags.push("non_stationary".to_string());
        alpha - 1.0
    } else {
        alpha
    };
    Ok(HurstEstimate {
        method: Method::DFA,
        h,
        raw_exponent: alpha,
        stderr: f.slope_se,
        r2: f.r2,
        grid: g.iter().map(|&v| v as f64).collect(),
        points: points(&lx, &ly),
        q: None,
        flags,
    })
}

fn ghe_from_k(k: &[f64], q: f64, tau_max_range: &[usize]) -> Result<(f64, f64, f64, Vec<f64>, Vec<f64>)> {
    let mut hs = Vec::new();
    let mut r2s = Vec::new();
    for &tm in tau_max_range {
        let lx: Vec<f64> = (1..=tm).map(|t| (t as f64).ln()).collect();
        let ly: Vec<f64> = k[..tm].iter().map(|v| v.ln()).collect();
        let f = fit(&lx, &ly)?;
        hs.push(f.slope / q);
        r2s.push(f.r2);
    }
    let h = stats::mean(&hs);
    let se = if hs.len() > 1 { stats::sd(&hs) } else { 0.0 };
    let tm = *tau_max_range.iter().max().unwrap();
    let lx: Vec<f64> = (1..=tm).map(|t| (t as f64).ln()).collect();
    let ly: Vec<f64> = k[..tm].iter().map(|v| v.ln()).collect();
    Ok((h, se, stats::mean(&r2s), lx, ly))
}

pub const DEFAULT_TAU_MAX: std::ops::RangeInclusive<usize> = 5..=19;

fn check_ghe_args(len: usize, q: f64, tau_max_range: &[usize]) -> Result<usize> {
    if q <= 0.0 {
        return Err(Error::InvalidInput("q must be positive".into()));
    }
    if tau_max_range.is_empty() || tau_max_range.iter().any(|&t| t < 5) {
        return Err(Error::InvalidInput("tau_max values must be >= 5".into()));
    }
    let tm = *tau_max_range.iter().max().unwrap();
    if tm >= len {
        return Err(Error::InvalidInput(format!("tau_max {tm} too large for length {len}")));
    }
    Ok(tm)
}

/// Generalized Hurst exponent on price levels, one estimate per q.
pub fn ghe(prices: &[f64], q_list: &[f64], tau_max_range: &[usize]) -> Result<Vec<HurstEstimate>> {
    need(prices.len(), 100)?;
    q_list
        .iter()
        .map(|&q| {
            let tm = check_ghe_args(prices.len(), q, tau_max_range)?;
            let denom = prices.iter().map(|v| v.abs().powf(q)).sum::<f64>() / prices.len() as f64;
            if denom == 0.0 {
                return Err(Error::Degenerate("all-zero series".into()));
            }
            let k: Vec<f64> = (1..=tm)
                .map(|t| {
                    let s: f64 = prices[t..].iter().zip(prices).map(|(a, b)| (a - b).abs().powf(q)).sum();
                    s / (prices.len() - t) as f64 / denom
                })
                .collect();
            if k.iter().any(|&v| v <= 0.0) {
                return Err(Error::Degenerate("zero increment moment".into()));
            }
            let (h, se, r2, lx, ly) = ghe_from_k(&k, q, tau_max_range)?;
            Ok(HurstEstimate {
                method: Method::GHE,
                h,
                raw_exponent: h,
                stderr: se,
                r2,
                grid: tau_max_range.iter().map(|&v| v as f64).collect(),
                points: points(&lx, &ly),
                q: Some(q),
                flags: vec![],
            })
        })
        .collect()
}

/// The (q, q*H(q)) curve.
pub fn ghe_scaling_curve(est: &[HurstEstimate]) -> Vec<(f64, f64)> {
    est.iter().filter_map(|e| e.q.map(|q| (q, q * e.h))).collect()
}

/// Exponential weights w_s = w0 exp(-s/theta), s = 0..dt-1, summing to one.
pub fn wghe_weights(theta: f64, dt: usize) -> Vec<f64> {
    if theta.is_infinite() {
        return vec![1.0 / dt as f64; dt];
    }
    let r = (-1.0 / theta).exp();
    let w0 = (-1.0 / theta).exp_m1() / (-(dt as f64) / theta).exp_m1();
    (0..dt).map(|s| w0 * r.powi(s as i32)).collect()
}

/// Weighted GHE on the last `delta_t` points of `prices`.
pub fn wghe(prices: &[f64], q: f64, theta: f64, delta_t: usize, tau_max_range: &[usize]) -> Result<HurstEstimate> {
    if !(theta > 0.0) {
        return Err(Error::InvalidInput("theta must be positive".into()));
    }
    if delta_t > prices.len() || delta_t < 2 {
        return Err(Error::InvalidInput(format!("delta_t {delta_t} outside 2..={}", prices.len())));
    }
    let tm = check_ghe_args(delta_t, q, tau_max_range)?;
    let win = &prices[prices.len() - delta_t..];
    let w = wghe_weights(theta, delta_t);
    // s counts back from the window end
    let at = |s: usize| win[delta_t - 1 - s];
    let denom: f64 = (0..delta_t).map(|s| w[s] * at(s).abs().powf(q)).sum();
    if denom == 0.0 {
        return Err(Error::Degenerate("all-zero window".into()));
    }
    let k: Vec<f64> = (1..=tm)
        .map(|t| {
            let (mut num, mut ws) = (0.0, 0.0);
            for s in 0..delta_t - t {
                num += w[s] * (at(s) - at(s + t)).abs().powf(q);
                ws += w[s];
            }
            num / ws / denom
        })
        .collect();
    if k.iter().any(|&v| v <= 0.0) {
        return Err(Error::Degenerate("zero increment moment".into()));
    }
    let (h, se, r2, lx, ly) = ghe_from_k(&k, q, tau_max_range)?;
    Ok(HurstEstimate {
        method: Method::WGHE,
        h,
        raw_exponent: h,
        stderr: se,
        r2,
        grid: tau_max_range.iter().map(|&v| v as f64).collect(),
        points: points(&lx, &ly),
        q: Some(q),
        flags: vec![],
    })
}

/// Log-periodogram regression over the first floor(N^k_exponent) Fourier frequencies.
pub fn gph(x: &[f64], k_exponent: f64) -> Result<HurstEstimate> {
    need(x.len(), 128)?;
    let k = (x.len() as f64).powf(k_exponent).floor() as usize;
    if k < 4 {
        return Err(Error::InvalidInput(format!("K = {k} < 4")));
    }
    let (w, i) = periodogram(x);
    let k = k.min(w.len());
    let lx: Vec<f64> = w[..k].iter().map(|w| -(4.0 * (w / 2.0).sin().powi(2)).ln()).collect();
    if i[..k].iter().any(|&v| v <= 0.0) {
        return Err(Error::Degenerate("zero periodogram ordinate".into()));
    }
    let ly: Vec<f64> = i[..k].iter().map(|v| v.ln()).collect();
    let f = fit(&lx, &ly)?;
    let mx = stats::mean(&lx);
    let sxx: f64 = lx.iter().map(|v| (v - mx) * (v - mx)).sum();
    Ok(HurstEstimate {
        method: Method::GPH,
        h: 0.5 + f.slope,
        raw_exponent: f.slope,
        stderr: (std::f64::consts::PI.powi(2) / (6.0 * sxx)).sqrt(),
        r2: f.r2,
        grid: vec![k as f64],
        points: points(&lx, &ly),
        q: None,
        flags: vec![],
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpectralRegime {
    FgnRange,
    FbmRange,
    Neither,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralResult {
    pub beta: f64,
    pub h_fgn: f64,
    pub h_fbm: f64,
    pub regime: SpectralRegime,
    pub estimate: HurstEstimate,
}

pub fn spectral_regime(beta: f64) -> SpectralRegime {
    if (-1.0..=1.0).contains(&beta) {
        SpectralRegime::FgnRange
    } else if beta > 1.0 && beta <= 3.0 {
        SpectralRegime::FbmRange
    } else {
        SpectralRegime::Neither
    }
}

pub fn spectral_beta(x: &[f64]) -> Result<SpectralResult> {
    need(x.len(), 256)?;
    let (w, i) = periodogram(x);
    let keep: Vec<usize> = (0..w.len()).filter(|&k| i[k] > 0.0).collect();
    let lx: Vec<f64> = keep.iter().map(|&k| w[k].ln()).collect();
    let ly: Vec<f64> = keep.iter().map(|&k| i[k].ln()).collect();
    let f = fit(&lx, &ly)?;
    let beta = -f.slope;
    let h_fgn = (beta + 1.0) / 2.0;
    let regime = spectral_regime(beta);
    Ok(SpectralResult {
        beta,
        h_fgn,
        h_fbm: (beta - 1.0) / 2.0,
        regime,
        estimate: HurstEstimate {
            method: Method::Spectral,
            h: if regime == SpectralRegime::FbmRange { (beta - 1.0) / 2.0 } else { h_fgn },
            raw_exponent: beta,
            stderr: f.slope_se,
            r2: f.r2,
            grid: vec![w.len() as f64],
            points: points(&lx, &ly),
            q: None,
            flags: vec![],
        },
    })
}

/// Power-law fit of the positive sample ACF: delta = -slope, H = 1 - delta/2.
pub fn acf_hurst(x: &[f64], max_lag: usize) -> Result<HurstEstimate> {
    if max_lag < 10 {
        return Err(Error::InvalidInput("max_lag must be >= 10".into()));
    }
    need(x.len(), max_lag + 2)?;
    let r = stats::acf(x, max_lag);
    if !r[0].is_finite() {
        return Err(Error::Degenerate("constant series".into()));
    }
    let (lx, ly): (Vec<f64>, Vec<f64>) = (1..r.len())
        .filter(|&k| r[k] > 0.0)
        .map(|k| ((k as f64).ln(), r[k].ln()))
        .unzip();
    if lx.len() < 5 {
        return Err(Error::Inapplicable(format!("only {} positive ACF lags", lx.len())));
    }
    let f = fit(&lx, &ly)?;
    let delta = -f.slope;
    Ok(HurstEstimate {
        method: Method::ACF,
        h: 1.0 - delta / 2.0,
        raw_exponent: delta,
        stderr: f.slope_se / 2.0,
        r2: f.r2,
        grid: (1..=max_lag).map(|v| v as f64).collect(),
        points: points(&lx, &ly),
        q: None,
        flags: vec![],
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Exponent {
    Alpha(f64),
    Beta(f64),
    Delta(f64),
    H(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Exponents {
    pub alpha: f64,
    pub beta: f64,
    pub delta: f64,
    #[serde(rename = "H")]
    pub h: f64,
    #[serde(rename = "D")]
    pub d: f64,
}

/// Stationary-case conversions: beta = 2 alpha - 1, delta = 2 - 2 alpha, H = alpha, D = 2 - H.
pub fn exponent_relations(e: Exponent) -> Exponents {
    let alpha = match e {
        Exponent::Alpha(a) => a,
        Exponent::Beta(b) => (b + 1.0) / 2.0,
        Exponent::Delta(d) => 1.0 - d / 2.0,
        Exponent::H(h) => h,
    };
    let beta = match e {
        Exponent::Beta(b) => b,
        Exponent::Delta(d) => 1.0 - d,
        _ => 2.0 * alpha - 1.0,
    };
    let delta = match e {
        Exponent::Delta(d) => d,
        Exponent::Beta(b) => 1.0 - b,
        _ => 2.0 - 2.0 * alpha,
    };
    Exponents { alpha, beta, delta, h: alpha, d: 2.0 - alpha }
}

pub fn hurst_distance(h: f64) -> f64 {
    (h - 0.5).abs()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Persistence {
    AntiPersistent,
    RandomWalk,
    Persistent,
}

impl Persistence {
    pub fn describe(self) -> &'static str {
        match self {
            Persistence::AntiPersistent => "anti-persistent (mean reverting)",
            Persistence::RandomWalk => "indistinguishable from random walk",
            Persistence::Persistent => "persistent",
        }
    }
}

pub const RANDOM_WALK_BAND: f64 = 0.05;

pub fn classify(h: f64) -> Persistence {
    if (h - 0.5).abs() <= RANDOM_WALK_BAND {
        Persistence::RandomWalk
    } else if h < 0.5 {
        Persistence::AntiPersistent
    } else {
        Persistence::Persistent
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_shape() {
        let g = default_grid(8192);
        assert_eq!(g[0], 8);
        assert_eq!(*g.last().unwrap(), 2048);
        assert!(g.len() >= 10);
        assert!(g.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn rs_expected_branches() {
        let a = rs_expected(340).unwrap();
        let b = rs_expected(341).unwrap();
        assert!((b / a - 1.0).abs() < 0.02);
        assert!(rs_expected(1).is_err());
        for range in [2..=340usize, 341..=2000] {
            let v: Vec<f64> = range.map(|n| rs_expected(n).unwrap()).collect();
            assert!(v.windows(2).all(|w| w[1] > w[0]));
        }
    }

    #[test]
    fn rs_expected_asymptotic_slope() {
        let (a, b) = (5000usize, 10000usize);
        let s = (rs_expected(b).unwrap().ln() - rs_expected(a).unwrap().ln()) / ((b as f64).ln() - (a as f64).ln());
        assert!((s - 0.5).abs() < 0.01, "{s}");
    }

    #[test]
    fn ramp_ghe_is_one() {
        let x: Vec<f64> = (1..=500).map(|t| t as f64).collect();
        let e = ghe(&x, &[0.5, 1.0, 2.0, 3.0], &DEFAULT_TAU_MAX.collect::<Vec<_>>()).unwrap();
        for est in e {
            assert!((est.h - 1.0).abs() < 1e-12, "{}", est.h);
        }
    }

    #[test]
    fn weights_sum_to_one() {
        for &(theta, dt) in &[(1.0, 10), (100.0, 500), (0.3, 7), (1e6, 50)] {
            let s: f64 = wghe_weights(theta, dt).iter().sum();
            assert!((s - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn flat_wghe_equals_ghe() {
        let x = crate::stats::cumsum(&crate::synth::normals(800, 3));
        let taus: Vec<usize> = DEFAULT_TAU_MAX.collect();
        let w = wghe(&x, 1.0, f64::INFINITY, 500, &taus).unwrap();
        let g = ghe(&x[300..], &[1.0], &taus).unwrap();
        assert!((w.h - g[0].h).abs() < 1e-6);
    }

    #[test]
    fn exponent_fixed_point() {
        let e = exponent_relations(Exponent::Alpha(0.5));
        assert_eq!((e.alpha, e.beta, e.delta, e.h, e.d), (0.5, 0.0, 1.0, 0.5, 1.5));
        assert_eq!(exponent_relations(Exponent::Delta(1.0)).h, 0.5);
        assert!((exponent_relations(Exponent::H(0.21)).d - 1.79).abs() < 1e-15);
    }

    #[test]
    fn distance_and_class() {
        assert_eq!(hurst_distance(0.5), 0.0);
        assert!((hurst_distance(0.21) - 0.29).abs() < 1e-15);
        assert!((hurst_distance(0.8) - 0.3).abs() < 1e-15);
        assert_eq!(classify(0.21), Persistence::AntiPersistent);
        assert_eq!(classify(0.52), Persistence::RandomWalk);
        assert_eq!(classify(0.7), Persistence::Persistent);
    }

    #[test]
    fn regime_of_printed_slope() {
        assert_eq!(spectral_regime(0.97), SpectralRegime::FgnRange);
        assert_eq!(spectral_regime(2.0), SpectralRegime::FbmRange);
        assert_eq!(spectral_regime(3.5), SpectralRegime::Neither);
    }

    #[test]
    fn constant_blocks_dropped() {
        let mut x = vec![1.0; 64];
        x.extend(crate::synth::normals(64, 1));
        let e = rs_hurst(&x, Some(&[64, 32, 16])).unwrap_or_else(|e| panic!("{e}"));
        assert_eq!(e.grid.len(), 3);
        let z = vec![2.0; 128];
        assert!(rs_hurst(&z, Some(&[8, 16, 32])).is_err());
    }
}
