//! Shannon and Tsallis entropy, the q-Gaussian density and rolling entropy traces.

use crate::error::{Error, Result};
use crate::series::{rolling_apply, RollingConfig};
use crate::stats;
use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

fn check_distribution(p: &[f64]) -> Result<()> {
    if p.is_empty() || p.iter().any(|&v| !(v >= 0.0) || !v.is_finite()) {
        return Err(Error::InvalidInput("probabilities must be finite and non-negative".into()));
    }
    let s: f64 = p.iter().sum();
    if (s - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidInput(format!("probabilities sum to {s}, not 1")));
    }
    Ok(())
}

pub fn shannon_entropy(p: &[f64]) -> Result<f64> {
    check_distribution(p)?;
    Ok(p.iter().filter(|&&v| v > 0.0).map(|&v| -v * v.ln()).sum::<f64>().max(0.0))
}

/// (1 - sum p^a) / (a - 1); Shannon at a = 1.
pub fn tsallis_entropy(p: &[f64], a: f64) -> Result<f64> {
    if !(a > 0.0) {
        return Err(Error::InvalidInput("Tsallis index must be positive".into()));
    }
    check_distribution(p)?;
    if a == 1.0 {
        return shannon_entropy(p);
    }
    let s: f64 = p.iter().filter(|&&v| v > 0.0).map(|v| v.powf(a)).sum();
    Ok(((1.0 - s) / (a - 1.0)).max(0.0))
}

/// Largest attainable entropy over n states (uniform distribution).
pub fn max_entropy(n: usize, a: f64) -> f64 {
    let n = n as f64;
    if a == 1.0 {
        n.ln()
    } else {
        (1.0 - n.powf(1.0 - a)) / (a - 1.0)
    }
}

pub fn product_distribution(pa: &[f64], pb: &[f64]) -> Vec<f64> {
    pa.iter().flat_map(|x| pb.iter().map(move |y| x * y)).collect()
}

/// |H(A x B) - H(A) - H(B) - (1 - a) H(A) H(B)| for independent A, B.
pub fn nonadditivity_check(pa: &[f64], pb: &[f64], a: f64) -> Result<f64> {
    let ha = tsallis_entropy(pa, a)?;
    let hb = tsallis_entropy(pb, a)?;
    let hab = tsallis_entropy(&product_distribution(pa, pb), a)?;
    Ok((hab - (ha + hb + (1.0 - a) * ha * hb)).abs())
}

/// e_a(x) = [1 + (1 - a) x]_+^{1/(1-a)}.
pub fn a_exponential(x: f64, a: f64) -> f64 {
    if a == 1.0 {
        return x.exp();
    }
    let base = 1.0 + (1.0 - a) * x;
    if base <= 0.0 {
        0.0
    } else {
        base.powf(1.0 / (1.0 - a))
    }
}

fn q_gaussian_norm(a: f64) -> f64 {
    let ln_sqrt_pi = 0.5 * std::f64::consts::PI.ln();
    if a == 1.0 {
        ln_sqrt_pi.exp()
    } else if a > 1.0 {
        (ln_sqrt_pi + ln_gamma((3.0 - a) / (2.0 * (a - 1.0))) - 0.5 * (a - 1.0).ln() - ln_gamma(1.0 / (a - 1.0))).exp()
    } else {
        (2f64.ln() + ln_sqrt_pi + ln_gamma(1.0 / (1.0 - a))
            - (3.0 - a).ln()
            - 0.5 * (1.0 - a).ln()
            - ln_gamma((3.0 - a) / (2.0 * (1.0 - a))))
        .exp()
    }
}

/// Normalized q-Gaussian density sqrt(beta)/C_a * e_a(-beta x^2).
pub fn q_gaussian_pdf(x: f64, a: f64, beta: f64) -> Result<f64> {
    if !(beta > 0.0) {
        return Err(Error::InvalidInput("beta must be positive".into()));
    }
    if !(a > 0.0 && a < 3.0) {
        return Err(Error::InvalidInput(format!("a = {a} outside the normalizable range (0, 3)")));
    }
    Ok(beta.sqrt() / q_gaussian_norm(a) * a_exponential(-beta * x * x, a))
}

/// Variance 1/(beta (5 - 3a)), or None when it diverges (a >= 5/3).
pub fn q_gaussian_variance(a: f64, beta: f64) -> Option<f64> {
    (a < 5.0 / 3.0).then(|| 1.0 / (beta * (5.0 - 3.0 * a)))
}

/// Maximum-likelihood (a, beta) of a centred q-Gaussian, with 1 < a < 3.
pub fn fit_q_gaussian(x: &[f64]) -> Result<(f64, f64)> {
    if x.len() < 10 {
        return Err(Error::TooShort { need: 10, got: x.len() });
    }
    let m = stats::mean(x);
    let v = stats::pvar(x);
    if !(v > 0.0) {
        return Err(Error::Degenerate("constant window".into()));
    }
    let nll = |th: &[f64]| {
        let a = 1.0 + 2.0 / (1.0 + (-th[0]).exp());
        let beta = th[1].exp();
        let mut s = 0.0;
        for &xi in x {
            match q_gaussian_pdf(xi - m, a, beta) {
                Ok(p) if p > 0.0 => s -= p.ln(),
                _ => return f64::INFINITY,
            }
        }
        s
    };
    let r = crate::optim::nelder_mead(nll, &[-1.0, (1.0 / (2.0 * v)).ln()], 0.5, 2000, 1e-10);
    Ok((1.0 + 2.0 / (1.0 + (-r.x[0]).exp()), r.x[1].exp()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Partition {
    Fixed,
    Adaptive,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EntropyConfig {
    pub a: f64,
    pub n_states: usize,
    pub partition: Partition,
    pub rolling: RollingConfig,
    /// Pick a per window by q-Gaussian likelihood instead of using `a`.
    #[serde(default)]
    pub optimal_a: bool,
}

impl Default for EntropyConfig {
    fn default() -> Self {
        EntropyConfig {
            a: 1.575,
            n_states: 10,
            partition: Partition::Fixed,
            rolling: RollingConfig { window: 365, step: 1 },
            optimal_a: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntropyTrace {
    /// Index of the last sample of each window.
    pub end_index: Vec<usize>,
    pub values: Vec<f64>,
    /// Index used per window (differs from config.a only in optimal-a mode).
    pub a: Vec<f64>,
}

/// Histogram probabilities over `bins` equal cells spanning [lo, hi].
pub fn histogram(x: &[f64], lo: f64, hi: f64, bins: usize) -> Vec<f64> {
    let mut c = vec![0u64; bins];
    let w = (hi - lo) / bins as f64;
    for &v in x {
        let i = if w > 0.0 { (((v - lo) / w).max(0.0) as usize).min(bins - 1) } else { 0 };
        c[i] += 1;
    }
    c.iter().map(|&k| k as f64 / x.len() as f64).collect()
}

fn min_max(x: &[f64]) -> (f64, f64) {
    x.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)))
}

pub fn rolling_tsallis(x: &[f64], cfg: &EntropyConfig) -> Result<EntropyTrace> {
    if cfg.rolling.window < 30 {
        return Err(Error::InvalidInput("entropy window must be >= 30".into()));
    }
    if cfg.n_states < 2 {
        return Err(Error::InvalidInput("n_states must be >= 2".into()));
    }
    let (glo, ghi) = min_max(x);
    let out = rolling_apply(x, cfg.rolling, |w| {
        let (lo, hi) = match cfg.partition {
            Partition::Fixed => (glo, ghi),
            Partition::Adaptive => min_max(w),
        };
        let a = if cfg.optimal_a { fit_q_gaussian(w).map(|r| r.0).unwrap_or(cfg.a) } else { cfg.a };
        let p = histogram(w, lo, hi, cfg.n_states);
        Ok((tsallis_entropy(&p, a)?, a))
    })?;
    let mut trace = EntropyTrace { end_index: vec![], values: vec![], a: vec![] };
    for (i, v) in out {
        let (h, a) = v.ok_or_else(|| Error::Degenerate(format!("window ending at {i}")))?;
        trace.end_index.push(i);
        trace.values.push(h);
        trace.a.push(a);
    }
    Ok(trace)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntropyVolatilityReport {
    pub correlation: f64,
    pub negative: bool,
    /// (lag, corr(trace_t, sigma_{t+lag})).
    pub cross: Vec<(i64, f64)>,
}

pub fn entropy_volatility_report(trace: &[f64], sigma: &[f64], max_lag: usize) -> Result<EntropyVolatilityReport> {
    if trace.len() != sigma.len() {
        return Err(Error::InvalidInput(format!("lengths differ: {} vs {}", trace.len(), sigma.len())));
    }
    if trace.len() < 3 {
        return Err(Error::TooShort { need: 3, got: trace.len() });
    }
    let correlation = stats::pearson(trace, sigma);
    let n = trace.len() as i64;
    let cross = (-(max_lag as i64)..=max_lag as i64)
        .filter(|l| l.abs() < n - 2)
        .map(|l| {
            let c = if l >= 0 {
                stats::pearson(&trace[..(n - l) as usize], &sigma[l as usize..])
            } else {
                stats::pearson(&trace[(-l) as usize..], &sigma[..(n + l) as usize])
            };
            (l, c)
        })
        .collect();
    Ok(EntropyVolatilityReport { correlation, negative: correlation < 0.0, cross })
}
