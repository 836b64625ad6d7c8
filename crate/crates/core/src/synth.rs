//! Seeded generators for processes with known ground truth.
//!
//! All randomness comes from ChaCha20 (`rand_chacha::ChaCha20Rng`) seeded via
//! `seed_from_u64`, so a (spec, seed) pair yields the same bytes on every platform.

use crate::error::{Error, Result};
use crate::stats;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;
use rustfft::{num_complex::Complex, FftPlanner};
use serde::{Deserialize, Serialize};

const BURN_IN: usize = 1000;

pub fn rng(seed: u64) -> ChaCha20Rng {
    ChaCha20Rng::seed_from_u64(seed)
}

pub fn normals(n: usize, seed: u64) -> Vec<f64> {
    let mut r = rng(seed);
    (0..n).map(|_| r.sample(StandardNormal)).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GeneratorSpec {
    WhiteNoise { sd: f64 },
    Ar1 { phi: f64, sd: f64 },
    Fgn { h: f64 },
    Fbm { h: f64 },
    Arfima { d: f64 },
    Garch11 { k: f64, gamma: f64, alpha: f64 },
    Egarch11 { k: f64, gamma: f64, alpha: f64, xi: f64 },
    Gjr11 { k: f64, gamma: f64, alpha: f64, xi: f64 },
    Logistic { r: f64, noise_snr_db: Option<f64> },
    Henon { a: f64, b: f64, noise_snr_db: Option<f64> },
    Sine { r: f64 },
    SineWave { period: f64, amplitude: f64 },
    Gbm { p0: f64, mu: f64, sigma: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Generated {
    pub values: Vec<f64>,
    /// Latent conditional sd for GARCH-family kinds.
    pub sigma: Option<Vec<f64>>,
    /// Set when an exact method had to fall back to an approximation.
    pub approximate: bool,
}

impl Generated {
    fn exact(values: Vec<f64>) -> Self {
        Generated { values, sigma: None, approximate: false }
    }
}

pub fn generate(spec: &GeneratorSpec, n: usize, seed: u64) -> Result<Generated> {
    use GeneratorSpec::*;
    match *spec {
        WhiteNoise { sd } => Ok(Generated::exact(normals(n, seed).iter().map(|z| z * sd).collect())),
        Ar1 { phi, sd } => gen_ar1(phi, sd, n, seed).map(Generated::exact),
        Fgn { h } => gen_fgn(h, n, seed),
        Fbm { h } => {
            let mut g = gen_fgn(h, n, seed)?;
            g.values = stats::cumsum(&g.values);
            Ok(g)
        }
        Arfima { d } => gen_arfima(d, n, seed).map(Generated::exact),
        Garch11 { k, gamma, alpha } => gen_garch_family(Family::Garch, k, gamma, alpha, 0.0, n, seed),
        Egarch11 { k, gamma, alpha, xi } => gen_garch_family(Family::Egarch, k, gamma, alpha, xi, n, seed),
        Gjr11 { k, gamma, alpha, xi } => gen_garch_family(Family::Gjr, k, gamma, alpha, xi, n, seed),
        Logistic { r, noise_snr_db } => Ok(Generated::exact(add_noise(logistic(r, n, seed), noise_snr_db, seed))),
        Henon { a, b, noise_snr_db } => Ok(Generated::exact(add_noise(henon(a, b, n, seed), noise_snr_db, seed))),
        Sine { r } => Ok(Generated::exact(sine_map(r, n, seed))),
        SineWave { period, amplitude } => Ok(Generated::exact(
            (0..n)
                .map(|t| amplitude * (2.0 * std::f64::consts::PI * t as f64 / period).sin())
                .collect(),
        )),
        Gbm { p0, mu, sigma } => Ok(Generated::exact(gbm(p0, mu, sigma, n, seed))),
    }
}

pub fn gen_ar1(phi: f64, sd: f64, n: usize, seed: u64) -> Result<Vec<f64>> {
    if phi.abs() >= 1.0 {
        return Err(Error::NonStationary(format!("|phi| = {} >= 1", phi.abs())));
    }
    let z = normals(n + BURN_IN, seed);
    let mut x = 0.0;
    let mut out = Vec::with_capacity(n);
    for (t, e) in z.iter().enumerate() {
        x = phi * x + sd * e;
        if t >= BURN_IN {
            out.push(x);
        }
    }
    Ok(out)
}

/// Autocovariance of unit-variance fGn at lag k.
pub fn fgn_autocov(h: f64, k: usize) -> f64 {
    let k = k as f64;
    let e = 2.0 * h;
    0.5 * ((k + 1.0).powf(e) - 2.0 * k.powf(e) + (k - 1.0).abs().powf(e))
}

/// Exact fGn by circulant embedding (Davies-Harte).
pub fn gen_fgn(h: f64, n: usize, seed: u64) -> Result<Generated> {
    if !(h > 0.0 && h < 1.0) {
        return Err(Error::InvalidInput(format!("H must lie in (0,1), got {h}")));
    }
    if n == 0 {
        return Ok(Generated::exact(vec![]));
    }
    let m = 2 * n;
    let mut row: Vec<Complex<f64>> = (0..m)
        .map(|j| {
            let lag = if j <= n { j } else { m - j };
            Complex::new(fgn_autocov(h, lag), 0.0)
        })
        .collect();
    let mut planner = FftPlanner::new();
    let fft = planner.plan_fft_forward(m);
    fft.process(&mut row);
    let mut approximate = false;
    let lam: Vec<f64> = row
        .iter()
        .map(|c| {
            if c.re < -1e-10 {
                approximate = true;
            }
            c.re.max(0.0)
        })
        .collect();
    let mut r = rng(seed);
    let mut w: Vec<Complex<f64>> = lam
        .iter()
        .map(|&l| {
            let s = (l / m as f64).sqrt();
            let a: f64 = r.sample(StandardNormal);
            let b: f64 = r.sample(StandardNormal);
            Complex::new(s * a, s * b)
        })
        .collect();
    fft.process(&mut w);
    Ok(Generated { values: w[..n].iter().map(|c| c.re).collect(), sigma: None, approximate })
}

/// MA(inf) weights of (1-B)^{-d}: psi_0 = 1, psi_j = psi_{j-1} (j-1+d)/j.
pub fn arfima_weights(d: f64, len: usize) -> Vec<f64> {
    let mut psi = Vec::with_capacity(len);
    let mut p = 1.0;
    psi.push(p);
    for j in 1..len {
        p *= (j as f64 - 1.0 + d) / j as f64;
        psi.push(p);
    }
    psi
}

/// ARFIMA(0,d,0) by the MA representation truncated at 4N lags.
pub fn gen_arfima(d: f64, n: usize, seed: u64) -> Result<Vec<f64>> {
    if !(d > -0.5 && d < 0.5) {
        return Err(Error::InvalidInput(format!("d must lie in (-0.5,0.5), got {d}")));
    }
    if n == 0 {
        return Ok(vec![]);
    }
    let trunc = 4 * n;
    let psi = arfima_weights(d, trunc + 1);
    let e = normals(n + trunc, seed);
    let full = crate::spectral::convolve(&e, &psi);
    Ok(full[trunc..trunc + n].to_vec())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Family {
    Garch,
    Egarch,
    Gjr,
}

pub const E_ABS_NORMAL: f64 = 0.797_884_560_802_865_4;

pub fn gen_garch_family(
    family: Family,
    k: f64,
    gamma: f64,
    alpha: f64,
    xi: f64,
    n: usize,
    seed: u64,
) -> Result<Generated> {
    match family {
        Family::Garch | Family::Gjr => {
            if k <= 0.0 || gamma < 0.0 || alpha < 0.0 {
                return Err(Error::InvalidInput("GARCH parameters must be non-negative, k > 0".into()));
            }
            if gamma + alpha + xi.max(0.0) / 2.0 >= 1.0 {
                return Err(Error::NonStationary("explosive GARCH parameters".into()));
            }
        }
        Family::Egarch => {
            if gamma.abs() >= 1.0 {
                return Err(Error::NonStationary("|gamma| >= 1 in EGARCH".into()));
            }
        }
    }
    let z = normals(n + BURN_IN, seed);
    let mut s2 = match family {
        Family::Egarch => (k / (1.0 - gamma)).exp(),
        Family::Garch => k / (1.0 - gamma - alpha),
        Family::Gjr => k / (1.0 - gamma - alpha - xi / 2.0),
    };
    let mut eps_prev = 0.0;
    let mut z_prev: f64 = 0.0;
    let mut values = Vec::with_capacity(n);
    let mut sigma = Vec::with_capacity(n);
    for (t, &zt) in z.iter().enumerate() {
        if t > 0 {
            s2 = match family {
                Family::Garch => k + gamma * s2 + alpha * eps_prev * eps_prev,
                Family::Gjr => {
                    let lev = if eps_prev < 0.0 { xi } else { 0.0 };
                    k + gamma * s2 + (alpha + lev) * eps_prev * eps_prev
                }
                Family::Egarch => {
                    (k + gamma * s2.ln() + alpha * (z_prev.abs() - E_ABS_NORMAL) + xi * z_prev).exp()
                }
            };
        }
        let s = s2.sqrt();
        let e = s * zt;
        if t >= BURN_IN {
            values.push(e);
            sigma.push(s);
        }
        eps_prev = e;
        z_prev = zt;
    }
    Ok(Generated { values, sigma: Some(sigma), approximate: false })
}

fn add_noise(x: Vec<f64>, snr_db: Option<f64>, seed: u64) -> Vec<f64> {
    match snr_db {
        Some(db) if db.is_finite() => {
            let s = stats::sd(&x) * 10f64.powf(-db / 20.0);
            let z = normals(x.len(), seed ^ 0x9E37_79B9_7F4A_7C15);
            x.iter().zip(z).map(|(v, e)| v + s * e).collect()
        }
        _ => x,
    }
}

pub fn logistic(r: f64, n: usize, seed: u64) -> Vec<f64> {
    let mut g = rng(seed);
    let mut x: f64 = g.random_range(0.05..0.95);
    let mut out = Vec::with_capacity(n);
    for t in 0..n + BURN_IN {
        x = r * x * (1.0 - x);
        // finite precision can land on the repelling fixed points; nudge off
        if x <= 0.0 || x >= 1.0 || (x - 0.75).abs() < 1e-15 {
            x = g.random_range(0.05..0.95);
        }
        if t >= BURN_IN {
            out.push(x);
        }
    }
    out
}

pub fn henon(a: f64, b: f64, n: usize, seed: u64) -> Vec<f64> {
    let mut g = rng(seed);
    let mut x: f64 = g.random_range(-0.1..0.1);
    let mut y: f64 = 0.0;
    let mut out = Vec::with_capacity(n);
    for t in 0..n + BURN_IN {
        let xn = 1.0 - a * x * x + y;
        y = b * x;
        x = xn;
        if t >= BURN_IN {
            out.push(x);
        }
    }
    out
}

pub fn sine_map(r: f64, n: usize, seed: u64) -> Vec<f64> {
    let mut g = rng(seed);
    let mut x: f64 = g.random_range(0.05..0.95);
    let mut out = Vec::with_capacity(n);
    for t in 0..n + BURN_IN {
        x = r * (std::f64::consts::PI * x).sin();
        if t >= BURN_IN {
            out.push(x);
        }
    }
    out
}

pub fn gbm(p0: f64, mu: f64, sigma: f64, n: usize, seed: u64) -> Vec<f64> {
    let z = normals(n.saturating_sub(1), seed);
    let mut p = p0;
    let mut out = Vec::with_capacity(n);
    if n > 0 {
        out.push(p);
    }
    for e in z {
        p *= ((mu - 0.5 * sigma * sigma) + sigma * e).exp();
        out.push(p);
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MapKind {
    Logistic,
    Henon,
    Sine,
}

/// Largest Lyapunov exponent of a known map by tangent-vector accumulation.
pub fn tangent_lyapunov(kind: MapKind, steps: usize, seed: u64) -> f64 {
    let mut g = rng(seed);
    match kind {
        MapKind::Logistic | MapKind::Sine => {
            let mut x: f64 = g.random_range(0.05..0.95);
            for _ in 0..BURN_IN {
                x = step1(kind, x, &mut g);
            }
            let mut acc = 0.0;
            for _ in 0..steps {
                let d = match kind {
                    MapKind::Logistic => 4.0 * (1.0 - 2.0 * x),
                    _ => 0.7 * std::f64::consts::PI * (std::f64::consts::PI * x).cos(),
                };
                acc += d.abs().max(1e-300).ln();
                x = step1(kind, x, &mut g);
            }
            acc / steps as f64
        }
        MapKind::Henon => {
            let (a, b) = (1.4, 0.3);
            let mut x: f64 = g.random_range(-0.1..0.1);
            let mut y = 0.0;
            for _ in 0..BURN_IN {
                let xn = 1.0 - a * x * x + y;
                y = b * x;
                x = xn;
            }
            let (mut u, mut v) = (1.0f64, 0.0f64);
            let mut acc = 0.0;
            for _ in 0..steps {
                let un = -2.0 * a * x * u + v;
                let vn = b * u;
                let norm = (un * un + vn * vn).sqrt();
                acc += norm.ln();
                u = un / norm;
                v = vn / norm;
                let xn = 1.0 - a * x * x + y;
                y = b * x;
                x = xn;
            }
            acc / steps as f64
        }
    }
}

fn step1(kind: MapKind, x: f64, g: &mut ChaCha20Rng) -> f64 {
    match kind {
        MapKind::Logistic => {
            let xn = 4.0 * x * (1.0 - x);
            if xn <= 0.0 || xn >= 1.0 || (xn - 0.75).abs() < 1e-15 {
                g.random_range(0.05..0.95)
            } else {
                xn
            }
        }
        _ => 0.7 * (std::f64::consts::PI * x).sin(),
    }
}
