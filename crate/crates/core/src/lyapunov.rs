//! Maximal Lyapunov exponent: Rosenstein nearest-neighbour divergence and the
//! Jacobian method on a neural autoregression.

use crate::embedding::ami_first_min;
use crate::error::{need, Error, Result};
use crate::optim::levenberg_marquardt;
use crate::regress::{line_fit, ols};
use crate::stats;
use crate::synth::rng;
use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LyapunovMethod {
    Rosenstein,
    Jacobian,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Chaos,
    NoChaos,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Triplet {
    pub tau: usize,
    pub m: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub q: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridCell {
    pub tau: usize,
    pub m: usize,
    pub q: usize,
    pub lambda: f64,
    pub bic: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LyapunovResult {
    pub lambda_max: f64,
    pub method: LyapunovMethod,
    pub triplet: Triplet,
    pub se: f64,
    /// One-sided 95% lower bound; the interval is [ci_lower, inf).
    pub ci_lower: f64,
    pub p_value: f64,
    pub verdict: Verdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub curve: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fit_range: Option<(usize, usize)>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub per_m: Vec<(usize, f64)>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub grid: Vec<GridCell>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub flags: Vec<String>,
}

const Z95: f64 = 1.6448536269514722;

/// Test of H0: lambda >= 0 (chaos). Returns (p, ci_lower, verdict).
pub fn chaos_test(lambda: f64, se: f64) -> (f64, f64, Verdict) {
    let p = if se > 0.0 {
        stats::norm_cdf(lambda / se)
    } else if lambda < 0.0 {
        0.0
    } else {
        1.0
    };
    let verdict = if p < 0.05 { Verdict::NoChaos } else { Verdict::Chaos };
    (p, lambda - Z95 * se, verdict)
}

fn embed(x: &[f64], tau: usize, m: usize) -> (Vec<f64>, usize) {
    let rows = x.len() - (m - 1) * tau;
    let mut data = Vec::with_capacity(rows * m);
    for i in 0..rows {
        for j in 0..m {
            data.push(x[i + j * tau]);
        }
    }
    (data, rows)
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(u, v)| (u - v) * (u - v)).sum::<f64>().sqrt()
}

/// Mean log distance between each reference point and its nearest neighbour
/// (outside the Theiler window) after k = 0..=t_max steps.
pub fn rosenstein_curve(x: &[f64], tau: usize, m: usize, theiler: usize, t_max: usize) -> Result<Vec<f64>> {
    if tau == 0 || m == 0 {
        return Err(Error::InvalidInput("tau and m must be >= 1".into()));
    }
    need(x.len(), (m - 1) * tau + 4 * t_max.max(1) + 2)?;
    let (data, rows) = embed(x, tau, m);
    if t_max > rows / 4 {
        return Err(Error::InvalidInput(format!("t_max {t_max} exceeds a quarter of {rows} embedded points")));
    }
    let refs = rows - t_max;
    let pt = |i: usize| &data[i * m..(i + 1) * m];
    // scan outward in order of the first coordinate; exact Euclidean NN
    let mut order: Vec<usize> = (0..refs).collect();
    order.sort_by(|&a, &b| pt(a)[0].total_cmp(&pt(b)[0]).then(a.cmp(&b)));
    let mut nn = vec![usize::MAX; refs];
    for (pos, &i) in order.iter().enumerate() {
        let mut best = f64::INFINITY;
        let mut best_j = usize::MAX;
        let consider = |j: usize, best: &mut f64, best_j: &mut usize| {
            if i.abs_diff(j) <= theiler {
                return;
            }
            let d = dist(pt(i), pt(j));
            if d > 0.0 && (d < *best || (d == *best && j < *best_j)) {
                *best = d;
                *best_j = j;
            }
        };
        let x0 = pt(i)[0];
        for &j in order[pos + 1..].iter() {
            if pt(j)[0] - x0 > best {
                break;
            }
            consider(j, &mut best, &mut best_j);
        }
        for &j in order[..pos].iter().rev() {
            if x0 - pt(j)[0] > best {
                break;
            }
            consider(j, &mut best, &mut best_j);
        }
        nn[i] = best_j;
    }
    let valid = nn.iter().filter(|&&j| j != usize::MAX).count();
    if 2 * valid < refs {
        return Err(Error::Degenerate(format!("only {valid} of {refs} reference points have a valid neighbour")));
    }
    let mut curve = Vec::with_capacity(t_max + 1);
    for k in 0..=t_max {
        let (mut s, mut c) = (0.0, 0usize);
        for (i, &j) in nn.iter().enumerate() {
            if j == usize::MAX {
                continue;
            }
            let d = dist(pt(i + k), pt(j + k));
            if d > 0.0 {
                s += d.ln();
                c += 1;
            }
        }
        curve.push(if c > 0 { s / c as f64 } else { f64::NAN });
    }
    Ok(curve)
}

/// Default fit range: from step 1 to where the curve has covered half its rise
/// to the maximum, with at least four points.
pub fn default_fit_range(curve: &[f64]) -> (usize, usize) {
    let last = curve.len().saturating_sub(1);
    if curve.len() < 5 {
        return (0, last);
    }
    let top = curve.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let half = curve[1] + 0.5 * (top - curve[1]);
    let end = (1..curve.len()).find(|&k| curve[k] >= half).unwrap_or(last);
    (1, end.max(4).min(last))
}

pub fn rosenstein_lambda(curve: &[f64], fit_range: Option<(usize, usize)>) -> Result<LyapunovResult> {
    let (a, b) = fit_range.unwrap_or_else(|| default_fit_range(curve));
    if b >= curve.len() || b < a || b - a + 1 < 4 {
        return Err(Error::InvalidInput(format!("fit range {a}..={b} needs >= 4 points within the curve")));
    }
    let ks: Vec<f64> = (a..=b).map(|k| k as f64).collect();
    let fit = line_fit(&ks, &curve[a..=b]).ok_or_else(|| Error::Degenerate("divergence curve fit".into()))?;
    if !fit.slope.is_finite() {
        return Err(Error::Degenerate("non-finite divergence slope".into()));
    }
    let se = if fit.slope_se.is_finite() { fit.slope_se } else { 0.0 };
    let (p_value, ci_lower, verdict) = chaos_test(fit.slope, se);
    Ok(LyapunovResult {
        lambda_max: fit.slope,
        method: LyapunovMethod::Rosenstein,
        triplet: Triplet { tau: 0, m: 0, q: None },
        se,
        ci_lower,
        p_value,
        verdict,
        curve: Some(curve.to_vec()),
        fit_range: Some((a, b)),
        per_m: vec![],
        grid: vec![],
        flags: vec![],
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RosensteinConfig {
    pub tau: usize,
    pub m_min: usize,
    pub m_max: usize,
    /// None: AMI first-minimum delay.
    pub theiler: Option<usize>,
    pub t_max: usize,
    /// Largest spread of per-m slopes still counted as saturated.
    pub saturation_tol: f64,
}

impl Default for RosensteinConfig {
    fn default() -> Self {
        RosensteinConfig { tau: 1, m_min: 2, m_max: 6, theiler: None, t_max: 20, saturation_tol: 0.02 }
    }
}

/// Sweeps m and reports the slope at the smallest m from which all larger m
/// (at least three values) agree within the tolerance; flags non-saturation otherwise.
pub fn rosenstein(x: &[f64], cfg: &RosensteinConfig) -> Result<LyapunovResult> {
    if cfg.m_min == 0 || cfg.m_max < cfg.m_min {
        return Err(Error::InvalidInput("need 1 <= m_min <= m_max".into()));
    }
    let theiler = match cfg.theiler {
        Some(w) => w,
        None => ami_first_min(x, 20.min(x.len() / 10).max(2), None)?.tau,
    };
    let mut fits = Vec::new();
    for m in cfg.m_min..=cfg.m_max {
        let c = rosenstein_curve(x, cfg.tau, m, theiler, cfg.t_max)?;
        fits.push((m, rosenstein_lambda(&c, None)?));
    }
    let slopes: Vec<f64> = fits.iter().map(|f| f.1.lambda_max).collect();
    let spread = |s: &[f64]| {
        s.iter().copied().fold(f64::NEG_INFINITY, f64::max) - s.iter().copied().fold(f64::INFINITY, f64::min)
    };
    let saturated = (0..slopes.len()).find(|&i| slopes.len() - i >= 3.min(slopes.len()) && spread(&slopes[i..]) <= cfg.saturation_tol);
    let idx = saturated.unwrap_or(0);
    let (m, mut res) = fits.swap_remove(idx);
    res.triplet = Triplet { tau: cfg.tau, m, q: None };
    res.per_m = (cfg.m_min..=cfg.m_max).zip(slopes).collect();
    if saturated.is_none() {
        res.flags.push("non-saturating: slope not stable across m".into());
    }
    Ok(res)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NeuralArModel {
    pub tau: usize,
    pub m: usize,
    pub q: usize,
    /// [bias, linear weights (m), then per hidden unit: output weight, bias, input weights (m)].
    pub weights: Vec<f64>,
    pub center: f64,
    pub scale: f64,
    pub rss: f64,
    pub n_obs: usize,
    pub residual_var: f64,
    pub bic: f64,
    pub converged: bool,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub flags: Vec<String>,
}

fn n_weights(m: usize, q: usize) -> usize {
    1 + m + q * (m + 2)
}

/// Network value and gradient with respect to its inputs (standardized units).
fn net_eval(w: &[f64], m: usize, q: usize, x: &[f64], grad_x: Option<&mut [f64]>) -> f64 {
    let mut y = w[0];
    for j in 0..m {
        y += w[1 + j] * x[j];
    }
    let mut gx = grad_x;
    if let Some(g) = gx.as_deref_mut() {
        g.copy_from_slice(&w[1..1 + m]);
    }
    for h in 0..q {
        let o = 1 + m + h * (m + 2);
        let mut a = w[o + 1];
        for j in 0..m {
            a += w[o + 2 + j] * x[j];
        }
        let t = a.tanh();
        y += w[o] * t;
        if let Some(g) = gx.as_deref_mut() {
            let d = w[o] * (1.0 - t * t);
            for j in 0..m {
                g[j] += d * w[o + 2 + j];
            }
        }
    }
    y
}

impl NeuralArModel {
    /// One-step prediction in original units from inputs x_t, x_{t-tau}, ..., x_{t-(m-1)tau}.
    pub fn predict(&self, inputs: &[f64]) -> f64 {
        if self.scale == 0.0 {
            return self.center;
        }
        let z: Vec<f64> = inputs.iter().map(|v| (v - self.center) / self.scale).collect();
        self.center + self.scale * net_eval(&self.weights, self.m, self.q, &z, None)
    }
}

struct Design {
    inputs: Vec<f64>,
    target: Vec<f64>,
    m: usize,
}

fn design(z: &[f64], tau: usize, m: usize) -> Design {
    let start = (m - 1) * tau;
    let mut inputs = Vec::new();
    let mut target = Vec::new();
    for t in start..z.len() - 1 {
        for j in 0..m {
            inputs.push(z[t - j * tau]);
        }
        target.push(z[t + 1]);
    }
    Design { inputs, target, m }
}

fn resid_jac(d: &Design, q: usize, w: &[f64]) -> (DVector<f64>, DMatrix<f64>) {
    let m = d.m;
    let n = d.target.len();
    let k = w.len();
    let mut r = DVector::zeros(n);
    let mut jac = DMatrix::zeros(n, k);
    for i in 0..n {
        let x = &d.inputs[i * m..(i + 1) * m];
        r[i] = net_eval(w, m, q, x, None) - d.target[i];
        jac[(i, 0)] = 1.0;
        for j in 0..m {
            jac[(i, 1 + j)] = x[j];
        }
        for h in 0..q {
            let o = 1 + m + h * (m + 2);
            let mut a = w[o + 1];
            for j in 0..m {
                a += w[o + 2 + j] * x[j];
            }
            let t = a.tanh();
            let dt = w[o] * (1.0 - t * t);
            jac[(i, o)] = t;
            jac[(i, o + 1)] = dt;
            for j in 0..m {
                jac[(i, o + 2 + j)] = dt * x[j];
            }
        }
    }
    (r, jac)
}

pub const WEIGHT_DECAY: f64 = 1e-6;
pub const RESTARTS: usize = 5;

/// Least-squares fit of x_{t+1} = f(x_t, x_{t-tau}, ..., x_{t-(m-1)tau}) with a
/// tanh hidden layer of q units plus a linear term.
pub fn fit_neural_ar(x: &[f64], tau: usize, m: usize, q: usize, seed: u64) -> Result<NeuralArModel> {
    fit_neural_ar_nested(x, tau, m, q, seed, None)
}

/// As `fit_neural_ar`, with one extra start from a fitted (tau, m, q - 1) model
/// plus an inert unit, so the fit is never worse than the smaller network.
pub fn fit_neural_ar_nested(
    x: &[f64],
    tau: usize,
    m: usize,
    q: usize,
    seed: u64,
    smaller: Option<&NeuralArModel>,
) -> Result<NeuralArModel> {
    if tau == 0 || m == 0 {
        return Err(Error::InvalidInput("tau and m must be >= 1".into()));
    }
    let k = n_weights(m, q);
    need(x.len(), (20 * k).max((m - 1) * tau + 2))?;
    let center = stats::mean(x);
    let scale = stats::sd(x);
    let n_obs = x.len() - 1 - (m - 1) * tau;
    if !(scale > 0.0) {
        let floor = f64::MIN_POSITIVE;
        return Ok(NeuralArModel {
            tau,
            m,
            q,
            weights: vec![0.0; k],
            center,
            scale: 0.0,
            rss: 0.0,
            n_obs,
            residual_var: 0.0,
            bic: n_obs as f64 * floor.ln() + k as f64 * (n_obs as f64).ln(),
            converged: true,
            flags: vec!["constant series; zero-weight model".into()],
        });
    }
    let z: Vec<f64> = x.iter().map(|v| (v - center) / scale).collect();
    let d = design(&z, tau, m);
    let xm = DMatrix::from_fn(n_obs, m + 1, |i, j| if j == 0 { 1.0 } else { d.inputs[i * m + j - 1] });
    let (lin, _) = ols(&xm, &DVector::from_column_slice(&d.target))
        .ok_or_else(|| Error::Degenerate("linear start".into()))?;
    let mut penalize = vec![false; 1 + m];
    penalize.extend(std::iter::repeat(true).take(q * (m + 2)));
    let mut g = rng(seed);
    let mut best: Option<crate::optim::OptResult> = None;
    let warm = smaller.filter(|s| s.tau == tau && s.m == m && s.q + 1 == q && s.center == center && s.scale == scale);
    let starts = RESTARTS + usize::from(warm.is_some());
    for restart in 0..starts {
        let mut w0: Vec<f64> = lin.iter().copied().collect();
        if restart == RESTARTS {
            w0 = warm.expect("extra start only with a warm model").weights.clone();
            w0.push(0.0);
            w0.extend((0..m + 1).map(|_| 0.1 * g.sample::<f64, _>(StandardNormal)));
        }
        for _ in 0..if restart == RESTARTS { 0 } else { q } {
            if restart == 0 {
                w0.push(0.0);
                w0.extend((0..m + 1).map(|_| 0.1 * g.sample::<f64, _>(StandardNormal)));
                continue;
            }
            // random direction, with the tanh knee placed at a random training input
            let a: Vec<f64> = (0..m).map(|_| 2.0 * g.sample::<f64, _>(StandardNormal) / (m as f64).sqrt()).collect();
            let row = g.random_range(0..n_obs);
            let knee: f64 = a.iter().zip(&d.inputs[row * m..(row + 1) * m]).map(|(u, v)| u * v).sum();
            w0.push(g.sample::<f64, _>(StandardNormal));
            w0.push(-knee);
            w0.extend(a);
        }
        let res = levenberg_marquardt(|w| resid_jac(&d, q, w), &w0, &penalize, WEIGHT_DECAY, 500);
        if res.fx.is_finite() && best.as_ref().map_or(true, |b| res.fx < b.fx) {
            best = Some(res);
        }
        if q == 0 {
            break;
        }
    }
    let best = best.ok_or_else(|| Error::Degenerate("no finite fit in any restart".into()))?;
    let (r, _) = resid_jac(&d, q, &best.x);
    let rss = r.norm_squared() * scale * scale;
    let mut flags = Vec::new();
    if !best.converged {
        flags.push(format!("optimizer did not converge after {RESTARTS} restarts; best-so-far returned"));
    }
    let nf = n_obs as f64;
    Ok(NeuralArModel {
        tau,
        m,
        q,
        weights: best.x,
        center,
        scale,
        rss,
        n_obs,
        residual_var: rss / nf,
        bic: nf * (rss / nf).max(f64::MIN_POSITIVE).ln() + k as f64 * nf.ln(),
        converged: best.converged,
        flags,
    })
}

/// Local one-step log expansion rates along the training orbit. Equivalent to
/// ln|R_11| of the QR-accumulated product of companion Jacobians.
pub fn local_expansion_rates(model: &NeuralArModel, x: &[f64]) -> Vec<f64> {
    let (tau, m, q) = (model.tau, model.m, model.q);
    let dim = (m - 1) * tau + 1;
    if model.scale == 0.0 {
        return vec![f64::NEG_INFINITY; x.len().saturating_sub(dim)];
    }
    let z: Vec<f64> = x.iter().map(|v| (v - model.center) / model.scale).collect();
    let mut v = vec![0.0; dim];
    v[0] = 1.0;
    let mut grad = vec![0.0; m];
    let mut inputs = vec![0.0; m];
    let mut rates = Vec::with_capacity(z.len());
    for t in (m - 1) * tau..z.len() - 1 {
        for j in 0..m {
            inputs[j] = z[t - j * tau];
        }
        net_eval(&model.weights, m, q, &inputs, Some(&mut grad));
        let head: f64 = (0..m).map(|j| grad[j] * v[j * tau]).sum();
        v.rotate_right(1);
        v[0] = head;
        let norm = v.iter().map(|a| a * a).sum::<f64>().sqrt();
        if !(norm > 0.0) || !norm.is_finite() {
            rates.push(f64::NEG_INFINITY);
            v.iter_mut().for_each(|a| *a = 0.0);
            v[0] = 1.0;
            continue;
        }
        rates.push(norm.ln());
        v.iter_mut().for_each(|a| *a /= norm);
    }
    rates
}

/// Standard error of the mean of `rates` by the stationary bootstrap.
pub fn stationary_bootstrap_se(rates: &[f64], replicates: usize, seed: u64) -> f64 {
    let n = rates.len();
    if n < 2 {
        return 0.0;
    }
    let block = (n as f64).cbrt().max(1.0);
    let p = 1.0 / block;
    let mut g = rng(seed);
    let mut means = Vec::with_capacity(replicates);
    for _ in 0..replicates {
        let mut idx = g.random_range(0..n);
        let mut s = 0.0;
        for _ in 0..n {
            s += rates[idx];
            idx = if g.random::<f64>() < p { g.random_range(0..n) } else { (idx + 1) % n };
        }
        means.push(s / n as f64);
    }
    stats::sd(&means)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TripletSelection {
    /// Cell with the largest exponent.
    MaxLambda,
    /// Cell with the smallest network BIC.
    MinBic,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JacobianConfig {
    pub max_tau: usize,
    pub max_m: usize,
    pub max_q: usize,
    pub seed: u64,
    pub bootstrap: usize,
    pub selection: TripletSelection,
}

impl Default for JacobianConfig {
    fn default() -> Self {
        JacobianConfig { max_tau: 2, max_m: 7, max_q: 3, seed: 0, bootstrap: 499, selection: TripletSelection::MaxLambda }
    }
}

fn cell_seed(seed: u64, tau: usize, m: usize, q: usize) -> u64 {
    seed.wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ ((tau as u64) << 32 | (m as u64) << 16 | q as u64)
}

/// Grid search over (tau, m, q); reports the cell with the largest exponent
/// (or smallest BIC), ties going to the smallest m, then q, then tau.
pub fn jacobian_lambda(x: &[f64], cfg: &JacobianConfig) -> Result<LyapunovResult> {
    need(x.len(), 500)?;
    if cfg.max_tau == 0 || cfg.max_m == 0 || cfg.max_q == 0 {
        return Err(Error::InvalidInput("grid bounds must be >= 1".into()));
    }
    let mut grid = Vec::new();
    let mut best: Option<(f64, f64, usize, usize, usize, Vec<f64>)> = None;
    let mut flags = Vec::new();
    let mut smaller: std::collections::HashMap<(usize, usize), NeuralArModel> = std::collections::HashMap::new();
    for m in 1..=cfg.max_m {
        for q in 1..=cfg.max_q {
            for tau in 1..=cfg.max_tau {
                if m == 1 && tau > 1 {
                    continue;
                }
                let model = match fit_neural_ar_nested(x, tau, m, q, cell_seed(cfg.seed, tau, m, q), smaller.get(&(tau, m))) {
                    Ok(md) => md,
                    Err(e) => {
                        flags.push(format!("(tau={tau}, m={m}, q={q}) skipped: {e}"));
                        continue;
                    }
                };
                let rates = local_expansion_rates(&model, x);
                let lambda = rates.iter().sum::<f64>() / rates.len() as f64;
                if !lambda.is_finite() {
                    flags.push(format!("(tau={tau}, m={m}, q={q}) skipped: non-finite exponent"));
                    continue;
                }
                grid.push(GridCell { tau, m, q, lambda, bic: model.bic });
                let bic = model.bic;
                smaller.insert((tau, m), model);
                let better = match (&best, cfg.selection) {
                    (None, _) => true,
                    (Some(b), TripletSelection::MaxLambda) => lambda > b.0,
                    (Some(b), TripletSelection::MinBic) => bic < b.1,
                };
                if better {
                    best = Some((lambda, bic, tau, m, q, rates));
                }
            }
        }
    }
    let (lambda, _, tau, m, q, rates) = best.ok_or_else(|| Error::Degenerate("every grid cell failed".into()))?;
    let se = stationary_bootstrap_se(&rates, cfg.bootstrap, cfg.seed ^ 0xB007);
    let (p_value, ci_lower, verdict) = chaos_test(lambda, se);
    Ok(LyapunovResult {
        lambda_max: lambda,
        method: LyapunovMethod::Jacobian,
        triplet: Triplet { tau, m, q: Some(q) },
        se,
        ci_lower,
        p_value,
        verdict,
        curve: None,
        fit_range: None,
        per_m: vec![],
        grid,
        flags,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Predictability {
    /// 1/lambda in samples; None when lambda <= 0 (infinite horizon).
    pub horizon: Option<f64>,
    pub infinite: bool,
}

pub fn predictability(lambda: f64) -> Predictability {
    if lambda > 0.0 {
        Predictability { horizon: Some(1.0 / lambda), infinite: false }
    } else {
        Predictability { horizon: None, infinite: true }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntropyBound {
    pub holds: bool,
    /// Sum of positive exponents minus the entropy rate.
    pub margin: f64,
    pub vacuous: bool,
}

pub fn entropy_bound_check(entropy_rate: f64, lambdas: &[f64]) -> EntropyBound {
    let pos: f64 = lambdas.iter().filter(|&&l| l > 0.0).sum();
    let vacuous = !lambdas.iter().any(|&l| l > 0.0);
    if vacuous {
        return EntropyBound { holds: true, margin: pos - entropy_rate, vacuous };
    }
    EntropyBound { holds: entropy_rate <= pos, margin: pos - entropy_rate, vacuous }
}
