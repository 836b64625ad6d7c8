//! Sparse seasonal ARMA conditional mean with GARCH, EGARCH or GJR variance,
//! fitted jointly by maximum likelihood.

use crate::error::{Error, Result};
use crate::optim::{bfgs, levenberg_marquardt, nelder_mead};
use crate::regress::ols;
use crate::stats;
pub use crate::synth::Family;
use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF};
use statrs::function::gamma::ln_gamma;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MeanSpec {
    pub ar_lags: Vec<usize>,
    pub ma_lags: Vec<usize>,
    pub d: usize,
    pub constant: bool,
}

impl MeanSpec {
    pub fn constant() -> Self {
        MeanSpec { ar_lags: vec![], ma_lags: vec![], d: 0, constant: true }
    }

    pub fn new(ar_lags: &[usize], ma_lags: &[usize], d: usize) -> Result<Self> {
        let spec = MeanSpec { ar_lags: ar_lags.to_vec(), ma_lags: ma_lags.to_vec(), d, constant: true };
        spec.validate()?;
        Ok(spec)
    }

    fn validate(&self) -> Result<()> {
        for lags in [&self.ar_lags, &self.ma_lags] {
            if lags.iter().any(|&l| l == 0) {
                return Err(Error::InvalidInput("lags must be positive".into()));
            }
            let mut s = lags.clone();
            s.sort_unstable();
            s.dedup();
            if s.len() != lags.len() {
                return Err(Error::InvalidInput("lags must be distinct".into()));
            }
        }
        if self.d > 1 {
            return Err(Error::InvalidInput("difference order must be 0 or 1".into()));
        }
        Ok(())
    }

    /// Parses e.g. `ar=1;sar=7,14,21;ma=1;sma=7,14,21;d=1`. Seasonal and plain
    /// lag lists are merged into one sparse lag set.
    pub fn parse(s: &str) -> Result<Self> {
        let mut spec = MeanSpec { ar_lags: vec![], ma_lags: vec![], d: 0, constant: true };
        for part in s.split(';').map(str::trim).filter(|p| !p.is_empty()) {
            let (key, val) = part
                .split_once('=')
                .ok_or_else(|| Error::InvalidInput(format!("expected key=value, got {part:?}")))?;
            let nums = || -> Result<Vec<usize>> {
                val.split(',')
                    .map(|v| v.trim().parse::<usize>().map_err(|_| Error::InvalidInput(format!("bad lag {v:?}"))))
                    .collect()
            };
            match key.trim() {
                "ar" | "sar" => spec.ar_lags.extend(nums()?),
                "ma" | "sma" => spec.ma_lags.extend(nums()?),
                "d" => spec.d = nums()?.first().copied().unwrap_or(0),
                "const" => spec.constant = val.trim() != "0" && val.trim() != "false",
                k => return Err(Error::InvalidInput(format!("unknown key {k:?}"))),
            }
        }
        spec.ar_lags.sort_unstable();
        spec.ma_lags.sort_unstable();
        spec.validate()?;
        Ok(spec)
    }

    fn n_params(&self) -> usize {
        self.constant as usize + self.ar_lags.len() + self.ma_lags.len()
    }

    fn start(&self) -> usize {
        self.ar_lags.iter().copied().max().unwrap_or(0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Innovation {
    Normal,
    StudentT,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct VarianceSpec {
    pub family: Family,
    pub innovation: Innovation,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeanFit {
    pub spec: MeanSpec,
    pub constant: f64,
    pub ar: Vec<(usize, f64)>,
    pub ma: Vec<(usize, f64)>,
    pub residuals: Vec<f64>,
    pub ar_max_root: f64,
    pub ma_max_root: f64,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub flags: Vec<String>,
}

fn difference(x: &[f64], d: usize) -> Vec<f64> {
    if d == 0 {
        x.to_vec()
    } else {
        x.windows(2).map(|w| w[1] - w[0]).collect()
    }
}

/// Conditional residuals for t >= start; pre-sample innovations are zero.
fn arma_residuals(y: &[f64], spec: &MeanSpec, theta: &[f64]) -> Vec<f64> {
    let start = spec.start();
    let c = if spec.constant { theta[0] } else { 0.0 };
    let o = spec.constant as usize;
    let phi = &theta[o..o + spec.ar_lags.len()];
    let th = &theta[o + spec.ar_lags.len()..];
    let mut eps = vec![0.0; y.len()];
    for t in start..y.len() {
        let mut e = y[t] - c;
        for (l, p) in spec.ar_lags.iter().zip(phi) {
            e -= p * y[t - l];
        }
        for (l, q) in spec.ma_lags.iter().zip(th) {
            if t >= *l {
                e -= q * eps[t - l];
            }
        }
        eps[t] = e;
    }
    eps.split_off(start)
}

/// Largest modulus among roots of 1 - sum c_i B^i, via companion eigenvalues.
fn max_companion_modulus(lags: &[usize], coef: &[f64]) -> f64 {
    let p = lags.iter().copied().max().unwrap_or(0);
    if p == 0 {
        return 0.0;
    }
    let mut m = DMatrix::<f64>::zeros(p, p);
    for (l, c) in lags.iter().zip(coef) {
        m[(0, l - 1)] = *c;
    }
    for i in 1..p {
        m[(i, i - 1)] = 1.0;
    }
    m.complex_eigenvalues().iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn numeric_jacobian(f: &dyn Fn(&[f64]) -> Vec<f64>, th: &[f64], r0: &[f64]) -> DMatrix<f64> {
    let mut j = DMatrix::zeros(r0.len(), th.len());
    let mut tp = th.to_vec();
    for k in 0..th.len() {
        let h = 1e-6 * th[k].abs().max(1e-3);
        tp[k] = th[k] + h;
        let r = f(&tp);
        tp[k] = th[k];
        for i in 0..r0.len() {
            j[(i, k)] = (r[i] - r0[i]) / h;
        }
    }
    j
}

/// Conditional least squares: Hannan-Rissanen start, Levenberg-Marquardt refinement.
pub fn fit_mean(returns: &[f64], spec: &MeanSpec) -> Result<MeanFit> {
    spec.validate()?;
    let y = difference(returns, spec.d);
    let k = spec.n_params();
    if y.len() < 10 * k.max(1) || y.len() <= spec.start() + 1 {
        return Err(Error::TooShort { need: 10 * k.max(1), got: y.len() });
    }
    let mut theta0 = vec![0.0; k];
    if k > 0 {
        // long autoregression for innovation proxies
        let long = if spec.ma_lags.is_empty() {
            0
        } else {
            (spec.start().max(*spec.ma_lags.iter().max().unwrap()) + 10).min(y.len() / 4)
        };
        let e_hat: Vec<f64> = if long > 0 {
            let rows = y.len() - long;
            let x = DMatrix::from_fn(rows, long + 1, |i, j| if j == 0 { 1.0 } else { y[i + long - j] });
            let yy = DVector::from_iterator(rows, y[long..].iter().copied());
            let (_, r) = ols(&x, &yy).ok_or_else(|| Error::Degenerate("long AR fit".into()))?;
            let mut e = vec![0.0; long];
            e.extend(r.iter());
            e
        } else {
            vec![0.0; y.len()]
        };
        let s = spec.start().max(spec.ma_lags.iter().copied().max().unwrap_or(0)).max(long);
        let rows = y.len() - s;
        let x = DMatrix::from_fn(rows, k, |i, j| {
            let t = i + s;
            let o = spec.constant as usize;
            if spec.constant && j == 0 {
                1.0
            } else if j < o + spec.ar_lags.len() {
                y[t - spec.ar_lags[j - o]]
            } else {
                e_hat[t - spec.ma_lags[j - o - spec.ar_lags.len()]]
            }
        });
        let yy = DVector::from_iterator(rows, y[s..].iter().copied());
        if let Some((b, _)) = ols(&x, &yy) {
            theta0 = b.iter().copied().collect();
        }
        let f = |th: &[f64]| arma_residuals(&y, spec, th);
        let rj = |th: &[f64]| {
            let r = f(th);
            let j = numeric_jacobian(&f, th, &r);
            (DVector::from_vec(r), j)
        };
        let res = levenberg_marquardt(rj, &theta0, &vec![false; k], 0.0, 200);
        if res.fx.is_finite() {
            theta0 = res.x;
        }
    }
    Ok(mean_fit_from(&y, spec, &theta0))
}

fn mean_fit_from(y: &[f64], spec: &MeanSpec, theta: &[f64]) -> MeanFit {
    let o = spec.constant as usize;
    let na = spec.ar_lags.len();
    let phi = &theta[o..o + na];
    let th = &theta[o + na..];
    let ar_max_root = max_companion_modulus(&spec.ar_lags, phi);
    let neg_th: Vec<f64> = th.iter().map(|v| -v).collect();
    let ma_max_root = max_companion_modulus(&spec.ma_lags, &neg_th);
    let mut flags = Vec::new();
    if ar_max_root >= 1.0 {
        flags.push(format!("explosive AR part: max root modulus {ar_max_root:.4}"));
    }
    if ma_max_root >= 1.0 {
        flags.push(format!("non-invertible MA part: max root modulus {ma_max_root:.4}"));
    }
    MeanFit {
        spec: spec.clone(),
        constant: if spec.constant { theta[0] } else { 0.0 },
        ar: spec.ar_lags.iter().copied().zip(phi.iter().copied()).collect(),
        ma: spec.ma_lags.iter().copied().zip(th.iter().copied()).collect(),
        residuals: arma_residuals(y, spec, theta),
        ar_max_root,
        ma_max_root,
        flags,
    }
}

/// E|z| of a unit-variance innovation.
pub fn expected_abs(innovation: Innovation, nu: f64) -> f64 {
    match innovation {
        Innovation::Normal => crate::synth::E_ABS_NORMAL,
        Innovation::StudentT => {
            let l = ln_gamma((nu + 1.0) / 2.0) - ln_gamma(nu / 2.0);
            2.0 * (nu - 2.0).sqrt() * l.exp() / ((nu - 1.0) * std::f64::consts::PI.sqrt())
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VarianceParams {
    pub k: f64,
    pub gamma: f64,
    pub alpha: f64,
    pub xi: f64,
    pub nu: Option<f64>,
}

/// Conditional variances for residuals `eps`, started from `s2_init` with eps_{-1} = 0.
pub fn variance_path(family: Family, p: &VarianceParams, eps: &[f64], s2_init: f64, e_abs: f64) -> Option<Vec<f64>> {
    let mut out = Vec::with_capacity(eps.len());
    let mut s2 = s2_init;
    let mut e_prev = 0.0;
    for &e in eps {
        s2 = match family {
            Family::Garch => p.k + p.gamma * s2 + p.alpha * e_prev * e_prev,
            Family::Gjr => {
                let lev = if e_prev < 0.0 { p.xi } else { 0.0 };
                p.k + p.gamma * s2 + (p.alpha + lev) * e_prev * e_prev
            }
            Family::Egarch => {
                let z = e_prev / s2.sqrt();
                let l = p.k + p.gamma * s2.ln() + p.alpha * (z.abs() - e_abs) + p.xi * z;
                if !(l.abs() < 700.0) {
                    return None;
                }
                l.exp()
            }
        };
        if !(s2 > 0.0 && s2.is_finite()) {
            return None;
        }
        out.push(s2);
        e_prev = e;
    }
    Some(out)
}

fn loglik_terms(eps: &[f64], s2: &[f64], innovation: Innovation, nu: f64) -> f64 {
    let ln2pi = (2.0 * std::f64::consts::PI).ln();
    match innovation {
        Innovation::Normal => eps.iter().zip(s2).map(|(e, v)| -0.5 * (ln2pi + v.ln() + e * e / v)).sum(),
        Innovation::StudentT => {
            let c = ln_gamma((nu + 1.0) / 2.0) - ln_gamma(nu / 2.0) - 0.5 * (std::f64::consts::PI * (nu - 2.0)).ln();
            eps.iter()
                .zip(s2)
                .map(|(e, v)| c - 0.5 * v.ln() - (nu + 1.0) / 2.0 * (1.0 + e * e / (v * (nu - 2.0))).ln())
                .sum()
        }
    }
}

struct Layout {
    mean: MeanSpec,
    var: VarianceSpec,
}

impl Layout {
    fn n_mean(&self) -> usize {
        self.mean.n_params()
    }

    fn split<'a>(&self, p: &'a [f64]) -> (&'a [f64], VarianceParams) {
        let (m, v) = p.split_at(self.n_mean());
        let xi = if self.var.family == Family::Garch { 0.0 } else { v[3] };
        let nu = (self.var.innovation == Innovation::StudentT).then(|| v[v.len() - 1]);
        (m, VarianceParams { k: v[0], gamma: v[1], alpha: v[2], xi, nu })
    }

    /// Unconstrained -> natural parameters.
    fn to_natural(&self, u: &[f64]) -> Vec<f64> {
        let nm = self.n_mean();
        let mut p = u[..nm].to_vec();
        let v = &u[nm..];
        match self.var.family {
            Family::Egarch => {
                p.extend([v[0], v[1].tanh(), v[2], v[3]]);
            }
            Family::Garch | Family::Gjr => {
                let nshare = if self.var.family == Family::Garch { 2 } else { 3 };
                let e: Vec<f64> = v[1..1 + nshare].iter().map(|x| x.clamp(-50.0, 50.0).exp()).collect();
                let denom = 1.0 + e.iter().sum::<f64>();
                p.push(v[0].exp());
                p.push(e[0] / denom);
                p.push(e[1] / denom);
                if nshare == 3 {
                    p.push(2.0 * e[2] / denom);
                }
            }
        }
        if self.var.innovation == Innovation::StudentT {
            p.push(2.1 + v[v.len() - 1].clamp(-30.0, 30.0).exp());
        }
        p
    }

    fn to_unconstrained(&self, p: &[f64]) -> Vec<f64> {
        let nm = self.n_mean();
        let mut u = p[..nm].to_vec();
        let v = &p[nm..];
        match self.var.family {
            Family::Egarch => u.extend([v[0], v[1].clamp(-0.999999, 0.999999).atanh(), v[2], v[3]]),
            Family::Garch | Family::Gjr => {
                let mut shares = vec![v[1].max(1e-8), v[2].max(1e-8)];
                if self.var.family == Family::Gjr {
                    shares.push((v[3] / 2.0).max(1e-8));
                }
                let total: f64 = shares.iter().sum();
                if total >= 0.9999 {
                    shares.iter_mut().for_each(|s| *s *= 0.9999 / total);
                }
                let slack = 1.0 - shares.iter().sum::<f64>();
                u.push(v[0].max(1e-300).ln());
                u.extend(shares.iter().map(|s| (s / slack).ln()));
            }
        }
        if self.var.innovation == Innovation::StudentT {
            u.push((v[v.len() - 1] - 2.1).max(1e-8).ln());
        }
        u
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VolatilityFit {
    pub mean: MeanFit,
    pub variance: VarianceSpec,
    pub k: f64,
    pub gamma: f64,
    pub alpha: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub xi: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub nu: Option<f64>,
    pub loglik: f64,
    pub aic: f64,
    pub bic: f64,
    pub n_params: usize,
    pub n_obs: usize,
    pub sigma: Vec<f64>,
    pub std_resid: Vec<f64>,
    pub arch_lm_p: f64,
    pub converged: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub std_errors: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub flags: Vec<String>,
}

impl VolatilityFit {
    pub fn params(&self) -> VarianceParams {
        VarianceParams { k: self.k, gamma: self.gamma, alpha: self.alpha, xi: self.xi.unwrap_or(0.0), nu: self.nu }
    }
}

fn neg_loglik(layout: &Layout, y: &[f64], p: &[f64]) -> f64 {
    let (m, vp) = layout.split(p);
    let eps = arma_residuals(y, &layout.mean, m);
    let s2_init = stats::var(&eps);
    if !(s2_init > 0.0) {
        return f64::INFINITY;
    }
    let nu = vp.nu.unwrap_or(f64::INFINITY);
    let e_abs = expected_abs(layout.var.innovation, nu);
    match variance_path(layout.var.family, &vp, &eps, s2_init, e_abs) {
        Some(s2) => {
            let ll = loglik_terms(&eps, &s2, layout.var.innovation, nu);
            if ll.is_finite() {
                -ll
            } else {
                f64::INFINITY
            }
        }
        None => f64::INFINITY,
    }
}

fn starting_points(var: VarianceSpec, s2: f64) -> Vec<Vec<f64>> {
    let mut starts: Vec<Vec<f64>> = match var.family {
        Family::Garch => [(0.05, 0.90), (0.10, 0.80), (0.20, 0.50), (0.02, 0.50)]
            .iter()
            .map(|&(a, g)| vec![s2 * (1.0 - a - g), g, a])
            .collect(),
        Family::Gjr => [(0.05, 0.90, 0.02), (0.10, 0.80, 0.05), (0.20, 0.50, 0.10), (0.02, 0.50, 0.01)]
            .iter()
            .map(|&(a, g, x)| vec![s2 * (1.0 - a - g - x / 2.0), g, a, x])
            .collect(),
        Family::Egarch => [(0.90, 0.2, 0.0), (0.95, 0.1, -0.05), (0.70, 0.3, 0.0), (0.5, 0.1, 0.0)]
            .iter()
            .map(|&(g, a, x)| vec![(1.0 - g) * s2.ln(), g, a, x])
            .collect(),
    };
    if var.innovation == Innovation::StudentT {
        starts.iter_mut().for_each(|s| s.push(8.0));
    }
    starts
}

fn numeric_hessian(f: &dyn Fn(&[f64]) -> f64, x: &[f64]) -> DMatrix<f64> {
    let n = x.len();
    let mut h = DMatrix::zeros(n, n);
    let step: Vec<f64> = x.iter().map(|v| 1e-4 * v.abs().max(1e-2)).collect();
    let mut xp = x.to_vec();
    let f0 = f(x);
    for i in 0..n {
        for j in i..n {
            let mut eval = |di: f64, dj: f64| {
                xp[i] += di * step[i];
                xp[j] += dj * step[j];
                let v = f(&xp);
                xp[i] = x[i];
                xp[j] = x[j];
                v
            };
            let v = if i == j {
                (eval(1.0, 0.0) - 2.0 * f0 + eval(-1.0, 0.0)) / (step[i] * step[i])
            } else {
                (eval(1.0, 1.0) - eval(1.0, -1.0) - eval(-1.0, 1.0) + eval(-1.0, -1.0)) / (4.0 * step[i] * step[j])
            };
            h[(i, j)] = v;
            h[(j, i)] = v;
        }
    }
    h
}

/// Joint maximum likelihood of the mean and variance equations.
pub fn fit_model(returns: &[f64], mean: &MeanSpec, var: VarianceSpec) -> Result<VolatilityFit> {
    if returns.len() < 300 {
        return Err(Error::TooShort { need: 300, got: returns.len() });
    }
    let mfit = fit_mean(returns, mean)?;
    let y = difference(returns, mean.d);
    let layout = Layout { mean: mean.clone(), var };
    let s2 = stats::var(&mfit.residuals);
    if !(s2 > 0.0) {
        return Err(Error::Degenerate("zero residual variance".into()));
    }
    let mut mean_theta: Vec<f64> = Vec::new();
    if mean.constant {
        mean_theta.push(mfit.constant);
    }
    mean_theta.extend(mfit.ar.iter().map(|x| x.1));
    mean_theta.extend(mfit.ma.iter().map(|x| x.1));

    let nm = mean_theta.len();
    let full = |u_var: &[f64]| {
        let mut u = mean_theta.clone();
        u.extend_from_slice(u_var);
        u
    };
    let obj_var = |u_var: &[f64]| neg_loglik(&layout, &y, &layout.to_natural(&full(u_var)));
    let mut best: Option<(Vec<f64>, f64)> = None;
    for start in starting_points(var, s2) {
        let mut nat = mean_theta.clone();
        nat.extend(start);
        let u0 = layout.to_unconstrained(&nat)[nm..].to_vec();
        let r = nelder_mead(obj_var, &u0, 0.3, 600, 1e-9);
        if r.fx.is_finite() && best.as_ref().map_or(true, |b| r.fx < b.1) {
            best = Some((r.x, r.fx));
        }
    }
    let (u_var, _) = best.ok_or_else(|| Error::Degenerate("no finite likelihood at any start".into()))?;
    let obj = |u: &[f64]| neg_loglik(&layout, &y, &layout.to_natural(u));
    let polish = bfgs(obj, &full(&u_var), 300, 1e-5);
    let nat = layout.to_natural(&polish.x);
    let nll = neg_loglik(&layout, &y, &nat);
    if !nll.is_finite() {
        return Err(Error::Degenerate("likelihood not finite at optimum".into()));
    }
    let mut flags = Vec::new();
    if !polish.converged {
        flags.push("optimizer did not converge; best-so-far returned".to_string());
    }
    let nat_obj = |p: &[f64]| neg_loglik(&layout, &y, p);
    let hess = numeric_hessian(&nat_obj, &nat);
    let std_errors = hess.clone().cholesky().map(|c| c.inverse().diagonal().iter().map(|v| v.sqrt()).collect::<Vec<_>>());
    if std_errors.is_none() {
        flags.push("Hessian not positive definite; standard errors omitted".to_string());
    }
    let (m, vp) = layout.split(&nat);
    let final_mean = mean_fit_from(&y, mean, m);
    let eps = final_mean.residuals.clone();
    let e_abs = expected_abs(var.innovation, vp.nu.unwrap_or(f64::INFINITY));
    let s2_path = variance_path(var.family, &vp, &eps, stats::var(&eps), e_abs)
        .ok_or_else(|| Error::Degenerate("variance recursion failed".into()))?;
    let sigma: Vec<f64> = s2_path.iter().map(|v| v.sqrt()).collect();
    let std_resid: Vec<f64> = eps.iter().zip(&sigma).map(|(e, s)| e / s).collect();
    match var.family {
        Family::Egarch if vp.gamma.abs() >= 1.0 => flags.push("EGARCH persistence |gamma| >= 1".into()),
        Family::Garch if vp.gamma + vp.alpha >= 1.0 => flags.push("gamma + alpha >= 1".into()),
        _ => {}
    }
    let n_params = nat.len();
    let n_obs = eps.len();
    let loglik = -nll;
    let arch_lm_p = arch_lm_test(&std_resid, 5).unwrap_or(f64::NAN);
    Ok(VolatilityFit {
        mean: final_mean,
        variance: var,
        k: vp.k,
        gamma: vp.gamma,
        alpha: vp.alpha,
        xi: (var.family != Family::Garch).then_some(vp.xi),
        nu: vp.nu,
        loglik,
        aic: -2.0 * loglik + 2.0 * n_params as f64,
        bic: -2.0 * loglik + n_params as f64 * (n_obs as f64).ln(),
        n_params,
        n_obs,
        sigma,
        std_resid,
        arch_lm_p,
        converged: polish.converged,
        std_errors,
        flags,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Candidate {
    pub mean: MeanSpec,
    pub variance: VarianceSpec,
}

/// The nine-specification menu: three sparse seasonal ARMA means crossed with
/// GARCH, EGARCH and GJR; Normal innovations for the first two, Student-t for the third.
pub fn default_candidates() -> Vec<Candidate> {
    let means = [
        (MeanSpec::new(&[1, 2, 7, 14], &[1, 2, 7, 14], 0).unwrap(), Innovation::Normal),
        (MeanSpec::new(&[1, 2, 7, 14, 21], &[1, 7, 14, 21], 0).unwrap(), Innovation::Normal),
        (MeanSpec::new(&[1, 7, 14, 21], &[1, 7, 14, 21], 0).unwrap(), Innovation::StudentT),
    ];
    means
        .iter()
        .flat_map(|(m, inn)| {
            [Family::Garch, Family::Egarch, Family::Gjr]
                .into_iter()
                .map(move |family| Candidate { mean: m.clone(), variance: VarianceSpec { family, innovation: *inn } })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Selection {
    /// Ranked by AIC, ties broken by BIC.
    pub ranked: Vec<VolatilityFit>,
    pub failed: Vec<(Candidate, String)>,
}

pub fn select_model(returns: &[f64], candidates: &[Candidate]) -> Result<Selection> {
    let mut ranked = Vec::new();
    let mut failed = Vec::new();
    for c in candidates {
        match fit_model(returns, &c.mean, c.variance) {
            Ok(f) => ranked.push(f),
            Err(e) => failed.push((c.clone(), e.to_string())),
        }
    }
    if ranked.is_empty() {
        return Err(Error::Degenerate("every candidate failed".into()));
    }
    ranked.sort_by(|a, b| a.aic.total_cmp(&b.aic).then(a.bic.total_cmp(&b.bic)));
    Ok(Selection { ranked, failed })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ShockSign {
    Negative,
    Positive,
}

/// Response to a shock of the given sign: alpha + xi for negative, alpha - xi for positive.
pub fn shock_coefficient(alpha: f64, xi: f64, sign: ShockSign) -> f64 {
    match sign {
        ShockSign::Negative => alpha + xi,
        ShockSign::Positive => alpha - xi,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UnconditionalVariance {
    pub value: f64,
    pub approximate: bool,
}

pub fn unconditional_variance(family: Family, p: &VarianceParams, seed: u64) -> Result<UnconditionalVariance> {
    match family {
        Family::Garch | Family::Gjr => {
            let persistence = p.gamma + p.alpha + if family == Family::Gjr { p.xi / 2.0 } else { 0.0 };
            if persistence >= 1.0 {
                return Err(Error::NonStationary(format!("persistence {persistence} >= 1")));
            }
            Ok(UnconditionalVariance { value: p.k / (1.0 - persistence), approximate: false })
        }
        Family::Egarch => {
            if p.gamma.abs() >= 1.0 {
                return Err(Error::NonStationary("|gamma| >= 1".into()));
            }
            let g = crate::synth::gen_garch_family(Family::Egarch, p.k, p.gamma, p.alpha, p.xi, 200_000, seed)?;
            let s = g.sigma.unwrap();
            Ok(UnconditionalVariance { value: s.iter().map(|v| v * v).sum::<f64>() / s.len() as f64, approximate: true })
        }
    }
}

/// Engle's LM test: n R^2 from regressing e_t^2 on its own lags; chi-square(lags) p-value.
pub fn arch_lm_test(resid: &[f64], lags: usize) -> Result<f64> {
    if resid.len() < 100 {
        return Err(Error::TooShort { need: 100, got: resid.len() });
    }
    if lags == 0 {
        return Err(Error::InvalidInput("lags must be >= 1".into()));
    }
    let e2: Vec<f64> = resid.iter().map(|e| e * e).collect();
    let n = e2.len() - lags;
    let y = DVector::from_iterator(n, e2[lags..].iter().copied());
    let ym = y.mean();
    let tss: f64 = y.iter().map(|v| (v - ym) * (v - ym)).sum();
    if !(tss > 1e-300) {
        return Err(Error::Degenerate("squared residuals are constant".into()));
    }
    let x = DMatrix::from_fn(n, lags + 1, |i, j| if j == 0 { 1.0 } else { e2[i + lags - j] });
    let (_, r) = ols(&x, &y).ok_or_else(|| Error::Degenerate("ARCH regression".into()))?;
    let r2 = (1.0 - r.norm_squared() / tss).max(0.0);
    let lm = n as f64 * r2;
    let chi = ChiSquared::new(lags as f64).map_err(|e| Error::InvalidInput(e.to_string()))?;
    Ok(chi.sf(lm))
}
