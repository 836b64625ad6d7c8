//! Minimal unconstrained optimizers: Nelder-Mead, BFGS with numeric gradients,
//! and Levenberg-Marquardt for least squares.

use nalgebra::{DMatrix, DVector};

#[derive(Debug, Clone)]
pub struct OptResult {
    pub x: Vec<f64>,
    pub fx: f64,
    pub iters: usize,
    pub converged: bool,
}

pub fn nelder_mead<F: Fn(&[f64]) -> f64>(
    f: F,
    x0: &[f64],
    step: f64,
    max_iter: usize,
    tol: f64,
) -> OptResult {
    let n = x0.len();
    let eval = |x: &[f64]| {
        let v = f(x);
        if v.is_finite() {
            v
        } else {
            f64::INFINITY
        }
    };
    let mut simplex: Vec<Vec<f64>> = vec![x0.to_vec()];
    for i in 0..n {
        let mut p = x0.to_vec();
        p[i] += if p[i].abs() > 1e-8 { step * p[i].abs().max(0.1) } else { step };
        simplex.push(p);
    }
    let mut fv: Vec<f64> = simplex.iter().map(|p| eval(p)).collect();
    let mut iters = 0;
    let mut converged = false;
    while iters < max_iter {
        iters += 1;
        let mut idx: Vec<usize> = (0..=n).collect();
        idx.sort_by(|&a, &b| fv[a].total_cmp(&fv[b]));
        simplex = idx.iter().map(|&i| simplex[i].clone()).collect();
        fv = idx.iter().map(|&i| fv[i]).collect();
        if (fv[n] - fv[0]).abs() <= tol * (fv[0].abs() + tol) {
            converged = true;
            break;
        }
        let mut c = vec![0.0; n];
        for p in &simplex[..n] {
            for j in 0..n {
                c[j] += p[j] / n as f64;
            }
        }
        let at = |t: f64| -> Vec<f64> { (0..n).map(|j| c[j] + t * (simplex[n][j] - c[j])).collect() };
        let xr = at(-1.0);
        let fr = eval(&xr);
        if fr < fv[0] {
            let xe = at(-2.0);
            let fe = eval(&xe);
            if fe < fr {
                simplex[n] = xe;
                fv[n] = fe;
            } else {
                simplex[n] = xr;
                fv[n] = fr;
            }
        } else if fr < fv[n - 1] {
            simplex[n] = xr;
            fv[n] = fr;
        } else {
            let (xc, fc) = if fr < fv[n] {
                let x = at(-0.5);
                let v = eval(&x);
                (x, v)
            } else {
                let x = at(0.5);
                let v = eval(&x);
                (x, v)
            };
            if fc < fv[n].min(fr) {
                simplex[n] = xc;
                fv[n] = fc;
            } else {
                let best = simplex[0].clone();
                for i in 1..=n {
                    for j in 0..n {
                        simplex[i][j] = best[j] + 0.5 * (simplex[i][j] - best[j]);
                    }
                    fv[i] = eval(&simplex[i]);
                }
            }
        }
    }
    let (bi, _) = fv
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .unwrap();
    OptResult { x: simplex[bi].clone(), fx: fv[bi], iters, converged }
}

pub fn num_grad<F: Fn(&[f64]) -> f64>(f: &F, x: &[f64]) -> Vec<f64> {
    let mut g = vec![0.0; x.len()];
    let mut xp = x.to_vec();
    for i in 0..x.len() {
        let h = 1e-5 * x[i].abs().max(1e-2);
        xp[i] = x[i] + h;
        let fp = f(&xp);
        xp[i] = x[i] - h;
        let fm = f(&xp);
        xp[i] = x[i];
        g[i] = (fp - fm) / (2.0 * h);
    }
    g
}

/// BFGS with central-difference gradients and backtracking line search.
pub fn bfgs<F: Fn(&[f64]) -> f64>(f: F, x0: &[f64], max_iter: usize, gtol: f64) -> OptResult {
    let n = x0.len();
    let mut x = DVector::from_column_slice(x0);
    let mut fx = f(x.as_slice());
    if !fx.is_finite() {
        return OptResult { x: x0.to_vec(), fx, iters: 0, converged: false };
    }
    let mut g = DVector::from_vec(num_grad(&f, x.as_slice()));
    let mut h = DMatrix::<f64>::identity(n, n);
    let mut converged = false;
    let mut iters = 0;
    while iters < max_iter {
        iters += 1;
        if g.amax() < gtol {
            converged = true;
            break;
        }
        let mut p = -(&h * &g);
        if p.dot(&g) >= 0.0 {
            h = DMatrix::identity(n, n);
            p = -g.clone();
        }
        let mut t = 1.0;
        let slope = p.dot(&g);
        let mut accepted = None;
        for _ in 0..40 {
            let xn = &x + t * &p;
            let fnew = f(xn.as_slice());
            if fnew.is_finite() && fnew <= fx + 1e-4 * t * slope {
                accepted = Some((xn, fnew));
                break;
            }
            t *= 0.5;
        }
        let Some((xn, fnew)) = accepted else {
            converged = g.amax() < gtol.sqrt();
            break;
        };
        let gn = DVector::from_vec(num_grad(&f, xn.as_slice()));
        let s = &xn - &x;
        let y = &gn - &g;
        let sy = s.dot(&y);
        let df = fx - fnew;
        x = xn;
        g = gn;
        fx = fnew;
        if sy > 1e-12 {
            let rho = 1.0 / sy;
            let i = DMatrix::<f64>::identity(n, n);
            let a = &i - rho * &s * y.transpose();
            let b = &i - rho * &y * s.transpose();
            h = &a * &h * &b + rho * &s * s.transpose();
        }
        if df.abs() < 1e-14 * (1.0 + fx.abs()) {
            converged = true;
            break;
        }
    }
    OptResult { x: x.as_slice().to_vec(), fx, iters, converged }
}

/// Levenberg-Marquardt on a residual function with analytic Jacobian.
/// `resid_jac` fills residuals r (len n) and Jacobian J (n x p) at theta.
/// `ridge` adds ridge * theta_i^2 penalty for indices flagged in `penalize`.
pub fn levenberg_marquardt<F>(
    resid_jac: F,
    theta0: &[f64],
    penalize: &[bool],
    ridge: f64,
    max_iter: usize,
) -> OptResult
where
    F: Fn(&[f64]) -> (DVector<f64>, DMatrix<f64>),
{
    let p = theta0.len();
    let cost = |th: &[f64], r: &DVector<f64>| -> f64 {
        let pen: f64 = th
            .iter()
            .zip(penalize)
            .filter(|(_, &b)| b)
            .map(|(v, _)| v * v)
            .sum();
        r.norm_squared() + ridge * pen
    };
    let mut th = DVector::from_column_slice(theta0);
    let (mut r, mut j) = resid_jac(th.as_slice());
    let mut c = cost(th.as_slice(), &r);
    let mut mu = 1e-3;
    let mut iters = 0;
    let mut converged = false;
    let mut stalls = 0;
    let pen_diag = DVector::from_iterator(p, penalize.iter().map(|&b| if b { ridge } else { 0.0 }));
    while iters < max_iter {
        iters += 1;
        let jt = j.transpose();
        let mut a = &jt * &j;
        let mut g = &jt * &r;
        for i in 0..p {
            a[(i, i)] += pen_diag[i];
            g[i] += pen_diag[i] * th[i];
        }
        if g.amax() < 1e-12 {
            converged = true;
            break;
        }
        let mut improved = false;
        for _ in 0..20 {
            let mut am = a.clone();
            for i in 0..p {
                am[(i, i)] += mu * (a[(i, i)].max(1e-12));
            }
            let Some(chol) = am.cholesky() else {
                mu *= 10.0;
                continue;
            };
            let step = chol.solve(&(-&g));
            let tn = &th + &step;
            let (rn, jn) = resid_jac(tn.as_slice());
            let cn = cost(tn.as_slice(), &rn);
            if cn.is_finite() && cn < c {
                let rel = (c - cn) / c.max(1e-300);
                th = tn;
                r = rn;
                j = jn;
                c = cn;
                mu = (mu * 0.3).max(1e-12);
                improved = true;
                stalls = if rel < 1e-12 { stalls + 1 } else { 0 };
                if stalls >= 5 {
                    converged = true;
                }
                break;
            }
            mu *= 10.0;
        }
        if !improved || converged {
            converged = converged || !improved;
            break;
        }
    }
    OptResult { x: th.as_slice().to_vec(), fx: c, iters, converged }
}
