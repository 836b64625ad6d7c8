//! FFT helpers: periodogram and linear convolution.

use rustfft::{num_complex::Complex, FftPlanner};

/// Periodogram I(w_k) = |sum x_t e^{-i w_k t}|^2 / (2 pi N) at w_k = 2 pi k / N, k = 1..=N/2.
/// Returns (frequencies, ordinates).
pub fn periodogram(x: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let n = x.len();
    let m = x.iter().sum::<f64>() / n as f64;
    let mut buf: Vec<Complex<f64>> = x.iter().map(|v| Complex::new(v - m, 0.0)).collect();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    let half = n / 2;
    let norm = 2.0 * std::f64::consts::PI * n as f64;
    let freqs = (1..=half).map(|k| 2.0 * std::f64::consts::PI * k as f64 / n as f64).collect();
    let ords = (1..=half).map(|k| buf[k].norm_sqr() / norm).collect();
    (freqs, ords)
}

pub fn convolve(a: &[f64], b: &[f64]) -> Vec<f64> {
    let len = a.len() + b.len() - 1;
    let size = len.next_power_of_two();
    let mut planner = FftPlanner::new();
    let fwd = planner.plan_fft_forward(size);
    let inv = planner.plan_fft_inverse(size);
    let mut fa: Vec<Complex<f64>> = a.iter().map(|&v| Complex::new(v, 0.0)).collect();
    fa.resize(size, Complex::new(0.0, 0.0));
    let mut fb: Vec<Complex<f64>> = b.iter().map(|&v| Complex::new(v, 0.0)).collect();
    fb.resize(size, Complex::new(0.0, 0.0));
    fwd.process(&mut fa);
    fwd.process(&mut fb);
    for (x, y) in fa.iter_mut().zip(&fb) {
        *x *= y;
    }
    inv.process(&mut fa);
    fa[..len].iter().map(|c| c.re / size as f64).collect()
}
