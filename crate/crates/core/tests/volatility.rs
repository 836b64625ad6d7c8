use emhkit::synth::{gen_ar1, gen_garch_family, Family};
use emhkit::volatility::*;

fn normal() -> Innovation {
    Innovation::Normal
}

#[test]
fn ar1_mean_recovered() {
    let x = gen_ar1(0.6, 1.0, 4000, 11).unwrap();
    let f = fit_mean(&x, &MeanSpec::new(&[1], &[], 0).unwrap()).unwrap();
    assert!((f.ar[0].1 - 0.6).abs() < 0.05, "{:?}", f.ar);
    let m = emhkit::stats::mean(&f.residuals);
    assert!(m.abs() < 0.01 * emhkit::stats::sd(&f.residuals));
}

#[test]
fn arma_mean_recovered() {
    // x_t = 0.5 x_{t-1} + e_t + 0.4 e_{t-7}
    let e = emhkit::synth::normals(6000, 3);
    let mut x = vec![0.0; e.len()];
    for t in 0..e.len() {
        x[t] = e[t] + if t >= 1 { 0.5 * x[t - 1] } else { 0.0 } + if t >= 7 { 0.4 * e[t - 7] } else { 0.0 };
    }
    let f = fit_mean(&x, &MeanSpec::new(&[1], &[7], 0).unwrap()).unwrap();
    assert!((f.ar[0].1 - 0.5).abs() < 0.05, "{:?}", f.ar);
    assert!((f.ma[0].1 - 0.4).abs() < 0.05, "{:?}", f.ma);
    assert!(f.ar_max_root < 1.0 && f.ma_max_root < 1.0);
}

#[test]
fn egarch_recovered() {
    let g = gen_garch_family(Family::Egarch, -0.1, 0.9, 0.3, -0.07, 8000, 5).unwrap();
    let t = std::time::Instant::now();
    let f = fit_model(&g.values, &MeanSpec::constant(), VarianceSpec { family: Family::Egarch, innovation: normal() }).unwrap();
    eprintln!("{:?} {} {} {} {:?} {:?}", t.elapsed(), f.k, f.gamma, f.alpha, f.xi, f.std_errors);
    assert!((f.gamma - 0.9).abs() < 0.05);
    assert!((f.xi.unwrap() + 0.07).abs() < 0.04);
    assert!(f.arch_lm_p > 0.01);
}

#[test]
fn homoskedastic_noise_has_no_arch() {
    let x = gen_ar1(0.0, 1.0, 3000, 8).unwrap();
    let f = fit_model(&x, &MeanSpec::constant(), VarianceSpec { family: Family::Garch, innovation: normal() }).unwrap();
    assert!(f.alpha < 0.05, "alpha {}", f.alpha);
}

#[test]
fn garch_recovered_and_selected() {
    let g = gen_garch_family(Family::Garch, 0.05, 0.85, 0.1, 0.0, 6000, 9).unwrap();
    let f = fit_model(&g.values, &MeanSpec::constant(), VarianceSpec { family: Family::Garch, innovation: normal() }).unwrap();
    assert!((f.gamma - 0.85).abs() < 0.05, "{}", f.gamma);
    assert!((f.alpha - 0.1).abs() < 0.03, "{}", f.alpha);
    let u = unconditional_variance(Family::Garch, &f.params(), 0).unwrap();
    assert!((u.value - 1.0).abs() < 0.3);
}

#[test]
fn student_t_tail_recovered() {
    use rand::SeedableRng;
    use rand_distr::{Distribution, StudentT};
    let mut rng = rand_chacha::ChaCha20Rng::seed_from_u64(4);
    let t = StudentT::new(5.0).unwrap();
    let x: Vec<f64> = (0..5000).map(|_| t.sample(&mut rng) * (3.0f64 / 5.0).sqrt()).collect();
    let f = fit_model(&x, &MeanSpec::constant(), VarianceSpec { family: Family::Garch, innovation: Innovation::StudentT }).unwrap();
    let nu = f.nu.unwrap();
    assert!((3.5..8.0).contains(&nu), "nu {nu}");
}
