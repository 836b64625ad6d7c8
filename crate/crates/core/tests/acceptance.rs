//! Acceptance run: prints one PASS/FAIL line per criterion and exits nonzero if any fails.

use emhkit::bds::bds_test;
use emhkit::entropy::*;
use emhkit::hurst::*;
use emhkit::lyapunov::*;
use emhkit::market::{correlation_matrix, AnnualPanel};
use emhkit::pipeline::{run_pipeline, RunManifest};
use emhkit::series::Frequency;
use emhkit::synth::*;
use emhkit::volatility::*;
use rand::Rng;
use sha2::{Digest, Sha256};
use std::collections::BTreeMap;
use std::path::Path;
use std::time::Instant;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

fn hurst_recovery() -> Outcome {
    let start = Instant::now();
    let taus: Vec<usize> = DEFAULT_TAU_MAX.collect();
    let mut pass = true;
    let mut parts = Vec::new();
    for &h in &[0.3, 0.5, 0.7] {
        let mut est: BTreeMap<&str, Vec<f64>> = BTreeMap::new();
        for seed in 0..30 {
            let x = gen_fgn(h, 8192, seed).unwrap().values;
            let mut p = 0.0;
            let prices: Vec<f64> = x.iter().map(|v| {
                p += v;
                p
            }).collect();
            est.entry("rs").or_default().push(rs_hurst_corrected(&x, None).unwrap().h);
            est.entry("dfa").or_default().push(dfa(&x, None, 1).unwrap().h);
            est.entry("ghe").or_default().push(ghe(&prices, &[1.0], &taus).unwrap()[0].h);
            est.entry("gph").or_default().push(gph(&x, 0.65).unwrap().h);
        }
        for (name, v) in &est {
            let m = mean(v);
            let worst = v.iter().map(|e| (e - h).abs()).fold(0.0, f64::max);
            let ok = (m - h).abs() <= 0.05 && worst <= 0.10;
            pass &= ok;
            parts.push(format!("H={h} {name} mean={m:.3} worst={worst:.3}{}", if ok { "" } else { " !" }));
        }
    }
    let secs = start.elapsed().as_secs_f64();
    pass &= secs < 60.0;
    parts.push(format!("{secs:.1}s"));
    outcome(pass, parts.join("; "))
}

fn rs_expectation() -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for (i, &n) in [10usize, 50, 200, 500].iter().enumerate() {
        let batch = 1000;
        let mut sum = 0.0;
        for b in 0..100 {
            let x = normals(n * batch, 1000 * i as u64 + b);
            sum += rescaled_range(&x, n).unwrap();
        }
        let mc = sum / 100.0;
        let e = rs_expected(n).unwrap();
        let rel = (e - mc).abs() / mc;
        pass &= rel < 0.01;
        parts.push(format!("n={n} formula={e:.4} mc={mc:.4} rel={rel:.4}"));
    }
    outcome(pass, parts.join("; "))
}

fn gph_arfima() -> Outcome {
    let v: Vec<f64> = (0..30).map(|s| gph(&gen_arfima(0.3, 8192, s).unwrap(), 0.5).unwrap().h).collect();
    let m = mean(&v);
    outcome((m - 0.8).abs() <= 0.03, format!("mean H={m:.4}"))
}

fn bds_size_power() -> Outcome {
    let runs = 200;
    let mut rejections = [0usize; 5];
    let mut power_ok = true;
    let mut worst_p: f64 = 0.0;
    for seed in 0..runs {
        let r = bds_test(&normals(2000, seed), 6, 0.5).unwrap();
        for d in &r.dims {
            if d.p_value < 0.05 {
                rejections[d.m - 2] += 1;
            }
        }
        let l = bds_test(&logistic(4.0, 2000, seed), 6, 0.5).unwrap();
        for d in &l.dims {
            worst_p = worst_p.max(d.p_value);
            power_ok &= d.p_value < 1e-6;
        }
    }
    let rates: Vec<f64> = rejections.iter().map(|&c| c as f64 / runs as f64).collect();
    let size_ok = rates.iter().all(|r| (r - 0.05).abs() <= 0.03);
    let shown: Vec<String> = rates.iter().enumerate().map(|(k, r)| format!("m={}:{r:.3}", k + 2)).collect();
    outcome(size_ok && power_ok, format!("size {}; logistic max p={worst_p:.1e}", shown.join(" ")))
}

fn lyapunov_checks() -> Outcome {
    let logi = logistic(4.0, 5000, 1);
    let hen = henon(1.4, 0.3, 5000, 1);
    let ar = gen_ar1(0.5, 1.0, 5000, 1).unwrap();
    let ros = RosensteinConfig::default();
    let jac = JacobianConfig::default();
    let mut pass = true;
    let mut parts = Vec::new();
    let mut near = |label: &str, r: &LyapunovResult, target: f64| {
        let ok = (r.lambda_max - target).abs() <= 0.05;
        pass &= ok;
        parts.push(format!("{label}={:.3}{}", r.lambda_max, if ok { "" } else { " !" }));
    };
    near("ros logistic", &rosenstein(&logi, &ros).unwrap(), std::f64::consts::LN_2);
    near("ros henon", &rosenstein(&hen, &ros).unwrap(), 0.42);
    let mut slowest: f64 = 0.0;
    let mut timed = |x: &[f64]| {
        let t = Instant::now();
        let r = jacobian_lambda(x, &jac).unwrap();
        slowest = slowest.max(t.elapsed().as_secs_f64());
        r
    };
    let jl = timed(&logi);
    let jh = timed(&hen);
    let ja = timed(&ar);
    near("jac logistic", &jl, std::f64::consts::LN_2);
    near("jac henon", &jh, 0.42);
    let ra = rosenstein(&ar, &ros).unwrap();
    for (label, r) in [("ros ar1", &ra), ("jac ar1", &ja)] {
        let ok = r.lambda_max < 0.0 && r.verdict == Verdict::NoChaos;
        pass &= ok;
        parts.push(format!("{label}={:.3} {:?}{}", r.lambda_max, r.verdict, if ok { "" } else { " !" }));
    }
    pass &= slowest < 300.0;
    parts.push(format!("slowest grid {slowest:.1}s"));
    outcome(pass, parts.join("; "))
}

struct EgarchRun {
    gamma: f64,
    xi: f64,
    egarch_first: bool,
    arch_ok: bool,
    bds_ok: bool,
}

fn egarch_runs() -> Vec<EgarchRun> {
    let menu: Vec<Candidate> = [Family::Garch, Family::Egarch, Family::Gjr]
        .iter()
        .map(|&family| Candidate { mean: MeanSpec::constant(), variance: VarianceSpec { family, innovation: Innovation::Normal } })
        .collect();
    (0..20)
        .map(|seed| {
            let g = gen_garch_family(Family::Egarch, -0.1, 0.9, 0.3, -0.07, 8000, seed).unwrap();
            let sel = select_model(&g.values, &menu).unwrap();
            let best = &sel.ranked[0];
            let eg = sel.ranked.iter().find(|f| f.variance.family == Family::Egarch).unwrap();
            EgarchRun {
                gamma: eg.gamma,
                xi: eg.xi.unwrap(),
                egarch_first: best.variance.family == Family::Egarch,
                arch_ok: best.arch_lm_p > 0.05,
                bds_ok: !bds_test(&best.std_resid, 6, 0.5).unwrap().rejects(0.05),
            }
        })
        .collect()
}

fn egarch_recovery(runs: &[EgarchRun]) -> Outcome {
    let g: Vec<f64> = runs.iter().map(|r| (r.gamma - 0.9).abs()).collect();
    let x: Vec<f64> = runs.iter().map(|r| (r.xi + 0.07).abs()).collect();
    let first = runs.iter().filter(|r| r.egarch_first).count() as f64 / runs.len() as f64;
    let (mg, mx) = (mean(&g), mean(&x));
    outcome(
        mg < 0.02 && mx < 0.02 && first >= 0.8,
        format!("mean|gamma err|={mg:.4} mean|xi err|={mx:.4} ranked first {:.0}%", 100.0 * first),
    )
}

fn residual_whiteness(runs: &[EgarchRun]) -> Outcome {
    let n = runs.len() as f64;
    let arch = runs.iter().filter(|r| r.arch_ok).count() as f64 / n;
    let bds = runs.iter().filter(|r| r.bds_ok).count() as f64 / n;
    outcome(arch >= 0.9 && bds >= 0.9, format!("ARCH-LM pass {:.0}%, BDS pass {:.0}%", 100.0 * arch, 100.0 * bds))
}

fn random_distribution(rng: &mut impl Rng, k: usize) -> Vec<f64> {
    let w: Vec<f64> = (0..k).map(|_| rng.random::<f64>() + 1e-3).collect();
    let s: f64 = w.iter().sum();
    w.iter().map(|v| v / s).collect()
}

fn entropy_identities() -> Outcome {
    let mut rng = rng(8);
    let mut limit_err: f64 = 0.0;
    let mut pseudo: f64 = 0.0;
    let mut uniform_ok = true;
    for _ in 0..100 {
        let ka = rng.random_range(2..12);
        let kb = rng.random_range(2..12);
        let pa = random_distribution(&mut rng, ka);
        let pb = random_distribution(&mut rng, kb);
        let sh = shannon_entropy(&pa).unwrap();
        for a in [1.0 - 1e-6, 1.0 + 1e-6] {
            limit_err = limit_err.max((tsallis_entropy(&pa, a).unwrap() - sh).abs());
        }
        let a = rng.random_range(0.2..3.0);
        pseudo = pseudo.max(nonadditivity_check(&pa, &pb, a).unwrap());
        let u = vec![1.0 / ka as f64; ka];
        let hu = tsallis_entropy(&u, a).unwrap();
        uniform_ok &= hu >= tsallis_entropy(&pa, a).unwrap() && (hu - max_entropy(ka, a)).abs() <= 1e-12 * hu.max(1.0);
    }
    outcome(
        limit_err < 1e-4 && pseudo < 1e-10 && uniform_ok,
        format!("a->1 err={limit_err:.2e}; pseudo-additivity residual={pseudo:.2e}; uniform maximal={uniform_ok}"),
    )
}

fn entropy_volatility_sign() -> Outcome {
    let cfg = EntropyConfig::default();
    let mut negative = 0;
    let mut corrs = Vec::new();
    for seed in 0..50 {
        let g = gen_garch_family(Family::Egarch, -0.1, 0.9, 0.3, -0.07, 2922, seed).unwrap();
        let sigma = g.sigma.unwrap();
        let trace = rolling_tsallis(&g.values, &cfg).unwrap();
        let s: Vec<f64> = trace.end_index.iter().map(|&i| sigma[i]).collect();
        let rep = entropy_volatility_report(&trace.values, &s, 0).unwrap();
        corrs.push(rep.correlation);
        if rep.negative {
            negative += 1;
        }
    }
    let share = negative as f64 / 50.0;
    outcome(share >= 0.8, format!("negative in {:.0}% of runs, mean corr={:.3}", 100.0 * share, mean(&corrs)))
}

fn printed_panel() -> Outcome {
    let years: Vec<i32> = (2005..=2013).collect();
    let panel = AnnualPanel::new(years)
        .unwrap()
        .with_column("uv_smp", &[0.226, 0.145, 0.123, 0.134, 0.161, 0.201, 0.194, 0.275, 0.277])
        .unwrap()
        .with_column("uv_pun", &[0.230, 0.179, 0.179, 0.139, 0.164, 0.127, 0.087, 0.130, 0.145])
        .unwrap()
        .with_column("smp_lyap", &[0.1102, 0.6550, -0.0180, -0.0076, 0.3960, -0.0577, 0.1140, -0.1034, 0.2130])
        .unwrap()
        .with_column("pun_lyap", &[-0.2570, -0.2090, -0.1600, -0.1158, -0.1280, -0.1560, -0.1266, -0.0740, -0.0835])
        .unwrap();
    let c = correlation_matrix(&panel);
    let pun = c.get("uv_pun", "pun_lyap").unwrap();
    let smp = c.get("uv_smp", "smp_lyap").unwrap();
    outcome(
        (pun + 0.734).abs() <= 0.01 && (smp + 0.26).abs() <= 0.01,
        format!("uv_pun/pun_lyap={pun:.4}; uv_smp/smp_lyap={smp:.4}"),
    )
}

fn exponent_identities() -> Outcome {
    let mut worst: f64 = 0.0;
    for i in 0..=100 {
        let a = 0.01 * i as f64;
        let e = exponent_relations(Exponent::Alpha(a));
        for back in [
            exponent_relations(Exponent::Beta(e.beta)),
            exponent_relations(Exponent::Delta(e.delta)),
            exponent_relations(Exponent::H(e.h)),
        ] {
            worst = worst.max((back.alpha - a).abs()).max((back.beta - e.beta).abs()).max((back.delta - e.delta).abs());
        }
    }
    let w = exponent_relations(Exponent::Alpha(0.5));
    let fixed = (w.alpha, w.beta, w.delta, w.h, w.d) == (0.5, 0.0, 1.0, 0.5, 1.5);
    outcome(worst <= 1e-14 && fixed, format!("max round-trip error={worst:.1e}; white-noise fixed point exact={fixed}"))
}

fn digests(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    std::fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (e.file_name().to_string_lossy().into_owned(), Sha256::digest(std::fs::read(e.path()).unwrap()).to_vec())
        })
        .collect()
}

fn determinism() -> Outcome {
    let dir = std::env::temp_dir().join(format!("emhkit-acceptance-{}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    let input = dir.join("gbm.csv");
    let start = chrono::NaiveDate::from_ymd_opt(2005, 1, 1).unwrap();
    let mut csv = String::from("timestamp,price\n");
    for (i, p) in gbm(50.0, 0.0, 0.01, 2200, 11).iter().enumerate() {
        csv.push_str(&format!("{},{p}\n", start + chrono::Duration::days(i as i64)));
    }
    std::fs::write(&input, csv).unwrap();
    let run_dir = dir.join("run");
    let mut m = RunManifest::new(&input, Frequency::Daily, 7, &run_dir);
    m.config.lyapunov = JacobianConfig { max_tau: 2, max_m: 3, max_q: 2, ..Default::default() };
    let first_ok = run_pipeline(&m).unwrap().ok();
    let first = digests(&run_dir);
    let second_ok = run_pipeline(&RunManifest::load(&run_dir.join("manifest.json")).unwrap()).unwrap().ok();
    let same = first == digests(&run_dir);
    let _ = std::fs::remove_dir_all(&dir);
    outcome(first_ok && second_ok && same, format!("{} files, identical={same}, stages ok={}", first.len(), first_ok && second_ok))
}

fn main() {
    let mut failed = 0;
    let mut report = |id: usize, name: &str, o: Outcome| {
        if !o.pass {
            failed += 1;
        }
        println!("criterion {id:>2} {} {name}: {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
    };
    report(1, "Hurst recovery on fGn", hurst_recovery());
    report(2, "R/S expectation vs Monte Carlo", rs_expectation());
    report(3, "GPH on ARFIMA(0,0.3,0)", gph_arfima());
    report(4, "BDS size and power", bds_size_power());
    report(5, "Lyapunov exponents", lyapunov_checks());
    let runs = egarch_runs();
    report(6, "EGARCH recovery and selection", egarch_recovery(&runs));
    report(7, "residual whiteness", residual_whiteness(&runs));
    report(8, "entropy identities", entropy_identities());
    report(9, "entropy vs conditional volatility sign", entropy_volatility_sign());
    report(10, "correlations from printed annual panel", printed_panel());
    report(11, "exponent relations", exponent_identities());
    report(12, "pipeline determinism", determinism());
    println!("{} of 12 criteria passed", 12 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
