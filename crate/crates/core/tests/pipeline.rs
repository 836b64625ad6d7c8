use emhkit::lyapunov::JacobianConfig;
use emhkit::pipeline::*;
use emhkit::series::Frequency;
use sha2::{Digest, Sha256};
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

fn scratch(name: &str) -> PathBuf {
    let d = std::env::temp_dir().join(format!("emhkit-pipeline-{name}-{}", std::process::id()));
    let _ = std::fs::remove_dir_all(&d);
    std::fs::create_dir_all(&d).unwrap();
    d
}

fn write_gbm(path: &Path, n: usize, seed: u64) {
    let p = emhkit::synth::gbm(50.0, 0.0, 0.01, n, seed);
    let start = chrono::NaiveDate::from_ymd_opt(2005, 1, 1).unwrap();
    let mut s = String::from("timestamp,price\n");
    for (i, v) in p.iter().enumerate() {
        s.push_str(&format!("{},{v}\n", start + chrono::Duration::days(i as i64)));
    }
    std::fs::write(path, s).unwrap();
}

fn fast_manifest(input: &Path, out: &Path) -> RunManifest {
    let mut m = RunManifest::new(input, Frequency::Daily, 42, out);
    m.config.garch_menu = GarchMenu::ConstantMean;
    m.config.max_points = 1500;
    m.config.lyapunov = JacobianConfig { max_tau: 1, max_m: 2, max_q: 1, ..Default::default() };
    m
}

fn digests(dir: &Path) -> BTreeMap<String, String> {
    let mut out = BTreeMap::new();
    for e in std::fs::read_dir(dir).unwrap() {
        let e = e.unwrap();
        let bytes = std::fs::read(e.path()).unwrap();
        let h = Sha256::digest(&bytes);
        out.insert(e.file_name().to_string_lossy().into_owned(), h.iter().map(|b| format!("{b:02x}")).collect());
    }
    out
}

#[test]
fn gbm_fixture_runs_end_to_end_and_reproduces() {
    let d = scratch("gbm");
    let input = d.join("gbm.csv");
    write_gbm(&input, 2200, 3);
    let run_dir = d.join("run");
    let m = fast_manifest(&input, &run_dir);
    let out = run_pipeline(&m).unwrap();
    assert!(out.ok(), "{:?}", out.stages);
    let report: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(run_dir.join("report.json")).unwrap()).unwrap();
    assert_eq!(report["verdict"], "indistinguishable from random walk");
    assert_eq!(report["nonlinear_dependence"], false);
    let h = report["H_median"].as_f64().unwrap();
    assert!((h - 0.5).abs() < 0.05, "{h}");
    for f in ["manifest.json", "01_ingest.json", "04_hurst.json", "05_bds.json", "07_lyapunov.json", "08_garch.json", "returns.csv", "status.json"] {
        assert!(run_dir.join(f).is_file(), "{f}");
    }

    let bundle = load_bundle(&run_dir).unwrap();
    let again = emhkit::report::efficiency_report(&bundle).unwrap();
    assert_eq!(serde_json::to_value(&again).unwrap(), report);

    let first = digests(&run_dir);
    let again = run_pipeline(&RunManifest::load(&run_dir.join("manifest.json")).unwrap()).unwrap();
    assert!(again.ok());
    assert_eq!(first, digests(&run_dir));
    let _ = std::fs::remove_dir_all(&d);
}

#[test]
fn missing_input_removes_run_dir() {
    let d = scratch("missing");
    let run_dir = d.join("run");
    let err = run_pipeline(&fast_manifest(&d.join("nope.csv"), &run_dir)).unwrap_err();
    assert!(err.to_string().contains("not found"));
    assert!(!run_dir.exists());
    let _ = std::fs::remove_dir_all(&d);
}

#[test]
fn stage_failures_are_isolated() {
    let d = scratch("short");
    let input = d.join("short.csv");
    write_gbm(&input, 60, 1);
    let run_dir = d.join("run");
    let out = run_pipeline(&fast_manifest(&input, &run_dir)).unwrap();
    assert!(!out.ok());
    let status = |name: &str| out.stages.iter().find(|s| s.stage() == name).unwrap().clone();
    assert!(matches!(status("ingest"), StageStatus::Ok { .. }));
    assert!(matches!(status("lyapunov"), StageStatus::Failed { .. }));
    assert!(matches!(status("volatility"), StageStatus::Ok { .. }));
    assert!(run_dir.join("status.json").is_file());
    let _ = std::fs::remove_dir_all(&d);
}

#[test]
fn manifest_round_trips() {
    let m = RunManifest::new("a.csv", Frequency::Hourly, 7, "out");
    let s = serde_json::to_string(&m).unwrap();
    assert_eq!(serde_json::from_str::<RunManifest>(&s).unwrap(), m);
    let minimal: RunManifest = serde_json::from_str(r#"{"input":"a.csv","frequency":"daily","seed":1,"output_dir":"o"}"#).unwrap();
    assert_eq!(minimal.config, StageConfig::default());
}
