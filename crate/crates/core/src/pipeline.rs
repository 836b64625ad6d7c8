//! End-to-end analysis run driven by a manifest: every stage writes a JSON
//! file (and plot-ready CSVs) under one run directory.

use crate::bds::bds_test;
use crate::embedding::{ami_first_min, fnn, FnnParams};
use crate::entropy::{entropy_volatility_report, rolling_tsallis, EntropyConfig};
use crate::error::{Error, Result};
use crate::hurst::{dfa, ghe, gph, rs_hurst_corrected, wghe, HurstEstimate, DEFAULT_TAU_MAX};
use crate::lyapunov::{jacobian_lambda, rosenstein, JacobianConfig, LyapunovMethod, LyapunovResult, RosensteinConfig};
use crate::report::{efficiency_report, render_text, Bundle, ConditionalSummary, EntropySummary};
use crate::series::{deseasonalize, load_csv, log_returns, unconditional_volatility, Frequency, GapPolicy, Partition, ReturnSeries};
use crate::stats;
use crate::volatility::{default_candidates, select_model, Candidate, Innovation, MeanSpec, VarianceSpec};
use crate::synth::Family;
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GarchMenu {
    /// Sparse seasonal ARMA means crossed with the three variance families.
    Seasonal,
    /// Constant mean with GARCH, EGARCH and GJR, Normal innovations.
    ConstantMean,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct StageConfig {
    /// Seasonal period removed from returns; None picks 7 for daily and 24 for hourly data.
    pub deseasonalize_period: Option<usize>,
    pub gph_k_exponent: f64,
    pub wghe_theta: f64,
    pub wghe_delta_t: usize,
    pub bds_m_max: usize,
    pub bds_epsilon: f64,
    /// Analyses with quadratic cost use at most this many of the latest returns.
    pub max_points: usize,
    pub embed_max_tau: usize,
    pub embed_max_m: usize,
    pub lyapunov_method: LyapunovMethod,
    pub lyapunov: JacobianConfig,
    pub garch_menu: GarchMenu,
    pub entropy: EntropyConfig,
}

impl Default for StageConfig {
    fn default() -> Self {
        StageConfig {
            deseasonalize_period: None,
            gph_k_exponent: 0.5,
            wghe_theta: 250.0,
            wghe_delta_t: 1000,
            bds_m_max: 6,
            bds_epsilon: 0.5,
            max_points: 3000,
            embed_max_tau: 20,
            embed_max_m: 10,
            lyapunov_method: LyapunovMethod::Jacobian,
            lyapunov: JacobianConfig::default(),
            garch_menu: GarchMenu::Seasonal,
            entropy: EntropyConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub input: PathBuf,
    pub frequency: Frequency,
    #[serde(default = "default_gap_policy")]
    pub gap_policy: GapPolicy,
    pub seed: u64,
    pub output_dir: PathBuf,
    #[serde(default = "tool_version")]
    pub tool_version: String,
    #[serde(default)]
    pub config: StageConfig,
}

fn default_gap_policy() -> GapPolicy {
    GapPolicy::Error
}

pub fn tool_version() -> String {
    env!("CARGO_PKG_VERSION").to_string()
}

impl RunManifest {
    pub fn new(input: impl Into<PathBuf>, frequency: Frequency, seed: u64, output_dir: impl Into<PathBuf>) -> Self {
        RunManifest {
            input: input.into(),
            frequency,
            gap_policy: GapPolicy::Error,
            seed,
            output_dir: output_dir.into(),
            tool_version: tool_version(),
            config: StageConfig::default(),
        }
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        serde_json::from_str(&text).map_err(|e| Error::InvalidInput(format!("manifest {}: {e}", path.display())))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum StageStatus {
    Ok { stage: String, files: Vec<String> },
    Failed { stage: String, error: String },
    Skipped { stage: String, missing: String },
}

impl StageStatus {
    pub fn stage(&self) -> &str {
        match self {
            StageStatus::Ok { stage, .. } | StageStatus::Failed { stage, .. } | StageStatus::Skipped { stage, .. } => stage,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunOutcome {
    pub run_dir: PathBuf,
    pub stages: Vec<StageStatus>,
}

impl RunOutcome {
    pub fn ok(&self) -> bool {
        self.stages.iter().all(|s| matches!(s, StageStatus::Ok { .. }))
    }
}

struct Run<'a> {
    dir: &'a Path,
    stages: Vec<StageStatus>,
}

fn to_json<T: Serialize>(v: &T) -> Result<String> {
    serde_json::to_string_pretty(v).map(|mut s| {
        s.push('\n');
        s
    })
    .map_err(|e| Error::InvalidInput(format!("serialization: {e}")))
}

fn csv_text(header: &[&str], rows: impl Iterator<Item = Vec<String>>) -> Result<String> {
    let mut w = csv::Writer::from_writer(vec![]);
    w.write_record(header).map_err(|e| Error::Io(e.to_string()))?;
    for r in rows {
        w.write_record(&r).map_err(|e| Error::Io(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

fn pairs<A: ToString, B: ToString>(v: impl IntoIterator<Item = (A, B)>) -> impl Iterator<Item = Vec<String>> {
    v.into_iter().map(|(a, b)| vec![a.to_string(), b.to_string()])
}

/// Files written by one stage: (file name, contents).
type Files = Vec<(String, String)>;

impl Run<'_> {
    /// Runs a stage whose inputs are all present; records its status and files.
    fn stage<T>(&mut self, name: &str, missing: Option<&str>, f: impl FnOnce() -> Result<(T, Files)>) -> Option<T> {
        if let Some(m) = missing {
            self.stages.push(StageStatus::Skipped { stage: name.into(), missing: m.into() });
            return None;
        }
        let written = f().and_then(|(v, files)| {
            let mut names = Vec::new();
            for (file, text) in files {
                std::fs::write(self.dir.join(&file), text)?;
                names.push(file);
            }
            Ok((v, names))
        });
        match written {
            Ok((v, files)) => {
                self.stages.push(StageStatus::Ok { stage: name.into(), files });
                Some(v)
            }
            Err(e) => {
                self.stages.push(StageStatus::Failed { stage: name.into(), error: e.to_string() });
                None
            }
        }
    }
}

fn tail(x: &[f64], n: usize) -> &[f64] {
    &x[x.len().saturating_sub(n)..]
}

fn hurst_stage(x: &[f64], cfg: &StageConfig) -> Result<(Vec<HurstEstimate>, Files)> {
    let path = stats::cumsum(x);
    let taus: Vec<usize> = DEFAULT_TAU_MAX.collect();
    let mut out = Vec::new();
    let mut failures = Vec::new();
    let mut push = |name: &str, r: Result<HurstEstimate>| match r {
        Ok(e) => out.push(e),
        Err(e) => failures.push(format!("{name}: {e}")),
    };
    push("rs", rs_hurst_corrected(x, None));
    push("dfa", dfa(x, None, 1));
    push("ghe", ghe(&path, &[1.0], &taus).map(|mut v| v.remove(0)));
    push("wghe", wghe(&path, 1.0, cfg.wghe_theta, cfg.wghe_delta_t.min(path.len()), &taus));
    push("gph", gph(x, cfg.gph_k_exponent));
    if out.is_empty() {
        return Err(Error::Degenerate(failures.join("; ")));
    }
    for f in failures {
        out[0].flags.push(format!("estimator failed: {f}"));
    }
    let mut files = vec![("04_hurst.json".to_string(), to_json(&out)?)];
    if let Some(rs) = out.first() {
        files.push((
            "rs_scaling.csv".into(),
            csv_text(&["log_n", "log_rs"], pairs(rs.points.iter().map(|p| (p.log_x, p.log_y))))?,
        ));
    }
    Ok((out, files))
}

fn menu(kind: GarchMenu) -> Vec<Candidate> {
    match kind {
        GarchMenu::Seasonal => default_candidates(),
        GarchMenu::ConstantMean => [Family::Garch, Family::Egarch, Family::Gjr]
            .into_iter()
            .map(|family| Candidate {
                mean: MeanSpec::constant(),
                variance: VarianceSpec { family, innovation: Innovation::Normal },
            })
            .collect(),
    }
}

fn family_name(f: Family) -> &'static str {
    match f {
        Family::Garch => "GARCH(1,1)",
        Family::Egarch => "EGARCH(1,1)",
        Family::Gjr => "GJR(1,1)",
    }
}

#[derive(Serialize)]
struct RankRow {
    model: String,
    mean_ar: Vec<usize>,
    mean_ma: Vec<usize>,
    innovation: Innovation,
    loglik: f64,
    aic: f64,
    bic: f64,
    arch_lm_p: f64,
}

/// Executes the whole pipeline. A missing input file is a hard error and
/// leaves no run directory behind; other failures are recorded per stage.
pub fn run_pipeline(manifest: &RunManifest) -> Result<RunOutcome> {
    let dir = manifest.output_dir.as_path();
    let created = !dir.exists();
    std::fs::create_dir_all(dir)?;
    std::fs::write(dir.join("manifest.json"), to_json(manifest)?)?;
    if !manifest.input.is_file() {
        let _ = std::fs::remove_file(dir.join("manifest.json"));
        if created {
            let _ = std::fs::remove_dir_all(dir);
        }
        return Err(Error::Io(format!("input file not found: {}", manifest.input.display())));
    }
    let cfg = &manifest.config;
    let mut run = Run { dir, stages: Vec::new() };

    let prices = run.stage("ingest", None, || {
        let (s, report) = load_csv(&manifest.input, manifest.frequency, manifest.gap_policy)?;
        #[derive(Serialize)]
        struct Ingest<'a> {
            label: &'a str,
            n: usize,
            first: String,
            last: String,
            report: &'a crate::series::LoadReport,
        }
        let doc = Ingest {
            label: &s.label,
            n: s.len(),
            first: s.timestamps.first().map(|t| t.to_string()).unwrap_or_default(),
            last: s.timestamps.last().map(|t| t.to_string()).unwrap_or_default(),
            report: &report,
        };
        let files = vec![("01_ingest.json".into(), to_json(&doc)?)];
        Ok((s, files))
    });

    let returns = run.stage("returns", prices.is_none().then_some("ingest"), || {
        let r = log_returns(prices.as_ref().unwrap())?;
        let summary = serde_json::json!({
            "n": r.values.len(),
            "mean": stats::mean(&r.values),
            "sd": stats::sd(&r.values),
        });
        let csv = csv_text(&["timestamp", "return"], pairs(r.timestamps.iter().map(|t| t.to_string()).zip(r.values.iter())))?;
        Ok((r, vec![("02_returns.json".into(), to_json(&summary)?), ("returns.csv".into(), csv)]))
    });

    let des: Option<ReturnSeries> = run.stage("deseasonalize", returns.is_none().then_some("returns"), || {
        let period = cfg.deseasonalize_period.unwrap_or(match manifest.frequency {
            Frequency::Daily => 7,
            Frequency::Hourly => 24,
        });
        let d = deseasonalize(returns.as_ref().unwrap(), period)?;
        let summary = serde_json::json!({ "period": period, "n": d.values.len(), "sd": stats::sd(&d.values) });
        Ok((d, vec![("03_deseasonalize.json".into(), to_json(&summary)?)]))
    });
    let miss = des.is_none().then_some("deseasonalize");
    let x: Vec<f64> = des.as_ref().map(|d| d.values.clone()).unwrap_or_default();
    let short = tail(&x, cfg.max_points);

    let hurst = run.stage("hurst", miss, || hurst_stage(&x, cfg));

    let bds = run.stage("bds", miss, || {
        let r = bds_test(short, cfg.bds_m_max, cfg.bds_epsilon)?;
        Ok((r.clone(), vec![("05_bds.json".into(), to_json(&r)?)]))
    });

    run.stage("embed", miss, || {
        let a = ami_first_min(short, cfg.embed_max_tau, None)?;
        let f = fnn(short, a.tau, cfg.embed_max_m, FnnParams::default())?;
        let doc = serde_json::json!({ "ami": &a, "fnn": &f });
        let ami_csv = csv_text(&["tau", "ami"], pairs(a.curve.iter().enumerate()))?;
        let fnn_csv = csv_text(&["m", "fnn_fraction"], pairs(f.fractions.iter().enumerate().map(|(i, v)| (i + 1, v))))?;
        Ok(((), vec![("06_embed.json".into(), to_json(&doc)?), ("ami.csv".into(), ami_csv), ("fnn.csv".into(), fnn_csv)]))
    });

    let lyap: Option<LyapunovResult> = run.stage("lyapunov", miss, || {
        let r = match cfg.lyapunov_method {
            LyapunovMethod::Jacobian => jacobian_lambda(short, &JacobianConfig { seed: manifest.seed, ..cfg.lyapunov })?,
            LyapunovMethod::Rosenstein => rosenstein(short, &RosensteinConfig::default())?,
        };
        let mut files = vec![("07_lyapunov.json".into(), to_json(&r)?)];
        if let Some(c) = &r.curve {
            files.push(("rosenstein_curve.csv".into(), csv_text(&["k", "mean_log_divergence"], pairs(c.iter().enumerate()))?));
        }
        Ok((r, files))
    });

    let garch = run.stage("garch", miss, || {
        let sel = select_model(&x, &menu(cfg.garch_menu))?;
        let rank: Vec<RankRow> = sel
            .ranked
            .iter()
            .map(|f| RankRow {
                model: family_name(f.variance.family).into(),
                mean_ar: f.mean.spec.ar_lags.clone(),
                mean_ma: f.mean.spec.ma_lags.clone(),
                innovation: f.variance.innovation,
                loglik: f.loglik,
                aic: f.aic,
                bic: f.bic,
                arch_lm_p: f.arch_lm_p,
            })
            .collect();
        let best = sel.ranked[0].clone();
        let failed: Vec<String> = sel.failed.iter().map(|(c, e)| format!("{} {:?}: {e}", family_name(c.variance.family), c.mean.ar_lags)).collect();
        let doc = serde_json::json!({
            "ranking": rank,
            "failed": failed,
            "best": {
                "model": family_name(best.variance.family),
                "mean": &best.mean,
                "k": best.k, "gamma": best.gamma, "alpha": best.alpha, "xi": best.xi, "nu": best.nu,
                "loglik": best.loglik, "aic": best.aic, "bic": best.bic,
                "std_errors": &best.std_errors, "arch_lm_p": best.arch_lm_p, "flags": &best.flags,
            },
        });
        let sig = csv_text(&["index", "sigma"], pairs(best.sigma.iter().enumerate()))?;
        Ok((best, vec![("08_garch.json".into(), to_json(&doc)?), ("conditional_sigma.csv".into(), sig)]))
    });

    let entropy = run.stage("entropy", miss, || {
        let trace = rolling_tsallis(&x, &cfg.entropy)?;
        // sigma covers the last sigma.len() returns
        let vs = garch.as_ref().and_then(|g| {
            let off = x.len() - g.sigma.len();
            let (t, s): (Vec<f64>, Vec<f64>) = trace
                .end_index
                .iter()
                .zip(&trace.values)
                .filter(|(&e, _)| e >= off)
                .map(|(&e, &v)| (v, g.sigma[e - off]))
                .unzip();
            entropy_volatility_report(&t, &s, 10).ok()
        });
        let summary = EntropySummary {
            a: cfg.entropy.a,
            windows: trace.values.len(),
            mean: stats::mean(&trace.values),
            min: trace.values.iter().copied().fold(f64::INFINITY, f64::min),
            max: trace.values.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            corr_with_sigma: vs.as_ref().map(|v| v.correlation),
        };
        let doc = serde_json::json!({ "summary": &summary, "entropy_volatility": vs });
        let csv = csv_text(&["end_index", "tsallis_entropy"], pairs(trace.end_index.iter().zip(&trace.values)))?;
        Ok((summary, vec![("09_entropy.json".into(), to_json(&doc)?), ("entropy.csv".into(), csv)]))
    });

    let vol = run.stage("volatility", returns.is_none().then_some("returns"), || {
        let r = returns.as_ref().unwrap();
        let annual = unconditional_volatility(r, Partition::Annual)?;
        let whole = unconditional_volatility(r, Partition::Whole)?;
        let doc = serde_json::json!({ "annual": &annual, "whole": &whole });
        let csv = csv_text(&["period", "sigma"], pairs(annual.iter().cloned()))?;
        Ok((annual, vec![("10_volatility.json".into(), to_json(&doc)?), ("volatility.csv".into(), csv)]))
    });

    let label = prices.as_ref().map(|p| p.label.clone()).unwrap_or_default();
    let bundle = Bundle {
        label,
        hurst: hurst.unwrap_or_default(),
        bds,
        lyapunov: lyap,
        volatility: vol.unwrap_or_default(),
        conditional: garch.as_ref().map(|g| ConditionalSummary {
            model: family_name(g.variance.family).into(),
            k: g.k,
            gamma: g.gamma,
            alpha: g.alpha,
            xi: g.xi,
            aic: g.aic,
            bic: g.bic,
            mean_sigma: stats::mean(&g.sigma),
            arch_lm_p: g.arch_lm_p,
        }),
        entropy,
        ..Default::default()
    };
    run.stage("report", None, || {
        let r = efficiency_report(&bundle)?;
        Ok((
            (),
            vec![
                ("bundle.json".into(), to_json(&bundle)?),
                ("report.json".into(), to_json(&r)?),
                ("report.txt".into(), render_text(&r)),
            ],
        ))
    });

    let outcome = RunOutcome { run_dir: dir.to_path_buf(), stages: run.stages };
    std::fs::write(dir.join("status.json"), to_json(&outcome.stages)?)?;
    Ok(outcome)
}

/// Reads a bundle from a JSON file, or from `bundle.json` inside a run directory.
pub fn load_bundle(path: &Path) -> Result<Bundle> {
    let file = if path.is_dir() { path.join("bundle.json") } else { path.to_path_buf() };
    let text = std::fs::read_to_string(&file).map_err(|e| Error::Io(format!("{}: {e}", file.display())))?;
    serde_json::from_str(&text).map_err(|e| Error::InvalidInput(format!("bundle: {e}")))
}
