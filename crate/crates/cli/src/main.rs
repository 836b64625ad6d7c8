use chrono::NaiveDate;
use clap::{Args, Parser, Subcommand, ValueEnum};
use emhkit::bds::{bds_test_with, Norm};
use emhkit::embedding::{ami_first_min, fnn, FnnParams};
use emhkit::entropy::{self, rolling_tsallis, EntropyConfig};
use emhkit::hurst::{self, HurstEstimate, DEFAULT_TAU_MAX};
use emhkit::lyapunov::{jacobian_lambda, rosenstein, JacobianConfig, RosensteinConfig, TripletSelection};
use emhkit::market::hhi;
use emhkit::pipeline::{load_bundle, run_pipeline, RunManifest};
use emhkit::report::{efficiency_report, render_text};
use emhkit::series::{self, analysis_series, load_csv, log_returns, Frequency, GapPolicy, RollingConfig, SeriesKind};
use emhkit::stats::cumsum;
use emhkit::synth::{generate, Family, GeneratorSpec};
use emhkit::volatility::{default_candidates, fit_model, select_model, Innovation, MeanSpec, VarianceSpec};
use serde::Serialize;
use std::path::PathBuf;
use std::process::ExitCode;

type AnyResult<T> = std::result::Result<T, Box<dyn std::error::Error>>;

#[derive(Parser)]
#[command(name = "emhkit", version, about = "Market-efficiency diagnostics for price and return series")]
struct Cli {
    /// Seed for every randomized step.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Parent directory for pipeline runs.
    #[arg(long, global = true, env = "EMHKIT_OUT_DIR", default_value = "emhkit-runs")]
    out_dir: PathBuf,
    /// Write the result to a file instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Emit JSON (the default for analysis commands).
    #[arg(long, global = true, conflicts_with = "csv")]
    json: bool,
    /// Emit plot-ready CSV.
    #[arg(long, global = true)]
    csv: bool,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Load and validate a price CSV.
    Ingest(IngestArgs),
    /// Log returns, optionally deseasonalized.
    Returns(ReturnsArgs),
    /// Hurst exponent estimators.
    Hurst(HurstArgs),
    /// Delay and embedding dimension from AMI and false nearest neighbours.
    Embed(EmbedArgs),
    /// BDS independence test.
    Bds(BdsArgs),
    /// Maximal Lyapunov exponent.
    Lyapunov(LyapunovArgs),
    /// GARCH-family fit or model selection.
    Garch(GarchArgs),
    /// Rolling Tsallis entropy.
    Entropy(EntropyArgs),
    /// Herfindahl-Hirschman index from market shares.
    Hhi(HhiArgs),
    /// Efficiency report from a run directory or bundle file.
    Report(ReportArgs),
    /// Synthetic series with known properties.
    Synth(SynthArgs),
    /// Full analysis run into a fresh run directory.
    Pipeline(PipelineArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Freq {
    Daily,
    Hourly,
}

impl From<Freq> for Frequency {
    fn from(f: Freq) -> Self {
        match f {
            Freq::Daily => Frequency::Daily,
            Freq::Hourly => Frequency::Hourly,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Gaps {
    Error,
    Ffill,
    Interpolate,
}

impl From<Gaps> for GapPolicy {
    fn from(g: Gaps) -> Self {
        match g {
            Gaps::Error => GapPolicy::Error,
            Gaps::Ffill => GapPolicy::ForwardFill,
            Gaps::Interpolate => GapPolicy::Interpolate,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Prices,
    Returns,
}

#[derive(Args)]
struct Source {
    /// Two-column CSV: timestamp,value.
    #[arg(long, short)]
    input: PathBuf,
    #[arg(long, value_enum, default_value_t = Freq::Daily)]
    frequency: Freq,
    #[arg(long, value_enum, default_value_t = Gaps::Error)]
    gaps: Gaps,
}

#[derive(Args)]
struct Input {
    #[command(flatten)]
    source: Source,
    /// prices: analyse log returns; returns: use the values as given.
    #[arg(long, value_enum, default_value_t = Kind::Prices)]
    series: Kind,
    /// Remove the per-phase mean with this period first.
    #[arg(long)]
    deseasonalize: Option<usize>,
}

impl Input {
    fn load(&self) -> AnyResult<Vec<f64>> {
        let kind = match self.series {
            Kind::Prices => SeriesKind::Prices,
            Kind::Returns => SeriesKind::Returns,
        };
        Ok(analysis_series(
            &self.source.input,
            self.source.frequency.into(),
            self.source.gaps.into(),
            kind,
            self.deseasonalize,
        )?)
    }
}

#[derive(Args)]
struct IngestArgs {
    #[command(flatten)]
    source: Source,
}

#[derive(Args)]
struct ReturnsArgs {
    #[command(flatten)]
    source: Source,
    #[arg(long)]
    deseasonalize: Option<usize>,
}

#[derive(Clone, Copy, ValueEnum)]
enum HurstMethod {
    Rs,
    RsAl,
    Dfa,
    Ghe,
    Wghe,
    Gph,
    Spec,
    Acf,
}

#[derive(Args)]
struct HurstArgs {
    #[command(flatten)]
    input: Input,
    #[arg(long, value_enum, default_value_t = HurstMethod::RsAl)]
    method: HurstMethod,
    /// Moment orders for ghe (wghe uses the first).
    #[arg(long, value_delimiter = ',', default_value = "1")]
    q: Vec<f64>,
    /// GPH bandwidth exponent.
    #[arg(long, default_value_t = 0.5)]
    k_exp: f64,
    #[arg(long, default_value_t = 1)]
    detrend_order: usize,
    #[arg(long, default_value_t = 250.0)]
    theta: f64,
    #[arg(long, default_value_t = 1000)]
    delta_t: usize,
    /// Largest lag for the acf method.
    #[arg(long, default_value_t = 100)]
    max_lag: usize,
    /// Estimate per rolling window of this length.
    #[arg(long)]
    window: Option<usize>,
    #[arg(long, default_value_t = 1)]
    step: usize,
}

impl HurstArgs {
    /// ghe and wghe work on the cumulative sum of the series.
    fn estimate(&self, x: &[f64]) -> emhkit::Result<Vec<HurstEstimate>> {
        let taus: Vec<usize> = DEFAULT_TAU_MAX.collect();
        Ok(match self.method {
            HurstMethod::Rs => vec![hurst::rs_hurst(x, None)?],
            HurstMethod::RsAl => vec![hurst::rs_hurst_corrected(x, None)?],
            HurstMethod::Dfa => vec![hurst::dfa(x, None, self.detrend_order)?],
            HurstMethod::Ghe => hurst::ghe(&cumsum(x), &self.q, &taus)?,
            HurstMethod::Wghe => {
                let p = cumsum(x);
                vec![hurst::wghe(&p, self.q[0], self.theta, self.delta_t.min(p.len()), &taus)?]
            }
            HurstMethod::Gph => vec![hurst::gph(x, self.k_exp)?],
            HurstMethod::Spec => vec![hurst::spectral_beta(x)?.estimate],
            HurstMethod::Acf => vec![hurst::acf_hurst(x, self.max_lag)?],
        })
    }
}

#[derive(Args)]
struct EmbedArgs {
    #[command(flatten)]
    input: Input,
    /// Only compute the AMI curve.
    #[arg(long)]
    ami: bool,
    /// Only compute the FNN curve.
    #[arg(long)]
    fnn: bool,
    /// Fixed delay; the first AMI minimum otherwise.
    #[arg(long)]
    tau: Option<usize>,
    #[arg(long, default_value_t = 20)]
    max_tau: usize,
    #[arg(long, default_value_t = 10)]
    max_m: usize,
    #[arg(long)]
    bins: Option<usize>,
}

#[derive(Clone, Copy, ValueEnum)]
enum NormArg {
    Max,
    Euclidean,
}

#[derive(Args)]
struct BdsArgs {
    #[command(flatten)]
    input: Input,
    #[arg(long, default_value_t = 6)]
    mmax: usize,
    /// Radius as a multiple of the sample standard deviation.
    #[arg(long, default_value_t = 0.5)]
    eps_mult: f64,
    #[arg(long, value_enum, default_value_t = NormArg::Max)]
    norm: NormArg,
}

#[derive(Clone, Copy, ValueEnum)]
enum LyapMethod {
    Rosenstein,
    Jacobian,
}

#[derive(Clone, Copy, ValueEnum)]
enum Selection {
    MaxLambda,
    MinBic,
}

#[derive(Args)]
struct LyapunovArgs {
    #[command(flatten)]
    input: Input,
    #[arg(long, value_enum, default_value_t = LyapMethod::Jacobian)]
    method: LyapMethod,
    #[arg(long, default_value_t = 2)]
    max_tau: usize,
    #[arg(long, default_value_t = 7)]
    max_m: usize,
    #[arg(long, default_value_t = 3)]
    max_q: usize,
    #[arg(long, value_enum, default_value_t = Selection::MaxLambda)]
    selection: Selection,
    /// Stationary-bootstrap replicates for the standard error.
    #[arg(long, default_value_t = 499)]
    bootstrap: usize,
    /// Rosenstein delay.
    #[arg(long, default_value_t = 1)]
    tau: usize,
    #[arg(long, default_value_t = 2)]
    m_min: usize,
    #[arg(long, default_value_t = 6)]
    m_max: usize,
    /// Temporal exclusion window; the AMI delay otherwise.
    #[arg(long)]
    theiler: Option<usize>,
    #[arg(long, default_value_t = 20)]
    t_max: usize,
}

#[derive(Clone, Copy, ValueEnum)]
enum FamilyArg {
    Garch,
    Egarch,
    Gjr,
}

impl From<FamilyArg> for Family {
    fn from(f: FamilyArg) -> Self {
        match f {
            FamilyArg::Garch => Family::Garch,
            FamilyArg::Egarch => Family::Egarch,
            FamilyArg::Gjr => Family::Gjr,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Dist {
    Normal,
    T,
}

#[derive(Args)]
struct GarchArgs {
    #[command(flatten)]
    input: Input,
    /// Mean lags, e.g. "ar=1;sar=7,14,21;ma=1;sma=7,14,21".
    #[arg(long, default_value = "")]
    mean: String,
    #[arg(long, value_enum, default_value_t = FamilyArg::Egarch)]
    family: FamilyArg,
    #[arg(long, value_enum, default_value_t = Dist::Normal)]
    dist: Dist,
    /// Rank the nine-model seasonal menu by AIC instead of fitting one model.
    #[arg(long)]
    select: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum PartitionArg {
    Fixed,
    Adaptive,
}

#[derive(Args)]
struct EntropyArgs {
    #[command(flatten)]
    input: Input,
    #[arg(long, default_value_t = 1.575)]
    a: f64,
    #[arg(long, default_value_t = 365)]
    window: usize,
    #[arg(long, default_value_t = 1)]
    step: usize,
    #[arg(long, default_value_t = 10)]
    states: usize,
    #[arg(long, value_enum, default_value_t = PartitionArg::Fixed)]
    partition: PartitionArg,
    /// Choose the index per window by q-Gaussian likelihood.
    #[arg(long)]
    optimal_a: bool,
}

#[derive(Args)]
struct HhiArgs {
    /// Shares as fractions or percentages, comma separated.
    #[arg(long, value_delimiter = ',', required = true)]
    shares: Vec<f64>,
}

#[derive(Args)]
struct ReportArgs {
    /// Run directory or bundle JSON file.
    #[arg(long)]
    bundle: PathBuf,
    /// Print the rendered text report instead of JSON.
    #[arg(long)]
    text: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum GenKind {
    WhiteNoise,
    Ar1,
    Fgn,
    Fbm,
    Arfima,
    Garch,
    Egarch,
    Gjr,
    Logistic,
    Henon,
    Sine,
    Gbm,
}

#[derive(Args)]
struct SynthArgs {
    #[arg(long, value_enum)]
    kind: GenKind,
    #[arg(long, default_value_t = 8192)]
    n: usize,
    #[arg(long = "H", default_value_t = 0.5)]
    h: f64,
    #[arg(long, default_value_t = 0.5)]
    phi: f64,
    #[arg(long, default_value_t = 1.0)]
    sd: f64,
    #[arg(long, default_value_t = 0.3)]
    d: f64,
    #[arg(long, default_value_t = -0.1)]
    k: f64,
    #[arg(long, default_value_t = 0.9)]
    gamma: f64,
    #[arg(long, default_value_t = 0.3)]
    alpha: f64,
    #[arg(long, default_value_t = -0.07)]
    xi: f64,
    /// Logistic or sine map parameter.
    #[arg(long, default_value_t = 4.0)]
    r: f64,
    /// Henon a.
    #[arg(long, default_value_t = 1.4)]
    a: f64,
    /// Henon b.
    #[arg(long, default_value_t = 0.3)]
    b: f64,
    /// Additive observation noise for the chaotic maps.
    #[arg(long)]
    snr_db: Option<f64>,
    #[arg(long, default_value_t = 100.0)]
    p0: f64,
    #[arg(long, default_value_t = 0.0)]
    mu: f64,
    #[arg(long, default_value_t = 0.01)]
    sigma: f64,
    /// First timestamp of the CSV output.
    #[arg(long, default_value = "2000-01-01")]
    start: NaiveDate,
    #[arg(long, value_enum, default_value_t = Freq::Daily)]
    frequency: Freq,
}

impl SynthArgs {
    fn spec(&self) -> GeneratorSpec {
        use GeneratorSpec as G;
        let (k, gamma, alpha, xi) = (self.k, self.gamma, self.alpha, self.xi);
        match self.kind {
            GenKind::WhiteNoise => G::WhiteNoise { sd: self.sd },
            GenKind::Ar1 => G::Ar1 { phi: self.phi, sd: self.sd },
            GenKind::Fgn => G::Fgn { h: self.h },
            GenKind::Fbm => G::Fbm { h: self.h },
            GenKind::Arfima => G::Arfima { d: self.d },
            GenKind::Garch => G::Garch11 { k, gamma, alpha },
            GenKind::Egarch => G::Egarch11 { k, gamma, alpha, xi },
            GenKind::Gjr => G::Gjr11 { k, gamma, alpha, xi },
            GenKind::Logistic => G::Logistic { r: self.r, noise_snr_db: self.snr_db },
            GenKind::Henon => G::Henon { a: self.a, b: self.b, noise_snr_db: self.snr_db },
            GenKind::Sine => G::Sine { r: self.r },
            GenKind::Gbm => G::Gbm { p0: self.p0, mu: self.mu, sigma: self.sigma },
        }
    }
}

#[derive(Args)]
struct PipelineArgs {
    /// Existing manifest to rerun.
    #[arg(long, conflicts_with = "input", required_unless_present = "input")]
    manifest: Option<PathBuf>,
    /// Price CSV for a new run.
    #[arg(long, short)]
    input: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Freq::Daily)]
    frequency: Freq,
    #[arg(long, value_enum, default_value_t = Gaps::Error)]
    gaps: Gaps,
    /// Run directory; defaults to <out-dir>/<input stem>.
    #[arg(long)]
    run_dir: Option<PathBuf>,
    /// JSON file with stage settings.
    #[arg(long)]
    config: Option<PathBuf>,
}

enum Format {
    Json,
    Csv,
}

/// What a command produced, in whichever formats it supports.
struct Output {
    json: String,
    csv: Option<String>,
    default: Format,
    failed: bool,
}

impl Output {
    fn new<T: Serialize>(v: &T) -> AnyResult<Self> {
        Ok(Output { json: to_json(v)?, csv: None, default: Format::Json, failed: false })
    }

    fn with_csv(mut self, csv: String) -> Self {
        self.csv = Some(csv);
        self
    }
}

fn to_json<T: Serialize>(v: &T) -> AnyResult<String> {
    let mut s = serde_json::to_string_pretty(v)?;
    s.push('\n');
    Ok(s)
}

fn csv_text<R: IntoIterator<Item = Vec<String>>>(header: &[&str], rows: R) -> AnyResult<String> {
    let mut w = csv::Writer::from_writer(vec![]);
    w.write_record(header)?;
    for r in rows {
        w.write_record(&r)?;
    }
    Ok(String::from_utf8(w.into_inner()?)?)
}

fn row<I: IntoIterator<Item = T>, T: ToString>(cells: I) -> Vec<String> {
    cells.into_iter().map(|c| c.to_string()).collect()
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|v| v.to_string()).unwrap_or_default()
}

fn run(cli: &Cli) -> AnyResult<Output> {
    match &cli.cmd {
        Cmd::Ingest(a) => {
            let (s, report) = load_csv(&a.source.input, a.source.frequency.into(), a.source.gaps.into())?;
            #[derive(Serialize)]
            struct Summary<'a> {
                label: &'a str,
                frequency: Frequency,
                n: usize,
                first: Option<String>,
                last: Option<String>,
                report: &'a series::LoadReport,
            }
            let summary = Summary {
                label: &s.label,
                frequency: s.frequency,
                n: s.len(),
                first: s.timestamps.first().map(|t| t.to_string()),
                last: s.timestamps.last().map(|t| t.to_string()),
                report: &report,
            };
            let csv = csv_text(&["timestamp", "price"], s.timestamps.iter().zip(&s.values).map(|(t, v)| row([t.to_string(), v.to_string()])))?;
            Ok(Output::new(&summary)?.with_csv(csv))
        }
        Cmd::Returns(a) => {
            let (s, _) = load_csv(&a.source.input, a.source.frequency.into(), a.source.gaps.into())?;
            let mut r = log_returns(&s)?;
            if let Some(p) = a.deseasonalize {
                r = series::deseasonalize(&r, p)?;
            }
            let csv = csv_text(&["timestamp", "return"], r.timestamps.iter().zip(&r.values).map(|(t, v)| row([t.to_string(), v.to_string()])))?;
            Ok(Output::new(&r)?.with_csv(csv))
        }
        Cmd::Hurst(a) => {
            let x = a.input.load()?;
            if let Some(window) = a.window {
                let cfg = RollingConfig { window, step: a.step };
                let rolled = series::rolling_apply(&x, cfg, |w| Ok(a.estimate(w)?.remove(0).h))?;
                #[derive(Serialize)]
                struct Point {
                    end_index: usize,
                    #[serde(rename = "H")]
                    h: Option<f64>,
                }
                let points: Vec<Point> = rolled.iter().map(|&(end_index, h)| Point { end_index, h }).collect();
                let csv = csv_text(&["end_index", "H"], rolled.iter().map(|(i, h)| row([i.to_string(), opt(*h)])))?;
                return Ok(Output::new(&points)?.with_csv(csv));
            }
            let est = a.estimate(&x)?;
            if let HurstMethod::Ghe = a.method {
                let csv = csv_text(&["q", "H"], est.iter().map(|e| row([opt(e.q), e.h.to_string()])))?;
                return Ok(Output::new(&est)?.with_csv(csv));
            }
            let e = &est[0];
            let csv = csv_text(&["log_x", "log_y"], e.points.iter().map(|p| row([p.log_x, p.log_y])))?;
            Ok(Output::new(e)?.with_csv(csv))
        }
        Cmd::Embed(a) => {
            let x = a.input.load()?;
            let (want_ami, want_fnn) = if a.ami || a.fnn { (a.ami, a.fnn) } else { (true, true) };
            let mut flags = Vec::new();
            let ami = match (want_ami || a.tau.is_none()).then(|| ami_first_min(&x, a.max_tau, a.bins)) {
                Some(r) => Some(r?),
                None => None,
            };
            if ami.as_ref().is_some_and(|m| m.no_minimum) {
                flags.push(format!("no AMI minimum up to tau={}", a.max_tau));
            }
            let tau = a.tau.or(ami.as_ref().map(|m| m.tau)).unwrap_or(1);
            let fnn = if want_fnn { Some(fnn(&x, tau, a.max_m, FnnParams::default())?) } else { None };
            if fnn.as_ref().is_some_and(|f| f.noise_dominated) {
                flags.push("noise dominated: no dimension below the FNN threshold".into());
            }
            #[derive(Serialize)]
            struct Embed {
                tau_star: usize,
                m_star: Option<usize>,
                ami_curve: Option<Vec<f64>>,
                fnn_curve: Option<Vec<f64>>,
                flags: Vec<String>,
            }
            let doc = Embed {
                tau_star: tau,
                m_star: fnn.as_ref().and_then(|f| f.m_star),
                ami_curve: want_ami.then(|| ami.as_ref().map(|m| m.curve.clone())).flatten(),
                fnn_curve: fnn.as_ref().map(|f| f.fractions.clone()),
                flags,
            };
            let mut rows = Vec::new();
            for (t, v) in doc.ami_curve.iter().flatten().enumerate() {
                rows.push(row(["ami".to_string(), t.to_string(), v.to_string()]));
            }
            for (m, v) in doc.fnn_curve.iter().flatten().enumerate() {
                rows.push(row(["fnn".to_string(), (m + 1).to_string(), v.to_string()]));
            }
            let csv = csv_text(&["curve", "x", "y"], rows)?;
            Ok(Output::new(&doc)?.with_csv(csv))
        }
        Cmd::Bds(a) => {
            let x = a.input.load()?;
            let norm = match a.norm {
                NormArg::Max => Norm::Max,
                NormArg::Euclidean => Norm::Euclidean,
            };
            let r = bds_test_with(&x, a.mmax, a.eps_mult, norm)?;
            let csv = csv_text(
                &["m", "W", "p_value", "c_m", "c1_pow_m"],
                r.dims.iter().map(|d| row([d.m as f64, d.w, d.p_value, d.c_m, d.c1_pow_m])),
            )?;
            Ok(Output::new(&r)?.with_csv(csv))
        }
        Cmd::Lyapunov(a) => {
            let x = a.input.load()?;
            let r = match a.method {
                LyapMethod::Jacobian => jacobian_lambda(
                    &x,
                    &JacobianConfig {
                        max_tau: a.max_tau,
                        max_m: a.max_m,
                        max_q: a.max_q,
                        seed: cli.seed,
                        bootstrap: a.bootstrap,
                        selection: match a.selection {
                            Selection::MaxLambda => TripletSelection::MaxLambda,
                            Selection::MinBic => TripletSelection::MinBic,
                        },
                    },
                )?,
                LyapMethod::Rosenstein => rosenstein(
                    &x,
                    &RosensteinConfig {
                        tau: a.tau,
                        m_min: a.m_min,
                        m_max: a.m_max,
                        theiler: a.theiler,
                        t_max: a.t_max,
                        ..Default::default()
                    },
                )?,
            };
            let csv = match &r.curve {
                Some(c) => csv_text(&["k", "mean_log_divergence"], c.iter().enumerate().map(|(k, v)| row([k.to_string(), v.to_string()])))?,
                None => csv_text(
                    &["tau", "m", "q", "lambda", "bic"],
                    r.grid.iter().map(|g| row([g.tau.to_string(), g.m.to_string(), g.q.to_string(), g.lambda.to_string(), g.bic.to_string()])),
                )?,
            };
            Ok(Output::new(&r)?.with_csv(csv))
        }
        Cmd::Garch(a) => {
            let x = a.input.load()?;
            let fit = if a.select {
                let sel = select_model(&x, &default_candidates())?;
                let best = sel.ranked[0].clone();
                let out = Output::new(&sel)?;
                return Ok(out.with_csv(sigma_csv(&best.sigma, &best.std_resid)?));
            } else {
                let var = VarianceSpec {
                    family: a.family.into(),
                    innovation: match a.dist {
                        Dist::Normal => Innovation::Normal,
                        Dist::T => Innovation::StudentT,
                    },
                };
                fit_model(&x, &MeanSpec::parse(&a.mean)?, var)?
            };
            Ok(Output::new(&fit)?.with_csv(sigma_csv(&fit.sigma, &fit.std_resid)?))
        }
        Cmd::Entropy(a) => {
            let x = a.input.load()?;
            let cfg = EntropyConfig {
                a: a.a,
                n_states: a.states,
                partition: match a.partition {
                    PartitionArg::Fixed => entropy::Partition::Fixed,
                    PartitionArg::Adaptive => entropy::Partition::Adaptive,
                },
                rolling: RollingConfig { window: a.window, step: a.step },
                optimal_a: a.optimal_a,
            };
            let t = rolling_tsallis(&x, &cfg)?;
            let csv = csv_text(
                &["end_index", "tsallis_entropy", "a"],
                t.end_index.iter().zip(&t.values).zip(&t.a).map(|((i, v), q)| row([i.to_string(), v.to_string(), q.to_string()])),
            )?;
            Ok(Output::new(&t)?.with_csv(csv))
        }
        Cmd::Hhi(a) => Output::new(&hhi(&a.shares)?),
        Cmd::Report(a) => {
            let r = efficiency_report(&load_bundle(&a.bundle)?)?;
            let mut out = Output::new(&r)?;
            if a.text {
                out.json = render_text(&r);
            }
            Ok(out)
        }
        Cmd::Synth(a) => {
            let g = generate(&a.spec(), a.n, cli.seed)?;
            let step = Frequency::from(a.frequency).step();
            let t0 = a.start.and_hms_opt(0, 0, 0).expect("midnight is valid");
            let csv = csv_text(
                &["timestamp", "value"],
                g.values.iter().enumerate().map(|(i, v)| row([(t0 + step * i as i32).to_string(), v.to_string()])),
            )?;
            let mut out = Output::new(&g)?.with_csv(csv);
            out.default = Format::Csv;
            Ok(out)
        }
        Cmd::Pipeline(a) => {
            let manifest = match (&a.manifest, &a.input) {
                (Some(path), _) => RunManifest::load(path)?,
                (None, Some(input)) => {
                    let stem = input.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "run".into());
                    let dir = a.run_dir.clone().unwrap_or_else(|| cli.out_dir.join(stem));
                    let mut m = RunManifest::new(input, a.frequency.into(), cli.seed, dir);
                    m.gap_policy = a.gaps.into();
                    if let Some(c) = &a.config {
                        m.config = serde_json::from_str(&std::fs::read_to_string(c)?)?;
                    }
                    m
                }
                (None, None) => unreachable!("clap requires --manifest or --input"),
            };
            let outcome = run_pipeline(&manifest)?;
            let csv = csv_text(
                &["stage", "status"],
                outcome.stages.iter().map(|s| {
                    let v = serde_json::to_value(s).unwrap_or_default();
                    row([s.stage().to_string(), v["status"].as_str().unwrap_or_default().to_string()])
                }),
            )?;
            let mut out = Output::new(&outcome)?.with_csv(csv);
            out.failed = !outcome.ok();
            Ok(out)
        }
    }
}

fn sigma_csv(sigma: &[f64], z: &[f64]) -> AnyResult<String> {
    csv_text(&["index", "sigma", "std_resid"], sigma.iter().zip(z).enumerate().map(|(i, (s, e))| row([i.to_string(), s.to_string(), e.to_string()])))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = run(&cli).and_then(|out| {
        let format = if cli.csv {
            Format::Csv
        } else if cli.json {
            Format::Json
        } else {
            out.default
        };
        let text = match format {
            Format::Json => out.json,
            Format::Csv => out.csv.ok_or("this command has no CSV output")?,
        };
        match &cli.out {
            Some(path) => std::fs::write(path, text)?,
            None => print!("{text}"),
        }
        Ok(out.failed)
    });
    match result {
        Ok(false) => ExitCode::SUCCESS,
        Ok(true) => {
            eprintln!("error: one or more pipeline stages failed");
            ExitCode::FAILURE
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
