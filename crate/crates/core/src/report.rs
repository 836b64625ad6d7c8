//! Composite (sigma, lambda, H, HHI, E) efficiency report.

use crate::bds::BdsResult;
use crate::error::{Error, Result};
use crate::hurst::{classify, hurst_distance, HurstEstimate, Method, Persistence};
use crate::lyapunov::{LyapunovResult, Verdict};
use crate::market::{correlation_matrix, AnnualPanel, CorrelationMatrix, Hhi};
use serde::{Deserialize, Serialize};
use std::fmt::Write;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionalSummary {
    pub model: String,
    pub k: f64,
    pub gamma: f64,
    pub alpha: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub xi: Option<f64>,
    pub aic: f64,
    pub bic: f64,
    pub mean_sigma: f64,
    pub arch_lm_p: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntropySummary {
    pub a: f64,
    pub windows: usize,
    pub mean: f64,
    pub min: f64,
    pub max: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub corr_with_sigma: Option<f64>,
}

/// Component results for one series; any part may be missing.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Bundle {
    pub label: String,
    #[serde(default)]
    pub hurst: Vec<HurstEstimate>,
    #[serde(default)]
    pub annual_hurst: Vec<(String, f64)>,
    #[serde(default)]
    pub bds: Option<BdsResult>,
    #[serde(default)]
    pub lyapunov: Option<LyapunovResult>,
    #[serde(default)]
    pub annual_lyapunov: Vec<(String, f64)>,
    #[serde(default)]
    pub volatility: Vec<(String, f64)>,
    #[serde(default)]
    pub conditional: Option<ConditionalSummary>,
    #[serde(default)]
    pub hhi: Vec<(String, Hhi)>,
    #[serde(default)]
    pub entropy: Option<EntropySummary>,
    #[serde(default)]
    pub panel: Option<AnnualPanel>,
}

impl Bundle {
    fn is_empty(&self) -> bool {
        self.hurst.is_empty()
            && self.annual_hurst.is_empty()
            && self.bds.is_none()
            && self.lyapunov.is_none()
            && self.volatility.is_empty()
            && self.conditional.is_none()
            && self.hhi.is_empty()
            && self.entropy.is_none()
            && self.panel.is_none()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HurstRow {
    pub method: Method,
    #[serde(rename = "H")]
    pub h: f64,
    pub distance: f64,
    pub persistence: Persistence,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EfficiencyReport {
    pub label: String,
    pub hurst: Vec<HurstRow>,
    #[serde(rename = "H_median")]
    pub h_median: Option<f64>,
    pub persistence: Option<Persistence>,
    pub verdict: String,
    pub nonlinear_dependence: Option<bool>,
    pub chaos: Option<Verdict>,
    pub lambda_max: Option<f64>,
    pub annual_hurst: Vec<(String, f64)>,
    pub annual_lyapunov: Vec<(String, f64)>,
    pub volatility: Vec<(String, f64)>,
    pub conditional: Option<ConditionalSummary>,
    pub hhi: Vec<(String, f64, String)>,
    pub entropy: Option<EntropySummary>,
    pub correlation: Option<CorrelationMatrix>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub flags: Vec<String>,
}

fn median(mut v: Vec<f64>) -> Option<f64> {
    if v.is_empty() {
        return None;
    }
    v.sort_by(f64::total_cmp);
    let n = v.len();
    Some(if n % 2 == 1 { v[n / 2] } else { 0.5 * (v[n / 2 - 1] + v[n / 2]) })
}

pub fn efficiency_report(b: &Bundle) -> Result<EfficiencyReport> {
    if b.is_empty() {
        return Err(Error::InvalidInput("empty bundle: no component results".into()));
    }
    let mut flags = Vec::new();
    let hurst: Vec<HurstRow> = b
        .hurst
        .iter()
        .filter(|e| e.h.is_finite())
        .map(|e| HurstRow { method: e.method, h: e.h, distance: hurst_distance(e.h), persistence: classify(e.h) })
        .collect();
    for e in &b.hurst {
        flags.extend(e.flags.iter().map(|f| format!("hurst {:?}: {f}", e.method)));
    }
    let h_median = median(hurst.iter().map(|r| r.h).collect());
    let persistence = h_median.map(classify);
    let nonlinear_dependence = b.bds.as_ref().map(|r| r.rejects(0.05));
    if let Some(l) = &b.lyapunov {
        flags.extend(l.flags.iter().map(|f| format!("lyapunov: {f}")));
    }
    let verdict = match (persistence, nonlinear_dependence) {
        (None, _) => "undetermined (no Hurst estimates)".to_string(),
        (Some(Persistence::RandomWalk), Some(true)) => "random-walk scaling with nonlinear dependence".to_string(),
        (Some(p), _) => p.describe().to_string(),
    };
    let hhi = b
        .hhi
        .iter()
        .map(|(label, h)| {
            flags.extend(h.flags.iter().map(|f| format!("hhi {label}: {f}")));
            (label.clone(), h.value, format!("{:?}", h.class))
        })
        .collect();
    Ok(EfficiencyReport {
        label: b.label.clone(),
        hurst,
        h_median,
        persistence,
        verdict,
        nonlinear_dependence,
        chaos: b.lyapunov.as_ref().map(|l| l.verdict),
        lambda_max: b.lyapunov.as_ref().map(|l| l.lambda_max),
        annual_hurst: b.annual_hurst.clone(),
        annual_lyapunov: b.annual_lyapunov.clone(),
        volatility: b.volatility.clone(),
        conditional: b.conditional.clone(),
        hhi,
        entropy: b.entropy.clone(),
        correlation: b.panel.as_ref().map(correlation_matrix),
        flags,
    })
}

fn opt(v: Option<f64>) -> String {
    v.map_or("-".to_string(), |x| format!("{x:.4}"))
}

/// Plain-text rendering of the report tables.
pub fn render_text(r: &EfficiencyReport) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "Efficiency report: {}", r.label);
    let _ = writeln!(s, "Verdict: {}", r.verdict);
    if !r.hurst.is_empty() {
        let _ = writeln!(s, "\nHurst exponents");
        let _ = writeln!(s, "{:<12} {:>8} {:>8}  {}", "method", "H", "|H-0.5|", "class");
        for h in &r.hurst {
            let _ = writeln!(s, "{:<12} {:>8.4} {:>8.4}  {}", format!("{:?}", h.method), h.h, h.distance, h.persistence.describe());
        }
        let _ = writeln!(s, "{:<12} {:>8}", "median", opt(r.h_median));
    }
    if let Some(nl) = r.nonlinear_dependence {
        let _ = writeln!(s, "\nBDS: {}", if nl { "i.i.d. rejected" } else { "i.i.d. not rejected" });
    }
    if let (Some(l), Some(v)) = (r.lambda_max, r.chaos) {
        let _ = writeln!(s, "Max Lyapunov exponent: {l:.4} ({})", if v == Verdict::Chaos { "chaos not rejected" } else { "chaos rejected" });
    }
    for (title, rows) in [("Annual Hurst", &r.annual_hurst), ("Annual max Lyapunov", &r.annual_lyapunov), ("Unconditional volatility", &r.volatility)] {
        if !rows.is_empty() {
            let _ = writeln!(s, "\n{title}");
            for (k, v) in rows.iter() {
                let _ = writeln!(s, "{k:<12} {v:>10.4}");
            }
        }
    }
    if let Some(c) = &r.conditional {
        let _ = writeln!(
            s,
            "\nConditional volatility: {} k={:.4} gamma={:.4} alpha={:.4} xi={} AIC={:.2} BIC={:.2}",
            c.model, c.k, c.gamma, c.alpha, opt(c.xi), c.aic, c.bic
        );
    }
    if !r.hhi.is_empty() {
        let _ = writeln!(s, "\nHHI");
        for (k, v, c) in &r.hhi {
            let _ = writeln!(s, "{k:<12} {v:>10.1}  {c}");
        }
    }
    if let Some(e) = &r.entropy {
        let _ = writeln!(s, "\nTsallis entropy (a={}): mean {:.4}, range [{:.4}, {:.4}] over {} windows", e.a, e.mean, e.min, e.max, e.windows);
    }
    if let Some(c) = &r.correlation {
        let _ = writeln!(s, "\nCorrelation matrix");
        let _ = write!(s, "{:<18}", "");
        for l in &c.labels {
            let _ = write!(s, "{l:>18}");
        }
        let _ = writeln!(s);
        for (i, l) in c.labels.iter().enumerate() {
            let _ = write!(s, "{l:<18}");
            for v in &c.values[i] {
                let _ = write!(s, "{:>18}", opt(*v));
            }
            let _ = writeln!(s);
        }
    }
    for f in &r.flags {
        let _ = writeln!(s, "flag: {f}");
    }
    s
}
