//! Price ingestion, returns, deseasonalization and rolling windows.

use crate::error::{need, Error, Result};
use crate::stats;
use chrono::{Datelike, Duration, NaiveDate, NaiveDateTime, Timelike};
use serde::{Deserialize, Serialize};
use std::path::Path;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Frequency {
    Hourly,
    Daily,
}

impl Frequency {
    pub fn step(self) -> Duration {
        match self {
            Frequency::Hourly => Duration::hours(1),
            Frequency::Daily => Duration::days(1),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GapPolicy {
    Error,
    ForwardFill,
    Interpolate,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PriceSeries {
    pub timestamps: Vec<NaiveDateTime>,
    pub values: Vec<f64>,
    pub frequency: Frequency,
    pub label: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LoadReport {
    pub rows: usize,
    pub gaps_resolved: usize,
    pub non_positive: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReturnSeries {
    /// Timestamp of the later price of each pair.
    pub timestamps: Vec<NaiveDateTime>,
    pub values: Vec<f64>,
    pub parent_label: String,
    pub deseasonalized: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RollingConfig {
    pub window: usize,
    pub step: usize,
}

impl PriceSeries {
    pub fn new(
        timestamps: Vec<NaiveDateTime>,
        values: Vec<f64>,
        frequency: Frequency,
        label: impl Into<String>,
    ) -> Result<Self> {
        if timestamps.len() != values.len() {
            return Err(Error::InvalidInput("timestamps and values differ in length".into()));
        }
        need(values.len(), 2)?;
        for w in timestamps.windows(2) {
            if w[1] == w[0] {
                return Err(Error::DuplicateTimestamp(w[1].to_string()));
            }
            if w[1] < w[0] {
                return Err(Error::InvalidInput(format!("timestamps not increasing at {}", w[1])));
            }
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::InvalidInput(format!("non-finite value {v}")));
        }
        Ok(PriceSeries { timestamps, values, frequency, label: label.into() })
    }

    /// Daily series with consecutive dates starting at `start`.
    pub fn daily_from(start: NaiveDate, values: Vec<f64>, label: &str) -> Result<Self> {
        let t0 = start.and_hms_opt(0, 0, 0).unwrap();
        let ts = (0..values.len()).map(|i| t0 + Duration::days(i as i64)).collect();
        PriceSeries::new(ts, values, Frequency::Daily, label)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn scaled(&self, c: f64) -> Self {
        let mut s = self.clone();
        s.values.iter_mut().for_each(|v| *v *= c);
        s
    }
}

fn parse_ts(s: &str) -> Option<NaiveDateTime> {
    let s = s.trim();
    if let Ok(t) = NaiveDateTime::parse_from_str(s, "%Y-%m-%dT%H:%M:%S") {
        return Some(t);
    }
    if let Ok(t) = NaiveDateTime::parse_from_str(s, "%Y-%m-%d %H:%M:%S") {
        return Some(t);
    }
    if let Ok(t) = NaiveDateTime::parse_from_str(s, "%Y-%m-%dT%H:%M") {
        return Some(t);
    }
    if let Ok(t) = chrono::DateTime::parse_from_rfc3339(s) {
        return Some(t.naive_utc());
    }
    NaiveDate::parse_from_str(s, "%Y-%m-%d").ok().and_then(|d| d.and_hms_opt(0, 0, 0))
}

pub fn load_csv(path: &Path, frequency: Frequency, gap_policy: GapPolicy) -> Result<(PriceSeries, LoadReport)> {
    let text = std::fs::read_to_string(path)?;
    let label = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    parse_csv(&text, frequency, gap_policy, &label)
}

pub fn parse_csv(
    text: &str,
    frequency: Frequency,
    gap_policy: GapPolicy,
    label: &str,
) -> Result<(PriceSeries, LoadReport)> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).trim(csv::Trim::All).from_reader(text.as_bytes());
    let mut ts = Vec::new();
    let mut vals = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let line = i + 2;
        let rec = rec.map_err(|e| Error::Malformed { line, msg: e.to_string() })?;
        if rec.len() != 2 {
            return Err(Error::Malformed { line, msg: format!("expected 2 columns, got {}", rec.len()) });
        }
        let t = parse_ts(&rec[0]).ok_or_else(|| Error::Malformed { line, msg: format!("bad timestamp {:?}", &rec[0]) })?;
        let v: f64 = rec[1]
            .parse()
            .map_err(|_| Error::Malformed { line, msg: format!("bad value {:?}", &rec[1]) })?;
        if !v.is_finite() {
            return Err(Error::Malformed { line, msg: "non-finite value".into() });
        }
        if let Some(&last) = ts.last() {
            if t == last {
                return Err(Error::DuplicateTimestamp(t.to_string()));
            }
            if t < last {
                return Err(Error::Malformed { line, msg: "timestamps out of order".into() });
            }
        }
        ts.push(t);
        vals.push(v);
    }
    let rows = ts.len();
    let step = frequency.step();
    let mut out_t = Vec::with_capacity(rows);
    let mut out_v = Vec::with_capacity(rows);
    let mut gaps = 0;
    for i in 0..rows {
        if i > 0 {
            let (t0, v0) = (ts[i - 1], vals[i - 1]);
            let missing = ((ts[i] - t0).num_seconds() / step.num_seconds()) - 1;
            if missing > 0 {
                match gap_policy {
                    GapPolicy::Error => return Err(Error::Gap(ts[i].to_string())),
                    GapPolicy::ForwardFill | GapPolicy::Interpolate => {
                        for k in 1..=missing {
                            let frac = k as f64 / (missing + 1) as f64;
                            let v = match gap_policy {
                                GapPolicy::ForwardFill => v0,
                                _ => v0 + frac * (vals[i] - v0),
                            };
                            out_t.push(t0 + step * k as i32);
                            out_v.push(v);
                        }
                        gaps += missing as usize;
                    }
                }
            }
        }
        out_t.push(ts[i]);
        out_v.push(vals[i]);
    }
    let non_positive = out_t
        .iter()
        .zip(&out_v)
        .filter(|(_, &v)| v <= 0.0)
        .map(|(t, _)| t.to_string())
        .collect();
    let series = PriceSeries::new(out_t, out_v, frequency, label)?;
    Ok((series, LoadReport { rows, gaps_resolved: gaps, non_positive }))
}

pub fn log_returns(series: &PriceSeries) -> Result<ReturnSeries> {
    for (t, &v) in series.timestamps.iter().zip(&series.values) {
        if v <= 0.0 {
            return Err(Error::NonPositivePrice { timestamp: t.to_string(), value: v });
        }
    }
    let values = series.values.windows(2).map(|w| (w[1] / w[0]).ln()).collect();
    Ok(ReturnSeries {
        timestamps: series.timestamps[1..].to_vec(),
        values,
        parent_label: series.label.clone(),
        deseasonalized: false,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SeriesKind {
    /// Price levels; analyses run on their log returns.
    Prices,
    /// Values used as they are.
    Returns,
}

/// Loads a two-column CSV and returns the series an estimator should see.
pub fn analysis_series(
    path: &Path,
    frequency: Frequency,
    gap_policy: GapPolicy,
    kind: SeriesKind,
    deseasonalize_period: Option<usize>,
) -> Result<Vec<f64>> {
    let (s, _) = load_csv(path, frequency, gap_policy)?;
    let x = match kind {
        SeriesKind::Prices => log_returns(&s)?.values,
        SeriesKind::Returns => s.values,
    };
    match deseasonalize_period {
        Some(p) => deseasonalize_values(&x, p),
        None => Ok(x),
    }
}

/// Removes the per-phase mean (phase = index mod period).
pub fn deseasonalize_values(x: &[f64], period: usize) -> Result<Vec<f64>> {
    if period < 2 {
        return Err(Error::InvalidInput("period must be >= 2".into()));
    }
    if period > x.len() {
        return Err(Error::InvalidInput(format!("period {period} exceeds length {}", x.len())));
    }
    let mut sum = vec![0.0; period];
    let mut cnt = vec![0usize; period];
    for (i, v) in x.iter().enumerate() {
        sum[i % period] += v;
        cnt[i % period] += 1;
    }
    let prof: Vec<f64> = sum.iter().zip(&cnt).map(|(s, &c)| s / c as f64).collect();
    Ok(x.iter().enumerate().map(|(i, v)| v - prof[i % period]).collect())
}

pub fn deseasonalize(returns: &ReturnSeries, period: usize) -> Result<ReturnSeries> {
    Ok(ReturnSeries {
        values: deseasonalize_values(&returns.values, period)?,
        deseasonalized: true,
        ..returns.clone()
    })
}

/// Divides out a fitted annual sinusoid on log prices, keeping the level.
pub fn remove_annual_cycle(series: &PriceSeries) -> Result<PriceSeries> {
    use nalgebra::{DMatrix, DVector};
    let n = series.len();
    let period = match series.frequency {
        Frequency::Daily => 365.25,
        Frequency::Hourly => 365.25 * 24.0,
    };
    if series.values.iter().any(|&v| v <= 0.0) {
        return Err(Error::InvalidInput("annual-cycle removal needs positive prices".into()));
    }
    let w = 2.0 * std::f64::consts::PI / period;
    let x = DMatrix::from_fn(n, 3, |i, j| match j {
        0 => 1.0,
        1 => (w * i as f64).sin(),
        _ => (w * i as f64).cos(),
    });
    let y = DVector::from_iterator(n, series.values.iter().map(|v| v.ln()));
    let (b, _) = crate::regress::ols(&x, &y).ok_or_else(|| Error::Degenerate("annual fit".into()))?;
    let mut out = series.clone();
    for (i, v) in out.values.iter_mut().enumerate() {
        let s = b[1] * (w * i as f64).sin() + b[2] * (w * i as f64).cos();
        *v *= (-s).exp();
    }
    Ok(out)
}

/// Number of windows produced by a rolling configuration.
pub fn window_count(n: usize, cfg: RollingConfig) -> usize {
    if cfg.window == 0 || cfg.window > n || cfg.step == 0 {
        0
    } else {
        (n - cfg.window) / cfg.step + 1
    }
}

fn check_rolling(n: usize, cfg: RollingConfig) -> Result<()> {
    if cfg.window == 0 || cfg.window > n {
        return Err(Error::InvalidInput(format!("window {} does not fit length {n}", cfg.window)));
    }
    if cfg.step == 0 || cfg.step > n {
        return Err(Error::InvalidInput(format!("step {} outside 1..={n}", cfg.step)));
    }
    Ok(())
}

/// Applies `f` to each window; a failing window yields `None`. Returns (end index, value).
pub fn rolling_apply<T, F>(x: &[f64], cfg: RollingConfig, f: F) -> Result<Vec<(usize, Option<T>)>>
where
    F: Fn(&[f64]) -> Result<T>,
{
    check_rolling(x.len(), cfg)?;
    Ok((0..window_count(x.len(), cfg))
        .map(|i| {
            let s = i * cfg.step;
            let e = s + cfg.window;
            (e - 1, f(&x[s..e]).ok())
        })
        .collect())
}

pub fn rolling_apply_series<T, F>(
    r: &ReturnSeries,
    cfg: RollingConfig,
    f: F,
) -> Result<Vec<(NaiveDateTime, Option<T>)>>
where
    F: Fn(&[f64]) -> Result<T>,
{
    Ok(rolling_apply(&r.values, cfg, f)?
        .into_iter()
        .map(|(i, v)| (r.timestamps[i], v))
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Partition {
    Annual,
    Whole,
}

pub fn unconditional_volatility(r: &ReturnSeries, partition: Partition) -> Result<Vec<(String, f64)>> {
    match partition {
        Partition::Whole => {
            need(r.values.len(), 2)?;
            Ok(vec![("whole".into(), stats::sd(&r.values))])
        }
        Partition::Annual => {
            let mut groups: std::collections::BTreeMap<i32, Vec<f64>> = Default::default();
            for (t, v) in r.timestamps.iter().zip(&r.values) {
                groups.entry(t.year()).or_default().push(*v);
            }
            if groups.is_empty() {
                return Err(Error::InvalidInput("empty partition".into()));
            }
            groups
                .into_iter()
                .map(|(y, v)| {
                    if v.len() < 2 {
                        Err(Error::InvalidInput(format!("year {y} has fewer than 2 returns")))
                    } else {
                        Ok((y.to_string(), stats::sd(&v)))
                    }
                })
                .collect()
        }
    }
}

pub fn hourly_profile(series: &PriceSeries) -> Result<Vec<(f64, f64)>> {
    if series.frequency != Frequency::Hourly {
        return Err(Error::InvalidInput("hourly profile needs hourly data".into()));
    }
    need(series.len(), 48)?;
    let mut by_hour: Vec<Vec<f64>> = vec![Vec::new(); 24];
    for (t, v) in series.timestamps.iter().zip(&series.values) {
        by_hour[t.hour() as usize].push(*v);
    }
    Ok(by_hour
        .iter()
        .map(|v| {
            let m = stats::mean(v);
            let s = if v.len() >= 2 { stats::sd(v) } else { 0.0 };
            (m, s)
        })
        .collect())
}
