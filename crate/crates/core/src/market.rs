//! Concentration index, cross-metric correlations and the year-on-year
//! direction-of-change table.

use crate::error::{Error, Result};
use crate::stats;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HhiClass {
    Monopoly,
    OverConcentrated,
    Concentrated,
    ModeratelyCompetitive,
    Competitive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Hhi {
    pub value: f64,
    pub class: HhiClass,
    /// Shares as fractions after percentage detection.
    pub shares: Vec<f64>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub flags: Vec<String>,
}

pub fn hhi_class(v: f64) -> HhiClass {
    if v >= 10000.0 - 1e-9 {
        HhiClass::Monopoly
    } else if v > 5000.0 {
        HhiClass::OverConcentrated
    } else if v > 1800.0 {
        HhiClass::Concentrated
    } else if v > 1000.0 {
        HhiClass::ModeratelyCompetitive
    } else {
        HhiClass::Competitive
    }
}

/// 10000 * sum s_i^2. Percent input is detected when the shares sum above 1.5.
pub fn hhi(shares: &[f64]) -> Result<Hhi> {
    if shares.is_empty() {
        return Err(Error::InvalidInput("no shares".into()));
    }
    if shares.iter().any(|&s| !(s > 0.0) || !s.is_finite()) {
        return Err(Error::InvalidInput("shares must be positive and finite".into()));
    }
    let total: f64 = shares.iter().sum();
    let s: Vec<f64> = if total > 1.5 { shares.iter().map(|v| v / 100.0).collect() } else { shares.to_vec() };
    if let Some(bad) = s.iter().find(|&&v| v > 1.0) {
        return Err(Error::InvalidInput(format!("share {bad} exceeds 1")));
    }
    let mut flags = Vec::new();
    let sum: f64 = s.iter().sum();
    if sum > 1.0 + 1e-9 {
        flags.push(format!("shares sum to {sum:.4} > 1"));
    }
    let value = 10000.0 * s.iter().map(|v| v * v).sum::<f64>();
    Ok(Hhi { value, class: hhi_class(value), shares: s, flags })
}

/// One typed year of the annual panel.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct YearRecord {
    pub year: i32,
    pub sigma_raw: Option<f64>,
    pub sigma_deseason: Option<f64>,
    pub sigma_conditional: Option<f64>,
    pub hhi: Option<f64>,
    pub h: Option<f64>,
    pub h_distance: Option<f64>,
    pub lambda_max: Option<f64>,
    pub h_a: Option<f64>,
}

/// Labelled columns over consecutive years.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnnualPanel {
    pub years: Vec<i32>,
    pub columns: Vec<(String, Vec<Option<f64>>)>,
}

impl AnnualPanel {
    pub fn new(years: Vec<i32>) -> Result<Self> {
        if years.windows(2).any(|w| w[1] != w[0] + 1) {
            return Err(Error::InvalidInput("years must be consecutive".into()));
        }
        Ok(AnnualPanel { years, columns: vec![] })
    }

    pub fn with_column(mut self, label: &str, values: &[f64]) -> Result<Self> {
        self.push(label, values.iter().map(|&v| Some(v)).collect())?;
        Ok(self)
    }

    pub fn push(&mut self, label: &str, values: Vec<Option<f64>>) -> Result<()> {
        if values.len() != self.years.len() {
            return Err(Error::InvalidInput(format!("column {label} has {} values for {} years", values.len(), self.years.len())));
        }
        self.columns.push((label.to_string(), values));
        Ok(())
    }

    pub fn from_records(records: &[YearRecord]) -> Result<Self> {
        let mut p = AnnualPanel::new(records.iter().map(|r| r.year).collect())?;
        let cols: [(&str, fn(&YearRecord) -> Option<f64>); 8] = [
            ("sigma_raw", |r| r.sigma_raw),
            ("sigma_deseason", |r| r.sigma_deseason),
            ("sigma_conditional", |r| r.sigma_conditional),
            ("hhi", |r| r.hhi),
            ("H", |r| r.h),
            ("H_distance", |r| r.h_distance),
            ("lambda_max", |r| r.lambda_max),
            ("H_a", |r| r.h_a),
        ];
        for (label, get) in cols {
            let v: Vec<Option<f64>> = records.iter().map(get).collect();
            if v.iter().any(|x| x.is_some()) {
                p.push(label, v)?;
            }
        }
        Ok(p)
    }

    pub fn column(&self, label: &str) -> Option<&[Option<f64>]> {
        self.columns.iter().find(|(l, _)| l == label).map(|(_, v)| v.as_slice())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationMatrix {
    pub labels: Vec<String>,
    /// None where fewer than 3 complete pairs exist or a column is constant.
    pub values: Vec<Vec<Option<f64>>>,
}

impl CorrelationMatrix {
    pub fn get(&self, a: &str, b: &str) -> Option<f64> {
        let i = self.labels.iter().position(|l| l == a)?;
        let j = self.labels.iter().position(|l| l == b)?;
        self.values[i][j]
    }
}

pub fn correlation_matrix(panel: &AnnualPanel) -> CorrelationMatrix {
    let k = panel.columns.len();
    let mut values = vec![vec![None; k]; k];
    for i in 0..k {
        for j in i..k {
            let (x, y): (Vec<f64>, Vec<f64>) = panel.columns[i]
                .1
                .iter()
                .zip(&panel.columns[j].1)
                .filter_map(|(a, b)| Some(((*a)?, (*b)?)))
                .unzip();
            let r = if x.len() >= 3 {
                let r = stats::pearson(&x, &y);
                r.is_finite().then(|| if i == j { 1.0 } else { r })
            } else {
                None
            };
            values[i][j] = r;
            values[j][i] = r;
        }
    }
    CorrelationMatrix { labels: panel.columns.iter().map(|(l, _)| l.clone()).collect(), values }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Change {
    /// Lambda became more negative.
    MN,
    /// Lambda became less negative.
    LN,
    I,
    D,
    NoChange,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DirectionRow {
    pub year: i32,
    pub d_lambda: Change,
    pub stability: Change,
    pub d_sigma: Change,
    pub sigma_change: f64,
    /// None when either change is a tie.
    pub consistent: Option<bool>,
}

pub fn direction_of_change(years: &[i32], lambda: &[f64], sigma: &[f64]) -> Result<Vec<DirectionRow>> {
    if years.len() < 2 {
        return Err(Error::TooShort { need: 2, got: years.len() });
    }
    if lambda.len() != years.len() || sigma.len() != years.len() {
        return Err(Error::InvalidInput("columns differ in length".into()));
    }
    years
        .windows(2)
        .enumerate()
        .map(|(i, w)| {
            if w[1] != w[0] + 1 {
                return Err(Error::InvalidInput(format!("missing year between {} and {}", w[0], w[1])));
            }
            let dl = lambda[i + 1] - lambda[i];
            let ds = sigma[i + 1] - sigma[i];
            let (d_lambda, stability) = if dl < 0.0 {
                (Change::MN, Change::I)
            } else if dl > 0.0 {
                (Change::LN, Change::D)
            } else {
                (Change::NoChange, Change::NoChange)
            };
            let d_sigma = if ds > 0.0 {
                Change::I
            } else if ds < 0.0 {
                Change::D
            } else {
                Change::NoChange
            };
            let consistent = match (d_lambda, d_sigma) {
                (Change::NoChange, _) | (_, Change::NoChange) => None,
                (Change::MN, Change::D) | (Change::LN, Change::I) => Some(true),
                _ => Some(false),
            };
            Ok(DirectionRow { year: w[1], d_lambda, stability, d_sigma, sigma_change: ds, consistent })
        })
        .collect()
}
