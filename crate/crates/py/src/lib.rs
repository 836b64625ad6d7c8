//! Python module `emhkit`. Results come back as plain dicts and lists with the
//! same field names as the JSON the CLI writes.

use emhkit::bds::{bds_test_with, Norm};
use emhkit::embedding::{ami_first_min, fnn as fnn_curve, FnnParams};
use emhkit::entropy::{self, EntropyConfig};
use emhkit::hurst::{self, Exponent, DEFAULT_TAU_MAX};
use emhkit::lyapunov::{self, JacobianConfig, RosensteinConfig, TripletSelection};
use emhkit::market::{self, AnnualPanel};
use emhkit::pipeline::{self, RunManifest};
use emhkit::report;
use emhkit::series::{self, Frequency, GapPolicy, RollingConfig};
use emhkit::synth::{self, Family, GeneratorSpec};
use emhkit::volatility::{self, Innovation, MeanSpec, VarianceSpec};
use pyo3::exceptions::{PyIOError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;
use serde::de::DeserializeOwned;
use serde::Serialize;
use std::path::PathBuf;

fn err(e: emhkit::Error) -> PyErr {
    match e {
        emhkit::Error::Io(msg) => PyIOError::new_err(msg),
        other => PyValueError::new_err(other.to_string()),
    }
}

fn to_py<'py, T: Serialize>(py: Python<'py>, v: &T) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(v).map_err(|e| PyValueError::new_err(e.to_string()))?;
    py.import("json")?.call_method1("loads", (text,))
}

fn from_py<T: DeserializeOwned>(obj: &Bound<'_, PyAny>) -> PyResult<T> {
    let text: String = obj.py().import("json")?.call_method1("dumps", (obj,))?.extract()?;
    serde_json::from_str(&text).map_err(|e| PyValueError::new_err(e.to_string()))
}

fn parse<T: DeserializeOwned>(what: &str, name: &str) -> PyResult<T> {
    serde_json::from_value(serde_json::Value::String(name.into()))
        .map_err(|_| PyValueError::new_err(format!("unknown {what}: {name:?}")))
}

fn family(name: &str) -> PyResult<Family> {
    match name.to_ascii_lowercase().as_str() {
        "garch" => Ok(Family::Garch),
        "egarch" => Ok(Family::Egarch),
        "gjr" => Ok(Family::Gjr),
        _ => Err(PyValueError::new_err(format!("unknown family: {name:?}"))),
    }
}

/// Price series loaded from a two-column CSV.
#[pyclass(name = "PriceSeries", module = "emhkit")]
struct PyPriceSeries {
    inner: series::PriceSeries,
}

#[pymethods]
impl PyPriceSeries {
    #[staticmethod]
    #[pyo3(signature = (path, frequency = "daily", gap_policy = "error"))]
    fn load_csv(path: PathBuf, frequency: &str, gap_policy: &str) -> PyResult<Self> {
        let f: Frequency = parse("frequency", frequency)?;
        let g: GapPolicy = parse("gap policy", gap_policy)?;
        let (inner, _) = series::load_csv(&path, f, g).map_err(err)?;
        Ok(PyPriceSeries { inner })
    }

    #[getter]
    fn label(&self) -> String {
        self.inner.label.clone()
    }

    #[getter]
    fn values(&self) -> Vec<f64> {
        self.inner.values.clone()
    }

    #[getter]
    fn timestamps(&self) -> Vec<String> {
        self.inner.timestamps.iter().map(|t| t.to_string()).collect()
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn log_returns(&self) -> PyResult<Vec<f64>> {
        Ok(series::log_returns(&self.inner).map_err(err)?.values)
    }
}

#[pyfunction(name = "hurst")]
#[pyo3(signature = (x, method = "rs-al", q = 1.0, k_exponent = 0.5, detrend_order = 1))]
fn hurst_exponent<'py>(py: Python<'py>, x: Vec<f64>, method: &str, q: f64, k_exponent: f64, detrend_order: usize) -> PyResult<Bound<'py, PyAny>> {
    let taus: Vec<usize> = DEFAULT_TAU_MAX.collect();
    let est = match method {
        "rs" => hurst::rs_hurst(&x, None),
        "rs-al" => hurst::rs_hurst_corrected(&x, None),
        "dfa" => hurst::dfa(&x, None, detrend_order),
        "ghe" => hurst::ghe(&emhkit::stats::cumsum(&x), &[q], &taus).map(|mut v| v.remove(0)),
        "gph" => hurst::gph(&x, k_exponent),
        "spec" => hurst::spectral_beta(&x).map(|s| s.estimate),
        _ => return Err(PyValueError::new_err(format!("unknown method: {method:?}"))),
    }
    .map_err(err)?;
    to_py(py, &est)
}

#[pyfunction]
fn rs_expected(n: usize) -> PyResult<f64> {
    hurst::rs_expected(n).map_err(err)
}

#[pyfunction]
fn exponent_relations<'py>(py: Python<'py>, kind: &str, value: f64) -> PyResult<Bound<'py, PyAny>> {
    let e = match kind {
        "alpha" => Exponent::Alpha(value),
        "beta" => Exponent::Beta(value),
        "delta" => Exponent::Delta(value),
        "H" | "h" => Exponent::H(value),
        _ => return Err(PyValueError::new_err(format!("unknown exponent: {kind:?}"))),
    };
    to_py(py, &hurst::exponent_relations(e))
}

#[pyfunction]
#[pyo3(signature = (x, m_max = 6, eps_multiple = 0.5, norm = "max"))]
fn bds_test<'py>(py: Python<'py>, x: Vec<f64>, m_max: usize, eps_multiple: f64, norm: &str) -> PyResult<Bound<'py, PyAny>> {
    let norm: Norm = parse("norm", norm)?;
    to_py(py, &bds_test_with(&x, m_max, eps_multiple, norm).map_err(err)?)
}

#[pyfunction]
#[pyo3(signature = (x, max_tau = 20, max_m = 10))]
fn embed<'py>(py: Python<'py>, x: Vec<f64>, max_tau: usize, max_m: usize) -> PyResult<Bound<'py, PyAny>> {
    let a = ami_first_min(&x, max_tau, None).map_err(err)?;
    let f = fnn_curve(&x, a.tau, max_m, FnnParams::default()).map_err(err)?;
    let d = PyDict::new(py);
    d.set_item("ami", to_py(py, &a)?)?;
    d.set_item("fnn", to_py(py, &f)?)?;
    Ok(d.into_any())
}

#[pyfunction]
#[pyo3(signature = (x, method = "jacobian", max_tau = 2, max_m = 7, max_q = 3, seed = 0, bootstrap = 499, selection = "max_lambda"))]
#[allow(clippy::too_many_arguments)]
fn lyapunov_exponent<'py>(
    py: Python<'py>,
    x: Vec<f64>,
    method: &str,
    max_tau: usize,
    max_m: usize,
    max_q: usize,
    seed: u64,
    bootstrap: usize,
    selection: &str,
) -> PyResult<Bound<'py, PyAny>> {
    let r = match method {
        "jacobian" => {
            let selection: TripletSelection = parse("selection", selection)?;
            lyapunov::jacobian_lambda(&x, &JacobianConfig { max_tau, max_m, max_q, seed, bootstrap, selection })
        }
        "rosenstein" => lyapunov::rosenstein(&x, &RosensteinConfig::default()),
        _ => return Err(PyValueError::new_err(format!("unknown method: {method:?}"))),
    }
    .map_err(err)?;
    to_py(py, &r)
}

#[pyfunction]
#[pyo3(signature = (x, family = "egarch", mean = "", dist = "normal"))]
fn fit_garch<'py>(py: Python<'py>, x: Vec<f64>, family: &str, mean: &str, dist: &str) -> PyResult<Bound<'py, PyAny>> {
    let innovation = match dist {
        "normal" => Innovation::Normal,
        "t" | "student_t" => Innovation::StudentT,
        _ => return Err(PyValueError::new_err(format!("unknown distribution: {dist:?}"))),
    };
    let spec = VarianceSpec { family: self::family(family)?, innovation };
    let fit = volatility::fit_model(&x, &MeanSpec::parse(mean).map_err(err)?, spec).map_err(err)?;
    to_py(py, &fit)
}

#[pyfunction]
fn select_garch<'py>(py: Python<'py>, x: Vec<f64>) -> PyResult<Bound<'py, PyAny>> {
    to_py(py, &volatility::select_model(&x, &volatility::default_candidates()).map_err(err)?)
}

#[pyfunction]
fn tsallis_entropy(p: Vec<f64>, a: f64) -> PyResult<f64> {
    entropy::tsallis_entropy(&p, a).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (x, a = 1.575, window = 365, step = 1, n_states = 10, partition = "fixed"))]
fn rolling_tsallis<'py>(
    py: Python<'py>,
    x: Vec<f64>,
    a: f64,
    window: usize,
    step: usize,
    n_states: usize,
    partition: &str,
) -> PyResult<Bound<'py, PyAny>> {
    let cfg = EntropyConfig {
        a,
        n_states,
        partition: parse("partition", partition)?,
        rolling: RollingConfig { window, step },
        optimal_a: false,
    };
    to_py(py, &entropy::rolling_tsallis(&x, &cfg).map_err(err)?)
}

#[pyfunction]
fn hhi<'py>(py: Python<'py>, shares: Vec<f64>) -> PyResult<Bound<'py, PyAny>> {
    to_py(py, &market::hhi(&shares).map_err(err)?)
}

/// Pearson correlations between named annual columns.
#[pyfunction]
fn correlation_matrix<'py>(py: Python<'py>, years: Vec<i32>, columns: &Bound<'py, PyDict>) -> PyResult<Bound<'py, PyAny>> {
    let mut panel = AnnualPanel::new(years).map_err(err)?;
    for (label, values) in columns.iter() {
        let (label, values): (String, Vec<f64>) = (label.extract()?, values.extract()?);
        panel = panel.with_column(&label, &values).map_err(err)?;
    }
    to_py(py, &market::correlation_matrix(&panel))
}

/// `spec` is a dict such as {"kind": "fgn", "h": 0.7}.
#[pyfunction]
#[pyo3(signature = (spec, n, seed = 0))]
fn generate<'py>(py: Python<'py>, spec: &Bound<'py, PyAny>, n: usize, seed: u64) -> PyResult<Bound<'py, PyAny>> {
    let spec: GeneratorSpec = from_py(spec)?;
    to_py(py, &synth::generate(&spec, n, seed).map_err(err)?)
}

/// `manifest` is a path to manifest.json or a dict with the same fields.
#[pyfunction]
fn run_pipeline<'py>(py: Python<'py>, manifest: &Bound<'py, PyAny>) -> PyResult<Bound<'py, PyAny>> {
    let m: RunManifest = match manifest.extract::<PathBuf>() {
        Ok(path) => RunManifest::load(&path).map_err(err)?,
        Err(_) => from_py(manifest)?,
    };
    to_py(py, &pipeline::run_pipeline(&m).map_err(err)?)
}

/// Report for a run directory or bundle file.
#[pyfunction]
fn efficiency_report<'py>(py: Python<'py>, bundle: PathBuf) -> PyResult<Bound<'py, PyAny>> {
    let b = pipeline::load_bundle(&bundle).map_err(err)?;
    to_py(py, &report::efficiency_report(&b).map_err(err)?)
}

#[pymodule(name = "emhkit")]
fn emhkit_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    m.add_class::<PyPriceSeries>()?;
    m.add_function(wrap_pyfunction!(hurst_exponent, m)?)?;
    m.add_function(wrap_pyfunction!(rs_expected, m)?)?;
    m.add_function(wrap_pyfunction!(exponent_relations, m)?)?;
    m.add_function(wrap_pyfunction!(bds_test, m)?)?;
    m.add_function(wrap_pyfunction!(embed, m)?)?;
    m.add_function(wrap_pyfunction!(lyapunov_exponent, m)?)?;
    m.add_function(wrap_pyfunction!(fit_garch, m)?)?;
    m.add_function(wrap_pyfunction!(select_garch, m)?)?;
    m.add_function(wrap_pyfunction!(tsallis_entropy, m)?)?;
    m.add_function(wrap_pyfunction!(rolling_tsallis, m)?)?;
    m.add_function(wrap_pyfunction!(hhi, m)?)?;
    m.add_function(wrap_pyfunction!(correlation_matrix, m)?)?;
    m.add_function(wrap_pyfunction!(generate, m)?)?;
    m.add_function(wrap_pyfunction!(run_pipeline, m)?)?;
    m.add_function(wrap_pyfunction!(efficiency_report, m)?)?;
    Ok(())
}
