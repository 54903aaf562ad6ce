//! Python bindings. Configurations cross the boundary as `SimConfig` objects; study results
//! come back as lists of plain dicts.

use afdm_jsg::harness::{self, RunOptions};
use afdm_jsg::receivers::{count_ops_formula, latency_model, FormulaParams, LatencyParams};
use afdm_jsg::{AfdmConfig, ReceiverConfig, ReceiverKind};
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyAny;
use serde::de::DeserializeOwned;
use serde::Serialize;

fn err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// Hands a serializable value to Python through its JSON form.
fn to_py<'py, T: Serialize>(py: Python<'py>, v: &T) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(v).map_err(err)?;
    py.import("json")?.call_method1("loads", (text,))
}

fn from_py<T: DeserializeOwned>(obj: &Bound<'_, PyAny>) -> PyResult<T> {
    let text: String = obj.py().import("json")?.call_method1("dumps", (obj,))?.extract()?;
    serde_json::from_str(&text).map_err(err)
}

fn kind(name: &str) -> PyResult<ReceiverKind> {
    serde_json::from_value(serde_json::Value::String(name.to_owned())).map_err(err)
}

/// Experiment configuration.
#[pyclass(name = "SimConfig", from_py_object)]
#[derive(Clone)]
struct PySimConfig {
    inner: harness::SimConfig,
}

#[pymethods]
impl PySimConfig {
    /// Desk-scale defaults, or the given JSON/TOML text.
    #[new]
    #[pyo3(signature = (text=None))]
    fn new(text: Option<&str>) -> PyResult<Self> {
        let inner = match text {
            Some(t) => harness::SimConfig::from_str_any(t).map_err(err)?,
            None => harness::SimConfig::desk(),
        };
        Ok(PySimConfig { inner })
    }

    #[staticmethod]
    fn paper_scale() -> Self {
        PySimConfig { inner: harness::SimConfig::paper_scale() }
    }

    #[staticmethod]
    fn from_file(path: &str) -> PyResult<Self> {
        Ok(PySimConfig { inner: harness::SimConfig::from_file(path.as_ref()).map_err(err)? })
    }

    #[staticmethod]
    fn from_dict(d: &Bound<'_, PyAny>) -> PyResult<Self> {
        Ok(PySimConfig { inner: from_py(d)? })
    }

    fn to_dict<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        to_py(py, &self.inner)
    }

    fn to_json(&self) -> String {
        self.inner.to_json()
    }

    fn to_toml(&self) -> String {
        self.inner.to_toml()
    }

    fn validate(&self) -> PyResult<()> {
        self.inner.validate().map_err(err)
    }

    #[getter]
    fn seed(&self) -> u64 {
        self.inner.seed
    }

    #[setter]
    fn set_seed(&mut self, s: u64) {
        self.inner.seed = s;
    }

    fn __repr__(&self) -> String {
        format!("SimConfig(n={}, code_n={}, seed={})", self.inner.afdm.n, self.inner.code.n_bits, self.inner.seed)
    }
}

fn opts(workers: Option<usize>) -> RunOptions {
    RunOptions { workers }
}

#[pyfunction]
#[pyo3(signature = (cfg, workers=None))]
fn run_ber<'py>(py: Python<'py>, cfg: &PySimConfig, workers: Option<usize>) -> PyResult<Bound<'py, PyAny>> {
    let c = cfg.inner.clone();
    let rows = py.detach(|| harness::run_ber_sweep(&c, &opts(workers))).map_err(err)?;
    to_py(py, &rows)
}

#[pyfunction]
#[pyo3(signature = (cfg, workers=None))]
fn run_convergence<'py>(py: Python<'py>, cfg: &PySimConfig, workers: Option<usize>) -> PyResult<Bound<'py, PyAny>> {
    let c = cfg.inner.clone();
    let rows = py.detach(|| harness::run_convergence(&c, &c.convergence.iterations, &opts(workers))).map_err(err)?;
    to_py(py, &rows)
}

#[pyfunction]
#[pyo3(signature = (cfg, workers=None))]
fn run_esnr<'py>(py: Python<'py>, cfg: &PySimConfig, workers: Option<usize>) -> PyResult<Bound<'py, PyAny>> {
    let c = cfg.inner.clone();
    let rows = py.detach(|| harness::run_esnr_study(&c, &c.esnr.thresholds_db, &opts(workers))).map_err(err)?;
    to_py(py, &rows)
}

#[pyfunction]
#[pyo3(signature = (cfg, workers=None))]
fn run_paths<'py>(py: Python<'py>, cfg: &PySimConfig, workers: Option<usize>) -> PyResult<Bound<'py, PyAny>> {
    let c = cfg.inner.clone();
    let rows = py.detach(|| harness::run_path_study(&c, &c.paths.paths, &opts(workers))).map_err(err)?;
    to_py(py, &rows)
}

#[pyfunction]
fn run_sparsity<'py>(py: Python<'py>, cfg: &PySimConfig) -> PyResult<Bound<'py, PyAny>> {
    let c = cfg.inner.clone();
    let row = py.detach(|| harness::run_sparsity_from_config(&c)).map_err(err)?;
    to_py(py, &row)
}

#[pyfunction]
#[pyo3(signature = (cfg, frames=20))]
fn run_complexity<'py>(py: Python<'py>, cfg: &PySimConfig, frames: usize) -> PyResult<Bound<'py, PyAny>> {
    let c = cfg.inner.clone();
    let rows = py.detach(|| harness::run_complexity(&c, frames)).map_err(err)?;
    to_py(py, &rows)
}

/// Names accepted wherever a receiver kind is expected.
#[pyfunction]
fn receiver_kinds() -> Vec<&'static str> {
    ReceiverKind::ALL.iter().map(|k| k.name()).collect()
}

/// Closed-form operations per iteration; `params` holds the `FormulaParams` fields.
#[pyfunction]
fn count_ops<'py>(py: Python<'py>, receiver: &str, params: &Bound<'_, PyAny>) -> PyResult<Bound<'py, PyAny>> {
    let p: FormulaParams = from_py(params)?;
    to_py(py, &count_ops_formula(kind(receiver)?, &p))
}

/// Modelled decoding latency; `params` holds the `LatencyParams` fields.
#[pyfunction]
#[pyo3(signature = (receiver, params, iters=12, n_out=4, n_vi=3, n_ldpc=3))]
fn latency(receiver: &str, params: &Bound<'_, PyAny>, iters: usize, n_out: usize, n_vi: usize, n_ldpc: usize) -> PyResult<f64> {
    let p: LatencyParams = from_py(params)?;
    let rc = ReceiverConfig { iters, n_out, n_vi, n_ldpc, ..ReceiverConfig::new(kind(receiver)?) };
    latency_model(rc.kind, &p, &rc).map_err(err)
}

/// Dense DAFT matrix as a list of rows of complex numbers.
#[pyfunction]
#[pyo3(signature = (n, c1=None, c2=None, n_cpp=0))]
fn daft_matrix(n: usize, c1: Option<f64>, c2: Option<f64>, n_cpp: usize) -> PyResult<Vec<Vec<num_complex::Complex64>>> {
    let d = 1.0 / n.max(1) as f64;
    let cfg = AfdmConfig::new(n, c1.unwrap_or(d), c2.unwrap_or(d), n_cpp).map_err(err)?;
    let a = afdm_jsg::afdm::daft_matrix(&cfg);
    Ok((0..n).map(|r| (0..n).map(|c| a[(r, c)]).collect()).collect())
}

/// Check-node update: extrinsic LLRs for each input.
#[pyfunction]
fn cn_update(llrs: Vec<f64>) -> Vec<f64> {
    let mut out = vec![0.0; llrs.len()];
    afdm_jsg::ldpc::cn_update(&llrs, &mut out);
    out
}

/// Formats a float the way the CSV writer does.
#[pyfunction]
fn fmt_float(x: f64) -> String {
    harness::fmt_float(x)
}

#[pymodule]
fn afdm_jsg_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PySimConfig>()?;
    m.add_function(wrap_pyfunction!(run_ber, m)?)?;
    m.add_function(wrap_pyfunction!(run_convergence, m)?)?;
    m.add_function(wrap_pyfunction!(run_esnr, m)?)?;
    m.add_function(wrap_pyfunction!(run_paths, m)?)?;
    m.add_function(wrap_pyfunction!(run_sparsity, m)?)?;
    m.add_function(wrap_pyfunction!(run_complexity, m)?)?;
    m.add_function(wrap_pyfunction!(receiver_kinds, m)?)?;
    m.add_function(wrap_pyfunction!(count_ops, m)?)?;
    m.add_function(wrap_pyfunction!(latency, m)?)?;
    m.add_function(wrap_pyfunction!(daft_matrix, m)?)?;
    m.add_function(wrap_pyfunction!(cn_update, m)?)?;
    m.add_function(wrap_pyfunction!(fmt_float, m)?)?;
    Ok(())
}
