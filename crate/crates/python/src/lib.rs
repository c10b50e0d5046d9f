//! Python bindings: run model files and get the JSON report back.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use ::qpcalc::model::{emit_json, emit_text, parse_model, resolve_source, run_checks, ModelError, RunOptions, CHECKS, ENGINE};

fn model_error(e: ModelError) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// Runs the checks of a model given as source text and returns the JSON
/// report. Raises ValueError on parse or model errors.
#[pyfunction]
#[pyo3(signature = (source, name = "model", seed = None, trials = None, parallel = false))]
fn check_model(py: Python<'_>, source: &str, name: &str, seed: Option<u64>, trials: Option<usize>, parallel: bool) -> PyResult<String> {
    let model = resolve_source(source).map_err(model_error)?;
    let opts = RunOptions { seed, trials, parallel };
    let report = py.detach(|| run_checks(&model, name, &opts)).map_err(model_error)?;
    Ok(emit_json(&report))
}

/// Same as `check_model` but returns the text report and the overall verdict.
#[pyfunction]
#[pyo3(signature = (source, name = "model", seed = None, trials = None))]
fn check_model_text(py: Python<'_>, source: &str, name: &str, seed: Option<u64>, trials: Option<usize>) -> PyResult<(bool, String)> {
    let model = resolve_source(source).map_err(model_error)?;
    let opts = RunOptions { seed, trials, parallel: false };
    let report = py.detach(|| run_checks(&model, name, &opts)).map_err(model_error)?;
    Ok((report.passed(), emit_text(&report)))
}

/// Canonical form of a model file.
#[pyfunction]
fn format_model(source: &str) -> PyResult<String> {
    Ok(parse_model(source).map_err(model_error)?.to_source())
}

/// `(name, statement)` for every available check.
#[pyfunction]
fn list_checks() -> Vec<(&'static str, &'static str)> {
    CHECKS.iter().map(|c| (c.name, c.anchor)).collect()
}

#[pymodule]
fn qpcalc(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(check_model, m)?)?;
    m.add_function(wrap_pyfunction!(check_model_text, m)?)?;
    m.add_function(wrap_pyfunction!(format_model, m)?)?;
    m.add_function(wrap_pyfunction!(list_checks, m)?)?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    m.add("ENGINE", ENGINE)?;
    Ok(())
}
