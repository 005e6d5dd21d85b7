//! Python module `hyplab`: spec strings in, JSON strings and plain values out.

use ::hyplab as core;
use core::diagnostics::{self, DiagConfig};
use core::error::HyplabError;
use core::registry::{build_hypergroup, build_weight};
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

fn py_err(e: HyplabError) -> PyErr {
    let msg = format!("{}: {}", e.kind(), e);
    match core::cli::exit_code(&e) {
        2 => PyValueError::new_err(msg),
        _ => PyRuntimeError::new_err(msg),
    }
}

fn config(kg: Option<f64>, cn: Option<f64>) -> DiagConfig {
    let mut c = DiagConfig::default();
    if let Some(k) = kg {
        c.k_g = k;
    }
    c.c_n = cn;
    c
}

fn to_json<T: serde::Serialize>(v: &T) -> PyResult<String> {
    serde_json::to_string(v).map_err(|e| PyRuntimeError::new_err(e.to_string()))
}

/// Terms of δ_x * δ_y as (label, "p/q" or float string) pairs.
#[pyfunction]
fn convolve(hypergroup: &str, x: &str, y: &str) -> PyResult<Vec<(String, String)>> {
    let h = build_hypergroup(hypergroup).map_err(py_err)?;
    let m = h
        .convolve(
            &h.parse_element(x).map_err(py_err)?,
            &h.parse_element(y).map_err(py_err)?,
        )
        .map_err(py_err)?;
    Ok(m.terms().iter().map(|(t, c)| (h.label(t), c.to_string())).collect())
}

#[pyfunction]
fn haar(hypergroup: &str, x: &str) -> PyResult<String> {
    let h = build_hypergroup(hypergroup).map_err(py_err)?;
    Ok(h.haar(&h.parse_element(x).map_err(py_err)?)
        .map_err(py_err)?
        .to_string())
}

#[pyfunction]
#[pyo3(signature = (hypergroup, n=100))]
fn check_axioms(hypergroup: &str, n: usize) -> PyResult<bool> {
    let h = build_hypergroup(hypergroup).map_err(py_err)?;
    Ok(core::hypergroups::check_axioms(&h, n).passed())
}

#[pyfunction]
fn omega(hypergroup: &str, weight: &str, x: &str, y: &str) -> PyResult<f64> {
    let h = build_hypergroup(hypergroup).map_err(py_err)?;
    let w = build_weight(&h, weight).map_err(py_err)?;
    diagnostics::omega_f64(
        &h,
        &w,
        &h.parse_element(x).map_err(py_err)?,
        &h.parse_element(y).map_err(py_err)?,
    )
    .map_err(py_err)
}

/// Two-summability report as JSON.
#[pyfunction]
#[pyo3(signature = (hypergroup, weight, n=200))]
fn summability(hypergroup: &str, weight: &str, n: usize) -> PyResult<String> {
    let h = build_hypergroup(hypergroup).map_err(py_err)?;
    let w = build_weight(&h, weight).map_err(py_err)?;
    to_json(&diagnostics::two_summability(&h, &w, n).map_err(py_err)?)
}

/// Classification report as JSON.
#[pyfunction]
#[pyo3(signature = (hypergroup, weight, n=200, kg=None, cn=None))]
fn classify(hypergroup: &str, weight: &str, n: usize, kg: Option<f64>, cn: Option<f64>) -> PyResult<String> {
    let h = build_hypergroup(hypergroup).map_err(py_err)?;
    let w = build_weight(&h, weight).map_err(py_err)?;
    to_json(&diagnostics::classify(&h, &w, n, &config(kg, cn)).map_err(py_err)?)
}

/// Runs the command line with the given arguments and returns its exit code.
#[pyfunction]
fn run(args: Vec<String>) -> i32 {
    core::cli::run(std::iter::once("hyplab".to_string()).chain(args))
}

#[pymodule]
fn hyplab(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(convolve, m)?)?;
    m.add_function(wrap_pyfunction!(haar, m)?)?;
    m.add_function(wrap_pyfunction!(check_axioms, m)?)?;
    m.add_function(wrap_pyfunction!(omega, m)?)?;
    m.add_function(wrap_pyfunction!(summability, m)?)?;
    m.add_function(wrap_pyfunction!(classify, m)?)?;
    m.add_function(wrap_pyfunction!(run, m)?)?;
    m.add("REPORT_SCHEMA", diagnostics::REPORT_SCHEMA)?;
    Ok(())
}
