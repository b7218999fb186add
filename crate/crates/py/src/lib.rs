//! Python bindings: thin wrappers that exchange literals and JSON text.

use std::sync::Arc;

use bcontact::chart::{Chart, ChartDoc};
use bcontact::exterior::{parse_form, BForm};
use bcontact::{catalog, contact, GridConfig};
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

fn value_err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn chart(doc: &str) -> PyResult<Arc<Chart>> {
    let doc: ChartDoc = serde_json::from_str(doc).map_err(value_err)?;
    Ok(Arc::new(Chart::from_doc(&doc).map_err(value_err)?))
}

fn one_form(chart_json: &str, form: &str) -> PyResult<BForm> {
    let c = chart(chart_json)?;
    let f = parse_form(form, &c).map_err(value_err)?;
    if f.degree() != 1 {
        return Err(value_err(format!("expected a 1-form, got degree {}", f.degree())));
    }
    Ok(f)
}

fn grid(grid: usize, tol: f64, seed: u64) -> GridConfig {
    GridConfig {
        off_z: grid,
        on_z: grid / 2,
        seed,
        tol,
        ..GridConfig::default()
    }
}

/// Contact test; returns the report as JSON.
#[pyfunction]
#[pyo3(signature = (chart_json, form, grid_size = 200, tol = 1e-8, seed = 42))]
fn check(chart_json: &str, form: &str, grid_size: usize, tol: f64, seed: u64) -> PyResult<String> {
    let alpha = one_form(chart_json, form)?;
    let report = contact::is_contact(&alpha, &grid(grid_size, tol, seed)).map_err(value_err)?;
    serde_json::to_string(&report).map_err(value_err)
}

/// Reeb field as a vector literal.
#[pyfunction]
#[pyo3(signature = (chart_json, form, grid_size = 200, tol = 1e-8, seed = 42))]
fn reeb(chart_json: &str, form: &str, grid_size: usize, tol: f64, seed: u64) -> PyResult<String> {
    let alpha = one_form(chart_json, form)?;
    let r = contact::reeb(&alpha, &grid(grid_size, tol, seed)).map_err(value_err)?;
    Ok(r.to_literal())
}

#[pyfunction]
fn catalog_list() -> Vec<&'static str> {
    catalog::list_entries()
}

/// Entry as JSON: chart document, literals and note.
#[pyfunction]
fn catalog_show(name: &str) -> PyResult<String> {
    let entry = catalog::get(name).map_err(value_err)?;
    Ok(entry.to_json().to_string())
}

/// Verification report of one entry as JSON.
#[pyfunction]
fn catalog_verify(name: &str) -> PyResult<String> {
    let report = catalog::verify(name).map_err(value_err)?;
    serde_json::to_string(&report).map_err(value_err)
}

#[pymodule]
fn bcontact_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(check, m)?)?;
    m.add_function(wrap_pyfunction!(reeb, m)?)?;
    m.add_function(wrap_pyfunction!(catalog_list, m)?)?;
    m.add_function(wrap_pyfunction!(catalog_show, m)?)?;
    m.add_function(wrap_pyfunction!(catalog_verify, m)?)?;
    Ok(())
}
