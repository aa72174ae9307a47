use std::collections::BTreeMap;

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use msx_core::cli::{document, parse, Runner};
use msx_core::exterior::json::field_json;
use msx_core::hamilton::{hamiltonian_vf_lvy, hamiltonian_vf_z, ProjectableField};
use msx_core::scalar::{parse_scalar, Var};
use msx_core::verify::{run_suite, traceability_markdown, SuiteId, SuiteParams};
use msx_core::Error;

fn value_error(e: Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn to_json(v: &serde_json::Value) -> PyResult<String> {
    serde_json::to_string(v).map_err(|e| PyRuntimeError::new_err(e.to_string()))
}

/// Canonical text of an arithmetic expression.
#[pyfunction]
fn simplify(expr: &str) -> PyResult<String> {
    Ok(parse_scalar(expr).map_err(value_error)?.to_string())
}

/// Runs a script and returns the JSON document. Raises ValueError on parse or
/// statement errors.
#[pyfunction]
#[pyo3(signature = (source, seed = 0))]
fn run_script(source: &str, seed: u64) -> PyResult<String> {
    let script = parse(source).map_err(value_error)?;
    let outputs = Runner::new(seed)
        .run(&script)
        .map_err(|e| PyValueError::new_err(e.to_string()))?;
    to_json(&document(&outputs, None))
}

/// Runs one verification suite and returns its report as JSON.
#[pyfunction]
#[pyo3(signature = (suite, n = None, k = None, m = None, trials = None, seed = 0))]
fn verify(
    py: Python<'_>,
    suite: &str,
    n: Option<usize>,
    k: Option<usize>,
    m: Option<usize>,
    trials: Option<usize>,
    seed: u64,
) -> PyResult<String> {
    let id: SuiteId = suite.parse().map_err(value_error)?;
    let d = id.default_params();
    let params = SuiteParams {
        n: n.unwrap_or(d.n),
        k: k.unwrap_or(d.k),
        m: m.or(d.m),
        trials: trials.unwrap_or(d.trials),
        seed,
    };
    let report = py.detach(|| run_suite(id, params)).map_err(value_error)?;
    to_json(&serde_json::to_value(report).map_err(|e| PyRuntimeError::new_err(e.to_string()))?)
}

/// Closed-form Hamiltonian field of a projectable field on Z or LVY, as JSON.
#[pyfunction]
fn hamiltonian_field(
    space: &str,
    n: usize,
    k: usize,
    components: BTreeMap<String, String>,
) -> PyResult<String> {
    let pairs = components
        .iter()
        .map(|(c, e)| Ok((Var::new(c), parse_scalar(e)?)))
        .collect::<Result<Vec<_>, Error>>()
        .map_err(value_error)?;
    let v = ProjectableField::from_named(n, k, &pairs).map_err(value_error)?;
    let x = match space {
        "Z" => hamiltonian_vf_z(&v),
        "LVY" => hamiltonian_vf_lvy(&v),
        other => {
            return Err(PyValueError::new_err(format!(
                "no closed form on `{other}`"
            )))
        }
    }
    .map_err(value_error)?;
    to_json(&field_json(&x))
}

#[pyfunction]
fn suites() -> Vec<&'static str> {
    SuiteId::ALL.iter().map(|id| id.as_str()).collect()
}

#[pyfunction]
fn traceability() -> String {
    traceability_markdown()
}

#[pymodule]
fn msx(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("RNG_ALGORITHM", msx_core::random::RNG_ALGORITHM)?;
    m.add_function(wrap_pyfunction!(simplify, m)?)?;
    m.add_function(wrap_pyfunction!(run_script, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    m.add_function(wrap_pyfunction!(hamiltonian_field, m)?)?;
    m.add_function(wrap_pyfunction!(suites, m)?)?;
    m.add_function(wrap_pyfunction!(traceability, m)?)?;
    Ok(())
}
