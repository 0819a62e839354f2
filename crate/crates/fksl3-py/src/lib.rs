//! Python module `fksl3`: braids, reduced traces, convention conversions and oracles.

use std::collections::BTreeMap;

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use ::fksl3::braid::{parse_braid, BraidWord};
use ::fksl3::conventions::{self, Shift};
use ::fksl3::oracle;
use ::fksl3::rmatrix::{self, BasisState};
use ::fksl3::trace;

fn value_err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn runtime_err(e: impl std::fmt::Display) -> PyErr {
    PyRuntimeError::new_err(e.to_string())
}

/// A positive braid whose closure is a knot.
#[pyclass(name = "Braid", frozen)]
struct PyBraid(BraidWord);

#[pymethods]
impl PyBraid {
    #[new]
    #[pyo3(signature = (word, strands = 2))]
    fn new(word: &str, strands: usize) -> PyResult<Self> {
        parse_braid(word, strands).map(PyBraid).map_err(value_err)
    }

    #[getter]
    fn strands(&self) -> usize {
        self.0.strands()
    }

    #[getter]
    fn word(&self) -> Vec<usize> {
        self.0.word().to_vec()
    }

    #[getter]
    fn writhe(&self) -> i64 {
        self.0.writhe()
    }

    fn __repr__(&self) -> String {
        format!("Braid({:?}, strands={})", self.0.to_string(), self.0.strands())
    }
}

/// Truncated reduced trace; coefficient (i, j) multiplies x^(ex-i) y^(ey-j).
#[pyclass(name = "TraceSeries", frozen)]
struct PyTraceSeries(trace::TraceSeries);

#[pymethods]
impl PyTraceSeries {
    #[getter]
    fn leading_offset(&self) -> (i64, i64) {
        self.0.leading_offset
    }

    #[getter]
    fn truncation(&self) -> (u32, u32) {
        self.0.truncation
    }

    /// The coefficient as a dict mapping q-exponents to integers.
    fn coeff(&self, i: u32, j: u32) -> PyResult<BTreeMap<i64, i64>> {
        let c = self.0.coeff(i, j);
        c.terms()
            .iter()
            .map(|(m, k)| {
                let q = m.q.to_integer().ok_or_else(|| runtime_err(format!("fractional q-power in {c}")))?;
                let k = k.to_i64().ok_or_else(|| runtime_err("coefficient exceeds 64 bits"))?;
                Ok((q, k))
            })
            .collect()
    }

    fn coeff_str(&self, i: u32, j: u32) -> String {
        self.0.coeff(i, j).to_string()
    }

    fn to_json(&self) -> String {
        self.0.to_json().to_string()
    }

    fn to_text(&self) -> String {
        self.0.to_text()
    }

    /// Negative expansion of the unreduced series, x and y shifted by q^-1.
    fn negative(&self) -> PyTraceSeries {
        PyTraceSeries(conventions::negative(&self.0, Shift::Down))
    }

    /// Balanced series through q^max_q as a JSON string.
    fn balanced(&self, max_q: i64) -> PyResult<String> {
        let neg = conventions::negative(&self.0, Shift::Down);
        conventions::weyl_balanced(&neg, max_q).map(|w| w.to_json().to_string()).map_err(value_err)
    }

    fn __repr__(&self) -> String {
        format!("TraceSeries(braid={:?}, truncation={:?})", self.0.braid, self.0.truncation)
    }
}

#[pyfunction]
fn reduced_trace(braid: &PyBraid, dx: u32, dy: u32) -> PyResult<PyTraceSeries> {
    trace::reduced_trace(&braid.0, dx, dy).map(PyTraceSeries).map_err(runtime_err)
}

/// Coefficients of (qx)^k in the one-variable symmetric series, as strings.
#[pyfunction]
fn symmetric_series(braid: &PyBraid, dx: u32) -> PyResult<Vec<String>> {
    let y1 = trace::reduced_trace_y1(&braid.0, dx).map_err(runtime_err)?;
    let s = conventions::symmetric_limit(&y1).map_err(value_err)?;
    Ok(s.coefficients.iter().map(|c| c.to_string()).collect())
}

/// Symmetric Alexander polynomial as {power of t: coefficient}.
#[pyfunction]
fn alexander(braid: &PyBraid) -> PyResult<BTreeMap<i64, i64>> {
    let d = oracle::alexander(&braid.0).map_err(runtime_err)?;
    d.coeffs
        .iter()
        .map(|(k, c)| c.to_i64().map(|c| (*k, c)).ok_or_else(|| runtime_err("coefficient exceeds 64 bits")))
        .collect()
}

/// JSON report of the q = 1 comparison against the Alexander product.
#[pyfunction]
fn alexander_check(braid: &PyBraid, dx: u32, dy: u32) -> PyResult<String> {
    let s = trace::reduced_trace(&braid.0, dx, dy).map_err(runtime_err)?;
    oracle::alexander_check(&s, &braid.0).map(|r| r.to_json().to_string()).map_err(runtime_err)
}

#[pyfunction]
fn yang_baxter(n: i64, m: i64) -> PyResult<bool> {
    oracle::yang_baxter(n, m).map_err(runtime_err)
}

/// Invariant of the closed braid on the finite module with highest weight (n, m).
#[pyfunction]
fn rt_invariant(braid: &PyBraid, n: i64, m: i64) -> PyResult<String> {
    oracle::rt_invariant(&braid.0, n, m).map(|e| e.to_string()).map_err(runtime_err)
}

type PyTransition = ([i64; 4], [i64; 4], String);

/// R|a, b⟩ as a list of (b', a', coefficient string).
#[pyfunction]
fn apply_r(a: [i64; 4], b: [i64; 4]) -> PyResult<Vec<PyTransition>> {
    let st = |v: [i64; 4]| BasisState::new(v).ok_or_else(|| value_err(format!("invalid basis state {v:?}")));
    let (a, b) = (st(a)?, st(b)?);
    Ok(rmatrix::apply_R(&a, &b).iter().map(|t| (t.output.0 .0, t.output.1 .0, t.coeff.to_string())).collect())
}

#[pymodule]
fn fksl3(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyBraid>()?;
    m.add_class::<PyTraceSeries>()?;
    m.add_function(wrap_pyfunction!(reduced_trace, m)?)?;
    m.add_function(wrap_pyfunction!(symmetric_series, m)?)?;
    m.add_function(wrap_pyfunction!(alexander, m)?)?;
    m.add_function(wrap_pyfunction!(alexander_check, m)?)?;
    m.add_function(wrap_pyfunction!(yang_baxter, m)?)?;
    m.add_function(wrap_pyfunction!(rt_invariant, m)?)?;
    m.add_function(wrap_pyfunction!(apply_r, m)?)?;
    Ok(())
}
