//! Python bindings: theories, terms, the decision procedure and the proof
//! checker.

use graycoh::cli::{parse_term, render_ascii};
use graycoh::components::{check_script as check, parse_script};
use graycoh::freecat::{validate, Mode, OneCell};
use graycoh::measures::{measure, Measure};
use graycoh::rewrite::{critical_pairs as peaks, decide_equal, normalize, Direction, EnumConfig};
use graycoh::signature::{builtin_theory, parse_theory, serialize_theory};
use pyo3::exceptions::{PyTypeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

fn mode(braided: bool) -> Mode {
    if braided {
        Mode::Braided
    } else {
        Mode::Plain
    }
}

fn value_error(e: impl ToString) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn diagnostics(ds: &[graycoh::lexer::Diagnostic]) -> PyErr {
    value_error(
        ds.iter()
            .map(|d| d.to_string())
            .collect::<Vec<_>>()
            .join("\n"),
    )
}

#[pyclass(name = "Theory", module = "graycoh", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyTheory(graycoh::Theory);

#[pymethods]
impl PyTheory {
    /// A bundled theory: `pseudomonoid` or `example-G0`.
    #[staticmethod]
    fn builtin(name: &str) -> PyResult<Self> {
        builtin_theory(name).map(PyTheory).map_err(value_error)
    }

    #[staticmethod]
    fn parse(text: &str) -> PyResult<Self> {
        parse_theory(text)
            .map(PyTheory)
            .map_err(|ds| diagnostics(&ds))
    }

    fn serialize(&self) -> String {
        serialize_theory(&self.0)
    }

    #[getter]
    fn name(&self) -> String {
        self.0.name.to_string()
    }

    #[getter]
    fn objects(&self) -> Vec<String> {
        self.0.base.objects().map(|o| o.to_string()).collect()
    }

    #[getter]
    fn arrows(&self) -> Vec<String> {
        self.0.base.arrows().map(|a| a.name.to_string()).collect()
    }

    /// Parses a term over the theory's objects and arrows.
    #[pyo3(signature = (text, braided = false))]
    fn term(&self, text: &str, braided: bool) -> PyResult<PyTerm> {
        let f = parse_term(&self.0.base, text).map_err(value_error)?;
        let m = mode(braided);
        if let Some(issue) = validate(&self.0.base, &f, m).first() {
            return Err(value_error(issue));
        }
        Ok(PyTerm { f, mode: m })
    }

    /// Checks a proof script; one `(lemma, passed, message)` per lemma.
    fn check(&self, script: &str) -> PyResult<Vec<(String, bool, Option<String>)>> {
        let s = parse_script(script).map_err(|ds| diagnostics(&ds))?;
        Ok(check(&self.0, &s)
            .results
            .into_iter()
            .map(|r| (r.name.to_string(), r.passed, r.message))
            .collect())
    }

    /// Exhaustive peak check over all terms within the bounds.
    #[pyo3(signature = (max_cells = 3, max_wires = 3, braided = false))]
    fn critical_pairs<'py>(
        &self,
        py: Python<'py>,
        max_cells: usize,
        max_wires: usize,
        braided: bool,
    ) -> PyResult<Bound<'py, PyDict>> {
        let report = peaks(
            &self.0.base,
            EnumConfig {
                mode: mode(braided),
                max_cells,
                max_source_len: max_wires,
            },
        );
        let d = PyDict::new(py);
        d.set_item("terms", report.terms)?;
        d.set_item("peaks", report.peaks)?;
        d.set_item("failures", report.failures.len())?;
        Ok(d)
    }

    fn __repr__(&self) -> String {
        format!("Theory({:?})", self.0.name.to_string())
    }
}

#[pyclass(name = "Term", module = "graycoh", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyTerm {
    f: OneCell,
    mode: Mode,
}

#[pymethods]
impl PyTerm {
    #[getter]
    fn braided(&self) -> bool {
        self.mode == Mode::Braided
    }

    #[getter]
    fn source(&self) -> Vec<String> {
        self.f.source().iter().map(|o| o.to_string()).collect()
    }

    #[getter]
    fn target(&self) -> Vec<String> {
        self.f.target().iter().map(|o| o.to_string()).collect()
    }

    fn __len__(&self) -> usize {
        self.f.len()
    }

    /// Normal form and the number of steps taken to reach it.
    fn normalize(&self) -> (PyTerm, usize) {
        let (nf, path) = normalize(&self.f, self.mode);
        (
            PyTerm {
                f: nf,
                mode: self.mode,
            },
            path.len(),
        )
    }

    /// A rewrite path to `other` as `(direction, redex, term)` triples, or
    /// None when the terms are not equal.
    fn decide(&self, other: &PyTerm) -> PyResult<Option<Vec<(String, String, String)>>> {
        if self.mode != other.mode {
            return Err(PyTypeError::new_err("terms are in different modes"));
        }
        let path = decide_equal(&self.f, &other.f, self.mode).map_err(value_error)?;
        Ok(path.map(|p| {
            p.steps
                .iter()
                .map(|s| {
                    let dir = match s.direction {
                        Direction::Forward => "=>",
                        Direction::Inverse => "<=",
                    };
                    (dir.to_string(), s.redex.to_string(), s.after.to_string())
                })
                .collect()
        }))
    }

    /// Termination measure: an int, or a 4-tuple in braided mode.
    fn weigh<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        match measure(&self.f, self.mode) {
            Measure::Plain(v) => v.into_pyobject(py).map(|v| v.into_any()),
            Measure::Braided([a, b, c, d]) => (a, b, c, d).into_pyobject(py).map(|v| v.into_any()),
        }
    }

    fn render(&self) -> String {
        render_ascii(&self.f)
    }

    fn __str__(&self) -> String {
        self.f.to_string()
    }

    fn __repr__(&self) -> String {
        format!("Term({:?})", self.f.to_string())
    }

    fn __eq__(&self, other: &PyTerm) -> bool {
        self.f == other.f && self.mode == other.mode
    }
}

#[pymodule]
#[pyo3(name = "graycoh")]
fn graycoh_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyTheory>()?;
    m.add_class::<PyTerm>()?;
    Ok(())
}
