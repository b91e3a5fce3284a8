//! Python bindings. Reports come back as plain dicts and lists with the same
//! field names as the JSON output of the command line.

use std::sync::Arc;

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyList};
use serde_json::Value;

use monohom::enumerate::count_labeled_posets;
use monohom::io::{format_poset, parse_poset, read_poset};
use monohom::{
    betti_decomposition, contract_edge, contraction_cokernel, decompose, factorization_report,
    homology, is_g_minimal, is_minimal, smith_normal_form, space_homology, verify_trace,
    whe_criterion, EdgeContraction, FinitePoset, IntegerMatrix, SweepCheck, SweepConfig,
};

fn err(e: monohom::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn to_py<'py>(py: Python<'py>, v: &Value) -> PyResult<Bound<'py, PyAny>> {
    Ok(match v {
        Value::Null => py.None().into_bound(py),
        Value::Bool(b) => b.into_pyobject(py)?.to_owned().into_any(),
        Value::Number(n) => match (n.as_u64(), n.as_i64()) {
            (Some(u), _) => u.into_pyobject(py)?.into_any(),
            (None, Some(i)) => i.into_pyobject(py)?.into_any(),
            _ => n.as_f64().unwrap_or(f64::NAN).into_pyobject(py)?.into_any(),
        },
        Value::String(s) => s.into_pyobject(py)?.into_any(),
        Value::Array(items) => {
            let list = PyList::empty(py);
            for item in items {
                list.append(to_py(py, item)?)?;
            }
            list.into_any()
        }
        Value::Object(map) => {
            let dict = PyDict::new(py);
            for (k, item) in map {
                dict.set_item(k, to_py(py, item)?)?;
            }
            dict.into_any()
        }
    })
}

fn serialize<'py, T: serde::Serialize>(py: Python<'py>, v: &T) -> PyResult<Bound<'py, PyAny>> {
    let value = serde_json::to_value(v).map_err(|e| PyValueError::new_err(e.to_string()))?;
    to_py(py, &value)
}

/// A finite T0-space given by its specialization order.
#[pyclass(name = "Poset", module = "monohom", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyPoset {
    inner: Arc<FinitePoset>,
}

#[pymethods]
impl PyPoset {
    /// `relations` are `(lower, upper)` label pairs; the order is their
    /// reflexive-transitive closure.
    #[new]
    #[pyo3(signature = (elements, relations = Vec::new()))]
    fn new(elements: Vec<String>, relations: Vec<(String, String)>) -> PyResult<Self> {
        let p = FinitePoset::build(&elements, &relations).map_err(err)?;
        Ok(Self { inner: Arc::new(p) })
    }

    #[staticmethod]
    fn parse(text: &str) -> PyResult<Self> {
        Ok(Self {
            inner: Arc::new(parse_poset(text).map_err(err)?),
        })
    }

    #[staticmethod]
    fn read(path: &str) -> PyResult<Self> {
        Ok(Self {
            inner: Arc::new(read_poset(path).map_err(err)?),
        })
    }

    #[staticmethod]
    fn chain(n: usize) -> Self {
        Self {
            inner: Arc::new(FinitePoset::chain(n)),
        }
    }

    fn to_text(&self) -> String {
        format_poset(&self.inner)
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn __repr__(&self) -> String {
        format!("Poset({:?})", self.inner.labels())
    }

    #[getter]
    fn elements(&self) -> Vec<String> {
        self.inner.labels().to_vec()
    }

    /// Hasse edges as `(upper, lower)` label pairs.
    #[getter]
    fn covers(&self) -> Vec<(String, String)> {
        let p = &self.inner;
        p.covers()
            .iter()
            .map(|&(a, b)| (p.label(a).to_string(), p.label(b).to_string()))
            .collect()
    }

    fn leq(&self, x: &str, y: &str) -> PyResult<bool> {
        let p = &self.inner;
        Ok(p.leq(p.index_of(x).map_err(err)?, p.index_of(y).map_err(err)?))
    }

    fn beat_points(&self) -> Vec<String> {
        let p = &self.inner;
        p.beat_points().into_iter().map(|x| p.label(x).to_string()).collect()
    }

    fn core(&self) -> PyResult<Self> {
        Ok(Self {
            inner: Arc::new(self.inner.core().map_err(err)?.core),
        })
    }

    fn is_minimal(&self) -> bool {
        is_minimal(&self.inner)
    }

    fn is_contractible(&self) -> PyResult<bool> {
        self.inner.is_contractible().map_err(err)
    }

    fn is_g_minimal(&self) -> PyResult<bool> {
        is_g_minimal(&self.inner).map_err(err)
    }

    /// `{"betti": [...], "torsion": [[...], ...]}`.
    fn homology<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        serialize(py, &space_homology(&self.inner).map_err(err)?)
    }

    /// Contracts the Hasse edge with `upper` covering `lower`.
    fn contract(&self, upper: &str, lower: &str) -> PyResult<PyContraction> {
        let p = &self.inner;
        let e = (p.index_of(upper).map_err(err)?, p.index_of(lower).map_err(err)?);
        Ok(PyContraction {
            inner: contract_edge(p, e).map_err(err)?,
        })
    }
}

#[pyclass(name = "Contraction", module = "monohom", frozen)]
struct PyContraction {
    inner: EdgeContraction,
}

#[pymethods]
impl PyContraction {
    #[getter]
    fn result(&self) -> PyPoset {
        PyPoset {
            inner: self.inner.result().clone(),
        }
    }

    #[getter]
    fn merged(&self) -> String {
        self.inner.result().label(self.inner.merged()).to_string()
    }

    /// Cokernel basis simplices per degree, e.g. `[[], ["(t<s)"], ...]`.
    fn cokernel_basis(&self) -> PyResult<Vec<Vec<String>>> {
        let k = contraction_cokernel(&self.inner).map_err(err)?;
        Ok((0..k.complex.degrees()).map(|r| k.complex.labels(r).to_vec()).collect())
    }

    fn cokernel_homology<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        let k = contraction_cokernel(&self.inner).map_err(err)?;
        serialize(py, &homology(&k.complex).map_err(err)?)
    }

    fn is_quasi_iso(&self) -> PyResult<bool> {
        monohom::is_quasi_iso_contraction(&self.inner).map_err(err)
    }

    fn whe_criterion<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        let v = whe_criterion(self.inner.source(), self.inner.edge()).map_err(err)?;
        serialize(py, &v)
    }
}

/// A map between the points of two posets.
#[pyclass(name = "Map", module = "monohom", frozen)]
struct PyMap {
    inner: monohom::PointMap,
}

#[pymethods]
impl PyMap {
    /// `assignment` maps every domain label to a codomain label.
    #[new]
    fn new(domain: &PyPoset, codomain: &PyPoset, assignment: Vec<(String, String)>) -> PyResult<Self> {
        let f = monohom::PointMap::from_labels(domain.inner.clone(), codomain.inner.clone(), &assignment)
            .map_err(err)?;
        Ok(Self { inner: f })
    }

    fn is_continuous(&self) -> bool {
        self.inner.is_continuous()
    }

    fn is_surjective(&self) -> bool {
        self.inner.is_surjective()
    }

    fn is_monotone(&self) -> PyResult<bool> {
        self.inner.is_monotone().map_err(err)
    }

    /// Labels of a disconnected preimage of a connected set, or `None`.
    fn monotone_witness(&self) -> PyResult<Option<Vec<String>>> {
        Ok(self
            .inner
            .monotone_witness()
            .map_err(err)?
            .map(|w| w.witness().to_vec()))
    }

    /// Hasse edges contracted by the decomposition, in order.
    fn decompose(&self) -> PyResult<Vec<(String, String)>> {
        Ok(decompose(&self.inner).map_err(err)?.edge_labels())
    }

    fn betti_decomposition<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        serialize(py, &betti_decomposition(&self.inner).map_err(err)?)
    }

    fn verify<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        let trace = decompose(&self.inner).map_err(err)?;
        serialize(py, &verify_trace(&trace).map_err(err)?)
    }

    /// `{"steps": [...], "z": [...], "h": {...}, "ledger": {...}}`.
    fn factorize<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        let (fac, ledger) = factorization_report(&self.inner).map_err(err)?;
        let dict = PyDict::new(py);
        dict.set_item("steps", fac.g.edge_labels())?;
        dict.set_item("z", fac.z.labels().to_vec())?;
        let h = PyDict::new(py);
        for u in 0..fac.z.len() {
            h.set_item(fac.z.label(u), fac.h.cod().label(fac.h.apply(u)))?;
        }
        dict.set_item("h", h)?;
        dict.set_item("ledger", serialize(py, &ledger)?)?;
        Ok(dict.into_any())
    }
}

/// Invariant factors of an integer matrix given as a list of rows.
#[pyfunction]
fn smith_factors(rows: Vec<Vec<i64>>) -> PyResult<Vec<u64>> {
    Ok(smith_normal_form(&IntegerMatrix::from_rows(&rows)).map_err(err)?.factors)
}

#[pyfunction]
fn labeled_poset_count(n: usize) -> usize {
    count_labeled_posets(n)
}

#[pyfunction]
#[pyo3(signature = (max_n, checks = vec!["poset".to_string(), "edge".to_string(), "monotone".to_string()], seed = 0))]
fn sweep<'py>(py: Python<'py>, max_n: usize, checks: Vec<String>, seed: u64) -> PyResult<Bound<'py, PyAny>> {
    let checks = checks
        .iter()
        .map(|c| SweepCheck::parse(c).ok_or_else(|| PyValueError::new_err(format!("unknown check group {c:?}"))))
        .collect::<PyResult<Vec<_>>>()?;
    let config = SweepConfig {
        max_n,
        checks,
        seed,
        jobs: 1,
    };
    let summary = py.detach(|| monohom::sweep(&config)).map_err(err)?;
    serialize(py, &summary)
}

#[pymodule]
#[pyo3(name = "monohom")]
fn monohom_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyPoset>()?;
    m.add_class::<PyContraction>()?;
    m.add_class::<PyMap>()?;
    m.add_function(wrap_pyfunction!(smith_factors, m)?)?;
    m.add_function(wrap_pyfunction!(labeled_poset_count, m)?)?;
    m.add_function(wrap_pyfunction!(sweep, m)?)?;
    Ok(())
}
