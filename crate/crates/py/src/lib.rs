use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyList};
use serde_json::Value;

use qcoh_core::coherence::{coherence_report, relative_entropy_coherence};
use qcoh_core::discord::{delta_discord, mutual_information, quantum_discord};
use qcoh_core::infotheory::{accessible_info, holevo_chi, information_loss};
use qcoh_core::io::{parse_document, Document};
use qcoh_core::random::{random_density, random_ensemble, seeded_rng};
use qcoh_core::verify::{self, Suite, SuiteConfig, VerificationReport};
use qcoh_core::{linalg, ComplexMatrix, Error, OptimizerOptions, C64};

fn py_err(e: Error) -> PyErr {
    if e.is_input_error() {
        PyValueError::new_err(e.to_string())
    } else {
        PyRuntimeError::new_err(e.to_string())
    }
}

fn to_matrix(rows: Vec<Vec<C64>>) -> PyResult<ComplexMatrix> {
    ComplexMatrix::from_rows(rows).map_err(py_err)
}

fn options(restarts: usize, seed: u64) -> OptimizerOptions {
    OptimizerOptions { restarts, seed, ..Default::default() }
}

fn json_to_py<'py>(py: Python<'py>, v: &Value) -> PyResult<Bound<'py, PyAny>> {
    Ok(match v {
        Value::Null => py.None().into_bound(py),
        Value::Bool(b) => b.into_pyobject(py)?.to_owned().into_any(),
        Value::Number(n) => match n.as_i64() {
            Some(i) => i.into_pyobject(py)?.into_any(),
            None => n.as_f64().unwrap_or(f64::NAN).into_pyobject(py)?.into_any(),
        },
        Value::String(s) => s.into_pyobject(py)?.into_any(),
        Value::Array(items) => {
            let list = PyList::empty(py);
            for item in items {
                list.append(json_to_py(py, item)?)?;
            }
            list.into_any()
        }
        Value::Object(m) => {
            let d = PyDict::new(py);
            for (k, item) in m {
                d.set_item(k, json_to_py(py, item)?)?;
            }
            d.into_any()
        }
    })
}

#[pyclass(name = "Basis", module = "qcoh", from_py_object)]
#[derive(Clone)]
struct PyBasis {
    inner: qcoh_core::ProjectiveBasis,
}

#[pymethods]
impl PyBasis {
    #[new]
    #[pyo3(signature = (unitary, label = "custom"))]
    fn new(unitary: Vec<Vec<C64>>, label: &str) -> PyResult<Self> {
        let inner = qcoh_core::ProjectiveBasis::from_unitary(to_matrix(unitary)?, label).map_err(py_err)?;
        Ok(Self { inner })
    }

    #[staticmethod]
    fn computational(dim: usize) -> Self {
        Self { inner: qcoh_core::ProjectiveBasis::computational(dim) }
    }

    #[staticmethod]
    fn hadamard() -> Self {
        Self { inner: qcoh_core::ProjectiveBasis::hadamard() }
    }

    #[staticmethod]
    fn fourier(dim: usize) -> Self {
        Self { inner: qcoh_core::ProjectiveBasis::fourier(dim) }
    }

    /// Qubit basis with first vector at Bloch angles (theta, phi).
    #[staticmethod]
    fn qubit(theta: f64, phi: f64) -> Self {
        Self { inner: qcoh_core::ProjectiveBasis::qubit(theta, phi) }
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    #[getter]
    fn label(&self) -> String {
        self.inner.label().to_string()
    }

    fn unitary(&self) -> Vec<Vec<C64>> {
        self.inner.unitary().to_rows()
    }

    fn __repr__(&self) -> String {
        format!("Basis(label={:?}, dim={})", self.inner.label(), self.inner.dim())
    }
}

#[pyclass(name = "DensityMatrix", module = "qcoh", from_py_object)]
#[derive(Clone)]
struct PyDensity {
    inner: qcoh_core::DensityMatrix,
}

#[pymethods]
impl PyDensity {
    #[new]
    fn new(matrix: Vec<Vec<C64>>) -> PyResult<Self> {
        let inner = qcoh_core::DensityMatrix::new(to_matrix(matrix)?).map_err(py_err)?;
        Ok(Self { inner })
    }

    #[staticmethod]
    fn pure(psi: Vec<C64>) -> PyResult<Self> {
        Ok(Self { inner: qcoh_core::DensityMatrix::pure(&psi).map_err(py_err)? })
    }

    #[staticmethod]
    #[pyo3(signature = (dim, rank = None, seed = 0))]
    fn random(dim: usize, rank: Option<usize>, seed: u64) -> PyResult<Self> {
        let inner = random_density(dim, rank.unwrap_or(dim), &mut seeded_rng(seed)).map_err(py_err)?;
        Ok(Self { inner })
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        let inner = parse_document(text, "<string>").and_then(Document::into_state).map_err(py_err)?;
        Ok(Self { inner })
    }

    fn to_json(&self) -> String {
        Document::from_state(&self.inner).to_json()
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn matrix(&self) -> Vec<Vec<C64>> {
        self.inner.matrix().to_rows()
    }

    fn eigenvalues(&self) -> PyResult<Vec<f64>> {
        self.inner.spectrum().map_err(py_err)
    }

    fn entropy(&self) -> PyResult<f64> {
        qcoh_core::coherence::von_neumann_entropy(&self.inner).map_err(py_err)
    }

    #[pyo3(signature = (basis = None))]
    fn c_r(&self, basis: Option<&PyBasis>) -> PyResult<f64> {
        relative_entropy_coherence(&self.inner, basis.map(|b| &b.inner)).map_err(py_err)
    }

    #[pyo3(signature = (basis = None))]
    fn c_l1(&self, basis: Option<&PyBasis>) -> PyResult<f64> {
        Ok(coherence_report(&self.inner, basis.map(|b| &b.inner)).map_err(py_err)?.c_l1)
    }

    /// Dephased copy of the state in `basis`.
    #[pyo3(signature = (basis = None))]
    fn dephased(&self, basis: Option<&PyBasis>) -> PyResult<Self> {
        let m = linalg::dephase(self.inner.matrix(), basis.map(|b| b.inner.unitary())).map_err(py_err)?;
        Ok(Self { inner: qcoh_core::DensityMatrix::new(m).map_err(py_err)? })
    }

    fn __repr__(&self) -> String {
        format!("DensityMatrix(dim={})", self.inner.dim())
    }
}

#[pyclass(name = "Ensemble", module = "qcoh", from_py_object)]
#[derive(Clone)]
struct PyEnsemble {
    inner: qcoh_core::Ensemble,
}

#[pymethods]
impl PyEnsemble {
    #[new]
    fn new(probs: Vec<f64>, members: Vec<PyDensity>) -> PyResult<Self> {
        let members = members.into_iter().map(|m| m.inner).collect();
        Ok(Self { inner: qcoh_core::Ensemble::new(probs, members).map_err(py_err)? })
    }

    #[staticmethod]
    #[pyo3(signature = (dim, n_members, seed = 0))]
    fn random(dim: usize, n_members: usize, seed: u64) -> PyResult<Self> {
        Ok(Self { inner: random_ensemble(dim, n_members, &mut seeded_rng(seed)).map_err(py_err)? })
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        let inner = parse_document(text, "<string>").and_then(Document::into_ensemble).map_err(py_err)?;
        Ok(Self { inner })
    }

    fn to_json(&self) -> String {
        Document::from_ensemble(&self.inner).to_json()
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn mixture(&self) -> PyResult<PyDensity> {
        Ok(PyDensity { inner: self.inner.mixture().map_err(py_err)? })
    }

    fn holevo(&self) -> PyResult<f64> {
        holevo_chi(&self.inner).map_err(py_err)
    }

    /// chi, h_xy, il, cl and their residual in `basis`.
    #[pyo3(signature = (basis = None))]
    fn information_loss<'py>(&self, py: Python<'py>, basis: Option<&PyBasis>) -> PyResult<Bound<'py, PyDict>> {
        let r = information_loss(&self.inner, basis.map(|b| &b.inner)).map_err(py_err)?;
        let d = PyDict::new(py);
        d.set_item("chi", r.chi)?;
        d.set_item("h_xy", r.h_xy)?;
        d.set_item("il", r.il)?;
        d.set_item("cl", r.cl)?;
        d.set_item("residual", r.residual)?;
        Ok(d)
    }

    /// Returns (value, best basis).
    #[pyo3(signature = (restarts = 32, seed = 0))]
    fn accessible_info(&self, restarts: usize, seed: u64) -> PyResult<(f64, PyBasis)> {
        let r = accessible_info(&self.inner, &options(restarts, seed)).map_err(py_err)?;
        Ok((r.value, PyBasis { inner: r.best_basis }))
    }
}

#[pyclass(name = "BipartiteState", module = "qcoh", from_py_object)]
#[derive(Clone)]
struct PyBipartite {
    inner: qcoh_core::BipartiteState,
}

#[pymethods]
impl PyBipartite {
    #[new]
    fn new(matrix: Vec<Vec<C64>>, dims: (usize, usize)) -> PyResult<Self> {
        let state = qcoh_core::DensityMatrix::new(to_matrix(matrix)?).map_err(py_err)?;
        Ok(Self { inner: qcoh_core::BipartiteState::new(dims, state).map_err(py_err)? })
    }

    #[staticmethod]
    fn bell() -> Self {
        Self { inner: qcoh_core::BipartiteState::bell_phi_plus() }
    }

    #[staticmethod]
    fn product(a: &PyDensity, b: &PyDensity) -> PyResult<Self> {
        Ok(Self { inner: qcoh_core::BipartiteState::product(&a.inner, &b.inner).map_err(py_err)? })
    }

    /// Accepts bipartite or separable documents.
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        let inner = parse_document(text, "<string>").and_then(Document::into_bipartite).map_err(py_err)?;
        Ok(Self { inner })
    }

    #[getter]
    fn dims(&self) -> (usize, usize) {
        self.inner.dims()
    }

    fn reduced_a(&self) -> PyResult<PyDensity> {
        Ok(PyDensity { inner: self.inner.reduced_a().map_err(py_err)? })
    }

    fn reduced_b(&self) -> PyResult<PyDensity> {
        Ok(PyDensity { inner: self.inner.reduced_b().map_err(py_err)? })
    }

    fn mutual_information(&self) -> PyResult<f64> {
        mutual_information(&self.inner).map_err(py_err)
    }

    /// δ(A←B) for a projective measurement on B in `basis`.
    #[pyo3(signature = (basis = None))]
    fn delta(&self, basis: Option<&PyBasis>) -> PyResult<f64> {
        Ok(delta_discord(&self.inner, basis.map(|b| &b.inner)).map_err(py_err)?.delta)
    }

    /// Returns (D(A←B), minimizing basis on B).
    #[pyo3(signature = (restarts = 32, seed = 0))]
    fn discord(&self, restarts: usize, seed: u64) -> PyResult<(f64, PyBasis)> {
        let r = quantum_discord(&self.inner, &options(restarts, seed)).map_err(py_err)?;
        Ok((r.value, PyBasis { inner: r.best_basis }))
    }
}

/// Runs a verification suite ("theorem1", "lemma1", "lemma2", "eq5to8" or
/// "all") and returns the report as a dict.
#[pyfunction]
#[pyo3(signature = (suite, n = 100, seed = 0, dims = (2, 2), restarts = 16))]
fn verify_suite<'py>(
    py: Python<'py>,
    suite: &str,
    n: usize,
    seed: u64,
    dims: (usize, usize),
    restarts: usize,
) -> PyResult<Bound<'py, PyAny>> {
    let cfg = SuiteConfig { n_instances: n, seed, dims, opts: options(restarts, seed) };
    let report = py
        .detach(|| {
            if suite == "all" {
                verify::run_all(&cfg)
            } else {
                let s: Suite = suite.parse()?;
                Ok(VerificationReport::new(seed, vec![verify::run_suite(s, &cfg)?]))
            }
        })
        .map_err(py_err)?;
    json_to_py(py, &serde_json::to_value(&report).expect("reports serialize"))
}

#[pymodule]
fn qcoh(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    m.add_class::<PyBasis>()?;
    m.add_class::<PyDensity>()?;
    m.add_class::<PyEnsemble>()?;
    m.add_class::<PyBipartite>()?;
    m.add_function(wrap_pyfunction!(verify_suite, m)?)?;
    Ok(())
}
