//! Python bindings. Reports come back as plain dicts; `-inf` stays a float.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyList};
use serde::Serialize;
use serde_json::Value;

use rdlab_core::cumulants::{self, MomentTable as CoreTable};
use rdlab_core::entropy::{self, Law};
use rdlab_core::microstates::{self, EstimatorOptions, GammaConfig};
use rdlab_core::spectral::{self, Atoms, FunctionSpec, DEFAULT_GRID_NODES};
use rdlab_core::word::{StarWord, SYMBOL_NAMES};
use rdlab_core::{geometry, models, suite, ComplexMatrix, RngStream, SpectralMeasure, C64};

fn err(e: rdlab_core::Error) -> PyErr {
    use rdlab_core::Error::*;
    match e {
        Domain(_) | InvalidInput(_) | OrderOverflow { .. } | InsufficientSamples { .. } | Parse(_) => {
            PyValueError::new_err(e.to_string())
        }
        _ => PyRuntimeError::new_err(e.to_string()),
    }
}

fn to_py(py: Python<'_>, v: &Value) -> PyResult<PyObject> {
    Ok(match v {
        Value::Null => py.None(),
        Value::Bool(b) => b.into_py(py),
        Value::Number(n) => match n.as_i64() {
            Some(i) => i.into_py(py),
            None => n.as_f64().unwrap_or(f64::NAN).into_py(py),
        },
        Value::String(s) => match s.as_str() {
            "inf" => f64::INFINITY.into_py(py),
            "-inf" => f64::NEG_INFINITY.into_py(py),
            "nan" => f64::NAN.into_py(py),
            _ => s.into_py(py),
        },
        Value::Array(a) => PyList::new_bound(py, a.iter().map(|x| to_py(py, x)).collect::<PyResult<Vec<_>>>()?).into_py(py),
        Value::Object(o) => {
            let d = PyDict::new_bound(py);
            for (k, x) in o {
                d.set_item(k, to_py(py, x)?)?;
            }
            d.into_py(py)
        }
    })
}

fn report(py: Python<'_>, x: &impl Serialize) -> PyResult<PyObject> {
    let v = serde_json::to_value(x).map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
    to_py(py, &v)
}

fn from_py(obj: &Bound<'_, PyAny>) -> PyResult<Value> {
    if obj.is_none() {
        Ok(Value::Null)
    } else if let Ok(b) = obj.extract::<bool>() {
        Ok(Value::Bool(b))
    } else if let Ok(i) = obj.extract::<i64>() {
        Ok(Value::from(i))
    } else if let Ok(f) = obj.extract::<f64>() {
        Ok(Value::from(f))
    } else if let Ok(s) = obj.extract::<String>() {
        Ok(Value::String(s))
    } else if let Ok(d) = obj.downcast::<PyDict>() {
        let mut m = serde_json::Map::new();
        for (k, v) in d.iter() {
            m.insert(k.extract::<String>()?, from_py(&v)?);
        }
        Ok(Value::Object(m))
    } else if let Ok(l) = obj.downcast::<PyList>() {
        Ok(Value::Array(l.iter().map(|x| from_py(&x)).collect::<PyResult<_>>()?))
    } else {
        Err(PyValueError::new_err("expected a JSON-like value"))
    }
}

fn parse<T: serde::de::DeserializeOwned>(obj: &Bound<'_, PyAny>) -> PyResult<T> {
    serde_json::from_value(from_py(obj)?).map_err(|e| PyValueError::new_err(e.to_string()))
}

/// Dense complex square matrix.
#[pyclass(name = "Matrix", module = "rdlab")]
#[derive(Clone)]
struct PyMatrix(ComplexMatrix);

#[pymethods]
impl PyMatrix {
    #[new]
    fn new(rows: Vec<Vec<num_complex::Complex64>>) -> PyResult<Self> {
        let k = rows.len();
        if rows.iter().any(|r| r.len() != k) {
            return Err(PyValueError::new_err("rows must form a square matrix"));
        }
        let data: Vec<C64> = rows.into_iter().flatten().collect();
        ComplexMatrix::from_row_major(k, data).map(Self).map_err(err)
    }

    #[staticmethod]
    fn identity(k: usize) -> Self {
        Self(ComplexMatrix::identity(k))
    }

    #[getter]
    fn dim(&self) -> usize {
        self.0.dim()
    }

    fn to_list(&self) -> Vec<Vec<num_complex::Complex64>> {
        let k = self.0.dim();
        (0..k).map(|i| (0..k).map(|j| self.0[(i, j)]).collect()).collect()
    }

    fn adjoint(&self) -> Self {
        Self(self.0.adjoint())
    }

    fn __matmul__(&self, other: &PyMatrix) -> PyResult<Self> {
        if other.0.dim() != self.0.dim() {
            return Err(PyValueError::new_err("dimension mismatch"));
        }
        Ok(Self(self.0.mul(&other.0)))
    }

    fn normalized_trace(&self) -> num_complex::Complex64 {
        self.0.normalized_trace()
    }

    fn singular_values(&self) -> PyResult<Vec<f64>> {
        self.0.singular_values().map_err(err)
    }

    #[pyo3(signature = (tol = 1e-10))]
    fn is_unitary(&self, tol: f64) -> bool {
        self.0.is_unitary(tol)
    }

    #[pyo3(signature = (tol = 1e-10))]
    fn is_positive_semidefinite(&self, tol: f64) -> bool {
        self.0.is_positive_semidefinite(tol)
    }

    fn __repr__(&self) -> String {
        format!("Matrix(dim={})", self.0.dim())
    }
}

/// Probability measure on the line: atoms or a grid density.
#[pyclass(name = "Measure", module = "rdlab")]
#[derive(Clone)]
struct PyMeasure(SpectralMeasure);

#[pymethods]
impl PyMeasure {
    /// Catalog law, e.g. `Measure.law("semicircle", variance=1.0)`.
    #[staticmethod]
    #[pyo3(signature = (name, nodes = DEFAULT_GRID_NODES, **params))]
    fn law(name: &str, nodes: usize, params: Option<&Bound<'_, PyDict>>) -> PyResult<Self> {
        let mut obj = match params {
            Some(p) => match from_py(p.as_any())? {
                Value::Object(m) => m,
                _ => unreachable!(),
            },
            None => serde_json::Map::new(),
        };
        obj.insert("law".into(), Value::String(name.into()));
        let law: Law = serde_json::from_value(Value::Object(obj)).map_err(|e| PyValueError::new_err(e.to_string()))?;
        law.measure(nodes).map(Self).map_err(err)
    }

    #[staticmethod]
    fn atoms(locations: Vec<f64>, weights: Vec<f64>) -> PyResult<Self> {
        Atoms::from_unnormalized(locations, weights).map(|a| Self(SpectralMeasure::Atoms(a))).map_err(err)
    }

    fn moments(&self, n: usize) -> Vec<f64> {
        self.0.moments(n)
    }

    fn support(&self) -> (f64, f64) {
        self.0.support()
    }

    fn quantile(&self, p: f64) -> f64 {
        self.0.quantile(p)
    }

    fn is_atomic(&self) -> bool {
        self.0.is_atomic()
    }

    fn dilate(&self, c: f64) -> PyResult<Self> {
        self.0.dilate(c).map(Self).map_err(err)
    }

    fn to_csv(&self) -> String {
        spectral::to_csv(&self.0)
    }

    #[staticmethod]
    fn from_csv(text: &str) -> PyResult<Self> {
        spectral::from_csv(text).map(Self).map_err(err)
    }

    fn __repr__(&self) -> String {
        let (a, b) = self.0.support();
        let kind = if self.0.is_atomic() { "atoms" } else { "grid" };
        format!("Measure({kind} on [{a}, {b}])")
    }
}

/// *-moments of a tuple of noncommutative variables, keyed by words over
/// `z, w, x, ...` with upper case for adjoints.
#[pyclass(name = "MomentTable", module = "rdlab")]
#[derive(Clone)]
struct PyTable(CoreTable);

#[pymethods]
impl PyTable {
    #[staticmethod]
    #[pyo3(signature = (order, variance = 1.0))]
    fn circular(order: usize, variance: f64) -> PyResult<Self> {
        cumulants::circular(variance, order).map(Self).map_err(err)
    }

    #[staticmethod]
    fn haar_unitary(order: usize) -> PyResult<Self> {
        CoreTable::haar_unitary(order).map(Self).map_err(err)
    }

    #[staticmethod]
    fn semicircular(order: usize) -> PyResult<Self> {
        cumulants::semicircular(order).map(Self).map_err(err)
    }

    #[staticmethod]
    fn quarter_circular(order: usize) -> PyResult<Self> {
        cumulants::quarter_circular(order).map(Self).map_err(err)
    }

    #[staticmethod]
    fn from_csv(text: &str) -> PyResult<Self> {
        CoreTable::from_csv(text).map(Self).map_err(err)
    }

    fn to_csv(&self) -> String {
        self.0.to_csv()
    }

    #[getter]
    fn order(&self) -> usize {
        self.0.order()
    }

    fn __getitem__(&self, word: &str) -> PyResult<num_complex::Complex64> {
        let w = StarWord::parse(word).map_err(err)?;
        self.0.table().get(&w).ok_or_else(|| PyValueError::new_err(format!("word {word:?} is not in the table")))
    }

    fn cumulants(&self) -> Vec<(String, num_complex::Complex64)> {
        let k = cumulants::moments_to_cumulants(&self.0);
        k.table().iter().map(|(w, c)| (w.to_string_with(SYMBOL_NAMES), c)).collect()
    }

    fn haar_multiply(&self) -> PyResult<Self> {
        cumulants::haar_multiply(&self.0).map(Self).map_err(err)
    }

    #[pyo3(signature = (tol = 1e-9))]
    fn is_r_diagonal(&self, py: Python<'_>, tol: f64) -> PyResult<PyObject> {
        report(py, &cumulants::is_r_diagonal(&self.0, tol).map_err(err)?)
    }
}

fn function_spec(f: &Bound<'_, PyAny>) -> PyResult<FunctionSpec> {
    parse(f)
}

#[pyfunction]
fn esd(a: &PyMatrix, self_adjoint: bool) -> PyResult<PyMeasure> {
    spectral::esd(&a.0, self_adjoint).map(PyMeasure).map_err(err)
}

#[pyfunction]
fn singular_square_measure(a: &PyMatrix) -> PyResult<PyMeasure> {
    spectral::singular_square_measure(&a.0).map(PyMeasure).map_err(err)
}

/// `f` is a dict such as `{"kind": "power", "p": 2.0}`.
#[pyfunction]
fn pushforward(m: &PyMeasure, f: &Bound<'_, PyAny>) -> PyResult<PyMeasure> {
    spectral::pushforward(&m.0, &function_spec(f)?).map(PyMeasure).map_err(err)
}

#[pyfunction]
fn symmetrize(m: &PyMeasure) -> PyResult<PyMeasure> {
    spectral::symmetrize(&m.0).map(PyMeasure).map_err(err)
}

#[pyfunction]
fn log_energy(py: Python<'_>, m: &PyMeasure) -> PyResult<PyObject> {
    report(py, &entropy::log_energy(&m.0))
}

#[pyfunction]
fn chi_sa(py: Python<'_>, m: &PyMeasure) -> PyResult<PyObject> {
    report(py, &entropy::chi_sa_one(&m.0))
}

#[pyfunction]
fn chi_rdiag(py: Python<'_>, mu_b: &PyMeasure) -> PyResult<PyObject> {
    report(py, &entropy::chi_rdiag(&mu_b.0).map_err(err)?)
}

#[pyfunction]
fn chi_upper_bound(py: Python<'_>, mu_yy: &PyMeasure) -> PyResult<PyObject> {
    report(py, &entropy::chi_upper_bound(&mu_yy.0).map_err(err)?)
}

#[pyfunction]
fn identity_defect(mu_b: &PyMeasure) -> PyResult<f64> {
    entropy::chi_symmetric_identity_defect(&mu_b.0).map_err(err)
}

#[pyfunction]
fn changevar_defect(mu: &PyMeasure, f: &Bound<'_, PyAny>) -> PyResult<f64> {
    entropy::changevar_defect(&mu.0, &function_spec(f)?).map_err(err)
}

#[pyfunction]
fn log_energy_estimator(py: Python<'_>, eigs: Vec<f64>) -> PyResult<PyObject> {
    report(py, &entropy::log_energy_estimator(&eigs).map_err(err)?)
}

#[pyfunction]
fn polar_decompose(a: &PyMatrix) -> PyResult<(PyMatrix, PyMatrix)> {
    let p = geometry::polar_decompose(&a.0).map_err(err)?;
    Ok((PyMatrix(p.v), PyMatrix(p.p)))
}

#[pyfunction]
fn jacobian_dp(p: &PyMatrix) -> PyResult<f64> {
    geometry::jacobian_dp(&p.0).map_err(err)
}

#[pyfunction]
fn jacobian_ds(p: &PyMatrix) -> PyResult<f64> {
    geometry::jacobian_ds(&p.0).map_err(err)
}

#[pyfunction]
fn volume_ck(k: usize) -> PyResult<f64> {
    geometry::volume_ck(k).map_err(err)
}

#[pyfunction]
fn limck_residual(k: usize) -> PyResult<f64> {
    geometry::limck_residual(k).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (k, n_samples, seed, workers = 1))]
fn push_measure_check(py: Python<'_>, k: usize, n_samples: usize, seed: u64, workers: usize) -> PyResult<PyObject> {
    report(py, &geometry::push_measure_check(k, n_samples, RngStream::new(seed, 0), workers).map_err(err)?)
}

#[pyfunction]
#[pyo3(signature = (k, seed, stream = 0))]
fn haar_unitary(k: usize, seed: u64, stream: u64) -> PyResult<PyMatrix> {
    models::haar_unitary(k, RngStream::new(seed, stream)).map(PyMatrix).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (k, sigma2, seed, stream = 0))]
fn ginibre(k: usize, sigma2: f64, seed: u64, stream: u64) -> PyResult<PyMatrix> {
    models::ginibre(k, sigma2, RngStream::new(seed, stream)).map(PyMatrix).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (mu, k, seed, stream = 0))]
fn positive_with_spectrum(mu: &PyMeasure, k: usize, seed: u64, stream: u64) -> PyResult<PyMatrix> {
    models::positive_with_spectrum(&mu.0, k, RngStream::new(seed, stream)).map(PyMatrix).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (mu_b, k, seed, stream = 0))]
fn rdiag_sample(mu_b: &PyMeasure, k: usize, seed: u64, stream: u64) -> PyResult<PyMatrix> {
    models::rdiag_sample(&mu_b.0, k, RngStream::new(seed, stream)).map(PyMatrix).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (mu_b, k, n_samples, order, seed, workers = 1))]
fn freeness_defect(
    py: Python<'_>,
    mu_b: &PyMeasure,
    k: usize,
    n_samples: usize,
    order: usize,
    seed: u64,
    workers: usize,
) -> PyResult<PyObject> {
    let r = models::freeness_defect_quantile(&mu_b.0, k, n_samples, order, RngStream::new(seed, 0), workers).map_err(err)?;
    report(py, &r)
}

/// `spec` is a dict `{"r", "m", "epsilon", "targets": [{"law": ...}], "self_adjoint"?}`.
#[pyfunction]
#[pyo3(signature = (spec, k, n_samples, seed, workers = 1))]
fn log_volume_estimate(
    py: Python<'_>,
    spec: &Bound<'_, PyAny>,
    k: usize,
    n_samples: usize,
    seed: u64,
    workers: usize,
) -> PyResult<PyObject> {
    let cfg: GammaConfig = parse(spec)?;
    let spec = cfg.build().map_err(err)?;
    let opts = EstimatorOptions { workers, ..Default::default() };
    let e = py
        .allow_threads(|| microstates::log_volume_estimate_with(&spec, k, n_samples, RngStream::new(seed, 0), &opts))
        .map_err(err)?;
    report(py, &e)
}

#[pyfunction]
#[pyo3(signature = (d, v = 1.0))]
fn amplification_constant(py: Python<'_>, d: usize, v: f64) -> PyResult<PyObject> {
    report(py, &microstates::amplification_constant(d, v).map_err(err)?)
}

#[pyfunction]
#[pyo3(signature = (name, quick = true, seed = suite::DEFAULT_SEED, workers = 1))]
fn run_suite(py: Python<'_>, name: &str, quick: bool, seed: u64, workers: usize) -> PyResult<PyObject> {
    let opts = suite::SuiteOptions { quick, seed, workers };
    let r = py.allow_threads(|| suite::run_suite(name, &opts)).map_err(err)?;
    report(py, &r)
}

#[pymodule]
fn rdlab(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyMatrix>()?;
    m.add_class::<PyMeasure>()?;
    m.add_class::<PyTable>()?;
    m.add_function(wrap_pyfunction!(esd, m)?)?;
    m.add_function(wrap_pyfunction!(singular_square_measure, m)?)?;
    m.add_function(wrap_pyfunction!(pushforward, m)?)?;
    m.add_function(wrap_pyfunction!(symmetrize, m)?)?;
    m.add_function(wrap_pyfunction!(log_energy, m)?)?;
    m.add_function(wrap_pyfunction!(chi_sa, m)?)?;
    m.add_function(wrap_pyfunction!(chi_rdiag, m)?)?;
    m.add_function(wrap_pyfunction!(chi_upper_bound, m)?)?;
    m.add_function(wrap_pyfunction!(identity_defect, m)?)?;
    m.add_function(wrap_pyfunction!(changevar_defect, m)?)?;
    m.add_function(wrap_pyfunction!(log_energy_estimator, m)?)?;
    m.add_function(wrap_pyfunction!(polar_decompose, m)?)?;
    m.add_function(wrap_pyfunction!(jacobian_dp, m)?)?;
    m.add_function(wrap_pyfunction!(jacobian_ds, m)?)?;
    m.add_function(wrap_pyfunction!(volume_ck, m)?)?;
    m.add_function(wrap_pyfunction!(limck_residual, m)?)?;
    m.add_function(wrap_pyfunction!(push_measure_check, m)?)?;
    m.add_function(wrap_pyfunction!(haar_unitary, m)?)?;
    m.add_function(wrap_pyfunction!(ginibre, m)?)?;
    m.add_function(wrap_pyfunction!(positive_with_spectrum, m)?)?;
    m.add_function(wrap_pyfunction!(rdiag_sample, m)?)?;
    m.add_function(wrap_pyfunction!(freeness_defect, m)?)?;
    m.add_function(wrap_pyfunction!(log_volume_estimate, m)?)?;
    m.add_function(wrap_pyfunction!(amplification_constant, m)?)?;
    m.add_function(wrap_pyfunction!(run_suite, m)?)?;
    m.add("DEFAULT_GRID_NODES", DEFAULT_GRID_NODES)?;
    Ok(())
}
