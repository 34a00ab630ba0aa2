//! Python bindings: `import vbip`.

use pyo3::exceptions::{PyIOError, PyValueError};
use pyo3::prelude::*;

use vbip_core::decode::{decode, Algorithm, DecodeResult, DecoderConfig};
use vbip_core::experiment::{self, Level, Sparsest, SweepConfig};
use vbip_core::graph::{self, RegularParams};
use vbip_core::signal::{self, DEFAULT_SUCCESS_TOL};
use vbip_core::Error;

fn err(e: Error) -> PyErr {
    match e {
        Error::Io(e) => PyIOError::new_err(e.to_string()),
        other => PyValueError::new_err(other.to_string()),
    }
}

fn algorithm(name: &str) -> PyResult<Algorithm> {
    name.parse().map_err(err)
}

/// Sparse binary sensing matrix.
#[pyclass(name = "SensingMatrix", frozen)]
struct PySensingMatrix {
    inner: graph::SensingMatrix,
}

#[pymethods]
impl PySensingMatrix {
    /// Builds a matrix from a dense list of 0/1 rows.
    #[new]
    fn new(rows: Vec<Vec<u8>>) -> PyResult<Self> {
        Ok(PySensingMatrix {
            inner: graph::SensingMatrix::from_dense(&rows).map_err(err)?,
        })
    }

    #[staticmethod]
    #[pyo3(signature = (n_vars, n_checks, var_degree, seed=0, avoid_4cycles=false))]
    fn regular(n_vars: usize, n_checks: usize, var_degree: usize, seed: u64, avoid_4cycles: bool) -> PyResult<Self> {
        let p = RegularParams::new(n_vars, n_checks, var_degree, seed).avoid_4cycles(avoid_4cycles);
        Ok(PySensingMatrix {
            inner: graph::generate_regular(&p).map_err(err)?,
        })
    }

    #[staticmethod]
    fn from_alist(text: &str) -> PyResult<Self> {
        Ok(PySensingMatrix {
            inner: graph::parse_alist(text).map_err(err)?,
        })
    }

    fn to_alist(&self) -> String {
        graph::write_alist(&self.inner)
    }

    #[getter]
    fn n_checks(&self) -> usize {
        self.inner.n_checks()
    }

    #[getter]
    fn n_vars(&self) -> usize {
        self.inner.n_vars()
    }

    #[getter]
    fn n_edges(&self) -> usize {
        self.inner.n_edges()
    }

    fn count_4cycles(&self) -> u64 {
        self.inner.count_4cycles()
    }

    fn measure(&self, x: Vec<f64>) -> PyResult<Vec<f64>> {
        self.inner.measure(&x).map_err(err)
    }

    fn to_dense(&self) -> Vec<Vec<u8>> {
        self.inner.to_dense()
    }

    fn __repr__(&self) -> String {
        format!("SensingMatrix(M={}, N={}, edges={})", self.inner.n_checks(), self.inner.n_vars(), self.inner.n_edges())
    }
}

/// Nonnegative sparse signal.
#[pyclass(name = "SparseSignal", frozen)]
struct PySparseSignal {
    inner: signal::SparseSignal,
}

#[pymethods]
impl PySparseSignal {
    #[getter]
    fn len(&self) -> usize {
        self.inner.len()
    }

    #[getter]
    fn support(&self) -> Vec<usize> {
        self.inner.support().to_vec()
    }

    #[getter]
    fn values(&self) -> Vec<f64> {
        self.inner.values().to_vec()
    }

    fn to_dense(&self) -> Vec<f64> {
        self.inner.to_dense()
    }

    fn __repr__(&self) -> String {
        format!("SparseSignal(N={}, K={})", self.inner.len(), self.inner.support_size())
    }
}

#[pyclass(name = "DecodeResult", frozen, get_all)]
struct PyDecodeResult {
    estimate: Vec<f64>,
    converged: bool,
    iterations: usize,
    verified_history: Vec<Vec<usize>>,
}

impl From<DecodeResult> for PyDecodeResult {
    fn from(r: DecodeResult) -> Self {
        PyDecodeResult {
            estimate: r.estimate,
            converged: r.converged,
            iterations: r.iterations,
            verified_history: r.verified_history,
        }
    }
}

#[pymethods]
impl PyDecodeResult {
    fn __repr__(&self) -> String {
        let converged = if self.converged { "True" } else { "False" };
        format!("DecodeResult(converged={converged}, iterations={})", self.iterations)
    }
}

#[pyclass(name = "SweepPoint", frozen, get_all)]
struct PySweepPoint {
    algorithm: String,
    k: f64,
    support_size: usize,
    trials: u64,
    successes: u64,
    failures: u64,
    p_success: f64,
}

#[pymethods]
impl PySweepPoint {
    fn __repr__(&self) -> String {
        format!(
            "SweepPoint({}, k={}, trials={}, p_success={:.6})",
            self.algorithm, self.k, self.trials, self.p_success
        )
    }
}

#[pyfunction]
#[pyo3(signature = (n_vars, support_size, seed=0))]
fn generate_signal(n_vars: usize, support_size: usize, seed: u64) -> PyResult<PySparseSignal> {
    Ok(PySparseSignal {
        inner: signal::generate_signal(n_vars, support_size, seed).map_err(err)?,
    })
}

#[pyfunction]
#[pyo3(signature = (truth, estimate, tol=DEFAULT_SUCCESS_TOL))]
fn reconstruction_success(truth: &PySparseSignal, estimate: Vec<f64>, tol: f64) -> PyResult<bool> {
    signal::reconstruction_success(&truth.inner, &estimate, tol).map_err(err)
}

/// Runs `algorithm` ("ip", "vb" or "vbip") on measurements `y`.
#[pyfunction]
#[allow(clippy::too_many_arguments)]
#[pyo3(name = "decode", signature = (h, y, algorithm="vbip", max_iter=50, eq_tol=1e-9, seed=0, coincidence=true))]
fn py_decode(
    py: Python<'_>,
    h: &PySensingMatrix,
    y: Vec<f64>,
    algorithm: &str,
    max_iter: usize,
    eq_tol: f64,
    seed: u64,
    coincidence: bool,
) -> PyResult<PyDecodeResult> {
    let alg = self::algorithm(algorithm)?;
    let cfg = DecoderConfig {
        max_iter,
        eq_tol,
        seed,
        coincidence,
    };
    let r = py.detach(|| decode(alg, &h.inner, &y, &cfg)).map_err(err)?;
    Ok(r.into())
}

/// Returns `("unique", x)`, `("ambiguous", support_size)` or `("none", None)`.
#[pyfunction]
#[pyo3(signature = (h, y, max_support, tol=1e-6))]
fn brute_force_sparsest<'py>(
    py: Python<'py>,
    h: &PySensingMatrix,
    y: Vec<f64>,
    max_support: usize,
    tol: f64,
) -> PyResult<(&'static str, Bound<'py, PyAny>)> {
    let r = experiment::brute_force_sparsest(&h.inner, &y, max_support, tol).map_err(err)?;
    Ok(match r {
        Sparsest::Unique { x, .. } => ("unique", x.into_pyobject(py)?.into_any()),
        Sparsest::Ambiguous { support_size } => ("ambiguous", support_size.into_pyobject(py)?.into_any()),
        Sparsest::None => ("none", py.None().into_bound(py)),
    })
}

/// Success probability per (sparsity, algorithm); `levels` are fractions K/N.
#[pyfunction]
#[pyo3(signature = (h, levels, algorithms=vec!["ip".to_string(), "vb".to_string(), "vbip".to_string()], min_failures=100, max_trials=1_000_000, min_trials=0, seed=0))]
#[allow(clippy::too_many_arguments)]
fn sweep(
    py: Python<'_>,
    h: &PySensingMatrix,
    levels: Vec<f64>,
    algorithms: Vec<String>,
    min_failures: u64,
    max_trials: u64,
    min_trials: u64,
    seed: u64,
) -> PyResult<Vec<PySweepPoint>> {
    let cfg = SweepConfig {
        levels: levels.into_iter().map(Level::Fraction).collect(),
        algorithms: algorithms.iter().map(|a| algorithm(a)).collect::<PyResult<_>>()?,
        min_failures,
        max_trials,
        min_trials,
        master_seed: seed,
        ..SweepConfig::default()
    };
    let points = py.detach(|| experiment::sweep(&h.inner, &cfg)).map_err(err)?;
    Ok(points
        .into_iter()
        .map(|p| PySweepPoint {
            algorithm: p.algorithm.to_string(),
            k: p.k,
            support_size: p.support_size,
            trials: p.trials,
            successes: p.successes,
            failures: p.failures,
            p_success: p.p_success(),
        })
        .collect())
}

#[pymodule]
fn vbip(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PySensingMatrix>()?;
    m.add_class::<PySparseSignal>()?;
    m.add_class::<PyDecodeResult>()?;
    m.add_class::<PySweepPoint>()?;
    m.add_function(wrap_pyfunction!(generate_signal, m)?)?;
    m.add_function(wrap_pyfunction!(reconstruction_success, m)?)?;
    m.add_function(wrap_pyfunction!(py_decode, m)?)?;
    m.add_function(wrap_pyfunction!(brute_force_sparsest, m)?)?;
    m.add_function(wrap_pyfunction!(sweep, m)?)?;
    Ok(())
}
