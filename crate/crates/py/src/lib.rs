//! Python module `bistoch`: thin wrappers over the core crate. Matrices cross
//! the boundary as nested lists (`float` or `complex` entries); structured
//! reports come back as JSON strings.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use bistoch::birkhoff::{self, BistochasticMatrix, KatzPartition, Permutation};
use bistoch::{cp, cut, hull, report, ComplexMatrix, RealMatrix, C64};

fn py_err(e: bistoch::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn real(rows: Vec<Vec<f64>>) -> PyResult<RealMatrix> {
    RealMatrix::from_rows(&rows).map_err(py_err)
}

fn complex(rows: Vec<Vec<C64>>) -> PyResult<ComplexMatrix> {
    let n = rows.len();
    if rows.iter().any(|r| r.len() != n) {
        return Err(PyValueError::new_err("matrix must be square"));
    }
    ComplexMatrix::new(n, rows.into_iter().flatten().collect()).map_err(py_err)
}

fn complex_rows(m: &ComplexMatrix) -> Vec<Vec<C64>> {
    (0..m.n()).map(|i| (0..m.n()).map(|j| m.get(i, j)).collect()).collect()
}

fn bistochastic(rows: Vec<Vec<f64>>) -> PyResult<BistochasticMatrix> {
    BistochasticMatrix::new(real(rows)?).map_err(py_err)
}

fn report_json(r: bistoch::Result<report::RunReport>) -> PyResult<String> {
    r.and_then(|r| r.to_json()).map_err(py_err)
}

/// Real correlation matrix: symmetric, unit diagonal, positive semidefinite.
#[pyclass(name = "CorrelationMatrix", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyCorrelation(cut::RealCorrelationMatrix);

#[pymethods]
impl PyCorrelation {
    #[new]
    fn new(rows: Vec<Vec<f64>>) -> PyResult<Self> {
        cut::RealCorrelationMatrix::new(real(rows)?).map(Self).map_err(py_err)
    }

    #[staticmethod]
    fn cosine(m: usize) -> PyResult<Self> {
        cut::cosine_correlation(m).map(Self).map_err(py_err)
    }

    #[staticmethod]
    fn from_factor(columns: Vec<Vec<f64>>) -> PyResult<Self> {
        cut::RealCorrelationMatrix::from_factor(&real(columns)?).map(Self).map_err(py_err)
    }

    #[getter]
    fn n(&self) -> usize {
        self.0.n()
    }

    fn to_list(&self) -> Vec<Vec<f64>> {
        self.0.matrix().to_rows()
    }

    /// `t·C + (1 - t)·I`.
    fn shrink(&self, t: f64) -> PyResult<Self> {
        self.0.shrink(t).map(Self).map_err(py_err)
    }

    fn min_eigenvalue(&self) -> f64 {
        self.0.min_eigenvalue()
    }

    fn __repr__(&self) -> String {
        format!("CorrelationMatrix({:?})", self.0.matrix().to_rows())
    }
}

/// Probability distribution over sign vectors.
#[pyclass(name = "CutDistribution", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyCutDistribution(cut::CutDistribution);

#[pymethods]
impl PyCutDistribution {
    /// `weights` maps sign strings such as `"+-+"` to probabilities.
    #[new]
    fn new(n: usize, weights: Vec<(String, f64)>) -> PyResult<Self> {
        let parsed = weights
            .into_iter()
            .map(|(s, w)| s.parse::<cut::SignVector>().map(|s| (s, w)))
            .collect::<bistoch::Result<Vec<_>>>()
            .map_err(py_err)?;
        cut::CutDistribution::new(n, parsed).map(Self).map_err(py_err)
    }

    #[getter]
    fn n(&self) -> usize {
        self.0.n()
    }

    fn weights(&self) -> Vec<(String, f64)> {
        self.0.weights().iter().map(|(s, w)| (s.to_string(), *w)).collect()
    }

    fn correlation(&self) -> Vec<Vec<f64>> {
        self.0.correlation().to_rows()
    }

    fn certificate(&self) -> PyBgp {
        PyBgp(cut::bgp_from_distribution(&self.0))
    }

    fn __repr__(&self) -> String {
        format!("CutDistribution(n={}, weights={:?})", self.0.n(), self.weights())
    }
}

/// Function on subsets of `{0..n-1}`, indexed by bitmask.
#[pyclass(name = "BgpCertificate", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyBgp(cut::BgpCertificate);

#[pymethods]
impl PyBgp {
    #[new]
    fn new(n: usize, f: Vec<f64>) -> PyResult<Self> {
        cut::BgpCertificate::new(n, f).map(Self).map_err(py_err)
    }

    #[getter]
    fn n(&self) -> usize {
        self.0.n()
    }

    fn values(&self) -> Vec<f64> {
        self.0.values().to_vec()
    }

    fn walsh(&self) -> Vec<f64> {
        self.0.walsh()
    }

    fn verify(&self, c: &PyCorrelation, tol: f64) -> bool {
        cut::verify_bgp(&self.0, &c.0, tol)
    }
}

/// Completely positive map `A ↦ Σ w_i K_i A K_i*`.
#[pyclass(name = "KrausMap", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyKrausMap(cp::KrausMap);

#[pymethods]
impl PyKrausMap {
    #[new]
    fn new(ops: Vec<Vec<Vec<C64>>>) -> PyResult<Self> {
        let ops = ops.into_iter().map(complex).collect::<PyResult<Vec<_>>>()?;
        let n = ops.first().map(|o| o.n()).ok_or_else(|| PyValueError::new_err("no Kraus operators"))?;
        cp::KrausMap::from_operators(n, ops).map(Self).map_err(py_err)
    }

    #[staticmethod]
    fn schur(c: Vec<Vec<C64>>) -> PyResult<Self> {
        cp::schur_map(&complex(c)?).map(Self).map_err(py_err)
    }

    #[staticmethod]
    fn conjugation(u: Vec<Vec<C64>>) -> PyResult<Self> {
        cp::conjugation_map(&complex(u)?).map(Self).map_err(py_err)
    }

    #[staticmethod]
    fn random_mixed_unitary(n: usize, count: usize, seed: u64) -> PyResult<Self> {
        cp::random_mixed_unitary(n, count, seed).map(Self).map_err(py_err)
    }

    #[getter]
    fn n(&self) -> usize {
        self.0.n()
    }

    fn terms(&self) -> Vec<(f64, Vec<Vec<C64>>)> {
        self.0.terms().iter().map(|t| (t.weight, complex_rows(&t.op))).collect()
    }

    fn apply(&self, a: Vec<Vec<C64>>) -> PyResult<Vec<Vec<C64>>> {
        cp::apply_map(&self.0, &complex(a)?).map(|m| complex_rows(&m)).map_err(py_err)
    }

    fn dual(&self) -> Self {
        Self(cp::dual_map(&self.0))
    }

    fn self_dual_part(&self) -> Self {
        Self(cp::self_dual_part(&self.0))
    }

    fn choi(&self) -> Vec<Vec<C64>> {
        complex_rows(cp::choi_matrix(&self.0).matrix())
    }

    fn choi_distance(&self, other: &Self) -> f64 {
        cp::choi_distance(&self.0, &other.0)
    }

    fn delta(&self) -> Vec<Vec<f64>> {
        cp::delta_matrix(&self.0).to_rows()
    }

    fn hermitian_kraus(&self, tol: f64) -> PyResult<Self> {
        cp::hermitian_kraus(&self.0, tol).map(Self).map_err(py_err)
    }

    /// Map properties as a JSON object.
    fn properties(&self, tol: f64) -> PyResult<String> {
        let p = cp::map_properties(&self.0, tol).map_err(py_err)?;
        serde_json::to_string(&p).map_err(|e| PyValueError::new_err(e.to_string()))
    }
}

#[pyfunction]
fn katz_partitions(n: usize) -> Vec<Vec<usize>> {
    birkhoff::katz_partitions(n).into_iter().map(|p| p.parts().to_vec()).collect()
}

#[pyfunction]
#[pyo3(signature = (parts, perm=None))]
fn katz_extreme_point(parts: Vec<usize>, perm: Option<Vec<usize>>) -> PyResult<Vec<Vec<f64>>> {
    let p = KatzPartition::new(parts).map_err(py_err)?;
    let perm = match perm {
        Some(m) => Permutation::new(m).map_err(py_err)?,
        None => Permutation::identity(p.n()),
    };
    birkhoff::katz_extreme_point(&p, &perm).map(|m| m.matrix().to_rows()).map_err(py_err)
}

#[pyfunction]
fn segment_point(m: Vec<Vec<f64>>, k: f64) -> PyResult<Vec<Vec<f64>>> {
    birkhoff::segment_point(&bistochastic(m)?, k).map(|s| s.matrix().to_rows()).map_err(py_err)
}

#[pyfunction]
fn uni_image(u: Vec<Vec<C64>>) -> PyResult<Vec<Vec<f64>>> {
    hull::uni_image(&complex(u)?).map(|m| m.matrix().to_rows()).map_err(py_err)
}

/// `(name, slack, satisfied)` for each implemented hull condition.
#[pyfunction]
fn necessary_conditions(a: Vec<Vec<f64>>) -> PyResult<Vec<(String, f64, bool)>> {
    let a = bistochastic(a)?;
    Ok(hull::necessary_conditions(&a).into_iter().map(|c| (c.name, c.slack, c.satisfied)).collect())
}

/// `(lower, upper)` bracket for the segment constant of a Katz point.
#[pyfunction]
#[pyo3(signature = (parts, samples=200, seed=0, resolution=1e-6))]
fn estimate_lambda(parts: Vec<usize>, samples: usize, seed: u64, resolution: f64) -> PyResult<(f64, f64)> {
    let p = KatzPartition::new(parts).map_err(py_err)?;
    let n = p.n();
    let m = birkhoff::katz_extreme_point(&p, &Permutation::identity(n)).map_err(py_err)?;
    let b = hull::estimate_lambda(n, &m, samples, seed, resolution).map_err(py_err)?;
    Ok((b.lower, b.upper))
}

/// A distribution over sign vectors reproducing `c`, or `None` when `c`
/// lies outside the cut polytope.
#[pyfunction]
#[pyo3(signature = (c, tol=1e-9))]
fn cut_membership(c: &PyCorrelation, tol: f64) -> PyResult<Option<PyCutDistribution>> {
    let r = cut::cut_membership(&c.0, tol).map_err(py_err)?;
    Ok(r.distribution().cloned().map(PyCutDistribution))
}

#[pyfunction]
fn corollary_certificate(columns: Vec<Vec<f64>>) -> PyResult<PyBgp> {
    cut::corollary_certificate(&real(columns)?).map(PyBgp).map_err(py_err)
}

/// `(t_max, t_infeasible)` along `t ↦ t·C + (1 - t)·I`.
#[pyfunction]
#[pyo3(signature = (c, resolution=1e-6))]
fn rho_bisection(c: &PyCorrelation, resolution: f64) -> PyResult<(f64, Option<f64>)> {
    cut::rho_bisection(&c.0, resolution).map(|b| (b.t_max, b.t_infeasible)).map_err(py_err)
}

/// Hermitian unitary terms `(weight, H)` of `½(Γ_U + Γ_{U*})` for a 2×2 unitary.
#[pyfunction]
fn symmetrized_unitary_2x2(u: Vec<Vec<C64>>) -> PyResult<Vec<(f64, Vec<Vec<C64>>)>> {
    let mhu = cp::symmetrized_unitary_2x2(&complex(u)?).map_err(py_err)?;
    Ok(mhu.terms().iter().map(|(w, h)| (*w, complex_rows(h.matrix()))).collect())
}

#[pyfunction]
fn verify_lambda3() -> PyResult<String> {
    report_json(report::verify_lambda3(false))
}

#[pyfunction]
fn verify_lambda4() -> PyResult<String> {
    report_json(report::verify_lambda4())
}

#[pyfunction]
#[pyo3(signature = (m, q=1, rho=0.5))]
fn pipeline(m: usize, q: usize, rho: f64) -> PyResult<String> {
    report_json(report::pipeline_report(m, q, rho))
}

#[pyfunction]
#[pyo3(signature = (n, samples=50, seed=0, resolution=1e-4))]
fn compare_conjecture(n: usize, samples: usize, seed: u64, resolution: f64) -> PyResult<String> {
    report_json(report::compare_conjecture_report(n, samples, seed, resolution))
}

#[pymodule(name = "bistoch")]
fn bistoch_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyCorrelation>()?;
    m.add_class::<PyCutDistribution>()?;
    m.add_class::<PyBgp>()?;
    m.add_class::<PyKrausMap>()?;
    m.add_function(wrap_pyfunction!(katz_partitions, m)?)?;
    m.add_function(wrap_pyfunction!(katz_extreme_point, m)?)?;
    m.add_function(wrap_pyfunction!(segment_point, m)?)?;
    m.add_function(wrap_pyfunction!(uni_image, m)?)?;
    m.add_function(wrap_pyfunction!(necessary_conditions, m)?)?;
    m.add_function(wrap_pyfunction!(estimate_lambda, m)?)?;
    m.add_function(wrap_pyfunction!(cut_membership, m)?)?;
    m.add_function(wrap_pyfunction!(corollary_certificate, m)?)?;
    m.add_function(wrap_pyfunction!(rho_bisection, m)?)?;
    m.add_function(wrap_pyfunction!(symmetrized_unitary_2x2, m)?)?;
    m.add_function(wrap_pyfunction!(verify_lambda3, m)?)?;
    m.add_function(wrap_pyfunction!(verify_lambda4, m)?)?;
    m.add_function(wrap_pyfunction!(pipeline, m)?)?;
    m.add_function(wrap_pyfunction!(compare_conjecture, m)?)?;
    Ok(())
}
