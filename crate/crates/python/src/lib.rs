//! Python module `qbm`: thin wrappers over `qbm-core`.
//!
//! Structured reports come back as plain dicts and lists. Complex numbers
//! inside reports are `[re, im]` pairs; direct return values are Python
//! `complex`.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyList};
use pyo3::IntoPyObjectExt;
use serde_json::Value;

use qbm_core::crossed::{build_rieffel_projection, BandedElement, RieffelProjectionSpec};
use qbm_core::exit::{self, Engine, ExitFamily, McSettings};
use qbm_core::flow::{self, SemigroupSpec};
use qbm_core::generators::{self, CoalgebraMatrix, QuantumGroup};
use qbm_core::lattice;
use qbm_core::torus::{AlgebraContext, TorusElement};
use qbm_core::Complex64;

fn err(e: qbm_core::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn to_py<'py>(py: Python<'py>, v: &Value) -> PyResult<Bound<'py, PyAny>> {
    Ok(match v {
        Value::Null => py.None().into_bound(py),
        Value::Bool(b) => b.into_bound_py_any(py)?,
        Value::Number(n) => match n.as_i64() {
            Some(i) => i.into_bound_py_any(py)?,
            None => n.as_f64().unwrap_or(f64::NAN).into_bound_py_any(py)?,
        },
        Value::String(s) => s.into_bound_py_any(py)?,
        Value::Array(items) => {
            let list = items.iter().map(|x| to_py(py, x)).collect::<PyResult<Vec<_>>>()?;
            PyList::new(py, list)?.into_any()
        }
        Value::Object(map) => {
            let d = PyDict::new(py);
            for (k, x) in map {
                d.set_item(k, to_py(py, x)?)?;
            }
            d.into_any()
        }
    })
}

fn report<'py, T: serde::Serialize>(py: Python<'py>, value: &T) -> PyResult<Bound<'py, PyAny>> {
    let v = serde_json::to_value(value).map_err(|e| PyValueError::new_err(e.to_string()))?;
    to_py(py, &v)
}

/// Element `Σ a_{mn} UᵐVⁿ` of the rotation algebra.
#[pyclass(name = "TorusElement", module = "qbm", from_py_object)]
#[derive(Clone)]
struct PyTorusElement {
    inner: TorusElement,
}

#[pymethods]
impl PyTorusElement {
    /// `terms` maps `(m, n)` to a coefficient.
    #[new]
    #[pyo3(signature = (theta, terms=None))]
    fn new(theta: f64, terms: Option<Vec<((i64, i64), Complex64)>>) -> PyResult<Self> {
        let ctx = AlgebraContext::new(theta).map_err(err)?;
        Ok(Self {
            inner: TorusElement::from_terms(ctx, terms.unwrap_or_default()),
        })
    }

    #[staticmethod]
    fn monomial(theta: f64, m: i64, n: i64) -> PyResult<Self> {
        let ctx = AlgebraContext::new(theta).map_err(err)?;
        Ok(Self {
            inner: TorusElement::monomial(ctx, m, n, Complex64::new(1.0, 0.0)),
        })
    }

    #[getter]
    fn theta(&self) -> f64 {
        self.inner.context().theta()
    }

    fn coeff(&self, m: i64, n: i64) -> Complex64 {
        self.inner.coeff(m, n)
    }

    fn terms(&self) -> Vec<((i64, i64), Complex64)> {
        self.inner.terms().collect()
    }

    fn __mul__(&self, other: &Self) -> PyResult<Self> {
        Ok(Self {
            inner: self.inner.mul(&other.inner).map_err(err)?,
        })
    }

    fn __add__(&self, other: &Self) -> PyResult<Self> {
        Ok(Self {
            inner: self.inner.add(&other.inner).map_err(err)?,
        })
    }

    fn __sub__(&self, other: &Self) -> PyResult<Self> {
        Ok(Self {
            inner: self.inner.sub(&other.inner).map_err(err)?,
        })
    }

    fn scale(&self, c: Complex64) -> Self {
        Self {
            inner: self.inner.scale(c),
        }
    }

    fn star(&self) -> Self {
        Self {
            inner: self.inner.star(),
        }
    }

    fn trace(&self) -> Complex64 {
        self.inner.trace()
    }

    /// Gauge action `U ↦ e^{2πis}U`, `V ↦ e^{2πit}V`.
    fn act(&self, s: f64, t: f64) -> Self {
        Self {
            inner: self.inner.act_angles(s, t),
        }
    }

    /// Exact heat semigroup `T_t`.
    #[pyo3(signature = (t, sigma2=1.0))]
    fn heat(&self, t: f64, sigma2: f64) -> PyResult<Self> {
        let spec = SemigroupSpec::new(sigma2).map_err(err)?;
        Ok(Self {
            inner: flow::heat_semigroup_exact(&self.inner, t, &spec),
        })
    }

    fn max_coeff_diff(&self, other: &Self) -> f64 {
        self.inner.max_coeff_diff(&other.inner)
    }

    fn to_json(&self) -> String {
        self.inner.to_json()
    }

    #[staticmethod]
    fn from_json(s: &str) -> PyResult<Self> {
        Ok(Self {
            inner: TorusElement::from_json(s).map_err(err)?,
        })
    }

    fn __repr__(&self) -> String {
        format!("TorusElement(theta={}, terms={})", self.theta(), self.inner.support_len())
    }
}

/// Banded element `Σ f_k(U)Vᵏ` sampled on a grid.
#[pyclass(name = "Banded", module = "qbm", from_py_object)]
#[derive(Clone)]
struct PyBanded {
    inner: BandedElement,
}

#[pymethods]
impl PyBanded {
    #[staticmethod]
    #[pyo3(signature = (element, grid=4096))]
    fn from_torus(element: &PyTorusElement, grid: usize) -> PyResult<Self> {
        Ok(Self {
            inner: BandedElement::from_torus(&element.inner, grid).map_err(err)?,
        })
    }

    #[getter]
    fn theta(&self) -> f64 {
        self.inner.context().theta()
    }

    #[getter]
    fn grid(&self) -> usize {
        self.inner.grid_len()
    }

    fn band_indices(&self) -> Vec<i64> {
        self.inner.band_indices()
    }

    /// Samples of `f_k` on the grid, or zeros when band `k` is absent.
    fn band(&self, k: i64) -> Vec<Complex64> {
        match self.inner.band(k) {
            Some(f) => f.samples().to_vec(),
            None => vec![Complex64::default(); self.inner.grid_len()],
        }
    }

    fn __mul__(&self, other: &Self) -> PyResult<Self> {
        Ok(Self {
            inner: self.inner.mul(&other.inner).map_err(err)?,
        })
    }

    fn __add__(&self, other: &Self) -> PyResult<Self> {
        Ok(Self {
            inner: self.inner.add(&other.inner).map_err(err)?,
        })
    }

    fn star(&self) -> Self {
        Self {
            inner: self.inner.star(),
        }
    }

    fn translate(&self, s: f64, t: f64) -> Self {
        Self {
            inner: self.inner.translate_action(s, t),
        }
    }

    fn trace(&self) -> Complex64 {
        self.inner.trace()
    }

    fn sup_diff(&self, other: &Self) -> f64 {
        self.inner.sup_diff(&other.inner)
    }

    #[pyo3(signature = (tol=1e-10))]
    fn is_projection<'py>(&self, py: Python<'py>, tol: f64) -> PyResult<Bound<'py, PyAny>> {
        report(py, &self.inner.is_projection(tol))
    }

    fn __repr__(&self) -> String {
        format!("Banded(theta={}, grid={}, bands={:?})", self.theta(), self.grid(), self.band_indices())
    }
}

fn projection_spec(theta: f64, epsilon: Option<f64>, scale_k: u64, reversed: bool) -> PyResult<RieffelProjectionSpec> {
    let angle = {
        let a = (scale_k as f64 * theta).fract();
        if reversed {
            1.0 - a
        } else {
            a
        }
    };
    let eps = epsilon.unwrap_or(angle / 2.0);
    if reversed {
        RieffelProjectionSpec::reversed(theta, eps, scale_k)
    } else {
        RieffelProjectionSpec::new(theta, eps, scale_k)
    }
    .map_err(err)
}

/// Trapezoid projection; `epsilon` defaults to half its angle.
#[pyfunction]
#[pyo3(signature = (theta, epsilon=None, scale_k=1, grid=4096, reversed=false))]
fn rieffel_projection(theta: f64, epsilon: Option<f64>, scale_k: u64, grid: usize, reversed: bool) -> PyResult<PyBanded> {
    let spec = projection_spec(theta, epsilon, scale_k, reversed)?;
    Ok(PyBanded {
        inner: build_rieffel_projection(&spec, grid).map_err(err)?,
    })
}

/// Iterated meet of the given projections; returns `(meet, report)`.
#[pyfunction]
#[pyo3(signature = (factors, max_iter=500, tol=1e-14))]
fn meet_iterative<'py>(
    py: Python<'py>,
    factors: Vec<PyBanded>,
    max_iter: usize,
    tol: f64,
) -> PyResult<(PyBanded, Bound<'py, PyAny>)> {
    let factors: Vec<BandedElement> = factors.into_iter().map(|f| f.inner).collect();
    let rep = py
        .detach(|| lattice::meet_iterative(&factors, max_iter, tol))
        .map_err(err)?;
    let summary = to_py(py, &rep.to_json())?;
    Ok((PyBanded { inner: rep.result }, summary))
}

/// Closed-form meet of two translates of the trapezoid projection.
#[pyfunction]
#[pyo3(signature = (theta, s, t, s2, t2, epsilon=None, grid=4096))]
fn meet_closed_form(
    theta: f64,
    s: f64,
    t: f64,
    s2: f64,
    t2: f64,
    epsilon: Option<f64>,
    grid: usize,
) -> PyResult<PyBanded> {
    let spec = projection_spec(theta, epsilon, 1, false)?;
    let closed = lattice::meet_closed_form(&spec, s, t, s2, t2).map_err(err)?;
    Ok(PyBanded {
        inner: closed.to_banded(&spec, grid).map_err(err)?,
    })
}

/// Monte Carlo vacuum expectation of `element` at time `t`.
#[pyfunction]
#[pyo3(signature = (element, t, sigma2=1.0, n_paths=100_000, seed=0))]
fn vacuum_expectation_mc<'py>(
    py: Python<'py>,
    element: &PyTorusElement,
    t: f64,
    sigma2: f64,
    n_paths: usize,
    seed: u64,
) -> PyResult<Bound<'py, PyAny>> {
    let spec = SemigroupSpec::new(sigma2).map_err(err)?;
    let a = element.inner.clone();
    let rep = py
        .detach(|| flow::vacuum_expectation_mc(&a, t, &spec, n_paths, seed))
        .map_err(err)?;
    to_py(py, &rep.to_json())
}

#[pyfunction]
fn convergents(theta: f64, count: usize) -> PyResult<Vec<u64>> {
    exit::convergents(theta, count).map_err(err)
}

fn family(theta: f64, ks: Option<Vec<u64>>, count: usize) -> PyResult<ExitFamily> {
    match ks {
        Some(ks) => ExitFamily::from_ks(theta, &ks),
        None => ExitFamily::new(theta, count),
    }
    .map_err(err)
}

/// `γ` for one member of the convergent family; `engine` is `"reduced"`
/// or `"operator"`.
#[pyfunction]
#[pyo3(signature = (theta, k, engine="reduced", n_paths=10_000, seed=0, sigma2=2.0, dt=None))]
fn gamma_estimate<'py>(
    py: Python<'py>,
    theta: f64,
    k: u64,
    engine: &str,
    n_paths: usize,
    seed: u64,
    sigma2: f64,
    dt: Option<f64>,
) -> PyResult<Bound<'py, PyAny>> {
    let engine = match engine {
        "reduced" => Engine::Reduced,
        "operator" => Engine::Operator,
        other => return Err(PyValueError::new_err(format!("unknown engine {other:?}"))),
    };
    let fam = family(theta, Some(vec![k]), 1)?;
    let mc = McSettings { n_paths, dt, seed };
    let est = py
        .detach(|| exit::gamma_estimate(&fam, 0, engine, &mc, sigma2))
        .map_err(err)?;
    report(py, &est)
}

/// Full exit-time pipeline; returns the summary dict plus the CSV table.
#[pyfunction]
#[pyo3(signature = (theta, ks=None, count=6, n_paths=10_000, seed=0, sigma2=2.0, with_operator=false))]
fn exit_asymptotics<'py>(
    py: Python<'py>,
    theta: f64,
    ks: Option<Vec<u64>>,
    count: usize,
    n_paths: usize,
    seed: u64,
    sigma2: f64,
    with_operator: bool,
) -> PyResult<(Bound<'py, PyAny>, String)> {
    let fam = family(theta, ks, count)?;
    let mc = McSettings {
        n_paths,
        dt: None,
        seed,
    };
    let rep = py
        .detach(|| exit::run_exit_asymptotics(&fam, &mc, sigma2, with_operator))
        .map_err(err)?;
    Ok((to_py(py, &rep.summary_json())?, rep.to_csv()))
}

#[pyfunction]
fn extract_invariants<'py>(py: Python<'py>, n0: u32, c1: f64, c2: f64) -> PyResult<Bound<'py, PyAny>> {
    report(py, &exit::extract_invariants(n0, c1, c2).map_err(err)?)
}

#[pyfunction]
fn paper_series_check(py: Python<'_>) -> PyResult<Bound<'_, PyAny>> {
    report(py, &exit::paper_series_check())
}

#[pyfunction]
#[pyo3(signature = (radii=None))]
fn classical_circle_benchmark(py: Python<'_>, radii: Option<Vec<f64>>) -> PyResult<Bound<'_, PyAny>> {
    let radii = radii.unwrap_or_else(|| exit::DEFAULT_CIRCLE_RADII.to_vec());
    report(py, &exit::classical_circle_benchmark(&radii).map_err(err)?)
}

#[pyfunction]
fn check_torus_generator(py: Python<'_>, l10: Complex64, l01: Complex64, l11: Complex64) -> PyResult<Bound<'_, PyAny>> {
    report(py, &generators::check_torus_generator(&generators::TorusGeneratorSpec::new(l10, l01, l11)))
}

#[pyfunction]
fn check_otheta_generator(
    py: Python<'_>,
    n: usize,
    z: Vec<Complex64>,
    a: Vec<Vec<Complex64>>,
) -> PyResult<Bound<'_, PyAny>> {
    let g = generators::OThetaGeneratorSpec { n, z, a };
    report(py, &generators::check_otheta_generator(&g).map_err(err)?)
}

#[pyfunction]
fn check_oplus_generator(
    py: Python<'_>,
    n: usize,
    l: Vec<Vec<Complex64>>,
    a: Vec<Vec<Complex64>>,
) -> PyResult<Bound<'_, PyAny>> {
    let g = generators::OPlusGeneratorSpec { n, l, a };
    report(py, &generators::check_oplus_generator(&g).map_err(err)?)
}

#[pyfunction]
fn solve_biinvariant_oplus(py: Python<'_>, n: usize) -> PyResult<Bound<'_, PyAny>> {
    report(py, &generators::solve_biinvariant_oplus(n).map_err(err)?)
}

/// `group` is `"torus"`, `"otheta"` or `"oplus"`.
#[pyfunction]
#[pyo3(signature = (group, n=1))]
fn epsilon_derivation_dim(group: &str, n: usize) -> PyResult<(usize, usize)> {
    let g = match group {
        "torus" => QuantumGroup::Torus,
        "otheta" => QuantumGroup::Otheta(n),
        "oplus" => QuantumGroup::Oplus(n),
        other => return Err(PyValueError::new_err(format!("unknown group {other:?}"))),
    };
    let d = generators::epsilon_derivation_dim(g).map_err(err)?;
    Ok((d.computed, d.formula))
}

/// `exp(t·L)` for the generator matrix `L` of a corepresentation.
#[pyfunction]
fn convolution_exp(lmat: Vec<Vec<Complex64>>, t: f64) -> PyResult<Vec<Vec<Complex64>>> {
    let c = CoalgebraMatrix { d: lmat.len(), lmat };
    let m = generators::convolution_exp(&c, t).map_err(err)?;
    Ok(generators::linalg::matrix_to_rows(&m))
}

#[pymodule]
fn qbm(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    m.add_class::<PyTorusElement>()?;
    m.add_class::<PyBanded>()?;
    m.add_function(wrap_pyfunction!(rieffel_projection, m)?)?;
    m.add_function(wrap_pyfunction!(meet_iterative, m)?)?;
    m.add_function(wrap_pyfunction!(meet_closed_form, m)?)?;
    m.add_function(wrap_pyfunction!(vacuum_expectation_mc, m)?)?;
    m.add_function(wrap_pyfunction!(convergents, m)?)?;
    m.add_function(wrap_pyfunction!(gamma_estimate, m)?)?;
    m.add_function(wrap_pyfunction!(exit_asymptotics, m)?)?;
    m.add_function(wrap_pyfunction!(extract_invariants, m)?)?;
    m.add_function(wrap_pyfunction!(paper_series_check, m)?)?;
    m.add_function(wrap_pyfunction!(classical_circle_benchmark, m)?)?;
    m.add_function(wrap_pyfunction!(check_torus_generator, m)?)?;
    m.add_function(wrap_pyfunction!(check_otheta_generator, m)?)?;
    m.add_function(wrap_pyfunction!(check_oplus_generator, m)?)?;
    m.add_function(wrap_pyfunction!(solve_biinvariant_oplus, m)?)?;
    m.add_function(wrap_pyfunction!(epsilon_derivation_dim, m)?)?;
    m.add_function(wrap_pyfunction!(convolution_exp, m)?)?;
    Ok(())
}
