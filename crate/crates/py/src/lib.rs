//! Python bindings for the urlab core: states, observables, moments, the
//! bound family, tightness ratios, and the mixedness estimator.
//!
//! Functions that need randomness take an explicit `seed` and build their
//! own generator, so Python callers get the same reproducibility guarantees
//! as the Rust API.

use num_complex::Complex64;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use urlab::{bounds, estimator, moments, sweeps, verify};

fn err(e: urlab::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// A qubit state as a Bloch vector with |p| <= 1.
#[pyclass(name = "BlochState", frozen, from_py_object)]
#[derive(Clone)]
struct PyBlochState {
    inner: urlab::BlochState,
}

#[pymethods]
impl PyBlochState {
    #[new]
    fn new(p1: f64, p2: f64, p3: f64) -> PyResult<Self> {
        Ok(PyBlochState {
            inner: urlab::BlochState::new(p1, p2, p3).map_err(err)?,
        })
    }

    /// Parse "p1,p2,p3".
    #[staticmethod]
    fn parse(text: &str) -> PyResult<Self> {
        Ok(PyBlochState {
            inner: text.parse().map_err(err)?,
        })
    }

    #[getter]
    fn components(&self) -> (f64, f64, f64) {
        let [p1, p2, p3] = self.inner.components();
        (p1, p2, p3)
    }

    fn is_pure(&self) -> bool {
        self.inner.is_pure()
    }

    fn mixedness(&self) -> f64 {
        moments::mixedness(&self.inner)
    }

    fn orthogonal_pure(&self) -> PyResult<Self> {
        Ok(PyBlochState {
            inner: self.inner.orthogonal_pure().map_err(err)?,
        })
    }

    /// The density matrix as a nested list of complex entries.
    fn to_density(&self) -> Vec<Vec<Complex64>> {
        let rho = self.inner.to_density();
        (0..2)
            .map(|r| (0..2).map(|c| rho.entry(r, c)).collect())
            .collect()
    }

    fn __repr__(&self) -> String {
        let [p1, p2, p3] = self.inner.components();
        format!("BlochState({p1}, {p2}, {p3})")
    }
}

/// A qubit observable a1*sx + a2*sy + a3*sz + a4*I.
#[pyclass(name = "PauliObservable", frozen, from_py_object)]
#[derive(Clone)]
struct PyPauliObservable {
    inner: urlab::PauliObservable,
}

#[pymethods]
impl PyPauliObservable {
    #[new]
    fn new(a1: f64, a2: f64, a3: f64, a4: f64) -> PyResult<Self> {
        Ok(PyPauliObservable {
            inner: urlab::PauliObservable::new(a1, a2, a3, a4).map_err(err)?,
        })
    }

    /// Parse "a1,a2,a3,a4" or an alias sx|sy|sz|id.
    #[staticmethod]
    fn parse(text: &str) -> PyResult<Self> {
        Ok(PyPauliObservable {
            inner: text.parse().map_err(err)?,
        })
    }

    #[getter]
    fn coefficients(&self) -> (f64, f64, f64, f64) {
        let [a1, a2, a3, a4] = self.inner.coefficients();
        (a1, a2, a3, a4)
    }

    /// (upper, lower) eigenvalues a4 +- |a|.
    fn eigenvalues(&self) -> (f64, f64) {
        let es = self.inner.eigensystem();
        (es.lambda_plus, es.lambda_minus)
    }

    fn is_degenerate(&self) -> bool {
        self.inner.eigensystem().is_degenerate()
    }

    fn to_dense(&self) -> Vec<Vec<Complex64>> {
        let m = self.inner.to_dense();
        (0..2)
            .map(|r| (0..2).map(|c| m.entry(r, c)).collect())
            .collect()
    }

    fn __add__(&self, other: &PyPauliObservable) -> PyPauliObservable {
        PyPauliObservable {
            inner: self.inner + other.inner,
        }
    }

    fn __repr__(&self) -> String {
        let [a1, a2, a3, a4] = self.inner.coefficients();
        format!("PauliObservable({a1}, {a2}, {a3}, {a4})")
    }
}

/// Point estimate and bootstrap interval for one estimation run.
#[pyclass(name = "EstimateReport", frozen)]
struct PyEstimateReport {
    #[pyo3(get)]
    m_hat: f64,
    #[pyo3(get)]
    interval: (f64, f64),
    #[pyo3(get)]
    clamped: bool,
    #[pyo3(get)]
    shots_per_setting: u64,
    #[pyo3(get)]
    resamples: u32,
    #[pyo3(get)]
    true_m: Option<f64>,
}

#[pymethods]
impl PyEstimateReport {
    fn __repr__(&self) -> String {
        format!(
            "EstimateReport(m_hat={}, interval=({}, {}), clamped={})",
            self.m_hat, self.interval.0, self.interval.1, self.clamped
        )
    }
}

fn unwrap_obs(obs: &[PyPauliObservable]) -> Vec<urlab::PauliObservable> {
    obs.iter().map(|o| o.inner).collect()
}

#[pyfunction]
fn expectation(obs: &PyPauliObservable, state: &PyBlochState) -> f64 {
    moments::expectation(&obs.inner, &state.inner)
}

#[pyfunction]
fn variance(obs: &PyPauliObservable, state: &PyBlochState) -> f64 {
    moments::variance(&obs.inner, &state.inner)
}

#[pyfunction]
fn stddev(obs: &PyPauliObservable, state: &PyBlochState) -> f64 {
    moments::stddev(&obs.inner, &state.inner)
}

/// Deviation covariance G(A,B) as a complex number.
#[pyfunction]
fn covariance(a: &PyPauliObservable, b: &PyPauliObservable, state: &PyBlochState) -> Complex64 {
    moments::covariance(&a.inner, &b.inner, &state.inner)
}

#[pyfunction]
fn commutator_measure(a: &PyPauliObservable, b: &PyPauliObservable) -> f64 {
    moments::commutator_measure(&a.inner, &b.inner)
}

#[pyfunction]
fn equality_rhs(obs: Vec<PyPauliObservable>, state: &PyBlochState) -> PyResult<f64> {
    bounds::equality_rhs(&unwrap_obs(&obs), &state.inner).map_err(err)
}

#[pyfunction]
fn inequality_rhs(obs: Vec<PyPauliObservable>, state: &PyBlochState) -> PyResult<f64> {
    bounds::inequality_rhs(&unwrap_obs(&obs), &state.inner).map_err(err)
}

#[pyfunction]
fn sur_bound(a: &PyPauliObservable, b: &PyPauliObservable, state: &PyBlochState) -> f64 {
    bounds::sur_bound(&a.inner, &b.inner, &state.inner)
}

#[pyfunction]
fn maccone_pati_bound(
    a: &PyPauliObservable,
    b: &PyPauliObservable,
    state: &PyBlochState,
) -> PyResult<f64> {
    bounds::maccone_pati_bound(&a.inner, &b.inner, &state.inner).map_err(err)
}

#[pyfunction]
fn n_observable_bound(obs: Vec<PyPauliObservable>, state: &PyBlochState) -> PyResult<f64> {
    bounds::n_observable_bound(&unwrap_obs(&obs), &state.inner).map_err(err)
}

/// (t1, t2, t3, t4); None where a ratio does not apply or is undefined.
#[pyfunction]
fn tightness(
    obs: Vec<PyPauliObservable>,
    state: &PyBlochState,
) -> (Option<f64>, Option<f64>, Option<f64>, Option<f64>) {
    let t = sweeps::tightness(&unwrap_obs(&obs), &state.inner);
    (t.t1, t.t2, t.t3, t.t4)
}

/// Closed-form (deviation-sum bound, product bound) on the pure family.
#[pyfunction]
fn closed_form_curves(theta: f64) -> (f64, f64) {
    bounds::closed_form_curves(theta)
}

#[pyfunction]
fn exact_mixedness(
    a: &PyPauliObservable,
    b: &PyPauliObservable,
    state: &PyBlochState,
) -> PyResult<f64> {
    estimator::exact_mixedness(&a.inner, &b.inner, &state.inner).map_err(err)
}

/// Simulate the four-setting plan on a state and estimate its mixedness.
#[pyfunction]
#[pyo3(signature = (a, b, state, shots_per_setting, resamples=1000, seed=0))]
fn estimate_mixedness(
    a: &PyPauliObservable,
    b: &PyPauliObservable,
    state: &PyBlochState,
    shots_per_setting: u64,
    resamples: u32,
    seed: u64,
) -> PyResult<PyEstimateReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let report = estimator::estimate_mixedness(
        &a.inner,
        &b.inner,
        &state.inner,
        shots_per_setting,
        resamples,
        &mut rng,
    )
    .map_err(err)?;
    Ok(PyEstimateReport {
        m_hat: report.m_hat,
        interval: (report.interval_low, report.interval_high),
        clamped: report.clamped,
        shots_per_setting: report.shots_per_setting,
        resamples: report.resamples,
        true_m: report.true_m,
    })
}

/// The pure-family sweep as (theta, deviation_sum, bound, product_bound) rows.
#[pyfunction]
fn sweep_pure_family(steps: usize) -> PyResult<Vec<(f64, f64, f64, f64)>> {
    let grid = sweeps::sweep_fig3(steps).map_err(err)?;
    Ok(grid
        .points
        .iter()
        .map(|p| (p.theta, p.lhs_sum_std, p.rhs_eq14, p.rhs_sur.unwrap_or(f64::NAN)))
        .collect())
}

/// Run the randomized property verifier; returns (passed, {property: worst}).
#[pyfunction]
#[pyo3(signature = (trials=10_000, seed=0))]
fn run_verification(trials: u64, seed: u64) -> (bool, Vec<(String, f64)>) {
    let report = verify::run(trials, seed);
    let worsts = report
        .properties
        .iter()
        .map(|p| (p.name.to_string(), p.worst))
        .collect();
    (report.passed(), worsts)
}

#[pymodule]
fn urlab_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyBlochState>()?;
    m.add_class::<PyPauliObservable>()?;
    m.add_class::<PyEstimateReport>()?;
    m.add_function(wrap_pyfunction!(expectation, m)?)?;
    m.add_function(wrap_pyfunction!(variance, m)?)?;
    m.add_function(wrap_pyfunction!(stddev, m)?)?;
    m.add_function(wrap_pyfunction!(covariance, m)?)?;
    m.add_function(wrap_pyfunction!(commutator_measure, m)?)?;
    m.add_function(wrap_pyfunction!(equality_rhs, m)?)?;
    m.add_function(wrap_pyfunction!(inequality_rhs, m)?)?;
    m.add_function(wrap_pyfunction!(sur_bound, m)?)?;
    m.add_function(wrap_pyfunction!(maccone_pati_bound, m)?)?;
    m.add_function(wrap_pyfunction!(n_observable_bound, m)?)?;
    m.add_function(wrap_pyfunction!(tightness, m)?)?;
    m.add_function(wrap_pyfunction!(closed_form_curves, m)?)?;
    m.add_function(wrap_pyfunction!(exact_mixedness, m)?)?;
    m.add_function(wrap_pyfunction!(estimate_mixedness, m)?)?;
    m.add_function(wrap_pyfunction!(sweep_pure_family, m)?)?;
    m.add_function(wrap_pyfunction!(run_verification, m)?)?;
    Ok(())
}
