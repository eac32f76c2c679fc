//! Python bindings: parameters, states, simulation and the limit analysis.

use pyo3::exceptions::{PyArithmeticError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;
use trichoderma_core as core;
use trichoderma_core::{presets, GrowthLaw};

fn to_py(e: core::Error) -> PyErr {
    use core::Error::*;
    match e {
        StepTooLarge { .. } | LeavesNonNegativeOrthant { .. } | NonFinite { .. } | OrderUndetermined { .. } => {
            PyArithmeticError::new_err(e.to_string())
        }
        _ => PyValueError::new_err(e.to_string()),
    }
}

/// Kinetic constants with a Monod growth law.
#[pyclass(name = "ModelParams", module = "trichoderma", from_py_object)]
#[derive(Clone)]
pub struct PyParams {
    inner: core::ModelParams,
}

#[pymethods]
impl PyParams {
    #[new]
    #[pyo3(signature = (*, k_h, alpha, k_d, y_bs, inv_y_ps, m_s, m_p, mu_max, k_s))]
    #[allow(clippy::too_many_arguments)]
    fn new(
        k_h: f64,
        alpha: f64,
        k_d: f64,
        y_bs: f64,
        inv_y_ps: f64,
        m_s: f64,
        m_p: f64,
        mu_max: f64,
        k_s: f64,
    ) -> PyResult<Self> {
        let inner = core::ModelParams {
            k_h,
            alpha,
            k_d,
            y_bs,
            inv_y_ps,
            m_s,
            m_p,
            growth: GrowthLaw::monod(mu_max, k_s),
        };
        inner.check().map_err(to_py)?;
        Ok(PyParams { inner })
    }

    #[staticmethod]
    fn baseline() -> Self {
        PyParams {
            inner: presets::baseline_params(),
        }
    }

    #[staticmethod]
    fn product_validation() -> Self {
        PyParams {
            inner: presets::product_validation_params(),
        }
    }

    /// Baseline constants with `mu_max = 0.2` and the given mortality rate.
    #[staticmethod]
    fn mortality_sweep(k_d: f64) -> PyResult<Self> {
        let inner = presets::mortality_sweep_params(k_d);
        inner.check().map_err(to_py)?;
        Ok(PyParams { inner })
    }

    #[getter]
    fn k_h(&self) -> f64 {
        self.inner.k_h
    }
    #[getter]
    fn alpha(&self) -> f64 {
        self.inner.alpha
    }
    #[getter]
    fn k_d(&self) -> f64 {
        self.inner.k_d
    }
    #[getter]
    fn y_bs(&self) -> f64 {
        self.inner.y_bs
    }
    #[getter]
    fn inv_y_ps(&self) -> f64 {
        self.inner.inv_y_ps
    }
    #[getter]
    fn m_s(&self) -> f64 {
        self.inner.m_s
    }
    #[getter]
    fn m_p(&self) -> f64 {
        self.inner.m_p
    }
    #[getter]
    fn mu_max(&self) -> f64 {
        let GrowthLaw::Monod { mu_max, .. } = self.inner.growth;
        mu_max
    }
    #[getter]
    fn k_s(&self) -> f64 {
        let GrowthLaw::Monod { k_s, .. } = self.inner.growth;
        k_s
    }

    fn growth_rate(&self, s: f64) -> PyResult<f64> {
        self.inner.growth.rate(s).map_err(to_py)
    }

    /// List of `(id, status, message)` for each structural hypothesis.
    fn validate_hypotheses(&self) -> PyResult<Vec<(String, String, String)>> {
        let report = core::validate_hypotheses(&self.inner).map_err(to_py)?;
        Ok(report
            .items
            .into_iter()
            .map(|i| (i.id.to_string(), format!("{:?}", i.status).to_lowercase(), i.message))
            .collect())
    }

    fn __repr__(&self) -> String {
        let p = &self.inner;
        format!(
            "ModelParams(k_h={}, alpha={}, k_d={}, y_bs={}, inv_y_ps={}, m_s={}, m_p={}, mu_max={}, k_s={})",
            p.k_h,
            p.alpha,
            p.k_d,
            p.y_bs,
            p.inv_y_ps,
            p.m_s,
            p.m_p,
            self.mu_max(),
            self.k_s()
        )
    }
}

/// Concentrations `(X, B, s, P)` in g/L.
#[pyclass(name = "State", module = "trichoderma", from_py_object)]
#[derive(Clone, Copy)]
pub struct PyState {
    inner: core::State,
}

#[pymethods]
impl PyState {
    #[new]
    fn new(x: f64, b: f64, s: f64, p: f64) -> PyResult<Self> {
        let inner = core::State::new(x, b, s, p);
        inner.check_non_negative().map_err(to_py)?;
        Ok(PyState { inner })
    }

    #[staticmethod]
    fn baseline() -> Self {
        PyState {
            inner: presets::baseline_initial(),
        }
    }

    #[staticmethod]
    fn product_validation() -> Self {
        PyState {
            inner: presets::product_validation_initial(),
        }
    }

    #[getter]
    fn x(&self) -> f64 {
        self.inner.x
    }
    #[getter]
    fn b(&self) -> f64 {
        self.inner.b
    }
    #[getter]
    fn s(&self) -> f64 {
        self.inner.s
    }
    #[getter]
    fn p(&self) -> f64 {
        self.inner.p
    }

    fn as_tuple(&self) -> (f64, f64, f64, f64) {
        (self.inner.x, self.inner.b, self.inner.s, self.inner.p)
    }

    fn __repr__(&self) -> String {
        let s = &self.inner;
        format!("State(x={}, b={}, s={}, p={})", s.x, s.b, s.s, s.p)
    }
}

/// Vector field at `state`, as a `State`-shaped tuple of rates.
#[pyfunction]
fn rhs(state: &PyState, params: &PyParams) -> (f64, f64, f64, f64) {
    let d = core::rhs(&state.inner, &params.inner);
    (d.x, d.b, d.s, d.p)
}

/// Integrates with fixed-step RK4. Returns a dict of columns `t, X, B, s, P`
/// plus `steady_state_reached` and `t_final`.
#[pyfunction]
#[pyo3(signature = (params, initial, step = 0.01, t_end = 2000.0, record_stride = None))]
fn simulate<'py>(
    py: Python<'py>,
    params: &PyParams,
    initial: &PyState,
    step: f64,
    t_end: f64,
    record_stride: Option<usize>,
) -> PyResult<Bound<'py, PyDict>> {
    let mut cfg = core::SimulationConfig::new(initial.inner)
        .with_step(step)
        .with_horizon(t_end);
    cfg.record_stride = record_stride;
    let traj = py
        .detach(|| core::integrate(&cfg, &params.inner))
        .map_err(to_py)?;
    let out = PyDict::new(py);
    out.set_item("t", &traj.times)?;
    out.set_item("X", traj.states.iter().map(|s| s.x).collect::<Vec<_>>())?;
    out.set_item("B", traj.states.iter().map(|s| s.b).collect::<Vec<_>>())?;
    out.set_item("s", traj.states.iter().map(|s| s.s).collect::<Vec<_>>())?;
    out.set_item("P", traj.states.iter().map(|s| s.p).collect::<Vec<_>>())?;
    out.set_item("steady_state_reached", traj.steady_state_reached)?;
    out.set_item("t_final", traj.t_final)?;
    Ok(out)
}

/// Right endpoint of the attractor interval; `inf` when `k_d >= mu_max`.
#[pyfunction]
fn attractor_interval(params: &PyParams) -> f64 {
    core::attractor_interval(&params.inner).value().unwrap_or(f64::INFINITY)
}

#[pyfunction]
fn lyapunov_z(state: &PyState, params: &PyParams) -> PyResult<f64> {
    core::lyapunov_z(&state.inner, &params.inner).map_err(to_py)
}

#[pyfunction]
fn lyapunov_z_derivative(state: &PyState, params: &PyParams) -> PyResult<f64> {
    core::lyapunov_z_derivative(&state.inner, &params.inner).map_err(to_py)
}

/// Closed-form limit quantities for a run that settles at `s_star`.
#[pyfunction]
fn predict_limits<'py>(
    py: Python<'py>,
    initial: &PyState,
    params: &PyParams,
    s_star: f64,
) -> PyResult<Bound<'py, PyDict>> {
    let p = core::predict_limits(&initial.inner, &params.inner, s_star).map_err(to_py)?;
    let out = PyDict::new(py);
    out.set_item("s_star", p.s_star)?;
    out.set_item("lambda", p.lambda.value().unwrap_or(f64::INFINITY))?;
    out.set_item("s_star_upper_bound", p.s_star_upper_bound)?;
    out.set_item("a", p.a)?;
    out.set_item("b", p.b)?;
    out.set_item("p_star", p.p_star)?;
    out.set_item("int_b", p.int_b)?;
    out.set_item("int_mub", p.int_mub)?;
    Ok(out)
}

/// Eigenvalues of the original system at `(0, 0, s*, P*)` and their residuals.
#[pyfunction]
fn equilibrium_eigenvalues(s_star: f64, params: &PyParams) -> PyResult<(Vec<f64>, Vec<f64>)> {
    let rep = core::equilibrium_eigenvalues(s_star, &params.inner).map_err(to_py)?;
    Ok((rep.eigenvalues.to_vec(), rep.residuals.to_vec()))
}

/// Eigenvalues `[r1, r1, r2, r3]` of the transformed system and their residuals.
#[pyfunction]
fn transformed_eigenvalues(s_star: f64, p_star: f64, params: &PyParams) -> PyResult<(Vec<f64>, Vec<f64>)> {
    let ctx = core::build_transform(s_star, p_star, &params.inner).map_err(to_py)?;
    let rep = core::transformed_eigenvalues(&ctx, &params.inner);
    Ok((rep.eigenvalues.to_vec(), rep.residuals.to_vec()))
}

#[pymodule]
fn trichoderma(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyParams>()?;
    m.add_class::<PyState>()?;
    m.add_function(wrap_pyfunction!(rhs, m)?)?;
    m.add_function(wrap_pyfunction!(simulate, m)?)?;
    m.add_function(wrap_pyfunction!(attractor_interval, m)?)?;
    m.add_function(wrap_pyfunction!(lyapunov_z, m)?)?;
    m.add_function(wrap_pyfunction!(lyapunov_z_derivative, m)?)?;
    m.add_function(wrap_pyfunction!(predict_limits, m)?)?;
    m.add_function(wrap_pyfunction!(equilibrium_eigenvalues, m)?)?;
    m.add_function(wrap_pyfunction!(transformed_eigenvalues, m)?)?;
    Ok(())
}
