//! Fixed-step classical Runge-Kutta integration of the model.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kinetics::{rhs, ModelParams, State};

/// Upper bound on the number of samples kept when no stride is given.
pub const MAX_SAMPLES: usize = 100_000;

pub const DEFAULT_STEP: f64 = 0.01;
pub const DEFAULT_HORIZON: f64 = 2000.0;
pub const DEFAULT_STEADY_TOL: f64 = 1e-10;
pub const DEFAULT_BIOMASS_FLOOR: f64 = 1e-9;
pub const DEFAULT_CLAMP_EPS: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimulationConfig {
    pub initial: State,
    /// step size (h)
    pub step: f64,
    /// horizon (h)
    pub t_end: f64,
    /// keep one sample every `record_stride` steps; `None` picks the smallest
    /// stride that keeps at most [`MAX_SAMPLES`] samples
    pub record_stride: Option<usize>,
    /// infinity-norm threshold on the derivative for steady state
    pub steady_tol: f64,
    /// biomass below which the population counts as extinct (g/L)
    pub biomass_floor: f64,
    /// negative overshoot smaller than this is clamped to zero
    pub clamp_eps: f64,
}

impl SimulationConfig {
    pub fn new(initial: State) -> Self {
        SimulationConfig {
            initial,
            step: DEFAULT_STEP,
            t_end: DEFAULT_HORIZON,
            record_stride: None,
            steady_tol: DEFAULT_STEADY_TOL,
            biomass_floor: DEFAULT_BIOMASS_FLOOR,
            clamp_eps: DEFAULT_CLAMP_EPS,
        }
    }

    pub fn with_step(mut self, step: f64) -> Self {
        self.step = step;
        self
    }

    pub fn with_horizon(mut self, t_end: f64) -> Self {
        self.t_end = t_end;
        self
    }

    pub fn with_stride(mut self, stride: usize) -> Self {
        self.record_stride = Some(stride);
        self
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("step", self.step),
            ("t_end", self.t_end),
            ("steady_tol", self.steady_tol),
            ("biomass_floor", self.biomass_floor),
            ("clamp_eps", self.clamp_eps),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidConfig(format!("{name} = {v} must be positive")));
            }
        }
        if self.record_stride == Some(0) {
            return Err(Error::InvalidConfig("record_stride must be at least 1".into()));
        }
        self.initial.check_non_negative()
    }

    /// Number of steps needed to reach `t_end`; the last one may be shorter.
    pub fn step_count(&self) -> usize {
        (self.t_end / self.step - 1e-9).ceil().max(1.0) as usize
    }

    fn stride(&self) -> usize {
        self.record_stride
            .unwrap_or_else(|| self.step_count().div_ceil(MAX_SAMPLES - 1).max(1))
    }
}

/// Recorded time series of a simulation.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<State>,
    /// the run stopped because the derivative vanished with the biomass extinct
    pub steady_state_reached: bool,
    pub t_final: f64,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn final_state(&self) -> State {
        *self.states.last().expect("trajectory always holds the initial state")
    }

    pub fn samples(&self) -> impl Iterator<Item = (f64, &State)> + '_ {
        self.times.iter().copied().zip(self.states.iter())
    }

    /// Maximum of a scalar observable over the recorded samples.
    pub fn max_of(&self, f: impl Fn(&State) -> f64) -> f64 {
        self.states.iter().map(f).fold(f64::NEG_INFINITY, f64::max)
    }

    /// Trapezoid rule over the recorded samples.
    pub fn integrate_observable(&self, f: impl Fn(&State) -> f64) -> f64 {
        let mut total = 0.0;
        let mut prev: Option<(f64, f64)> = None;
        for (t, st) in self.samples() {
            let v = f(st);
            if let Some((t0, v0)) = prev {
                total += 0.5 * (t - t0) * (v0 + v);
            }
            prev = Some((t, v));
        }
        total
    }
}

/// One classical RK4 step for an autonomous system, reusing a precomputed
/// slope at the start point.
#[inline]
pub fn rk4_step_with<const N: usize, E>(
    y: &[f64; N],
    k1: &[f64; N],
    h: f64,
    mut f: impl FnMut(&[f64; N]) -> Result<[f64; N], E>,
) -> Result<[f64; N], E> {
    let shift = |base: &[f64; N], k: &[f64; N], c: f64| {
        let mut out = *base;
        for (o, ki) in out.iter_mut().zip(k) {
            *o += c * ki;
        }
        out
    };
    let k2 = f(&shift(y, k1, 0.5 * h))?;
    let k3 = f(&shift(y, &k2, 0.5 * h))?;
    let k4 = f(&shift(y, &k3, h))?;
    let mut out = *y;
    for i in 0..N {
        out[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    Ok(out)
}

/// One classical RK4 step.
#[inline]
pub fn rk4_step<const N: usize>(y: &[f64; N], h: f64, f: impl Fn(&[f64; N]) -> [f64; N]) -> [f64; N] {
    let k1 = f(y);
    let r: Result<_, std::convert::Infallible> = rk4_step_with(y, &k1, h, |v| Ok(f(v)));
    match r {
        Ok(v) => v,
    }
}

fn model_field(params: &ModelParams) -> impl Fn(&[f64; 4]) -> [f64; 4] + '_ {
    move |v| rhs(&State::from_array(*v), params).to_array()
}

/// Integrates from `config.initial` until `t_end` or until steady state.
///
/// Steady state requires both `|rhs|_inf < steady_tol` and `B < biomass_floor`.
/// Components that overshoot below zero by less than `clamp_eps` are clamped;
/// anything more negative aborts with [`Error::StepTooLarge`].
pub fn integrate(config: &SimulationConfig, params: &ModelParams) -> Result<Trajectory> {
    config.validate()?;
    params.check()?;

    let n_steps = config.step_count();
    let stride = config.stride();
    let h = config.step;
    let field = model_field(params);

    let cap = (n_steps / stride + 2).min(MAX_SAMPLES + 2);
    let mut times = Vec::with_capacity(cap);
    let mut states = Vec::with_capacity(cap);

    let mut y = config.initial.to_array();
    let mut t = 0.0;
    times.push(t);
    states.push(config.initial);

    let is_steady = |y: &[f64; 4], k: &[f64; 4]| {
        y[1] < config.biomass_floor && k.iter().all(|d| d.abs() < config.steady_tol)
    };

    let mut steady = false;
    let mut last_recorded = true;
    for i in 0..n_steps {
        let k1 = field(&y);
        if is_steady(&y, &k1) {
            steady = true;
            break;
        }
        let last = i + 1 == n_steps;
        let dt = if last { config.t_end - i as f64 * h } else { h };
        let r: Result<_, std::convert::Infallible> = rk4_step_with(&y, &k1, dt, |v| Ok(field(v)));
        let Ok(next) = r;
        y = next;
        t = if last { config.t_end } else { (i + 1) as f64 * h };

        if y.iter().any(|c| !c.is_finite()) {
            return Err(Error::NonFinite { t });
        }
        if let Some(i) = y.iter().position(|&c| c < -config.clamp_eps) {
            return Err(classify_negative(&y, i, t, &field));
        }
        for c in y.iter_mut() {
            if *c < 0.0 {
                *c = 0.0;
            }
        }

        last_recorded = (i + 1) % stride == 0 || last;
        if last_recorded {
            times.push(t);
            states.push(State::from_array(y));
        }
        if last && !steady {
            steady = is_steady(&y, &field(&y));
        }
    }
    if !last_recorded {
        times.push(t);
        states.push(State::from_array(y));
    }

    Ok(Trajectory {
        times,
        states,
        steady_state_reached: steady,
        t_final: t,
    })
}

/// A component went negative. If the exact field on the boundary points
/// outward the model itself leaves the orthant; otherwise the step overshot.
fn classify_negative(y: &[f64; 4], i: usize, t: f64, field: impl Fn(&[f64; 4]) -> [f64; 4]) -> Error {
    let boundary = y.map(|c| c.max(0.0));
    let rate = field(&boundary)[i];
    let component = State::COMPONENTS[i];
    if rate < 0.0 {
        Error::LeavesNonNegativeOrthant {
            component,
            boundary_rate: rate,
            t,
        }
    } else {
        Error::StepTooLarge {
            component,
            value: y[i],
            t,
        }
    }
}

/// Plain RK4 propagation over `n_steps` steps of size `h`, without clamping,
/// recording or stop conditions.
pub fn propagate(initial: &State, params: &ModelParams, h: f64, n_steps: usize) -> State {
    let field = model_field(params);
    let mut y = initial.to_array();
    for _ in 0..n_steps {
        y = rk4_step(&y, h, &field);
    }
    State::from_array(y)
}

/// Observed order of accuracy from runs with steps `h`, `h/2` and `h/4`:
/// `log2(|y_h - y_{h/2}| / |y_{h/2} - y_{h/4}|)` at `t_check`.
pub fn convergence_order(config: &SimulationConfig, params: &ModelParams, t_check: f64) -> Result<f64> {
    config.validate()?;
    params.check()?;
    let h = config.step;
    if !(t_check > 0.0 && t_check <= config.t_end) {
        return Err(Error::InvalidConfig(format!(
            "t_check = {t_check} must lie in (0, t_end = {}]",
            config.t_end
        )));
    }
    let quarters = t_check / (4.0 * h);
    if (quarters - quarters.round()).abs() > 1e-9 * quarters.max(1.0) {
        return Err(Error::InvalidConfig(format!(
            "t_check = {t_check} is not a multiple of 4h = {}",
            4.0 * h
        )));
    }
    let n = (t_check / h).round() as usize;
    let coarse = propagate(&config.initial, params, h, n).to_array();
    let mid = propagate(&config.initial, params, h / 2.0, 2 * n).to_array();
    let fine = propagate(&config.initial, params, h / 4.0, 4 * n).to_array();

    let diff = |a: &[f64; 4], b: &[f64; 4]| a.iter().zip(b).fold(0.0_f64, |m, (x, y)| m.max((x - y).abs()));
    let d_coarse = diff(&coarse, &mid);
    let d_fine = diff(&mid, &fine);
    let order = (d_coarse / d_fine).log2();
    if !order.is_finite() || d_fine == 0.0 {
        return Err(Error::OrderUndetermined {
            coarse: d_coarse,
            fine: d_fine,
        });
    }
    Ok(order)
}
