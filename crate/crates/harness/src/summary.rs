use serde::Serialize;
use trichoderma_core::{
    integrate, predict_limits, trajectory_integrals, validate_hypotheses, LimitPrediction, Trajectory,
};

use crate::error::{HarnessError, Result};
use crate::scenario::{Scenario, SimOverrides};

/// Relative agreement required between the predicted and simulated `P*`.
pub const CLOSURE_TOL: f64 = 5e-3;

/// Per-scenario result record: simulated limits next to the closed-form
/// predictions, plus the pass/fail outcome of each theory check.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunSummary {
    pub name: String,
    pub s_star: f64,
    pub p_star: f64,
    pub x_final: f64,
    pub b_final: f64,
    pub b_max: f64,
    pub s_max: f64,
    pub t_final: f64,
    /// time at which steady state was declared, if it was
    pub t_converged: Option<f64>,
    pub p_star_predicted: Option<f64>,
    pub closure_rel_error: Option<f64>,
    pub lambda: Option<f64>,
    pub s_star_upper_bound: Option<f64>,
    pub int_b: f64,
    pub int_b_predicted: Option<f64>,
    pub int_mub: f64,
    pub int_mub_predicted: Option<f64>,
    pub bound_ok: bool,
    pub membership_ok: bool,
    pub closure_ok: bool,
    pub hypothesis_warnings: String,
}

#[derive(Debug, Clone)]
pub struct ScenarioRun {
    pub scenario: Scenario,
    pub trajectory: Trajectory,
    pub prediction: Option<LimitPrediction>,
    pub summary: RunSummary,
}

/// Integrates a scenario and evaluates every analysis quantity on the result.
pub fn run_scenario(scenario: &Scenario, overrides: &SimOverrides) -> Result<ScenarioRun> {
    let sim_err = |source| HarnessError::Simulation {
        name: scenario.name.clone(),
        source,
    };
    let params = &scenario.params;
    let config = scenario.config(overrides);
    params
        .check()
        .and_then(|_| config.validate())
        .map_err(|e| HarnessError::Validation(format!("scenario {}: {e}", scenario.name)))?;
    let trajectory = integrate(&config, params).map_err(sim_err)?;
    let report = validate_hypotheses(params).map_err(sim_err)?;

    let end = trajectory.final_state();
    let mut warnings: Vec<String> = report.warnings().map(|w| w.message.clone()).collect();
    let prediction = match predict_limits(&config.initial, params, end.s) {
        Ok(p) => Some(p),
        Err(e) => {
            warnings.push(e.to_string());
            None
        }
    };
    if !trajectory.steady_state_reached {
        warnings.push(format!("steady state not reached by t = {} h", trajectory.t_final));
    }
    let (int_b, int_mub) = trajectory_integrals(&trajectory, params);

    let p_star_predicted = prediction.map(|p| p.p_star);
    let closure_rel_error = p_star_predicted.map(|pred| rel_error(pred, end.p));
    let closure_ok = p_star_predicted.is_some_and(|pred| (pred - end.p).abs() <= CLOSURE_TOL * end.p.abs() + 1e-9);
    let bound = prediction.and_then(|p| p.s_star_upper_bound);
    if prediction.is_some() && bound.is_none() {
        warnings.push("s* upper bound unavailable for alpha = 0".into());
    }
    let lambda = trichoderma_core::attractor_interval(params);

    let summary = RunSummary {
        name: scenario.name.clone(),
        s_star: end.s,
        p_star: end.p,
        x_final: end.x,
        b_final: end.b,
        b_max: trajectory.max_of(|s| s.b),
        s_max: trajectory.max_of(|s| s.s),
        t_final: trajectory.t_final,
        t_converged: trajectory.steady_state_reached.then_some(trajectory.t_final),
        p_star_predicted,
        closure_rel_error,
        lambda: lambda.value(),
        s_star_upper_bound: bound,
        int_b,
        int_b_predicted: prediction.map(|p| p.int_b),
        int_mub,
        int_mub_predicted: prediction.map(|p| p.int_mub),
        bound_ok: bound.is_some_and(|ub| end.s <= ub),
        membership_ok: lambda.contains(end.s),
        closure_ok,
        hypothesis_warnings: warnings.join("; "),
    };
    Ok(ScenarioRun {
        scenario: scenario.clone(),
        trajectory,
        prediction,
        summary,
    })
}

/// `|a - b| / |b|`, or the absolute gap when `b` is zero.
pub fn rel_error(a: f64, b: f64) -> f64 {
    if b == 0.0 {
        (a - b).abs()
    } else {
        (a - b).abs() / b.abs()
    }
}
