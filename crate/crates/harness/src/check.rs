//! The acceptance suite. Each criterion is a function returning a
//! [`CriterionResult`]; the expensive scenario runs are shared through
//! [`PaperRuns`].

use std::fmt;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use trichoderma_core::analysis::{char_poly_residual, transformed_jacobian};
use trichoderma_core::integrator::propagate;
use trichoderma_core::{
    build_transform, convergence_order, equilibrium_eigenvalues, growth_rate, integrate, integrate_transformed,
    lyapunov_z, presets, transformed_eigenvalues, Error, ModelParams, SimulationConfig, State,
};

use crate::error::Result;
use crate::scenario::{builtin_scenario, SimOverrides};
use crate::summary::{rel_error, run_scenario, ScenarioRun};

/// Published limits per initial organic matter: (X0, s*, P*).
pub const X0_LIMITS: [(f64, f64, f64); 4] = [
    (45.0, 1.1745, 31.8399),
    (90.0, 1.1761, 46.5702),
    (180.0, 1.1766, 76.0315),
    (360.0, 1.1766, 134.9544),
];

/// Published extrema and limits per mortality rate: (k_d, B_max, s_max, P*, s*).
pub const KD_EXTREMA: [(f64, f64, f64, f64, f64); 4] = [
    (0.03, 96.6588, 61.2420, 32.9487, 0.1629),
    (0.09, 57.1921, 63.5208, 30.9508, 1.7971),
    (0.12, 38.8395, 65.0240, 30.3268, 3.0865),
    (0.18, 15.0, 69.1788, 24.6089, 20.4477),
];

/// Seed and sample count of the randomized positivity suite.
pub const PROPERTY_SEED: u64 = 20_240_517;
pub const PROPERTY_SAMPLES: usize = 100;
pub const PROPERTY_HORIZON: f64 = 500.0;

#[derive(Debug, Clone)]
pub struct CriterionResult {
    pub id: u8,
    pub title: &'static str,
    pub passed: bool,
    pub details: Vec<String>,
}

impl CriterionResult {
    fn new(id: u8, title: &'static str) -> Self {
        CriterionResult {
            id,
            title,
            passed: true,
            details: Vec::new(),
        }
    }

    /// Records a measured value; a false `ok` fails the criterion.
    fn expect(&mut self, ok: bool, detail: String) {
        if !ok {
            self.passed = false;
        }
        self.details.push(format!("{} {detail}", if ok { "ok  " } else { "FAIL" }));
    }
}

impl fmt::Display for CriterionResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "criterion {} [{verdict}] {}", self.id, self.title)
    }
}

/// The table scenarios plus validation-2, run once at the default settings.
pub struct PaperRuns {
    pub x0: Vec<ScenarioRun>,
    pub kd: Vec<ScenarioRun>,
    pub validation2: ScenarioRun,
    pub x0_elapsed: Duration,
}

impl PaperRuns {
    pub fn compute(overrides: &SimOverrides) -> Result<Self> {
        let start = Instant::now();
        let x0 = run_named(X0_LIMITS.iter().map(|r| format!("x0-{}", r.0)).collect(), overrides)?;
        let x0_elapsed = start.elapsed();
        let kd = run_named(KD_EXTREMA.iter().map(|r| format!("kd-{}", r.0)).collect(), overrides)?;
        let validation2 = run_scenario(&builtin_scenario("validation-2").unwrap(), overrides)?;
        Ok(PaperRuns {
            x0,
            kd,
            validation2,
            x0_elapsed,
        })
    }

    pub fn all(&self) -> impl Iterator<Item = &ScenarioRun> {
        self.x0.iter().chain(&self.kd).chain(std::iter::once(&self.validation2))
    }
}

fn run_named(names: Vec<String>, overrides: &SimOverrides) -> Result<Vec<ScenarioRun>> {
    names
        .par_iter()
        .map(|n| run_scenario(&builtin_scenario(n).expect("built-in"), overrides))
        .collect()
}

fn within(value: f64, target: f64, rel: f64) -> bool {
    (value - target).abs() <= rel * target.abs()
}

pub fn table5_reproduction(runs: &PaperRuns) -> CriterionResult {
    let mut r = CriterionResult::new(1, "limits for X0 in {45, 90, 180, 360} match the published table");
    for (run, &(x0, s_ref, p_ref)) in runs.x0.iter().zip(&X0_LIMITS) {
        let s = &run.summary;
        r.expect(
            within(s.s_star, s_ref, 0.01) && within(s.p_star, p_ref, 0.01),
            format!("X0={x0}: s*={:.4} (ref {s_ref}), P*={:.4} (ref {p_ref})", s.s_star, s.p_star),
        );
        r.expect(
            s.x_final < 1e-6 && s.b_final < 1e-6,
            format!("X0={x0}: X_final={:.3e}, B_final={:.3e}", s.x_final, s.b_final),
        );
    }
    r.expect(
        runs.x0_elapsed < Duration::from_secs(10),
        format!("runtime {:.2} s for the four runs", runs.x0_elapsed.as_secs_f64()),
    );
    r
}

pub fn table6_reproduction(runs: &PaperRuns) -> CriterionResult {
    let mut r = CriterionResult::new(2, "extrema and limits for k_d in {0.03, 0.09, 0.12, 0.18} match the published table");
    for (run, &(k_d, bmax, smax, p_ref, s_ref)) in runs.kd.iter().zip(&KD_EXTREMA) {
        let s = &run.summary;
        let s_ok = (s.s_star - s_ref).abs() <= (0.02 * s_ref).max(0.01);
        r.expect(
            within(s.b_max, bmax, 0.01) && within(s.s_max, smax, 0.01) && within(s.p_star, p_ref, 0.01) && s_ok,
            format!(
                "k_d={k_d}: B_max={:.4} ({bmax}), s_max={:.4} ({smax}), P*={:.4} ({p_ref}), s*={:.4} ({s_ref})",
                s.b_max, s.s_max, s.p_star, s.s_star
            ),
        );
        if k_d == 0.18 {
            let b0 = run.scenario.initial.b;
            r.expect(s.b_max == b0, format!("k_d=0.18: B_max={} equals B0={b0}", s.b_max));
        }
    }
    r
}

pub fn limit_closure(runs: &PaperRuns) -> CriterionResult {
    let mut r = CriterionResult::new(3, "predicted P* from simulated s* agrees with simulated P* within 0.5%");
    for run in runs.all() {
        let s = &run.summary;
        r.expect(
            s.closure_ok,
            format!(
                "{}: predicted {:?} vs simulated {:.6} (rel {:.2e})",
                s.name,
                s.p_star_predicted,
                s.p_star,
                s.closure_rel_error.unwrap_or(f64::NAN)
            ),
        );
    }
    r
}

pub fn bound_and_membership(runs: &PaperRuns) -> CriterionResult {
    let mut r = CriterionResult::new(4, "s* below the a-priori bound and inside [0, lambda]");
    for run in runs.all() {
        let s = &run.summary;
        r.expect(
            s.bound_ok && s.membership_ok && s.s_star > 0.01,
            format!(
                "{}: s*={:.4} <= bound {:?}, lambda {:?}",
                s.name, s.s_star, s.s_star_upper_bound, s.lambda
            ),
        );
    }
    r
}

pub fn integral_identities(runs: &PaperRuns) -> CriterionResult {
    let mut r = CriterionResult::new(5, "accumulated integrals of B and mu(s)B match the closed forms within 1%");
    for run in runs.all() {
        let s = &run.summary;
        let ok = |sim: f64, pred: Option<f64>| pred.is_some_and(|p| within(sim, p, 0.01));
        r.expect(
            ok(s.int_b, s.int_b_predicted) && ok(s.int_mub, s.int_mub_predicted),
            format!(
                "{}: int B = {:.4} ({:?}), int muB = {:.4} ({:?})",
                s.name, s.int_b, s.int_b_predicted, s.int_mub, s.int_mub_predicted
            ),
        );
    }
    r
}

/// Parameter sets used by the randomized suite.
pub fn property_param_sets() -> Vec<(String, ModelParams)> {
    let mut sets = vec![
        ("validation-1".to_string(), presets::baseline_params()),
        ("validation-2".to_string(), presets::product_validation_params()),
    ];
    for k_d in presets::KD_SWEEP {
        sets.push((format!("kd-{k_d}"), presets::mortality_sweep_params(k_d)));
    }
    sets
}

/// Initial conditions drawn uniformly from X0 in [0,400], B0 in [0,50],
/// s0 in [0,100], P0 in [0,50].
pub fn property_initial_states(seed: u64, n: usize) -> Vec<State> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            State::new(
                rng.random_range(0.0..=400.0),
                rng.random_range(0.0..=50.0),
                rng.random_range(0.0..=100.0),
                rng.random_range(0.0..=50.0),
            )
        })
        .collect()
}

#[derive(Debug, Clone, Default)]
struct PropertyTally {
    runs: usize,
    orthant_exits: Vec<String>,
    other_errors: Vec<String>,
    negative: usize,
    p_decrease: usize,
    z_increase: usize,
}

fn property_run(name: &str, params: &ModelParams, init: State, clamp_eps: f64) -> PropertyTally {
    let mut t = PropertyTally {
        runs: 1,
        ..Default::default()
    };
    let cfg = SimulationConfig::new(init).with_horizon(PROPERTY_HORIZON).with_stride(1);
    let traj = match integrate(&cfg, params) {
        Ok(traj) => traj,
        Err(e @ Error::LeavesNonNegativeOrthant { .. }) => {
            t.orthant_exits.push(format!("{name} {:?}: {e}", init.to_array()));
            return t;
        }
        Err(e) => {
            t.other_errors.push(format!("{name} {:?}: {e}", init.to_array()));
            return t;
        }
    };
    let mut prev: Option<(f64, f64)> = None;
    for st in &traj.states {
        if st.to_array().iter().any(|&v| v < -clamp_eps) {
            t.negative += 1;
        }
        let z = lyapunov_z(st, params).unwrap_or(f64::NAN);
        if let Some((pz, pp)) = prev {
            if z - pz > 1e-9 {
                t.z_increase += 1;
            }
            if st.p - pp < -1e-9 {
                t.p_decrease += 1;
            }
        }
        prev = Some((z, st.p));
    }
    t
}

pub fn positivity_and_monotonicity() -> CriterionResult {
    let mut r = CriterionResult::new(
        6,
        "random non-negative starts stay non-negative, P nondecreasing, Z nonincreasing",
    );
    let inits = property_initial_states(PROPERTY_SEED, PROPERTY_SAMPLES);
    let clamp_eps = SimulationConfig::new(State::default()).clamp_eps;
    for (name, params) in property_param_sets() {
        let tally = inits
            .par_iter()
            .map(|&init| property_run(&name, &params, init, clamp_eps))
            .reduce(PropertyTally::default, |mut a, b| {
                a.runs += b.runs;
                a.orthant_exits.extend(b.orthant_exits);
                a.other_errors.extend(b.other_errors);
                a.negative += b.negative;
                a.p_decrease += b.p_decrease;
                a.z_increase += b.z_increase;
                a
            });
        r.expect(
            tally.orthant_exits.is_empty()
                && tally.other_errors.is_empty()
                && tally.negative == 0
                && tally.p_decrease == 0
                && tally.z_increase == 0,
            format!(
                "{name}: {} runs, {} left s >= 0, {} other errors, {} negative samples, {} P decreases, {} Z increases",
                tally.runs,
                tally.orthant_exits.len(),
                tally.other_errors.len(),
                tally.negative,
                tally.p_decrease,
                tally.z_increase
            ),
        );
        for msg in tally.orthant_exits.iter().chain(&tally.other_errors).take(10) {
            r.details.push(format!("     e.g. {msg}"));
        }
    }
    r
}

pub fn transform_equivalence() -> CriterionResult {
    let mut r = CriterionResult::new(7, "transformed system reproduces the original trajectory; spectrum at equilibrium");
    let p = presets::baseline_params();
    let init = presets::baseline_initial();
    let traj = match integrate(&SimulationConfig::new(init).with_stride(1), &p) {
        Ok(t) => t,
        Err(e) => {
            r.expect(false, format!("baseline integration failed: {e}"));
            return r;
        }
    };
    let limit = traj.final_state();
    let ctx = match build_transform(limit.s, limit.p, &p) {
        Ok(c) => c,
        Err(e) => {
            r.expect(false, format!("transform unavailable: {e}"));
            return r;
        }
    };
    let window = traj.states.iter().take_while(|st| st.b > 1e-6).count();
    let h = traj.times[1] - traj.times[0];
    let start = ctx.to_transformed(&traj.states[0]).expect("B0 > 0");
    match integrate_transformed(&start, &ctx, &p, h, window - 1) {
        Ok(path) => {
            // P0 = 0, so the first sample only gets an absolute roundoff floor
            let mut worst = 0.0_f64;
            let mut ok = true;
            for (ts, orig) in path.iter().zip(&traj.states[..window]) {
                let back = ctx.to_original(ts);
                for (a, b) in [(back.s, orig.s), (back.p, orig.p)] {
                    ok &= (a - b).abs() <= 1e-6 * b.abs() + 1e-12;
                    if b != 0.0 {
                        worst = worst.max((a - b).abs() / b.abs());
                    }
                }
            }
            r.expect(
                ok,
                format!(
                    "{window} samples up to t={:.2} h: worst relative error {worst:.2e}",
                    traj.times[window - 1]
                ),
            );
        }
        Err(e) => r.expect(false, format!("transformed integration failed: {e}")),
    }

    let mu_star = growth_rate(&p.growth, limit.s).unwrap_or(f64::NAN);
    let r1 = p.k_d - mu_star;
    let expected = [r1, r1, -p.k_h, -r1];
    let rep = transformed_eigenvalues(&ctx, &p);
    let j = transformed_jacobian(&ctx, &p);
    let max_res = expected.iter().map(|&e| char_poly_residual(&j, e)).fold(0.0, f64::max);
    r.expect(
        rep.eigenvalues
            .iter()
            .zip(&expected)
            .all(|(a, b)| (a - b).abs() <= 1e-14 * (1.0 + b.abs()))
            && max_res < 1e-10,
        format!(
            "transformed eigenvalues {:?}, max residual {max_res:.2e}",
            rep.eigenvalues
        ),
    );
    match equilibrium_eigenvalues(limit.s, &p) {
        Ok(orig) => r.expect(
            orig.max_residual() < 1e-10,
            format!(
                "original eigenvalues {:?}, max residual {:.2e}",
                orig.eigenvalues,
                orig.max_residual()
            ),
        ),
        Err(e) => r.expect(false, format!("original spectrum failed: {e}")),
    }
    r
}

pub fn integrator_self_test() -> CriterionResult {
    let mut r = CriterionResult::new(8, "RK4 shows fourth-order convergence");
    let p = presets::baseline_params();
    let cfg = SimulationConfig::new(presets::baseline_initial())
        .with_step(0.1)
        .with_horizon(10.0);
    match convergence_order(&cfg, &p, 10.0) {
        Ok(order) => r.expect(
            (3.5..=4.5).contains(&order),
            format!("baseline, h = 0.1/0.05/0.025 to t=10 h: observed order {order:.3}"),
        ),
        Err(e) => r.expect(false, format!("baseline order: {e}")),
    }
    let init = State::new(45.0, 0.0, 50.0, 0.0);
    let t = 20.0;
    let exact = 45.0 * (-p.k_h * t).exp();
    let err = |h: f64| (propagate(&init, &p, h, (t / h).round() as usize).x - exact).abs();
    let errs = [err(0.5), err(0.25), err(0.125)];
    let orders: Vec<f64> = errs.windows(2).map(|w| (w[0] / w[1]).log2()).collect();
    r.expect(
        orders.iter().all(|o| (3.5..=4.5).contains(o)),
        format!(
            "B=0 exact errors {:.3e}, {:.3e}, {:.3e} at h = 0.5/0.25/0.125: orders {orders:.3?}",
            errs[0], errs[1], errs[2]
        ),
    );
    r
}

pub fn biomass_free_oracle() -> CriterionResult {
    let mut r = CriterionResult::new(9, "B=0: X decays exponentially and X+s is conserved");
    let p = presets::baseline_params();
    let init = State::new(45.0, 0.0, 50.0, 0.0);
    let cfg = SimulationConfig::new(init).with_horizon(50.0).with_stride(1);
    match integrate(&cfg, &p) {
        Ok(traj) => {
            let total = init.x + init.s;
            let (mut wx, mut wc) = (0.0_f64, 0.0_f64);
            for (t, st) in traj.samples() {
                wx = wx.max(rel_error(st.x, init.x * (-p.k_h * t).exp()));
                wc = wc.max(rel_error(st.x + st.s, total));
            }
            r.expect(
                wx <= 1e-6 && wc <= 1e-9 && traj.t_final == 50.0,
                format!("t in [0, {}]: X rel error {wx:.2e}, X+s drift {wc:.2e}", traj.t_final),
            );
        }
        Err(e) => r.expect(false, format!("integration failed: {e}")),
    }
    r
}

/// Runs all nine criteria in order.
pub fn run_all(overrides: &SimOverrides) -> Result<Vec<CriterionResult>> {
    let runs = PaperRuns::compute(overrides)?;
    Ok(vec![
        table5_reproduction(&runs),
        table6_reproduction(&runs),
        limit_closure(&runs),
        bound_and_membership(&runs),
        integral_identities(&runs),
        positivity_and_monotonicity(),
        transform_equivalence(),
        integrator_self_test(),
        biomass_free_oracle(),
    ])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn property_sample_is_deterministic_and_in_box() {
        let a = property_initial_states(PROPERTY_SEED, 100);
        assert_eq!(a, property_initial_states(PROPERTY_SEED, 100));
        assert!(a.iter().all(|s| (0.0..=400.0).contains(&s.x)
            && (0.0..=50.0).contains(&s.b)
            && (0.0..=100.0).contains(&s.s)
            && (0.0..=50.0).contains(&s.p)));
    }

    #[test]
    fn verdict_line() {
        let mut r = CriterionResult::new(3, "x");
        assert_eq!(r.to_string(), "criterion 3 [PASS] x");
        r.expect(false, "bad".into());
        assert!(!r.passed);
        assert_eq!(r.details, ["FAIL bad"]);
    }
}
