//! Published parameter sets and initial conditions.

use crate::kinetics::{GrowthLaw, ModelParams, State};

/// Growth/hydrolysis reference set (cellulose fermentation data).
pub fn baseline_params() -> ModelParams {
    ModelParams {
        k_h: 0.176,
        alpha: 0.2,
        k_d: 0.048,
        y_bs: 1.19,
        inv_y_ps: 0.2,
        m_s: 0.0047,
        m_p: 0.002,
        growth: GrowthLaw::monod(0.096, 11.27),
    }
}

pub fn baseline_initial() -> State {
    State::new(45.0, 15.0, 50.0, 0.0)
}

/// Product-formation reference set. The source tables give no mortality
/// rate for this set; the baseline `k_d = 0.048` is used.
pub fn product_validation_params() -> ModelParams {
    ModelParams {
        growth: GrowthLaw::monod(0.2, 35.55),
        ..baseline_params()
    }
}

pub fn product_validation_initial() -> State {
    State::new(17.0, 5.0, 9.5, 1.5)
}

/// Initial organic matter levels of the organic-matter sweep.
pub const X0_SWEEP: [f64; 4] = [45.0, 90.0, 180.0, 360.0];

/// Mortality rates of the mortality sweep (run with `mu_max = 0.2`).
pub const KD_SWEEP: [f64; 4] = [0.03, 0.09, 0.12, 0.18];

pub const KD_SWEEP_MU_MAX: f64 = 0.2;

/// Baseline parameters with `mu_max = 0.2` and the given mortality rate.
pub fn mortality_sweep_params(k_d: f64) -> ModelParams {
    let mut p = baseline_params();
    let GrowthLaw::Monod { k_s, .. } = p.growth;
    p.growth = GrowthLaw::monod(KD_SWEEP_MU_MAX, k_s);
    p.k_d = k_d;
    p
}
