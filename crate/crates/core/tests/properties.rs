use proptest::prelude::*;
use trichoderma_core::kinetics::{growth_rate, growth_rate_derivative, rhs, GrowthLaw, ModelParams, State};
use trichoderma_core::{lyapunov_z_derivative, presets};

fn params_strategy() -> impl Strategy<Value = ModelParams> {
    (
        0.01..1.0f64,  // K_H
        0.01..0.95f64, // alpha
        0.005..0.2f64, // k_d
        0.1..2.0f64,   // Y_Bs
        0.0..2.0f64,   // inv_Y_Ps
        0.0..0.05f64,  // m_s
        0.0..0.05f64,  // m_P
        0.05..1.0f64,  // mu_max
        0.5..50.0f64,  // k_s
    )
        .prop_map(|(k_h, alpha, k_d, y_bs, inv_y_ps, m_s, m_p, mu_max, k_s)| ModelParams {
            k_h,
            alpha,
            k_d,
            y_bs,
            inv_y_ps,
            m_s,
            m_p,
            growth: GrowthLaw::monod(mu_max, k_s),
        })
}

fn state_strategy() -> impl Strategy<Value = State> {
    (0.0..400.0f64, 0.0..100.0f64, 0.0..200.0f64, 0.0..100.0f64).prop_map(|(x, b, s, p)| State::new(x, b, s, p))
}

/// Centered difference of the public rate, stepping only inside `s >= 0`.
fn fd_derivative(law: &GrowthLaw, s: f64, k_s: f64) -> f64 {
    let h = (1e-4 * (k_s + s)).min(0.5 * s);
    (growth_rate(law, s + h).unwrap() - growth_rate(law, s - h).unwrap()) / (2.0 * h)
}

proptest! {
    #[test]
    fn derivative_matches_finite_difference(mu_max in 0.01..2.0f64, k_s in 0.1..100.0f64, s in 1e-3..1e4f64) {
        let law = GrowthLaw::monod(mu_max, k_s);
        let exact = growth_rate_derivative(&law, s).unwrap();
        let fd = fd_derivative(&law, s, k_s);
        prop_assert!((exact - fd).abs() <= 1e-6 * exact.abs(), "s={s}: {exact} vs {fd}");
    }

    #[test]
    fn monod_is_positive_bounded_and_monotone(mu_max in 0.01..2.0f64, k_s in 0.1..100.0f64, s in 1e-9..1e6f64, ds in 0.0..100.0f64) {
        let law = GrowthLaw::monod(mu_max, k_s);
        let r = growth_rate(&law, s).unwrap();
        prop_assert!(r > 0.0);
        prop_assert!(r < mu_max);
        prop_assert!(growth_rate(&law, s + ds).unwrap() >= r);
    }

    #[test]
    fn equilibrium_plane_is_stationary(params in params_strategy(), s in 0.0..1e3f64, p in 0.0..1e3f64) {
        let d = rhs(&State::new(0.0, 0.0, s, p), &params);
        prop_assert_eq!(d.max_abs(), 0.0);
    }

    #[test]
    fn organic_matter_decays_without_biomass(params in params_strategy(), x in 0.0..1e3f64, s in 0.0..1e3f64) {
        let d = rhs(&State::new(x, 0.0, s, 1.0), &params);
        prop_assert!(d.x <= 0.0);
        prop_assert_eq!(d.x, -params.k_h * x);
    }

    #[test]
    fn organic_plus_substrate_balance(params in params_strategy(), st in state_strategy()) {
        let d = rhs(&st, &params);
        let mu = params.growth_rate(st.s);
        let expected = (params.alpha * params.k_d - params.m_s - mu / params.y_bs) * st.b;
        let scale = params.k_h * st.x + expected.abs() + params.alpha * params.k_d * st.b;
        prop_assert!((d.x + d.s - expected).abs() <= 1e-12 * scale.max(f64::MIN_POSITIVE));
    }

    #[test]
    fn z_derivative_is_chain_rule(params in params_strategy(), st in state_strategy()) {
        let d = rhs(&st, &params);
        let wx = 1.0 + params.m_s * params.y_bs / params.k_d;
        let chain = wx * d.x + params.alpha * d.b + params.alpha * params.y_bs * d.s;
        let closed = lyapunov_z_derivative(&st, &params).unwrap();
        let scale = wx * d.x.abs() + params.alpha * d.b.abs() + params.alpha * params.y_bs * d.s.abs();
        prop_assert!((chain - closed).abs() <= 1e-12 * scale.max(f64::MIN_POSITIVE), "{chain} vs {closed}");
    }

    #[test]
    fn product_rate_is_non_negative(params in params_strategy(), st in state_strategy()) {
        prop_assert!(rhs(&st, &params).p >= 0.0);
    }
}

#[test]
fn derivative_at_saturation_vanishes() {
    let law = presets::baseline_params().growth;
    assert!(growth_rate_derivative(&law, 1e9).unwrap() < 1e-17);
}
