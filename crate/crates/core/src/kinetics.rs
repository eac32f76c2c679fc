//! Model definition: growth law, kinetic coefficients, state vector and the
//! right-hand side of the organic matter / biomass / substrate / product system
//!
//! ```text
//! dX/dt = -K_H X + alpha k_d B
//! dB/dt = (mu(s) - k_d) B
//! ds/dt = -(mu(s)/Y_Bs + m_s) B + K_H X
//! dP/dt = (inv_Y_Ps mu(s) + m_P) B
//! ```
//!
//! Concentrations are in g/L and time in hours throughout.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Specific growth rate of the biomass as a function of substrate.
///
/// Monod is the only law shipped; new variants must keep `rate(0) = 0`,
/// `rate(s) > 0` for `s > 0` and a continuous derivative.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum GrowthLaw {
    /// `mu(s) = mu_max * s / (k_s + s)`
    Monod {
        /// maximum growth rate (1/h)
        mu_max: f64,
        /// half-saturation constant (g/L)
        k_s: f64,
    },
}

impl GrowthLaw {
    pub fn monod(mu_max: f64, k_s: f64) -> Self {
        GrowthLaw::Monod { mu_max, k_s }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            GrowthLaw::Monod { .. } => "monod",
        }
    }

    /// Growth rate in 1/h. Fails on negative substrate.
    pub fn rate(&self, s: f64) -> Result<f64> {
        check_concentration("s", s)?;
        Ok(self.eval(s))
    }

    /// Derivative of the growth rate with respect to substrate, L/(g h).
    pub fn derivative(&self, s: f64) -> Result<f64> {
        check_concentration("s", s)?;
        Ok(self.eval_derivative(s))
    }

    /// Unchecked evaluation used on the integration hot path.
    #[inline]
    pub(crate) fn eval(&self, s: f64) -> f64 {
        match *self {
            GrowthLaw::Monod { mu_max, k_s } => mu_max * s / (k_s + s),
        }
    }

    #[inline]
    pub(crate) fn eval_derivative(&self, s: f64) -> f64 {
        match *self {
            GrowthLaw::Monod { mu_max, k_s } => {
                let d = k_s + s;
                mu_max * k_s / (d * d)
            }
        }
    }

    /// Supremum of the rate over `s >= 0`.
    pub fn supremum(&self) -> f64 {
        match *self {
            GrowthLaw::Monod { mu_max, .. } => mu_max,
        }
    }

    /// Largest `s` with `rate(s) <= level`, or `None` when the rate never
    /// exceeds `level`.
    pub fn level_crossing(&self, level: f64) -> Option<f64> {
        match *self {
            GrowthLaw::Monod { mu_max, k_s } => {
                if level >= mu_max {
                    None
                } else {
                    Some(level * k_s / (mu_max - level))
                }
            }
        }
    }

    pub fn check(&self) -> Result<()> {
        match *self {
            GrowthLaw::Monod { mu_max, k_s } => {
                positive("mu_max", mu_max)?;
                positive("k_s", k_s)
            }
        }
    }
}

/// Kinetic coefficients of the model.
///
/// `inv_y_ps` stores the tabulated reciprocal `1/Y_{P/s}`: the growth-associated
/// product term is `inv_y_ps * mu(s) * B`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    /// hydrolysis constant (1/h)
    #[serde(rename = "K_H")]
    pub k_h: f64,
    /// fraction of dead biomass recycled into organic matter
    pub alpha: f64,
    /// specific mortality rate (1/h)
    pub k_d: f64,
    /// substrate to biomass yield (g/g)
    #[serde(rename = "Y_Bs")]
    pub y_bs: f64,
    /// product formation coefficient 1/Y_{P/s} (g/g)
    #[serde(rename = "inv_Y_Ps")]
    pub inv_y_ps: f64,
    /// substrate maintenance coefficient (1/h)
    pub m_s: f64,
    /// product maintenance coefficient (1/h)
    #[serde(rename = "m_P")]
    pub m_p: f64,
    pub growth: GrowthLaw,
}

impl ModelParams {
    /// Hard well-posedness checks: every coefficient finite and non-negative,
    /// `k_d > 0`, `Y_Bs > 0` and a valid growth law.
    ///
    /// Biological plausibility is left to [`validate_hypotheses`], which only warns.
    pub fn check(&self) -> Result<()> {
        for (name, v) in self.named_coefficients() {
            if !v.is_finite() {
                return Err(Error::InvalidParameter {
                    name,
                    value: v,
                    reason: "must be finite",
                });
            }
            if v < 0.0 {
                return Err(Error::InvalidParameter {
                    name,
                    value: v,
                    reason: "must be non-negative",
                });
            }
        }
        positive("k_d", self.k_d)?;
        positive("Y_Bs", self.y_bs)?;
        self.growth.check()
    }

    fn named_coefficients(&self) -> [(&'static str, f64); 7] {
        [
            ("K_H", self.k_h),
            ("alpha", self.alpha),
            ("k_d", self.k_d),
            ("Y_Bs", self.y_bs),
            ("inv_Y_Ps", self.inv_y_ps),
            ("m_s", self.m_s),
            ("m_P", self.m_p),
        ]
    }

    /// `alpha - m_s / k_d`, the net recycling term that shows up in every
    /// closed-form limit.
    pub fn net_recycling(&self) -> f64 {
        self.alpha - self.m_s / self.k_d
    }

    /// `1 - Y_Bs (alpha - m_s/k_d)`; must be positive for the limit formulas.
    pub fn limit_denominator(&self) -> f64 {
        1.0 - self.y_bs * self.net_recycling()
    }

    #[inline]
    pub fn growth_rate(&self, s: f64) -> f64 {
        self.growth.eval(s)
    }
}

/// Model state: concentrations in g/L.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct State {
    /// organic matter
    #[serde(rename = "X")]
    pub x: f64,
    /// living biomass
    #[serde(rename = "B")]
    pub b: f64,
    /// substrate
    pub s: f64,
    /// product (enzyme)
    #[serde(rename = "P")]
    pub p: f64,
}

impl State {
    pub const COMPONENTS: [&'static str; 4] = ["X", "B", "s", "P"];

    pub const fn new(x: f64, b: f64, s: f64, p: f64) -> Self {
        State { x, b, s, p }
    }

    pub const fn to_array(self) -> [f64; 4] {
        [self.x, self.b, self.s, self.p]
    }

    pub const fn from_array(v: [f64; 4]) -> Self {
        State::new(v[0], v[1], v[2], v[3])
    }

    pub fn max_abs(&self) -> f64 {
        self.to_array().iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Fails on the first negative or non-finite component.
    pub fn check_non_negative(&self) -> Result<()> {
        for (name, v) in Self::COMPONENTS.iter().zip(self.to_array()) {
            if !v.is_finite() {
                return Err(Error::InvalidParameter {
                    name,
                    value: v,
                    reason: "must be finite",
                });
            }
            check_concentration(name, v)?;
        }
        Ok(())
    }
}

/// Monod growth rate `mu_max s / (k_s + s)`.
pub fn growth_rate(law: &GrowthLaw, s: f64) -> Result<f64> {
    law.rate(s)
}

pub fn growth_rate_derivative(law: &GrowthLaw, s: f64) -> Result<f64> {
    law.derivative(s)
}

/// Time derivative of the state.
#[inline]
pub fn rhs(state: &State, params: &ModelParams) -> State {
    let mu = params.growth_rate(state.s);
    let b = state.b;
    let hydrolysis = params.k_h * state.x;
    State {
        x: -hydrolysis + params.alpha * params.k_d * b,
        b: (mu - params.k_d) * b,
        s: -(mu / params.y_bs + params.m_s) * b + hydrolysis,
        p: (params.inv_y_ps * mu + params.m_p) * b,
    }
}

/// Analytic Jacobian of [`rhs`], rows and columns ordered (X, B, s, P).
pub fn jacobian(state: &State, params: &ModelParams) -> [[f64; 4]; 4] {
    let mu = params.growth_rate(state.s);
    let dmu = params.growth.eval_derivative(state.s);
    let b = state.b;
    [
        [-params.k_h, params.alpha * params.k_d, 0.0, 0.0],
        [0.0, mu - params.k_d, dmu * b, 0.0],
        [
            params.k_h,
            -(mu / params.y_bs + params.m_s),
            -dmu * b / params.y_bs,
            0.0,
        ],
        [0.0, params.inv_y_ps * mu + params.m_p, params.inv_y_ps * dmu * b, 0.0],
    ]
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckStatus {
    Pass,
    Warn,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HypothesisItem {
    pub id: &'static str,
    pub condition: &'static str,
    pub status: CheckStatus,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct HypothesisReport {
    pub items: Vec<HypothesisItem>,
}

impl HypothesisReport {
    pub fn warnings(&self) -> impl Iterator<Item = &HypothesisItem> {
        self.items.iter().filter(|i| i.status == CheckStatus::Warn)
    }

    pub fn all_pass(&self) -> bool {
        self.warnings().next().is_none()
    }

    fn push(&mut self, id: &'static str, condition: &'static str, ok: bool, message: String) {
        let status = if ok { CheckStatus::Pass } else { CheckStatus::Warn };
        self.items.push(HypothesisItem {
            id,
            condition,
            status,
            message,
        });
    }
}

/// Checks the standing modelling hypotheses. Violations are warnings; only
/// non-finite or negative coefficients are hard errors.
pub fn validate_hypotheses(params: &ModelParams) -> Result<HypothesisReport> {
    params.check()?;
    let mut r = HypothesisReport::default();
    let p = params;

    r.push(
        "growth-law",
        "mu(0)=0 and mu(s)>0 for s>0",
        p.growth.eval(0.0) == 0.0 && p.growth.eval(1.0) > 0.0,
        format!("{} growth law", p.growth.kind()),
    );

    let ok = p.alpha < 1.0;
    r.push(
        "recycling",
        "0<=alpha<1",
        ok,
        verdict(ok, format!("alpha={}", p.alpha), "0<=alpha<1"),
    );

    let max_mu = p.growth.supremum();
    let ok = p.k_d > 0.0 && p.k_d < max_mu;
    r.push(
        "mortality",
        "0<k_d<max mu",
        ok,
        verdict(ok, format!("k_d={}", p.k_d), &format!("0<k_d<max mu={max_mu}")),
    );

    let ok = p.y_bs > 0.0 && p.y_bs < 1.0;
    r.push(
        "biomass-yield",
        "0<Y_Bs<1",
        ok,
        verdict(ok, format!("Y_Bs={}", p.y_bs), "0<Y_Bs<1"),
    );

    // Y_Ps = 1/inv_Y_Ps; inv_Y_Ps = 0 means an infinite yield.
    let ok = p.inv_y_ps > 1.0;
    let y_ps = 1.0 / p.inv_y_ps;
    r.push(
        "product-yield",
        "0<Y_Ps<1",
        ok,
        verdict(ok, format!("Y_Ps={y_ps}"), "0<Y_Ps<1"),
    );

    let ok = p.m_s > 0.0;
    r.push(
        "substrate-maintenance",
        "m_s>0",
        ok,
        verdict(ok, format!("m_s={}", p.m_s), "m_s>0"),
    );
    let ok = p.m_p > 0.0;
    r.push(
        "product-maintenance",
        "m_P>0",
        ok,
        verdict(ok, format!("m_P={}", p.m_p), "m_P>0"),
    );

    let d = p.limit_denominator();
    let ok = d > 0.0;
    r.push(
        "limit-denominator",
        "1-Y_Bs*(alpha-m_s/k_d)>0",
        ok,
        verdict(
            ok,
            format!("1-Y_Bs*(alpha-m_s/k_d)={d}"),
            "positivity (limit formulas unavailable)",
        ),
    );

    Ok(r)
}

fn verdict(ok: bool, value: String, condition: &str) -> String {
    if ok {
        format!("{value} ok")
    } else {
        format!("{value} violates {condition}")
    }
}

pub(crate) fn check_concentration(name: &'static str, v: f64) -> Result<()> {
    if v < 0.0 || v.is_nan() {
        Err(Error::NegativeInput { name, value: v })
    } else {
        Ok(())
    }
}

fn positive(name: &'static str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name,
            value: v,
            reason: "must be positive",
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presets;
    use approx::assert_relative_eq;

    fn table1() -> GrowthLaw {
        GrowthLaw::monod(0.096, 11.27)
    }

    #[test]
    fn monod_reference_values() {
        let law = table1();
        assert_eq!(law.rate(0.0).unwrap(), 0.0);
        assert_relative_eq!(law.rate(11.27).unwrap(), 0.048, max_relative = 1e-15);
        assert_relative_eq!(law.rate(50.0).unwrap(), 0.0783417, max_relative = 1e-6);
    }

    #[test]
    fn monod_derivative_reference_values() {
        let law = table1();
        assert_relative_eq!(law.derivative(0.0).unwrap(), 0.0085182, max_relative = 1e-5);
        assert!(law.derivative(1e9).unwrap() < 1e-15);
    }

    #[test]
    fn negative_substrate_is_domain_error() {
        let law = table1();
        assert!(matches!(law.rate(-1.0), Err(Error::NegativeInput { .. })));
        assert!(matches!(law.derivative(-1e-3), Err(Error::NegativeInput { .. })));
    }

    #[test]
    fn level_crossing_matches_rate() {
        let law = GrowthLaw::monod(0.2, 11.27);
        let s = law.level_crossing(0.03).unwrap();
        assert_relative_eq!(law.rate(s).unwrap(), 0.03, max_relative = 1e-14);
        assert_eq!(law.level_crossing(0.2), None);
    }

    #[test]
    fn rhs_baseline_state() {
        let p = presets::baseline_params();
        let d = rhs(&State::new(45.0, 15.0, 50.0, 0.0), &p);
        assert!((d.x + 7.776).abs() < 1e-4);
        assert!((d.b - 0.45513).abs() < 1e-4);
        assert!((d.s - 6.86200).abs() < 1e-4);
        assert!((d.p - 0.26503).abs() < 1e-4);
    }

    #[test]
    fn rhs_without_biomass() {
        let p = presets::baseline_params();
        let d = rhs(&State::new(12.0, 0.0, 3.0, 7.0), &p);
        assert_eq!(d, State::new(-p.k_h * 12.0, 0.0, p.k_h * 12.0, 0.0));
        let d = rhs(&State::new(0.0, 0.0, 3.0, 7.0), &p);
        assert_eq!(d.max_abs(), 0.0);
    }

    #[test]
    fn hypotheses_baseline_flags_yields() {
        let report = validate_hypotheses(&presets::baseline_params()).unwrap();
        let warns: Vec<_> = report.warnings().map(|w| w.message.as_str()).collect();
        assert!(warns.contains(&"Y_Bs=1.19 violates 0<Y_Bs<1"), "{warns:?}");
        assert!(warns.contains(&"Y_Ps=5 violates 0<Y_Ps<1"), "{warns:?}");
        assert_eq!(warns.len(), 2, "{warns:?}");
    }

    #[test]
    fn hypotheses_mortality_above_max_growth() {
        let mut p = presets::baseline_params();
        p.k_d = 0.25;
        p.growth = GrowthLaw::monod(0.2, 11.27);
        let report = validate_hypotheses(&p).unwrap();
        assert!(report.warnings().any(|w| w.id == "mortality"));
    }

    #[test]
    fn hypotheses_denominator() {
        let p = presets::baseline_params();
        assert_relative_eq!(p.limit_denominator(), 0.87852, max_relative = 1e-5);
        let report = validate_hypotheses(&p).unwrap();
        let item = report.items.iter().find(|i| i.id == "limit-denominator").unwrap();
        assert_eq!(item.status, CheckStatus::Pass);
    }

    #[test]
    fn hypotheses_reject_bad_numbers() {
        let mut p = presets::baseline_params();
        p.m_s = -0.1;
        assert!(validate_hypotheses(&p).is_err());
        p.m_s = f64::NAN;
        assert!(validate_hypotheses(&p).is_err());
        let mut p = presets::baseline_params();
        p.k_h = f64::INFINITY;
        assert!(validate_hypotheses(&p).is_err());
    }

    #[test]
    fn jacobian_matches_finite_differences() {
        let p = presets::baseline_params();
        let at = State::new(3.0, 2.0, 5.0, 1.0);
        let j = jacobian(&at, &p);
        let base = at.to_array();
        for col in 0..4 {
            let h = 1e-6;
            let mut up = base;
            let mut dn = base;
            up[col] += h;
            dn[col] -= h;
            let fu = rhs(&State::from_array(up), &p).to_array();
            let fd = rhs(&State::from_array(dn), &p).to_array();
            for row in 0..4 {
                let fdv = (fu[row] - fd[row]) / (2.0 * h);
                assert!((fdv - j[row][col]).abs() < 1e-8, "J[{row}][{col}]");
            }
        }
    }
}
