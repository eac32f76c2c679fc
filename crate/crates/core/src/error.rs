use thiserror::Error;

/// Errors raised by the model, the integrator and the analysis routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {name} = {value} must be non-negative")]
    NegativeInput { name: &'static str, value: f64 },

    #[error("invalid parameter {name} = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("invalid simulation config: {0}")]
    InvalidConfig(String),

    #[error("step-size too large: {component} = {value:e} at t = {t} h went negative")]
    StepTooLarge {
        component: &'static str,
        value: f64,
        t: f64,
    },

    #[error("flow leaves {component} >= 0 at t = {t} h: d{component}/dt = {boundary_rate:e} at the boundary (maintenance demand exceeds supply)")]
    LeavesNonNegativeOrthant {
        component: &'static str,
        boundary_rate: f64,
        t: f64,
    },

    #[error("non-finite state at t = {t} h")]
    NonFinite { t: f64 },

    #[error("convergence order undetermined (successive differences {coarse:e}, {fine:e}); refine t_check or enlarge h")]
    OrderUndetermined { coarse: f64, fine: f64 },

    #[error("Z-based bounds undefined for alpha = 0")]
    AlphaZero,

    #[error("limit theorem inapplicable: 1 - Y_Bs*(alpha - m_s/k_d) = {denominator} <= 0")]
    TheoremInapplicable { denominator: f64 },

    #[error("equilibrium not in interior of attractor set: mu(s*) = {mu} >= k_d = {k_d}")]
    NotInteriorEquilibrium { mu: f64, k_d: f64 },

    #[error("outside transformed domain: {0}")]
    OutsideTransformDomain(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
