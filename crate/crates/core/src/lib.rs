//! Simulation and asymptotic analysis of a four-state fungal kinetics model:
//! first-order hydrolysis of organic matter `X` into substrate `s`, Monod
//! growth and mortality of biomass `B`, and Luedeking-Piret formation of an
//! enzyme product `P`.
//!
//! - [`kinetics`]: growth law, parameters, state and vector field
//! - [`integrator`]: fixed-step RK4 with steady-state detection
//! - [`analysis`]: limit predictions, `Z` function, spectra and the
//!   hyperbolic change of variables
//! - [`presets`]: published parameter sets

pub mod analysis;
pub mod error;
pub mod integrator;
pub mod kinetics;
pub mod presets;

pub use analysis::{
    attractor_interval, build_transform, equilibrium_eigenvalues, integrate_transformed, lyapunov_z,
    lyapunov_z_derivative, predict_limits, trajectory_integrals, transformed_eigenvalues, transformed_rhs,
    AttractorBound, EigenReport, LimitPrediction, TransformContext, TransformedState,
};
pub use error::{Error, Result};
pub use integrator::{convergence_order, integrate, SimulationConfig, Trajectory};
pub use kinetics::{
    growth_rate, growth_rate_derivative, rhs, validate_hypotheses, GrowthLaw, HypothesisReport, ModelParams,
    State,
};
