//! Closed-form asymptotics of the model.
//!
//! Every trajectory started from a non-negative state ends on the plane of
//! equilibria `(0, 0, s*, P*)`. This module provides what can be said about
//! that limit without integrating: the attractor interval `[0, lambda]` for
//! `s*`, the nonincreasing weighted sum `Z`, the product limit `P*` as a
//! function of `s*`, the total biomass integrals, the spectrum at the
//! equilibria, and the `(z, X, B, W)` coordinates in which the limit point
//! becomes hyperbolic.

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::integrator::{rk4_step_with, Trajectory};
use crate::kinetics::{check_concentration, jacobian, ModelParams, State};

/// Right end of the attractor interval `{s >= 0 : mu(s) <= k_d}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AttractorBound {
    Finite(f64),
    /// `mu(s) < k_d` everywhere, the attractor is `[0, inf)`
    Unbounded,
}

impl AttractorBound {
    pub fn value(self) -> Option<f64> {
        match self {
            AttractorBound::Finite(v) => Some(v),
            AttractorBound::Unbounded => None,
        }
    }

    pub fn contains(self, s: f64) -> bool {
        s >= 0.0
            && match self {
                AttractorBound::Finite(l) => s <= l,
                AttractorBound::Unbounded => true,
            }
    }
}

impl Serialize for AttractorBound {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.value().serialize(serializer)
    }
}

/// `lambda = k_d k_s / (mu_max - k_d)` for Monod.
pub fn attractor_interval(params: &ModelParams) -> AttractorBound {
    match params.growth.level_crossing(params.k_d) {
        Some(l) => AttractorBound::Finite(l),
        None => AttractorBound::Unbounded,
    }
}

/// Weights of (X, B, s) in `Z`.
fn z_weights(params: &ModelParams) -> Result<[f64; 3]> {
    if params.alpha == 0.0 {
        return Err(Error::AlphaZero);
    }
    Ok([
        1.0 + params.m_s * params.y_bs / params.k_d,
        params.alpha,
        params.alpha * params.y_bs,
    ])
}

/// `Z = (1 + m_s Y_Bs / k_d) X + alpha B + alpha Y_Bs s`, nonincreasing along
/// every trajectory.
pub fn lyapunov_z(state: &State, params: &ModelParams) -> Result<f64> {
    state.check_non_negative()?;
    let [wx, wb, ws] = z_weights(params)?;
    Ok(wx * state.x + wb * state.b + ws * state.s)
}

/// `dZ/dt = K_H [(alpha Y_Bs - 1) - m_s Y_Bs / k_d] X`
pub fn lyapunov_z_derivative(state: &State, params: &ModelParams) -> Result<f64> {
    state.check_non_negative()?;
    z_weights(params)?;
    let p = params;
    Ok(p.k_h * ((p.alpha * p.y_bs - 1.0) - p.m_s * p.y_bs / p.k_d) * state.x)
}

/// Closed-form limit quantities for a given initial state and limit substrate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LimitPrediction {
    pub initial: State,
    pub s_star: f64,
    pub lambda: AttractorBound,
    /// upper bound on `s*` from `Z(inf) <= Z(0)`; `None` when `alpha = 0`
    pub s_star_upper_bound: Option<f64>,
    pub a: f64,
    pub b: f64,
    /// `P0 + a B0 + b (X0 + s0 - s*)`
    pub p_star: f64,
    /// total biomass exposure, integral of `B` over `[0, inf)` (g h/L)
    pub int_b: f64,
    /// integral of `mu(s) B` over `[0, inf)` (g/L)
    pub int_mub: f64,
}

impl LimitPrediction {
    /// Product limit for another candidate `s*`.
    pub fn p_star_at(&self, s_star: f64) -> f64 {
        let i = &self.initial;
        i.p + self.a * i.b + self.b * (i.x + i.s - s_star)
    }
}

/// Evaluates the closed-form limits given the initial state and `s*`
/// (usually read off a converged simulation, `s*` has no closed form).
pub fn predict_limits(initial: &State, params: &ModelParams, s_star: f64) -> Result<LimitPrediction> {
    params.check()?;
    initial.check_non_negative()?;
    check_concentration("s_star", s_star)?;
    let p = params;
    let d = p.limit_denominator();
    if d <= 0.0 {
        return Err(Error::TheoremInapplicable { denominator: d });
    }
    let net = p.net_recycling();
    // a and b multiplied through by 1/Y_Ps so that inv_Y_Ps = 0 stays finite
    let a = (p.m_p + p.inv_y_ps * p.k_d * p.y_bs * net) / (p.k_d * d);
    let b = p.y_bs * (p.m_p + p.inv_y_ps * p.k_d) / (p.k_d * d);

    let depletion = initial.x + initial.s - s_star;
    let s_star_upper_bound = z_weights(p)
        .ok()
        .map(|[wx, wb, ws]| (wx * initial.x + wb * initial.b) / ws + initial.s);

    let mut out = LimitPrediction {
        initial: *initial,
        s_star,
        lambda: attractor_interval(p),
        s_star_upper_bound,
        a,
        b,
        p_star: 0.0,
        int_b: (initial.b + p.y_bs * depletion) / (p.k_d * d),
        int_mub: p.y_bs * (initial.b * net + depletion) / d,
    };
    out.p_star = out.p_star_at(s_star);
    Ok(out)
}

/// Trapezoid estimates of `int B dt` and `int mu(s) B dt` over a trajectory.
pub fn trajectory_integrals(traj: &Trajectory, params: &ModelParams) -> (f64, f64) {
    (
        traj.integrate_observable(|st| st.b),
        traj.integrate_observable(|st| params.growth_rate(st.s) * st.b),
    )
}

/// Eigenvalues at an equilibrium with the Jacobian they were checked against.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EigenReport {
    pub eigenvalues: [f64; 4],
    pub jacobian: [[f64; 4]; 4],
    /// scaled `|det(J - r I)|` for each eigenvalue
    pub residuals: [f64; 4],
}

impl EigenReport {
    fn new(eigenvalues: [f64; 4], jacobian: [[f64; 4]; 4]) -> Self {
        let residuals = eigenvalues.map(|r| char_poly_residual(&jacobian, r));
        EigenReport {
            eigenvalues,
            jacobian,
            residuals,
        }
    }

    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().fold(0.0, |m, r| m.max(*r))
    }
}

/// Spectrum of the original system at `(0, 0, s*, P*)`:
/// `(-K_H, mu(s*) - k_d, 0, 0)`.
pub fn equilibrium_eigenvalues(s_star: f64, params: &ModelParams) -> Result<EigenReport> {
    check_concentration("s_star", s_star)?;
    params.check()?;
    let mu = params.growth_rate(s_star);
    let j = jacobian(&State::new(0.0, 0.0, s_star, 0.0), params);
    Ok(EigenReport::new([-params.k_h, mu - params.k_d, 0.0, 0.0], j))
}

/// Constants of the change of variables
/// `z = (X + s - s*)/B + varphi` and `W = (P - P*)/B + omega`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TransformContext {
    pub s_star: f64,
    pub p_star: f64,
    /// `mu(s*)`
    pub mu_star: f64,
    pub varphi: f64,
    pub gamma: f64,
    pub omega: f64,
    pub phi: f64,
}

/// Builds the transform around `(0, 0, s*, P*)`; requires `mu(s*) < k_d`.
pub fn build_transform(s_star: f64, p_star: f64, params: &ModelParams) -> Result<TransformContext> {
    check_concentration("s_star", s_star)?;
    check_concentration("p_star", p_star)?;
    params.check()?;
    let p = params;
    let mu = p.growth_rate(s_star);
    if mu >= p.k_d {
        return Err(Error::NotInteriorEquilibrium { mu, k_d: p.k_d });
    }
    let gap = p.k_d - mu;
    Ok(TransformContext {
        s_star,
        p_star,
        mu_star: mu,
        varphi: (mu / p.y_bs - (p.alpha * p.k_d - p.m_s)) / (mu - p.k_d),
        gamma: (p.k_d * (1.0 - p.alpha * p.y_bs) + p.y_bs * p.m_s) / (p.y_bs * gap),
        omega: (mu * p.inv_y_ps + p.m_p) / gap,
        phi: (p.k_d * p.inv_y_ps + p.m_p) / gap,
    })
}

/// State in transformed coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct TransformedState {
    pub z: f64,
    pub x: f64,
    pub b: f64,
    pub w: f64,
}

impl TransformedState {
    pub const fn new(z: f64, x: f64, b: f64, w: f64) -> Self {
        TransformedState { z, x, b, w }
    }

    pub const fn to_array(self) -> [f64; 4] {
        [self.z, self.x, self.b, self.w]
    }

    pub const fn from_array(v: [f64; 4]) -> Self {
        TransformedState::new(v[0], v[1], v[2], v[3])
    }
}

impl TransformContext {
    /// Maps an original state with `B > 0` to `(z, X, B, W)`.
    pub fn to_transformed(&self, state: &State) -> Result<TransformedState> {
        if state.b.is_nan() || state.b <= 0.0 {
            return Err(Error::OutsideTransformDomain(format!("B = {} must be > 0", state.b)));
        }
        Ok(TransformedState {
            z: (state.x + state.s - self.s_star) / state.b + self.varphi,
            x: state.x,
            b: state.b,
            w: (state.p - self.p_star) / state.b + self.omega,
        })
    }

    /// Reconstructs `(X, B, s, P)`.
    pub fn to_original(&self, ts: &TransformedState) -> State {
        State {
            x: ts.x,
            b: ts.b,
            s: self.reconstruct_s(ts),
            p: self.p_star + (ts.w - self.omega) * ts.b,
        }
    }

    fn reconstruct_s(&self, ts: &TransformedState) -> f64 {
        self.s_star - ts.x + (ts.z - self.varphi) * ts.b
    }

    fn check_domain(&self, ts: &TransformedState) -> Result<()> {
        if ts.b.is_nan() || ts.b <= 0.0 {
            return Err(Error::OutsideTransformDomain(format!("B = {} must be > 0", ts.b)));
        }
        if ts.x < 0.0 {
            return Err(Error::OutsideTransformDomain(format!("X = {} must be >= 0", ts.x)));
        }
        // reconstruction cancels large terms; allow roundoff below zero
        let roundoff = |parts: &[f64]| -1e-12 * parts.iter().map(|v| v.abs()).sum::<f64>();
        let s = self.reconstruct_s(ts);
        if s < roundoff(&[self.s_star, ts.x, (ts.z - self.varphi) * ts.b]) {
            return Err(Error::OutsideTransformDomain(format!(
                "s* - X + (z - varphi) B = {s} must be >= 0"
            )));
        }
        let shift = (ts.w - self.omega) * ts.b;
        let p = self.p_star + shift;
        if p < roundoff(&[self.p_star, shift]) {
            return Err(Error::OutsideTransformDomain(format!(
                "P* + (W - omega) B = {p} must be >= 0"
            )));
        }
        Ok(())
    }
}

/// Vector field in `(z, X, B, W)` coordinates with `F = mu(s* - X + (z - varphi) B)`:
///
/// ```text
/// dz/dt = -gamma (F - mu(s*)) - (F - k_d) z
/// dX/dt = -K_H X + alpha k_d B
/// dB/dt = (F - k_d) B
/// dW/dt = phi (F - mu(s*)) - (F - k_d) W
/// ```
pub fn transformed_rhs(
    ts: &TransformedState,
    ctx: &TransformContext,
    params: &ModelParams,
) -> Result<TransformedState> {
    ctx.check_domain(ts)?;
    let f = params.growth_rate(ctx.reconstruct_s(ts));
    let excess = f - ctx.mu_star;
    let net = f - params.k_d;
    Ok(TransformedState {
        z: -ctx.gamma * excess - net * ts.z,
        x: -params.k_h * ts.x + params.alpha * params.k_d * ts.b,
        b: net * ts.b,
        w: ctx.phi * excess - net * ts.w,
    })
}

/// RK4 integration of the transformed system, one sample per step.
pub fn integrate_transformed(
    initial: &TransformedState,
    ctx: &TransformContext,
    params: &ModelParams,
    h: f64,
    n_steps: usize,
) -> Result<Vec<TransformedState>> {
    let field = |v: &[f64; 4]| transformed_rhs(&TransformedState::from_array(*v), ctx, params).map(|d| d.to_array());
    let mut out = Vec::with_capacity(n_steps + 1);
    let mut y = initial.to_array();
    out.push(*initial);
    for _ in 0..n_steps {
        let k1 = field(&y)?;
        y = rk4_step_with(&y, &k1, h, field)?;
        out.push(TransformedState::from_array(y));
    }
    Ok(out)
}

/// Jacobian of [`transformed_rhs`] at the origin, ordered (z, X, B, W).
pub fn transformed_jacobian(ctx: &TransformContext, params: &ModelParams) -> [[f64; 4]; 4] {
    let dmu = params.growth.eval_derivative(ctx.s_star);
    let r = ctx.mu_star - params.k_d;
    let (g, ph, vp) = (ctx.gamma, ctx.phi, ctx.varphi);
    [
        [-r, g * dmu, g * vp * dmu, 0.0],
        [0.0, -params.k_h, params.alpha * params.k_d, 0.0],
        [0.0, 0.0, r, 0.0],
        [0.0, -ph * dmu, -ph * vp * dmu, -r],
    ]
}

/// Spectrum of the transformed system at the origin, reported as
/// `[r1, r1, r2, r3]` with `r1 = k_d - mu(s*)`, `r2 = -K_H`, `r3 = -r1`.
pub fn transformed_eigenvalues(ctx: &TransformContext, params: &ModelParams) -> EigenReport {
    let r3 = ctx.mu_star - params.k_d;
    let r1 = -r3;
    EigenReport::new([r1, r1, -params.k_h, r3], transformed_jacobian(ctx, params))
}

/// `|det(J - r I)|` divided by `(1 + max|J_ij| + |r|)^4`.
pub fn char_poly_residual(j: &[[f64; 4]; 4], r: f64) -> f64 {
    let mut m = *j;
    let mut scale = 0.0_f64;
    for (i, row) in m.iter_mut().enumerate() {
        for v in row.iter() {
            scale = scale.max(v.abs());
        }
        row[i] -= r;
    }
    let norm = 1.0 + scale + r.abs();
    det4(m).abs() / norm.powi(4)
}

/// Determinant by Gaussian elimination with partial pivoting.
pub fn det4(mut m: [[f64; 4]; 4]) -> f64 {
    let mut det = 1.0;
    for col in 0..4 {
        let pivot = (col..4)
            .max_by(|&a, &b| m[a][col].abs().total_cmp(&m[b][col].abs()))
            .unwrap_or(col);
        if m[pivot][col] == 0.0 {
            return 0.0;
        }
        if pivot != col {
            m.swap(pivot, col);
            det = -det;
        }
        det *= m[col][col];
        for row in col + 1..4 {
            let factor = m[row][col] / m[col][col];
            let pivot_row = m[col];
            for (v, p) in m[row].iter_mut().zip(pivot_row).skip(col) {
                *v -= factor * p;
            }
        }
    }
    det
}
