//! Closed-form predictions of the model.
//!
//! With `g = p_v(μ−1) + p_e·μ` and `S = g + p_d`:
//!
//! * `γ = g / S`, `ρ(x) = 2 + (μ(p_v+p_e) − p_d·x) / S`;
//! * the limiting mean deactivated degree `θ` is the fixed point of
//!   `R(x) = F(2,2;ρ(x);γ) / F(1,2;ρ(x);γ)` on `[0, θ̂]`, `θ̂ = (p_v+p_e)μ/p_d`;
//! * `α = μ(p_v+p_e) − p_d·θ` is the slope of `E[D_t]`,
//!   `β = α/S`, `δ = p_d/α` and `c = β·Γ(1+β)/γ`;
//! * the degree distribution behaves like `c·k^{−β}·γ^k·(1/k + δ)`.

mod fixed_point;
mod hypergeometric;
mod special;

pub use fixed_point::{solve_theta, SolverOptions, ThetaSolution};
pub use hypergeometric::{gauss_2f1, MAX_TERMS};
pub use special::{gamma_fn, ln_gamma_ratio};

use thiserror::Error;

use crate::params::Probabilities;

/// Series tolerance used inside `R`; terms below this relative size no
/// longer change an `f64` sum.
const SERIES_TOL: f64 = 1e-17;

/// Largest `γ` accepted by `R`; beyond it the series converge too slowly
/// for the accuracy targets.
pub const MAX_GAMMA: f64 = 0.999;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TheoryError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("θ undefined without deactivation (p_d = 0); use the power-law reduction")]
    NoDeactivation,
    #[error("no convergence after {iterations} iterations (last change {last_change:e})")]
    NonConvergence { iterations: usize, last_change: f64 },
}

/// `(p_v, p_e, p_d, μ)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TheoryParams {
    probabilities: Probabilities,
    mean: f64,
}

impl TheoryParams {
    pub fn new(probabilities: Probabilities, mean: f64) -> Result<Self, TheoryError> {
        if !(mean.is_finite() && mean >= 1.0) {
            return Err(TheoryError::Domain(format!(
                "mean cardinality must be at least 1, got {mean}"
            )));
        }
        Ok(Self {
            probabilities,
            mean,
        })
    }

    pub fn probabilities(&self) -> &Probabilities {
        &self.probabilities
    }

    /// `μ`.
    pub fn mean(&self) -> f64 {
        self.mean
    }

    /// `p_v(μ−1) + p_e·μ`: expected degree gained by existing vertices per step.
    pub fn attachment_rate(&self) -> f64 {
        let p = &self.probabilities;
        p.vertex() * (self.mean - 1.0) + p.edge() * self.mean
    }

    /// `p_v(μ−1) + p_e·μ + p_d`.
    pub fn denominator(&self) -> f64 {
        self.attachment_rate() + self.probabilities.deactivation()
    }

    /// `γ`.
    pub fn gamma(&self) -> f64 {
        self.attachment_rate() / self.denominator()
    }

    /// `θ̂ = (p_v+p_e)μ / p_d`.
    pub fn theta_hat(&self) -> Result<f64, TheoryError> {
        let p_d = self.probabilities.deactivation();
        if p_d == 0.0 {
            return Err(TheoryError::NoDeactivation);
        }
        Ok(self.probabilities.growth() * self.mean / p_d)
    }
}

/// Parameters of the predicted degree distribution.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CutoffParams {
    pub theta: f64,
    pub beta: f64,
    pub gamma: f64,
    pub delta: f64,
    pub c: f64,
    pub theta_hat: f64,
    /// Slope of `E[D_t]/t`.
    pub alpha: f64,
    /// Lipschitz diagnostic from [`lipschitz_bound`].
    pub q: f64,
}

/// `ρ(x)`; its derivative is `γ − 1`.
pub fn rho(x: f64, params: &TheoryParams) -> f64 {
    let p = params.probabilities();
    2.0 + (params.mean() * p.growth() - p.deactivation() * x) / params.denominator()
}

/// Which algebraic route evaluates `R`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RForm {
    /// `F(2,2;ρ;γ) / F(1,2;ρ;γ)`
    Ratio,
    /// `x − p_v/p_d + (ρ − 1) / ((1 − γ)·F(1,2;ρ;γ))`
    Closed,
}

fn checked_gamma(params: &TheoryParams) -> Result<f64, TheoryError> {
    let gamma = params.gamma();
    if !(gamma > 0.0 && gamma <= MAX_GAMMA) {
        return Err(TheoryError::Domain(format!(
            "γ = {gamma} is outside (0, {MAX_GAMMA}]"
        )));
    }
    Ok(gamma)
}

/// `R(x)` for `x ∈ [0, θ̂]`.
pub fn r_map(x: f64, params: &TheoryParams, form: RForm) -> Result<f64, TheoryError> {
    let theta_hat = params.theta_hat()?;
    if !(0.0..=theta_hat).contains(&x) {
        return Err(TheoryError::Domain(format!(
            "R is only considered on [0, {theta_hat}], got x = {x}"
        )));
    }
    let gamma = checked_gamma(params)?;
    let r = rho(x, params);
    let f1 = gauss_2f1(1.0, 2.0, r, gamma, SERIES_TOL)?;
    Ok(match form {
        RForm::Ratio => gauss_2f1(2.0, 2.0, r, gamma, SERIES_TOL)? / f1,
        RForm::Closed => {
            let p = params.probabilities();
            x - p.vertex() / p.deactivation() + (r - 1.0) / ((1.0 - gamma) * f1)
        }
    })
}

/// `q = 1 + ((1−γ)/γ)·ln(1−γ)`, the slope of `R` at `θ̂` when `R` is convex.
pub fn lipschitz_bound(gamma: f64) -> Result<f64, TheoryError> {
    if !(gamma > 0.0 && gamma < 1.0) {
        return Err(TheoryError::Domain(format!("γ = {gamma} is outside (0, 1)")));
    }
    Ok(1.0 + (1.0 - gamma) / gamma * (-gamma).ln_1p())
}

/// `α = (p_v+p_e)μ − p_d·θ`.
pub fn slope_alpha(params: &TheoryParams, theta: f64) -> f64 {
    let p = params.probabilities();
    p.growth() * params.mean() - p.deactivation() * theta
}

/// Distribution parameters for a given `θ`.
pub fn cutoff_params(params: &TheoryParams, theta: f64) -> Result<CutoffParams, TheoryError> {
    let p_d = params.probabilities().deactivation();
    if p_d == 0.0 {
        return Err(TheoryError::NoDeactivation);
    }
    let gamma = params.gamma();
    if !(gamma > 0.0 && gamma < 1.0) {
        return Err(TheoryError::Domain(format!("γ = {gamma} is outside (0, 1)")));
    }
    let alpha = slope_alpha(params, theta);
    if !(alpha > 0.0) {
        return Err(TheoryError::Domain(format!(
            "θ = {theta} gives a non-positive slope α = {alpha}"
        )));
    }
    let beta = alpha / params.denominator();
    Ok(CutoffParams {
        theta,
        beta,
        gamma,
        delta: p_d / alpha,
        c: beta * gamma_fn(1.0 + beta) / gamma,
        theta_hat: params.theta_hat()?,
        alpha,
        q: lipschitz_bound(gamma)?,
    })
}

/// Which expression of the limiting degree fraction to evaluate.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FractionForm {
    /// `(β/γ)·γ^k·Γ(1+β)Γ(k)/Γ(k+β+1)·(1 + kδ)`
    Exact,
    /// `c·k^{−β}·γ^k·(1/k + δ)`
    Asymptotic,
}

/// Limit of `E[N_{k,t} / |V_t|]`.
pub fn expected_fraction(k: u64, cp: &CutoffParams, form: FractionForm) -> Result<f64, TheoryError> {
    if k == 0 {
        return Err(TheoryError::Domain("degree k must be at least 1".into()));
    }
    let kf = k as f64;
    let ln = match form {
        FractionForm::Exact => {
            (cp.beta / cp.gamma).ln()
                + kf * cp.gamma.ln()
                + statrs::function::gamma::ln_gamma(1.0 + cp.beta)
                + ln_gamma_ratio(kf, kf + cp.beta + 1.0)
                + (kf * cp.delta).ln_1p()
        }
        FractionForm::Asymptotic => {
            cp.c.ln() - cp.beta * kf.ln() + kf * cp.gamma.ln() + (1.0 / kf + cp.delta).ln()
        }
    };
    Ok(ln.exp())
}

/// Pure power law obtained without deactivation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PowerLawReduction {
    /// `β = μ / (μ − p_v)`
    pub beta: f64,
    /// `c = β·Γ(1+β)`
    pub c: f64,
    /// Degree exponent `β + 1`.
    pub exponent: f64,
}

pub fn powerlaw_reduction(params: &TheoryParams) -> Result<PowerLawReduction, TheoryError> {
    let p = params.probabilities();
    if p.deactivation() != 0.0 {
        return Err(TheoryError::Domain(format!(
            "the power-law reduction needs p_d = 0, got {}",
            p.deactivation()
        )));
    }
    let mu = params.mean();
    if mu <= p.vertex() {
        return Err(TheoryError::Domain(format!(
            "μ = {mu} must exceed p_v = {}",
            p.vertex()
        )));
    }
    let beta = mu / (mu - p.vertex());
    Ok(PowerLawReduction {
        beta,
        c: beta * gamma_fn(1.0 + beta),
        exponent: beta + 1.0,
    })
}

impl PowerLawReduction {
    /// The same limit as [`CutoffParams`] with `γ = 1` and `δ = 0`, so that
    /// [`expected_fraction`] yields `β·Γ(1+β)·Γ(k)/Γ(k+β+1)`. `θ` is reported
    /// as 0, `θ̂` as infinite and `q` as NaN (there is no fixed point).
    pub fn as_cutoff(&self, params: &TheoryParams) -> CutoffParams {
        CutoffParams {
            theta: 0.0,
            beta: self.beta,
            gamma: 1.0,
            delta: 0.0,
            c: self.c,
            theta_hat: f64::INFINITY,
            alpha: slope_alpha(params, 0.0),
            q: f64::NAN,
        }
    }
}
