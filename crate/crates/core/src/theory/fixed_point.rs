//! Fixed-point iteration for `θ`.

use super::{lipschitz_bound, r_map, RForm, TheoryError, TheoryParams};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolverOptions {
    /// Stop once `|θ_{n+1} − θ_n| < tol` and the a-posteriori error bound is
    /// below `tol` as well, so any two starts agree within `2·tol`.
    pub tol: f64,
    pub max_iter: usize,
    /// Starting point `θ₀ ∈ [0, θ̂]`.
    pub start: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            max_iter: 10_000,
            start: 0.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ThetaSolution {
    pub theta: f64,
    pub iterations: usize,
    /// `|R(θ) − θ|` at the returned point.
    pub residual: f64,
    /// A-posteriori bound `q/(1−q)·|θ_{n+1} − θ_n|` using the diagnostic `q`.
    pub error_bound: f64,
    /// `θ_0, θ_1, …, θ_n`.
    pub iterates: Vec<f64>,
}

/// Iterates `θ_{n+1} = R(θ_n)`.
///
/// Convergence is certified by the reported residual; the Lipschitz value
/// only feeds `error_bound`.
pub fn solve_theta(params: &TheoryParams, opts: SolverOptions) -> Result<ThetaSolution, TheoryError> {
    let p = params.probabilities();
    if p.deactivation() == 0.0 {
        return Err(TheoryError::NoDeactivation);
    }
    if p.vertex() <= p.deactivation() {
        return Err(TheoryError::Domain(format!(
            "fixed-point analysis needs p_v > p_d, got {} <= {}",
            p.vertex(),
            p.deactivation()
        )));
    }
    if !(opts.tol > 0.0) {
        return Err(TheoryError::Domain(format!("tolerance must be positive, got {}", opts.tol)));
    }
    let q = lipschitz_bound(params.gamma())?;
    let stop = opts.tol * (1.0f64).min((1.0 - q) / q);
    let mut x = opts.start;
    let mut iterates = vec![x];
    let mut change = f64::INFINITY;
    for n in 1..=opts.max_iter {
        let next = r_map(x, params, RForm::Ratio)?;
        change = (next - x).abs();
        x = next;
        iterates.push(x);
        if change < stop {
            let residual = (r_map(x, params, RForm::Ratio)? - x).abs();
            return Ok(ThetaSolution {
                theta: x,
                iterations: n,
                residual,
                error_bound: q / (1.0 - q) * change,
                iterates,
            });
        }
    }
    Err(TheoryError::NonConvergence {
        iterations: opts.max_iter,
        last_change: change,
    })
}
