//! Gamma-function helpers evaluated in log space.

use statrs::function::gamma::{gamma, ln_gamma};

/// Below this argument Γ is evaluated directly.
const DIRECT_GAMMA_LIMIT: f64 = 30.0;

/// `Γ(x)` for `x > 0`.
pub fn gamma_fn(x: f64) -> f64 {
    if x < DIRECT_GAMMA_LIMIT {
        gamma(x)
    } else {
        ln_gamma(x).exp()
    }
}

/// `ln(Γ(a) / Γ(b))` for positive `a`, `b`.
pub fn ln_gamma_ratio(a: f64, b: f64) -> f64 {
    ln_gamma(a) - ln_gamma(b)
}
