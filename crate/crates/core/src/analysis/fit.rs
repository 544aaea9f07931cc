//! Maximum-likelihood fits of `Pr[k] ∝ k^{−β} γ^k` for `k ≥ k_min`.
//!
//! The log-likelihood only depends on `n`, `Σ ln k` and `Σ k`, and is
//! concave in `(β, ln γ)`, so the profile over `γ` is unimodal in `β`. A
//! coarse grid is followed by nested golden-section searches; the best point
//! seen anywhere is returned.

use super::{AnalysisError, DegreeHistogram};

/// Search interval for `β`.
pub const BETA_RANGE: (f64, f64) = (0.0, 6.0);

/// Smallest `γ` considered by the cutoff fit.
const GAMMA_FLOOR: f64 = 1e-6;
const DIRECT_TERMS: u64 = 4096;
const QUAD_PANELS: usize = 4096;
const MIN_DISTINCT: usize = 10;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FitResult {
    pub beta: f64,
    /// `1` for a pure power law.
    pub gamma: f64,
    pub log_likelihood: f64,
    pub k_min: u64,
    /// Observations with `k ≥ k_min`.
    pub n_obs: u64,
    /// Likelihood evaluations spent.
    pub iterations: usize,
}

#[derive(Clone, Copy, Debug)]
struct Stats {
    n: f64,
    sum_ln: f64,
    sum_k: f64,
    k_min: u64,
}

impl Stats {
    fn new(h: &DegreeHistogram, k_min: u64) -> Result<Self, AnalysisError> {
        if k_min == 0 {
            return Err(AnalysisError::InvalidArgument("k_min must be at least 1".into()));
        }
        if h.is_empty() {
            return Err(AnalysisError::EmptyHistogram);
        }
        let (mut n, mut sum_ln, mut sum_k, mut distinct) = (0u64, 0.0, 0.0, 0usize);
        for (k, c) in h.iter().filter(|(k, _)| *k >= k_min) {
            let m = c.total();
            if m == 0 {
                continue;
            }
            distinct += 1;
            n += m;
            sum_ln += m as f64 * (k as f64).ln();
            sum_k += m as f64 * k as f64;
        }
        if distinct < MIN_DISTINCT {
            return Err(AnalysisError::InsufficientData(format!(
                "{distinct} distinct degrees at k >= {k_min}; at least {MIN_DISTINCT} are needed"
            )));
        }
        Ok(Self {
            n: n as f64,
            sum_ln,
            sum_k,
            k_min,
        })
    }

    fn ll(&self, beta: f64, gamma: f64) -> f64 {
        let lz = ln_partition(beta, gamma, self.k_min);
        if !lz.is_finite() {
            return f64::NEG_INFINITY;
        }
        -beta * self.sum_ln + self.sum_k * gamma.ln() - self.n * lz
    }
}

/// `ln Σ_{k ≥ k_min} k^{−β} γ^k`, `+∞` when the sum diverges (`γ = 1`,
/// `β ≤ 1`).
///
/// Terms are summed directly until the geometric bound on the remainder is
/// negligible; otherwise the remainder after [`DIRECT_TERMS`] terms comes
/// from an Euler–Maclaurin expansion whose integral is evaluated by Simpson's
/// rule in `u = ln(x/N)`.
pub fn ln_partition(beta: f64, gamma: f64, k_min: u64) -> f64 {
    assert!(k_min >= 1, "k_min must be at least 1");
    assert!(gamma > 0.0 && gamma <= 1.0, "γ = {gamma} outside (0, 1]");
    if gamma == 1.0 && beta <= 1.0 {
        return f64::INFINITY;
    }
    let lg = gamma.ln();
    let k0 = k_min as f64;
    // terms relative to the first one keep everything in range
    let ln_first = -beta * k0.ln() + k0 * lg;
    let rel = |k: f64| (-beta * (k / k0).ln() + (k - k0) * lg).exp();
    let geometric_tail = if gamma < 1.0 { gamma / (1.0 - gamma) } else { f64::INFINITY };

    let mut sum = 0.0;
    let mut comp = 0.0;
    for j in 0..DIRECT_TERMS {
        let r = rel(k0 + j as f64);
        // Kahan summation
        let y = r - comp;
        let s = sum + y;
        comp = (s - sum) - y;
        sum = s;
        // terms decrease at least geometrically with ratio γ
        if r * geometric_tail < 1e-17 * sum {
            return ln_first + sum.ln();
        }
    }

    let n = k0 + DIRECT_TERMS as f64;
    let r_n = rel(n);
    let g1 = -beta / n + lg;
    let g2 = beta / (n * n);
    let g3 = -2.0 * beta / (n * n * n);
    let d1 = r_n * g1;
    let d3 = r_n * (g1 * g1 * g1 + 3.0 * g1 * g2 + g3);
    let tail = n * r_n * tail_integral(beta, -lg * n) + r_n / 2.0 - d1 / 12.0 + d3 / 720.0;
    ln_first + (sum + tail).ln()
}

/// `∫_0^∞ exp((1−β)u − a(e^u − 1)) du` for `a ≥ 0` (with `β > 1` when `a = 0`).
fn tail_integral(beta: f64, a: f64) -> f64 {
    if a == 0.0 {
        return 1.0 / (beta - 1.0);
    }
    let h = |u: f64| (1.0 - beta) * u - a * u.exp_m1();
    let u_peak = if 1.0 - beta > a { ((1.0 - beta) / a).ln() } else { 0.0 };
    let h_max = h(u_peak);
    let mut upper = u_peak + 1.0;
    while h(upper) > h_max - 60.0 {
        upper *= 2.0;
    }
    let step = upper / QUAD_PANELS as f64;
    let f = |u: f64| (h(u) - h_max).exp();
    let mut acc = f(0.0) + f(upper);
    for i in 1..QUAD_PANELS {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * f(i as f64 * step);
    }
    acc * step / 3.0 * h_max.exp()
}

/// Log-likelihood of the pooled degrees `k ≥ k_min` under `(β, γ)`.
pub fn log_likelihood(h: &DegreeHistogram, k_min: u64, beta: f64, gamma: f64) -> Result<f64, AnalysisError> {
    Ok(Stats::new(h, k_min)?.ll(beta, gamma))
}

/// Maximizes `f` on `[a, b]` with a fixed number of golden-section steps and
/// returns the best point evaluated.
fn golden_max<F: FnMut(f64) -> f64>(mut f: F, mut a: f64, mut b: f64, steps: usize) -> (f64, f64) {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = b - inv_phi * (b - a);
    let mut x2 = a + inv_phi * (b - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    for _ in 0..steps {
        if f1 >= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = f(x2);
        }
    }
    if f1 >= f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

/// Fits `Pr[k] ∝ k^{−β} γ^k` on `k ≥ k_min` with `β ∈ [0, 6]`, `γ ∈ (0, 1]`.
pub fn fit_powerlaw_cutoff(h: &DegreeHistogram, k_min: u64) -> Result<FitResult, AnalysisError> {
    let stats = Stats::new(h, k_min)?;
    let mut evaluations = 0usize;
    let mut ll = |beta: f64, gamma: f64| {
        evaluations += 1;
        stats.ll(beta, gamma)
    };

    let mut best = (f64::NAN, f64::NAN, f64::NEG_INFINITY);
    let consider = |b: f64, g: f64, v: f64, best: &mut (f64, f64, f64)| {
        if v > best.2 {
            *best = (b, g, v);
        }
    };

    let gammas: Vec<f64> = (1..=19)
        .map(|i| i as f64 * 0.05)
        .chain([0.96, 0.97, 0.98, 0.99, 0.995, 0.999, 0.9999, 1.0])
        .collect();
    for i in 0..=24 {
        let b = BETA_RANGE.0 + (BETA_RANGE.1 - BETA_RANGE.0) * i as f64 / 24.0;
        for &g in &gammas {
            let v = ll(b, g);
            consider(b, g, v, &mut best);
        }
    }

    let eta_lo = GAMMA_FLOOR.ln();
    let mut profile = |b: f64| -> (f64, f64) {
        let (eta, v) = golden_max(|eta| ll(b, eta.exp()), eta_lo, 0.0, 55);
        let at_one = ll(b, 1.0);
        if at_one >= v {
            (1.0, at_one)
        } else {
            (eta.exp(), v)
        }
    };
    let mut best_gamma_for = |b: f64, cache: &mut Vec<(f64, f64, f64)>| -> f64 {
        let (g, v) = profile(b);
        cache.push((b, g, v));
        v
    };
    let mut visited = Vec::new();
    golden_max(|b| best_gamma_for(b, &mut visited), BETA_RANGE.0, BETA_RANGE.1, 45);
    for &(b, g, v) in &visited {
        consider(b, g, v, &mut best);
    }

    Ok(FitResult {
        beta: best.0,
        gamma: best.1,
        log_likelihood: best.2,
        k_min,
        n_obs: stats.n as u64,
        iterations: evaluations,
    })
}

/// Fits a pure discrete power law `Pr[k] ∝ k^{−β}` on `k ≥ k_min`, `β ∈ (1, 6]`.
pub fn fit_powerlaw(h: &DegreeHistogram, k_min: u64) -> Result<FitResult, AnalysisError> {
    let stats = Stats::new(h, k_min)?;
    let mut evaluations = 0usize;
    let (beta, v) = golden_max(
        |b| {
            evaluations += 1;
            stats.ll(b, 1.0)
        },
        1.0 + 1e-9,
        BETA_RANGE.1,
        60,
    );
    Ok(FitResult {
        beta,
        gamma: 1.0,
        log_likelihood: v,
        k_min,
        n_obs: stats.n as u64,
        iterations: evaluations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute(beta: f64, gamma: f64, k_min: u64, terms: u64) -> f64 {
        (k_min..k_min + terms)
            .map(|k| (-beta * (k as f64).ln() + k as f64 * gamma.ln()).exp())
            .sum::<f64>()
    }

    #[test]
    fn partition_against_brute_force() {
        for &(b, g, k) in &[
            (0.0, 0.5, 1u64),
            (0.15, 0.94, 1),
            (1.3, 0.9, 3),
            (0.5, 0.999, 1),
            (2.5, 0.9999, 10),
            (0.2, 0.99999, 1),
        ] {
            let exact = brute(b, g, k, 20_000_000);
            let z = ln_partition(b, g, k).exp();
            assert!((z / exact - 1.0).abs() < 1e-9, "β={b} γ={g}: {z} vs {exact}");
        }
    }

    #[test]
    fn partition_zeta_values() {
        let pi2_6 = std::f64::consts::PI.powi(2) / 6.0;
        assert!((ln_partition(2.0, 1.0, 1).exp() - pi2_6).abs() < 1e-12);
        assert!((ln_partition(3.0, 1.0, 1).exp() - 1.2020569031595942).abs() < 1e-12);
        assert!((ln_partition(2.0, 1.0, 2).exp() - (pi2_6 - 1.0)).abs() < 1e-12);
        assert_eq!(ln_partition(1.0, 1.0, 1), f64::INFINITY);
        // geometric series
        let g: f64 = 0.7;
        assert!((ln_partition(0.0, g, 1).exp() - g / (1.0 - g)).abs() < 1e-14);
    }

    #[test]
    fn golden_section_finds_parabola_top() {
        let (x, v) = golden_max(|x| -(x - 1.234).powi(2), -5.0, 5.0, 60);
        assert!((x - 1.234).abs() < 1e-8);
        assert!(v <= 0.0);
    }

    #[test]
    fn rejects_thin_data() {
        let h = DegreeHistogram::from_counts(0, (1..=9).map(|k| (k, 5)));
        assert!(matches!(fit_powerlaw_cutoff(&h, 1), Err(AnalysisError::InsufficientData(_))));
        assert!(fit_powerlaw_cutoff(&DegreeHistogram::new(0), 1).is_err());
        let h = DegreeHistogram::from_counts(0, (1..=20).map(|k| (k, 5)));
        assert!(fit_powerlaw_cutoff(&h, 0).is_err());
        assert!(fit_powerlaw_cutoff(&h, 12).is_err());
    }
}
