use crate::process::{RunTrace, TraceRow};

use super::AnalysisError;

/// Least-squares line `v ≈ intercept + slope·t`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    /// Coefficient of determination; `1` for a constant series.
    pub r2: f64,
    pub n: usize,
}

/// Fits `(t, v)` pairs with `t ≥ t_min` (typically `D_t` against `t` past a
/// burn-in).
pub fn slope_fit(points: &[(f64, f64)], t_min: f64) -> Result<LinearFit, AnalysisError> {
    let pts: Vec<(f64, f64)> = points.iter().copied().filter(|&(t, _)| t >= t_min).collect();
    let n = pts.len();
    if n < 2 {
        return Err(AnalysisError::InsufficientData(format!(
            "a slope needs at least two points past t = {t_min}, got {n}"
        )));
    }
    let nf = n as f64;
    let mt = pts.iter().map(|p| p.0).sum::<f64>() / nf;
    let mv = pts.iter().map(|p| p.1).sum::<f64>() / nf;
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for &(t, v) in &pts {
        let (dt, dv) = (t - mt, v - mv);
        sxx += dt * dt;
        sxy += dt * dv;
        syy += dv * dv;
    }
    if sxx == 0.0 {
        return Err(AnalysisError::Degenerate("all abscissae are equal".into()));
    }
    let slope = sxy / sxx;
    let r2 = if syy == 0.0 { 1.0 } else { sxy * sxy / (sxx * syy) };
    Ok(LinearFit {
        slope,
        intercept: mv - slope * mt,
        r2,
        n,
    })
}

/// Across-run moments of one quantity at a fixed time.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Moments {
    pub t: u64,
    /// Number of runs with a value at `t`.
    pub n: usize,
    pub mean: f64,
    /// Sample standard deviation (`n − 1` denominator; 0 for a single run).
    pub std: f64,
    /// `max_i |v_i − mean|`.
    pub max_dev: f64,
}

fn moments(t: u64, values: &[f64]) -> Moments {
    let n = values.len();
    let mean = values.iter().sum::<f64>() / n as f64;
    let ss: f64 = values.iter().map(|v| (v - mean) * (v - mean)).sum();
    Moments {
        t,
        n,
        mean,
        std: if n > 1 { (ss / (n - 1) as f64).sqrt() } else { 0.0 },
        max_dev: values.iter().map(|v| (v - mean).abs()).fold(0.0, f64::max),
    }
}

/// Moments of `value(row)` over the runs at each time. Runs without a row at
/// `t` are left out (terminated runs keep their frozen state); times that no
/// run covers are skipped. The summation order is the run order.
pub fn moments_at<F>(traces: &[RunTrace], times: &[u64], value: F) -> Vec<Moments>
where
    F: Fn(&TraceRow) -> Option<f64>,
{
    let mut out = Vec::with_capacity(times.len());
    let mut values = Vec::with_capacity(traces.len());
    for &t in times {
        values.clear();
        values.extend(traces.iter().filter_map(|tr| tr.state_at(t)).filter_map(|r| value(&r)));
        if !values.is_empty() {
            out.push(moments(t, &values));
        }
    }
    out
}

/// Spread of `D_t/t` across runs.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConcentrationRow {
    pub t: u64,
    /// Mean of `D_t/t`.
    pub mean: f64,
    /// Sample standard deviation of `D_t/t`.
    pub std: f64,
    /// `max_i |D_t^{(i)} − mean D_t| / t`.
    pub max_dev: f64,
}

/// Concentration of `D_t/t` over an ensemble; needs at least two runs and
/// ignores `t = 0`.
pub fn concentration_report(traces: &[RunTrace], times: &[u64]) -> Result<Vec<ConcentrationRow>, AnalysisError> {
    if traces.len() < 2 {
        return Err(AnalysisError::InsufficientData(format!(
            "concentration needs at least two runs, got {}",
            traces.len()
        )));
    }
    Ok(moments_at(traces, times, |r| (r.t > 0).then(|| r.active_degree as f64 / r.t as f64))
        .into_iter()
        .map(|m| ConcentrationRow {
            t: m.t,
            mean: m.mean,
            std: m.std,
            max_dev: m.max_dev,
        })
        .collect())
}

/// Running average of deactivated degrees for every recorded step after the
/// first deactivation.
pub fn theta_convergence(trace: &RunTrace) -> Vec<(u64, f64)> {
    trace
        .rows()
        .filter_map(|r| r.avg_deactivated_degree().map(|a| (r.t, a)))
        .collect()
}

/// Ensemble mean of the per-run running averages at each time, over the
/// runs that have deactivated at least once by then.
pub fn theta_convergence_ensemble(traces: &[RunTrace], times: &[u64]) -> Vec<Moments> {
    moments_at(traces, times, |r| r.avg_deactivated_degree())
}
