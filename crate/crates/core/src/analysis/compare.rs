use crate::theory::{expected_fraction, CutoffParams, FractionForm};

use super::{AnalysisError, DegreeHistogram};

/// Scanning stops here even if expected counts are still large.
const K_SCAN_MAX: u64 = 10_000_000;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CompareRow {
    pub k: u64,
    /// `N_k / |V|`
    pub empirical: f64,
    /// Limiting fraction from the exact expression.
    pub theoretical: f64,
    /// `|empirical − theoretical| / theoretical`
    pub rel_err: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Comparison {
    /// Degrees whose expected count `|V|·fraction` is at least the threshold.
    pub rows: Vec<CompareRow>,
    pub max_rel_err: f64,
    pub mean_rel_err: f64,
}

/// Compares the pooled degree fractions with the predicted ones over the
/// degrees with at least `min_expected` expected vertices.
pub fn compare_to_theory(
    h: &DegreeHistogram,
    cp: &CutoffParams,
    min_expected: f64,
) -> Result<Comparison, AnalysisError> {
    if h.is_empty() {
        return Err(AnalysisError::EmptyHistogram);
    }
    if !(min_expected > 0.0) {
        return Err(AnalysisError::InvalidArgument(format!(
            "min_expected must be positive, got {min_expected}"
        )));
    }
    let n = h.total() as f64;
    let max_k = h.max_degree().unwrap_or(1);
    let mut rows = Vec::new();
    for k in 1..=K_SCAN_MAX {
        let theoretical = expected_fraction(k, cp, FractionForm::Exact)?;
        if theoretical * n < min_expected {
            // the predicted fractions are eventually decreasing
            if k > max_k {
                break;
            }
            continue;
        }
        let empirical = h.get(k).total() as f64 / n;
        rows.push(CompareRow {
            k,
            empirical,
            theoretical,
            rel_err: (empirical - theoretical).abs() / theoretical,
        });
    }
    if rows.is_empty() {
        return Err(AnalysisError::InsufficientData(format!(
            "no degree has {min_expected} expected vertices among {n}"
        )));
    }
    let max_rel_err = rows.iter().map(|r| r.rel_err).fold(0.0, f64::max);
    let mean_rel_err = rows.iter().map(|r| r.rel_err).sum::<f64>() / rows.len() as f64;
    Ok(Comparison {
        rows,
        max_rel_err,
        mean_rel_err,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::Probabilities;
    use crate::theory::{cutoff_params, solve_theta, SolverOptions, TheoryParams};

    #[test]
    fn histogram_built_from_prediction_matches() {
        let tp = TheoryParams::new(Probabilities::new(0.3, 0.5, 0.2).unwrap(), 4.0).unwrap();
        let theta = solve_theta(&tp, SolverOptions::default()).unwrap().theta;
        let cp = cutoff_params(&tp, theta).unwrap();
        let n = 1e9;
        let counts: Vec<(u64, u64)> = (1..5000)
            .map(|k| (k, (expected_fraction(k, &cp, FractionForm::Exact).unwrap() * n).round() as u64))
            .filter(|&(_, c)| c > 0)
            .collect();
        let h = DegreeHistogram::from_counts(0, counts);
        let cmp = compare_to_theory(&h, &cp, 50.0).unwrap();
        assert!(cmp.rows.len() > 100);
        // rounding to integers and the missing mass beyond k = 5000 only
        assert!(cmp.max_rel_err < 0.02, "{}", cmp.max_rel_err);
        assert!(cmp.mean_rel_err < 1e-3, "{}", cmp.mean_rel_err);
        assert!(cmp.rows.iter().all(|r| r.theoretical * h.total() as f64 >= 50.0));
    }
}
