//! Power-series evaluation of the Gauss hypergeometric function.

use super::TheoryError;

/// Hard cap on the number of series terms.
pub const MAX_TERMS: usize = 1_000_000;

/// Consecutive small terms required before the series is declared converged.
const QUIET_TERMS: usize = 3;

/// `₂F₁(a, b; c; z) = Σ (a)_n (b)_n / (c)_n · zⁿ / n!` for `|z| < 1`.
///
/// Terms are generated by the ratio recurrence and accumulated with Kahan
/// compensation. Summation stops once `QUIET_TERMS` consecutive terms are
/// below `tol · |partial sum|`.
pub fn gauss_2f1(a: f64, b: f64, c: f64, z: f64, tol: f64) -> Result<f64, TheoryError> {
    if !(tol > 0.0) {
        return Err(TheoryError::Domain(format!("tolerance must be positive, got {tol}")));
    }
    if c <= 0.0 && c.fract() == 0.0 {
        return Err(TheoryError::Domain(format!(
            "2F1 is undefined for non-positive integer c = {c}"
        )));
    }
    if !(z.abs() < 1.0) {
        return Err(TheoryError::Domain(format!(
            "2F1 series requires |z| < 1, got z = {z}"
        )));
    }
    let mut sum = 1.0f64;
    let mut carry = 0.0f64;
    let mut term = 1.0f64;
    let mut quiet = 0;
    for n in 0..MAX_TERMS {
        let nf = n as f64;
        term *= (a + nf) * (b + nf) / ((c + nf) * (nf + 1.0)) * z;
        let y = term - carry;
        let t = sum + y;
        carry = (t - sum) - y;
        sum = t;
        if term.abs() <= tol * sum.abs() {
            quiet += 1;
            if quiet == QUIET_TERMS {
                return Ok(sum);
            }
        } else {
            quiet = 0;
        }
    }
    Err(TheoryError::NonConvergence {
        iterations: MAX_TERMS,
        last_change: term.abs(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_argument() {
        for (a, b, c) in [(1.0, 2.0, 3.0), (-2.5, 0.3, 0.7), (5.0, 5.0, 1e-3)] {
            assert_eq!(gauss_2f1(a, b, c, 0.0, 1e-15).unwrap(), 1.0);
        }
    }

    #[test]
    fn log_identity() {
        let z: f64 = 0.5;
        let expected = -(1.0 - z).ln() / z;
        let got = gauss_2f1(1.0, 1.0, 2.0, z, 1e-16).unwrap();
        assert!((got - expected).abs() < 1e-14 * expected);
        assert!((got - 1.3862944).abs() < 1e-7);
    }

    #[test]
    fn binomial_identity() {
        // F(a, b; b; z) = (1 - z)^(-a)
        for &(a, z) in &[(2.0, 0.9), (0.5, -0.7), (3.3, 0.95)] {
            let got = gauss_2f1(a, 1.7, 1.7, z, 1e-16).unwrap();
            let expected = (1.0f64 - z).powf(-a);
            assert!((got - expected).abs() < 1e-11 * expected, "{a} {z}");
        }
    }

    #[test]
    fn terminating_series() {
        assert_eq!(gauss_2f1(0.0, 2.0, 3.5, 0.9, 1e-15).unwrap(), 1.0);
        // F(-2, b; c; z) = 1 - 2bz/c + b(b+1)z²/(c(c+1))
        let (b, c, z) = (1.5, 2.5, 0.4);
        let expected = 1.0 - 2.0 * b * z / c + b * (b + 1.0) * z * z / (c * (c + 1.0));
        assert!((gauss_2f1(-2.0, b, c, z, 1e-15).unwrap() - expected).abs() < 1e-15);
    }

    #[test]
    fn domain_errors() {
        assert!(matches!(gauss_2f1(1.0, 1.0, 0.0, 0.5, 1e-12), Err(TheoryError::Domain(_))));
        assert!(matches!(gauss_2f1(1.0, 1.0, -3.0, 0.5, 1e-12), Err(TheoryError::Domain(_))));
        assert!(matches!(gauss_2f1(1.0, 1.0, 2.0, 1.0, 1e-12), Err(TheoryError::Domain(_))));
        assert!(matches!(gauss_2f1(1.0, 1.0, 2.0, -1.5, 1e-12), Err(TheoryError::Domain(_))));
        assert!(gauss_2f1(1.0, 1.0, -2.5, 0.5, 1e-12).is_ok());
    }

    #[test]
    fn slow_series_hits_cap() {
        // terms decay like n^{-1/2}·zⁿ with z extremely close to 1
        match gauss_2f1(1.5, 1.0, 2.0, 1.0 - 1e-9, 1e-16) {
            Err(TheoryError::NonConvergence { iterations, last_change }) => {
                assert_eq!(iterations, MAX_TERMS);
                assert!(last_change > 0.0);
            }
            other => panic!("expected non-convergence, got {other:?}"),
        }
    }
}
