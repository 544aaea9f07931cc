use super::{AnalysisError, DegreeHistogram};

/// `(k, Pr[deg ≥ k])` for every `k` from the smallest to the largest
/// observed degree (pooled over active and inactive vertices).
pub fn ccdf(h: &DegreeHistogram) -> Result<Vec<(u64, f64)>, AnalysisError> {
    let (lo, hi) = match (h.min_degree(), h.max_degree()) {
        (Some(lo), Some(hi)) => (lo, hi),
        _ => return Err(AnalysisError::EmptyHistogram),
    };
    let total = h.total();
    let mut remaining = total;
    let mut out = Vec::with_capacity((hi - lo + 1) as usize);
    for k in lo..=hi {
        out.push((k, remaining as f64 / total as f64));
        remaining -= h.get(k).total();
    }
    Ok(out)
}

/// One logarithmic bin covering the integers `lo..=hi`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LogBin {
    pub lo: u64,
    pub hi: u64,
    /// Geometric mean of `lo` and `hi`.
    pub k_center: f64,
    /// `count / (width · total)`.
    pub density: f64,
}

impl LogBin {
    pub fn width(&self) -> u64 {
        self.hi - self.lo + 1
    }
}

fn edge(i: u64, bins_per_decade: u32) -> u64 {
    // the epsilon keeps exact powers of ten on the right side of the floor
    (10f64.powf(i as f64 / bins_per_decade as f64) + 1e-9).floor() as u64
}

/// Pooled degree pmf over geometric bins. Integer edges are
/// `E_i = ⌊10^{i/b}⌋`; bin `i ≥ 1` holds `E_{i−1} < k ≤ E_i` (with `E_0 = 0`),
/// and bins without integers are skipped.
pub fn log_binned_pmf(h: &DegreeHistogram, bins_per_decade: u32) -> Result<Vec<LogBin>, AnalysisError> {
    if bins_per_decade == 0 {
        return Err(AnalysisError::InvalidArgument("bins_per_decade must be at least 1".into()));
    }
    let max = match h.max_degree() {
        Some(m) => m,
        None => return Ok(Vec::new()),
    };
    let total = h.total() as f64;
    let mut bins = Vec::new();
    let mut prev = 0u64;
    let mut i = 1u64;
    while prev < max {
        let e = edge(i, bins_per_decade);
        i += 1;
        if e <= prev {
            continue;
        }
        let (lo, hi) = (prev + 1, e);
        let count: u64 = h.iter().filter(|(k, _)| (lo..=hi).contains(k)).map(|(_, c)| c.total()).sum();
        let width = (hi - lo + 1) as f64;
        bins.push(LogBin {
            lo,
            hi,
            k_center: ((lo as f64) * (hi as f64)).sqrt(),
            density: count as f64 / (width * total),
        });
        prev = e;
    }
    Ok(bins)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ccdf_hand_count() {
        let h = DegreeHistogram::from_counts(0, [(1, 2), (3, 2)]);
        assert_eq!(ccdf(&h).unwrap(), vec![(1, 1.0), (2, 0.5), (3, 0.5)]);
        let h = DegreeHistogram::from_counts(0, [(5, 7)]);
        assert_eq!(ccdf(&h).unwrap(), vec![(5, 1.0)]);
        assert!(ccdf(&DegreeHistogram::new(0)).is_err());
    }

    #[test]
    fn ccdf_differences_recover_pmf() {
        let counts = [(1, 40), (2, 21), (3, 9), (5, 4), (8, 1)];
        let h = DegreeHistogram::from_counts(0, counts);
        let c = ccdf(&h).unwrap();
        let n = h.total() as f64;
        for w in c.windows(2) {
            assert!(w[1].1 <= w[0].1);
            let pmf = w[0].1 - w[1].1;
            let expected = h.get(w[0].0).total() as f64 / n;
            assert!((pmf - expected).abs() < 1e-15);
        }
        let (k_last, p_last) = *c.last().unwrap();
        assert!((p_last - h.get(k_last).total() as f64 / n).abs() < 1e-15);
    }

    #[test]
    fn uniform_single_decade() {
        let h = DegreeHistogram::from_counts(0, (1..=10).map(|k| (k, 3)));
        let bins = log_binned_pmf(&h, 1).unwrap();
        assert_eq!(bins.len(), 1);
        assert_eq!((bins[0].lo, bins[0].hi), (1, 10));
        assert!((bins[0].density - 0.1).abs() < 1e-15);
    }

    #[test]
    fn binned_density_integrates_to_one() {
        let h = DegreeHistogram::from_counts(0, [(1, 500), (2, 200), (3, 90), (7, 30), (40, 3), (977, 1)]);
        for b in [1, 3, 5, 10, 20] {
            let bins = log_binned_pmf(&h, b).unwrap();
            let mass: f64 = bins.iter().map(|bin| bin.density * bin.width() as f64).sum();
            assert!((mass - 1.0).abs() < 1e-12, "{b} bins/decade");
            assert!(bins.windows(2).all(|w| w[0].hi + 1 == w[1].lo));
            assert_eq!(bins[0].lo, 1);
        }
        assert!(log_binned_pmf(&h, 0).is_err());
    }
}
