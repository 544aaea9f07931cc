//! Hyperedge cardinality laws.
//!
//! Every law is supported on the positive integers and is immutable after
//! construction. Sampling consumes the caller's rng in a fixed pattern:
//! `Constant` draws nothing, `TruncatedPoisson` draws one `f64`, and
//! `Empirical` draws one integer below the number of observations.

use std::fmt;
use std::fs;
use std::path::Path;

use rand::Rng;
use statrs::function::gamma::ln_gamma;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CardinalityError {
    #[error("constant cardinality must be at least 1, got {0}")]
    InvalidConstant(u64),
    #[error("Poisson rate must be finite and positive, got {0}")]
    InvalidRate(f64),
    #[error("cardinality must be at least 1, got {0}")]
    NonPositiveSize(u64),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("no hyperedge sizes found")]
    Empty,
    #[error("reading {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

/// Upper CDF threshold at which the truncated Poisson table is capped.
const POISSON_CDF_CAP: f64 = 1.0 - 1e-15;

#[derive(Clone, Debug, PartialEq)]
pub struct TruncatedPoisson {
    lambda: f64,
    /// `cdf[i] = Pr[Y <= i + 1]`, accumulated forward until the cap.
    cdf: Vec<f64>,
}

impl TruncatedPoisson {
    pub fn new(lambda: f64) -> Result<Self, CardinalityError> {
        if !(lambda.is_finite() && lambda > 0.0) {
            return Err(CardinalityError::InvalidRate(lambda));
        }
        let mut cdf = Vec::new();
        let mut acc = 0.0;
        let mut k = 1u64;
        loop {
            let p = truncated_poisson_pmf(lambda, k);
            acc += p;
            cdf.push(acc);
            // rounding can keep `acc` just under the cap; past the mode a
            // negligible term also ends the table
            if acc > POISSON_CDF_CAP || (k as f64 > lambda && p < 1e-17) {
                break;
            }
            k += 1;
        }
        Ok(Self { lambda, cdf })
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// Largest value the inverse-CDF sampler can return.
    pub fn cap(&self) -> u64 {
        self.cdf.len() as u64
    }

    fn sample_uniform(&self, u: f64) -> u64 {
        let i = self.cdf.partition_point(|&c| c <= u);
        (i as u64 + 1).min(self.cap())
    }
}

fn ln_expm1(x: f64) -> f64 {
    if x > 30.0 {
        x + (-(-x).exp()).ln_1p()
    } else {
        x.exp_m1().ln()
    }
}

fn truncated_poisson_pmf(lambda: f64, k: u64) -> f64 {
    let kf = k as f64;
    (kf * lambda.ln() - ln_gamma(kf + 1.0) - ln_expm1(lambda)).exp()
}

/// Histogram of observed hyperedge sizes, stored densely by size.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EmpiricalLaw {
    /// `counts[k]` observations of size `k`; `counts[0]` is always 0.
    counts: Vec<u64>,
    /// Running totals of `counts`, used for exact integer inverse-CDF draws.
    cumulative: Vec<u64>,
    total: u64,
    size_sum: u64,
}

impl EmpiricalLaw {
    /// Builds a law from `(size, count)` pairs; repeated sizes are merged.
    pub fn from_counts<I>(pairs: I) -> Result<Self, CardinalityError>
    where
        I: IntoIterator<Item = (u64, u64)>,
    {
        let mut counts: Vec<u64> = vec![0];
        for (size, count) in pairs {
            if size == 0 {
                return Err(CardinalityError::NonPositiveSize(size));
            }
            let k = size as usize;
            if counts.len() <= k {
                counts.resize(k + 1, 0);
            }
            counts[k] += count;
        }
        while counts.len() > 1 && *counts.last().unwrap() == 0 {
            counts.pop();
        }
        let total: u64 = counts.iter().sum();
        if total == 0 {
            return Err(CardinalityError::Empty);
        }
        let size_sum = counts.iter().enumerate().map(|(k, &c)| k as u64 * c).sum();
        let cumulative = counts
            .iter()
            .scan(0u64, |acc, &c| {
                *acc += c;
                Some(*acc)
            })
            .collect();
        Ok(Self {
            counts,
            cumulative,
            total,
            size_sum,
        })
    }

    /// Parses either one size per line or `size,count` rows. The layout is
    /// taken from the first non-blank line and must be used consistently; `#`
    /// starts a comment.
    pub fn parse(text: &str) -> Result<Self, CardinalityError> {
        let mut columns = None;
        let mut pairs = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            // `#` starts a comment
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split(',').map(str::trim).collect();
            let expected = *columns.get_or_insert(fields.len());
            if fields.len() != expected || !(1..=2).contains(&fields.len()) {
                return Err(CardinalityError::Parse {
                    line: line_no,
                    message: format!(
                        "expected {} column(s), found {}",
                        expected.min(2),
                        fields.len()
                    ),
                });
            }
            let size = parse_positive(fields[0], line_no, "size")?;
            let count = match fields.get(1) {
                Some(c) => parse_positive(c, line_no, "count")?,
                None => 1,
            };
            pairs.push((size, count));
        }
        if pairs.is_empty() {
            return Err(CardinalityError::Empty);
        }
        Self::from_counts(pairs)
    }

    pub fn counts(&self) -> impl Iterator<Item = (u64, u64)> + '_ {
        self.counts
            .iter()
            .enumerate()
            .filter(|(_, &c)| c > 0)
            .map(|(k, &c)| (k as u64, c))
    }

    pub fn observations(&self) -> u64 {
        self.total
    }

    pub fn max_size(&self) -> u64 {
        self.counts.len() as u64 - 1
    }

    /// `size,count` rendering that [`EmpiricalLaw::parse`] reads back.
    pub fn to_histogram_string(&self) -> String {
        let mut out = String::new();
        for (k, c) in self.counts() {
            out.push_str(&format!("{k},{c}\n"));
        }
        out
    }
}

fn parse_positive(field: &str, line: usize, what: &str) -> Result<u64, CardinalityError> {
    match field.parse::<u64>() {
        Ok(v) if v > 0 => Ok(v),
        _ => Err(CardinalityError::Parse {
            line,
            message: format!("{what} must be a positive integer, found {field:?}"),
        }),
    }
}

/// Distribution of the cardinality `Y_t` of each added hyperedge.
#[derive(Clone, Debug, PartialEq)]
pub enum CardinalityLaw {
    Constant(u64),
    TruncatedPoisson(TruncatedPoisson),
    Empirical(EmpiricalLaw),
}

impl CardinalityLaw {
    pub fn constant(m: u64) -> Result<Self, CardinalityError> {
        if m == 0 {
            return Err(CardinalityError::InvalidConstant(m));
        }
        Ok(Self::Constant(m))
    }

    pub fn truncated_poisson(lambda: f64) -> Result<Self, CardinalityError> {
        TruncatedPoisson::new(lambda).map(Self::TruncatedPoisson)
    }

    pub fn empirical<I>(pairs: I) -> Result<Self, CardinalityError>
    where
        I: IntoIterator<Item = (u64, u64)>,
    {
        EmpiricalLaw::from_counts(pairs).map(Self::Empirical)
    }

    /// Loads an empirical law from a sizes file (see [`EmpiricalLaw::parse`]).
    pub fn from_sizes_file(path: impl AsRef<Path>) -> Result<Self, CardinalityError> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|source| CardinalityError::Io {
            path: path.display().to_string(),
            source,
        })?;
        EmpiricalLaw::parse(&text).map(Self::Empirical)
    }

    /// `E[Y]`.
    pub fn mean(&self) -> f64 {
        match self {
            Self::Constant(m) => *m as f64,
            Self::TruncatedPoisson(p) => p.lambda / -(-p.lambda).exp_m1(),
            Self::Empirical(e) => e.size_sum as f64 / e.total as f64,
        }
    }

    pub fn variance(&self) -> f64 {
        match self {
            Self::Constant(_) => 0.0,
            Self::TruncatedPoisson(p) => {
                let l = p.lambda;
                let second = (l + l * l) / -(-l).exp_m1();
                let mu = self.mean();
                second - mu * mu
            }
            Self::Empirical(e) => {
                let n = e.total as f64;
                let mu = e.size_sum as f64 / n;
                e.counts()
                    .map(|(k, c)| c as f64 * (k as f64 - mu).powi(2))
                    .sum::<f64>()
                    / n
            }
        }
    }

    /// `Pr[Y = k]`; zero outside the support.
    pub fn pmf(&self, k: u64) -> Result<f64, CardinalityError> {
        if k == 0 {
            return Err(CardinalityError::NonPositiveSize(k));
        }
        Ok(match self {
            Self::Constant(m) => {
                if k == *m {
                    1.0
                } else {
                    0.0
                }
            }
            Self::TruncatedPoisson(p) => truncated_poisson_pmf(p.lambda, k),
            Self::Empirical(e) => {
                e.counts.get(k as usize).copied().unwrap_or(0) as f64 / e.total as f64
            }
        })
    }

    /// Largest value `sample` can return.
    pub fn max_value(&self) -> u64 {
        match self {
            Self::Constant(m) => *m,
            Self::TruncatedPoisson(p) => p.cap(),
            Self::Empirical(e) => e.max_size(),
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> u64 {
        match self {
            Self::Constant(m) => *m,
            Self::TruncatedPoisson(p) => p.sample_uniform(rng.random::<f64>()),
            Self::Empirical(e) => {
                let r = rng.random_range(0..e.total);
                e.cumulative.partition_point(|&c| c <= r) as u64
            }
        }
    }
}

impl fmt::Display for CardinalityLaw {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Constant(m) => write!(f, "constant:{m}"),
            Self::TruncatedPoisson(p) => write!(f, "poisson:{}", p.lambda),
            Self::Empirical(e) => write!(
                f,
                "empirical({} observations, max size {})",
                e.total,
                e.max_size()
            ),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn constant_law() {
        let law = CardinalityLaw::constant(2).unwrap();
        assert_eq!(law.mean(), 2.0);
        let law = CardinalityLaw::constant(3).unwrap();
        assert_eq!(law.pmf(3).unwrap(), 1.0);
        assert_eq!(law.pmf(2).unwrap(), 0.0);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let law = CardinalityLaw::constant(4).unwrap();
        assert!((0..100).all(|_| law.sample(&mut rng) == 4));
        assert!(CardinalityLaw::constant(0).is_err());
    }

    #[test]
    fn poisson_mean_by_direct_summation() {
        let lambda: f64 = 4.0;
        // independent route: term recurrence of the Poisson series
        let norm = lambda.exp() - 1.0;
        let mut term = 1.0;
        let mut mean = 0.0;
        let mut mass = 0.0;
        for k in 1..200 {
            term *= lambda / k as f64;
            mean += k as f64 * term / norm;
            mass += term / norm;
        }
        let law = CardinalityLaw::truncated_poisson(lambda).unwrap();
        assert!((law.mean() - mean).abs() < 1e-12);
        assert!((law.mean() - 4.074629441455096).abs() < 1e-12);
        assert!((mass - 1.0).abs() < 1e-12);
        let pmf_sum: f64 = (1..200).map(|k| law.pmf(k).unwrap()).sum();
        assert!((pmf_sum - 1.0).abs() < 1e-12);
        let pmf_mean: f64 = (1..200).map(|k| k as f64 * law.pmf(k).unwrap()).sum();
        assert!((pmf_mean - law.mean()).abs() < 1e-10);
    }

    #[test]
    fn poisson_pmf_at_one() {
        let law = CardinalityLaw::truncated_poisson(4.0).unwrap();
        let expected = 4.0 / (4f64.exp() - 1.0);
        assert!((law.pmf(1).unwrap() - expected).abs() < 1e-15);
        assert!((law.pmf(1).unwrap() - 0.0746294).abs() < 1e-7);
        assert!(law.pmf(0).is_err());
    }

    #[test]
    fn poisson_large_rate_is_finite() {
        let law = CardinalityLaw::truncated_poisson(800.0).unwrap();
        assert!((law.mean() - 800.0).abs() < 1e-9);
        assert!(law.pmf(800).unwrap() > 0.0);
        assert!(CardinalityLaw::truncated_poisson(0.0).is_err());
        assert!(CardinalityLaw::truncated_poisson(f64::NAN).is_err());
    }

    #[test]
    fn poisson_inverse_cdf_is_clamped() {
        let tp = TruncatedPoisson::new(4.0).unwrap();
        assert_eq!(tp.sample_uniform(0.0), 1);
        assert_eq!(tp.sample_uniform(1.0 - 1e-17), tp.cap());
        assert!(tp.cap() > 20 && tp.cap() < 40);
    }

    #[test]
    fn sample_means_within_clt_band() {
        let laws = [
            CardinalityLaw::truncated_poisson(4.0).unwrap(),
            CardinalityLaw::empirical([(1, 5), (2, 3), (9, 2)]).unwrap(),
            CardinalityLaw::constant(3).unwrap(),
        ];
        let n = 1_000_000;
        for law in &laws {
            let mut rng = ChaCha8Rng::seed_from_u64(42);
            let sum: u64 = (0..n).map(|_| law.sample(&mut rng)).sum();
            let mean = sum as f64 / n as f64;
            let band = 4.0 * law.variance().sqrt() / (n as f64).sqrt();
            assert!((mean - law.mean()).abs() <= band, "{law}: {mean} vs {}", law.mean());
        }
        let poisson = &laws[0];
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mean = (0..n).map(|_| poisson.sample(&mut rng)).sum::<u64>() as f64 / n as f64;
        assert!((mean - 4.0746).abs() < 0.01);
    }

    #[test]
    fn empirical_basics() {
        let law = CardinalityLaw::empirical([(1, 1), (3, 1)]).unwrap();
        assert_eq!(law.mean(), 2.0);
        let law = CardinalityLaw::empirical([(2, 3), (5, 1)]).unwrap();
        assert_eq!(law.pmf(2).unwrap(), 0.75);
        assert_eq!(law.pmf(40).unwrap(), 0.0);
        let one = CardinalityLaw::empirical([(1, 1)]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        assert!((0..100).all(|_| one.sample(&mut rng) == 1));
        assert!(CardinalityLaw::empirical([(0, 1)]).is_err());
        assert!(CardinalityLaw::empirical([(3, 0)]).is_err());
    }

    #[test]
    fn mean_independent_of_aggregation_order() {
        let a = CardinalityLaw::empirical([(2, 4), (7, 1), (2, 1), (3, 9)]).unwrap();
        let b = CardinalityLaw::empirical([(3, 4), (2, 5), (3, 5), (7, 1)]).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.mean(), b.mean());
    }

    #[test]
    fn parse_sizes() {
        let law = EmpiricalLaw::parse("2\n2\n3\n").unwrap();
        assert_eq!(law.counts().collect::<Vec<_>>(), vec![(2, 2), (3, 1)]);
        assert!((CardinalityLaw::Empirical(law).mean() - 7.0 / 3.0).abs() < 1e-15);

        let law = EmpiricalLaw::parse("2,10\r\n7,5\r\n").unwrap();
        assert_eq!(law.counts().collect::<Vec<_>>(), vec![(2, 10), (7, 5)]);
        assert_eq!(law.max_size(), 7);
        assert!((CardinalityLaw::Empirical(law).mean() - 55.0 / 15.0).abs() < 1e-15);
    }

    #[test]
    fn parse_errors_name_the_line() {
        match EmpiricalLaw::parse("2\n0\n") {
            Err(CardinalityError::Parse { line: 2, .. }) => {}
            other => panic!("unexpected {other:?}"),
        }
        match EmpiricalLaw::parse("1\n2\n2.5\n") {
            Err(CardinalityError::Parse { line: 3, .. }) => {}
            other => panic!("unexpected {other:?}"),
        }
        match EmpiricalLaw::parse("2,1\n3\n") {
            Err(CardinalityError::Parse { line: 2, .. }) => {}
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(EmpiricalLaw::parse(""), Err(CardinalityError::Empty)));
        assert!(matches!(EmpiricalLaw::parse("\n\n"), Err(CardinalityError::Empty)));
    }

    #[test]
    fn histogram_round_trip() {
        let law = EmpiricalLaw::from_counts([(1, 3), (4, 1), (17, 2)]).unwrap();
        let back = EmpiricalLaw::parse(&law.to_histogram_string()).unwrap();
        assert_eq!(law, back);
        let a = CardinalityLaw::Empirical(law);
        let b = CardinalityLaw::Empirical(back);
        for k in 1..=20 {
            assert_eq!(a.pmf(k).unwrap(), b.pmf(k).unwrap());
        }
    }
}
