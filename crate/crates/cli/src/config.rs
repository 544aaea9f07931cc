//! Run configuration: a flat `key = value` file overridden by flags.

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use clap::Args;
use hypercutoff::process::ModelParams;
use hypercutoff::theory::SolverOptions;
use hypercutoff::{CardinalityLaw, Probabilities, TheoryParams};

use crate::error::CliError;

/// Flags shared by every subcommand; each one overrides the same key in
/// `--config`.
#[derive(Args, Clone, Debug, Default)]
pub struct Flags {
    /// `key = value` manifest; relative paths inside it are resolved from its
    /// directory.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Seed of a single run, or master seed of an ensemble.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub steps: Option<u64>,
    #[arg(long)]
    pub runs: Option<u64>,
    #[arg(long)]
    pub pv: Option<f64>,
    #[arg(long)]
    pub pe: Option<f64>,
    #[arg(long)]
    pub pd: Option<f64>,
    /// `constant:m`, `poisson:λ` or `empirical:<path>`.
    #[arg(long)]
    pub cardinality: Option<String>,
    /// Output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Fixed-point tolerance.
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long)]
    pub max_iter: Option<usize>,
    /// Exit with code 3 when a run finds no active vertex.
    #[arg(long)]
    pub fail_on_termination: bool,
    /// Run ensemble members on all cores (output is identical either way).
    #[arg(long)]
    pub parallel: bool,
    /// Replace terminated ensemble runs by further runs and exclude them from
    /// the averages.
    #[arg(long)]
    pub resample_terminated: bool,
    /// Comma-separated snapshot times for degree histograms.
    #[arg(long)]
    pub snapshots: Option<String>,
    /// Trace every `stride` steps (simulate) or aggregate on that grid
    /// (ensemble).
    #[arg(long)]
    pub stride: Option<u64>,
    /// Largest degree in `theory_pmf.csv`.
    #[arg(long)]
    pub k_max: Option<u64>,
    /// Smallest degree used by the fits.
    #[arg(long)]
    pub k_min: Option<u64>,
    /// Expected-count threshold of the theory comparison.
    #[arg(long)]
    pub min_expected: Option<f64>,
    /// Degree histogram (`k,active,inactive`) for `compare`.
    #[arg(long)]
    pub degrees: Option<PathBuf>,
    /// Use this `θ` instead of solving for it.
    #[arg(long)]
    pub theta: Option<f64>,
    /// First time used by the slope fit (default: steps / 10).
    #[arg(long)]
    pub burn_in: Option<u64>,
    /// Also write the hyperedge log (simulate).
    #[arg(long)]
    pub hyperedges: bool,
    #[arg(long)]
    pub bins_per_decade: Option<u32>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum CardinalitySpec {
    Constant(u64),
    Poisson(f64),
    Empirical(PathBuf),
}

impl CardinalitySpec {
    /// Parses `constant:m`, `poisson:λ` or `empirical:<path>`; relative paths
    /// are joined to `base`.
    pub fn parse(s: &str, base: &Path) -> Result<Self, CliError> {
        let bad = || CliError::Config(format!("cardinality must be constant:m, poisson:λ or empirical:<path>, got {s:?}"));
        let (kind, arg) = s.split_once(':').ok_or_else(bad)?;
        let arg = arg.trim();
        match kind.trim() {
            "constant" => arg.parse().map(CardinalitySpec::Constant).map_err(|_| bad()),
            "poisson" => arg.parse().map(CardinalitySpec::Poisson).map_err(|_| bad()),
            "empirical" if !arg.is_empty() => Ok(CardinalitySpec::Empirical(base.join(arg))),
            _ => Err(bad()),
        }
    }

    pub fn law(&self) -> Result<CardinalityLaw, CliError> {
        Ok(match self {
            CardinalitySpec::Constant(m) => CardinalityLaw::constant(*m)?,
            CardinalitySpec::Poisson(l) => CardinalityLaw::truncated_poisson(*l)?,
            CardinalitySpec::Empirical(path) => CardinalityLaw::from_sizes_file(path)
                .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?,
        })
    }
}

impl fmt::Display for CardinalitySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CardinalitySpec::Constant(m) => write!(f, "constant:{m}"),
            CardinalitySpec::Poisson(l) => write!(f, "poisson:{l}"),
            CardinalitySpec::Empirical(p) => write!(f, "empirical:{}", p.display()),
        }
    }
}

/// Fully resolved settings of one invocation.
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub p_v: f64,
    pub p_e: f64,
    pub p_d: f64,
    pub cardinality: CardinalitySpec,
    pub steps: u64,
    pub runs: u64,
    pub seed: u64,
    /// `None` means the command's default.
    pub snapshots: Option<Vec<u64>>,
    pub out: PathBuf,
    pub tol: f64,
    pub max_iter: usize,
    pub stride: Option<u64>,
    pub k_max: u64,
    pub k_min: u64,
    pub min_expected: f64,
    pub degrees: Option<PathBuf>,
    pub theta: Option<f64>,
    pub burn_in: Option<u64>,
    pub bins_per_decade: u32,
    pub fail_on_termination: bool,
    pub parallel: bool,
    pub resample_terminated: bool,
    pub hyperedges: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            p_v: 0.3,
            p_e: 0.5,
            p_d: 0.2,
            cardinality: CardinalitySpec::Poisson(4.0),
            steps: 100_000,
            runs: 10,
            seed: 1,
            snapshots: None,
            out: PathBuf::from("."),
            tol: SolverOptions::default().tol,
            max_iter: SolverOptions::default().max_iter,
            stride: None,
            k_max: 100,
            k_min: 1,
            min_expected: 50.0,
            degrees: None,
            theta: None,
            burn_in: None,
            bins_per_decade: 10,
            fail_on_termination: false,
            parallel: false,
            resample_terminated: false,
            hyperedges: false,
        }
    }
}

const KEYS: &[&str] = &[
    "pv", "pe", "pd", "cardinality", "steps", "runs", "seed", "snapshots", "out", "tol", "max_iter", "stride",
    "k_max", "k_min", "min_expected", "degrees", "theta", "burn_in", "bins_per_decade", "fail_on_termination",
    "parallel", "resample_terminated", "hyperedges",
];

/// `key → (value, line)` from a manifest. `#` starts a comment.
pub fn parse_manifest(text: &str) -> Result<BTreeMap<String, (String, usize)>, CliError> {
    let mut out = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (k, v) = content
            .split_once('=')
            .ok_or_else(|| CliError::Config(format!("line {line}: expected key = value, got {content:?}")))?;
        let k = k.trim().replace('-', "_");
        if !KEYS.contains(&k.as_str()) {
            return Err(CliError::Config(format!("line {line}: unknown key {k:?}")));
        }
        if out.insert(k.clone(), (v.trim().to_string(), line)).is_some() {
            return Err(CliError::Config(format!("line {line}: duplicate key {k:?}")));
        }
    }
    Ok(out)
}

fn parse_value<T: std::str::FromStr>(key: &str, value: &str, line: usize) -> Result<T, CliError> {
    value
        .parse()
        .map_err(|_| CliError::Config(format!("line {line}: cannot parse {key} = {value:?}")))
}

fn parse_bool(key: &str, value: &str, line: usize) -> Result<bool, CliError> {
    match value {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        _ => Err(CliError::Config(format!("line {line}: {key} must be true or false, got {value:?}"))),
    }
}

/// Comma-separated non-decreasing list of times.
pub fn parse_times(s: &str) -> Result<Vec<u64>, CliError> {
    let mut times: Vec<u64> = s
        .split(',')
        .map(str::trim)
        .filter(|x| !x.is_empty())
        .map(|x| x.parse().map_err(|_| CliError::Config(format!("bad snapshot time {x:?}"))))
        .collect::<Result<_, _>>()?;
    times.sort_unstable();
    times.dedup();
    Ok(times)
}

impl RunConfig {
    /// Defaults, then the manifest named by `--config`, then explicit flags.
    pub fn resolve(flags: &Flags) -> Result<Self, CliError> {
        let mut cfg = RunConfig::default();
        if let Some(path) = &flags.config {
            let text = fs::read_to_string(path).map_err(CliError::io(path))?;
            let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
            cfg.apply_manifest(&text, &base)
                .map_err(|e| match e {
                    CliError::Config(m) => CliError::Config(format!("{}: {m}", path.display())),
                    other => other,
                })?;
        }
        cfg.apply_flags(flags)?;
        cfg.check()?;
        Ok(cfg)
    }

    pub fn apply_manifest(&mut self, text: &str, base: &Path) -> Result<(), CliError> {
        for (key, (v, line)) in parse_manifest(text)? {
            let v = v.as_str();
            match key.as_str() {
                "pv" => self.p_v = parse_value(&key, v, line)?,
                "pe" => self.p_e = parse_value(&key, v, line)?,
                "pd" => self.p_d = parse_value(&key, v, line)?,
                "cardinality" => {
                    self.cardinality = CardinalitySpec::parse(v, base).map_err(|e| match e {
                        CliError::Config(m) => CliError::Config(format!("line {line}: {m}")),
                        other => other,
                    })?
                }
                "steps" => self.steps = parse_value(&key, v, line)?,
                "runs" => self.runs = parse_value(&key, v, line)?,
                "seed" => self.seed = parse_value(&key, v, line)?,
                "snapshots" => self.snapshots = Some(parse_times(v)?),
                "out" => self.out = base.join(v),
                "tol" => self.tol = parse_value(&key, v, line)?,
                "max_iter" => self.max_iter = parse_value(&key, v, line)?,
                "stride" => self.stride = Some(parse_value(&key, v, line)?),
                "k_max" => self.k_max = parse_value(&key, v, line)?,
                "k_min" => self.k_min = parse_value(&key, v, line)?,
                "min_expected" => self.min_expected = parse_value(&key, v, line)?,
                "degrees" => self.degrees = Some(base.join(v)),
                "theta" => self.theta = Some(parse_value(&key, v, line)?),
                "burn_in" => self.burn_in = Some(parse_value(&key, v, line)?),
                "bins_per_decade" => self.bins_per_decade = parse_value(&key, v, line)?,
                "fail_on_termination" => self.fail_on_termination = parse_bool(&key, v, line)?,
                "parallel" => self.parallel = parse_bool(&key, v, line)?,
                "resample_terminated" => self.resample_terminated = parse_bool(&key, v, line)?,
                "hyperedges" => self.hyperedges = parse_bool(&key, v, line)?,
                _ => unreachable!("key list and match are out of sync"),
            }
        }
        Ok(())
    }

    pub fn apply_flags(&mut self, f: &Flags) -> Result<(), CliError> {
        macro_rules! set {
            ($($flag:ident => $field:ident),*) => {$(
                if let Some(v) = f.$flag.clone() {
                    self.$field = v;
                }
            )*};
        }
        set!(pv => p_v, pe => p_e, pd => p_d, steps => steps, runs => runs, seed => seed, out => out,
             tol => tol, max_iter => max_iter, k_max => k_max, k_min => k_min,
             min_expected => min_expected, bins_per_decade => bins_per_decade);
        if let Some(c) = &f.cardinality {
            self.cardinality = CardinalitySpec::parse(c, Path::new(""))?;
        }
        if let Some(s) = &f.snapshots {
            self.snapshots = Some(parse_times(s)?);
        }
        if f.stride.is_some() {
            self.stride = f.stride;
        }
        if f.degrees.is_some() {
            self.degrees = f.degrees.clone();
        }
        if f.theta.is_some() {
            self.theta = f.theta;
        }
        if f.burn_in.is_some() {
            self.burn_in = f.burn_in;
        }
        self.fail_on_termination |= f.fail_on_termination;
        self.parallel |= f.parallel;
        self.resample_terminated |= f.resample_terminated;
        self.hyperedges |= f.hyperedges;
        Ok(())
    }

    fn check(&self) -> Result<(), CliError> {
        self.probabilities()?;
        if !(self.tol > 0.0) {
            return Err(CliError::Config(format!("tol must be positive, got {}", self.tol)));
        }
        if self.stride == Some(0) {
            return Err(CliError::Config("stride must be at least 1".into()));
        }
        if self.k_min == 0 || self.k_max == 0 {
            return Err(CliError::Config("k_min and k_max must be at least 1".into()));
        }
        if self.bins_per_decade == 0 {
            return Err(CliError::Config("bins_per_decade must be at least 1".into()));
        }
        Ok(())
    }

    pub fn probabilities(&self) -> Result<Probabilities, CliError> {
        Ok(Probabilities::new(self.p_v, self.p_e, self.p_d)?)
    }

    pub fn solver_options(&self) -> SolverOptions {
        SolverOptions {
            tol: self.tol,
            max_iter: self.max_iter,
            ..SolverOptions::default()
        }
    }

    /// Process parameters for a single run with this config's seed.
    pub fn model_params(&self, law: CardinalityLaw) -> Result<ModelParams, CliError> {
        let params = ModelParams::new(self.probabilities()?, law, self.steps).with_seed(self.seed);
        params.validate()?;
        Ok(params)
    }

    pub fn theory_params(&self, law: &CardinalityLaw) -> Result<TheoryParams, CliError> {
        Ok(TheoryParams::new(self.probabilities()?, law.mean())?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn manifest_then_flags() {
        let mut cfg = RunConfig::default();
        cfg.apply_manifest("# comment\npv = 0.4\npe=0.4 # trailing\npd = 0.2\ncardinality = empirical:sizes.txt\nsteps = 10\n", Path::new("exp"))
            .unwrap();
        assert_eq!(cfg.p_v, 0.4);
        assert_eq!(cfg.cardinality, CardinalitySpec::Empirical(PathBuf::from("exp/sizes.txt")));
        let flags = Flags {
            steps: Some(99),
            parallel: true,
            ..Default::default()
        };
        cfg.apply_flags(&flags).unwrap();
        assert_eq!(cfg.steps, 99);
        assert!(cfg.parallel);
        assert_eq!(cfg.p_e, 0.4);
    }

    #[test]
    fn manifest_errors_carry_line_numbers() {
        let mut cfg = RunConfig::default();
        let e = cfg.apply_manifest("pv = 0.3\nbogus = 1\n", Path::new("")).unwrap_err();
        assert!(e.to_string().contains("line 2"), "{e}");
        let e = cfg.apply_manifest("steps = ten\n", Path::new("")).unwrap_err();
        assert!(e.to_string().contains("line 1"), "{e}");
        let e = cfg.apply_manifest("seed = 1\nseed = 2\n", Path::new("")).unwrap_err();
        assert!(e.to_string().contains("duplicate"), "{e}");
    }

    #[test]
    fn cardinality_specs() {
        let base = Path::new("");
        assert_eq!(CardinalitySpec::parse("constant:2", base).unwrap(), CardinalitySpec::Constant(2));
        assert_eq!(CardinalitySpec::parse("poisson:4", base).unwrap(), CardinalitySpec::Poisson(4.0));
        assert!(CardinalitySpec::parse("poisson", base).is_err());
        assert!(CardinalitySpec::parse("uniform:3", base).is_err());
        assert!(CardinalitySpec::parse("constant:0", base).unwrap().law().is_err());
    }

    #[test]
    fn deactivation_must_not_dominate() {
        let flags = Flags {
            pv: Some(0.2),
            pe: Some(0.5),
            pd: Some(0.3),
            ..Default::default()
        };
        let e = RunConfig::resolve(&flags).unwrap_err();
        assert_eq!(e.exit_code(), 2);
        assert!(e.to_string().contains("must exceed"), "{e}");
    }

    #[test]
    fn snapshot_lists() {
        assert_eq!(parse_times("30, 10,20,10").unwrap(), vec![10, 20, 30]);
        assert!(parse_times("1,x").is_err());
    }
}
