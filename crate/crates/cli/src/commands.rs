use std::collections::BTreeMap;
use std::fmt;
use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use hypercutoff::analysis::{
    ccdf, compare_to_theory, concentration_report, fit_powerlaw, fit_powerlaw_cutoff, log_binned_pmf, moments_at,
    slope_fit, theta_convergence_ensemble, DegreeHistogram, Moments,
};
use hypercutoff::process::{ensemble_map_range, run, RunTrace};
use hypercutoff::theory::{
    cutoff_params, expected_fraction, powerlaw_reduction, solve_theta, FractionForm, ThetaSolution,
};
use hypercutoff::{CardinalityLaw, CutoffParams};

use crate::config::RunConfig;
use crate::error::CliError;

/// Printable summary of a command plus its numeric results by name.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Report {
    pub lines: Vec<String>,
    pub values: BTreeMap<String, f64>,
    pub files: Vec<PathBuf>,
}

impl Report {
    fn line(&mut self, s: impl Into<String>) {
        self.lines.push(s.into());
    }

    fn value(&mut self, key: &str, v: f64) {
        self.lines.push(format!("{key} = {v}"));
        self.values.insert(key.to_string(), v);
    }

    pub fn get(&self, key: &str) -> Option<f64> {
        self.values.get(key).copied()
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for l in &self.lines {
            writeln!(f, "{l}")?;
        }
        Ok(())
    }
}

fn write_file<F>(report: &mut Report, dir: &Path, name: &str, body: F) -> Result<(), CliError>
where
    F: FnOnce(&mut BufWriter<File>) -> io::Result<()>,
{
    fs::create_dir_all(dir).map_err(CliError::io(dir))?;
    let path = dir.join(name);
    let file = File::create(&path).map_err(CliError::io(&path))?;
    let mut w = BufWriter::new(file);
    body(&mut w).and_then(|_| w.flush()).map_err(CliError::io(&path))?;
    report.files.push(path);
    Ok(())
}

fn write_moments(w: &mut impl Write, rows: &[Moments]) -> io::Result<()> {
    writeln!(w, "t,mean,std")?;
    for m in rows {
        writeln!(w, "{},{},{}", m.t, m.mean, m.std)?;
    }
    Ok(())
}

/// One run; writes `trajectory.csv`, `degrees_t<T>.csv` per snapshot and
/// optionally `hyperedges.txt`.
pub fn cmd_simulate(cfg: &RunConfig) -> Result<Report, CliError> {
    let law = cfg.cardinality.law()?;
    let snapshots = cfg.snapshots.clone().unwrap_or_else(|| vec![cfg.steps]);
    let params = cfg
        .model_params(law)?
        .with_snapshots(snapshots)
        .with_trace_stride(cfg.stride.unwrap_or(1))
        .with_hyperedge_log(cfg.hyperedges);
    let trace = run(&params)?;

    let mut report = Report::default();
    write_file(&mut report, &cfg.out, "trajectory.csv", |w| trace.write_csv(w))?;
    for h in &trace.snapshots {
        write_file(&mut report, &cfg.out, &format!("degrees_t{}.csv", h.time()), |w| h.write_csv(w))?;
    }
    if let Some(log) = &trace.hyperedges {
        write_file(&mut report, &cfg.out, "hyperedges.txt", |w| log.write_text(w))?;
    }

    report.line(format!("seed = {}", cfg.seed));
    if let Some(last) = trace.last() {
        report.value("t", last.t as f64);
        report.value("D", last.active_degree as f64);
        report.value("A", last.active as f64);
        report.value("I", last.inactive as f64);
        if let Some(avg) = last.avg_deactivated_degree() {
            report.value("avg_deact_degree", avg);
        }
    }
    if let Some(t) = trace.terminated_at {
        report.value("terminated_at", t as f64);
        if cfg.fail_on_termination {
            return Err(CliError::Terminated(format!(
                "no active vertex left at step {t} (seed {})",
                cfg.seed
            )));
        }
    }
    Ok(report)
}

/// Times `stride, 2·stride, …` up to `steps`, always ending at `steps`.
pub fn time_grid(steps: u64, stride: u64) -> Vec<u64> {
    let mut times: Vec<u64> = (1..=steps / stride).map(|i| i * stride).collect();
    if times.last() != Some(&steps) && steps > 0 {
        times.push(steps);
    }
    times
}

/// Outcome of an ensemble: traces entering the averages and the number of
/// runs that terminated.
#[derive(Clone, Debug)]
pub struct EnsembleRuns {
    pub traces: Vec<RunTrace>,
    pub terminated: u64,
    pub attempted: u64,
}

/// Runs the ensemble of `cfg`, aggregated on `times`. With
/// `resample_terminated`, terminated runs are dropped and replaced by runs
/// `n, n+1, …` until `cfg.runs` complete runs are available.
pub fn run_ensemble(cfg: &RunConfig, law: CardinalityLaw, stride: u64) -> Result<EnsembleRuns, CliError> {
    if cfg.runs < 2 {
        return Err(CliError::Config(format!("an ensemble needs at least 2 runs, got {}", cfg.runs)));
    }
    let params = cfg
        .model_params(law)?
        .with_trace_stride(stride)
        .with_snapshots(cfg.snapshots.clone().unwrap_or_default());
    let max_attempts = cfg.runs.saturating_mul(100);
    let mut out = EnsembleRuns {
        traces: Vec::with_capacity(cfg.runs as usize),
        terminated: 0,
        attempted: 0,
    };
    while (out.traces.len() as u64) < cfg.runs {
        let want = cfg.runs - out.traces.len() as u64;
        let start = out.attempted;
        let batch = ensemble_map_range(&params, start..start + want, cfg.seed, cfg.parallel, |_, t| t)?;
        out.attempted += want;
        for trace in batch {
            if trace.terminated_at.is_some() {
                out.terminated += 1;
                if cfg.resample_terminated {
                    continue;
                }
            }
            out.traces.push(trace);
        }
        if !cfg.resample_terminated {
            break;
        }
        if out.attempted >= max_attempts && (out.traces.len() as u64) < cfg.runs {
            return Err(CliError::Terminated(format!(
                "{} of {} runs terminated; giving up resampling",
                out.terminated, out.attempted
            )));
        }
    }
    if out.terminated > 0 && cfg.fail_on_termination && !cfg.resample_terminated {
        return Err(CliError::Terminated(format!(
            "{} of {} runs found no active vertex",
            out.terminated, out.attempted
        )));
    }
    Ok(out)
}

/// `θ` and the limiting-distribution parameters, or the pure power law
/// when `p_d = 0`.
pub fn limit_params(
    cfg: &RunConfig,
    law: &CardinalityLaw,
) -> Result<(CutoffParams, Option<ThetaSolution>), CliError> {
    let tp = cfg.theory_params(law)?;
    if cfg.p_d == 0.0 {
        return Ok((powerlaw_reduction(&tp)?.as_cutoff(&tp), None));
    }
    if let Some(theta) = cfg.theta {
        return Ok((cutoff_params(&tp, theta)?, None));
    }
    let sol = solve_theta(&tp, cfg.solver_options())?;
    Ok((cutoff_params(&tp, sol.theta)?, Some(sol)))
}

/// Ensemble statistics: `ensemble_Dt.csv`, `theta_running.csv`,
/// `concentration.csv` and pooled `degrees_pooled_t<T>.csv` per snapshot.
pub fn cmd_ensemble(cfg: &RunConfig) -> Result<Report, CliError> {
    let law = cfg.cardinality.law()?;
    let stride = cfg.stride.unwrap_or((cfg.steps / 1000).max(1));
    let times = time_grid(cfg.steps, stride);
    let runs = run_ensemble(cfg, law.clone(), stride)?;
    let traces = &runs.traces;

    let d = moments_at(traces, &times, |r| Some(r.active_degree as f64));
    let theta = theta_convergence_ensemble(traces, &times);
    let conc = concentration_report(traces, &times)?;

    let mut report = Report::default();
    write_file(&mut report, &cfg.out, "ensemble_Dt.csv", |w| write_moments(w, &d))?;
    write_file(&mut report, &cfg.out, "theta_running.csv", |w| {
        writeln!(w, "t,mean,std,runs")?;
        for m in &theta {
            writeln!(w, "{},{},{},{}", m.t, m.mean, m.std, m.n)?;
        }
        Ok(())
    })?;
    write_file(&mut report, &cfg.out, "concentration.csv", |w| {
        writeln!(w, "t,mean,std,max_dev")?;
        for r in &conc {
            writeln!(w, "{},{},{},{}", r.t, r.mean, r.std, r.max_dev)?;
        }
        Ok(())
    })?;
    for (i, &t) in cfg.snapshots.iter().flatten().enumerate() {
        let mut pooled = DegreeHistogram::new(t);
        for tr in traces {
            if let Some(h) = tr.snapshots.get(i) {
                pooled.merge(h);
            }
        }
        write_file(&mut report, &cfg.out, &format!("degrees_pooled_t{t}.csv"), |w| pooled.write_csv(w))?;
    }

    report.value("runs", traces.len() as f64);
    report.value("terminated", runs.terminated as f64);
    let burn_in = cfg.burn_in.unwrap_or(cfg.steps / 10);
    let points: Vec<(f64, f64)> = d.iter().map(|m| (m.t as f64, m.mean)).collect();
    let fit = slope_fit(&points, burn_in as f64)?;
    report.value("alpha_hat", fit.slope);
    report.value("r2", fit.r2);
    if let Some(last) = theta.last().filter(|m| m.t == cfg.steps) {
        report.value("theta_running", last.mean);
    }
    if cfg.p_d > 0.0 {
        match limit_params(cfg, &law) {
            Ok((cp, _)) => {
                report.value("alpha", cp.alpha);
                report.value("theta", cp.theta);
                report.value("alpha_rel_dev", (fit.slope - cp.alpha).abs() / cp.alpha);
            }
            Err(e) => report.line(format!("theory unavailable: {e}")),
        }
    }
    Ok(report)
}

/// Fixed-point iteration for `θ`; writes `theta_iterates.csv`.
pub fn cmd_theta(cfg: &RunConfig) -> Result<Report, CliError> {
    let law = cfg.cardinality.law()?;
    let tp = cfg.theory_params(&law)?;
    if cfg.p_d == 0.0 {
        let hint = match powerlaw_reduction(&tp) {
            Ok(r) => format!("; the degrees then follow a power law with exponent {}", r.exponent),
            Err(_) => String::new(),
        };
        return Err(CliError::Config(format!("θ is undefined without deactivation (p_d = 0){hint}")));
    }
    let sol = solve_theta(&tp, cfg.solver_options())?;
    let cp = cutoff_params(&tp, sol.theta)?;
    let mut report = Report::default();
    write_file(&mut report, &cfg.out, "theta_iterates.csv", |w| {
        writeln!(w, "n,theta")?;
        for (n, x) in sol.iterates.iter().enumerate() {
            writeln!(w, "{n},{x}")?;
        }
        Ok(())
    })?;
    report.value("mu", tp.mean());
    report.value("theta", sol.theta);
    report.value("iterations", sol.iterations as f64);
    report.value("residual", sol.residual);
    report.value("error_bound", sol.error_bound);
    report.value("q", cp.q);
    report.value("alpha", cp.alpha);
    report.value("beta", cp.beta);
    report.value("gamma", cp.gamma);
    report.value("delta", cp.delta);
    report.value("c", cp.c);
    report.value("theta_hat", cp.theta_hat);
    Ok(report)
}

/// Predicted degree fractions for `k = 1..=k_max`; writes `theory_pmf.csv`.
pub fn cmd_theory(cfg: &RunConfig) -> Result<Report, CliError> {
    let law = cfg.cardinality.law()?;
    let (cp, _) = limit_params(cfg, &law)?;
    let mut rows = Vec::with_capacity(cfg.k_max as usize);
    for k in 1..=cfg.k_max {
        rows.push((
            k,
            expected_fraction(k, &cp, FractionForm::Exact)?,
            expected_fraction(k, &cp, FractionForm::Asymptotic)?,
        ));
    }
    let mut report = Report::default();
    write_file(&mut report, &cfg.out, "theory_pmf.csv", |w| {
        writeln!(w, "k,exact,asymptotic")?;
        for (k, e, a) in &rows {
            writeln!(w, "{k},{e},{a}")?;
        }
        Ok(())
    })?;
    report.value("theta", cp.theta);
    report.value("beta", cp.beta);
    report.value("gamma", cp.gamma);
    report.value("delta", cp.delta);
    report.value("c", cp.c);
    report.value("mass", rows.iter().map(|r| r.1).sum());
    Ok(report)
}

/// Reads a degree histogram, fits it and compares it with the prediction;
/// writes `compare.csv`, `ccdf.csv` and `pmf_logbinned.csv`.
pub fn cmd_compare(cfg: &RunConfig) -> Result<Report, CliError> {
    let path = cfg
        .degrees
        .as_ref()
        .ok_or_else(|| CliError::Config("compare needs a degree histogram (--degrees)".into()))?;
    let text = fs::read_to_string(path).map_err(CliError::io(path))?;
    let h = DegreeHistogram::parse_csv(&text, 0).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    if h.is_empty() {
        return Err(CliError::Input(format!("{}: no vertices", path.display())));
    }
    let law = cfg.cardinality.law()?;
    let (cp, _) = limit_params(cfg, &law)?;
    let cmp = compare_to_theory(&h, &cp, cfg.min_expected)?;
    let tail = ccdf(&h)?;
    let bins = log_binned_pmf(&h, cfg.bins_per_decade)?;

    let mut report = Report::default();
    write_file(&mut report, &cfg.out, "compare.csv", |w| {
        writeln!(w, "k,empirical,theoretical,rel_err")?;
        for r in &cmp.rows {
            writeln!(w, "{},{},{},{}", r.k, r.empirical, r.theoretical, r.rel_err)?;
        }
        Ok(())
    })?;
    write_file(&mut report, &cfg.out, "ccdf.csv", |w| {
        writeln!(w, "k,ccdf")?;
        for (k, p) in &tail {
            writeln!(w, "{k},{p}")?;
        }
        Ok(())
    })?;
    write_file(&mut report, &cfg.out, "pmf_logbinned.csv", |w| {
        writeln!(w, "k_lo,k_hi,k_center,density")?;
        for b in &bins {
            writeln!(w, "{},{},{},{}", b.lo, b.hi, b.k_center, b.density)?;
        }
        Ok(())
    })?;

    report.value("vertices", h.total() as f64);
    match fit_powerlaw_cutoff(&h, cfg.k_min) {
        Ok(fit) => {
            report.value("beta_hat", fit.beta);
            report.value("gamma_hat", fit.gamma);
            report.value("loglik", fit.log_likelihood);
        }
        Err(e) => report.line(format!("cutoff fit skipped: {e}")),
    }
    match fit_powerlaw(&h, cfg.k_min) {
        Ok(fit) => report.value("powerlaw_exponent", fit.beta),
        Err(e) => report.line(format!("power-law fit skipped: {e}")),
    }
    if cfg.p_d == 0.0 {
        report.value("exponent_theory", cp.beta + 1.0);
    } else {
        report.value("beta", cp.beta);
        report.value("gamma", cp.gamma);
    }
    report.value("qualifying", cmp.rows.len() as f64);
    report.value("max_rel_err", cmp.max_rel_err);
    report.value("mean_rel_err", cmp.mean_rel_err);
    report.line(format!(
        "verdict: mean relative error {:.4} (max {:.4}) over {} degrees with >= {} expected vertices",
        cmp.mean_rel_err,
        cmp.max_rel_err,
        cmp.rows.len(),
        cfg.min_expected
    ));
    Ok(report)
}
