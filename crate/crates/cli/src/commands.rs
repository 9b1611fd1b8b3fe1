use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Duration;

use orcon::analysis::{active_pattern, certify_mpoc, check_mpoc_licq, StationarityClass, Tolerances};
use orcon::homotopy::{certify_run, run_matrix, MethodId};
use orcon::model::{feasibility, grad_check};
use orcon::profile::{
    resolve_f_min, write_results_csv, write_timing_csv, FMinSource, Profile, ProfileTable, RunRecord,
};
use orcon::Problem;
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{parse_methods, ExperimentConfig};
use crate::CliError;

/// Worst relative gradient error accepted by `gradcheck`.
pub const GRADCHECK_TOL: f64 = 1e-5;

pub const THREADS_ENV: &str = "ORCON_THREADS";

fn io_err(path: &Path, e: impl std::fmt::Display) -> CliError {
    CliError::Io(format!("{}: {e}", path.display()))
}

/// Command-line values that take precedence over the config file.
#[derive(Debug, Clone, Default)]
pub struct BenchOverrides {
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
    pub starts: Option<usize>,
    pub methods: Option<Vec<String>>,
}

impl BenchOverrides {
    pub fn apply(&self, mut cfg: ExperimentConfig) -> ExperimentConfig {
        if let Some(out) = &self.out {
            cfg.out = Some(out.clone());
        }
        if let Some(seed) = self.seed {
            cfg.seed = seed;
        }
        if let Some(starts) = self.starts {
            cfg.starts = starts;
        }
        if let Some(m) = &self.methods {
            cfg.methods = Some(m.clone());
        }
        cfg
    }
}

fn thread_count(configured: Option<usize>) -> Result<Option<usize>, CliError> {
    match std::env::var(THREADS_ENV) {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(CliError::Input(format!("{THREADS_ENV} must be a positive integer, got `{v}`"))),
        },
        Err(std::env::VarError::NotPresent) => Ok(configured),
        Err(e) => Err(CliError::Input(format!("{THREADS_ENV}: {e}"))),
    }
}

fn failed_record(method: MethodId, start: usize) -> RunRecord {
    RunRecord {
        method,
        start,
        f_value: f64::NAN,
        max_or_violation: f64::INFINITY,
        max_violation: f64::INFINITY,
        feasible: false,
        stages: 0,
        inner_iterations: 0,
        termination: "error".into(),
        stationarity: "-".into(),
    }
}

#[derive(Serialize)]
struct Meta<'a> {
    config: &'a ExperimentConfig,
    problem: &'a str,
    n: usize,
    methods: Vec<&'static str>,
    runs: usize,
    failed_runs: usize,
    feas_tol: f64,
    delta: f64,
    f_min: Option<f64>,
    f_min_source: Option<&'static str>,
    unsolved_starts: Option<usize>,
}

/// Profile of `records` written to `dir`; `None` when no reference value is
/// available (no known optimum and no feasible run).
pub fn emit_profile(
    records: &[RunRecord],
    methods: &[MethodId],
    known: Option<f64>,
    delta: f64,
    feas_tol: f64,
    dir: &Path,
    title: &str,
) -> Result<Option<(Profile, f64, FMinSource)>, CliError> {
    let Some((f_min, source)) = resolve_f_min(known, records, feas_tol) else {
        return Ok(None);
    };
    let table = ProfileTable::from_records(records, methods, f_min, delta, feas_tol)?;
    let profile = Profile::from_table(&table)?;
    profile.write(dir, title)?;
    Ok(Some((profile, f_min, source)))
}

fn median(mut v: Vec<f64>) -> Option<f64> {
    if v.is_empty() {
        return None;
    }
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    Some(if v.len() % 2 == 1 { v[m] } else { 0.5 * (v[m - 1] + v[m]) })
}

/// Runs the method × start matrix of a config and writes `results.csv`,
/// `timing.csv`, `profile.csv`, `profile.svg` and `meta.json`, plus
/// `quadratic.csv` for heat control. Returns whether every run completed;
/// infeasible runs still count as completed.
pub fn bench(cfg: &ExperimentConfig, out: &mut dyn Write) -> Result<bool, CliError> {
    cfg.validate()?;
    let methods = cfg.methods()?;
    let hcfg = cfg.homotopy.apply();
    let heat = cfg.benchmark.heat_model()?;
    let problem = match &heat {
        Some(model) => model.problem(),
        None => cfg.benchmark.build()?,
    };
    let starts = cfg.benchmark.start_domain(problem.n).sample(cfg.starts, cfg.seed);
    let dir = cfg.out.clone().unwrap_or_else(|| PathBuf::from("orcon-out"));
    std::fs::create_dir_all(&dir).map_err(|e| io_err(&dir, e))?;

    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = thread_count(cfg.threads)? {
        builder = builder.num_threads(n);
    }
    let pool = builder.build().map_err(|e| CliError::Failed(format!("thread pool: {e}")))?;

    let (records, timing, failures) = pool.install(|| {
        let results = run_matrix(&problem, &methods, &starts, &hcfg);
        let s = starts.len();
        let rows: Vec<(RunRecord, Duration, Option<String>)> = results
            .par_iter()
            .enumerate()
            .map(|(k, r)| {
                let (method, start) = (methods[k / s], k % s);
                match r {
                    Ok(run) => {
                        let class = if run.feasible {
                            match certify_run(&problem, run) {
                                Ok(c) => c.strongest.map_or("none", StationarityClass::as_str).to_string(),
                                Err(_) => "error".to_string(),
                            }
                        } else {
                            "-".to_string()
                        };
                        (RunRecord::from_run(start, run, &class), run.wall_time, None)
                    }
                    Err(e) => (failed_record(method, start), Duration::ZERO, Some(format!("{method} start {start}: {e}"))),
                }
            })
            .collect();
        let mut records = Vec::with_capacity(rows.len());
        let mut timing = Vec::with_capacity(rows.len());
        let mut failures = Vec::new();
        for (rec, t, err) in rows {
            timing.push((rec.method, rec.start, t));
            records.push(rec);
            failures.extend(err);
        }
        (records, timing, failures)
    });

    write_results_csv(&dir.join("results.csv"), &records)?;
    if let Some(model) = &heat {
        model.write_quadratic_csv(&dir.join("quadratic.csv"))?;
    }
    write_timing_csv(&dir.join("timing.csv"), &timing)?;
    let known = problem.known_optimum.as_ref().map(|k| k.f_min);
    let delta = cfg.delta();
    let title = format!("{} (δ = {delta})", cfg.benchmark.id());
    let profile = emit_profile(&records, &methods, known, delta, hcfg.or_tol, &dir, &title)?;

    let meta = Meta {
        config: cfg,
        problem: cfg.benchmark.id(),
        n: problem.n,
        methods: methods.iter().map(|m| m.as_str()).collect(),
        runs: records.len(),
        failed_runs: failures.len(),
        feas_tol: hcfg.or_tol,
        delta,
        f_min: profile.as_ref().map(|p| p.1),
        f_min_source: profile.as_ref().map(|p| p.2.as_str()),
        unsolved_starts: profile.as_ref().map(|p| p.0.unsolved),
    };
    let json = serde_json::to_string_pretty(&meta).map_err(|e| CliError::Failed(e.to_string()))?;
    let meta_path = dir.join("meta.json");
    std::fs::write(&meta_path, json + "\n").map_err(|e| io_err(&meta_path, e))?;

    writeln!(out, "{}: n = {}, {} starts, seed {}", cfg.benchmark.id(), problem.n, starts.len(), cfg.seed)?;
    for m in &methods {
        let mine: Vec<&RunRecord> = records.iter().filter(|r| r.method == *m).collect();
        let feasible: Vec<f64> = mine.iter().filter(|r| r.feasible).map(|r| r.f_value).collect();
        let med = median(feasible.clone()).map_or("-".to_string(), |v| format!("{v:.6}"));
        writeln!(out, "  {:<10} feasible {:>4}/{:<4} median f {med}", m.as_str(), feasible.len(), mine.len())?;
    }
    match &profile {
        Some((p, f_min, source)) => {
            writeln!(out, "f_min {f_min} ({}), {} unsolved starts", source.as_str(), p.unsolved)?
        }
        None => writeln!(out, "no feasible run and no known optimum: profile skipped")?,
    }
    writeln!(out, "wrote {}", dir.display())?;
    for f in &failures {
        writeln!(out, "run failed: {f}")?;
    }
    Ok(failures.is_empty())
}

/// One row of whitespace-separated decimals.
pub fn read_point(path: &Path) -> Result<Vec<f64>, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    let point = text
        .split_whitespace()
        .map(|t| t.parse::<f64>().map_err(|_| CliError::Input(format!("{}: `{t}` is not a number", path.display()))))
        .collect::<Result<Vec<_>, _>>()?;
    if point.is_empty() {
        return Err(CliError::Input(format!("{}: no coordinates", path.display())));
    }
    if point.iter().any(|v| !v.is_finite()) {
        return Err(CliError::Input(format!("{}: coordinates must be finite", path.display())));
    }
    Ok(point)
}

fn fmt_vec(v: &[f64]) -> String {
    let items: Vec<String> = v.iter().map(|x| format!("{x:.6e}")).collect();
    format!("[{}]", items.join(", "))
}

/// Prints the active pattern, constraint qualifications and the requested
/// certificate; returns whether the class holds.
pub fn verify(
    problem: &Problem,
    x: &[f64],
    class: StationarityClass,
    tol: &Tolerances<f64>,
    out: &mut dyn Write,
) -> Result<bool, CliError> {
    if x.len() != problem.n {
        return Err(CliError::Input(format!("point has {} coordinates, {} expects {}", x.len(), problem.name, problem.n)));
    }
    if class == StationarityClass::C {
        return Err(CliError::Input("class C is defined for complementarity lifts only; use W, M or S".into()));
    }
    let viol = feasibility(problem, x)?.max_violation;
    writeln!(out, "problem {} at {}", problem.name, fmt_vec(x))?;
    writeln!(out, "max violation {viol:e}")?;
    if viol > tol.eps_act {
        writeln!(out, "{}-stationary: no (point is infeasible)", class.as_str())?;
        return Ok(false);
    }
    let pat = active_pattern(problem, x, tol.eps_act)?;
    writeln!(out, "active g {:?}", pat.active_g)?;
    for (name, set) in pat.sets() {
        if !set.is_empty() {
            writeln!(out, "I^{name} {set:?}")?;
        }
    }
    let cq = check_mpoc_licq(problem, x, tol.eps_act)?;
    writeln!(
        out,
        "MPOC-LICQ {} (smallest singular value {:e}), MPOC-MFCQ {}",
        cq.mpoc_licq, cq.smallest_singular_value, cq.mpoc_mfcq
    )?;
    let cert = certify_mpoc(problem, x, class, tol)?;
    writeln!(out, "residual {:e} (tolerance {:e})", cert.residual_norm, cert.eps_stat)?;
    let m = &cert.multipliers;
    writeln!(out, "lambda {}", fmt_vec(&m.lambda))?;
    if !m.rho.is_empty() {
        writeln!(out, "rho {}", fmt_vec(&m.rho))?;
    }
    writeln!(out, "mu {}", fmt_vec(&m.mu))?;
    writeln!(out, "nu {}", fmt_vec(&m.nu))?;
    if let Some(branch) = &cert.branch {
        if !branch.is_empty() {
            writeln!(out, "branch {branch:?}")?;
        }
    }
    writeln!(out, "{}-stationary: {}", class.as_str(), if cert.holds { "yes" } else { "no" })?;
    Ok(cert.holds)
}

/// Finite-difference check of every function of the problem.
pub fn gradcheck(problem: &Problem, probes: usize, seed: u64, out: &mut dyn Write) -> Result<bool, CliError> {
    if probes == 0 {
        return Err(CliError::Input("probes must be at least 1".into()));
    }
    let report = grad_check(problem, probes, seed);
    for e in &report.entries {
        writeln!(out, "{:<12} {:.3e}", e.label, e.worst_rel_error)?;
    }
    let worst = report.worst();
    let ok = worst <= GRADCHECK_TOL;
    writeln!(out, "worst {worst:.3e} ({} at tolerance {GRADCHECK_TOL:e})", if ok { "pass" } else { "FAIL" })?;
    Ok(ok)
}

/// Recomputes the profile from a results CSV.
pub struct ProfileRequest {
    pub results: PathBuf,
    pub out: PathBuf,
    pub methods: Option<Vec<String>>,
    pub known: Option<f64>,
    pub delta: f64,
    pub feas_tol: f64,
    pub title: String,
}

pub fn profile(req: &ProfileRequest, out: &mut dyn Write) -> Result<bool, CliError> {
    let records = orcon::profile::read_results_csv(&req.results)?;
    let methods = match &req.methods {
        Some(list) => parse_methods(list)?,
        None => MethodId::ALL.into_iter().filter(|m| records.iter().any(|r| r.method == *m)).collect(),
    };
    if methods.is_empty() {
        return Err(CliError::Input(format!("{}: no runs", req.results.display())));
    }
    std::fs::create_dir_all(&req.out).map_err(|e| io_err(&req.out, e))?;
    match emit_profile(&records, &methods, req.known, req.delta, req.feas_tol, &req.out, &req.title)? {
        Some((p, f_min, source)) => {
            writeln!(out, "f_min {f_min} ({}), {} unsolved starts", source.as_str(), p.unsolved)?;
            writeln!(out, "wrote {}", req.out.display())?;
            Ok(true)
        }
        None => {
            writeln!(out, "no feasible run and no known optimum: nothing to profile")?;
            Ok(false)
        }
    }
}
