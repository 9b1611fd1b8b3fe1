//! The five solution methods: a single solve of the Kanzow–Schwartz
//! reformulation, and four relaxation homotopies driven by `t_k → 0`.

use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use rayon::prelude::*;

use crate::analysis::{certify_mpoc, StationarityCertificate, StationarityClass, Tolerances};
use crate::error::{Error, Result};
use crate::model::{feasibility, MpocProblem};
use crate::nlp::{solve_nlp, NlpSpec, NlpStatus};
use crate::reformulate::{
    direct_relax, ncp_reformulate, scholtes_cc_relax, scholtes_sc_relax, to_mpcc, to_mpsc, SmoothingVariant,
};
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum MethodId {
    DirectNcpKs,
    RelaxSc,
    RelaxCc,
    RelaxFb,
    RelaxKs,
}

impl MethodId {
    pub const ALL: [MethodId; 5] = [Self::DirectNcpKs, Self::RelaxSc, Self::RelaxCc, Self::RelaxFb, Self::RelaxKs];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::DirectNcpKs => "direct-ks",
            Self::RelaxSc => "relax-sc",
            Self::RelaxCc => "relax-cc",
            Self::RelaxFb => "relax-fb",
            Self::RelaxKs => "relax-ks",
        }
    }
}

impl fmt::Display for MethodId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for MethodId {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Self::ALL.into_iter().find(|m| m.as_str() == s.trim()).ok_or_else(|| {
            let names: Vec<_> = Self::ALL.iter().map(|m| m.as_str()).collect();
            Error::InvalidArgument(format!("unknown method `{s}` (expected one of {})", names.join(", ")))
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HomotopyConfig<T> {
    pub t_initial: T,
    pub t_factor: T,
    pub t_min: T,
    /// Feasibility tolerance deciding success of a run.
    pub or_tol: T,
    /// KKT tolerance of every relaxation stage.
    pub inner_tol: T,
    /// KKT tolerance of the single direct solve.
    pub direct_tol: T,
    pub max_stages: usize,
    pub max_inner_iter: usize,
}

impl<T: Real> Default for HomotopyConfig<T> {
    fn default() -> Self {
        Self {
            t_initial: T::lit(0.01),
            t_factor: T::lit(0.01),
            t_min: T::lit(1e-8),
            or_tol: T::lit(1e-4),
            inner_tol: T::lit(1e-6),
            direct_tol: T::lit(1e-4),
            max_stages: 50,
            max_inner_iter: crate::nlp::DEFAULT_MAX_ITER,
        }
    }
}

impl<T: Real> HomotopyConfig<T> {
    /// Relaxation parameter of stage `k ≥ 1`.
    pub fn t_at(&self, k: usize) -> T {
        let k = k as i32;
        if self.t_initial == self.t_factor {
            self.t_factor.powi(k)
        } else {
            self.t_initial * self.t_factor.powi(k - 1)
        }
    }

    /// Stage parameters `t_1, t_2, …` not below `t_min`.
    pub fn schedule(&self) -> Vec<T> {
        (1..=self.max_stages).map(|k| self.t_at(k)).take_while(|t| *t >= self.t_min).collect()
    }

    pub fn validate(&self) -> Result<()> {
        let ok = self.t_factor > T::zero()
            && self.t_factor < T::one()
            && self.t_initial > T::zero()
            && self.t_min > T::zero()
            && self.or_tol > T::zero()
            && self.inner_tol > T::zero()
            && self.direct_tol > T::zero()
            && self.max_stages >= 1
            && self.max_inner_iter >= 1;
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidArgument("invalid homotopy configuration".into()))
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StageRecord<T> {
    /// Relaxation parameter (0 for the direct method).
    pub t: T,
    pub inner_status: NlpStatus,
    pub inner_iterations: usize,
    pub f_value: T,
    pub kkt_residual: T,
    /// Full inner solution, slacks included.
    pub point: Vec<T>,
    pub max_violation: T,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    /// The x-part met the feasibility tolerance.
    Feasible,
    /// Every stage of the schedule ran without reaching feasibility.
    ScheduleExhausted,
    /// Two consecutive stages ended without inner convergence.
    InnerFailure { stage: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunResult<T> {
    pub method: MethodId,
    pub start: Vec<T>,
    pub final_x: Vec<T>,
    pub f_value: T,
    pub max_or_violation: T,
    /// Largest violation over `g`, `h` and the or-constraints.
    pub max_violation: T,
    pub feasible: bool,
    pub termination: Termination,
    pub stages: Vec<StageRecord<T>>,
    pub wall_time: Duration,
}

impl<T: Real> RunResult<T> {
    pub fn total_inner_iterations(&self) -> usize {
        self.stages.iter().map(|s| s.inner_iterations).sum()
    }
}

fn lifted_start<T: Real>(problem: &MpocProblem<T>, method: MethodId, x0: &[T]) -> Vec<T> {
    match method {
        MethodId::RelaxSc => to_mpsc(problem).default_start(x0),
        MethodId::RelaxCc => to_mpcc(problem).default_start(x0),
        _ => x0.to_vec(),
    }
}

/// Runs one method from `start` (a point of the original variables).
pub fn run_method<T: Real>(
    problem: &MpocProblem<T>,
    method: MethodId,
    start: &[T],
    cfg: &HomotopyConfig<T>,
) -> Result<RunResult<T>> {
    problem.check_dim(start)?;
    cfg.validate()?;
    let clock = Instant::now();
    let n = problem.n;
    let sc = matches!(method, MethodId::RelaxSc).then(|| to_mpsc(problem));
    let cc = matches!(method, MethodId::RelaxCc).then(|| to_mpcc(problem));
    let build = |t: T| -> NlpSpec<T> {
        match method {
            MethodId::DirectNcpKs => ncp_reformulate(problem),
            MethodId::RelaxSc => scholtes_sc_relax(sc.as_ref().expect("switching lift"), t),
            MethodId::RelaxCc => scholtes_cc_relax(cc.as_ref().expect("complementarity lift"), t),
            MethodId::RelaxFb => direct_relax(problem, SmoothingVariant::Fb, t),
            MethodId::RelaxKs => direct_relax(problem, SmoothingVariant::Ks, t),
        }
    };

    let mut point = lifted_start(problem, method, start);
    let mut stages = Vec::new();
    let mut failures = 0;
    let mut termination = Termination::ScheduleExhausted;
    let schedule = if method == MethodId::DirectNcpKs { vec![T::zero()] } else { cfg.schedule() };
    let tol = if method == MethodId::DirectNcpKs { cfg.direct_tol } else { cfg.inner_tol };

    for (k, &t) in schedule.iter().enumerate() {
        let spec = build(t);
        let sol = solve_nlp(&spec, &point, tol, cfg.max_inner_iter)?;
        let viol = feasibility(problem, &sol.x[..n])?.max_violation;
        stages.push(StageRecord {
            t,
            inner_status: sol.status,
            inner_iterations: sol.iterations,
            f_value: sol.f_value,
            kkt_residual: sol.kkt_residual,
            point: sol.x.clone(),
            max_violation: viol,
        });
        point = sol.x;
        if viol <= cfg.or_tol {
            termination = Termination::Feasible;
            break;
        }
        if sol.status == NlpStatus::Converged {
            failures = 0;
        } else {
            failures += 1;
            if failures >= 2 {
                termination = Termination::InnerFailure { stage: k + 1 };
                break;
            }
        }
    }

    let final_x = point[..n].to_vec();
    let report = feasibility(problem, &final_x)?;
    let max_or_violation = report.max_or_violation();
    let max_violation = report.max_violation;
    Ok(RunResult {
        method,
        start: start.to_vec(),
        f_value: problem.f.value(&final_x),
        final_x,
        max_or_violation,
        max_violation,
        feasible: max_violation <= cfg.or_tol,
        termination,
        stages,
        wall_time: clock.elapsed(),
    })
}

/// Runs every `(method, start)` combination in parallel. Results are ordered
/// method-major, then by start index, independent of scheduling.
pub fn run_matrix<T: Real>(
    problem: &MpocProblem<T>,
    methods: &[MethodId],
    starts: &[Vec<T>],
    cfg: &HomotopyConfig<T>,
) -> Vec<Result<RunResult<T>>> {
    let jobs: Vec<(MethodId, usize)> = methods.iter().flat_map(|&m| (0..starts.len()).map(move |s| (m, s))).collect();
    jobs.par_iter().map(|&(m, s)| run_method(problem, m, &starts[s], cfg)).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunCertification<T> {
    /// Strongest class among S, M, W that holds, if any.
    pub strongest: Option<StationarityClass>,
    pub certificates: Vec<StationarityCertificate<T>>,
    /// Classes whose check was refused (for instance too many biactive pairs).
    pub skipped: Vec<(StationarityClass, String)>,
}

/// Tolerances used for final points of runs: activity `1e-4` and
/// stationarity `1e-3·max(1, ‖∇f‖₂)`, matching the accuracy the homotopies
/// deliver at the end of the schedule.
pub fn run_tolerances<T: Real>(problem: &MpocProblem<T>, x: &[T]) -> Tolerances<T> {
    let g = problem.f.gradient(x);
    Tolerances::new(T::lit(1e-4), T::lit(1e-3) * T::one().max(crate::scalar::norm2(&g)))
}

/// Certifies S, M and W (in that order) at the final point of a feasible run.
pub fn certify_run<T: Real>(problem: &MpocProblem<T>, result: &RunResult<T>) -> Result<RunCertification<T>> {
    if !result.feasible {
        return Err(Error::InfeasibleResult);
    }
    let tol = run_tolerances(problem, &result.final_x);
    let mut out = RunCertification { strongest: None, certificates: Vec::new(), skipped: Vec::new() };
    for cls in [StationarityClass::S, StationarityClass::M, StationarityClass::W] {
        match certify_mpoc(problem, &result.final_x, cls, &tol) {
            Ok(c) => {
                if c.holds && out.strongest.is_none() {
                    out.strongest = Some(cls);
                }
                out.certificates.push(c);
            }
            Err(e @ Error::BiactiveOverflow { .. }) => out.skipped.push((cls, e.to_string())),
            Err(e) => return Err(e),
        }
    }
    Ok(out)
}
