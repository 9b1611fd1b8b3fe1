//! Active patterns, multiplier recovery and stationarity certificates.
//!
//! A certificate is produced by solving a nonnegative least-squares problem
//! for the multipliers of the stationarity equation
//! `0 = ∇f + Σ λ_i ∇g_i + Σ ρ_j ∇h_j + (pair terms)`; the class decides
//! which pair columns exist and which sign restrictions they carry. Sign and
//! product conditions on biactive pairs are decided by enumerating branches.

use crate::error::{Error, Result};
use crate::linalg::{lstsq, svd_jacobi, Matrix};
use crate::model::{feasibility, MpocProblem, SmoothFn};
use crate::reformulate::{LiftedProgram, MpccInstance, MpscInstance};
use crate::scalar::{norm2, norm_inf, Real};

/// Largest biactive set for which two-way branches are enumerated.
pub const MAX_BIACTIVE: usize = 20;
/// Upper bound on the number of branches enumerated for one certificate.
pub const MAX_BRANCHES: usize = 1 << 20;

/// Sign pattern of the or-pairs at a point. Indices are 0-based positions in
/// the problem's pair list; `m` stands for negative, `p` for positive.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct OrActivePattern<T> {
    pub i_m0: Vec<usize>,
    pub i_0m: Vec<usize>,
    pub i_mp: Vec<usize>,
    pub i_pm: Vec<usize>,
    pub i_0p: Vec<usize>,
    pub i_p0: Vec<usize>,
    pub i_mm: Vec<usize>,
    pub i_00: Vec<usize>,
    /// Active inequalities `|g_i(x)| ≤ tolerance`.
    pub active_g: Vec<usize>,
    pub tolerance: T,
}

impl<T: Real> OrActivePattern<T> {
    /// `I^{0+} ∪ I^{+0} ∪ I^{00}`, sorted.
    pub fn active_or(&self) -> Vec<usize> {
        let mut v: Vec<usize> = self.i_0p.iter().chain(&self.i_p0).chain(&self.i_00).copied().collect();
        v.sort_unstable();
        v
    }

    pub fn sets(&self) -> [(&'static str, &[usize]); 8] {
        [
            ("-0", &self.i_m0),
            ("0-", &self.i_0m),
            ("-+", &self.i_mp),
            ("+-", &self.i_pm),
            ("0+", &self.i_0p),
            ("+0", &self.i_p0),
            ("--", &self.i_mm),
            ("00", &self.i_00),
        ]
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Sign {
    Neg,
    Zero,
    Pos,
}

fn sign_of<T: Real>(v: T, eps: T) -> Sign {
    if v.abs() <= eps {
        Sign::Zero
    } else if v < T::zero() {
        Sign::Neg
    } else {
        Sign::Pos
    }
}

pub fn active_pattern<T: Real>(problem: &MpocProblem<T>, x: &[T], eps: T) -> Result<OrActivePattern<T>> {
    let report = feasibility(problem, x)?;
    if report.max_violation > eps {
        return Err(Error::InfeasiblePoint { violation: report.max_violation.to_f64_lossy(), tolerance: eps.to_f64_lossy() });
    }
    let mut pat = OrActivePattern { tolerance: eps, ..Default::default() };
    for (l, pair) in problem.or_pairs.iter().enumerate() {
        use Sign::*;
        let set = match (sign_of(pair.g.value(x), eps), sign_of(pair.h.value(x), eps)) {
            (Neg, Zero) => &mut pat.i_m0,
            (Zero, Neg) => &mut pat.i_0m,
            (Neg, Pos) => &mut pat.i_mp,
            (Pos, Neg) => &mut pat.i_pm,
            (Zero, Pos) => &mut pat.i_0p,
            (Pos, Zero) => &mut pat.i_p0,
            (Neg, Neg) => &mut pat.i_mm,
            (Zero, Zero) => &mut pat.i_00,
            (Pos, Pos) => unreachable!("feasibility check excludes (+,+)"),
        };
        set.push(l);
    }
    pat.active_g = problem.g.iter().enumerate().filter(|(_, g)| g.value(x).abs() <= eps).map(|(i, _)| i).collect();
    Ok(pat)
}

#[derive(Debug, Clone, PartialEq)]
pub struct NnlsSolution<T> {
    pub alpha: Vec<T>,
    pub beta: Vec<T>,
    pub residual: T,
}

fn combination<T: Real>(target: &[T], nonneg: &[Vec<T>], alpha: &[T], free: &[Vec<T>], beta: &[T]) -> Vec<T> {
    let mut r = target.to_vec();
    for (c, a) in nonneg.iter().zip(alpha).chain(free.iter().zip(beta)) {
        if *a != T::zero() {
            crate::scalar::axpy(*a, c, &mut r);
        }
    }
    r
}

/// Minimizes `‖target + Σ α_i v_i + Σ β_j w_j‖₂` over `α ≥ 0` and free `β`
/// by a Lawson–Hanson active-set iteration; the free block is re-solved by
/// least squares together with the passive set in every step.
pub fn nnls_residual<T: Real>(nonneg: &[Vec<T>], free: &[Vec<T>], target: &[T]) -> NnlsSolution<T> {
    let n = target.len();
    let k = nonneg.len();
    let r = free.len();
    assert!(nonneg.iter().chain(free).all(|c| c.len() == n), "column length mismatch");
    let rhs: Vec<T> = target.iter().map(|v| -*v).collect();
    let scale = nonneg.iter().chain(free).map(|c| norm2(c)).fold(T::one(), T::max) * T::one().max(norm2(target));
    let grad_tol = T::epsilon() * T::lit(1e3) * scale;

    let solve_sub = |passive: &[usize]| -> Vec<T> {
        let cols: Vec<Vec<T>> = passive.iter().map(|&i| nonneg[i].clone()).chain(free.iter().cloned()).collect();
        if cols.is_empty() {
            return Vec::new();
        }
        lstsq(&Matrix::from_columns(n, &cols), &rhs)
    };

    let mut alpha = vec![T::zero(); k];
    let mut passive: Vec<usize> = Vec::new();
    let mut excluded = vec![false; k];
    let mut beta = {
        let z = solve_sub(&passive);
        z[..r].to_vec()
    };
    let max_outer = 3 * (k + 1) + 30;
    for _ in 0..max_outer {
        let res = combination(&rhs, nonneg, &alpha.iter().map(|a| -*a).collect::<Vec<_>>(), free, &beta.iter().map(|b| -*b).collect::<Vec<_>>());
        let mut best: Option<(usize, T)> = None;
        for j in 0..k {
            if passive.contains(&j) || excluded[j] {
                continue;
            }
            let w = crate::scalar::dot(&nonneg[j], &res);
            if w > grad_tol && best.map_or(true, |(_, bw)| w > bw) {
                best = Some((j, w));
            }
        }
        let Some((j, _)) = best else { break };
        passive.push(j);
        passive.sort_unstable();
        let mut first = true;
        loop {
            let z = solve_sub(&passive);
            let zp = &z[..passive.len()];
            if first {
                let pos = passive.iter().position(|&i| i == j).expect("entering index is passive");
                if zp[pos] <= T::zero() {
                    // numerically dependent on the passive set; skip it
                    passive.remove(pos);
                    excluded[j] = true;
                    break;
                }
            }
            first = false;
            if zp.iter().all(|v| *v > T::zero()) {
                for (idx, &i) in passive.iter().enumerate() {
                    alpha[i] = zp[idx];
                }
                beta = z[passive.len()..].to_vec();
                excluded.iter_mut().for_each(|e| *e = false);
                break;
            }
            let mut theta = T::one();
            for (idx, &i) in passive.iter().enumerate() {
                if zp[idx] <= T::zero() {
                    let d = alpha[i] - zp[idx];
                    if d > T::zero() {
                        theta = theta.min(alpha[i] / d);
                    } else {
                        theta = T::zero();
                    }
                }
            }
            for (idx, &i) in passive.iter().enumerate() {
                alpha[i] = alpha[i] + theta * (zp[idx] - alpha[i]);
            }
            let tiny = T::epsilon() * T::lit(10.0);
            let before = passive.len();
            passive.retain(|&i| alpha[i] > tiny);
            for i in 0..k {
                if !passive.contains(&i) {
                    alpha[i] = T::zero();
                }
            }
            if passive.len() == before {
                // theta hit zero without freeing an index; drop the worst one
                let (idx, _) = passive
                    .iter()
                    .enumerate()
                    .min_by(|a, b| zp[a.0].partial_cmp(&zp[b.0]).unwrap_or(std::cmp::Ordering::Equal))
                    .expect("nonempty passive set");
                alpha[passive[idx]] = T::zero();
                passive.remove(idx);
            }
            if passive.is_empty() {
                let z = solve_sub(&passive);
                beta = z[..r].to_vec();
                break;
            }
        }
    }
    let residual = norm2(&combination(target, nonneg, &alpha, free, &beta));
    NnlsSolution { alpha, beta, residual }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ProblemClass {
    Mpoc,
    Mpsc,
    Mpcc,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum StationarityClass {
    W,
    C,
    M,
    S,
}

impl StationarityClass {
    pub fn as_str(self) -> &'static str {
        match self {
            StationarityClass::W => "W",
            StationarityClass::C => "C",
            StationarityClass::M => "M",
            StationarityClass::S => "S",
        }
    }
}

impl std::str::FromStr for StationarityClass {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_uppercase().as_str() {
            "W" => Ok(Self::W),
            "C" => Ok(Self::C),
            "M" => Ok(Self::M),
            "S" => Ok(Self::S),
            other => Err(Error::InvalidArgument(format!("unknown stationarity class `{other}`"))),
        }
    }
}

/// Restriction imposed on one biactive pair by a branch.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BiactiveBranch {
    /// The `G`-multiplier is zero.
    MuZero,
    /// The `H`-multiplier is zero.
    NuZero,
    BothNonneg,
    BothNonpos,
}

/// Multipliers over the full index ranges (zero outside the active sets).
#[derive(Debug, Clone, PartialEq)]
pub struct Multipliers<T> {
    pub lambda: Vec<T>,
    pub rho: Vec<T>,
    pub mu: Vec<T>,
    pub nu: Vec<T>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StationarityCertificate<T> {
    pub problem_class: ProblemClass,
    pub claimed: StationarityClass,
    pub multipliers: Multipliers<T>,
    pub residual_norm: T,
    pub eps_stat: T,
    pub branch: Option<Vec<(usize, BiactiveBranch)>>,
    pub holds: bool,
}

/// Activity tolerance and stationarity tolerance. `eps_stat = None` selects
/// `1e-6·max(1, ‖∇f(x)‖₂)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances<T> {
    pub eps_act: T,
    pub eps_stat: Option<T>,
}

impl<T: Real> Default for Tolerances<T> {
    fn default() -> Self {
        Self { eps_act: T::lit(1e-6), eps_stat: None }
    }
}

impl<T: Real> Tolerances<T> {
    pub fn new(eps_act: T, eps_stat: T) -> Self {
        Self { eps_act, eps_stat: Some(eps_stat) }
    }

    fn stat(&self, grad_f: &[T]) -> T {
        self.eps_stat.unwrap_or_else(|| T::lit(1e-6) * T::one().max(norm2(grad_f)))
    }
}

#[derive(Clone, Copy)]
enum Slot {
    Lambda(usize),
    Rho(usize),
    Mu(usize),
    Nu(usize),
}

struct Column<T> {
    slot: Slot,
    v: Vec<T>,
    /// stored multiplier = sign · coefficient
    sign: T,
    nonneg: bool,
}

/// One pair's multiplier columns: which are present and how they enter.
struct PairCols<T> {
    l: usize,
    grad_g: Option<Vec<T>>,
    grad_h: Option<Vec<T>>,
    biactive: bool,
}

struct System<T> {
    class: ProblemClass,
    grad_f: Vec<T>,
    m: usize,
    p: usize,
    q: usize,
    g_cols: Vec<(usize, Vec<T>)>,
    h_cols: Vec<(usize, Vec<T>)>,
    pairs: Vec<PairCols<T>>,
}

impl<T: Real> System<T> {
    fn biactive(&self) -> Vec<usize> {
        self.pairs.iter().filter(|p| p.biactive).map(|p| p.l).collect()
    }

    /// Columns for a branch assignment (`None` for unrestricted biactive
    /// treatment used by the weak class).
    fn columns(&self, cls: StationarityClass, branch: &[(usize, BiactiveBranch)]) -> Vec<Column<T>> {
        let one = T::one();
        let mut cols = Vec::new();
        for (i, v) in &self.g_cols {
            cols.push(Column { slot: Slot::Lambda(*i), v: v.clone(), sign: one, nonneg: true });
        }
        for (j, v) in &self.h_cols {
            cols.push(Column { slot: Slot::Rho(*j), v: v.clone(), sign: one, nonneg: false });
        }
        // Pair multipliers enter with + for MPOC/MPSC and − for MPCC.
        let entry = if self.class == ProblemClass::Mpcc { -one } else { one };
        let regular_nonneg = self.class == ProblemClass::Mpoc;
        for pc in &self.pairs {
            let b = branch.iter().find(|(l, _)| *l == pc.l).map(|(_, b)| *b);
            let (use_g, use_h, nonneg, flip) = if !pc.biactive {
                (true, true, regular_nonneg, false)
            } else {
                match (cls, b) {
                    (StationarityClass::S, _) if self.class != ProblemClass::Mpcc => (false, false, false, false),
                    (StationarityClass::S, _) => (true, true, true, false),
                    (_, Some(BiactiveBranch::MuZero)) => (false, true, regular_nonneg, false),
                    (_, Some(BiactiveBranch::NuZero)) => (true, false, regular_nonneg, false),
                    (_, Some(BiactiveBranch::BothNonneg)) => (true, true, true, false),
                    (_, Some(BiactiveBranch::BothNonpos)) => (true, true, true, true),
                    (_, None) => (true, true, regular_nonneg, false),
                }
            };
            let sign = if flip { -one } else { one };
            if let (true, Some(v)) = (use_g, &pc.grad_g) {
                cols.push(Column { slot: Slot::Mu(pc.l), v: v.iter().map(|x| *x * entry * sign).collect(), sign, nonneg });
            }
            if let (true, Some(v)) = (use_h, &pc.grad_h) {
                cols.push(Column { slot: Slot::Nu(pc.l), v: v.iter().map(|x| *x * entry * sign).collect(), sign, nonneg });
            }
        }
        cols
    }

    fn solve(&self, cls: StationarityClass, branch: &[(usize, BiactiveBranch)]) -> (Multipliers<T>, T) {
        let cols = self.columns(cls, branch);
        let nonneg: Vec<Vec<T>> = cols.iter().filter(|c| c.nonneg).map(|c| c.v.clone()).collect();
        let free: Vec<Vec<T>> = cols.iter().filter(|c| !c.nonneg).map(|c| c.v.clone()).collect();
        let sol = nnls_residual(&nonneg, &free, &self.grad_f);
        let mut mult = Multipliers {
            lambda: vec![T::zero(); self.m],
            rho: vec![T::zero(); self.p],
            mu: vec![T::zero(); self.q],
            nu: vec![T::zero(); self.q],
        };
        let (mut ia, mut ib) = (0, 0);
        for c in &cols {
            let coef = if c.nonneg {
                ia += 1;
                sol.alpha[ia - 1]
            } else {
                ib += 1;
                sol.beta[ib - 1]
            };
            let val = c.sign * coef;
            match c.slot {
                Slot::Lambda(i) => mult.lambda[i] = val,
                Slot::Rho(j) => mult.rho[j] = val,
                Slot::Mu(l) => mult.mu[l] = val,
                Slot::Nu(l) => mult.nu[l] = val,
            }
        }
        (mult, sol.residual)
    }

    fn certificate(
        &self,
        claimed: StationarityClass,
        eps: T,
        (multipliers, residual): (Multipliers<T>, T),
        branch: Option<Vec<(usize, BiactiveBranch)>>,
    ) -> StationarityCertificate<T> {
        StationarityCertificate {
            problem_class: self.class,
            claimed,
            multipliers,
            residual_norm: residual,
            eps_stat: eps,
            branch,
            holds: residual <= eps,
        }
    }

    fn certify(&self, cls: StationarityClass, eps: T) -> Result<StationarityCertificate<T>> {
        use StationarityClass::*;
        let bi = self.biactive();
        let cc = self.class == ProblemClass::Mpcc;
        if cls == C && !cc {
            return Err(Error::InvalidArgument("Clarke stationarity is defined for MPCC only".into()));
        }
        match cls {
            W => Ok(self.certificate(W, eps, self.solve(W, &[]), None)),
            S => {
                let branch = cc.then(|| bi.iter().map(|&l| (l, BiactiveBranch::BothNonneg)).collect::<Vec<_>>());
                Ok(self.certificate(S, eps, self.solve(S, branch.as_deref().unwrap_or(&[])), branch))
            }
            C | M => {
                let choices: &[BiactiveBranch] = match (cls, cc) {
                    (C, _) => &[BiactiveBranch::BothNonneg, BiactiveBranch::BothNonpos],
                    (_, false) => &[BiactiveBranch::NuZero, BiactiveBranch::MuZero],
                    (_, true) => &[BiactiveBranch::BothNonneg, BiactiveBranch::NuZero, BiactiveBranch::MuZero],
                };
                if bi.is_empty() {
                    let mut c = self.certificate(cls, eps, self.solve(W, &[]), Some(Vec::new()));
                    c.claimed = cls;
                    return Ok(c);
                }
                let radix = choices.len();
                let branches = (radix as f64).powi(bi.len() as i32);
                if bi.len() > MAX_BIACTIVE || branches > MAX_BRANCHES as f64 {
                    return Err(Error::BiactiveOverflow { count: bi.len(), cap: MAX_BIACTIVE });
                }
                // Cheap exits: the weak system failing rules out every branch.
                let weak = self.solve(W, &[]);
                if weak.1 > eps {
                    return Ok(self.certificate(cls, eps, weak, None));
                }
                let strong_branch: Vec<_> = bi.iter().map(|&l| (l, BiactiveBranch::BothNonneg)).collect();
                let strong = self.solve(S, if cc { &strong_branch } else { &[] });
                if strong.1 <= eps {
                    let branch = if cc {
                        strong_branch
                    } else {
                        bi.iter().map(|&l| (l, BiactiveBranch::NuZero)).collect()
                    };
                    return Ok(self.certificate(cls, eps, strong, Some(branch)));
                }
                let total = branches as usize;
                let mut best: Option<((Multipliers<T>, T), Vec<(usize, BiactiveBranch)>)> = None;
                for code in 0..total {
                    let mut c = code;
                    let branch: Vec<_> = bi
                        .iter()
                        .map(|&l| {
                            let b = choices[c % radix];
                            c /= radix;
                            (l, b)
                        })
                        .collect();
                    let sol = self.solve(cls, &branch);
                    let better = best.as_ref().map_or(true, |(b, _)| sol.1 < b.1);
                    let done = sol.1 <= eps;
                    if better {
                        best = Some((sol, branch));
                    }
                    if done {
                        break;
                    }
                }
                let (sol, branch) = best.expect("at least one branch");
                Ok(self.certificate(cls, eps, sol, Some(branch)))
            }
        }
    }
}

fn grads_at<T: Real>(fs: &[SmoothFn<T>], idx: &[usize], x: &[T]) -> Vec<(usize, Vec<T>)> {
    idx.iter().map(|&i| (i, fs[i].gradient(x))).collect()
}

fn mpoc_system<T: Real>(problem: &MpocProblem<T>, x: &[T], pat: &OrActivePattern<T>) -> System<T> {
    let all_h: Vec<usize> = (0..problem.p()).collect();
    let mut pairs = Vec::new();
    for l in pat.active_or() {
        let pair = &problem.or_pairs[l];
        let biactive = pat.i_00.contains(&l);
        let g_on = biactive || pat.i_0p.contains(&l);
        let h_on = biactive || pat.i_p0.contains(&l);
        pairs.push(PairCols {
            l,
            grad_g: g_on.then(|| pair.g.gradient(x)),
            grad_h: h_on.then(|| pair.h.gradient(x)),
            biactive,
        });
    }
    System {
        class: ProblemClass::Mpoc,
        grad_f: problem.f.gradient(x),
        m: problem.m(),
        p: problem.p(),
        q: problem.q(),
        g_cols: grads_at(&problem.g, &pat.active_g, x),
        h_cols: grads_at(&problem.h, &all_h, x),
        pairs,
    }
}

/// Decides whether `x` is W-, M- or S-stationary for the or-constrained
/// program.
pub fn certify_mpoc<T: Real>(
    problem: &MpocProblem<T>,
    x: &[T],
    cls: StationarityClass,
    tol: &Tolerances<T>,
) -> Result<StationarityCertificate<T>> {
    let pat = active_pattern(problem, x, tol.eps_act)?;
    let sys = mpoc_system(problem, x, &pat);
    let eps = tol.stat(&sys.grad_f);
    sys.certify(cls, eps)
}

/// Pair activity for lifted programs: which of the two pair functions vanish.
fn lifted_system<T: Real>(prog: &LiftedProgram<T>, point: &[T], class: ProblemClass, eps: T) -> System<T> {
    let active_g: Vec<usize> = (0..prog.g.len()).filter(|&i| prog.g[i].value(point).abs() <= eps).collect();
    let all_h: Vec<usize> = (0..prog.h.len()).collect();
    let mut pairs = Vec::new();
    for (l, (a, b)) in prog.pairs.iter().enumerate() {
        let za = a.value(point).abs() <= eps;
        let zb = b.value(point).abs() <= eps;
        if !za && !zb {
            continue;
        }
        pairs.push(PairCols {
            l,
            grad_g: za.then(|| a.gradient(point)),
            grad_h: zb.then(|| b.gradient(point)),
            biactive: za && zb,
        });
    }
    System {
        class,
        grad_f: prog.f.gradient(point),
        m: prog.g.len(),
        p: prog.h.len(),
        q: prog.pairs.len(),
        g_cols: grads_at(&prog.g, &active_g, point),
        h_cols: grads_at(&prog.h, &all_h, point),
        pairs,
    }
}

fn infeasible<T: Real>(violation: T, eps: T) -> Error {
    Error::InfeasiblePoint { violation: violation.to_f64_lossy(), tolerance: eps.to_f64_lossy() }
}

/// Stationarity for the switching lift. Multipliers `λ` refer to the lifted
/// inequality list (original `g`, then `y ≤ 0`, then `z ≤ 0`).
pub fn certify_mpsc<T: Real>(
    inst: &MpscInstance<T>,
    point: &[T],
    cls: StationarityClass,
    tol: &Tolerances<T>,
) -> Result<StationarityCertificate<T>> {
    let v = inst.violation(point)?;
    if v > tol.eps_act {
        return Err(infeasible(v, tol.eps_act));
    }
    let sys = lifted_system(&inst.program, point, ProblemClass::Mpsc, tol.eps_act);
    let eps = tol.stat(&sys.grad_f);
    sys.certify(cls, eps)
}

/// Stationarity for the complementarity lift; `μ`, `ν` are the multipliers
/// of `y ≥ 0` and `z ≥ 0` entering the stationarity equation with a minus
/// sign. `λ` refers to the lifted inequalities (original `g`, then
/// `G − y ≤ 0`, then `H − z ≤ 0`).
pub fn certify_mpcc<T: Real>(
    inst: &MpccInstance<T>,
    point: &[T],
    cls: StationarityClass,
    tol: &Tolerances<T>,
) -> Result<StationarityCertificate<T>> {
    let v = inst.violation(point)?;
    if v > tol.eps_act {
        return Err(infeasible(v, tol.eps_act));
    }
    let sys = lifted_system(&inst.program, point, ProblemClass::Mpcc, tol.eps_act);
    let eps = tol.stat(&sys.grad_f);
    sys.certify(cls, eps)
}

#[derive(Debug, Clone, PartialEq)]
pub struct CqReport<T> {
    pub mpoc_licq: bool,
    pub mpoc_mfcq: bool,
    /// `+∞` for an empty gradient family.
    pub smallest_singular_value: T,
    /// Coefficients of a nontrivial vanishing combination, ordered as the
    /// family: active `∇g_i`, `∇G_l` on `I^{0+} ∪ I^{00}`, `∇H_l` on
    /// `I^{+0} ∪ I^{00}` (each in index order), then all `∇h_j`.
    pub pld_witness: Option<Vec<T>>,
}

fn cq_family<T: Real>(problem: &MpocProblem<T>, x: &[T], eps_act: T) -> Result<(Vec<Vec<T>>, Vec<Vec<T>>)> {
    let pat = active_pattern(problem, x, eps_act)?;
    let mut ineq: Vec<Vec<T>> = pat.active_g.iter().map(|&i| problem.g[i].gradient(x)).collect();
    let mut g_idx: Vec<usize> = pat.i_0p.iter().chain(&pat.i_00).copied().collect();
    g_idx.sort_unstable();
    let mut h_idx: Vec<usize> = pat.i_p0.iter().chain(&pat.i_00).copied().collect();
    h_idx.sort_unstable();
    ineq.extend(g_idx.iter().map(|&l| problem.or_pairs[l].g.gradient(x)));
    ineq.extend(h_idx.iter().map(|&l| problem.or_pairs[l].h.gradient(x)));
    let eq = problem.h.iter().map(|h| h.gradient(x)).collect();
    Ok((ineq, eq))
}

fn licq_of<T: Real>(n: usize, family: &[Vec<T>]) -> (bool, T) {
    if family.is_empty() {
        return (true, T::infinity());
    }
    let svd = svd_jacobi(&Matrix::from_columns(n, family));
    let smax = svd.values[0];
    let smin = if family.len() > n { T::zero() } else { *svd.values.last().expect("nonempty") };
    (smin > T::lit(1e-8) * smax, smin)
}

fn normalized<T: Real>(v: Vec<T>) -> Vec<T> {
    let s = norm_inf(&v);
    if s > T::zero() {
        v.into_iter().map(|x| x / s).collect()
    } else {
        v
    }
}

/// Positive-linear dependence witness of `{v_i (nonneg)} ∪ {w_j (free)}`.
fn pld_witness<T: Real>(n: usize, ineq: &[Vec<T>], eq: &[Vec<T>]) -> Option<Vec<T>> {
    let k = ineq.len();
    if !eq.is_empty() {
        let (independent, _) = licq_of(n, eq);
        if !independent {
            let mut w = vec![T::zero(); k];
            if eq.len() > n {
                // more vectors than dimensions: take a null vector of the
                // leading n + 1 of them
                let svd = svd_jacobi(&Matrix::from_columns(n, &eq[..n + 1]));
                let mut beta = svd.vectors.last().expect("nonempty").clone();
                beta.resize(eq.len(), T::zero());
                w.extend(beta);
            } else {
                let svd = svd_jacobi(&Matrix::from_columns(n, eq));
                w.extend(svd.vectors.last().expect("nonempty").iter().copied());
            }
            return Some(normalized(w));
        }
    }
    let col_scale = ineq.iter().chain(eq).map(|c| norm2(c)).fold(T::one(), T::max);
    for j in 0..k {
        let others: Vec<Vec<T>> = (0..k).filter(|&i| i != j).map(|i| ineq[i].clone()).collect();
        let sol = nnls_residual(&others, eq, &ineq[j]);
        if sol.residual <= T::lit(1e-8) * col_scale {
            let mut w = Vec::with_capacity(k + eq.len());
            let mut it = sol.alpha.iter();
            for i in 0..k {
                w.push(if i == j { T::one() } else { *it.next().expect("coefficient") });
            }
            w.extend(sol.beta.iter().copied());
            let w = normalized(w);
            if norm_inf(&w) >= T::lit(1e-8) {
                return Some(w);
            }
        }
    }
    None
}

fn cq_report<T: Real>(problem: &MpocProblem<T>, x: &[T], eps_act: T) -> Result<CqReport<T>> {
    let (ineq, eq) = cq_family(problem, x, eps_act)?;
    let family: Vec<Vec<T>> = ineq.iter().chain(&eq).cloned().collect();
    let (licq, smin) = licq_of(problem.n, &family);
    let witness = if licq { None } else { pld_witness(problem.n, &ineq, &eq) };
    Ok(CqReport { mpoc_licq: licq, mpoc_mfcq: witness.is_none(), smallest_singular_value: smin, pld_witness: witness })
}

/// Linear independence of the active gradient family.
pub fn check_mpoc_licq<T: Real>(problem: &MpocProblem<T>, x: &[T], eps_act: T) -> Result<CqReport<T>> {
    cq_report(problem, x, eps_act)
}

/// Positive-linear independence of the active gradient family.
pub fn check_mpoc_mfcq<T: Real>(problem: &MpocProblem<T>, x: &[T], eps_act: T) -> Result<CqReport<T>> {
    cq_report(problem, x, eps_act)
}
