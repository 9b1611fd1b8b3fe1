//! Benchmark problems: a nonlinear disjunctive program, a separable program
//! with gap domains, an or-constrained optimal control problem for the heat
//! equation, and two planar toy problems.

use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::{Cholesky, Matrix};
use crate::model::{MpocProblem, SmoothFn};
use crate::nlp::{solve_nlp, NlpSpec, NlpStatus};
use crate::scalar::Real;

/// `min (x₁ − 1)²  s.t.  x₁ ≤ 0 ∨ x₂ ≤ 0`.
///
/// Global minimizers form `{(1, x₂) : x₂ ≤ 0}`; the origin is M- but not
/// S-stationary.
pub fn toy_line<T: Real>() -> MpocProblem<T> {
    let mut q = Matrix::zeros(2, 2);
    q[(0, 0)] = T::lit(2.0);
    let f = SmoothFn::quadratic(q, vec![T::lit(-2.0), T::zero()], T::one());
    MpocProblem::new("toy-line", f)
        .or_pair(SmoothFn::coordinate(2, 0, T::one(), T::zero()), SmoothFn::coordinate(2, 1, T::one(), T::zero()))
        .known_optimum(T::zero(), Some(vec![T::one(), T::zero()]))
}

/// `min ½(x₁ − 1)² + ½(x₂ − 1)²  s.t.  x₁ ≤ 0 ∨ x₂ ≤ 0`.
///
/// The origin is W- but not M-stationary; `(1, 0)` and `(0, 1)` are global
/// minimizers.
pub fn toy_point<T: Real>() -> MpocProblem<T> {
    let f = SmoothFn::quadratic(Matrix::identity(2), vec![-T::one(), -T::one()], T::one());
    MpocProblem::new("toy-point", f)
        .or_pair(SmoothFn::coordinate(2, 0, T::one(), T::zero()), SmoothFn::coordinate(2, 1, T::one(), T::zero()))
        .known_optimum(T::lit(0.5), Some(vec![T::one(), T::zero()]))
}

/// Hessian-carrying quadratic in few coordinates:
/// `c + Σ lin_i x_i + Σ sq_i (x_i − s_i)²`.
fn sparse_quadratic<T: Real>(dim: usize, constant: T, lin: Vec<(usize, T)>, sq: Vec<(usize, T, T)>) -> SmoothFn<T> {
    let (lin2, sq2, sq3) = (lin.clone(), sq.clone(), sq.clone());
    SmoothFn::new(
        dim,
        move |x| {
            let mut v = constant;
            for (i, c) in &lin {
                v += *c * x[*i];
            }
            for (i, c, s) in &sq {
                let d = x[*i] - *s;
                v += *c * d * d;
            }
            v
        },
        move |x, w, out| {
            for (i, c) in &lin2 {
                out[*i] += w * *c;
            }
            for (i, c, s) in &sq2 {
                out[*i] += w * T::lit(2.0) * *c * (x[*i] - *s);
            }
        },
    )
    .with_hessian(move |_, w, h| {
        for (i, c, _) in &sq3 {
            h[(*i, *i)] += w * T::lit(2.0) * *c;
        }
    })
}

/// Disjunctive program over `(x₁, x₂, x₃, u, v)`:
///
/// ```text
/// min (x₁ − 1)² + (x₂ − 2)² + (x₃ + 2)²
/// s.t. 4 − x₁ − u ≤ 0
///      5 − x₁ − (x₂ − 2)² − (x₃ + 2)² − u ≤ 0
///      x₁² + x₂² − x₃ − v ≤ 0
///      1 − (x₁ − 1)² − x₂² − x₃ − v ≤ 0
///      x₂ − v ≤ 0
///      u ≤ 0 ∨ v ≤ 0
/// ```
///
/// The slack `u` (`v`) switches on the first (second) disjunct. The global
/// minimum 9 is attained at `x = (0, 0, 0)`.
pub fn build_disjunctive<T: Real>() -> MpocProblem<T> {
    let one = T::one();
    let two = T::lit(2.0);
    let f = sparse_quadratic(5, T::zero(), vec![], vec![(0, one, one), (1, one, two), (2, one, -two)]);
    MpocProblem::new("disjunctive", f)
        .ineq(SmoothFn::affine(5, vec![(0, -one), (3, -one)], T::lit(4.0)))
        .ineq(sparse_quadratic(5, T::lit(5.0), vec![(0, -one), (3, -one)], vec![(1, -one, two), (2, -one, -two)]))
        .ineq(sparse_quadratic(5, T::zero(), vec![(2, -one), (4, -one)], vec![(0, one, T::zero()), (1, one, T::zero())]))
        .ineq(sparse_quadratic(5, one, vec![(2, -one), (4, -one)], vec![(0, -one, one), (1, -one, T::zero())]))
        .ineq(SmoothFn::affine(5, vec![(1, one), (4, -one)], T::zero()))
        .or_pair(SmoothFn::coordinate(5, 3, one, T::zero()), SmoothFn::coordinate(5, 4, one, T::zero()))
        .known_optimum(T::lit(9.0), Some(vec![T::zero(), T::zero(), T::zero(), T::lit(4.0), T::zero()]))
}

fn check_gap_vector<T: Real>(a: &[T]) -> Result<()> {
    if a.iter().any(|v| !(*v >= T::zero() && *v <= T::one())) {
        return Err(Error::InvalidArgument("gap-domain targets must lie in [0, 1]".into()));
    }
    if a.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::InvalidArgument("gap-domain targets must be sorted ascending".into()));
    }
    Ok(())
}

/// Closed-form value `Σ_{l ≤ n−k} a_l² + Σ_{l > n−k} (1 − a_l)²` for an
/// integer budget `k`, obtained by putting the `k` largest targets at 1 and
/// all others at 0.
///
/// It is only an upper bound on the optimal value: pushing several lower
/// variables slightly below zero can free enough budget for one more
/// variable at 1. [`gap_domain_exact`] returns the true optimum.
pub fn gap_domain_closed_form<T: Real>(budget: usize, a: &[T]) -> T {
    let n = a.len();
    let k = budget.min(n);
    let low: T = a[..n - k].iter().map(|v| *v * *v).sum();
    let high: T = a[n - k..].iter().map(|v| (T::one() - *v) * (T::one() - *v)).sum();
    low + high
}

/// Optimal value and point of `min Σ (x_l − a_l)²` with `x_l ≥ 1` on `upper`,
/// `x_l ≤ 0` elsewhere and `Σ x_l ≤ budget`; `None` if infeasible.
fn branch_minimum(budget: f64, a: &[f64], upper: &[bool]) -> Option<(f64, Vec<f64>)> {
    let clamp = |lam: f64| -> Vec<f64> {
        a.iter()
            .zip(upper)
            .map(|(&v, &up)| if up { (v - lam / 2.0).max(1.0) } else { (v - lam / 2.0).min(0.0) })
            .collect()
    };
    let sum = |x: &[f64]| x.iter().sum::<f64>();
    let mut x = clamp(0.0);
    if sum(&x) > budget {
        if upper.iter().all(|u| *u) {
            return None;
        }
        // Σx(λ) is continuous and nonincreasing; bracket and bisect.
        let mut hi = 1.0;
        while sum(&clamp(hi)) > budget {
            hi *= 2.0;
        }
        let mut lo = 0.0;
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if sum(&clamp(mid)) > budget {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        // polish on the identified active set
        let xs = clamp(hi);
        let free: Vec<usize> = (0..a.len()).filter(|&i| if upper[i] { xs[i] > 1.0 } else { xs[i] < 0.0 }).collect();
        let fixed: f64 = (0..a.len()).filter(|i| !free.contains(i)).map(|i| xs[i]).sum();
        let lam = if free.is_empty() {
            hi
        } else {
            2.0 * (free.iter().map(|&i| a[i]).sum::<f64>() + fixed - budget) / free.len() as f64
        };
        x = clamp(lam.max(0.0));
        if sum(&x) > budget + 1e-12 {
            x = xs;
        }
    }
    let f = x.iter().zip(a).map(|(x, a)| (x - a) * (x - a)).sum();
    Some((f, x))
}

/// Exhaustive optimum over all `2ⁿ` branch patterns (`n ≤ 20`).
pub fn gap_domain_bruteforce(budget: f64, a: &[f64]) -> Result<(f64, Vec<f64>)> {
    const MAX_N: usize = 20;
    let n = a.len();
    if n > MAX_N {
        return Err(Error::TooLarge { size: n, max: MAX_N });
    }
    let mut best: Option<(f64, Vec<f64>)> = None;
    for mask in 0u32..(1u32 << n) {
        let upper: Vec<bool> = (0..n).map(|i| mask >> i & 1 == 1).collect();
        if let Some((f, x)) = branch_minimum(budget, a, &upper) {
            if best.as_ref().map_or(true, |(bf, _)| f < *bf) {
                best = Some((f, x));
            }
        }
    }
    best.ok_or_else(|| Error::InvalidArgument("gap-domain instance is infeasible".into()))
}

/// Exact optimum for sorted targets in `[0, 1]`: some optimal pattern puts
/// the `s` largest targets in the upper branch, so only `n + 1` patterns
/// need to be solved.
pub fn gap_domain_exact(budget: f64, a: &[f64]) -> Result<(f64, Vec<f64>)> {
    check_gap_vector(a)?;
    let n = a.len();
    let mut best: Option<(f64, Vec<f64>)> = None;
    for s in 0..=n {
        let upper: Vec<bool> = (0..n).map(|i| i >= n - s).collect();
        if let Some((f, x)) = branch_minimum(budget, a, &upper) {
            if best.as_ref().map_or(true, |(bf, _)| f < *bf) {
                best = Some((f, x));
            }
        }
    }
    best.ok_or_else(|| Error::InvalidArgument("gap-domain instance is infeasible".into()))
}

/// `min Σ(x_l − a_l)²  s.t.  Σ x_l ≤ budget,  x_l ≤ 0 ∨ x_l ≥ 1`, encoded by
/// the pairs `(x_l, 1 − x_l)`. The known optimum is the exact one from
/// [`gap_domain_exact`].
pub fn build_gap_domain(budget: f64, a: &[f64]) -> Result<MpocProblem<f64>> {
    check_gap_vector(a)?;
    let n = a.len();
    if n == 0 {
        return Err(Error::InvalidArgument("gap-domain instance needs n ≥ 1".into()));
    }
    let (f_min, x_min) = gap_domain_exact(budget, a)?;
    let f = sparse_quadratic(n, 0.0, vec![], (0..n).map(|l| (l, 1.0, a[l])).collect());
    let mut p = MpocProblem::new(format!("gap-domain-{n}"), f)
        .ineq(SmoothFn::affine(n, (0..n).map(|l| (l, 1.0)).collect(), -budget));
    for l in 0..n {
        p = p.or_pair(SmoothFn::coordinate(n, l, 1.0, 0.0), SmoothFn::coordinate(n, l, -1.0, 1.0));
    }
    Ok(p.known_optimum(f_min, Some(x_min)))
}

/// Sorted uniform targets in `[0, 1]` with at least `min_high` entries above
/// `0.5` (redrawn until the condition holds).
pub fn random_gap_targets(n: usize, min_high: usize, seed: u64) -> Result<Vec<f64>> {
    if min_high > n {
        return Err(Error::InvalidArgument(format!("cannot have {min_high} of {n} targets above 0.5")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let mut a: Vec<f64> = (0..n).map(|_| rng.gen::<f64>()).collect();
        a.sort_by(|x, y| x.total_cmp(y));
        if a.iter().filter(|v| **v > 0.5).count() >= min_high {
            return Ok(a);
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HeatGridConfig {
    /// Cells per axis of the uniform grid on `(−1, 1)²`.
    pub nodes_per_axis: usize,
    /// Implicit Euler steps on the time horizon.
    pub time_steps: usize,
    pub horizon: f64,
    pub alpha: f64,
    pub beta: f64,
    pub seed: u64,
}

impl Default for HeatGridConfig {
    fn default() -> Self {
        Self { nodes_per_axis: 8, time_steps: 24, horizon: 6.0, alpha: 1e-6, beta: 1e-5, seed: 0 }
    }
}

impl HeatGridConfig {
    pub fn validate(&self) -> Result<()> {
        if self.nodes_per_axis < 3 || self.time_steps < 4 || !(self.alpha > 0.0) || !(self.beta > 0.0) || !(self.horizon > 0.0) {
            return Err(Error::InvalidArgument(
                "heat grid needs ≥ 3 cells per axis, ≥ 4 time steps and positive α, β, horizon".into(),
            ));
        }
        Ok(())
    }

    pub fn dt(&self) -> f64 {
        self.horizon / self.time_steps as f64
    }

    pub fn times(&self) -> Vec<f64> {
        (0..=self.time_steps).map(|k| k as f64 * self.dt()).collect()
    }
}

/// Reference controls `u_d(t) = −20 sin(πt/3)`, `v_d(t) = 10 cos(πt/2)`.
pub fn heat_reference_controls(t: f64) -> (f64, f64) {
    use std::f64::consts::PI;
    (-20.0 * (PI * t / 3.0).sin(), 10.0 * (PI * t / 2.0).cos())
}

/// Finite-difference heat equation with two lumped controls:
///
/// ```text
/// ∂_t y − Δy = (χ_u u(t) + χ_v v(t)) / 10  on (0, T) × (−1, 1)²,
/// ∂_n y = 0,  y(0) = 0,
/// ```
///
/// on a cell-centered grid (cells with center `x₁ ≤ 0` form the `u`
/// region), implicit Euler in time with the control evaluated at the new
/// time level. The control vector is `(u_0, …, u_N, v_0, …, v_N)`.
#[derive(Debug, Clone)]
pub struct HeatModel {
    pub cfg: HeatGridConfig,
    cells: usize,
    h: f64,
    u_mask: Vec<bool>,
    step: Cholesky<f64>,
    /// Desired state at every time node.
    pub desired: Vec<Vec<f64>>,
    /// `f(c) = ½ cᵀ Q c + bᵀ c + c₀`.
    pub q: Matrix<f64>,
    pub b: Vec<f64>,
    pub c0: f64,
}

impl HeatModel {
    pub fn new(cfg: HeatGridConfig) -> Result<Self> {
        cfg.validate()?;
        let m = cfg.nodes_per_axis;
        let cells = m * m;
        let h = 2.0 / m as f64;
        let center = |i: usize| -1.0 + (i as f64 + 0.5) * h;
        let u_mask: Vec<bool> = (0..cells).map(|c| center(c % m) <= 0.0).collect();
        let dt = cfg.dt();
        // I − Δt L with reflecting ghost cells
        let mut a = Matrix::identity(cells);
        let k = dt / (h * h);
        for r in 0..m {
            for c in 0..m {
                let idx = r * m + c;
                let nbrs = [
                    (r > 0).then(|| idx - m),
                    (r + 1 < m).then(|| idx + m),
                    (c > 0).then(|| idx - 1),
                    (c + 1 < m).then(|| idx + 1),
                ];
                for nb in nbrs.into_iter().flatten() {
                    a[(idx, idx)] += k;
                    a[(idx, nb)] -= k;
                }
            }
        }
        let step = Cholesky::factor(&a).ok_or_else(|| Error::InvalidArgument("singular heat step matrix".into()))?;
        let mut model = Self {
            cfg,
            cells,
            h,
            u_mask,
            step,
            desired: Vec::new(),
            q: Matrix::zeros(0, 0),
            b: Vec::new(),
            c0: 0.0,
        };
        model.desired = model.simulate(&model.reference_controls());
        model.assemble();
        Ok(model)
    }

    pub fn time_nodes(&self) -> usize {
        self.cfg.time_steps + 1
    }

    pub fn n_controls(&self) -> usize {
        2 * self.time_nodes()
    }

    pub fn reference_controls(&self) -> Vec<f64> {
        let times = self.cfg.times();
        let (u, v): (Vec<f64>, Vec<f64>) = times.iter().map(|t| heat_reference_controls(*t)).unzip();
        u.into_iter().chain(v).collect()
    }

    /// State at every time node.
    pub fn simulate(&self, controls: &[f64]) -> Vec<Vec<f64>> {
        let nt = self.time_nodes();
        assert_eq!(controls.len(), 2 * nt);
        let dt = self.cfg.dt();
        let mut y = vec![vec![0.0; self.cells]];
        for k in 1..nt {
            let (u, v) = (controls[k], controls[nt + k]);
            let rhs: Vec<f64> = y[k - 1]
                .iter()
                .zip(&self.u_mask)
                .map(|(yk, in_u)| yk + dt * 0.1 * if *in_u { u } else { v })
                .collect();
            y.push(self.step.solve(&rhs));
        }
        y
    }

    fn time_weights(&self) -> Vec<f64> {
        let nt = self.time_nodes();
        let dt = self.cfg.dt();
        (0..nt).map(|k| if k == 0 || k == nt - 1 { 0.5 * dt } else { dt }).collect()
    }

    /// Objective evaluated by simulating the state.
    pub fn objective_by_simulation(&self, controls: &[f64]) -> f64 {
        let y = self.simulate(controls);
        let w = self.time_weights();
        let area = self.h * self.h;
        let mut track = 0.0;
        for (k, wk) in w.iter().enumerate() {
            track += wk * area * y[k].iter().zip(&self.desired[k]).map(|(a, b)| (a - b) * (a - b)).sum::<f64>();
        }
        0.5 * track + self.regularizer(controls)
    }

    fn regularizer(&self, controls: &[f64]) -> f64 {
        let nt = self.time_nodes();
        let w = self.time_weights();
        let dt = self.cfg.dt();
        let mut l2 = 0.0;
        let mut h1 = 0.0;
        for part in controls.chunks(nt) {
            l2 += part.iter().zip(&w).map(|(c, w)| w * c * c).sum::<f64>();
            h1 += part.windows(2).map(|p| (p[1] - p[0]) * (p[1] - p[0]) / dt).sum::<f64>();
        }
        0.5 * self.cfg.alpha * l2 + 0.5 * self.cfg.beta * h1
    }

    /// Assembles `Q`, `b`, `c₀` from the unit responses of the control basis.
    fn assemble(&mut self) {
        let n = self.n_controls();
        let nt = self.time_nodes();
        let w = self.time_weights();
        let area = self.h * self.h;
        let responses: Vec<Vec<Vec<f64>>> = (0..n)
            .map(|j| {
                let mut e = vec![0.0; n];
                e[j] = 1.0;
                self.simulate(&e)
            })
            .collect();
        let inner = |a: &[Vec<f64>], b: &[Vec<f64>]| -> f64 {
            (0..nt).map(|k| w[k] * area * a[k].iter().zip(&b[k]).map(|(x, y)| x * y).sum::<f64>()).sum()
        };
        let mut q = Matrix::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                let v = inner(&responses[i], &responses[j]);
                q[(i, j)] = v;
                q[(j, i)] = v;
            }
        }
        let dt = self.cfg.dt();
        for part in 0..2 {
            let off = part * nt;
            for k in 0..nt {
                q[(off + k, off + k)] += self.cfg.alpha * w[k];
            }
            for k in 0..nt - 1 {
                let (i, j) = (off + k, off + k + 1);
                let c = self.cfg.beta / dt;
                q[(i, i)] += c;
                q[(j, j)] += c;
                q[(i, j)] -= c;
                q[(j, i)] -= c;
            }
        }
        self.b = (0..n).map(|j| -inner(&responses[j], &self.desired)).collect();
        self.c0 = 0.5 * inner(&self.desired, &self.desired);
        self.q = q;
    }

    pub fn objective(&self) -> SmoothFn<f64> {
        SmoothFn::quadratic(self.q.clone(), self.b.clone(), self.c0)
    }

    /// The or-constrained program `u_i ≥ 0 ∨ v_i ≥ 0` at every time node.
    pub fn problem(&self) -> MpocProblem<f64> {
        let n = self.n_controls();
        let nt = self.time_nodes();
        let mut p = MpocProblem::new("heat-control", self.objective());
        for i in 0..nt {
            p = p.or_pair(SmoothFn::coordinate(n, i, -1.0, 0.0), SmoothFn::coordinate(n, nt + i, -1.0, 0.0));
        }
        p
    }

    /// Writes `Q` (rows), then `b`, then `c₀` as CSV.
    pub fn write_quadratic_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv::WriterBuilder::new().flexible(true).from_path(path)?;
        for i in 0..self.q.rows() {
            w.write_record(self.q.row(i).iter().map(|v| format!("{v:e}")))?;
        }
        w.write_record(self.b.iter().map(|v| format!("{v:e}")))?;
        w.write_record([format!("{:e}", self.c0)])?;
        w.flush()?;
        Ok(())
    }
}

pub fn build_heat_control(cfg: HeatGridConfig) -> Result<MpocProblem<f64>> {
    Ok(HeatModel::new(cfg)?.problem())
}

/// Global optimum on a coarse time grid by enumerating the branch of every
/// time node, lifted to the fine grid by linear interpolation in time.
///
/// Where interpolation between nodes of different branches leaves both
/// controls negative, the larger one is raised to zero, which keeps the
/// lifted point feasible. Returns the coarse optimal value and the fine-grid
/// controls.
pub fn heat_coarse_global_estimate(
    fine: &HeatGridConfig,
    coarse_steps: usize,
    cap_patterns: usize,
) -> Result<(f64, Vec<f64>)> {
    let coarse_cfg = HeatGridConfig { time_steps: coarse_steps, ..*fine };
    let coarse = HeatModel::new(coarse_cfg)?;
    let nt = coarse.time_nodes();
    let patterns = 1usize.checked_shl(nt as u32).unwrap_or(usize::MAX);
    if nt >= usize::BITS as usize || patterns > cap_patterns {
        return Err(Error::TooLarge { size: patterns, max: cap_patterns });
    }
    let n = coarse.n_controls();
    let objective = coarse.objective();
    let mut best: Option<(f64, Vec<f64>)> = None;
    for mask in 0..patterns {
        let mut spec = NlpSpec::new("heat-branch", objective.clone());
        for i in 0..nt {
            // bit set: u_i ≥ 0, otherwise v_i ≥ 0
            let idx = if mask >> i & 1 == 1 { i } else { nt + i };
            spec = spec.ineq(SmoothFn::coordinate(n, idx, -1.0, 0.0));
        }
        let sol = solve_nlp(&spec, &vec![1.0; n], 1e-9, 500)?;
        if sol.status != NlpStatus::Converged {
            continue;
        }
        if best.as_ref().map_or(true, |(f, _)| sol.f_value < *f) {
            best = Some((sol.f_value, sol.x));
        }
    }
    let (f, xc) = best.ok_or_else(|| Error::InvalidArgument("no coarse branch converged".into()))?;
    let tc = coarse_cfg.times();
    let tf = fine.times();
    let interp = |vals: &[f64], t: f64| -> f64 {
        let j = tc.partition_point(|s| *s <= t).clamp(1, tc.len() - 1);
        let (t0, t1) = (tc[j - 1], tc[j]);
        let s = ((t - t0) / (t1 - t0)).clamp(0.0, 1.0);
        vals[j - 1] * (1.0 - s) + vals[j] * s
    };
    let (uc, vc) = xc.split_at(nt);
    let mut u: Vec<f64> = tf.iter().map(|t| interp(uc, *t)).collect();
    let mut v: Vec<f64> = tf.iter().map(|t| interp(vc, *t)).collect();
    for (a, b) in u.iter_mut().zip(v.iter_mut()) {
        if *a < 0.0 && *b < 0.0 {
            if *a >= *b {
                *a = 0.0;
            } else {
                *b = 0.0;
            }
        }
    }
    u.extend(v);
    Ok((f, u))
}

/// Domain from which starting points of a benchmark are drawn.
#[derive(Debug, Clone, PartialEq)]
pub enum StartDomain {
    /// Independent uniform draws per coordinate from the given intervals.
    Boxes(Vec<(f64, f64)>),
}

impl StartDomain {
    pub fn uniform(n: usize, lo: f64, hi: f64) -> Self {
        Self::Boxes(vec![(lo, hi); n])
    }

    /// `count` points drawn sequentially from one seeded stream, so start
    /// `s` depends only on `(seed, s)`.
    pub fn sample(&self, count: usize, seed: u64) -> Vec<Vec<f64>> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let Self::Boxes(b) = self;
        (0..count).map(|_| b.iter().map(|(lo, hi)| rng.gen_range(*lo..=*hi)).collect()).collect()
    }
}

/// `x ∈ [0, 4]³`, `u, v ∈ [−1, 0]`.
pub fn disjunctive_starts() -> StartDomain {
    StartDomain::Boxes(vec![(0.0, 4.0), (0.0, 4.0), (0.0, 4.0), (-1.0, 0.0), (-1.0, 0.0)])
}

pub fn gap_domain_starts(n: usize) -> StartDomain {
    StartDomain::uniform(n, -1.0, 2.0)
}

pub fn heat_starts(n: usize) -> StartDomain {
    StartDomain::uniform(n, -10.0, 10.0)
}
