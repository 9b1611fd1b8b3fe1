//! Dense primal–dual interior-point solver for smooth programs
//!
//! ```text
//! min f(x)  s.t.  c_I(x) ≤ 0,  c_E(x) = 0.
//! ```
//!
//! Inequalities receive slacks (`c_I(x) + s = 0`, `s > 0`) and a log barrier.
//! Each Newton step solves the condensed symmetric system
//!
//! ```text
//! [ W + J_Iᵀ Σ J_I + δ_w I    J_Eᵀ   ] [dx]   [ −r_d − J_Iᵀ(Σ r_I − r_c / s) ]
//! [ J_E                      −δ_c I  ] [dρ] = [ −c_E                          ]
//! ```
//!
//! with `Σ = diag(λ / s)`, regularizing `δ_w` until the inertia is
//! `(n, p, 0)`. Steps are globalized by fraction-to-the-boundary and an
//! Armijo backtracking search on the ℓ₁ merit function of the barrier
//! problem.

use crate::error::{Error, Result};
use crate::linalg::{Ldlt, Matrix};
use crate::model::SmoothFn;
use crate::scalar::{dot, norm_inf, Real};

pub const DEFAULT_MAX_ITER: usize = 500;

const TAU: f64 = 0.995;
const MU_FACTOR: f64 = 0.2;
const CENTERING: f64 = 0.1;
const ARMIJO: f64 = 1e-4;
const DELTA_W_INIT: f64 = 1e-8;
const DELTA_W_MAX: f64 = 1e40;
const KAPPA_SIGMA: f64 = 1e10;

#[derive(Debug, Clone)]
pub struct NlpSpec<T> {
    pub name: String,
    pub n: usize,
    pub objective: SmoothFn<T>,
    pub ineq: Vec<SmoothFn<T>>,
    pub eq: Vec<SmoothFn<T>>,
}

impl<T: Real> NlpSpec<T> {
    pub fn new(name: impl Into<String>, objective: SmoothFn<T>) -> Self {
        Self { name: name.into(), n: objective.dim(), objective, ineq: Vec::new(), eq: Vec::new() }
    }

    pub fn ineq(mut self, c: SmoothFn<T>) -> Self {
        assert_eq!(c.dim(), self.n, "inequality dimension");
        self.ineq.push(c);
        self
    }

    pub fn eq(mut self, c: SmoothFn<T>) -> Self {
        assert_eq!(c.dim(), self.n, "equality dimension");
        self.eq.push(c);
        self
    }

    /// Adds `lower_i ≤ x_i ≤ upper_i` as affine inequalities; `None` entries
    /// are unbounded.
    pub fn bounds(mut self, lower: &[Option<T>], upper: &[Option<T>]) -> Self {
        assert_eq!(lower.len(), self.n);
        assert_eq!(upper.len(), self.n);
        for i in 0..self.n {
            if let Some(lo) = lower[i] {
                self.ineq.push(SmoothFn::coordinate(self.n, i, -T::one(), lo));
            }
            if let Some(hi) = upper[i] {
                self.ineq.push(SmoothFn::coordinate(self.n, i, T::one(), -hi));
            }
        }
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NlpStatus {
    Converged,
    IterationLimit,
    LineSearchFailure,
    Diverged,
}

impl NlpStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            NlpStatus::Converged => "converged",
            NlpStatus::IterationLimit => "iteration-limit",
            NlpStatus::LineSearchFailure => "line-search-failure",
            NlpStatus::Diverged => "diverged",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NlpSolution<T> {
    pub x: Vec<T>,
    pub lambda: Vec<T>,
    pub rho: Vec<T>,
    pub kkt_residual: T,
    pub status: NlpStatus,
    pub iterations: usize,
    pub f_value: T,
}

struct Eval<T> {
    f: T,
    grad: Vec<T>,
    ci: Vec<T>,
    ce: Vec<T>,
    ji: Matrix<T>,
    je: Matrix<T>,
}

fn evaluation_failure<T: Real>(x: &[T]) -> Error {
    Error::EvaluationFailure { point: x.iter().map(|v| v.to_f64_lossy()).collect() }
}

fn values<T: Real>(spec: &NlpSpec<T>, x: &[T]) -> Option<(T, Vec<T>, Vec<T>)> {
    let f = spec.objective.value(x);
    let ci: Vec<T> = spec.ineq.iter().map(|c| c.value(x)).collect();
    let ce: Vec<T> = spec.eq.iter().map(|c| c.value(x)).collect();
    let finite = f.is_finite() && ci.iter().chain(&ce).all(|v| v.is_finite());
    finite.then_some((f, ci, ce))
}

fn evaluate<T: Real>(spec: &NlpSpec<T>, x: &[T]) -> Result<Eval<T>> {
    let (f, ci, ce) = values(spec, x).ok_or_else(|| evaluation_failure(x))?;
    let n = spec.n;
    let grad = spec.objective.gradient(x);
    let mut ji = Matrix::zeros(spec.ineq.len(), n);
    for (k, c) in spec.ineq.iter().enumerate() {
        c.add_gradient(x, T::one(), ji.row_mut(k));
    }
    let mut je = Matrix::zeros(spec.eq.len(), n);
    for (k, c) in spec.eq.iter().enumerate() {
        c.add_gradient(x, T::one(), je.row_mut(k));
    }
    let finite = grad.iter().chain(ji.as_slice()).chain(je.as_slice()).all(|v| v.is_finite());
    if !finite {
        return Err(evaluation_failure(x));
    }
    Ok(Eval { f, grad, ci, ce, ji, je })
}

/// Gradient of the Lagrangian `∇f + J_Iᵀλ + J_Eᵀρ`.
fn lagrangian_gradient<T: Real>(ev: &Eval<T>, lambda: &[T], rho: &[T]) -> Vec<T> {
    let mut r = ev.grad.clone();
    for (k, l) in lambda.iter().enumerate() {
        if *l != T::zero() {
            crate::scalar::axpy(*l, ev.ji.row(k), &mut r);
        }
    }
    for (k, l) in rho.iter().enumerate() {
        if *l != T::zero() {
            crate::scalar::axpy(*l, ev.je.row(k), &mut r);
        }
    }
    r
}

fn residual_from_eval<T: Real>(ev: &Eval<T>, lambda: &[T], rho: &[T]) -> T {
    let mut r = norm_inf(&lagrangian_gradient(ev, lambda, rho));
    for (c, l) in ev.ci.iter().zip(lambda) {
        r = r.max(c.max(T::zero())).max((*l * *c).abs()).max((-*l).max(T::zero()));
    }
    for c in &ev.ce {
        r = r.max(c.abs());
    }
    r
}

/// Maximum of the stationarity sup-norm, inequality and equality violation,
/// complementarity `|λ_i c_i|` and sign violation `max(0, −λ_i)`.
pub fn kkt_residual<T: Real>(spec: &NlpSpec<T>, x: &[T], lambda: &[T], rho: &[T]) -> Result<T> {
    if x.len() != spec.n {
        return Err(Error::DimensionMismatch { expected: spec.n, got: x.len() });
    }
    if lambda.len() != spec.ineq.len() {
        return Err(Error::DimensionMismatch { expected: spec.ineq.len(), got: lambda.len() });
    }
    if rho.len() != spec.eq.len() {
        return Err(Error::DimensionMismatch { expected: spec.eq.len(), got: rho.len() });
    }
    Ok(residual_from_eval(&evaluate(spec, x)?, lambda, rho))
}

/// Hessian of the Lagrangian. Functions without a Hessian hook are
/// differentiated by forward differences of their (weighted) gradients.
fn lagrangian_hessian<T: Real>(spec: &NlpSpec<T>, x: &[T], lambda: &[T], rho: &[T]) -> Matrix<T> {
    let n = spec.n;
    let mut h = Matrix::zeros(n, n);
    let mut pending: Vec<(&SmoothFn<T>, T)> = Vec::new();
    let terms = std::iter::once((&spec.objective, T::one()))
        .chain(spec.ineq.iter().zip(lambda.iter().copied()))
        .chain(spec.eq.iter().zip(rho.iter().copied()));
    for (fun, w) in terms {
        if w == T::zero() {
            continue;
        }
        if !fun.add_hessian(x, w, &mut h) {
            pending.push((fun, w));
        }
    }
    if !pending.is_empty() {
        let weighted = |p: &[T]| {
            let mut g = vec![T::zero(); n];
            for (fun, w) in &pending {
                fun.add_gradient(p, *w, &mut g);
            }
            g
        };
        let base = weighted(x);
        let mut xp = x.to_vec();
        let root_eps = T::epsilon().sqrt();
        for j in 0..n {
            let step = root_eps * T::one().max(x[j].abs());
            xp[j] = x[j] + step;
            let gp = weighted(&xp);
            xp[j] = x[j];
            for i in 0..n {
                h[(i, j)] += (gp[i] - base[i]) / step;
            }
        }
    }
    h.symmetrize();
    h
}

fn sum_log<T: Real>(s: &[T]) -> T {
    s.iter().map(|v| v.ln()).sum()
}

fn l1_violation<T: Real>(ci: &[T], s: &[T], ce: &[T]) -> T {
    ci.iter().zip(s).map(|(c, s)| (*c + *s).abs()).sum::<T>() + ce.iter().map(|c| c.abs()).sum::<T>()
}

/// Largest `α ∈ (0, 1]` keeping `v + α dv ≥ (1 − τ) v`.
fn max_step<T: Real>(v: &[T], dv: &[T]) -> T {
    let tau = T::lit(TAU);
    v.iter().zip(dv).fold(T::one(), |a, (v, d)| if *d < T::zero() { a.min(-tau * *v / *d) } else { a })
}

/// Solves the program from `start` to KKT residual `tol`.
///
/// Returns a solution for every outcome of the iteration; only
/// non-finite function data at the start and dimension errors are `Err`.
pub fn solve_nlp<T: Real>(spec: &NlpSpec<T>, start: &[T], tol: T, max_iter: usize) -> Result<NlpSolution<T>> {
    if start.len() != spec.n {
        return Err(Error::DimensionMismatch { expected: spec.n, got: start.len() });
    }
    if !(tol > T::zero()) {
        return Err(Error::InvalidArgument("tolerance must be positive".into()));
    }
    let n = spec.n;
    let mi = spec.ineq.len();
    let p = spec.eq.len();
    let zero = T::zero();
    let one = T::one();

    let mut x = start.to_vec();
    let mut ev = evaluate(spec, &x)?;
    let mut s: Vec<T> = ev.ci.iter().map(|c| (-*c).max(one)).collect();
    let mut lambda = vec![one; mi];
    let mut rho = vec![zero; p];

    let avg_comp = if mi == 0 { one } else { dot(&s, &lambda) / T::from_usize_lossy(mi) };
    let mu_min = tol / T::lit(10.0);
    let mut mu = (T::lit(0.1) * avg_comp).max(mu_min);
    let mut nu = one;
    let mut delta_w_last = zero;
    let mut status = NlpStatus::IterationLimit;
    let mut iterations = 0;

    // An equality-only program has no barrier and starts at the final μ.
    if mi == 0 {
        mu = mu_min;
    }

    for iter in 0..=max_iter {
        if residual_from_eval(&ev, &lambda, &rho) <= tol {
            status = NlpStatus::Converged;
            iterations = iter;
            break;
        }
        if iter == max_iter {
            iterations = iter;
            break;
        }
        iterations = iter + 1;

        let r_d = lagrangian_gradient(&ev, &lambda, &rho);
        let r_i: Vec<T> = ev.ci.iter().zip(&s).map(|(c, s)| *c + *s).collect();

        // Monotone barrier update once the current barrier problem is solved
        // well enough.
        loop {
            let comp = s.iter().zip(&lambda).fold(zero, |a, (s, l)| a.max((*s * *l - mu).abs()));
            let e_mu = norm_inf(&r_d).max(norm_inf(&r_i)).max(norm_inf(&ev.ce)).max(comp);
            if mu > mu_min && e_mu <= T::lit(10.0) * mu {
                mu = (mu * T::lit(MU_FACTOR)).max(mu_min);
            } else {
                break;
            }
        }
        // A barrier subproblem may be unbounded (slacks growing without
        // limit), in which case the test above never fires; following the
        // average complementarity keeps μ moving.
        if mi > 0 {
            let avg = dot(&s, &lambda) / T::from_usize_lossy(mi);
            mu = mu.min((T::lit(CENTERING) * avg).max(mu_min));
        }

        let sigma: Vec<T> = lambda.iter().zip(&s).map(|(l, s)| *l / *s).collect();
        let w = lagrangian_hessian(spec, &x, &lambda, &rho);
        let dim = n + p;
        let mut kkt = Matrix::zeros(dim, dim);
        for i in 0..n {
            for j in 0..n {
                kkt[(i, j)] = w[(i, j)];
            }
        }
        for k in 0..mi {
            let row = ev.ji.row(k);
            let nz: Vec<usize> = (0..n).filter(|&i| row[i] != zero).collect();
            for &i in &nz {
                let si = sigma[k] * row[i];
                for &j in &nz {
                    kkt[(i, j)] += si * row[j];
                }
            }
        }
        for k in 0..p {
            for i in 0..n {
                let v = ev.je[(k, i)];
                kkt[(n + k, i)] = v;
                kkt[(i, n + k)] = v;
            }
        }

        // rhs
        let mut rhs = vec![zero; dim];
        for i in 0..n {
            rhs[i] = -r_d[i];
        }
        for k in 0..mi {
            // Σ r_I − r_c / s with r_c = sλ − μ
            let coef = sigma[k] * r_i[k] - (lambda[k] - mu / s[k]);
            crate::scalar::axpy(-coef, ev.ji.row(k), &mut rhs[..n]);
        }
        for k in 0..p {
            rhs[n + k] = -ev.ce[k];
        }

        let scale = kkt.as_slice().iter().fold(one, |a, v| a.max(v.abs()));
        let pivot_tol = T::epsilon() * T::lit(100.0) * scale;
        let mut delta_w = zero;
        let mut delta_c = zero;
        let factor = loop {
            let mut m = kkt.clone();
            for i in 0..n {
                m[(i, i)] += delta_w;
            }
            for k in 0..p {
                m[(n + k, n + k)] -= delta_c;
            }
            let f = Ldlt::factor(&m, pivot_tol);
            let good = f.is_regular() && f.inertia.positive == n && f.inertia.negative == p;
            if good {
                break Some(f);
            }
            if f.inertia.zero > 0 && p > 0 && delta_c == zero {
                delta_c = T::lit(1e-8) * mu.powf(T::lit(0.25)).max(T::lit(1e-4));
                continue;
            }
            delta_w = if delta_w == zero {
                if delta_w_last == zero {
                    T::lit(DELTA_W_INIT)
                } else {
                    (delta_w_last / T::lit(3.0)).max(T::lit(1e-20))
                }
            } else {
                delta_w * T::lit(10.0)
            };
            if delta_w > T::lit(DELTA_W_MAX) {
                break None;
            }
        };
        let Some(factor) = factor else {
            status = NlpStatus::LineSearchFailure;
            break;
        };
        if delta_w > zero {
            delta_w_last = delta_w;
        }
        let sol = factor.solve(&rhs);
        let dx = &sol[..n];
        let drho = &sol[n..];
        let jdx = ev.ji.mul_vec(dx);
        let ds: Vec<T> = (0..mi).map(|k| -(r_i[k] + jdx[k])).collect();
        let dlambda: Vec<T> = (0..mi).map(|k| sigma[k] * (jdx[k] + r_i[k]) - (lambda[k] - mu / s[k])).collect();

        let alpha_max = max_step(&s, &ds);
        let alpha_dual = max_step(&lambda, &dlambda);

        // ℓ₁ merit of the barrier problem
        let viol0 = l1_violation(&ev.ci, &s, &ev.ce);
        let barrier_slope = dot(&ev.grad, dx) - mu * (0..mi).map(|k| ds[k] / s[k]).sum::<T>();
        // The penalty grows only as far as needed to make the step a descent
        // direction; transient multiplier estimates would inflate it.
        if viol0 > zero && barrier_slope > zero {
            nu = nu.max(T::lit(2.0) * barrier_slope / viol0);
        }
        let merit0 = ev.f - mu * sum_log(&s) + nu * viol0;
        let slope = barrier_slope - nu * viol0;

        let step_norm = norm_inf(dx) / (one + norm_inf(&x));
        let mut alpha = alpha_max;
        let mut accepted = None;
        for _ in 0..60 {
            let xt: Vec<T> = x.iter().zip(dx).map(|(a, d)| *a + alpha * *d).collect();
            let st: Vec<T> = s.iter().zip(&ds).map(|(a, d)| *a + alpha * *d).collect();
            if let Some((f, ci, ce)) = values(spec, &xt) {
                let merit = f - mu * sum_log(&st) + nu * l1_violation(&ci, &st, &ce);
                let tiny = step_norm * alpha <= T::epsilon() * T::lit(10.0);
                if merit <= merit0 + T::lit(ARMIJO) * alpha * slope.min(zero) || tiny {
                    accepted = Some((xt, st));
                    break;
                }
            }
            alpha = alpha * T::lit(0.5);
        }
        let Some((xt, st)) = accepted else {
            status = NlpStatus::LineSearchFailure;
            break;
        };
        let ev_new = match evaluate(spec, &xt) {
            Ok(e) => e,
            Err(_) => {
                status = NlpStatus::LineSearchFailure;
                break;
            }
        };
        x = xt;
        s = st;
        ev = ev_new;
        for k in 0..mi {
            let l = lambda[k] + alpha_dual * dlambda[k];
            let lo = mu / (T::lit(KAPPA_SIGMA) * s[k]);
            let hi = T::lit(KAPPA_SIGMA) * mu / s[k];
            lambda[k] = l.max(lo).min(hi);
        }
        for k in 0..p {
            rho[k] += alpha * drho[k];
        }
        if norm_inf(&x) > T::lit(1e20) {
            status = NlpStatus::Diverged;
            break;
        }
    }

    let kkt_res = residual_from_eval(&ev, &lambda, &rho);
    if status == NlpStatus::Converged && !(kkt_res <= tol) {
        status = NlpStatus::IterationLimit;
    }
    Ok(NlpSolution { f_value: ev.f, x, lambda, rho, kkt_residual: kkt_res, status, iterations })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn circle() -> NlpSpec<f64> {
        let obj = SmoothFn::affine(2, vec![(0, 1.0), (1, 1.0)], 0.0);
        let q = SmoothFn::quadratic(Matrix::identity(2).scaled(2.0), vec![0.0, 0.0], -1.0);
        NlpSpec::new("circle", obj).ineq(q)
    }

    #[test]
    fn unconstrained_quadratic() {
        let f = SmoothFn::from_gradient(1, |x: &[f64]| (x[0] - 1.0).powi(2), |x| vec![2.0 * (x[0] - 1.0)]);
        let sol = solve_nlp(&NlpSpec::new("q", f), &[5.0], 1e-6, 100).unwrap();
        assert_eq!(sol.status, NlpStatus::Converged);
        assert!((sol.x[0] - 1.0).abs() < 1e-6);
    }

    #[test]
    fn circle_problem() {
        let spec = circle();
        let sol = solve_nlp(&spec, &[1.0, 1.0], 1e-8, 200).unwrap();
        assert_eq!(sol.status, NlpStatus::Converged, "{sol:?}");
        let r = std::f64::consts::FRAC_1_SQRT_2;
        assert!((sol.x[0] + r).abs() < 1e-6 && (sol.x[1] + r).abs() < 1e-6);
        assert!((sol.lambda[0] - r).abs() < 1e-6);
    }

    #[test]
    fn exact_kkt_triple_of_circle() {
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let res = kkt_residual(&circle(), &[-r, -r], &[r], &[]).unwrap();
        assert!(res <= 1e-12);
        assert!(kkt_residual(&circle(), &[-r, -r], &[-0.5], &[]).unwrap() >= 0.5);
    }

    #[test]
    fn deterministic_iterates() {
        let spec = circle();
        let a = solve_nlp(&spec, &[0.3, 2.0], 1e-7, 200).unwrap();
        let b = solve_nlp(&spec, &[0.3, 2.0], 1e-7, 200).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn evaluation_failure_at_start() {
        let f = SmoothFn::from_gradient(1, |x: &[f64]| x[0].ln(), |x| vec![1.0 / x[0]]);
        let err = solve_nlp(&NlpSpec::new("log", f), &[-1.0], 1e-6, 10).unwrap_err();
        assert!(matches!(err, Error::EvaluationFailure { .. }));
    }
}
