//! Or-constrained programs
//!
//! ```text
//! min f(x)  s.t.  g_i(x) ≤ 0,  h_j(x) = 0,  G_l(x) ≤ 0 ∨ H_l(x) ≤ 0
//! ```
//!
//! with user-supplied analytic gradients.

use std::fmt;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::scalar::Real;

/// Default feasibility tolerance.
pub const DEFAULT_FEAS_TOL: f64 = 1e-4;

type ValueFn<T> = Arc<dyn Fn(&[T]) -> T + Send + Sync>;
type GradAccFn<T> = Arc<dyn Fn(&[T], T, &mut [T]) + Send + Sync>;
type HessAccFn<T> = Arc<dyn Fn(&[T], T, &mut Matrix<T>) + Send + Sync>;

/// A continuously differentiable function `Rⁿ → R`.
///
/// The gradient is supplied in accumulating form (`out += w ∇f(x)`) so that
/// functions depending on few coordinates only touch those entries. An
/// optional Hessian hook (`H += w ∇²f(x)`) lets the NLP solver skip finite
/// differences for this function.
#[derive(Clone)]
pub struct SmoothFn<T> {
    dim: usize,
    value: ValueFn<T>,
    grad: GradAccFn<T>,
    hess: Option<HessAccFn<T>>,
}

impl<T> fmt::Debug for SmoothFn<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SmoothFn")
            .field("dim", &self.dim)
            .field("hessian", &self.hess.is_some())
            .finish()
    }
}

impl<T: Real> SmoothFn<T> {
    pub fn new(
        dim: usize,
        value: impl Fn(&[T]) -> T + Send + Sync + 'static,
        add_gradient: impl Fn(&[T], T, &mut [T]) + Send + Sync + 'static,
    ) -> Self {
        Self { dim, value: Arc::new(value), grad: Arc::new(add_gradient), hess: None }
    }

    /// Builds from a gradient returning a dense vector.
    pub fn from_gradient(
        dim: usize,
        value: impl Fn(&[T]) -> T + Send + Sync + 'static,
        gradient: impl Fn(&[T]) -> Vec<T> + Send + Sync + 'static,
    ) -> Self {
        Self::new(dim, value, move |x, w, out| {
            for (o, g) in out.iter_mut().zip(gradient(x)) {
                *o += w * g;
            }
        })
    }

    pub fn with_hessian(mut self, add_hessian: impl Fn(&[T], T, &mut Matrix<T>) + Send + Sync + 'static) -> Self {
        self.hess = Some(Arc::new(add_hessian));
        self
    }

    pub fn constant(dim: usize, c: T) -> Self {
        Self::new(dim, move |_| c, |_, _, _| {}).with_hessian(|_, _, _| {})
    }

    /// `Σ coeff·x_idx + constant`.
    pub fn affine(dim: usize, terms: Vec<(usize, T)>, constant: T) -> Self {
        assert!(terms.iter().all(|(i, _)| *i < dim), "affine term index out of range");
        let t2 = terms.clone();
        Self::new(
            dim,
            move |x| terms.iter().fold(constant, |acc, (i, c)| acc + *c * x[*i]),
            move |_, w, out| {
                for (i, c) in &t2 {
                    out[*i] += w * *c;
                }
            },
        )
        .with_hessian(|_, _, _| {})
    }

    /// `scale·x_i + offset`.
    pub fn coordinate(dim: usize, i: usize, scale: T, offset: T) -> Self {
        Self::affine(dim, vec![(i, scale)], offset)
    }

    /// `½ xᵀQx + bᵀx + c` with symmetric `Q`.
    pub fn quadratic(q: Matrix<T>, b: Vec<T>, c: T) -> Self {
        let dim = b.len();
        assert_eq!(q.rows(), dim);
        assert_eq!(q.cols(), dim);
        let q = Arc::new(q);
        let b = Arc::new(b);
        let (q1, q2, q3, b1, b2) = (q.clone(), q.clone(), q, b.clone(), b);
        Self::new(
            dim,
            move |x| {
                let qx = q1.mul_vec(x);
                T::lit(0.5) * crate::scalar::dot(x, &qx) + crate::scalar::dot(&b1, x) + c
            },
            move |x, w, out| {
                for i in 0..dim {
                    out[i] += w * (crate::scalar::dot(q2.row(i), x) + b2[i]);
                }
            },
        )
        .with_hessian(move |_, w, h| {
            for i in 0..dim {
                for j in 0..dim {
                    h[(i, j)] += w * q3[(i, j)];
                }
            }
        })
    }

    /// `φ(a(x), b(x))` for a twice differentiable outer map `φ: R² → R`.
    ///
    /// The Hessian hook is present when both inner functions have one.
    pub fn compose2(
        a: &SmoothFn<T>,
        b: &SmoothFn<T>,
        phi: impl Fn(T, T) -> T + Send + Sync + 'static,
        phi_grad: impl Fn(T, T) -> [T; 2] + Send + Sync + 'static,
        phi_hess: impl Fn(T, T) -> [[T; 2]; 2] + Send + Sync + 'static,
    ) -> Self {
        assert_eq!(a.dim, b.dim, "composed functions must share a dimension");
        let dim = a.dim;
        let phi_grad = Arc::new(phi_grad);
        let (av, bv) = (a.clone(), b.clone());
        let (ag, bg, pg) = (a.clone(), b.clone(), phi_grad.clone());
        let mut out = Self::new(
            dim,
            move |x| phi(av.value(x), bv.value(x)),
            move |x, w, o| {
                let [da, db] = pg(ag.value(x), bg.value(x));
                ag.add_gradient(x, w * da, o);
                bg.add_gradient(x, w * db, o);
            },
        );
        if a.has_hessian() && b.has_hessian() {
            let (a, b) = (a.clone(), b.clone());
            out = out.with_hessian(move |x, w, h| {
                let (va, vb) = (a.value(x), b.value(x));
                let [da, db] = phi_grad(va, vb);
                let [[haa, hab], [_, hbb]] = phi_hess(va, vb);
                a.add_hessian(x, w * da, h);
                b.add_hessian(x, w * db, h);
                if haa == T::zero() && hab == T::zero() && hbb == T::zero() {
                    return;
                }
                let ga = a.gradient(x);
                let gb = b.gradient(x);
                let nz: Vec<usize> = (0..dim).filter(|&i| ga[i] != T::zero() || gb[i] != T::zero()).collect();
                for &i in &nz {
                    for &j in &nz {
                        let v = haa * ga[i] * ga[j] + hab * (ga[i] * gb[j] + gb[i] * ga[j]) + hbb * gb[i] * gb[j];
                        h[(i, j)] += w * v;
                    }
                }
            });
        }
        out
    }

    /// `a(x)·b(x)`.
    pub fn product(a: &SmoothFn<T>, b: &SmoothFn<T>) -> Self {
        Self::compose2(a, b, |u, v| u * v, |u, v| [v, u], |_, _| [[T::zero(), T::one()], [T::one(), T::zero()]])
    }

    /// `a(x) − b(x)`.
    pub fn difference(a: &SmoothFn<T>, b: &SmoothFn<T>) -> Self {
        Self::compose2(a, b, |u, v| u - v, |_, _| [T::one(), -T::one()], |_, _| [[T::zero(); 2]; 2])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn value(&self, x: &[T]) -> T {
        (self.value)(x)
    }

    #[inline]
    pub fn add_gradient(&self, x: &[T], weight: T, out: &mut [T]) {
        (self.grad)(x, weight, out)
    }

    pub fn gradient(&self, x: &[T]) -> Vec<T> {
        let mut g = vec![T::zero(); self.dim];
        self.add_gradient(x, T::one(), &mut g);
        g
    }

    pub fn has_hessian(&self) -> bool {
        self.hess.is_some()
    }

    /// Adds `w ∇²f(x)` to `h`; returns `false` when no Hessian hook exists.
    pub fn add_hessian(&self, x: &[T], weight: T, h: &mut Matrix<T>) -> bool {
        match &self.hess {
            Some(hess) => {
                hess(x, weight, h);
                true
            }
            None => false,
        }
    }

    /// `s·f` for a constant `s`.
    pub fn scaled(&self, s: T) -> Self {
        let (v, g) = (self.value.clone(), self.grad.clone());
        let mut out = Self::new(self.dim, move |x| s * v(x), move |x, w, o| g(x, s * w, o));
        if let Some(h) = self.hess.clone() {
            out = out.with_hessian(move |x, w, m| h(x, s * w, m));
        }
        out
    }

    /// `f + c`.
    pub fn shifted(&self, c: T) -> Self {
        let v = self.value.clone();
        Self { dim: self.dim, value: Arc::new(move |x| v(x) + c), grad: self.grad.clone(), hess: self.hess.clone() }
    }

    /// Views `f` as a function of the leading `dim` coordinates of a vector
    /// of length `total_dim`.
    pub fn embed(&self, total_dim: usize) -> Self {
        assert!(total_dim >= self.dim);
        if total_dim == self.dim {
            return self.clone();
        }
        let n = self.dim;
        let (v, g) = (self.value.clone(), self.grad.clone());
        let mut out = Self::new(total_dim, move |x| v(&x[..n]), move |x, w, o| g(&x[..n], w, &mut o[..n]));
        if let Some(h) = self.hess.clone() {
            out = out.with_hessian(move |x, w, m| {
                let mut local = Matrix::zeros(n, n);
                h(&x[..n], w, &mut local);
                for i in 0..n {
                    for j in 0..n {
                        m[(i, j)] += local[(i, j)];
                    }
                }
            });
        }
        out
    }
}

/// Optimal value (and optionally a minimizer) known in closed form.
#[derive(Debug, Clone, PartialEq)]
pub struct KnownOptimum<T> {
    pub f_min: T,
    pub minimizer: Option<Vec<T>>,
}

/// One or-constraint `G(x) ≤ 0 ∨ H(x) ≤ 0`.
#[derive(Debug, Clone)]
pub struct OrPair<T> {
    pub g: SmoothFn<T>,
    pub h: SmoothFn<T>,
}

#[derive(Debug, Clone)]
pub struct MpocProblem<T> {
    pub name: String,
    pub n: usize,
    pub f: SmoothFn<T>,
    pub g: Vec<SmoothFn<T>>,
    pub h: Vec<SmoothFn<T>>,
    pub or_pairs: Vec<OrPair<T>>,
    pub known_optimum: Option<KnownOptimum<T>>,
}

impl<T: Real> MpocProblem<T> {
    pub fn new(name: impl Into<String>, f: SmoothFn<T>) -> Self {
        Self {
            name: name.into(),
            n: f.dim(),
            f,
            g: Vec::new(),
            h: Vec::new(),
            or_pairs: Vec::new(),
            known_optimum: None,
        }
    }

    pub fn ineq(mut self, g: SmoothFn<T>) -> Self {
        assert_eq!(g.dim(), self.n, "inequality dimension");
        self.g.push(g);
        self
    }

    pub fn eq(mut self, h: SmoothFn<T>) -> Self {
        assert_eq!(h.dim(), self.n, "equality dimension");
        self.h.push(h);
        self
    }

    pub fn or_pair(mut self, g: SmoothFn<T>, h: SmoothFn<T>) -> Self {
        assert_eq!(g.dim(), self.n, "or-pair G dimension");
        assert_eq!(h.dim(), self.n, "or-pair H dimension");
        self.or_pairs.push(OrPair { g, h });
        self
    }

    pub fn known_optimum(mut self, f_min: T, minimizer: Option<Vec<T>>) -> Self {
        self.known_optimum = Some(KnownOptimum { f_min, minimizer });
        self
    }

    pub fn m(&self) -> usize {
        self.g.len()
    }

    pub fn p(&self) -> usize {
        self.h.len()
    }

    pub fn q(&self) -> usize {
        self.or_pairs.len()
    }

    pub(crate) fn check_dim(&self, x: &[T]) -> Result<()> {
        if x.len() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, got: x.len() });
        }
        Ok(())
    }

    /// Whether `x` satisfies every constraint up to `tol`.
    pub fn is_feasible(&self, x: &[T], tol: T) -> Result<bool> {
        Ok(feasibility(self, x)?.max_violation <= tol)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FeasibilityReport<T> {
    pub g_violation: Vec<T>,
    pub h_violation: Vec<T>,
    pub or_violation: Vec<T>,
    pub max_violation: T,
}

impl<T: Real> FeasibilityReport<T> {
    pub fn max_or_violation(&self) -> T {
        self.or_violation.iter().fold(T::zero(), |a, b| a.max(*b))
    }

    /// Largest violation among the ordinary constraints `g` and `h`.
    pub fn max_gh_violation(&self) -> T {
        self.g_violation.iter().chain(&self.h_violation).fold(T::zero(), |a, b| a.max(*b))
    }
}

pub fn feasibility<T: Real>(problem: &MpocProblem<T>, x: &[T]) -> Result<FeasibilityReport<T>> {
    problem.check_dim(x)?;
    let g_violation: Vec<T> = problem.g.iter().map(|g| g.value(x).max(T::zero())).collect();
    let h_violation: Vec<T> = problem.h.iter().map(|h| h.value(x).abs()).collect();
    let or_violation: Vec<T> = problem
        .or_pairs
        .iter()
        .map(|p| p.g.value(x).min(p.h.value(x)).max(T::zero()))
        .collect();
    let max_violation = g_violation
        .iter()
        .chain(&h_violation)
        .chain(&or_violation)
        .fold(T::zero(), |a, b| a.max(*b));
    Ok(FeasibilityReport { g_violation, h_violation, or_violation, max_violation })
}

#[derive(Debug, Clone, PartialEq)]
pub struct GradCheckEntry<T> {
    pub label: String,
    pub worst_rel_error: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GradCheckReport<T> {
    pub entries: Vec<GradCheckEntry<T>>,
}

impl<T: Real> GradCheckReport<T> {
    pub fn worst(&self) -> T {
        self.entries.iter().fold(T::zero(), |a, e| a.max(e.worst_rel_error))
    }
}

/// Worst relative error of `f`'s analytic gradient against central
/// differences with step `1e-6·max(1, |x_i|)` at the given points.
pub fn gradient_error<T: Real>(f: &SmoothFn<T>, points: &[Vec<T>]) -> T {
    let mut worst = T::zero();
    let mut xp = vec![T::zero(); f.dim()];
    for x in points {
        let g = f.gradient(x);
        let scale = g.iter().fold(T::one(), |a, v| a.max(v.abs()));
        xp.copy_from_slice(x);
        for i in 0..f.dim() {
            let step = T::lit(1e-6) * T::one().max(x[i].abs());
            xp[i] = x[i] + step;
            let fp = f.value(&xp);
            xp[i] = x[i] - step;
            let fm = f.value(&xp);
            xp[i] = x[i];
            let fd = (fp - fm) / (step + step);
            let err = (fd - g[i]).abs() / scale;
            if !(err <= worst) {
                worst = if err.is_nan() { T::infinity() } else { err };
            }
        }
    }
    worst
}

/// Compares every constituent gradient of `problem` with central differences
/// at `probes` seeded points drawn uniformly from `[−2, 2]ⁿ`.
pub fn grad_check<T: Real>(problem: &MpocProblem<T>, probes: usize, seed: u64) -> GradCheckReport<T> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let points: Vec<Vec<T>> = (0..probes.max(1))
        .map(|_| (0..problem.n).map(|_| T::lit(rng.gen_range(-2.0..2.0))).collect())
        .collect();
    let mut entries = vec![GradCheckEntry { label: "f".into(), worst_rel_error: gradient_error(&problem.f, &points) }];
    for (i, g) in problem.g.iter().enumerate() {
        entries.push(GradCheckEntry { label: format!("g[{i}]"), worst_rel_error: gradient_error(g, &points) });
    }
    for (j, h) in problem.h.iter().enumerate() {
        entries.push(GradCheckEntry { label: format!("h[{j}]"), worst_rel_error: gradient_error(h, &points) });
    }
    for (l, p) in problem.or_pairs.iter().enumerate() {
        entries.push(GradCheckEntry { label: format!("G[{l}]"), worst_rel_error: gradient_error(&p.g, &points) });
        entries.push(GradCheckEntry { label: format!("H[{l}]"), worst_rel_error: gradient_error(&p.h, &points) });
    }
    GradCheckReport { entries }
}
