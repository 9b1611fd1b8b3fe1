//! NCP functions for or-constraints.
//!
//! An NCP function `φ` vanishes exactly on the complementarity set
//! `C = {(a, b) : a, b ≥ 0, ab = 0}`. Those that are positive on
//! `{a > 0, b > 0}` and negative on `{a < 0 ∨ b < 0}` (class [`NcpClass::Ncp4`])
//! are *or-compatible*: `φ(a, b) ≤ 0 ⇔ a ≤ 0 ∨ b ≤ 0`, so `φ(G(x), H(x)) ≤ 0`
//! restates the or-constraint `G(x) ≤ 0 ∨ H(x) ≤ 0` as a single inequality.

use std::fmt;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Absolute tolerance for membership in `C` and for sign tests.
pub const MEMBERSHIP_TOL: f64 = 1e-12;

#[inline]
pub fn phi_min<T: Real>(a: T, b: T) -> T {
    a.min(b)
}

#[inline]
pub fn phi_fb<T: Real>(a: T, b: T) -> T {
    a + b - a.hypot(b)
}

/// Kanzow–Schwartz function; continuously differentiable on all of `R²`.
#[inline]
pub fn phi_ks<T: Real>(a: T, b: T) -> T {
    if a + b >= T::zero() {
        a * b
    } else {
        -T::lit(0.5) * (a * a + b * b)
    }
}

/// Smoothed Fischer–Burmeister function `a + b − √(a² + b² + 2t)`.
#[inline]
pub fn phi_fb_t<T: Real>(a: T, b: T, t: T) -> T {
    a + b - (a * a + b * b + T::lit(2.0) * t).sqrt()
}

/// Offset Kanzow–Schwartz function `φ_KS(a, b) − t`.
#[inline]
pub fn phi_ks_t<T: Real>(a: T, b: T, t: T) -> T {
    phi_ks(a, b) - t
}

pub fn phi_ks_grad<T: Real>(a: T, b: T) -> [T; 2] {
    if a + b >= T::zero() {
        [b, a]
    } else {
        [-a, -b]
    }
}

pub fn phi_ks_hessian<T: Real>(a: T, b: T) -> [[T; 2]; 2] {
    if a + b >= T::zero() {
        [[T::zero(), T::one()], [T::one(), T::zero()]]
    } else {
        [[-T::one(), T::zero()], [T::zero(), -T::one()]]
    }
}

/// Gradient of `phi_fb_t`; `None` only at the origin when `t = 0`.
pub fn phi_fb_t_grad<T: Real>(a: T, b: T, t: T) -> Option<[T; 2]> {
    let r = (a * a + b * b + T::lit(2.0) * t).sqrt();
    if r == T::zero() {
        return None;
    }
    Some([T::one() - a / r, T::one() - b / r])
}

pub fn phi_fb_t_hessian<T: Real>(a: T, b: T, t: T) -> Option<[[T; 2]; 2]> {
    let two_t = T::lit(2.0) * t;
    let r = (a * a + b * b + two_t).sqrt();
    if r == T::zero() {
        return None;
    }
    let r3 = r * r * r;
    let ab = a * b / r3;
    Some([[-(b * b + two_t) / r3, ab], [ab, -(a * a + two_t) / r3]])
}

type Eval2<T> = Arc<dyn Fn(T, T) -> T + Send + Sync>;
type Grad2<T> = Arc<dyn Fn(T, T) -> Option<[T; 2]> + Send + Sync>;

/// A continuous function `R² → R` with a gradient where one exists.
#[derive(Clone)]
pub struct Scalar2Fn<T> {
    name: String,
    eval: Eval2<T>,
    grad: Grad2<T>,
}

impl<T> fmt::Debug for Scalar2Fn<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Scalar2Fn").field("name", &self.name).finish()
    }
}

impl<T: Real> Scalar2Fn<T> {
    pub fn new(
        name: impl Into<String>,
        eval: impl Fn(T, T) -> T + Send + Sync + 'static,
        grad: impl Fn(T, T) -> Option<[T; 2]> + Send + Sync + 'static,
    ) -> Self {
        Self { name: name.into(), eval: Arc::new(eval), grad: Arc::new(grad) }
    }

    pub fn min() -> Self {
        Self::new("min", phi_min, |a: T, b: T| {
            if a < b {
                Some([T::one(), T::zero()])
            } else if b < a {
                Some([T::zero(), T::one()])
            } else {
                None
            }
        })
    }

    pub fn fb() -> Self {
        Self::new("fb", phi_fb, |a, b| phi_fb_t_grad(a, b, T::zero()))
    }

    pub fn ks() -> Self {
        Self::new("ks", phi_ks, |a, b| Some(phi_ks_grad(a, b)))
    }

    pub fn fb_smoothed(t: T) -> Self {
        Self::new("fb_t", move |a, b| phi_fb_t(a, b, t), move |a, b| phi_fb_t_grad(a, b, t))
    }

    pub fn ks_offset(t: T) -> Self {
        Self::new("ks_t", move |a, b| phi_ks_t(a, b, t), |a, b| Some(phi_ks_grad(a, b)))
    }

    /// `−φ`.
    pub fn negated(&self) -> Self {
        let e = self.eval.clone();
        let g = self.grad.clone();
        Self::new(
            format!("-{}", self.name),
            move |a, b| -e(a, b),
            move |a, b| g(a, b).map(|[ga, gb]| [-ga, -gb]),
        )
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    #[inline]
    pub fn eval(&self, a: T, b: T) -> T {
        (self.eval)(a, b)
    }

    /// `None` where the function is not differentiable.
    #[inline]
    pub fn grad(&self, a: T, b: T) -> Option<[T; 2]> {
        (self.grad)(a, b)
    }

    pub fn is_differentiable_at(&self, a: T, b: T) -> bool {
        self.grad(a, b).is_some()
    }
}

/// Sign pattern of an NCP function on `A = {a>0 ∧ b>0}` and `B = {a<0 ∨ b<0}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NcpClass {
    /// positive on `A ∪ B`
    Ncp1,
    /// negative on `A ∪ B`
    Ncp2,
    /// negative on `A`, positive on `B`
    Ncp3,
    /// positive on `A`, negative on `B`; the or-compatible class
    Ncp4,
    NotNcp,
}

#[derive(Default)]
struct SignTally {
    pos: usize,
    neg: usize,
}

impl SignTally {
    fn sign(&self) -> Option<bool> {
        match (self.pos, self.neg) {
            (_, 0) if self.pos > 0 => Some(true),
            (0, _) if self.neg > 0 => Some(false),
            _ => None,
        }
    }
}

/// Numerically classifies `f` by sampling `A`, `B` (rejection sampling on
/// `[−10, 10]²`, `samples` points each) and `C`.
pub fn classify_ncp<T: Real>(f: &Scalar2Fn<T>, samples: usize, seed: u64) -> Result<NcpClass> {
    if samples < 100 {
        return Err(Error::InvalidArgument(format!("classify_ncp needs ≥ 100 samples, got {samples}")));
    }
    let tol = T::lit(MEMBERSHIP_TOL);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    // zero level on C: both axes plus the origin
    let mut c_points = vec![(T::zero(), T::zero())];
    for _ in 0..samples {
        let s = T::lit(rng.gen_range(0.0..10.0));
        c_points.push((T::zero(), s));
        c_points.push((s, T::zero()));
    }
    if c_points.iter().any(|&(a, b)| f.eval(a, b).abs() > tol) {
        return Ok(NcpClass::NotNcp);
    }

    let mut in_a = SignTally::default();
    let mut in_b = SignTally::default();
    let (mut na, mut nb) = (0, 0);
    while na < samples || nb < samples {
        let a: f64 = rng.gen_range(-10.0..10.0);
        let b: f64 = rng.gen_range(-10.0..10.0);
        let tally = if a > 0.0 && b > 0.0 {
            if na >= samples {
                continue;
            }
            na += 1;
            &mut in_a
        } else if a < 0.0 || b < 0.0 {
            if nb >= samples {
                continue;
            }
            nb += 1;
            &mut in_b
        } else {
            continue;
        };
        let v = f.eval(T::lit(a), T::lit(b));
        if !v.is_finite() || v.abs() <= tol {
            return Ok(NcpClass::NotNcp);
        }
        if v > T::zero() {
            tally.pos += 1;
        } else {
            tally.neg += 1;
        }
    }
    match (in_a.sign(), in_b.sign()) {
        (Some(true), Some(true)) => Ok(NcpClass::Ncp1),
        (Some(false), Some(false)) => Ok(NcpClass::Ncp2),
        (Some(false), Some(true)) => Ok(NcpClass::Ncp3),
        (Some(true), Some(false)) => Ok(NcpClass::Ncp4),
        _ => Err(Error::InconsistentSigns),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NcpId {
    Min,
    Fb,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SubdiffRule {
    Clarke,
    Mordukhovich,
}

/// A subdifferential of `φ_min` or `φ_FB` at a point of `C`.
#[derive(Debug, Clone, PartialEq)]
pub enum SubdiffSet<T> {
    Singleton([T; 2]),
    FinitePair([T; 2], [T; 2]),
    /// convex hull of the two endpoints
    Segment([T; 2], [T; 2]),
    /// closed disk
    Disk { center: [T; 2], radius: T },
    /// circle (boundary of the disk only)
    Circle { center: [T; 2], radius: T },
}

impl<T: Real> SubdiffSet<T> {
    /// Analytic membership test with absolute tolerance `tol`.
    pub fn contains(&self, p: [T; 2], tol: T) -> bool {
        let dist = |q: [T; 2]| (p[0] - q[0]).hypot(p[1] - q[1]);
        match self {
            SubdiffSet::Singleton(q) => dist(*q) <= tol,
            SubdiffSet::FinitePair(q, r) => dist(*q) <= tol || dist(*r) <= tol,
            SubdiffSet::Segment(q, r) => {
                let d = [r[0] - q[0], r[1] - q[1]];
                let len2 = d[0] * d[0] + d[1] * d[1];
                let s = (((p[0] - q[0]) * d[0] + (p[1] - q[1]) * d[1]) / len2)
                    .max(T::zero())
                    .min(T::one());
                dist([q[0] + s * d[0], q[1] + s * d[1]]) <= tol
            }
            SubdiffSet::Disk { center, radius } => dist(*center) <= *radius + tol,
            SubdiffSet::Circle { center, radius } => (dist(*center) - *radius).abs() <= tol,
        }
    }
}

/// Subdifferential of `φ_min` / `φ_FB` on the complementarity set.
pub fn subdiff<T: Real>(phi: NcpId, rule: SubdiffRule, a: T, b: T) -> Result<SubdiffSet<T>> {
    let tol = T::lit(MEMBERSHIP_TOL);
    let (o, i) = (T::zero(), T::one());
    let e1 = [i, o];
    let e2 = [o, i];
    if a < -tol || b < -tol || a.min(b) > tol {
        return Err(Error::PointNotInComplementaritySet { a: a.to_f64_lossy(), b: b.to_f64_lossy() });
    }
    let a_zero = a.abs() <= tol;
    let b_zero = b.abs() <= tol;
    Ok(match (a_zero, b_zero) {
        (true, false) => SubdiffSet::Singleton(e1),
        (false, true) => SubdiffSet::Singleton(e2),
        _ => match (phi, rule) {
            (NcpId::Min, SubdiffRule::Clarke) => SubdiffSet::Segment(e1, e2),
            (NcpId::Min, SubdiffRule::Mordukhovich) => SubdiffSet::FinitePair(e1, e2),
            (NcpId::Fb, SubdiffRule::Clarke) => SubdiffSet::Disk { center: [i, i], radius: i },
            (NcpId::Fb, SubdiffRule::Mordukhovich) => SubdiffSet::Circle { center: [i, i], radius: i },
        },
    })
}

/// Maps a pair of nonnegative biactive multipliers `(μ, ν)` onto a scaled
/// element of the unit circle around `(1, 1)`: returns `(ξ, α, β)` with
/// `ξα = μ`, `ξβ = ν` and `(α − 1)² + (β − 1)² = 1`.
pub fn fb_multiplier_lift<T: Real>(mu: T, nu: T) -> (T, T, T) {
    let two = T::lit(2.0);
    let xi = mu + nu + (two * mu * nu).sqrt();
    if xi == T::zero() {
        let c = T::one() - two.sqrt() / two;
        (xi, c, c)
    } else {
        (xi, mu / xi, nu / xi)
    }
}
