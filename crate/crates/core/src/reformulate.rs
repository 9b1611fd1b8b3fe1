//! Smooth surrogates of an or-constrained program.
//!
//! * the Kanzow–Schwartz NCP reformulation `φ_KS(G_l, H_l) ≤ 0`,
//! * the switching-constrained lift `(G_l − y_l)(H_l − z_l) = 0`, `y, z ≤ 0`,
//! * the complementarity-constrained lift `G_l ≤ y_l`, `H_l ≤ z_l`,
//!   `0 ≤ y_l ⊥ z_l ≥ 0`,
//!
//! together with the Scholtes relaxations of both lifts and the two direct
//! smoothing relaxations `φ^t(G_l, H_l) ≤ 0`.

use crate::analysis::active_pattern;
use crate::error::{Error, Result};
use crate::model::{MpocProblem, SmoothFn};
use crate::ncp;
use crate::nlp::NlpSpec;
use crate::scalar::Real;

/// `φ_KS(a(x), b(x))`.
pub fn ks_composite<T: Real>(a: &SmoothFn<T>, b: &SmoothFn<T>) -> SmoothFn<T> {
    SmoothFn::compose2(a, b, ncp::phi_ks, ncp::phi_ks_grad, ncp::phi_ks_hessian)
}

/// `φ^t_KS(a(x), b(x)) = φ_KS(a(x), b(x)) − t`.
pub fn ks_offset_composite<T: Real>(a: &SmoothFn<T>, b: &SmoothFn<T>, t: T) -> SmoothFn<T> {
    ks_composite(a, b).shifted(-t)
}

/// `φ^t_FB(a(x), b(x))`. At `t = 0` the kink at the origin is assigned the
/// gradient `(1 − 1/√2)(1, 1)`, an element of the Clarke subdifferential.
pub fn fb_smoothed_composite<T: Real>(a: &SmoothFn<T>, b: &SmoothFn<T>, t: T) -> SmoothFn<T> {
    let kink = T::one() - T::lit(std::f64::consts::FRAC_1_SQRT_2);
    SmoothFn::compose2(
        a,
        b,
        move |u, v| ncp::phi_fb_t(u, v, t),
        move |u, v| ncp::phi_fb_t_grad(u, v, t).unwrap_or([kink, kink]),
        move |u, v| ncp::phi_fb_t_hessian(u, v, t).unwrap_or([[T::zero(); 2]; 2]),
    )
}

/// The program `min f  s.t.  g ≤ 0, h = 0, φ_KS(G_l, H_l) ≤ 0`.
pub fn ncp_reformulate<T: Real>(problem: &MpocProblem<T>) -> NlpSpec<T> {
    let mut spec = NlpSpec::new(format!("{}-ks", problem.name), problem.f.clone());
    spec.ineq.extend(problem.g.iter().cloned());
    spec.ineq.extend(problem.or_pairs.iter().map(|p| ks_composite(&p.g, &p.h)));
    spec.eq.extend(problem.h.iter().cloned());
    spec
}

/// Smoothing function used by [`direct_relax`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SmoothingVariant {
    Fb,
    Ks,
}

/// `P(φ^t)`: `min f  s.t.  g ≤ 0, h = 0, φ^t(G_l, H_l) ≤ 0`.
pub fn direct_relax<T: Real>(problem: &MpocProblem<T>, variant: SmoothingVariant, t: T) -> NlpSpec<T> {
    let tag = match variant {
        SmoothingVariant::Fb => "fb",
        SmoothingVariant::Ks => "ks",
    };
    let mut spec = NlpSpec::new(format!("{}-{tag}({t})", problem.name), problem.f.clone());
    spec.ineq.extend(problem.g.iter().cloned());
    spec.ineq.extend(problem.or_pairs.iter().map(|p| match variant {
        SmoothingVariant::Fb => fb_smoothed_composite(&p.g, &p.h, t),
        SmoothingVariant::Ks => ks_offset_composite(&p.g, &p.h, t),
    }));
    spec.eq.extend(problem.h.iter().cloned());
    spec
}

/// Smooth data of a lifted program over `(x, y, z) ∈ R^{n+2q}`: objective,
/// inequalities, equalities and the `q` coupled pairs (switching or
/// complementarity pairs, depending on the owner).
#[derive(Debug, Clone)]
pub struct LiftedProgram<T> {
    pub dim: usize,
    pub f: SmoothFn<T>,
    pub g: Vec<SmoothFn<T>>,
    pub h: Vec<SmoothFn<T>>,
    pub pairs: Vec<(SmoothFn<T>, SmoothFn<T>)>,
}

/// Shared layout bookkeeping of both lifts: `y` occupies `n..n+q`, `z`
/// occupies `n+q..n+2q`.
#[derive(Debug, Clone)]
struct Layout<T> {
    n: usize,
    q: usize,
    y: Vec<SmoothFn<T>>,
    z: Vec<SmoothFn<T>>,
    lifted_g: Vec<SmoothFn<T>>,
    lifted_h: Vec<SmoothFn<T>>,
    lifted_gl: Vec<SmoothFn<T>>,
    lifted_hl: Vec<SmoothFn<T>>,
}

impl<T: Real> Layout<T> {
    fn new(problem: &MpocProblem<T>) -> Self {
        let n = problem.n;
        let q = problem.q();
        let d = n + 2 * q;
        Self {
            n,
            q,
            y: (0..q).map(|l| SmoothFn::coordinate(d, n + l, T::one(), T::zero())).collect(),
            z: (0..q).map(|l| SmoothFn::coordinate(d, n + q + l, T::one(), T::zero())).collect(),
            lifted_g: problem.g.iter().map(|g| g.embed(d)).collect(),
            lifted_h: problem.h.iter().map(|h| h.embed(d)).collect(),
            lifted_gl: problem.or_pairs.iter().map(|p| p.g.embed(d)).collect(),
            lifted_hl: problem.or_pairs.iter().map(|p| p.h.embed(d)).collect(),
        }
    }

    fn dim(&self) -> usize {
        self.n + 2 * self.q
    }

    fn join(&self, x: &[T], y: &[T], z: &[T]) -> Vec<T> {
        assert_eq!(x.len(), self.n);
        assert_eq!(y.len(), self.q);
        assert_eq!(z.len(), self.q);
        let mut v = x.to_vec();
        v.extend_from_slice(y);
        v.extend_from_slice(z);
        v
    }
}

/// `min f(x)  s.t.  g(x) ≤ 0, h(x) = 0, y, z ≤ 0, (G_l(x) − y_l)(H_l(x) − z_l) = 0`.
#[derive(Debug, Clone)]
pub struct MpscInstance<T> {
    pub base: MpocProblem<T>,
    pub program: LiftedProgram<T>,
    layout: Layout<T>,
}

/// `min f(x)  s.t.  g(x) ≤ 0, h(x) = 0, G(x) ≤ y, H(x) ≤ z, 0 ≤ y ⊥ z ≥ 0`.
#[derive(Debug, Clone)]
pub struct MpccInstance<T> {
    pub base: MpocProblem<T>,
    pub program: LiftedProgram<T>,
    layout: Layout<T>,
}

pub fn to_mpsc<T: Real>(problem: &MpocProblem<T>) -> MpscInstance<T> {
    let layout = Layout::new(problem);
    let d = layout.dim();
    let mut g = layout.lifted_g.clone();
    g.extend(layout.y.iter().cloned());
    g.extend(layout.z.iter().cloned());
    let pairs = (0..layout.q)
        .map(|l| {
            (
                SmoothFn::difference(&layout.lifted_gl[l], &layout.y[l]),
                SmoothFn::difference(&layout.lifted_hl[l], &layout.z[l]),
            )
        })
        .collect();
    let program = LiftedProgram { dim: d, f: problem.f.embed(d), g, h: layout.lifted_h.clone(), pairs };
    MpscInstance { base: problem.clone(), program, layout }
}

pub fn to_mpcc<T: Real>(problem: &MpocProblem<T>) -> MpccInstance<T> {
    let layout = Layout::new(problem);
    let d = layout.dim();
    let mut g = layout.lifted_g.clone();
    for l in 0..layout.q {
        g.push(SmoothFn::difference(&layout.lifted_gl[l], &layout.y[l]));
    }
    for l in 0..layout.q {
        g.push(SmoothFn::difference(&layout.lifted_hl[l], &layout.z[l]));
    }
    let pairs = (0..layout.q).map(|l| (layout.y[l].clone(), layout.z[l].clone())).collect();
    let program = LiftedProgram { dim: d, f: problem.f.embed(d), g, h: layout.lifted_h.clone(), pairs };
    MpccInstance { base: problem.clone(), program, layout }
}

macro_rules! lifted_common {
    ($ty:ident) => {
        impl<T: Real> $ty<T> {
            pub fn dim(&self) -> usize {
                self.layout.dim()
            }

            pub fn q(&self) -> usize {
                self.layout.q
            }

            /// Concatenates `(x, y, z)`.
            pub fn join(&self, x: &[T], y: &[T], z: &[T]) -> Vec<T> {
                self.layout.join(x, y, z)
            }

            pub fn x_part<'a>(&self, point: &'a [T]) -> &'a [T] {
                &point[..self.layout.n]
            }

            pub fn y_part<'a>(&self, point: &'a [T]) -> &'a [T] {
                &point[self.layout.n..self.layout.n + self.layout.q]
            }

            pub fn z_part<'a>(&self, point: &'a [T]) -> &'a [T] {
                &point[self.layout.n + self.layout.q..]
            }

            pub(crate) fn check_dim(&self, point: &[T]) -> Result<()> {
                if point.len() != self.dim() {
                    return Err(Error::DimensionMismatch { expected: self.dim(), got: point.len() });
                }
                Ok(())
            }

            fn smooth_violation(&self, point: &[T]) -> T {
                let p = &self.program;
                let gv = p.g.iter().fold(T::zero(), |a, g| a.max(g.value(point)));
                p.h.iter().fold(gv, |a, h| a.max(h.value(point).abs()))
            }
        }
    };
}

lifted_common!(MpscInstance);
lifted_common!(MpccInstance);

impl<T: Real> MpscInstance<T> {
    /// Largest violation of the lifted constraints; the switching condition
    /// contributes `min(|G̃_l|, |H̃_l|)`.
    pub fn violation(&self, point: &[T]) -> Result<T> {
        self.check_dim(point)?;
        let sw = self.program.pairs.iter().fold(T::zero(), |a, (g, h)| a.max(g.value(point).abs().min(h.value(point).abs())));
        Ok(self.smooth_violation(point).max(sw))
    }

    /// Starting slacks `y₀ = min(0, G(x₀))`, `z₀ = min(0, H(x₀))`.
    pub fn default_start(&self, x0: &[T]) -> Vec<T> {
        let y: Vec<T> = self.base.or_pairs.iter().map(|p| p.g.value(x0).min(T::zero())).collect();
        let z: Vec<T> = self.base.or_pairs.iter().map(|p| p.h.value(x0).min(T::zero())).collect();
        self.join(x0, &y, &z)
    }
}

impl<T: Real> MpccInstance<T> {
    /// Largest violation of the lifted constraints; each complementarity pair
    /// contributes `max(0, −y_l, −z_l, min(y_l, z_l))`.
    pub fn violation(&self, point: &[T]) -> Result<T> {
        self.check_dim(point)?;
        let cc = self.program.pairs.iter().fold(T::zero(), |a, (g, h)| {
            let (u, v) = (g.value(point), h.value(point));
            a.max(-u).max(-v).max(u.min(v))
        });
        Ok(self.smooth_violation(point).max(cc))
    }

    /// Starting slacks `y₀ = max(0, G(x₀)) + 0.1`, `z₀ = max(0, H(x₀)) + 0.1`.
    pub fn default_start(&self, x0: &[T]) -> Vec<T> {
        let off = T::lit(0.1);
        let y: Vec<T> = self.base.or_pairs.iter().map(|p| p.g.value(x0).max(T::zero()) + off).collect();
        let z: Vec<T> = self.base.or_pairs.iter().map(|p| p.h.value(x0).max(T::zero()) + off).collect();
        self.join(x0, &y, &z)
    }
}

/// Slack values lifting an MPOC-feasible `x` to a feasible point of the
/// complementarity reformulation, decided on the active pattern at `eps`.
pub fn cc_slack_lift<T: Real>(problem: &MpocProblem<T>, x: &[T], eps: T) -> Result<(Vec<T>, Vec<T>)> {
    let pat = active_pattern(problem, x, eps)?;
    let q = problem.q();
    let mut y = vec![T::zero(); q];
    let mut z = vec![T::zero(); q];
    let two = T::lit(2.0);
    for &l in &pat.i_0m {
        y[l] = T::one();
    }
    for &l in pat.i_pm.iter().chain(&pat.i_p0) {
        y[l] = two * problem.or_pairs[l].g.value(x);
    }
    for &l in &pat.i_m0 {
        z[l] = T::one();
    }
    for &l in pat.i_mp.iter().chain(&pat.i_0p) {
        z[l] = two * problem.or_pairs[l].h.value(x);
    }
    Ok((y, z))
}

/// Scholtes relaxation `−t ≤ G̃_l H̃_l ≤ t` of the switching lift.
///
/// Inequalities: lifted `g`, `y ≤ 0`, `z ≤ 0`, then `G̃_l H̃_l − t ≤ 0` and
/// `−G̃_l H̃_l − t ≤ 0` for every pair.
pub fn scholtes_sc_relax<T: Real>(inst: &MpscInstance<T>, t: T) -> NlpSpec<T> {
    let p = &inst.program;
    let mut spec = NlpSpec::new(format!("{}-sc({t})", inst.base.name), p.f.clone());
    spec.ineq.extend(p.g.iter().cloned());
    for (g, h) in &p.pairs {
        let prod = SmoothFn::product(g, h);
        spec.ineq.push(prod.shifted(-t));
        spec.ineq.push(prod.scaled(-T::one()).shifted(-t));
    }
    spec.eq.extend(p.h.iter().cloned());
    spec
}

/// Scholtes relaxation `y, z ≥ 0`, `y_l z_l ≤ t` of the complementarity
/// lift.
///
/// Inequalities: lifted `g`, `G − y ≤ 0`, `H − z ≤ 0`, then per pair
/// `−y_l ≤ 0`, `−z_l ≤ 0`, `y_l z_l − t ≤ 0`.
pub fn scholtes_cc_relax<T: Real>(inst: &MpccInstance<T>, t: T) -> NlpSpec<T> {
    let p = &inst.program;
    let mut spec = NlpSpec::new(format!("{}-cc({t})", inst.base.name), p.f.clone());
    spec.ineq.extend(p.g.iter().cloned());
    for (y, z) in &p.pairs {
        spec.ineq.push(y.scaled(-T::one()));
        spec.ineq.push(z.scaled(-T::one()));
        spec.ineq.push(SmoothFn::product(y, z).shifted(-t));
    }
    spec.eq.extend(p.h.iter().cloned());
    spec
}
