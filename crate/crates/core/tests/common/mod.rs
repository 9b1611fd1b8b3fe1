#![allow(dead_code)]

use orcon::linalg::{lstsq, Matrix};
use orcon::model::{MpocProblem, SmoothFn};
use orcon::nlp::NlpSpec;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub struct RegressionCase {
    pub spec: NlpSpec<f64>,
    pub start: Vec<f64>,
    pub solution: Vec<f64>,
}

fn case(spec: NlpSpec<f64>, start: &[f64], solution: Vec<f64>) -> RegressionCase {
    RegressionCase { spec, start: start.to_vec(), solution }
}

/// `Σ w_i (x_i − c_i)²`.
fn weighted_distance(w: &[f64], c: &[f64]) -> SmoothFn<f64> {
    let n = w.len();
    let mut q = Matrix::zeros(n, n);
    for i in 0..n {
        q[(i, i)] = 2.0 * w[i];
    }
    let b = (0..n).map(|i| -2.0 * w[i] * c[i]).collect();
    let c0 = (0..n).map(|i| w[i] * c[i] * c[i]).sum();
    SmoothFn::quadratic(q, b, c0)
}

/// `‖x − center‖² − r²`.
fn ball(center: &[f64], r: f64) -> SmoothFn<f64> {
    weighted_distance(&vec![1.0; center.len()], center).shifted(-r * r)
}

fn some(v: &[f64]) -> Vec<Option<f64>> {
    v.iter().map(|x| Some(*x)).collect()
}

/// Ten smooth convex programs with known minimizers.
pub fn regression_suite() -> Vec<RegressionCase> {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let mut out = Vec::new();

    out.push(case(
        NlpSpec::new("scalar-quadratic", weighted_distance(&[1.0], &[1.0])),
        &[5.0],
        vec![1.0],
    ));

    let lin = SmoothFn::affine(2, vec![(0, 1.0), (1, 1.0)], 0.0);
    out.push(case(NlpSpec::new("linear-over-disk", lin).ineq(ball(&[0.0, 0.0], 1.0)), &[1.0, 1.0], vec![-h, -h]));

    out.push(case(
        NlpSpec::new("box-corner", weighted_distance(&[1.0, 1.0], &[2.0, -1.0]))
            .bounds(&some(&[0.0, 0.0]), &some(&[1.0, 1.0])),
        &[0.5, 0.5],
        vec![1.0, 0.0],
    ));

    // Coupled quadratic whose free minimizer lies inside the box.
    let q = Matrix::from_row_major(3, 3, vec![4.0, 1.0, 0.0, 1.0, 3.0, 1.0, 0.0, 1.0, 2.0]);
    let x_star = vec![0.5, -0.25, 0.3];
    let c: Vec<f64> = q.mul_vec(&x_star).iter().map(|v| -v).collect();
    out.push(case(
        NlpSpec::new("box-interior", SmoothFn::quadratic(q, c, 0.0)).bounds(&some(&[-1.0; 3]), &some(&[1.0; 3])),
        &[0.9, 0.9, -0.9],
        x_star,
    ));

    let sum = SmoothFn::affine(3, vec![(0, 1.0), (1, 1.0), (2, 1.0)], -1.0);
    out.push(case(
        NlpSpec::new("projection-onto-plane", weighted_distance(&[1.0; 3], &[1.0, 2.0, 3.0])).eq(sum),
        &[0.0, 0.0, 0.0],
        vec![-2.0 / 3.0, 1.0 / 3.0, 4.0 / 3.0],
    ));

    out.push(equality_least_squares());

    out.push(case(
        NlpSpec::new("projection-onto-disk", weighted_distance(&[1.0, 1.0], &[2.0, 2.0])).ineq(ball(&[0.0, 0.0], 1.0)),
        &[0.0, 0.0],
        vec![h, h],
    ));

    // Leftmost point of a lens of two discs; only the shifted disc is active.
    out.push(case(
        NlpSpec::new("lens", SmoothFn::coordinate(2, 0, 1.0, 0.0))
            .ineq(ball(&[0.0, 0.0], 2.0))
            .ineq(ball(&[1.0, 0.0], 2.0)),
        &[0.5, 0.5],
        vec![-1.0, 0.0],
    ));

    let r = 1.5f64.sqrt();
    out.push(case(
        NlpSpec::new("ball-with-plane", SmoothFn::affine(3, vec![(0, 1.0), (1, 1.0), (2, 1.0)], 0.0))
            .ineq(ball(&[0.0; 3], 3f64.sqrt()))
            .eq(SmoothFn::coordinate(3, 2, 1.0, 0.0)),
        &[0.2, -0.1, 0.5],
        vec![-r, -r, 0.0],
    ));

    // Twenty clamped coordinates.
    let n = 20;
    let target: Vec<f64> = (0..n).map(|i| -0.5 + 2.0 * i as f64 / (n - 1) as f64).collect();
    let weights: Vec<f64> = (0..n).map(|i| 1.0 + (i % 3) as f64).collect();
    out.push(case(
        NlpSpec::new("box-clamp-20", weighted_distance(&weights, &target))
            .bounds(&some(&vec![0.0; n]), &some(&vec![1.0; n])),
        &vec![0.5; n],
        target.iter().map(|t| t.clamp(0.0, 1.0)).collect(),
    ));

    out
}

/// `min ‖Ax − b‖²  s.t.  Cx = d`; the reference solution comes from the
/// linear KKT system.
fn equality_least_squares() -> RegressionCase {
    let a = Matrix::from_row_major(
        5,
        4,
        vec![
            1.0, 2.0, 0.0, 1.0, //
            0.0, 1.0, 1.0, 0.0, //
            2.0, 0.0, 1.0, 1.0, //
            1.0, 1.0, 1.0, 1.0, //
            0.0, 3.0, 0.0, -1.0,
        ],
    );
    let b = [1.0, -1.0, 2.0, 0.5, 3.0];
    let c = Matrix::from_row_major(2, 4, vec![1.0, -1.0, 0.0, 2.0, 0.0, 1.0, 1.0, 1.0]);
    let d = [0.5, 1.0];

    let mut ata = Matrix::zeros(4, 4);
    for i in 0..4 {
        for j in 0..4 {
            ata[(i, j)] = (0..5).map(|k| a[(k, i)] * a[(k, j)]).sum();
        }
    }
    let atb = a.tr_mul_vec(&b);
    let mut kkt = Matrix::zeros(6, 6);
    let mut rhs = vec![0.0; 6];
    for i in 0..4 {
        for j in 0..4 {
            kkt[(i, j)] = 2.0 * ata[(i, j)];
        }
        for r in 0..2 {
            kkt[(i, 4 + r)] = c[(r, i)];
            kkt[(4 + r, i)] = c[(r, i)];
        }
        rhs[i] = 2.0 * atb[i];
    }
    rhs[4] = d[0];
    rhs[5] = d[1];
    let solution = lstsq(&kkt, &rhs)[..4].to_vec();

    let q = ata.scaled(2.0);
    let lin: Vec<f64> = atb.iter().map(|v| -2.0 * v).collect();
    let bb = b.iter().map(|v| v * v).sum();
    let mut spec = NlpSpec::new("equality-least-squares", SmoothFn::quadratic(q, lin, bb));
    for r in 0..2 {
        spec = spec.eq(SmoothFn::affine(4, (0..4).map(|i| (i, c[(r, i)])).collect(), -d[r]));
    }
    case(spec, &[0.0; 4], solution)
}

/// Random small or-constrained program: convex quadratic `f`, affine `g`,
/// `h` and or-pair functions, so activity patterns can be planted exactly.
pub struct SmallInstance {
    pub problem: MpocProblem<f64>,
    pub point: Vec<f64>,
}

fn affine_through(n: usize, rng: &mut ChaCha8Rng, x: &[f64], value: f64) -> SmoothFn<f64> {
    let coef: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let at_x: f64 = coef.iter().zip(x).map(|(c, xi)| c * xi).sum();
    SmoothFn::affine(n, coef.into_iter().enumerate().collect(), value - at_x)
}

/// Draws an instance together with a feasible point `x̄` at which each
/// or-pair has a planted sign pattern (one of the eight index classes, or
/// six when `allow_one_sided` is false: `I^{−0}` and `I^{0−}` stay empty).
/// The objective gradient at `x̄` is drawn from the cone spanned by the
/// active constraint gradients with random signs, so that every stationarity
/// class occurs in a seeded batch.
pub fn small_instance(seed: u64, allow_one_sided: bool) -> SmallInstance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(2..=5);
    let q = rng.gen_range(1..=3);
    let m = rng.gen_range(0..=2);
    let x: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();

    let mut grads: Vec<(Vec<f64>, f64)> = Vec::new();
    let mut g = Vec::new();
    for _ in 0..m {
        let active = rng.gen_bool(0.5);
        let fun = affine_through(n, &mut rng, &x, if active { 0.0 } else { -1.0 });
        if active {
            grads.push((fun.gradient(&x), rng.gen_range(0.0..1.0)));
        }
        g.push(fun);
    }
    let h: Vec<SmoothFn<f64>> = (0..rng.gen_range(0..=1))
        .map(|_| {
            let fun = affine_through(n, &mut rng, &x, 0.0);
            grads.push((fun.gradient(&x), rng.gen_range(-1.0..1.0)));
            fun
        })
        .collect();
    let mut pairs = Vec::new();
    for _ in 0..q {
        // (sign of G, sign of H) among the feasible patterns.
        let lo = if allow_one_sided { 0 } else { 2 };
        let (sg, sh) = match rng.gen_range(lo..8) {
            0 => (-1.0, 0.0),
            1 => (0.0, -1.0),
            2 => (-1.0, 1.0),
            3 => (1.0, -1.0),
            4 => (0.0, 1.0),
            5 => (1.0, 0.0),
            6 => (-1.0, -1.0),
            _ => (0.0, 0.0),
        };
        let gf = affine_through(n, &mut rng, &x, sg);
        let hf = affine_through(n, &mut rng, &x, sh);
        if sg == 0.0 && sh > 0.0 {
            grads.push((gf.gradient(&x), rng.gen_range(0.0..1.0)));
        }
        if sh == 0.0 && sg > 0.0 {
            grads.push((hf.gradient(&x), rng.gen_range(0.0..1.0)));
        }
        if sg == 0.0 && sh == 0.0 {
            // Biactive multipliers: zero, one-sided, both positive, or mixed.
            let (mu, nu) = match rng.gen_range(0..4) {
                0 => (0.0, 0.0),
                1 => (rng.gen_range(-1.0..1.0), 0.0),
                2 => (rng.gen_range(0.1..1.0), rng.gen_range(0.1..1.0)),
                _ => (rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
            };
            grads.push((gf.gradient(&x), mu));
            grads.push((hf.gradient(&x), nu));
        }
        pairs.push((gf, hf));
    }
    // ∇f(x̄) = −Σ coeff·grad.
    let mut grad_f = vec![0.0; n];
    for (v, c) in &grads {
        for i in 0..n {
            grad_f[i] -= c * v[i];
        }
    }
    if grads.is_empty() && rng.gen_bool(0.5) {
        grad_f.iter_mut().for_each(|v| *v = rng.gen_range(-1.0..1.0));
    }
    let mut qm = Matrix::identity(n);
    for i in 0..n {
        qm[(i, i)] = rng.gen_range(0.5..2.0);
    }
    let qx = qm.mul_vec(&x);
    let b: Vec<f64> = (0..n).map(|i| grad_f[i] - qx[i]).collect();
    let mut problem = MpocProblem::new(format!("small-{seed}"), SmoothFn::quadratic(qm, b, 0.0));
    for gi in g {
        problem = problem.ineq(gi);
    }
    for hj in h {
        problem = problem.eq(hj);
    }
    for (gf, hf) in pairs {
        problem = problem.or_pair(gf, hf);
    }
    SmallInstance { problem, point: x }
}

/// Exact NNLS value by enumerating every passive set: the minimizer is the
/// unconstrained least-squares solution on its own support.
pub fn nnls_oracle(nonneg: &[Vec<f64>], free: &[Vec<f64>], target: &[f64]) -> f64 {
    let k = nonneg.len();
    assert!(k <= 16, "oracle is exponential in the column count");
    let n = target.len();
    let rhs: Vec<f64> = target.iter().map(|v| -v).collect();
    let mut best = f64::INFINITY;
    for mask in 0u32..(1 << k) {
        let cols: Vec<Vec<f64>> =
            (0..k).filter(|i| mask & (1 << i) != 0).map(|i| nonneg[i].clone()).chain(free.iter().cloned()).collect();
        let coef = if cols.is_empty() { Vec::new() } else { lstsq(&Matrix::from_columns(n, &cols), &rhs) };
        let support = mask.count_ones() as usize;
        if coef[..support].iter().any(|c| *c < -1e-12) {
            continue;
        }
        let mut r = target.to_vec();
        for (c, a) in cols.iter().zip(&coef) {
            for i in 0..n {
                r[i] += a * c[i];
            }
        }
        best = best.min(r.iter().map(|v| v * v).sum::<f64>().sqrt());
    }
    best
}

/// KKT test of a smooth program at `x` through the exact NNLS oracle: active
/// inequality gradients with nonnegative weights, equality gradients free.
pub fn nlp_kkt_holds(spec: &NlpSpec<f64>, x: &[f64], eps_act: f64, eps_stat: f64) -> bool {
    let active: Vec<Vec<f64>> =
        spec.ineq.iter().filter(|c| c.value(x).abs() <= eps_act).map(|c| c.gradient(x)).collect();
    let free: Vec<Vec<f64>> = spec.eq.iter().map(|c| c.gradient(x)).collect();
    nnls_oracle(&active, &free, &spec.objective.gradient(x)) <= eps_stat
}
