//! Small dense linear algebra kernels: symmetric indefinite factorization with
//! inertia, pivoted least squares, one-sided Jacobi SVD and Cholesky.

use crate::scalar::Real;

/// Row-major dense matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Real> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![T::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = T::one();
        }
        m
    }

    /// Builds a matrix whose columns are the given vectors (all of length `rows`).
    pub fn from_columns(rows: usize, columns: &[Vec<T>]) -> Self {
        let mut m = Self::zeros(rows, columns.len());
        for (j, c) in columns.iter().enumerate() {
            assert_eq!(c.len(), rows, "column length mismatch");
            for (i, v) in c.iter().enumerate() {
                m[(i, j)] = *v;
            }
        }
        m
    }

    pub fn from_row_major(rows: usize, cols: usize, data: Vec<T>) -> Self {
        assert_eq!(data.len(), rows * cols);
        Self { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [T] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<T> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    pub fn scaled(mut self, s: T) -> Self {
        self.data.iter_mut().for_each(|x| *x *= s);
        self
    }

    pub fn fill(&mut self, v: T) {
        self.data.iter_mut().for_each(|x| *x = v);
    }

    pub fn mul_vec(&self, x: &[T]) -> Vec<T> {
        assert_eq!(x.len(), self.cols);
        (0..self.rows).map(|i| crate::scalar::dot(self.row(i), x)).collect()
    }

    /// `selfᵀ x`
    pub fn tr_mul_vec(&self, x: &[T]) -> Vec<T> {
        assert_eq!(x.len(), self.rows);
        let mut out = vec![T::zero(); self.cols];
        for (i, xi) in x.iter().enumerate() {
            crate::scalar::axpy(*xi, self.row(i), &mut out);
        }
        out
    }

    /// Replaces the matrix by `(A + Aᵀ)/2`; panics if not square.
    pub fn symmetrize(&mut self) {
        assert_eq!(self.rows, self.cols);
        let half = T::lit(0.5);
        for i in 0..self.rows {
            for j in (i + 1)..self.cols {
                let v = half * (self[(i, j)] + self[(j, i)]);
                self[(i, j)] = v;
                self[(j, i)] = v;
            }
        }
    }
}

impl<T> std::ops::Index<(usize, usize)> for Matrix<T> {
    type Output = T;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.cols + j]
    }
}

impl<T> std::ops::IndexMut<(usize, usize)> for Matrix<T> {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[i * self.cols + j]
    }
}

/// Number of positive, negative and (numerically) zero pivots.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Inertia {
    pub positive: usize,
    pub negative: usize,
    pub zero: usize,
}

/// `A = L D Lᵀ` without pivoting. Intended for symmetric quasi-definite
/// matrices, which admit the factorization for any symmetric ordering.
#[derive(Debug, Clone)]
pub struct Ldlt<T> {
    n: usize,
    l: Vec<T>,
    d: Vec<T>,
    pub inertia: Inertia,
}

impl<T: Real> Ldlt<T> {
    /// Factorizes the lower triangle of `a`. Pivots with magnitude below
    /// `pivot_tol` are counted as zero, leaving the factorization unusable.
    pub fn factor(a: &Matrix<T>, pivot_tol: T) -> Self {
        let n = a.rows();
        assert_eq!(n, a.cols());
        let mut l = vec![T::zero(); n * n];
        let mut d = vec![T::zero(); n];
        let mut inertia = Inertia { positive: 0, negative: 0, zero: 0 };
        // scratch: w[k] = L[j,k] d[k]
        let mut w = vec![T::zero(); n];
        for j in 0..n {
            let lj = j * n;
            let mut dj = a[(j, j)];
            for k in 0..j {
                w[k] = l[lj + k] * d[k];
                dj -= l[lj + k] * w[k];
            }
            if !dj.is_finite() || dj.abs() <= pivot_tol {
                inertia.zero += 1;
                d[j] = T::zero();
                // keep going so the caller sees the full inertia count
                for i in (j + 1)..n {
                    l[i * n + j] = T::zero();
                }
                l[lj + j] = T::one();
                continue;
            }
            if dj > T::zero() {
                inertia.positive += 1;
            } else {
                inertia.negative += 1;
            }
            d[j] = dj;
            l[lj + j] = T::one();
            for i in (j + 1)..n {
                let li = i * n;
                let mut s = a[(i, j)];
                for k in 0..j {
                    s -= l[li + k] * w[k];
                }
                l[li + j] = s / dj;
            }
        }
        Self { n, l, d, inertia }
    }

    pub fn is_regular(&self) -> bool {
        self.inertia.zero == 0
    }

    pub fn solve(&self, b: &[T]) -> Vec<T> {
        let n = self.n;
        let mut x = b.to_vec();
        for i in 0..n {
            let li = i * n;
            let mut s = x[i];
            for k in 0..i {
                s -= self.l[li + k] * x[k];
            }
            x[i] = s;
        }
        for i in 0..n {
            x[i] = if self.d[i] == T::zero() { T::zero() } else { x[i] / self.d[i] };
        }
        for i in (0..n).rev() {
            let mut s = x[i];
            for k in (i + 1)..n {
                s -= self.l[k * n + i] * x[k];
            }
            x[i] = s;
        }
        x
    }
}

/// Cholesky factor of a symmetric positive definite matrix.
#[derive(Debug, Clone)]
pub struct Cholesky<T> {
    n: usize,
    l: Vec<T>,
}

impl<T: Real> Cholesky<T> {
    pub fn factor(a: &Matrix<T>) -> Option<Self> {
        let n = a.rows();
        let mut l = vec![T::zero(); n * n];
        for j in 0..n {
            let mut s = a[(j, j)];
            for k in 0..j {
                s -= l[j * n + k] * l[j * n + k];
            }
            if s <= T::zero() || !s.is_finite() {
                return None;
            }
            let djj = s.sqrt();
            l[j * n + j] = djj;
            for i in (j + 1)..n {
                let mut s = a[(i, j)];
                for k in 0..j {
                    s -= l[i * n + k] * l[j * n + k];
                }
                l[i * n + j] = s / djj;
            }
        }
        Some(Self { n, l })
    }

    pub fn solve(&self, b: &[T]) -> Vec<T> {
        let n = self.n;
        let mut x = b.to_vec();
        for i in 0..n {
            let mut s = x[i];
            for k in 0..i {
                s -= self.l[i * n + k] * x[k];
            }
            x[i] = s / self.l[i * n + i];
        }
        for i in (0..n).rev() {
            let mut s = x[i];
            for k in (i + 1)..n {
                s -= self.l[k * n + i] * x[k];
            }
            x[i] = s / self.l[i * n + i];
        }
        x
    }
}

/// Least-squares solution of `min ‖A x − b‖₂` by Householder QR with column
/// pivoting. Columns beyond the numerical rank receive zero coefficients, so
/// the result is a deterministic basic solution.
pub fn lstsq<T: Real>(a: &Matrix<T>, b: &[T]) -> Vec<T> {
    let m = a.rows();
    let n = a.cols();
    assert_eq!(b.len(), m);
    if n == 0 {
        return Vec::new();
    }
    // column-major working copy
    let mut cols: Vec<Vec<T>> = (0..n).map(|j| a.column(j)).collect();
    let mut rhs = b.to_vec();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut norms: Vec<T> = cols.iter().map(|c| crate::scalar::norm2(c)).collect();
    let max_norm = norms.iter().fold(T::zero(), |a, b| a.max(*b));
    let rank_tol = T::epsilon() * T::from_usize_lossy(m.max(n)) * T::lit(10.0) * max_norm;
    let steps = m.min(n);
    let mut rank = 0;
    for k in 0..steps {
        // pivot: largest remaining column norm, lowest index on ties
        let mut p = k;
        for j in (k + 1)..n {
            if norms[j] > norms[p] {
                p = j;
            }
        }
        if norms[p] <= rank_tol {
            break;
        }
        cols.swap(k, p);
        norms.swap(k, p);
        perm.swap(k, p);
        // Householder on rows k..m of column k
        let alpha = {
            let s: T = cols[k][k..].iter().map(|v| *v * *v).sum::<T>().sqrt();
            if cols[k][k] > T::zero() {
                -s
            } else {
                s
            }
        };
        let mut v: Vec<T> = cols[k][k..].to_vec();
        v[0] -= alpha;
        let vnorm2: T = v.iter().map(|x| *x * *x).sum();
        if vnorm2 > T::zero() {
            let two = T::lit(2.0);
            for j in k..n {
                let s: T = v.iter().zip(&cols[j][k..]).map(|(a, b)| *a * *b).sum();
                let f = two * s / vnorm2;
                for (i, vi) in v.iter().enumerate() {
                    cols[j][k + i] -= f * *vi;
                }
            }
            let s: T = v.iter().zip(&rhs[k..]).map(|(a, b)| *a * *b).sum();
            let f = two * s / vnorm2;
            for (i, vi) in v.iter().enumerate() {
                rhs[k + i] -= f * *vi;
            }
        }
        rank = k + 1;
        for j in (k + 1)..n {
            norms[j] = cols[j][(k + 1)..].iter().map(|x| *x * *x).sum::<T>().sqrt();
        }
    }
    let mut z = vec![T::zero(); n];
    for i in (0..rank).rev() {
        let mut s = rhs[i];
        for j in (i + 1)..rank {
            s -= cols[j][i] * z[j];
        }
        z[i] = s / cols[i][i];
    }
    let mut x = vec![T::zero(); n];
    for (k, &p) in perm.iter().enumerate() {
        x[p] = z[k];
    }
    x
}

/// Singular values (descending) and right singular vectors of `A` via
/// one-sided Jacobi rotations. `vectors[k]` pairs with `values[k]`.
#[derive(Debug, Clone)]
pub struct Svd<T> {
    pub values: Vec<T>,
    pub vectors: Vec<Vec<T>>,
}

pub fn svd_jacobi<T: Real>(a: &Matrix<T>) -> Svd<T> {
    let m = a.rows();
    let n = a.cols();
    let mut u: Vec<Vec<T>> = (0..n).map(|j| a.column(j)).collect();
    let mut v: Vec<Vec<T>> = (0..n)
        .map(|j| {
            let mut e = vec![T::zero(); n];
            e[j] = T::one();
            e
        })
        .collect();
    let eps = T::epsilon();
    for _sweep in 0..60 {
        let mut rotated = false;
        for p in 0..n {
            for q in (p + 1)..n {
                let alpha: T = u[p].iter().map(|x| *x * *x).sum();
                let beta: T = u[q].iter().map(|x| *x * *x).sum();
                let gamma: T = u[p].iter().zip(&u[q]).map(|(a, b)| *a * *b).sum();
                if gamma.abs() <= eps * (alpha * beta).sqrt() || gamma == T::zero() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (T::lit(2.0) * gamma);
                let t = zeta.signum() / (zeta.abs() + (T::one() + zeta * zeta).sqrt());
                let c = T::one() / (T::one() + t * t).sqrt();
                let s = c * t;
                for i in 0..m {
                    let up = u[p][i];
                    let uq = u[q][i];
                    u[p][i] = c * up - s * uq;
                    u[q][i] = s * up + c * uq;
                }
                for i in 0..n {
                    let vp = v[p][i];
                    let vq = v[q][i];
                    v[p][i] = c * vp - s * vq;
                    v[q][i] = s * vp + c * vq;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let mut pairs: Vec<(T, Vec<T>)> = u
        .iter()
        .zip(v)
        .map(|(col, vec)| (crate::scalar::norm2(col), vec))
        .collect();
    pairs.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap_or(std::cmp::Ordering::Equal));
    let (values, vectors) = pairs.into_iter().unzip();
    Svd { values, vectors }
}
