//! Dense vectors and linear maps over ℝⁿ.
//!
//! The two problem spaces are realized as finite-dimensional Euclidean
//! spaces with the standard inner product, and the coupling operator is a
//! dense matrix together with its transpose as the adjoint. Everything here
//! is immutable after construction and desk-scale (n ≤ a few hundred), so
//! plain row-major storage and O(n³) factorizations are fine.

use std::ops::{Add, Index, Mul, Sub};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Convergence tolerance for the power iteration used by [`Matrix::operator_norm`].
const POWER_ITERATION_TOL: f64 = 1e-12;
/// Iteration cap for the power iteration before falling back to a full eigensolve.
const POWER_ITERATION_MAX: usize = 10_000;
/// Largest dimension for which the dense symmetric eigensolve fallback runs.
const EIGENSOLVE_FALLBACK_DIM: usize = 64;

/// A point of one of the problem spaces.
#[derive(Debug, Clone, PartialEq)]
pub struct Vector {
    data: Vec<f64>,
}

impl Vector {
    /// Builds a vector, rejecting NaN and infinite entries.
    pub fn new(data: Vec<f64>) -> Result<Self> {
        if data.iter().all(|x| x.is_finite()) {
            Ok(Self { data })
        } else {
            Err(Error::NonFinite)
        }
    }

    /// Panicking constructor for literals; entries must be finite.
    pub fn from_slice(entries: &[f64]) -> Self {
        Self::new(entries.to_vec()).expect("finite entries")
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            data: vec![0.0; dim],
        }
    }

    pub fn from_fn(dim: usize, f: impl FnMut(usize) -> f64) -> Self {
        Self {
            data: (0..dim).map(f).collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.data.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.data
    }

    pub fn dot(&self, other: &Vector) -> f64 {
        assert_eq!(self.dim(), other.dim(), "dot: dimension mismatch");
        self.data.iter().zip(&other.data).map(|(a, b)| a * b).sum()
    }

    pub fn norm(&self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn scale(&self, s: f64) -> Vector {
        Vector {
            data: self.data.iter().map(|x| x * s).collect(),
        }
    }

    /// self + s·other
    pub fn axpy(&self, s: f64, other: &Vector) -> Vector {
        assert_eq!(self.dim(), other.dim(), "axpy: dimension mismatch");
        Vector {
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a + s * b)
                .collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| *x == 0.0)
    }
}

impl Index<usize> for Vector {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.data[i]
    }
}

impl Add for &Vector {
    type Output = Vector;
    fn add(self, rhs: &Vector) -> Vector {
        self.axpy(1.0, rhs)
    }
}

impl Sub for &Vector {
    type Output = Vector;
    fn sub(self, rhs: &Vector) -> Vector {
        self.axpy(-1.0, rhs)
    }
}

impl Mul<f64> for &Vector {
    type Output = Vector;
    fn mul(self, s: f64) -> Vector {
        self.scale(s)
    }
}

/// A bounded linear operator between the problem spaces, stored dense
/// row-major. The adjoint is the transpose.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                expected: rows * cols,
                got: data.len(),
            });
        }
        if !data.iter().all(|x| x.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::Parse("matrix rows have unequal lengths".into()));
        }
        Matrix::new(r, c, rows.iter().flatten().copied().collect())
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = 1.0;
        }
        m
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row_major(&self) -> Vec<Vec<f64>> {
        (0..self.rows)
            .map(|i| self.data[i * self.cols..(i + 1) * self.cols].to_vec())
            .collect()
    }

    /// A·u
    pub fn apply(&self, u: &Vector) -> Vector {
        assert_eq!(self.cols, u.dim(), "apply: dimension mismatch");
        Vector::from_fn(self.rows, |i| {
            self.data[i * self.cols..(i + 1) * self.cols]
                .iter()
                .zip(u.as_slice())
                .map(|(a, x)| a * x)
                .sum()
        })
    }

    /// A*·v, i.e. the transpose applied to v.
    pub fn adjoint_apply(&self, v: &Vector) -> Vector {
        assert_eq!(self.rows, v.dim(), "adjoint_apply: dimension mismatch");
        let mut out = vec![0.0; self.cols];
        for i in 0..self.rows {
            let vi = v[i];
            for (j, o) in out.iter_mut().enumerate() {
                *o += self.data[i * self.cols + j] * vi;
            }
        }
        Vector { data: out }
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.data[j * self.rows + i] = self.data[i * self.cols + j];
            }
        }
        t
    }

    pub fn matmul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows, "matmul: dimension mismatch");
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a == 0.0 {
                    continue;
                }
                for j in 0..other.cols {
                    out.data[i * other.cols + j] += a * other.data[k * other.cols + j];
                }
            }
        }
        out
    }

    /// (M + Mᵀ)/2 for square matrices.
    pub fn symmetric_part(&self) -> Matrix {
        assert_eq!(
            self.rows, self.cols,
            "symmetric_part: matrix must be square"
        );
        let mut s = Matrix::zeros(self.rows, self.rows);
        for i in 0..self.rows {
            for j in 0..self.rows {
                s.data[i * self.rows + j] =
                    0.5 * (self.data[i * self.cols + j] + self.data[j * self.cols + i]);
            }
        }
        s
    }

    pub fn scale(&self, s: f64) -> Matrix {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| x * s).collect(),
        }
    }

    pub fn is_identity(&self) -> bool {
        self.rows == self.cols
            && (0..self.rows)
                .all(|i| (0..self.cols).all(|j| self.get(i, j) == if i == j { 1.0 } else { 0.0 }))
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0f64, |m, x| m.max(x.abs()))
    }

    /// Spectral norm ‖A‖ (largest singular value).
    ///
    /// Power iteration on the smaller Gram matrix with a fixed internal seed,
    /// falling back to a full symmetric eigensolve when the iteration
    /// stagnates and the dimension permits. Deterministic for fixed input.
    pub fn operator_norm(&self) -> f64 {
        if self.max_abs() == 0.0 {
            return 0.0;
        }
        // AᵀA and AAᵀ share their nonzero spectrum; use the smaller one.
        let gram = if self.rows >= self.cols {
            self.transpose().matmul(self)
        } else {
            self.matmul(&self.transpose())
        };
        match power_iteration_largest(&gram) {
            Some(lambda) => lambda.max(0.0).sqrt(),
            None => {
                if gram.rows <= EIGENSOLVE_FALLBACK_DIM {
                    let eigs = symmetric_eigenvalues(&gram);
                    eigs.last().copied().unwrap_or(0.0).max(0.0).sqrt()
                } else {
                    // Out of fallback range; rerun and keep the best estimate.
                    rayleigh_estimate(&gram).max(0.0).sqrt()
                }
            }
        }
    }
}

/// Largest eigenvalue of a symmetric PSD matrix by power iteration.
/// Returns None when the Rayleigh quotient fails to stagnate.
fn power_iteration_largest(g: &Matrix) -> Option<f64> {
    let n = g.rows();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5350_4c49);
    let mut v = Vector::from_fn(n, |_| rng.random_range(-1.0..1.0));
    let nv = v.norm();
    if nv == 0.0 {
        return None;
    }
    v = v.scale(1.0 / nv);
    let mut lambda_prev = f64::INFINITY;
    for it in 0..POWER_ITERATION_MAX {
        let w = g.apply(&v);
        let lambda = v.dot(&w);
        let wn = w.norm();
        if wn == 0.0 {
            // v landed in the null space; one PSD guard below decides.
            break;
        }
        v = w.scale(1.0 / wn);
        if it >= 2 && (lambda - lambda_prev).abs() <= POWER_ITERATION_TOL * lambda.abs().max(1.0) {
            // For a PSD matrix λ_max ≥ max diagonal entry; a converged value
            // below that means the start vector was deficient.
            let diag_max = (0..n).fold(0.0f64, |m, i| m.max(g.get(i, i)));
            if lambda + POWER_ITERATION_TOL * diag_max.max(1.0) >= diag_max {
                return Some(lambda);
            }
            return None;
        }
        lambda_prev = lambda;
    }
    None
}

fn rayleigh_estimate(g: &Matrix) -> f64 {
    let n = g.rows();
    let mut rng = ChaCha8Rng::seed_from_u64(0x6772_616d);
    let mut v = Vector::from_fn(n, |_| rng.random_range(-1.0..1.0));
    let mut best = 0.0f64;
    for _ in 0..POWER_ITERATION_MAX {
        let w = g.apply(&v);
        let wn = w.norm();
        if wn == 0.0 {
            break;
        }
        v = w.scale(1.0 / wn);
        best = best.max(v.dot(&g.apply(&v)));
    }
    best
}

/// Solves A x = b by LU factorization with partial pivoting.
pub fn lu_solve(a: &Matrix, b: &Vector) -> Result<Vector> {
    assert_eq!(a.rows(), a.cols(), "lu_solve: matrix must be square");
    assert_eq!(a.rows(), b.dim(), "lu_solve: dimension mismatch");
    let n = a.rows();
    let mut m = a.data.clone();
    let mut x: Vec<f64> = b.as_slice().to_vec();
    let pivot_tol = f64::EPSILON * (n as f64) * a.max_abs().max(1.0);

    for k in 0..n {
        let mut p = k;
        let mut pmax = m[k * n + k].abs();
        for i in (k + 1)..n {
            let v = m[i * n + k].abs();
            if v > pmax {
                pmax = v;
                p = i;
            }
        }
        if pmax <= pivot_tol {
            return Err(Error::SingularOperator);
        }
        if p != k {
            for j in 0..n {
                m.swap(k * n + j, p * n + j);
            }
            x.swap(k, p);
        }
        let pivot = m[k * n + k];
        for i in (k + 1)..n {
            let factor = m[i * n + k] / pivot;
            if factor == 0.0 {
                continue;
            }
            m[i * n + k] = 0.0;
            for j in (k + 1)..n {
                m[i * n + j] -= factor * m[k * n + j];
            }
            x[i] -= factor * x[k];
        }
    }
    for k in (0..n).rev() {
        let mut s = x[k];
        for j in (k + 1)..n {
            s -= m[k * n + j] * x[j];
        }
        x[k] = s / m[k * n + k];
    }
    Ok(Vector { data: x })
}

/// Explicit inverse via Gauss-Jordan elimination. Used by the reference
/// oracle, which deliberately avoids the LU path of the main solver.
pub fn invert_matrix(a: &Matrix) -> Result<Matrix> {
    assert_eq!(a.rows(), a.cols(), "invert_matrix: matrix must be square");
    let n = a.rows();
    let mut m = a.data.clone();
    let mut inv = Matrix::identity(n).data;
    let pivot_tol = f64::EPSILON * (n as f64) * a.max_abs().max(1.0);

    for k in 0..n {
        let mut p = k;
        let mut pmax = m[k * n + k].abs();
        for i in (k + 1)..n {
            let v = m[i * n + k].abs();
            if v > pmax {
                pmax = v;
                p = i;
            }
        }
        if pmax <= pivot_tol {
            return Err(Error::SingularOperator);
        }
        if p != k {
            for j in 0..n {
                m.swap(k * n + j, p * n + j);
                inv.swap(k * n + j, p * n + j);
            }
        }
        let pivot = m[k * n + k];
        for j in 0..n {
            m[k * n + j] /= pivot;
            inv[k * n + j] /= pivot;
        }
        for i in 0..n {
            if i == k {
                continue;
            }
            let factor = m[i * n + k];
            if factor == 0.0 {
                continue;
            }
            for j in 0..n {
                m[i * n + j] -= factor * m[k * n + j];
                inv[i * n + j] -= factor * inv[k * n + j];
            }
        }
    }
    Matrix::new(n, n, inv)
}

/// Eigenvalues of a symmetric matrix, ascending, by cyclic Jacobi rotations.
pub fn symmetric_eigenvalues(m: &Matrix) -> Vec<f64> {
    assert_eq!(
        m.rows(),
        m.cols(),
        "symmetric_eigenvalues: matrix must be square"
    );
    let n = m.rows();
    let mut a = m.data.clone();
    let scale = m.max_abs().max(1.0);

    for _sweep in 0..100 {
        let mut off = 0.0f64;
        for i in 0..n {
            for j in (i + 1)..n {
                off += a[i * n + j] * a[i * n + j];
            }
        }
        if off.sqrt() <= 1e-15 * scale {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[p * n + q];
                if apq.abs() <= 1e-300 {
                    continue;
                }
                let app = a[p * n + p];
                let aqq = a[q * n + q];
                let tau = (aqq - app) / (2.0 * apq);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
            }
        }
    }
    let mut eigs: Vec<f64> = (0..n).map(|i| a[i * n + i]).collect();
    eigs.sort_by(|x, y| x.partial_cmp(y).unwrap());
    eigs
}
