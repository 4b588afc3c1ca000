//! Structured nonlinear maps with certified constants.
//!
//! Every map in the library is affine-realizable (linear part plus offset),
//! which is what makes its strong-monotonicity and Lipschitz constants
//! certifiable rather than merely assumed: α comes from the smallest
//! eigenvalue of the symmetric part of the linear part, β from its largest
//! singular value. The inner maps g of the iteration are wrapped in [`GMap`],
//! which additionally certifies σ (strong monotonicity of g − I) and
//! δ (Lipschitz constant of g) and provides the inversion the scheme needs.

use crate::error::{Error, Result};
use crate::linalg::{lu_solve, symmetric_eigenvalues, Matrix, Vector};

/// Default inner tolerance for the damped fixed-point inversion.
pub const INVERT_TOL: f64 = 1e-12;
/// Iteration cap for the damped fixed-point inversion.
pub const INVERT_MAX_ITERS: usize = 10_000;

/// A map H → H on one of the problem spaces.
#[derive(Debug, Clone, PartialEq)]
pub enum OperatorModel {
    /// x ↦ 0
    Zero { dim: usize },
    /// x ↦ s·x
    Scaling { dim: usize, factor: f64 },
    /// x ↦ x + c
    Translation { shift: Vector },
    /// x ↦ M·x + q
    Affine { matrix: Matrix, offset: Vector },
}

impl OperatorModel {
    pub fn zero(dim: usize) -> Self {
        OperatorModel::Zero { dim }
    }

    pub fn identity(dim: usize) -> Self {
        OperatorModel::Scaling { dim, factor: 1.0 }
    }

    pub fn scaling(dim: usize, factor: f64) -> Result<Self> {
        if !factor.is_finite() {
            return Err(Error::NonFinite);
        }
        Ok(OperatorModel::Scaling { dim, factor })
    }

    pub fn translation(shift: Vector) -> Self {
        OperatorModel::Translation { shift }
    }

    pub fn affine(matrix: Matrix, offset: Vector) -> Result<Self> {
        if matrix.rows() != matrix.cols() {
            return Err(Error::InvalidOperator(
                "affine map must have a square matrix".into(),
            ));
        }
        if matrix.rows() != offset.dim() {
            return Err(Error::DimensionMismatch {
                expected: matrix.rows(),
                got: offset.dim(),
            });
        }
        Ok(OperatorModel::Affine { matrix, offset })
    }

    pub fn dim(&self) -> usize {
        match self {
            OperatorModel::Zero { dim } | OperatorModel::Scaling { dim, .. } => *dim,
            OperatorModel::Translation { shift } => shift.dim(),
            OperatorModel::Affine { matrix, .. } => matrix.rows(),
        }
    }

    pub fn eval(&self, x: &Vector) -> Vector {
        assert_eq!(self.dim(), x.dim(), "eval: dimension mismatch");
        match self {
            OperatorModel::Zero { dim } => Vector::zeros(*dim),
            OperatorModel::Scaling { factor, .. } => x.scale(*factor),
            OperatorModel::Translation { shift } => x + shift,
            OperatorModel::Affine { matrix, offset } => &matrix.apply(x) + offset,
        }
    }

    /// The linear part of the map (the map itself minus its value at 0).
    pub fn linear_part(&self) -> Matrix {
        match self {
            OperatorModel::Zero { dim } => Matrix::zeros(*dim, *dim),
            OperatorModel::Scaling { dim, factor } => Matrix::identity(*dim).scale(*factor),
            OperatorModel::Translation { shift } => Matrix::identity(shift.dim()),
            OperatorModel::Affine { matrix, .. } => matrix.clone(),
        }
    }

    pub fn offset_part(&self) -> Vector {
        match self {
            OperatorModel::Zero { dim } => Vector::zeros(*dim),
            OperatorModel::Scaling { dim, .. } => Vector::zeros(*dim),
            OperatorModel::Translation { shift } => shift.clone(),
            OperatorModel::Affine { offset, .. } => offset.clone(),
        }
    }

    /// Certified Lipschitz constant β (largest singular value of the linear part).
    pub fn lipschitz(&self) -> f64 {
        match self {
            OperatorModel::Zero { .. } => 0.0,
            OperatorModel::Scaling { factor, .. } => factor.abs(),
            OperatorModel::Translation { .. } => 1.0,
            OperatorModel::Affine { matrix, .. } => matrix.operator_norm(),
        }
    }

    /// Certified strong-monotonicity constant α: the smallest eigenvalue of
    /// the symmetric part of the linear part, clamped at zero.
    pub fn strong_monotonicity(&self) -> f64 {
        match self {
            OperatorModel::Zero { .. } => 0.0,
            OperatorModel::Scaling { factor, .. } => factor.max(0.0),
            OperatorModel::Translation { .. } => 1.0,
            OperatorModel::Affine { matrix, .. } => {
                let eigs = symmetric_eigenvalues(&matrix.symmetric_part());
                eigs.first().copied().unwrap_or(0.0).max(0.0)
            }
        }
    }

    /// (α, β) as certified above.
    pub fn certify_constants(&self) -> (f64, f64) {
        (self.strong_monotonicity(), self.lipschitz())
    }

    pub fn is_identity(&self) -> bool {
        match self {
            OperatorModel::Scaling { factor, .. } => *factor == 1.0,
            OperatorModel::Translation { shift } => shift.is_zero(),
            OperatorModel::Affine { matrix, offset } => matrix.is_identity() && offset.is_zero(),
            OperatorModel::Zero { .. } => false,
        }
    }

    pub fn is_zero_map(&self) -> bool {
        match self {
            OperatorModel::Zero { .. } => true,
            OperatorModel::Scaling { factor, .. } => *factor == 0.0,
            OperatorModel::Affine { matrix, offset } => matrix.max_abs() == 0.0 && offset.is_zero(),
            OperatorModel::Translation { .. } => false,
        }
    }
}

/// Certified constant for ⟨f(x)−f(y), g(x)−g(y)⟩ ≥ α‖x−y‖²: the smallest
/// eigenvalue of the symmetric part of D_gᵀ·M_f, clamped at zero. With
/// g = identity this reduces to plain strong monotonicity of f.
pub fn certify_relative(f: &OperatorModel, g: &GMap) -> f64 {
    assert_eq!(f.dim(), g.dim(), "certify_relative: dimension mismatch");
    let m_f = f.linear_part();
    let d_g = g.op().linear_part();
    let prod = d_g.transpose().matmul(&m_f);
    let eigs = symmetric_eigenvalues(&prod.symmetric_part());
    eigs.first().copied().unwrap_or(0.0).max(0.0)
}

/// An inner map g of the iteration, with certified σ (strong monotonicity of
/// g − I) and δ (Lipschitz constant of g). Construction requires the
/// symmetric part of the linear part to dominate the identity, which makes
/// g (1+σ)-strongly monotone and therefore invertible.
#[derive(Debug, Clone, PartialEq)]
pub struct GMap {
    op: OperatorModel,
    sigma: f64,
    delta: f64,
}

impl GMap {
    pub fn new(op: OperatorModel) -> Result<Self> {
        if op.is_zero_map() {
            return Err(Error::InvalidOperator("zero map is not invertible".into()));
        }
        let d = op.linear_part();
        let lambda_min = symmetric_eigenvalues(&d.symmetric_part())
            .first()
            .copied()
            .unwrap_or(0.0);
        if lambda_min < 1.0 - 1e-9 {
            return Err(Error::InvalidOperator(format!(
                "g − I must be strongly monotone: λ_min(sym(D)) = {lambda_min} < 1"
            )));
        }
        let sigma = (lambda_min - 1.0).max(0.0);
        let delta = op.lipschitz();
        Ok(Self { op, sigma, delta })
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            op: OperatorModel::identity(dim),
            sigma: 0.0,
            delta: 1.0,
        }
    }

    pub fn op(&self) -> &OperatorModel {
        &self.op
    }

    pub fn dim(&self) -> usize {
        self.op.dim()
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn eval(&self, x: &Vector) -> Vector {
        self.op.eval(x)
    }

    pub fn is_identity(&self) -> bool {
        self.op.is_identity()
    }

    /// Solves g(y) = target exactly (up to factorization roundoff) using the
    /// structure of the map.
    pub fn invert(&self, target: &Vector) -> Result<Vector> {
        assert_eq!(self.dim(), target.dim(), "invert: dimension mismatch");
        match &self.op {
            OperatorModel::Zero { .. } => Err(Error::SingularOperator),
            OperatorModel::Scaling { factor, .. } => {
                if *factor == 0.0 {
                    Err(Error::SingularOperator)
                } else {
                    Ok(target.scale(1.0 / factor))
                }
            }
            OperatorModel::Translation { shift } => Ok(target - shift),
            OperatorModel::Affine { matrix, offset } => lu_solve(matrix, &(target - offset)),
        }
    }

    /// Solves g(y) = target by the damped fixed-point iteration
    /// y ← y − τ(g(y) − target) with τ = (1+σ)/δ², which contracts at rate
    /// √(1 − (1+σ)²/δ²) for a (1+σ)-strongly monotone, δ-Lipschitz map.
    /// Touches the map only through evaluation.
    pub fn invert_fixed_point(
        &self,
        target: &Vector,
        tol: f64,
        max_iters: usize,
    ) -> Result<Vector> {
        assert_eq!(
            self.dim(),
            target.dim(),
            "invert_fixed_point: dimension mismatch"
        );
        invert_strongly_monotone(
            |y| self.eval(y),
            1.0 + self.sigma,
            self.delta,
            target,
            tol,
            max_iters,
        )
    }
}

/// Damped fixed-point solver for g(y) = target, for any map known to be
/// `mu`-strongly monotone and `lip`-Lipschitz.
pub fn invert_strongly_monotone(
    g: impl Fn(&Vector) -> Vector,
    mu: f64,
    lip: f64,
    target: &Vector,
    tol: f64,
    max_iters: usize,
) -> Result<Vector> {
    assert!(
        mu > 0.0 && lip >= mu,
        "invert_strongly_monotone: need 0 < mu ≤ lip"
    );
    let tau = mu / (lip * lip);
    let mut y = target.clone();
    let mut last = f64::INFINITY;
    for _ in 0..max_iters {
        let r = &g(&y) - target;
        last = r.norm();
        if last <= tol {
            return Ok(y);
        }
        y = y.axpy(-tau, &r);
    }
    Err(Error::NoConvergence {
        max_iters,
        last_error: last,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn rand_vec(rng: &mut ChaCha8Rng, n: usize) -> Vector {
        Vector::from_fn(n, |_| rng.random_range(-3.0..3.0))
    }

    #[test]
    fn evaluate_examples() {
        let x = Vector::from_slice(&[1.0, 2.0]);
        assert_eq!(OperatorModel::zero(2).eval(&x), Vector::zeros(2));

        let twice =
            OperatorModel::affine(Matrix::identity(2).scale(2.0), Vector::zeros(2)).unwrap();
        assert_eq!(twice.eval(&x), Vector::from_slice(&[2.0, 4.0]));

        let m = Matrix::from_rows(&[vec![2.0, 1.0], vec![0.0, 2.0]]).unwrap();
        let op = OperatorModel::affine(m, Vector::from_slice(&[1.0, 0.0])).unwrap();
        assert_eq!(
            op.eval(&Vector::from_slice(&[1.0, 1.0])),
            Vector::from_slice(&[4.0, 2.0])
        );
    }

    #[test]
    fn certify_constants_examples() {
        let twice =
            OperatorModel::affine(Matrix::identity(2).scale(2.0), Vector::zeros(2)).unwrap();
        let (a, b) = twice.certify_constants();
        assert!((a - 2.0).abs() < 1e-12 && (b - 2.0).abs() < 1e-10);

        let m = Matrix::from_rows(&[vec![2.0, 1.0], vec![0.0, 2.0]]).unwrap();
        let op = OperatorModel::affine(m, Vector::zeros(2)).unwrap();
        let (a, b) = op.certify_constants();
        assert!((a - 1.5).abs() < 1e-10);
        let want_b = ((9.0 + 17.0f64.sqrt()) / 2.0).sqrt();
        assert!((b - want_b).abs() < 1e-10);

        // Rotation by 90°: no strong monotonicity, unit Lipschitz.
        let rot = Matrix::from_rows(&[vec![0.0, -1.0], vec![1.0, 0.0]]).unwrap();
        let op = OperatorModel::affine(rot, Vector::zeros(2)).unwrap();
        let (a, b) = op.certify_constants();
        assert_eq!(a, 0.0);
        assert!((b - 1.0).abs() < 1e-10);
    }

    #[test]
    fn certify_relative_examples() {
        // g = I reduces to plain strong monotonicity.
        let m = Matrix::from_rows(&[vec![2.0, 1.0], vec![0.0, 2.0]]).unwrap();
        let f = OperatorModel::affine(m, Vector::zeros(2)).unwrap();
        let g = GMap::identity(2);
        assert!((certify_relative(&f, &g) - f.strong_monotonicity()).abs() < 1e-10);

        // f = 2I, g = 3I: symmetric part of 3I·2I = 6I.
        let f = OperatorModel::scaling(2, 2.0).unwrap();
        let g = GMap::new(OperatorModel::scaling(2, 3.0).unwrap()).unwrap();
        assert!((certify_relative(&f, &g) - 6.0).abs() < 1e-12);

        // Zero map has no monotonicity.
        let f = OperatorModel::zero(2);
        assert_eq!(certify_relative(&f, &g), 0.0);
    }

    #[test]
    fn invert_examples() {
        let t = Vector::from_slice(&[3.0, 3.0]);

        let g = GMap::identity(2);
        assert_eq!(g.invert(&t).unwrap(), t);

        let g = GMap::new(
            OperatorModel::affine(
                Matrix::identity(2).scale(2.0),
                Vector::from_slice(&[1.0, 1.0]),
            )
            .unwrap(),
        )
        .unwrap();
        let y = g.invert(&t).unwrap();
        assert!((&y - &Vector::from_slice(&[1.0, 1.0])).norm() < 1e-12);

        let shift = Vector::from_slice(&[0.5, -0.5]);
        let g = GMap::new(OperatorModel::translation(shift.clone())).unwrap();
        assert_eq!(g.invert(&t).unwrap(), &t - &shift);
    }

    #[test]
    fn gmap_rejects_non_monotone() {
        assert!(GMap::new(OperatorModel::zero(2)).is_err());
        assert!(GMap::new(OperatorModel::scaling(2, 0.5).unwrap()).is_err());
        let m = Matrix::from_rows(&[vec![0.9, 0.0], vec![0.0, 2.0]]).unwrap();
        assert!(GMap::new(OperatorModel::affine(m, Vector::zeros(2)).unwrap()).is_err());
    }

    #[test]
    fn affine_rejects_non_square_matrix() {
        let m = Matrix::from_rows(&[vec![1.0, 0.0]]).unwrap();
        assert!(OperatorModel::affine(m, Vector::zeros(1)).is_err());
    }

    #[test]
    fn fixed_point_inversion_reports_non_convergence() {
        let g = GMap::new(OperatorModel::scaling(2, 3.0).unwrap()).unwrap();
        let t = Vector::from_slice(&[5.0, -5.0]);
        let err = invert_strongly_monotone(|y| g.eval(y), 1.0, 100.0, &t, 1e-12, 10).unwrap_err();
        assert!(matches!(
            err,
            crate::error::Error::NoConvergence { max_iters: 10, .. }
        ));
    }

    #[test]
    fn certified_constants_hold_on_samples() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let n = 4;
        let mut m = Matrix::new(
            n,
            n,
            (0..n * n).map(|_| rng.random_range(-1.0..1.0)).collect(),
        )
        .unwrap();
        for i in 0..n {
            m.set(i, i, m.get(i, i) + 2.0);
        }
        let f = OperatorModel::affine(m.clone(), rand_vec(&mut rng, n)).unwrap();
        let (alpha, beta) = f.certify_constants();
        let g = GMap::new(
            OperatorModel::affine(Matrix::identity(n).scale(1.3), Vector::zeros(n)).unwrap(),
        )
        .unwrap();
        let alpha_rel = certify_relative(&f, &g);

        for _ in 0..10_000 {
            let x = rand_vec(&mut rng, n);
            let y = rand_vec(&mut rng, n);
            let d = &x - &y;
            let fd = &f.eval(&x) - &f.eval(&y);
            let gd = &g.eval(&x) - &g.eval(&y);
            assert!(fd.dot(&d) >= alpha * d.dot(&d) - 1e-9);
            assert!(fd.norm() <= beta * d.norm() + 1e-9);
            assert!(fd.dot(&gd) >= alpha_rel * d.dot(&d) - 1e-9);
            assert!(gd.norm() <= g.delta() * d.norm() + 1e-9);
            let gmi = &gd - &d;
            assert!(gmi.dot(&d) >= g.sigma() * d.dot(&d) - 1e-9);
        }
    }

    #[test]
    fn certified_constants_match_rayleigh_oracle() {
        // Maximize/minimize the relevant Rayleigh quotients over many random
        // directions; a certified constant beaten by the sampler is a bug.
        let mut rng = ChaCha8Rng::seed_from_u64(37);
        let n = 3;
        let m = Matrix::from_rows(&[
            vec![2.0, 0.7, -0.3],
            vec![-0.2, 1.5, 0.4],
            vec![0.1, -0.5, 2.5],
        ])
        .unwrap();
        let f = OperatorModel::affine(m.clone(), Vector::zeros(n)).unwrap();
        let (alpha, beta) = f.certify_constants();

        let mut alpha_obs = f64::INFINITY;
        let mut beta_obs = 0.0f64;
        for _ in 0..100_000 {
            let d = rand_vec(&mut rng, n);
            let nd2 = d.dot(&d);
            if nd2 < 1e-12 {
                continue;
            }
            let md = m.apply(&d);
            alpha_obs = alpha_obs.min(md.dot(&d) / nd2);
            beta_obs = beta_obs.max(md.norm() / nd2.sqrt());
        }
        assert!(
            alpha <= alpha_obs + 1e-9,
            "alpha {alpha} beaten by oracle {alpha_obs}"
        );
        assert!(
            beta >= beta_obs - 1e-9,
            "beta {beta} beaten by oracle {beta_obs}"
        );
    }

    #[test]
    fn invert_is_two_sided_inverse() {
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        let n = 5;
        let mut d = Matrix::new(
            n,
            n,
            (0..n * n).map(|_| rng.random_range(-0.2..0.2)).collect(),
        )
        .unwrap();
        for i in 0..n {
            d.set(i, i, d.get(i, i) + 1.6);
        }
        let g = GMap::new(OperatorModel::affine(d, rand_vec(&mut rng, n)).unwrap()).unwrap();
        for _ in 0..200 {
            let t = rand_vec(&mut rng, n);
            let y = g.invert(&t).unwrap();
            assert!((&g.eval(&y) - &t).norm() <= 1e-10);
            let w = rand_vec(&mut rng, n);
            let back = g.invert(&g.eval(&w)).unwrap();
            assert!((&back - &w).norm() <= 1e-10);
        }
    }

    #[test]
    fn fixed_point_inversion_agrees_with_direct() {
        let mut rng = ChaCha8Rng::seed_from_u64(43);
        let n = 4;
        let mut d = Matrix::new(
            n,
            n,
            (0..n * n).map(|_| rng.random_range(-0.15..0.15)).collect(),
        )
        .unwrap();
        for i in 0..n {
            d.set(i, i, d.get(i, i) + 1.4);
        }
        let g = GMap::new(OperatorModel::affine(d, rand_vec(&mut rng, n)).unwrap()).unwrap();
        for _ in 0..50 {
            let t = rand_vec(&mut rng, n);
            let direct = g.invert(&t).unwrap();
            let iterated = g
                .invert_fixed_point(&t, INVERT_TOL, INVERT_MAX_ITERS)
                .unwrap();
            assert!((&direct - &iterated).norm() <= 1e-10);
        }
    }
}
