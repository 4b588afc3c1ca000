//! Projectable convex sets and moving sets.
//!
//! Each set variant carries an exact metric projection: the unique nearest
//! point in the set, satisfying the variational characterization
//! ⟨z − P(z), c − P(z)⟩ ≤ 0 for every member c. A moving set is a fixed base
//! set translated by a Lipschitz map, C(x) = m(x) + C, which is the one
//! family with a constructive constant ν for the projection-shift bound
//! ‖P_{C(x)}(z) − P_{C(y)}(z)‖ ≤ ν‖x − y‖: translation invariance of the
//! projection plus nonexpansiveness give ν = 2·Lip(m).

use rand::Rng;

use crate::error::{Error, Result};
use crate::linalg::{Matrix, Vector};
use crate::operators::OperatorModel;

/// Orthonormalizes the columns by modified Gram-Schmidt with one
/// reorthogonalization pass. Returns `None` when the columns are
/// (numerically) dependent.
fn orthonormal_columns(basis: &Matrix) -> Option<Matrix> {
    let (n, k) = (basis.rows(), basis.cols());
    let mut cols: Vec<Vector> = (0..k)
        .map(|j| Vector::from_fn(n, |i| basis.get(i, j)))
        .collect();
    let scale = basis.max_abs().max(1.0);
    for j in 0..k {
        for _ in 0..2 {
            for l in 0..j {
                let proj = cols[l].dot(&cols[j]);
                cols[j] = cols[j].axpy(-proj, &cols[l]);
            }
        }
        let norm = cols[j].norm();
        if norm <= 1e-12 * scale {
            return None;
        }
        cols[j] = cols[j].scale(1.0 / norm);
    }
    let mut q = Matrix::zeros(n, k);
    for (j, col) in cols.iter().enumerate() {
        for i in 0..n {
            q.set(i, j, col[i]);
        }
    }
    Some(q)
}

/// A nonempty, closed, convex subset of ℝⁿ.
#[derive(Debug, Clone, PartialEq)]
pub enum ConvexSet {
    WholeSpace {
        dim: usize,
    },
    Box {
        lower: Vector,
        upper: Vector,
    },
    Ball {
        center: Vector,
        radius: f64,
    },
    /// { x : ⟨normal, x⟩ ≤ offset }
    Halfspace {
        normal: Vector,
        offset: f64,
    },
    /// { point + basis·t : t ∈ ℝᵏ }, basis columns independent.
    Affine {
        basis: Matrix,
        point: Vector,
    },
}

impl ConvexSet {
    pub fn whole_space(dim: usize) -> Self {
        ConvexSet::WholeSpace { dim }
    }

    pub fn box_set(lower: Vector, upper: Vector) -> Result<Self> {
        if lower.dim() != upper.dim() {
            return Err(Error::DimensionMismatch {
                expected: lower.dim(),
                got: upper.dim(),
            });
        }
        if lower
            .as_slice()
            .iter()
            .zip(upper.as_slice())
            .any(|(l, u)| l > u)
        {
            return Err(Error::InvalidSet(
                "box needs lower ≤ upper componentwise".into(),
            ));
        }
        Ok(ConvexSet::Box { lower, upper })
    }

    pub fn ball(center: Vector, radius: f64) -> Result<Self> {
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(Error::InvalidSet("ball needs radius > 0".into()));
        }
        Ok(ConvexSet::Ball { center, radius })
    }

    pub fn halfspace(normal: Vector, offset: f64) -> Result<Self> {
        if normal.norm() == 0.0 {
            return Err(Error::InvalidSet("halfspace needs a nonzero normal".into()));
        }
        if !offset.is_finite() {
            return Err(Error::NonFinite);
        }
        Ok(ConvexSet::Halfspace { normal, offset })
    }

    pub fn affine_set(basis: Matrix, point: Vector) -> Result<Self> {
        if basis.rows() != point.dim() {
            return Err(Error::DimensionMismatch {
                expected: point.dim(),
                got: basis.rows(),
            });
        }
        if basis.cols() == 0 || basis.cols() > basis.rows() {
            return Err(Error::InvalidSet(
                "affine set basis must have 1..=dim columns".into(),
            ));
        }
        if orthonormal_columns(&basis).is_none() {
            return Err(Error::InvalidSet(
                "affine set basis columns are dependent".into(),
            ));
        }
        Ok(ConvexSet::Affine { basis, point })
    }

    pub fn dim(&self) -> usize {
        match self {
            ConvexSet::WholeSpace { dim } => *dim,
            ConvexSet::Box { lower, .. } => lower.dim(),
            ConvexSet::Ball { center, .. } => center.dim(),
            ConvexSet::Halfspace { normal, .. } => normal.dim(),
            ConvexSet::Affine { point, .. } => point.dim(),
        }
    }

    /// The metric projection of z onto the set.
    pub fn project(&self, z: &Vector) -> Vector {
        assert_eq!(self.dim(), z.dim(), "project: dimension mismatch");
        match self {
            ConvexSet::WholeSpace { .. } => z.clone(),
            ConvexSet::Box { lower, upper } => {
                Vector::from_fn(z.dim(), |i| z[i].max(lower[i]).min(upper[i]))
            }
            ConvexSet::Ball { center, radius } => {
                let d = z - center;
                let dist = d.norm();
                if dist <= *radius {
                    z.clone()
                } else {
                    center.axpy(radius / dist, &d)
                }
            }
            ConvexSet::Halfspace { normal, offset } => {
                let excess = normal.dot(z) - offset;
                if excess <= 0.0 {
                    z.clone()
                } else {
                    z.axpy(-excess / normal.dot(normal), normal)
                }
            }
            ConvexSet::Affine { basis, point } => {
                // Orthonormalizing first keeps the projection accurate for
                // ill-conditioned bases (normal equations would square the
                // condition number).
                let q = orthonormal_columns(basis).expect("validated basis");
                let t = q.adjoint_apply(&(z - point));
                point + &q.apply(&t)
            }
        }
    }

    /// Distance-based membership test.
    pub fn contains(&self, z: &Vector, tol: f64) -> bool {
        (&self.project(z) - z).norm() <= tol
    }

    /// A random member of the set. Used for probing variational
    /// characterizations, not for uniform sampling.
    pub fn sample_point(&self, rng: &mut impl Rng) -> Vector {
        match self {
            ConvexSet::WholeSpace { dim } => Vector::from_fn(*dim, |_| rng.random_range(-2.0..2.0)),
            ConvexSet::Box { lower, upper } => Vector::from_fn(lower.dim(), |i| {
                if lower[i] == upper[i] {
                    lower[i]
                } else {
                    rng.random_range(lower[i]..upper[i])
                }
            }),
            ConvexSet::Ball { center, radius } => {
                let dim = center.dim();
                let mut dir = Vector::from_fn(dim, |_| rng.random_range(-1.0..1.0));
                let n = dir.norm();
                if n == 0.0 {
                    return center.clone();
                }
                dir = dir.scale(1.0 / n);
                let u: f64 = rng.random_range(0.0..1.0);
                center.axpy(radius * u.powf(1.0 / dim as f64), &dir)
            }
            ConvexSet::Halfspace { normal, offset } => {
                let y = Vector::from_fn(normal.dim(), |_| rng.random_range(-2.0..2.0));
                let excess = normal.dot(&y) - offset;
                if excess <= 0.0 {
                    y
                } else {
                    // Reflect across the boundary hyperplane.
                    y.axpy(-2.0 * excess / normal.dot(normal), normal)
                }
            }
            ConvexSet::Affine { basis, point } => {
                let t = Vector::from_fn(basis.cols(), |_| rng.random_range(-2.0..2.0));
                point + &basis.apply(&t)
            }
        }
    }
}

/// A moving constraint set C(x) = m(x) + C.
#[derive(Debug, Clone, PartialEq)]
pub struct MovingSet {
    base: ConvexSet,
    translation: OperatorModel,
}

impl MovingSet {
    pub fn new(base: ConvexSet, translation: OperatorModel) -> Result<Self> {
        if base.dim() != translation.dim() {
            return Err(Error::DimensionMismatch {
                expected: base.dim(),
                got: translation.dim(),
            });
        }
        Ok(Self { base, translation })
    }

    /// A fixed set, i.e. a moving set with the zero translation map.
    pub fn fixed(base: ConvexSet) -> Self {
        let dim = base.dim();
        Self {
            base,
            translation: OperatorModel::zero(dim),
        }
    }

    pub fn base(&self) -> &ConvexSet {
        &self.base
    }

    pub fn translation(&self) -> &OperatorModel {
        &self.translation
    }

    pub fn dim(&self) -> usize {
        self.base.dim()
    }

    pub fn is_fixed(&self) -> bool {
        self.translation.lipschitz() == 0.0
    }

    /// P_{C(x)}(z) = m(x) + P_C(z − m(x)).
    pub fn project(&self, x: &Vector, z: &Vector) -> Vector {
        let shift = self.translation.eval(x);
        &shift + &self.base.project(&(z - &shift))
    }

    /// A certified constant for ‖P_{C(x)}(z) − P_{C(y)}(z)‖ ≤ ν‖x − y‖.
    ///
    /// For the translated family, P_{m(x)+C}(z) = m(x) + P_C(z − m(x)) and
    /// nonexpansiveness of P_C give the bound with ν = 2·Lip(m). The bound is
    /// valid but not necessarily tight.
    pub fn certified_nu(&self) -> f64 {
        2.0 * self.translation.lipschitz()
    }

    pub fn contains_at(&self, x: &Vector, z: &Vector, tol: f64) -> bool {
        (&self.project(x, z) - z).norm() <= tol
    }

    /// A random member of C(x).
    pub fn sample_point_at(&self, x: &Vector, rng: &mut impl Rng) -> Vector {
        &self.translation.eval(x) + &self.base.sample_point(rng)
    }
}
