//! Shared helpers for the integration suites: random sets, operators and
//! problem instances that do not need known solutions or certificates.
#![allow(dead_code)] // each test target uses a different subset

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use splitqvi::{ConvexSet, GMap, Matrix, MovingSet, OperatorModel, ProblemSpec, Vector};

pub fn random_vector(rng: &mut ChaCha8Rng, n: usize, lo: f64, hi: f64) -> Vector {
    Vector::from_fn(n, |_| rng.random_range(lo..hi))
}

/// One convex set of each supported variant.
pub fn random_set(rng: &mut ChaCha8Rng, variant: usize, dim: usize) -> ConvexSet {
    match variant {
        0 => ConvexSet::whole_space(dim),
        1 => {
            let a = random_vector(rng, dim, -2.0, 2.0);
            let b = random_vector(rng, dim, -2.0, 2.0);
            ConvexSet::box_set(
                Vector::from_fn(dim, |i| a[i].min(b[i])),
                Vector::from_fn(dim, |i| a[i].max(b[i])),
            )
            .unwrap()
        }
        2 => ConvexSet::ball(
            random_vector(rng, dim, -2.0, 2.0),
            rng.random_range(0.1..3.0),
        )
        .unwrap(),
        3 => {
            let mut n = random_vector(rng, dim, -1.0, 1.0);
            if n.norm() < 1e-3 {
                n = Vector::from_fn(dim, |i| if i == 0 { 1.0 } else { 0.0 });
            }
            ConvexSet::halfspace(n, rng.random_range(-1.0..1.0)).unwrap()
        }
        _ => {
            let k = rng.random_range(1..=dim);
            let mut basis = Matrix::zeros(dim, k);
            for j in 0..k {
                for i in 0..dim {
                    basis.set(i, j, rng.random_range(-1.0..1.0));
                }
                basis.set(j, j, basis.get(j, j) + 2.0);
            }
            ConvexSet::affine_set(basis, random_vector(rng, dim, -1.0, 1.0)).unwrap()
        }
    }
}

pub fn random_moving_set(rng: &mut ChaCha8Rng, dim: usize, fixed: bool) -> MovingSet {
    let variant = rng.random_range(0..5);
    let base = random_set(rng, variant, dim);
    if fixed {
        MovingSet::fixed(base)
    } else {
        let l = rng.random_range(0.0..0.15);
        MovingSet::new(base, OperatorModel::scaling(dim, l).unwrap()).unwrap()
    }
}

/// Affine outer map μI + skew with a random offset.
pub fn random_outer_map(rng: &mut ChaCha8Rng, dim: usize) -> OperatorModel {
    let mu = rng.random_range(0.6..1.8);
    let mut m = Matrix::zeros(dim, dim);
    for i in 0..dim {
        for j in (i + 1)..dim {
            let v = rng.random_range(-0.2..0.2) * mu;
            m.set(i, j, v);
            m.set(j, i, -v);
        }
        m.set(i, i, mu);
    }
    OperatorModel::affine(m, random_vector(rng, dim, -0.5, 0.5)).unwrap()
}

pub fn random_inner_map(rng: &mut ChaCha8Rng, dim: usize, identity: bool) -> GMap {
    if identity {
        return GMap::identity(dim);
    }
    match rng.random_range(0..2u32) {
        0 => GMap::new(OperatorModel::scaling(dim, rng.random_range(1.0..1.5)).unwrap()).unwrap(),
        _ => {
            let d = rng.random_range(1.0..1.5);
            let mut m = Matrix::zeros(dim, dim);
            for i in 0..dim {
                for j in (i + 1)..dim {
                    let v = rng.random_range(-0.15..0.15);
                    m.set(i, j, v);
                    m.set(j, i, -v);
                }
                m.set(i, i, d);
            }
            GMap::new(OperatorModel::affine(m, Vector::zeros(dim)).unwrap()).unwrap()
        }
    }
}

/// A structurally random instance; no known solution attached.
pub fn random_problem(
    rng: &mut ChaCha8Rng,
    n1: usize,
    n2: usize,
    identity_g: bool,
    fixed_sets: bool,
) -> ProblemSpec {
    let a = Matrix::new(
        n2,
        n1,
        (0..n1 * n2).map(|_| rng.random_range(-0.7..0.7)).collect(),
    )
    .unwrap();
    ProblemSpec::new(
        a,
        random_moving_set(rng, n1, fixed_sets),
        random_moving_set(rng, n2, fixed_sets),
        random_outer_map(rng, n1),
        random_outer_map(rng, n2),
        random_inner_map(rng, n1, identity_g),
        random_inner_map(rng, n2, identity_g),
    )
    .unwrap()
}
