//! Random problem instances with exactly known solutions.
//!
//! Two families. `InteriorZero` picks a solution x* first and builds the
//! outer maps to vanish there, f₁(x) = M₁(x − x*) and f₂(x) = M₂(x − A x*),
//! with the constraint sets arranged so that gᵢ(·) lands strictly inside;
//! both defining inequalities then hold trivially at x* and the residual is
//! zero to machine precision. `BoundarySolution` instead places g₁(x*) on a
//! box face and points f₁(x*) inward along that face's normal, so the
//! first-stage inequality is tight rather than slack; the construction is
//! verified by sampled probes of the variational characterization.
//!
//! Drawn parameters stay inside ranges for which the convergence
//! certificate is expected to hold; an attempt that fails certification is
//! redrawn. Generation is deterministic in the seed.

use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::analysis::{certify_problem, CertifyMode, ConstantsBundle};
use crate::error::{Error, Result};
use crate::linalg::{Matrix, Vector};
use crate::operators::{GMap, OperatorModel};
use crate::sets::{ConvexSet, MovingSet};
use crate::solver::{verify_solution_sampled, ProblemSpec, SolverParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    InteriorZero,
    BoundarySolution,
}

impl FromStr for Family {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "interior-zero" | "interior_zero" => Ok(Family::InteriorZero),
            "boundary-solution" | "boundary_solution" => Ok(Family::BoundarySolution),
            other => Err(Error::InvalidParams(format!(
                "unknown family {other:?} (expected interior-zero or boundary-solution)"
            ))),
        }
    }
}

#[derive(Debug, Clone)]
pub struct GeneratorConfig {
    pub n1: usize,
    pub n2: usize,
    pub seed: u64,
    pub family: Family,
    /// Range of the scale μ of the outer maps' symmetric parts.
    pub f_scale: (f64, f64),
    /// Cap on the relative skew added to the outer maps.
    pub f_skew_max: f64,
    /// Range of the inner-map scale d; values stay ≥ 1.
    pub g_scale: (f64, f64),
    /// Cap on the Lipschitz constant of moving-set translations (ν = 2L).
    pub translation_lipschitz_max: f64,
    /// Target range for ‖A‖.
    pub coupling_norm: (f64, f64),
    /// Largest accepted certified contraction factor θ.
    pub theta_cap: f64,
    pub max_attempts: usize,
}

impl GeneratorConfig {
    pub fn new(n1: usize, n2: usize, seed: u64, family: Family) -> Self {
        Self {
            n1,
            n2,
            seed,
            family,
            f_scale: (0.6, 1.8),
            f_skew_max: 0.2,
            g_scale: (1.0, 1.5),
            translation_lipschitz_max: 0.08,
            coupling_norm: (0.5, 2.0),
            theta_cap: 0.95,
            max_attempts: 64,
        }
    }
}

fn uniform(rng: &mut ChaCha8Rng, range: (f64, f64)) -> f64 {
    if range.0 == range.1 {
        range.0
    } else {
        rng.random_range(range.0..range.1)
    }
}

fn random_vector(rng: &mut ChaCha8Rng, n: usize, lo: f64, hi: f64) -> Vector {
    Vector::from_fn(n, |_| rng.random_range(lo..hi))
}

/// A skew-symmetric matrix with operator norm at most `max_norm`.
fn skew_matrix(rng: &mut ChaCha8Rng, n: usize, max_norm: f64) -> Matrix {
    let mut k = Matrix::zeros(n, n);
    for i in 0..n {
        for j in (i + 1)..n {
            let v = rng.random_range(-1.0..1.0);
            k.set(i, j, v);
            k.set(j, i, -v);
        }
    }
    let norm = k.operator_norm();
    if norm > 0.0 {
        k = k.scale(max_norm / norm * rng.random_range(0.0..1.0));
    }
    k
}

/// Linear part μI + K of an outer map; the skew part K cancels in the
/// symmetric part, keeping the certified constants predictable.
fn outer_linear_part(rng: &mut ChaCha8Rng, n: usize, cfg: &GeneratorConfig) -> Matrix {
    let mu = uniform(rng, cfg.f_scale);
    let k = skew_matrix(rng, n, cfg.f_skew_max * mu);
    let mut m = k;
    for i in 0..n {
        m.set(i, i, m.get(i, i) + mu);
    }
    m
}

fn inner_map(rng: &mut ChaCha8Rng, n: usize, cfg: &GeneratorConfig) -> GMap {
    match rng.random_range(0..3u32) {
        0 => GMap::identity(n),
        1 => {
            let d = uniform(rng, cfg.g_scale);
            GMap::new(OperatorModel::scaling(n, d).expect("finite")).expect("d ≥ 1")
        }
        _ => {
            let d = uniform(rng, cfg.g_scale);
            let mut m = skew_matrix(rng, n, 0.2 * d);
            for i in 0..n {
                m.set(i, i, m.get(i, i) + d);
            }
            GMap::new(OperatorModel::affine(m, Vector::zeros(n)).expect("square"))
                .expect("sym part = dI ≥ I")
        }
    }
}

fn translation_map(rng: &mut ChaCha8Rng, n: usize, cfg: &GeneratorConfig) -> OperatorModel {
    if cfg.translation_lipschitz_max == 0.0 || rng.random_range(0..2u32) == 0 {
        OperatorModel::zero(n)
    } else {
        let l = rng.random_range(0.0..cfg.translation_lipschitz_max);
        OperatorModel::scaling(n, l).expect("finite")
    }
}

/// A base set containing `p`, strictly in the interior for the variants
/// where that is meaningful.
fn base_set_containing(rng: &mut ChaCha8Rng, p: &Vector) -> ConvexSet {
    let n = p.dim();
    match rng.random_range(0..5u32) {
        0 => ConvexSet::whole_space(n),
        1 => {
            let lower = Vector::from_fn(n, |i| p[i] - rng.random_range(0.5..2.0));
            let upper = Vector::from_fn(n, |i| p[i] + rng.random_range(0.5..2.0));
            ConvexSet::box_set(lower, upper).expect("ordered bounds")
        }
        2 => {
            let radius = rng.random_range(1.0..3.0);
            let mut dir = random_vector(rng, n, -1.0, 1.0);
            let norm = dir.norm();
            if norm > 0.0 {
                dir = dir.scale(rng.random_range(0.0..0.5) * radius / norm);
            }
            ConvexSet::ball(p + &dir, radius).expect("radius > 0")
        }
        3 => {
            let mut normal = random_vector(rng, n, -1.0, 1.0);
            if normal.norm() < 0.2 {
                normal = Vector::from_fn(n, |i| if i == 0 { 1.0 } else { 0.0 });
            }
            let offset = normal.dot(p) + rng.random_range(0.5..2.0);
            ConvexSet::halfspace(normal, offset).expect("nonzero normal")
        }
        _ => {
            let k = rng.random_range(1..=n);
            let mut basis = Matrix::zeros(n, k);
            for j in 0..k {
                for i in 0..n {
                    basis.set(i, j, rng.random_range(-1.0..1.0));
                }
                basis.set(j, j, basis.get(j, j) + 2.0);
            }
            ConvexSet::affine_set(basis, p.clone()).expect("independent columns")
        }
    }
}

fn coupling_matrix(rng: &mut ChaCha8Rng, n2: usize, n1: usize, cfg: &GeneratorConfig) -> Matrix {
    loop {
        let a = Matrix::new(
            n2,
            n1,
            (0..n1 * n2).map(|_| rng.random_range(-1.0..1.0)).collect(),
        )
        .expect("finite entries");
        let norm = a.operator_norm();
        if norm > 1e-6 {
            return a.scale(uniform(rng, cfg.coupling_norm) / norm);
        }
    }
}

/// Generates an instance of the requested family, retrying draws until the
/// convergence certificate accepts it.
pub fn generate(cfg: &GeneratorConfig) -> Result<ProblemSpec> {
    if cfg.n1 == 0 || cfg.n2 == 0 {
        return Err(Error::Generation("dimensions must be at least 1".into()));
    }
    if cfg.g_scale.0 < 1.0 {
        return Err(Error::Generation(
            "inner-map scale range must stay ≥ 1".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    for _ in 0..cfg.max_attempts {
        if let Some(spec) = attempt(cfg, &mut rng)? {
            return Ok(spec);
        }
    }
    Err(Error::Generation(format!(
        "no certifiable instance found in {} attempts; the constant ranges are likely infeasible",
        cfg.max_attempts
    )))
}

fn attempt(cfg: &GeneratorConfig, rng: &mut ChaCha8Rng) -> Result<Option<ProblemSpec>> {
    let (n1, n2) = (cfg.n1, cfg.n2);
    let x_star = random_vector(rng, n1, -1.0, 1.0);
    let a = coupling_matrix(rng, n2, n1, cfg);
    let ax_star = a.apply(&x_star);

    let g1 = inner_map(rng, n1, cfg);
    let g2 = inner_map(rng, n2, cfg);

    // Outer maps vanish at the solution; the boundary family adds an inward
    // push along a box-face normal on the first stage.
    let m1_lin = outer_linear_part(rng, n1, cfg);
    let m2_lin = outer_linear_part(rng, n2, cfg);
    let g1_at_star = g1.eval(&x_star);
    let g2_at_star = g2.eval(&ax_star);

    let (f1, c1) = match cfg.family {
        Family::InteriorZero => {
            let f1 = OperatorModel::affine(m1_lin.clone(), m1_lin.apply(&x_star).scale(-1.0))?;
            let m1 = translation_map(rng, n1, cfg);
            let p1 = &g1_at_star - &m1.eval(&x_star);
            (f1, MovingSet::new(base_set_containing(rng, &p1), m1)?)
        }
        Family::BoundarySolution => {
            let face = rng.random_range(0..n1);
            let push = rng.random_range(0.2..1.0);
            // f1(x*) = −push·e_face, the inward normal of the upper face.
            let mut offset = m1_lin.apply(&x_star).scale(-1.0).into_vec();
            offset[face] -= push;
            let f1 = OperatorModel::affine(m1_lin.clone(), Vector::new(offset)?)?;
            let lower = Vector::from_fn(n1, |i| g1_at_star[i] - rng.random_range(0.5..2.0));
            let upper = Vector::from_fn(n1, |i| {
                if i == face {
                    g1_at_star[i]
                } else {
                    g1_at_star[i] + rng.random_range(0.5..2.0)
                }
            });
            let c1 = MovingSet::fixed(ConvexSet::box_set(lower, upper)?);
            (f1, c1)
        }
    };

    let f2 = OperatorModel::affine(m2_lin.clone(), m2_lin.apply(&ax_star).scale(-1.0))?;
    let m2 = translation_map(rng, n2, cfg);
    let p2 = &g2_at_star - &m2.eval(&ax_star);
    let c2 = MovingSet::new(base_set_containing(rng, &p2), m2)?;

    let spec = ProblemSpec::new(a, c1, c2, f1, f2, g1, g2)?;
    let bundle = ConstantsBundle::from_problem(&spec);
    if bundle.beta1 == 0.0 || bundle.beta2 == 0.0 {
        return Ok(None);
    }
    let rho1 = bundle.alpha1 / (bundle.beta1 * bundle.beta1) * rng.random_range(0.9..1.1);
    let rho2 = bundle.alpha2 / (bundle.beta2 * bundle.beta2) * rng.random_range(0.7..0.95);
    let gamma = rng.random_range(0.1..0.9) * 2.0 / (bundle.norm_a * bundle.norm_a);
    let params = SolverParams::new(rho1, rho2, gamma);

    let cert = certify_problem(&spec, &params, CertifyMode::Standard);
    let theta_ok = cert.theta.is_some_and(|t| t <= cfg.theta_cap);
    if !cert.is_certified() || !theta_ok {
        return Ok(None);
    }

    let spec = match spec
        .with_default_params(params)
        .and_then(|s| s.with_known_solution(x_star.clone()))
    {
        Ok(s) => s,
        Err(_) => return Ok(None),
    };

    // Sampled check of the defining inequalities at the stored solution.
    if verify_solution_sampled(&spec, &x_star, 50, 1e-9, rng).is_err() {
        return Ok(None);
    }
    Ok(Some(spec))
}
