//! The unified projection iteration for the split problem.
//!
//! One step of the scheme, for relaxation weight αⁿ and parameters
//! ρ₁, ρ₂, γ > 0:
//!
//! ```text
//! yⁿ   = g₁⁻¹( P_{C₁(xⁿ)}( g₁(xⁿ) − ρ₁ f₁(xⁿ) ) )
//! zⁿ   = g₂⁻¹( P_{C₂(A yⁿ)}( g₂(A yⁿ) − ρ₂ f₂(A yⁿ) ) )
//! xⁿ⁺¹ = (1 − αⁿ) xⁿ + αⁿ [ yⁿ + γ A*(zⁿ − A yⁿ) ]
//! ```
//!
//! The residual of a point is the sum of the two fixed-point defects
//! ‖gᵢ(·) − P_{Cᵢ(·)}(gᵢ(·) − ρᵢ fᵢ(·))‖ evaluated at x and A x; it vanishes
//! exactly at solutions, which is the stopping rule. Special cases of the
//! scheme (identity g, fixed sets, trivial second stage) are detected for
//! reporting only; the executed update is always the unified step.

use std::fmt;

use crate::analysis::StepCertificate;
use crate::error::{Error, Result};
use crate::linalg::{Matrix, Vector};
use crate::operators::{GMap, OperatorModel};
use crate::sets::{ConvexSet, MovingSet};

/// Residual bound a stored known solution must satisfy.
pub const KNOWN_SOLUTION_TOL: f64 = 1e-8;

/// Relaxation weights αⁿ ∈ (0,1) with divergent sum.
#[derive(Debug, Clone, PartialEq)]
pub enum AlphaSchedule {
    Constant(f64),
    /// αⁿ = 1/(n+2) for n = 0, 1, 2, …
    Harmonic,
}

impl AlphaSchedule {
    pub fn value(&self, n: usize) -> f64 {
        match self {
            AlphaSchedule::Constant(a) => *a,
            AlphaSchedule::Harmonic => 1.0 / (n as f64 + 2.0),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            AlphaSchedule::Constant(a) if *a > 0.0 && *a < 1.0 => Ok(()),
            AlphaSchedule::Constant(a) => Err(Error::InvalidParams(format!(
                "relaxation weight {a} must lie strictly inside (0, 1)"
            ))),
            AlphaSchedule::Harmonic => Ok(()),
        }
    }
}

impl Default for AlphaSchedule {
    fn default() -> Self {
        AlphaSchedule::Constant(0.5)
    }
}

/// Step parameters and stopping rule for a solve run.
#[derive(Debug, Clone, PartialEq)]
pub struct SolverParams {
    pub rho1: f64,
    pub rho2: f64,
    pub gamma: f64,
    pub schedule: AlphaSchedule,
    pub max_iters: usize,
    pub tol: f64,
}

impl SolverParams {
    pub fn new(rho1: f64, rho2: f64, gamma: f64) -> Self {
        Self {
            rho1,
            rho2,
            gamma,
            schedule: AlphaSchedule::default(),
            max_iters: 10_000,
            tol: 1e-10,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("rho1", self.rho1),
            ("rho2", self.rho2),
            ("gamma", self.gamma),
        ] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::InvalidParams(format!(
                    "{name} must be positive, got {v}"
                )));
            }
        }
        self.schedule.validate()?;
        if self.max_iters == 0 {
            return Err(Error::InvalidParams("max_iters must be at least 1".into()));
        }
        if !(self.tol > 0.0) {
            return Err(Error::InvalidParams("tol must be positive".into()));
        }
        Ok(())
    }

    /// Σ αⁿ over the first `iters` iterations.
    pub fn alpha_sum(&self, iters: usize) -> f64 {
        (0..iters).map(|n| self.schedule.value(n)).sum()
    }
}

/// A full problem instance: two spaces ℝ^{n₁}, ℝ^{n₂}, the coupling map A,
/// moving sets, outer maps f and inner maps g per space.
#[derive(Debug, Clone, PartialEq)]
pub struct ProblemSpec {
    a: Matrix,
    c1: MovingSet,
    c2: MovingSet,
    f1: OperatorModel,
    f2: OperatorModel,
    g1: GMap,
    g2: GMap,
    known_solution: Option<Vector>,
    default_params: Option<SolverParams>,
}

impl ProblemSpec {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        a: Matrix,
        c1: MovingSet,
        c2: MovingSet,
        f1: OperatorModel,
        f2: OperatorModel,
        g1: GMap,
        g2: GMap,
    ) -> Result<Self> {
        let (n1, n2) = (a.cols(), a.rows());
        if n1 == 0 || n2 == 0 {
            return Err(Error::InvalidProblem(
                "dimensions must be at least 1".into(),
            ));
        }
        for (name, dim, want) in [
            ("c1", c1.dim(), n1),
            ("f1", f1.dim(), n1),
            ("g1", g1.dim(), n1),
            ("c2", c2.dim(), n2),
            ("f2", f2.dim(), n2),
            ("g2", g2.dim(), n2),
        ] {
            if dim != want {
                return Err(Error::InvalidProblem(format!(
                    "{name} has dimension {dim}, expected {want}"
                )));
            }
        }
        Ok(Self {
            a,
            c1,
            c2,
            f1,
            f2,
            g1,
            g2,
            known_solution: None,
            default_params: None,
        })
    }

    /// Attaches a known solution; it must actually solve the instance.
    pub fn with_known_solution(mut self, x: Vector) -> Result<Self> {
        if x.dim() != self.dims().0 {
            return Err(Error::DimensionMismatch {
                expected: self.dims().0,
                got: x.dim(),
            });
        }
        let (rho1, rho2) = self.residual_rhos();
        let r = residual(&self, &x, rho1, rho2);
        if r > KNOWN_SOLUTION_TOL {
            return Err(Error::InvalidProblem(format!(
                "known solution has residual {r:e} > {KNOWN_SOLUTION_TOL:e}"
            )));
        }
        self.known_solution = Some(x);
        Ok(self)
    }

    pub fn with_default_params(mut self, params: SolverParams) -> Result<Self> {
        params.validate()?;
        self.default_params = Some(params);
        Ok(self)
    }

    /// (n₁, n₂)
    pub fn dims(&self) -> (usize, usize) {
        (self.a.cols(), self.a.rows())
    }

    pub fn a(&self) -> &Matrix {
        &self.a
    }

    pub fn c1(&self) -> &MovingSet {
        &self.c1
    }

    pub fn c2(&self) -> &MovingSet {
        &self.c2
    }

    pub fn f1(&self) -> &OperatorModel {
        &self.f1
    }

    pub fn f2(&self) -> &OperatorModel {
        &self.f2
    }

    pub fn g1(&self) -> &GMap {
        &self.g1
    }

    pub fn g2(&self) -> &GMap {
        &self.g2
    }

    pub fn known_solution(&self) -> Option<&Vector> {
        self.known_solution.as_ref()
    }

    pub fn default_params(&self) -> Option<&SolverParams> {
        self.default_params.as_ref()
    }

    /// ρ values used for residual evaluation: the instance defaults, else 1.
    /// At a true solution the residual vanishes for every ρ > 0, so the
    /// choice only matters away from solutions.
    pub fn residual_rhos(&self) -> (f64, f64) {
        self.default_params
            .as_ref()
            .map_or((1.0, 1.0), |p| (p.rho1, p.rho2))
    }

    /// True when the second stage cannot move anything: projection onto the
    /// whole space, zero outer map, identity inner map. In that case z = A y
    /// identically and the correction term vanishes.
    pub fn second_stage_vacuous(&self) -> bool {
        matches!(self.c2.base(), ConvexSet::WholeSpace { .. })
            && self.f2.is_zero_map()
            && self.g2.is_identity()
    }
}

/// One iterate of the scheme.
#[derive(Debug, Clone)]
pub struct StepResult {
    pub x_next: Vector,
    pub y: Vector,
    pub z: Vector,
}

/// One step of the unified iteration at relaxation index `n`.
pub fn step(spec: &ProblemSpec, params: &SolverParams, x: &Vector, n: usize) -> Result<StepResult> {
    let alpha = params.schedule.value(n);
    let g1x = spec.g1.eval(x);
    let arg1 = g1x.axpy(-params.rho1, &spec.f1.eval(x));
    let y = spec.g1.invert(&spec.c1.project(x, &arg1))?;

    let ay = spec.a.apply(&y);
    let g2ay = spec.g2.eval(&ay);
    let arg2 = g2ay.axpy(-params.rho2, &spec.f2.eval(&ay));
    let z = spec.g2.invert(&spec.c2.project(&ay, &arg2))?;

    let correction = spec.a.adjoint_apply(&(&z - &ay));
    let relaxed = y.axpy(params.gamma, &correction);
    let x_next = &x.scale(1.0 - alpha) + &relaxed.scale(alpha);
    Ok(StepResult { x_next, y, z })
}

/// Fixed-point defect of x: the sum of the projection-equation residuals of
/// both stages, zero exactly at solutions.
pub fn residual(spec: &ProblemSpec, x: &Vector, rho1: f64, rho2: f64) -> f64 {
    let g1x = spec.g1.eval(x);
    let arg1 = g1x.axpy(-rho1, &spec.f1.eval(x));
    let r1 = (&g1x - &spec.c1.project(x, &arg1)).norm();

    let ax = spec.a.apply(x);
    let g2ax = spec.g2.eval(&ax);
    let arg2 = g2ax.axpy(-rho2, &spec.f2.eval(&ax));
    let r2 = (&g2ax - &spec.c2.project(&ax, &arg2)).norm();

    r1 + r2
}

/// Residual with the instance's stored ρ values.
pub fn residual_default(spec: &ProblemSpec, x: &Vector) -> f64 {
    let (rho1, rho2) = spec.residual_rhos();
    residual(spec, x, rho1, rho2)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveStatus {
    Converged,
    MaxIters,
}

/// Per-iteration record. `y`, `z` and `bound_factor` are absent on the
/// terminal record, which only witnesses the final iterate.
#[derive(Debug, Clone)]
pub struct IterateRecord {
    pub n: usize,
    pub x: Vector,
    pub y: Option<Vector>,
    pub z: Option<Vector>,
    pub residual: f64,
    /// ‖xⁿ − x*‖ when the instance has a known solution.
    pub error: Option<f64>,
    /// 1 − αⁿ(1 − θ) when a contraction factor θ was supplied.
    pub bound_factor: Option<f64>,
}

/// Parameters and context a trace was recorded under.
#[derive(Debug, Clone)]
pub struct TraceHeader {
    pub params: SolverParams,
    pub theta: Option<f64>,
    pub variant: AlgorithmVariant,
    pub certificate: Option<StepCertificate>,
    /// Σ αⁿ over the configured iteration budget.
    pub alpha_sum: f64,
}

#[derive(Debug, Clone)]
pub struct IterateTrace {
    pub header: TraceHeader,
    pub records: Vec<IterateRecord>,
}

impl IterateTrace {
    /// The last record that carries auxiliary iterates y and z.
    pub fn last_step_record(&self) -> Option<&IterateRecord> {
        self.records.iter().rev().find(|r| r.y.is_some())
    }

    /// Number of iterations violating the recorded contraction bound
    /// ‖xⁿ⁺¹ − x*‖ ≤ (1 − αⁿ(1−θ))·‖xⁿ − x*‖ + slack. `None` when the trace
    /// carries no error/bound pairs to check.
    pub fn contraction_violations(&self, slack: f64) -> Option<usize> {
        let mut seen = false;
        let mut count = 0;
        for pair in self.records.windows(2) {
            if let (Some(ea), Some(bf), Some(eb)) =
                (pair[0].error, pair[0].bound_factor, pair[1].error)
            {
                seen = true;
                if eb > bf * ea + slack {
                    count += 1;
                }
            }
        }
        seen.then_some(count)
    }
}

#[derive(Debug, Clone)]
pub struct SolveResult {
    pub x: Vector,
    pub status: SolveStatus,
    pub iterations: usize,
    pub trace: IterateTrace,
}

/// Runs the iteration from x⁰ until the residual drops to `params.tol` or
/// `params.max_iters` steps have been taken.
///
/// `certificate` is optional context: when present and certified, its
/// contraction factor θ is used to record per-iteration bound factors.
pub fn solve(
    spec: &ProblemSpec,
    params: &SolverParams,
    x0: &Vector,
    certificate: Option<StepCertificate>,
) -> Result<SolveResult> {
    params.validate()?;
    if x0.dim() != spec.dims().0 {
        return Err(Error::DimensionMismatch {
            expected: spec.dims().0,
            got: x0.dim(),
        });
    }
    let theta = certificate
        .as_ref()
        .filter(|c| c.is_certified())
        .and_then(|c| c.theta);
    let mut records = Vec::new();
    let mut x = x0.clone();
    let mut status = SolveStatus::MaxIters;
    let mut iterations = 0;

    for n in 0..=params.max_iters {
        let r = residual(spec, &x, params.rho1, params.rho2);
        let error = spec.known_solution.as_ref().map(|xs| (&x - xs).norm());
        if r <= params.tol || n == params.max_iters {
            records.push(IterateRecord {
                n,
                x: x.clone(),
                y: None,
                z: None,
                residual: r,
                error,
                bound_factor: None,
            });
            if r <= params.tol {
                status = SolveStatus::Converged;
            }
            iterations = n;
            break;
        }
        let alpha = params.schedule.value(n);
        let out = step(spec, params, &x, n)?;
        records.push(IterateRecord {
            n,
            x: x.clone(),
            y: Some(out.y),
            z: Some(out.z),
            residual: r,
            error,
            bound_factor: theta.map(|t| 1.0 - alpha * (1.0 - t)),
        });
        x = out.x_next;
    }

    let header = TraceHeader {
        params: params.clone(),
        theta,
        variant: select_variant(spec),
        certificate,
        alpha_sum: params.alpha_sum(params.max_iters),
    };
    Ok(SolveResult {
        x,
        status,
        iterations,
        trace: IterateTrace { header, records },
    })
}

/// Which special case of the scheme an instance falls into. Reporting only.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AlgorithmVariant {
    /// Moving sets and general inner maps.
    SplitGeneralQvi,
    /// Identity inner maps, moving sets.
    SplitQvi,
    /// General inner maps, fixed sets.
    SplitGeneralVi,
    /// Identity inner maps and fixed sets.
    SplitVi,
    /// Single-space quasi-variational inequality: A = I, identity inner
    /// maps, and a second stage that is either a mirror of the first or
    /// vacuous.
    Qvi,
}

impl fmt::Display for AlgorithmVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            AlgorithmVariant::SplitGeneralQvi => "2.1 (split general QVI)",
            AlgorithmVariant::SplitQvi => "2.2 (split QVI)",
            AlgorithmVariant::SplitGeneralVi => "2.3 (split general VI)",
            AlgorithmVariant::SplitVi => "2.4 (split VI)",
            AlgorithmVariant::Qvi => "2.5 (QVI)",
        };
        f.write_str(s)
    }
}

pub fn select_variant(spec: &ProblemSpec) -> AlgorithmVariant {
    let (n1, n2) = spec.dims();
    let id_g = spec.g1.is_identity() && spec.g2.is_identity();
    let fixed = spec.c1.is_fixed() && spec.c2.is_fixed();
    let mirrored = n1 == n2 && spec.f1 == spec.f2 && spec.c1 == spec.c2;
    if n1 == n2 && spec.a.is_identity() && id_g && (mirrored || spec.second_stage_vacuous()) {
        AlgorithmVariant::Qvi
    } else if id_g && fixed {
        AlgorithmVariant::SplitVi
    } else if id_g {
        AlgorithmVariant::SplitQvi
    } else if fixed {
        AlgorithmVariant::SplitGeneralVi
    } else {
        AlgorithmVariant::SplitGeneralQvi
    }
}

/// Samples the defining inequalities of the split problem at `x`: membership
/// of gᵢ(·) in the moving sets and ⟨fᵢ(·), c − gᵢ(·)⟩ ≥ −tol for random
/// members c. Returns the first violation found.
pub fn verify_solution_sampled(
    spec: &ProblemSpec,
    x: &Vector,
    probes: usize,
    tol: f64,
    rng: &mut impl rand::Rng,
) -> std::result::Result<(), String> {
    let g1x = spec.g1.eval(x);
    if !spec.c1.contains_at(x, &g1x, tol) {
        return Err(format!("g1(x) is not in C1(x) within {tol:e}"));
    }
    let f1x = spec.f1.eval(x);
    for _ in 0..probes {
        let c = spec.c1.sample_point_at(x, rng);
        let v = f1x.dot(&(&c - &g1x));
        if v < -tol {
            return Err(format!(
                "first-stage inequality violated: ⟨f1, c − g1⟩ = {v:e}"
            ));
        }
    }

    let ax = spec.a.apply(x);
    let g2ax = spec.g2.eval(&ax);
    if !spec.c2.contains_at(&ax, &g2ax, tol) {
        return Err(format!("g2(Ax) is not in C2(Ax) within {tol:e}"));
    }
    let f2ax = spec.f2.eval(&ax);
    for _ in 0..probes {
        let c = spec.c2.sample_point_at(&ax, rng);
        let v = f2ax.dot(&(&c - &g2ax));
        if v < -tol {
            return Err(format!(
                "second-stage inequality violated: ⟨f2, c − g2⟩ = {v:e}"
            ));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    /// The one-dimensional instance used throughout: identity inner maps,
    /// whole-space sets, f(x) = x on both stages, A = 1.
    fn one_dim_instance() -> ProblemSpec {
        let a = Matrix::identity(1);
        let c = MovingSet::fixed(ConvexSet::whole_space(1));
        let f = OperatorModel::affine(Matrix::identity(1), Vector::zeros(1)).unwrap();
        ProblemSpec::new(
            a,
            c.clone(),
            c,
            f.clone(),
            f,
            GMap::identity(1),
            GMap::identity(1),
        )
        .unwrap()
        .with_known_solution(Vector::zeros(1))
        .unwrap()
    }

    #[test]
    fn one_dim_step_by_hand() {
        let spec = one_dim_instance();
        let params = SolverParams::new(1.0, 1.0, 1.0);
        let x = Vector::from_slice(&[8.0]);
        let out = step(&spec, &params, &x, 0).unwrap();
        // y = P(x − x) = 0, z = 0, x⁺ = (1−α)x.
        assert_eq!(out.y, Vector::zeros(1));
        assert_eq!(out.z, Vector::zeros(1));
        assert_eq!(out.x_next, Vector::from_slice(&[4.0]));
    }

    #[test]
    fn one_dim_geometric_decay() {
        let spec = one_dim_instance();
        let params = SolverParams::new(1.0, 1.0, 1.0);
        let result = solve(&spec, &params, &Vector::from_slice(&[8.0]), None).unwrap();
        assert_eq!(result.status, SolveStatus::Converged);
        // xⁿ = 8·(1/2)ⁿ until the residual (= 2|x|) crosses the tolerance.
        for rec in &result.trace.records {
            let expect = 8.0 * 0.5f64.powi(rec.n as i32);
            assert!((rec.x[0] - expect).abs() <= 1e-12 * expect.max(1.0));
        }
        assert!(result.x.norm() <= params.tol);
    }

    #[test]
    fn one_dim_residual_by_hand() {
        let spec = one_dim_instance();
        assert_eq!(residual(&spec, &Vector::from_slice(&[1.0]), 1.0, 1.0), 2.0);
        assert_eq!(residual(&spec, &Vector::zeros(1), 1.0, 1.0), 0.0);
    }

    #[test]
    fn start_at_solution_converges_immediately() {
        let spec = one_dim_instance();
        let params = SolverParams::new(1.0, 1.0, 1.0);
        let result = solve(&spec, &params, &Vector::zeros(1), None).unwrap();
        assert_eq!(result.status, SolveStatus::Converged);
        assert_eq!(result.iterations, 0);
        assert_eq!(result.trace.records.len(), 1);
        assert_eq!(result.trace.records[0].residual, 0.0);
    }

    #[test]
    fn stationarity_at_fixed_points() {
        let spec = one_dim_instance();
        let params = SolverParams::new(1.0, 1.0, 1.0);
        let x = Vector::zeros(1);
        assert_eq!(residual(&spec, &x, params.rho1, params.rho2), 0.0);
        let out = step(&spec, &params, &x, 3).unwrap();
        assert!((&out.x_next - &x).norm() <= 1e-10);
    }

    #[test]
    fn variant_detection() {
        let spec = one_dim_instance();
        // Identity g, fixed whole-space sets, A = I, f2 = f1, C2 = C1: QVI.
        assert_eq!(select_variant(&spec), AlgorithmVariant::Qvi);

        let a = Matrix::from_rows(&[vec![1.0], vec![0.5]]).unwrap();
        let c1 = MovingSet::fixed(ConvexSet::whole_space(1));
        let c2 = MovingSet::fixed(ConvexSet::whole_space(2));
        let f1 = OperatorModel::identity(1);
        let f2 = OperatorModel::identity(2);
        let spec = ProblemSpec::new(
            a.clone(),
            c1.clone(),
            c2.clone(),
            f1.clone(),
            f2.clone(),
            GMap::identity(1),
            GMap::identity(2),
        )
        .unwrap();
        assert_eq!(select_variant(&spec), AlgorithmVariant::SplitVi);

        let moving = MovingSet::new(
            ConvexSet::whole_space(1),
            OperatorModel::scaling(1, 0.1).unwrap(),
        )
        .unwrap();
        let spec = ProblemSpec::new(
            a.clone(),
            moving.clone(),
            c2.clone(),
            f1.clone(),
            f2.clone(),
            GMap::identity(1),
            GMap::identity(2),
        )
        .unwrap();
        assert_eq!(select_variant(&spec), AlgorithmVariant::SplitQvi);

        let g1 = GMap::new(OperatorModel::scaling(1, 2.0).unwrap()).unwrap();
        let spec = ProblemSpec::new(
            a.clone(),
            c1,
            c2.clone(),
            f1.clone(),
            f2.clone(),
            g1.clone(),
            GMap::identity(2),
        )
        .unwrap();
        assert_eq!(select_variant(&spec), AlgorithmVariant::SplitGeneralVi);

        let spec = ProblemSpec::new(a, moving, c2, f1, f2, g1, GMap::identity(2)).unwrap();
        assert_eq!(select_variant(&spec), AlgorithmVariant::SplitGeneralQvi);
    }

    #[test]
    fn harmonic_schedule_stays_inside_unit_interval() {
        let s = AlphaSchedule::Harmonic;
        for n in 0..1000 {
            let a = s.value(n);
            assert!(a > 0.0 && a < 1.0);
        }
        assert!(AlphaSchedule::Constant(1.0).validate().is_err());
        assert!(AlphaSchedule::Constant(0.0).validate().is_err());
    }

    #[test]
    fn rejects_known_solution_with_large_residual() {
        let spec = one_dim_instance();
        let bad = ProblemSpec::new(
            spec.a.clone(),
            spec.c1.clone(),
            spec.c2.clone(),
            spec.f1.clone(),
            spec.f2.clone(),
            spec.g1.clone(),
            spec.g2.clone(),
        )
        .unwrap()
        .with_known_solution(Vector::from_slice(&[1.0]));
        assert!(bad.is_err());
    }

    #[test]
    fn residual_is_lipschitz_on_samples() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(51);
        let mut specs = vec![one_dim_instance()];
        for seed in 0..5 {
            let cfg = crate::generate::GeneratorConfig::new(
                3,
                2,
                seed,
                crate::generate::Family::InteriorZero,
            );
            specs.push(crate::generate::generate(&cfg).unwrap());
        }
        for spec in &specs {
            let (rho1, rho2) = (0.7, 1.3);
            // Crude Lipschitz bound from the certified constants of the
            // pieces: each stage contributes 2δ + ν + ρβ, the second one
            // through ‖A‖.
            let norm_a = spec.a.operator_norm();
            let lip1 =
                2.0 * spec.g1.delta() + spec.c1.certified_nu() + rho1 * spec.f1.lipschitz();
            let lip2 = (2.0 * spec.g2.delta() + spec.c2.certified_nu()
                + rho2 * spec.f2.lipschitz())
                * norm_a;
            let lip = lip1 + lip2;
            let n1 = spec.dims().0;
            for _ in 0..200 {
                let x = Vector::from_fn(n1, |_| rng.random_range(-5.0..5.0));
                let w = Vector::from_fn(n1, |_| rng.random_range(-5.0..5.0));
                let dr = (residual(spec, &x, rho1, rho2) - residual(spec, &w, rho1, rho2)).abs();
                assert!(dr <= lip * (&x - &w).norm() + 1e-9);
            }
        }
    }
}
