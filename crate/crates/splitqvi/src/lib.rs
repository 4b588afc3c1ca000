//! Projection-based solvers for split quasi-variational inequality
//! problems over finite-dimensional spaces.
//!
//! The problem: find x₁* with g₁(x₁*) ∈ C₁(x₁*) and
//! ⟨f₁(x₁*), x₁ − g₁(x₁*)⟩ ≥ 0 for all x₁ ∈ C₁(x₁*), such that
//! x₂* = A x₁* satisfies the analogous inequality in the second space.
//! Constraint sets may move with the unknown, C(x) = m(x) + C.
//!
//! The crate provides
//!
//! - exact metric projections onto boxes, balls, halfspaces, affine sets
//!   and translated (moving) versions of them ([`sets`]);
//! - structured operator models whose strong-monotonicity and Lipschitz
//!   constants are certified from their linear parts ([`operators`]);
//! - the relaxed projection iteration with residual-based stopping and full
//!   iterate traces ([`solver`]);
//! - a convergence certifier that computes the contraction factor θ and the
//!   admissible parameter intervals ([`analysis`]);
//! - instance generators with exactly known solutions, an independent
//!   reference oracle, and file formats for problems and traces
//!   ([`generate`], [`oracle`], [`io`]).

// Validation uses `!(v > 0.0)` deliberately: unlike `v <= 0.0` it also
// rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod error;
pub mod generate;
pub mod io;
pub mod linalg;
pub mod operators;
pub mod oracle;
pub mod sets;
pub mod solver;

pub use analysis::{
    certify, certify_problem, CertifyMode, ConstantsBundle, StepCertificate, Verdict,
};
pub use error::{Error, Result};
pub use generate::{generate as generate_problem, Family, GeneratorConfig};
pub use linalg::{Matrix, Vector};
pub use operators::{GMap, OperatorModel};
pub use oracle::{oracle_solve, OracleMethod, OracleOutcome};
pub use sets::{ConvexSet, MovingSet};
pub use solver::{
    residual, residual_default, select_variant, solve, step, AlgorithmVariant, AlphaSchedule,
    IterateTrace, ProblemSpec, SolveResult, SolveStatus, SolverParams,
};
