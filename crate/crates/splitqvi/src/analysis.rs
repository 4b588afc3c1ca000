//! Convergence certification for the unified iteration.
//!
//! From a bundle of certified operator constants the checker computes the
//! per-stage contraction factors
//!
//! ```text
//! θᵢ = ( √(δᵢ² − 2ρᵢαᵢ + ρᵢ²βᵢ²) + νᵢ ) / √(2σᵢ + 1)
//! ```
//!
//! the bracket constant k₁ = √(2σ₁+1)/(1+2θ₂) − ν₁, the admissible open
//! interval for ρ₁ around α₁/β₁² with radius √(α₁² − β₁²(δ₁²−k₁²))/β₁²,
//! and the overall factor θ = θ₁(1 + γ‖A‖²θ₂). A certified instance
//! contracts the distance to the solution by 1 − αⁿ(1−θ) at every step.
//!
//! Two modes are offered. [`CertifyMode::Standard`] checks the ρ₁-interval,
//! ρ₂ > 0, γ ∈ (0, 2/‖A‖²), and θ < 1 with the actual γ.
//! [`CertifyMode::Strict`] additionally demands k₁ > 0, δ₁ > |k₁| and
//! θ₂ > 0, the literal worst-case hypotheses (which bake in γ‖A‖² < 2);
//! they imply θ < 1 but reject some parameter choices the direct check
//! accepts.
//!
//! When the second stage of an instance is vacuous (projection onto the
//! whole space, zero outer map, identity inner map) the correction term of
//! the iteration vanishes identically and θ₂ enters the bound as 0; the
//! bundle records that degeneration explicitly.

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::operators::certify_relative;
use crate::solver::{ProblemSpec, SolverParams};

/// Certified constants of a problem instance, as consumed by the checker.
///
/// `alpha` constants are strong monotonicity of f relative to g, `beta`
/// Lipschitz constants of f, `delta`/`sigma` the Lipschitz and shifted
/// strong-monotonicity constants of g, `nu` the moving-set projection-shift
/// constants. Valid bundles satisfy αᵢ ≤ βᵢδᵢ (Cauchy–Schwarz).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConstantsBundle {
    pub alpha1: f64,
    pub beta1: f64,
    pub delta1: f64,
    pub sigma1: f64,
    pub nu1: f64,
    pub alpha2: f64,
    pub beta2: f64,
    pub delta2: f64,
    pub sigma2: f64,
    pub nu2: f64,
    pub norm_a: f64,
    /// Second stage contributes nothing; θ₂ is taken as 0.
    pub second_stage_vacuous: bool,
}

impl ConstantsBundle {
    pub fn from_problem(spec: &ProblemSpec) -> Self {
        Self {
            alpha1: certify_relative(spec.f1(), spec.g1()),
            beta1: spec.f1().lipschitz(),
            delta1: spec.g1().delta(),
            sigma1: spec.g1().sigma(),
            nu1: spec.c1().certified_nu(),
            alpha2: certify_relative(spec.f2(), spec.g2()),
            beta2: spec.f2().lipschitz(),
            delta2: spec.g2().delta(),
            sigma2: spec.g2().sigma(),
            nu2: spec.c2().certified_nu(),
            norm_a: spec.a().operator_norm(),
            second_stage_vacuous: spec.second_stage_vacuous(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("alpha1", self.alpha1),
            ("beta1", self.beta1),
            ("delta1", self.delta1),
            ("sigma1", self.sigma1),
            ("nu1", self.nu1),
            ("alpha2", self.alpha2),
            ("beta2", self.beta2),
            ("delta2", self.delta2),
            ("sigma2", self.sigma2),
            ("nu2", self.nu2),
            ("norm_a", self.norm_a),
        ];
        for (name, v) in fields {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::InfeasibleConstants(format!(
                    "{name} must be finite and nonnegative, got {v}"
                )));
            }
        }
        if self.alpha1 > self.beta1 * self.delta1 + 1e-9 {
            return Err(Error::InfeasibleConstants(
                "alpha1 exceeds beta1·delta1 (violates Cauchy–Schwarz)".into(),
            ));
        }
        if !self.second_stage_vacuous && self.alpha2 > self.beta2 * self.delta2 + 1e-9 {
            return Err(Error::InfeasibleConstants(
                "alpha2 exceeds beta2·delta2 (violates Cauchy–Schwarz)".into(),
            ));
        }
        Ok(())
    }
}

fn stage_theta(delta: f64, alpha: f64, beta: f64, sigma: f64, nu: f64, rho: f64) -> Result<f64> {
    let radicand = delta * delta - 2.0 * rho * alpha + rho * rho * beta * beta;
    if radicand < -1e-12 {
        return Err(Error::InfeasibleConstants(format!(
            "negative radicand δ² − 2ρα + ρ²β² = {radicand:e}"
        )));
    }
    Ok((radicand.max(0.0).sqrt() + nu) / (2.0 * sigma + 1.0).sqrt())
}

/// First-stage contraction factor θ₁.
pub fn theta1(c: &ConstantsBundle, rho1: f64) -> Result<f64> {
    stage_theta(c.delta1, c.alpha1, c.beta1, c.sigma1, c.nu1, rho1)
}

/// Second-stage contraction factor θ₂; zero for a vacuous second stage.
pub fn theta2(c: &ConstantsBundle, rho2: f64) -> Result<f64> {
    if c.second_stage_vacuous {
        return Ok(0.0);
    }
    stage_theta(c.delta2, c.alpha2, c.beta2, c.sigma2, c.nu2, rho2)
}

/// k₁ = √(2σ₁+1)/(1+2θ₂) − ν₁.
pub fn k1(c: &ConstantsBundle, theta2: f64) -> f64 {
    (2.0 * c.sigma1 + 1.0).sqrt() / (1.0 + 2.0 * theta2) - c.nu1
}

/// The admissible open interval for ρ₁, centered at α₁/β₁² with radius
/// √(α₁² − β₁²(δ₁²−k₁²))/β₁², intersected with (0, ∞).
pub fn rho1_interval(c: &ConstantsBundle, theta2: f64) -> Result<(f64, f64)> {
    if c.beta1 == 0.0 {
        return Err(Error::InfeasibleConstants(
            "beta1 = 0: the rho1 interval is undefined".into(),
        ));
    }
    let k = k1(c, theta2);
    if k <= 0.0 && c.delta1 <= k.abs() {
        return Err(Error::InfeasibleConstants(format!(
            "k1 = {k} is not positive and delta1 = {} does not exceed |k1|",
            c.delta1
        )));
    }
    let discriminant = c.alpha1 * c.alpha1 - c.beta1 * c.beta1 * (c.delta1 * c.delta1 - k * k);
    if discriminant <= 0.0 {
        return Err(Error::InfeasibleConstants(format!(
            "alpha1 ≤ beta1·√(delta1² − k1²): discriminant {discriminant:e} not positive"
        )));
    }
    let center = c.alpha1 / (c.beta1 * c.beta1);
    let radius = discriminant.sqrt() / (c.beta1 * c.beta1);
    Ok(((center - radius).max(0.0), center + radius))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum CertifyMode {
    /// Interval conditions plus the direct θ < 1 check with the actual γ.
    Standard,
    /// Also demands the literal worst-case hypotheses k₁ > 0, δ₁ > |k₁|,
    /// θ₂ > 0.
    Strict,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum Verdict {
    Certified,
    Rejected { violations: Vec<String> },
}

/// Outcome of a certification run, with every intermediate quantity that
/// could be computed. Diagnostic fields stay `None` when upstream
/// quantities were uncomputable.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StepCertificate {
    pub mode: CertifyMode,
    pub bundle: ConstantsBundle,
    pub rho1: f64,
    pub rho2: f64,
    pub gamma: f64,
    pub theta1: Option<f64>,
    pub theta2: Option<f64>,
    pub k1: Option<f64>,
    pub theta: Option<f64>,
    pub rho1_interval: Option<(f64, f64)>,
    /// (0, 2/‖A‖²); absent when ‖A‖ = 0.
    pub gamma_interval: Option<(f64, f64)>,
    pub verdict: Verdict,
}

impl StepCertificate {
    pub fn is_certified(&self) -> bool {
        matches!(self.verdict, Verdict::Certified)
    }

    pub fn violations(&self) -> &[String] {
        match &self.verdict {
            Verdict::Certified => &[],
            Verdict::Rejected { violations } => violations,
        }
    }
}

impl fmt::Display for StepCertificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "certificate (mode: {:?})", self.mode)?;
        writeln!(
            f,
            "  rho1 = {}, rho2 = {}, gamma = {}",
            self.rho1, self.rho2, self.gamma
        )?;
        if let Some(t2) = self.theta2 {
            writeln!(f, "  theta2 = {t2}")?;
        }
        if let Some(k) = self.k1 {
            writeln!(f, "  k1 = {k}")?;
        }
        if let Some((lo, hi)) = self.rho1_interval {
            writeln!(f, "  admissible rho1 interval: ({lo}, {hi})")?;
        }
        if let Some((lo, hi)) = self.gamma_interval {
            writeln!(f, "  admissible gamma interval: ({lo}, {hi})")?;
        }
        if let Some(t1) = self.theta1 {
            writeln!(f, "  theta1 = {t1}")?;
        }
        if let Some(t) = self.theta {
            writeln!(f, "  theta = theta1·(1 + gamma·‖A‖²·theta2) = {t}")?;
        }
        match &self.verdict {
            Verdict::Certified => write!(f, "  verdict: CERTIFIED"),
            Verdict::Rejected { violations } => {
                writeln!(f, "  verdict: REJECTED")?;
                for v in violations {
                    writeln!(f, "    - {v}")?;
                }
                Ok(())
            }
        }
    }
}

/// Checks the convergence hypotheses for the given constants and parameters.
/// Every violated inequality is reported, not just the first.
pub fn certify(c: &ConstantsBundle, params: &SolverParams, mode: CertifyMode) -> StepCertificate {
    let mut violations = Vec::new();
    if let Err(e) = c.validate() {
        violations.push(e.to_string());
    }

    let gamma_interval = if c.norm_a > 0.0 {
        Some((0.0, 2.0 / (c.norm_a * c.norm_a)))
    } else {
        violations.push("‖A‖ = 0: the gamma interval (0, 2/‖A‖²) is undefined".into());
        None
    };
    if let Some((_, sup)) = gamma_interval {
        if !(params.gamma > 0.0 && params.gamma < sup) {
            violations.push(format!(
                "gamma = {} outside (0, 2/‖A‖²) = (0, {})",
                params.gamma, sup
            ));
        }
    }
    if !(params.rho2 > 0.0) {
        violations.push(format!("rho2 = {} must be positive", params.rho2));
    }

    let t2 = match theta2(c, params.rho2) {
        Ok(t) => Some(t),
        Err(e) => {
            violations.push(format!("theta2: {e}"));
            None
        }
    };
    let mut t1 = None;
    let mut kk = None;
    let mut theta = None;
    let mut interval = None;

    if let Some(t2v) = t2 {
        let k = k1(c, t2v);
        kk = Some(k);
        match rho1_interval(c, t2v) {
            Ok((lo, hi)) => {
                interval = Some((lo, hi));
                if !(params.rho1 > lo && params.rho1 < hi) {
                    violations.push(format!(
                        "rho1 = {} outside the admissible interval ({lo}, {hi})",
                        params.rho1
                    ));
                }
            }
            Err(e) => violations.push(e.to_string()),
        }
        match theta1(c, params.rho1) {
            Ok(t1v) => {
                t1 = Some(t1v);
                let th = t1v * (1.0 + params.gamma * c.norm_a * c.norm_a * t2v);
                theta = Some(th);
                if !(th < 1.0) {
                    violations.push(format!("theta = {th} is not below 1"));
                }
            }
            Err(e) => violations.push(format!("theta1: {e}")),
        }

        if mode == CertifyMode::Strict {
            if !(k > 0.0) {
                violations.push(format!("strict: k1 = {k} is not positive"));
            }
            if !(c.delta1 > k.abs()) {
                violations.push(format!(
                    "strict: delta1 = {} does not exceed |k1| = {}",
                    c.delta1,
                    k.abs()
                ));
            }
            if !c.second_stage_vacuous && !(t2v > 0.0) {
                violations.push("strict: theta2 must be positive".into());
            }
        }
    }

    StepCertificate {
        mode,
        bundle: c.clone(),
        rho1: params.rho1,
        rho2: params.rho2,
        gamma: params.gamma,
        theta1: t1,
        theta2: t2,
        k1: kk,
        theta,
        rho1_interval: interval,
        gamma_interval,
        verdict: if violations.is_empty() {
            Verdict::Certified
        } else {
            Verdict::Rejected { violations }
        },
    }
}

/// Certifies a problem instance directly from its certified constants.
pub fn certify_problem(
    spec: &ProblemSpec,
    params: &SolverParams,
    mode: CertifyMode,
) -> StepCertificate {
    certify(&ConstantsBundle::from_problem(spec), params, mode)
}
