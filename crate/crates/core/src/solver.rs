//! The penalized objective and its single-splitting ADMM solver.
//!
//! Each iteration performs, in order,
//!
//! ```text
//! X ← prox_φ((Y + μ(Z + D)) / (1 + μ); λ₁/(1 + μ), a₁)     entrywise
//! Z ← U · prox_φ(Σ; λ₀/μ, a₀) · Vᵀ   where X − D = U Σ Vᵀ
//! D ← D − (X − Z)
//! ```
//!
//! Strict convexity of the objective needs `a₀λ₀ + a₁λ₁ < 1`; `μ > 1` keeps
//! both subproblems strictly convex, so the iteration reaches the unique
//! global minimizer.

use std::fmt;
use std::io::Write;

use crate::linalg::{singular_values, sv_shrink, Entry, Matrix};
use crate::penalty::{prox_matrix, PenaltyKind, PenaltyParams};
use crate::{Error, Result};

pub const DEFAULT_MU: f64 = 1.5;
pub const DEFAULT_EPS: f64 = 1e-5;
pub const DEFAULT_MAX_ITER: usize = 500;

/// Loosest relative bound on `‖X − Z‖_F` accepted at convergence.
pub const PRIMAL_RESIDUAL_TOL: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    /// Weight of the singular-value penalty.
    pub lambda0: f64,
    /// Weight of the entrywise penalty.
    pub lambda1: f64,
    pub penalty0: PenaltyParams,
    pub penalty1: PenaltyParams,
    /// Augmented Lagrangian parameter, must exceed 1.
    pub mu: f64,
    /// Relative tolerance on successive objective values.
    pub eps: f64,
    pub max_iter: usize,
    /// Relative bound on `‖X − Z‖_F` and on the last change in `Z`, in
    /// `(0, 10⁻³]`. `None` means `min(eps, 10⁻³)`.
    pub residual_tol: Option<f64>,
}

impl SolverConfig {
    pub fn new(lambda0: f64, lambda1: f64, penalty0: PenaltyParams, penalty1: PenaltyParams) -> Self {
        Self {
            lambda0,
            lambda1,
            penalty0,
            penalty1,
            mu: DEFAULT_MU,
            eps: DEFAULT_EPS,
            max_iter: DEFAULT_MAX_ITER,
            residual_tol: None,
        }
    }

    /// Same penalty family on both terms.
    pub fn with_kind(kind: PenaltyKind, lambda0: f64, lambda1: f64, a0: f64, a1: f64) -> Result<Self> {
        Ok(Self::new(
            lambda0,
            lambda1,
            PenaltyParams::new(kind, a0)?,
            PenaltyParams::new(kind, a1)?,
        ))
    }

    /// Convex baseline: nuclear norm plus entrywise ℓ₁.
    pub fn slr(lambda0: f64, lambda1: f64) -> Self {
        Self::new(
            lambda0,
            lambda1,
            PenaltyParams::l1(PenaltyKind::Rational),
            PenaltyParams::l1(PenaltyKind::Rational),
        )
    }

    pub fn mu(mut self, mu: f64) -> Self {
        self.mu = mu;
        self
    }

    pub fn eps(mut self, eps: f64) -> Self {
        self.eps = eps;
        self
    }

    pub fn max_iter(mut self, max_iter: usize) -> Self {
        self.max_iter = max_iter;
        self
    }

    pub fn residual_tol(mut self, tol: Option<f64>) -> Self {
        self.residual_tol = tol;
        self
    }

    /// The residual bound in effect, relative to `max(1, ‖X‖_F)`.
    pub fn residual_tolerance(&self) -> f64 {
        self.residual_tol.unwrap_or(self.eps.min(PRIMAL_RESIDUAL_TOL))
    }

    /// `a₀λ₀ + a₁λ₁`.
    pub fn nonconvexity(&self) -> f64 {
        self.penalty0.a * self.lambda0 + self.penalty1.a * self.lambda1
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    /// `a₀λ₀ + a₁λ₁ ≥ 1`: the objective may be non-convex.
    ConvexityTriangle { value: f64 },
    /// `μ ≤ 1`: the subproblems may be non-convex.
    AugmentedLagrangian { mu: f64 },
    /// A weight, penalty parameter or tolerance is out of its domain.
    Domain { name: &'static str, value: f64 },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::ConvexityTriangle { value } => write!(
                f,
                "a0*lambda0 + a1*lambda1 = {value} violates a0*lambda0 + a1*lambda1 < 1 (excess {})",
                value - 1.0
            ),
            Violation::AugmentedLagrangian { mu } => {
                write!(f, "mu = {mu} violates mu > 1 (short by {})", 1.0 - mu)
            }
            Violation::Domain { name, value } => write!(f, "{name} = {value} is out of range"),
        }
    }
}

/// Result of [`validate_config`], with margins so callers can explain a
/// rejection.
#[derive(Debug, Clone, PartialEq)]
pub struct ValidationOutcome {
    /// `a₀λ₀ + a₁λ₁`.
    pub nonconvexity: f64,
    /// `1 − (a₀λ₀ + a₁λ₁)`; must be positive.
    pub convexity_margin: f64,
    /// `μ − 1`; must be positive.
    pub mu_margin: f64,
    pub violations: Vec<Violation>,
}

impl ValidationOutcome {
    pub fn accepted(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.accepted() {
            return write!(
                f,
                "accepted (convexity margin {}, mu margin {})",
                self.convexity_margin, self.mu_margin
            );
        }
        let parts: Vec<String> = self.violations.iter().map(ToString::to_string).collect();
        f.write_str(&parts.join("; "))
    }
}

/// Checks the convexity triangle, `μ > 1` and parameter domains.
pub fn validate_config(cfg: &SolverConfig) -> ValidationOutcome {
    let mut violations = Vec::new();
    let mut domain = |name: &'static str, value: f64, ok: bool| {
        if !ok {
            violations.push(Violation::Domain { name, value });
        }
    };
    let nonneg = |v: f64| v.is_finite() && v >= 0.0;
    domain("lambda0", cfg.lambda0, nonneg(cfg.lambda0));
    domain("lambda1", cfg.lambda1, nonneg(cfg.lambda1));
    domain("a0", cfg.penalty0.a, nonneg(cfg.penalty0.a));
    domain("a1", cfg.penalty1.a, nonneg(cfg.penalty1.a));
    domain("eps", cfg.eps, cfg.eps.is_finite() && cfg.eps > 0.0);
    domain("max_iter", cfg.max_iter as f64, cfg.max_iter > 0);
    if let Some(t) = cfg.residual_tol {
        domain("residual_tol", t, t > 0.0 && t <= PRIMAL_RESIDUAL_TOL);
    }

    let nonconvexity = cfg.nonconvexity();
    if nonconvexity.is_nan() || nonconvexity >= 1.0 {
        violations.push(Violation::ConvexityTriangle { value: nonconvexity });
    }
    if !(cfg.mu > 1.0 && cfg.mu.is_finite()) {
        violations.push(Violation::AugmentedLagrangian { mu: cfg.mu });
    }
    ValidationOutcome {
        nonconvexity,
        convexity_margin: 1.0 - nonconvexity,
        mu_margin: cfg.mu - 1.0,
        violations,
    }
}

/// `½‖Y − X‖²_F + λ₀ Σᵢ φ(σᵢ(X); a₀) + λ₁ Σᵢⱼ φ(Xᵢⱼ; a₁)`.
pub fn objective<T: Entry>(x: &Matrix<T>, y: &Matrix<T>, cfg: &SolverConfig) -> Result<f64> {
    let fidelity = 0.5 * y.distance(x)?.powi(2);
    let low_rank = if cfg.lambda0 == 0.0 {
        0.0
    } else {
        let sigma = singular_values(x)?;
        cfg.lambda0 * sigma.iter().map(|&s| cfg.penalty0.value(s)).sum::<f64>()
    };
    let sparse = if cfg.lambda1 == 0.0 {
        0.0
    } else {
        cfg.lambda1
            * x.as_slice()
                .iter()
                .map(|v| cfg.penalty1.value(v.modulus()))
                .sum::<f64>()
    };
    Ok(fidelity + low_rank + sparse)
}

/// ADMM iterate: estimate `X`, split copy `Z`, scaled dual `D`.
#[derive(Debug, Clone, PartialEq)]
pub struct AdmmState<T: Entry> {
    pub x: Matrix<T>,
    pub z: Matrix<T>,
    pub d: Matrix<T>,
}

impl<T: Entry> AdmmState<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            x: Matrix::zeros(rows, cols),
            z: Matrix::zeros(rows, cols),
            d: Matrix::zeros(rows, cols),
        }
    }

    /// Starts from the given `Z` and `D`; `X` is overwritten by the first step.
    pub fn from_split(z: Matrix<T>, d: Matrix<T>) -> Result<Self> {
        z.ensure_same_shape(&d)?;
        Ok(Self {
            x: Matrix::zeros(z.rows(), z.cols()),
            z,
            d,
        })
    }

    /// `‖X − Z‖_F`.
    pub fn primal_residual(&self) -> f64 {
        self.x.distance(&self.z).unwrap_or(f64::NAN)
    }
}

/// One ADMM sweep: X-update, Z-update, dual update, in that order.
pub fn admm_step<T: Entry>(state: &mut AdmmState<T>, y: &Matrix<T>, cfg: &SolverConfig) -> Result<()> {
    y.ensure_same_shape(&state.z)?;
    y.ensure_same_shape(&state.d)?;
    let mu = cfg.mu;
    let inv = 1.0 / (1.0 + mu);
    let target = Matrix::from_row_major(
        y.rows(),
        y.cols(),
        y.as_slice()
            .iter()
            .zip(state.z.as_slice())
            .zip(state.d.as_slice())
            .map(|((&yv, &zv), &dv)| (yv + (zv + dv).scale(mu)).scale(inv))
            .collect(),
    );
    // A non-finite entry here means the iterates already diverged.
    let target = target.map_err(|_| Error::NonFinite { iteration: 0 })?;
    state.x = prox_matrix(&target, cfg.lambda1 * inv, cfg.penalty1)?;
    let shifted = &state.x - &state.d;
    state.z = sv_shrink(&shifted, cfg.lambda0 / mu, cfg.penalty0)?;
    let gap = &state.x - &state.z;
    state.d = &state.d - &gap;
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveResult<T: Entry> {
    pub x: Matrix<T>,
    /// Objective value after every iteration.
    pub objective_history: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
    /// `‖X − Z‖_F` at the final iterate.
    pub primal_residual: f64,
}

impl<T: Entry> SolveResult<T> {
    pub fn final_objective(&self) -> Option<f64> {
        self.objective_history.last().copied()
    }

    /// Writes the objective trace as `iter,objective` CSV (1-based iterations).
    pub fn write_history<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "iter,objective")?;
        for (i, f) in self.objective_history.iter().enumerate() {
            writeln!(out, "{},{:.16e}", i + 1, f)?;
        }
        Ok(())
    }
}

/// The stopping test on two successive objective values.
pub fn objective_converged(previous: f64, current: f64, eps: f64) -> bool {
    let diff = (current - previous).abs();
    diff < eps * current.abs() || diff == 0.0
}

/// Runs ADMM from `Z = D = 0` (or `init`) until converged or `max_iter` is
/// reached.
///
/// A run is converged once the relative objective change drops below `eps`
/// and both `‖X − Z‖_F` and the last change in `Z` are below
/// [`SolverConfig::residual_tolerance`] times `max(1, ‖X‖_F)`. The objective
/// alone settles much earlier than the iterate, since it is flat near the
/// minimizer.
pub fn solve<T: Entry>(
    y: &Matrix<T>,
    cfg: &SolverConfig,
    init: Option<(Matrix<T>, Matrix<T>)>,
) -> Result<SolveResult<T>> {
    run(y, cfg, init, true)
}

/// Same iterates and stopping decision as [`solve`], but the objective is
/// only evaluated once the residual tests pass, so `objective_history` holds
/// just the final value.
pub fn solve_lean<T: Entry>(
    y: &Matrix<T>,
    cfg: &SolverConfig,
    init: Option<(Matrix<T>, Matrix<T>)>,
) -> Result<SolveResult<T>> {
    run(y, cfg, init, false)
}

fn run<T: Entry>(
    y: &Matrix<T>,
    cfg: &SolverConfig,
    init: Option<(Matrix<T>, Matrix<T>)>,
    record: bool,
) -> Result<SolveResult<T>> {
    let outcome = validate_config(cfg);
    if !outcome.accepted() {
        return Err(Error::ConfigRejected(outcome));
    }
    if !y.is_finite() {
        return Err(Error::InvalidMatrix("observation has non-finite entries".into()));
    }
    let mut state = match init {
        Some((z, d)) => {
            y.ensure_same_shape(&z)?;
            AdmmState::from_split(z, d)?
        }
        None => AdmmState::zeros(y.rows(), y.cols()),
    };
    if cfg.lambda0 == 0.0 && cfg.lambda1 == 0.0 {
        return Ok(SolveResult {
            x: y.clone(),
            objective_history: Vec::new(),
            iterations: 0,
            converged: true,
            primal_residual: 0.0,
        });
    }

    let checked = |x: &Matrix<T>, iteration: usize| -> Result<f64> {
        let f = objective(x, y, cfg)?;
        if f.is_finite() {
            Ok(f)
        } else {
            Err(Error::NonFinite { iteration })
        }
    };
    let mut history = Vec::new();
    // objective of the previous iterate, when it was evaluated
    let mut previous_f: Option<f64> = None;
    let mut iterations = 0;
    let mut converged = false;
    for iteration in 1..=cfg.max_iter {
        iterations = iteration;
        let previous_z = state.z.clone();
        let previous_x = (!record && iteration > 1).then(|| state.x.clone());
        admm_step(&mut state, y, cfg).map_err(|e| match e {
            Error::NonFinite { .. } => Error::NonFinite { iteration },
            other => other,
        })?;
        if !state.x.is_finite() || !state.d.is_finite() {
            return Err(Error::NonFinite { iteration });
        }
        let step = state.z.distance(&previous_z)?;
        let tol = cfg.residual_tolerance() * state.x.frobenius_norm().max(1.0);
        let settled = state.primal_residual() < tol && step < tol;
        let f = if record || settled { Some(checked(&state.x, iteration)?) } else { None };
        if record {
            history.extend(f);
        }
        if let (true, Some(f)) = (settled, f) {
            let prev = match (previous_f, &previous_x) {
                (Some(p), _) => Some(p),
                (None, Some(x)) => Some(checked(x, iteration - 1)?),
                (None, None) => None,
            };
            if prev.is_some_and(|p| objective_converged(p, f, cfg.eps)) {
                converged = true;
                break;
            }
        }
        previous_f = f;
    }
    if !record {
        history.push(checked(&state.x, iterations)?);
    }
    let primal_residual = state.primal_residual();
    Ok(SolveResult {
        x: state.x,
        objective_history: history,
        iterations,
        converged,
        primal_residual,
    })
}

/// Convex baseline (`a₀ = a₁ = 0`).
pub fn solve_slr<T: Entry>(
    y: &Matrix<T>,
    lambda0: f64,
    lambda1: f64,
    mu: f64,
    eps: f64,
    max_iter: usize,
) -> Result<SolveResult<T>> {
    let cfg = SolverConfig::slr(lambda0, lambda1)
        .mu(mu)
        .eps(eps)
        .max_iter(max_iter);
    solve(y, &cfg, None)
}
