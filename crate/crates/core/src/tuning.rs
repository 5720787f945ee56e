//! Regularization parameter rules and grid search.
//!
//! Weights follow `λᵢ = βᵢσ`. The penalty parameters split the convexity
//! budget: `a₀λ₀ = c` and `a₁λ₁` takes the rest, less a relative margin of
//! [`A1_MARGIN`] so the strict inequality `a₀λ₀ + a₁λ₁ < 1` holds.

use std::cmp::Ordering;
use std::fmt;
use std::io::Write;
use std::str::FromStr;

use rayon::prelude::*;

use crate::linalg::{Entry, Matrix};
use crate::metrics::rse;
use crate::penalty::{PenaltyKind, PenaltyParams};
use crate::solver::{solve_lean, validate_config, SolverConfig, DEFAULT_EPS, DEFAULT_MAX_ITER, DEFAULT_MU};
use crate::{Error, Result};

pub const A1_MARGIN: f64 = 1e-6;

/// Default β values per axis.
pub const DEFAULT_BETA_GRID: [f64; 5] = [0.25, 0.5, 1.0, 2.0, 4.0];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TuningRule {
    pub beta0: f64,
    pub beta1: f64,
    /// Share of the convexity budget given to the singular-value penalty.
    pub c: f64,
    /// Noise standard deviation (or an estimate of it).
    pub sigma: f64,
}

/// `(λ₀, λ₁) = (β₀σ, β₁σ)`.
pub fn lambdas_from_sigma(rule: &TuningRule) -> (f64, f64) {
    (rule.beta0 * rule.sigma, rule.beta1 * rule.sigma)
}

fn check_c(c: f64) -> Result<()> {
    if !(c > 0.0 && c < 1.0) {
        return Err(Error::InvalidArgument(format!("c must lie in (0, 1), got {c}")));
    }
    Ok(())
}

/// `a₀ = c/λ₀`, `a₁ = (1 − a₀λ₀)/λ₁` shrunk by [`A1_MARGIN`].
pub fn penalties_from_c(c: f64, lambda0: f64, lambda1: f64) -> Result<(f64, f64)> {
    check_c(c)?;
    if lambda0 == 0.0 {
        return Err(Error::DegenerateLambda("lambda0"));
    }
    if lambda1 == 0.0 {
        return Err(Error::DegenerateLambda("lambda1"));
    }
    if !(lambda0 > 0.0 && lambda1 > 0.0) {
        return Err(Error::InvalidArgument("regularization weights must be positive".into()));
    }
    let a0 = c / lambda0;
    Ok((a0, margin_a1(a0 * lambda0, lambda1)))
}

/// Like [`penalties_from_c`], but a zero weight simply gets `a = 0`.
pub fn penalties_for_lambdas(c: f64, lambda0: f64, lambda1: f64) -> Result<(f64, f64)> {
    check_c(c)?;
    if !(lambda0 >= 0.0 && lambda1 >= 0.0) {
        return Err(Error::InvalidArgument("regularization weights must be nonnegative".into()));
    }
    let a0 = if lambda0 > 0.0 { c / lambda0 } else { 0.0 };
    let a1 = if lambda1 > 0.0 { margin_a1(a0 * lambda0, lambda1) } else { 0.0 };
    Ok((a0, a1))
}

fn margin_a1(used: f64, lambda1: f64) -> f64 {
    let mut a1 = (1.0 - used) / lambda1 * (1.0 - A1_MARGIN);
    // rounding can eat the margin when c is within ~1e-10 of 1
    while used + a1 * lambda1 >= 1.0 && a1 > 0.0 {
        a1 = a1.next_down();
    }
    a1.max(0.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Method {
    /// Non-convex penalties with `a` from the `c` rule.
    Islr,
    /// Convex baseline, `a₀ = a₁ = 0`.
    Slr,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Islr => "islr",
            Method::Slr => "slr",
        })
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "islr" => Ok(Method::Islr),
            "slr" => Ok(Method::Slr),
            other => Err(Error::InvalidArgument(format!("unknown method `{other}`"))),
        }
    }
}

/// Solver settings shared by every cell of a grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverDefaults {
    pub kind: PenaltyKind,
    pub mu: f64,
    pub eps: f64,
    pub max_iter: usize,
    /// See [`SolverConfig::residual_tol`].
    pub residual_tol: Option<f64>,
}

impl Default for SolverDefaults {
    fn default() -> Self {
        Self {
            kind: PenaltyKind::Arctangent,
            mu: DEFAULT_MU,
            eps: DEFAULT_EPS,
            max_iter: DEFAULT_MAX_ITER,
            residual_tol: None,
        }
    }
}

/// Full solver configuration for one `(β₀, β₁)` cell.
pub fn config_for(method: Method, rule: &TuningRule, defaults: &SolverDefaults) -> Result<SolverConfig> {
    let (lambda0, lambda1) = lambdas_from_sigma(rule);
    let (a0, a1) = match method {
        Method::Islr => penalties_for_lambdas(rule.c, lambda0, lambda1)?,
        Method::Slr => (0.0, 0.0),
    };
    let cfg = SolverConfig::new(
        lambda0,
        lambda1,
        PenaltyParams::new(defaults.kind, a0)?,
        PenaltyParams::new(defaults.kind, a1)?,
    )
    .mu(defaults.mu)
    .eps(defaults.eps)
    .max_iter(defaults.max_iter)
    .residual_tol(defaults.residual_tol);
    let outcome = validate_config(&cfg);
    if !outcome.accepted() {
        return Err(Error::ConfigRejected(outcome));
    }
    Ok(cfg)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridRow {
    pub beta0: f64,
    pub beta1: f64,
    pub lambda0: f64,
    pub lambda1: f64,
    pub rse: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridReport {
    pub method: Method,
    /// One row per `(β₀, β₁)`, `β₀` outermost, in the order given.
    pub rows: Vec<GridRow>,
    /// Index of the lowest-RSE row.
    pub best: usize,
}

impl GridReport {
    pub fn best_row(&self) -> &GridRow {
        &self.rows[self.best]
    }

    /// `beta0,beta1,lambda0,lambda1,rse` CSV.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "beta0,beta1,lambda0,lambda1,rse")?;
        for r in &self.rows {
            writeln!(
                out,
                "{},{},{:.16e},{:.16e},{:.16e}",
                r.beta0, r.beta1, r.lambda0, r.lambda1, r.rse
            )?;
        }
        Ok(())
    }
}

fn rank_rows(a: &GridRow, b: &GridRow) -> Ordering {
    a.rse
        .total_cmp(&b.rse)
        .then(a.beta0.total_cmp(&b.beta0))
        .then(a.beta1.total_cmp(&b.beta1))
}

/// Solves every `(β₀, β₁)` cell and scores it by RSE against `x_ref`.
///
/// Ties go to the lexicographically smaller `(β₀, β₁)`.
#[allow(clippy::too_many_arguments)]
pub fn grid_search<T: Entry>(
    y: &Matrix<T>,
    x_ref: &Matrix<T>,
    beta0_list: &[f64],
    beta1_list: &[f64],
    c: f64,
    sigma: f64,
    method: Method,
    defaults: &SolverDefaults,
) -> Result<GridReport> {
    if beta0_list.is_empty() || beta1_list.is_empty() {
        return Err(Error::InvalidArgument("beta grids must be nonempty".into()));
    }
    y.ensure_same_shape(x_ref)?;
    let cells: Vec<(f64, f64)> = beta0_list
        .iter()
        .flat_map(|&b0| beta1_list.iter().map(move |&b1| (b0, b1)))
        .collect();
    let rows = cells
        .par_iter()
        .map(|&(beta0, beta1)| {
            let rule = TuningRule { beta0, beta1, c, sigma };
            let cfg = config_for(method, &rule, defaults)?;
            let result = solve_lean(y, &cfg, None)?;
            Ok(GridRow {
                beta0,
                beta1,
                lambda0: cfg.lambda0,
                lambda1: cfg.lambda1,
                rse: rse(&result.x, x_ref)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let best = (0..rows.len())
        .min_by(|&i, &j| rank_rows(&rows[i], &rows[j]))
        .expect("grid is nonempty");
    Ok(GridReport { method, rows, best })
}
