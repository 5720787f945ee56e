//! Parameterized non-convex penalties and their proximity operators.
//!
//! Every penalty here is symmetric, increasing and concave on `(0, ∞)`, has
//! unit slope at `0⁺` and curvature `φ″(0⁺) = −a`. The parameter `a ≥ 0` sets
//! the degree of non-convexity; `a = 0` gives `|x|` for every kind.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::linalg::{Entry, Matrix};
use crate::{Error, Result};

const SQRT_3: f64 = 1.732_050_807_568_877_2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PenaltyKind {
    /// `|x| / (1 + a|x|/2)`
    Rational,
    /// `2/(a√3) · (atan((1 + 2a|x|)/√3) − π/6)`
    Arctangent,
    /// `ln(1 + a|x|) / a`
    Logarithmic,
}

impl PenaltyKind {
    pub const ALL: [PenaltyKind; 3] = [
        PenaltyKind::Rational,
        PenaltyKind::Arctangent,
        PenaltyKind::Logarithmic,
    ];
}

impl fmt::Display for PenaltyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PenaltyKind::Rational => "rat",
            PenaltyKind::Arctangent => "atan",
            PenaltyKind::Logarithmic => "log",
        })
    }
}

impl FromStr for PenaltyKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "rat" | "rational" => Ok(PenaltyKind::Rational),
            "atan" | "arctangent" => Ok(PenaltyKind::Arctangent),
            "log" | "logarithmic" => Ok(PenaltyKind::Logarithmic),
            other => Err(Error::InvalidArgument(format!(
                "unknown penalty `{other}` (expected rat, atan or log)"
            ))),
        }
    }
}

/// Penalty family plus its non-convexity parameter `a`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PenaltyParams {
    pub kind: PenaltyKind,
    pub a: f64,
}

impl PenaltyParams {
    pub fn new(kind: PenaltyKind, a: f64) -> Result<Self> {
        if !(a.is_finite() && a >= 0.0) {
            return Err(Error::InvalidArgument(format!(
                "penalty parameter a must be finite and nonnegative, got {a}"
            )));
        }
        Ok(Self { kind, a })
    }

    /// The `a = 0` member of the family, i.e. `|x|`.
    pub fn l1(kind: PenaltyKind) -> Self {
        Self { kind, a: 0.0 }
    }

    pub fn is_convex(&self) -> bool {
        self.a == 0.0
    }

    /// `φ(x; a)`.
    pub fn value(&self, x: f64) -> f64 {
        let t = x.abs();
        let a = self.a;
        if a == 0.0 {
            return t;
        }
        match self.kind {
            PenaltyKind::Rational => t / (1.0 + 0.5 * a * t),
            // atan(u) − atan(1/√3) rewritten with the subtraction formula so
            // small a·|x| does not cancel.
            PenaltyKind::Arctangent => {
                2.0 / (a * SQRT_3) * (SQRT_3 * a * t / (2.0 + a * t)).atan()
            }
            PenaltyKind::Logarithmic => (a * t).ln_1p() / a,
        }
    }

    /// `φ′(x)` for `x > 0`.
    pub fn derivative(&self, x: f64) -> f64 {
        let a = self.a;
        match self.kind {
            PenaltyKind::Rational => {
                let d = 1.0 + 0.5 * a * x;
                1.0 / (d * d)
            }
            PenaltyKind::Arctangent => 1.0 / (1.0 + a * x + a * a * x * x),
            PenaltyKind::Logarithmic => 1.0 / (1.0 + a * x),
        }
    }

    /// `φ″(x)` for `x > 0`.
    pub fn second_derivative(&self, x: f64) -> f64 {
        let a = self.a;
        match self.kind {
            PenaltyKind::Rational => {
                let d = 1.0 + 0.5 * a * x;
                -a / (d * d * d)
            }
            PenaltyKind::Arctangent => {
                let d = 1.0 + a * x + a * a * x * x;
                -(a + 2.0 * a * a * x) / (d * d)
            }
            PenaltyKind::Logarithmic => {
                let d = 1.0 + a * x;
                -a / (d * d)
            }
        }
    }
}

/// `φ(x; a)`.
pub fn phi(x: f64, p: PenaltyParams) -> f64 {
    p.value(x)
}

/// The smooth concave part `s(x; a) = φ(x; a) − |x|`.
pub fn s_part(x: f64, p: PenaltyParams) -> f64 {
    p.value(x) - x.abs()
}

fn check_prox_args(lambda: f64, p: PenaltyParams) -> Result<()> {
    if !(lambda.is_finite() && lambda >= 0.0) {
        return Err(Error::InvalidArgument(format!(
            "threshold λ must be finite and nonnegative, got {lambda}"
        )));
    }
    if !(p.a.is_finite() && p.a >= 0.0) || (lambda > 0.0 && p.a * lambda >= 1.0) {
        return Err(Error::InvalidPenalty { a: p.a, lambda });
    }
    Ok(())
}

/// Prox of a nonnegative magnitude `r`. Arguments must already be checked.
fn prox_magnitude(r: f64, lambda: f64, p: PenaltyParams) -> f64 {
    if r <= lambda {
        return 0.0;
    }
    if lambda == 0.0 {
        return r;
    }
    if p.a == 0.0 {
        return r - lambda;
    }
    // Root of g(x) = x − r + λφ′(x). Since φ′ ≤ 1 the root lies in [r − λ, r],
    // and g is strictly increasing there because 1 + λφ″ ≥ 1 − aλ > 0.
    let g = |x: f64| x - r + lambda * p.derivative(x);
    let tol = 1e-12_f64.max(4.0 * f64::EPSILON * r);
    let (mut lo, mut hi) = (r - lambda, r);
    let mut x = hi;
    for _ in 0..200 {
        let gx = g(x);
        if gx == 0.0 {
            return x;
        }
        if gx > 0.0 {
            hi = x;
        } else {
            lo = x;
        }
        let slope = 1.0 + lambda * p.second_derivative(x);
        let mut next = x - gx / slope;
        if !(next > lo && next < hi) {
            next = 0.5 * (lo + hi);
        }
        if (next - x).abs() <= tol || hi - lo <= tol {
            return next;
        }
        x = next;
    }
    0.5 * (lo + hi)
}

/// Unique minimizer of `½(y − x)² + λφ(x; a)`.
///
/// Requires `a·λ < 1` so the scalar problem is strictly convex. Returns exactly
/// zero for `|y| ≤ λ` and the soft threshold when `a = 0`.
pub fn prox_scalar(y: f64, lambda: f64, p: PenaltyParams) -> Result<f64> {
    check_prox_args(lambda, p)?;
    let r = prox_magnitude(y.abs(), lambda, p);
    Ok(y.with_modulus(r))
}

/// Magnitude shrinkage of a complex value, phase preserved.
pub fn prox_complex(y: Complex64, lambda: f64, p: PenaltyParams) -> Result<Complex64> {
    check_prox_args(lambda, p)?;
    Ok(y.with_modulus(prox_magnitude(y.norm(), lambda, p)))
}

/// Entrywise prox. Complex entries are shrunk in modulus.
pub fn prox_matrix<T: Entry>(y: &Matrix<T>, lambda: f64, p: PenaltyParams) -> Result<Matrix<T>> {
    check_prox_args(lambda, p)?;
    Ok(y.map(|v| v.with_modulus(prox_magnitude(v.modulus(), lambda, p))))
}

/// Shrinks a list of nonnegative magnitudes (e.g. singular values).
pub(crate) fn prox_magnitudes(values: &[f64], lambda: f64, p: PenaltyParams) -> Result<Vec<f64>> {
    check_prox_args(lambda, p)?;
    Ok(values
        .iter()
        .map(|&v| prox_magnitude(v.abs(), lambda, p))
        .collect())
}

/// Tolerance for the finite-difference conformance checks.
pub const CONFORMANCE_TOL: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Property {
    /// `φ(−x) = φ(x)`
    Symmetric,
    /// `φ′(x) > 0` for `x > 0`
    Increasing,
    /// `φ″(x) ≤ 0` for `x > 0`
    Concave,
    /// `φ′(0⁺) = 1`
    UnitSlopeAtZero,
    /// `inf φ″ = φ″(0⁺) = −a`
    CurvatureAtZero,
}

impl fmt::Display for Property {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Property::Symmetric => "symmetric",
            Property::Increasing => "increasing on x>0",
            Property::Concave => "concave on x>0",
            Property::UnitSlopeAtZero => "unit slope at 0+",
            Property::CurvatureAtZero => "curvature -a at 0+",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConformanceCheck {
    pub property: Property,
    pub passed: bool,
    /// Worst observed value of the checked quantity (deviation or extremum).
    pub worst: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConformanceReport {
    pub penalty: PenaltyParams,
    pub checks: Vec<ConformanceCheck>,
    /// Finite-difference estimates at `0⁺`.
    pub slope_at_zero: f64,
    pub curvature_at_zero: f64,
}

impl ConformanceReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn check(&self, property: Property) -> Option<&ConformanceCheck> {
        self.checks.iter().find(|c| c.property == property)
    }
}

impl fmt::Display for ConformanceReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "penalty {} a={}", self.penalty.kind, self.penalty.a)?;
        for c in &self.checks {
            writeln!(
                f,
                "  {:<22} {:<4} worst={:.3e}",
                c.property.to_string(),
                if c.passed { "ok" } else { "FAIL" },
                c.worst
            )?;
        }
        Ok(())
    }
}

fn fd_first(f: &impl Fn(f64) -> f64, x: f64, h: f64) -> f64 {
    (f(x + h) - f(x - h)) / (2.0 * h)
}

fn fd_second(f: &impl Fn(f64) -> f64, x: f64, h: f64) -> f64 {
    (f(x + h) - 2.0 * f(x) + f(x - h)) / (h * h)
}

/// One-sided estimate of `f′(0⁺)`, second order in `h`.
fn slope_at_zero_fd(f: &impl Fn(f64) -> f64) -> f64 {
    let h = 1e-5;
    (-3.0 * f(0.0) + 4.0 * f(h) - f(2.0 * h)) / (2.0 * h)
}

/// Estimate of `f″(0⁺)` from central differences at two small abscissae,
/// linearly extrapolated to zero.
fn curvature_at_zero_fd(f: &impl Fn(f64) -> f64) -> f64 {
    let h = 1e-4;
    let near = fd_second(f, 4.0 * h, h);
    let far = fd_second(f, 8.0 * h, h);
    2.0 * near - far
}

/// Finite-difference check of the penalty requirements on a grid of positive
/// abscissae.
pub fn check_assumption1(p: PenaltyParams, grid: &[f64]) -> Result<ConformanceReport> {
    let (checks, slope_at_zero, curvature_at_zero) = conformance(|x| p.value(x), p.a, grid)?;
    Ok(ConformanceReport {
        penalty: p,
        checks,
        slope_at_zero,
        curvature_at_zero,
    })
}

/// The conformance checks for an arbitrary scalar function `f` claimed to
/// have curvature `−a` at `0⁺`.
fn conformance(
    f: impl Fn(f64) -> f64,
    a: f64,
    grid: &[f64],
) -> Result<(Vec<ConformanceCheck>, f64, f64)> {
    if grid.is_empty() {
        return Err(Error::InvalidArgument("conformance grid is empty".into()));
    }
    if let Some(bad) = grid.iter().find(|x| !(x.is_finite() && **x > 0.0)) {
        return Err(Error::InvalidArgument(format!(
            "conformance grid must be strictly positive, found {bad}"
        )));
    }
    let tol = CONFORMANCE_TOL;
    let mut asym: f64 = 0.0;
    let mut min_slope = f64::INFINITY;
    let mut max_curv = f64::NEG_INFINITY;
    let mut min_curv = f64::INFINITY;
    for &x in grid {
        asym = asym.max((f(-x) - f(x)).abs());
        let h1 = (1e-6 * x.max(1.0)).min(0.5 * x);
        min_slope = min_slope.min(fd_first(&f, x, h1));
        let h2 = (1e-4 * x.max(1.0)).min(0.5 * x);
        let c = fd_second(&f, x, h2);
        max_curv = max_curv.max(c);
        min_curv = min_curv.min(c);
    }
    let slope0 = slope_at_zero_fd(&f);
    let curv0 = curvature_at_zero_fd(&f);
    // The infimum of φ″ must be attained at 0⁺: nothing on the grid may sit
    // below it.
    let curv_dev = (curv0 + a).abs().max((-a - min_curv).max(0.0));
    let checks = vec![
        ConformanceCheck {
            property: Property::Symmetric,
            passed: asym <= tol,
            worst: asym,
        },
        ConformanceCheck {
            property: Property::Increasing,
            passed: min_slope > 0.0,
            worst: min_slope,
        },
        ConformanceCheck {
            property: Property::Concave,
            passed: max_curv <= tol,
            worst: max_curv,
        },
        ConformanceCheck {
            property: Property::UnitSlopeAtZero,
            passed: (slope0 - 1.0).abs() <= tol,
            worst: (slope0 - 1.0).abs(),
        },
        ConformanceCheck {
            property: Property::CurvatureAtZero,
            passed: curv_dev <= tol,
            worst: curv_dev,
        },
    ];
    Ok((checks, slope0, curv0))
}

/// Log-spaced grid on `[lo, hi]`, used as the default conformance grid.
pub fn log_grid(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    let (l, h) = (lo.ln(), hi.ln());
    (0..points)
        .map(|i| (l + (h - l) * i as f64 / (points - 1).max(1) as f64).exp())
        .collect()
}
