//! Sparse low-rank matrix estimation with parameterized non-convex penalties.
//!
//! The estimator minimizes
//!
//! ```text
//! F(X) = ½‖Y − X‖²_F + λ₀ Σᵢ φ(σᵢ(X); a₀) + λ₁ Σᵢⱼ φ(Xᵢⱼ; a₁)
//! ```
//!
//! where `φ` is a concave-on-(0,∞) penalty whose non-convexity is set by `a`.
//! As long as `a₀λ₀ + a₁λ₁ < 1` the objective stays strictly convex, and a
//! single-splitting ADMM with `μ > 1` converges to its unique minimizer.
//! Setting `a₀ = a₁ = 0` recovers the convex nuclear-norm plus ℓ₁ estimator,
//! and additionally `λ₁ = 0` gives singular value thresholding.
//!
//! Modules:
//! - [`penalty`]: penalty functions and their proximity operators.
//! - [`linalg`]: dense real/complex matrices, norms, SVD, singular value shrinkage.
//! - [`solver`]: objective, convexity checks and the ADMM iteration.
//! - [`tuning`]: λ/a parameter rules and grid search.
//! - [`metrics`]: RSE and SNR.
//! - [`datagen`]: seeded synthetic instances and RSE sweeps.
//! - [`audio`]: STFT/ISTFT and spectrogram denoising.
//! - [`io`]: CSV matrices, edge lists, WAV files, reports.
//! - [`cli`]: the `islr` command-line front end.

pub mod audio;
pub mod cli;
pub mod datagen;
mod error;
pub mod io;
pub mod linalg;
pub mod metrics;
pub mod penalty;
pub mod solver;
pub mod tuning;

pub use error::{Error, Result};
pub use linalg::{ComplexMatrix, DenseMatrix, Matrix, SvdFactors};
pub use penalty::{PenaltyKind, PenaltyParams};
pub use solver::{solve, solve_slr, SolveResult, SolverConfig};

