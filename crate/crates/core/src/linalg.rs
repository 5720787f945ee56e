//! Dense real and complex matrices, norms, SVD and singular value shrinkage.
//!
//! Storage is row-major. The decompositions and large products are delegated
//! to `faer`; everything else is plain loops over the entry slice.

use std::fmt::Debug;
use std::ops::{Add, AddAssign, Index, IndexMut, Mul, Neg, Sub, SubAssign};

use faer::Mat;
use num_complex::Complex64;

use crate::penalty::{prox_magnitudes, PenaltyParams};
use crate::{Error, Result};

/// Scalar type a [`Matrix`] can hold: `f64` or `Complex64`.
pub trait Entry:
    Copy
    + Debug
    + PartialEq
    + Send
    + Sync
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
    + AddAssign
    + SubAssign
    + 'static
{
    const ZERO: Self;

    fn from_real(x: f64) -> Self;
    fn scale(self, s: f64) -> Self;
    fn modulus(self) -> f64;
    fn modulus_sqr(self) -> f64;
    fn re(self) -> f64;
    fn conj(self) -> Self;
    fn is_finite(self) -> bool;
    /// Same sign (or phase) as `self` with modulus `m`. Zero maps to `m`.
    fn with_modulus(self, m: f64) -> Self;

    #[doc(hidden)]
    fn thin_svd(x: &Matrix<Self>) -> Result<SvdFactors<Self>>;
    #[doc(hidden)]
    fn sigma_only(x: &Matrix<Self>) -> Result<Vec<f64>>;
    #[doc(hidden)]
    fn matmul(a: &Matrix<Self>, b: &Matrix<Self>) -> Matrix<Self>;
    #[doc(hidden)]
    fn self_adjoint_eigen(x: &Matrix<Self>) -> Result<(Vec<f64>, Matrix<Self>)>;
    #[doc(hidden)]
    fn self_adjoint_eigenvalues(x: &Matrix<Self>) -> Result<Vec<f64>>;
}

impl Entry for f64 {
    const ZERO: Self = 0.0;

    fn from_real(x: f64) -> Self {
        x
    }
    fn scale(self, s: f64) -> Self {
        self * s
    }
    fn modulus(self) -> f64 {
        self.abs()
    }
    fn modulus_sqr(self) -> f64 {
        self * self
    }
    fn re(self) -> f64 {
        self
    }
    fn conj(self) -> Self {
        self
    }
    fn is_finite(self) -> bool {
        f64::is_finite(self)
    }
    fn with_modulus(self, m: f64) -> Self {
        if self < 0.0 && m > 0.0 {
            -m
        } else {
            m
        }
    }
    fn thin_svd(x: &Matrix<Self>) -> Result<SvdFactors<Self>> {
        faer_svd(x)
    }
    fn sigma_only(x: &Matrix<Self>) -> Result<Vec<f64>> {
        faer_singular_values(x)
    }
    fn matmul(a: &Matrix<Self>, b: &Matrix<Self>) -> Matrix<Self> {
        faer_matmul(a, b)
    }
    fn self_adjoint_eigen(x: &Matrix<Self>) -> Result<(Vec<f64>, Matrix<Self>)> {
        faer_self_adjoint_eigen(x)
    }
    fn self_adjoint_eigenvalues(x: &Matrix<Self>) -> Result<Vec<f64>> {
        faer_self_adjoint_eigenvalues(x)
    }
}

impl Entry for Complex64 {
    const ZERO: Self = Complex64::new(0.0, 0.0);

    fn from_real(x: f64) -> Self {
        Complex64::new(x, 0.0)
    }
    fn scale(self, s: f64) -> Self {
        self * s
    }
    fn modulus(self) -> f64 {
        self.norm()
    }
    fn modulus_sqr(self) -> f64 {
        self.norm_sqr()
    }
    fn re(self) -> f64 {
        self.re
    }
    fn conj(self) -> Self {
        Complex64::conj(&self)
    }
    fn is_finite(self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }
    fn with_modulus(self, m: f64) -> Self {
        let r = self.norm();
        if r == 0.0 || m == 0.0 {
            Complex64::new(m, 0.0)
        } else {
            self * (m / r)
        }
    }
    fn thin_svd(x: &Matrix<Self>) -> Result<SvdFactors<Self>> {
        faer_svd(x)
    }
    fn sigma_only(x: &Matrix<Self>) -> Result<Vec<f64>> {
        faer_singular_values(x)
    }
    fn matmul(a: &Matrix<Self>, b: &Matrix<Self>) -> Matrix<Self> {
        faer_matmul(a, b)
    }
    fn self_adjoint_eigen(x: &Matrix<Self>) -> Result<(Vec<f64>, Matrix<Self>)> {
        faer_self_adjoint_eigen(x)
    }
    fn self_adjoint_eigenvalues(x: &Matrix<Self>) -> Result<Vec<f64>> {
        faer_self_adjoint_eigenvalues(x)
    }
}

/// Dense row-major matrix with at least one row and one column.
#[derive(Clone, PartialEq)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

pub type DenseMatrix = Matrix<f64>;
pub type ComplexMatrix = Matrix<Complex64>;

impl<T: Entry> Debug for Matrix<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "Matrix {}x{} [", self.rows, self.cols)?;
        for row in self.data.chunks(self.cols) {
            writeln!(f, "  {row:?}")?;
        }
        write!(f, "]")
    }
}

impl<T: Entry> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows > 0 && cols > 0, "matrix dimensions must be positive");
        Self {
            rows,
            cols,
            data: vec![T::ZERO; rows * cols],
        }
    }

    /// Builds a matrix from row-major entries, checking length and finiteness.
    pub fn from_row_major(rows: usize, cols: usize, data: Vec<T>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidMatrix(format!(
                "dimensions must be positive, got {rows}x{cols}"
            )));
        }
        if data.len() != rows * cols {
            return Err(Error::InvalidMatrix(format!(
                "{rows}x{cols} matrix needs {} entries, got {}",
                rows * cols,
                data.len()
            )));
        }
        if let Some(i) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidMatrix(format!(
                "non-finite entry at ({}, {})",
                i / cols,
                i % cols
            )));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut m = Self::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m.data[i * cols + j] = f(i, j);
            }
        }
        m
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { T::from_real(1.0) } else { T::ZERO })
    }

    /// `rows × cols` matrix with `diag` on the main diagonal.
    pub fn from_diag(rows: usize, cols: usize, diag: &[f64]) -> Self {
        let mut m = Self::zeros(rows, cols);
        for (i, &d) in diag.iter().enumerate().take(rows.min(cols)) {
            m[(i, i)] = T::from_real(d);
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [T] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<T> {
        self.data
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn map<U: Entry>(&self, f: impl Fn(T) -> U) -> Matrix<U> {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&v| f(v)).collect(),
        }
    }

    /// Entrywise combination of two same-shape matrices.
    pub fn zip_map(&self, other: &Self, f: impl Fn(T, T) -> T) -> Result<Self> {
        self.ensure_same_shape(other)?;
        Ok(Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        })
    }

    pub fn ensure_same_shape(&self, other: &Self) -> Result<()> {
        if self.shape() != other.shape() {
            return Err(Error::ShapeMismatch {
                expected: self.shape(),
                found: other.shape(),
            });
        }
        Ok(())
    }

    pub fn scaled(&self, s: f64) -> Self {
        self.map(|v| v.scale(s))
    }

    /// Conjugate transpose (plain transpose for real matrices).
    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    /// Square and bitwise equal to its conjugate transpose.
    pub fn is_self_adjoint(&self) -> bool {
        let n = self.rows;
        n == self.cols && (0..n).all(|i| (i..n).all(|j| self.data[i * n + j] == self.data[j * n + i].conj()))
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::ShapeMismatch {
                expected: (self.cols, other.cols),
                found: other.shape(),
            });
        }
        Ok(T::matmul(self, other))
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|v| v.modulus_sqr()).sum::<f64>().sqrt()
    }

    pub fn entrywise_l1(&self) -> f64 {
        self.data.iter().map(|v| v.modulus()).sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|v| v.modulus()).fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    pub fn count_nonzero(&self) -> usize {
        self.data.iter().filter(|v| **v != T::ZERO).count()
    }

    /// `‖self − other‖_F`.
    pub fn distance(&self, other: &Self) -> Result<f64> {
        self.ensure_same_shape(other)?;
        Ok(self
            .data
            .iter()
            .zip(&other.data)
            .map(|(&a, &b)| (a - b).modulus_sqr())
            .sum::<f64>()
            .sqrt())
    }
}

impl DenseMatrix {
    pub fn from_rows(rows: &[&[f64]]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.len());
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::InvalidMatrix("rows have different lengths".into()));
        }
        Self::from_row_major(rows.len(), cols, rows.concat())
    }

    /// Lifts a real matrix into the complex field.
    pub fn to_complex(&self) -> ComplexMatrix {
        self.map(Complex64::from_real)
    }
}

impl ComplexMatrix {
    pub fn moduli(&self) -> DenseMatrix {
        self.map(|v| v.norm())
    }
}

impl<T> Index<(usize, usize)> for Matrix<T> {
    type Output = T;

    fn index(&self, (i, j): (usize, usize)) -> &T {
        assert!(i < self.rows && j < self.cols, "index ({i}, {j}) out of bounds");
        &self.data[i * self.cols + j]
    }
}

impl<T> IndexMut<(usize, usize)> for Matrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        assert!(i < self.rows && j < self.cols, "index ({i}, {j}) out of bounds");
        &mut self.data[i * self.cols + j]
    }
}

/// Panics on shape mismatch; use [`Matrix::zip_map`] for a checked version.
impl<T: Entry> Add for &Matrix<T> {
    type Output = Matrix<T>;

    fn add(self, rhs: &Matrix<T>) -> Matrix<T> {
        self.zip_map(rhs, |a, b| a + b).expect("matrix shapes differ")
    }
}

/// Panics on shape mismatch; use [`Matrix::zip_map`] for a checked version.
impl<T: Entry> Sub for &Matrix<T> {
    type Output = Matrix<T>;

    fn sub(self, rhs: &Matrix<T>) -> Matrix<T> {
        self.zip_map(rhs, |a, b| a - b).expect("matrix shapes differ")
    }
}

impl<T: Entry> Mul<f64> for &Matrix<T> {
    type Output = Matrix<T>;

    fn mul(self, s: f64) -> Matrix<T> {
        self.scaled(s)
    }
}

fn to_faer<T>(x: &Matrix<T>) -> Mat<T>
where
    T: Entry + faer::traits::ComplexField,
{
    Mat::from_fn(x.rows, x.cols, |i, j| x.data[i * x.cols + j])
}

fn from_faer<T: Entry>(m: faer::MatRef<'_, T>) -> Matrix<T> {
    Matrix::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
}

fn faer_matmul<T>(a: &Matrix<T>, b: &Matrix<T>) -> Matrix<T>
where
    T: Entry + faer::traits::ComplexField,
{
    let (fa, fb) = (to_faer(a), to_faer(b));
    let prod = &fa * &fb;
    from_faer(prod.as_ref())
}

fn faer_svd<T>(x: &Matrix<T>) -> Result<SvdFactors<T>>
where
    T: Entry + faer::traits::ComplexField,
{
    let svd = to_faer(x)
        .thin_svd()
        .map_err(|_| Error::DecompositionFailure)?;
    let sigma: Vec<f64> = svd
        .S()
        .column_vector()
        .iter()
        .map(|s| s.modulus())
        .collect();
    if sigma.iter().any(|s| !s.is_finite()) {
        return Err(Error::DecompositionFailure);
    }
    Ok(SvdFactors {
        u: from_faer(svd.U()),
        sigma,
        v: from_faer(svd.V()),
    })
}

fn faer_self_adjoint_eigen<T>(x: &Matrix<T>) -> Result<(Vec<f64>, Matrix<T>)>
where
    T: Entry + faer::traits::ComplexField<Real = f64>,
{
    let evd = to_faer(x)
        .self_adjoint_eigen(faer::Side::Upper)
        .map_err(|_| Error::DecompositionFailure)?;
    let w: Vec<f64> = evd.S().column_vector().iter().map(|&l| Entry::re(l)).collect();
    if w.iter().any(|l| !l.is_finite()) {
        return Err(Error::DecompositionFailure);
    }
    Ok((w, from_faer(evd.U())))
}

fn faer_self_adjoint_eigenvalues<T>(x: &Matrix<T>) -> Result<Vec<f64>>
where
    T: Entry + faer::traits::ComplexField<Real = f64>,
{
    let w = to_faer(x)
        .self_adjoint_eigenvalues(faer::Side::Upper)
        .map_err(|_| Error::DecompositionFailure)?;
    if w.iter().any(|l| !l.is_finite()) {
        return Err(Error::DecompositionFailure);
    }
    Ok(w)
}

fn faer_singular_values<T>(x: &Matrix<T>) -> Result<Vec<f64>>
where
    T: Entry + faer::traits::ComplexField<Real = f64>,
{
    let mut sigma: Vec<f64> = to_faer(x)
        .singular_values()
        .map_err(|_| Error::DecompositionFailure)?
        .into_iter()
        .map(f64::abs)
        .collect();
    if sigma.iter().any(|s| !s.is_finite()) {
        return Err(Error::DecompositionFailure);
    }
    sigma.sort_by(|a, b| b.total_cmp(a));
    Ok(sigma)
}

/// Thin SVD `X = U · diag(σ) · Vᴴ` with `k = min(m, n)` components.
#[derive(Debug, Clone, PartialEq)]
pub struct SvdFactors<T: Entry> {
    /// `m × k`, orthonormal columns.
    pub u: Matrix<T>,
    /// Nonincreasing, nonnegative.
    pub sigma: Vec<f64>,
    /// `n × k`, orthonormal columns.
    pub v: Matrix<T>,
}

impl<T: Entry> SvdFactors<T> {
    pub fn rank(&self, tol: f64) -> usize {
        self.sigma.iter().filter(|&&s| s > tol).count()
    }

    /// `U · diag(values) · Vᴴ`, skipping components whose value is zero.
    pub fn compose(&self, values: &[f64]) -> Matrix<T> {
        let (m, n) = (self.u.rows, self.v.rows);
        let keep: Vec<usize> = (0..values.len()).filter(|&i| values[i] != 0.0).collect();
        if keep.is_empty() {
            return Matrix::zeros(m, n);
        }
        let r = keep.len();
        let left = Matrix::from_fn(m, r, |i, c| self.u[(i, keep[c])].scale(values[keep[c]]));
        let right = Matrix::from_fn(r, n, |c, j| self.v[(j, keep[c])].conj());
        T::matmul(&left, &right)
    }

    pub fn reconstruct(&self) -> Matrix<T> {
        self.compose(&self.sigma)
    }

    /// Makes the first nonzero entry of every column of `U` real and
    /// nonnegative, rotating the matching column of `V` to compensate.
    fn normalize_signs(&mut self) {
        let k = self.sigma.len();
        for c in 0..k {
            let Some(pivot) = (0..self.u.rows)
                .map(|i| self.u[(i, c)])
                .find(|v| v.modulus() > 1e-12)
            else {
                continue;
            };
            let phase = pivot.with_modulus(1.0);
            if phase == T::from_real(1.0) {
                continue;
            }
            let rot = phase.conj();
            for i in 0..self.u.rows {
                self.u[(i, c)] = self.u[(i, c)] * rot;
            }
            for j in 0..self.v.rows {
                self.v[(j, c)] = self.v[(j, c)] * rot;
            }
        }
    }
}

/// Thin SVD with deterministic sign convention.
pub fn svd<T: Entry>(x: &Matrix<T>) -> Result<SvdFactors<T>> {
    let mut f = T::thin_svd(x)?;
    f.normalize_signs();
    Ok(f)
}

/// Singular values in nonincreasing order, without the vectors.
pub fn singular_values<T: Entry>(x: &Matrix<T>) -> Result<Vec<f64>> {
    if !x.is_self_adjoint() {
        return T::sigma_only(x);
    }
    let mut sigma: Vec<f64> = T::self_adjoint_eigenvalues(x)?.into_iter().map(f64::abs).collect();
    sigma.sort_by(|a, b| b.total_cmp(a));
    Ok(sigma)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NormKind {
    Frobenius,
    EntrywiseL1,
    Nuclear,
}

/// Matrix norm. The nuclear norm is NaN if the SVD fails to converge.
pub fn norm<T: Entry>(x: &Matrix<T>, kind: NormKind) -> f64 {
    match kind {
        NormKind::Frobenius => x.frobenius_norm(),
        NormKind::EntrywiseL1 => x.entrywise_l1(),
        NormKind::Nuclear => singular_values(x).map_or(f64::NAN, |s| s.iter().sum()),
    }
}

/// `U · diag(prox(σᵢ; λ, a)) · Vᴴ`.
pub fn sv_shrink<T: Entry>(x: &Matrix<T>, lambda: f64, p: PenaltyParams) -> Result<Matrix<T>> {
    if x.is_self_adjoint() {
        return self_adjoint_shrink(x, lambda, p);
    }
    let f = svd(x)?;
    let shrunk = prox_magnitudes(&f.sigma, lambda, p)?;
    Ok(f.compose(&shrunk))
}

/// For `X = Q·diag(w)·Qᴴ` the singular values are `|w|`, so shrinking them
/// keeps `Q` and the signs of `w`. The upper triangle is mirrored so the
/// result is exactly self-adjoint again.
fn self_adjoint_shrink<T: Entry>(x: &Matrix<T>, lambda: f64, p: PenaltyParams) -> Result<Matrix<T>> {
    let (w, q) = T::self_adjoint_eigen(x)?;
    let shrunk = prox_magnitudes(&w, lambda, p)?;
    let n = x.rows;
    let keep: Vec<usize> = (0..n).filter(|&c| shrunk[c] != 0.0).collect();
    if keep.is_empty() {
        return Ok(Matrix::zeros(n, n));
    }
    let left = Matrix::from_fn(n, keep.len(), |i, c| q[(i, keep[c])].scale(shrunk[keep[c]].copysign(w[keep[c]])));
    let right = Matrix::from_fn(keep.len(), n, |c, j| q[(j, keep[c])].conj());
    let mut out = T::matmul(&left, &right);
    for i in 0..n {
        for j in 0..i {
            out.data[i * n + j] = out.data[j * n + i].conj();
        }
    }
    Ok(out)
}
