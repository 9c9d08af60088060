//! Dense complex matrix algebra.
//!
//! Everything in the crate is carried by [`ComplexMatrix`], a dense
//! `nalgebra` matrix of `Complex64` entries. This module adds the spectral
//! machinery the rest of the crate relies on: a deterministic Hermitian
//! eigendecomposition, PSD square roots, the polar unitary, operator-order
//! tests and partial traces over tensor factors.

use faer::{Mat, Side};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use std::cmp::Ordering;

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type ComplexMatrix = DMatrix<C64>;
pub type ComplexVector = DVector<C64>;

/// Relative reconstruction tolerance for eigendecompositions.
pub const TAU_EIG: f64 = 1e-10;
/// Absolute floor below which a negative eigenvalue is a genuine PSD violation.
pub const TAU_PSD: f64 = 1e-9;

const TIE_TOL: f64 = 1e-12;
const PHASE_TOL: f64 = 1e-10;

#[inline]
pub fn c64(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Builds a matrix from row vectors, rejecting ragged or non-finite input.
pub fn matrix_from_rows(rows: &[Vec<C64>]) -> Result<ComplexMatrix> {
    let nrows = rows.len();
    let ncols = rows.first().map_or(0, Vec::len);
    if let Some(bad) = rows.iter().position(|r| r.len() != ncols) {
        return Err(Error::DimensionMismatch(format!(
            "row {bad} has {} entries, expected {ncols}",
            rows[bad].len()
        )));
    }
    let m = ComplexMatrix::from_fn(nrows, ncols, |i, j| rows[i][j]);
    check_finite(&m)?;
    Ok(m)
}

pub fn check_finite(m: &ComplexMatrix) -> Result<()> {
    for j in 0..m.ncols() {
        for i in 0..m.nrows() {
            let z = m[(i, j)];
            if !z.re.is_finite() || !z.im.is_finite() {
                return Err(Error::NonFinite(i, j));
            }
        }
    }
    Ok(())
}

pub fn identity(n: usize) -> ComplexMatrix {
    ComplexMatrix::identity(n, n)
}

pub fn zeros(n: usize) -> ComplexMatrix {
    ComplexMatrix::zeros(n, n)
}

/// Bit-flip Pauli operator.
pub fn sigma_x() -> ComplexMatrix {
    ComplexMatrix::from_row_slice(2, 2, &[c64(0., 0.), c64(1., 0.), c64(1., 0.), c64(0., 0.)])
}

pub fn sigma_y() -> ComplexMatrix {
    ComplexMatrix::from_row_slice(2, 2, &[c64(0., 0.), c64(0., -1.), c64(0., 1.), c64(0., 0.)])
}

/// Phase-flip Pauli operator.
pub fn sigma_z() -> ComplexMatrix {
    ComplexMatrix::from_row_slice(2, 2, &[c64(1., 0.), c64(0., 0.), c64(0., 0.), c64(-1., 0.)])
}

/// `-i σ₂ = σ₁σ₃`, a phase flip followed by a bit flip. Real-valued.
pub fn minus_i_sigma_y() -> ComplexMatrix {
    ComplexMatrix::from_row_slice(2, 2, &[c64(0., 0.), c64(-1., 0.), c64(1., 0.), c64(0., 0.)])
}

/// `|i⟩⟨j|` on a `dim`-dimensional space.
pub fn basis_outer(dim: usize, i: usize, j: usize) -> ComplexMatrix {
    let mut m = zeros(dim);
    m[(i, j)] = c64(1., 0.);
    m
}

pub fn basis_vector(dim: usize, i: usize) -> ComplexVector {
    let mut v = ComplexVector::zeros(dim);
    v[i] = c64(1., 0.);
    v
}

/// Whether a Hermitian matrix is positive definite, decided by attempting a
/// Cholesky factorization and watching the pivots.
pub fn is_positive_definite(h: &ComplexMatrix) -> bool {
    let n = h.nrows();
    if !h.is_square() {
        return false;
    }
    // Columns of the upper factor are built in place: r[(i, j)] for i <= j.
    let mut r = h.clone();
    for j in 0..n {
        for i in 0..j {
            let mut acc = r[(i, j)];
            for k in 0..i {
                acc -= r[(k, i)].conj() * r[(k, j)];
            }
            r[(i, j)] = acc / r[(i, i)];
        }
        let mut pivot = r[(j, j)].re;
        for k in 0..j {
            pivot -= r[(k, j)].norm_sqr();
        }
        if pivot.is_nan() || pivot <= 0.0 {
            return false;
        }
        r[(j, j)] = Complex64::new(pivot.sqrt(), 0.0);
    }
    true
}

fn to_faer(m: &ComplexMatrix) -> Mat<C64> {
    Mat::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
}

fn from_faer(m: faer::MatRef<'_, C64>) -> ComplexMatrix {
    ComplexMatrix::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
}

/// Matrix product; large products go through a blocked kernel.
pub fn matmul(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    if a.nrows() * a.ncols() * b.ncols() < 32 * 32 * 32 {
        return a * b;
    }
    from_faer((to_faer(a) * to_faer(b)).as_ref())
}

/// Thin singular value decomposition `t = X Σ Y†`, returning `X Y†`.
fn svd_polar_factor(t: &ComplexMatrix) -> Result<ComplexMatrix> {
    let svd = to_faer(t).thin_svd().map_err(|_| Error::NoConvergence)?;
    Ok(matmul(&from_faer(svd.U()), &from_faer(svd.V()).adjoint()))
}

pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    a.kronecker(b)
}

pub fn trace(m: &ComplexMatrix) -> C64 {
    m.diagonal().iter().sum()
}

/// `tr(A† B)`, the trace-norm inner product on operators.
pub fn hs_inner(a: &ComplexMatrix, b: &ComplexMatrix) -> C64 {
    a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum()
}

pub fn max_abs(m: &ComplexMatrix) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

pub fn max_abs_diff(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    assert_eq!(a.shape(), b.shape(), "max_abs_diff shape mismatch");
    a.iter()
        .zip(b.iter())
        .fold(0.0, |acc, (x, y)| acc.max((x - y).norm()))
}

pub fn hermiticity_defect(m: &ComplexMatrix) -> f64 {
    if !m.is_square() {
        return f64::INFINITY;
    }
    let n = m.nrows();
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

/// Largest entry of `U†U - 1`.
pub fn unitarity_defect(u: &ComplexMatrix) -> f64 {
    if !u.is_square() {
        return f64::INFINITY;
    }
    max_abs_diff(&(u.adjoint() * u), &identity(u.nrows()))
}

/// `(M + M†)/2`.
pub fn hermitian_part(m: &ComplexMatrix) -> ComplexMatrix {
    (m + m.adjoint()).scale(0.5)
}

/// Row-major coordinates of an operator, i.e. `tr(τ_{jk}† A) = A_{jk}` at index `j·D + k`.
pub fn flatten_row_major(a: &ComplexMatrix) -> ComplexVector {
    let (r, c) = a.shape();
    ComplexVector::from_fn(r * c, |idx, _| a[(idx / c, idx % c)])
}

pub fn unflatten_row_major(v: &ComplexVector, rows: usize, cols: usize) -> ComplexMatrix {
    assert_eq!(v.len(), rows * cols, "unflatten length mismatch");
    ComplexMatrix::from_fn(rows, cols, |i, j| v[i * cols + j])
}

/// Result of [`eig_hermitian`]: eigenvalues in descending order with
/// orthonormal, phase-normalized eigenvectors as matrix columns.
#[derive(Debug, Clone)]
pub struct HermitianEig {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: ComplexMatrix,
}

impl HermitianEig {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn max(&self) -> f64 {
        self.eigenvalues.first().copied().unwrap_or(0.0)
    }

    pub fn min(&self) -> f64 {
        self.eigenvalues.last().copied().unwrap_or(0.0)
    }

    pub fn vector(&self, k: usize) -> ComplexVector {
        self.eigenvectors.column(k).into_owned()
    }

    /// `V f(w) V†`.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let mut scaled = self.eigenvectors.clone();
        for (k, &w) in self.eigenvalues.iter().enumerate() {
            let fw = f(w);
            scaled.column_mut(k).scale_mut(fw);
        }
        hermitian_part(&(scaled * self.eigenvectors.adjoint()))
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        self.map(|w| w)
    }
}

/// Rotates `v` so that its first entry of magnitude above `PHASE_TOL` is real positive.
pub fn phase_normalize(v: &mut ComplexVector) {
    if let Some(z) = v.iter().find(|z| z.norm() > PHASE_TOL).copied() {
        let phase = z.conj() / z.norm();
        for x in v.iter_mut() {
            *x *= phase;
        }
    }
}

fn lexicographic_desc(a: &ComplexVector, b: &ComplexVector) -> Ordering {
    // Components are compared on a grid of width PHASE_TOL so the order is total.
    let key = |x: f64| (x / PHASE_TOL).round() as i64;
    for (x, y) in a.iter().zip(b.iter()) {
        let ord = key(y.re).cmp(&key(x.re)).then(key(y.im).cmp(&key(x.im)));
        if ord != Ordering::Equal {
            return ord;
        }
    }
    Ordering::Equal
}

/// Hermitian eigendecomposition with a deterministic ordering.
///
/// Eigenvalues come out descending. Eigenvectors are phase-normalized so the
/// first nonzero component is real positive; within a cluster of equal
/// eigenvalues they are ordered lexicographically (descending).
pub fn eig_hermitian(h: &ComplexMatrix, tol: f64) -> Result<HermitianEig> {
    if !h.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "eigendecomposition needs a square matrix, got {}x{}",
            h.nrows(),
            h.ncols()
        )));
    }
    let defect = hermiticity_defect(h);
    if defect > tol {
        return Err(Error::NotHermitian(defect));
    }
    let n = h.nrows();
    if n == 0 {
        return Ok(HermitianEig {
            eigenvalues: vec![],
            eigenvectors: zeros(0),
        });
    }
    let sym = hermitian_part(h);
    let eig = to_faer(&sym)
        .self_adjoint_eigen(Side::Lower)
        .map_err(|_| Error::NoConvergence)?;
    let values = eig.S().column_vector();
    let vectors = from_faer(eig.U());
    if values.iter().any(|w| !w.re.is_finite()) {
        return Err(Error::NoConvergence);
    }

    let mut pairs: Vec<(f64, ComplexVector)> = (0..n)
        .map(|k| {
            let mut v = vectors.column(k).into_owned();
            phase_normalize(&mut v);
            (values[k].re, v)
        })
        .collect();
    pairs.sort_by(|a, b| b.0.total_cmp(&a.0));

    let scale = 1.0 + pairs.iter().fold(0.0f64, |m, p| m.max(p.0.abs()));
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && (pairs[start].0 - pairs[end].0).abs() <= TIE_TOL * scale {
            end += 1;
        }
        if end - start > 1 {
            pairs[start..end].sort_by(|a, b| lexicographic_desc(&a.1, &b.1));
        }
        start = end;
    }

    let mut vectors = zeros(n);
    let mut values = Vec::with_capacity(n);
    for (k, (w, v)) in pairs.into_iter().enumerate() {
        vectors.set_column(k, &v);
        values.push(w);
    }
    Ok(HermitianEig {
        eigenvalues: values,
        eigenvectors: vectors,
    })
}

/// Hermiticity tolerance scaled to the entry size of `a`.
pub fn default_hermitian_tol(a: &ComplexMatrix) -> f64 {
    TAU_PSD * (1.0 + max_abs(a))
}

/// Eigenvalues only, descending.
pub fn eigvals_hermitian(h: &ComplexMatrix) -> Result<Vec<f64>> {
    Ok(eig_hermitian(h, default_hermitian_tol(h))?.eigenvalues)
}

/// Square root of a positive semidefinite matrix; eigenvalues in `[-TAU_PSD, 0)` are clipped.
pub fn sqrt_psd(a: &ComplexMatrix) -> Result<ComplexMatrix> {
    sqrt_psd_with_tol(a, TAU_PSD)
}

pub fn sqrt_psd_with_tol(a: &ComplexMatrix, psd_tol: f64) -> Result<ComplexMatrix> {
    let eig = eig_hermitian(a, default_hermitian_tol(a))?;
    if eig.min() < -psd_tol {
        return Err(Error::NotPsd(eig.min()));
    }
    Ok(eig.map(|w| w.max(0.0).sqrt()))
}

/// Pseudo-inverse square root: `w ↦ 1/√w` on eigenvalues above `cutoff`, zero elsewhere.
pub fn inverse_sqrt_psd(a: &ComplexMatrix, cutoff: f64) -> Result<ComplexMatrix> {
    let eig = eig_hermitian(a, default_hermitian_tol(a))?;
    if eig.min() < -TAU_PSD {
        return Err(Error::NotPsd(eig.min()));
    }
    Ok(eig.map(|w| if w > cutoff { 1.0 / w.sqrt() } else { 0.0 }))
}

/// Unitary factor `U` of the polar decomposition `T = U √(T†T)`.
///
/// Computed from the singular value decomposition `T = X Σ Y†` as `U = X Y†`;
/// on the null space of `T†T` this pairs left and right singular vectors in
/// index order.
pub fn polar_unitary(t: &ComplexMatrix) -> Result<ComplexMatrix> {
    if !t.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "polar decomposition needs a square matrix, got {}x{}",
            t.nrows(),
            t.ncols()
        )));
    }
    check_finite(t)?;
    let n = t.nrows();
    if n == 0 {
        return Ok(zeros(0));
    }
    svd_polar_factor(t)
}

/// `A ≥ B` in operator order: the smallest eigenvalue of `A - B` is at least `-tol`.
pub fn psd_order(a: &ComplexMatrix, b: &ComplexMatrix, tol: f64) -> Result<bool> {
    if a.shape() != b.shape() || !a.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "operator order needs equal square operands, got {:?} and {:?}",
            a.shape(),
            b.shape()
        )));
    }
    let htol = tol.max(default_hermitian_tol(a).max(default_hermitian_tol(b)));
    for m in [a, b] {
        let d = hermiticity_defect(m);
        if d > htol {
            return Err(Error::NotHermitian(d));
        }
    }
    let diff = a - b;
    let eig = eig_hermitian(&diff, 2.0 * htol)?;
    Ok(eig.min() >= -tol)
}

/// Checks that `√A ≥ √B` given `A ≥ B ≥ 0`. A `false` return means the
/// square roots are numerically inaccurate, since the implication always holds.
pub fn verify_sqrt_monotone(a: &ComplexMatrix, b: &ComplexMatrix, tol: f64) -> Result<bool> {
    if !psd_order(a, b, tol)? {
        return Err(Error::Precondition("A >= B does not hold".into()));
    }
    let ra = sqrt_psd(a)?;
    let rb = sqrt_psd(b)?;
    psd_order(&ra, &rb, tol)
}

/// Partial trace over every tensor factor not listed in `keep`.
///
/// `dims` lists the factor dimensions, most significant first. The kept
/// factors appear in the result in their original order.
pub fn partial_trace(m: &ComplexMatrix, dims: &[usize], keep: &[usize]) -> Result<ComplexMatrix> {
    let total: usize = dims.iter().product();
    if !m.is_square() || m.nrows() != total {
        return Err(Error::DimensionMismatch(format!(
            "matrix is {}x{} but factor dimensions multiply to {total}",
            m.nrows(),
            m.ncols()
        )));
    }
    if let Some(&bad) = keep.iter().find(|&&k| k >= dims.len()) {
        return Err(Error::DimensionMismatch(format!(
            "factor index {bad} out of range"
        )));
    }
    let mut strides = vec![1usize; dims.len()];
    for i in (0..dims.len().saturating_sub(1)).rev() {
        strides[i] = strides[i + 1] * dims[i + 1];
    }
    let kept: Vec<usize> = (0..dims.len()).filter(|i| keep.contains(i)).collect();
    let traced: Vec<usize> = (0..dims.len()).filter(|i| !keep.contains(i)).collect();

    // Offsets into the full index space for every multi-index over a factor subset.
    let offsets = |factors: &[usize]| -> Vec<usize> {
        let mut out = vec![0usize];
        for &f in factors {
            let mut next = Vec::with_capacity(out.len() * dims[f]);
            for &base in &out {
                for d in 0..dims[f] {
                    next.push(base + d * strides[f]);
                }
            }
            out = next;
        }
        out
    };
    let kept_off = offsets(&kept);
    let traced_off = offsets(&traced);

    let n = kept_off.len();
    let mut out = zeros(n);
    for (r, &ro) in kept_off.iter().enumerate() {
        for (c, &co) in kept_off.iter().enumerate() {
            out[(r, c)] = traced_off.iter().map(|&t| m[(ro + t, co + t)]).sum();
        }
    }
    Ok(out)
}

/// Orthonormal completion of the columns of `isometry` to a square unitary.
///
/// The complement comes from a Householder QR factorization of
/// `[isometry | 1]`; the leading columns are kept exactly as given.
pub fn complete_to_unitary(isometry: &ComplexMatrix) -> Result<ComplexMatrix> {
    let (n, k) = isometry.shape();
    if k > n {
        return Err(Error::DimensionMismatch(format!(
            "{k} columns cannot be orthonormal in dimension {n}"
        )));
    }
    check_finite(isometry)?;
    if n == 0 {
        return Ok(zeros(0));
    }
    let mut augmented = ComplexMatrix::zeros(n, k + n);
    augmented.columns_mut(0, k).copy_from(isometry);
    augmented.columns_mut(k, n).fill_with_identity();
    let mut q = augmented.qr().q();
    q.columns_mut(0, k).copy_from(isometry);
    Ok(q)
}

/// Isometric factor `X Y†` of a tall matrix `T = X Σ Y†` (thin SVD): the
/// polar factor of `T` restricted to its column space.
pub fn polar_isometry(t: &ComplexMatrix) -> Result<ComplexMatrix> {
    let (rows, cols) = t.shape();
    if cols > rows {
        return Err(Error::DimensionMismatch(format!(
            "polar isometry needs a tall matrix, got {rows}x{cols}"
        )));
    }
    check_finite(t)?;
    if cols == 0 {
        return Ok(ComplexMatrix::zeros(rows, 0));
    }
    svd_polar_factor(t)
}

/// Unitary `U` with `U · domain = image` for two isometries of equal shape.
/// The orthogonal complements are paired through [`complete_to_unitary`].
pub fn unitary_extending(domain: &ComplexMatrix, image: &ComplexMatrix) -> Result<ComplexMatrix> {
    if domain.shape() != image.shape() {
        return Err(Error::DimensionMismatch(format!(
            "isometries of shape {:?} and {:?}",
            domain.shape(),
            image.shape()
        )));
    }
    let from = complete_to_unitary(domain)?;
    let to = complete_to_unitary(image)?;
    Ok(matmul(&to, &from.adjoint()))
}
