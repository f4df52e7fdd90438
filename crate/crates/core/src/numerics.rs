//! Minimal dense complex linear algebra.
//!
//! Only what the equalizers need: Gram matrices, Hermitian positive-definite
//! solves via Cholesky, matrix-vector products in both orientations and a
//! power-iteration estimate of the largest eigenvalue of `H^H H`.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Deref, DerefMut};

use num_complex::Complex64;
#[allow(unused_imports)] // inherent float methods shadow these when std is linked
use num_traits::Float;
use thiserror::Error;

/// Errors raised by the linear algebra routines.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum NumericsError {
    /// A Cholesky pivot was not strictly positive.
    #[error("matrix is not positive definite (pivot {pivot} <= 0)")]
    NotPositiveDefinite {
        /// Index of the offending pivot.
        pivot: usize,
    },
    /// Operand shapes do not agree.
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch {
        /// Expected size.
        expected: usize,
        /// Actual size.
        got: usize,
    },
    /// An entry was NaN or infinite.
    #[error("non-finite entry at index {index}")]
    NonFinite {
        /// Flat index of the first bad entry.
        index: usize,
    },
}

/// Conjugate inner product `a^H b`.
#[inline]
pub fn dot_h(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    debug_assert_eq!(a.len(), b.len());
    let mut re = 0.0;
    let mut im = 0.0;
    for (x, y) in a.iter().zip(b) {
        re += x.re * y.re + x.im * y.im;
        im += x.re * y.im - x.im * y.re;
    }
    Complex64::new(re, im)
}

/// Squared Euclidean norm `||a||^2`.
#[inline]
pub fn norm_sqr(a: &[Complex64]) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum()
}

/// Dense complex column vector.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct CVector(Vec<Complex64>);

impl CVector {
    /// All-zero vector of length `n`.
    pub fn zeros(n: usize) -> Self {
        Self(vec![Complex64::new(0.0, 0.0); n])
    }

    /// The `k`th standard basis vector of length `n`.
    pub fn basis(n: usize, k: usize) -> Self {
        let mut v = Self::zeros(n);
        v.0[k] = Complex64::new(1.0, 0.0);
        v
    }

    /// Builds a vector, rejecting NaN/Inf entries.
    pub fn try_from_vec(entries: Vec<Complex64>) -> Result<Self, NumericsError> {
        if let Some(index) = entries.iter().position(|z| !z.is_finite()) {
            return Err(NumericsError::NonFinite { index });
        }
        Ok(Self(entries))
    }

    /// Vector from real/imaginary pairs.
    pub fn from_parts(parts: &[(f64, f64)]) -> Self {
        Self(parts.iter().map(|&(re, im)| Complex64::new(re, im)).collect())
    }

    /// Squared Euclidean norm.
    pub fn norm_sqr(&self) -> f64 {
        norm_sqr(&self.0)
    }

    /// `self^H other`.
    pub fn dot_h(&self, other: &[Complex64]) -> Complex64 {
        dot_h(&self.0, other)
    }

    /// Returns `alpha * self`.
    pub fn scaled(&self, alpha: Complex64) -> Self {
        Self(self.0.iter().map(|z| z * alpha).collect())
    }

    /// True if every entry is finite.
    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|z| z.is_finite())
    }

    /// Consumes the vector, returning its entries.
    pub fn into_inner(self) -> Vec<Complex64> {
        self.0
    }
}

impl From<Vec<Complex64>> for CVector {
    fn from(v: Vec<Complex64>) -> Self {
        Self(v)
    }
}

impl FromIterator<Complex64> for CVector {
    fn from_iter<I: IntoIterator<Item = Complex64>>(iter: I) -> Self {
        Self(iter.into_iter().collect())
    }
}

impl Deref for CVector {
    type Target = [Complex64];
    fn deref(&self) -> &[Complex64] {
        &self.0
    }
}

impl DerefMut for CVector {
    fn deref_mut(&mut self) -> &mut [Complex64] {
        &mut self.0
    }
}

/// Dense complex matrix stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl CMatrix {
    /// All-zero `rows x cols` matrix.
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![Complex64::new(0.0, 0.0); rows * cols],
        }
    }

    /// `n x n` identity.
    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    /// Builds a matrix from row-major entries.
    pub fn from_row_major(
        rows: usize,
        cols: usize,
        data: Vec<Complex64>,
    ) -> Result<Self, NumericsError> {
        if data.len() != rows * cols {
            return Err(NumericsError::DimensionMismatch {
                expected: rows * cols,
                got: data.len(),
            });
        }
        if let Some(index) = data.iter().position(|z| !z.is_finite()) {
            return Err(NumericsError::NonFinite { index });
        }
        Ok(Self { rows, cols, data })
    }

    /// Builds a matrix by evaluating `f(row, col)`.
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Self { rows, cols, data }
    }

    /// Real diagonal matrix.
    pub fn from_diag(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len(), diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = Complex64::new(d, 0.0);
        }
        m
    }

    /// Number of rows.
    pub fn rows(&self) -> usize {
        self.rows
    }

    /// Number of columns.
    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Row-major entries.
    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    /// Mutable row-major entries.
    pub fn as_mut_slice(&mut self) -> &mut [Complex64] {
        &mut self.data
    }

    /// Row `r` as a slice.
    pub fn row(&self, r: usize) -> &[Complex64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    /// Column `c` copied into a vector.
    pub fn col(&self, c: usize) -> CVector {
        CVector((0..self.rows).map(|r| self.data[r * self.cols + c]).collect())
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self[(c, r)].conj())
    }

    /// `self * v`.
    pub fn mul_vec(&self, v: &[Complex64]) -> CVector {
        let mut out = CVector::zeros(self.rows);
        self.mul_vec_into(v, &mut out);
        out
    }

    /// `out = self * v`.
    pub fn mul_vec_into(&self, v: &[Complex64], out: &mut [Complex64]) {
        assert_eq!(v.len(), self.cols);
        assert_eq!(out.len(), self.rows);
        for (r, o) in out.iter_mut().enumerate() {
            let row = self.row(r);
            let mut re = 0.0;
            let mut im = 0.0;
            for (a, b) in row.iter().zip(v) {
                re += a.re * b.re - a.im * b.im;
                im += a.re * b.im + a.im * b.re;
            }
            *o = Complex64::new(re, im);
        }
    }

    /// `self^H * v`, without forming the adjoint.
    pub fn adjoint_mul_vec(&self, v: &[Complex64]) -> CVector {
        let mut out = CVector::zeros(self.cols);
        self.adjoint_mul_vec_into(v, &mut out);
        out
    }

    /// `out = self^H * v`.
    pub fn adjoint_mul_vec_into(&self, v: &[Complex64], out: &mut [Complex64]) {
        assert_eq!(v.len(), self.rows);
        assert_eq!(out.len(), self.cols);
        out.iter_mut().for_each(|z| *z = Complex64::new(0.0, 0.0));
        for (r, vr) in v.iter().enumerate() {
            for (o, a) in out.iter_mut().zip(self.row(r)) {
                // conj(a) * vr
                o.re += a.re * vr.re + a.im * vr.im;
                o.im += a.re * vr.im - a.im * vr.re;
            }
        }
    }

    /// Matrix product `self * other`.
    pub fn mul(&self, other: &CMatrix) -> Result<CMatrix, NumericsError> {
        if self.cols != other.rows {
            return Err(NumericsError::DimensionMismatch {
                expected: self.cols,
                got: other.rows,
            });
        }
        let mut out = CMatrix::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(r, k)];
                let orow = other.row(k);
                let dst = &mut out.data[r * other.cols..(r + 1) * other.cols];
                for (d, b) in dst.iter_mut().zip(orow) {
                    *d += a * b;
                }
            }
        }
        Ok(out)
    }

    /// Frobenius norm.
    pub fn frobenius_norm(&self) -> f64 {
        norm_sqr(&self.data).sqrt()
    }

    /// Entrywise `self - other` Frobenius norm.
    pub fn frobenius_distance(&self, other: &CMatrix) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// True if every entry is finite.
    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.is_finite())
    }

    /// Scales column `c` in place by the real factor `alpha`.
    pub fn scale_col(&mut self, c: usize, alpha: f64) {
        for r in 0..self.rows {
            self.data[r * self.cols + c] *= alpha;
        }
    }
}

impl core::ops::Index<(usize, usize)> for CMatrix {
    type Output = Complex64;
    #[inline]
    fn index(&self, (r, c): (usize, usize)) -> &Complex64 {
        &self.data[r * self.cols + c]
    }
}

impl core::ops::IndexMut<(usize, usize)> for CMatrix {
    #[inline]
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut Complex64 {
        &mut self.data[r * self.cols + c]
    }
}

/// Gram matrix `H^H H`.
///
/// Only the upper triangle is accumulated; the lower triangle is filled with
/// conjugates, so the result is Hermitian bit-for-bit.
pub fn gram(h: &CMatrix) -> CMatrix {
    let u = h.cols();
    let mut g = CMatrix::zeros(u, u);
    for b in 0..h.rows() {
        let row = h.row(b);
        for i in 0..u {
            let hi = row[i].conj();
            for (j, &hj) in row.iter().enumerate().take(u).skip(i) {
                g.data[i * u + j] += hi * hj;
            }
        }
    }
    for i in 0..u {
        g.data[i * u + i].im = 0.0;
        for j in (i + 1)..u {
            g.data[j * u + i] = g.data[i * u + j].conj();
        }
    }
    g
}

/// Square-root-free Cholesky factorization `A = L D L^H`.
///
/// Returns the unit lower-triangular `L` (diagonal not stored, reads as
/// one) and the real pivots `D`.
pub fn ldl(a: &CMatrix) -> Result<(CMatrix, Vec<f64>), NumericsError> {
    let n = a.rows();
    if a.cols() != n {
        return Err(NumericsError::DimensionMismatch {
            expected: n,
            got: a.cols(),
        });
    }
    let mut l = CMatrix::zeros(n, n);
    let mut d = vec![0.0; n];
    for j in 0..n {
        let mut dj = a[(j, j)].re;
        for k in 0..j {
            dj -= l[(j, k)].norm_sqr() * d[k];
        }
        if !(dj > 0.0) {
            return Err(NumericsError::NotPositiveDefinite { pivot: j });
        }
        d[j] = dj;
        for i in (j + 1)..n {
            let mut s = a[(i, j)];
            for k in 0..j {
                s -= l[(i, k)] * l[(j, k)].conj() * d[k];
            }
            l[(i, j)] = s / dj;
        }
    }
    Ok((l, d))
}

/// Solves `A X = B` for Hermitian positive-definite `A` (`U x U`) and
/// `B` (`U x k`).
pub fn hpd_solve(a: &CMatrix, b: &CMatrix) -> Result<CMatrix, NumericsError> {
    let n = a.rows();
    if b.rows() != n {
        return Err(NumericsError::DimensionMismatch {
            expected: n,
            got: b.rows(),
        });
    }
    let (l, d) = ldl(a)?;
    let k = b.cols();
    let mut x = b.clone();
    // L Z = B, row-oriented so whole rows of X are updated at once.
    for i in 0..n {
        for p in 0..i {
            let lip = l[(i, p)];
            for c in 0..k {
                let zp = x.data[p * k + c];
                x.data[i * k + c] -= lip * zp;
            }
        }
    }
    for (i, &di) in d.iter().enumerate() {
        for c in 0..k {
            x.data[i * k + c] /= di;
        }
    }
    // L^H X = D^{-1} Z
    for i in (0..n).rev() {
        for p in (i + 1)..n {
            let lpi = l[(p, i)].conj();
            for c in 0..k {
                let xp = x.data[p * k + c];
                x.data[i * k + c] -= lpi * xp;
            }
        }
    }
    Ok(x)
}

/// Power-iteration estimate of `lambda_max(H^H H)` (the squared spectral
/// norm of `H`), running `iters >= 1` iterations.
///
/// The start vector is fixed, so the estimate is deterministic.
pub fn spectral_norm_sq_estimate(h: &CMatrix, iters: usize) -> f64 {
    let u = h.cols();
    let mut v: CVector = (0..u)
        .map(|i| Complex64::new(1.0 + i as f64 / (u as f64 + 1.0), 0.0))
        .collect::<Vec<_>>()
        .into();
    let mut hv = CVector::zeros(h.rows());
    let mut w = CVector::zeros(u);
    let mut estimate = 0.0;
    for _ in 0..iters.max(1) {
        let nv = v.norm_sqr().sqrt();
        if nv == 0.0 {
            return 0.0;
        }
        v.iter_mut().for_each(|z| *z /= nv);
        h.mul_vec_into(&v, &mut hv);
        // Rayleigh quotient v^H H^H H v with ||v|| = 1.
        estimate = hv.norm_sqr();
        h.adjoint_mul_vec_into(&hv, &mut w);
        core::mem::swap(&mut v, &mut w);
    }
    estimate
}
