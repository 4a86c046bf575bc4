use std::ops::{Add, Index, IndexMut, Mul, Sub};
use std::sync::OnceLock;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::eigen::{self, EigenSystem};

pub(crate) const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub(crate) const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Relative Hermiticity tolerance accepted by [`HermitianMatrix::new`].
pub const HERM_TOL: f64 = 1e-10;

/// Dense row-major complex matrix.
///
/// Square in almost every use; Kraus operators of dimension-changing
/// channels are the exception.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![ZERO; rows * cols] }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim, dim);
        for i in 0..dim {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    /// Builds a matrix from row-major entries. Rejects NaN/Inf.
    pub fn from_row_major(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                expected: format!("{} entries", rows * cols),
                found: format!("{} entries", data.len()),
            });
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self { rows, cols, data })
    }

    /// Real diagonal matrix.
    pub fn from_diagonal(diag: &[f64]) -> Self {
        let n = diag.len();
        let mut m = Self::zeros(n, n);
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = Complex64::new(d, 0.0);
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn scale(&self, s: f64) -> Self {
        Self { rows: self.rows, cols: self.cols, data: self.data.iter().map(|z| z * s).collect() }
    }

    pub fn scale_complex(&self, s: Complex64) -> Self {
        Self { rows: self.rows, cols: self.cols, data: self.data.iter().map(|z| z * s).collect() }
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Max-norm of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data.iter().zip(&other.data).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    /// `(M + M†)/2`.
    pub fn hermitian_part(&self) -> Self {
        assert!(self.is_square());
        Self::from_fn(self.rows, self.cols, |i, j| (self[(i, j)] + self[(j, i)].conj()) * 0.5)
    }

    /// Kronecker product `self ⊗ other`.
    pub fn kron(&self, other: &Self) -> Self {
        let (r2, c2) = (other.rows, other.cols);
        Self::from_fn(self.rows * r2, self.cols * c2, |i, j| self[(i / r2, j / c2)] * other[(i % r2, j % c2)])
    }

    pub fn column(&self, j: usize) -> Vec<Complex64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn try_mul(&self, rhs: &Self) -> Result<Self> {
        if self.cols != rhs.rows {
            return Err(Error::DimensionMismatch {
                expected: format!("{} rows", self.cols),
                found: format!("{} rows", rhs.rows),
            });
        }
        Ok(self.mul_unchecked(rhs))
    }

    fn mul_unchecked(&self, rhs: &Self) -> Self {
        let (n, k, m) = (self.rows, self.cols, rhs.cols);
        let mut out = vec![ZERO; n * m];
        for i in 0..n {
            let row = &self.data[i * k..(i + 1) * k];
            let out_row = &mut out[i * m..(i + 1) * m];
            for (l, a) in row.iter().enumerate() {
                if *a == ZERO {
                    continue;
                }
                let rhs_row = &rhs.data[l * m..(l + 1) * m];
                for (o, b) in out_row.iter_mut().zip(rhs_row) {
                    *o += a * b;
                }
            }
        }
        Self { rows: n, cols: m, data: out }
    }

    /// Embeds a square block at `(row, col)` of a larger matrix.
    pub(crate) fn set_block(&mut self, row: usize, col: usize, block: &Self) {
        for i in 0..block.rows {
            for j in 0..block.cols {
                self[(row + i, col + j)] = block[(i, j)];
            }
        }
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.cols + j]
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;

    /// Panics on non-conformable shapes; use [`ComplexMatrix::try_mul`] for
    /// untrusted inputs.
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.cols, rhs.rows, "non-conformable matrix product");
        self.mul_unchecked(rhs)
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

/// Square Hermitian matrix, stored in exactly Hermitized form, with a lazily
/// computed eigendecomposition.
#[derive(Clone, Debug)]
pub struct HermitianMatrix {
    mat: ComplexMatrix,
    eig: OnceLock<EigenSystem>,
}

impl PartialEq for HermitianMatrix {
    fn eq(&self, other: &Self) -> bool {
        self.mat == other.mat
    }
}

impl HermitianMatrix {
    /// Validates Hermiticity to `HERM_TOL · max(1, ‖M‖_max)` and stores `(M + M†)/2`.
    pub fn new(mat: ComplexMatrix) -> Result<Self> {
        if !mat.is_square() {
            return Err(Error::NotSquare { rows: mat.rows, cols: mat.cols });
        }
        if mat.rows == 0 {
            return Err(Error::Param("dimension must be positive".into()));
        }
        if mat.data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        let asym = mat.max_abs_diff(&mat.adjoint());
        if asym > HERM_TOL * mat.max_abs().max(1.0) {
            return Err(Error::NotHermitian(asym));
        }
        Ok(Self::from_hermitized(mat))
    }

    /// Hermitizes without checking. Used for products that are Hermitian up to rounding.
    pub(crate) fn from_hermitized(mat: ComplexMatrix) -> Self {
        Self { mat: mat.hermitian_part(), eig: OnceLock::new() }
    }

    pub fn identity(dim: usize) -> Self {
        Self::from_hermitized(ComplexMatrix::identity(dim))
    }

    pub fn zeros(dim: usize) -> Self {
        Self::from_hermitized(ComplexMatrix::zeros(dim, dim))
    }

    pub fn from_diagonal(diag: &[f64]) -> Self {
        Self::from_hermitized(ComplexMatrix::from_diagonal(diag))
    }

    /// Real symmetric matrix from rows.
    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        let n = rows.len();
        let data = rows.iter().flat_map(|r| r.iter().map(|&x| Complex64::new(x, 0.0))).collect();
        Self::new(ComplexMatrix::from_row_major(n, n, data)?)
    }

    /// `V diag(λ) V†`.
    pub fn from_eigen(values: &[f64], vectors: &ComplexMatrix) -> Self {
        let n = values.len();
        let scaled = ComplexMatrix::from_fn(n, n, |i, j| vectors[(i, j)] * values[j]);
        Self::from_hermitized(&scaled * &vectors.adjoint())
    }

    pub fn dim(&self) -> usize {
        self.mat.rows
    }

    pub fn as_matrix(&self) -> &ComplexMatrix {
        &self.mat
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.mat
    }

    pub fn trace(&self) -> f64 {
        self.mat.trace().re
    }

    pub fn max_abs(&self) -> f64 {
        self.mat.max_abs()
    }

    /// Cached eigendecomposition.
    pub fn eigen(&self) -> Result<&EigenSystem> {
        if let Some(e) = self.eig.get() {
            return Ok(e);
        }
        let computed = eigen::jacobi_eigen(&self.mat)?;
        let _ = self.eig.set(computed);
        Ok(self.eig.get().expect("eigen cache was just set"))
    }

    pub fn add(&self, other: &Self) -> Self {
        Self::from_hermitized(&self.mat + &other.mat)
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self::from_hermitized(&self.mat - &other.mat)
    }

    pub fn scale(&self, s: f64) -> Self {
        Self::from_hermitized(self.mat.scale(s))
    }

    pub fn kron(&self, other: &Self) -> Self {
        Self::from_hermitized(self.mat.kron(&other.mat))
    }

    /// `C† M C`, Hermitized.
    pub fn congruence(&self, c: &ComplexMatrix) -> Self {
        Self::from_hermitized(&(&c.adjoint() * &self.mat) * c)
    }

    /// `X M X` for Hermitian `X`, Hermitized.
    pub fn sandwich(&self, outer: &HermitianMatrix) -> Self {
        Self::from_hermitized(&(&outer.mat * &self.mat) * &outer.mat)
    }

    /// `Tr(self · other)` for Hermitian operands (real up to rounding).
    pub fn trace_product(&self, other: &Self) -> f64 {
        let n = self.dim();
        let mut acc = 0.0;
        for i in 0..n {
            for j in 0..n {
                acc += (self.mat[(i, j)] * other.mat[(j, i)]).re;
            }
        }
        acc
    }

    /// Max-norm distance.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.mat.max_abs_diff(&other.mat)
    }
}

impl Index<(usize, usize)> for HermitianMatrix {
    type Output = Complex64;

    fn index(&self, idx: (usize, usize)) -> &Complex64 {
        &self.mat[idx]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn rejects_non_hermitian() {
        let m = ComplexMatrix::from_row_major(2, 2, vec![c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]).unwrap();
        assert!(matches!(HermitianMatrix::new(m), Err(Error::NotHermitian(_))));
    }

    #[test]
    fn rejects_non_finite_entries() {
        let r = ComplexMatrix::from_row_major(1, 1, vec![c(f64::NAN, 0.0)]);
        assert!(matches!(r, Err(Error::NonFinite)));
    }

    #[test]
    fn stores_exact_hermitian_part() {
        let m =
            ComplexMatrix::from_row_major(2, 2, vec![c(1.0, 1e-14), c(2.0, 3.0), c(2.0, -3.0 + 1e-13), c(4.0, 0.0)])
                .unwrap();
        let h = HermitianMatrix::new(m).unwrap();
        assert_eq!(h[(0, 0)].im, 0.0);
        assert_eq!(h[(0, 1)], h[(1, 0)].conj());
    }

    #[test]
    fn kron_of_identities_is_identity() {
        let k = ComplexMatrix::identity(2).kron(&ComplexMatrix::identity(3));
        assert_eq!(k, ComplexMatrix::identity(6));
    }

    #[test]
    fn product_shape_checked() {
        let a = ComplexMatrix::zeros(2, 3);
        assert!(a.try_mul(&ComplexMatrix::zeros(2, 2)).is_err());
        assert_eq!(a.try_mul(&ComplexMatrix::zeros(3, 1)).unwrap().cols(), 1);
    }
}
