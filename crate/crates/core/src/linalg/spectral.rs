//! Spectral calculus on Hermitian matrices: matrix functions, fractional
//! powers, the trace norm and PSD / block-PSD tests.

use crate::error::{Error, Result};
use crate::linalg::matrix::{ComplexMatrix, HermitianMatrix};

/// `1e-10 · max(1, ‖M‖_max)`: eigenvalues at or below this are treated as zero
/// and negative eigenvalues above `-psd_tol` are clipped to zero.
pub fn psd_tol(m: &HermitianMatrix) -> f64 {
    1e-10 * m.max_abs().max(1.0)
}

/// `V diag(f(λ)) V†`.
///
/// Eigenvalues in `[-psd_tol, 0)` are clipped to zero first. With
/// `support_only`, `f` is only evaluated on eigenvalues above `psd_tol` and the
/// kernel maps to zero. A non-finite `f(λ)` is reported as a domain error.
pub fn matrix_function(m: &HermitianMatrix, f: impl Fn(f64) -> f64, support_only: bool) -> Result<HermitianMatrix> {
    let es = m.eigen()?;
    let tol = psd_tol(m);
    let mut mapped = Vec::with_capacity(es.dim());
    for &lambda in &es.values {
        let x = if (-tol..0.0).contains(&lambda) { 0.0 } else { lambda };
        let y = if support_only && x <= tol { 0.0 } else { f(x) };
        if !y.is_finite() {
            return Err(Error::Domain(format!("function undefined at eigenvalue {lambda:e}")));
        }
        mapped.push(y);
    }
    Ok(HermitianMatrix::from_eigen(&mapped, &es.vectors))
}

/// Spectral power `M^α` of a PSD matrix.
///
/// `α = 1` returns `M` unchanged. `α = 0` returns the support projector with
/// `support_only`, the identity otherwise. With `support_only`, eigenvalues
/// at or below `psd_tol` map to zero; without it, positive powers are applied
/// to every clipped eigenvalue and negative powers need a positive definite `M`.
pub fn frac_power(m: &HermitianMatrix, alpha: f64, support_only: bool) -> Result<HermitianMatrix> {
    if !alpha.is_finite() {
        return Err(Error::Param(format!("exponent must be finite, got {alpha}")));
    }
    let es = m.eigen()?;
    let tol = psd_tol(m);
    if es.min() < -tol {
        return Err(Error::Domain(format!("fractional power of a matrix with negative eigenvalue {:e}", es.min())));
    }
    if alpha == 1.0 {
        return Ok(m.clone());
    }
    if alpha == 0.0 && !support_only {
        return Ok(HermitianMatrix::identity(m.dim()));
    }
    let mut mapped = Vec::with_capacity(es.dim());
    for &lambda in &es.values {
        let x = lambda.max(0.0);
        let y = if x <= tol && (support_only || alpha <= 0.0) {
            if support_only {
                0.0
            } else {
                return Err(Error::Domain(format!(
                    "negative power {alpha} of a singular matrix (eigenvalue {lambda:e})"
                )));
            }
        } else if alpha == 0.0 {
            1.0
        } else {
            x.powf(alpha)
        };
        mapped.push(y);
    }
    Ok(HermitianMatrix::from_eigen(&mapped, &es.vectors))
}

/// Orthogonal projector onto the span of eigenvectors with eigenvalue above `psd_tol`.
pub fn support_projector(m: &HermitianMatrix) -> Result<HermitianMatrix> {
    frac_power(m, 0.0, true)
}

/// Number of eigenvalues above `psd_tol`.
pub fn numerical_rank(m: &HermitianMatrix) -> Result<usize> {
    let tol = psd_tol(m);
    Ok(m.eigen()?.values.iter().filter(|&&x| x > tol).count())
}

/// `Σ |λᵢ|`.
pub fn trace_norm(m: &HermitianMatrix) -> Result<f64> {
    Ok(m.eigen()?.values.iter().map(|x| x.abs()).sum())
}

pub fn min_eigenvalue(m: &HermitianMatrix) -> Result<f64> {
    Ok(m.eigen()?.min())
}

/// All eigenvalues `≥ -psd_tol`.
pub fn is_psd(m: &HermitianMatrix) -> Result<bool> {
    Ok(min_eigenvalue(m)? >= -psd_tol(m))
}

/// Assembles `[[A11, A12], [A12†, A22]]`.
pub fn block_matrix(a11: &HermitianMatrix, a12: &ComplexMatrix, a22: &HermitianMatrix) -> Result<HermitianMatrix> {
    let (n, m) = (a11.dim(), a22.dim());
    if a12.rows() != n || a12.cols() != m {
        return Err(Error::DimensionMismatch {
            expected: format!("{n}x{m} off-diagonal block"),
            found: format!("{}x{}", a12.rows(), a12.cols()),
        });
    }
    let mut full = ComplexMatrix::zeros(n + m, n + m);
    full.set_block(0, 0, a11.as_matrix());
    full.set_block(0, n, a12);
    full.set_block(n, 0, &a12.adjoint());
    full.set_block(n, n, a22.as_matrix());
    Ok(HermitianMatrix::from_hermitized(full))
}

/// Whether the block matrix `[[A11, A12], [A12†, A22]]` is PSD to `psd_tol`.
pub fn block_psd(a11: &HermitianMatrix, a12: &ComplexMatrix, a22: &HermitianMatrix) -> Result<bool> {
    is_psd(&block_matrix(a11, a12, a22)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn diag(d: &[f64]) -> HermitianMatrix {
        HermitianMatrix::from_diagonal(d)
    }

    #[test]
    fn sqrt_of_diagonal() {
        let r = matrix_function(&diag(&[4.0, 9.0]), f64::sqrt, false).unwrap();
        assert!(r.max_abs_diff(&diag(&[2.0, 3.0])) < 1e-15);
    }

    #[test]
    fn any_power_of_identity() {
        for a in [-1.5, 0.3, 2.0, 7.25] {
            let r = matrix_function(&HermitianMatrix::identity(3), |x| x.powf(a), false).unwrap();
            assert!(r.max_abs_diff(&HermitianMatrix::identity(3)) < 1e-15);
        }
    }

    #[test]
    fn support_restricted_inverse() {
        let r = matrix_function(&diag(&[0.0, 2.0]), |x| 1.0 / x, true).unwrap();
        assert!(r.max_abs_diff(&diag(&[0.0, 0.5])) < 1e-15);
        assert!(matches!(matrix_function(&diag(&[0.0, 2.0]), |x| 1.0 / x, false), Err(Error::Domain(_))));
    }

    #[test]
    fn frac_power_examples() {
        let r = frac_power(&diag(&[4.0, 16.0]), 0.5, false).unwrap();
        assert!(r.max_abs_diff(&diag(&[2.0, 4.0])) < 1e-15);
        let r = frac_power(&diag(&[8.0, 27.0]), 1.0 / 3.0, false).unwrap();
        assert!(r.max_abs_diff(&diag(&[2.0, 3.0])) < 1e-14);
    }

    #[test]
    fn frac_power_one_is_bit_identical() {
        let m = HermitianMatrix::from_real_rows(&[&[0.7, 0.1], &[0.1, 0.3]]).unwrap();
        assert_eq!(frac_power(&m, 1.0, false).unwrap(), m);
    }

    #[test]
    fn frac_power_zero() {
        let m = diag(&[0.0, 2.0]);
        assert!(frac_power(&m, 0.0, true).unwrap().max_abs_diff(&diag(&[0.0, 1.0])) < 1e-15);
        assert_eq!(frac_power(&m, 0.0, false).unwrap(), HermitianMatrix::identity(2));
    }

    #[test]
    fn frac_power_rejects_negative_spectrum() {
        assert!(matches!(frac_power(&diag(&[-1.0, 2.0]), 0.5, false), Err(Error::Domain(_))));
        assert!(matches!(frac_power(&diag(&[0.0, 2.0]), -0.5, false), Err(Error::Domain(_))));
        // tiny negatives are rounding and get clipped
        let r = frac_power(&diag(&[-1e-14, 4.0]), 0.5, false).unwrap();
        assert!(r.max_abs_diff(&diag(&[0.0, 2.0])) < 1e-15);
    }

    #[test]
    fn trace_norm_examples() {
        assert_eq!(trace_norm(&HermitianMatrix::zeros(3)).unwrap(), 0.0);
        assert!((trace_norm(&diag(&[1.0, -1.0])).unwrap() - 2.0).abs() < 1e-15);
    }

    #[test]
    fn block_psd_examples() {
        let i = HermitianMatrix::identity(1);
        assert!(block_psd(&i, &ComplexMatrix::zeros(1, 1), &i).unwrap());
        let two = ComplexMatrix::identity(1).scale(2.0);
        assert!(!block_psd(&i, &two, &i).unwrap());
        let i2 = HermitianMatrix::identity(2);
        assert!(matches!(block_psd(&i2, &ComplexMatrix::zeros(1, 2), &i2), Err(Error::DimensionMismatch { .. })));
    }
}
