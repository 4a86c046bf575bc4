//! Reference computations that avoid the library's mean code paths.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{frac_power, ComplexMatrix, HermitianMatrix};

/// Lower-triangular `L` with `A = L L†`.
pub fn cholesky(a: &HermitianMatrix) -> Result<ComplexMatrix> {
    let n = a.dim();
    let mut l = ComplexMatrix::zeros(n, n);
    for j in 0..n {
        let mut d = a[(j, j)].re;
        for k in 0..j {
            d -= l[(j, k)].norm_sqr();
        }
        if d.is_nan() || d <= 0.0 {
            return Err(Error::Domain(format!("Cholesky pivot {d:e} at column {j}")));
        }
        let djj = d.sqrt();
        l[(j, j)] = Complex64::new(djj, 0.0);
        for i in j + 1..n {
            let mut s = a[(i, j)];
            for k in 0..j {
                s -= l[(i, k)] * l[(j, k)].conj();
            }
            l[(i, j)] = s / djj;
        }
    }
    Ok(l)
}

/// Projector onto `range A ∩ range B`, from the null space of `[A, −B]`:
/// `A u = B v` exactly when `(u, v)` is in it, and `A u` then spans the intersection.
pub fn intersection_projector(a: &HermitianMatrix, b: &HermitianMatrix) -> Result<HermitianMatrix> {
    let n = a.dim();
    let m = ComplexMatrix::from_fn(n, 2 * n, |i, j| if j < n { a[(i, j)] } else { -b[(i, j - n)] });
    let gram = HermitianMatrix::new((&m.adjoint() * &m).hermitian_part())?;
    let es = gram.eigen()?;
    let cutoff = 1e-12 * es.max().max(1.0);
    let null: Vec<usize> = (0..2 * n).filter(|&k| es.values[k] <= cutoff).collect();
    if null.is_empty() {
        return Ok(HermitianMatrix::zeros(n));
    }
    let u = ComplexMatrix::from_fn(n, null.len(), |i, c| es.vectors[(i, null[c])]);
    let x = a.as_matrix() * &u;
    let g = HermitianMatrix::new((&x.adjoint() * &x).hermitian_part())?;
    let g_pinv = frac_power(&g, -1.0, true)?;
    let p = &(&x * g_pinv.as_matrix()) * &x.adjoint();
    HermitianMatrix::new(p.hermitian_part())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cholesky_reconstructs() {
        let a = HermitianMatrix::from_real_rows(&[&[4.0, 2.0], &[2.0, 3.0]]).unwrap();
        let l = cholesky(&a).unwrap();
        assert!((&l * &l.adjoint()).max_abs_diff(a.as_matrix()) < 1e-15);
        assert_eq!(l[(0, 1)], Complex64::new(0.0, 0.0));
    }

    #[test]
    fn intersection_of_coordinate_planes() {
        let a = HermitianMatrix::from_diagonal(&[1.0, 2.0, 0.0]);
        let b = HermitianMatrix::from_diagonal(&[0.0, 5.0, 1.0]);
        let p = intersection_projector(&a, &b).unwrap();
        assert!(p.max_abs_diff(&HermitianMatrix::from_diagonal(&[0.0, 1.0, 0.0])) < 1e-12);
    }
}
