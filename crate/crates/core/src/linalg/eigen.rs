//! Cyclic Jacobi eigensolver for dense complex Hermitian matrices.
//!
//! Each rotation first removes the phase of the pivot `a_pq`, then applies a
//! real Jacobi rotation. Pivots are skipped once they are negligible relative
//! to `sqrt(|a_pp a_qq|)`, which keeps small eigenvalues relatively accurate.
//! Sweep order is fixed, so results are bit-reproducible for a given input.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::matrix::{ComplexMatrix, HermitianMatrix};

pub const MAX_SWEEPS: usize = 100;

/// Eigenvalues in ascending order and the matching orthonormal eigenvectors
/// as the columns of `vectors`.
#[derive(Clone, Debug, PartialEq)]
pub struct EigenSystem {
    pub values: Vec<f64>,
    pub vectors: ComplexMatrix,
}

impl EigenSystem {
    pub fn dim(&self) -> usize {
        self.values.len()
    }

    /// `V diag(λ) V†`.
    pub fn reconstruct(&self) -> HermitianMatrix {
        HermitianMatrix::from_eigen(&self.values, &self.vectors)
    }

    /// `V diag(f(λ)) V†`.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> HermitianMatrix {
        let mapped: Vec<f64> = self.values.iter().map(|&x| f(x)).collect();
        HermitianMatrix::from_eigen(&mapped, &self.vectors)
    }

    pub fn min(&self) -> f64 {
        self.values[0]
    }

    pub fn max(&self) -> f64 {
        *self.values.last().expect("eigen system is never empty")
    }
}

/// Eigendecomposition of a Hermitian matrix.
pub fn eig(m: &HermitianMatrix) -> Result<EigenSystem> {
    m.eigen().cloned()
}

pub(crate) fn jacobi_eigen(m: &ComplexMatrix) -> Result<EigenSystem> {
    let n = m.rows();
    let mut a = m.clone();
    let mut v = ComplexMatrix::identity(n);
    let frob = a.frobenius_norm();
    let floor = 1e-18 * frob;

    let mut converged = n <= 1 || frob == 0.0;
    let mut sweeps = 0;
    while !converged && sweeps < MAX_SWEEPS {
        sweeps += 1;
        let mut rotated = false;
        for p in 0..n - 1 {
            for q in p + 1..n {
                let apq = a[(p, q)];
                let mag = apq.norm();
                let app = a[(p, p)].re;
                let aqq = a[(q, q)].re;
                if mag <= floor || mag <= f64::EPSILON * (app * aqq).abs().sqrt() {
                    continue;
                }
                rotated = true;
                rotate(&mut a, &mut v, p, q, apq, mag, app, aqq);
            }
        }
        converged = !rotated;
    }
    if !converged {
        return Err(Error::NonConvergence { sweeps, off_norm: off_diagonal_norm(&a) });
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.total_cmp(&a[(j, j)].re));
    let values = order.iter().map(|&i| a[(i, i)].re).collect();
    let vectors = ComplexMatrix::from_fn(n, n, |i, j| v[(i, order[j])]);
    Ok(EigenSystem { values, vectors })
}

#[allow(clippy::too_many_arguments)]
fn rotate(
    a: &mut ComplexMatrix,
    v: &mut ComplexMatrix,
    p: usize,
    q: usize,
    apq: Complex64,
    mag: f64,
    app: f64,
    aqq: f64,
) {
    let n = a.rows();
    let phase = apq / mag;
    let theta = (aqq - app) / (2.0 * mag);
    let t = if theta >= 0.0 {
        1.0 / (theta + (theta * theta + 1.0).sqrt())
    } else {
        -1.0 / (-theta + (theta * theta + 1.0).sqrt())
    };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;
    let phase_conj = phase.conj();

    // A <- A J, V <- V J
    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * c - akq * phase_conj * s;
        a[(k, q)] = akp * s + akq * phase_conj * c;
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * c - vkq * phase_conj * s;
        v[(k, q)] = vkp * s + vkq * phase_conj * c;
    }
    // A <- J† A
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = apk * c - aqk * phase * s;
        a[(q, k)] = apk * s + aqk * phase * c;
    }
    a[(p, p)] = Complex64::new(app - t * mag, 0.0);
    a[(q, q)] = Complex64::new(aqq + t * mag, 0.0);
    a[(p, q)] = Complex64::new(0.0, 0.0);
    a[(q, p)] = Complex64::new(0.0, 0.0);
}

fn off_diagonal_norm(a: &ComplexMatrix) -> f64 {
    let n = a.rows();
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                acc += a[(i, j)].norm_sqr();
            }
        }
    }
    acc.sqrt()
}
