//! Operator means on the PSD cone: the geometric mean `A♯B`, the spectral
//! mean `A♮B` and the weighted spectral mean `A♮ₜB = (A⁻¹♯B)ᵗ A (A⁻¹♯B)ᵗ`.
//!
//! Two conventions are available for singular inputs:
//!
//! * [`geometric_mean`] is the Kubo–Ando mean (the limit of `(A+εI)♯(B+εI)`),
//!   supported exactly on `supp A ∩ supp B`.
//! * The `*_on_support` / [`inverse_geometric_mean`] family evaluates the
//!   defining formula with every inverse and fractional power of the first
//!   argument taken on its support. This is the convention under which the
//!   pure-state closed forms of the fidelities hold, and it is what the
//!   fidelity functionals use.
//!
//! For positive definite inputs the two agree.

use crate::error::{Error, Result};
use crate::linalg::{frac_power, psd_tol, support_projector, ComplexMatrix, HermitianMatrix};

/// Default mixing weight of the ε-regularization path.
pub const DEFAULT_EPSILON: f64 = 1e-8;

/// A pair of PSD matrices of equal dimension, with strict-positivity flags.
#[derive(Clone, Debug)]
pub struct PositivePair {
    pub a: HermitianMatrix,
    pub b: HermitianMatrix,
    pub a_definite: bool,
    pub b_definite: bool,
}

impl PositivePair {
    pub fn new(a: HermitianMatrix, b: HermitianMatrix) -> Result<Self> {
        check_same_dim(&a, &b)?;
        let a_definite = definiteness(&a)?;
        let b_definite = definiteness(&b)?;
        Ok(Self { a, b, a_definite, b_definite })
    }

    pub fn geometric_mean(&self) -> Result<HermitianMatrix> {
        geometric_mean(&self.a, &self.b)
    }

    pub fn spectral_mean(&self) -> Result<HermitianMatrix> {
        spectral_mean(&self.a, &self.b)
    }

    pub fn weighted_spectral_mean(&self, t: f64) -> Result<HermitianMatrix> {
        weighted_spectral_mean(&self.a, &self.b, t)
    }
}

/// Returns whether `m` is positive definite; errors if it is not PSD.
fn definiteness(m: &HermitianMatrix) -> Result<bool> {
    let es = m.eigen()?;
    let tol = psd_tol(m);
    if es.min() < -tol {
        return Err(Error::NotPsd(es.min()));
    }
    Ok(es.min() > tol)
}

pub fn is_positive_definite(m: &HermitianMatrix) -> Result<bool> {
    definiteness(m)
}

fn check_same_dim(a: &HermitianMatrix, b: &HermitianMatrix) -> Result<()> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            expected: format!("dimension {}", a.dim()),
            found: format!("dimension {}", b.dim()),
        });
    }
    Ok(())
}

/// Floor, relative to `‖C‖²‖B‖`, below which eigenvalues of `C B C` are rounding.
const CONGRUENCE_FLOOR: f64 = 1e-14;

/// `(C B C)^{1/2}`. Eigenvalues are kept down to the rounding level of the
/// product, far below `psd_tol`: truncating at `psd_tol` would discard real
/// directions of nearly singular inputs.
fn congruence_sqrt(b: &HermitianMatrix, c: &HermitianMatrix) -> Result<HermitianMatrix> {
    let m = b.sandwich(c);
    let es = m.eigen()?;
    if es.min() < -psd_tol(&m) {
        return Err(Error::Domain(format!("congruence has negative eigenvalue {:e}", es.min())));
    }
    let floor = CONGRUENCE_FLOOR * b.max_abs() * c.max_abs().powi(2);
    Ok(es.map(|x| if x <= floor { 0.0 } else { x.sqrt() }))
}

/// `A^{1/2} (A^{-1/2} B A^{-1/2})^{1/2} A^{1/2}` with powers of `A` on its support.
fn geometric_formula(a: &HermitianMatrix, b: &HermitianMatrix) -> Result<HermitianMatrix> {
    let a_half = frac_power(a, 0.5, true)?;
    let a_inv_half = frac_power(a, -0.5, true)?;
    let inner = congruence_sqrt(b, &a_inv_half)?;
    Ok(inner.sandwich(&a_half))
}

/// Kubo–Ando geometric mean `A♯B` of PSD matrices.
///
/// Uses the closed formula when either argument is positive definite;
/// otherwise both arguments are shorted onto `supp A ∩ supp B` and the mean is
/// taken there.
pub fn geometric_mean(a: &HermitianMatrix, b: &HermitianMatrix) -> Result<HermitianMatrix> {
    check_same_dim(a, b)?;
    let a_pd = definiteness(a)?;
    let b_pd = definiteness(b)?;
    if a_pd {
        return geometric_formula(a, b);
    }
    if b_pd {
        return geometric_formula(b, a);
    }
    intersection_mean(a, b)
}

fn intersection_mean(a: &HermitianMatrix, b: &HermitianMatrix) -> Result<HermitianMatrix> {
    let n = a.dim();
    let projector_sum = support_projector(a)?.add(&support_projector(b)?);
    let es = projector_sum.eigen()?;
    let (inside, outside): (Vec<usize>, Vec<usize>) = (0..n).partition(|&j| es.values[j] > 2.0 - 1e-8);
    if inside.is_empty() {
        return Ok(HermitianMatrix::zeros(n));
    }
    let basis = |cols: &[usize]| ComplexMatrix::from_fn(n, cols.len(), |i, j| es.vectors[(i, cols[j])]);
    let w = basis(&inside);
    let w_perp = basis(&outside);
    let a_s = shorted(a, &w, &w_perp)?;
    let b_s = shorted(b, &w, &w_perp)?;
    let g = geometric_formula(&a_s, &b_s)?;
    Ok(HermitianMatrix::from_hermitized(&(&w * g.as_matrix()) * &w.adjoint()))
}

/// Shorted operator of `m` onto `span(w)`, expressed in the `w` basis:
/// `W†MW − W†MW⊥ (W⊥†MW⊥)⁺ W⊥†MW`.
fn shorted(m: &HermitianMatrix, w: &ComplexMatrix, w_perp: &ComplexMatrix) -> Result<HermitianMatrix> {
    let m11 = m.congruence(w);
    if w_perp.cols() == 0 {
        return Ok(m11);
    }
    let m22 = m.congruence(w_perp);
    let m21 = &(&w_perp.adjoint() * m.as_matrix()) * w;
    let m22_pinv = frac_power(&m22, -1.0, true)?;
    let correction = &(&m21.adjoint() * m22_pinv.as_matrix()) * &m21;
    Ok(HermitianMatrix::from_hermitized(m11.as_matrix() - &correction))
}

/// `A♯B` with the powers of `A` taken on `supp A`:
/// `A^{1/2} (A^{+1/2} B A^{+1/2})^{1/2} A^{1/2}`.
pub fn geometric_mean_on_support(a: &HermitianMatrix, b: &HermitianMatrix) -> Result<HermitianMatrix> {
    check_same_dim(a, b)?;
    definiteness(a)?;
    definiteness(b)?;
    geometric_formula(a, b)
}

/// `A⁻¹♯B = A^{-1/2} (A^{1/2} B A^{1/2})^{1/2} A^{-1/2}` with `A⁻¹` read as the
/// inverse on `supp A`.
pub fn inverse_geometric_mean(a: &HermitianMatrix, b: &HermitianMatrix) -> Result<HermitianMatrix> {
    check_same_dim(a, b)?;
    definiteness(a)?;
    definiteness(b)?;
    let a_half = frac_power(a, 0.5, true)?;
    let a_inv_half = frac_power(a, -0.5, true)?;
    let inner = congruence_sqrt(b, &a_half)?;
    Ok(inner.sandwich(&a_inv_half))
}

/// Support power of a matrix that is PSD by construction (such as `A⁻¹♯B`):
/// negative eigenvalues are rounding and map to zero along with the kernel.
pub(crate) fn psd_power(x: &HermitianMatrix, alpha: f64) -> Result<HermitianMatrix> {
    let tol = psd_tol(x);
    let es = x.eigen()?;
    let mapped: Vec<f64> = es.values.iter().map(|&v| if v <= tol { 0.0 } else { v.powf(alpha) }).collect();
    if mapped.iter().any(|v| !v.is_finite()) {
        return Err(Error::Domain(format!("power {alpha} overflowed")));
    }
    Ok(HermitianMatrix::from_eigen(&mapped, &es.vectors))
}

/// Spectral geometric mean `A♮B = (A⁻¹♯B)^{1/2} A (A⁻¹♯B)^{1/2}`.
pub fn spectral_mean(a: &HermitianMatrix, b: &HermitianMatrix) -> Result<HermitianMatrix> {
    weighted_spectral_mean(a, b, 0.5)
}

/// Weighted spectral mean `A♮ₜB` for `t ∈ [0, 1]`.
pub fn weighted_spectral_mean(a: &HermitianMatrix, b: &HermitianMatrix, t: f64) -> Result<HermitianMatrix> {
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::Param(format!("weight t must lie in [0, 1], got {t}")));
    }
    weighted_spectral_mean_extended(a, b, t)
}

/// `A♮ₜB` for any real `t`; negative powers of `A⁻¹♯B` are taken on its support.
pub fn weighted_spectral_mean_extended(a: &HermitianMatrix, b: &HermitianMatrix, t: f64) -> Result<HermitianMatrix> {
    if !t.is_finite() {
        return Err(Error::Param(format!("weight t must be finite, got {t}")));
    }
    let x = inverse_geometric_mean(a, b)?;
    if t == 0.0 {
        return Ok(a.clone());
    }
    let xt = psd_power(&x, t)?;
    Ok(a.sandwich(&xt))
}

/// `Tr(AX) + Tr(BX⁻¹)`, minimized over `X > 0` by `A⁻¹♯B`.
pub fn variational_objective(a: &HermitianMatrix, b: &HermitianMatrix, x: &HermitianMatrix) -> Result<f64> {
    check_same_dim(a, b)?;
    check_same_dim(a, x)?;
    if !definiteness(x)? {
        return Err(Error::Domain("variational objective needs a positive definite X".into()));
    }
    let x_inv = frac_power(x, -1.0, false)?;
    Ok(a.trace_product(x) + b.trace_product(&x_inv))
}

/// `(1 − ε) M + ε I/d`.
pub fn regularize(m: &HermitianMatrix, eps: f64) -> Result<HermitianMatrix> {
    if !(0.0..=1.0).contains(&eps) {
        return Err(Error::Param(format!("regularization weight must lie in [0, 1], got {eps}")));
    }
    let d = m.dim();
    Ok(m.scale(1.0 - eps).add(&HermitianMatrix::identity(d).scale(eps / d as f64)))
}
