//! Fidelity-type quantities: the weighted spectral fidelity
//! `Fₜ(ρ,σ) = Tr(ρ (ρ⁻¹♯σ)^{2t})`, the Uhlmann and Matsumoto fidelities, the
//! sandwiched Rényi divergence and the Fuchs–van de Graaf comparison terms.
//!
//! Inverses and fractional powers of a singular `ρ` are taken on `supp ρ`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{frac_power, psd_tol, support_projector, trace_norm, HermitianMatrix};
use crate::means::{geometric_mean_on_support, inverse_geometric_mean, psd_power, regularize};
use crate::states::{validate_probabilities, DensityMatrix};

/// Slack allowed above 1 for fidelity values.
pub const FID_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FidelityMethod {
    SpectralGeneral,
    PureRhoClosedForm,
    PureSigmaClosedForm,
    DiagonalClosedForm,
}

/// A fidelity evaluation. `value` always comes from the general spectral
/// path; when the inputs admit a closed form, `method` names it and
/// `cross_check` holds its value.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FidelityValue {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t: Option<f64>,
    pub value: f64,
    pub method: FidelityMethod,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cross_check: Option<f64>,
}

impl FidelityValue {
    /// `|value − cross_check|`, or 0 without a closed form.
    pub fn closed_form_gap(&self) -> f64 {
        self.cross_check.map_or(0.0, |c| (self.value - c).abs())
    }
}

/// `Fₜ(ρ,σ)` for `t ∈ [0, 1]`.
pub fn spectral_fidelity(rho: &DensityMatrix, sigma: &DensityMatrix, t: f64) -> Result<FidelityValue> {
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::Param(format!("t must lie in [0, 1], got {t}")));
    }
    spectral_fidelity_extended(rho, sigma, t)
}

/// `Fₜ(ρ,σ)` for any finite real `t`; used by log-convexity sweeps beyond `[0, 1]`.
pub fn spectral_fidelity_extended(rho: &DensityMatrix, sigma: &DensityMatrix, t: f64) -> Result<FidelityValue> {
    let value = spectral_fidelity_value(rho.matrix(), sigma.matrix(), t)?;
    let (method, cross_check) = closed_form(rho, sigma, t);
    Ok(FidelityValue { t: Some(t), value, method, cross_check })
}

/// General path on raw PSD matrices: `Tr(A (A⁻¹♯B)^{2t})`.
pub fn spectral_fidelity_value(rho: &HermitianMatrix, sigma: &HermitianMatrix, t: f64) -> Result<f64> {
    if !t.is_finite() {
        return Err(Error::Param(format!("t must be finite, got {t}")));
    }
    if t == 0.0 {
        return Ok(rho.trace());
    }
    let x = inverse_geometric_mean(rho, sigma)?;
    let x_pow = psd_power(&x, 2.0 * t)?;
    Ok(rho.trace_product(&x_pow))
}

fn closed_form(rho: &DensityMatrix, sigma: &DensityMatrix, t: f64) -> (FidelityMethod, Option<f64>) {
    if !(0.0..=1.0).contains(&t) {
        return (FidelityMethod::SpectralGeneral, None);
    }
    if rho.is_pure() {
        let p = rho.overlap(sigma).clamp(0.0, 1.0);
        return (FidelityMethod::PureRhoClosedForm, Some(p.powf(t)));
    }
    // Holds for full-rank ρ only (a singular ρ truncates σ to supp ρ). At
    // t = 0 the general path gives Tr ρ = 1, not q.
    if sigma.is_pure() && rho.is_full_rank() && t > 0.0 {
        let q = rho.overlap(sigma).clamp(0.0, 1.0);
        return (FidelityMethod::PureSigmaClosedForm, Some(q.powf(1.0 - t)));
    }
    if rho.is_diagonal() && sigma.is_diagonal() && (t < 1.0 || rho.is_full_rank()) {
        if let Ok(v) = diagonal_spectral_fidelity(&rho.diagonal(), &sigma.diagonal(), t) {
            return (FidelityMethod::DiagonalClosedForm, Some(v));
        }
    }
    (FidelityMethod::SpectralGeneral, None)
}

/// `Fₜ` evaluated on `(1−ε)ρ + εI/d` and `(1−ε)σ + εI/d`.
pub fn spectral_fidelity_regularized(rho: &DensityMatrix, sigma: &DensityMatrix, t: f64, eps: f64) -> Result<f64> {
    let r = regularize(rho.matrix(), eps)?;
    let s = regularize(sigma.matrix(), eps)?;
    spectral_fidelity_value(&r, &s, t)
}

/// Root Uhlmann fidelity `Tr √(ρ^{1/2} σ ρ^{1/2})`.
pub fn uhlmann_fidelity(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<FidelityValue> {
    let value = uhlmann_value(rho.matrix(), sigma.matrix())?;
    Ok(with_sqrt_overlap_check(rho, sigma, value))
}

pub(crate) fn uhlmann_value(rho: &HermitianMatrix, sigma: &HermitianMatrix) -> Result<f64> {
    let rho_half = frac_power(rho, 0.5, false)?;
    let inner = sigma.sandwich(&rho_half);
    Ok(frac_power(&inner, 0.5, true)?.trace())
}

/// Matsumoto fidelity `Tr(ρ♯σ)`. Powers are taken on the support of the
/// lower-rank argument (`ρ` on ties), which makes it `√p` whenever either
/// state is pure.
pub fn matsumoto_fidelity(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<FidelityValue> {
    let mean = if sigma.rank() < rho.rank() {
        geometric_mean_on_support(sigma.matrix(), rho.matrix())?
    } else {
        geometric_mean_on_support(rho.matrix(), sigma.matrix())?
    };
    Ok(with_sqrt_overlap_check(rho, sigma, mean.trace()))
}

fn with_sqrt_overlap_check(rho: &DensityMatrix, sigma: &DensityMatrix, value: f64) -> FidelityValue {
    let (method, cross_check) = if rho.is_pure() {
        (FidelityMethod::PureRhoClosedForm, Some(rho.overlap(sigma).clamp(0.0, 1.0).sqrt()))
    } else if sigma.is_pure() {
        (FidelityMethod::PureSigmaClosedForm, Some(rho.overlap(sigma).clamp(0.0, 1.0).sqrt()))
    } else {
        (FidelityMethod::SpectralGeneral, None)
    };
    FidelityValue { t: None, value, method, cross_check }
}

/// Sandwiched Rényi divergence
/// `(α−1)⁻¹ log Tr[(σ^{(1−α)/2α} ρ σ^{(1−α)/2α})^α]` (natural log).
///
/// For `α > 1` it requires `supp ρ ⊆ supp σ`; for `α < 1` it is `+∞` when the
/// trace term vanishes.
pub fn sandwiched_renyi(rho: &DensityMatrix, sigma: &DensityMatrix, alpha: f64) -> Result<f64> {
    if !alpha.is_finite() || alpha <= 0.0 || alpha == 1.0 {
        return Err(Error::Param(format!("alpha must be positive, finite and != 1, got {alpha}")));
    }
    if rho.dim() != sigma.dim() {
        return Err(Error::DimensionMismatch {
            expected: format!("dimension {}", rho.dim()),
            found: format!("dimension {}", sigma.dim()),
        });
    }
    if alpha > 1.0 {
        let proj = support_projector(sigma.matrix())?;
        let outside = 1.0 - rho.matrix().trace_product(&proj);
        if outside > psd_tol(rho.matrix()) {
            return Err(Error::Support(format!(
                "supp rho is not contained in supp sigma (weight {outside:e} outside)"
            )));
        }
    }
    let exponent = (1.0 - alpha) / (2.0 * alpha);
    let s = frac_power(sigma.matrix(), exponent, true)?;
    let inner = rho.matrix().sandwich(&s);
    let q = frac_power(&inner, alpha, true)?.trace();
    Ok(q.ln() / (alpha - 1.0))
}

/// Classical form `Σ pᵢ^{1−t} qᵢ^t` for commuting (diagonal) states.
///
/// A term with `pᵢ = 0` contributes 0 for `t < 1`; a term with `qᵢ = 0`
/// contributes 0 for `t > 0`.
pub fn diagonal_spectral_fidelity(p: &[f64], q: &[f64], t: f64) -> Result<f64> {
    if p.len() != q.len() {
        return Err(Error::DimensionMismatch {
            expected: format!("length {}", p.len()),
            found: format!("length {}", q.len()),
        });
    }
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::Param(format!("t must lie in [0, 1], got {t}")));
    }
    validate_probabilities(p)?;
    validate_probabilities(q)?;
    Ok(p.iter()
        .zip(q)
        .map(
            |(&pi, &qi)| {
                if (pi == 0.0 && t < 1.0) || (qi == 0.0 && t > 0.0) {
                    0.0
                } else {
                    pi.powf(1.0 - t) * qi.powf(t)
                }
            },
        )
        .sum())
}

/// Terms of both Fuchs–van de Graaf inequalities for `Fₜ`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FvgBounds {
    /// `1 − Fₜ`
    pub lower_gap: f64,
    /// `½‖ρ − σ‖₁`
    pub trace_dist_half: f64,
    /// `√(1 − Fₜ²)`
    pub second_rhs: f64,
}

impl FvgBounds {
    /// `lower_gap − trace_dist_half`; positive means the first inequality fails.
    pub fn first_violation(&self) -> f64 {
        self.lower_gap - self.trace_dist_half
    }

    /// `trace_dist_half − second_rhs`; positive means the second inequality fails.
    pub fn second_violation(&self) -> f64 {
        self.trace_dist_half - self.second_rhs
    }
}

pub fn fvg_bounds(rho: &DensityMatrix, sigma: &DensityMatrix, t: f64) -> Result<FvgBounds> {
    let f = spectral_fidelity(rho, sigma, t)?.value;
    Ok(FvgBounds {
        lower_gap: 1.0 - f,
        trace_dist_half: half_trace_distance(rho, sigma)?,
        second_rhs: (1.0 - f * f).max(0.0).sqrt(),
    })
}

/// `½‖ρ − σ‖₁`.
pub fn half_trace_distance(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    Ok(0.5 * trace_norm(&rho.matrix().sub(sigma.matrix()))?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::{from_bloch, pure_state_real, random_density, BlochVector};

    #[test]
    fn t_zero_is_one() {
        let rho = random_density(3, 3, 1).unwrap();
        let sigma = random_density(3, 3, 2).unwrap();
        assert_eq!(spectral_fidelity(&rho, &sigma, 0.0).unwrap().value, rho.matrix().trace());
        assert!((spectral_fidelity(&rho, &sigma, 0.0).unwrap().value - 1.0).abs() < 1e-14);
    }

    #[test]
    fn pure_rho_closed_form() {
        let rho = pure_state_real(&[0.6, 0.8]).unwrap();
        let sigma = random_density(2, 2, 3).unwrap();
        let p = rho.overlap(&sigma);
        for t in [0.0, 0.2, 0.5, 0.9, 1.0] {
            let f = spectral_fidelity(&rho, &sigma, t).unwrap();
            assert_eq!(f.method, FidelityMethod::PureRhoClosedForm);
            assert!((f.value - p.powf(t)).abs() < 1e-12, "t={t}");
        }
    }

    #[test]
    fn rejects_t_out_of_range() {
        let r = DensityMatrix::maximally_mixed(2);
        assert!(matches!(spectral_fidelity(&r, &r, -0.1), Err(Error::Param(_))));
        assert!(spectral_fidelity_extended(&r, &r, -0.1).is_ok());
    }

    #[test]
    fn uhlmann_examples() {
        let rho = random_density(3, 3, 4).unwrap();
        assert!((uhlmann_fidelity(&rho, &rho).unwrap().value - 1.0).abs() < 1e-12);
        // pure/pure with overlap c
        let theta: f64 = 1.1;
        let a = pure_state_real(&[1.0, 0.0]).unwrap();
        let b = pure_state_real(&[(theta / 2.0).cos(), (theta / 2.0).sin()]).unwrap();
        assert!((uhlmann_fidelity(&a, &b).unwrap().value - (theta / 2.0).cos()).abs() < 1e-12);
        // pure rho, mixed sigma from Bloch vectors
        let r = BlochVector([0.0, 0.6, 0.8]);
        let s = BlochVector([0.3, -0.2, 0.1]);
        let f = uhlmann_fidelity(&from_bloch(&r).unwrap(), &from_bloch(&s).unwrap()).unwrap();
        assert!((f.value - ((1.0 + r.dot(&s)) / 2.0).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn matsumoto_examples() {
        let rho = random_density(3, 3, 5).unwrap();
        assert!((matsumoto_fidelity(&rho, &rho).unwrap().value - 1.0).abs() < 1e-12);
        let p: [f64; 3] = [0.2, 0.5, 0.3];
        let q: [f64; 3] = [0.6, 0.1, 0.3];
        let expected: f64 = p.iter().zip(&q).map(|(a, b)| (a * b).sqrt()).sum();
        let f = matsumoto_fidelity(
            &DensityMatrix::from_probabilities(&p).unwrap(),
            &DensityMatrix::from_probabilities(&q).unwrap(),
        )
        .unwrap();
        assert!((f.value - expected).abs() < 1e-14);
        let pure = pure_state_real(&[1.0, 2.0, 2.0]).unwrap();
        let pf = matsumoto_fidelity(&pure, &rho).unwrap();
        assert!(pf.closed_form_gap() < 1e-12);
        let flipped = matsumoto_fidelity(&rho, &pure).unwrap();
        assert!((flipped.value - pf.value).abs() < 1e-12);
    }

    #[test]
    fn renyi_examples() {
        let rho = random_density(3, 3, 6).unwrap();
        assert!(sandwiched_renyi(&rho, &rho, 2.0).unwrap().abs() < 1e-12);
        assert!(sandwiched_renyi(&rho, &rho, 0.5).unwrap().abs() < 1e-12);
        let up = DensityMatrix::from_probabilities(&[1.0, 0.0]).unwrap();
        let mixed = DensityMatrix::maximally_mixed(2);
        let d = sandwiched_renyi(&up, &mixed, 2.0).unwrap();
        assert!((d - 2f64.ln()).abs() < 1e-14);
        assert!(matches!(sandwiched_renyi(&mixed, &up, 2.0), Err(Error::Support(_))));
        assert!(matches!(sandwiched_renyi(&mixed, &up, 1.0), Err(Error::Param(_))));
    }

    #[test]
    fn renyi_commuting_is_classical() {
        let p: [f64; 3] = [0.1, 0.6, 0.3];
        let q: [f64; 3] = [0.3, 0.3, 0.4];
        let rho = DensityMatrix::from_probabilities(&p).unwrap();
        let sigma = DensityMatrix::from_probabilities(&q).unwrap();
        for alpha in [0.3, 0.5, 0.8, 1.5, 3.0] {
            let classical: f64 =
                p.iter().zip(&q).map(|(a, b)| a.powf(alpha) * b.powf(1.0 - alpha)).sum::<f64>().ln() / (alpha - 1.0);
            assert!((sandwiched_renyi(&rho, &sigma, alpha).unwrap() - classical).abs() < 1e-13, "alpha={alpha}");
        }
    }

    #[test]
    fn diagonal_examples() {
        let p = [0.25, 0.75];
        assert!((diagonal_spectral_fidelity(&p, &p, 0.4).unwrap() - 1.0).abs() < 1e-15);
        let p0: f64 = 0.2;
        for t in [0.1, 0.3, 0.7] {
            let v = diagonal_spectral_fidelity(&[0.5, 0.5], &[p0, 1.0 - p0], t).unwrap();
            let expected = 2f64.powf(t - 1.0) * (p0.powf(t) + (1.0 - p0).powf(t));
            assert!((v - expected).abs() < 1e-15);
        }
        for t in [0.1, 0.5, 0.9] {
            assert_eq!(diagonal_spectral_fidelity(&[1.0, 0.0], &[0.0, 1.0], t).unwrap(), 0.0);
        }
        assert!(matches!(diagonal_spectral_fidelity(&[0.5, 0.6], &[0.5, 0.5], 0.5), Err(Error::Normalization(_))));
    }

    #[test]
    fn fvg_bounds_examples() {
        let rho = random_density(2, 2, 8).unwrap();
        let b = fvg_bounds(&rho, &rho, 0.3).unwrap();
        assert!(b.lower_gap.abs() < 1e-12 && b.trace_dist_half.abs() < 1e-12 && b.second_rhs < 1e-5);
        let c: f64 = 0.5;
        let a = pure_state_real(&[1.0, 0.0]).unwrap();
        let s = pure_state_real(&[c, (1.0 - c * c).sqrt()]).unwrap();
        let b = fvg_bounds(&a, &s, 0.25).unwrap();
        assert!((b.trace_dist_half - (1.0 - c * c).sqrt()).abs() < 1e-12);
        assert!((b.second_rhs - 0.5f64.sqrt()).abs() < 1e-12);
        assert!(b.second_violation() > 0.15);
    }

    #[test]
    fn regularized_path_converges_like_sqrt_eps() {
        let rho = random_density(3, 2, 21).unwrap();
        let sigma = random_density(3, 3, 22).unwrap();
        let base = spectral_fidelity(&rho, &sigma, 0.25).unwrap().value;
        let gap = |e| (spectral_fidelity_regularized(&rho, &sigma, 0.25, e).unwrap() - base).abs();
        let (g4, g6, g8) = (gap(1e-4), gap(1e-6), gap(1e-8));
        assert!(g4 > g6 && g6 > g8);
        assert!((g6 / g8).log10() > 0.7 && (g6 / g8).log10() < 1.3, "{g6:e} {g8:e}");
    }
}
