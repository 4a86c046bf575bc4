use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fidelity::{fvg_bounds, FID_TOL};
use crate::states::{pure_state_real, DensityMatrix};

/// Both sides of the second Fuchs–van de Graaf inequality on a pure pair
/// with overlap `c`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SecondFvg {
    pub t: f64,
    pub c: f64,
    /// `½‖ρ − σ‖₁`, equal to `√(1 − c²)`.
    pub half_trace_dist: f64,
    /// `√(1 − Fₜ²)`, equal to `√(1 − c^{4t})`.
    pub rhs: f64,
    /// Margin above the fidelity tolerance.
    pub violated: bool,
}

impl SecondFvg {
    pub fn margin(&self) -> f64 {
        self.half_trace_dist - self.rhs
    }
}

fn pure_pair(c: f64) -> Result<(DensityMatrix, DensityMatrix)> {
    Ok((pure_state_real(&[1.0, 0.0])?, pure_state_real(&[c, (1.0 - c * c).sqrt()])?))
}

fn evaluate(t: f64, c: f64) -> Result<SecondFvg> {
    let (rho, sigma) = pure_pair(c)?;
    let b = fvg_bounds(&rho, &sigma, t)?;
    Ok(SecondFvg {
        t,
        c,
        half_trace_dist: b.trace_dist_half,
        rhs: b.second_rhs,
        violated: b.second_violation() > FID_TOL,
    })
}

/// Evaluates the inequality with the full machinery and checks both sides
/// against their closed forms to `1e-9`.
pub fn second_fvg_failure(t: f64, c: f64) -> Result<SecondFvg> {
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::Param(format!("t must lie in [0, 1], got {t}")));
    }
    if !(c > 0.0 && c < 1.0) {
        return Err(Error::Param(format!("c must lie in (0, 1), got {c}")));
    }
    let r = evaluate(t, c)?;
    let half = (1.0 - c * c).sqrt();
    let rhs = (1.0 - c.powf(4.0 * t)).max(0.0).sqrt();
    let gap = (r.half_trace_dist - half).abs().max((r.rhs - rhs).abs());
    if gap > 1e-9 {
        return Err(Error::Tolerance(format!("closed form and spectral evaluation differ by {gap:e}")));
    }
    Ok(r)
}

/// One cell of an empirical violation map.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegionCell {
    pub t: f64,
    pub c: f64,
    /// `½‖ρ − σ‖₁ − √(1 − Fₜ²)`; positive means the inequality fails.
    pub margin: f64,
    pub violated: bool,
}

/// Second-inequality margin on pure pairs over a `(t, c)` grid. No boundary
/// is assumed; cells are reported as computed.
pub fn second_fvg_region(ts: &[f64], cs: &[f64]) -> Result<Vec<RegionCell>> {
    let mut cells = Vec::with_capacity(ts.len() * cs.len());
    for &t in ts {
        for &c in cs {
            let r = second_fvg_failure(t, c)?;
            cells.push(RegionCell { t, c, margin: r.margin(), violated: r.violated });
        }
    }
    Ok(cells)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quarter_half_example() {
        let r = second_fvg_failure(0.25, 0.5).unwrap();
        assert!((r.half_trace_dist - 0.75f64.sqrt()).abs() < 1e-12);
        assert!((r.rhs - 0.5f64.sqrt()).abs() < 1e-12);
        assert!(r.violated);
        assert!((r.margin() - (0.75f64.sqrt() - 0.5f64.sqrt())).abs() < 1e-6);
    }

    #[test]
    fn midpoint_saturates() {
        let r = second_fvg_failure(0.5, 0.3).unwrap();
        assert!(r.margin().abs() < 1e-12);
        assert!(!r.violated);
    }

    #[test]
    fn near_identical_states() {
        let r = second_fvg_failure(0.25, 1.0 - 1e-12).unwrap();
        assert!(r.half_trace_dist < 1e-5 && r.rhs < 1e-5);
    }

    #[test]
    fn region_for_pure_pairs() {
        let cells = second_fvg_region(&[0.1, 0.3, 0.5, 0.7, 0.9], &[0.2, 0.5, 0.8]).unwrap();
        for cell in cells {
            assert_eq!(cell.violated, cell.t < 0.5, "{cell:?}");
        }
    }
}
