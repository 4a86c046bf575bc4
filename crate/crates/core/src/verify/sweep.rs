use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fidelity::spectral_fidelity_extended;
use crate::states::DensityMatrix;

/// One point of a `t` sweep. The second differences are centred on this
/// point and absent at the ends of the grid.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub t: f64,
    pub value: f64,
    pub log_value: f64,
    pub second_diff: Option<f64>,
    pub log_second_diff: Option<f64>,
}

/// `points` equally spaced values from `start` to `stop` inclusive.
pub fn uniform_grid(start: f64, stop: f64, points: usize) -> Result<Vec<f64>> {
    if !(start.is_finite() && stop.is_finite()) || points == 0 || (points == 1 && start != stop) || stop < start {
        return Err(Error::Param(format!("invalid grid {start}:{stop}:{points}")));
    }
    if points == 1 {
        return Ok(vec![start]);
    }
    let h = (stop - start) / (points - 1) as f64;
    Ok((0..points).map(|i| if i + 1 == points { stop } else { start + h * i as f64 }).collect())
}

/// `Fₜ` over a sorted grid in `[0, 1]`.
pub fn t_sweep(rho: &DensityMatrix, sigma: &DensityMatrix, grid: &[f64]) -> Result<Vec<SweepRow>> {
    if let Some(&t) = grid.iter().find(|t| !(0.0..=1.0).contains(*t)) {
        return Err(Error::Param(format!("t = {t} is outside [0, 1]")));
    }
    t_sweep_extended(rho, sigma, grid)
}

/// `Fₜ` over any sorted grid of finite `t`.
pub fn t_sweep_extended(rho: &DensityMatrix, sigma: &DensityMatrix, grid: &[f64]) -> Result<Vec<SweepRow>> {
    if grid.windows(2).any(|w| w[0].is_nan() || w[1].is_nan() || w[0] >= w[1]) {
        return Err(Error::Param("grid must be strictly increasing".into()));
    }
    let values =
        grid.iter().map(|&t| Ok(spectral_fidelity_extended(rho, sigma, t)?.value)).collect::<Result<Vec<_>>>()?;
    let logs: Vec<f64> = values.iter().map(|v| v.ln()).collect();
    Ok((0..grid.len())
        .map(|i| SweepRow {
            t: grid[i],
            value: values[i],
            log_value: logs[i],
            second_diff: second_difference(grid, &values, i),
            log_second_diff: second_difference(grid, &logs, i),
        })
        .collect())
}

/// Three-point second difference scaled to the mean spacing; on a uniform
/// grid it is `f[i-1] − 2f[i] + f[i+1]`.
fn second_difference(t: &[f64], f: &[f64], i: usize) -> Option<f64> {
    if i == 0 || i + 1 >= t.len() {
        return None;
    }
    let (h0, h1) = (t[i] - t[i - 1], t[i + 1] - t[i]);
    let h = 0.5 * (h0 + h1);
    let d = h * h * ((f[i + 1] - f[i]) / h1 - (f[i] - f[i - 1]) / h0) / h;
    d.is_finite().then_some(d)
}
