//! Trial functions for the registry. Each returns a violation that is ≤ 0
//! (or within tolerance) when the property holds.

use num_complex::Complex64;
use rand::Rng;
use serde_json::{json, Value};

use super::oracle::{cholesky, intersection_projector};
use super::{Trial, TrialCtx};
use crate::error::Result;
use crate::fidelity::{
    half_trace_distance, matsumoto_fidelity, sandwiched_renyi, spectral_fidelity, spectral_fidelity_extended,
    spectral_fidelity_regularized, uhlmann_fidelity,
};
use crate::linalg::{block_psd, eig, frac_power, support_projector, ComplexMatrix, HermitianMatrix, MatrixJson};
use crate::means::{
    geometric_mean, inverse_geometric_mean, spectral_mean, variational_objective, weighted_spectral_mean,
    DEFAULT_EPSILON,
};
use crate::rng::{complex_normal, SeededRng};
use crate::states::{
    from_bloch, pinching, random_channel_with, random_density_with, random_pure_with, random_unitary_with, BlochVector,
    DensityMatrix,
};

/// Variational samples drawn per random pair.
pub const VARIATIONAL_T_SAMPLES: usize = 200;
const VARIATIONAL_TS: [f64; 4] = [0.1, 0.25, 0.4, 0.5];

fn grid(points: usize) -> impl Iterator<Item = f64> {
    (0..points).map(move |i| i as f64 / (points - 1) as f64)
}

fn f(rho: &DensityMatrix, sigma: &DensityMatrix, t: f64) -> Result<f64> {
    Ok(spectral_fidelity(rho, sigma, t)?.value)
}

fn full_state(rng: &mut SeededRng, d: usize) -> Result<DensityMatrix> {
    random_density_with(rng, d, d)
}

fn any_rank_state(rng: &mut SeededRng, d: usize) -> Result<DensityMatrix> {
    let r = rng.random_range(1..=d);
    random_density_with(rng, d, r)
}

fn full_pair(rng: &mut SeededRng, d: usize) -> Result<(DensityMatrix, DensityMatrix)> {
    Ok((full_state(rng, d)?, full_state(rng, d)?))
}

fn any_rank_pair(rng: &mut SeededRng, d: usize) -> Result<(DensityMatrix, DensityMatrix)> {
    Ok((any_rank_state(rng, d)?, any_rank_state(rng, d)?))
}

/// Random positive definite matrix with entries of order one.
fn pd(rng: &mut SeededRng, d: usize) -> Result<HermitianMatrix> {
    Ok(full_state(rng, d)?.matrix().scale(d as f64))
}

fn psd_of_rank(rng: &mut SeededRng, d: usize, r: usize) -> Result<HermitianMatrix> {
    Ok(random_density_with(rng, d, r)?.matrix().scale(d as f64))
}

fn open_unit(rng: &mut SeededRng) -> f64 {
    // (0, 1]
    1.0 - rng.random::<f64>()
}

fn rel(a: &HermitianMatrix, b: &HermitianMatrix) -> f64 {
    a.max_abs_diff(b) / b.max_abs().max(1.0)
}

fn js(m: &DensityMatrix) -> Value {
    serde_json::to_value(m.to_json()).unwrap_or(Value::Null)
}

fn jm(m: &HermitianMatrix) -> Value {
    serde_json::to_value(MatrixJson::from(m)).unwrap_or(Value::Null)
}

fn pair_witness(rho: &DensityMatrix, sigma: &DensityMatrix, t: Option<f64>) -> Value {
    match t {
        Some(t) => json!({ "rho": js(rho), "sigma": js(sigma), "t": t }),
        None => json!({ "rho": js(rho), "sigma": js(sigma) }),
    }
}

fn mat_witness(a: &HermitianMatrix, b: &HermitianMatrix) -> Value {
    json!({ "a": jm(a), "b": jm(b) })
}

fn second_differences(values: &[f64]) -> impl Iterator<Item = f64> + '_ {
    values.windows(3).map(|w| w[0] - 2.0 * w[1] + w[2])
}

pub fn midpoint_uhlmann(ctx: &mut TrialCtx) -> Result<Trial> {
    let (rho, sigma) = full_pair(&mut ctx.rng, ctx.dim)?;
    let v = (f(&rho, &sigma, 0.5)? - uhlmann_fidelity(&rho, &sigma)?.value).abs();
    Ok(Trial::new(v, pair_witness(&rho, &sigma, Some(0.5))))
}

pub fn endpoints(ctx: &mut TrialCtx) -> Result<Trial> {
    let (rho, sigma) = full_pair(&mut ctx.rng, ctx.dim)?;
    let v = (f(&rho, &sigma, 0.0)? - 1.0).abs().max((f(&rho, &sigma, 1.0)? - 1.0).abs());
    Ok(Trial::new(v, pair_witness(&rho, &sigma, None)))
}

pub fn universal_bound(ctx: &mut TrialCtx) -> Result<Trial> {
    let (rho, sigma) = any_rank_pair(&mut ctx.rng, ctx.dim)?;
    let mut worst = (f64::NEG_INFINITY, 0.0);
    for t in grid(21) {
        let v = f(&rho, &sigma, t)? - 1.0;
        if v > worst.0 {
            worst = (v, t);
        }
    }
    Ok(Trial::new(worst.0, pair_witness(&rho, &sigma, Some(worst.1))))
}

/// Full-rank pairs only: with `F₀ = F₁ = 1` convexity puts the minimum at
/// `t = 1/2`; a singular `ρ` has `F₁ < 1` and the minimum moves right.
pub fn midpoint_minimum(ctx: &mut TrialCtx) -> Result<Trial> {
    let (rho, sigma) = full_pair(&mut ctx.rng, ctx.dim)?;
    let mid = f(&rho, &sigma, 0.5)?;
    let mut worst = (f64::NEG_INFINITY, 0.0);
    for t in grid(21) {
        let v = mid - f(&rho, &sigma, t)?;
        if v > worst.0 {
            worst = (v, t);
        }
    }
    Ok(Trial::new(worst.0, pair_witness(&rho, &sigma, Some(worst.1))))
}

pub fn convexity_t(ctx: &mut TrialCtx) -> Result<Trial> {
    let (rho, sigma) = full_pair(&mut ctx.rng, ctx.dim)?;
    let values = grid(21).map(|t| f(&rho, &sigma, t)).collect::<Result<Vec<_>>>()?;
    let v = second_differences(&values).map(|d| -d).fold(f64::NEG_INFINITY, f64::max);
    Ok(Trial::new(v, pair_witness(&rho, &sigma, None)))
}

pub fn log_convexity_t(ctx: &mut TrialCtx) -> Result<Trial> {
    let (rho, sigma) = full_pair(&mut ctx.rng, ctx.dim)?;
    let inner = grid(21).map(|t| Ok(f(&rho, &sigma, t)?.ln())).collect::<Result<Vec<_>>>()?;
    // beyond [0, 1]: t from -1 to 2 in steps of 0.1
    let outer = (0..=30)
        .map(|i| Ok(spectral_fidelity_extended(&rho, &sigma, -1.0 + 0.1 * i as f64)?.value.ln()))
        .collect::<Result<Vec<_>>>()?;
    let v = second_differences(&inner).chain(second_differences(&outer)).map(|d| -d).fold(f64::NEG_INFINITY, f64::max);
    Ok(Trial::new(v, pair_witness(&rho, &sigma, None)))
}

pub fn flip_symmetry(ctx: &mut TrialCtx) -> Result<Trial> {
    let (rho, sigma) = full_pair(&mut ctx.rng, ctx.dim)?;
    let mut worst = (f64::NEG_INFINITY, 0.0);
    for t in grid(11) {
        let v = (f(&rho, &sigma, t)? - f(&sigma, &rho, 1.0 - t)?).abs();
        if v > worst.0 {
            worst = (v, t);
        }
    }
    Ok(Trial::new(worst.0, pair_witness(&rho, &sigma, Some(worst.1))))
}

pub fn multiplicativity(ctx: &mut TrialCtx) -> Result<Trial> {
    let (r1, s1) = full_pair(&mut ctx.rng, ctx.dim)?;
    let (r2, s2) = full_pair(&mut ctx.rng, 2)?;
    let t = ctx.rng.random::<f64>();
    let joint = f(&r1.tensor(&r2), &s1.tensor(&s2), t)?;
    let v = (joint - f(&r1, &s1, t)? * f(&r2, &s2, t)?).abs();
    Ok(Trial::new(v, json!({ "rho1": js(&r1), "sigma1": js(&s1), "rho2": js(&r2), "sigma2": js(&s2), "t": t })))
}

pub fn unitary_invariance(ctx: &mut TrialCtx) -> Result<Trial> {
    let (rho, sigma) = any_rank_pair(&mut ctx.rng, ctx.dim)?;
    let u = random_unitary_with(&mut ctx.rng, ctx.dim)?;
    let t = ctx.rng.random::<f64>();
    let v = (f(&rho.conjugate(&u)?, &sigma.conjugate(&u)?, t)? - f(&rho, &sigma, t)?).abs();
    Ok(Trial::new(v, pair_witness(&rho, &sigma, Some(t))))
}

pub fn tensor_stabilization(ctx: &mut TrialCtx) -> Result<Trial> {
    let (rho, sigma) = any_rank_pair(&mut ctx.rng, ctx.dim)?;
    let tau = any_rank_state(&mut ctx.rng, 2)?;
    let t = ctx.rng.random::<f64>();
    let v = (f(&rho.tensor(&tau), &sigma.tensor(&tau), t)? - f(&rho, &sigma, t)?).abs();
    Ok(Trial::new(v, json!({ "rho": js(&rho), "sigma": js(&sigma), "tau": js(&tau), "t": t })))
}

/// `rho` lives on the first `k` basis vectors and `sigma` on the rest,
/// optionally rotated by a common unitary.
fn orthogonal_pair(rng: &mut SeededRng, d: usize) -> Result<(DensityMatrix, DensityMatrix)> {
    let k = rng.random_range(1..d);
    let ra = rng.random_range(1..=k);
    let rb = rng.random_range(1..=d - k);
    let a = random_density_with(rng, k, ra)?;
    let b = random_density_with(rng, d - k, rb)?;
    let mut ma = ComplexMatrix::zeros(d, d);
    ma.set_block(0, 0, a.matrix().as_matrix());
    let mut mb = ComplexMatrix::zeros(d, d);
    mb.set_block(k, k, b.matrix().as_matrix());
    let rho = DensityMatrix::new(HermitianMatrix::new(ma)?)?;
    let sigma = DensityMatrix::new(HermitianMatrix::new(mb)?)?;
    if rng.random::<bool>() {
        let u = random_unitary_with(rng, d)?;
        Ok((rho.conjugate(&u)?, sigma.conjugate(&u)?))
    } else {
        Ok((rho, sigma))
    }
}

pub fn zero_condition(ctx: &mut TrialCtx) -> Result<Trial> {
    let (rho, sigma) = orthogonal_pair(&mut ctx.rng, ctx.dim)?;
    let extra = open_unit(&mut ctx.rng);
    let mut worst = (f64::NEG_INFINITY, 0.0);
    for t in [0.1, 0.5, 1.0, extra] {
        let v = f(&rho, &sigma, t)?.abs();
        if v > worst.0 {
            worst = (v, t);
        }
    }
    Ok(Trial::new(worst.0, pair_witness(&rho, &sigma, Some(worst.1))))
}

pub fn positivity(ctx: &mut TrialCtx) -> Result<Trial> {
    let (rho, sigma) = any_rank_pair(&mut ctx.rng, ctx.dim)?;
    let mut min = (f64::INFINITY, 0.0);
    for t in grid(21).skip(1) {
        let v = f(&rho, &sigma, t)?;
        if v < min.0 {
            min = (v, t);
        }
    }
    let violation = if min.0 > 0.0 { 0.0 } else { 1.0 - min.0 };
    Ok(Trial::new(violation, pair_witness(&rho, &sigma, Some(min.1))).with_aux(-min.0))
}

/// Feasible `T` are exactly `ρ^{-1/2} (M^{1/2} K M^{1/2})^{1/2} ρ^{-1/2}` with
/// `M = ρ^{1/2} σ ρ^{1/2}` and `0 ≤ K ≤ I`; `K = I` gives the optimum.
/// Half of the draws put `K` close to `I`.
fn feasible_candidate(
    rng: &mut SeededRng,
    m_half: &HermitianMatrix,
    rho_inv_half: &HermitianMatrix,
) -> Result<HermitianMatrix> {
    let d = m_half.dim();
    let u = random_unitary_with(rng, d)?;
    let near = rng.random::<bool>();
    let k: Vec<f64> =
        (0..d).map(|_| if near { 1.0 - 1e-2 * rng.random::<f64>() } else { rng.random::<f64>() }).collect();
    let inner = HermitianMatrix::from_eigen(&k, &u).sandwich(m_half);
    Ok(frac_power(&inner, 0.5, false)?.sandwich(rho_inv_half))
}

pub fn variational_dominance(ctx: &mut TrialCtx) -> Result<Trial> {
    let (rho, sigma) = full_pair(&mut ctx.rng, ctx.dim)?;
    let rho_inv = frac_power(rho.matrix(), -1.0, false)?;
    let star = inverse_geometric_mean(rho.matrix(), sigma.matrix())?;
    if !block_psd(&rho_inv, star.as_matrix(), sigma.matrix())? {
        return Ok(Trial::new(f64::INFINITY, json!({ "rho": js(&rho), "sigma": js(&sigma), "infeasible": "optimum" })));
    }
    let fid: Vec<f64> = VARIATIONAL_TS.iter().map(|&t| f(&rho, &sigma, t)).collect::<Result<_>>()?;
    let rho_half = frac_power(rho.matrix(), 0.5, false)?;
    let rho_inv_half = frac_power(rho.matrix(), -0.5, false)?;
    let m_half = frac_power(&sigma.matrix().sandwich(&rho_half), 0.5, false)?;
    let mut worst = f64::NEG_INFINITY;
    let mut worst_t = json!(null);
    // equality at the optimum itself
    for (&t, &ft) in VARIATIONAL_TS.iter().zip(&fid) {
        let v = (rho.matrix().trace_product(&frac_power(&star, 2.0 * t, true)?) - ft).abs();
        if v > worst {
            worst = v;
            worst_t = json!({ "t": t, "candidate": "optimum" });
        }
    }
    let mut rejected = 0usize;
    for _ in 0..VARIATIONAL_T_SAMPLES {
        let cand = feasible_candidate(&mut ctx.rng, &m_half, &rho_inv_half)?;
        if !block_psd(&rho_inv, cand.as_matrix(), sigma.matrix())? {
            rejected += 1;
            continue;
        }
        for (&t, &ft) in VARIATIONAL_TS.iter().zip(&fid) {
            let v = rho.matrix().trace_product(&frac_power(&cand, 2.0 * t, true)?) - ft;
            if v > worst {
                worst = v;
                worst_t = json!({ "t": t, "candidate": jm(&cand) });
            }
        }
    }
    Ok(Trial::new(worst, json!({ "rho": js(&rho), "sigma": js(&sigma), "worst": worst_t })).with_aux(rejected as f64))
}

const CONCAVITY_LAMBDAS: [f64; 9] = [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9];

/// Largest `λF(a) + (1 − λ)F(b) − F(λa + (1 − λ)b)` over the λ grid, with the
/// mixed argument in the first slot if `first` is set.
fn concavity_gap(
    a: &DensityMatrix,
    b: &DensityMatrix,
    other: &DensityMatrix,
    t: f64,
    first: bool,
) -> Result<(f64, f64)> {
    let g = |x: &DensityMatrix| if first { f(x, other, t) } else { f(other, x, t) };
    let (fa, fb) = (g(a)?, g(b)?);
    let mut worst = (f64::NEG_INFINITY, 0.0);
    for l in CONCAVITY_LAMBDAS {
        let v = l * fa + (1.0 - l) * fb - g(&a.mix(b, l)?)?;
        if v > worst.0 {
            worst = (v, l);
        }
    }
    Ok(worst)
}

fn concavity_trial(ctx: &mut TrialCtx, t: f64, first: bool, second: bool) -> Result<Trial> {
    let d = ctx.dim;
    let (a, b) = full_pair(&mut ctx.rng, d)?;
    let other = full_state(&mut ctx.rng, d)?;
    let mut worst = (f64::NEG_INFINITY, 0.0, "rho");
    if first {
        let (v, l) = concavity_gap(&a, &b, &other, t, true)?;
        worst = (v, l, "rho");
    }
    if second {
        let (v, l) = concavity_gap(&a, &b, &other, t, false)?;
        if v > worst.0 {
            worst = (v, l, "sigma");
        }
    }
    let witness = json!({
        "a": js(&a), "b": js(&b), "other": js(&other),
        "lambda": worst.1, "t": t, "mixed_argument": worst.2,
    });
    Ok(Trial::new(worst.0, witness))
}

pub fn separate_concavity(ctx: &mut TrialCtx) -> Result<Trial> {
    let t = ctx.t.unwrap_or_else(|| ctx.rng.random::<f64>());
    concavity_trial(ctx, t, true, true)
}

pub fn concavity_rho_upper(ctx: &mut TrialCtx) -> Result<Trial> {
    let t = ctx.t.unwrap_or_else(|| 0.5 + 0.5 * ctx.rng.random::<f64>());
    concavity_trial(ctx, t, true, false)
}

pub fn concavity_sigma_lower(ctx: &mut TrialCtx) -> Result<Trial> {
    let t = ctx.t.unwrap_or_else(|| 0.5 * ctx.rng.random::<f64>());
    concavity_trial(ctx, t, false, true)
}

pub fn first_fvg(ctx: &mut TrialCtx) -> Result<Trial> {
    let (rho, sigma) = any_rank_pair(&mut ctx.rng, ctx.dim)?;
    let half = half_trace_distance(&rho, &sigma)?;
    let mut worst = (f64::NEG_INFINITY, 0.0);
    for t in grid(21) {
        let v = 1.0 - f(&rho, &sigma, t)? - half;
        if v > worst.0 {
            worst = (v, t);
        }
    }
    Ok(Trial::new(worst.0, pair_witness(&rho, &sigma, Some(worst.1))))
}

pub fn second_fvg(ctx: &mut TrialCtx) -> Result<Trial> {
    let t = ctx.t.unwrap_or(0.25);
    let d = ctx.dim;
    let (rho, sigma) = if ctx.rng.random::<bool>() {
        (random_pure_with(&mut ctx.rng, d)?, random_pure_with(&mut ctx.rng, d)?)
    } else {
        any_rank_pair(&mut ctx.rng, d)?
    };
    let fid = f(&rho, &sigma, t)?;
    let v = half_trace_distance(&rho, &sigma)? - (1.0 - fid * fid).max(0.0).sqrt();
    Ok(Trial::new(v, pair_witness(&rho, &sigma, Some(t))))
}

pub fn dpi_monotone(ctx: &mut TrialCtx) -> Result<Trial> {
    let t = ctx.t.unwrap_or(0.8);
    let (rho, sigma) = super::dpi::ensemble_pair(&mut ctx.rng, ctx.dim)?;
    let ch = pinching(ctx.dim)?;
    let before = f(&rho, &sigma, t)?;
    let after = f(&ch.apply(&rho)?, &ch.apply(&sigma)?, t)?;
    let witness = json!({ "rho": js(&rho), "sigma": js(&sigma), "t": t, "f_before": before, "f_after": after });
    Ok(Trial::new(before - after, witness))
}

pub fn dpi_midpoint(ctx: &mut TrialCtx) -> Result<Trial> {
    let (rho, sigma) = any_rank_pair(&mut ctx.rng, ctx.dim)?;
    let n_kraus = ctx.rng.random_range(1..=ctx.dim);
    let ch = random_channel_with(&mut ctx.rng, ctx.dim, n_kraus)?;
    let before = f(&rho, &sigma, 0.5)?;
    let after = f(&ch.apply(&rho)?, &ch.apply(&sigma)?, 0.5)?;
    let witness = json!({
        "rho": js(&rho), "sigma": js(&sigma), "channel": ch.to_json(), "t": 0.5,
        "f_before": before, "f_after": after,
    });
    Ok(Trial::new(before - after, witness))
}

pub fn dpi_analytic(ctx: &mut TrialCtx) -> Result<Trial> {
    let t = 0.5 * (1.0 - ctx.rng.random::<f64>()) * 0.999;
    let p = open_unit(&mut ctx.rng) * 0.999;
    let r = super::dpi::analytic_pair_values(t, p)?;
    let v = (r.f_before - r.lhs).abs().max((r.f_after - r.rhs).abs());
    Ok(Trial::new(v, json!({ "t": t, "p": p, "lhs": r.lhs, "rhs": r.rhs })))
}

pub fn pure_closed_form(ctx: &mut TrialCtx) -> Result<Trial> {
    let d = ctx.dim;
    let pure = random_pure_with(&mut ctx.rng, d)?;
    let other = any_rank_state(&mut ctx.rng, d)?;
    let t = open_unit(&mut ctx.rng);
    let p = pure.overlap(&other).clamp(0.0, 1.0);
    let mut v: f64 = (f(&pure, &other, t)? - p.powf(t)).abs();
    if other.is_full_rank() {
        v = v.max((f(&other, &pure, t)? - p.powf(1.0 - t)).abs());
    }
    v = v.max((uhlmann_fidelity(&pure, &other)?.value - p.sqrt()).abs());
    v = v.max((matsumoto_fidelity(&pure, &other)?.value - p.sqrt()).abs());
    v = v.max((matsumoto_fidelity(&other, &pure)?.value - p.sqrt()).abs());
    Ok(Trial::new(v, json!({ "pure": js(&pure), "other": js(&other), "t": t })))
}

fn unit_vector(rng: &mut SeededRng) -> [f64; 3] {
    loop {
        let v = [complex_normal(rng).re, complex_normal(rng).re, complex_normal(rng).re];
        let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        if n > 1e-6 {
            return [v[0] / n, v[1] / n, v[2] / n];
        }
    }
}

pub fn bloch_formulas(ctx: &mut TrialCtx) -> Result<Trial> {
    let rng = &mut ctx.rng;
    let r = BlochVector::new(unit_vector(rng))?;
    let radius = rng.random::<f64>().cbrt();
    let dir = unit_vector(rng);
    let s = BlochVector::new([radius * dir[0], radius * dir[1], radius * dir[2]])?;
    let t = open_unit(rng);
    let rho = from_bloch(&r)?;
    let sigma = from_bloch(&s)?;
    let p = 0.5 * (1.0 + r.dot(&s));
    // (a) pure rho, arbitrary sigma
    let mut v: f64 = (uhlmann_fidelity(&rho, &sigma)?.value - p.sqrt()).abs();
    v = v.max((matsumoto_fidelity(&rho, &sigma)?.value - p.sqrt()).abs());
    v = v.max((f(&rho, &sigma, t)? - p.powf(t)).abs());
    // (b) both pure at Bloch angle theta
    let s_pure = BlochVector::new(unit_vector(rng))?;
    let theta = r.dot(&s_pure).clamp(-1.0, 1.0).acos();
    let sigma_pure = from_bloch(&s_pure)?;
    let half = (theta / 2.0).cos();
    v = v.max((uhlmann_fidelity(&rho, &sigma_pure)?.value - half).abs());
    v = v.max((f(&rho, &sigma_pure, t)? - half.powf(2.0 * t)).abs());
    Ok(Trial::new(v, json!({ "r": r.0, "s": s.0, "s_pure": s_pure.0, "t": t })))
}

pub fn regularized_agreement(ctx: &mut TrialCtx) -> Result<Trial> {
    let d = ctx.dim;
    let r = ctx.rng.random_range(1..d);
    let rho = random_density_with(&mut ctx.rng, d, r)?;
    let sigma = full_state(&mut ctx.rng, d)?;
    let mut worst = (f64::NEG_INFINITY, 0.0);
    for t in grid(11) {
        let v = (f(&rho, &sigma, t)? - spectral_fidelity_regularized(&rho, &sigma, t, DEFAULT_EPSILON)?).abs();
        if v > worst.0 {
            worst = (v, t);
        }
    }
    Ok(Trial::new(worst.0, pair_witness(&rho, &sigma, Some(worst.1))))
}

pub fn renyi_midpoint(ctx: &mut TrialCtx) -> Result<Trial> {
    let (rho, sigma) = full_pair(&mut ctx.rng, ctx.dim)?;
    let d_half = sandwiched_renyi(&rho, &sigma, 0.5)?;
    let v = (d_half + 2.0 * uhlmann_fidelity(&rho, &sigma)?.value.ln()).abs();
    let affinity = frac_power(rho.matrix(), 0.5, false)?.trace_product(&frac_power(sigma.matrix(), 0.5, false)?);
    let gap = (d_half + 2.0 * affinity.ln()).abs();
    Ok(Trial::new(v, pair_witness(&rho, &sigma, None)).with_aux(gap))
}

pub fn spectral_eigenvalues(ctx: &mut TrialCtx) -> Result<Trial> {
    let a = pd(&mut ctx.rng, ctx.dim)?;
    let b = pd(&mut ctx.rng, ctx.dim)?;
    let l = cholesky(&a)?;
    let similar = HermitianMatrix::new((&(&l.adjoint() * b.as_matrix()) * &l).hermitian_part())?;
    let expected: Vec<f64> = eig(&similar)?.values.iter().map(|x| x.max(0.0).sqrt()).collect();
    let got = eig(&spectral_mean(&a, &b)?)?.values;
    let scale = expected.last().copied().unwrap_or(1.0).max(1.0);
    let v = got.iter().zip(&expected).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max) / scale;
    Ok(Trial::new(v, mat_witness(&a, &b)))
}

pub fn riccati(ctx: &mut TrialCtx) -> Result<Trial> {
    let a = pd(&mut ctx.rng, ctx.dim)?;
    let b = pd(&mut ctx.rng, ctx.dim)?;
    let x = inverse_geometric_mean(&a, &b)?;
    let g = geometric_mean(&a, &b)?;
    let a_inv = frac_power(&a, -1.0, false)?;
    let v = rel(&a.sandwich(&x), &b).max(rel(&a_inv.sandwich(&g), &b));
    Ok(Trial::new(v, mat_witness(&a, &b)))
}

pub fn mean_symmetry(ctx: &mut TrialCtx) -> Result<Trial> {
    let a = pd(&mut ctx.rng, ctx.dim)?;
    let b = pd(&mut ctx.rng, ctx.dim)?;
    let v = rel(&geometric_mean(&a, &b)?, &geometric_mean(&b, &a)?);
    Ok(Trial::new(v, mat_witness(&a, &b)))
}

pub fn congruence_invariance(ctx: &mut TrialCtx) -> Result<Trial> {
    let d = ctx.dim;
    let a = pd(&mut ctx.rng, d)?;
    let b = pd(&mut ctx.rng, d)?;
    let c = ComplexMatrix::from_fn(d, d, |_, _| complex_normal(&mut ctx.rng));
    let lhs = geometric_mean(&a.congruence(&c), &b.congruence(&c))?;
    let rhs = geometric_mean(&a, &b)?.congruence(&c);
    let v = rel(&lhs, &rhs);
    let cj = serde_json::to_value(MatrixJson::from(&c)).unwrap_or(Value::Null);
    Ok(Trial::new(v, json!({ "a": jm(&a), "b": jm(&b), "c": cj })))
}

pub fn inverse_identity(ctx: &mut TrialCtx) -> Result<Trial> {
    let a = pd(&mut ctx.rng, ctx.dim)?;
    let b = pd(&mut ctx.rng, ctx.dim)?;
    let lhs = frac_power(&geometric_mean(&a, &b)?, -1.0, false)?;
    let rhs = geometric_mean(&frac_power(&a, -1.0, false)?, &frac_power(&b, -1.0, false)?)?;
    Ok(Trial::new(rel(&lhs, &rhs), mat_witness(&a, &b)))
}

pub fn tensor_compatibility(ctx: &mut TrialCtx) -> Result<Trial> {
    let a = pd(&mut ctx.rng, ctx.dim)?;
    let b = pd(&mut ctx.rng, ctx.dim)?;
    let c = pd(&mut ctx.rng, 2)?;
    let d = pd(&mut ctx.rng, 2)?;
    let lhs = geometric_mean(&a.kron(&c), &b.kron(&d))?;
    let rhs = geometric_mean(&a, &b)?.kron(&geometric_mean(&c, &d)?);
    Ok(Trial::new(rel(&lhs, &rhs), json!({ "a": jm(&a), "b": jm(&b), "c": jm(&c), "d": jm(&d) })))
}

pub fn support_identity(ctx: &mut TrialCtx) -> Result<Trial> {
    let d = ctx.dim;
    let ra = ctx.rng.random_range(1..d);
    let rb = ctx.rng.random_range(1..d);
    let a = psd_of_rank(&mut ctx.rng, d, ra)?;
    let b = psd_of_rank(&mut ctx.rng, d, rb)?;
    let got = support_projector(&geometric_mean(&a, &b)?)?;
    let expected = intersection_projector(&a, &b)?;
    let v = got.sub(&expected).as_matrix().frobenius_norm();
    Ok(Trial::new(v, json!({ "a": jm(&a), "b": jm(&b), "rank_a": ra, "rank_b": rb })))
}

pub fn weighted_mean_flip(ctx: &mut TrialCtx) -> Result<Trial> {
    let a = pd(&mut ctx.rng, ctx.dim)?;
    let b = pd(&mut ctx.rng, ctx.dim)?;
    let t = ctx.rng.random::<f64>();
    let v = rel(&weighted_spectral_mean(&a, &b, t)?, &weighted_spectral_mean(&b, &a, 1.0 - t)?);
    Ok(Trial::new(v, json!({ "a": jm(&a), "b": jm(&b), "t": t })))
}

pub fn variational_minimizer(ctx: &mut TrialCtx) -> Result<Trial> {
    let d = ctx.dim;
    let a = pd(&mut ctx.rng, d)?;
    let b = pd(&mut ctx.rng, d)?;
    let star = inverse_geometric_mean(&a, &b)?;
    // random PD point, half of the time a perturbation of the optimum
    let x = if ctx.rng.random::<bool>() {
        pd(&mut ctx.rng, d)?
    } else {
        let h = ComplexMatrix::from_fn(d, d, |_, _| complex_normal(&mut ctx.rng) * Complex64::new(1e-3, 0.0));
        let e = HermitianMatrix::new(h.hermitian_part())?;
        let shifted = star.add(&e);
        if eig(&shifted)?.min() > 0.0 {
            shifted
        } else {
            star.clone()
        }
    };
    let best = variational_objective(&a, &b, &star)?;
    let v = (best - variational_objective(&a, &b, &x)?) / best.abs().max(1.0);
    Ok(Trial::new(v, json!({ "a": jm(&a), "b": jm(&b), "x": jm(&x) })))
}
