//! Seeded verification suites, one per registered property, plus directed
//! searches for data-processing and Fuchs–van de Graaf failures.
//!
//! Every trial draws its randomness from `split(seed, (dim_index << 32) | trial)`,
//! so a report depends only on `(property, dims, samples, seed, t)` and the
//! worst witness can be regenerated with [`replay_trial`].

mod dpi;
mod fvg;
mod oracle;
mod properties;
mod report;
mod sweep;

use rayon::prelude::*;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::rng::{split, SeededRng};

pub use dpi::{
    dpi_analytic_family, dpi_witness_count, replay_paper_counterexample, search_dpi_violation, AnalyticDpi,
    ChannelFamily, DpiWitness,
};
pub use fvg::{second_fvg_failure, second_fvg_region, RegionCell, SecondFvg};
pub use report::{PropertyReport, SuiteConfig, Tolerances, Verdict};
pub use sweep::{t_sweep, t_sweep_extended, uniform_grid, SweepRow};

/// Minimum size of a data-processing violation before it counts as a witness.
pub const DPI_MARGIN: f64 = 1e-7;
/// Default number of samples per `(property, dim)`.
pub const DEFAULT_SAMPLES: usize = 500;

/// What a property is expected to do.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Expectation {
    Holds,
    /// Fails for the given parameter.
    PredictedFailure,
    /// Externally known to hold; any violation is unexpected.
    Sanity,
}

pub(crate) struct TrialCtx {
    pub rng: SeededRng,
    pub dim: usize,
    pub t: Option<f64>,
}

/// One trial: its violation (≤ 0 means the property held), the inputs, and an
/// optional auxiliary diagnostic aggregated by maximum.
pub(crate) struct Trial {
    pub violation: f64,
    pub witness: Value,
    pub aux: f64,
}

impl Trial {
    pub fn new(violation: f64, witness: Value) -> Self {
        Self { violation, witness, aux: f64::NEG_INFINITY }
    }

    pub fn with_aux(mut self, aux: f64) -> Self {
        self.aux = aux;
        self
    }
}

type TrialFn = fn(&mut TrialCtx) -> Result<Trial>;

/// A registered property: one statement, its default tolerance and its trial.
pub struct PropertyDef {
    pub id: &'static str,
    pub statement: &'static str,
    pub tolerance: f64,
    /// Shared tolerance key (`dpi_margin`, `fid_tol`) consulted before the default.
    pub shared_tolerance: Option<&'static str>,
    pub default_t: Option<f64>,
    expectation: fn(Option<f64>) -> Expectation,
    /// Label for the auxiliary maximum, when the trial reports one.
    aux_label: Option<&'static str>,
    trial: TrialFn,
}

impl PropertyDef {
    pub fn expectation(&self, t: Option<f64>) -> Expectation {
        (self.expectation)(t.or(self.default_t))
    }

    pub fn tolerance(&self, tol: &Tolerances) -> f64 {
        tol.get(self.id).or_else(|| self.shared_tolerance.and_then(|k| tol.get(k))).unwrap_or(self.tolerance)
    }
}

fn holds(_: Option<f64>) -> Expectation {
    Expectation::Holds
}

fn fails_off_midpoint(t: Option<f64>) -> Expectation {
    if t == Some(0.5) {
        Expectation::Sanity
    } else {
        Expectation::PredictedFailure
    }
}

fn sanity(_: Option<f64>) -> Expectation {
    Expectation::Sanity
}

macro_rules! prop {
    ($id:literal, $stmt:literal, $tol:expr, $shared:expr, $t:expr, $exp:path, $aux:expr, $trial:path) => {
        PropertyDef {
            id: $id,
            statement: $stmt,
            tolerance: $tol,
            shared_tolerance: $shared,
            default_t: $t,
            expectation: $exp,
            aux_label: $aux,
            trial: $trial,
        }
    };
    ($id:literal, $stmt:literal, $tol:expr, $trial:path) => {
        prop!($id, $stmt, $tol, None, None, holds, None, $trial)
    };
}

use properties as p;

static REGISTRY: &[PropertyDef] = &[
    prop!("midpoint_uhlmann", "F_1/2 equals the Uhlmann fidelity", 1e-8, p::midpoint_uhlmann),
    prop!("endpoints", "F_0 = F_1 = 1 for full-rank states", 1e-10, p::endpoints),
    prop!(
        "universal_bound",
        "F_t <= 1 for all t in [0, 1]",
        crate::fidelity::FID_TOL,
        Some("fid_tol"),
        None,
        holds,
        None,
        p::universal_bound
    ),
    prop!(
        "midpoint_minimum",
        "F_t >= F_1/2 for full-rank states",
        crate::fidelity::FID_TOL,
        Some("fid_tol"),
        None,
        holds,
        None,
        p::midpoint_minimum
    ),
    prop!("convexity_t", "t -> F_t is convex on [0, 1]", 1e-8, p::convexity_t),
    prop!("log_convexity_t", "t -> log F_t is convex on the real line", 1e-8, p::log_convexity_t),
    prop!("flip_symmetry", "F_t(rho, sigma) = F_(1-t)(sigma, rho)", 1e-9, p::flip_symmetry),
    prop!("multiplicativity", "F_t is multiplicative under tensor products", 1e-8, p::multiplicativity),
    prop!("unitary_invariance", "F_t(U rho U*, U sigma U*) = F_t(rho, sigma)", 1e-9, p::unitary_invariance),
    prop!("tensor_stabilization", "F_t(rho (x) tau, sigma (x) tau) = F_t(rho, sigma)", 1e-9, p::tensor_stabilization),
    prop!("zero_condition", "F_t = 0 for t in (0, 1] when rho sigma = 0", 1e-10, p::zero_condition),
    prop!(
        "positivity",
        "F_t > 0 for t in (0, 1] when rho sigma != 0",
        0.0,
        None,
        None,
        holds,
        Some("negated_min_value"),
        p::positivity
    ),
    prop!(
        "variational_dominance",
        "Tr(rho T^2t) <= F_t for every feasible T when t <= 1/2, with equality at the inverse geometric mean",
        1e-8,
        None,
        None,
        holds,
        Some("rejected_samples"),
        p::variational_dominance
    ),
    prop!(
        "separate_concavity",
        "F_t is concave in each argument separately for every t in [0, 1]",
        1e-8,
        p::separate_concavity
    ),
    prop!("concavity_rho_upper", "F_t is concave in rho for t in [1/2, 1]", 1e-8, p::concavity_rho_upper),
    prop!("concavity_sigma_lower", "F_t is concave in sigma for t in [0, 1/2]", 1e-8, p::concavity_sigma_lower),
    prop!("first_fvg", "1 - F_t <= half the trace distance", 1e-9, Some("fid_tol"), None, holds, None, p::first_fvg),
    prop!(
        "second_fvg",
        "half the trace distance <= sqrt(1 - F_t^2); fails for pure states when t < 1/2",
        1e-9,
        None,
        Some(0.25),
        fails_off_midpoint,
        None,
        p::second_fvg
    ),
    prop!(
        "dpi_monotone",
        "F_t is monotone under pinching; fails away from t = 1/2",
        DPI_MARGIN,
        Some("dpi_margin"),
        Some(0.8),
        fails_off_midpoint,
        None,
        p::dpi_monotone
    ),
    prop!(
        "dpi_midpoint",
        "F_1/2 is monotone under random channels",
        DPI_MARGIN,
        Some("dpi_margin"),
        Some(0.5),
        sanity,
        None,
        p::dpi_midpoint
    ),
    prop!(
        "dpi_analytic_family",
        "the two-parameter qubit family reproduces its closed form before and after pinching",
        1e-9,
        p::dpi_analytic
    ),
    prop!("pure_closed_form", "F_t = p^t for pure rho and q^(1-t) for pure sigma", 1e-9, p::pure_closed_form),
    prop!("bloch_formulas", "qubit Bloch-vector closed forms for a pure argument", 1e-9, p::bloch_formulas),
    prop!(
        "regularized_agreement",
        "the epsilon-regularized fidelity agrees with the support convention on rank-deficient rho",
        1e-5,
        p::regularized_agreement
    ),
    prop!(
        "renyi_midpoint",
        "sandwiched Renyi divergence at alpha = 1/2 equals -2 log of the Uhlmann fidelity",
        1e-8,
        None,
        None,
        holds,
        Some("affinity_gap"),
        p::renyi_midpoint
    ),
    prop!(
        "spectral_eigenvalues",
        "eigenvalues of the spectral mean are the square roots of those of AB",
        1e-8,
        p::spectral_eigenvalues
    ),
    prop!("riccati", "the geometric mean solves X A^-1 X = B", 1e-9, p::riccati),
    prop!("mean_symmetry", "A # B = B # A", 1e-9, p::mean_symmetry),
    prop!("congruence_invariance", "(C*AC) # (C*BC) = C*(A # B)C", 1e-8, p::congruence_invariance),
    prop!("inverse_identity", "(A # B)^-1 = A^-1 # B^-1", 1e-8, p::inverse_identity),
    prop!("tensor_compatibility", "(A (x) C) # (B (x) D) = (A # B) (x) (C # D)", 1e-8, p::tensor_compatibility),
    prop!("support_identity", "supp(A # B) = supp A intersected with supp B", 1e-7, p::support_identity),
    prop!(
        "weighted_mean_flip",
        "the weighted spectral mean satisfies A at t with B = B at 1-t with A",
        1e-9,
        p::weighted_mean_flip
    ),
    prop!("variational_minimizer", "A^-1 # B minimizes Tr(AX) + Tr(BX^-1)", 1e-9, p::variational_minimizer),
];

/// All registered properties in a fixed order.
pub fn registry() -> &'static [PropertyDef] {
    REGISTRY
}

pub fn find_property(id: &str) -> Result<&'static PropertyDef> {
    REGISTRY.iter().find(|p| p.id == id).ok_or_else(|| Error::UnknownProperty(id.to_string()))
}

pub(crate) fn is_known_tolerance_key(key: &str) -> bool {
    key == "dpi_margin" || key == "fid_tol" || REGISTRY.iter().any(|p| p.id == key)
}

/// Runs a property suite with default tolerances and parameter.
pub fn run_suite(property_id: &str, dims: &[usize], n_samples: usize, rng_seed: u64) -> Result<PropertyReport> {
    run(&SuiteConfig::new(property_id, dims, n_samples, rng_seed))
}

fn stream(dim_index: usize, trial: usize) -> u64 {
    ((dim_index as u64) << 32) | trial as u64
}

fn validate(cfg: &SuiteConfig) -> Result<&'static PropertyDef> {
    let def = find_property(&cfg.property)?;
    if cfg.dims.is_empty() {
        return Err(Error::Param("at least one dimension is required".into()));
    }
    if let Some(&d) = cfg.dims.iter().find(|&&d| d < 2) {
        return Err(Error::Param(format!("dimensions must be at least 2, got {d}")));
    }
    if cfg.samples == 0 || cfg.samples > u32::MAX as usize {
        return Err(Error::Param(format!("sample count must be in 1..=2^32-1, got {}", cfg.samples)));
    }
    if let Some(t) = cfg.t {
        if !(0.0..=1.0).contains(&t) {
            return Err(Error::Param(format!("t must lie in [0, 1], got {t}")));
        }
    }
    Ok(def)
}

fn evaluate(def: &PropertyDef, cfg: &SuiteConfig, dim_index: usize, trial: usize) -> Trial {
    let dim = cfg.dims[dim_index];
    let mut ctx = TrialCtx { rng: split(cfg.seed, stream(dim_index, trial)), dim, t: cfg.t.or(def.default_t) };
    let mut out = match (def.trial)(&mut ctx) {
        Ok(trial) => trial,
        Err(e) => Trial::new(f64::INFINITY, json!({ "error": e.to_string() })),
    };
    if out.violation.is_nan() {
        out.violation = f64::INFINITY;
    }
    if let Value::Object(map) = &mut out.witness {
        map.insert("dim".into(), json!(dim));
        map.insert("trial".into(), json!(trial));
        map.insert("stream".into(), json!(stream(dim_index, trial)));
    }
    out
}

/// Runs a suite. Trials are evaluated in parallel; the report is reduced in
/// trial order so it does not depend on scheduling.
pub fn run(cfg: &SuiteConfig) -> Result<PropertyReport> {
    let def = validate(cfg)?;
    let tolerance = def.tolerance(&cfg.tolerances);
    let mut worst: Option<Trial> = None;
    let mut aux = f64::NEG_INFINITY;
    let mut violating = 0usize;
    for dim_index in 0..cfg.dims.len() {
        let trials: Vec<Trial> = (0..cfg.samples).into_par_iter().map(|i| evaluate(def, cfg, dim_index, i)).collect();
        for trial in trials {
            aux = aux.max(trial.aux);
            if trial.violation > tolerance {
                violating += 1;
            }
            if worst.as_ref().is_none_or(|w| trial.violation > w.violation) {
                worst = Some(trial);
            }
        }
    }
    let worst = worst.expect("at least one trial");
    let t = cfg.t.or(def.default_t);
    let verdict = if worst.violation <= tolerance {
        Verdict::Holds
    } else if def.expectation(t) == Expectation::PredictedFailure {
        Verdict::FailsAsPredicted
    } else {
        Verdict::Unexpected
    };
    let total = cfg.samples * cfg.dims.len();
    let mut notes = vec![def.statement.to_string(), format!("{violating} of {total} trials exceed the tolerance")];
    if let Some(label) = def.aux_label {
        notes.push(format!("{label} = {}", crate::output::format_f64(aux)));
    }
    if cfg.property == "positivity" {
        notes.push("strict positivity requires non-orthogonal supports; orthogonal supports give 0".into());
    }
    Ok(PropertyReport {
        property_id: def.id.to_string(),
        verdict,
        max_violation: worst.violation,
        tolerance,
        worst_witness: worst.witness,
        seed: cfg.seed,
        samples: total,
        dims: cfg.dims.clone(),
        t,
        notes,
    })
}

/// Recomputes a single trial of a suite, e.g. the worst witness of a report.
pub fn replay_trial(cfg: &SuiteConfig, dim_index: usize, trial: usize) -> Result<(f64, Value)> {
    let def = validate(cfg)?;
    if dim_index >= cfg.dims.len() || trial >= cfg.samples {
        return Err(Error::Param(format!("trial ({dim_index}, {trial}) is outside the suite")));
    }
    let out = evaluate(def, cfg, dim_index, trial);
    Ok((out.violation, out.witness))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ids_are_unique() {
        let mut ids: Vec<_> = registry().iter().map(|p| p.id).collect();
        ids.sort();
        ids.dedup();
        assert_eq!(ids.len(), registry().len());
    }

    #[test]
    fn unknown_property() {
        assert!(matches!(run_suite("nope", &[2], 10, 1), Err(Error::UnknownProperty(_))));
    }

    #[test]
    fn rejects_dimension_one() {
        assert!(matches!(run_suite("flip_symmetry", &[1], 10, 1), Err(Error::Param(_))));
    }

    #[test]
    fn every_property_runs() {
        for def in registry() {
            let r = run_suite(def.id, &[2, 3], 3, 11).unwrap();
            assert!(r.max_violation.is_finite(), "{}: {:?}", def.id, r.worst_witness);
        }
    }

    #[test]
    fn report_is_reproducible() {
        let a = run_suite("flip_symmetry", &[2, 3], 20, 42).unwrap();
        let b = run_suite("flip_symmetry", &[2, 3], 20, 42).unwrap();
        assert_eq!(crate::output::to_json_string(&a).unwrap(), crate::output::to_json_string(&b).unwrap());
    }

    #[test]
    fn worst_witness_replays() {
        let cfg = SuiteConfig::new("unitary_invariance", &[2, 3], 15, 5);
        let r = run(&cfg).unwrap();
        let dim_index = cfg.dims.iter().position(|&d| d == r.worst_witness["dim"].as_u64().unwrap() as usize).unwrap();
        let trial = r.worst_witness["trial"].as_u64().unwrap() as usize;
        let (v, w) = replay_trial(&cfg, dim_index, trial).unwrap();
        assert_eq!(v, r.max_violation);
        assert_eq!(w, r.worst_witness);
    }

    #[test]
    fn tolerance_override() {
        let mut tol = Tolerances::new();
        tol.set_from_str("flip_symmetry=0.5").unwrap();
        assert!(tol.set_from_str("bogus=1").is_err());
        assert!(tol.set_from_str("flip_symmetry").is_err());
        let r = run(&SuiteConfig::new("flip_symmetry", &[2], 4, 1).with_tolerances(tol)).unwrap();
        assert_eq!(r.tolerance, 0.5);
    }
}
