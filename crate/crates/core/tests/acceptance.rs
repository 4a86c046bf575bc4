//! End-to-end acceptance checks. Each criterion prints one PASS/FAIL line;
//! run with `--nocapture` to see them.

use std::time::{Duration, Instant};

use specfid::output::to_json_string;
use specfid::states::pure_state_real;
use specfid::verify::{dpi_witness_count, run, DPI_MARGIN};
use specfid::{
    random_density, replay_paper_counterexample, run_suite, search_dpi_violation, second_fvg_failure,
    spectral_fidelity, ChannelFamily, DensityMatrix, SuiteConfig, Verdict,
};

const SEED: u64 = 20_240_601;
const ALL_DIMS: [usize; 5] = [2, 3, 4, 5, 6];

struct Outcome {
    pass: bool,
    detail: String,
}

impl Outcome {
    fn new(pass: bool, detail: impl Into<String>) -> Self {
        Self { pass, detail: detail.into() }
    }
}

/// Max violation of a registry suite against an explicit bound.
fn suite_within(id: &str, dims: &[usize], samples: usize, bound: f64) -> (bool, String) {
    match run_suite(id, dims, samples, SEED) {
        Ok(r) => (
            r.max_violation <= bound && r.verdict == Verdict::Holds,
            format!("{id}: max {:.3e} (bound {bound:e})", r.max_violation),
        ),
        Err(e) => (false, format!("{id}: error {e}")),
    }
}

fn all_within(checks: &[(&str, &[usize], usize, f64)]) -> Outcome {
    let results: Vec<_> = checks.iter().map(|&(id, dims, n, b)| suite_within(id, dims, n, b)).collect();
    let pass = results.iter().all(|r| r.0);
    Outcome::new(pass, results.into_iter().map(|r| r.1).collect::<Vec<_>>().join("; "))
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let w = match replay_paper_counterexample() {
        Ok(w) => w,
        Err(e) => return Outcome::new(false, format!("error {e}")),
    };
    let elapsed = start.elapsed();
    let pass = (w.f_before - 0.755086).abs() <= 1e-4
        && (w.f_after - 0.752207).abs() <= 1e-4
        && elapsed < Duration::from_millis(10);
    Outcome::new(pass, format!("before {:.6}, after {:.6}, {elapsed:?}", w.f_before, w.f_after))
}

fn criterion_2() -> Outcome {
    let start = Instant::now();
    let (ok, detail) = suite_within("midpoint_uhlmann", &ALL_DIMS, 1000, 1e-8);
    let elapsed = start.elapsed();
    Outcome::new(ok && elapsed < Duration::from_secs(10), format!("{detail}, {elapsed:?}"))
}

fn criterion_3() -> Outcome {
    all_within(&[
        ("endpoints", &ALL_DIMS, 500, 1e-10),
        ("universal_bound", &ALL_DIMS, 500, 1e-9),
        ("convexity_t", &ALL_DIMS, 500, 1e-8),
        ("log_convexity_t", &ALL_DIMS, 500, 1e-8),
    ])
}

fn criterion_4() -> Outcome {
    all_within(&[
        ("flip_symmetry", &ALL_DIMS, 500, 1e-8),
        ("multiplicativity", &[2], 500, 1e-8),
        ("unitary_invariance", &ALL_DIMS, 500, 1e-8),
        ("tensor_stabilization", &ALL_DIMS, 500, 1e-8),
    ])
}

fn criterion_5() -> Outcome {
    all_within(&[("spectral_eigenvalues", &ALL_DIMS, 500, 1e-8)])
}

fn criterion_6() -> Outcome {
    all_within(&[("pure_closed_form", &ALL_DIMS, 500, 1e-9), ("bloch_formulas", &[2], 500, 1e-9)])
}

fn criterion_7() -> Outcome {
    // each trial checks the optimum's feasibility and 200 feasible T at four t
    let (ok, detail) = suite_within("variational_dominance", &ALL_DIMS, 20, 1e-8);
    let rejected = run_suite("variational_dominance", &ALL_DIMS, 20, SEED)
        .map(|r| r.notes.iter().any(|n| n.contains("rejected_samples = 0.0")))
        .unwrap_or(false);
    Outcome::new(ok && rejected, format!("{detail}, no rejected candidates: {rejected}"))
}

fn orthogonal_qubits() -> specfid::Result<(DensityMatrix, DensityMatrix)> {
    Ok((pure_state_real(&[1.0, 0.0])?, pure_state_real(&[0.0, 1.0])?))
}

fn criterion_8() -> Outcome {
    let direct = || -> specfid::Result<f64> {
        let (r, s) = orthogonal_qubits()?;
        let block = DensityMatrix::from_probabilities(&[0.3, 0.7, 0.0, 0.0])?;
        let other = DensityMatrix::from_probabilities(&[0.0, 0.0, 0.6, 0.4])?;
        let mut worst: f64 = 0.0;
        for t in [0.1, 0.5, 1.0] {
            worst = worst.max(spectral_fidelity(&r, &s, t)?.value.abs());
            worst = worst.max(spectral_fidelity(&block, &other, t)?.value.abs());
        }
        Ok(worst)
    };
    let (ok, detail) = suite_within("zero_condition", &ALL_DIMS, 500, 1e-10);
    match direct() {
        Ok(w) => Outcome::new(ok && w <= 1e-10, format!("{detail}; explicit blocks {w:.3e}")),
        Err(e) => Outcome::new(false, format!("error {e}")),
    }
}

fn criterion_9() -> Outcome {
    let start = Instant::now();
    let mut lines = Vec::new();
    let mut pass = true;
    for t in [0.1, 0.2, 0.25, 0.3, 0.4, 0.6, 0.7, 0.75, 0.8, 0.9] {
        match search_dpi_violation(t, 2, 10_000, SEED, ChannelFamily::Pinching) {
            Ok(Some(w)) if w.gap() > DPI_MARGIN => lines.push(format!("t={t}: {:.3e}", w.gap())),
            Ok(_) => {
                pass = false;
                lines.push(format!("t={t}: none"));
            }
            Err(e) => {
                pass = false;
                lines.push(format!("t={t}: error {e}"));
            }
        }
    }
    let mid = dpi_witness_count(0.5, 2, 10_000, SEED, ChannelFamily::Pinching, DPI_MARGIN);
    pass &= matches!(mid, Ok(0));
    let elapsed = start.elapsed();
    pass &= elapsed < Duration::from_secs(60);
    lines.push(format!("t=0.5 witnesses: {mid:?}"));
    Outcome::new(pass, format!("{}, {elapsed:?}", lines.join(", ")))
}

fn criterion_10() -> Outcome {
    let (first_ok, first) = suite_within("first_fvg", &ALL_DIMS, 500, 1e-9);
    let expected = 0.75f64.sqrt() - 0.5f64.sqrt();
    match second_fvg_failure(0.25, 0.5) {
        Ok(r) => {
            let pass = first_ok && r.violated && (r.margin() - expected).abs() <= 1e-6;
            Outcome::new(pass, format!("{first}; second inequality margin {:.6}", r.margin()))
        }
        Err(e) => Outcome::new(false, format!("error {e}")),
    }
}

fn criterion_11() -> Outcome {
    let mut same = true;
    let mut checked = Vec::new();
    for id in ["midpoint_uhlmann", "universal_bound", "dpi_monotone", "second_fvg", "variational_dominance"] {
        let cfg = SuiteConfig::new(id, &[2, 3], 10, SEED);
        let a = run(&cfg).and_then(|r| Ok(to_json_string(&r)?));
        let b = run(&cfg).and_then(|r| Ok(to_json_string(&r)?));
        same &= matches!((&a, &b), (Ok(x), Ok(y)) if x == y);
        checked.push(id);
    }
    let rho = random_density(4, 2, SEED).map(|r| to_json_string(&r.to_json()).ok());
    let again = random_density(4, 2, SEED).map(|r| to_json_string(&r.to_json()).ok());
    same &= matches!((&rho, &again), (Ok(Some(x)), Ok(Some(y))) if x == y);
    Outcome::new(same, format!("byte-identical reports for {}", checked.join(", ")))
}

type Criterion = (&'static str, fn() -> Outcome);

#[test]
fn acceptance_criteria() {
    let criteria: [Criterion; 11] = [
        ("counterexample replay", criterion_1),
        ("midpoint identity", criterion_2),
        ("endpoints and bound", criterion_3),
        ("structural identities", criterion_4),
        ("spectral-mean eigenvalues", criterion_5),
        ("closed forms", criterion_6),
        ("variational dominance", criterion_7),
        ("zero condition", criterion_8),
        ("DPI failure coverage", criterion_9),
        ("Fuchs-van de Graaf", criterion_10),
        ("determinism", criterion_11),
    ];
    let mut failed = Vec::new();
    for (i, (name, check)) in criteria.iter().enumerate() {
        let out = check();
        let tag = if out.pass { "PASS" } else { "FAIL" };
        println!("{tag} criterion {:>2} ({name}): {}", i + 1, out.detail);
        if !out.pass {
            failed.push(i + 1);
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
