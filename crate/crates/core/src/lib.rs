//! Matrix geometric and spectral means on the PSD cone, the weighted spectral
//! fidelity family `Fₜ(ρ,σ) = Tr(ρ (ρ⁻¹♯σ)^{2t})`, and a seeded harness that
//! checks its structural properties and searches for counterexamples.
//!
//! ```
//! use specfid::{spectral_fidelity, uhlmann_fidelity, random_density};
//!
//! let rho = random_density(3, 3, 1).unwrap();
//! let sigma = random_density(3, 3, 2).unwrap();
//! let mid = spectral_fidelity(&rho, &sigma, 0.5).unwrap().value;
//! let uhl = uhlmann_fidelity(&rho, &sigma).unwrap().value;
//! assert!((mid - uhl).abs() < 1e-10);
//! ```

#![forbid(unsafe_code)]

pub mod error;
pub mod fidelity;
pub mod linalg;
pub mod means;
pub mod output;
pub mod rng;
pub mod states;
pub mod verify;

pub use error::{Error, Result};
pub use fidelity::{
    diagonal_spectral_fidelity, fvg_bounds, half_trace_distance, matsumoto_fidelity, sandwiched_renyi,
    spectral_fidelity, spectral_fidelity_extended, spectral_fidelity_regularized, uhlmann_fidelity, FidelityMethod,
    FidelityValue, FvgBounds, FID_TOL,
};
pub use linalg::{
    block_psd, eig, frac_power, is_psd, matrix_function, trace_norm, ComplexMatrix, EigenSystem, HermitianMatrix,
    MatrixJson,
};
pub use means::{
    geometric_mean, geometric_mean_on_support, inverse_geometric_mean, spectral_mean, variational_objective,
    weighted_spectral_mean, PositivePair,
};
pub use num_complex::Complex64;
pub use states::{
    apply, from_bloch, pinching, pure_state, random_density, random_unitary, to_bloch, BlochVector, Channel,
    ChannelJson, DensityMatrix,
};
pub use verify::{
    dpi_analytic_family, replay_paper_counterexample, run_suite, search_dpi_violation, second_fvg_failure, t_sweep,
    ChannelFamily, DpiWitness, PropertyReport, SuiteConfig, Tolerances, Verdict,
};
