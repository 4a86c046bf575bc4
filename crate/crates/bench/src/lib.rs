//! Fixed inputs shared by the benchmarks.

use specfid::{random_density, DensityMatrix, HermitianMatrix};

/// A full-rank pair of states of dimension `dim`, fixed by `seed`.
pub fn state_pair(dim: usize, seed: u64) -> (DensityMatrix, DensityMatrix) {
    let rho = random_density(dim, dim, seed).expect("valid dimension");
    let sigma = random_density(dim, dim, seed.wrapping_add(1)).expect("valid dimension");
    (rho, sigma)
}

/// A positive definite pair with trace `dim`.
pub fn pd_pair(dim: usize, seed: u64) -> (HermitianMatrix, HermitianMatrix) {
    let (a, b) = state_pair(dim, seed);
    (a.matrix().scale(dim as f64), b.matrix().scale(dim as f64))
}

pub const DIMS: [usize; 4] = [2, 4, 6, 8];
