//! Dense complex Hermitian linear algebra.

pub mod eigen;
pub mod json;
pub mod matrix;
pub mod spectral;

pub use eigen::{eig, EigenSystem};
pub use json::MatrixJson;
pub use matrix::{ComplexMatrix, HermitianMatrix, HERM_TOL};
pub use spectral::{
    block_matrix, block_psd, frac_power, is_psd, matrix_function, min_eigenvalue, numerical_rank, psd_tol,
    support_projector, trace_norm,
};
