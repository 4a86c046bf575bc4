//! Density matrices, Bloch vectors, random state ensembles and CPTP maps in
//! Kraus form.

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{numerical_rank, psd_tol, ComplexMatrix, HermitianMatrix, MatrixJson};
use crate::rng::{complex_normal, seeded};

/// Allowed deviation of a density matrix trace from 1.
pub const TRACE_TOL: f64 = 1e-12;
/// Allowed deviation of `Σ K†K` from the identity.
pub const TP_TOL: f64 = 1e-10;

/// Hermitian, PSD, unit-trace matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    mat: HermitianMatrix,
    rank: usize,
}

impl DensityMatrix {
    pub fn new(mat: HermitianMatrix) -> Result<Self> {
        let min = mat.eigen()?.min();
        if min < -psd_tol(&mat) {
            return Err(Error::NotPsd(min));
        }
        let tr = mat.trace();
        if (tr - 1.0).abs() > TRACE_TOL {
            return Err(Error::InvalidTrace(tr));
        }
        let rank = numerical_rank(&mat)?;
        Ok(Self { mat, rank })
    }

    /// Divides a PSD matrix by its trace. Leaves it untouched when the trace
    /// is already 1 to `TRACE_TOL`.
    pub fn from_psd(mat: HermitianMatrix) -> Result<Self> {
        let tr = mat.trace();
        if tr.is_nan() || tr <= 0.0 {
            return Err(Error::InvalidTrace(tr));
        }
        if (tr - 1.0).abs() > TRACE_TOL {
            Self::new(mat.scale(1.0 / tr))
        } else {
            Self::new(mat)
        }
    }

    /// Maximally mixed state `I/d`.
    pub fn maximally_mixed(dim: usize) -> Self {
        let mat = HermitianMatrix::identity(dim).scale(1.0 / dim as f64);
        Self { mat, rank: dim }
    }

    /// Diagonal state from a probability vector.
    pub fn from_probabilities(p: &[f64]) -> Result<Self> {
        check_probabilities(p)?;
        Self::new(HermitianMatrix::from_diagonal(p))
    }

    pub fn matrix(&self) -> &HermitianMatrix {
        &self.mat
    }

    pub fn dim(&self) -> usize {
        self.mat.dim()
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn is_pure(&self) -> bool {
        self.rank == 1
    }

    pub fn is_full_rank(&self) -> bool {
        self.rank == self.dim()
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.dim()).map(|i| self.mat[(i, i)].re).collect()
    }

    /// Whether all off-diagonal entries are exactly zero.
    pub fn is_diagonal(&self) -> bool {
        let n = self.dim();
        (0..n).all(|i| (0..n).all(|j| i == j || self.mat[(i, j)] == Complex64::new(0.0, 0.0)))
    }

    pub fn tensor(&self, other: &Self) -> Self {
        let mat = self.mat.kron(&other.mat);
        Self { mat, rank: self.rank * other.rank }
    }

    /// `U ρ U†`.
    pub fn conjugate(&self, u: &ComplexMatrix) -> Result<Self> {
        Self::new(self.mat.congruence(&u.adjoint()))
    }

    /// `λ ρ + (1 − λ) σ`.
    pub fn mix(&self, other: &Self, lambda: f64) -> Result<Self> {
        Self::from_psd(self.mat.scale(lambda).add(&other.mat.scale(1.0 - lambda)))
    }

    /// `Tr(ρσ)`.
    pub fn overlap(&self, other: &Self) -> f64 {
        self.mat.trace_product(&other.mat)
    }

    /// Keeps the diagonal and scales the off-diagonal entries by `factor ∈ [0, 1]`.
    /// This is `factor·ρ + (1 − factor)·Π(ρ)` and so stays a state.
    pub fn shrink_coherences(&self, factor: f64) -> Result<Self> {
        let n = self.dim();
        let m = ComplexMatrix::from_fn(n, n, |i, j| if i == j { self.mat[(i, j)] } else { self.mat[(i, j)] * factor });
        Self::new(HermitianMatrix::new(m)?)
    }

    pub fn max_coherence(&self) -> f64 {
        let n = self.dim();
        let mut best: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    best = best.max(self.mat[(i, j)].norm());
                }
            }
        }
        best
    }

    pub fn to_json(&self) -> MatrixJson {
        let mut j = MatrixJson::from(&self.mat);
        j.kind = Some("density".into());
        j
    }

    pub fn from_json(j: &MatrixJson) -> Result<Self> {
        if let Some(kind) = &j.kind {
            if kind != "density" {
                return Err(Error::Format(format!("expected a density document, found type `{kind}`")));
            }
        }
        Self::new(j.to_hermitian()?)
    }
}

fn check_probabilities(p: &[f64]) -> Result<()> {
    if p.is_empty() {
        return Err(Error::Normalization("empty probability vector".into()));
    }
    if let Some(x) = p.iter().find(|x| !x.is_finite() || **x < 0.0) {
        return Err(Error::Normalization(format!("negative or non-finite entry {x}")));
    }
    let s: f64 = p.iter().sum();
    if (s - 1.0).abs() > 1e-12 {
        return Err(Error::Normalization(format!("entries sum to {s}")));
    }
    Ok(())
}

pub(crate) fn validate_probabilities(p: &[f64]) -> Result<()> {
    check_probabilities(p)
}

/// Qubit Bloch vector `r` with `|r| ≤ 1`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlochVector(pub [f64; 3]);

impl BlochVector {
    pub fn new(r: [f64; 3]) -> Result<Self> {
        let v = BlochVector(r);
        if r.iter().any(|x| !x.is_finite()) || v.norm() > 1.0 + 1e-12 {
            return Err(Error::Norm(v.norm()));
        }
        Ok(v)
    }

    pub fn norm(&self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn dot(&self, other: &Self) -> f64 {
        self.0.iter().zip(&other.0).map(|(a, b)| a * b).sum()
    }

    pub fn is_pure(&self) -> bool {
        (self.norm() - 1.0).abs() <= 1e-10
    }
}

/// `ρ = ½(I + r·σ)`.
pub fn from_bloch(r: &BlochVector) -> Result<DensityMatrix> {
    let [x, y, z] = BlochVector::new(r.0)?.0;
    let m = ComplexMatrix::from_row_major(
        2,
        2,
        vec![
            Complex64::new((1.0 + z) / 2.0, 0.0),
            Complex64::new(x / 2.0, -y / 2.0),
            Complex64::new(x / 2.0, y / 2.0),
            Complex64::new((1.0 - z) / 2.0, 0.0),
        ],
    )?;
    DensityMatrix::new(HermitianMatrix::new(m)?)
}

/// Inverse of [`from_bloch`] for qubit states.
pub fn to_bloch(rho: &DensityMatrix) -> Result<BlochVector> {
    if rho.dim() != 2 {
        return Err(Error::DimensionMismatch { expected: "qubit".into(), found: format!("dimension {}", rho.dim()) });
    }
    let m = rho.matrix();
    let off = m[(0, 1)];
    BlochVector::new([2.0 * off.re, -2.0 * off.im, m[(0, 0)].re - m[(1, 1)].re])
}

/// `|ψ⟩⟨ψ|` for the normalized `ψ`.
pub fn pure_state(psi: &[Complex64]) -> Result<DensityMatrix> {
    let norm = psi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if psi.is_empty() || !norm.is_finite() || norm <= 0.0 {
        return Err(Error::ZeroVector);
    }
    let v: Vec<Complex64> = psi.iter().map(|z| z / norm).collect();
    let n = v.len();
    let m = ComplexMatrix::from_fn(n, n, |i, j| v[i] * v[j].conj());
    let mat = HermitianMatrix::new(m)?;
    Ok(DensityMatrix { mat, rank: 1 })
}

/// Real-amplitude convenience wrapper around [`pure_state`].
pub fn pure_state_real(psi: &[f64]) -> Result<DensityMatrix> {
    let v: Vec<Complex64> = psi.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    pure_state(&v)
}

/// Ginibre-induced random state `GG†/Tr(GG†)` with `G` of shape `dim × rank`.
pub fn random_density(dim: usize, rank: usize, rng_seed: u64) -> Result<DensityMatrix> {
    random_density_with(&mut seeded(rng_seed), dim, rank)
}

pub fn random_density_with<R: Rng + ?Sized>(rng: &mut R, dim: usize, rank: usize) -> Result<DensityMatrix> {
    if dim == 0 || rank == 0 || rank > dim {
        return Err(Error::Param(format!("need 1 <= rank <= dim, got dim={dim}, rank={rank}")));
    }
    let g = ComplexMatrix::from_fn(dim, rank, |_, _| complex_normal(rng));
    let w = HermitianMatrix::from_hermitized(&g * &g.adjoint());
    let tr = w.trace();
    let mat = w.scale(1.0 / tr);
    let rank_found = numerical_rank(&mat)?;
    Ok(DensityMatrix { mat, rank: rank_found })
}

/// Haar-random pure state.
pub fn random_pure_with<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> Result<DensityMatrix> {
    let u = random_unitary_with(rng, dim)?;
    pure_state(&u.column(0))
}

/// Haar-random unitary: Gram–Schmidt QR of a complex Gaussian matrix, with the
/// triangular factor's diagonal made positive.
pub fn random_unitary(dim: usize, rng_seed: u64) -> Result<ComplexMatrix> {
    random_unitary_with(&mut seeded(rng_seed), dim)
}

pub fn random_unitary_with<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> Result<ComplexMatrix> {
    if dim == 0 {
        return Err(Error::Param("dimension must be positive".into()));
    }
    let g = ComplexMatrix::from_fn(dim, dim, |_, _| complex_normal(rng));
    orthonormalize_columns(&g)
}

/// Modified Gram–Schmidt with one reorthogonalization pass. The resulting
/// `Q` has `R = Q†G` upper triangular with positive diagonal.
pub(crate) fn orthonormalize_columns(g: &ComplexMatrix) -> Result<ComplexMatrix> {
    let (rows, cols) = (g.rows(), g.cols());
    let mut q: Vec<Vec<Complex64>> = Vec::with_capacity(cols);
    for j in 0..cols {
        let mut v = g.column(j);
        for _ in 0..2 {
            for prev in &q {
                let proj: Complex64 = prev.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
                for (x, p) in v.iter_mut().zip(prev) {
                    *x -= proj * p;
                }
            }
        }
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm.is_nan() || norm <= 1e-300 {
            return Err(Error::Domain("rank-deficient Gaussian sample".into()));
        }
        v.iter_mut().for_each(|x| *x /= norm);
        q.push(v);
    }
    Ok(ComplexMatrix::from_fn(rows, cols, |i, j| q[j][i]))
}

/// Completely positive trace-preserving map in Kraus form.
#[derive(Clone, Debug, PartialEq)]
pub struct Channel {
    kraus: Vec<ComplexMatrix>,
}

impl Channel {
    pub fn new(kraus: Vec<ComplexMatrix>) -> Result<Self> {
        let first = kraus.first().ok_or_else(|| Error::Param("channel needs at least one Kraus operator".into()))?;
        let (d_out, d_in) = (first.rows(), first.cols());
        if let Some(k) = kraus.iter().find(|k| k.rows() != d_out || k.cols() != d_in) {
            return Err(Error::DimensionMismatch {
                expected: format!("{d_out}x{d_in} Kraus operators"),
                found: format!("{}x{}", k.rows(), k.cols()),
            });
        }
        let mut sum = ComplexMatrix::zeros(d_in, d_in);
        for k in &kraus {
            sum = &sum + &(&k.adjoint() * k);
        }
        let dev = sum.max_abs_diff(&ComplexMatrix::identity(d_in));
        if dev > TP_TOL {
            return Err(Error::NotTracePreserving(dev));
        }
        Ok(Self { kraus })
    }

    pub fn kraus(&self) -> &[ComplexMatrix] {
        &self.kraus
    }

    pub fn dim_in(&self) -> usize {
        self.kraus[0].cols()
    }

    pub fn dim_out(&self) -> usize {
        self.kraus[0].rows()
    }

    /// `Σ Kᵢ ρ Kᵢ†`.
    pub fn apply(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        if rho.dim() != self.dim_in() {
            return Err(Error::DimensionMismatch {
                expected: format!("dimension {}", self.dim_in()),
                found: format!("dimension {}", rho.dim()),
            });
        }
        let d = self.dim_out();
        let mut out = ComplexMatrix::zeros(d, d);
        for k in &self.kraus {
            out = &out + &(&(k * rho.matrix().as_matrix()) * &k.adjoint());
        }
        DensityMatrix::from_psd(HermitianMatrix::from_hermitized(out))
    }

    pub fn to_json(&self) -> ChannelJson {
        ChannelJson { kraus: self.kraus.iter().map(MatrixJson::from).collect() }
    }

    pub fn from_json(j: &ChannelJson) -> Result<Self> {
        Self::new(j.kraus.iter().map(MatrixJson::to_matrix).collect::<Result<_>>()?)
    }
}

/// `{"kraus": [matrix, ...]}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChannelJson {
    pub kraus: Vec<MatrixJson>,
}

/// Dephasing in the computational basis, with Kraus operators `|i⟩⟨i|`.
pub fn pinching(basis_dim: usize) -> Result<Channel> {
    if basis_dim == 0 {
        return Err(Error::Param("dimension must be positive".into()));
    }
    let kraus = (0..basis_dim)
        .map(|i| {
            let mut k = ComplexMatrix::zeros(basis_dim, basis_dim);
            k[(i, i)] = Complex64::new(1.0, 0.0);
            k
        })
        .collect();
    Channel::new(kraus)
}

pub fn apply(ch: &Channel, rho: &DensityMatrix) -> Result<DensityMatrix> {
    ch.apply(rho)
}

/// Random channel on `dim` with `n_kraus` operators, cut from a random
/// isometry `C^dim → C^(n_kraus·dim)`.
pub fn random_channel_with<R: Rng + ?Sized>(rng: &mut R, dim: usize, n_kraus: usize) -> Result<Channel> {
    if dim == 0 || n_kraus == 0 {
        return Err(Error::Param("dimension and Kraus count must be positive".into()));
    }
    let g = ComplexMatrix::from_fn(dim * n_kraus, dim, |_, _| complex_normal(rng));
    let v = orthonormalize_columns(&g)?;
    let kraus = (0..n_kraus).map(|k| ComplexMatrix::from_fn(dim, dim, |i, j| v[(k * dim + i, j)])).collect();
    Channel::new(kraus)
}
