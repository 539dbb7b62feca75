//! Spectra of the Ising operator: a dense path for complete spectra and a
//! Krylov path for the low-lying end.
//!
//! Both paths diagonalize the even and odd parity sectors separately, so
//! every returned eigenvector has definite parity. This keeps nearly
//! degenerate ferromagnetic doublets (GHZ-like `|0..0> ± |1..1>`) from
//! being returned as arbitrary mixtures.

pub mod lanczos;

use nalgebra::{DMatrix, DVectorView, SymmetricEigen};

use crate::error::{Error, Result};
use crate::hamiltonian::{HamiltonianOp, Parity, SymmetricOperator};
use crate::qstate::QuantumState;

pub use lanczos::{EigenPair, LanczosOptions, DEFAULT_SEED};

/// Default largest system handled by [`full_spectrum`].
pub const DENSE_CAP: usize = 12;

#[derive(Debug, Clone, Copy)]
pub struct EigenConfig {
    pub dense_cap: usize,
    pub lanczos: LanczosOptions,
}

impl Default for EigenConfig {
    fn default() -> Self {
        EigenConfig { dense_cap: DENSE_CAP, lanczos: LanczosOptions::default() }
    }
}

impl EigenConfig {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.lanczos.seed = seed;
        self
    }
}

/// Ascending eigenvalues with their eigenvectors stored as matrix columns.
#[derive(Debug, Clone)]
pub struct Spectrum {
    energies: Vec<f64>,
    vectors: DMatrix<f64>,
    complete: bool,
    n_sites: usize,
    max_residual: f64,
}

impl Spectrum {
    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    pub fn vectors(&self) -> &DMatrix<f64> {
        &self.vectors
    }

    pub fn vector(&self, k: usize) -> DVectorView<'_, f64> {
        self.vectors.column(k)
    }

    pub fn len(&self) -> usize {
        self.energies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.energies.is_empty()
    }

    /// Whether all `2^N` levels are present.
    pub fn is_complete(&self) -> bool {
        self.complete
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    /// Largest `‖H v_k − E_k v_k‖` over the retained pairs.
    pub fn max_residual(&self) -> f64 {
        self.max_residual
    }

    pub fn ground_energy(&self) -> f64 {
        self.energies[0]
    }

    pub fn ground_state(&self) -> QuantumState {
        QuantumState::pure_unchecked(self.n_sites, self.vectors.column(0).into_owned())
    }

    /// Keeps only the lowest `k` levels.
    pub fn truncated(&self, k: usize) -> Spectrum {
        let k = k.min(self.len());
        Spectrum {
            energies: self.energies[..k].to_vec(),
            vectors: self.vectors.columns(0, k).into_owned(),
            complete: self.complete && k == self.len(),
            n_sites: self.n_sites,
            max_residual: self.max_residual,
        }
    }

    fn assemble(n_sites: usize, mut pairs: Vec<EigenPair>, complete: bool) -> Spectrum {
        pairs.sort_by(|a, b| a.value.total_cmp(&b.value));
        let dim = 1usize << n_sites;
        let mut vectors = DMatrix::zeros(dim, pairs.len());
        let mut max_residual: f64 = 0.0;
        for (k, p) in pairs.iter().enumerate() {
            let sign = p
                .vector
                .iter()
                .find(|x| x.abs() > 1e-12)
                .map_or(1.0, |x| x.signum());
            for (b, x) in p.vector.iter().enumerate() {
                vectors[(b, k)] = sign * x;
            }
            max_residual = max_residual.max(p.residual);
        }
        Spectrum {
            energies: pairs.iter().map(|p| p.value).collect(),
            vectors,
            complete,
            n_sites,
            max_residual,
        }
    }
}

/// All `2^N` eigenpairs by dense diagonalization of the two parity blocks.
pub fn full_spectrum(op: &HamiltonianOp) -> Result<Spectrum> {
    full_spectrum_with(op, &EigenConfig::default())
}

pub fn full_spectrum_with(op: &HamiltonianOp, config: &EigenConfig) -> Result<Spectrum> {
    if op.n_sites() > config.dense_cap {
        return Err(Error::ResourceLimit(format!(
            "full spectrum of {} sites exceeds the dense cap of {}; use a truncated spectrum",
            op.n_sites(),
            config.dense_cap
        )));
    }
    let dim = op.dim();
    let mut pairs = Vec::with_capacity(dim);
    let mut scratch = vec![0.0; dim];
    for parity in [Parity::Even, Parity::Odd] {
        let (basis, block) = op.sector_block(parity);
        let eig = SymmetricEigen::new(block);
        for (k, &value) in eig.eigenvalues.iter().enumerate() {
            let mut vector = vec![0.0; dim];
            for (row, &b) in basis.iter().enumerate() {
                vector[b] = eig.eigenvectors[(row, k)];
            }
            op.apply_into(&vector, &mut scratch);
            let residual = scratch
                .iter()
                .zip(&vector)
                .map(|(hv, x)| (hv - value * x).powi(2))
                .sum::<f64>()
                .sqrt();
            pairs.push(EigenPair { value, vector, residual });
        }
    }
    Ok(Spectrum::assemble(op.n_sites(), pairs, true))
}

/// The `k` lowest eigenpairs from Lanczos runs in each parity sector.
pub fn low_spectrum(op: &HamiltonianOp, k: usize) -> Result<Spectrum> {
    low_spectrum_with(op, k, &EigenConfig::default())
}

pub fn low_spectrum_with(op: &HamiltonianOp, k: usize, config: &EigenConfig) -> Result<Spectrum> {
    let dim = op.dim();
    if k == 0 || k > dim {
        return Err(Error::invalid(format!("k must be in 1..={dim}, got {k}")));
    }
    let sector_dim = dim / 2;
    let mut pairs = Vec::with_capacity(2 * k);
    for (tag, parity) in [Parity::Even, Parity::Odd].into_iter().enumerate() {
        let opts = LanczosOptions {
            seed: config.lanczos.seed.wrapping_add(tag as u64),
            ..config.lanczos
        };
        let count = k.min(sector_dim);
        pairs.extend(lanczos::lowest_pairs(op, count, |v| parity.project(v), sector_dim, &opts)?);
    }
    pairs.sort_by(|a, b| a.value.total_cmp(&b.value));
    pairs.truncate(k);
    Ok(Spectrum::assemble(op.n_sites(), pairs, k == dim))
}

/// `E_1 − E_0`.
pub fn gap(spec: &Spectrum) -> Result<f64> {
    if spec.len() < 2 {
        return Err(Error::invalid("gap needs at least two eigenpairs"));
    }
    Ok(spec.energies[1] - spec.energies[0])
}
