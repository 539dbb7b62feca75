//! Gibbs states `ρ(T) = Z⁻¹ Σ_i e^{−E_i/T} |e_i><e_i|` with `k_B = 1`.

use crate::eigen::Spectrum;
use crate::error::{Error, Result};
use crate::qstate::QuantumState;

/// Largest discarded probability accepted from a truncated spectrum.
pub const TRUNCATION_LIMIT: f64 = 1e-10;
/// Levels whose Boltzmann factor is below this fraction of the largest are dropped.
pub const WEIGHT_CUTOFF: f64 = 1e-12;
/// Relative energy window treated as one degenerate ground level at `T = 0`.
pub const DEGENERACY_TOL: f64 = 1e-9;

#[derive(Debug, Clone)]
pub struct ThermalState {
    temperature: f64,
    energies: Vec<f64>,
    weights: Vec<f64>,
    truncation_weight: f64,
    state: QuantumState,
}

impl ThermalState {
    pub fn temperature(&self) -> f64 {
        self.temperature
    }

    /// Energies of the retained levels, ascending.
    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    /// Boltzmann probabilities of the retained levels, nonincreasing.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Probability not represented by [`weights`](Self::weights): dropped
    /// negligible levels plus a bound on levels missing from a truncated spectrum.
    pub fn truncation_weight(&self) -> f64 {
        self.truncation_weight
    }

    pub fn state(&self) -> &QuantumState {
        &self.state
    }

    pub fn into_state(self) -> QuantumState {
        self.state
    }

    /// `tr ρ² = Σ w_i²`.
    pub fn purity(&self) -> f64 {
        self.weights.iter().map(|w| w * w).sum()
    }

    /// `<H> = Σ w_i E_i`.
    pub fn mean_energy(&self) -> f64 {
        self.weights.iter().zip(&self.energies).map(|(w, e)| w * e).sum()
    }
}

/// Builds the thermal state at temperature `t` from a (possibly truncated) spectrum.
pub fn gibbs(spec: &Spectrum, t: f64) -> Result<ThermalState> {
    if !t.is_finite() || t < 0.0 {
        return Err(Error::invalid(format!("temperature must be finite and >= 0, got {t}")));
    }
    if spec.is_empty() {
        return Err(Error::invalid("empty spectrum"));
    }
    let energies = spec.energies();
    let e0 = energies[0];
    let dim = 1usize << spec.n_sites();
    let k = spec.len();
    let last = energies[k - 1];

    let (factors, tail) = if t == 0.0 {
        let window = DEGENERACY_TOL * e0.abs().max(1.0);
        let ground = energies.iter().take_while(|&&e| e - e0 <= window).count();
        if ground == k && !spec.is_complete() {
            return Err(Error::Truncation(format!(
                "all {k} retained levels lie in the ground window; increase k beyond {k}"
            )));
        }
        (energies.iter().map(|&e| if e - e0 <= window { 1.0 } else { 0.0 }).collect::<Vec<_>>(), 0.0)
    } else {
        let factors: Vec<f64> = energies.iter().map(|&e| (-(e - e0) / t).exp()).collect();
        let tail = if spec.is_complete() {
            0.0
        } else {
            let z: f64 = factors.iter().sum();
            let bound = (dim - k) as f64 * (-(last - e0) / t).exp() / z;
            if bound > TRUNCATION_LIMIT {
                let needed = e0 + t * ((dim - k) as f64 / TRUNCATION_LIMIT).ln();
                return Err(Error::Truncation(format!(
                    "discarded weight bound {bound:.3e} at T={t}: need levels up to E={needed:.6} \
                     but the highest of the {k} retained is {last:.6}; increase k"
                )));
            }
            bound
        };
        (factors, tail)
    };

    let z: f64 = factors.iter().sum();
    let max = factors.iter().cloned().fold(0.0, f64::max);
    let mut kept = Vec::new();
    let mut dropped = 0.0;
    for (idx, &f) in factors.iter().enumerate() {
        let w = f / z * (1.0 - tail);
        if f >= WEIGHT_CUTOFF * max && f > 0.0 {
            kept.push((idx, w));
        } else {
            dropped += w;
        }
    }

    let total: f64 = kept.iter().map(|(_, w)| w).sum();
    let state = if kept.len() == 1 {
        QuantumState::pure_unchecked(spec.n_sites(), spec.vector(kept[0].0).into_owned())
    } else {
        let mut vectors = nalgebra::DMatrix::zeros(dim, kept.len());
        for (col, &(idx, _)) in kept.iter().enumerate() {
            vectors.set_column(col, &spec.vector(idx));
        }
        QuantumState::mixed_unchecked(spec.n_sites(), kept.iter().map(|(_, w)| w / total).collect(), vectors)
    };

    Ok(ThermalState {
        temperature: t,
        energies: kept.iter().map(|&(idx, _)| energies[idx]).collect(),
        weights: kept.iter().map(|&(_, w)| w).collect(),
        truncation_weight: dropped + tail,
        state,
    })
}
