//! Monogamy residual of squared negativities around a central site.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::Result;
use crate::qstate::{one_vs_rest_negativity, pair_negativity, QuantumState};

/// Radicands below this are flagged as a monogamy violation rather than rounding.
pub const RADICAND_FLAG: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MqcResult {
    pub center: usize,
    /// `N_{c|rest}`.
    pub one_vs_rest: f64,
    /// `N_{c,j}` for every `j ≠ c`.
    pub pairwise: BTreeMap<usize, f64>,
    /// `N_{c|rest}² − Σ_j N_{c,j}²` before taking the root.
    pub radicand: f64,
    pub t_n: f64,
    /// Set when the radicand fell below `-RADICAND_FLAG` and was clipped.
    pub clamped: bool,
}

impl MqcResult {
    /// `Σ_j N_{c,j}`.
    pub fn pairwise_sum(&self) -> f64 {
        self.pairwise.values().sum()
    }
}

/// `T_N(c) = sqrt(max(0, N_{c|rest}² − Σ_{j≠c} N_{c,j}²))`.
pub fn mqc(state: &QuantumState, center: usize) -> Result<MqcResult> {
    let one_vs_rest = one_vs_rest_negativity(state, center)?;
    let pairwise = pairwise_negativities(state, center)?;
    let radicand = one_vs_rest * one_vs_rest - pairwise.values().map(|x| x * x).sum::<f64>();
    let clamped = radicand < -RADICAND_FLAG;
    if clamped {
        log::debug!("negative monogamy radicand {radicand:.3e} at center {center}");
    }
    Ok(MqcResult {
        center,
        one_vs_rest,
        pairwise,
        radicand,
        t_n: radicand.max(0.0).sqrt(),
        clamped,
    })
}

fn pairwise_negativities(state: &QuantumState, center: usize) -> Result<BTreeMap<usize, f64>> {
    (1..=state.n_sites())
        .filter(|&j| j != center)
        .map(|j| Ok((j, pair_negativity(state, center, j)?)))
        .collect()
}

/// `Σ_{j≠c} N_{c,j}`: plain sum of two-site negativities, not of their squares.
pub fn pairwise_sum(state: &QuantumState, center: usize) -> Result<f64> {
    if center == 0 || center > state.n_sites() {
        return Err(crate::error::Error::invalid(format!("center {center} out of range")));
    }
    Ok(pairwise_negativities(state, center)?.values().sum())
}
