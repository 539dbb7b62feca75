//! Parameter sweeps over grids of couplings and temperatures.
//!
//! Every grid point is solved independently: build the operator, pick a
//! solver (Krylov ground state, or the dense spectrum when a thermal state
//! is needed), then evaluate the requested observables. Points run on a
//! worker pool but results always come back in row-major grid order.

mod output;
mod preset;
mod spec;

use std::collections::BTreeMap;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use crate::eigen::{self, EigenConfig, Spectrum};
use crate::error::{Error, Result};
use crate::hamiltonian::{CouplingParams, HamiltonianOp};
use crate::lattice::Lattice;
use crate::mqc::{mqc, pairwise_sum};
use crate::qstate::{one_vs_rest_negativity, pair_negativity, QuantumState};
use crate::thermal::gibbs;

pub use output::{write_csv, write_manifest, write_sweep, Manifest};
pub use preset::{preset, Preset, SweepJob, PRESET_NAMES};
pub use spec::{Axis, AxisPoints, Observable, Param, SweepSpec};

pub const DIAGNOSTIC_COLUMNS: [&str; 4] = ["residual", "clamped", "truncation_weight", "error"];

/// Largest lattice for which thermal points use the complete dense spectrum.
pub const THERMAL_DENSE_SITES: usize = 10;

#[derive(Debug, Clone, Copy, Default)]
pub struct RunOptions {
    /// Worker count; `None` lets the pool decide.
    pub threads: Option<usize>,
    /// Enables truncated-spectrum thermal states above [`THERMAL_DENSE_SITES`].
    pub allow_expensive: bool,
    pub eigen: EigenConfig,
}

impl RunOptions {
    pub fn seed(&self) -> u64 {
        self.eigen.lanczos.seed
    }
}

/// One grid point: axis values, observable values in header order, diagnostics.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PointRecord {
    pub params: BTreeMap<Param, f64>,
    pub values: Vec<f64>,
    pub residual: f64,
    pub clamped: bool,
    pub truncation_weight: f64,
    pub error: Option<String>,
}

#[derive(Debug, Clone)]
pub struct SweepResult {
    pub spec: SweepSpec,
    pub records: Vec<PointRecord>,
    pub seed: u64,
    pub started: String,
    pub elapsed_s: f64,
}

/// State and spectrum prepared for one parameter point.
#[derive(Debug, Clone)]
pub struct PreparedPoint {
    pub spectrum: Spectrum,
    pub state: QuantumState,
    pub truncation_weight: f64,
}

/// Solves one parameter point.
///
/// At `T = 0` the state is the lowest Krylov eigenvector, which has definite
/// parity. At `T > 0` the Gibbs state is built from the complete dense
/// spectrum, or above [`THERMAL_DENSE_SITES`] (only with `allow_expensive`)
/// from a truncated spectrum grown until the discarded weight is negligible.
pub fn prepare_point(
    lattice: &Lattice,
    params: CouplingParams,
    temperature: f64,
    levels: usize,
    opts: &RunOptions,
) -> Result<PreparedPoint> {
    let op = HamiltonianOp::new(lattice, params)?;
    let dim = op.dim();
    if temperature.is_nan() || temperature < 0.0 {
        return Err(Error::invalid(format!("temperature must be >= 0, got {temperature}")));
    }
    if temperature == 0.0 {
        let spectrum = eigen::low_spectrum_with(&op, levels.clamp(1, dim), &opts.eigen)?;
        let state = spectrum.ground_state();
        return Ok(PreparedPoint { spectrum, state, truncation_weight: 0.0 });
    }
    if lattice.n_sites() <= THERMAL_DENSE_SITES {
        let spectrum = eigen::full_spectrum_with(&op, &opts.eigen)?;
        let thermal = gibbs(&spectrum, temperature)?;
        let truncation_weight = thermal.truncation_weight();
        return Ok(PreparedPoint { spectrum, state: thermal.into_state(), truncation_weight });
    }
    if !opts.allow_expensive {
        return Err(refuse_thermal(lattice.n_sites()));
    }
    let mut k = levels.max(32).min(dim);
    loop {
        let spectrum = eigen::low_spectrum_with(&op, k, &opts.eigen)?;
        match gibbs(&spectrum, temperature) {
            Ok(thermal) => {
                let truncation_weight = thermal.truncation_weight();
                return Ok(PreparedPoint { spectrum, state: thermal.into_state(), truncation_weight });
            }
            Err(Error::Truncation(_)) if k < dim => k = (2 * k).min(dim),
            Err(e) => return Err(e),
        }
    }
}

fn refuse_thermal(n_sites: usize) -> Error {
    Error::ResourceLimit(format!(
        "thermal states for {n_sites} sites exceed the dense limit of {THERMAL_DENSE_SITES}; \
         pass --allow-expensive to use a truncated spectrum"
    ))
}

fn param_value(spec: &SweepSpec, point: &BTreeMap<Param, f64>, p: Param) -> f64 {
    point
        .get(&p)
        .copied()
        .or_else(|| spec.fixed_or_default(p))
        .expect("validated spec defines every parameter")
}

fn evaluate(spec: &SweepSpec, lattice: &Lattice, point: &BTreeMap<Param, f64>, opts: &RunOptions) -> PointRecord {
    let width: usize = spec.observables.iter().map(|o| o.columns().len()).sum();
    let mut record = PointRecord {
        params: point.clone(),
        values: Vec::with_capacity(width),
        residual: f64::NAN,
        clamped: false,
        truncation_weight: f64::NAN,
        error: None,
    };
    let params = CouplingParams {
        j: param_value(spec, point, Param::J),
        omega: param_value(spec, point, Param::Omega),
        eta: param_value(spec, point, Param::Eta),
        h: param_value(spec, point, Param::H),
    };
    let temperature = param_value(spec, point, Param::T);
    let levels = spec.observables.iter().map(|o| o.levels()).max().unwrap_or(1);

    let outcome = (|| -> Result<()> {
        let prepared = prepare_point(lattice, params, temperature, levels, opts)?;
        record.residual = prepared.spectrum.max_residual();
        record.truncation_weight = prepared.truncation_weight;
        let state = &prepared.state;
        for obs in &spec.observables {
            match *obs {
                Observable::Pair(i, j) => record.values.push(pair_negativity(state, i, j)?),
                Observable::OneVsRest(i) => record.values.push(one_vs_rest_negativity(state, i)?),
                Observable::Mqc(i) => {
                    let r = mqc(state, i)?;
                    record.clamped |= r.clamped;
                    record.values.push(r.t_n);
                }
                Observable::PairwiseSum(i) => record.values.push(pairwise_sum(state, i)?),
                Observable::Energies(k) => {
                    record.values.extend_from_slice(&prepared.spectrum.energies()[..k]);
                }
                Observable::Gap => record.values.push(eigen::gap(&prepared.spectrum)?),
            }
        }
        Ok(())
    })();

    if let Err(e) = outcome {
        record.error = Some(e.to_string());
        record.values.resize(width, f64::NAN);
    }
    record
}

/// Evaluates every grid point of `spec`.
///
/// Spec problems (and thermal points above the dense limit without
/// `allow_expensive`) fail the whole call; solver failures are recorded in
/// the affected point's `error` field.
pub fn run_sweep(spec: &SweepSpec, opts: &RunOptions) -> Result<SweepResult> {
    spec.validate()?;
    let lattice = Lattice::new(spec.side)?;
    if spec.needs_thermal() && lattice.n_sites() > THERMAL_DENSE_SITES && !opts.allow_expensive {
        return Err(refuse_thermal(lattice.n_sites()));
    }
    let started = chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true);
    let clock = Instant::now();
    let points = spec.points();
    let run = || -> Vec<PointRecord> {
        points.par_iter().map(|p| evaluate(spec, &lattice, p, opts)).collect()
    };
    let records = match opts.threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
            .map_err(|e| Error::ResourceLimit(format!("cannot start worker pool: {e}")))?
            .install(run),
        None => run(),
    };
    Ok(SweepResult {
        spec: spec.clone(),
        records,
        seed: opts.seed(),
        started,
        elapsed_s: clock.elapsed().as_secs_f64(),
    })
}
