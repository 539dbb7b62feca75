//! Named, ready-made sweep grids.
//!
//! Axis ranges are approximate. Linear axes default to 61 points and
//! temperature axes to 51.

use super::spec::{Axis, AxisPoints, Observable, Param, SweepSpec};
use crate::error::{Error, Result};

pub const PRESET_NAMES: [&str; 13] = [
    "fig2a", "fig2b", "fig2c", "fig4", "fig5a", "fig5b", "fig5c", "fig6", "fig7", "fig8a", "fig8b", "fig8c", "fig8d",
];

const RESOLUTION: usize = 61;
const HEATMAP_TEMPERATURES: [f64; 3] = [0.0, 0.05, 0.1];
const FIG8_T_MAX: f64 = 0.5;
const FIG8_POINTS: usize = 51;

/// One CSV worth of work inside a preset.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepJob {
    pub label: String,
    pub spec: SweepSpec,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Preset {
    pub name: String,
    pub jobs: Vec<SweepJob>,
}

impl Preset {
    /// Replaces the point count of every linear axis.
    pub fn with_resolution(mut self, n_points: usize) -> Self {
        for job in &mut self.jobs {
            for axis in &mut job.spec.axes {
                if let AxisPoints::Linear { n_points: n, .. } = &mut axis.points {
                    *n = n_points;
                }
            }
        }
        self
    }
}

fn fixed(pairs: &[(Param, f64)]) -> std::collections::BTreeMap<Param, f64> {
    pairs.iter().copied().collect()
}

fn job(label: impl Into<String>, spec: SweepSpec) -> SweepJob {
    SweepJob { label: label.into(), spec }
}

fn ground_state_heatmap(side: usize) -> SweepSpec {
    SweepSpec {
        side,
        axes: vec![Axis::linear(Param::Eta, 0.0, 3.0, RESOLUTION), Axis::linear(Param::J, -6.0, 6.0, RESOLUTION)],
        fixed: fixed(&[(Param::Omega, 1.0)]),
        observables: vec![Observable::Pair(1, 2), Observable::OneVsRest(2), Observable::Mqc(2)],
    }
}

fn anisotropy_heatmaps(name: &str, side: usize, observable: Observable) -> Vec<SweepJob> {
    HEATMAP_TEMPERATURES
        .iter()
        .map(|&t| {
            job(
                format!("{name}_T{t}"),
                SweepSpec {
                    side,
                    axes: vec![
                        Axis::linear(Param::Omega, 0.0, 3.0, RESOLUTION),
                        Axis::linear(Param::Eta, 0.0, 3.0, RESOLUTION),
                    ],
                    fixed: fixed(&[(Param::J, 6.0), (Param::T, t)]),
                    observables: vec![observable],
                },
            )
        })
        .collect()
}

/// Four temperature curves: ferromagnetic isotropic, and antiferromagnetic
/// strong-anisotropy, weak-anisotropy and isotropic lattices.
fn temperature_curves(name: &str, side: usize) -> Vec<SweepJob> {
    let curves = [
        ("ferro", -6.0, 1.0, 1.0),
        ("strong_aniso", 6.0, 1.5, 0.5),
        ("weak_aniso", 6.0, 1.0, 0.9),
        ("isotropic", 6.0, 1.0, 1.0),
    ];
    curves
        .iter()
        .map(|&(label, j, omega, eta)| {
            job(
                format!("{name}_{label}"),
                SweepSpec {
                    side,
                    axes: vec![Axis::linear(Param::T, 0.0, FIG8_T_MAX, FIG8_POINTS)],
                    fixed: fixed(&[(Param::J, j), (Param::Omega, omega), (Param::Eta, eta)]),
                    observables: vec![Observable::Mqc(1)],
                },
            )
        })
        .collect()
}

fn spectra() -> Vec<SweepJob> {
    let mut jobs = Vec::new();
    for side in [2, 4] {
        let n = side * (side + 1) / 2;
        let levels = 10.min(1 << n);
        for (label, omega, eta) in [("iso", 1.0, 1.0), ("aniso", 1.5, 0.5)] {
            jobs.push(job(
                format!("fig6_N{n}_{label}"),
                SweepSpec {
                    side,
                    axes: vec![Axis::linear(Param::J, -6.0, 6.0, RESOLUTION)],
                    fixed: fixed(&[(Param::Omega, omega), (Param::Eta, eta)]),
                    observables: vec![Observable::Energies(levels), Observable::Gap],
                },
            ));
        }
    }
    jobs
}

/// Looks up a preset by name.
pub fn preset(name: &str) -> Result<Preset> {
    let jobs = match name {
        "fig2a" => vec![job(name, ground_state_heatmap(2))],
        "fig2b" => vec![job(name, ground_state_heatmap(3))],
        "fig2c" => vec![job(name, ground_state_heatmap(4))],
        "fig4" => (2..=5)
            .map(|side| {
                let n = side * (side + 1) / 2;
                job(
                    format!("fig4_N{n}"),
                    SweepSpec {
                        side,
                        axes: vec![
                            Axis::linear(Param::J, -6.0, 6.0, RESOLUTION),
                            Axis::values(Param::Eta, vec![0.2, 1.0, 2.5]),
                        ],
                        fixed: fixed(&[(Param::Omega, 1.0)]),
                        observables: vec![Observable::Mqc(2)],
                    },
                )
            })
            .collect(),
        "fig5a" => anisotropy_heatmaps(name, 2, Observable::Mqc(1)),
        "fig5b" => anisotropy_heatmaps(name, 3, Observable::Mqc(1)),
        "fig5c" => anisotropy_heatmaps(name, 4, Observable::Mqc(1)),
        "fig6" => spectra(),
        "fig7" => anisotropy_heatmaps(name, 4, Observable::PairwiseSum(5)),
        "fig8a" => temperature_curves(name, 2),
        "fig8b" => temperature_curves(name, 3),
        "fig8c" => temperature_curves(name, 4),
        "fig8d" => temperature_curves(name, 5),
        _ => {
            return Err(Error::invalid(format!(
                "unknown preset '{name}'; expected one of {}",
                PRESET_NAMES.join(", ")
            )))
        }
    };
    Ok(Preset { name: name.to_string(), jobs })
}
