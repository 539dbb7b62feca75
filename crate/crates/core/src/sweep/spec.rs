use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::Lattice;

/// A run parameter that can be fixed or swept.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Param {
    J,
    #[serde(rename = "omega")]
    Omega,
    #[serde(rename = "eta")]
    Eta,
    #[serde(rename = "h")]
    H,
    T,
}

impl Param {
    pub fn name(self) -> &'static str {
        match self {
            Param::J => "J",
            Param::Omega => "omega",
            Param::Eta => "eta",
            Param::H => "h",
            Param::T => "T",
        }
    }

    fn sweepable(self) -> bool {
        self != Param::H
    }
}

impl fmt::Display for Param {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum AxisPoints {
    Linear { min: f64, max: f64, n_points: usize },
    Values { values: Vec<f64> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Axis {
    pub param: Param,
    #[serde(flatten)]
    pub points: AxisPoints,
}

impl Axis {
    pub fn linear(param: Param, min: f64, max: f64, n_points: usize) -> Self {
        Axis { param, points: AxisPoints::Linear { min, max, n_points } }
    }

    pub fn values(param: Param, values: Vec<f64>) -> Self {
        Axis { param, points: AxisPoints::Values { values } }
    }

    pub fn len(&self) -> usize {
        match &self.points {
            AxisPoints::Linear { n_points, .. } => *n_points,
            AxisPoints::Values { values } => values.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Grid coordinates; linear endpoints are hit exactly.
    pub fn grid(&self) -> Vec<f64> {
        match &self.points {
            AxisPoints::Linear { min, max, n_points } => {
                let last = (*n_points).max(2) - 1;
                (0..*n_points)
                    .map(|i| if i == last { *max } else { min + (max - min) * i as f64 / last as f64 })
                    .collect()
            }
            AxisPoints::Values { values } => values.clone(),
        }
    }
}

/// A quantity recorded at every grid point. Site indices are 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum Observable {
    /// Two-site negativity `N_ij`.
    Pair(usize, usize),
    /// `N_{i|rest}`.
    OneVsRest(usize),
    /// Monogamy residual `T_N(i)`.
    Mqc(usize),
    /// `Σ_j N_ij`.
    PairwiseSum(usize),
    /// The lowest `k` energies.
    Energies(usize),
    Gap,
}

impl Observable {
    pub fn needs_state(self) -> bool {
        !matches!(self, Observable::Energies(_) | Observable::Gap)
    }

    /// Number of eigenvalues this observable reads.
    pub fn levels(self) -> usize {
        match self {
            Observable::Energies(k) => k,
            Observable::Gap => 2,
            _ => 0,
        }
    }

    /// CSV header cells, one per value.
    pub fn columns(self) -> Vec<String> {
        match self {
            Observable::Energies(k) => (0..k).map(|i| format!("E{i}")).collect(),
            other => vec![other.to_string()],
        }
    }

    fn sites(self) -> Vec<usize> {
        match self {
            Observable::Pair(i, j) => vec![i, j],
            Observable::OneVsRest(i) | Observable::Mqc(i) | Observable::PairwiseSum(i) => vec![i],
            _ => vec![],
        }
    }
}

impl fmt::Display for Observable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Observable::Pair(i, j) => write!(f, "N_pair({i},{j})"),
            Observable::OneVsRest(i) => write!(f, "one_vs_rest({i})"),
            Observable::Mqc(i) => write!(f, "T_N({i})"),
            Observable::PairwiseSum(i) => write!(f, "pairwise_sum({i})"),
            Observable::Energies(k) => write!(f, "energies({k})"),
            Observable::Gap => f.write_str("gap"),
        }
    }
}

impl FromStr for Observable {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "gap" {
            return Ok(Observable::Gap);
        }
        let bad = || Error::invalid(format!("unknown observable '{s}'"));
        let (name, rest) = s.split_once('(').ok_or_else(bad)?;
        let args: Vec<usize> = rest
            .strip_suffix(')')
            .ok_or_else(bad)?
            .split(',')
            .map(|a| a.trim().parse::<usize>().map_err(|_| bad()))
            .collect::<Result<_>>()?;
        match (name, args.as_slice()) {
            ("N_pair", &[i, j]) => Ok(Observable::Pair(i, j)),
            ("one_vs_rest", &[i]) => Ok(Observable::OneVsRest(i)),
            ("T_N", &[i]) => Ok(Observable::Mqc(i)),
            ("pairwise_sum", &[i]) => Ok(Observable::PairwiseSum(i)),
            ("energies", &[k]) => Ok(Observable::Energies(k)),
            _ => Err(bad()),
        }
    }
}

impl TryFrom<String> for Observable {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<Observable> for String {
    fn from(o: Observable) -> String {
        o.to_string()
    }
}

/// A 1- or 2-axis parameter grid on one lattice.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    #[serde(rename = "L")]
    pub side: usize,
    pub axes: Vec<Axis>,
    #[serde(default)]
    pub fixed: BTreeMap<Param, f64>,
    pub observables: Vec<Observable>,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        let lattice = Lattice::new(self.side)?;
        if self.axes.is_empty() || self.axes.len() > 2 {
            return Err(Error::invalid(format!("expected 1 or 2 axes, got {}", self.axes.len())));
        }
        for (k, axis) in self.axes.iter().enumerate() {
            if !axis.param.sweepable() {
                return Err(Error::invalid(format!("{} cannot be swept", axis.param)));
            }
            if axis.len() < 2 {
                return Err(Error::invalid(format!("axis {} needs at least 2 points", axis.param)));
            }
            if self.fixed.contains_key(&axis.param) {
                return Err(Error::invalid(format!("{} is both swept and fixed", axis.param)));
            }
            if self.axes[..k].iter().any(|a| a.param == axis.param) {
                return Err(Error::invalid(format!("axis {} repeated", axis.param)));
            }
            if axis.grid().iter().any(|x| !x.is_finite()) {
                return Err(Error::invalid(format!("axis {} has non-finite points", axis.param)));
            }
        }
        for p in [Param::J, Param::Omega, Param::Eta] {
            if !self.fixed.contains_key(&p) && !self.axes.iter().any(|a| a.param == p) {
                return Err(Error::invalid(format!("parameter {p} is neither fixed nor swept")));
            }
        }
        if self.observables.is_empty() {
            return Err(Error::invalid("no observables requested"));
        }
        let dim = 1usize << lattice.n_sites();
        for obs in &self.observables {
            for s in obs.sites() {
                lattice.check_site(s)?;
            }
            if let Observable::Pair(i, j) = obs {
                if i == j {
                    return Err(Error::invalid(format!("{obs} needs two distinct sites")));
                }
            }
            if let Observable::Energies(k) = obs {
                if *k == 0 || *k > dim {
                    return Err(Error::invalid(format!("{obs}: k must be in 1..={dim}")));
                }
            }
        }
        Ok(())
    }

    /// Value of a parameter at a grid point, with `h = 1` and `T = 0` as defaults.
    pub(crate) fn fixed_or_default(&self, p: Param) -> Option<f64> {
        self.fixed.get(&p).copied().or(match p {
            Param::H => Some(1.0),
            Param::T => Some(0.0),
            _ => None,
        })
    }

    /// Axis parameters in column order (lexicographic by name).
    pub fn axis_columns(&self) -> Vec<Param> {
        let mut params: Vec<Param> = self.axes.iter().map(|a| a.param).collect();
        params.sort_by_key(|p| p.name());
        params
    }

    /// Full CSV header.
    pub fn header(&self) -> Vec<String> {
        let mut cols: Vec<String> = self.axis_columns().iter().map(|p| p.name().to_string()).collect();
        cols.extend(self.observables.iter().flat_map(|o| o.columns()));
        cols.extend(super::DIAGNOSTIC_COLUMNS.iter().map(|s| s.to_string()));
        cols
    }

    /// Grid points in row-major order over the axes as listed.
    pub fn points(&self) -> Vec<BTreeMap<Param, f64>> {
        let grids: Vec<Vec<f64>> = self.axes.iter().map(Axis::grid).collect();
        let mut out = vec![BTreeMap::new()];
        for (axis, grid) in self.axes.iter().zip(&grids) {
            out = out
                .into_iter()
                .flat_map(|p| {
                    grid.iter().map(move |&x| {
                        let mut q = p.clone();
                        q.insert(axis.param, x);
                        q
                    })
                })
                .collect();
        }
        out
    }

    pub fn needs_thermal(&self) -> bool {
        let t_positive = match self.axes.iter().find(|a| a.param == Param::T) {
            Some(axis) => axis.grid().iter().any(|&t| t > 0.0),
            None => self.fixed_or_default(Param::T).is_some_and(|t| t > 0.0),
        };
        t_positive && self.observables.iter().any(|o| o.needs_state())
    }
}
