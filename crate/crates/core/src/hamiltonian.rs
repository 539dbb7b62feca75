//! Matrix-free transverse-field Ising operator on the `2^N` computational basis.
//!
//! Conventions: spin operators are `S = σ/2`; site `s` (1-based) is bit
//! `N - s` of the basis index, so site 1 is the most significant bit. A
//! zero bit is spin up, `S^z|0> = +1/2 |0>`.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{BondClass, Lattice};

/// Default largest system that [`HamiltonianOp::materialize`] will build densely.
pub const MATERIALIZE_CAP: usize = 14;

/// Coupling scale `J`, anisotropies `omega` and `eta`, transverse field `h`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CouplingParams {
    #[serde(rename = "J")]
    pub j: f64,
    pub omega: f64,
    pub eta: f64,
    #[serde(default = "default_field")]
    pub h: f64,
}

fn default_field() -> f64 {
    1.0
}

impl CouplingParams {
    pub fn new(j: f64, omega: f64, eta: f64) -> Self {
        CouplingParams { j, omega, eta, h: 1.0 }
    }

    pub fn with_field(mut self, h: f64) -> Self {
        self.h = h;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let all = [self.j, self.omega, self.eta, self.h];
        if all.iter().any(|x| !x.is_finite()) {
            return Err(Error::invalid(format!("non-finite coupling parameters {self:?}")));
        }
        if self.omega < 0.0 || self.eta < 0.0 {
            return Err(Error::invalid(format!(
                "omega and eta must be nonnegative, got omega={} eta={}",
                self.omega, self.eta
            )));
        }
        Ok(())
    }

    /// Bond strength `J_ij` for a bond of the given class.
    pub fn strength(&self, class: BondClass) -> f64 {
        match class {
            BondClass::Omega => self.omega * self.j,
            BondClass::Eta => self.eta * self.j,
            BondClass::Unit => self.j,
        }
    }
}

/// `+1` for even popcount, `-1` for odd: eigenvalue of `P = ⊗σ^z` on a basis state.
pub fn parity_sign(basis: usize) -> f64 {
    if basis.count_ones().is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

/// Eigenspaces of the global spin-flip parity, which commutes with `H`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn of(basis: usize) -> Self {
        if basis.count_ones().is_multiple_of(2) {
            Parity::Even
        } else {
            Parity::Odd
        }
    }

    /// Zeroes every amplitude outside this sector.
    pub fn project(self, v: &mut [f64]) {
        for (b, x) in v.iter_mut().enumerate() {
            if Parity::of(b) != self {
                *x = 0.0;
            }
        }
    }

    pub fn basis(self, n_sites: usize) -> Vec<usize> {
        (0..1usize << n_sites).filter(|&b| Parity::of(b) == self).collect()
    }
}

/// A real symmetric operator that can be applied to a vector.
pub trait SymmetricOperator: Sync {
    fn dim(&self) -> usize;

    /// `out = A x`; both slices have length [`dim`](Self::dim).
    fn apply_into(&self, x: &[f64], out: &mut [f64]);
}

impl SymmetricOperator for DMatrix<f64> {
    fn dim(&self) -> usize {
        self.nrows()
    }

    fn apply_into(&self, x: &[f64], out: &mut [f64]) {
        let y = self * DVector::from_column_slice(x);
        out.copy_from_slice(y.as_slice());
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct FlipTerm {
    mask: usize,
    amplitude: f64,
}

/// `H = Σ_<ij> J_ij S^x_i S^x_j + h Σ_i S^z_i` applied without storing a matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct HamiltonianOp {
    n_sites: usize,
    field: f64,
    flips: Vec<FlipTerm>,
}

impl HamiltonianOp {
    pub fn new(lattice: &Lattice, params: CouplingParams) -> Result<Self> {
        params.validate()?;
        let bonds: Vec<_> = lattice
            .bonds()
            .iter()
            .map(|b| (b.i, b.j, params.strength(b.class)))
            .collect();
        Self::from_bond_strengths(lattice.n_sites(), &bonds, params.h)
    }

    /// Arbitrary bond list `(i, j, J_ij)` with 1-based sites.
    pub fn from_bond_strengths(n_sites: usize, bonds: &[(usize, usize, f64)], h: f64) -> Result<Self> {
        if n_sites == 0 || n_sites >= usize::BITS as usize - 1 {
            return Err(Error::invalid(format!("unsupported site count {n_sites}")));
        }
        let mut flips = Vec::with_capacity(bonds.len());
        for &(i, j, strength) in bonds {
            if i == 0 || j == 0 || i > n_sites || j > n_sites || i == j {
                return Err(Error::invalid(format!("bad bond ({i}, {j}) for {n_sites} sites")));
            }
            flips.push(FlipTerm {
                mask: site_mask(n_sites, i) | site_mask(n_sites, j),
                amplitude: strength / 4.0,
            });
        }
        Ok(HamiltonianOp { n_sites, field: h, flips })
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn dim(&self) -> usize {
        1 << self.n_sites
    }

    /// `<b|H|b> = h (n_up - n_down) / 2`.
    #[inline]
    pub fn diagonal(&self, basis: usize) -> f64 {
        let down = basis.count_ones() as f64;
        self.field * (self.n_sites as f64 - 2.0 * down) / 2.0
    }

    pub fn apply(&self, v: &[f64]) -> Result<Vec<f64>> {
        if v.len() != self.dim() {
            return Err(Error::invalid(format!(
                "vector length {} does not match dimension {}",
                v.len(),
                self.dim()
            )));
        }
        let mut out = vec![0.0; v.len()];
        self.apply_into(v, &mut out);
        Ok(out)
    }

    /// Dense matrix of the operator, refusing systems larger than [`MATERIALIZE_CAP`].
    pub fn materialize(&self) -> Result<DMatrix<f64>> {
        self.materialize_with_cap(MATERIALIZE_CAP)
    }

    pub fn materialize_with_cap(&self, cap: usize) -> Result<DMatrix<f64>> {
        if self.n_sites > cap {
            return Err(Error::ResourceLimit(format!(
                "dense matrix for {} sites exceeds the cap of {cap}; use the iterative solver",
                self.n_sites
            )));
        }
        let dim = self.dim();
        let mut m = DMatrix::zeros(dim, dim);
        for b in 0..dim {
            m[(b, b)] = self.diagonal(b);
            for t in &self.flips {
                m[(b ^ t.mask, b)] += t.amplitude;
            }
        }
        Ok(m)
    }

    /// Dense block of `H` restricted to one parity sector, with the sector's basis states.
    pub fn sector_block(&self, parity: Parity) -> (Vec<usize>, DMatrix<f64>) {
        let basis = parity.basis(self.n_sites);
        let mut index = vec![usize::MAX; self.dim()];
        for (k, &b) in basis.iter().enumerate() {
            index[b] = k;
        }
        let d = basis.len();
        let mut m = DMatrix::zeros(d, d);
        for (k, &b) in basis.iter().enumerate() {
            m[(k, k)] = self.diagonal(b);
            for t in &self.flips {
                m[(index[b ^ t.mask], k)] += t.amplitude;
            }
        }
        (basis, m)
    }
}

impl SymmetricOperator for HamiltonianOp {
    fn dim(&self) -> usize {
        HamiltonianOp::dim(self)
    }

    fn apply_into(&self, x: &[f64], out: &mut [f64]) {
        for (b, y) in out.iter_mut().enumerate() {
            let mut acc = self.diagonal(b) * x[b];
            for t in &self.flips {
                acc += t.amplitude * x[b ^ t.mask];
            }
            *y = acc;
        }
    }
}

/// Bit mask of a 1-based site in an `n_sites` register.
#[inline]
pub fn site_mask(n_sites: usize, site: usize) -> usize {
    1 << (n_sites - site)
}
