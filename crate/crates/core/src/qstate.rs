//! Pure and low-rank mixed states, reduced density matrices and negativity.
//!
//! All amplitudes are real: the Ising operator is real symmetric, so its
//! eigenvectors and every density matrix built from them are too.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};

/// Default largest system for which a mixed state is expanded into a dense `2^N × 2^N` matrix.
pub const MIXED_DENSE_CAP: usize = 12;

/// Negativities in `[-NEGATIVITY_CLAMP, 0)` are treated as rounding noise and reported as zero.
pub const NEGATIVITY_CLAMP: f64 = 1e-10;

const STATE_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub enum StateForm {
    Pure(DVector<f64>),
    /// `ρ = Σ_i w_i |e_i><e_i|`, one column of `vectors` per weight.
    Mixed { weights: Vec<f64>, vectors: DMatrix<f64> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuantumState {
    n_sites: usize,
    form: StateForm,
}

impl QuantumState {
    pub fn pure(n_sites: usize, psi: DVector<f64>) -> Result<Self> {
        check_dim(n_sites, psi.len())?;
        let norm = psi.norm();
        if (norm - 1.0).abs() > STATE_TOL {
            return Err(Error::invalid(format!("state norm {norm} is not 1")));
        }
        Ok(Self::pure_unchecked(n_sites, psi))
    }

    pub(crate) fn pure_unchecked(n_sites: usize, psi: DVector<f64>) -> Self {
        QuantumState { n_sites, form: StateForm::Pure(psi) }
    }

    pub fn mixed(n_sites: usize, weights: Vec<f64>, vectors: DMatrix<f64>) -> Result<Self> {
        check_dim(n_sites, vectors.nrows())?;
        if weights.len() != vectors.ncols() || weights.is_empty() {
            return Err(Error::invalid(format!(
                "{} weights for {} vectors",
                weights.len(),
                vectors.ncols()
            )));
        }
        if weights.iter().any(|&w| w.is_nan() || w <= 0.0) {
            return Err(Error::invalid("mixture weights must be positive"));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > STATE_TOL {
            return Err(Error::invalid(format!("mixture weights sum to {total}")));
        }
        let gram = vectors.transpose() * &vectors;
        let r = weights.len();
        if (gram - DMatrix::<f64>::identity(r, r)).abs().max() > STATE_TOL {
            return Err(Error::invalid("mixture vectors are not orthonormal"));
        }
        Ok(Self::mixed_unchecked(n_sites, weights, vectors))
    }

    pub(crate) fn mixed_unchecked(n_sites: usize, weights: Vec<f64>, vectors: DMatrix<f64>) -> Self {
        QuantumState { n_sites, form: StateForm::Mixed { weights, vectors } }
    }

    /// `(|0..0> + |1..1>)/√2`.
    pub fn ghz(n_sites: usize) -> Self {
        let dim = 1 << n_sites;
        let mut psi = DVector::zeros(dim);
        psi[0] = std::f64::consts::FRAC_1_SQRT_2;
        psi[dim - 1] = std::f64::consts::FRAC_1_SQRT_2;
        Self::pure_unchecked(n_sites, psi)
    }

    /// `I / 2^N`.
    pub fn maximally_mixed(n_sites: usize) -> Self {
        let dim = 1usize << n_sites;
        Self::mixed_unchecked(n_sites, vec![1.0 / dim as f64; dim], DMatrix::identity(dim, dim))
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn form(&self) -> &StateForm {
        &self.form
    }

    pub fn is_pure(&self) -> bool {
        matches!(self.form, StateForm::Pure(_))
    }

    /// Number of terms in the eigen-decomposed form (1 for a pure state).
    pub fn rank(&self) -> usize {
        match &self.form {
            StateForm::Pure(_) => 1,
            StateForm::Mixed { weights, .. } => weights.len(),
        }
    }

    fn terms(&self) -> Vec<(f64, &[f64])> {
        match &self.form {
            StateForm::Pure(psi) => vec![(1.0, psi.as_slice())],
            StateForm::Mixed { weights, vectors } => {
                let dim = vectors.nrows();
                weights
                    .iter()
                    .enumerate()
                    .map(|(k, &w)| (w, &vectors.as_slice()[k * dim..(k + 1) * dim]))
                    .collect()
            }
        }
    }

    /// Full `2^N × 2^N` density matrix.
    pub fn to_dense(&self) -> DMatrix<f64> {
        let dim = 1usize << self.n_sites;
        let mut rho = DMatrix::zeros(dim, dim);
        for (w, v) in self.terms() {
            let v = DVector::from_column_slice(v);
            rho.ger(w, &v, &v, 1.0);
        }
        rho
    }

    fn check_site(&self, site: usize) -> Result<()> {
        if site == 0 || site > self.n_sites {
            return Err(Error::invalid(format!("site {site} out of range 1..={}", self.n_sites)));
        }
        Ok(())
    }
}

fn check_dim(n_sites: usize, len: usize) -> Result<()> {
    if n_sites == 0 || n_sites >= 31 || len != 1usize << n_sites {
        return Err(Error::invalid(format!("vector length {len} does not match {n_sites} sites")));
    }
    Ok(())
}

/// Reduced state on an ordered list of sites; the first listed site is the
/// most significant bit of the matrix index.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    subset: Vec<usize>,
    matrix: DMatrix<f64>,
}

impl DensityMatrix {
    /// Validates symmetry, unit trace and positivity.
    pub fn new(subset: Vec<usize>, matrix: DMatrix<f64>) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() || matrix.nrows() != 1usize << subset.len() {
            return Err(Error::invalid("matrix dimension does not match the subset"));
        }
        if (&matrix - matrix.transpose()).abs().max() > 1e-12 {
            return Err(Error::invalid("density matrix is not symmetric"));
        }
        if (matrix.trace() - 1.0).abs() > STATE_TOL {
            return Err(Error::invalid(format!("density matrix trace {}", matrix.trace())));
        }
        let min = matrix.symmetric_eigenvalues().min();
        if min < -STATE_TOL {
            return Err(Error::invalid(format!("density matrix has eigenvalue {min}")));
        }
        Ok(DensityMatrix { subset, matrix })
    }

    pub fn subset(&self) -> &[usize] {
        &self.subset
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    /// Partial transpose over the listed sites, which must belong to the subset.
    pub fn partial_transpose(&self, part_a: &[usize]) -> Result<DMatrix<f64>> {
        let m = self.subset.len();
        let mut mask = 0usize;
        for &site in part_a {
            let pos = self
                .subset
                .iter()
                .position(|&s| s == site)
                .ok_or_else(|| Error::invalid(format!("site {site} is not in {:?}", self.subset)))?;
            let bit = 1 << (m - 1 - pos);
            if mask & bit != 0 {
                return Err(Error::invalid(format!("site {site} listed twice")));
            }
            mask |= bit;
        }
        Ok(partial_transpose_mask(&self.matrix, mask))
    }
}

/// Swaps the row and column bits selected by `mask`.
pub(crate) fn partial_transpose_mask(rho: &DMatrix<f64>, mask: usize) -> DMatrix<f64> {
    let keep = !mask;
    DMatrix::from_fn(rho.nrows(), rho.ncols(), |r, c| {
        rho[((r & keep) | (c & mask), (c & keep) | (r & mask))]
    })
}

/// `Σ|μ_k|` over eigenvalues of a symmetric matrix, or singular values otherwise.
pub fn trace_norm(m: &DMatrix<f64>) -> f64 {
    let scale = m.abs().max().max(1e-300);
    if (m - m.transpose()).abs().max() <= 1e-12 * scale {
        m.clone().symmetric_eigenvalues().iter().map(|x| x.abs()).sum()
    } else {
        log::debug!("partial transpose not symmetric; using singular values");
        m.clone().singular_values().iter().sum()
    }
}

fn clamp_negativity(raw: f64) -> f64 {
    if (-NEGATIVITY_CLAMP..0.0).contains(&raw) {
        0.0
    } else {
        if raw < 0.0 {
            log::warn!("negativity {raw:.3e} below rounding threshold");
        }
        raw
    }
}

/// Splits basis indices into (kept index, traced index) for an ordered `keep` list.
fn split_indices(n_sites: usize, keep: &[usize]) -> (Vec<usize>, Vec<usize>) {
    let rest: Vec<usize> = (1..=n_sites).filter(|s| !keep.contains(s)).collect();
    let gather = |b: usize, sites: &[usize]| {
        sites.iter().fold(0usize, |acc, &s| (acc << 1) | ((b >> (n_sites - s)) & 1))
    };
    (0..1usize << n_sites)
        .map(|b| (gather(b, keep), gather(b, &rest)))
        .unzip()
}

/// Partial trace over every site not in `keep`.
pub fn reduce(state: &QuantumState, keep: &[usize]) -> Result<DensityMatrix> {
    if keep.is_empty() {
        return Err(Error::invalid("cannot reduce to an empty subset"));
    }
    for (k, &s) in keep.iter().enumerate() {
        state.check_site(s)?;
        if keep[..k].contains(&s) {
            return Err(Error::invalid(format!("site {s} listed twice")));
        }
    }
    let n = state.n_sites;
    let (kidx, ridx) = split_indices(n, keep);
    let dk = 1usize << keep.len();
    let dr = 1usize << (n - keep.len());
    let mut rho = DMatrix::zeros(dk, dk);
    let mut x = DMatrix::zeros(dk, dr);
    for (w, v) in state.terms() {
        for (b, &amp) in v.iter().enumerate() {
            x[(kidx[b], ridx[b])] = amp;
        }
        rho.gemm(w, &x, &x.transpose(), 1.0);
    }
    Ok(DensityMatrix { subset: keep.to_vec(), matrix: rho })
}

/// `‖ρ^{T_A}‖₁ − 1` for the bipartition `part_a | rest of rho.subset`.
pub fn negativity(rho: &DensityMatrix, part_a: &[usize]) -> Result<f64> {
    if part_a.is_empty() || part_a.len() >= rho.subset.len() {
        return Err(Error::invalid(format!(
            "{part_a:?} is not a proper non-empty part of {:?}",
            rho.subset
        )));
    }
    let pt = rho.partial_transpose(part_a)?;
    Ok(clamp_negativity(trace_norm(&pt) - 1.0))
}

/// One-site-versus-rest negativity of a pure state from its single-site spectrum.
pub fn pure_one_vs_rest_negativity(state: &QuantumState, site: usize) -> Result<f64> {
    if !state.is_pure() {
        return Err(Error::invalid("pure-state shortcut called on a mixed state"));
    }
    let r = reduce(state, &[site])?.matrix;
    let (a, d, b) = (r[(0, 0)], r[(1, 1)], r[(0, 1)]);
    let mean = 0.5 * (a + d);
    let half_split = (0.25 * (a - d).powi(2) + b * b).sqrt();
    let lam = (mean - half_split).max(0.0);
    let other = (mean + half_split).max(0.0);
    Ok(2.0 * (lam * other).sqrt())
}

/// One-site-versus-rest negativity of a mixed state by explicit partial transpose.
///
/// Low-rank states are handled in the span of the partial transpose's
/// range, without forming the `2^N × 2^N` matrix; otherwise the dense matrix
/// is assembled, subject to [`MIXED_DENSE_CAP`].
pub fn mixed_one_vs_rest_negativity(state: &QuantumState, site: usize) -> Result<f64> {
    mixed_one_vs_rest_negativity_with_cap(state, site, MIXED_DENSE_CAP)
}

pub fn mixed_one_vs_rest_negativity_with_cap(state: &QuantumState, site: usize, cap: usize) -> Result<f64> {
    state.check_site(site)?;
    let dim = 1usize << state.n_sites;
    if 8 * state.rank() <= dim {
        return Ok(clamp_negativity(low_rank_pt_trace_norm(state, site) - 1.0));
    }
    dense_one_vs_rest_negativity(state, site, cap)
}

pub(crate) fn dense_one_vs_rest_negativity(state: &QuantumState, site: usize, cap: usize) -> Result<f64> {
    state.check_site(site)?;
    if state.n_sites > cap {
        return Err(Error::ResourceLimit(format!(
            "dense partial transpose of {} sites exceeds the cap of {cap}",
            state.n_sites
        )));
    }
    let rho = state.to_dense();
    let pt = partial_transpose_mask(&rho, 1 << (state.n_sites - site));
    Ok(clamp_negativity(trace_norm(&pt) - 1.0))
}

/// Trace norm of `ρ^{T_site}` for `ρ = Σ w_i |e_i><e_i|` using its `4r`-dimensional range.
///
/// Writing `e_i = |0>⊗f_{i0} + |1>⊗f_{i1}`, the partial transpose is
/// `U C Uᵀ` with `U = I₂ ⊗ F`, `F = [f_{i a}]`, and `C` a sparse weight
/// pattern. Its nonzero spectrum equals that of `G^{1/2} C G^{1/2}` with
/// `G = I₂ ⊗ FᵀF`.
fn low_rank_pt_trace_norm(state: &QuantumState, site: usize) -> f64 {
    let n = state.n_sites;
    let bit = 1usize << (n - site);
    let low = bit - 1;
    let half = 1usize << (n - 1);
    let terms = state.terms();
    let p = 2 * terms.len();

    let mut f = DMatrix::zeros(half, p);
    for (i, (_, v)) in terms.iter().enumerate() {
        for (b, &amp) in v.iter().enumerate() {
            let a = usize::from(b & bit != 0);
            let compact = ((b >> 1) & !low) | (b & low);
            f[(compact, 2 * i + a)] = amp;
        }
    }
    let gram = f.transpose() * &f;
    let eig = SymmetricEigen::new(gram);
    let sqrt_vals = eig.eigenvalues.map(|x| x.max(0.0).sqrt());
    let root = &eig.eigenvectors * DMatrix::from_diagonal(&sqrt_vals) * eig.eigenvectors.transpose();

    // coordinates (a', column of F) with a' the transposed site value
    let idx = |a: usize, col: usize| a * p + col;
    let mut c = DMatrix::zeros(2 * p, 2 * p);
    for (i, (w, _)) in terms.iter().enumerate() {
        for a in 0..2 {
            for a2 in 0..2 {
                c[(idx(a2, 2 * i + a), idx(a, 2 * i + a2))] += w;
            }
        }
    }
    let mut g = DMatrix::zeros(2 * p, 2 * p);
    g.view_mut((0, 0), (p, p)).copy_from(&root);
    g.view_mut((p, p), (p, p)).copy_from(&root);
    let sym = &g * c * &g;
    let sym = 0.5 * (&sym + sym.transpose());
    sym.symmetric_eigenvalues().iter().map(|x| x.abs()).sum()
}

/// Dispatches to the pure shortcut or the mixed partial-transpose path.
pub fn one_vs_rest_negativity(state: &QuantumState, site: usize) -> Result<f64> {
    if state.is_pure() {
        pure_one_vs_rest_negativity(state, site)
    } else {
        mixed_one_vs_rest_negativity(state, site)
    }
}

/// Two-site negativity `N_{ij}` from the reduced pair state.
pub fn pair_negativity(state: &QuantumState, i: usize, j: usize) -> Result<f64> {
    let rho = reduce(state, &[i, j])?;
    negativity(&rho, &[i])
}
