//! Lanczos iteration with full reorthogonalization and explicit locking.
//!
//! Each eigenpair is found by a fresh Krylov run on the orthogonal
//! complement of the pairs already locked, so every member of a degenerate
//! level is eventually returned.

use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::hamiltonian::SymmetricOperator;

#[derive(Debug, Clone, Copy)]
pub struct LanczosOptions {
    /// Relative residual at which a Ritz pair is accepted.
    pub tolerance: f64,
    /// Budget of operator applications per Krylov run, restarts included.
    pub max_iterations: usize,
    /// Krylov basis size before an explicit restart.
    pub max_basis: usize,
    pub seed: u64,
}

impl Default for LanczosOptions {
    fn default() -> Self {
        LanczosOptions { tolerance: 1e-10, max_iterations: 5000, max_basis: 250, seed: DEFAULT_SEED }
    }
}

/// Seed for start vectors ("trim" in ASCII).
pub const DEFAULT_SEED: u64 = 0x7472_696d;

#[derive(Debug, Clone)]
pub struct EigenPair {
    pub value: f64,
    pub vector: Vec<f64>,
    pub residual: f64,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

fn normalize(v: &mut [f64]) -> f64 {
    let n = dot(v, v).sqrt();
    if n > 0.0 {
        v.iter_mut().for_each(|x| *x /= n);
    }
    n
}

/// Two passes of classical Gram-Schmidt against every vector in `sets`.
fn orthogonalize(v: &mut [f64], sets: &[&[Vec<f64>]]) {
    for _ in 0..2 {
        for set in sets {
            for q in set.iter() {
                let c = dot(q, v);
                axpy(-c, q, v);
            }
        }
    }
}

fn residual_norm<O: SymmetricOperator + ?Sized>(op: &O, v: &[f64], value: f64, scratch: &mut [f64]) -> f64 {
    op.apply_into(v, scratch);
    scratch
        .iter()
        .zip(v)
        .map(|(hv, x)| (hv - value * x).powi(2))
        .sum::<f64>()
        .sqrt()
}

/// Lowest `count` eigenpairs of `op` inside the invariant subspace selected by `project`.
///
/// `subspace_dim` is the dimension of that subspace; `count` may not exceed it.
///
/// Each Krylov run starts from a fresh random vector orthogonal to the locked
/// pairs. The lowest Ritz value of a run bounds every unlocked eigenvalue from
/// below, so further converged Ritz pairs of the same run are locked too and
/// runs continue until the `count` lowest locked values all sit at or below
/// that bound. A degenerate copy that one run cannot see is then picked up by
/// a later run instead of being skipped.
pub fn lowest_pairs<O, P>(
    op: &O,
    count: usize,
    project: P,
    subspace_dim: usize,
    opts: &LanczosOptions,
) -> Result<Vec<EigenPair>>
where
    O: SymmetricOperator + ?Sized,
    P: Fn(&mut [f64]),
{
    let dim = op.dim();
    if count > subspace_dim {
        return Err(Error::invalid(format!(
            "requested {count} eigenpairs from a {subspace_dim}-dimensional space"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut locked: Vec<Vec<f64>> = Vec::with_capacity(count);
    let mut pairs: Vec<EigenPair> = Vec::with_capacity(count);
    let mut scratch = vec![0.0; dim];

    while count > 0 && locked.len() < subspace_dim {
        let remaining = subspace_dim - locked.len();
        let mut start = Vec::new();
        for _ in 0..8 {
            let mut v: Vec<f64> = (0..dim).map(|_| rng.random_range(-1.0..1.0)).collect();
            project(&mut v);
            orthogonalize(&mut v, &[&locked]);
            if normalize(&mut v) > 1e-8 {
                start = v;
                break;
            }
        }
        if start.is_empty() {
            return Err(Error::Convergence { iterations: 0, best_residual: f64::INFINITY });
        }

        let mut iterations = 0usize;
        let mut best_residual = f64::INFINITY;
        let batch: Vec<EigenPair> = 'restart: loop {
            let mut basis: Vec<Vec<f64>> = vec![start.clone()];
            let mut alphas: Vec<f64> = Vec::new();
            let mut betas: Vec<f64> = Vec::new();
            let mut w = vec![0.0; dim];
            loop {
                let j = basis.len() - 1;
                op.apply_into(&basis[j], &mut w);
                iterations += 1;
                let alpha = dot(&basis[j], &w);
                axpy(-alpha, &basis[j], &mut w);
                if j > 0 {
                    axpy(-betas[j - 1], &basis[j - 1], &mut w);
                }
                project(&mut w);
                orthogonalize(&mut w, &[&locked, &basis]);
                alphas.push(alpha);
                let beta = dot(&w, &w).sqrt();

                let m = alphas.len();
                let tri = DMatrix::from_fn(m, m, |r, c| {
                    if r == c {
                        alphas[r]
                    } else if r + 1 == c {
                        betas[r]
                    } else if c + 1 == r {
                        betas[c]
                    } else {
                        0.0
                    }
                });
                let eig = SymmetricEigen::new(tri);
                let mut order: Vec<usize> = (0..m).collect();
                order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
                let ritz_converged = |i: usize| {
                    let theta: f64 = eig.eigenvalues[i];
                    beta * eig.eigenvectors[(m - 1, i)].abs() <= opts.tolerance * theta.abs().max(1.0)
                };
                let ritz_vector = |i: usize| {
                    let mut v = vec![0.0; dim];
                    for (q, &c) in basis.iter().zip(eig.eigenvectors.column(i).iter()) {
                        axpy(c, q, &mut v);
                    }
                    project(&mut v);
                    orthogonalize(&mut v, &[&locked]);
                    normalize(&mut v);
                    v
                };
                let scale = eig.eigenvalues[order[0]].abs().max(1.0);
                let exhausted = beta <= 1e-12 * scale || m >= remaining;
                let full_basis = m >= opts.max_basis;

                if exhausted || ritz_converged(order[0]) || full_basis {
                    let mut batch = Vec::new();
                    for (rank, &i) in order.iter().enumerate() {
                        if rank > 0 && (pairs.len() + batch.len() >= count || !(exhausted || ritz_converged(i))) {
                            break;
                        }
                        let v = ritz_vector(i);
                        op.apply_into(&v, &mut scratch);
                        let value = dot(&v, &scratch);
                        let residual = residual_norm(op, &v, value, &mut scratch);
                        best_residual = best_residual.min(residual);
                        if residual > 1e-8 * value.abs().max(1.0) {
                            break;
                        }
                        batch.push(EigenPair { value, vector: v, residual });
                    }
                    if !batch.is_empty() {
                        break 'restart batch;
                    }
                    if iterations >= opts.max_iterations {
                        return Err(Error::Convergence { iterations, best_residual });
                    }
                    log::debug!("lanczos restart at {iterations} iterations, residual {best_residual:.3e}");
                    start = ritz_vector(order[0]);
                    continue 'restart;
                }
                if iterations >= opts.max_iterations {
                    return Err(Error::Convergence { iterations, best_residual });
                }
                betas.push(beta);
                w.iter_mut().for_each(|x| *x /= beta);
                basis.push(std::mem::replace(&mut w, vec![0.0; dim]));
            }
        };

        // every eigenvalue not locked before this run is >= floor
        let floor = batch[0].value;
        if pairs.len() >= count && floor >= pairs[count - 1].value {
            break;
        }
        for pair in batch {
            locked.push(pair.vector.clone());
            pairs.push(pair);
        }
        pairs.sort_by(|a, b| a.value.total_cmp(&b.value));
        if pairs.len() >= count && pairs[count - 1].value <= floor {
            break;
        }
    }
    pairs.truncate(count);
    Ok(pairs)
}
