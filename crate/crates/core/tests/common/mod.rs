//! Brute-force reference implementations used as test oracles.
//!
//! Matrices are row-major `Vec<f64>`; nothing here touches the library's
//! linear algebra. Site 1 is the leftmost Kronecker factor.
#![allow(dead_code)]

use std::time::Instant;

pub struct Mat {
    pub n: usize,
    pub a: Vec<f64>,
}

impl Mat {
    pub fn zeros(n: usize) -> Self {
        Mat { n, a: vec![0.0; n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.a[i * n + i] = 1.0;
        }
        m
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.a[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.a[i * self.n + j] = v;
    }

    pub fn kron(&self, other: &Mat) -> Mat {
        let n = self.n * other.n;
        let mut out = Mat::zeros(n);
        for i in 0..self.n {
            for j in 0..self.n {
                let s = self.get(i, j);
                if s == 0.0 {
                    continue;
                }
                for k in 0..other.n {
                    for l in 0..other.n {
                        out.set(i * other.n + k, j * other.n + l, s * other.get(k, l));
                    }
                }
            }
        }
        out
    }

    pub fn add_scaled(&mut self, other: &Mat, c: f64) {
        for (x, y) in self.a.iter_mut().zip(&other.a) {
            *x += c * y;
        }
    }

    pub fn max_abs_diff(&self, other: &Mat) -> f64 {
        self.a.iter().zip(&other.a).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
    }
}

fn pauli_half_x() -> Mat {
    Mat { n: 2, a: vec![0.0, 0.5, 0.5, 0.0] }
}

fn pauli_half_z() -> Mat {
    Mat { n: 2, a: vec![0.5, 0.0, 0.0, -0.5] }
}

/// `op` acting on the listed sites (1-based) of an `n`-site register.
fn embed(n: usize, factors: &[(usize, &Mat)]) -> Mat {
    let mut out = Mat::identity(1);
    for site in 1..=n {
        let f = factors.iter().find(|(s, _)| *s == site).map(|(_, m)| *m);
        out = match f {
            Some(m) => out.kron(m),
            None => out.kron(&Mat::identity(2)),
        };
    }
    out
}

/// H = Σ s_ij Sx_i Sx_j + h Σ Sz_i assembled from Kronecker products.
pub fn kron_hamiltonian(n: usize, bonds: &[(usize, usize, f64)], h: f64) -> Mat {
    let sx = pauli_half_x();
    let sz = pauli_half_z();
    let mut out = Mat::zeros(1 << n);
    for &(i, j, s) in bonds {
        out.add_scaled(&embed(n, &[(i, &sx), (j, &sx)]), s);
    }
    for i in 1..=n {
        out.add_scaled(&embed(n, &[(i, &sz)]), h);
    }
    out
}

/// The three-site triangle written out by hand: apex 1, base 2–3.
pub fn triangle_bonds(j: f64, omega: f64, eta: f64) -> Vec<(usize, usize, f64)> {
    vec![(1, 2, j * omega), (1, 3, j), (2, 3, j * eta)]
}

/// Cyclic Jacobi; returns ascending eigenvalues and eigenvectors as columns of a row-major matrix.
pub fn jacobi_eigen(m: &Mat) -> (Vec<f64>, Mat) {
    let n = m.n;
    let mut a = Mat { n, a: m.a.clone() };
    let mut v = Mat::identity(n);
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a.get(i, j).powi(2))
            .sum();
        if off < 1e-30 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a.get(p, q);
                if apq.abs() < 1e-300 {
                    continue;
                }
                let theta = (a.get(q, q) - a.get(p, p)) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a.get(k, p);
                    let akq = a.get(k, q);
                    a.set(k, p, c * akp - s * akq);
                    a.set(k, q, s * akp + c * akq);
                }
                for k in 0..n {
                    let apk = a.get(p, k);
                    let aqk = a.get(q, k);
                    a.set(p, k, c * apk - s * aqk);
                    a.set(q, k, s * apk + c * aqk);
                }
                for k in 0..n {
                    let vkp = v.get(k, p);
                    let vkq = v.get(k, q);
                    v.set(k, p, c * vkp - s * vkq);
                    v.set(k, q, s * vkp + c * vkq);
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| a.get(x, x).total_cmp(&a.get(y, y)));
    let vals = order.iter().map(|&k| a.get(k, k)).collect();
    let mut vecs = Mat::zeros(n);
    for (col, &k) in order.iter().enumerate() {
        for r in 0..n {
            vecs.set(r, col, v.get(r, k));
        }
    }
    (vals, vecs)
}

pub fn column(m: &Mat, k: usize) -> Vec<f64> {
    (0..m.n).map(|r| m.get(r, k)).collect()
}

pub fn projector(psi: &[f64]) -> Mat {
    let n = psi.len();
    let mut m = Mat::zeros(n);
    for i in 0..n {
        for j in 0..n {
            m.set(i, j, psi[i] * psi[j]);
        }
    }
    m
}

/// Boltzmann mixture over every eigenpair of `h`.
pub fn gibbs_dense(h: &Mat, t: f64) -> Mat {
    let (vals, vecs) = jacobi_eigen(h);
    let e0 = vals[0];
    let w: Vec<f64> = vals.iter().map(|e| (-(e - e0) / t).exp()).collect();
    let z: f64 = w.iter().sum();
    let mut rho = Mat::zeros(h.n);
    for (k, wk) in w.iter().enumerate() {
        rho.add_scaled(&projector(&column(&vecs, k)), wk / z);
    }
    rho
}

fn bit(b: usize, n: usize, site: usize) -> usize {
    (b >> (n - site)) & 1
}

/// Reduced density matrix on `keep` (first listed site most significant), by summing over matching rest indices.
pub fn partial_trace(rho: &Mat, n: usize, keep: &[usize]) -> Mat {
    let k = keep.len();
    let mut out = Mat::zeros(1 << k);
    let rest: Vec<usize> = (1..=n).filter(|s| !keep.contains(s)).collect();
    for a in 0..rho.n {
        for b in 0..rho.n {
            if rest.iter().any(|&s| bit(a, n, s) != bit(b, n, s)) {
                continue;
            }
            let ra = keep.iter().fold(0, |acc, &s| (acc << 1) | bit(a, n, s));
            let rb = keep.iter().fold(0, |acc, &s| (acc << 1) | bit(b, n, s));
            out.a[ra * out.n + rb] += rho.get(a, b);
        }
    }
    out
}

/// Transpose the indices of the `positions` (1-based within the register of `k` sites).
pub fn partial_transpose(rho: &Mat, k: usize, positions: &[usize]) -> Mat {
    let mut out = Mat::zeros(rho.n);
    for a in 0..rho.n {
        for b in 0..rho.n {
            let (mut a2, mut b2) = (a, b);
            for &p in positions {
                let m = 1 << (k - p);
                if (a & m) != (b & m) {
                    a2 ^= m;
                    b2 ^= m;
                }
            }
            out.set(a2, b2, rho.get(a, b));
        }
    }
    out
}

pub fn negativity(rho: &Mat, k: usize, positions: &[usize]) -> f64 {
    let pt = partial_transpose(rho, k, positions);
    let (vals, _) = jacobi_eigen(&pt);
    (vals.iter().map(|x| x.abs()).sum::<f64>() - 1.0).max(0.0)
}

pub struct OracleMqc {
    pub one_vs_rest: f64,
    pub pairwise: Vec<(usize, f64)>,
    pub t_n: f64,
}

pub fn oracle_mqc(rho: &Mat, n: usize, center: usize) -> OracleMqc {
    let one_vs_rest = negativity(rho, n, &[center]);
    let pairwise: Vec<(usize, f64)> = (1..=n)
        .filter(|&j| j != center)
        .map(|j| (j, negativity(&partial_trace(rho, n, &[center, j]), 2, &[1])))
        .collect();
    let rad = one_vs_rest.powi(2) - pairwise.iter().map(|(_, x)| x * x).sum::<f64>();
    OracleMqc { one_vs_rest, pairwise, t_n: rad.max(0.0).sqrt() }
}

pub fn timed<T>(f: impl FnOnce() -> T) -> (T, f64) {
    let t0 = Instant::now();
    let out = f();
    (out, t0.elapsed().as_secs_f64())
}

use trimqc::eigen;
use trimqc::hamiltonian::{CouplingParams, HamiltonianOp};
use trimqc::lattice::Lattice;
use trimqc::mqc::mqc;
use trimqc::qstate::{negativity as lib_negativity, one_vs_rest_negativity, pair_negativity, reduce, QuantumState};
use trimqc::sweep::{prepare_point, RunOptions};

/// State produced by the library pipeline for one parameter point.
pub fn pipeline_state(side: usize, params: CouplingParams, t: f64) -> QuantumState {
    let lattice = Lattice::new(side).unwrap();
    let opts = RunOptions { allow_expensive: true, ..RunOptions::default() };
    prepare_point(&lattice, params, t, 1, &opts).unwrap().state
}

pub fn pipeline_t_n(side: usize, params: CouplingParams, t: f64, center: usize) -> f64 {
    mqc(&pipeline_state(side, params, t), center).unwrap().t_n
}

fn dense_of(state: &QuantumState) -> Mat {
    let d = state.to_dense();
    let n = d.nrows();
    let mut m = Mat::zeros(n);
    for i in 0..n {
        for j in 0..n {
            m.set(i, j, d[(i, j)]);
        }
    }
    m
}

/// Largest absolute deviation between the library and the brute-force
/// oracle on the triangle: matrix, spectrum, state, reduced matrices,
/// every negativity and every `T_3`.
pub fn triangle_deviation(j: f64, omega: f64, eta: f64, t: f64) -> f64 {
    let params = CouplingParams::new(j, omega, eta);
    let lattice = Lattice::new(2).unwrap();
    let op = HamiltonianOp::new(&lattice, params).unwrap();
    let h_ref = kron_hamiltonian(3, &triangle_bonds(j, omega, eta), 1.0);
    let mut dev: f64 = 0.0;

    let h = op.materialize().unwrap();
    for a in 0..8 {
        for b in 0..8 {
            dev = dev.max((h[(a, b)] - h_ref.get(a, b)).abs());
        }
    }

    let (vals, vecs) = jacobi_eigen(&h_ref);
    let spec = eigen::full_spectrum(&op).unwrap();
    for (x, y) in spec.energies().iter().zip(&vals) {
        dev = dev.max((x - y).abs());
    }

    let rho_ref = if t == 0.0 { projector(&column(&vecs, 0)) } else { gibbs_dense(&h_ref, t) };
    let state = pipeline_state(2, params, t);
    dev = dev.max(dense_of(&state).max_abs_diff(&rho_ref));

    for keep in [vec![1, 2], vec![1, 3], vec![2, 3], vec![2], vec![3, 1]] {
        let r = reduce(&state, &keep).unwrap();
        let r_ref = partial_trace(&rho_ref, 3, &keep);
        for a in 0..r_ref.n {
            for b in 0..r_ref.n {
                dev = dev.max((r.matrix()[(a, b)] - r_ref.get(a, b)).abs());
            }
        }
        if keep.len() == 2 {
            let n_ref = negativity(&r_ref, 2, &[1]);
            dev = dev.max((lib_negativity(&r, &keep[..1]).unwrap() - n_ref).abs());
        }
    }

    for c in 1..=3 {
        let o = oracle_mqc(&rho_ref, 3, c);
        let m = mqc(&state, c).unwrap();
        dev = dev.max((one_vs_rest_negativity(&state, c).unwrap() - o.one_vs_rest).abs());
        dev = dev.max((m.one_vs_rest - o.one_vs_rest).abs());
        for (jj, x) in &o.pairwise {
            dev = dev.max((pair_negativity(&state, c, *jj).unwrap() - x).abs());
            dev = dev.max((m.pairwise[jj] - x).abs());
        }
        dev = dev.max((m.t_n - o.t_n).abs());
    }
    dev
}
