//! Brute-force reference implementations used to cross-check the library.
//!
//! Nothing here calls into `qbc1_core::qlin` numerics: Hermitian matrices are
//! embedded as real symmetric ones and diagonalized with a plain cyclic
//! Jacobi sweep, and partial traces are index loops.

#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use qbc1_core::qlin::{DensityOperator, StateVector, SystemLayout, C64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Eigenvalues (ascending) and eigenvectors of a real symmetric matrix.
pub fn jacobi_eigen(a: &DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let n = a.nrows();
    let mut a = a.clone();
    let mut v = DMatrix::<f64>::identity(n, n);
    for _ in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .filter(|(i, j)| i != j)
            .map(|(i, j)| a[(i, j)].powi(2))
            .sum();
        if off < 1e-30 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if a[(p, q)].abs() < 1e-300 {
                    continue;
                }
                let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * a[(p, q)]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (akp, akq) = (a[(k, p)], a[(k, q)]);
                    a[(k, p)] = c * akp - s * akq;
                    a[(k, q)] = s * akp + c * akq;
                }
                for k in 0..n {
                    let (apk, aqk) = (a[(p, k)], a[(q, k)]);
                    a[(p, k)] = c * apk - s * aqk;
                    a[(q, k)] = s * apk + c * aqk;
                }
                for k in 0..n {
                    let (vkp, vkq) = (v[(k, p)], v[(k, q)]);
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].total_cmp(&a[(j, j)]));
    let values = order.iter().map(|&i| a[(i, i)]).collect();
    let vectors = DMatrix::from_fn(n, n, |r, c| v[(r, order[c])]);
    (values, vectors)
}

/// `[[Re H, -Im H], [Im H, Re H]]`; every eigenvalue of `H` appears twice.
fn embed(h: &DMatrix<C64>) -> DMatrix<f64> {
    let n = h.nrows();
    DMatrix::from_fn(2 * n, 2 * n, |r, c| {
        let z = h[(r % n, c % n)];
        match (r < n, c < n) {
            (true, true) | (false, false) => z.re,
            (true, false) => -z.im,
            (false, true) => z.im,
        }
    })
}

/// Eigenvalues of a Hermitian matrix, ascending, each listed once.
pub fn hermitian_eigenvalues(h: &DMatrix<C64>) -> Vec<f64> {
    let (values, _) = jacobi_eigen(&embed(h));
    values.chunks(2).map(|p| 0.5 * (p[0] + p[1])).collect()
}

/// `f(H)` by spectral calculus on the embedding, which commutes with it.
pub fn hermitian_function(h: &DMatrix<C64>, f: impl Fn(f64) -> f64) -> DMatrix<C64> {
    let n = h.nrows();
    let (values, q) = jacobi_eigen(&embed(h));
    let mut scaled = q.clone();
    for (j, &x) in values.iter().enumerate() {
        let fx = f(x);
        scaled.column_mut(j).scale_mut(fx);
    }
    let big = scaled * q.transpose();
    DMatrix::from_fn(n, n, |r, c| C64::new(big[(r, c)], big[(r + n, c)]))
}

pub fn trace_norm(h: &DMatrix<C64>) -> f64 {
    hermitian_eigenvalues(h).iter().map(|v| v.abs()).sum()
}

/// Eigenvalues this small are rounding noise around zero; their square
/// roots (~1e-8) would not be.
pub const ZERO_EIGENVALUE: f64 = 1e-13;

fn root(x: f64) -> f64 {
    if x > ZERO_EIGENVALUE {
        x.sqrt()
    } else {
        0.0
    }
}

/// `tr √(√ρ σ √ρ)`.
pub fn fidelity(rho: &DMatrix<C64>, sigma: &DMatrix<C64>) -> f64 {
    let r = hermitian_function(rho, root);
    let inner = &r * sigma * &r;
    let inner = (&inner + inner.adjoint()) * C64::new(0.5, 0.0);
    hermitian_eigenvalues(&inner).into_iter().map(root).sum()
}

/// Schmidt coefficients of `psi` across `left | rest`, descending, one per
/// dimension of the left side.
pub fn schmidt_coefficients(psi: &DVector<C64>, dims: &[usize], left: &[usize]) -> Vec<f64> {
    let reduced = partial_trace(&outer(psi), dims, left);
    hermitian_eigenvalues(&reduced)
        .into_iter()
        .rev()
        .map(root)
        .collect()
}

/// Mixed-radix digits of `index`, most significant first.
fn digits(mut index: usize, dims: &[usize]) -> Vec<usize> {
    let mut out = vec![0; dims.len()];
    for k in (0..dims.len()).rev() {
        out[k] = index % dims[k];
        index /= dims[k];
    }
    out
}

/// Reduced matrix on the registers at positions `keep` (ascending).
pub fn partial_trace(rho: &DMatrix<C64>, dims: &[usize], keep: &[usize]) -> DMatrix<C64> {
    let kept: usize = keep.iter().map(|&k| dims[k]).product();
    let total: usize = dims.iter().product();
    let mut out = DMatrix::<C64>::zeros(kept, kept);
    for i in 0..total {
        let di = digits(i, dims);
        for j in 0..total {
            let dj = digits(j, dims);
            if (0..dims.len()).any(|k| !keep.contains(&k) && di[k] != dj[k]) {
                continue;
            }
            let (mut ri, mut rj) = (0, 0);
            for &k in keep {
                ri = ri * dims[k] + di[k];
                rj = rj * dims[k] + dj[k];
            }
            out[(ri, rj)] += rho[(i, j)];
        }
    }
    out
}

pub fn outer(psi: &DVector<C64>) -> DMatrix<C64> {
    psi * psi.adjoint()
}

pub fn random_vector<R: Rng>(rng: &mut R, dim: usize) -> DVector<C64> {
    let v = DVector::from_fn(dim, |_, _| {
        C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
    });
    let norm = v.norm();
    v / C64::new(norm, 0.0)
}

/// Random density matrix of the given rank.
pub fn random_density<R: Rng>(rng: &mut R, dim: usize, rank: usize) -> DMatrix<C64> {
    let g = DMatrix::from_fn(dim, rank, |_, _| {
        C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
    });
    let m = &g * g.adjoint();
    let tr = m.trace();
    m / tr
}

/// Two to three registers of dimension 2..=4 with total dimension at most 64.
pub fn random_dims<R: Rng>(rng: &mut R) -> Vec<usize> {
    let count = rng.random_range(2..=3);
    (0..count).map(|_| rng.random_range(2..=4)).collect()
}

pub fn layout(dims: &[usize]) -> SystemLayout {
    SystemLayout::new(dims.iter().enumerate().map(|(i, &d)| (format!("r{i}"), d))).unwrap()
}

pub fn names(positions: &[usize]) -> Vec<String> {
    positions.iter().map(|i| format!("r{i}")).collect()
}

pub fn state(dims: &[usize], amps: DVector<C64>) -> StateVector {
    StateVector::new(layout(dims), amps).unwrap()
}

pub fn density(dims: &[usize], m: DMatrix<C64>) -> DensityOperator {
    DensityOperator::new(layout(dims), m).unwrap()
}

pub fn max_diff(a: &DMatrix<C64>, b: &DMatrix<C64>) -> f64 {
    (a - b).iter().fold(0.0, |m, z| m.max(z.norm()))
}

/// Every permutation of `0..n`, by recursive insertion.
pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for at in 0..=p.len() {
            let mut q = p.clone();
            q.insert(at, n - 1);
            out.push(q);
        }
    }
    out
}
