//! Dense complex linear algebra and quantum-state primitives over labeled
//! multi-register systems.
//!
//! Every state carries a [`SystemLayout`]; operations address tensor factors
//! by register name rather than by position. The Hermitian eigensolver in
//! [`hermitian_eigen`] backs the trace norm, fidelity and positivity checks.

mod circle;
mod density;
mod ensemble;
mod layout;
mod projector;
mod schmidt;
mod state;
mod svd;

pub use circle::{circle_state, rotate_on_circle, rotation};
pub use density::DensityOperator;
pub use ensemble::{purify, Ensemble};
pub use layout::{Register, SystemLayout};
pub use projector::{luders_project, Projector};
pub use schmidt::{schmidt, SchmidtDecomposition};
pub use state::StateVector;
pub use svd::{orthonormal_complement, svd};

use nalgebra::{DMatrix, DVector};
pub use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

/// Tolerance used when constructing values (norms, traces, hermiticity).
pub const CONSTRUCT_TOL: f64 = 1e-12;
/// Tolerance used when verifying derived properties.
pub const VERIFY_TOL: f64 = 1e-10;
/// Smallest eigenvalue tolerated in a density operator.
pub const PSD_TOL: f64 = -1e-10;
/// Outcome probabilities below this cannot be conditioned on.
pub const IMPOSSIBLE_TOL: f64 = 1e-14;

#[cfg(test)]
pub(crate) fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Largest entry modulus.
pub fn max_abs(a: &DMatrix<C64>) -> f64 {
    a.iter().fold(0.0, |m, z| m.max(z.norm()))
}

/// Largest elementwise deviation `|a_ij - conj(a_ji)|`.
pub fn hermiticity_defect(a: &DMatrix<C64>) -> f64 {
    let n = a.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((a[(i, j)] - a[(j, i)].conj()).norm());
        }
    }
    worst
}

/// Eigen-decomposition of a Hermitian matrix, eigenvalues ascending.
///
/// Only the lower triangle is read; callers are responsible for hermiticity.
pub fn hermitian_eigen(a: &DMatrix<C64>) -> (DVector<f64>, DMatrix<C64>) {
    let n = a.nrows();
    let eig = a.clone().symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let values = DVector::from_iterator(n, order.iter().map(|&i| eig.eigenvalues[i]));
    let mut vectors = DMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        vectors.set_column(dst, &eig.eigenvectors.column(src));
    }
    (values, vectors)
}

/// Sum of absolute eigenvalues of a Hermitian matrix.
pub fn trace_norm(a: &DMatrix<C64>) -> Result<f64> {
    if !a.is_square() {
        return Err(Error::Domain(format!(
            "trace norm needs a square matrix, got {}x{}",
            a.nrows(),
            a.ncols()
        )));
    }
    let defect = hermiticity_defect(a);
    if defect > VERIFY_TOL {
        return Err(Error::Domain(format!(
            "trace norm input is not Hermitian (deviation {defect:e})"
        )));
    }
    let (values, _) = hermitian_eigen(a);
    Ok(values.iter().map(|v| v.abs()).sum())
}

/// `f(A)` for Hermitian `A` through its spectrum.
pub(crate) fn hermitian_map(a: &DMatrix<C64>, f: impl Fn(f64) -> f64) -> DMatrix<C64> {
    let (values, vectors) = hermitian_eigen(a);
    let mut scaled = vectors.clone();
    for (j, v) in values.iter().enumerate() {
        let s = f(*v);
        scaled.column_mut(j).scale_mut(s);
    }
    scaled * vectors.adjoint()
}

/// Positive square root of a positive semidefinite matrix; tiny negative
/// eigenvalues from rounding are clamped to zero.
pub fn psd_sqrt(a: &DMatrix<C64>) -> DMatrix<C64> {
    // eigenvalues at rounding level are zeros; their square roots would not be
    let floor = IMPOSSIBLE_TOL * a.nrows() as f64;
    hermitian_map(a, |v| if v > floor { v.sqrt() } else { 0.0 })
}

/// Root fidelity `F(ρ, σ) = ‖√ρ √σ‖₁`.
///
/// For pure states this is `|⟨ψ|φ⟩|`.
pub fn fidelity(rho: &DensityOperator, sigma: &DensityOperator) -> Result<f64> {
    if rho.layout() != sigma.layout() {
        return Err(Error::Layout(format!(
            "fidelity of mismatched layouts {} and {}",
            rho.layout(),
            sigma.layout()
        )));
    }
    let x = psd_sqrt(rho.matrix()) * psd_sqrt(sigma.matrix());
    let f: f64 = svd(&x).1.iter().sum();
    Ok(f.clamp(0.0, 1.0))
}

/// `‖ρ − σ‖₁`, in `[0, 2]`.
pub fn trace_distance(rho: &DensityOperator, sigma: &DensityOperator) -> Result<f64> {
    if rho.layout() != sigma.layout() {
        return Err(Error::Layout(format!(
            "trace distance of mismatched layouts {} and {}",
            rho.layout(),
            sigma.layout()
        )));
    }
    Ok(trace_norm(&(rho.matrix() - sigma.matrix()))?.min(2.0))
}
