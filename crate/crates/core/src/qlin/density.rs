use nalgebra::DMatrix;

use super::layout::SystemLayout;
use super::{hermitian_eigen, hermiticity_defect, C64, CONSTRUCT_TOL, PSD_TOL};
use crate::error::{Error, Result};

/// Hermitian, unit-trace, positive semidefinite operator on a layout.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityOperator {
    layout: SystemLayout,
    matrix: DMatrix<C64>,
}

impl DensityOperator {
    pub fn new(layout: SystemLayout, matrix: DMatrix<C64>) -> Result<Self> {
        let d = layout.total_dim();
        if matrix.nrows() != d || matrix.ncols() != d {
            return Err(Error::Layout(format!(
                "layout {layout} needs a {d}x{d} matrix, got {}x{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        let defect = hermiticity_defect(&matrix);
        if defect > CONSTRUCT_TOL {
            return Err(Error::Domain(format!(
                "density matrix not Hermitian ({defect:e})"
            )));
        }
        let tr = matrix.trace();
        if (tr.re - 1.0).abs() > CONSTRUCT_TOL || tr.im.abs() > CONSTRUCT_TOL {
            return Err(Error::Domain(format!("density matrix trace is {tr}")));
        }
        let rho = Self { layout, matrix };
        let min = rho.min_eigenvalue();
        if min < PSD_TOL {
            return Err(Error::Domain(format!(
                "density matrix has eigenvalue {min}"
            )));
        }
        Ok(rho)
    }

    pub fn maximally_mixed(layout: SystemLayout) -> Self {
        let d = layout.total_dim();
        let matrix = DMatrix::from_diagonal_element(d, d, C64::new(1.0 / d as f64, 0.0));
        Self { layout, matrix }
    }

    pub(crate) fn from_parts_unchecked(layout: SystemLayout, matrix: DMatrix<C64>) -> Self {
        Self { layout, matrix }
    }

    pub fn layout(&self) -> &SystemLayout {
        &self.layout
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace().re
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        hermitian_eigen(&self.matrix).0.iter().copied().collect()
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues().first().copied().unwrap_or(0.0)
    }

    /// Number of eigenvalues above `tol`.
    pub fn rank(&self, tol: f64) -> usize {
        self.eigenvalues().iter().filter(|&&v| v > tol).count()
    }

    /// Kronecker product; the result layout is `self` followed by `other`.
    pub fn tensor(&self, other: &DensityOperator) -> Result<Self> {
        let layout = self.layout.concat(&other.layout)?;
        Ok(Self {
            layout,
            matrix: self.matrix.kronecker(&other.matrix),
        })
    }

    /// Traces out every register not in `keep`; the result keeps the listed
    /// registers in the listed order.
    pub fn partial_trace<S: AsRef<str>>(&self, keep: &[S]) -> Result<Self> {
        if keep.is_empty() {
            return Err(Error::Layout(
                "partial trace must keep at least one register".into(),
            ));
        }
        let split = self.layout.split(keep)?;
        let k = split.keep.len();
        let mut out = DMatrix::zeros(k, k);
        for i in 0..k {
            for j in 0..k {
                let (ri, cj) = (split.keep[i], split.keep[j]);
                out[(i, j)] = split
                    .rest
                    .iter()
                    .map(|&r| self.matrix[(ri + r, cj + r)])
                    .sum();
            }
        }
        Self::new(split.keep_layout, out)
    }

    /// `tr(ρ X)` for an operator on the same space.
    pub fn expectation(&self, op: &DMatrix<C64>) -> Result<C64> {
        if op.shape() != self.matrix.shape() {
            return Err(Error::Layout(
                "operator shape does not match the state".into(),
            ));
        }
        Ok((&self.matrix * op).trace())
    }
}
