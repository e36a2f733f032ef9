use nalgebra::DVector;

use super::layout::SystemLayout;
use super::{svd, StateVector, C64, VERIFY_TOL};
use crate::error::{Error, Result};

/// `|ψ⟩ = Σ_i c_i |L_i⟩ ⊗ |R_i⟩` with nonincreasing `c_i ≥ 0`.
#[derive(Debug, Clone)]
pub struct SchmidtDecomposition {
    coefficients: Vec<f64>,
    left: Vec<StateVector>,
    right: Vec<StateVector>,
}

impl SchmidtDecomposition {
    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    pub fn left_basis(&self) -> &[StateVector] {
        &self.left
    }

    pub fn right_basis(&self) -> &[StateVector] {
        &self.right
    }

    pub fn left_layout(&self) -> &SystemLayout {
        self.left[0].layout()
    }

    pub fn right_layout(&self) -> &SystemLayout {
        self.right[0].layout()
    }

    /// Number of coefficients above `tol`.
    pub fn rank(&self, tol: f64) -> usize {
        self.coefficients.iter().filter(|&&c| c > tol).count()
    }

    /// `Σ c_i |L_i⟩|R_i⟩` on the layout `left ⊗ right`.
    pub fn reconstruct(&self) -> Result<StateVector> {
        let layout = self.left_layout().concat(self.right_layout())?;
        let mut amps = DVector::<C64>::zeros(layout.total_dim());
        for ((c, l), r) in self.coefficients.iter().zip(&self.left).zip(&self.right) {
            amps += l.amplitudes().kronecker(r.amplitudes()) * C64::new(*c, 0.0);
        }
        StateVector::normalized(layout, amps)
    }
}

/// Schmidt decomposition across the cut `left | rest`.
pub fn schmidt<S: AsRef<str>>(psi: &StateVector, left: &[S]) -> Result<SchmidtDecomposition> {
    if left.is_empty() {
        return Err(Error::Partition("left side of the cut is empty".into()));
    }
    for name in left {
        if !psi.layout().contains(name.as_ref()) {
            return Err(Error::Partition(format!(
                "unknown register `{}`",
                name.as_ref()
            )));
        }
    }
    let (m, left_layout, right_layout) = psi.matrix_view(left)?;
    let right_layout =
        right_layout.ok_or_else(|| Error::Partition("right side of the cut is empty".into()))?;

    let (u, sigma, v_t) = svd(&m);
    let mut order: Vec<usize> = (0..sigma.len()).collect();
    order.sort_by(|&a, &b| sigma[b].total_cmp(&sigma[a]));

    let mut coefficients = Vec::with_capacity(order.len());
    let mut lefts = Vec::with_capacity(order.len());
    let mut rights = Vec::with_capacity(order.len());
    for k in order {
        coefficients.push(sigma[k]);
        lefts.push(StateVector::normalized(
            left_layout.clone(),
            u.column(k).into_owned(),
        )?);
        let r = v_t.row(k).transpose();
        rights.push(StateVector::normalized(right_layout.clone(), r)?);
    }
    let total: f64 = coefficients.iter().map(|c| c * c).sum();
    debug_assert!(
        (total - 1.0).abs() < VERIFY_TOL,
        "Schmidt weights sum to {total}"
    );
    Ok(SchmidtDecomposition {
        coefficients,
        left: lefts,
        right: rights,
    })
}
