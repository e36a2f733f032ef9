use std::collections::BTreeSet;

use nalgebra::{DMatrix, DVector};

use super::layout::SystemLayout;
use super::{hermiticity_defect, max_abs, StateVector, C64, IMPOSSIBLE_TOL, VERIFY_TOL};
use crate::error::{Error, Result};

/// Orthogonal projector acting on a subset of registers.
#[derive(Debug, Clone, PartialEq)]
pub enum Projector {
    /// Arbitrary projector given as a dense matrix.
    Dense {
        layout: SystemLayout,
        matrix: DMatrix<C64>,
    },
    /// `|φ⟩⟨φ|`, kept in factored form.
    Rank1(StateVector),
    /// Span of a set of computational basis states.
    Basis {
        layout: SystemLayout,
        support: BTreeSet<usize>,
    },
}

impl Projector {
    pub fn dense(layout: SystemLayout, matrix: DMatrix<C64>) -> Result<Self> {
        let d = layout.total_dim();
        if matrix.shape() != (d, d) {
            return Err(Error::Layout(format!(
                "projector on {layout} must be {d}x{d}"
            )));
        }
        let herm = hermiticity_defect(&matrix);
        let idem = max_abs(&(&matrix * &matrix - &matrix));
        if herm > VERIFY_TOL || idem > VERIFY_TOL {
            return Err(Error::Domain(format!(
                "not an orthogonal projector (hermiticity {herm:e}, idempotency {idem:e})"
            )));
        }
        Ok(Self::Dense { layout, matrix })
    }

    pub fn onto(state: StateVector) -> Self {
        Self::Rank1(state)
    }

    pub fn basis(layout: SystemLayout, support: impl IntoIterator<Item = usize>) -> Result<Self> {
        let d = layout.total_dim();
        let support: BTreeSet<usize> = support.into_iter().collect();
        if let Some(&bad) = support.iter().find(|&&i| i >= d) {
            return Err(Error::Domain(format!("basis index {bad} out of range {d}")));
        }
        Ok(Self::Basis { layout, support })
    }

    pub fn identity(layout: SystemLayout) -> Self {
        let d = layout.total_dim();
        Self::Basis {
            layout,
            support: (0..d).collect(),
        }
    }

    pub fn layout(&self) -> &SystemLayout {
        match self {
            Self::Dense { layout, .. } | Self::Basis { layout, .. } => layout,
            Self::Rank1(s) => s.layout(),
        }
    }

    pub fn rank(&self) -> usize {
        match self {
            Self::Dense { matrix, .. } => matrix.trace().re.round() as usize,
            Self::Rank1(_) => 1,
            Self::Basis { support, .. } => support.len(),
        }
    }

    fn apply_fiber(&self, v: &DVector<C64>) -> DVector<C64> {
        match self {
            Self::Dense { matrix, .. } => matrix * v,
            Self::Rank1(phi) => phi.amplitudes() * phi.amplitudes().dotc(v),
            Self::Basis { support, .. } => {
                let mut out = DVector::zeros(v.len());
                for &i in support {
                    out[i] = v[i];
                }
                out
            }
        }
    }

    /// `P|ψ⟩` (unnormalized) on the full space of `psi`.
    pub fn apply(&self, psi: &StateVector) -> Result<DVector<C64>> {
        let names: Vec<&str> = self.layout().names().collect();
        let local = psi.layout().subset(&names)?;
        if &local != self.layout() {
            return Err(Error::Layout(format!(
                "projector layout {} does not match state registers {local}",
                self.layout()
            )));
        }
        psi.map_fibers(&names, |f| self.apply_fiber(f))
    }

    /// `⟨ψ|P|ψ⟩`.
    pub fn probability(&self, psi: &StateVector) -> Result<f64> {
        Ok(self.apply(psi)?.norm_squared())
    }
}

/// Lüders measurement: returns the outcome probability and the normalized
/// post-measurement state `P|ψ⟩/‖P|ψ⟩‖`.
pub fn luders_project(psi: &StateVector, projector: &Projector) -> Result<(f64, StateVector)> {
    let image = projector.apply(psi)?;
    let p = image.norm_squared();
    if p < IMPOSSIBLE_TOL {
        return Err(Error::ImpossibleOutcome {
            probability: p,
            threshold: IMPOSSIBLE_TOL,
        });
    }
    Ok((p, StateVector::normalized(psi.layout().clone(), image)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qlin::{c, circle_state};

    fn plus() -> StateVector {
        circle_state("q", 0.0)
    }

    #[test]
    fn identity_projection_keeps_state() {
        let psi = plus();
        let (p, post) = luders_project(&psi, &Projector::identity(psi.layout().clone())).unwrap();
        assert!((p - 1.0).abs() < 1e-15);
        assert!(post.same_ray(&psi, 1e-15));
    }

    #[test]
    fn project_plus_onto_zero() {
        let psi = plus();
        let proj = Projector::basis(psi.layout().clone(), [0]).unwrap();
        let (p, post) = luders_project(&psi, &proj).unwrap();
        assert!((p - 0.5).abs() < 1e-15);
        assert_eq!(post.amplitudes()[0], c(1.0, 0.0));
    }

    #[test]
    fn impossible_outcome_is_an_error() {
        let zero = StateVector::basis(SystemLayout::single("q", 2).unwrap(), 0).unwrap();
        let proj = Projector::basis(zero.layout().clone(), [1]).unwrap();
        assert!(matches!(
            luders_project(&zero, &proj),
            Err(Error::ImpossibleOutcome { .. })
        ));
    }

    #[test]
    fn dense_projector_validated() {
        let l = SystemLayout::single("q", 2).unwrap();
        let not_idempotent = DMatrix::from_diagonal_element(2, 2, c(0.5, 0.0));
        assert!(Projector::dense(l.clone(), not_idempotent).is_err());
        let ok = Projector::dense(l, plus().density().matrix().clone()).unwrap();
        assert_eq!(ok.rank(), 1);
    }

    #[test]
    fn projector_on_subsystem() {
        let psi = plus()
            .rename("q", "a")
            .unwrap()
            .tensor(&plus().rename("q", "b").unwrap())
            .unwrap();
        let proj = Projector::basis(SystemLayout::single("b", 2).unwrap(), [1]).unwrap();
        assert!((proj.probability(&psi).unwrap() - 0.5).abs() < 1e-15);
    }
}
