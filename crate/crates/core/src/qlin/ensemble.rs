use nalgebra::{DMatrix, DVector};

use super::layout::SystemLayout;
use super::{DensityOperator, StateVector, C64, CONSTRUCT_TOL};
use crate::error::{Error, Result};

/// Classical mixture of pure states on a common layout.
#[derive(Debug, Clone, PartialEq)]
pub struct Ensemble {
    entries: Vec<(f64, StateVector)>,
}

impl Ensemble {
    pub fn new(entries: Vec<(f64, StateVector)>) -> Result<Self> {
        let Some((_, first)) = entries.first() else {
            return Err(Error::Domain("empty ensemble".into()));
        };
        let layout = first.layout().clone();
        let mut total = 0.0;
        for (p, s) in &entries {
            if !(0.0..=1.0).contains(p) {
                return Err(Error::Domain(format!("probability {p} outside [0, 1]")));
            }
            if s.layout() != &layout {
                return Err(Error::Layout(format!(
                    "ensemble mixes layouts {layout} and {}",
                    s.layout()
                )));
            }
            total += p;
        }
        if (total - 1.0).abs() > CONSTRUCT_TOL {
            return Err(Error::Domain(format!("probabilities sum to {total}")));
        }
        Ok(Self { entries })
    }

    /// Equal weights over `states`.
    pub fn uniform(states: Vec<StateVector>) -> Result<Self> {
        let w = 1.0 / states.len().max(1) as f64;
        Self::new(states.into_iter().map(|s| (w, s)).collect())
    }

    pub fn entries(&self) -> &[(f64, StateVector)] {
        &self.entries
    }

    pub fn layout(&self) -> &SystemLayout {
        self.entries[0].1.layout()
    }

    /// `Σ p_k |ψ_k⟩⟨ψ_k|`.
    pub fn average(&self) -> DensityOperator {
        let d = self.layout().total_dim();
        let mut m = DMatrix::<C64>::zeros(d, d);
        for (p, s) in &self.entries {
            m += s.amplitudes() * s.amplitudes().adjoint() * C64::new(*p, 0.0);
        }
        DensityOperator::from_parts_unchecked(self.layout().clone(), m)
    }
}

/// `Σ_k √p_k |f_k⟩|ψ_k⟩` with `|f_k⟩` the computational basis of a fresh
/// register `purifier` of dimension equal to the number of entries.
pub fn purify(ensemble: &Ensemble, purifier: &str) -> Result<StateVector> {
    let k = ensemble.entries.len();
    let layout = SystemLayout::single(purifier, k)?.concat(ensemble.layout())?;
    let d = ensemble.layout().total_dim();
    let mut amps = DVector::zeros(k * d);
    for (i, (p, s)) in ensemble.entries.iter().enumerate() {
        let w = p.sqrt();
        for j in 0..d {
            amps[i * d + j] = s.amplitudes()[j] * w;
        }
    }
    StateVector::normalized(layout, amps)
}
