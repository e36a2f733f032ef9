use nalgebra::{DMatrix, DVector};

use super::layout::SystemLayout;
use super::{DensityOperator, C64, CONSTRUCT_TOL, VERIFY_TOL};
use crate::error::{Error, Result};

/// Normalized amplitude vector over a labeled multi-register space.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    layout: SystemLayout,
    amps: DVector<C64>,
}

impl StateVector {
    /// Wraps amplitudes that are already normalized.
    pub fn new(layout: SystemLayout, amps: DVector<C64>) -> Result<Self> {
        check_dim(&layout, amps.len())?;
        let norm = amps.norm();
        if (norm - 1.0).abs() > CONSTRUCT_TOL {
            return Err(Error::Domain(format!("state norm is {norm}, expected 1")));
        }
        Ok(Self { layout, amps })
    }

    /// Normalizes `amps`; a zero vector is an error.
    pub fn normalized(layout: SystemLayout, mut amps: DVector<C64>) -> Result<Self> {
        check_dim(&layout, amps.len())?;
        let norm = amps.norm();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::Domain("cannot normalize a zero vector".into()));
        }
        amps.unscale_mut(norm);
        Ok(Self { layout, amps })
    }

    pub fn from_slice(layout: SystemLayout, amps: &[C64]) -> Result<Self> {
        Self::new(layout, DVector::from_column_slice(amps))
    }

    pub fn basis(layout: SystemLayout, index: usize) -> Result<Self> {
        let dim = layout.total_dim();
        if index >= dim {
            return Err(Error::Domain(format!(
                "basis index {index} out of range {dim}"
            )));
        }
        let mut amps = DVector::zeros(dim);
        amps[index] = C64::new(1.0, 0.0);
        Ok(Self { layout, amps })
    }

    pub fn layout(&self) -> &SystemLayout {
        &self.layout
    }

    pub fn amplitudes(&self) -> &DVector<C64> {
        &self.amps
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn norm(&self) -> f64 {
        self.amps.norm()
    }

    /// Kronecker product; the result layout is `self` followed by `other`.
    pub fn tensor(&self, other: &StateVector) -> Result<Self> {
        let layout = self.layout.concat(&other.layout)?;
        let amps = self.amps.kronecker(&other.amps);
        Ok(Self { layout, amps })
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &StateVector) -> Result<C64> {
        if self.layout != other.layout {
            return Err(Error::Layout(format!(
                "inner product of {} with {}",
                self.layout, other.layout
            )));
        }
        Ok(self.amps.dotc(&other.amps))
    }

    /// `|⟨self|other⟩|`, the phase-insensitive comparison used for equality.
    pub fn overlap(&self, other: &StateVector) -> Result<f64> {
        Ok(self.inner(other)?.norm())
    }

    /// Equal up to a global phase.
    pub fn same_ray(&self, other: &StateVector, tol: f64) -> bool {
        self.overlap(other)
            .map(|o| (1.0 - o).abs() <= tol)
            .unwrap_or(false)
    }

    pub fn density(&self) -> DensityOperator {
        let m = &self.amps * self.amps.adjoint();
        DensityOperator::from_parts_unchecked(self.layout.clone(), m)
    }

    /// Reduced density operator on `keep` (in the given register order).
    pub fn reduced<S: AsRef<str>>(&self, keep: &[S]) -> Result<DensityOperator> {
        let (m, keep_layout, _) = self.matrix_view(keep)?;
        // M·M† is positive semidefinite by construction.
        let rho = &m * m.adjoint();
        Ok(DensityOperator::from_parts_unchecked(keep_layout, rho))
    }

    /// Amplitudes reshaped into a `dim(left) × dim(rest)` matrix.
    pub fn matrix_view<S: AsRef<str>>(
        &self,
        left: &[S],
    ) -> Result<(DMatrix<C64>, SystemLayout, Option<SystemLayout>)> {
        let split = self.layout.split(left)?;
        let m = DMatrix::from_fn(split.keep.len(), split.rest.len(), |i, r| {
            self.amps[split.keep[i] + split.rest[r]]
        });
        Ok((m, split.keep_layout, split.rest_layout))
    }

    /// Inverse of [`matrix_view`](Self::matrix_view): the result layout is
    /// `left` followed by `right`.
    pub fn from_matrix_view(
        left: &SystemLayout,
        right: &SystemLayout,
        m: &DMatrix<C64>,
    ) -> Result<Self> {
        if m.nrows() != left.total_dim() || m.ncols() != right.total_dim() {
            return Err(Error::Layout("matrix shape does not match layouts".into()));
        }
        let layout = left.concat(right)?;
        let cols = m.ncols();
        let amps = DVector::from_fn(m.len(), |g, _| m[(g / cols, g % cols)]);
        Self::normalized(layout, amps)
    }

    /// Same state with registers permuted into `order`.
    pub fn reorder<S: AsRef<str>>(&self, order: &[S]) -> Result<Self> {
        if order.len() != self.layout.len() {
            return Err(Error::Layout("reorder must list every register".into()));
        }
        let split = self.layout.split(order)?;
        let amps = DVector::from_iterator(self.dim(), split.keep.iter().map(|&g| self.amps[g]));
        Ok(Self {
            layout: split.keep_layout,
            amps,
        })
    }

    pub fn rename(&self, from: &str, to: &str) -> Result<Self> {
        Ok(Self {
            layout: self.layout.rename(from, to)?,
            amps: self.amps.clone(),
        })
    }

    /// Applies a norm-preserving operator acting on `registers`.
    pub fn apply<S: AsRef<str>>(&self, registers: &[S], op: &DMatrix<C64>) -> Result<Self> {
        let amps = self.map_fibers(registers, |fiber| op * fiber)?;
        let norm = amps.norm();
        if (norm - 1.0).abs() > VERIFY_TOL {
            return Err(Error::Domain(format!(
                "operator on {registers:?} changed the norm to {norm}",
                registers = registers.iter().map(|s| s.as_ref()).collect::<Vec<_>>()
            )));
        }
        Ok(Self {
            layout: self.layout.clone(),
            amps,
        })
    }

    /// Applies `f` to every fiber `ψ(·, r)` over `registers` and returns the
    /// raw (possibly unnormalized) result.
    pub(crate) fn map_fibers<S: AsRef<str>>(
        &self,
        registers: &[S],
        f: impl Fn(&DVector<C64>) -> DVector<C64>,
    ) -> Result<DVector<C64>> {
        let split = self.layout.split(registers)?;
        let d = split.keep.len();
        if d == self.dim() {
            // the fiber is the whole vector in the requested register order
            let fiber = DVector::from_iterator(d, split.keep.iter().map(|&g| self.amps[g]));
            let image = f(&fiber);
            check_len(&image, d)?;
            let mut out = DVector::zeros(d);
            for (i, &g) in split.keep.iter().enumerate() {
                out[g] = image[i];
            }
            return Ok(out);
        }
        let mut out = DVector::zeros(self.dim());
        let mut fiber = DVector::zeros(d);
        for &r in &split.rest {
            for (i, &k) in split.keep.iter().enumerate() {
                fiber[i] = self.amps[k + r];
            }
            let image = f(&fiber);
            check_len(&image, d)?;
            for (i, &k) in split.keep.iter().enumerate() {
                out[k + r] = image[i];
            }
        }
        Ok(out)
    }

    /// `(⟨bra| ⊗ I) |self⟩` where `bra` lives on a subset of the registers;
    /// the result is unnormalized and lives on the remaining registers.
    ///
    /// Returns `None` for the state when `bra` covers every register, in
    /// which case only the amplitude `⟨bra|self⟩` is meaningful.
    pub fn contract(&self, bra: &StateVector) -> Result<(f64, Option<StateVector>)> {
        let names: Vec<&str> = bra.layout.names().collect();
        let split = self.layout.split(&names)?;
        if split.keep_layout != bra.layout {
            return Err(Error::Layout(format!(
                "bra layout {} does not match {}",
                bra.layout, split.keep_layout
            )));
        }
        let mut rest = DVector::zeros(split.rest.len());
        for (ri, &r) in split.rest.iter().enumerate() {
            let mut acc = C64::new(0.0, 0.0);
            for (i, &k) in split.keep.iter().enumerate() {
                acc += bra.amps[i].conj() * self.amps[k + r];
            }
            rest[ri] = acc;
        }
        let prob = rest.norm_squared();
        let state = match split.rest_layout {
            Some(layout) if prob > 0.0 => Some(Self::normalized(layout, rest)?),
            _ => None,
        };
        Ok((prob, state))
    }

    pub(crate) fn from_parts_unchecked(layout: SystemLayout, amps: DVector<C64>) -> Self {
        debug_assert_eq!(layout.total_dim(), amps.len());
        Self { layout, amps }
    }
}

fn check_dim(layout: &SystemLayout, len: usize) -> Result<()> {
    if layout.total_dim() != len {
        return Err(Error::Layout(format!(
            "layout {layout} has dimension {} but {len} amplitudes were given",
            layout.total_dim()
        )));
    }
    Ok(())
}

fn check_len(v: &DVector<C64>, d: usize) -> Result<()> {
    if v.len() != d {
        return Err(Error::Layout(format!(
            "operator image has length {}, expected {d}",
            v.len()
        )));
    }
    Ok(())
}
