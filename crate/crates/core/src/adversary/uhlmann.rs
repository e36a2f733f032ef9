use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::qlin::{max_abs, orthonormal_complement, svd, StateVector, SystemLayout, C64};

/// Largest cut dimension for which the full unitary is materialized.
pub const MAX_DENSE_CUT: usize = 4096;

const RANK_TOL: f64 = 1e-12;

/// A unitary `V` on a register subset, stored as the isometry it must be on
/// the support of the source state, `V|_{span A} = T A†`; any completion to a
/// full unitary attains the same overlap.
#[derive(Debug, Clone)]
pub struct LocalUnitary {
    layout: SystemLayout,
    a: DMatrix<C64>,
    t: DMatrix<C64>,
    overlap: f64,
}

impl LocalUnitary {
    /// The registers `V` acts on, in the order of its matrix.
    pub fn layout(&self) -> &SystemLayout {
        &self.layout
    }

    /// `|⟨ψ₁|(V ⊗ I)|ψ₀⟩|` for the pair it was built from.
    pub fn overlap(&self) -> f64 {
        self.overlap
    }

    /// The full `d × d` unitary, completed on the orthogonal complement of
    /// the source support.
    pub fn to_dense(&self) -> Result<DMatrix<C64>> {
        let d = self.layout.total_dim();
        if d > MAX_DENSE_CUT {
            return Err(Error::ResourceCap {
                what: format!("dense local unitary on {}", self.layout),
                dim: d,
                cap: MAX_DENSE_CUT,
            });
        }
        let in_perp = orthonormal_complement(&self.a, d - self.a.ncols());
        let out_perp = orthonormal_complement(&self.t, d - self.t.ncols());
        Ok(&self.t * self.a.adjoint() + out_perp * in_perp.adjoint())
    }

    /// `(V ⊗ I)|ψ⟩`; `ψ` must contain the registers of `V`.
    pub fn apply(&self, psi: &StateVector) -> Result<StateVector> {
        let names: Vec<&str> = self.layout.names().collect();
        let (m, left, right) = psi.matrix_view(&names)?;
        if left != self.layout {
            return Err(Error::Layout(format!(
                "unitary on {} cannot act on {}",
                self.layout, left
            )));
        }
        let coeff = self.a.adjoint() * &m;
        let outside = &m - &self.a * &coeff;
        let image = if max_abs(&outside) > 1e-10 {
            self.to_dense()? * &m
        } else {
            &self.t * coeff
        };
        let order: Vec<String> = psi.layout().names().map(str::to_owned).collect();
        let moved = match right {
            Some(right) => StateVector::from_matrix_view(&left, &right, &image)?,
            None => StateVector::normalized(left, image.column(0).into_owned())?,
        };
        moved.reorder(&order)
    }
}

/// Thin SVD `M = U Σ W†` keeping singular values above `RANK_TOL` relative to
/// the largest.
fn thin_svd(m: &DMatrix<C64>) -> (DMatrix<C64>, Vec<f64>, DMatrix<C64>) {
    let (u, sigma, v_t) = svd(m);
    let top = sigma.iter().cloned().fold(0.0, f64::max);
    let keep: Vec<usize> = (0..sigma.len())
        .filter(|&i| sigma[i] > RANK_TOL * top.max(1.0))
        .collect();
    let uk = DMatrix::from_fn(u.nrows(), keep.len(), |r, c| u[(r, keep[c])]);
    let wk = DMatrix::from_fn(v_t.ncols(), keep.len(), |r, c| v_t[(keep[c], r)].conj());
    let s = keep.iter().map(|&i| sigma[i]).collect();
    (uk, s, wk)
}

/// The local unitary on `alice_cut` that maximizes `|⟨ψ₁|(V ⊗ I)|ψ₀⟩|`.
///
/// With Schmidt forms `ψ₀ = Σ sᵢ|aᵢ⟩|bᵢ⟩` and `ψ₁ = Σ tⱼ|cⱼ⟩|dⱼ⟩` the overlap is
/// `tr(V A G C†)` with `Gᵢⱼ = sᵢ tⱼ ⟨dⱼ|bᵢ⟩`. Writing `G = U Σ W†`, the maximum
/// `Σ σ = ‖G‖₁` is attained by `V = C W U† A†`; the SVD also resolves
/// degenerate Schmidt coefficients.
pub fn uhlmann_local_unitary<S: AsRef<str>>(
    psi0: &StateVector,
    psi1: &StateVector,
    alice_cut: &[S],
) -> Result<LocalUnitary> {
    if psi0.layout() != psi1.layout() {
        return Err(Error::Layout(format!(
            "states live on {} and {}",
            psi0.layout(),
            psi1.layout()
        )));
    }
    if alice_cut.is_empty() {
        return Err(Error::Partition("Alice's side of the cut is empty".into()));
    }
    for name in alice_cut {
        if !psi0.layout().contains(name.as_ref()) {
            return Err(Error::Partition(format!(
                "unknown register `{}`",
                name.as_ref()
            )));
        }
    }
    let (m0, layout, rest) = psi0.matrix_view(alice_cut)?;
    if rest.is_none() {
        return Err(Error::Partition("Bob's side of the cut is empty".into()));
    }
    let (m1, _, _) = psi1.matrix_view(alice_cut)?;

    let (a, s, b) = thin_svd(&m0);
    let (c, t, dd) = thin_svd(&m1);
    let (r0, r1) = (s.len(), t.len());

    // Pad ψ₁'s Alice basis so that an isometry out of span A exists.
    let extra = r0.saturating_sub(r1);
    let c = if extra > 0 {
        let pad = orthonormal_complement(&c, extra);
        let mut wide = DMatrix::zeros(c.nrows(), r1 + pad.ncols());
        wide.columns_mut(0, r1).copy_from(&c);
        wide.columns_mut(r1, pad.ncols()).copy_from(&pad);
        wide
    } else {
        c
    };
    let cols = c.ncols();
    // M = A S B†, so the Bob-side Schmidt vectors are conj(B).
    let cross = dd.adjoint() * &b;
    let g = DMatrix::from_fn(r0, cols, |i, j| {
        if j < r1 {
            C64::new(s[i] * t[j], 0.0) * cross[(j, i)].conj()
        } else {
            C64::new(0.0, 0.0)
        }
    });
    let (u, sigma, v_t) = svd(&g);
    let w = v_t.adjoint();
    let overlap: f64 = sigma.iter().sum();
    let t_map = &c * w * u.adjoint();
    Ok(LocalUnitary {
        layout,
        a,
        t: t_map,
        overlap: overlap.min(1.0),
    })
}
