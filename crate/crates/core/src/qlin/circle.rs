//! States on the Bloch-sphere equator and phase rotations along it.

use nalgebra::{DMatrix, DVector};

use super::layout::SystemLayout;
use super::{StateVector, C64};
use crate::error::{Error, Result};

pub(crate) fn circle_amps(theta: f64) -> [C64; 2] {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    [C64::new(h, 0.0), C64::from_polar(h, theta)]
}

/// `(|0⟩ + e^{iθ}|1⟩)/√2` on a qubit register named `register`.
pub fn circle_state(register: &str, theta: f64) -> StateVector {
    let layout = SystemLayout::single(register, 2).expect("qubit layout");
    StateVector::from_parts_unchecked(layout, DVector::from_column_slice(&circle_amps(theta)))
}

/// `R(φ) = diag(1, e^{iφ})`, a rotation by `φ` about the z axis.
pub fn rotation(phi: f64) -> DMatrix<C64> {
    DMatrix::from_diagonal(&DVector::from_vec(vec![
        C64::new(1.0, 0.0),
        C64::from_polar(1.0, phi),
    ]))
}

/// Applies `R(φ)` to a single-qubit state; maps `circle_state(θ)` to
/// `circle_state(θ + φ)`.
pub fn rotate_on_circle(psi: &StateVector, phi: f64) -> Result<StateVector> {
    if psi.layout().len() != 1 || psi.dim() != 2 {
        return Err(Error::Domain(format!(
            "rotation on the circle needs a single qubit, got {}",
            psi.layout()
        )));
    }
    let name = psi.layout().registers()[0].name.clone();
    psi.apply(&[name], &rotation(phi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, PI};

    #[test]
    fn theta_zero_is_plus() {
        let s = circle_state("q", 0.0);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!((s.amplitudes()[0] - C64::new(h, 0.0)).norm() < 1e-16);
        assert!((s.amplitudes()[1] - C64::new(h, 0.0)).norm() < 1e-16);
    }

    #[test]
    fn antipodal_points_are_orthogonal() {
        for k in 0..32 {
            let t = k as f64 * 0.2;
            let o = circle_state("q", t)
                .overlap(&circle_state("q", t + PI))
                .unwrap();
            assert!(o < 1e-15);
        }
    }

    #[test]
    fn quarter_turn_overlap_is_one_half() {
        let o = circle_state("q", 0.0)
            .overlap(&circle_state("q", FRAC_PI_2))
            .unwrap();
        assert!((o * o - 0.5).abs() < 1e-15);
    }

    #[test]
    fn rotation_examples() {
        let psi = circle_state("q", 0.7);
        assert!(rotate_on_circle(&psi, 0.0).unwrap().same_ray(&psi, 1e-15));
        let round =
            rotate_on_circle(&rotate_on_circle(&psi, FRAC_PI_2).unwrap(), -FRAC_PI_2).unwrap();
        assert!(round.same_ray(&psi, 1e-15));
        let plus = rotate_on_circle(&psi, FRAC_PI_2).unwrap();
        let minus = rotate_on_circle(&psi, -FRAC_PI_2).unwrap();
        assert!(plus.overlap(&minus).unwrap() < 1e-15);
        assert!(plus.same_ray(&circle_state("q", 0.7 + FRAC_PI_2), 1e-15));
    }

    #[test]
    fn rotation_needs_a_qubit() {
        let l = SystemLayout::single("t", 3).unwrap();
        let s = StateVector::basis(l, 0).unwrap();
        assert!(rotate_on_circle(&s, 1.0).is_err());
    }
}
