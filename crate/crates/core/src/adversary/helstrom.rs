use nalgebra::DMatrix;
use rand::Rng;

use crate::error::{Error, Result};
use crate::protocol::{bob_anc, qubit, Modulation, PairPrep};
use crate::qlin::{hermitian_eigen, trace_distance, DensityOperator, Projector, SystemLayout, C64};

fn same_layout(rho0: &DensityOperator, rho1: &DensityOperator) -> Result<()> {
    if rho0.layout() != rho1.layout() {
        return Err(Error::Layout(format!(
            "cannot discriminate states on {} and {}",
            rho0.layout(),
            rho1.layout()
        )));
    }
    Ok(())
}

/// Projector onto the nonnegative eigenspace of `ρ₀ − ρ₁`; outcome "in the
/// projector" is the guess 0.
pub fn helstrom_projector(rho0: &DensityOperator, rho1: &DensityOperator) -> Result<Projector> {
    same_layout(rho0, rho1)?;
    let (values, vectors) = hermitian_eigen(&(rho0.matrix() - rho1.matrix()));
    let d = rho0.dim();
    let mut p = DMatrix::<C64>::zeros(d, d);
    for (j, &v) in values.iter().enumerate() {
        if v >= 0.0 {
            let col = vectors.column(j);
            p += col * col.adjoint();
        }
    }
    Projector::dense(rho0.layout().clone(), p)
}

/// `(2 + ‖ρ₀ − ρ₁‖₁)/4`, the optimal probability of naming an equiprobable bit.
pub fn helstrom_success(rho0: &DensityOperator, rho1: &DensityOperator) -> Result<f64> {
    Ok((2.0 + trace_distance(rho0, rho1)?) / 4.0)
}

/// Performs the Helstrom measurement on `sample` and returns the guessed bit.
pub fn helstrom_measure<R: Rng + ?Sized>(
    rho0: &DensityOperator,
    rho1: &DensityOperator,
    sample: &DensityOperator,
    rng: &mut R,
) -> Result<u8> {
    same_layout(rho0, sample)?;
    let p0 = match helstrom_projector(rho0, rho1)? {
        Projector::Dense { matrix, .. } => (matrix * sample.matrix()).trace().re,
        _ => unreachable!("helstrom_projector is dense"),
    };
    Ok(if rng.random::<f64>() < p0 { 0 } else { 1 })
}

/// The two states Bob holds after an honest commitment when the committed
/// original is uniform over `unreturned`: on `bob_anc{l}` for `l` in
/// `unreturned` (in that order) followed by `q0`,
///
/// `ρ_b = (1/|U|) Σ_{l̄∈U} (I ⊗ U_b) pair_{l̄} (I ⊗ U_b)† ⊗_{l≠l̄} a_l`
///
/// where `a_l` is the ancilla marginal of pair `l`.
pub fn bob_model_states(
    pairs: &[PairPrep],
    unreturned: &[usize],
    modulation: Modulation,
) -> Result<(DensityOperator, DensityOperator)> {
    if unreturned.is_empty() {
        return Err(Error::Domain(
            "the committed qubit must come from some unreturned original".into(),
        ));
    }
    let layout = SystemLayout::new(
        unreturned
            .iter()
            .map(|&l| (bob_anc(l), 2))
            .chain(std::iter::once((qubit(0), 2))),
    )?;
    let rho0 = model_state(pairs, unreturned, modulation.angle_for(0), &layout);
    let rho1 = model_state(pairs, unreturned, modulation.angle_for(1), &layout);
    Ok((rho0, rho1))
}

fn model_state(
    pairs: &[PairPrep],
    unreturned: &[usize],
    phase: f64,
    layout: &SystemLayout,
) -> DensityOperator {
    let u = unreturned.len();
    let d = layout.total_dim();
    let twist = C64::from_polar(1.0, phase);
    let marginals: Vec<[[C64; 2]; 2]> = unreturned
        .iter()
        .map(|&l| pairs[l].ancilla_marginal())
        .collect();
    let mut rho = DMatrix::<C64>::zeros(d, d);
    let w = C64::new(1.0 / u as f64, 0.0);
    for (t, &lbar) in unreturned.iter().enumerate() {
        let mut v = pairs[lbar].amps();
        for row in v.iter_mut() {
            row[1] *= twist;
        }
        let shift_t = u - 1 - t;
        for i in 0..d {
            let (ai, ci) = (i >> 1, i & 1);
            for j in 0..d {
                let (aj, cj) = (j >> 1, j & 1);
                let mut z = v[(ai >> shift_t) & 1][ci] * v[(aj >> shift_t) & 1][cj].conj();
                if z == C64::new(0.0, 0.0) {
                    continue;
                }
                for (s, m) in marginals.iter().enumerate() {
                    if s == t {
                        continue;
                    }
                    let sh = u - 1 - s;
                    z *= m[(ai >> sh) & 1][(aj >> sh) & 1];
                }
                rho[(i, j)] += z * w;
            }
        }
    }
    DensityOperator::from_parts_unchecked(layout.clone(), rho)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qlin::circle_state;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn identical_states_give_a_coin_flip() {
        let rho = DensityOperator::maximally_mixed(SystemLayout::single("q", 2).unwrap());
        assert!((helstrom_success(&rho, &rho).unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn orthogonal_states_are_always_told_apart() {
        let a = circle_state("q", 0.0).density();
        let b = circle_state("q", std::f64::consts::PI).density();
        assert!((helstrom_success(&a, &b).unwrap() - 1.0).abs() < 1e-12);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for _ in 0..50 {
            assert_eq!(helstrom_measure(&a, &b, &a, &mut rng).unwrap(), 0);
            assert_eq!(helstrom_measure(&a, &b, &b, &mut rng).unwrap(), 1);
        }
    }

    #[test]
    fn layout_mismatch_is_rejected() {
        let a = DensityOperator::maximally_mixed(SystemLayout::single("a", 2).unwrap());
        let b = DensityOperator::maximally_mixed(SystemLayout::single("b", 2).unwrap());
        assert!(matches!(helstrom_projector(&a, &b), Err(Error::Layout(_))));
    }

    #[test]
    fn model_states_are_density_operators() {
        let pairs = [
            PairPrep::Entangled { theta: 0.2 },
            PairPrep::Entangled { theta: 1.3 },
        ];
        let (r0, r1) = bob_model_states(&pairs, &[0, 1], Modulation::HalfPi).unwrap();
        for r in [&r0, &r1] {
            DensityOperator::new(r.layout().clone(), r.matrix().clone()).unwrap();
        }
        // a single candidate original leaves Bob with orthogonal pure states
        let (s0, s1) = bob_model_states(&pairs, &[1], Modulation::HalfPi).unwrap();
        assert!((trace_distance(&s0, &s1).unwrap() - 2.0).abs() < 1e-12);
    }
}
