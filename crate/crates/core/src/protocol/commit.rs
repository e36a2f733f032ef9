use std::collections::BTreeMap;

use nalgebra::DVector;
use rand::Rng;

use super::arrangement::Arrangements;
use super::config::{EntanglementMode, Modulation};
use super::prep::{BobPreparation, PairPrep};
use super::{bob_anc, qubit, Party, ALICE_ANC};
use crate::error::{Error, Result};
use crate::qlin::{StateVector, SystemLayout, C64};

/// `alice_anc, bob_anc0.., q0..` — the register order of every session state.
pub fn global_layout(n: usize, ancilla_dim: usize) -> SystemLayout {
    SystemLayout::new(
        std::iter::once((ALICE_ANC.to_string(), ancilla_dim))
            .chain((0..n).map(|l| (bob_anc(l), 2)))
            .chain((0..n).map(|p| (qubit(p), 2))),
    )
    .expect("session layout")
}

/// `Σ_k w_k |k⟩ ⊗ (pairs arranged by label k)`, with `R(phase)` on slot 0.
///
/// `branches` lists `(label, weight)`; the weights must be normalized.
pub(crate) fn arranged_state(
    pairs: &[PairPrep],
    arrangements: &Arrangements,
    branches: &[(usize, C64)],
    phase: f64,
) -> StateVector {
    let n = pairs.len();
    let layout = global_layout(n, arrangements.len());
    let half = 1usize << n;
    let block = half * half;
    let amps: Vec<[[C64; 2]; 2]> = pairs.iter().map(PairPrep::amps).collect();
    let twist = C64::from_polar(1.0, phase);
    let mut out = DVector::<C64>::zeros(layout.total_dim());
    for &(k, w) in branches {
        let slots = arrangements.slots(k);
        // bit shift of each original's ancilla and of the slot it occupies
        let placed: Vec<(usize, usize, usize)> = slots
            .iter()
            .enumerate()
            .map(|(p, &l)| (l, n - 1 - l, n - 1 - p))
            .collect();
        let base = k * block;
        for a in 0..half {
            for q in 0..half {
                let mut z = w;
                for &(l, a_shift, q_shift) in &placed {
                    z *= amps[l][(a >> a_shift) & 1][(q >> q_shift) & 1];
                    if z == C64::new(0.0, 0.0) {
                        break;
                    }
                }
                if (q >> (n - 1)) & 1 == 1 {
                    z *= twist;
                }
                out[base + a * half + q] = z;
            }
        }
    }
    StateVector::from_parts_unchecked(layout, out)
}

/// Uniform weights over `labels`.
pub(crate) fn uniform_branches(labels: &[usize]) -> Vec<(usize, C64)> {
    let w = C64::new(1.0 / (labels.len() as f64).sqrt(), 0.0);
    labels.iter().map(|&k| (k, w)).collect()
}

/// The joint state right after Alice commits.
#[derive(Debug, Clone)]
pub struct CommitmentState {
    pub global_state: StateVector,
    pub bit: u8,
    pub mode: EntanglementMode,
    pub arrangements: Arrangements,
    /// Labels Alice's ancilla may still be found in.
    pub support: Vec<usize>,
    pub holders: BTreeMap<String, Party>,
}

impl CommitmentState {
    pub fn n(&self) -> usize {
        self.arrangements.n()
    }

    /// The label, when Alice's ancilla holds a definite one.
    pub fn definite_label(&self) -> Option<usize> {
        (self.support.len() == 1).then(|| self.support[0])
    }
}

/// Step 2: Alice entangles the received qubits with her ancilla, applies
/// `U_bit` to slot 0 and hands that qubit to Bob.
///
/// `PreMeasured` draws a single shift and keeps it as a classical record in
/// the ancilla register.
pub fn alice_commit<R: Rng + ?Sized>(
    prep: &BobPreparation,
    bit: u8,
    mode: EntanglementMode,
    modulation: Modulation,
    rng: &mut R,
) -> Result<CommitmentState> {
    if bit > 1 {
        return Err(Error::Domain(format!(
            "committed bit must be 0 or 1, got {bit}"
        )));
    }
    let n = prep.n();
    let arrangements = Arrangements::for_mode(mode, n);
    let support: Vec<usize> = match mode {
        EntanglementMode::PreMeasured => vec![rng.random_range(0..n)],
        _ => (0..arrangements.len()).collect(),
    };
    let global_state = arranged_state(
        &prep.pairs,
        &arrangements,
        &uniform_branches(&support),
        modulation.angle_for(bit),
    );
    let mut holders = BTreeMap::new();
    holders.insert(ALICE_ANC.to_string(), Party::Alice);
    for l in 0..n {
        holders.insert(bob_anc(l), Party::Bob);
        holders.insert(qubit(l), Party::Alice);
    }
    holders.insert(qubit(0), Party::Bob);
    Ok(CommitmentState {
        global_state,
        bit,
        mode,
        arrangements,
        support,
        holders,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::protocol::prep::bob_prepare;
    use crate::protocol::ProtocolConfig;
    use crate::qlin::{max_abs, schmidt};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn commit(
        n: usize,
        mode: EntanglementMode,
        bit: u8,
        seed: u64,
    ) -> (BobPreparation, CommitmentState) {
        let cfg = ProtocolConfig::with_n(n);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let prep = bob_prepare(&cfg, &mut rng);
        let c = alice_commit(&prep, bit, mode, Modulation::HalfPi, &mut rng).unwrap();
        (prep, c)
    }

    #[test]
    fn identity_arrangement_reproduces_the_preparation() {
        let (prep, c) = commit(3, EntanglementMode::PreMeasured, 0, 11);
        let k = c.definite_label().unwrap();
        let (_, rest) = c
            .global_state
            .contract(&StateVector::basis(SystemLayout::single(ALICE_ANC, 3).unwrap(), k).unwrap())
            .unwrap();
        let rest = rest.unwrap();
        // undo U_0 on slot 0 and compare with the arranged pairs
        let undone = rest.apply(&["q0"], &Modulation::HalfPi.unitary(1)).unwrap();
        let l = c.arrangements.committed_original(k);
        let pair = prep.pairs[l].state(&bob_anc(l), "q0");
        let (p, _) = undone.contract(&pair).unwrap();
        assert!((p - 1.0).abs() < 1e-12);
    }

    #[test]
    fn cyclic_commitment_has_uniform_ancilla_diagonal_and_full_schmidt_rank() {
        let (_, c) = commit(3, EntanglementMode::Cyclic, 1, 5);
        let rho = c.global_state.reduced(&[ALICE_ANC]).unwrap();
        for k in 0..3 {
            assert!((rho.matrix()[(k, k)].re - 1.0 / 3.0).abs() < 1e-12);
        }
        let sd = schmidt(&c.global_state, &[ALICE_ANC]).unwrap();
        assert_eq!(sd.rank(1e-10), 3);
    }

    #[test]
    fn committed_qubit_alone_is_maximally_mixed() {
        for mode in [
            EntanglementMode::Cyclic,
            EntanglementMode::Permutation,
            EntanglementMode::PreMeasured,
        ] {
            let (_, c) = commit(3, mode, 0, 2);
            let rho = c.global_state.reduced(&["q0"]).unwrap();
            let expect = nalgebra::DMatrix::from_diagonal_element(2, 2, C64::new(0.5, 0.0));
            assert!(max_abs(&(rho.matrix() - expect)) < 1e-10, "{mode:?}");
        }
    }

    #[test]
    fn invalid_bit_is_rejected() {
        let cfg = ProtocolConfig::with_n(2);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let prep = bob_prepare(&cfg, &mut rng);
        assert!(matches!(
            alice_commit(
                &prep,
                2,
                EntanglementMode::Cyclic,
                Modulation::HalfPi,
                &mut rng
            ),
            Err(Error::Domain(_))
        ));
    }
}
