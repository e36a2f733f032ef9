use nalgebra::DVector;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::config::ProtocolConfig;
use super::{bob_anc, qubit};
use crate::qlin::{circle_state, StateVector, SystemLayout, C64};

/// State of one (ancilla, travelling qubit) pair as Bob actually prepared it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PairPrep {
    /// `(|0⟩|θ⟩ + |1⟩|θ+π⟩)/√2`, the prescribed preparation.
    Entangled { theta: f64 },
    /// `|ancilla⟩|angle⟩`, no entanglement.
    Product { ancilla: u8, angle: f64 },
}

impl PairPrep {
    /// Amplitudes indexed `[ancilla][qubit]`.
    pub fn amps(&self) -> [[C64; 2]; 2] {
        let zero = C64::new(0.0, 0.0);
        match *self {
            Self::Entangled { theta } => {
                let h = std::f64::consts::FRAC_1_SQRT_2;
                let a = circle_state("q", theta);
                let b = circle_state("q", theta + std::f64::consts::PI);
                [
                    [a.amplitudes()[0] * h, a.amplitudes()[1] * h],
                    [b.amplitudes()[0] * h, b.amplitudes()[1] * h],
                ]
            }
            Self::Product { ancilla, angle } => {
                let q = circle_state("q", angle);
                let row = [q.amplitudes()[0], q.amplitudes()[1]];
                if ancilla == 0 {
                    [row, [zero, zero]]
                } else {
                    [[zero, zero], row]
                }
            }
        }
    }

    /// The pair as a two-register state `ancilla ⊗ qubit`.
    pub fn state(&self, ancilla: &str, qubit: &str) -> StateVector {
        let layout =
            SystemLayout::new([(ancilla, 2), (qubit, 2)]).expect("distinct pair registers");
        let a = self.amps();
        let amps = DVector::from_vec(vec![a[0][0], a[0][1], a[1][0], a[1][1]]);
        StateVector::new(layout, amps).expect("pair states are normalized")
    }

    /// Reduced state of the ancilla alone, as a 2×2 matrix.
    pub fn ancilla_marginal(&self) -> [[C64; 2]; 2] {
        let a = self.amps();
        let mut m = [[C64::new(0.0, 0.0); 2]; 2];
        for (i, row) in m.iter_mut().enumerate() {
            for (j, entry) in row.iter_mut().enumerate() {
                *entry = a[i][0] * a[j][0].conj() + a[i][1] * a[j][1].conj();
            }
        }
        m
    }
}

/// How Bob prepares the pairs he sends.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum PrepKind {
    Honest,
    /// Every qubit is `circle_state(angle)`, ancillas left in `|0⟩`.
    Fixed {
        angle: f64,
    },
    /// Ancilla `|j⟩` and qubit `|θ + jπ⟩` for a random `j`: the classical mixture
    /// with the same qubit marginal as the entangled pair.
    Unentangled,
}

/// Everything Bob prepares in step 1.
#[derive(Debug, Clone)]
pub struct BobPreparation {
    /// Grid indices `m` of the basis angles `2πm/M`.
    pub angle_indices: Vec<usize>,
    /// The basis choice `j` where Bob fixed one; `None` for entangled pairs.
    pub choices: Vec<Option<u8>>,
    /// What was actually prepared.
    pub pairs: Vec<PairPrep>,
    /// What the protocol says should have been prepared.
    pub claimed: Vec<PairPrep>,
    /// Extra pairs handed over for Alice's audit: (actual, claimed).
    pub audit: Vec<(PairPrep, PairPrep)>,
    /// The `n` pairs as one state over `bob_anc*` then `q*`.
    pub global_state: StateVector,
}

impl BobPreparation {
    pub fn n(&self) -> usize {
        self.pairs.len()
    }
}

/// Honest preparation: every pair entangled, angles uniform on the grid.
pub fn bob_prepare<R: Rng + ?Sized>(cfg: &ProtocolConfig, rng: &mut R) -> BobPreparation {
    prepare_with(cfg, PrepKind::Honest, rng)
}

pub fn prepare_with<R: Rng + ?Sized>(
    cfg: &ProtocolConfig,
    kind: PrepKind,
    rng: &mut R,
) -> BobPreparation {
    let draw = |rng: &mut R| -> (usize, Option<u8>, PairPrep, PairPrep) {
        let m = rng.random_range(0..cfg.grid);
        let theta = cfg.grid_angle(m);
        match kind {
            PrepKind::Honest => (
                m,
                None,
                PairPrep::Entangled { theta },
                PairPrep::Entangled { theta },
            ),
            PrepKind::Fixed { angle } => (
                m,
                Some(0),
                PairPrep::Product { ancilla: 0, angle },
                PairPrep::Entangled { theta: angle },
            ),
            PrepKind::Unentangled => {
                let j: u8 = rng.random_range(0..2);
                let angle = theta + j as f64 * std::f64::consts::PI;
                (
                    m,
                    Some(j),
                    PairPrep::Product { ancilla: j, angle },
                    PairPrep::Entangled { theta },
                )
            }
        }
    };

    let mut angle_indices = Vec::with_capacity(cfg.n);
    let mut choices = Vec::with_capacity(cfg.n);
    let mut pairs = Vec::with_capacity(cfg.n);
    let mut claimed = Vec::with_capacity(cfg.n);
    for _ in 0..cfg.n {
        let (m, j, actual, claim) = draw(rng);
        angle_indices.push(m);
        choices.push(j);
        pairs.push(actual);
        claimed.push(claim);
    }
    let audit = (0..cfg.audit_pairs)
        .map(|_| {
            let (_, _, actual, claim) = draw(rng);
            (actual, claim)
        })
        .collect();
    let global_state = pairs_state(&pairs);
    BobPreparation {
        angle_indices,
        choices,
        pairs,
        claimed,
        audit,
        global_state,
    }
}

/// `⊗_l pair_l` laid out as `bob_anc0..bob_anc{n-1}, q0..q{n-1}`.
pub fn pairs_state(pairs: &[PairPrep]) -> StateVector {
    let n = pairs.len();
    let layout = SystemLayout::new(
        (0..n)
            .map(|l| (bob_anc(l), 2))
            .chain((0..n).map(|l| (qubit(l), 2))),
    )
    .expect("pair layout");
    let amps_by_pair: Vec<_> = pairs.iter().map(PairPrep::amps).collect();
    let half = 1usize << n;
    let amps = DVector::from_fn(half * half, |idx, _| {
        let (a, q) = (idx / half, idx % half);
        let mut z = C64::new(1.0, 0.0);
        for (l, p) in amps_by_pair.iter().enumerate() {
            let shift = n - 1 - l;
            z *= p[(a >> shift) & 1][(q >> shift) & 1];
        }
        z
    });
    StateVector::new(layout, amps).expect("product of normalized pairs")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qlin::max_abs;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn entangled_pair_has_maximally_mixed_marginals() {
        let p = PairPrep::Entangled { theta: 0.7 };
        let s = p.state("a", "q");
        for reg in ["a", "q"] {
            let rho = s.reduced(&[reg]).unwrap();
            let expect = nalgebra::DMatrix::from_diagonal_element(2, 2, C64::new(0.5, 0.0));
            assert!(max_abs(&(rho.matrix() - expect)) < 1e-12);
        }
    }

    #[test]
    fn honest_preparation_n2() {
        let cfg = ProtocolConfig::with_n(2);
        let prep = bob_prepare(&cfg, &mut ChaCha8Rng::seed_from_u64(1));
        assert_eq!(prep.global_state.layout().len(), 4);
        assert!((prep.global_state.norm() - 1.0).abs() < 1e-12);
        let travel = prep.global_state.reduced(&["q0", "q1"]).unwrap();
        let expect = nalgebra::DMatrix::from_diagonal_element(4, 4, C64::new(0.25, 0.0));
        assert!(max_abs(&(travel.matrix() - expect)) < 1e-10);
    }

    #[test]
    fn unentangled_pairs_mimic_the_qubit_marginal_only() {
        let cfg = ProtocolConfig::with_n(2);
        let prep = prepare_with(
            &cfg,
            PrepKind::Unentangled,
            &mut ChaCha8Rng::seed_from_u64(3),
        );
        for (l, p) in prep.pairs.iter().enumerate() {
            let s = p.state("a", "q");
            let j = prep.choices[l].unwrap() as usize;
            assert!((s.reduced(&["a"]).unwrap().matrix()[(j, j)].re - 1.0).abs() < 1e-12);
        }
    }
}
