use serde::{Deserialize, Serialize};

use crate::adversary::{AliceStrategy, BobStrategy};
use crate::error::Result;
use crate::protocol::{
    bob_anc, qubit, EntanglementMode, ProtocolConfig, Session, SessionOptions, ALICE_ANC,
};
use crate::qlin::{luders_project, rotation, trace_distance, Projector, StateVector};

/// One row of the concealing sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConcealingRow {
    pub n: usize,
    /// `‖ρ₀ − ρ₁‖₁` on Bob's registers right after the commitment.
    pub trace_distance: f64,
    /// The closed form `2/n`.
    pub two_over_n: f64,
    /// Whether the two agree within [`SCALING_TOL`].
    pub matches: bool,
    /// `‖ρ₀ − ρ₁‖₁` after a completed fraction check, averaged over
    /// whether the request contained the committed original.
    pub post_check_trace_distance: f64,
}

pub const SCALING_TOL: f64 = 1e-9;

/// The two honest commitment states (bit 0 and bit 1) for one preparation
/// under `cfg`, before any check.
///
/// Both come from the same preparation and arrangement draw, so the only
/// difference is the modulation of the committed qubit.
pub fn honest_commitments(cfg: &ProtocolConfig) -> Result<(StateVector, StateVector)> {
    let cfg = ProtocolConfig {
        alice_entanglement: EntanglementMode::Cyclic,
        ..cfg.clone()
    };
    let mut s = Session::new(
        cfg.clone(),
        AliceStrategy::Honest,
        BobStrategy::Honest,
        SessionOptions {
            bit: Some(0),
            ..Default::default()
        },
    )?;
    s.prepare()?;
    s.audit()?;
    s.commit()?;
    let psi0 = s.global_state().expect("committed").clone();
    let m = cfg.modulation;
    let psi1 = psi0.apply(&[qubit(0)], &rotation(m.angle_for(1) - m.angle_for(0)))?;
    Ok((psi0, psi1))
}

/// Bob's registers after the commitment: every ancilla and the committed qubit.
fn bob_registers(n: usize) -> Vec<String> {
    (0..n)
        .map(bob_anc)
        .chain(std::iter::once(qubit(0)))
        .collect()
}

/// Exact `‖ρ₀ − ρ₁‖₁` of Bob's states right after an honest commitment.
pub fn exact_trace_distance(cfg: &ProtocolConfig) -> Result<f64> {
    cfg.check_resources(EntanglementMode::Cyclic)?;
    let (psi0, psi1) = honest_commitments(cfg)?;
    let regs = bob_registers(cfg.n);
    trace_distance(&psi0.reduced(&regs)?, &psi1.reduced(&regs)?)
}

/// Exact `‖ρ₀ − ρ₁‖₁` of Bob's states once the fraction check has run, with
/// Bob requesting originals `0..f`.
///
/// Bob learns whether his request contained the committed original, so the
/// result is the average over both answers. Within one answer Alice's
/// further ancilla measurement is invisible to Bob, and the qubits she
/// returns sit in pure pairs with their ancillas that are the same for
/// either bit; Bob's distinguishing power therefore lives entirely on the
/// ancillas of the unreturned originals and the committed qubit.
pub fn post_check_trace_distance(cfg: &ProtocolConfig) -> Result<f64> {
    cfg.check_resources(EntanglementMode::Cyclic)?;
    let n = cfg.n;
    let f = cfg.checked_count();
    let (psi0, psi1) = honest_commitments(cfg)?;
    let arr = crate::protocol::Arrangements::cyclic(n);
    let anc = psi0.layout().subset(&[ALICE_ANC])?;

    let mut total = 0.0;
    for contains in [false, true] {
        let labels: Vec<usize> = (0..arr.len())
            .filter(|&k| (arr.committed_original(k) < f) == contains)
            .collect();
        if labels.is_empty() {
            continue;
        }
        let unreturned: Vec<usize> = (0..n).filter(|&l| (l < f) == contains).collect();
        let regs: Vec<String> = unreturned
            .iter()
            .map(|&l| bob_anc(l))
            .chain(std::iter::once(qubit(0)))
            .collect();
        let proj = Projector::basis(anc.clone(), labels)?;
        let (p, post0) = luders_project(&psi0, &proj)?;
        let (_, post1) = luders_project(&psi1, &proj)?;
        total += p * trace_distance(&post0.reduced(&regs)?, &post1.reduced(&regs)?)?;
    }
    Ok(total)
}

/// Bob-side trace distance against `2/n` for each `n`, plus its value after
/// a completed check.
pub fn concealing_scaling(base: &ProtocolConfig, n_values: &[usize]) -> Result<Vec<ConcealingRow>> {
    n_values
        .iter()
        .map(|&n| {
            let cfg = ProtocolConfig { n, ..base.clone() };
            cfg.validate()?;
            let td = exact_trace_distance(&cfg)?;
            let two_over_n = 2.0 / n as f64;
            Ok(ConcealingRow {
                n,
                trace_distance: td,
                two_over_n,
                matches: (td - two_over_n).abs() <= SCALING_TOL,
                post_check_trace_distance: post_check_trace_distance(&cfg)?,
            })
        })
        .collect()
}

/// `(2 + ‖ρ₀ − ρ₁‖₁)/4` on the exact post-commitment states.
pub fn bob_optimal_cheat(cfg: &ProtocolConfig) -> Result<f64> {
    Ok((2.0 + exact_trace_distance(cfg)?) / 4.0)
}

/// `1/2 + 1/(2n)`: what Bob's optimum would be if `‖ρ₀ − ρ₁‖₁ = 2/n`.
pub fn counting_bound(n: usize) -> f64 {
    0.5 + 0.5 / n as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::adversary::bob_model_states;
    use crate::protocol::Modulation;

    #[test]
    fn exact_states_match_bobs_model() {
        for n in [2, 3, 4] {
            let cfg = ProtocolConfig {
                seed: 5,
                ..ProtocolConfig::with_n(n)
            };
            let td = exact_trace_distance(&cfg).unwrap();
            let mut s = Session::new(
                cfg.clone(),
                AliceStrategy::Honest,
                BobStrategy::Honest,
                SessionOptions::default(),
            )
            .unwrap();
            s.prepare().unwrap();
            let all: Vec<usize> = (0..n).collect();
            let (r0, r1) =
                bob_model_states(&s.preparation().unwrap().pairs, &all, cfg.modulation).unwrap();
            assert!(
                (trace_distance(&r0, &r1).unwrap() - td).abs() < 1e-10,
                "n = {n}"
            );
        }
    }

    #[test]
    fn trace_distance_does_not_depend_on_the_draw() {
        let a = exact_trace_distance(&ProtocolConfig {
            seed: 1,
            ..ProtocolConfig::with_n(3)
        })
        .unwrap();
        let b = exact_trace_distance(&ProtocolConfig {
            seed: 99,
            ..ProtocolConfig::with_n(3)
        })
        .unwrap();
        assert!((a - b).abs() < 1e-10);
    }

    #[test]
    fn two_qubits_with_half_pi_modulation() {
        // |Ψ_b⟩ over two pairs: Bob's states are an equal mixture of two
        // pure states each, with ‖ρ₀ − ρ₁‖₁ = √2.
        let td = exact_trace_distance(&ProtocolConfig::with_n(2)).unwrap();
        assert!((td - std::f64::consts::SQRT_2).abs() < 1e-10);
    }

    #[test]
    fn post_check_equals_the_model_on_the_unreturned_originals() {
        let cfg = ProtocolConfig::with_n(4);
        let post = post_check_trace_distance(&cfg).unwrap();
        let reduced = exact_trace_distance(&ProtocolConfig::with_n(2)).unwrap();
        assert!((post - reduced).abs() < 1e-10);
    }

    #[test]
    fn quarter_pi_is_less_distinguishable() {
        let half = exact_trace_distance(&ProtocolConfig::with_n(3)).unwrap();
        let quarter = exact_trace_distance(&ProtocolConfig {
            modulation: Modulation::QuarterPi,
            ..ProtocolConfig::with_n(3)
        })
        .unwrap();
        assert!(quarter < half);
    }

    #[test]
    fn counting_bound_values() {
        assert_eq!(counting_bound(4), 0.625);
        assert_eq!(counting_bound(10), 0.55);
    }
}
