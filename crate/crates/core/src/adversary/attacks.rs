use serde::{Deserialize, Serialize};

use super::helstrom::{bob_model_states, helstrom_success};
use super::strategy::{AliceStrategy, BobStrategy};
use super::uhlmann::uhlmann_local_unitary;
use crate::error::{Error, Result};
use crate::protocol::{
    alice_commit, bob_anc, bob_prepare, qubit, Arrangements, EntanglementMode, Modulation,
    PairPrep, ProtocolConfig, Session, SessionOptions, ALICE_ANC,
};
use crate::qlin::{circle_state, fidelity, luders_project, trace_distance, Projector};

/// Outcome of Alice's entanglement attack in one configuration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EprAttack {
    pub n: usize,
    /// `‖ρ₀ − ρ₁‖₁` of Bob's states at the moment he would measure.
    pub trace_distance: f64,
    /// Bob's optimal guessing probability on those states.
    pub p_b: f64,
    /// `F(ρ₀, ρ₁)` on Bob's side.
    pub fidelity: f64,
    /// Overlap reached by the local unitary.
    pub overlap: f64,
    /// Probability that Bob accepts the flipped opening.
    pub p_a: f64,
}

fn attack(cfg: &ProtocolConfig, fraction_check: bool) -> Result<EprAttack> {
    let cfg = ProtocolConfig {
        fraction_check,
        eq8_check: false,
        ..cfg.clone()
    };
    let mut s = Session::new(
        cfg.clone(),
        AliceStrategy::uhlmann(1)?,
        BobStrategy::Honest,
        SessionOptions::default(),
    )?;
    s.prepare()?;
    s.audit()?;
    s.commit()?;
    if fraction_check && !s.fraction_check()? {
        return Err(Error::Domain(
            "an honest check failed during the attack".into(),
        ));
    }

    // Bob's exact states: everything he holds, for either committed bit.
    let state = s.global_state().expect("committed").clone();
    let m = cfg.modulation;
    let other = state.apply(
        &[qubit(0)],
        &crate::qlin::rotation(m.angle_for(1) - m.angle_for(0)),
    )?;
    let bob_regs = s.held_by(crate::protocol::Party::Bob);
    let alice_regs = s.held_by(crate::protocol::Party::Alice);
    let rho0 = state.reduced(&bob_regs)?;
    let rho1 = other.reduced(&bob_regs)?;
    let td = trace_distance(&rho0, &rho1)?;
    let f = fidelity(&rho0, &rho1)?;
    let overlap = uhlmann_local_unitary(&state, &other, &alice_regs)?.overlap();

    s.open()?;
    s.verify()?;
    let p_a = s
        .transcript()
        .verification_probability()
        .expect("verification ran");
    Ok(EprAttack {
        n: cfg.n,
        trace_distance: td,
        p_b: (2.0 + td) / 4.0,
        fidelity: f,
        overlap,
        p_a,
    })
}

/// Commit to 0, apply the Uhlmann unitary on everything Alice holds, open
/// as 1 — with no check in between.
pub fn alice_epr_attack_no_checking(cfg: &ProtocolConfig) -> Result<EprAttack> {
    attack(cfg, false)
}

/// The same attack after a completed fraction-λ check.
pub fn alice_epr_attack_with_checking(cfg: &ProtocolConfig) -> Result<EprAttack> {
    attack(cfg, true)
}

/// Bob's fixed-state attack against a checking Alice.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FixedStateAttack {
    /// Helstrom success on `U₀|θ⟩` versus `U₁|θ⟩`.
    pub guess_success: f64,
    /// Chance that one audited pair fails the projection onto the claimed pair.
    pub detection_per_pair: f64,
    /// Chance that at least one of the configured audit pairs fails.
    pub detection: f64,
}

pub fn bob_fixed_states_attack(cfg: &ProtocolConfig, angle: f64) -> Result<FixedStateAttack> {
    let m = cfg.modulation;
    let psi = circle_state("q", angle);
    let s0 = psi.apply(&["q"], &m.unitary(0))?.density();
    let s1 = psi.apply(&["q"], &m.unitary(1))?.density();
    let guess_success = helstrom_success(&s0, &s1)?;
    let sent = PairPrep::Product { ancilla: 0, angle }.state("a", "q");
    let claimed = PairPrep::Entangled { theta: angle }.state("a", "q");
    let pass = sent.overlap(&claimed)?.powi(2);
    Ok(FixedStateAttack {
        guess_success,
        detection_per_pair: 1.0 - pass,
        detection: 1.0 - pass.powi(cfg.audit_pairs as i32),
    })
}

/// What is left of Alice's entanglement once some originals are fixed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Residual {
    pub n: usize,
    pub fixed: usize,
    /// Number of ancilla labels compatible with the fixed positions.
    pub residual_dim: usize,
    /// Uhlmann overlap between the two bits' post-check states.
    pub overlap: f64,
}

/// Lüders-projects Alice's ancilla onto the labels that put the `checked`
/// originals where a reference label puts them, then measures how much
/// bit-flipping power survives.
///
/// The reference label is the first one whose committed original is not
/// checked (any label when every original is checked).
pub fn residual_after_fixing(
    cfg: &ProtocolConfig,
    mode: EntanglementMode,
    checked: &[usize],
) -> Result<Residual> {
    cfg.check_resources(mode)?;
    let n = cfg.n;
    if let Some(&bad) = checked.iter().find(|&&l| l >= n) {
        return Err(Error::Domain(format!(
            "position {bad} out of range for n = {n}"
        )));
    }
    let mut rng = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(cfg.seed);
    let prep = bob_prepare(cfg, &mut rng);
    let mode = if mode == EntanglementMode::PreMeasured {
        EntanglementMode::Cyclic
    } else {
        mode
    };
    let c0 = alice_commit(&prep, 0, mode, cfg.modulation, &mut rng)?;
    let c1 = alice_commit(&prep, 1, mode, cfg.modulation, &mut rng)?;
    let arr: &Arrangements = &c0.arrangements;

    let reference = (0..arr.len())
        .find(|&k| !checked.contains(&arr.committed_original(k)))
        .unwrap_or(0);
    let key: Vec<usize> = checked.iter().map(|&l| arr.slot_of(reference, l)).collect();
    let labels: Vec<usize> = (0..arr.len())
        .filter(|&k| {
            checked
                .iter()
                .map(|&l| arr.slot_of(k, l))
                .eq(key.iter().copied())
        })
        .collect();
    let anc = c0.global_state.layout().subset(&[ALICE_ANC])?;
    let proj = Projector::basis(anc, labels.iter().copied())?;
    let (_, post0) = luders_project(&c0.global_state, &proj)?;
    let (_, post1) = luders_project(&c1.global_state, &proj)?;

    let returned_slots: Vec<usize> = key.clone();
    let alice_cut: Vec<String> = std::iter::once(ALICE_ANC.to_owned())
        .chain((1..n).filter(|p| !returned_slots.contains(p)).map(qubit))
        .collect();
    let overlap = uhlmann_local_unitary(&post0, &post1, &alice_cut)?.overlap();
    Ok(Residual {
        n,
        fixed: checked.len(),
        residual_dim: labels.len(),
        overlap,
    })
}

/// [`residual_after_fixing`] for full-permutation entanglement (`n ≤ 6`).
pub fn permutation_attack_residual(cfg: &ProtocolConfig, checked: &[usize]) -> Result<Residual> {
    residual_after_fixing(cfg, EntanglementMode::Permutation, checked)
}

/// Bob's optimal guessing probability with no check and `n` candidates,
/// computed on his exact states for one honest preparation.
pub fn bob_exact_success(pairs: &[PairPrep], modulation: Modulation) -> Result<f64> {
    let all: Vec<usize> = (0..pairs.len()).collect();
    let (r0, r1) = bob_model_states(pairs, &all, modulation)?;
    helstrom_success(&r0, &r1)
}

/// Names of the registers Bob holds right after committing.
pub fn bob_registers_after_commit(n: usize) -> Vec<String> {
    (0..n)
        .map(bob_anc)
        .chain(std::iter::once(qubit(0)))
        .collect()
}
