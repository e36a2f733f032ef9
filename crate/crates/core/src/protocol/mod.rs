//! The QBC1 session: Bob's preparation, Alice's entangled commitment, the
//! fraction-λ check, the ancilla check of the cyclic entanglement, opening
//! and verification.
//!
//! Every session state lives on the register layout
//! `alice_anc, bob_anc0..bob_anc{n-1}, q0..q{n-1}`, where `q{p}` is the qubit
//! at slot `p` of Alice's arrangement and `q0` is the committed qubit. Which
//! party holds which register is tracked alongside the state and written to
//! the transcript.

mod arrangement;
mod commit;
mod config;
mod prep;
mod session;
mod transcript;

pub use arrangement::Arrangements;
pub use commit::{alice_commit, global_layout, CommitmentState};
pub use config::{
    EntanglementMode, Fraction, Modulation, ProtocolConfig, MAX_CYCLIC_N, MAX_PERMUTATION_N,
};
pub use prep::{bob_prepare, pairs_state, prepare_with, BobPreparation, PairPrep, PrepKind};
pub use session::{run_protocol, Eq8Return, Session, SessionOptions, Stage};
pub use transcript::{Outcome, Record, Transcript};

use serde::{Deserialize, Serialize};

/// Name of Alice's position ancilla.
pub const ALICE_ANC: &str = "alice_anc";

/// Bob's ancilla entangled with original qubit `l`.
pub fn bob_anc(l: usize) -> String {
    format!("bob_anc{l}")
}

/// The qubit register at slot `p`.
pub fn qubit(p: usize) -> String {
    format!("q{p}")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Party {
    Alice,
    Bob,
}
