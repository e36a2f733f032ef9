//! Honest and cheating strategies for both parties, the Helstrom measurement,
//! and the Uhlmann local unitary behind Alice's entanglement attack.

mod attacks;
mod helstrom;
mod strategy;
mod uhlmann;

pub use attacks::{
    alice_epr_attack_no_checking, alice_epr_attack_with_checking, bob_exact_success,
    bob_fixed_states_attack, bob_registers_after_commit, permutation_attack_residual,
    residual_after_fixing, EprAttack, FixedStateAttack, Residual,
};
pub use helstrom::{bob_model_states, helstrom_measure, helstrom_projector, helstrom_success};
pub use strategy::{AliceStrategy, BobStrategy};
pub use uhlmann::{uhlmann_local_unitary, LocalUnitary, MAX_DENSE_CUT};
