//! Sweeps, bound checks and Monte Carlo estimates built on the simulator.

mod binding;
mod concealing;
mod guess;
mod montecarlo;
mod report;
mod stats;

pub use binding::{binding_bounds_check, check_pair, eq5_bounds, BindingCheck, EQ5_SLACK};
pub use concealing::{
    bob_optimal_cheat, concealing_scaling, counting_bound, exact_trace_distance,
    honest_commitments, post_check_trace_distance, ConcealingRow, SCALING_TOL,
};
pub use guess::{alice_guess_experiment, alice_state_guess, pure_state_guess};
pub use montecarlo::{monte_carlo, MonteCarloStats};
pub use report::{
    read_jsonl, render_table, security_report, write_table, Format, PassFlags, SecurityReport,
    AGREEMENT_SIGMAS, SCHEMA_VERSION,
};
pub use stats::{trial_seed, Estimate};
