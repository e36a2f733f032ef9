use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::stats::{trial_seed, Estimate};
use crate::error::{Error, Result};
use crate::protocol::PairPrep;
use crate::qlin::circle_state;

/// Chance that Alice names the basis angle of a qubit she received, `1/M`.
///
/// Her qubit is half of an entangled pair, so its reduced state is `I/2`
/// whatever the angle; no measurement beats a blind guess.
pub fn alice_state_guess(grid: usize) -> Result<f64> {
    if grid < 2 {
        return Err(Error::Domain(format!(
            "grid size must be at least 2, got {grid}"
        )));
    }
    Ok(1.0 / grid as f64)
}

/// Optimal guessing probability if Bob had sent the bare pure state
/// `|θ_m⟩` instead: `min(1, 2/M)`, reached by the covariant measurement.
pub fn pure_state_guess(grid: usize) -> Result<f64> {
    alice_state_guess(grid)?;
    Ok((2.0 / grid as f64).min(1.0))
}

/// Alice measures the qubit she received with the covariant POVM
/// `{(2/M)|θ_j⟩⟨θ_j|}` and names the outcome. With `entangled` the qubit is
/// half of the prescribed pair; otherwise it is the bare `|θ_m⟩`.
pub fn alice_guess_experiment(
    grid: usize,
    entangled: bool,
    trials: u64,
    seed: u64,
) -> Result<Estimate> {
    alice_state_guess(grid)?;
    let step = 2.0 * std::f64::consts::PI / grid as f64;
    let hits: u64 = (0..trials)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(trial_seed(seed, i));
            let m = rng.random_range(0..grid);
            let theta = step * m as f64;
            let pair = if entangled {
                PairPrep::Entangled { theta }
            } else {
                PairPrep::Product {
                    ancilla: 0,
                    angle: theta,
                }
            };
            let rho = pair.state("a", "q").reduced(&["q"]).expect("pair has q");
            let probs: Vec<f64> = (0..grid)
                .map(|j| {
                    let v = circle_state("q", step * j as f64);
                    let a = v.amplitudes();
                    2.0 / grid as f64 * (a.adjoint() * rho.matrix() * a)[(0, 0)].re
                })
                .collect();
            let u: f64 = rng.random();
            let mut acc = 0.0;
            let mut guess = grid - 1;
            for (j, p) in probs.iter().enumerate() {
                acc += p;
                if u < acc {
                    guess = j;
                    break;
                }
            }
            u64::from(guess == m)
        })
        .sum();
    Ok(Estimate::from_counts(hits, trials))
}
