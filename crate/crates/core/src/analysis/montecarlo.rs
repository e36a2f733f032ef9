use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::report::SCHEMA_VERSION;
use super::stats::{trial_seed, Estimate};
use crate::adversary::{AliceStrategy, BobStrategy};
use crate::error::{Error, Result};
use crate::protocol::{run_protocol, Outcome, Party, ProtocolConfig};

/// Outcome counts of many independent sessions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonteCarloStats {
    pub schema_version: u32,
    pub n: usize,
    pub seed: u64,
    pub alice: String,
    pub bob: String,
    pub trials: u64,
    pub acceptance: Estimate,
    /// Sessions ending in a detected cheat, by either party.
    pub detection: Estimate,
    pub alice_detected: u64,
    pub bob_detected: u64,
    /// Bob's bit-guess success, when his strategy guesses.
    pub guess: Option<Estimate>,
    /// Mean of Bob's per-session success probability, when he guesses.
    pub mean_guess_probability: Option<f64>,
}

#[derive(Debug, Clone, Copy)]
struct Trial {
    accepted: bool,
    detected: Option<Party>,
    guess: Option<(bool, f64)>,
}

/// Runs `trials` sessions, trial `i` seeded with [`trial_seed`]`(cfg.seed, i)`.
///
/// Trials run in parallel; results are collected in index order before
/// being summed, so the statistics do not depend on scheduling.
pub fn monte_carlo(
    cfg: &ProtocolConfig,
    alice: AliceStrategy,
    bob: BobStrategy,
    trials: u64,
) -> Result<MonteCarloStats> {
    if trials == 0 {
        return Err(Error::Config("at least one trial is needed".into()));
    }
    cfg.validate()?;
    cfg.check_resources(alice.entanglement(cfg))?;
    let results: Vec<Trial> = (0..trials)
        .into_par_iter()
        .map(|i| {
            let trial_cfg = ProtocolConfig {
                seed: trial_seed(cfg.seed, i),
                ..cfg.clone()
            };
            let t = run_protocol(&trial_cfg, alice, bob)?;
            let outcome = t.outcome().expect("sessions run to a terminal record");
            let bit = t.committed_bit();
            Ok(Trial {
                accepted: outcome == Outcome::Accepted,
                detected: match outcome {
                    Outcome::CheatDetected(p) => Some(p),
                    _ => None,
                },
                guess: t.bob_guess().map(|(g, p)| (Some(g) == bit, p)),
            })
        })
        .collect::<Result<_>>()?;

    let count = |f: &dyn Fn(&Trial) -> bool| results.iter().filter(|t| f(t)).count() as u64;
    let accepted = count(&|t| t.accepted);
    let alice_detected = count(&|t| t.detected == Some(Party::Alice));
    let bob_detected = count(&|t| t.detected == Some(Party::Bob));
    let guesses: Vec<(bool, f64)> = results.iter().filter_map(|t| t.guess).collect();
    let (guess, mean_guess_probability) = if guesses.is_empty() {
        (None, None)
    } else {
        let hits = guesses.iter().filter(|g| g.0).count() as u64;
        let mean = guesses.iter().map(|g| g.1).sum::<f64>() / guesses.len() as f64;
        (
            Some(Estimate::from_counts(hits, guesses.len() as u64)),
            Some(mean),
        )
    };
    Ok(MonteCarloStats {
        schema_version: SCHEMA_VERSION,
        n: cfg.n,
        seed: cfg.seed,
        alice: alice.to_string(),
        bob: bob.to_string(),
        trials,
        acceptance: Estimate::from_counts(accepted, trials),
        detection: Estimate::from_counts(alice_detected + bob_detected, trials),
        alice_detected,
        bob_detected,
        guess,
        mean_guess_probability,
    })
}
