use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// A binomial rate with its normal-approximation standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub successes: u64,
    pub trials: u64,
    pub rate: f64,
    pub stderr: f64,
}

impl Estimate {
    pub fn from_counts(successes: u64, trials: u64) -> Self {
        let rate = if trials == 0 {
            0.0
        } else {
            successes as f64 / trials as f64
        };
        let stderr = if trials == 0 {
            0.0
        } else {
            (rate * (1.0 - rate) / trials as f64).sqrt()
        };
        Self {
            successes,
            trials,
            rate,
            stderr,
        }
    }

    /// Whether `value` lies within `sigmas` standard errors of the rate.
    ///
    /// A rate of exactly 0 or 1 has zero stderr; the band is then widened to
    /// the stderr `value` itself would produce, so a true rate of 0.999 is not
    /// rejected by a lucky all-success run.
    pub fn agrees_with(&self, value: f64, sigmas: f64) -> bool {
        let model = (value * (1.0 - value) / self.trials.max(1) as f64).sqrt();
        (self.rate - value).abs() <= sigmas * self.stderr.max(model) + 1e-12
    }
}

/// Seed of Monte Carlo trial `index` under base seed `seed`.
///
/// Drawn from a dedicated ChaCha stream at a position fixed by the index,
/// so it does not depend on how trials are scheduled.
pub fn trial_seed(seed: u64, index: u64) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(3);
    rng.set_word_pos(2 * index as u128);
    rng.next_u64()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stderr_of_a_fair_coin() {
        let e = Estimate::from_counts(50, 100);
        assert!((e.stderr - 0.05).abs() < 1e-15);
        assert!(e.agrees_with(0.6, 2.0));
        assert!(!e.agrees_with(0.7, 2.0));
    }

    #[test]
    fn certain_rates() {
        let e = Estimate::from_counts(1000, 1000);
        assert_eq!(e.stderr, 0.0);
        assert!(e.agrees_with(1.0, 5.0));
        assert!(!e.agrees_with(0.9, 5.0));
    }

    #[test]
    fn trial_seeds_are_stable_and_distinct() {
        let a: Vec<u64> = (0..64).map(|i| trial_seed(9, i)).collect();
        let b: Vec<u64> = (0..64).rev().map(|i| trial_seed(9, i)).rev().collect();
        assert_eq!(a, b);
        let mut sorted = a.clone();
        sorted.sort_unstable();
        sorted.dedup();
        assert_eq!(sorted.len(), a.len());
        assert_ne!(trial_seed(9, 0), trial_seed(10, 0));
    }
}
