use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::protocol::{EntanglementMode, PrepKind, ProtocolConfig};

/// Alice's behaviour in a session.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum AliceStrategy {
    /// Follows the protocol with the configured entanglement (cyclic by default).
    Honest,
    /// Entangles over all `n!` arrangements.
    PermutationEntangle,
    /// Picks one shift classically instead of entangling.
    PreMeasuredHonest,
    /// Commits to the other bit and applies the Uhlmann unitary on everything
    /// she holds before opening as `target`.
    UhlmannCheat { target: u8 },
    /// Commits honestly and declares the opposite bit.
    DeclareFlipped,
}

impl AliceStrategy {
    pub fn uhlmann(target: u8) -> Result<Self> {
        if target > 1 {
            return Err(Error::Config(format!(
                "uhlmann target must be 0 or 1, got {target}"
            )));
        }
        Ok(Self::UhlmannCheat { target })
    }

    pub fn entanglement(&self, cfg: &ProtocolConfig) -> EntanglementMode {
        match self {
            Self::PermutationEntangle => EntanglementMode::Permutation,
            Self::PreMeasuredHonest => EntanglementMode::PreMeasured,
            _ => cfg.alice_entanglement,
        }
    }

    /// The bit this strategy insists on committing to, if any.
    pub fn committed_bit(&self) -> Option<u8> {
        match self {
            Self::UhlmannCheat { target } => Some(1 - target),
            _ => None,
        }
    }

    pub fn is_honest(&self) -> bool {
        matches!(
            self,
            Self::Honest | Self::PermutationEntangle | Self::PreMeasuredHonest
        )
    }
}

impl fmt::Display for AliceStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Honest => f.write_str("honest"),
            Self::PermutationEntangle => f.write_str("permutation"),
            Self::PreMeasuredHonest => f.write_str("pre-measured"),
            Self::UhlmannCheat { target } => write!(f, "uhlmann:{target}"),
            Self::DeclareFlipped => f.write_str("declare-flipped"),
        }
    }
}

impl FromStr for AliceStrategy {
    type Err = Error;

    /// `honest`, `permutation`, `pre-measured`, `uhlmann:<bit>` or `declare-flipped`.
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "honest" => Ok(Self::Honest),
            "permutation" => Ok(Self::PermutationEntangle),
            "pre-measured" => Ok(Self::PreMeasuredHonest),
            "declare-flipped" => Ok(Self::DeclareFlipped),
            "uhlmann" => Self::uhlmann(1),
            _ => match s.strip_prefix("uhlmann:") {
                Some(b) => Self::uhlmann(
                    b.parse()
                        .map_err(|_| Error::Config(format!("bad uhlmann target `{b}`")))?,
                ),
                None => Err(Error::Config(format!(
                    "unknown Alice strategy `{s}` (expected honest, permutation, pre-measured, uhlmann:<bit>, declare-flipped)"
                ))),
            },
        }
    }
}

/// Bob's behaviour in a session.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BobStrategy {
    Honest,
    /// Honest preparation, then the optimal measurement on his registers
    /// just before opening.
    HelstromMeasure,
    /// Sends `n` copies of `circle_state(angle)` and measures the committed qubit.
    FixedIdenticalStates {
        angle: f64,
    },
    /// Sends unentangled basis states with a remembered choice, then measures.
    SkipAncillaEntanglement,
}

impl BobStrategy {
    pub fn prep_kind(&self) -> PrepKind {
        match *self {
            Self::Honest | Self::HelstromMeasure => PrepKind::Honest,
            Self::FixedIdenticalStates { angle } => PrepKind::Fixed { angle },
            Self::SkipAncillaEntanglement => PrepKind::Unentangled,
        }
    }

    /// Whether Bob measures to guess the bit before opening.
    pub fn guesses(&self) -> bool {
        !matches!(self, Self::Honest)
    }
}

impl fmt::Display for BobStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Honest => f.write_str("honest"),
            Self::HelstromMeasure => f.write_str("helstrom"),
            Self::FixedIdenticalStates { angle } => write!(f, "fixed:{angle}"),
            Self::SkipAncillaEntanglement => f.write_str("skip-entanglement"),
        }
    }
}

impl FromStr for BobStrategy {
    type Err = Error;

    /// `honest`, `helstrom`, `fixed:<angle in radians>` or `skip-entanglement`.
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "honest" => Ok(Self::Honest),
            "helstrom" => Ok(Self::HelstromMeasure),
            "skip-entanglement" => Ok(Self::SkipAncillaEntanglement),
            "fixed" => Ok(Self::FixedIdenticalStates { angle: 0.0 }),
            _ => match s.strip_prefix("fixed:") {
                Some(a) => {
                    let angle: f64 = a
                        .parse()
                        .map_err(|_| Error::Config(format!("bad fixed-state angle `{a}`")))?;
                    if !angle.is_finite() {
                        return Err(Error::Config(format!("fixed-state angle must be finite, got {a}")));
                    }
                    Ok(Self::FixedIdenticalStates { angle })
                }
                None => Err(Error::Config(format!(
                    "unknown Bob strategy `{s}` (expected honest, helstrom, fixed:<angle>, skip-entanglement)"
                ))),
            },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_round_trip() {
        for s in [
            "honest",
            "permutation",
            "pre-measured",
            "uhlmann:0",
            "declare-flipped",
        ] {
            assert_eq!(s.parse::<AliceStrategy>().unwrap().to_string(), s);
        }
        for s in ["honest", "helstrom", "fixed:0.5", "skip-entanglement"] {
            assert_eq!(s.parse::<BobStrategy>().unwrap().to_string(), s);
        }
    }

    #[test]
    fn unknown_names_are_rejected() {
        assert!("sneaky".parse::<AliceStrategy>().is_err());
        assert!("uhlmann:2".parse::<AliceStrategy>().is_err());
        assert!("fixed:abc".parse::<BobStrategy>().is_err());
        assert!("fixed:inf".parse::<BobStrategy>().is_err());
    }
}
