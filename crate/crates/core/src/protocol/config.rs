use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};
use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qlin::{rotation, C64};

/// Largest `n` for the cyclic and pre-measured modes (global dimension `n·4ⁿ`).
pub const MAX_CYCLIC_N: usize = 8;
/// Largest `n` for full-permutation entanglement (ancilla dimension `n!`).
pub const MAX_PERMUTATION_N: usize = 6;

/// How Alice entangles her position ancilla with the qubits Bob sent.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EntanglementMode {
    /// Superposition over the `n` cyclic shifts.
    Cyclic,
    /// Superposition over all `n!` arrangements.
    Permutation,
    /// A single cyclic shift chosen classically; the ancilla holds a definite record.
    PreMeasured,
}

impl EntanglementMode {
    pub fn name(self) -> &'static str {
        match self {
            Self::Cyclic => "cyclic",
            Self::Permutation => "permutation",
            Self::PreMeasured => "pre-measured",
        }
    }
}

impl FromStr for EntanglementMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "cyclic" => Ok(Self::Cyclic),
            "permutation" => Ok(Self::Permutation),
            "pre-measured" | "premeasured" => Ok(Self::PreMeasured),
            other => Err(Error::Config(format!(
                "unknown entanglement mode `{other}` (expected cyclic, permutation, pre-measured)"
            ))),
        }
    }
}

/// The pair of rotations `{U₀, U₁} = {R(+φ), R(−φ)}` Alice uses to encode the bit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Modulation {
    /// `R(±π/2)`: the two committed states are orthogonal.
    HalfPi,
    /// `R(±π/4)`: committed states overlap with squared inner product 1/2.
    QuarterPi,
}

impl Modulation {
    pub fn angle(self) -> f64 {
        match self {
            Self::HalfPi => FRAC_PI_2,
            Self::QuarterPi => FRAC_PI_4,
        }
    }

    /// Rotation angle applied for `bit`.
    pub fn angle_for(self, bit: u8) -> f64 {
        if bit == 0 {
            self.angle()
        } else {
            -self.angle()
        }
    }

    pub fn unitary(self, bit: u8) -> DMatrix<C64> {
        rotation(self.angle_for(bit))
    }

    /// `|⟨U₀ψ|U₁ψ⟩|²` for any state `ψ` on the circle.
    pub fn flip_overlap(self) -> f64 {
        let half = self.angle();
        // |(1 + e^{2iφ})/2|² = cos²φ
        half.cos().powi(2)
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::HalfPi => "half-pi",
            Self::QuarterPi => "quarter-pi",
        }
    }
}

impl FromStr for Modulation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "half-pi" => Ok(Self::HalfPi),
            "quarter-pi" => Ok(Self::QuarterPi),
            other => Err(Error::Config(format!(
                "unknown modulation `{other}` (expected half-pi or quarter-pi)"
            ))),
        }
    }
}

/// A rational number `num/den`, used for the checked fraction λ.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Fraction {
    pub num: u32,
    pub den: u32,
}

impl Fraction {
    pub const HALF: Fraction = Fraction { num: 1, den: 2 };

    pub fn new(num: u32, den: u32) -> Result<Self> {
        if den == 0 {
            return Err(Error::Config("fraction with zero denominator".into()));
        }
        Ok(Self { num, den })
    }

    pub fn value(self) -> f64 {
        self.num as f64 / self.den as f64
    }

    /// `⌊self · n⌋`.
    pub fn floor_of(self, n: usize) -> usize {
        self.num as usize * n / self.den as usize
    }
}

impl fmt::Display for Fraction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

impl FromStr for Fraction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Config(format!("`{s}` is not a fraction like 1/2"));
        match s.split_once('/') {
            Some((a, b)) => Self::new(
                a.trim().parse().map_err(|_| bad())?,
                b.trim().parse().map_err(|_| bad())?,
            ),
            None => Err(bad()),
        }
    }
}

/// Parameters of one protocol session.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProtocolConfig {
    /// Number of qubits Bob sends.
    pub n: usize,
    /// Number of grid points on the circle Bob draws basis angles from.
    pub grid: usize,
    /// Fraction of the qubits Bob asks back for checking.
    pub lambda: Fraction,
    pub seed: u64,
    /// Entanglement used by an honest Alice.
    pub alice_entanglement: EntanglementMode,
    pub modulation: Modulation,
    /// Run the fraction-λ check before opening.
    pub fraction_check: bool,
    /// Run the ancilla check of the cyclic entanglement after committing.
    pub eq8_check: bool,
    /// Extra pairs Bob prepares for Alice to audit before she commits.
    pub audit_pairs: usize,
}

impl Default for ProtocolConfig {
    fn default() -> Self {
        Self {
            n: 4,
            grid: 8,
            lambda: Fraction::HALF,
            seed: 0,
            alice_entanglement: EntanglementMode::Cyclic,
            modulation: Modulation::HalfPi,
            fraction_check: true,
            eq8_check: false,
            audit_pairs: 1,
        }
    }
}

impl ProtocolConfig {
    pub fn with_n(n: usize) -> Self {
        Self {
            n,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::Config(format!(
                "n must be at least 2, got {}",
                self.n
            )));
        }
        if self.grid < 2 || !self.grid.is_multiple_of(2) {
            return Err(Error::Config(format!(
                "grid size M must be even and at least 2, got {}",
                self.grid
            )));
        }
        if self.lambda.num == 0 || self.lambda.num >= self.lambda.den {
            return Err(Error::Config(format!(
                "lambda must lie in (0, 1), got {}",
                self.lambda
            )));
        }
        self.check_resources(self.alice_entanglement)
    }

    /// Rejects sizes whose dense state would exceed the desk-scale caps.
    pub fn check_resources(&self, mode: EntanglementMode) -> Result<()> {
        let n = self.n;
        let (cap, ancilla) = match mode {
            EntanglementMode::Permutation => (MAX_PERMUTATION_N, factorial(n.min(20))),
            _ => (MAX_CYCLIC_N, n),
        };
        if n > cap {
            return Err(Error::ResourceCap {
                what: format!("{} entanglement with n = {n}", mode.name()),
                dim: ancilla.saturating_mul(1usize.checked_shl(2 * n as u32).unwrap_or(usize::MAX)),
                cap: factorial_or_dim(mode, cap),
            });
        }
        Ok(())
    }

    /// Number of positions in a check request: `⌊λ·n⌋`, kept within
    /// `1..n` so that a request and its complement are both non-empty.
    pub fn checked_count(&self) -> usize {
        self.lambda
            .floor_of(self.n)
            .clamp(1, self.n.saturating_sub(1).max(1))
    }

    /// Grid angle `2πm/M`.
    pub fn grid_angle(&self, index: usize) -> f64 {
        std::f64::consts::TAU * index as f64 / self.grid as f64
    }
}

fn factorial_or_dim(mode: EntanglementMode, n: usize) -> usize {
    let ancilla = match mode {
        EntanglementMode::Permutation => factorial(n),
        _ => n,
    };
    ancilla * (1usize << (2 * n))
}

pub(crate) fn factorial(n: usize) -> usize {
    (1..=n).product::<usize>().max(1)
}
