use std::collections::{BTreeMap, BTreeSet};
use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use super::Party;
use crate::error::{Error, Result};

/// One line of a session transcript.
///
/// `Transfer` and `Operation` records carry the register bookkeeping; the
/// remaining variants are the protocol phases.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "phase", rename_all = "snake_case")]
pub enum Record {
    Prepared {
        party: Party,
        n: usize,
        grid: usize,
        angle_indices: Vec<usize>,
        registers: Vec<String>,
    },
    Transfer {
        party: Party,
        to: Party,
        registers: Vec<String>,
    },
    Operation {
        party: Party,
        op: String,
        registers: Vec<String>,
    },
    Audited {
        party: Party,
        pairs: usize,
        probability: f64,
        passed: bool,
    },
    Committed {
        party: Party,
        bit: u8,
        mode: String,
        ancilla_dim: usize,
    },
    CheckRequested {
        party: Party,
        requested: Vec<usize>,
    },
    CheckAnswered {
        party: Party,
        contains_committed: bool,
        k0: Option<usize>,
        returned: Vec<usize>,
        residual_support: usize,
    },
    CheckVerified {
        party: Party,
        probability: f64,
        passed: bool,
    },
    Eq8Checked {
        party: Party,
        counter_probability: f64,
        /// `None` when the check stopped at the counter-check.
        bob_probability: Option<f64>,
        passed: bool,
    },
    BobGuess {
        party: Party,
        guess: u8,
        success_probability: f64,
    },
    Opened {
        party: Party,
        bit: u8,
        k0: Option<usize>,
        arrangement: Option<Vec<usize>>,
        labels: Vec<usize>,
    },
    Verified {
        party: Party,
        accept: bool,
        probability: f64,
    },
    /// `party` was caught at `step`; `pass_probability` is the chance the
    /// failed check had of passing.
    CheatDetected {
        party: Party,
        step: String,
        pass_probability: f64,
    },
}

impl Record {
    pub fn party(&self) -> Party {
        match self {
            Self::Prepared { party, .. }
            | Self::Transfer { party, .. }
            | Self::Operation { party, .. }
            | Self::Audited { party, .. }
            | Self::Committed { party, .. }
            | Self::CheckRequested { party, .. }
            | Self::CheckAnswered { party, .. }
            | Self::CheckVerified { party, .. }
            | Self::Eq8Checked { party, .. }
            | Self::BobGuess { party, .. }
            | Self::Opened { party, .. }
            | Self::Verified { party, .. }
            | Self::CheatDetected { party, .. } => *party,
        }
    }

    pub fn is_terminal(&self) -> bool {
        matches!(self, Self::Verified { .. } | Self::CheatDetected { .. })
    }

    fn rank(&self) -> Option<u8> {
        Some(match self {
            Self::Prepared { .. } => 0,
            Self::Audited { .. } => 1,
            Self::Committed { .. } => 2,
            Self::CheckRequested { .. }
            | Self::CheckAnswered { .. }
            | Self::CheckVerified { .. }
            | Self::Eq8Checked { .. }
            | Self::BobGuess { .. } => 3,
            Self::Opened { .. } => 4,
            Self::Verified { .. } => 5,
            Self::Transfer { .. } | Self::Operation { .. } | Self::CheatDetected { .. } => {
                return None
            }
        })
    }
}

/// How a session ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Accepted,
    Rejected,
    CheatDetected(Party),
}

/// Ordered record of one session.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Transcript {
    records: Vec<Record>,
}

impl Transcript {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, record: Record) {
        self.records.push(record);
    }

    pub fn records(&self) -> &[Record] {
        &self.records
    }

    pub fn terminal(&self) -> Option<&Record> {
        self.records.iter().rev().find(|r| r.is_terminal())
    }

    pub fn outcome(&self) -> Option<Outcome> {
        match self.terminal()? {
            Record::Verified { accept: true, .. } => Some(Outcome::Accepted),
            Record::Verified { accept: false, .. } => Some(Outcome::Rejected),
            Record::CheatDetected { party, .. } => Some(Outcome::CheatDetected(*party)),
            _ => None,
        }
    }

    /// `(guess, success probability)` when Bob tried to read the bit.
    pub fn bob_guess(&self) -> Option<(u8, f64)> {
        self.records.iter().find_map(|r| match r {
            Record::BobGuess {
                guess,
                success_probability,
                ..
            } => Some((*guess, *success_probability)),
            _ => None,
        })
    }

    pub fn committed_bit(&self) -> Option<u8> {
        self.records.iter().find_map(|r| match r {
            Record::Committed { bit, .. } => Some(*bit),
            _ => None,
        })
    }

    /// Probability of the final verification projection, when reached.
    pub fn verification_probability(&self) -> Option<f64> {
        self.records.iter().find_map(|r| match r {
            Record::Verified { probability, .. } => Some(*probability),
            _ => None,
        })
    }

    /// Checks phase order, the single terminal record, and that every
    /// operation only touches registers its party holds.
    pub fn validate(&self) -> Result<()> {
        let mut last = 0u8;
        let mut terminals = 0usize;
        let mut holders: BTreeMap<String, Party> = BTreeMap::new();
        for (i, rec) in self.records.iter().enumerate() {
            if terminals > 0 {
                return Err(Error::ProtocolOrder(format!(
                    "record {i} follows the terminal phase"
                )));
            }
            if let Some(rank) = rec.rank() {
                let repeatable = rank == 3;
                if rank < last || (rank == last && !repeatable && i > 0) {
                    return Err(Error::ProtocolOrder(format!(
                        "record {i} ({}) is out of order",
                        tag(rec)
                    )));
                }
                last = rank;
            }
            if rec.is_terminal() {
                terminals += 1;
            }
            match rec {
                Record::Prepared {
                    party, registers, ..
                } => {
                    for r in registers {
                        holders.insert(r.clone(), *party);
                    }
                }
                Record::Transfer {
                    party,
                    to,
                    registers,
                } => {
                    for r in registers {
                        check_holder(&holders, r, *party, i)?;
                        holders.insert(r.clone(), *to);
                    }
                }
                Record::Operation {
                    party,
                    registers,
                    op,
                } => {
                    for r in registers {
                        // a register appears the first time its owner creates it
                        if op.starts_with("create") {
                            if holders.contains_key(r) {
                                return Err(Error::ProtocolOrder(format!(
                                    "record {i} recreates register {r}"
                                )));
                            }
                            holders.insert(r.clone(), *party);
                        } else {
                            check_holder(&holders, r, *party, i)?;
                        }
                    }
                }
                _ => {}
            }
        }
        if terminals != 1 {
            return Err(Error::ProtocolOrder(format!("{terminals} terminal phases")));
        }
        Ok(())
    }

    /// One JSON object per line.
    pub fn write_jsonl<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        for rec in &self.records {
            serde_json::to_writer(&mut out, rec)?;
            out.write_all(b"\n")?;
        }
        Ok(())
    }

    pub fn to_jsonl(&self) -> String {
        let mut buf = Vec::new();
        self.write_jsonl(&mut buf)
            .expect("writing to a Vec cannot fail");
        String::from_utf8(buf).expect("serde_json emits UTF-8")
    }

    pub fn read_jsonl<R: BufRead>(input: R) -> Result<Self> {
        let mut records = Vec::new();
        for line in input.lines() {
            let line = line.map_err(|e| Error::Config(e.to_string()))?;
            if line.trim().is_empty() {
                continue;
            }
            records.push(serde_json::from_str(&line).map_err(|e| Error::Config(e.to_string()))?);
        }
        Ok(Self { records })
    }

    /// Registers each party holds at the end of the transcript.
    pub fn final_holdings(&self) -> BTreeMap<Party, BTreeSet<String>> {
        let mut holders: BTreeMap<String, Party> = BTreeMap::new();
        for rec in &self.records {
            match rec {
                Record::Prepared {
                    party, registers, ..
                } => {
                    for r in registers {
                        holders.insert(r.clone(), *party);
                    }
                }
                Record::Transfer { to, registers, .. } => {
                    for r in registers {
                        holders.insert(r.clone(), *to);
                    }
                }
                Record::Operation {
                    party,
                    registers,
                    op,
                } if op.starts_with("create") => {
                    for r in registers {
                        holders.insert(r.clone(), *party);
                    }
                }
                _ => {}
            }
        }
        let mut out: BTreeMap<Party, BTreeSet<String>> = BTreeMap::new();
        for (r, p) in holders {
            out.entry(p).or_default().insert(r);
        }
        out
    }
}

fn tag(rec: &Record) -> String {
    serde_json::to_value(rec)
        .ok()
        .and_then(|v| v.get("phase").and_then(|p| p.as_str().map(str::to_owned)))
        .unwrap_or_default()
}

fn check_holder(
    holders: &BTreeMap<String, Party>,
    reg: &str,
    party: Party,
    i: usize,
) -> Result<()> {
    match holders.get(reg) {
        Some(p) if *p == party => Ok(()),
        Some(p) => Err(Error::ProtocolOrder(format!(
            "record {i}: {party:?} acts on {reg}, which {p:?} holds"
        ))),
        None => Err(Error::ProtocolOrder(format!(
            "record {i}: unknown register {reg}"
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn verified() -> Record {
        Record::Verified {
            party: Party::Bob,
            accept: true,
            probability: 1.0,
        }
    }

    fn prepared() -> Record {
        Record::Prepared {
            party: Party::Bob,
            n: 2,
            grid: 8,
            angle_indices: vec![0, 3],
            registers: vec!["q0".into()],
        }
    }

    #[test]
    fn jsonl_round_trip() {
        let mut t = Transcript::new();
        t.push(prepared());
        t.push(verified());
        let text = t.to_jsonl();
        assert!(text
            .lines()
            .next()
            .unwrap()
            .starts_with(r#"{"phase":"prepared""#));
        let back = Transcript::read_jsonl(text.as_bytes()).unwrap();
        assert_eq!(back, t);
    }

    #[test]
    fn order_violations_are_caught() {
        let mut t = Transcript::new();
        t.push(verified());
        t.push(prepared());
        assert!(t.validate().is_err());
    }

    #[test]
    fn foreign_register_use_is_caught() {
        let mut t = Transcript::new();
        t.push(prepared());
        t.push(Record::Operation {
            party: Party::Alice,
            op: "rotate".into(),
            registers: vec!["q0".into()],
        });
        t.push(verified());
        assert!(matches!(t.validate(), Err(Error::ProtocolOrder(_))));
    }

    #[test]
    fn exactly_one_terminal() {
        let mut t = Transcript::new();
        t.push(prepared());
        assert!(t.validate().is_err());
        t.push(verified());
        t.validate().unwrap();
    }
}
