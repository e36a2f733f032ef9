use std::collections::{BTreeMap, BTreeSet};

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::arrangement::Arrangements;
use super::commit::{alice_commit, arranged_state, uniform_branches};
use super::config::ProtocolConfig;
use super::prep::{prepare_with, BobPreparation};
use super::transcript::{Record, Transcript};
use super::{bob_anc, qubit, Party, ALICE_ANC};
use crate::adversary::{
    bob_model_states, helstrom_projector, uhlmann_local_unitary, AliceStrategy, BobStrategy,
};
use crate::error::{Error, Result};
use crate::qlin::{
    circle_state, luders_project, rotation, trace_distance, Projector, StateVector, IMPOSSIBLE_TOL,
};

/// What Bob hands back when the ancilla check asks for the committed qubit.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Eq8Return {
    #[default]
    Honest,
    /// Keep the committed qubit and return a fresh `circle_state(angle)`.
    Substitute { angle: f64 },
}

/// Per-session knobs that are not protocol parameters.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SessionOptions {
    /// Committed bit; drawn from Alice's stream when `None`.
    pub bit: Option<u8>,
    pub eq8_return: Eq8Return,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Stage {
    Start,
    Prepared,
    Committed,
    Opened,
    Finished,
}

/// One QBC1 session between two strategies.
///
/// Each step checks that it runs in the right stage and that every party
/// only touches registers it holds; both facts end up in the transcript.
pub struct Session {
    cfg: ProtocolConfig,
    alice: AliceStrategy,
    bob: BobStrategy,
    opts: SessionOptions,
    alice_rng: ChaCha8Rng,
    bob_rng: ChaCha8Rng,
    stage: Stage,
    prep: Option<BobPreparation>,
    global: Option<StateVector>,
    arrangements: Option<Arrangements>,
    bit: u8,
    declared: Option<u8>,
    support: Vec<usize>,
    returned: BTreeSet<usize>,
    checked: bool,
    holders: BTreeMap<String, Party>,
    transcript: Transcript,
    bob_trace_distance: Option<f64>,
}

/// Runs one full session with the seed in `cfg`.
pub fn run_protocol(
    cfg: &ProtocolConfig,
    alice: AliceStrategy,
    bob: BobStrategy,
) -> Result<Transcript> {
    Ok(
        Session::new(cfg.clone(), alice, bob, SessionOptions::default())?
            .run()?
            .into_transcript(),
    )
}

impl Session {
    pub fn new(
        cfg: ProtocolConfig,
        alice: AliceStrategy,
        bob: BobStrategy,
        opts: SessionOptions,
    ) -> Result<Self> {
        cfg.validate()?;
        cfg.check_resources(alice.entanglement(&cfg))?;
        if let Some(b) = opts.bit {
            if b > 1 {
                return Err(Error::Domain(format!(
                    "committed bit must be 0 or 1, got {b}"
                )));
            }
        }
        let mut alice_rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        alice_rng.set_stream(1);
        let mut bob_rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        bob_rng.set_stream(2);
        Ok(Self {
            cfg,
            alice,
            bob,
            opts,
            alice_rng,
            bob_rng,
            stage: Stage::Start,
            prep: None,
            global: None,
            arrangements: None,
            bit: 0,
            declared: None,
            support: Vec::new(),
            returned: BTreeSet::new(),
            checked: false,
            holders: BTreeMap::new(),
            transcript: Transcript::new(),
            bob_trace_distance: None,
        })
    }

    /// Runs every remaining step up to a terminal phase.
    pub fn run(mut self) -> Result<Self> {
        self.prepare()?;
        if !self.audit()? {
            return Ok(self);
        }
        self.commit()?;
        if self.cfg.eq8_check && !self.eq8_check()? {
            return Ok(self);
        }
        if self.cfg.fraction_check && !self.fraction_check()? {
            return Ok(self);
        }
        if self.bob.guesses() {
            self.bob_guess()?;
        }
        self.open()?;
        self.verify()?;
        Ok(self)
    }

    pub fn stage(&self) -> Stage {
        self.stage
    }

    pub fn transcript(&self) -> &Transcript {
        &self.transcript
    }

    pub fn into_transcript(self) -> Transcript {
        self.transcript
    }

    pub fn config(&self) -> &ProtocolConfig {
        &self.cfg
    }

    pub fn preparation(&self) -> Option<&BobPreparation> {
        self.prep.as_ref()
    }

    /// Current joint state of all session registers.
    pub fn global_state(&self) -> Option<&StateVector> {
        self.global.as_ref()
    }

    pub fn arrangements(&self) -> Option<&Arrangements> {
        self.arrangements.as_ref()
    }

    /// Ancilla labels still compatible with everything Alice has measured.
    pub fn support(&self) -> &[usize] {
        &self.support
    }

    pub fn committed_bit(&self) -> u8 {
        self.bit
    }

    pub fn holders(&self) -> &BTreeMap<String, Party> {
        &self.holders
    }

    /// `‖ρ₀ − ρ₁‖₁` of the states Bob modelled when he measured.
    pub fn bob_trace_distance(&self) -> Option<f64> {
        self.bob_trace_distance
    }

    /// Registers held by `party`, in layout order.
    pub fn held_by(&self, party: Party) -> Vec<String> {
        let Some(g) = &self.global else {
            return Vec::new();
        };
        g.layout()
            .names()
            .filter(|r| self.holders.get(*r) == Some(&party))
            .map(str::to_owned)
            .collect()
    }

    fn expect_stage(&self, want: Stage, step: &str) -> Result<()> {
        if self.stage != want {
            return Err(Error::ProtocolOrder(format!(
                "{step} needs stage {want:?}, session is at {:?}",
                self.stage
            )));
        }
        Ok(())
    }

    fn state(&self) -> &StateVector {
        self.global.as_ref().expect("state exists once committed")
    }

    fn prep(&self) -> &BobPreparation {
        self.prep
            .as_ref()
            .expect("preparation exists once prepared")
    }

    fn arr(&self) -> &Arrangements {
        self.arrangements
            .as_ref()
            .expect("arrangements exist once committed")
    }

    fn act(&mut self, party: Party, op: &str, registers: Vec<String>) -> Result<()> {
        for r in &registers {
            if self.holders.get(r) != Some(&party) {
                return Err(Error::ProtocolOrder(format!(
                    "{party:?} cannot {op} {r}: not held"
                )));
            }
        }
        self.transcript.push(Record::Operation {
            party,
            op: op.to_owned(),
            registers,
        });
        Ok(())
    }

    fn transfer(&mut self, from: Party, to: Party, registers: Vec<String>) -> Result<()> {
        for r in &registers {
            if self.holders.get(r) != Some(&from) {
                return Err(Error::ProtocolOrder(format!(
                    "{from:?} cannot send {r}: not held"
                )));
            }
            self.holders.insert(r.clone(), to);
        }
        self.transcript.push(Record::Transfer {
            party: from,
            to,
            registers,
        });
        Ok(())
    }

    fn finish(&mut self, record: Record) {
        self.transcript.push(record);
        self.stage = Stage::Finished;
    }

    fn detected(&mut self, party: Party, step: &str, pass_probability: f64) {
        self.finish(Record::CheatDetected {
            party,
            step: step.to_owned(),
            pass_probability,
        });
    }

    /// Step 1: Bob prepares `n` pairs (plus audit pairs) and sends the qubits.
    pub fn prepare(&mut self) -> Result<()> {
        self.expect_stage(Stage::Start, "preparation")?;
        let n = self.cfg.n;
        let prep = prepare_with(&self.cfg, self.bob.prep_kind(), &mut self.bob_rng);
        let mut registers: Vec<String> = (0..n).map(bob_anc).chain((0..n).map(qubit)).collect();
        let audit: Vec<String> = (0..prep.audit.len())
            .flat_map(|i| [format!("audit_anc{i}"), format!("audit_q{i}")])
            .collect();
        registers.extend(audit.iter().cloned());
        for r in &registers {
            self.holders.insert(r.clone(), Party::Bob);
        }
        self.transcript.push(Record::Prepared {
            party: Party::Bob,
            n,
            grid: self.cfg.grid,
            angle_indices: prep.angle_indices.clone(),
            registers,
        });
        self.prep = Some(prep);
        self.transfer(Party::Bob, Party::Alice, (0..n).map(qubit).collect())?;
        self.stage = Stage::Prepared;
        Ok(())
    }

    /// Alice asks for the audit pairs and projects each onto the claimed
    /// entangled pair. Returns `false` when Bob is caught.
    pub fn audit(&mut self) -> Result<bool> {
        self.expect_stage(Stage::Prepared, "audit")?;
        let pairs = self.prep().audit.clone();
        if pairs.is_empty() {
            return Ok(true);
        }
        let regs: Vec<String> = (0..pairs.len())
            .flat_map(|i| [format!("audit_anc{i}"), format!("audit_q{i}")])
            .collect();
        self.transfer(Party::Bob, Party::Alice, regs.clone())?;
        self.act(Party::Alice, "project-pairs", regs)?;
        let mut total = 1.0;
        let mut passed = true;
        for (actual, claimed) in &pairs {
            let p = actual
                .state("a", "q")
                .overlap(&claimed.state("a", "q"))?
                .powi(2);
            total *= p;
            if passed && !coin(&mut self.alice_rng, p) {
                passed = false;
            }
        }
        self.transcript.push(Record::Audited {
            party: Party::Alice,
            pairs: pairs.len(),
            probability: total,
            passed,
        });
        if !passed {
            self.detected(Party::Bob, "audit", total);
        }
        Ok(passed)
    }

    /// Step 2: Alice entangles, modulates slot 0 and returns it to Bob.
    pub fn commit(&mut self) -> Result<()> {
        self.expect_stage(Stage::Prepared, "commitment")?;
        let n = self.cfg.n;
        let bit = match (self.alice.committed_bit(), self.opts.bit) {
            (Some(b), _) | (None, Some(b)) => b,
            (None, None) => self.alice_rng.random_range(0..2u8),
        };
        let mode = self.alice.entanglement(&self.cfg);
        let prep = self
            .prep
            .as_ref()
            .expect("preparation exists once prepared");
        let c = alice_commit(prep, bit, mode, self.cfg.modulation, &mut self.alice_rng)?;

        self.holders.insert(ALICE_ANC.to_owned(), Party::Alice);
        self.transcript.push(Record::Operation {
            party: Party::Alice,
            op: "create".into(),
            registers: vec![ALICE_ANC.to_owned()],
        });
        let mut touched = vec![ALICE_ANC.to_owned()];
        touched.extend((0..n).map(qubit));
        self.act(Party::Alice, "entangle", touched)?;
        self.act(Party::Alice, "modulate", vec![qubit(0)])?;
        self.transfer(Party::Alice, Party::Bob, vec![qubit(0)])?;
        self.transcript.push(Record::Committed {
            party: Party::Alice,
            bit,
            mode: mode.name().to_owned(),
            ancilla_dim: c.arrangements.len(),
        });
        self.bit = bit;
        self.support = c.support;
        self.arrangements = Some(c.arrangements);
        self.global = Some(c.global_state);
        self.stage = Stage::Committed;
        Ok(())
    }

    /// Ancilla check of the cyclic entanglement; the session carries on
    /// afterwards with Alice holding her registers again. Returns `false`
    /// when someone is caught.
    pub fn eq8_check(&mut self) -> Result<bool> {
        if self.stage > Stage::Committed {
            return Err(Error::ProtocolOrder(
                "the ancilla check must precede opening".into(),
            ));
        }
        self.expect_stage(Stage::Committed, "ancilla check")?;
        if self.checked {
            return Err(Error::ProtocolOrder(
                "the ancilla check must precede the fraction check".into(),
            ));
        }
        let n = self.cfg.n;
        let modulation = self.cfg.modulation;

        self.transfer(Party::Alice, Party::Bob, vec![ALICE_ANC.to_owned()])?;
        self.transfer(Party::Bob, Party::Alice, vec![qubit(0)])?;
        let counter_probability = match self.opts.eq8_return {
            Eq8Return::Honest => 1.0,
            Eq8Return::Substitute { angle } => substitution_pass_probability(self.state(), angle)?,
        };
        if !coin(&mut self.alice_rng, counter_probability) {
            self.transcript.push(Record::Eq8Checked {
                party: Party::Bob,
                counter_probability,
                bob_probability: None,
                passed: false,
            });
            self.detected(Party::Bob, "ancilla-check-return", counter_probability);
            return Ok(false);
        }
        // Passing the counter-check projects Alice's assembly back onto the
        // committed state, so the session continues from it unchanged.

        self.act(Party::Alice, "unmodulate", vec![qubit(0)])?;
        let undone = self
            .state()
            .apply(&[qubit(0)], &rotation(-modulation.angle_for(self.bit)))?;
        self.global = Some(undone);
        self.transfer(Party::Alice, Party::Bob, self.held_by(Party::Alice))?;

        let arr = self.arr();
        let cyclic: Vec<usize> = (0..n)
            .map(|k| {
                let shift: Vec<usize> = Arrangements::cyclic(n).slots(k).to_vec();
                arr.label_of(&shift)
                    .expect("every cyclic shift is an arrangement")
            })
            .collect();
        let expected = arranged_state(&self.prep().pairs, arr, &uniform_branches(&cyclic), 0.0);
        let all: Vec<String> = self.state().layout().names().map(str::to_owned).collect();
        self.act(Party::Bob, "project-eq8", all)?;
        let bob_probability = self.state().overlap(&expected)?.powi(2);
        let passed = coin(&mut self.bob_rng, bob_probability);
        self.transcript.push(Record::Eq8Checked {
            party: Party::Bob,
            counter_probability,
            bob_probability: Some(bob_probability),
            passed,
        });
        if !passed {
            self.detected(Party::Alice, "ancilla-check", bob_probability);
            return Ok(false);
        }
        self.global = Some(expected);
        self.support = cyclic;

        let back: Vec<String> = std::iter::once(ALICE_ANC.to_owned())
            .chain((0..n).map(qubit))
            .collect();
        self.transfer(Party::Bob, Party::Alice, back)?;
        self.act(Party::Alice, "modulate", vec![qubit(0)])?;
        let redone = self
            .state()
            .apply(&[qubit(0)], &rotation(modulation.angle_for(self.bit)))?;
        self.global = Some(redone);
        self.transfer(Party::Alice, Party::Bob, vec![qubit(0)])?;
        Ok(true)
    }

    /// Step 3: Bob asks for a random λ-fraction of his originals (or its
    /// complement if it contains the committed one); Alice measures her
    /// ancilla as far as needed to answer and returns those qubits; Bob
    /// checks each returned pair. Returns `false` when Alice is caught.
    pub fn fraction_check(&mut self) -> Result<bool> {
        self.expect_stage(Stage::Committed, "fraction check")?;
        if self.checked {
            return Err(Error::ProtocolOrder("the fraction check runs once".into()));
        }
        let n = self.cfg.n;
        let f = self.cfg.checked_count();
        let mut requested: Vec<usize> = sample(&mut self.bob_rng, n, f).into_vec();
        requested.sort_unstable();
        self.transcript.push(Record::CheckRequested {
            party: Party::Bob,
            requested: requested.clone(),
        });

        // Does the request contain the committed original?
        self.act(Party::Alice, "measure-contains", vec![ALICE_ANC.to_owned()])?;
        let (inside, outside): (Vec<usize>, Vec<usize>) = self
            .support
            .iter()
            .partition(|&&k| requested.contains(&self.arr().committed_original(k)));
        let contains = self.measure_labels(&[inside, outside], Party::Alice)? == 0;
        if contains {
            self.transcript.push(Record::CheckAnswered {
                party: Party::Alice,
                contains_committed: true,
                k0: None,
                returned: Vec::new(),
                residual_support: self.support.len(),
            });
            requested = (0..n).filter(|l| !requested.contains(l)).collect();
            self.transcript.push(Record::CheckRequested {
                party: Party::Bob,
                requested: requested.clone(),
            });
        }

        // Fix the slots of the requested originals.
        self.act(
            Party::Alice,
            "measure-positions",
            vec![ALICE_ANC.to_owned()],
        )?;
        let mut groups: BTreeMap<Vec<usize>, Vec<usize>> = BTreeMap::new();
        for &k in &self.support {
            let key: Vec<usize> = requested
                .iter()
                .map(|&l| self.arr().slot_of(k, l))
                .collect();
            groups.entry(key).or_default().push(k);
        }
        let (keys, sets): (Vec<Vec<usize>>, Vec<Vec<usize>>) = groups.into_iter().unzip();
        let chosen = self.measure_labels(&sets, Party::Alice)?;
        let slots = &keys[chosen];

        let returned_regs: Vec<String> = slots.iter().map(|&p| qubit(p)).collect();
        self.transfer(Party::Alice, Party::Bob, returned_regs)?;
        self.transcript.push(Record::CheckAnswered {
            party: Party::Alice,
            contains_committed: false,
            k0: (self.support.len() == 1).then(|| self.support[0]),
            returned: requested.clone(),
            residual_support: self.support.len(),
        });

        // Bob projects each returned qubit with its ancilla onto his pair.
        let touched: Vec<String> = requested
            .iter()
            .zip(slots)
            .flat_map(|(&l, &p)| [bob_anc(l), qubit(p)])
            .collect();
        self.act(Party::Bob, "verify-returned", touched)?;
        let mut total = 1.0;
        for (&l, &p) in requested.iter().zip(slots) {
            let pair = self.prep().pairs[l].state(&bob_anc(l), &qubit(p));
            let proj = Projector::onto(pair);
            let prob = proj.probability(self.state())?;
            total *= prob;
            if !coin(&mut self.bob_rng, prob) {
                self.transcript.push(Record::CheckVerified {
                    party: Party::Bob,
                    probability: total,
                    passed: false,
                });
                self.detected(Party::Alice, "fraction-check", total);
                return Ok(false);
            }
            let (_, post) = luders_project(self.state(), &proj)?;
            self.global = Some(post);
        }
        self.transcript.push(Record::CheckVerified {
            party: Party::Bob,
            probability: total,
            passed: true,
        });
        self.returned = requested.into_iter().collect();
        self.checked = true;
        Ok(true)
    }

    /// Measures the ancilla against the partition `sets` of the current
    /// support, collapses the state and narrows the support.
    fn measure_labels(&mut self, sets: &[Vec<usize>], by: Party) -> Result<usize> {
        let anc_layout = self.state().layout().subset(&[ALICE_ANC])?;
        let projectors: Vec<Projector> = sets
            .iter()
            .map(|s| Projector::basis(anc_layout.clone(), s.iter().copied()))
            .collect::<Result<_>>()?;
        let probs: Vec<f64> = projectors
            .iter()
            .map(|p| p.probability(self.state()))
            .collect::<Result<_>>()?;
        let rng = match by {
            Party::Alice => &mut self.alice_rng,
            Party::Bob => &mut self.bob_rng,
        };
        let i = sample_index(&probs, rng);
        let (_, post) = luders_project(self.state(), &projectors[i])?;
        self.global = Some(post);
        self.support = sets[i].clone();
        Ok(i)
    }

    /// Bob's Helstrom measurement on his registers, against the states an
    /// honest commitment would leave him given what he has seen.
    pub fn bob_guess(&mut self) -> Result<u8> {
        self.expect_stage(Stage::Committed, "Bob's measurement")?;
        let unreturned: Vec<usize> = (0..self.cfg.n)
            .filter(|l| !self.returned.contains(l))
            .collect();
        let (rho0, rho1) = bob_model_states(&self.prep().pairs, &unreturned, self.cfg.modulation)?;
        self.bob_trace_distance = Some(trace_distance(&rho0, &rho1)?);
        let pi = helstrom_projector(&rho0, &rho1)?;
        let regs: Vec<String> = rho0.layout().names().map(str::to_owned).collect();
        self.act(Party::Bob, "helstrom", regs)?;
        let p0 = pi.probability(self.state())?;
        let guess = sample_index(&[p0, 1.0 - p0], &mut self.bob_rng) as u8;
        let outcome = if guess == 0 { pi } else { complement(&pi)? };
        let (_, post) = luders_project(self.state(), &outcome)?;
        self.global = Some(post);
        let success_probability = if self.bit == 0 { p0 } else { 1.0 - p0 };
        self.transcript.push(Record::BobGuess {
            party: Party::Bob,
            guess,
            success_probability,
        });
        Ok(guess)
    }

    /// Step 4: Alice declares a bit, reveals her arrangement record and
    /// sends Bob everything she holds.
    pub fn open(&mut self) -> Result<()> {
        match self.stage {
            Stage::Committed => {}
            Stage::Opened | Stage::Finished => {
                return Err(Error::ProtocolOrder(
                    "the commitment is already open".into(),
                ))
            }
            _ => {
                return Err(Error::ProtocolOrder(
                    "nothing to open before committing".into(),
                ))
            }
        }
        let declared = match self.alice {
            AliceStrategy::DeclareFlipped => 1 - self.bit,
            AliceStrategy::UhlmannCheat { target } => {
                self.uhlmann_flip(target)?;
                target
            }
            _ => self.bit,
        };
        let k0 = (self.support.len() == 1).then(|| self.support[0]);
        let arrangement = k0.map(|k| self.arr().slots(k).to_vec());
        let held = self.held_by(Party::Alice);
        self.transfer(Party::Alice, Party::Bob, held)?;
        self.transcript.push(Record::Opened {
            party: Party::Alice,
            bit: declared,
            k0,
            arrangement,
            labels: self.support.clone(),
        });
        self.declared = Some(declared);
        self.stage = Stage::Opened;
        Ok(())
    }

    fn uhlmann_flip(&mut self, target: u8) -> Result<()> {
        let m = self.cfg.modulation;
        let shift = m.angle_for(target) - m.angle_for(self.bit);
        let goal = self.state().apply(&[qubit(0)], &rotation(shift))?;
        let cut = self.held_by(Party::Alice);
        let v = uhlmann_local_unitary(self.state(), &goal, &cut)?;
        self.act(Party::Alice, "uhlmann", cut)?;
        let moved = v.apply(self.state())?;
        self.global = Some(moved);
        Ok(())
    }

    /// Bob projects the whole system onto the state the opening describes.
    pub fn verify(&mut self) -> Result<bool> {
        self.expect_stage(Stage::Opened, "verification")?;
        let declared = self.declared.expect("set when opened");
        let expected = arranged_state(
            &self.prep().pairs,
            self.arr(),
            &uniform_branches(&self.support),
            self.cfg.modulation.angle_for(declared),
        );
        let all: Vec<String> = self.state().layout().names().map(str::to_owned).collect();
        self.act(Party::Bob, "verify-open", all)?;
        let probability = self.state().overlap(&expected)?.powi(2);
        let accept = coin(&mut self.bob_rng, probability);
        self.finish(Record::Verified {
            party: Party::Bob,
            accept,
            probability,
        });
        Ok(accept)
    }
}

/// `‖ρ a‖²`, with `ρ` the reduced state of the committed qubit: the chance
/// that the assembly with `|a⟩` in place of the committed qubit passes a
/// projection onto the committed state.
fn substitution_pass_probability(state: &StateVector, angle: f64) -> Result<f64> {
    let rho = state.reduced(&[qubit(0)])?;
    let a = circle_state("q", angle);
    Ok((rho.matrix() * a.amplitudes()).norm_squared())
}

fn complement(p: &Projector) -> Result<Projector> {
    match p {
        Projector::Dense { layout, matrix } => {
            let id = nalgebra::DMatrix::identity(matrix.nrows(), matrix.ncols());
            Projector::dense(layout.clone(), id - matrix)
        }
        _ => Err(Error::Domain(
            "complement is only built for dense projectors".into(),
        )),
    }
}

fn coin<R: Rng + ?Sized>(rng: &mut R, p: f64) -> bool {
    rng.random::<f64>() < p
}

/// Draws an outcome index; outcomes below the impossibility threshold are
/// never returned.
fn sample_index<R: Rng + ?Sized>(probs: &[f64], rng: &mut R) -> usize {
    let feasible: Vec<f64> = probs
        .iter()
        .map(|&p| if p > IMPOSSIBLE_TOL { p } else { 0.0 })
        .collect();
    let total: f64 = feasible.iter().sum();
    let mut u = rng.random::<f64>() * total;
    let mut last = 0;
    for (i, &p) in feasible.iter().enumerate() {
        if p == 0.0 {
            continue;
        }
        last = i;
        if u < p {
            return i;
        }
        u -= p;
    }
    last
}
