//! Table-driven parties: a 2PFA verifier with communicating states, a
//! work-tape classical prover and a 2QCFA prover, each with separate silent
//! and communication transition tables.

use std::collections::BTreeMap;

use super::engine::{ProverAction, ProverObs, ProverProgram, ProverRun, VerifierAction, VerifierObs, VerifierProgram, VerifierRun};
use super::msg::Msg;
use crate::error::{Error, Result};
use crate::machines::{apply_branch, step_ptm, Branch, ClassicalConfiguration, PtmSpec, Verdict};
use crate::quantum::{apply_action, QcfaSpec, QuantumRegister};
use crate::rational::{Rational, Sampler};
use crate::rng::TrialRng;
use crate::tape::{Move, Tape, LEFT_END, RIGHT_END};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VerifierBranch {
    pub prob: Rational,
    pub to: usize,
    pub di: Move,
}

/// Transition key: (state, scanned symbol, received symbol). The received
/// symbol is [`Msg::Blank`] on steps that do not follow a communication.
pub type VerifierKey = (usize, char, Msg);

#[derive(Debug)]
pub struct TableVerifier {
    states: Vec<String>,
    sigma: Vec<char>,
    start: usize,
    accept: usize,
    reject: usize,
    emits: Vec<Option<Msg>>,
    rules: BTreeMap<VerifierKey, (Sampler, Vec<VerifierBranch>)>,
}

impl TableVerifier {
    pub fn states(&self) -> &[String] {
        &self.states
    }
    pub fn is_communicating(&self, s: usize) -> bool {
        self.emits[s].is_some()
    }
}

#[derive(Clone, Debug)]
pub struct TableVerifierBuilder {
    sigma: Vec<char>,
    states: Vec<String>,
    emits: Vec<Option<Msg>>,
    rules: BTreeMap<VerifierKey, Vec<VerifierBranch>>,
}

impl TableVerifierBuilder {
    pub fn new(sigma: &[char]) -> Self {
        TableVerifierBuilder { sigma: sigma.to_vec(), states: Vec::new(), emits: Vec::new(), rules: BTreeMap::new() }
    }
    pub fn state(&mut self, name: &str) -> usize {
        self.states.push(name.to_string());
        self.emits.push(None);
        self.states.len() - 1
    }
    /// A communicating state that writes `gamma` whenever it is entered.
    pub fn com_state(&mut self, name: &str, gamma: Msg) -> usize {
        let s = self.state(name);
        self.emits[s] = Some(gamma);
        s
    }
    pub fn rule(&mut self, s: usize, read: char, got: Msg, outs: &[(Rational, usize, Move)]) -> &mut Self {
        let v = outs.iter().map(|(p, to, di)| VerifierBranch { prob: p.clone(), to: *to, di: *di }).collect();
        self.rules.insert((s, read, got), v);
        self
    }
    pub fn det(&mut self, s: usize, read: char, got: Msg, to: usize, di: Move) -> &mut Self {
        self.rule(s, read, got, &[(Rational::one(), to, di)])
    }
    pub fn build(self, start: usize, accept: usize, reject: usize) -> Result<TableVerifier> {
        let bad = |m: String| Err(Error::MalformedMachine(m));
        if accept == reject {
            return bad("accept and reject states coincide".into());
        }
        for s in [start, accept, reject] {
            if self.emits[s].is_some() {
                return bad(format!("state {} must be silent", self.states[s]));
            }
        }
        let mut rules = BTreeMap::new();
        for ((s, read, got), branches) in self.rules {
            if s == accept || s == reject {
                return bad(format!("transition leaves halting state {}", self.states[s]));
            }
            for b in &branches {
                if (read == LEFT_END && b.di == Move::Left) || (read == RIGHT_END && b.di == Move::Right) {
                    return bad(format!("transition at ({}, {read}) moves past an endmarker", self.states[s]));
                }
            }
            let probs: Vec<Rational> = branches.iter().map(|b| b.prob.clone()).collect();
            let sampler = Sampler::new(&probs)?;
            rules.insert((s, read, got), (sampler, branches));
        }
        Ok(TableVerifier {
            states: self.states,
            sigma: self.sigma,
            start,
            accept,
            reject,
            emits: self.emits,
            rules,
        })
    }
}

struct TableVerifierRun<'a> {
    spec: &'a TableVerifier,
    state: usize,
}

impl VerifierRun for TableVerifierRun<'_> {
    fn step(&mut self, obs: VerifierObs, rng: &mut TrialRng) -> Result<VerifierAction> {
        let got = obs.response.unwrap_or(Msg::Blank);
        let (sampler, branches) = self.spec.rules.get(&(self.state, obs.symbol, got)).ok_or_else(|| {
            Error::MalformedMachine(format!(
                "verifier has no transition for ({}, {}, {got})",
                self.spec.states[self.state], obs.symbol
            ))
        })?;
        let b = &branches[sampler.sample(rng)];
        self.state = b.to;
        if b.to == self.spec.accept {
            return Ok(VerifierAction::Halt(Verdict::Accept));
        }
        if b.to == self.spec.reject {
            return Ok(VerifierAction::Halt(Verdict::Reject));
        }
        Ok(VerifierAction::Move { head: b.di, send: self.spec.emits[b.to] })
    }
}

impl VerifierProgram for TableVerifier {
    fn sigma(&self) -> &[char] {
        &self.sigma
    }
    fn spawn<'a>(&'a self, _tape: &'a Tape, _rng: &mut TrialRng) -> Result<Box<dyn VerifierRun + 'a>> {
        Ok(Box::new(TableVerifierRun { spec: self, state: self.start }))
    }
}

/// One branch of δ_com: the usual PTM move plus the symbol written to the cell.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComRule {
    pub branch: Branch,
    pub reply: Msg,
}

/// Classical prover: δ_silent is an ordinary work-tape PTM table (its accept
/// and reject states are never entered), δ_com is keyed additionally by the
/// fresh verifier symbol.
#[derive(Debug)]
pub struct TableProver {
    silent: PtmSpec,
    com: BTreeMap<(usize, char, char, Msg), (Sampler, Vec<ComRule>)>,
}

impl TableProver {
    pub fn new(silent: PtmSpec, com: BTreeMap<(usize, char, char, Msg), Vec<ComRule>>) -> Result<Self> {
        let mut compiled = BTreeMap::new();
        for (key, rules) in com {
            let (s, read, _, _) = key;
            if silent.is_halting(s) {
                return Err(Error::MalformedMachine("prover δ_com leaves a halting state".into()));
            }
            for r in &rules {
                if (read == LEFT_END && r.branch.di == Move::Left) || (read == RIGHT_END && r.branch.di == Move::Right) {
                    return Err(Error::MalformedMachine("prover δ_com moves past an endmarker".into()));
                }
            }
            let probs: Vec<Rational> = rules.iter().map(|r| r.branch.prob.clone()).collect();
            compiled.insert(key, (Sampler::new(&probs)?, rules));
        }
        Ok(TableProver { silent, com: compiled })
    }
}

struct TableProverRun<'a> {
    spec: &'a TableProver,
    tape: &'a Tape,
    cfg: ClassicalConfiguration,
}

impl ProverRun for TableProverRun<'_> {
    fn step(&mut self, obs: ProverObs, rng: &mut TrialRng) -> Result<ProverAction> {
        let before = self.cfg.input_head;
        let reply = match obs.fresh {
            None => {
                self.cfg = step_ptm(&self.spec.silent, self.tape, &self.cfg, rng)?;
                None
            }
            Some(gamma) => {
                let key = (self.cfg.state, obs.symbol, self.cfg.work_symbol(), gamma);
                let (sampler, rules) = self.spec.com.get(&key).ok_or_else(|| {
                    Error::MalformedMachine(format!("prover has no δ_com entry for received {gamma}"))
                })?;
                let r = &rules[sampler.sample(rng)];
                self.cfg = apply_branch(&self.cfg, &r.branch)?;
                Some(r.reply)
            }
        };
        let head = match self.cfg.input_head as isize - before as isize {
            -1 => Move::Left,
            0 => Move::Stay,
            _ => Move::Right,
        };
        Ok(ProverAction { head, respond: reply })
    }
    fn peak_space(&self) -> usize {
        self.cfg.touched_cells
    }
}

impl ProverProgram for TableProver {
    fn sigma(&self) -> &[char] {
        self.silent.sigma()
    }
    fn spawn<'a>(&'a self, tape: &'a Tape, _rng: &mut TrialRng) -> Result<Box<dyn ProverRun + 'a>> {
        Ok(Box::new(TableProverRun { spec: self, tape, cfg: ClassicalConfiguration::initial(&self.silent) }))
    }
}

/// Constant-space quantum prover: the 2QCFA's classical map plays δ_silent and
/// `com` maps (state, symbol, outcome, received) to (state, move, reply).
#[derive(Debug)]
pub struct QuantumTableProver {
    machine: QcfaSpec,
    com: BTreeMap<(usize, char, Option<usize>, Msg), (usize, Move, Msg)>,
}

impl QuantumTableProver {
    pub fn new(machine: QcfaSpec, com: BTreeMap<(usize, char, Option<usize>, Msg), (usize, Move, Msg)>) -> Self {
        QuantumTableProver { machine, com }
    }
}

struct QuantumProverRun<'a> {
    spec: &'a QuantumTableProver,
    reg: QuantumRegister,
    state: usize,
}

impl ProverRun for QuantumProverRun<'_> {
    fn step(&mut self, obs: ProverObs, rng: &mut TrialRng) -> Result<ProverAction> {
        let m = &self.spec.machine;
        let (reg, tau) = apply_action(&self.reg, m.action(self.state, obs.symbol), rng)?;
        self.reg = reg;
        let missing = || Error::MalformedMachine("quantum prover has no transition for this step".into());
        match obs.fresh {
            None => {
                let (to, d) = m.classical_step(self.state, obs.symbol, tau).ok_or_else(missing)?;
                self.state = to;
                Ok(ProverAction::silent(d))
            }
            Some(gamma) => {
                let &(to, d, reply) = self.spec.com.get(&(self.state, obs.symbol, tau, gamma)).ok_or_else(missing)?;
                self.state = to;
                Ok(ProverAction::reply(d, reply))
            }
        }
    }
}

impl ProverProgram for QuantumTableProver {
    fn sigma(&self) -> &[char] {
        self.machine.sigma()
    }
    fn spawn<'a>(&'a self, _tape: &'a Tape, _rng: &mut TrialRng) -> Result<Box<dyn ProverRun + 'a>> {
        let m = &self.machine;
        Ok(Box::new(QuantumProverRun { spec: self, reg: QuantumRegister::basis(m.dim(), m.q0()), state: m.start() }))
    }
}

/// A prover whose δ_com never writes.
#[derive(Clone, Debug)]
pub struct MuteProver {
    pub sigma: Vec<char>,
}

struct MuteRun;

impl ProverRun for MuteRun {
    fn step(&mut self, _obs: ProverObs, _rng: &mut TrialRng) -> Result<ProverAction> {
        Ok(ProverAction::silent(Move::Stay))
    }
}

impl ProverProgram for MuteProver {
    fn sigma(&self) -> &[char] {
        &self.sigma
    }
    fn spawn<'a>(&'a self, _tape: &'a Tape, _rng: &mut TrialRng) -> Result<Box<dyn ProverRun + 'a>> {
        Ok(Box::new(MuteRun))
    }
}
