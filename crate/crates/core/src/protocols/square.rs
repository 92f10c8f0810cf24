//! SQUARE protocol: clock stage, then a ruler check or a Freivalds
//! comparison of the a-count against the `#`s the prover sends while the
//! verifier's head is on the b-block.

use serde::{Deserialize, Serialize};

use super::params::ProtocolParams;
use super::stages::{core_of, padded_sigma, solver_for, ClaimPolicy, ClaimStage, ClaimStep, Clock, ClockStage, ClockStep};
use crate::error::Result;
use crate::interaction::{
    Msg, ProverAction, ProverObs, ProverProgram, ProverRun, RunReport, VerifierAction, VerifierObs, VerifierProgram,
    VerifierRun,
};
use crate::languages::LanguageId;
use crate::machines::Verdict;
use crate::quantum::ModeledSolverSpec;
use crate::rational::{bernoulli, Rational};
use crate::rng::TrialRng;
use crate::tape::{scoped, Move, Tape, LEFT_END, RIGHT_END};

const HASH: char = '#';
const Z: char = 'z';

fn send(head: Move, msg: Msg) -> VerifierAction {
    VerifierAction::Move { head, send: Some(msg) }
}

fn walk(head: Move) -> VerifierAction {
    VerifierAction::Move { head, send: None }
}

#[derive(Clone, Debug)]
pub struct SquareVerifier {
    clock: Clock,
    p_thr: u128,
    coin_thr: u128,
    half_thr: u128,
    c_f: u64,
    d_f: u32,
    sigma: Vec<char>,
}

impl SquareVerifier {
    pub fn new(params: &ProtocolParams) -> Result<Self> {
        params.validate()?;
        Ok(SquareVerifier {
            clock: Clock::from_params(params)?,
            p_thr: params.p.threshold64(),
            coin_thr: Rational::new(1, 2).pow(params.h_v as i32).threshold64(),
            half_thr: Rational::new(1, 2).threshold64(),
            c_f: params.c_f as u64,
            d_f: params.d_f,
            sigma: padded_sigma(LanguageId::Square),
        })
    }
}

#[derive(Clone, Copy, Debug)]
struct Ruler {
    dir: Move,
    skip: bool,
    all_heads: bool,
    expect: Option<char>,
}

#[derive(Clone, Copy, Debug)]
struct Freivalds {
    dir: Move,
    ca: u64,
    ch: u64,
    ha: bool,
    hh: bool,
    wa: bool,
    wh: bool,
    wins: u32,
    last_b_hash: Option<bool>,
}

impl Freivalds {
    fn new(dir: Move) -> Self {
        Freivalds { dir, ca: 0, ch: 0, ha: true, hh: true, wa: false, wh: false, wins: 0, last_b_hash: None }
    }
}

enum Stage<'a> {
    Clock(ClockStage<'a>),
    ToRight,
    ToLeft,
    AwaitAck,
    Ruler(Ruler),
    Freivalds(Freivalds),
}

struct SquareRun<'a> {
    v: &'a SquareVerifier,
    stage: Stage<'a>,
    claim: bool,
    announced: bool,
    branch: Option<&'static str>,
}

impl SquareRun<'_> {
    fn conclude(&self, equal: bool) -> VerifierAction {
        VerifierAction::Halt(if equal == self.claim { Verdict::Accept } else { Verdict::Reject })
    }

    fn ruler(&mut self, mut st: Ruler, obs: VerifierObs, rng: &mut TrialRng) -> VerifierAction {
        let sym = scoped(obs.symbol);
        let mut got_hash = false;
        if let Some(exp) = st.expect.take() {
            if obs.response != Some(Msg::Sym(exp)) {
                return VerifierAction::Halt(Verdict::Reject);
            }
            got_hash = exp == HASH;
        }
        let act = if sym == 'a' {
            st.all_heads &= bernoulli(self.v.coin_thr, rng);
            if st.skip {
                st.skip = false;
                walk(st.dir)
            } else {
                st.expect = Some(Z);
                send(st.dir, Msg::Next)
            }
        } else if got_hash {
            st.dir = st.dir.reverse();
            st.skip = true;
            st.all_heads = true;
            walk(st.dir)
        } else if st.all_heads {
            return VerifierAction::Halt(Verdict::Accept);
        } else {
            st.expect = Some(HASH);
            send(Move::Stay, Msg::Next)
        };
        self.stage = Stage::Ruler(st);
        act
    }

    fn freivalds(&mut self, mut st: Freivalds, obs: VerifierObs, rng: &mut TrialRng) -> VerifierAction {
        let sym = scoped(obs.symbol);
        if let Some(r) = obs.response {
            let is_hash = r == Msg::Sym(HASH);
            st.last_b_hash = Some(is_hash);
            if is_hash {
                st.ch += 1;
                st.hh &= bernoulli(self.v.half_thr, rng);
                self.stage = Stage::Freivalds(st);
                return walk(Move::Stay);
            }
        }
        let act = match sym {
            'a' => {
                st.ca += 1;
                st.ha &= bernoulli(self.v.half_thr, rng);
                walk(st.dir)
            }
            LEFT_END | RIGHT_END => {
                if st.ca % self.v.c_f != st.ch % self.v.c_f || st.last_b_hash == Some(false) {
                    return self.conclude(false);
                }
                if st.ha != st.hh {
                    st.wins += 1;
                    st.wa |= st.ha;
                    st.wh |= st.hh;
                }
                if st.wins == self.v.d_f {
                    return self.conclude(st.wa && st.wh);
                }
                let dir = st.dir.reverse();
                st = Freivalds { dir, wa: st.wa, wh: st.wh, wins: st.wins, ..Freivalds::new(dir) };
                walk(dir)
            }
            _ => send(st.dir, Msg::Next),
        };
        self.stage = Stage::Freivalds(st);
        act
    }
}

impl VerifierRun for SquareRun<'_> {
    fn step(&mut self, obs: VerifierObs, rng: &mut TrialRng) -> Result<VerifierAction> {
        let sym = scoped(obs.symbol);
        Ok(match &mut self.stage {
            Stage::Clock(c) => match c.step(obs, rng)? {
                ClockStep::Act(a) => a,
                ClockStep::Claim(claim) => {
                    self.claim = claim;
                    self.announced = true;
                    self.stage = Stage::ToRight;
                    return self.step(VerifierObs { symbol: obs.symbol, response: None }, rng);
                }
            },
            Stage::ToRight => {
                if sym == RIGHT_END {
                    self.stage = Stage::ToLeft;
                    walk(Move::Left)
                } else {
                    walk(Move::Right)
                }
            }
            Stage::ToLeft => {
                if sym == LEFT_END {
                    self.stage = Stage::AwaitAck;
                    send(Move::Stay, Msg::StartProof)
                } else {
                    walk(Move::Left)
                }
            }
            Stage::AwaitAck => {
                if bernoulli(self.v.p_thr, rng) {
                    self.branch = Some("check-ruler");
                    self.stage = Stage::Ruler(Ruler { dir: Move::Right, skip: true, all_heads: true, expect: None });
                } else {
                    self.branch = Some("freivalds");
                    self.stage = Stage::Freivalds(Freivalds::new(Move::Right));
                }
                walk(Move::Right)
            }
            Stage::Ruler(st) => {
                let st = *st;
                self.ruler(st, obs, rng)
            }
            Stage::Freivalds(st) => {
                let st = *st;
                self.freivalds(st, obs, rng)
            }
        })
    }

    fn report(&self) -> RunReport {
        RunReport {
            claim: self.announced.then_some(self.claim),
            branch: Some(self.branch.unwrap_or("clock").to_string()),
        }
    }
}

impl VerifierProgram for SquareVerifier {
    fn sigma(&self) -> &[char] {
        &self.sigma
    }
    fn spawn<'a>(&'a self, tape: &'a Tape, rng: &mut TrialRng) -> Result<Box<dyn VerifierRun + 'a>> {
        Ok(Box::new(SquareRun {
            v: self,
            stage: Stage::Clock(ClockStage::new(&self.clock, tape, rng)),
            claim: false,
            announced: false,
            branch: None,
        }))
    }
}

/// Which symbol stream the prover sends after its announcement.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RulerPolicy {
    /// Walk the a-block and emit `z^{i-1}#` per pass.
    Honest,
    /// The honest stream with the symbol at `defect` flipped.
    Strategy1 { defect: u64 },
    /// Honest for `lie_after` symbols (default `i·K·2^{k_F·i}`), then steer
    /// Freivalds toward the announced answer.
    Strategy2 { lie_after: Option<u64> },
}

/// Ruler symbol number `s` (0-based) for an a-block of length `i`.
pub fn ruler_symbol(i: usize, s: u64) -> char {
    if i == 0 || (s + 1) % i as u64 == 0 {
        HASH
    } else {
        Z
    }
}

#[derive(Clone, Debug)]
pub struct SquareProver {
    solver: ModeledSolverSpec,
    claim: ClaimPolicy,
    ruler: RulerPolicy,
    horizon_k: (u64, u32),
    sigma: Vec<char>,
}

impl SquareProver {
    pub fn quantum(params: &ProtocolParams) -> Result<Self> {
        Self::new(params, ClaimPolicy::Solver, RulerPolicy::Honest)
    }

    pub fn new(params: &ProtocolParams, claim: ClaimPolicy, ruler: RulerPolicy) -> Result<Self> {
        Ok(SquareProver {
            solver: solver_for(LanguageId::Square, params)?,
            claim,
            ruler,
            horizon_k: (params.big_k, params.k_f),
            sigma: padded_sigma(LanguageId::Square),
        })
    }

    fn horizon(&self, i: usize) -> u64 {
        let p = ProtocolParams { big_k: self.horizon_k.0, k_f: self.horizon_k.1, ..ProtocolParams::square() };
        p.ruler_horizon(i)
    }
}

#[derive(Clone, Copy, Debug)]
enum Proof {
    Park,
    Wait,
    Walk { dir: Move, skip: bool },
    Indexed { sent: u64 },
}

struct SquareProverRun<'a> {
    p: &'a SquareProver,
    claim_stage: ClaimStage,
    claim: Option<bool>,
    i: usize,
    j: usize,
    lie_after: u64,
    proof: Proof,
}

impl SquareProverRun<'_> {
    fn indexed(&self, s: u64) -> char {
        let honest = ruler_symbol(self.i, s);
        match self.p.ruler {
            RulerPolicy::Honest => honest,
            RulerPolicy::Strategy1 { defect } => {
                if s == defect {
                    if honest == HASH {
                        Z
                    } else {
                        HASH
                    }
                } else {
                    honest
                }
            }
            RulerPolicy::Strategy2 { .. } => {
                if s < self.lie_after {
                    honest
                } else if self.claim == Some(true) {
                    let (i, j) = (self.i as u64, self.j as u64);
                    if j == 0 || s % j + i >= j {
                        HASH
                    } else {
                        Z
                    }
                } else {
                    Z
                }
            }
        }
    }
}

impl ProverRun for SquareProverRun<'_> {
    fn step(&mut self, obs: ProverObs, _rng: &mut TrialRng) -> Result<ProverAction> {
        if self.claim.is_none() {
            return Ok(match self.claim_stage.step(obs.fresh) {
                ClaimStep::Act(a) => a,
                ClaimStep::Announced(c) => {
                    self.claim = Some(c);
                    ProverAction::reply(Move::Stay, Msg::from_claim(c))
                }
            });
        }
        let sym = scoped(obs.symbol);
        Ok(match (self.proof, obs.fresh) {
            (Proof::Park, None) => {
                self.proof = Proof::Wait;
                ProverAction::silent(if sym == LEFT_END { Move::Right } else { Move::Stay })
            }
            (Proof::Park | Proof::Wait, Some(Msg::StartProof)) => {
                let honest_walk = self.p.ruler == RulerPolicy::Honest && self.i > 0 && sym == 'a';
                if honest_walk {
                    // Ack, and the skip of the first a in the same step.
                    self.proof = Proof::Walk { dir: Move::Right, skip: false };
                    ProverAction::reply(Move::Right, Msg::Ack)
                } else {
                    self.proof = Proof::Indexed { sent: 0 };
                    ProverAction::reply(Move::Stay, Msg::Ack)
                }
            }
            (Proof::Walk { dir, skip }, fresh) => {
                let asked = fresh == Some(Msg::Next);
                if sym == 'a' {
                    if skip || asked {
                        self.proof = Proof::Walk { dir, skip: false };
                        match fresh {
                            Some(_) => ProverAction::reply(dir, Msg::Sym(Z)),
                            None => ProverAction::silent(dir),
                        }
                    } else {
                        ProverAction::silent(Move::Stay)
                    }
                } else if asked {
                    let back = dir.reverse();
                    self.proof = Proof::Walk { dir: back, skip: true };
                    ProverAction::reply(back, Msg::Sym(HASH))
                } else if let Some(m) = fresh {
                    ProverAction::reply(Move::Stay, if m == Msg::Next { Msg::Sym(HASH) } else { Msg::Ack })
                } else {
                    ProverAction::silent(Move::Stay)
                }
            }
            (Proof::Indexed { sent }, Some(Msg::Next)) => {
                self.proof = Proof::Indexed { sent: sent + 1 };
                ProverAction::reply(Move::Stay, Msg::Sym(self.indexed(sent)))
            }
            (_, Some(_)) => ProverAction::reply(Move::Stay, Msg::Ack),
            (_, None) => ProverAction::silent(Move::Stay),
        })
    }
}

impl ProverProgram for SquareProver {
    fn sigma(&self) -> &[char] {
        &self.sigma
    }
    fn spawn<'a>(&'a self, tape: &'a Tape, rng: &mut TrialRng) -> Result<Box<dyn ProverRun + 'a>> {
        let core = core_of(tape);
        let i = core.chars().take_while(|&c| c == 'a').count();
        let j = core.chars().skip(i).take_while(|&c| c == 'b').count();
        let claim_stage = ClaimStage::new(self.claim, &self.solver, LanguageId::Square, &core, rng)?;
        let lie_after = match self.ruler {
            RulerPolicy::Strategy2 { lie_after: Some(l) } => l,
            _ => self.horizon(i),
        };
        Ok(Box::new(SquareProverRun { p: self, claim_stage, claim: None, i, j, lie_after, proof: Proof::Park }))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::interaction::{run_interaction, run_interaction_recorded, Actor};
    use crate::languages::pad;
    use crate::rng::trial_rng;

    fn params() -> ProtocolParams {
        ProtocolParams { eps_q: Rational::zero(), ..ProtocolParams::square() }
    }

    fn emissions(core: &str, claim: ClaimPolicy, seed: u64) -> (Vec<char>, Option<String>) {
        let p = params();
        let v = SquareVerifier::new(&p).unwrap();
        let q = SquareProver::new(&p, claim, RulerPolicy::Honest).unwrap();
        let w = pad(core).unwrap().render();
        let (out, log) = run_interaction_recorded(&v, &q, &w, &mut trial_rng(seed, 0), p.step_cap).unwrap();
        let syms = log
            .iter()
            .filter_map(|e| match (e.actor, e.symbol) {
                (Actor::Prover, Msg::Sym(c)) => Some(c),
                _ => None,
            })
            .collect();
        (syms, out.report.branch)
    }

    #[test]
    fn walk_matches_ruler_formula() {
        for (core, i) in [("aaabbbbbbbbb", 3), ("ab", 1), ("aabbbb", 2)] {
            for seed in 0..6 {
                let (syms, _) = emissions(core, ClaimPolicy::Solver, seed);
                let oracle: Vec<char> = (0..syms.len() as u64).map(|s| ruler_symbol(i, s)).collect();
                assert_eq!(syms, oracle, "core {core}, seed {seed}");
            }
        }
    }

    #[test]
    fn emission_ignores_claim() {
        for seed in 0..4 {
            assert_eq!(emissions("aabbbb", ClaimPolicy::Yes, seed), emissions("aabbbb", ClaimPolicy::No, seed));
        }
    }

    #[test]
    fn honest_mostly_accepted() {
        let p = params();
        let v = SquareVerifier::new(&p).unwrap();
        let q = SquareProver::quantum(&p).unwrap();
        let w = pad("aabbbb").unwrap().render();
        let acc = (0..400)
            .filter(|&t| run_interaction(&v, &q, &w, &mut trial_rng(2, t), p.step_cap).unwrap().verdict() == Verdict::Accept)
            .count();
        assert!(acc >= 360, "{acc}");
    }

    #[test]
    fn strategy1_dies_in_ruler() {
        let p = params();
        let v = SquareVerifier::new(&p).unwrap();
        let q = SquareProver::new(&p, ClaimPolicy::Random, RulerPolicy::Strategy1 { defect: 0 }).unwrap();
        let w = pad("aabbbb").unwrap().render();
        for t in 0..300 {
            let out = run_interaction(&v, &q, &w, &mut trial_rng(6, t), p.step_cap).unwrap();
            if out.report.branch.as_deref() == Some("check-ruler") {
                assert_eq!(out.verdict(), Verdict::Reject);
            }
        }
    }

    #[test]
    fn strategy2_yes_lie_balances_counts() {
        // i = 2, j = 5: after the lie every pass carries two #s, the last on
        // the last b.
        let q = SquareProver::new(&params(), ClaimPolicy::Yes, RulerPolicy::Strategy2 { lie_after: Some(0) }).unwrap();
        let run = SquareProverRun {
            p: &q,
            claim_stage: ClaimStage::new(ClaimPolicy::Yes, &q.solver, LanguageId::Square, "aabbbbb", &mut trial_rng(0, 0))
                .unwrap(),
            claim: Some(true),
            i: 2,
            j: 5,
            lie_after: 0,
            proof: Proof::Indexed { sent: 0 },
        };
        let pass: String = (0..5).map(|s| run.indexed(s)).collect();
        assert_eq!(pass, "zzz##");
    }
}
