//! Round-based verification of a two-head machine whose supersafe head is
//! played by the prover.
//!
//! Each round the verifier walks to the (virtual) right end and back, sends
//! `StartRound`, and on the `Ack` picks SIM-M with probability `p` or SIM-N1
//! otherwise. In both branches it asks for one reading per step with `Next`.
//! SIM-N1 checks each reading against its own copy of the companion run;
//! SIM-M feeds the readings to M as the supersafe head and uses its own head
//! as the other one. `RoundOver` closes a round. After `m` rounds it accepts.
//!
//! All reads go through [`scoped`], so on padded tapes the first ⋆ is the
//! right end.

use std::collections::{HashMap, HashSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::interaction::{
    Msg, ProverAction, ProverObs, ProverProgram, ProverRun, RunReport, VerifierAction, VerifierObs, VerifierProgram,
    VerifierRun,
};
use crate::machines::{PtmSpec, TwoHeadDfaSpec, Verdict};
use crate::rational::{bernoulli, Rational};
use crate::rng::TrialRng;
use crate::tape::{scoped, Move, Tape, LEFT_END, RIGHT_END};

fn companion(m: &TwoHeadDfaSpec) -> Result<(&PtmSpec, u8)> {
    match (m.supersafe_head(), m.companion()) {
        (Some(h), Some(c)) => Ok((c, h)),
        _ => Err(Error::Precondition("machine has no supersafe head".into())),
    }
}

fn send(head: Move, msg: Msg) -> VerifierAction {
    VerifierAction::Move { head, send: Some(msg) }
}

fn walk(head: Move) -> VerifierAction {
    VerifierAction::Move { head, send: None }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Phase {
    ToRight,
    ToLeft,
    AwaitAck,
    SimN1(usize),
    SimM(usize),
    AwaitRoundAck,
}

/// Verifier-side state for `m` rounds; reused by the padded protocol.
pub(crate) struct Rounds<'a> {
    m: &'a TwoHeadDfaSpec,
    n1: &'a PtmSpec,
    head: u8,
    p_thr: u128,
    rounds: usize,
    finished: usize,
    phase: Phase,
    pub(crate) sim_m_rounds: usize,
    pub(crate) last_branch: Option<&'static str>,
}

impl<'a> Rounds<'a> {
    pub(crate) fn new(m: &'a TwoHeadDfaSpec, p_thr: u128, rounds: usize) -> Result<Self> {
        let (n1, head) = companion(m)?;
        Ok(Rounds {
            m,
            n1,
            head,
            p_thr,
            rounds,
            finished: 0,
            phase: Phase::ToRight,
            sim_m_rounds: 0,
            last_branch: None,
        })
    }

    pub(crate) fn step(&mut self, obs: VerifierObs, rng: &mut TrialRng) -> Result<VerifierAction> {
        let sym = scoped(obs.symbol);
        Ok(match self.phase {
            Phase::ToRight => {
                if sym == RIGHT_END {
                    self.phase = Phase::ToLeft;
                    walk(Move::Left)
                } else {
                    walk(Move::Right)
                }
            }
            Phase::ToLeft => {
                if sym == LEFT_END {
                    self.phase = Phase::AwaitAck;
                    send(Move::Stay, Msg::StartRound)
                } else {
                    walk(Move::Left)
                }
            }
            Phase::AwaitAck => {
                if bernoulli(self.p_thr, rng) {
                    self.phase = Phase::SimM(self.m.start());
                    self.sim_m_rounds += 1;
                    self.last_branch = Some("sim-m");
                } else {
                    self.phase = Phase::SimN1(self.n1.start());
                    self.last_branch = Some("sim-n1");
                }
                send(Move::Stay, Msg::Next)
            }
            Phase::SimN1(s) => {
                if obs.response != Some(Msg::Sym(sym)) {
                    return Ok(VerifierAction::Halt(Verdict::Reject));
                }
                let code = self.n1.input_code(sym).ok_or_else(|| bad_symbol(sym))?;
                let (to, d) = self
                    .n1
                    .det_step_code(s, code)
                    .ok_or_else(|| Error::MalformedMachine(format!("companion undefined on {sym:?}")))?;
                if self.n1.is_halting(to) {
                    self.phase = Phase::AwaitRoundAck;
                    send(Move::Stay, Msg::RoundOver)
                } else {
                    self.phase = Phase::SimN1(to);
                    send(d, Msg::Next)
                }
            }
            Phase::SimM(s) => {
                let Some(Msg::Sym(got)) = obs.response else {
                    return Ok(VerifierAction::Halt(Verdict::Reject));
                };
                let Some(got) = self.m.code(got) else {
                    return Ok(VerifierAction::Halt(Verdict::Reject));
                };
                let own = self.m.code(sym).ok_or_else(|| bad_symbol(sym))?;
                let (to, own_move) = if self.head == 1 {
                    let (to, _, d2) = self.m.step_code(s, got, own);
                    (to, d2)
                } else {
                    let (to, d1, _) = self.m.step_code(s, own, got);
                    (to, d1)
                };
                if to == self.m.reject() {
                    VerifierAction::Halt(Verdict::Reject)
                } else if to == self.m.accept() {
                    self.phase = Phase::AwaitRoundAck;
                    send(Move::Stay, Msg::RoundOver)
                } else {
                    self.phase = Phase::SimM(to);
                    send(own_move, Msg::Next)
                }
            }
            Phase::AwaitRoundAck => {
                self.finished += 1;
                if self.finished == self.rounds {
                    return Ok(VerifierAction::Halt(Verdict::Accept));
                }
                self.phase = Phase::ToRight;
                return self.step(VerifierObs { symbol: obs.symbol, response: None }, rng);
            }
        })
    }
}

fn bad_symbol(c: char) -> Error {
    Error::Alphabet { symbol: c, context: "supersafe verifier".into() }
}

/// Verifier for L(M) with SIM-M probability `p` and `m` rounds.
#[derive(Clone, Debug)]
pub struct SupersafeVerifier {
    machine: TwoHeadDfaSpec,
    p: Rational,
    p_thr: u128,
    rounds: usize,
}

impl SupersafeVerifier {
    pub fn new(machine: TwoHeadDfaSpec, p: Rational, rounds: usize) -> Result<Self> {
        companion(&machine)?;
        if !p.in_unit_interval() || rounds == 0 {
            return Err(Error::Configuration(format!("need p in [0,1] and m >= 1, got p={p}, m={rounds}")));
        }
        Ok(SupersafeVerifier { p_thr: p.threshold64(), machine, p, rounds })
    }
    pub fn p(&self) -> &Rational {
        &self.p
    }
    pub fn rounds(&self) -> usize {
        self.rounds
    }
}

struct RoundsRun<'a>(Rounds<'a>);

impl VerifierRun for RoundsRun<'_> {
    fn step(&mut self, obs: VerifierObs, rng: &mut TrialRng) -> Result<VerifierAction> {
        self.0.step(obs, rng)
    }
    fn report(&self) -> RunReport {
        RunReport { claim: None, branch: self.0.last_branch.map(str::to_string) }
    }
}

impl VerifierProgram for SupersafeVerifier {
    fn sigma(&self) -> &[char] {
        self.machine.sigma()
    }
    fn spawn<'a>(&'a self, _tape: &'a Tape, _rng: &mut TrialRng) -> Result<Box<dyn VerifierRun + 'a>> {
        Ok(Box::new(RoundsRun(Rounds::new(&self.machine, self.p_thr, self.rounds)?)))
    }
}

/// How a lying prover picks fake readings for a round it fabricates.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FabricationPolicy {
    /// Shortest stream that makes M accept; falls back to `Loop`.
    #[default]
    DriveToAccept,
    /// A stream that keeps M running forever; falls back to `DriveToAccept`.
    Loop,
}

/// A reading stream `prefix · cycle^ω` (or `prefix` then its last symbol
/// repeated when `cycle` is empty).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Fabrication {
    pub prefix: Vec<char>,
    pub cycle: Vec<char>,
}

impl Fabrication {
    pub fn at(&self, i: usize) -> char {
        if i < self.prefix.len() {
            self.prefix[i]
        } else if self.cycle.is_empty() {
            self.prefix.last().copied().unwrap_or(LEFT_END)
        } else {
            self.cycle[(i - self.prefix.len()) % self.cycle.len()]
        }
    }
}

/// Precomputes fake readings for M on the core of `tape`. The search runs
/// over pairs (state of M, position of the verifier's head).
pub fn fabricate(m: &TwoHeadDfaSpec, tape: &Tape, policy: FabricationPolicy) -> Fabrication {
    let first = match policy {
        FabricationPolicy::DriveToAccept => accept_path(m, tape),
        FabricationPolicy::Loop => lasso(m, tape),
    };
    first
        .or_else(|| match policy {
            FabricationPolicy::DriveToAccept => lasso(m, tape),
            FabricationPolicy::Loop => accept_path(m, tape),
        })
        .unwrap_or(Fabrication { prefix: vec![LEFT_END], cycle: vec![] })
}

type Node = (usize, usize);

fn successors(m: &TwoHeadDfaSpec, tape: &Tape, (s, h): Node) -> Vec<(char, usize, usize)> {
    let own = scoped(tape.get(h));
    let head = m.supersafe_head().unwrap_or(1);
    m.input_symbols()
        .into_iter()
        .filter_map(|g| {
            let (a, b) = if head == 1 { (g, own) } else { (own, g) };
            let (to, d1, d2) = m.step(s, a, b)?;
            let d = if head == 1 { d2 } else { d1 };
            Some((g, to, d.apply(h)))
        })
        .collect()
}

fn accept_path(m: &TwoHeadDfaSpec, tape: &Tape) -> Option<Fabrication> {
    let start = (m.start(), 0usize);
    let mut parent: HashMap<Node, (Node, char)> = HashMap::new();
    let mut seen = HashSet::from([start]);
    let mut queue = VecDeque::from([start]);
    while let Some(node) = queue.pop_front() {
        for (g, to, h) in successors(m, tape, node) {
            if to == m.accept() {
                let mut path = vec![g];
                let mut cur = node;
                while let Some(&(prev, c)) = parent.get(&cur) {
                    path.push(c);
                    cur = prev;
                }
                path.reverse();
                return Some(Fabrication { prefix: path, cycle: vec![] });
            }
            if to != m.reject() && seen.insert((to, h)) {
                parent.insert((to, h), (node, g));
                queue.push_back((to, h));
            }
        }
    }
    None
}

fn lasso(m: &TwoHeadDfaSpec, tape: &Tape) -> Option<Fabrication> {
    // Iterative DFS; a back edge to a node on the stack closes a cycle.
    let start = (m.start(), 0usize);
    let mut on_stack: HashMap<Node, usize> = HashMap::new();
    let mut done: HashSet<Node> = HashSet::new();
    let mut stack: Vec<(Node, Vec<(char, usize, usize)>)> = vec![(start, successors(m, tape, start))];
    let mut labels: Vec<char> = Vec::new();
    on_stack.insert(start, 0);
    while let Some((node, succ)) = stack.last_mut() {
        let node = *node;
        match succ.pop() {
            Some((g, to, h)) => {
                if to == m.accept() || to == m.reject() || done.contains(&(to, h)) {
                    continue;
                }
                if let Some(&depth) = on_stack.get(&(to, h)) {
                    let prefix = labels[..depth].to_vec();
                    let mut cycle = labels[depth..].to_vec();
                    cycle.push(g);
                    return Some(Fabrication { prefix, cycle });
                }
                labels.push(g);
                on_stack.insert((to, h), stack.len());
                let next = successors(m, tape, (to, h));
                stack.push(((to, h), next));
            }
            None => {
                on_stack.remove(&node);
                done.insert(node);
                stack.pop();
                labels.pop();
            }
        }
    }
    None
}

/// Whether the prover plays a round honestly or fabricates it.
#[derive(Clone, Debug, PartialEq)]
pub enum RoundPolicy {
    Truthful,
    Fabricate,
    /// Truthful in round i with probability t_i (1-based; the last entry
    /// repeats past the end).
    Mix(Vec<Rational>),
}

impl RoundPolicy {
    fn thresholds(&self) -> Vec<u128> {
        match self {
            RoundPolicy::Truthful => vec![1u128 << 64],
            RoundPolicy::Fabricate => vec![0],
            RoundPolicy::Mix(t) => t.iter().map(Rational::threshold64).collect(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum ProverPhase {
    Reposition,
    Stream(usize),
    Fabricated(usize),
    Spent,
}

/// Prover-side round handling; reused by the padded protocol.
pub(crate) struct Streamer<'a> {
    n1: &'a PtmSpec,
    truth: Vec<u128>,
    fabrication: Option<Fabrication>,
    round: usize,
    phase: ProverPhase,
}

impl<'a> Streamer<'a> {
    pub(crate) fn new(m: &'a TwoHeadDfaSpec, policy: &RoundPolicy, fabrication: Option<Fabrication>) -> Result<Self> {
        let (n1, _) = companion(m)?;
        if let RoundPolicy::Mix(t) = policy {
            if t.is_empty() || t.iter().any(|x| !x.in_unit_interval()) {
                return Err(Error::Configuration("mix probabilities must lie in [0,1]".into()));
            }
        }
        Ok(Streamer { n1, truth: policy.thresholds(), fabrication, round: 0, phase: ProverPhase::Reposition })
    }

    pub(crate) fn step(&mut self, obs: ProverObs, rng: &mut TrialRng) -> Result<ProverAction> {
        let sym = scoped(obs.symbol);
        let park = if obs.symbol == LEFT_END { Move::Stay } else { Move::Left };
        Ok(match obs.fresh {
            Some(Msg::StartRound) => {
                let thr = self.truth[self.round.min(self.truth.len() - 1)];
                self.round += 1;
                let honest = self.fabrication.is_none() || bernoulli(thr, rng);
                self.phase = if honest { ProverPhase::Stream(self.n1.start()) } else { ProverPhase::Fabricated(0) };
                ProverAction::reply(Move::Stay, Msg::Ack)
            }
            Some(Msg::Next) => match self.phase {
                ProverPhase::Stream(s) => {
                    let code = self.n1.input_code(sym).ok_or_else(|| bad_symbol(sym))?;
                    let (to, d) = self
                        .n1
                        .det_step_code(s, code)
                        .ok_or_else(|| Error::MalformedMachine(format!("companion undefined on {sym:?}")))?;
                    if self.n1.is_halting(to) {
                        self.phase = ProverPhase::Spent;
                        ProverAction::reply(Move::Stay, Msg::Sym(sym))
                    } else {
                        self.phase = ProverPhase::Stream(to);
                        ProverAction::reply(d, Msg::Sym(sym))
                    }
                }
                ProverPhase::Fabricated(i) => {
                    self.phase = ProverPhase::Fabricated(i + 1);
                    let c = self.fabrication.as_ref().map_or(sym, |f| f.at(i));
                    ProverAction::reply(Move::Stay, Msg::Sym(c))
                }
                _ => ProverAction::reply(Move::Stay, Msg::Sym(sym)),
            },
            Some(Msg::RoundOver) => {
                self.phase = ProverPhase::Reposition;
                ProverAction::reply(park, Msg::Ack)
            }
            Some(_) => ProverAction::reply(Move::Stay, Msg::Ack),
            None => match self.phase {
                ProverPhase::Reposition => ProverAction::silent(park),
                _ => ProverAction::silent(Move::Stay),
            },
        })
    }
}

/// Prover for [`SupersafeVerifier`]: honest streaming or a lying variant.
#[derive(Clone, Debug)]
pub struct SupersafeProver {
    machine: TwoHeadDfaSpec,
    policy: RoundPolicy,
    fabrication: FabricationPolicy,
}

impl SupersafeProver {
    pub fn honest(machine: TwoHeadDfaSpec) -> Result<Self> {
        Self::new(machine, RoundPolicy::Truthful, FabricationPolicy::DriveToAccept)
    }
    pub fn new(machine: TwoHeadDfaSpec, policy: RoundPolicy, fabrication: FabricationPolicy) -> Result<Self> {
        companion(&machine)?;
        Ok(SupersafeProver { machine, policy, fabrication })
    }
}

struct StreamerRun<'a>(Streamer<'a>);

impl ProverRun for StreamerRun<'_> {
    fn step(&mut self, obs: ProverObs, rng: &mut TrialRng) -> Result<ProverAction> {
        self.0.step(obs, rng)
    }
}

impl ProverProgram for SupersafeProver {
    fn sigma(&self) -> &[char] {
        self.machine.sigma()
    }
    fn spawn<'a>(&'a self, tape: &'a Tape, _rng: &mut TrialRng) -> Result<Box<dyn ProverRun + 'a>> {
        let fab = match self.policy {
            RoundPolicy::Truthful => None,
            _ => Some(fabricate(&self.machine, tape, self.fabrication)),
        };
        Ok(Box::new(StreamerRun(Streamer::new(&self.machine, &self.policy, fab)?)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::interaction::{run_interaction, run_interaction_recorded, Actor, MuteProver};
    use crate::machines::shipped::{eq_machine, pal_machine};
    use crate::machines::supersafe_trajectory;
    use crate::rng::trial_rng;

    fn readings(w: &str, rounds: usize) -> Vec<Vec<Msg>> {
        let v = SupersafeVerifier::new(eq_machine(), Rational::zero(), rounds).unwrap();
        let p = SupersafeProver::honest(eq_machine()).unwrap();
        let (out, log) = run_interaction_recorded(&v, &p, w, &mut trial_rng(0, 0), 10_000).unwrap();
        assert_eq!(out.verdict(), Verdict::Accept);
        let mut per_round = Vec::new();
        for e in log {
            match (e.actor, e.symbol) {
                (Actor::Verifier, Msg::StartRound) => per_round.push(Vec::new()),
                (Actor::Prover, m @ Msg::Sym(_)) => per_round.last_mut().unwrap().push(m),
                _ => {}
            }
        }
        per_round
    }

    #[test]
    fn honest_readings_follow_companion() {
        let expect: Vec<Msg> = "▷ab◁ba▷".chars().map(Msg::Sym).collect();
        assert_eq!(readings("ab", 1), vec![expect]);
        let tape = Tape::new("aabb");
        let traj = supersafe_trajectory(&eq_machine(), "aabb").unwrap();
        let oracle: Vec<Msg> = traj.iter().map(|&i| Msg::Sym(tape.get(i))).collect();
        assert_eq!(readings("aabb", 3), vec![oracle.clone(), oracle.clone(), oracle]);
        let empty: Vec<Msg> = "▷◁▷".chars().map(Msg::Sym).collect();
        assert_eq!(readings("", 1), vec![empty]);
    }

    #[test]
    fn honest_prover_always_accepted() {
        let v = SupersafeVerifier::new(eq_machine(), Rational::new(1, 4), 5).unwrap();
        let p = SupersafeProver::honest(eq_machine()).unwrap();
        for t in 0..200 {
            let out = run_interaction(&v, &p, "abba", &mut trial_rng(5, t), 100_000).unwrap();
            assert_eq!(out.verdict, Some(Verdict::Accept));
        }
    }

    #[test]
    fn mute_prover_rejected() {
        let v = SupersafeVerifier::new(eq_machine(), Rational::new(1, 4), 5).unwrap();
        let p = MuteProver { sigma: vec!['a', 'b'] };
        let out = run_interaction(&v, &p, "ab", &mut trial_rng(1, 0), 1000).unwrap();
        assert_eq!(out.verdict, Some(Verdict::Reject));
    }

    #[test]
    fn honest_non_member_rejected_in_sim_m() {
        // Truthful rounds on w ∉ L pass SIM-N1 and die in SIM-M.
        let v = SupersafeVerifier::new(eq_machine(), Rational::new(1, 2), 4).unwrap();
        let p = SupersafeProver::honest(eq_machine()).unwrap();
        let mut rejects = 0;
        for t in 0..2000 {
            if run_interaction(&v, &p, "aab", &mut trial_rng(9, t), 100_000).unwrap().verdict() == Verdict::Reject {
                rejects += 1;
            }
        }
        // 1 - (1/2)^4 = 0.9375
        assert!((rejects as f64 / 2000.0 - 0.9375).abs() < 0.03, "{rejects}");
    }

    #[test]
    fn fabrications() {
        let m = eq_machine();
        let tape = Tape::new("aab");
        let acc = fabricate(&m, &tape, FabricationPolicy::DriveToAccept);
        assert!(acc.cycle.is_empty());
        // Replaying the stream against the real second head must accept.
        let (mut s, mut h) = (m.start(), 0usize);
        for &g in &acc.prefix {
            let (to, _, d2) = m.step(s, g, tape.get(h)).unwrap();
            s = to;
            h = d2.apply(h);
        }
        assert_eq!(s, m.accept());
        let lp = fabricate(&m, &tape, FabricationPolicy::Loop);
        assert!(!lp.cycle.is_empty());
        let (mut s, mut h) = (m.start(), 0usize);
        for i in 0..200 {
            let (to, _, d2) = m.step(s, lp.at(i), tape.get(h)).unwrap();
            assert!(!m.is_halting(to));
            s = to;
            h = d2.apply(h);
        }
        assert!(!fabricate(&pal_machine(), &Tape::new("ab"), FabricationPolicy::Loop).cycle.is_empty());
    }

    #[test]
    fn always_lying_is_caught_in_sim_n1() {
        let v = SupersafeVerifier::new(eq_machine(), Rational::zero(), 3).unwrap();
        let p = SupersafeProver::new(eq_machine(), RoundPolicy::Fabricate, FabricationPolicy::DriveToAccept).unwrap();
        let out = run_interaction(&v, &p, "aab", &mut trial_rng(2, 0), 10_000).unwrap();
        assert_eq!(out.verdict, Some(Verdict::Reject));
        assert_eq!(out.report.branch.as_deref(), Some("sim-n1"));
    }

    #[test]
    fn loop_policy_stalls_sim_m() {
        let v = SupersafeVerifier::new(eq_machine(), Rational::one(), 3).unwrap();
        let p = SupersafeProver::new(eq_machine(), RoundPolicy::Fabricate, FabricationPolicy::Loop).unwrap();
        let out = run_interaction(&v, &p, "aab", &mut trial_rng(2, 0), 5_000).unwrap();
        assert_eq!(out.verdict(), Verdict::Timeout);
    }
}
