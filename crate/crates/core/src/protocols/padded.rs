//! Padded protocol: a clock stage that polls for a Yes/No claim, then the
//! supersafe rounds for M (claim Yes) or M′ (claim No) on the core.

use super::params::ProtocolParams;
use super::stages::{core_of, padded_sigma, solver_for, ClaimPolicy, ClaimStage, ClaimStep, Clock, ClockStage, ClockStep};
use super::supersafe::{fabricate, FabricationPolicy, RoundPolicy, Rounds, Streamer};
use crate::error::Result;
use crate::interaction::{
    Msg, ProverAction, ProverObs, ProverProgram, ProverRun, RunReport, VerifierAction, VerifierObs, VerifierProgram,
    VerifierRun,
};
use crate::languages::LanguageId;
use crate::machines::shipped::machine_pair;
use crate::machines::TwoHeadDfaSpec;
use crate::quantum::ModeledSolverSpec;
use crate::rng::TrialRng;
use crate::tape::{Move, Tape};

#[derive(Clone, Debug)]
pub struct PaddedVerifier {
    lang: LanguageId,
    yes: TwoHeadDfaSpec,
    no: TwoHeadDfaSpec,
    clock: Clock,
    p_thr: u128,
    rounds: usize,
    sigma: Vec<char>,
}

impl PaddedVerifier {
    pub fn new(lang: LanguageId, params: &ProtocolParams) -> Result<Self> {
        params.validate()?;
        let (yes, no) = machine_pair(lang)?;
        Ok(PaddedVerifier {
            lang,
            yes,
            no,
            clock: Clock::from_params(params)?,
            p_thr: params.p.threshold64(),
            rounds: params.m,
            sigma: padded_sigma(lang),
        })
    }
    pub fn lang(&self) -> LanguageId {
        self.lang
    }
    pub fn clock(&self) -> &Clock {
        &self.clock
    }
}

enum VStage<'a> {
    Clock(ClockStage<'a>),
    Verify(Rounds<'a>),
}

struct PaddedRun<'a> {
    v: &'a PaddedVerifier,
    stage: VStage<'a>,
    claim: Option<bool>,
}

impl VerifierRun for PaddedRun<'_> {
    fn step(&mut self, obs: VerifierObs, rng: &mut TrialRng) -> Result<VerifierAction> {
        match &mut self.stage {
            VStage::Clock(clock) => match clock.step(obs, rng)? {
                ClockStep::Act(a) => Ok(a),
                ClockStep::Claim(c) => {
                    self.claim = Some(c);
                    let m = if c { &self.v.yes } else { &self.v.no };
                    let mut rounds = Rounds::new(m, self.v.p_thr, self.v.rounds)?;
                    let act = rounds.step(VerifierObs { symbol: obs.symbol, response: None }, rng)?;
                    self.stage = VStage::Verify(rounds);
                    Ok(act)
                }
            },
            VStage::Verify(rounds) => rounds.step(obs, rng),
        }
    }

    fn report(&self) -> RunReport {
        let branch = match &self.stage {
            VStage::Clock(_) => Some("clock".to_string()),
            VStage::Verify(r) => r.last_branch.map(str::to_string),
        };
        RunReport { claim: self.claim, branch }
    }
}

impl VerifierProgram for PaddedVerifier {
    fn sigma(&self) -> &[char] {
        &self.sigma
    }
    fn spawn<'a>(&'a self, tape: &'a Tape, rng: &mut TrialRng) -> Result<Box<dyn VerifierRun + 'a>> {
        Ok(Box::new(PaddedRun { v: self, stage: VStage::Clock(ClockStage::new(&self.clock, tape, rng)), claim: None }))
    }
}

/// Prover for [`PaddedVerifier`]. With [`ClaimPolicy::Solver`] and truthful
/// rounds this is the honest quantum prover.
#[derive(Clone, Debug)]
pub struct PaddedProver {
    lang: LanguageId,
    yes: TwoHeadDfaSpec,
    no: TwoHeadDfaSpec,
    solver: ModeledSolverSpec,
    claim: ClaimPolicy,
    rounds: RoundPolicy,
    fabrication: FabricationPolicy,
    sigma: Vec<char>,
}

impl PaddedProver {
    pub fn quantum(lang: LanguageId, params: &ProtocolParams) -> Result<Self> {
        Self::new(lang, params, ClaimPolicy::Solver, RoundPolicy::Truthful, FabricationPolicy::DriveToAccept)
    }

    pub fn new(
        lang: LanguageId,
        params: &ProtocolParams,
        claim: ClaimPolicy,
        rounds: RoundPolicy,
        fabrication: FabricationPolicy,
    ) -> Result<Self> {
        let (yes, no) = machine_pair(lang)?;
        Ok(PaddedProver {
            lang,
            yes,
            no,
            solver: solver_for(lang, params)?,
            claim,
            rounds,
            fabrication,
            sigma: padded_sigma(lang),
        })
    }
}

struct PaddedProverRun<'a> {
    p: &'a PaddedProver,
    tape: &'a Tape,
    claim: ClaimStage,
    proof: Option<Streamer<'a>>,
}

impl ProverRun for PaddedProverRun<'_> {
    fn step(&mut self, obs: ProverObs, rng: &mut TrialRng) -> Result<ProverAction> {
        if let Some(s) = &mut self.proof {
            return s.step(obs, rng);
        }
        match self.claim.step(obs.fresh) {
            ClaimStep::Act(a) => Ok(a),
            ClaimStep::Announced(c) => {
                let m = if c { &self.p.yes } else { &self.p.no };
                let fab = match self.p.rounds {
                    RoundPolicy::Truthful => None,
                    _ => Some(fabricate(m, self.tape, self.p.fabrication)),
                };
                self.proof = Some(Streamer::new(m, &self.p.rounds, fab)?);
                Ok(ProverAction::reply(Move::Stay, Msg::from_claim(c)))
            }
        }
    }
}

impl ProverProgram for PaddedProver {
    fn sigma(&self) -> &[char] {
        &self.sigma
    }
    fn spawn<'a>(&'a self, tape: &'a Tape, rng: &mut TrialRng) -> Result<Box<dyn ProverRun + 'a>> {
        let claim = ClaimStage::new(self.claim, &self.solver, self.lang, &core_of(tape), rng)?;
        Ok(Box::new(PaddedProverRun { p: self, tape, claim, proof: None }))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::interaction::{run_interaction, run_interaction_recorded, Actor};
    use crate::languages::pad;
    use crate::machines::{supersafe_trajectory, Verdict};
    use crate::quantum::RuntimeLaw;
    use crate::rational::Rational;
    use crate::rng::trial_rng;

    fn params() -> ProtocolParams {
        ProtocolParams { eps_q: Rational::zero(), ..ProtocolParams::padded() }
    }

    #[test]
    fn honest_announces_and_streams() {
        let p = params();
        let v = PaddedVerifier::new(LanguageId::Pal, &p).unwrap();
        let q = PaddedProver::quantum(LanguageId::Pal, &p).unwrap();
        let w = pad("aba").unwrap().render();
        let (out, log) = run_interaction_recorded(&v, &q, &w, &mut trial_rng(4, 0), p.step_cap).unwrap();
        assert_eq!(out.verdict(), Verdict::Accept);
        assert_eq!(out.report.claim, Some(true));
        let claim = log.iter().find(|e| e.actor == Actor::Prover && e.symbol != Msg::StillComputing).unwrap();
        assert_eq!(claim.symbol, Msg::Yes);
        // Each round's readings are N1's trajectory on the core.
        let traj = supersafe_trajectory(&v.yes, "aba").unwrap();
        let core = Tape::new("aba");
        let oracle: Vec<Msg> = traj.iter().map(|&i| Msg::Sym(core.get(i))).collect();
        let mut rounds: Vec<Vec<Msg>> = Vec::new();
        for e in &log {
            match (e.actor, e.symbol) {
                (Actor::Verifier, Msg::StartRound) => rounds.push(Vec::new()),
                (Actor::Prover, m @ Msg::Sym(_)) => rounds.last_mut().unwrap().push(m),
                _ => {}
            }
        }
        assert_eq!(rounds.len(), p.m);
        for (r, got) in rounds.iter().enumerate() {
            // SIM-M rounds may stop early when M accepts.
            assert!(oracle.starts_with(got), "round {r}: {got:?}");
        }
    }

    #[test]
    fn slow_solver_times_out_at_clock() {
        // A solver slower than any clock run: the verifier rejects.
        let p = ProtocolParams { k: 1, c1: 1, ..params() };
        let v = PaddedVerifier::new(LanguageId::Pal, &p).unwrap();
        let mut q = PaddedProver::quantum(LanguageId::Pal, &p).unwrap();
        q.solver = ModeledSolverSpec::new(LanguageId::Pal, Rational::zero(), 40, RuntimeLaw::Deterministic).unwrap();
        let w = pad("ab").unwrap().render();
        let out = run_interaction(&v, &q, &w, &mut trial_rng(0, 0), p.step_cap).unwrap();
        assert_eq!(out.verdict(), Verdict::Reject);
        assert_eq!(out.report.claim, None);
    }

    #[test]
    fn no_answer_rejected() {
        let p = params();
        let v = PaddedVerifier::new(LanguageId::Twin, &p).unwrap();
        let q = PaddedProver::new(LanguageId::Twin, &p, ClaimPolicy::Never, RoundPolicy::Truthful, FabricationPolicy::Loop)
            .unwrap();
        let w = pad("a#a").unwrap().render();
        for t in 0..20 {
            assert_eq!(run_interaction(&v, &q, &w, &mut trial_rng(3, t), p.step_cap).unwrap().verdict(), Verdict::Reject);
        }
    }

    #[test]
    fn wrong_claim_with_truthful_rounds() {
        // Claiming No on a member: M′ rejects in SIM-M, SIM-N1 passes.
        let p = params();
        let v = PaddedVerifier::new(LanguageId::Pal, &p).unwrap();
        let q = PaddedProver::new(LanguageId::Pal, &p, ClaimPolicy::Wrong, RoundPolicy::Truthful, FabricationPolicy::Loop)
            .unwrap();
        let w = pad("abba").unwrap().render();
        let mut rej = 0;
        for t in 0..300 {
            if run_interaction(&v, &q, &w, &mut trial_rng(8, t), p.step_cap).unwrap().verdict() == Verdict::Reject {
                rej += 1;
            }
        }
        // 1 − (4/5)^51 ≈ 1.
        assert!(rej >= 297, "{rej}");
    }
}
