//! Pieces shared by the padded and SQUARE protocols: the verifier's clock
//! stage and the prover's announcement stage.

use serde::{Deserialize, Serialize};

use super::clock::{idealized_halting_time, make_clock, ClockSpec};
use super::params::{ClockMode, ProtocolParams};
use crate::error::{Error, Result};
use crate::interaction::{Msg, ProverAction, VerifierAction, VerifierObs};
use crate::languages::{membership, LanguageId};
use crate::machines::{PtmSpec, Verdict};
use crate::quantum::{modeled_solve, ModeledSolverSpec};
use crate::rational::{bernoulli, Rational};
use crate::rng::TrialRng;
use crate::tape::{Move, Tape, STAR};

/// The clock a protocol verifier polls with.
#[derive(Clone, Debug)]
pub enum Clock {
    Walk(ClockSpec),
    Idealized { c: u64, t: u32 },
}

impl Clock {
    pub fn from_params(params: &ProtocolParams) -> Result<Clock> {
        Ok(match params.clock_mode {
            ClockMode::Walk => Clock::Walk(make_clock(params.c1, params.k, params.eps_premature.to_f64())?),
            ClockMode::Idealized => Clock::Idealized { c: params.c1, t: params.k },
        })
    }
}

enum ClockState<'a> {
    Walk { machine: &'a PtmSpec, state: usize },
    Ideal { left: u64 },
}

pub(crate) enum ClockStep {
    Claim(bool),
    Act(VerifierAction),
}

/// Polls the prover once per clock transition and rejects once the clock
/// has halted without a claim.
pub(crate) struct ClockStage<'a> {
    state: ClockState<'a>,
    halted: bool,
}

impl<'a> ClockStage<'a> {
    pub(crate) fn new(clock: &'a Clock, tape: &Tape, rng: &mut TrialRng) -> Self {
        let state = match clock {
            Clock::Walk(spec) => ClockState::Walk { machine: &spec.machine, state: spec.machine.start() },
            Clock::Idealized { c, t } => {
                ClockState::Ideal { left: idealized_halting_time(*c, *t, tape.input_len(), rng) }
            }
        };
        ClockStage { state, halted: false }
    }

    pub(crate) fn step(&mut self, obs: VerifierObs, rng: &mut TrialRng) -> Result<ClockStep> {
        if let Some(c) = obs.response.and_then(Msg::claim) {
            return Ok(ClockStep::Claim(c));
        }
        if self.halted {
            return Ok(ClockStep::Act(VerifierAction::Halt(Verdict::Reject)));
        }
        let head = match &mut self.state {
            ClockState::Walk { machine, state } => {
                let code = machine
                    .input_code(obs.symbol)
                    .ok_or_else(|| Error::Alphabet { symbol: obs.symbol, context: "clock".into() })?;
                let (to, d) = machine
                    .sample_step_code(*state, code, rng)
                    .ok_or_else(|| Error::MalformedMachine("clock transition missing".into()))?;
                *state = to;
                self.halted = to == machine.accept();
                d
            }
            ClockState::Ideal { left } => {
                *left = left.saturating_sub(1);
                self.halted = *left == 0;
                Move::Stay
            }
        };
        Ok(ClockStep::Act(VerifierAction::Move { head, send: Some(Msg::Query) }))
    }
}

/// How a prover picks the Yes/No answer it announces.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ClaimPolicy {
    /// Run the modeled quantum solver and announce its answer when done.
    Solver,
    /// A fair coin, announced at the first query.
    Random,
    Wrong,
    Right,
    Yes,
    No,
    /// Never announce.
    Never,
}

/// Core of a padded tape: the input up to the first ⋆.
pub fn core_of(tape: &Tape) -> String {
    tape.input().iter().take_while(|&&c| c != STAR).collect()
}

/// Prover-side announcement: answers `StillComputing` until ready.
pub(crate) struct ClaimStage {
    claim: Option<bool>,
    ready_after: u64,
    steps: u64,
}

pub(crate) enum ClaimStep {
    Announced(bool),
    Act(ProverAction),
}

impl ClaimStage {
    pub(crate) fn new(
        policy: ClaimPolicy,
        solver: &ModeledSolverSpec,
        lang: LanguageId,
        core: &str,
        rng: &mut TrialRng,
    ) -> Result<Self> {
        let truth = || membership(lang, core);
        let (claim, ready_after) = match policy {
            ClaimPolicy::Solver => {
                let d = modeled_solve(solver, core, rng)?;
                (Some(d.answer), d.steps)
            }
            ClaimPolicy::Random => (Some(bernoulli(Rational::new(1, 2).threshold64(), rng)), 0),
            ClaimPolicy::Wrong => (Some(!truth()?), 0),
            ClaimPolicy::Right => (Some(truth()?), 0),
            ClaimPolicy::Yes => (Some(true), 0),
            ClaimPolicy::No => (Some(false), 0),
            ClaimPolicy::Never => (None, 0),
        };
        Ok(ClaimStage { claim, ready_after, steps: 0 })
    }

    pub(crate) fn step(&mut self, fresh: Option<Msg>) -> ClaimStep {
        self.steps += 1;
        match (fresh, self.claim) {
            (Some(Msg::Query), Some(c)) if self.steps > self.ready_after => ClaimStep::Announced(c),
            (Some(Msg::Query), _) => ClaimStep::Act(ProverAction::reply(Move::Stay, Msg::StillComputing)),
            _ => ClaimStep::Act(ProverAction::silent(Move::Stay)),
        }
    }
}

pub(crate) fn solver_for(lang: LanguageId, params: &ProtocolParams) -> Result<ModeledSolverSpec> {
    ModeledSolverSpec::new(lang, params.eps_q.clone(), params.k, params.runtime_law.clone())
}

/// Alphabet of a padded protocol over `lang`.
pub(crate) fn padded_sigma(lang: LanguageId) -> Vec<char> {
    let mut s = lang.alphabet().to_vec();
    s.push(STAR);
    s
}
