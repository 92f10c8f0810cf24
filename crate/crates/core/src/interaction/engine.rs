use std::io::Write;

use serde::{Deserialize, Serialize};

use super::msg::Msg;
use crate::error::{Error, Result};
use crate::machines::Verdict;
use crate::rng::TrialRng;
use crate::tape::{Move, Tape, LEFT_END, RIGHT_END};

/// What the verifier sees at the start of a step.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct VerifierObs {
    pub symbol: char,
    /// The prover's reply to the verifier's previous message, if any.
    pub response: Option<Msg>,
}

/// What the prover sees at the start of a step.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ProverObs {
    pub symbol: char,
    /// A verifier symbol not yet consumed; δ_com applies iff this is set.
    pub fresh: Option<Msg>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VerifierAction {
    Move { head: Move, send: Option<Msg> },
    Halt(Verdict),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ProverAction {
    pub head: Move,
    pub respond: Option<Msg>,
}

impl ProverAction {
    pub fn silent(head: Move) -> Self {
        ProverAction { head, respond: None }
    }
    pub fn reply(head: Move, msg: Msg) -> Self {
        ProverAction { head, respond: Some(msg) }
    }
}

/// Protocol-level facts a verifier run can expose after the interaction.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunReport {
    /// Yes/No announcement received from the prover, if any.
    pub claim: Option<bool>,
    /// Name of the last probabilistic branch taken (e.g. `check-ruler`).
    pub branch: Option<String>,
}

pub trait VerifierRun {
    fn step(&mut self, obs: VerifierObs, rng: &mut TrialRng) -> Result<VerifierAction>;
    fn peak_space(&self) -> usize {
        0
    }
    fn report(&self) -> RunReport {
        RunReport::default()
    }
}

pub trait ProverRun {
    fn step(&mut self, obs: ProverObs, rng: &mut TrialRng) -> Result<ProverAction>;
    fn peak_space(&self) -> usize {
        0
    }
}

/// A verifier description; `spawn` builds the per-run state for one input.
pub trait VerifierProgram: Sync {
    fn sigma(&self) -> &[char];
    fn spawn<'a>(&'a self, tape: &'a Tape, rng: &mut TrialRng) -> Result<Box<dyn VerifierRun + 'a>>;
}

pub trait ProverProgram: Sync {
    fn sigma(&self) -> &[char];
    fn spawn<'a>(&'a self, tape: &'a Tape, rng: &mut TrialRng) -> Result<Box<dyn ProverRun + 'a>>;
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct InteractionOutcome {
    pub verdict: Option<Verdict>,
    pub verifier_steps: u64,
    pub prover_steps: u64,
    pub messages_exchanged: u64,
    pub verifier_peak_space: usize,
    pub prover_peak_space: usize,
    #[serde(flatten)]
    pub report: RunReport,
}

impl InteractionOutcome {
    pub fn verdict(&self) -> Verdict {
        self.verdict.unwrap_or(Verdict::Timeout)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Actor {
    Verifier,
    Prover,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TranscriptEntry {
    pub step: u64,
    pub actor: Actor,
    pub symbol: Msg,
}

fn move_head(pos: usize, d: Move, tape: &Tape, who: &str) -> Result<usize> {
    let c = tape.get(pos);
    if (c == LEFT_END && d == Move::Left) || (c == RIGHT_END && d == Move::Right) {
        return Err(Error::MalformedMachine(format!("{who} moved its head past an endmarker at {pos}")));
    }
    Ok(d.apply(pos))
}

fn check_alphabets(v: &dyn VerifierProgram, p: &dyn ProverProgram, w: &str) -> Result<Tape> {
    let (mut a, mut b) = (v.sigma().to_vec(), p.sigma().to_vec());
    a.sort_unstable();
    b.sort_unstable();
    if a != b {
        return Err(Error::Configuration(format!("verifier alphabet {a:?} differs from prover alphabet {b:?}")));
    }
    Tape::checked(w, v.sigma(), "interaction input alphabet")
}

/// Strict alternation: verifier step, then prover step, until a verdict or
/// `step_cap` verifier steps. A verifier that sent a message and finds no
/// reply at the start of its next step rejects on that step.
pub fn run_interaction(
    v: &dyn VerifierProgram,
    p: &dyn ProverProgram,
    w: &str,
    rng: &mut TrialRng,
    step_cap: u64,
) -> Result<InteractionOutcome> {
    run_inner(v, p, w, rng, step_cap, None)
}

/// [`run_interaction`] that also returns every cell write.
pub fn run_interaction_recorded(
    v: &dyn VerifierProgram,
    p: &dyn ProverProgram,
    w: &str,
    rng: &mut TrialRng,
    step_cap: u64,
) -> Result<(InteractionOutcome, Vec<TranscriptEntry>)> {
    let mut log = Vec::new();
    let out = run_inner(v, p, w, rng, step_cap, Some(&mut log))?;
    Ok((out, log))
}

pub fn transcript(
    v: &dyn VerifierProgram,
    p: &dyn ProverProgram,
    w: &str,
    rng: &mut TrialRng,
    step_cap: u64,
) -> Result<Vec<TranscriptEntry>> {
    Ok(run_interaction_recorded(v, p, w, rng, step_cap)?.1)
}

/// CSV dump with columns `step,actor,symbol`.
pub fn transcript_csv(entries: &[TranscriptEntry], out: impl Write) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(out);
    wtr.write_record(["step", "actor", "symbol"])?;
    for e in entries {
        let actor = match e.actor {
            Actor::Verifier => "verifier",
            Actor::Prover => "prover",
        };
        wtr.write_record([e.step.to_string(), actor.to_string(), e.symbol.to_string()])?;
    }
    wtr.flush()?;
    Ok(())
}

fn run_inner(
    v: &dyn VerifierProgram,
    p: &dyn ProverProgram,
    w: &str,
    rng: &mut TrialRng,
    step_cap: u64,
    mut log: Option<&mut Vec<TranscriptEntry>>,
) -> Result<InteractionOutcome> {
    let tape = check_alphabets(v, p, w)?;
    let mut vr = v.spawn(&tape, rng)?;
    let mut pr = p.spawn(&tape, rng)?;
    let (mut vpos, mut ppos) = (0usize, 0usize);
    let mut out = InteractionOutcome::default();
    // Verifier message awaiting consumption by the prover.
    let mut fresh: Option<Msg> = None;
    // Whether the verifier is owed a reply, and the reply once written.
    let mut awaiting = false;
    let mut reply: Option<Msg> = None;

    while out.verifier_steps < step_cap {
        out.verifier_steps += 1;
        if awaiting && reply.is_none() {
            out.verdict = Some(Verdict::Reject);
            break;
        }
        awaiting = false;
        let obs = VerifierObs { symbol: tape.get(vpos), response: reply.take() };
        match vr.step(obs, rng)? {
            VerifierAction::Halt(verdict) => {
                out.verdict = Some(verdict);
                break;
            }
            VerifierAction::Move { head, send } => {
                vpos = move_head(vpos, head, &tape, "verifier")?;
                if let Some(m) = send {
                    fresh = Some(m);
                    awaiting = true;
                    out.messages_exchanged += 1;
                    if let Some(l) = log.as_deref_mut() {
                        l.push(TranscriptEntry { step: out.verifier_steps, actor: Actor::Verifier, symbol: m });
                    }
                }
            }
        }

        out.prover_steps += 1;
        let obs = ProverObs { symbol: tape.get(ppos), fresh: fresh.take() };
        let act = pr.step(obs, rng)?;
        ppos = move_head(ppos, act.head, &tape, "prover")?;
        if let Some(m) = act.respond {
            if obs.fresh.is_none() {
                return Err(Error::MalformedMachine("prover wrote without a fresh verifier symbol".into()));
            }
            reply = Some(m);
            out.messages_exchanged += 1;
            if let Some(l) = log.as_deref_mut() {
                l.push(TranscriptEntry { step: out.prover_steps, actor: Actor::Prover, symbol: m });
            }
        }
    }
    out.verifier_peak_space = vr.peak_space();
    out.prover_peak_space = pr.peak_space();
    out.report = vr.report();
    Ok(out)
}
