//! Batches of independent interactions.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::interaction::{run_interaction, InteractionOutcome};
use crate::machines::Verdict;
use crate::protocols::{ProtocolId, ProtocolParams, ProverChoice};
use crate::rational::Rational;
use crate::rng::trial_rng;

/// What the harness keeps from one interaction.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub verdict: Verdict,
    pub verifier_steps: u64,
    pub claim: Option<bool>,
    pub branch: Option<String>,
}

impl From<InteractionOutcome> for TrialRecord {
    fn from(o: InteractionOutcome) -> Self {
        TrialRecord { verdict: o.verdict(), verifier_steps: o.verifier_steps, claim: o.report.claim, branch: o.report.branch }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialBatch {
    pub protocol: ProtocolId,
    pub input: String,
    pub prover: ProverChoice,
    pub params: ProtocolParams,
    pub trials: u64,
    pub seed: u64,
    pub accept: u64,
    pub reject: u64,
    pub timeout: u64,
    pub steps_mean: f64,
    pub steps_p50: u64,
    pub steps_p99: u64,
    pub space_peak: usize,
    /// Per-trial records in trial-index order.
    pub records: Vec<TrialRecord>,
}

impl TrialBatch {
    pub fn accept_rate(&self) -> f64 {
        self.accept as f64 / self.trials as f64
    }
    pub fn reject_rate(&self) -> f64 {
        self.reject as f64 / self.trials as f64
    }
    pub fn non_reject(&self) -> u64 {
        self.trials - self.reject
    }
    /// Fraction of trials that halted, exactly.
    pub fn halting_fraction(&self) -> Rational {
        Rational::new((self.accept + self.reject) as i64, self.trials as i64)
    }
    pub fn timeout_fraction(&self) -> Rational {
        Rational::new(self.timeout as i64, self.trials as i64)
    }
    /// Records whose claim is present and satisfies `pred`.
    pub fn with_claim(&self, pred: impl Fn(bool) -> bool) -> impl Iterator<Item = &TrialRecord> {
        self.records.iter().filter(move |r| r.claim.is_some_and(&pred))
    }
}

/// Nearest-rank percentile of a sorted slice.
fn percentile(sorted: &[u64], q: f64) -> u64 {
    if sorted.is_empty() {
        return 0;
    }
    let rank = ((q * sorted.len() as f64).ceil() as usize).clamp(1, sorted.len());
    sorted[rank - 1]
}

/// Runs `n` interactions; trial `i` draws from stream `i` of `seed`, so the
/// result does not depend on thread scheduling.
pub fn run_trials(
    protocol: ProtocolId,
    input: &str,
    prover: &ProverChoice,
    params: &ProtocolParams,
    n: u64,
    seed: u64,
) -> Result<TrialBatch> {
    if n == 0 {
        return Err(Error::Configuration("a batch needs at least one trial".into()));
    }
    let v = protocol.verifier(params)?;
    let p = protocol.prover(prover, params)?;
    let outcomes: Vec<(TrialRecord, usize)> = (0..n)
        .into_par_iter()
        .map(|t| {
            let out = run_interaction(v.as_ref(), p.as_ref(), input, &mut trial_rng(seed, t), params.step_cap)?;
            let space = out.verifier_peak_space;
            Ok((TrialRecord::from(out), space))
        })
        .collect::<Result<_>>()?;
    let (mut accept, mut reject, mut timeout, mut space_peak) = (0, 0, 0, 0);
    let mut steps: Vec<u64> = Vec::with_capacity(outcomes.len());
    let mut records = Vec::with_capacity(outcomes.len());
    for (r, space) in outcomes {
        match r.verdict {
            Verdict::Accept => accept += 1,
            Verdict::Reject => reject += 1,
            Verdict::Timeout => timeout += 1,
        }
        steps.push(r.verifier_steps);
        space_peak = space_peak.max(space);
        records.push(r);
    }
    let steps_mean = steps.iter().map(|&s| s as f64).sum::<f64>() / n as f64;
    steps.sort_unstable();
    Ok(TrialBatch {
        protocol,
        input: input.to_string(),
        prover: prover.clone(),
        params: params.clone(),
        trials: n,
        seed,
        accept,
        reject,
        timeout,
        steps_mean,
        steps_p50: percentile(&steps, 0.5),
        steps_p99: percentile(&steps, 0.99),
        space_peak,
        records,
    })
}
