//! Success-gap estimation over a finite test set and an adversary library.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::stats::wilson_interval;
use super::trials::{run_trials, TrialBatch};
use crate::error::{Error, Result};
use crate::protocols::{ProtocolId, ProtocolParams, ProverChoice};

/// An adversary from the library, optionally limited to instances of core
/// length at most `max_len` (written `name@maxlen`).
#[derive(Clone, Debug, PartialEq)]
pub struct AdversaryEntry {
    pub prover: ProverChoice,
    pub max_len: Option<usize>,
}

impl FromStr for AdversaryEntry {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.rsplit_once('@') {
            Some((name, len)) => Ok(AdversaryEntry {
                prover: name.parse()?,
                max_len: Some(len.parse().map_err(|_| Error::Parse(format!("bad length limit in {s:?}")))?),
            }),
            None => Ok(AdversaryEntry { prover: s.parse()?, max_len: None }),
        }
    }
}

impl fmt::Display for AdversaryEntry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.prover)?;
        if let Some(l) = self.max_len {
            write!(f, "@{l}")?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CellSummary {
    pub input: String,
    pub prover: String,
    pub trials: u64,
    pub rate: f64,
    pub bound: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GapReport {
    pub protocol: ProtocolId,
    /// Always "library-relative": the classical side ranges over the adversaries run.
    pub scope: String,
    /// Input regime the halting estimate was measured on.
    pub regime: String,
    pub confidence: f64,
    pub trials: u64,
    pub seed: u64,
    /// The finite test set actually used.
    pub test_set: Vec<String>,
    pub excluded: Vec<String>,
    pub warnings: Vec<String>,
    pub quantum_min_accept: f64,
    pub quantum_lower: f64,
    pub classical_max_non_reject: f64,
    pub classical_upper: f64,
    pub gap: f64,
    pub gap_point: f64,
    pub halting: f64,
    pub quantum_cells: Vec<CellSummary>,
    pub classical_cells: Vec<CellSummary>,
}

impl GapReport {
    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Configuration(e.to_string()))
    }
    pub fn from_toml(s: &str) -> Result<Self> {
        toml::from_str(s).map_err(|e| Error::Parse(e.to_string()))
    }
}

#[derive(Clone, Debug)]
pub struct GapRun {
    pub report: GapReport,
    pub batches: Vec<TrialBatch>,
}

/// Runs the quantum prover and every adversary on every promise-satisfying
/// string of `w`. Bounds are two-sided Wilson intervals at `confidence`.
#[allow(clippy::too_many_arguments)]
pub fn estimate_gap(
    protocol: ProtocolId,
    w: &[String],
    quantum: &ProverChoice,
    adversaries: &[AdversaryEntry],
    params: &ProtocolParams,
    n: u64,
    seed: u64,
    confidence: f64,
) -> Result<GapRun> {
    if w.is_empty() {
        return Err(Error::Configuration("the test set is empty".into()));
    }
    let mut warnings = Vec::new();
    let mut excluded = Vec::new();
    let mut test_set = Vec::new();
    for s in w {
        if protocol.promise_holds(s) {
            test_set.push(s.clone());
        } else {
            warnings.push(format!("{s:?} violates the promise of {protocol}; excluded"));
            excluded.push(s.clone());
        }
    }
    if test_set.is_empty() {
        return Err(Error::Configuration("every string in the test set violates the promise".into()));
    }

    let mut batches = Vec::new();
    let (mut halted, mut total) = (0u64, 0u64);
    let mut quantum_cells = Vec::new();
    let mut classical_cells = Vec::new();
    // Seeds are offset per cell so cells do not share streams.
    let mut cell = 0u64;
    let mut next_seed = || {
        cell += 1;
        seed.wrapping_add(cell.wrapping_mul(0x9E37_79B9_7F4A_7C15))
    };

    for s in &test_set {
        let b = run_trials(protocol, s, quantum, params, n, next_seed())?;
        let (lo, _) = wilson_interval(b.accept, n, confidence)?;
        quantum_cells.push(CellSummary { input: s.clone(), prover: quantum.to_string(), trials: n, rate: b.accept_rate(), bound: lo });
        halted += b.accept + b.reject;
        total += n;
        batches.push(b);
    }
    for adv in adversaries {
        for s in &test_set {
            let core_len = protocol.instance(s).chars().count();
            if adv.max_len.is_some_and(|m| core_len > m) {
                continue;
            }
            let b = run_trials(protocol, s, &adv.prover, params, n, next_seed())?;
            let (_, hi) = wilson_interval(b.non_reject(), n, confidence)?;
            classical_cells.push(CellSummary {
                input: s.clone(),
                prover: adv.to_string(),
                trials: n,
                rate: b.non_reject() as f64 / n as f64,
                bound: hi,
            });
            halted += b.accept + b.reject;
            total += n;
            batches.push(b);
        }
    }

    let fold_min = |cells: &[CellSummary], f: fn(&CellSummary) -> f64| cells.iter().map(f).fold(f64::INFINITY, f64::min);
    let fold_max = |cells: &[CellSummary], f: fn(&CellSummary) -> f64| cells.iter().map(f).fold(0.0, f64::max);
    let quantum_min_accept = fold_min(&quantum_cells, |c| c.rate);
    let quantum_lower = fold_min(&quantum_cells, |c| c.bound);
    let classical_max_non_reject = fold_max(&classical_cells, |c| c.rate);
    let classical_upper = fold_max(&classical_cells, |c| c.bound);
    if classical_cells.is_empty() {
        warnings.push("no adversary ran on any string; the classical side is vacuous".into());
    }
    let regime = if protocol.is_padded() { "promise-satisfying" } else { "any input" };
    let report = GapReport {
        protocol,
        scope: "library-relative".into(),
        regime: regime.into(),
        confidence,
        trials: n,
        seed,
        test_set,
        excluded,
        warnings,
        quantum_min_accept,
        quantum_lower,
        classical_max_non_reject,
        classical_upper,
        gap: quantum_lower - classical_upper,
        gap_point: quantum_min_accept - classical_max_non_reject,
        halting: halted as f64 / total as f64,
        quantum_cells,
        classical_cells,
    };
    Ok(GapRun { report, batches })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::Rational;

    #[test]
    fn adversary_entry_syntax() {
        let e: AdversaryEntry = "no-answer@2".parse().unwrap();
        assert_eq!(e.max_len, Some(2));
        assert_eq!(e.to_string(), "no-answer@2");
        let e: AdversaryEntry = "strategy2:auto:yes".parse().unwrap();
        assert_eq!(e.max_len, None);
        assert!("no-answer@x".parse::<AdversaryEntry>().is_err());
    }

    #[test]
    fn supersafe_gap_and_conservatism() {
        let params = ProtocolParams::supersafe(Rational::new(1, 4), 5);
        let w: Vec<String> = ["ab", "aab", "abab"].iter().map(|s| s.to_string()).collect();
        let adv: Vec<AdversaryEntry> = ["no-answer", "always-lying"].iter().map(|s| s.parse().unwrap()).collect();
        let run = estimate_gap(ProtocolId::SupersafeEq, &w, &ProverChoice::Honest, &adv, &params, 200, 3, 0.99).unwrap();
        let r = &run.report;
        assert!(r.gap <= r.gap_point);
        assert_eq!(r.scope, "library-relative");
        assert_eq!(run.batches.len(), 3 + 6);
        let text = r.to_toml().unwrap();
        assert!(text.contains("gap =") && text.contains("halting =") && text.contains("classical_upper ="));
        assert_eq!(&GapReport::from_toml(&text).unwrap(), r);
    }

    #[test]
    fn promise_violation_is_excluded() {
        let params = ProtocolParams::padded();
        let w = vec!["aba*****".to_string(), "ab*".to_string()];
        let adv: Vec<AdversaryEntry> = vec!["no-answer".parse().unwrap()];
        let run = estimate_gap(ProtocolId::PaddedPal, &w, &ProverChoice::Honest, &adv, &params, 5, 1, 0.99).unwrap();
        assert_eq!(run.report.excluded, vec!["ab*".to_string()]);
        assert_eq!(run.report.test_set.len(), 1);
        assert!(run.report.warnings[0].contains("violates the promise"));
    }
}
