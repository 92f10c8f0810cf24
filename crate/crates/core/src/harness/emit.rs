//! CSV and structured-text output.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use super::trials::TrialBatch;
use crate::error::Result;

/// One CSV row.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BatchRow {
    pub protocol: String,
    pub input: String,
    pub prover: String,
    pub trials: u64,
    pub accept: u64,
    pub reject: u64,
    pub timeout: u64,
    pub steps_mean: String,
    pub steps_p99: u64,
    pub space_peak: usize,
    pub seed: u64,
}

pub const CSV_HEADER: [&str; 11] =
    ["protocol", "input", "prover", "trials", "accept", "reject", "timeout", "steps_mean", "steps_p99", "space_peak", "seed"];

impl From<&TrialBatch> for BatchRow {
    fn from(b: &TrialBatch) -> Self {
        BatchRow {
            protocol: b.protocol.to_string(),
            input: b.input.clone(),
            prover: b.prover.to_string(),
            trials: b.trials,
            accept: b.accept,
            reject: b.reject,
            timeout: b.timeout,
            steps_mean: format!("{:.3}", b.steps_mean),
            steps_p99: b.steps_p99,
            space_peak: b.space_peak,
            seed: b.seed,
        }
    }
}

pub fn write_csv<'a>(batches: impl IntoIterator<Item = &'a TrialBatch>, out: impl Write) -> Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    w.write_record(CSV_HEADER)?;
    for b in batches {
        w.serialize(BatchRow::from(b))?;
    }
    w.flush()?;
    Ok(())
}

pub fn csv_string<'a>(batches: impl IntoIterator<Item = &'a TrialBatch>) -> Result<String> {
    let mut buf = Vec::new();
    write_csv(batches, &mut buf)?;
    Ok(String::from_utf8(buf).expect("csv output is utf-8"))
}

pub fn read_csv(input: impl Read) -> Result<Vec<BatchRow>> {
    let mut r = csv::Reader::from_reader(input);
    let rows = r.deserialize().collect::<std::result::Result<Vec<BatchRow>, _>>()?;
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::run_trials;
    use crate::protocols::{ProtocolId, ProtocolParams, ProverChoice};
    use crate::rational::Rational;

    #[test]
    fn empty_is_header_only() {
        let s = csv_string(std::iter::empty()).unwrap();
        assert_eq!(s, "protocol,input,prover,trials,accept,reject,timeout,steps_mean,steps_p99,space_peak,seed\n");
        assert!(read_csv(s.as_bytes()).unwrap().is_empty());
    }

    #[test]
    fn round_trip() {
        let params = ProtocolParams::supersafe(Rational::new(1, 4), 5);
        let b = run_trials(ProtocolId::SupersafeEq, "abab", &ProverChoice::Honest, &params, 20, 5).unwrap();
        let s = csv_string([&b]).unwrap();
        let rows = read_csv(s.as_bytes()).unwrap();
        assert_eq!(rows, vec![BatchRow::from(&b)]);
        assert_eq!(rows[0].trials, 20);
    }
}
