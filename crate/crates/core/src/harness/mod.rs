//! Monte Carlo trial orchestration, intervals, gap estimation and output.

mod emit;
mod gap;
mod stats;
mod trials;

pub use emit::{csv_string, read_csv, write_csv, BatchRow, CSV_HEADER};
pub use gap::{estimate_gap, AdversaryEntry, CellSummary, GapReport, GapRun};
pub use stats::{binomial_region, clopper_pearson, wilson_interval};
pub use trials::{run_trials, TrialBatch, TrialRecord};
