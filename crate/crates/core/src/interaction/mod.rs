//! Verifier/prover coupling through a single communication cell.

mod engine;
mod msg;
mod table;

pub use engine::{
    run_interaction, run_interaction_recorded, transcript, transcript_csv, Actor, InteractionOutcome, ProverAction,
    ProverObs, ProverProgram, ProverRun, RunReport, TranscriptEntry, VerifierAction, VerifierObs, VerifierProgram,
    VerifierRun,
};
pub use msg::Msg;
pub use table::{
    ComRule, MuteProver, QuantumTableProver, TableProver, TableVerifier, TableVerifierBuilder, VerifierBranch,
};
