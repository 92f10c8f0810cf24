//! Simulation laboratory for small-space interactive proofs of quantumness.
//!
//! The crate covers the automata models (work-tape PTMs, two-head 2DFAs with
//! supersafe heads, 2QCFAs), the lockstep verifier/prover engine, the
//! supersafe, padded and SQUARE protocols with honest and adversarial
//! provers, the megastate Markov-chain analysis, and a reproducible Monte
//! Carlo harness.

pub mod error;
pub mod harness;
pub mod interaction;
pub mod languages;
pub mod machines;
pub mod markov;
pub mod quantum;
pub mod protocols;
pub mod rational;
pub mod rng;
pub mod tape;

pub use error::{Error, Result};
pub use languages::{check_dsfk_witness, check_promise, membership, pad, LanguageId, PaddedString};
pub use machines::{PtmSpec, RunOutcome, TwoHeadDfaSpec, Verdict};
pub use rational::Rational;
pub use rng::{trial_rng, TrialRng};
pub use tape::{Move, Tape};
