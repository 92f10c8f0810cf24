//! Concrete protocols: clock, supersafe rounds, padded and SQUARE
//! protocols, Freivalds comparator, and honest/adversarial provers.

pub mod clock;
pub mod params;

pub use clock::{make_clock, ClockCalibration, ClockSpec};
pub use params::{ClockMode, ProtocolParams};
pub mod analysis;
pub mod supersafe;

pub use analysis::{f_recursion, min_f1, MinF1};
pub use supersafe::{fabricate, Fabrication, FabricationPolicy, RoundPolicy, SupersafeProver, SupersafeVerifier};
pub mod padded;
pub mod stages;

pub use padded::{PaddedProver, PaddedVerifier};
pub use stages::{core_of, ClaimPolicy, Clock};
pub mod freivalds;

pub use freivalds::freivalds_eq;
pub mod square;

pub use square::{ruler_symbol, RulerPolicy, SquareProver, SquareVerifier};
pub mod suite;

pub use suite::{AdversaryStrategy, ProtocolId, ProverChoice};
