//! Classical automata: work-tape PTMs (2PFA/2DFA as special cases) and
//! two-head 2DFA(2) machines with supersafe heads.

pub(crate) mod file;
mod ptm;
pub mod shipped;
mod twohead;

pub use file::{MachineFile, TransitionEntry};
pub(crate) use ptm::apply_branch;
pub use ptm::{run_machine, run_machine_observed, step_ptm, Branch, ClassicalConfiguration, PtmBuilder, PtmSpec};
pub use twohead::{fuzz_supersafety, run_twohead, supersafe_trajectory, TwoHeadBuilder, TwoHeadDfaSpec};

use serde::{Deserialize, Serialize};

pub const DEFAULT_STEP_CAP: u64 = 10_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Verdict {
    Accept,
    Reject,
    Timeout,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunOutcome {
    pub verdict: Verdict,
    pub steps: u64,
    pub peak_space: usize,
}

/// Index of an input symbol in a compiled table: ▷ = 0, ◁ = 1, then Σ in order.
pub(crate) fn input_symbols(sigma: &[char]) -> Vec<char> {
    let mut v = vec![crate::tape::LEFT_END, crate::tape::RIGHT_END];
    v.extend(sigma.iter().copied().filter(|c| !crate::tape::is_endmarker(*c)));
    v
}
