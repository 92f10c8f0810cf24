//! 2QCFA execution and the modeled quantum solver.

mod file;
mod qcfa;
mod register;
mod solver;

pub use file::{parse_amplitude, ActionEntry, QcfaFile, QcfaTransition};
pub use qcfa::{coin_qcfa, run_qcfa, QcfaSpec};
pub use register::{apply_action, Action, CMatrix, QuantumRegister, NORM_TOL, OP_TOL};
pub use solver::{modeled_solve, ModeledSolverSpec, RuntimeLaw, SolverDraw};
