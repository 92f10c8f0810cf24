use std::collections::BTreeMap;

use rand::RngCore;

use super::file::QcfaFile;
use super::register::{apply_action, Action, QuantumRegister, NORM_TOL};
use crate::error::{Error, Result};
use crate::machines::{RunOutcome, Verdict};
use crate::tape::{Move, Tape, LEFT_END, RIGHT_END};

/// Classical transition key: (state, symbol, measurement outcome).
pub type ClassicalKey = (usize, char, Option<usize>);

/// 2QCFA: constant-size register plus classical two-way control.
#[derive(Clone, Debug)]
pub struct QcfaSpec {
    basis: Vec<String>,
    q0: usize,
    states: Vec<String>,
    sigma: Vec<char>,
    start: usize,
    accept: usize,
    reject: usize,
    actions: BTreeMap<(usize, char), Action>,
    classical: BTreeMap<ClassicalKey, (usize, Move)>,
}

impl QcfaSpec {
    #[allow(clippy::too_many_arguments)]
    pub fn from_parts(
        basis: Vec<String>,
        q0: usize,
        states: Vec<String>,
        sigma: Vec<char>,
        start: usize,
        accept: usize,
        reject: usize,
        actions: BTreeMap<(usize, char), Action>,
        classical: BTreeMap<ClassicalKey, (usize, Move)>,
    ) -> Result<Self> {
        let bad = |m: String| Err(Error::MalformedMachine(m));
        if basis.is_empty() || q0 >= basis.len() {
            return bad("quantum basis is empty or q0 is out of range".into());
        }
        if accept == reject {
            return bad("accept and reject states coincide".into());
        }
        for (&(s, c), a) in &actions {
            a.validate(basis.len())?;
            if s == accept || s == reject {
                return bad(format!("action defined on halting state {}", states[s]));
            }
            for tau in 0..a.outcomes() {
                if !classical.contains_key(&(s, c, Some(tau))) {
                    return bad(format!("outcome {tau} of the measurement at ({}, {c}) has no transition", states[s]));
                }
            }
        }
        for (&(s, c, _), &(_, d)) in &classical {
            if s == accept || s == reject {
                return bad(format!("transition leaves halting state {}", states[s]));
            }
            if (c == LEFT_END && d == Move::Left) || (c == RIGHT_END && d == Move::Right) {
                return bad(format!("transition at ({}, {c}) moves past an endmarker", states[s]));
            }
        }
        Ok(QcfaSpec { basis, q0, states, sigma, start, accept, reject, actions, classical })
    }

    pub fn from_file(f: &QcfaFile) -> Result<Self> {
        f.to_spec()
    }
    pub fn dim(&self) -> usize {
        self.basis.len()
    }
    pub fn basis(&self) -> &[String] {
        &self.basis
    }
    pub fn q0(&self) -> usize {
        self.q0
    }
    pub fn states(&self) -> &[String] {
        &self.states
    }
    pub fn sigma(&self) -> &[char] {
        &self.sigma
    }
    pub fn actions(&self) -> &BTreeMap<(usize, char), Action> {
        &self.actions
    }
    pub fn start(&self) -> usize {
        self.start
    }
    pub(crate) fn classical_step(&self, s: usize, c: char, tau: Option<usize>) -> Option<(usize, Move)> {
        self.classical.get(&(s, c, tau)).copied()
    }
    pub fn action(&self, s: usize, c: char) -> &Action {
        self.actions.get(&(s, c)).unwrap_or(&Action::Identity)
    }
}

/// Runs the two-stage step loop (quantum action, then classical move).
pub fn run_qcfa(spec: &QcfaSpec, w: &str, rng: &mut (impl RngCore + ?Sized), step_cap: u64) -> Result<RunOutcome> {
    let tape = Tape::checked(w, &spec.sigma, "2QCFA input alphabet")?;
    let mut reg = QuantumRegister::basis(spec.dim(), spec.q0);
    let (mut s, mut pos, mut steps) = (spec.start, 0usize, 0u64);
    while steps < step_cap {
        if s == spec.accept || s == spec.reject {
            let verdict = if s == spec.accept { Verdict::Accept } else { Verdict::Reject };
            return Ok(RunOutcome { verdict, steps, peak_space: 0 });
        }
        let c = tape.get(pos);
        let (next, tau) = apply_action(&reg, spec.action(s, c), rng)?;
        debug_assert!((next.norm_sqr() - 1.0).abs() <= NORM_TOL);
        reg = next;
        let &(to, d) = spec.classical.get(&(s, c, tau)).ok_or_else(|| {
            Error::MalformedMachine(format!("no classical transition for ({}, {c}, {tau:?})", spec.states[s]))
        })?;
        s = to;
        pos = d.apply(pos);
        steps += 1;
    }
    if s == spec.accept || s == spec.reject {
        let verdict = if s == spec.accept { Verdict::Accept } else { Verdict::Reject };
        return Ok(RunOutcome { verdict, steps, peak_space: 0 });
    }
    Ok(RunOutcome { verdict: Verdict::Timeout, steps, peak_space: 0 })
}

const COIN_QCFA: &str = include_str!("coin_qcfa.json");

/// Toy 2QCFA over {a}: Hadamard then a basis measurement on every `a`,
/// rejecting on outcome 1. Accepts a^m with probability 2^-m.
pub fn coin_qcfa() -> QcfaSpec {
    QcfaFile::from_json(COIN_QCFA).and_then(|f| f.to_spec()).expect("shipped coin-qcfa is well formed")
}
