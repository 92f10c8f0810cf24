use std::collections::{BTreeMap, HashMap};

use rand::RngCore;

use super::{input_symbols, RunOutcome, Verdict};
use crate::error::{Error, Result};
use crate::rational::{Rational, Sampler};
use crate::tape::{Move, Tape, BLANK, LEFT_END, RIGHT_END};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Branch {
    pub prob: Rational,
    pub to: usize,
    pub write: char,
    pub di: Move,
    pub dw: Move,
}

#[derive(Clone, Debug)]
struct Row {
    sampler: Sampler,
    outs: Vec<(u32, u16, Move, Move)>,
}

#[derive(Clone, Debug)]
struct Compiled {
    n_in: usize,
    n_work: usize,
    table: Vec<Option<Row>>,
    in_index: HashMap<char, u16>,
    writes_work: bool,
}

/// A probabilistic Turing machine with a read-only input tape and one
/// one-way-infinite work tape. `kappa[0]` is the blank.
#[derive(Clone, Debug)]
pub struct PtmSpec {
    states: Vec<String>,
    sigma: Vec<char>,
    kappa: Vec<char>,
    start: usize,
    accept: usize,
    reject: usize,
    rules: BTreeMap<(usize, char, char), Vec<Branch>>,
    compiled: Compiled,
}

impl PartialEq for PtmSpec {
    fn eq(&self, o: &Self) -> bool {
        self.states == o.states
            && self.sigma == o.sigma
            && self.kappa == o.kappa
            && (self.start, self.accept, self.reject) == (o.start, o.accept, o.reject)
            && self.rules == o.rules
    }
}

impl PtmSpec {
    #[allow(clippy::too_many_arguments)]
    pub fn from_parts(
        states: Vec<String>,
        sigma: Vec<char>,
        kappa: Vec<char>,
        start: usize,
        accept: usize,
        reject: usize,
        rules: BTreeMap<(usize, char, char), Vec<Branch>>,
    ) -> Result<PtmSpec> {
        let bad = |m: String| Err(Error::MalformedMachine(m));
        let ns = states.len();
        if start >= ns || accept >= ns || reject >= ns {
            return bad("designated state out of range".into());
        }
        if accept == reject {
            return bad("accept and reject states coincide".into());
        }
        if kappa.first() != Some(&BLANK) {
            return bad(format!("work alphabet must start with the blank {BLANK:?}"));
        }
        let ins = input_symbols(&sigma);
        for ((s, read, work), branches) in &rules {
            let at = format!("({}, {read:?}, {work:?})", states.get(*s).map(String::as_str).unwrap_or("?"));
            if *s >= ns {
                return bad(format!("transition from unknown state index {s}"));
            }
            if *s == accept || *s == reject {
                return bad(format!("transition leaves a halting state at {at}"));
            }
            if !ins.contains(read) {
                return bad(format!("read symbol outside Σ at {at}"));
            }
            if !kappa.contains(work) {
                return bad(format!("work symbol outside K at {at}"));
            }
            if branches.is_empty() {
                return bad(format!("empty distribution at {at}"));
            }
            let mut sum = Rational::zero();
            for b in branches {
                if b.to >= ns || !kappa.contains(&b.write) {
                    return bad(format!("bad target or written symbol at {at}"));
                }
                if (*read == LEFT_END && b.di == Move::Left) || (*read == RIGHT_END && b.di == Move::Right) {
                    return bad(format!("input head leaves the endmarkers at {at}"));
                }
                if b.prob.is_negative() {
                    return bad(format!("negative probability at {at}"));
                }
                sum = sum + &b.prob;
            }
            if !sum.is_one() {
                return bad(format!("row {at} sums to {sum}"));
            }
        }
        let compiled = compile(ns, &ins, &kappa, &rules)?;
        Ok(PtmSpec { states, sigma, kappa, start, accept, reject, rules, compiled })
    }

    pub fn states(&self) -> &[String] {
        &self.states
    }
    pub fn sigma(&self) -> &[char] {
        &self.sigma
    }
    pub fn kappa(&self) -> &[char] {
        &self.kappa
    }
    pub fn start(&self) -> usize {
        self.start
    }
    pub fn accept(&self) -> usize {
        self.accept
    }
    pub fn reject(&self) -> usize {
        self.reject
    }
    pub fn is_halting(&self, s: usize) -> bool {
        s == self.accept || s == self.reject
    }
    pub fn state_index(&self, name: &str) -> Option<usize> {
        self.states.iter().position(|s| s == name)
    }
    pub fn rules(&self) -> &BTreeMap<(usize, char, char), Vec<Branch>> {
        &self.rules
    }
    pub fn branches(&self, s: usize, read: char, work: char) -> Option<&[Branch]> {
        self.rules.get(&(s, read, work)).map(Vec::as_slice)
    }
    /// True if some transition writes a non-blank symbol or moves the work head.
    pub fn uses_work_tape(&self) -> bool {
        self.compiled.writes_work
    }
    /// True if every row has a single branch.
    pub fn is_deterministic(&self) -> bool {
        self.rules.values().all(|b| b.len() == 1)
    }

    /// Swaps the accept and reject states.
    pub fn complement(&self) -> PtmSpec {
        let mut c = self.clone();
        std::mem::swap(&mut c.accept, &mut c.reject);
        c
    }

    pub(crate) fn input_code(&self, c: char) -> Option<u16> {
        self.compiled.in_index.get(&c).copied()
    }

    pub(crate) fn encode_tape(&self, tape: &Tape) -> Result<Vec<u16>> {
        tape.cells()
            .iter()
            .map(|&c| {
                self.input_code(c)
                    .ok_or_else(|| Error::Alphabet { symbol: c, context: "machine input alphabet".into() })
            })
            .collect()
    }

    /// Deterministic single-head step used by verifier programs: returns
    /// `(next state, input move)` for a machine that ignores its work tape.
    #[inline]
    pub(crate) fn det_step_code(&self, s: usize, code: u16) -> Option<(usize, Move)> {
        let idx = (s * self.compiled.n_in + code as usize) * self.compiled.n_work;
        self.compiled.table[idx].as_ref().map(|r| {
            let (to, _, di, _) = r.outs[0];
            (to as usize, di)
        })
    }

    /// Samples one transition of a machine that ignores its work tape.
    #[inline]
    pub(crate) fn sample_step_code(&self, s: usize, code: u16, rng: &mut (impl RngCore + ?Sized)) -> Option<(usize, Move)> {
        let idx = (s * self.compiled.n_in + code as usize) * self.compiled.n_work;
        self.compiled.table[idx].as_ref().map(|r| {
            let (to, _, di, _) = r.outs[r.sampler.sample(rng)];
            (to as usize, di)
        })
    }

    fn describe(&self, s: usize, read: char, work: char) -> String {
        format!("({}, {read:?}, {work:?})", self.states[s])
    }
}

fn compile(
    ns: usize,
    ins: &[char],
    kappa: &[char],
    rules: &BTreeMap<(usize, char, char), Vec<Branch>>,
) -> Result<Compiled> {
    let n_in = ins.len();
    let n_work = kappa.len();
    let in_index: HashMap<char, u16> = ins.iter().enumerate().map(|(i, &c)| (c, i as u16)).collect();
    let work_index: HashMap<char, u16> = kappa.iter().enumerate().map(|(i, &c)| (c, i as u16)).collect();
    let mut table: Vec<Option<Row>> = vec![None; ns * n_in * n_work];
    let mut writes_work = false;
    for ((s, read, work), branches) in rules {
        let probs: Vec<Rational> = branches.iter().map(|b| b.prob.clone()).collect();
        let sampler = Sampler::new(&probs)?;
        let outs = branches
            .iter()
            .map(|b| {
                writes_work |= b.write != BLANK || b.dw != Move::Stay;
                (b.to as u32, work_index[&b.write], b.di, b.dw)
            })
            .collect();
        let idx = (s * n_in + in_index[read] as usize) * n_work + work_index[work] as usize;
        table[idx] = Some(Row { sampler, outs });
    }
    Ok(Compiled { n_in, n_work, table, in_index, writes_work })
}

/// Instantaneous description of a PTM run.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ClassicalConfiguration {
    pub state: usize,
    pub input_head: usize,
    pub work_tape: Vec<char>,
    pub work_head: usize,
    pub touched_cells: usize,
    written: Vec<bool>,
}

impl ClassicalConfiguration {
    pub fn initial(spec: &PtmSpec) -> Self {
        ClassicalConfiguration {
            state: spec.start,
            input_head: 0,
            work_tape: vec![BLANK],
            work_head: 0,
            touched_cells: 0,
            written: vec![false],
        }
    }
    pub fn work_symbol(&self) -> char {
        self.work_tape.get(self.work_head).copied().unwrap_or(BLANK)
    }
}

pub fn step_ptm(
    spec: &PtmSpec,
    tape: &Tape,
    cfg: &ClassicalConfiguration,
    rng: &mut (impl RngCore + ?Sized),
) -> Result<ClassicalConfiguration> {
    if spec.is_halting(cfg.state) {
        return Err(Error::Precondition(format!("state {} is halting", spec.states[cfg.state])));
    }
    let read = tape.get(cfg.input_head);
    let work = cfg.work_symbol();
    let branches = spec
        .branches(cfg.state, read, work)
        .ok_or_else(|| Error::MalformedMachine(format!("undefined transition {}", spec.describe(cfg.state, read, work))))?;
    let idx = (cfg.state * spec.compiled.n_in + spec.compiled.in_index[&read] as usize) * spec.compiled.n_work
        + spec.kappa.iter().position(|&k| k == work).unwrap_or(0);
    let row = spec.compiled.table[idx].as_ref().expect("compiled row");
    let b = &branches[row.sampler.sample(rng)];
    apply_branch(cfg, b).map_err(|e| match e {
        Error::MalformedMachine(m) => Error::MalformedMachine(format!("{m} at {}", spec.describe(cfg.state, read, work))),
        e => e,
    })
}

/// Successor of `cfg` under one chosen branch (write, then move both heads).
pub(crate) fn apply_branch(cfg: &ClassicalConfiguration, b: &Branch) -> Result<ClassicalConfiguration> {
    let mut next = cfg.clone();
    next.state = b.to;
    if next.work_head >= next.work_tape.len() {
        next.work_tape.resize(next.work_head + 1, BLANK);
        next.written.resize(next.work_head + 1, false);
    }
    next.work_tape[next.work_head] = b.write;
    if b.write != BLANK && !next.written[next.work_head] {
        next.written[next.work_head] = true;
        next.touched_cells += 1;
    }
    next.input_head = b.di.apply(cfg.input_head);
    if cfg.work_head == 0 && b.dw == Move::Left {
        return Err(Error::MalformedMachine("work head moves left of cell 0".into()));
    }
    next.work_head = b.dw.apply(cfg.work_head);
    Ok(next)
}

pub fn run_machine(spec: &PtmSpec, w: &str, rng: &mut (impl RngCore + ?Sized), step_cap: u64) -> Result<RunOutcome> {
    run_machine_observed(spec, w, rng, step_cap, |_, _, _, _| true)
}

/// Runs `spec` on `w`, calling `observe(state, input_head, work_tape, work_head)`
/// before every step; returning `false` stops the run with a Timeout verdict.
pub fn run_machine_observed(
    spec: &PtmSpec,
    w: &str,
    rng: &mut (impl RngCore + ?Sized),
    step_cap: u64,
    mut observe: impl FnMut(usize, usize, &[u16], usize) -> bool,
) -> Result<RunOutcome> {
    let tape = Tape::checked(w, &spec.sigma, "machine input alphabet")?;
    let codes = spec.encode_tape(&tape)?;
    let c = &spec.compiled;
    let mut state = spec.start;
    let mut pos = 0usize;
    let mut work: Vec<u16> = vec![0];
    let mut written: Vec<bool> = vec![false];
    let mut wh = 0usize;
    let mut touched = 0usize;
    let mut steps = 0u64;
    loop {
        if state == spec.accept || state == spec.reject {
            let verdict = if state == spec.accept { Verdict::Accept } else { Verdict::Reject };
            return Ok(RunOutcome { verdict, steps, peak_space: touched });
        }
        if steps >= step_cap || !observe(state, pos, &work, wh) {
            return Ok(RunOutcome { verdict: Verdict::Timeout, steps, peak_space: touched });
        }
        let idx = (state * c.n_in + codes[pos] as usize) * c.n_work + work[wh] as usize;
        let row = c.table[idx].as_ref().ok_or_else(|| {
            Error::MalformedMachine(format!(
                "undefined transition {}",
                spec.describe(state, tape.get(pos), spec.kappa[work[wh] as usize])
            ))
        })?;
        let (to, write, di, dw) = row.outs[row.sampler.sample(rng)];
        work[wh] = write;
        if write != 0 && !written[wh] {
            written[wh] = true;
            touched += 1;
        }
        state = to as usize;
        pos = di.apply(pos);
        match dw {
            Move::Stay => {}
            Move::Right => {
                wh += 1;
                if wh == work.len() {
                    work.push(0);
                    written.push(false);
                }
            }
            Move::Left => {
                if wh == 0 {
                    return Err(Error::MalformedMachine("work head moves left of cell 0".into()));
                }
                wh -= 1;
            }
        }
        steps += 1;
    }
}

/// Incremental construction of a [`PtmSpec`] by state name.
#[derive(Clone, Debug)]
pub struct PtmBuilder {
    states: Vec<String>,
    sigma: Vec<char>,
    kappa: Vec<char>,
    rules: BTreeMap<(usize, char, char), Vec<Branch>>,
}

impl PtmBuilder {
    /// `work_symbols` excludes the blank, which is always present.
    pub fn new(sigma: &[char], work_symbols: &[char]) -> Self {
        let mut kappa = vec![BLANK];
        kappa.extend(work_symbols.iter().copied().filter(|&c| c != BLANK));
        PtmBuilder { states: Vec::new(), sigma: sigma.to_vec(), kappa, rules: BTreeMap::new() }
    }

    pub fn state(&mut self, name: &str) -> usize {
        match self.states.iter().position(|s| s == name) {
            Some(i) => i,
            None => {
                self.states.push(name.to_string());
                self.states.len() - 1
            }
        }
    }

    pub fn input_symbols(&self) -> Vec<char> {
        input_symbols(&self.sigma)
    }

    pub fn rule(&mut self, s: usize, read: char, work: char, branches: Vec<Branch>) -> &mut Self {
        self.rules.insert((s, read, work), branches);
        self
    }

    /// Deterministic move that leaves the work tape alone.
    pub fn det(&mut self, s: usize, read: char, to: usize, di: Move) -> &mut Self {
        self.rule(s, read, BLANK, vec![Branch { prob: Rational::one(), to, write: BLANK, di, dw: Move::Stay }])
    }

    #[allow(clippy::too_many_arguments)]
    pub fn det_w(&mut self, s: usize, read: char, work: char, to: usize, write: char, di: Move, dw: Move) -> &mut Self {
        self.rule(s, read, work, vec![Branch { prob: Rational::one(), to, write, di, dw }])
    }

    /// Random move over `(prob, to, di)` that leaves the work tape alone.
    pub fn random(&mut self, s: usize, read: char, outs: &[(Rational, usize, Move)]) -> &mut Self {
        let branches = outs
            .iter()
            .map(|(p, to, di)| Branch { prob: p.clone(), to: *to, write: BLANK, di: *di, dw: Move::Stay })
            .collect();
        self.rule(s, read, BLANK, branches)
    }

    pub fn build(self, start: usize, accept: usize, reject: usize) -> Result<PtmSpec> {
        PtmSpec::from_parts(self.states, self.sigma, self.kappa, start, accept, reject, self.rules)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::trial_rng;

    fn sweeper() -> PtmSpec {
        let mut b = PtmBuilder::new(&['a', 'b'], &[]);
        let s0 = b.state("s0");
        let acc = b.state("acc");
        let rej = b.state("rej");
        for c in ['▷', 'a', 'b'] {
            b.det(s0, c, s0, Move::Right);
        }
        b.det(s0, '◁', acc, Move::Stay);
        b.build(s0, acc, rej).unwrap()
    }

    #[test]
    fn single_step() {
        let spec = sweeper();
        let tape = Tape::new("ab");
        let cfg = ClassicalConfiguration::initial(&spec);
        let next = step_ptm(&spec, &tape, &cfg, &mut trial_rng(0, 0)).unwrap();
        assert_eq!((next.state, next.input_head), (0, 1));
    }

    #[test]
    fn halting_state_is_a_precondition_error() {
        let spec = sweeper();
        let mut cfg = ClassicalConfiguration::initial(&spec);
        cfg.state = spec.accept();
        assert!(matches!(
            step_ptm(&spec, &Tape::new("ab"), &cfg, &mut trial_rng(0, 0)),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn row_sums_are_checked() {
        let mut b = PtmBuilder::new(&['a'], &[]);
        let s = b.state("s");
        let acc = b.state("acc");
        let rej = b.state("rej");
        b.random(s, 'a', &[(Rational::new(1, 2), acc, Move::Stay), (Rational::new(1, 3), rej, Move::Stay)]);
        assert!(matches!(b.build(s, acc, rej), Err(Error::MalformedMachine(_))));
    }

    #[test]
    fn endmarker_moves_are_checked() {
        let mut b = PtmBuilder::new(&['a'], &[]);
        let s = b.state("s");
        let acc = b.state("acc");
        let rej = b.state("rej");
        b.det(s, '▷', acc, Move::Left);
        assert!(b.build(s, acc, rej).is_err());
    }

    #[test]
    fn missing_transition_is_malformed() {
        let mut b = PtmBuilder::new(&['a', 'b'], &[]);
        let s = b.state("s");
        let acc = b.state("acc");
        let rej = b.state("rej");
        b.det(s, '▷', s, Move::Right);
        let spec = b.build(s, acc, rej).unwrap();
        assert!(matches!(run_machine(&spec, "a", &mut trial_rng(0, 0), 100), Err(Error::MalformedMachine(_))));
    }

    #[test]
    fn self_loop_times_out() {
        let mut b = PtmBuilder::new(&['a'], &[]);
        let s = b.state("s");
        let acc = b.state("acc");
        let rej = b.state("rej");
        for c in ['▷', 'a', '◁'] {
            b.det(s, c, s, Move::Stay);
        }
        let spec = b.build(s, acc, rej).unwrap();
        let out = run_machine(&spec, "aa", &mut trial_rng(0, 0), 500).unwrap();
        assert_eq!(out, RunOutcome { verdict: Verdict::Timeout, steps: 500, peak_space: 0 });
    }

    #[test]
    fn even_length_2dfa() {
        let mut b = PtmBuilder::new(&['a', 'b'], &[]);
        let even = b.state("even");
        let odd = b.state("odd");
        let acc = b.state("acc");
        let rej = b.state("rej");
        b.det(even, '▷', even, Move::Right);
        for c in ['a', 'b'] {
            b.det(even, c, odd, Move::Right);
            b.det(odd, c, even, Move::Right);
        }
        b.det(even, '◁', acc, Move::Stay);
        b.det(odd, '◁', rej, Move::Stay);
        let spec = b.build(even, acc, rej).unwrap();
        let out = run_machine(&spec, "ab", &mut trial_rng(0, 0), 100).unwrap();
        assert_eq!(out.verdict, Verdict::Accept);
        assert_eq!(out.steps, 4);
        assert_eq!(run_machine(&spec, "aba", &mut trial_rng(0, 0), 100).unwrap().verdict, Verdict::Reject);
    }

    #[test]
    fn coin_frequencies() {
        let mut b = PtmBuilder::new(&['a'], &[]);
        let s = b.state("s");
        let acc = b.state("acc");
        let rej = b.state("rej");
        b.random(s, '▷', &[(Rational::new(1, 2), acc, Move::Stay), (Rational::new(1, 2), rej, Move::Stay)]);
        let spec = b.build(s, acc, rej).unwrap();
        let mut rng = trial_rng(11, 0);
        let hits = (0..10_000)
            .filter(|_| run_machine(&spec, "", &mut rng, 10).unwrap().verdict == Verdict::Accept)
            .count();
        assert!((hits as f64 / 1e4 - 0.5).abs() <= 0.02);
    }

    #[test]
    fn work_tape_metering() {
        // Writes x on cells 0 and 1, then rewrites cell 0 and accepts.
        let mut b = PtmBuilder::new(&['a'], &['x']);
        let s0 = b.state("s0");
        let s1 = b.state("s1");
        let s2 = b.state("s2");
        let acc = b.state("acc");
        let rej = b.state("rej");
        b.det_w(s0, '▷', BLANK, s1, 'x', Move::Stay, Move::Right);
        b.det_w(s1, '▷', BLANK, s2, 'x', Move::Stay, Move::Left);
        b.det_w(s2, '▷', 'x', acc, BLANK, Move::Stay, Move::Stay);
        let spec = b.build(s0, acc, rej).unwrap();
        let out = run_machine(&spec, "a", &mut trial_rng(0, 0), 100).unwrap();
        assert_eq!(out.peak_space, 2);
        assert!(spec.uses_work_tape());

        let tape = Tape::new("a");
        let mut cfg = ClassicalConfiguration::initial(&spec);
        let mut seen = vec![cfg.touched_cells];
        while !spec.is_halting(cfg.state) {
            cfg = step_ptm(&spec, &tape, &cfg, &mut trial_rng(0, 0)).unwrap();
            seen.push(cfg.touched_cells);
        }
        assert_eq!(seen, vec![0, 1, 2, 2]);
    }
}
