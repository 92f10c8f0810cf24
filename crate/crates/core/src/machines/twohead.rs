use std::collections::{BTreeMap, HashMap};

use rand::{Rng, RngCore};

use super::{input_symbols, PtmSpec, RunOutcome, Verdict};
use crate::error::{Error, Result};
use crate::tape::{Move, Tape, LEFT_END, RIGHT_END};

pub type TwoHeadRule = (usize, Move, Move);

/// Two-head deterministic two-way automaton. When `supersafe_head` is set,
/// `companion` is the single-head 2DFA whose trajectory that head follows.
#[derive(Clone, Debug)]
pub struct TwoHeadDfaSpec {
    states: Vec<String>,
    sigma: Vec<char>,
    start: usize,
    accept: usize,
    reject: usize,
    rules: BTreeMap<(usize, char, char), TwoHeadRule>,
    supersafe_head: Option<u8>,
    companion: Option<PtmSpec>,
    n_in: usize,
    in_index: HashMap<char, u16>,
    table: Vec<Option<(u32, Move, Move)>>,
}

impl PartialEq for TwoHeadDfaSpec {
    fn eq(&self, o: &Self) -> bool {
        self.states == o.states
            && self.sigma == o.sigma
            && (self.start, self.accept, self.reject) == (o.start, o.accept, o.reject)
            && self.rules == o.rules
            && self.supersafe_head == o.supersafe_head
            && self.companion == o.companion
    }
}

impl TwoHeadDfaSpec {
    #[allow(clippy::too_many_arguments)]
    pub fn from_parts(
        states: Vec<String>,
        sigma: Vec<char>,
        start: usize,
        accept: usize,
        reject: usize,
        rules: BTreeMap<(usize, char, char), TwoHeadRule>,
        supersafe_head: Option<u8>,
        companion: Option<PtmSpec>,
    ) -> Result<Self> {
        let bad = |m: String| Err(Error::MalformedMachine(m));
        let ns = states.len();
        if start >= ns || accept >= ns || reject >= ns || accept == reject {
            return bad("bad designated states".into());
        }
        let ins = input_symbols(&sigma);
        for s in 0..ns {
            if s == accept || s == reject {
                continue;
            }
            for &a in &ins {
                for &b in &ins {
                    if !rules.contains_key(&(s, a, b)) {
                        return bad(format!("no transition for ({}, {a:?}, {b:?})", states[s]));
                    }
                }
            }
        }
        for (&(s, a, b), &(to, d1, d2)) in &rules {
            if s >= ns || to >= ns || !ins.contains(&a) || !ins.contains(&b) {
                return bad(format!("transition ({s}, {a:?}, {b:?}) out of range"));
            }
            if s == accept || s == reject {
                return bad(format!("transition leaves halting state {}", states[s]));
            }
            let off = |c: char, d: Move| (c == LEFT_END && d == Move::Left) || (c == RIGHT_END && d == Move::Right);
            if off(a, d1) || off(b, d2) {
                return bad(format!("head leaves the endmarkers at ({}, {a:?}, {b:?})", states[s]));
            }
        }
        match (supersafe_head, &companion) {
            (Some(h), _) if h != 1 && h != 2 => return bad(format!("supersafe head {h} is not 1 or 2")),
            (Some(_), None) => return bad("supersafe head without companion 2DFA".into()),
            (_, Some(c)) => {
                if !c.is_deterministic() || c.uses_work_tape() {
                    return bad("companion must be a deterministic single-head 2DFA".into());
                }
                if c.sigma() != sigma.as_slice() {
                    return bad("companion input alphabet differs".into());
                }
            }
            _ => {}
        }
        let in_index: HashMap<char, u16> = ins.iter().enumerate().map(|(i, &c)| (c, i as u16)).collect();
        let n_in = ins.len();
        let mut table = vec![None; ns * n_in * n_in];
        for (&(s, a, b), &(to, d1, d2)) in &rules {
            table[(s * n_in + in_index[&a] as usize) * n_in + in_index[&b] as usize] = Some((to as u32, d1, d2));
        }
        Ok(TwoHeadDfaSpec {
            states,
            sigma,
            start,
            accept,
            reject,
            rules,
            supersafe_head,
            companion,
            n_in,
            in_index,
            table,
        })
    }

    pub fn states(&self) -> &[String] {
        &self.states
    }
    pub fn sigma(&self) -> &[char] {
        &self.sigma
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
    pub fn rules(&self) -> &BTreeMap<(usize, char, char), TwoHeadRule> {
        &self.rules
    }
    pub fn supersafe_head(&self) -> Option<u8> {
        self.supersafe_head
    }
    pub fn companion(&self) -> Option<&PtmSpec> {
        self.companion.as_ref()
    }
    pub fn input_symbols(&self) -> Vec<char> {
        input_symbols(&self.sigma)
    }

    /// Same machine with accept and reject swapped; the companion is unchanged.
    pub fn complement(&self) -> TwoHeadDfaSpec {
        let mut c = self.clone();
        std::mem::swap(&mut c.accept, &mut c.reject);
        c
    }

    pub(crate) fn code(&self, c: char) -> Option<u16> {
        self.in_index.get(&c).copied()
    }

    #[inline]
    pub(crate) fn step_code(&self, s: usize, c1: u16, c2: u16) -> (usize, Move, Move) {
        let (to, d1, d2) = self.table[(s * self.n_in + c1 as usize) * self.n_in + c2 as usize]
            .expect("two-head table is total on non-halting states");
        (to as usize, d1, d2)
    }

    pub fn step(&self, s: usize, c1: char, c2: char) -> Option<TwoHeadRule> {
        self.rules.get(&(s, c1, c2)).copied()
    }
}

pub fn run_twohead(spec: &TwoHeadDfaSpec, w: &str, step_cap: u64) -> Result<RunOutcome> {
    let tape = Tape::checked(w, &spec.sigma, "two-head machine input alphabet")?;
    let codes: Vec<u16> = tape.cells().iter().map(|&c| spec.code(c).expect("checked")).collect();
    let (mut s, mut h1, mut h2, mut steps) = (spec.start, 0usize, 0usize, 0u64);
    loop {
        if spec.is_halting(s) {
            let verdict = if s == spec.accept { Verdict::Accept } else { Verdict::Reject };
            return Ok(RunOutcome { verdict, steps, peak_space: 0 });
        }
        if steps >= step_cap {
            return Ok(RunOutcome { verdict: Verdict::Timeout, steps, peak_space: 0 });
        }
        let (to, d1, d2) = spec.step_code(s, codes[h1], codes[h2]);
        s = to;
        h1 = d1.apply(h1);
        h2 = d2.apply(h2);
        steps += 1;
    }
}

fn companion_of(spec: &TwoHeadDfaSpec) -> Result<&PtmSpec> {
    match (spec.supersafe_head, spec.companion.as_ref()) {
        (Some(_), Some(c)) => Ok(c),
        _ => Err(Error::Precondition("machine has no supersafe head".into())),
    }
}

/// Head positions at which the companion 2DFA performs its transitions on `w`,
/// ending with the position of the halting transition.
pub fn supersafe_trajectory(spec: &TwoHeadDfaSpec, w: &str) -> Result<Vec<usize>> {
    let n1 = companion_of(spec)?;
    let tape = Tape::checked(w, &spec.sigma, "two-head machine input alphabet")?;
    let codes = n1.encode_tape(&tape)?;
    let cap = n1.states().len() * tape.cells().len() + 1;
    let (mut s, mut pos) = (n1.start(), 0usize);
    let mut traj = Vec::new();
    while !n1.is_halting(s) {
        if traj.len() > cap {
            return Err(Error::NotSupersafe(format!("companion does not halt on {w:?}")));
        }
        traj.push(pos);
        let (to, d) = n1
            .det_step_code(s, codes[pos])
            .ok_or_else(|| Error::NotSupersafe(format!("companion is undefined at position {pos}")))?;
        s = to;
        pos = d.apply(pos);
    }
    Ok(traj)
}

/// Drives the supersafe head with uniformly random fake readings for the
/// other head and checks that every trajectory is a prefix of `T_w` ending in a halt.
pub fn fuzz_supersafety(spec: &TwoHeadDfaSpec, w: &str, rng: &mut (impl RngCore + ?Sized), trials: usize) -> bool {
    let Some(head) = spec.supersafe_head else { return false };
    let Ok(reference) = supersafe_trajectory(spec, w) else { return false };
    let Ok(tape) = Tape::checked(w, &spec.sigma, "") else { return false };
    let ins = spec.input_symbols();
    for _ in 0..trials {
        let (mut s, mut pos) = (spec.start, 0usize);
        let mut k = 0usize;
        while !spec.is_halting(s) {
            if k >= reference.len() || reference[k] != pos {
                return false;
            }
            let real = tape.get(pos);
            let fake = ins[rng.random_range(0..ins.len())];
            let (a, b) = if head == 1 { (real, fake) } else { (fake, real) };
            let (to, d1, d2) = spec.step(s, a, b).expect("total");
            s = to;
            pos = if head == 1 { d1.apply(pos) } else { d2.apply(pos) };
            k += 1;
        }
    }
    true
}

/// Incremental construction of a [`TwoHeadDfaSpec`]; pairs left undefined on
/// non-halting states go to the reject state with both heads stationary.
#[derive(Clone, Debug)]
pub struct TwoHeadBuilder {
    states: Vec<String>,
    sigma: Vec<char>,
    rules: BTreeMap<(usize, char, char), TwoHeadRule>,
}

impl TwoHeadBuilder {
    pub fn new(sigma: &[char]) -> Self {
        TwoHeadBuilder { states: Vec::new(), sigma: sigma.to_vec(), rules: BTreeMap::new() }
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
    pub fn symbols(&self) -> Vec<char> {
        input_symbols(&self.sigma)
    }
    pub fn rule(&mut self, s: usize, c1: char, c2: char, to: usize, d1: Move, d2: Move) -> &mut Self {
        self.rules.insert((s, c1, c2), (to, d1, d2));
        self
    }
    pub fn build(
        mut self,
        start: usize,
        accept: usize,
        reject: usize,
        supersafe_head: Option<u8>,
        companion: Option<PtmSpec>,
    ) -> Result<TwoHeadDfaSpec> {
        let ins = self.symbols();
        for s in 0..self.states.len() {
            if s == accept || s == reject {
                continue;
            }
            for &a in &ins {
                for &b in &ins {
                    self.rules.entry((s, a, b)).or_insert((reject, Move::Stay, Move::Stay));
                }
            }
        }
        TwoHeadDfaSpec::from_parts(self.states, self.sigma, start, accept, reject, self.rules, supersafe_head, companion)
    }
}
