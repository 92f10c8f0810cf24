use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use serde::{Deserialize, Serialize};

use super::megastate::{enumerate_megastates, successors, Megastate, Megastates};
use super::solve::{solve, Equation};
use crate::error::{Error, Result};
use crate::machines::PtmSpec;
use crate::rational::Rational;
use crate::tape::Tape;

/// Longest `xy` the exact construction accepts.
pub const MAX_INPUT: usize = 10;

/// A chain on states `1..=2c`: `j` is megastate `j` on the last cell of ▷x,
/// `c+j−1` is megastate `j` on the first cell of y◁, `2c−1` collects
/// rejection and region-confined loops, `2c` is acceptance.
#[derive(Clone, Debug, PartialEq)]
pub struct MarkovChain {
    c: usize,
    rows: Vec<BTreeMap<usize, Rational>>,
}

impl MarkovChain {
    /// Builds a chain from 1-based sparse rows; rows must be stochastic and
    /// the two traps self-loops.
    pub fn from_rows(c: usize, rows: Vec<BTreeMap<usize, Rational>>) -> Result<Self> {
        if c < 2 || rows.len() != 2 * c {
            return Err(Error::Configuration(format!("a chain with c = {c} needs {} rows", 2 * c)));
        }
        let chain = MarkovChain { c, rows };
        for i in 1..=2 * c {
            if chain.row(i).keys().any(|&j| j == 0 || j > 2 * c) {
                return Err(Error::Configuration(format!("row {i} has an out-of-range target")));
            }
            if chain.row(i).values().any(Rational::is_negative) || !chain.row_sum(i).is_one() {
                return Err(Error::Configuration(format!("row {i} is not a distribution")));
            }
        }
        for t in [2 * c - 1, 2 * c] {
            if !chain.p(t, t).is_one() {
                return Err(Error::Configuration(format!("trap {t} is not a self-loop")));
            }
        }
        Ok(chain)
    }

    pub fn c(&self) -> usize {
        self.c
    }
    pub fn size(&self) -> usize {
        2 * self.c
    }
    pub fn reject_trap(&self) -> usize {
        2 * self.c - 1
    }
    pub fn accept_trap(&self) -> usize {
        2 * self.c
    }
    pub fn row(&self, i: usize) -> &BTreeMap<usize, Rational> {
        &self.rows[i - 1]
    }
    pub fn p(&self, i: usize, j: usize) -> Rational {
        self.rows[i - 1].get(&j).cloned().unwrap_or_else(Rational::zero)
    }
    pub fn row_sum(&self, i: usize) -> Rational {
        self.row(i).values().fold(Rational::zero(), |a, b| a + b)
    }
    pub fn is_stochastic(&self) -> bool {
        (1..=self.size()).all(|i| self.row_sum(i).is_one())
    }
}

/// Configuration of a machine: 1-based megastate and input-head position.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Config {
    pub megastate: usize,
    pub pos: usize,
}

/// The chain with the context needed to map configurations onto it.
#[derive(Clone, Debug)]
pub struct ChainModel {
    pub chain: MarkovChain,
    pub megastates: Megastates,
    /// Position of the last cell of ▷x.
    pub boundary: usize,
}

impl ChainModel {
    /// Chain state of a boundary configuration.
    pub fn state_of(&self, cfg: Config) -> Option<usize> {
        let c = self.megastates.c();
        if cfg.megastate == 0 || cfg.megastate >= c {
            return None;
        }
        if cfg.pos == self.boundary {
            Some(cfg.megastate)
        } else if cfg.pos == self.boundary + 1 {
            Some(c + cfg.megastate - 1)
        } else {
            None
        }
    }

    pub fn chain_states(&self, configs: &BTreeSet<Config>) -> BTreeSet<usize> {
        configs.iter().filter_map(|&c| self.state_of(c)).collect()
    }
}

fn input_tape(m: &PtmSpec, x: &str, y: &str) -> Result<Tape> {
    let w = format!("{x}{y}");
    let n = w.chars().count();
    if n > MAX_INPUT {
        return Err(Error::ResourceBound { len: n, max: MAX_INPUT });
    }
    Tape::checked(&w, m.sigma(), "machine input alphabet")
}

type Node = (usize, usize);

/// One step of the configuration graph. Halting successors are kept as nodes.
fn config_step(m: &PtmSpec, ms: &Megastates, tape: &Tape, (k, pos): Node) -> Result<Vec<(Rational, Node)>> {
    let cur = &ms.list[k];
    let read = tape.get(pos);
    let next = successors(m, cur, read).ok_or_else(|| {
        Error::MalformedMachine(format!("no transition for ({}, {read:?}) in {:?}", m.states()[cur.state], cur))
    })?;
    next.into_iter()
        .map(|(p, n, d)| {
            let idx = ms.index_of(&n).ok_or_else(|| Error::SpaceBudget(format!("megastate {n:?} was not enumerated")))?;
            Ok((p, (idx, d.apply(pos))))
        })
        .collect()
}

/// Exact exit distributions of the region `lo..=hi` from each start node.
/// Targets are chain states; mass that never leaves the region and never
/// halts is left out.
fn region_exits(
    m: &PtmSpec,
    ms: &Megastates,
    tape: &Tape,
    (lo, hi): (usize, usize),
    starts: &[Node],
    exit_state: impl Fn(usize) -> usize,
    traps: (usize, usize),
) -> Result<Vec<BTreeMap<usize, Rational>>> {
    let (rej_trap, acc_trap) = traps;
    let halting_target = |k: usize| {
        if k == ms.accept_index() {
            Some(acc_trap)
        } else if k == ms.reject_index() {
            Some(rej_trap)
        } else {
            None
        }
    };
    let mut id: HashMap<Node, usize> = HashMap::new();
    let mut nodes: Vec<Node> = Vec::new();
    let mut internal: Vec<Vec<(Rational, usize)>> = Vec::new();
    let mut direct: Vec<BTreeMap<usize, Rational>> = Vec::new();
    let mut queue = VecDeque::new();
    for &s in starts {
        if let std::collections::hash_map::Entry::Vacant(e) = id.entry(s) {
            e.insert(nodes.len());
            nodes.push(s);
            queue.push_back(s);
        }
    }
    while let Some(node) = queue.pop_front() {
        let mut inner = Vec::new();
        let mut out: BTreeMap<usize, Rational> = BTreeMap::new();
        // Boundary configurations that no run attains may have no rule;
        // they are sent to the reject trap. Reachable ones are checked by
        // `detect_looping`.
        let steps = match config_step(m, ms, tape, node) {
            Err(Error::MalformedMachine(_)) => vec![(Rational::one(), (ms.reject_index(), node.1))],
            r => r?,
        };
        for (p, (k, pos)) in steps {
            let target = match halting_target(k) {
                Some(t) => Some(t),
                None if pos < lo || pos > hi => Some(exit_state(k)),
                None => None,
            };
            match target {
                Some(t) => {
                    let e = out.entry(t).or_insert_with(Rational::zero);
                    *e = e.clone() + p;
                }
                None => {
                    let next = (k, pos);
                    let j = *id.entry(next).or_insert_with(|| {
                        nodes.push(next);
                        queue.push_back(next);
                        nodes.len() - 1
                    });
                    inner.push((p, j));
                }
            }
        }
        internal.push(inner);
        direct.push(out);
    }
    // Keep nodes that can reach an exit; the rest loop inside the region.
    let n = nodes.len();
    let mut preds: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (u, inner) in internal.iter().enumerate() {
        for &(_, v) in inner {
            preds[v].push(u);
        }
    }
    let mut live = vec![false; n];
    let mut stack: Vec<usize> = (0..n).filter(|&u| !direct[u].is_empty()).collect();
    for &u in &stack {
        live[u] = true;
    }
    while let Some(v) = stack.pop() {
        for &u in &preds[v] {
            if !live[u] {
                live[u] = true;
                stack.push(u);
            }
        }
    }
    let var: Vec<Option<usize>> = {
        let mut next = 0;
        live.iter()
            .map(|&l| {
                l.then(|| {
                    next += 1;
                    next - 1
                })
            })
            .collect()
    };
    let mut eqs = Vec::new();
    for u in 0..n {
        if var[u].is_none() {
            continue;
        }
        let mut e = Equation { coeffs: BTreeMap::new(), rhs: direct[u].clone() };
        for (p, v) in &internal[u] {
            if let Some(j) = var[*v] {
                let c = e.coeffs.entry(j).or_insert_with(Rational::zero);
                *c = c.clone() + p;
            }
        }
        eqs.push(e);
    }
    let sol = solve(eqs)?;
    Ok(starts.iter().map(|s| var[id[s]].map(|j| sol[j].clone()).unwrap_or_default()).collect())
}

/// Builds the chain for `m` (in normal form) on `x·y`. Every entry is the
/// exact probability of the next boundary crossing, obtained by solving the
/// region's configuration graph.
pub fn build_chain(m: &PtmSpec, x: &str, y: &str, work_cells: usize) -> Result<ChainModel> {
    let tape = input_tape(m, x, y)?;
    let ms = enumerate_megastates(m, work_cells)?;
    let c = ms.c();
    let boundary = x.chars().count();
    let right_end = tape.right_end();
    let traps = (2 * c - 1, 2 * c);
    let mut rows: Vec<BTreeMap<usize, Rational>> = vec![BTreeMap::new(); 2 * c];
    // Only megastates 1..c−2 (0-based 0..c−2) are non-halting boundary states.
    let live: Vec<usize> = (0..c - 2).collect();
    let left = region_exits(m, &ms, &tape, (0, boundary), &live.iter().map(|&k| (k, boundary)).collect::<Vec<_>>(), |k| c + k, traps)?;
    let right = region_exits(
        m,
        &ms,
        &tape,
        (boundary + 1, right_end),
        &live.iter().map(|&k| (k, boundary + 1)).collect::<Vec<_>>(),
        |k| k + 1,
        traps,
    )?;
    for (k, exits) in live.iter().zip(left) {
        rows[*k] = exits;
    }
    for (k, exits) in live.iter().zip(right) {
        rows[c + k - 1] = exits;
    }
    for (i, row) in rows.iter_mut().enumerate() {
        let state = i + 1;
        if state == traps.0 || state == traps.1 {
            row.clear();
            row.insert(state, Rational::one());
            continue;
        }
        let rest = Rational::one() - row.values().fold(Rational::zero(), |a, b| a + b);
        if rest.is_negative() {
            return Err(Error::MalformedMachine(format!("row {state} has mass above one")));
        }
        if !rest.is_zero() {
            let e = row.entry(traps.0).or_insert_with(Rational::zero);
            *e = e.clone() + rest;
        }
    }
    let chain = MarkovChain::from_rows(c, rows)?;
    Ok(ChainModel { chain, megastates: ms, boundary })
}

/// Configurations reachable on `x·y` (from megastate 1 on ◁) from which no
/// halting configuration is reachable.
pub fn detect_looping(m: &PtmSpec, x: &str, y: &str, work_cells: usize) -> Result<BTreeSet<Config>> {
    let tape = input_tape(m, x, y)?;
    let ms = enumerate_megastates(m, work_cells)?;
    let halting = |k: usize| k == ms.accept_index() || k == ms.reject_index();
    let start: Node = (0, tape.right_end());
    let mut id: HashMap<Node, usize> = HashMap::from([(start, 0)]);
    let mut nodes = vec![start];
    let mut succ: Vec<Vec<usize>> = Vec::new();
    let mut i = 0;
    while i < nodes.len() {
        let node = nodes[i];
        let mut out = Vec::new();
        if !halting(node.0) {
            for (p, next) in config_step(m, &ms, &tape, node)? {
                if p.is_zero() {
                    continue;
                }
                let j = *id.entry(next).or_insert_with(|| {
                    nodes.push(next);
                    nodes.len() - 1
                });
                out.push(j);
            }
        }
        succ.push(out);
        i += 1;
    }
    let n = nodes.len();
    let mut preds: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (u, out) in succ.iter().enumerate() {
        for &v in out {
            preds[v].push(u);
        }
    }
    let mut halts = vec![false; n];
    let mut stack: Vec<usize> = (0..n).filter(|&u| halting(nodes[u].0)).collect();
    for &u in &stack {
        halts[u] = true;
    }
    while let Some(v) = stack.pop() {
        for &u in &preds[v] {
            if !halts[u] {
                halts[u] = true;
                stack.push(u);
            }
        }
    }
    Ok((0..n).filter(|&u| !halts[u]).map(|u| Config { megastate: nodes[u].0 + 1, pos: nodes[u].1 }).collect())
}

/// Diverts every transition into a state of `looping` to the reject/loop trap.
pub fn rewire_looping(chain: &MarkovChain, looping: &BTreeSet<usize>) -> Result<MarkovChain> {
    let trap = chain.reject_trap();
    if let Some(j) = looping.iter().find(|&&j| j == 0 || j >= trap) {
        return Err(Error::Precondition(format!("state {j} is a trap or out of range")));
    }
    let mut rows = chain.rows.clone();
    for row in rows.iter_mut() {
        let mut moved = Rational::zero();
        for j in looping {
            if let Some(p) = row.remove(j) {
                moved = moved + p;
            }
        }
        if !moved.is_zero() {
            let e = row.entry(trap).or_insert_with(Rational::zero);
            *e = e.clone() + moved;
        }
    }
    Ok(MarkovChain { c: chain.c, rows })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Absorption {
    pub p_accept: Rational,
    pub p_other: Rational,
    pub expected_time: Rational,
}

/// Absorption probabilities and expected steps to absorption from state 1.
pub fn absorption(chain: &MarkovChain) -> Result<Absorption> {
    let (rej, acc) = (chain.reject_trap(), chain.accept_trap());
    let mut order = vec![1usize];
    let mut var: HashMap<usize, usize> = HashMap::from([(1, 0)]);
    let mut i = 0;
    while i < order.len() {
        for &j in chain.row(order[i]).keys() {
            if j != rej && j != acc && !var.contains_key(&j) {
                var.insert(j, order.len());
                order.push(j);
            }
        }
        i += 1;
    }
    // Every reachable transient state must reach a trap.
    let mut reaches = vec![false; order.len()];
    loop {
        let mut changed = false;
        for (u, &s) in order.iter().enumerate() {
            if !reaches[u] && chain.row(s).keys().any(|&j| j == rej || j == acc || var.get(&j).is_some_and(|&v| reaches[v])) {
                reaches[u] = true;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    if let Some(u) = reaches.iter().position(|r| !r) {
        return Err(Error::NotAbsorbing(format!("state {} never reaches a trap", order[u])));
    }
    const ACC: usize = 0;
    const REJ: usize = 1;
    const TIME: usize = 2;
    let eqs = order
        .iter()
        .map(|&s| {
            let mut e = Equation::default();
            e.rhs.insert(TIME, Rational::one());
            for (&j, p) in chain.row(s) {
                if j == acc {
                    e.rhs.insert(ACC, p.clone());
                } else if j == rej {
                    e.rhs.insert(REJ, p.clone());
                } else if !p.is_zero() {
                    e.coeffs.insert(var[&j], p.clone());
                }
            }
            e
        })
        .collect();
    let sol = solve(eqs)?;
    let get = |k: usize| sol[0].get(&k).cloned().unwrap_or_else(Rational::zero);
    Ok(Absorption { p_accept: get(ACC), p_other: get(REJ), expected_time: get(TIME) })
}

/// Summary used by the command line.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChainReport {
    pub x: String,
    pub y: String,
    pub c: usize,
    pub looping_configurations: usize,
    pub looping_states: Vec<usize>,
    pub p_accept: Rational,
    pub p_accept_decimal: f64,
    pub p_other: Rational,
    pub p_other_decimal: f64,
    pub expected_time: Rational,
    pub expected_time_decimal: f64,
}

/// Wraps `m`, builds and rewires its chain on `x·y`, and absorbs it.
pub fn analyze(m: &PtmSpec, x: &str, y: &str, work_cells: usize) -> Result<ChainReport> {
    let w = super::conventions::convention_wrap(m, work_cells)?;
    let model = build_chain(&w, x, y, work_cells)?;
    let looping = detect_looping(&w, x, y, work_cells)?;
    let states = model.chain_states(&looping);
    let rewired = rewire_looping(&model.chain, &states)?;
    let a = absorption(&rewired)?;
    Ok(ChainReport {
        x: x.into(),
        y: y.into(),
        c: model.megastates.c(),
        looping_configurations: looping.len(),
        looping_states: states.into_iter().collect(),
        p_accept_decimal: a.p_accept.to_f64(),
        p_other_decimal: a.p_other.to_f64(),
        expected_time_decimal: a.expected_time.to_f64(),
        p_accept: a.p_accept,
        p_other: a.p_other,
        expected_time: a.expected_time,
    })
}

/// Human-readable megastate, e.g. `scan@0[x]@0`.
pub fn describe(m: &PtmSpec, ms: &Megastate) -> String {
    let tape: String = ms.tape.iter().collect();
    format!("{}[{tape}]@{}", m.states()[ms.state], ms.head)
}
