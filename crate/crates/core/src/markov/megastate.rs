use std::collections::{HashMap, VecDeque};

use serde::{Deserialize, Serialize};

use super::conventions::validate_conventions;
use crate::error::{Error, Result};
use crate::machines::PtmSpec;
use crate::rational::Rational;
use crate::tape::{Move, BLANK};

/// Largest megastate count the exact analysis accepts.
pub const MAX_MEGASTATES: usize = 200;

/// Control state, work-tape content (trailing blanks trimmed) and work-head position.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Megastate {
    pub state: usize,
    pub tape: Vec<char>,
    pub head: usize,
}

impl Megastate {
    pub fn clean(state: usize) -> Self {
        Megastate { state, tape: Vec::new(), head: 0 }
    }
    pub fn is_clean(&self) -> bool {
        self.tape.is_empty() && self.head == 0
    }
    fn symbol(&self) -> char {
        self.tape.get(self.head).copied().unwrap_or(BLANK)
    }
}

/// Megastates in chain order: index 0 is megastate 1 (start, clean), the
/// last two are reject and accept (clean).
#[derive(Clone, Debug)]
pub struct Megastates {
    pub list: Vec<Megastate>,
    index: HashMap<Megastate, usize>,
}

impl Megastates {
    /// Number of megastates, `c`.
    pub fn c(&self) -> usize {
        self.list.len()
    }
    /// 0-based position of `ms`.
    pub fn index_of(&self, ms: &Megastate) -> Option<usize> {
        self.index.get(ms).copied()
    }
    pub fn reject_index(&self) -> usize {
        self.list.len() - 2
    }
    pub fn accept_index(&self) -> usize {
        self.list.len() - 1
    }
}

/// Successor megastates when the input head reads `read`, with input-head
/// moves. `None` if the machine has no rule there.
pub(crate) fn successors(m: &PtmSpec, ms: &Megastate, read: char) -> Option<Vec<(Rational, Megastate, Move)>> {
    let bs = m.branches(ms.state, read, ms.symbol())?;
    let mut out = Vec::with_capacity(bs.len());
    for b in bs {
        let mut tape = ms.tape.clone();
        if ms.head >= tape.len() {
            tape.resize(ms.head + 1, BLANK);
        }
        tape[ms.head] = b.write;
        while tape.last() == Some(&BLANK) {
            tape.pop();
        }
        let head = match b.dw {
            Move::Left if ms.head == 0 => continue,
            d => d.apply(ms.head),
        };
        out.push((b.prob.clone(), Megastate { state: b.to, tape, head }, b.di));
    }
    Some(out)
}

/// Every megastate reachable from megastate 1 under any sequence of input
/// readings, with the work head confined to `work_cells` cells.
pub fn enumerate_megastates(m: &PtmSpec, work_cells: usize) -> Result<Megastates> {
    validate_conventions(m)?;
    let ins = crate::machines::input_symbols(m.sigma());
    let first = Megastate::clean(m.start());
    let mut list = vec![first.clone()];
    let mut index: HashMap<Megastate, usize> = HashMap::from([(first.clone(), 0)]);
    let mut queue = VecDeque::from([first]);
    while let Some(ms) = queue.pop_front() {
        for &c in &ins {
            let Some(next) = successors(m, &ms, c) else { continue };
            for (_, n, _) in next {
                if n.head >= work_cells.max(1) {
                    return Err(Error::SpaceBudget(format!("work head reaches cell {} (budget {work_cells})", n.head)));
                }
                if m.is_halting(n.state) {
                    if !n.is_clean() {
                        return Err(Error::Convention(format!("{} is entered with a dirty work tape", m.states()[n.state])));
                    }
                    continue;
                }
                if !index.contains_key(&n) {
                    index.insert(n.clone(), list.len());
                    list.push(n.clone());
                    if list.len() + 2 > MAX_MEGASTATES {
                        return Err(Error::SpaceBudget(format!("more than {MAX_MEGASTATES} megastates")));
                    }
                    queue.push_back(n);
                }
            }
        }
    }
    for s in [m.reject(), m.accept()] {
        let ms = Megastate::clean(s);
        index.insert(ms.clone(), list.len());
        list.push(ms);
    }
    Ok(Megastates { list, index })
}
