//! Normal form for chain analysis: a reserved start state `s1` that walks
//! from ◁ to ▷ with a clean work tape, and a work tape that is blank with
//! the head on cell 0 whenever the machine halts.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use crate::error::{Error, Result};
use crate::machines::{Branch, PtmSpec};
use crate::rational::Rational;
use crate::tape::{Move, BLANK, LEFT_END};

fn fresh_name(taken: &[String], base: &str) -> String {
    let mut name = base.to_string();
    while taken.iter().any(|s| *s == name) {
        name.push('\'');
    }
    name
}

/// Checks the static part of the normal form. The cleaning part depends on
/// run-time work-tape contents and is checked during megastate enumeration.
pub fn validate_conventions(m: &PtmSpec) -> Result<()> {
    let s1 = m.start();
    let bad = |msg: String| Err(Error::Convention(msg));
    if m.is_halting(s1) {
        return bad("start state is halting".into());
    }
    let ins = crate::machines::input_symbols(m.sigma());
    for &c in &ins {
        let Some(bs) = m.branches(s1, c, BLANK) else {
            return bad(format!("start state has no move on {c:?}"));
        };
        let ok = match bs {
            [b] if c == LEFT_END => b.to != s1 && b.write == BLANK && b.di == Move::Stay && b.dw == Move::Stay,
            [b] => b.to == s1 && b.write == BLANK && b.di == Move::Left && b.dw == Move::Stay,
            _ => false,
        };
        if !ok {
            return bad(format!("start state does not perform a plain leftward pass on {c:?}"));
        }
    }
    for ((s, read, work), bs) in m.rules() {
        if *s == s1 && *work != BLANK {
            return bad("start state reads a non-blank work symbol".into());
        }
        if *s != s1 && bs.iter().any(|b| b.to == s1) {
            return bad(format!("state {} re-enters the start state on ({read:?}, {work:?})", m.states()[*s]));
        }
    }
    Ok(())
}

/// Rewrites `m` into the normal form. Machines that never touch the work
/// tape only gain `s1`. Otherwise the work-head position is carried in the
/// control state (at most `work_cells` cells) so that halting can be
/// preceded by a sweep that blanks every cell and parks the head. Head
/// positions are explored per state over every read pair, so a rule that
/// could push the head past the budget is refused even when a concrete run
/// would never fire it.
pub fn convention_wrap(m: &PtmSpec, work_cells: usize) -> Result<PtmSpec> {
    let ins = crate::machines::input_symbols(m.sigma());
    let one = || Rational::one();
    let mut names: Vec<String> = Vec::new();
    let mut rules: BTreeMap<(usize, char, char), Vec<Branch>> = BTreeMap::new();
    let intern = |names: &mut Vec<String>, n: String| -> usize {
        match names.iter().position(|s| *s == n) {
            Some(i) => i,
            None => {
                names.push(n);
                names.len() - 1
            }
        }
    };
    let s1_name = fresh_name(m.states(), "s1");

    if !m.uses_work_tape() {
        let mut states = vec![s1_name];
        states.extend(m.states().iter().cloned());
        let shift = |s: usize| s + 1;
        for ((s, read, work), bs) in m.rules() {
            let bs = bs.iter().map(|b| Branch { to: shift(b.to), ..b.clone() }).collect();
            rules.insert((shift(*s), *read, *work), bs);
        }
        for &c in &ins {
            let b = if c == LEFT_END {
                Branch { prob: one(), to: shift(m.start()), write: BLANK, di: Move::Stay, dw: Move::Stay }
            } else {
                Branch { prob: one(), to: 0, write: BLANK, di: Move::Left, dw: Move::Stay }
            };
            rules.insert((0, c, BLANK), vec![b]);
        }
        return PtmSpec::from_parts(states, m.sigma().to_vec(), m.kappa().to_vec(), 0, shift(m.accept()), shift(m.reject()), rules);
    }

    if work_cells == 0 {
        return Err(Error::SpaceBudget("a machine that uses its work tape needs at least one cell".into()));
    }
    let s1 = intern(&mut names, s1_name);
    let acc = intern(&mut names, "acc".into());
    let rej = intern(&mut names, "rej".into());
    let name_of = |s: usize, h: usize| format!("{}@{h}", m.states()[s]);
    // Cleaning sweeps: right to the last cell, then left to cell 0.
    let sweep = |verdict: &str, dir: char, h: usize| format!("clean-{verdict}-{dir}@{h}");

    let mut seen: BTreeSet<(usize, usize)> = BTreeSet::new();
    let mut queue = VecDeque::new();
    let mut halts: BTreeSet<(bool, usize)> = BTreeSet::new();
    if m.is_halting(m.start()) {
        halts.insert((m.start() == m.accept(), 0));
    } else {
        seen.insert((m.start(), 0));
        queue.push_back((m.start(), 0usize));
    }
    while let Some((s, h)) = queue.pop_front() {
        let from = intern(&mut names, name_of(s, h));
        for ((rs, read, work), bs) in m.rules().range((s, char::MIN, char::MIN)..=(s, char::MAX, char::MAX)) {
            debug_assert_eq!(*rs, s);
            let mut out = Vec::with_capacity(bs.len());
            for b in bs {
                let h2 = match b.dw {
                    Move::Left if h == 0 => {
                        return Err(Error::MalformedMachine(format!("work head moves left of cell 0 in {}", m.states()[s])))
                    }
                    d => d.apply(h),
                };
                if h2 >= work_cells {
                    return Err(Error::SpaceBudget(format!(
                        "state {} may move the work head to cell {h2}, budget is {work_cells}",
                        m.states()[s]
                    )));
                }
                let to = if m.is_halting(b.to) {
                    let v = b.to == m.accept();
                    halts.insert((v, h2));
                    intern(&mut names, sweep(if v { "acc" } else { "rej" }, 'r', h2))
                } else {
                    if seen.insert((b.to, h2)) {
                        queue.push_back((b.to, h2));
                    }
                    intern(&mut names, name_of(b.to, h2))
                };
                out.push(Branch { to, ..b.clone() });
            }
            rules.insert((from, *read, *work), out);
        }
    }
    let start = if m.is_halting(m.start()) {
        if m.start() == m.accept() {
            acc
        } else {
            rej
        }
    } else {
        intern(&mut names, name_of(m.start(), 0))
    };
    for &c in &ins {
        let b = if c == LEFT_END {
            Branch { prob: one(), to: start, write: BLANK, di: Move::Stay, dw: Move::Stay }
        } else {
            Branch { prob: one(), to: s1, write: BLANK, di: Move::Left, dw: Move::Stay }
        };
        rules.insert((s1, c, BLANK), vec![b]);
    }
    let last = work_cells - 1;
    for (v, tag, target) in [(true, "acc", acc), (false, "rej", rej)] {
        if !halts.iter().any(|&(hv, _)| hv == v) {
            continue;
        }
        for h in 0..work_cells {
            let r = intern(&mut names, sweep(tag, 'r', h));
            let l = intern(&mut names, sweep(tag, 'l', h));
            let (r_to, r_dw) = if h == last { (l, Move::Stay) } else { (intern(&mut names, sweep(tag, 'r', h + 1)), Move::Right) };
            let (l_to, l_dw) = if h == 0 { (target, Move::Stay) } else { (intern(&mut names, sweep(tag, 'l', h - 1)), Move::Left) };
            for &c in &ins {
                for &k in m.kappa() {
                    rules.insert((r, c, k), vec![Branch { prob: one(), to: r_to, write: BLANK, di: Move::Stay, dw: r_dw }]);
                    rules.insert((l, c, k), vec![Branch { prob: one(), to: l_to, write: BLANK, di: Move::Stay, dw: l_dw }]);
                }
            }
        }
    }
    PtmSpec::from_parts(names, m.sigma().to_vec(), m.kappa().to_vec(), s1, acc, rej, rules)
}
