//! Freivalds-style 2PFA for EQ_ab = { a^n b^n }.
//!
//! After an `a*b*` format pass the machine sweeps back and forth. Each sweep
//! counts a's and b's mod `c` and tosses one fair coin per symbol; the a-group
//! (b-group) scores a goal when all its coins come up heads. A sweep where
//! exactly one group scores is a win for it. Counts that differ mod `c` reject
//! at once. After `d` wins the machine accepts iff both groups have won.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::machines::{PtmBuilder, PtmSpec};
use crate::rational::Rational;
use crate::tape::{Move, LEFT_END, RIGHT_END};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
struct Sweep {
    right: bool,
    ca: u32,
    cb: u32,
    ha: bool,
    hb: bool,
    wa: bool,
    wb: bool,
    wins: u32,
}

impl Sweep {
    fn name(&self) -> String {
        format!(
            "{}:{}:{}:{}{}:{}{}:{}",
            if self.right { 'R' } else { 'L' },
            self.ca,
            self.cb,
            self.ha as u8,
            self.hb as u8,
            self.wa as u8,
            self.wb as u8,
            self.wins
        )
    }
}

pub fn freivalds_eq(c_f: u32, d_f: u32) -> Result<PtmSpec> {
    if c_f < 2 || d_f < 1 {
        return Err(Error::Configuration(format!("need c_F >= 2 and d_F >= 1, got {c_f}, {d_f}")));
    }
    let sigma = ['a', 'b'];
    let mut b = PtmBuilder::new(&sigma, &[]);
    let fmt0 = b.state("fmt0");
    let acc = b.state("acc");
    let rej = b.state("rej");
    let fmt_a = b.state("fmt_a");
    let fmt_b = b.state("fmt_b");
    b.det(fmt0, LEFT_END, fmt0, Move::Right);
    b.det(fmt0, 'a', fmt_a, Move::Right);
    b.det(fmt0, 'b', fmt_b, Move::Right);
    b.det(fmt0, RIGHT_END, acc, Move::Stay);
    b.det(fmt_a, 'a', fmt_a, Move::Right);
    b.det(fmt_a, 'b', fmt_b, Move::Right);
    b.det(fmt_b, 'b', fmt_b, Move::Right);
    b.det(fmt_b, 'a', rej, Move::Stay);

    let fresh = |right: bool, wa: bool, wb: bool, wins: u32| Sweep { right, ca: 0, cb: 0, ha: true, hb: true, wa, wb, wins };
    let first = fresh(false, false, false, 0);
    let id = b.state(&first.name());
    b.det(fmt_a, RIGHT_END, id, Move::Left);
    b.det(fmt_b, RIGHT_END, id, Move::Left);

    let half = Rational::new(1, 2);
    let mut todo = vec![first];
    let mut seen = std::collections::HashSet::from([first]);
    while let Some(st) = todo.pop() {
        let me = b.state(&st.name());
        let dir = if st.right { Move::Right } else { Move::Left };
        let mut push = |b: &mut PtmBuilder, s: Sweep| -> usize {
            if seen.insert(s) {
                todo.push(s);
            }
            b.state(&s.name())
        };
        for sym in ['a', 'b'] {
            let heads = if sym == 'a' { st.ha } else { st.hb };
            let mut bump = st;
            if sym == 'a' {
                bump.ca = (st.ca + 1) % c_f;
            } else {
                bump.cb = (st.cb + 1) % c_f;
            }
            if heads {
                let mut tails = bump;
                if sym == 'a' {
                    tails.ha = false;
                } else {
                    tails.hb = false;
                }
                let h = push(&mut b, bump);
                let t = push(&mut b, tails);
                b.random(me, sym, &[(half.clone(), h, dir), (half.clone(), t, dir)]);
            } else {
                let to = push(&mut b, bump);
                b.det(me, sym, to, dir);
            }
        }
        let end = if st.right { RIGHT_END } else { LEFT_END };
        let other = if st.right { LEFT_END } else { RIGHT_END };
        // Never reached mid-sweep, but keep the table total.
        b.det(me, other, rej, Move::Stay);
        if st.ca != st.cb {
            b.det(me, end, rej, Move::Stay);
            continue;
        }
        let (mut wa, mut wb, mut wins) = (st.wa, st.wb, st.wins);
        if st.ha != st.hb {
            wins += 1;
            wa |= st.ha;
            wb |= st.hb;
        }
        if wins == d_f {
            b.det(me, end, if wa && wb { acc } else { rej }, Move::Stay);
        } else {
            let to = push(&mut b, fresh(!st.right, wa, wb, wins));
            b.det(me, end, to, dir.reverse());
        }
    }
    b.build(fmt0, acc, rej)
}

/// Exact probability that the machine answers wrongly on `a^na b^nb`.
pub fn exact_error(c_f: u32, d_f: u32, na: u32, nb: u32) -> f64 {
    let equal = na == nb;
    if na == 0 && nb == 0 {
        return 0.0;
    }
    if na % c_f != nb % c_f {
        return 0.0;
    }
    let ga = 0.5f64.powi(na as i32);
    let gb = 0.5f64.powi(nb as i32);
    let qa = ga * (1.0 - gb);
    let qb = gb * (1.0 - ga);
    let ra = qa / (qa + qb);
    let rb = qb / (qa + qb);
    let one_sided = ra.powi(d_f as i32) + rb.powi(d_f as i32);
    if equal {
        one_sided
    } else {
        1.0 - one_sided
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FreivaldsCalibration {
    pub c_f: u32,
    pub d_f: u32,
    pub worst_error: f64,
    pub worst_case: (u32, u32),
}

/// Worst exact error over `a^na b^nb` with `na + nb ≤ n_max`. Strings outside
/// `a*b*` are rejected with certainty.
pub fn worst_error(c_f: u32, d_f: u32, n_max: u32) -> (f64, (u32, u32)) {
    let mut worst = (0.0, (0, 0));
    for na in 0..=n_max {
        for nb in 0..=n_max - na {
            let e = exact_error(c_f, d_f, na, nb);
            if e > worst.0 {
                worst = (e, (na, nb));
            }
        }
    }
    worst
}

/// Smallest `d_F ≤ d_max` whose worst error is at most `target`.
pub fn calibrate(c_f: u32, target: f64, n_max: u32, d_max: u32) -> Result<FreivaldsCalibration> {
    for d_f in 1..=d_max {
        let (e, case) = worst_error(c_f, d_f, n_max);
        if e <= target {
            return Ok(FreivaldsCalibration { c_f, d_f, worst_error: e, worst_case: case });
        }
    }
    Err(Error::Configuration(format!("c_F = {c_f} reaches error {target} with no d_F <= {d_max}")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::machines::run_machine;
    use crate::machines::Verdict;
    use crate::rng::trial_rng;

    fn accept_rate(m: &PtmSpec, w: &str, n: u64) -> f64 {
        let acc = (0..n)
            .filter(|&t| run_machine(m, w, &mut trial_rng(21, t), 1_000_000).unwrap().verdict == Verdict::Accept)
            .count();
        acc as f64 / n as f64
    }

    #[test]
    fn congruence_short_circuit() {
        let m = freivalds_eq(5, 3).unwrap();
        assert_eq!(accept_rate(&m, "aab", 200), 0.0);
        assert_eq!(accept_rate(&m, "aba", 50), 0.0);
        assert_eq!(accept_rate(&m, "", 10), 1.0);
    }

    #[test]
    fn matches_exact_error() {
        let m = freivalds_eq(6, 5).unwrap();
        let got = accept_rate(&m, "aabb", 4000);
        assert!((got - (1.0 - exact_error(6, 5, 2, 2))).abs() < 0.015, "{got}");
        let got = accept_rate(&m, "abbbbbbb", 4000);
        assert!((got - exact_error(6, 5, 1, 7)).abs() < 0.015, "{got}");
    }

    #[test]
    fn calibration_picks_five() {
        let cal = calibrate(6, 0.1, 20, 12).unwrap();
        assert_eq!(cal.d_f, 5);
        assert!(cal.worst_error <= 0.1);
        assert!(calibrate(5, 0.1, 20, 30).is_err());
    }
}
