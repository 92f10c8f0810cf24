//! Probabilistic clock: a 2PFA that runs for a long, random time.
//!
//! The machine plays repeated gambler's-ruin trials: starting next to one
//! end, it random-walks until it hits an endmarker. Reaching the far end is a
//! win and flips the target; falling back is a loss and resets the streak.
//! A run of `t` consecutive wins completes one repetition, and the machine
//! halts after `r` repetitions. Each trial costs at least `n + 1` steps, so
//! for `t = 1` taking `r = c` makes halting before `c·n` impossible. For
//! `t ≥ 2` the smallest `r` is found by an exact forward pass over the
//! machine's configuration distribution on a grid of lengths.

use std::collections::HashMap;

use rand::RngCore;
use rand_distr::{Distribution, Geometric};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::machines::{PtmBuilder, PtmSpec};
use crate::rational::Rational;
use crate::tape::{Move, BLANK, LEFT_END, RIGHT_END, STAR};

/// Every symbol any shipped protocol may put on the tape.
pub const CLOCK_SIGMA: [char; 6] = ['a', 'b', '#', '0', '1', STAR];

/// Largest repetition count the calibration search will try.
pub const MAX_REPETITIONS: u64 = 4096;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClockCalibration {
    pub c: u64,
    pub t: u32,
    pub eps_premature: f64,
    pub repetitions: u64,
    /// `C` with `E[T] ≤ C·n^{t+1}` for every n ≥ 1.
    pub mean_constant: f64,
    /// Exact `P[T < c·n^t]` for each grid length.
    pub premature: Vec<(usize, f64)>,
}

#[derive(Clone, Debug)]
pub struct ClockSpec {
    pub calibration: ClockCalibration,
    pub machine: PtmSpec,
}

impl ClockSpec {
    pub fn repetitions(&self) -> u64 {
        self.calibration.repetitions
    }

    /// `1 + (n+1)·r·Σ_{j=1..t} (n+1)^j`.
    pub fn expected_steps(&self, n: usize) -> f64 {
        expected_steps(n, self.calibration.t, self.calibration.repetitions)
    }
}

pub fn expected_steps(n: usize, t: u32, r: u64) -> f64 {
    let b = (n + 1) as f64;
    let geo: f64 = (1..=t as i32).map(|j| b.powi(j)).sum();
    1.0 + b * r as f64 * geo
}

/// `1 + 2r(2^{t+1} − 2)`, the value of `E[T]/n^{t+1}` at n = 1 (its maximum).
pub fn mean_constant(t: u32, r: u64) -> f64 {
    1.0 + 2.0 * r as f64 * (2f64.powi(t as i32 + 1) - 2.0)
}

/// Premature-halting threshold `c·n^t`.
pub fn budget(c: u64, t: u32, n: usize) -> u64 {
    c.saturating_mul((n as u64).saturating_pow(t))
}

/// Builds the walk machine with an explicit repetition count.
pub fn clock_machine(t: u32, r: u64, sigma: &[char]) -> Result<PtmSpec> {
    if t == 0 || r == 0 {
        return Err(Error::Configuration("clock needs t >= 1 and r >= 1".into()));
    }
    let mut b = PtmBuilder::new(sigma, &[]);
    let start = b.state("start");
    let done = b.state("done");
    let rej = b.state("unused");
    let mut walk = HashMap::new();
    for k in 0..r {
        for s in 0..t {
            for target_right in [true, false] {
                let name = format!("w{s}.{k}.{}", if target_right { 'R' } else { 'L' });
                walk.insert((s, k, target_right), b.state(&name));
            }
        }
    }
    let half = Rational::new(1, 2);
    b.det(start, LEFT_END, walk[&(0, 0, true)], Move::Right);
    for (&(s, k, target_right), &q) in &walk {
        for &c in sigma {
            b.random(q, c, &[(half.clone(), q, Move::Left), (half.clone(), q, Move::Right)]);
        }
        let (win_end, lose_end) = if target_right { (RIGHT_END, LEFT_END) } else { (LEFT_END, RIGHT_END) };
        // A win: bump the streak, maybe finish a repetition, head back.
        let (s2, k2) = if s + 1 == t { (0, k + 1) } else { (s + 1, k) };
        if k2 == r {
            b.det(q, win_end, done, Move::Stay);
        } else {
            b.det(q, win_end, walk[&(s2, k2, !target_right)], off(win_end));
        }
        b.det(q, lose_end, walk[&(0, k, target_right)], off(lose_end));
    }
    b.build(start, done, rej)
}

fn off(end: char) -> Move {
    if end == LEFT_END {
        Move::Right
    } else {
        Move::Left
    }
}

/// Exact `P[T < horizon]` for a machine without a work tape on an input of
/// length n (symbols do not matter to the clock, so the input is `a^n`).
pub fn premature_probability(machine: &PtmSpec, n: usize, horizon: u64) -> Result<f64> {
    let ns = machine.states().len();
    let width = n + 2;
    let cell = |pos: usize| if pos == 0 { LEFT_END } else if pos == n + 1 { RIGHT_END } else { 'a' };
    let mut dist = vec![0.0f64; ns * width];
    dist[machine.start() * width] = 1.0;
    let mut halted = 0.0;
    for _ in 0..horizon.saturating_sub(1) {
        let mut next = vec![0.0f64; ns * width];
        for (idx, &mass) in dist.iter().enumerate() {
            if mass == 0.0 {
                continue;
            }
            let (s, pos) = (idx / width, idx % width);
            let branches = machine.branches(s, cell(pos), BLANK).ok_or_else(|| {
                Error::MalformedMachine(format!("clock has no move in state {} at {pos}", machine.states()[s]))
            })?;
            for br in branches {
                let m = mass * br.prob.to_f64();
                if br.to == machine.accept() {
                    halted += m;
                } else {
                    next[br.to * width + br.di.apply(pos)] += m;
                }
            }
        }
        dist = next;
    }
    Ok(halted)
}

pub fn default_grid(t: u32) -> Vec<usize> {
    if t == 1 {
        vec![1, 2, 4, 8, 16, 32, 64]
    } else {
        (1..=16).collect()
    }
}

/// Calibrated clock over [`CLOCK_SIGMA`] and the default grid.
pub fn make_clock(c: u64, t: u32, eps_premature: f64) -> Result<ClockSpec> {
    make_clock_on(c, t, eps_premature, &default_grid(t), &CLOCK_SIGMA)
}

pub fn make_clock_on(c: u64, t: u32, eps_premature: f64, grid: &[usize], sigma: &[char]) -> Result<ClockSpec> {
    if c == 0 || t == 0 || !(eps_premature > 0.0 && eps_premature < 1.0) {
        return Err(Error::Configuration(format!("bad clock parameters c={c}, t={t}, eps={eps_premature}")));
    }
    let evaluate = |r: u64| -> Result<(PtmSpec, Vec<(usize, f64)>)> {
        let machine = clock_machine(t, r, sigma)?;
        let mut rows = Vec::with_capacity(grid.len());
        for &n in grid {
            let h = budget(c, t, n);
            // For t = 1 and r ≥ c, T ≥ r(n+1)+1 > c·n, so there is nothing to compute.
            let pr = if t == 1 && r >= c { 0.0 } else { premature_probability(&machine, n, h)? };
            rows.push((n, pr));
        }
        Ok((machine, rows))
    };
    let ok = |rows: &[(usize, f64)]| rows.iter().all(|&(_, pr)| pr <= eps_premature);
    let (r, machine, premature) = if t == 1 {
        let (m, rows) = evaluate(c)?;
        (c, m, rows)
    } else {
        // Premature mass only shrinks as r grows, so doubling then bisecting
        // finds the least passing r.
        let mut hi = 1;
        let mut found = evaluate(hi)?;
        while !ok(&found.1) {
            hi *= 2;
            if hi > MAX_REPETITIONS {
                return Err(Error::Configuration(format!(
                    "no repetition count up to {MAX_REPETITIONS} meets eps={eps_premature}"
                )));
            }
            found = evaluate(hi)?;
        }
        let mut lo = hi / 2;
        while lo + 1 < hi {
            let mid = (lo + hi) / 2;
            let cand = evaluate(mid)?;
            if ok(&cand.1) {
                hi = mid;
                found = cand;
            } else {
                lo = mid;
            }
        }
        (hi, found.0, found.1)
    };
    Ok(ClockSpec {
        calibration: ClockCalibration {
            c,
            t,
            eps_premature,
            repetitions: r,
            mean_constant: mean_constant(t, r),
            premature,
        },
        machine,
    })
}

/// One symmetric gambler's-ruin trial from position 1 on `[0, n+1]`.
/// Returns whether the walk reached `n+1` and how many moves it took.
pub fn gamblers_ruin(n: usize, rng: &mut (impl RngCore + ?Sized)) -> (bool, u64) {
    let mut pos = 1usize;
    let mut steps = 0u64;
    while pos != 0 && pos != n + 1 {
        pos = if rng.next_u64() >> 63 == 0 { pos - 1 } else { pos + 1 };
        steps += 1;
    }
    (pos == n + 1, steps)
}

/// Halting time of the idealized clock: `c·n^t` plus a geometric extra with
/// mean `n^{t+1}`, so `E[T] ≤ (c+1)·n^{t+1}`.
pub fn idealized_halting_time(c: u64, t: u32, n: usize, rng: &mut (impl RngCore + ?Sized)) -> u64 {
    let base = budget(c, t, n).max(1);
    let mean_extra = (n as f64).powi(t as i32 + 1);
    let extra = Geometric::new(1.0 / (mean_extra + 1.0)).map(|g| g.sample(rng)).unwrap_or(0);
    base.saturating_add(extra)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::machines::run_machine;
    use crate::rng::trial_rng;

    #[test]
    fn ruin_symmetry_n1() {
        let mut rng = trial_rng(11, 0);
        let wins = (0..10_000).filter(|_| gamblers_ruin(1, &mut rng).0).count();
        assert!((wins as f64 / 1e4 - 0.5).abs() <= 0.02, "{wins}");
    }

    #[test]
    fn t1_uses_r_equal_c_and_never_halts_early() {
        let clk = make_clock(3, 1, 0.05).unwrap();
        assert_eq!(clk.repetitions(), 3);
        assert!(clk.calibration.premature.iter().all(|&(_, p)| p == 0.0));
        for n in [1, 4, 9] {
            assert_eq!(premature_probability(&clk.machine, n, budget(3, 1, n)).unwrap(), 0.0);
        }
        let mut rng = trial_rng(1, 0);
        for _ in 0..200 {
            let out = run_machine(&clk.machine, "aaaa", &mut rng, u64::MAX).unwrap();
            assert!(out.steps >= 3 * 5 + 1);
        }
    }

    #[test]
    fn t2_calibration_meets_target() {
        let clk = make_clock(1, 2, 0.1).unwrap();
        for &(n, pr) in &clk.calibration.premature {
            assert!(pr <= 0.1, "n={n} p={pr}");
        }
        // Minimality: one fewer repetition breaks the target somewhere.
        let r = clk.repetitions();
        if r > 1 {
            let m = clock_machine(2, r - 1, &CLOCK_SIGMA).unwrap();
            assert!(default_grid(2).iter().any(|&n| premature_probability(&m, n, budget(1, 2, n)).unwrap() > 0.1));
        }
    }

    #[test]
    fn dp_matches_sampling_on_small_case() {
        let m = clock_machine(1, 1, &CLOCK_SIGMA).unwrap();
        // n = 1, r = 1, t = 1: each trial costs exactly 2 steps and wins with
        // prob 1/2, so T = 1 + 2G with G ~ Geometric(1/2) on {1, 2, ...}.
        // P[T < 6] = P[G <= 2] = 3/4.
        let p = premature_probability(&m, 1, 6).unwrap();
        assert!((p - 0.75).abs() < 1e-12, "{p}");
    }

    #[test]
    fn empty_input_halts_fast() {
        let clk = make_clock(2, 1, 0.1).unwrap();
        let mut rng = trial_rng(2, 0);
        let out = run_machine(&clk.machine, "", &mut rng, 1000).unwrap();
        assert_eq!(out.steps, 1 + 2);
    }

    #[test]
    fn idealized_respects_budget() {
        let mut rng = trial_rng(3, 0);
        for _ in 0..1000 {
            assert!(idealized_halting_time(2, 1, 8, &mut rng) >= 16);
        }
    }

    #[test]
    fn mean_constant_bounds_formula() {
        for t in 1..=3 {
            for r in [1, 5] {
                let c = mean_constant(t, r);
                assert!((expected_steps(1, t, r) - c).abs() < 1e-9);
                for n in 1..40 {
                    assert!(expected_steps(n, t, r) <= c * (n as f64).powi(t as i32 + 1) + 1e-9);
                }
            }
        }
    }
}
