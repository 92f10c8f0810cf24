//! Exact rejection analysis for round-mixing provers.
//!
//! A prover that is truthful in round i with probability t_i against a
//! non-member gets rejected with probability f(1), where
//! f(i) = (1−p)·t_i·f(i+1) + (1−p)(1−t_i) + p·t_i and
//! f(m) = (1−p)(1−t_m) + p·t_m.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::Rational;

pub fn f_recursion(p: &Rational, t: &[Rational]) -> Result<Rational> {
    if t.is_empty() {
        return Err(Error::Configuration("t must have at least one entry".into()));
    }
    if !p.in_unit_interval() || t.iter().any(|x| !x.in_unit_interval()) {
        return Err(Error::Configuration("probabilities must lie in [0,1]".into()));
    }
    let one = Rational::one();
    let q = &one - p;
    let last = t.len() - 1;
    let mut f = &q * &(&one - &t[last]) + p * &t[last];
    for ti in t[..last].iter().rev() {
        f = &(&q * ti) * &f + &q * &(&one - ti) + p * ti;
    }
    Ok(f)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MinF1 {
    pub t_star: Vec<Rational>,
    pub f1_min: Rational,
}

/// Minimizes f(1) over `t ∈ {0, 1/(g−1), …, 1}^m`. f(i) is affine in t_i
/// and nondecreasing in f(i+1), so picking the better endpoint from the
/// last round backwards is optimal.
pub fn min_f1(p: &Rational, m: usize, grid: usize) -> Result<MinF1> {
    if grid < 2 || m == 0 {
        return Err(Error::Configuration("need grid >= 2 and m >= 1".into()));
    }
    let one = Rational::one();
    let zero = Rational::zero();
    let q = &one - p;
    let mut t_star = vec![zero.clone(); m];
    // Base: f(m) is 1−p at t=0 and p at t=1.
    let (mut f, t_last) = pick(q.clone(), p.clone());
    t_star[m - 1] = t_last;
    for i in (0..m - 1).rev() {
        let at0 = q.clone();
        let at1 = &q * &f + p;
        let (fi, ti) = pick(at0, at1);
        f = fi;
        t_star[i] = ti;
    }
    Ok(MinF1 { t_star, f1_min: f })
}

fn pick(at0: Rational, at1: Rational) -> (Rational, Rational) {
    if at1 < at0 {
        (at1, Rational::one())
    } else {
        (at0, Rational::zero())
    }
}

/// Brute force over `{0,1}^m`; exponential, meant as a cross-check.
pub fn min_f1_exhaustive(p: &Rational, m: usize) -> Result<Rational> {
    if m > 24 {
        return Err(Error::Configuration("exhaustive search is limited to m <= 24".into()));
    }
    let mut best: Option<Rational> = None;
    for mask in 0u32..(1u32 << m) {
        let t: Vec<Rational> = (0..m).map(|i| Rational::from_int(((mask >> i) & 1) as i64)).collect();
        let f = f_recursion(p, &t)?;
        if best.as_ref().is_none_or(|b| f < *b) {
            best = Some(f);
        }
    }
    Ok(best.expect("m >= 1"))
}

/// Worst-case non-rejection over the two honest-ish choices at SIM-M
/// probability p: `max{1−p, (1+p)/2}`.
pub fn branch_tradeoff(p: &Rational) -> Rational {
    let one = Rational::one();
    let a = &one - p;
    let b = &(&one + p) * &Rational::new(1, 2);
    if a > b {
        a
    } else {
        b
    }
}

/// Grid minimizer of [`branch_tradeoff`] over `{0.05, …, 0.95} ∪ {1/3}`.
pub fn optimal_p_on_grid() -> (Rational, Rational) {
    let mut grid: Vec<Rational> = (1..20).map(|k| Rational::new(k, 20)).collect();
    grid.push(Rational::new(1, 3));
    grid.into_iter()
        .map(|p| {
            let v = branch_tradeoff(&p);
            (p, v)
        })
        .min_by(|a, b| a.1.cmp(&b.1))
        .expect("grid is nonempty")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::protocols::params::observation_m;

    fn r(n: i64, d: i64) -> Rational {
        Rational::new(n, d)
    }

    #[test]
    fn small_cases() {
        let p = r(1, 4);
        assert_eq!(f_recursion(&p, &[r(0, 1)]).unwrap(), r(3, 4));
        assert_eq!(f_recursion(&p, &[r(1, 1)]).unwrap(), r(1, 4));
        assert_eq!(f_recursion(&p, &[r(1, 1), r(1, 1)]).unwrap(), r(7, 16));
        let m1 = min_f1(&p, 1, 2).unwrap();
        assert_eq!(m1.f1_min, p);
        assert_eq!(m1.t_star, vec![r(1, 1)]);
    }

    #[test]
    fn endpoint_matches_exhaustive() {
        for p in [r(1, 10), r(1, 4), r(1, 3), r(2, 5)] {
            for m in 1..=8 {
                let a = min_f1(&p, m, 11).unwrap();
                assert_eq!(a.f1_min, min_f1_exhaustive(&p, m).unwrap());
                assert_eq!(f_recursion(&p, &a.t_star).unwrap(), a.f1_min);
            }
        }
    }

    #[test]
    fn lower_bound_law() {
        for p in [r(1, 10), r(1, 5), r(1, 4), r(3, 10)] {
            let m = observation_m(&p);
            let one = Rational::one();
            assert!(min_f1(&p, m, 2).unwrap().f1_min >= &one - &p);
        }
    }

    #[test]
    fn one_third_is_optimal() {
        let (p, v) = optimal_p_on_grid();
        assert_eq!(p, r(1, 3));
        assert_eq!(v, r(2, 3));
    }
}
