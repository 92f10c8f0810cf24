//! Sparse Gauss–Jordan elimination for systems `x = A x + b` with
//! vector-valued right-hand sides, in exact arithmetic.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::rational::Rational;

#[derive(Clone, Debug, Default)]
pub(crate) struct Equation {
    pub coeffs: BTreeMap<usize, Rational>,
    pub rhs: BTreeMap<usize, Rational>,
}

fn add_into(map: &mut BTreeMap<usize, Rational>, k: usize, v: Rational) {
    if v.is_zero() {
        return;
    }
    let e = map.entry(k).or_insert_with(Rational::zero);
    *e = e.clone() + v;
    if e.is_zero() {
        map.remove(&k);
    }
}

/// Solves `x_u = Σ_v a_uv x_v + b_u` for every `u`. Fails when a pivot
/// `1 − a_uu` vanishes, which happens exactly when some set of variables is
/// closed under the coefficients.
pub(crate) fn solve(mut eqs: Vec<Equation>) -> Result<Vec<BTreeMap<usize, Rational>>> {
    let n = eqs.len();
    let mut users: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); n];
    for (r, e) in eqs.iter().enumerate() {
        for &v in e.coeffs.keys() {
            users[v].insert(r);
        }
    }
    for u in 0..n {
        let a_uu = eqs[u].coeffs.remove(&u).unwrap_or_else(Rational::zero);
        users[u].remove(&u);
        let denom = Rational::one() - a_uu;
        if denom.is_zero() {
            return Err(Error::NotAbsorbing(format!("variable {u} is trapped in a closed class")));
        }
        if !denom.is_one() {
            let inv = denom.recip();
            for v in eqs[u].coeffs.values_mut() {
                *v = v.clone() * &inv;
            }
            for v in eqs[u].rhs.values_mut() {
                *v = v.clone() * &inv;
            }
        }
        let row_u = std::mem::take(&mut eqs[u]);
        for r in std::mem::take(&mut users[u]) {
            let Some(a_ru) = eqs[r].coeffs.remove(&u) else { continue };
            for (&v, a_uv) in &row_u.coeffs {
                add_into(&mut eqs[r].coeffs, v, a_ru.clone() * a_uv);
                users[v].insert(r);
            }
            for (&t, b) in &row_u.rhs {
                add_into(&mut eqs[r].rhs, t, a_ru.clone() * b);
            }
        }
        eqs[u] = row_u;
    }
    debug_assert!(eqs.iter().all(|e| e.coeffs.is_empty()));
    Ok(eqs.into_iter().map(|e| e.rhs).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn eq(coeffs: &[(usize, Rational)], rhs: &[(usize, Rational)]) -> Equation {
        Equation { coeffs: coeffs.iter().cloned().collect(), rhs: rhs.iter().cloned().collect() }
    }

    #[test]
    fn gambler_three_cells() {
        // x0 = ½·x1, x1 = ½·x0 + ½·x2, x2 = ½·x1 + ½ (target 0). Solution: 1/4, 1/2, 3/4.
        let h = Rational::new(1, 2);
        let x = solve(vec![
            eq(&[(1, h.clone())], &[]),
            eq(&[(0, h.clone()), (2, h.clone())], &[]),
            eq(&[(1, h.clone())], &[(0, h.clone())]),
        ])
        .unwrap();
        let get = |i: usize| x[i].get(&0).cloned().unwrap_or_else(Rational::zero);
        assert_eq!(get(0), Rational::new(1, 4));
        assert_eq!(get(1), Rational::new(1, 2));
        assert_eq!(get(2), Rational::new(3, 4));
    }

    #[test]
    fn closed_class_is_singular() {
        let one = Rational::one();
        let r = solve(vec![eq(&[(1, one.clone())], &[]), eq(&[(0, one)], &[])]);
        assert!(matches!(r, Err(Error::NotAbsorbing(_))));
    }
}
