//! Megastate Markov chains of PTMs split at an input boundary, with
//! looping detection, rewiring and exact absorption.

mod chain;
mod conventions;
mod megastate;
mod solve;
pub mod testbed;

pub use chain::{
    absorption, analyze, build_chain, describe, detect_looping, rewire_looping, Absorption, ChainModel, ChainReport, Config,
    MarkovChain, MAX_INPUT,
};
pub use conventions::{convention_wrap, validate_conventions};
pub use megastate::{enumerate_megastates, Megastate, Megastates, MAX_MEGASTATES};

#[cfg(test)]
mod tests {
    use std::collections::{BTreeMap, BTreeSet};

    use super::*;
    use crate::error::Error;
    use crate::machines::PtmBuilder;
    use crate::rational::Rational;
    use crate::tape::{Move, LEFT_END, RIGHT_END};

    fn r(n: i64, d: i64) -> Rational {
        Rational::new(n, d)
    }

    fn rows(spec: &[&[(usize, Rational)]]) -> Vec<BTreeMap<usize, Rational>> {
        spec.iter().map(|row| row.iter().cloned().collect()).collect()
    }

    #[test]
    fn bare_three_state_automaton() {
        let mut b = PtmBuilder::new(&['a'], &[]);
        let (s1, acc, rej) = (b.state("s1"), b.state("acc"), b.state("rej"));
        b.det(s1, 'a', s1, Move::Left).det(s1, RIGHT_END, s1, Move::Left).det(s1, LEFT_END, acc, Move::Stay);
        let m = b.build(s1, acc, rej).unwrap();
        let ms = enumerate_megastates(&m, 1).unwrap();
        assert_eq!(ms.c(), 3);
        assert!(ms.list.iter().all(Megastate::is_clean));
        assert_eq!(ms.list[0].state, s1);
        assert_eq!((ms.list[1].state, ms.list[2].state), (rej, acc));
    }

    #[test]
    fn unwrapped_machines_are_refused() {
        for (_, m) in testbed::all() {
            assert!(matches!(enumerate_megastates(&m, 2), Err(Error::Convention(_))));
        }
    }

    #[test]
    fn wrapping_keeps_the_first_pass_and_clean_halts() {
        for (name, m) in testbed::all() {
            let w = convention_wrap(&m, testbed::work_cells(name)).unwrap();
            validate_conventions(&w).unwrap();
            enumerate_megastates(&w, testbed::work_cells(name)).unwrap();
        }
        assert!(matches!(convention_wrap(&testbed::tape_parity(), 1), Err(Error::SpaceBudget(_))));
    }

    #[test]
    fn immediate_accept_and_coin_chains() {
        let w = convention_wrap(&testbed::immediate_accept(), 1).unwrap();
        let model = build_chain(&w, "a", "b", 1).unwrap();
        let chain = &model.chain;
        assert!(chain.p(1, chain.accept_trap()).is_one());
        let a = absorption(chain).unwrap();
        assert!(a.p_accept.is_one() && a.expected_time.is_one());

        let w = convention_wrap(&testbed::coin(), 1).unwrap();
        let chain = build_chain(&w, "a", "b", 1).unwrap().chain;
        assert_eq!(chain.p(1, chain.accept_trap()), r(1, 2));
        assert_eq!(chain.p(1, chain.reject_trap()), r(1, 2));
        let a = absorption(&chain).unwrap();
        assert_eq!((a.p_accept, a.p_other, a.expected_time), (r(1, 2), r(1, 2), Rational::one()));
    }

    #[test]
    fn absorption_examples() {
        let one = Rational::one();
        // 1 → 2 → accept, c = 2.
        let chain = MarkovChain::from_rows(2, rows(&[&[(2, one.clone())], &[(4, one.clone())], &[(3, one.clone())], &[(4, one.clone())]])).unwrap();
        let a = absorption(&chain).unwrap();
        assert_eq!((a.p_accept, a.expected_time), (one.clone(), Rational::from_int(2)));
        let coin = MarkovChain::from_rows(2, rows(&[&[(3, r(1, 2)), (4, r(1, 2))], &[(3, one.clone())], &[(3, one.clone())], &[(4, one.clone())]])).unwrap();
        let a = absorption(&coin).unwrap();
        assert_eq!((a.p_accept, a.expected_time), (r(1, 2), one.clone()));
        assert!(MarkovChain::from_rows(2, rows(&[&[(3, r(1, 2))], &[], &[], &[]])).is_err());
    }

    #[test]
    fn rewire_examples() {
        let one = Rational::one();
        let chain = MarkovChain::from_rows(
            2,
            rows(&[&[(2, r(1, 3)), (4, r(2, 3))], &[(2, one.clone())], &[(3, one.clone())], &[(4, one.clone())]]),
        )
        .unwrap();
        assert!(matches!(absorption(&chain), Err(Error::NotAbsorbing(_))));
        assert_eq!(rewire_looping(&chain, &BTreeSet::new()).unwrap(), chain);
        let re = rewire_looping(&chain, &BTreeSet::from([2])).unwrap();
        assert_eq!(re.p(1, 3) - chain.p(1, 3), r(1, 3));
        assert!(re.is_stochastic());
        assert_eq!(absorption(&re).unwrap().p_accept, r(2, 3));
        let all = rewire_looping(&chain, &BTreeSet::from([1, 2])).unwrap();
        assert!(all.p(1, 3).is_zero() || all.p(1, 3) + all.p(1, 4) == one);
        assert!(rewire_looping(&chain, &BTreeSet::from([3])).is_err());
    }

    #[test]
    fn all_mass_looping_goes_to_the_trap() {
        let one = Rational::one();
        let chain = MarkovChain::from_rows(
            2,
            rows(&[&[(2, one.clone())], &[(1, one.clone())], &[(3, one.clone())], &[(4, one.clone())]]),
        )
        .unwrap();
        let re = rewire_looping(&chain, &BTreeSet::from([1, 2])).unwrap();
        assert!(re.p(1, 3).is_one());
    }

    #[test]
    fn looping_sets() {
        let w = convention_wrap(&testbed::coin(), 1).unwrap();
        assert!(detect_looping(&w, "ab", "", 1).unwrap().is_empty());

        let w = convention_wrap(&testbed::region_looper(), 1).unwrap();
        let spin = w.state_index("spin").unwrap();
        let looping = detect_looping(&w, "a", "b", 1).unwrap();
        let ms = enumerate_megastates(&w, 1).unwrap();
        assert_eq!(looping.len(), 1);
        let only = looping.iter().next().unwrap();
        assert_eq!((ms.list[only.megastate - 1].state, only.pos), (spin, 1));

        // sh-r on cells 1..3 and sh-l on cells 2..0 for "ab".
        let w = convention_wrap(&testbed::shuttle(), 1).unwrap();
        let ms = enumerate_megastates(&w, 1).unwrap();
        let (rt, lt) = (w.state_index("sh-r").unwrap(), w.state_index("sh-l").unwrap());
        let k = |s| ms.list.iter().position(|m| m.state == s).unwrap() + 1;
        let expected: BTreeSet<Config> = [(rt, 1), (rt, 2), (rt, 3), (lt, 2), (lt, 1), (lt, 0)]
            .into_iter()
            .map(|(s, pos)| Config { megastate: k(s), pos })
            .collect();
        assert_eq!(detect_looping(&w, "a", "b", 1).unwrap(), expected);
    }

    #[test]
    fn shuttle_needs_rewiring() {
        let w = convention_wrap(&testbed::shuttle(), 1).unwrap();
        let model = build_chain(&w, "a", "b", 1).unwrap();
        assert!(matches!(absorption(&model.chain), Err(Error::NotAbsorbing(_))));
        let looping = model.chain_states(&detect_looping(&w, "a", "b", 1).unwrap());
        // Both sweep states on both boundary cells.
        assert_eq!(looping.len(), 4);
        let re = rewire_looping(&model.chain, &looping).unwrap();
        assert!(re.is_stochastic());
        assert_eq!(absorption(&re).unwrap().p_accept, r(1, 2));
    }

    #[test]
    fn region_loops_land_in_the_trap() {
        let w = convention_wrap(&testbed::region_looper(), 1).unwrap();
        let chain = build_chain(&w, "a", "b", 1).unwrap().chain;
        // Half the mass freezes on cell 1, inside ▷a.
        assert_eq!(chain.p(1, chain.reject_trap()), r(1, 2));
        assert_eq!(absorption(&chain).unwrap().p_accept, r(1, 2));
    }

    #[test]
    fn analyze_matches_closed_forms() {
        for (name, m) in testbed::all() {
            for (x, y) in [("", ""), ("a", "b"), ("ab", "a"), ("", "aab"), ("ba", "")] {
                let rep = analyze(&m, x, y, testbed::work_cells(name)).unwrap();
                let want = testbed::exact_acceptance(name, &format!("{x}{y}")).unwrap();
                assert_eq!(rep.p_accept, want, "{name} on {x}|{y}");
            }
        }
    }
}
