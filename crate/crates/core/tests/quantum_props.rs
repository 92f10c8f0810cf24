use poq_core::quantum::{apply_action, coin_qcfa, Action, QuantumRegister, NORM_TOL};
use poq_core::trial_rng;
use proptest::prelude::*;

proptest! {
    #[test]
    fn coin_actions_preserve_norm(seed in any::<u64>()) {
        let spec = coin_qcfa();
        let mut rng = trial_rng(seed, 0);
        for action in spec.actions().values() {
            let reg = QuantumRegister::random(spec.dim(), &mut rng);
            prop_assert!((reg.norm_sqr() - 1.0).abs() <= NORM_TOL);
            let (post, outcome) = apply_action(&reg, action, &mut rng).unwrap();
            prop_assert!((post.norm_sqr() - 1.0).abs() <= NORM_TOL);
            if let Action::Measure(ps) = action {
                let probs = reg.outcome_probabilities(ps);
                prop_assert!((probs.iter().sum::<f64>() - 1.0).abs() <= NORM_TOL);
                let k = outcome.unwrap();
                prop_assert!(probs[k] > 0.0);
                // Measuring again gives the same outcome with certainty.
                prop_assert!((post.outcome_probabilities(ps)[k] - 1.0).abs() <= NORM_TOL);
            } else {
                prop_assert!(outcome.is_none());
            }
        }
    }
}
