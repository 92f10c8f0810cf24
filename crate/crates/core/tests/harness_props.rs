use poq_core::harness::{binomial_region, clopper_pearson, csv_string, estimate_gap, read_csv, run_trials, wilson_interval};
use poq_core::protocols::{ProtocolId, ProtocolParams, ProverChoice};
use poq_core::Rational;
use proptest::prelude::*;

proptest! {
    #[test]
    fn intervals_contain_the_point_estimate(n in 1u64..5000, frac in 0.0f64..=1.0, conf in 0.5f64..0.999) {
        let k = (frac * n as f64).round() as u64;
        let phat = k as f64 / n as f64;
        for (lo, hi) in [wilson_interval(k, n, conf).unwrap(), clopper_pearson(k, n, conf).unwrap()] {
            prop_assert!(0.0 <= lo && lo <= phat + 1e-12 && phat <= hi + 1e-12 && hi <= 1.0);
        }
    }

    #[test]
    fn binomial_region_brackets_the_mean(n in 1u64..100_000, p in 0.0f64..=1.0) {
        let (lo, hi) = binomial_region(n, p, 0.99).unwrap();
        let mean = n as f64 * p;
        prop_assert!(lo <= hi && hi <= n);
        prop_assert!(lo as f64 <= mean + 1.0 && mean - 1.0 <= hi as f64);
    }
}

#[test]
fn batches_replay_from_seed() {
    let params = ProtocolParams::supersafe(Rational::new(1, 4), 5);
    let prover: ProverChoice = "random-answer".parse().unwrap();
    let run = |seed| run_trials(ProtocolId::SupersafeEq, "abab", &prover, &params, 300, seed).unwrap();
    let a = csv_string([&run(11)]).unwrap();
    assert_eq!(a, csv_string([&run(11)]).unwrap());
    let rows = read_csv(a.as_bytes()).unwrap();
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0].accept + rows[0].reject + rows[0].timeout, 300);
}

#[test]
fn conservative_gap_is_below_point_gap() {
    let params = ProtocolParams::supersafe(Rational::new(1, 4), 5);
    let adv = ["always-lying".parse().unwrap(), "random-answer".parse().unwrap()];
    let w = vec!["aab".to_string(), "abba".to_string()];
    let run = estimate_gap(ProtocolId::SupersafeEq, &w, &ProverChoice::Honest, &adv, &params, 400, 3, 0.99).unwrap();
    let r = &run.report;
    assert!(r.gap <= r.gap_point);
    assert!(r.quantum_lower <= r.quantum_min_accept && r.classical_max_non_reject <= r.classical_upper);
    assert_eq!(run.batches.len(), w.len() * (1 + adv.len()));
}
