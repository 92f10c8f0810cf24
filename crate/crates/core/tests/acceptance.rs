//! End-to-end acceptance suite. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any criterion fails.

use std::time::Instant;

use poq_core::harness::{binomial_region, csv_string, estimate_gap, run_trials, AdversaryEntry, TrialBatch};
use poq_core::languages::{all_strings, pal_witness, twin_witness};
use poq_core::machines::run_machine;
use poq_core::markov::{absorption, build_chain, convention_wrap, detect_looping, rewire_looping, testbed};
use poq_core::protocols::analysis::min_f1_exhaustive;
use poq_core::protocols::clock::{budget, make_clock};
use poq_core::protocols::params::observation_m;
use poq_core::protocols::{f_recursion, freivalds_eq, min_f1, AdversaryStrategy, ProtocolId, ProtocolParams, ProverChoice};
use poq_core::quantum::{apply_action, coin_qcfa, run_qcfa, Action, QuantumRegister, NORM_TOL};
use poq_core::{check_dsfk_witness, membership, pad, trial_rng, LanguageId, Rational, Verdict};

const N: u64 = 10_000;

struct Report {
    pass: bool,
    detail: String,
    batches: Vec<TrialBatch>,
}

fn r(n: i64, d: i64) -> Rational {
    Rational::new(n, d)
}

fn choice(s: &str) -> ProverChoice {
    s.parse().expect("prover name")
}

fn eq_members() -> Vec<String> {
    all_strings(&['a', 'b'], 10).into_iter().filter(|w| membership(LanguageId::Eq, w).unwrap()).collect()
}

fn criterion_1() -> Report {
    let members = eq_members();
    let mut batches = Vec::new();
    let (mut rej, mut to) = (0, 0);
    for (k, m) in [5usize, 33].into_iter().enumerate() {
        let params = ProtocolParams::supersafe(r(1, 4), m);
        for (i, w) in members.iter().enumerate() {
            let b = run_trials(ProtocolId::SupersafeEq, w, &ProverChoice::Honest, &params, 1000, 100 + (k * 1000 + i) as u64).unwrap();
            rej += b.reject;
            to += b.timeout;
            batches.push(b);
        }
    }
    Report {
        pass: rej == 0 && to == 0,
        detail: format!("{} EQ members x (1/4,5),(1/4,33) x 1000 trials: {rej} rejections, {to} timeouts", members.len()),
        batches,
    }
}

fn criterion_2() -> Report {
    let mut pass = true;
    let mut parts = Vec::new();
    for p in [r(1, 10), r(1, 5), r(1, 4), r(1, 3)] {
        let m = observation_m(&p);
        let f = min_f1(&p, m, 21).unwrap().f1_min;
        let ok = f >= Rational::one() - p.clone();
        pass &= ok;
        parts.push(format!("p={p} m={m} min f1={:.4}", f.to_f64()));
        for m in 1..=12 {
            pass &= min_f1(&p, m, 21).unwrap().f1_min == min_f1_exhaustive(&p, m).unwrap();
        }
    }
    Report { pass, detail: format!("{}; endpoint optimum = exhaustive for m<=12", parts.join(", ")), batches: vec![] }
}

fn criterion_3() -> Report {
    let ps = [r(1, 4), r(1, 3), r(1, 10), r(1, 5)];
    let ms = [3usize, 5, 8, 4, 6];
    let mut batches = Vec::new();
    let mut misses = Vec::new();
    for k in 0..20usize {
        let p = ps[k % 4].clone();
        let m = ms[k % 5];
        let t: Vec<Rational> = (0..m).map(|i| r(((k * 7 + i * 3) % 5) as i64, 4)).collect();
        let f = f_recursion(&p, &t).unwrap();
        let mut params = ProtocolParams::supersafe(p.clone(), m);
        params.step_cap = 5_000;
        let prover = ProverChoice::Adversary(AdversaryStrategy::PerRoundMix(t));
        let b = run_trials(ProtocolId::SupersafeEq, "aab", &prover, &params, N, 300 + k as u64).unwrap();
        let (lo, hi) = binomial_region(N, f.to_f64(), 0.99).unwrap();
        if b.reject < lo || b.reject > hi {
            misses.push(format!("#{k} p={p} m={m}: {} not in [{lo},{hi}] (f={:.4})", b.reject, f.to_f64()));
        }
        batches.push(b);
    }
    Report {
        pass: misses.is_empty(),
        detail: if misses.is_empty() {
            "20 (p,m,t) triples on \"aab\", all rejection counts inside the 99% binomial region".into()
        } else {
            format!("outside 99% region: {}", misses.join("; "))
        },
        batches,
    }
}

fn criterion_4() -> Report {
    let eps = 1.0 / 50.0;
    let mut pass = true;
    let mut parts = Vec::new();
    for (c, t) in [(1u64, 1u32), (1, 2)] {
        let spec = make_clock(c, t, eps).unwrap();
        let big_c = spec.calibration.mean_constant;
        for n in [4usize, 8, 16] {
            let w = "a".repeat(n);
            let horizon = budget(c, t, n);
            let (mut early, mut total) = (0u64, 0u128);
            for i in 0..N {
                let out = run_machine(&spec.machine, &w, &mut trial_rng(400 + n as u64 * 10 + t as u64, i), u64::MAX).unwrap();
                assert_eq!(out.verdict, Verdict::Accept);
                early += (out.steps < horizon) as u64;
                total += out.steps as u128;
            }
            let frac = early as f64 / N as f64;
            let mean = total as f64 / N as f64;
            let bound = big_c * (n as f64).powi(t as i32 + 1);
            pass &= frac <= eps + 0.03 && mean <= bound;
            parts.push(format!("(c={c},t={t},n={n}) early={frac:.4} mean={mean:.0}<=C n^(t+1)={bound:.0}"));
        }
    }
    Report { pass, detail: parts.join(", "), batches: vec![] }
}

fn pal_cores() -> Vec<&'static str> {
    vec!["aba", "aab", "abba", "abab", "ababa", "aabab", "abbbba", "aababb"]
}

fn criterion_5() -> Report {
    let params = ProtocolParams::padded();
    let product = (Rational::one() - params.eps_premature.clone())
        * (Rational::one() - Rational::new(1, params.c1 as i64))
        * (Rational::one() - params.eps_q.clone());
    let mut pass = product.to_f64() >= 0.9;
    let mut batches = Vec::new();
    let mut worst = 1.0f64;
    for (i, core) in pal_cores().into_iter().enumerate() {
        let input = pad(core).unwrap().render();
        let b = run_trials(ProtocolId::PaddedPal, &input, &ProverChoice::Honest, &params, N, 500 + i as u64).unwrap();
        worst = worst.min(b.accept_rate());
        pass &= b.accept_rate() >= 0.87;
        batches.push(b);
    }
    Report {
        pass,
        detail: format!("target product {:.4}; min acceptance {worst:.4} over 8 PAL cores (lengths 3-6) at {N} trials", product.to_f64()),
        batches,
    }
}

fn criterion_6() -> Report {
    let params = ProtocolParams::padded();
    let need = (1.0 - params.eps_v.to_f64()) / 2.0 - 0.03;
    let mut pass = true;
    let mut batches = Vec::new();
    let mut worst = 1.0f64;
    let mut mute_reject = 1.0f64;
    for (i, core) in pal_cores().into_iter().enumerate() {
        let input = pad(core).unwrap().render();
        let truth = membership(LanguageId::Pal, core).unwrap();
        let b = run_trials(ProtocolId::PaddedPal, &input, &choice("random-answer"), &params, N, 600 + i as u64).unwrap();
        let wrong: Vec<_> = b.with_claim(|c| c != truth).collect();
        let rejected = wrong.iter().filter(|rec| rec.verdict == Verdict::Reject).count();
        let rate = rejected as f64 / wrong.len().max(1) as f64;
        worst = worst.min(rate);
        pass &= !wrong.is_empty() && rate >= need;
        batches.push(b);
        let b = run_trials(ProtocolId::PaddedPal, &input, &choice("no-answer"), &params, N, 650 + i as u64).unwrap();
        mute_reject = mute_reject.min(b.reject_rate());
        pass &= b.reject == N;
        batches.push(b);
    }
    Report {
        pass,
        detail: format!("random-answer rejection given a wrong claim >= {worst:.4} (need {need:.2}); no-answer rejection {mute_reject:.4}"),
        batches,
    }
}

fn criterion_7() -> Report {
    let params = ProtocolParams::square();
    let p = params.p.to_f64();
    let members: Vec<String> = (1..=3usize).map(|i| format!("{}{}", "a".repeat(i), "b".repeat(i * i))).collect();
    let w: Vec<String> = members.iter().map(|c| pad(c).unwrap().render()).collect();
    let adversaries: Vec<AdversaryEntry> = ["no-answer@6", "random-answer", "always-lying", "strategy1:1", "strategy2:auto:wrong"]
        .iter()
        .map(|s| s.parse().unwrap())
        .collect();
    let run = estimate_gap(ProtocolId::Square, &w, &ProverChoice::Honest, &adversaries, &params, N, 700, 0.99).unwrap();
    let rep = &run.report;
    let mut pass = rep.gap > 0.15;
    let mut parts = vec![format!(
        "gap {:.4} (quantum lower {:.4}, classical upper {:.4} vs 2/3+0.05={:.4})",
        rep.gap,
        rep.quantum_lower,
        rep.classical_upper,
        2.0 / 3.0 + 0.05
    )];
    let honest_min = rep.quantum_cells.iter().map(|c| c.rate).fold(1.0, f64::min);
    pass &= honest_min >= 0.85;
    parts.push(format!("honest min {honest_min:.4}"));
    for cell in &rep.classical_cells {
        let i = pad_core_len(&cell.input);
        if cell.prover.starts_with("strategy1") {
            let horizon = params.big_k as f64 * 2f64.powi((params.k_f as usize * i) as i32);
            let bound = 1.0 - p * (1.0 - 2f64.powi(-((params.h_v as usize * i) as i32))).powf(horizon) + 0.03;
            pass &= cell.rate <= bound;
            parts.push(format!("S1 i={i} {:.4}<={bound:.4}", cell.rate));
        }
    }
    let s2_bound = p + (1.0 - p) / params.big_k as f64 + (1.0 - p) / 2.0 + 0.03;
    let mut batches = run.batches;
    let mut s2_worst = 0.0f64;
    for cell in rep.classical_cells.iter().filter(|c| c.prover.starts_with("strategy2")) {
        s2_worst = s2_worst.max(cell.rate);
    }
    for i in 1..=3usize {
        let core = format!("{}{}", "a".repeat(i), "b".repeat(i * i + 1));
        let b = run_trials(ProtocolId::Square, &pad(&core).unwrap().render(), &choice("strategy2:auto:wrong"), &params, N, 750 + i as u64)
            .unwrap();
        s2_worst = s2_worst.max(b.non_reject() as f64 / N as f64);
        batches.push(b);
    }
    pass &= s2_worst <= s2_bound;
    parts.push(format!("S2 worst {s2_worst:.4}<={s2_bound:.4}"));
    Report { pass, detail: parts.join(", "), batches }
}

/// i for a padded core a^i b^j.
fn pad_core_len(input: &str) -> usize {
    input.chars().take_while(|&c| c == 'a').count()
}

fn criterion_8() -> Report {
    let m = freivalds_eq(6, 5).unwrap();
    let mut words: Vec<String> = Vec::new();
    for na in 0..=20usize {
        for nb in 0..=(20 - na) {
            words.push(format!("{}{}", "a".repeat(na), "b".repeat(nb)));
        }
    }
    words.extend(all_strings(&['a', 'b'], 8).into_iter().filter(|w| w.contains("ba")));
    let mut worst = (0.0f64, String::new());
    for (k, w) in words.iter().enumerate() {
        let member = membership(LanguageId::EqAb, w).unwrap();
        let mut wrong = 0u64;
        for i in 0..N {
            let out = run_machine(&m, w, &mut trial_rng(800 + k as u64, i), u64::MAX).unwrap();
            wrong += ((out.verdict == Verdict::Accept) != member) as u64;
        }
        let e = wrong as f64 / N as f64;
        if e > worst.0 {
            worst = (e, w.clone());
        }
    }
    Report {
        pass: worst.0 <= 0.1,
        detail: format!("(c_F,d_F)=(6,5) on {} strings: worst error {:.4} on {:?}", words.len(), worst.0, worst.1),
        batches: vec![],
    }
}

fn criterion_9() -> Report {
    let names = ["coin", "gambler", "tape-parity", "shuttle", "region-looper"];
    let words = ["", "ab", "aab", "abab", "aabba", "abbaba"];
    let mut pass = true;
    let mut misses = Vec::new();
    let mut splits = 0;
    for (mi, (name, m)) in testbed::all().into_iter().filter(|(n, _)| names.contains(n)).enumerate() {
        let cells = testbed::work_cells(name);
        let wrapped = convention_wrap(&m, cells).unwrap();
        for (wi, w) in words.iter().enumerate() {
            let mut accept = 0u64;
            let n_mc = 100_000u64;
            for i in 0..n_mc {
                let out = run_machine(&m, w, &mut trial_rng(900 + (mi * 10 + wi) as u64, i), 1_000).unwrap();
                accept += (out.verdict == Verdict::Accept) as u64;
            }
            for cut in 0..=w.len() {
                let (x, y) = w.split_at(cut);
                splits += 1;
                let model = build_chain(&wrapped, x, y, cells).unwrap();
                let looping = model.chain_states(&detect_looping(&wrapped, x, y, cells).unwrap());
                let re = rewire_looping(&model.chain, &looping).unwrap();
                if !re.is_stochastic() {
                    pass = false;
                    misses.push(format!("{name} {x}|{y}: rows do not sum to 1"));
                }
                match absorption(&re) {
                    Ok(a) => {
                        let (lo, hi) = binomial_region(n_mc, a.p_accept.to_f64(), 0.99).unwrap();
                        if accept < lo || accept > hi {
                            pass = false;
                            misses.push(format!("{name} {x}|{y}: exact {} vs {accept}/{n_mc}", a.p_accept));
                        }
                    }
                    Err(e) => {
                        pass = false;
                        misses.push(format!("{name} {x}|{y}: {e}"));
                    }
                }
            }
        }
    }
    Report {
        pass,
        detail: if misses.is_empty() {
            format!("5 machines, {splits} splits with |xy|<=6: stochastic rewired rows, absorbing, exact p_accept inside 99% region of 1e5 runs")
        } else {
            misses.join("; ")
        },
        batches: vec![],
    }
}

fn criterion_10() -> Report {
    let spec = coin_qcfa();
    let mut pass = true;
    let mut rng = trial_rng(1000, 0);
    for action in spec.actions().values() {
        for _ in 0..100 {
            let reg = QuantumRegister::random(spec.dim(), &mut rng);
            match action {
                Action::Measure(ps) => {
                    let total: f64 = reg.outcome_probabilities(ps).iter().sum();
                    pass &= (total - 1.0).abs() <= NORM_TOL;
                    let (post, k) = apply_action(&reg, action, &mut rng).unwrap();
                    pass &= (post.norm_sqr() - 1.0).abs() <= NORM_TOL;
                    let again = ps[k.unwrap()].apply(&post.amplitudes);
                    pass &= again.iter().zip(&post.amplitudes).all(|(a, b)| (a - b).norm() <= 1e-9);
                }
                _ => {
                    let (post, _) = apply_action(&reg, action, &mut rng).unwrap();
                    pass &= (post.norm_sqr() - 1.0).abs() <= NORM_TOL;
                }
            }
        }
    }
    let mut parts = Vec::new();
    let n = 100_000u64;
    for m in 1..=6 {
        let w = "a".repeat(m);
        let mut acc = 0u64;
        for i in 0..n {
            acc += (run_qcfa(&spec, &w, &mut trial_rng(1010 + m as u64, i), 1_000).unwrap().verdict == Verdict::Accept) as u64;
        }
        let p = 0.5f64.powi(m as i32);
        let sigma = (p * (1.0 - p) / n as f64).sqrt();
        let got = acc as f64 / n as f64;
        pass &= (got - p).abs() <= 3.0 * sigma;
        parts.push(format!("m={m}: {got:.5} vs {p:.5}"));
    }
    Report { pass, detail: format!("register invariants on 100 random states per action; coin-qcfa {}", parts.join(", ")), batches: vec![] }
}

fn criterion_11() -> Report {
    let pal = pal_witness(&[2, 4, 6, 8]);
    let twin = twin_witness(&[3, 5, 7]);
    let a = check_dsfk_witness(pal.pair, &pal).unwrap().passed();
    let b = check_dsfk_witness(twin.pair, &twin).unwrap().passed();
    Report { pass: a && b, detail: format!("PAL m=2,4,6,8: {a}; TWIN m=3,5,7: {b}"), batches: vec![] }
}

fn main() {
    let mut results: Vec<(usize, &str, Report, f64)> = Vec::new();
    let criteria: Vec<(usize, &str, fn() -> Report)> = vec![
        (1, "honest completeness", criterion_1),
        (2, "f-recursion law", criterion_2),
        (3, "adversarial soundness vs analysis", criterion_3),
        (4, "clock contract", criterion_4),
        (5, "padded completeness", criterion_5),
        (6, "padded soundness", criterion_6),
        (7, "SQUARE bounds", criterion_7),
        (8, "Freivalds recognizer", criterion_8),
        (9, "Markov faithfulness", criterion_9),
        (10, "quantum engine", criterion_10),
        (11, "DS-FK witnesses", criterion_11),
    ];
    let mut all_pass = true;
    for (k, name, f) in criteria {
        let t = Instant::now();
        let rep = f();
        let secs = t.elapsed().as_secs_f64();
        all_pass &= rep.pass;
        println!("criterion {k:>2} {} {name}: {} ({secs:.1} s)", if rep.pass { "PASS" } else { "FAIL" }, rep.detail);
        results.push((k, name, rep, secs));
    }

    // Rerun every harness-driven criterion and compare its CSV byte for byte.
    let t = Instant::now();
    let rerun: Vec<(usize, fn() -> Report)> = vec![(1, criterion_1), (3, criterion_3), (5, criterion_5), (6, criterion_6), (7, criterion_7)];
    let mut same = true;
    let mut bytes = 0;
    for (k, f) in rerun {
        let first = &results.iter().find(|x| x.0 == k).unwrap().2;
        let a = csv_string(&first.batches).unwrap();
        let b = csv_string(&f().batches).unwrap();
        bytes += a.len();
        same &= a == b;
    }
    all_pass &= same;
    println!(
        "criterion 12 {} reproducibility: criteria 1,3,5,6,7 rerun with the same seeds, {bytes} CSV bytes {} ({:.1} s)",
        if same { "PASS" } else { "FAIL" },
        if same { "identical" } else { "differ" },
        t.elapsed().as_secs_f64()
    );
    if !all_pass {
        std::process::exit(1);
    }
}
