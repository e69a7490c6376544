use std::f64::consts::{PI, SQRT_2};

use proptest::prelude::*;
use qinfo::dynamics::KrausChannel;
use qinfo::entanglement::{bell_state, BellLabel};
use qinfo::linalg::{self, CMatrix};
use qinfo::protocols::*;
use qinfo::random::{random_channel, random_state_vector, substream};
use qinfo::state::{fidelity, DensityOperator, StateVector};

use BellLabel as B;

fn close(a: f64, b: f64, tol: f64) {
    assert!((a - b).abs() <= tol, "{a} vs {b} (tol {tol})");
}

fn within_sigma(observed: f64, expected: f64, sigma: f64, k: f64) {
    assert!(
        (observed - expected).abs() <= k * sigma,
        "{observed} vs {expected}: {:.2} sigma",
        (observed - expected).abs() / sigma
    );
}

fn intercept() -> EveStrategy {
    EveStrategy::InterceptResend {
        policy: BasisPolicy::Random,
    }
}

#[test]
fn bb84_without_eve() {
    let n = 10_000;
    let t = bb84(n, &EveStrategy::None, 7).unwrap();
    assert_eq!(t.qber, 0.0);
    assert_eq!(t.sifted_key_alice, t.sifted_key_bob);
    within_sigma(t.sift_fraction, 0.5, (0.25 / n as f64).sqrt(), 3.0);
    assert!(!t.should_abort(DEFAULT_QBER_ABORT));
    // sifted positions are exactly the matched-basis rounds
    for r in &t.rounds {
        assert_eq!(r.sifted, r.alice_basis == r.bob_basis);
        if r.sifted {
            assert_eq!(r.alice_bit, r.bob_bit);
        }
    }
    assert_eq!(
        t.sifted_key_alice.len(),
        t.rounds.iter().filter(|r| r.sifted).count()
    );
}

#[test]
fn bb84_single_matched_round() {
    let t = (0..64)
        .map(|seed| bb84(1, &EveStrategy::None, seed).unwrap())
        .find(|t| t.rounds[0].sifted)
        .expect("some seed matches bases");
    assert_eq!(t.sifted_key_alice, t.sifted_key_bob);
    assert_eq!(t.sifted_key_alice.len(), 1);
}

#[test]
fn bb84_intercept_resend() {
    let t = bb84(10_000, &intercept(), 8).unwrap();
    let sifted = t.sifted_key_alice.len() as f64;
    within_sigma(t.qber, 0.25, (0.25 * 0.75 / sifted).sqrt(), 3.0);
    assert!(t.should_abort(DEFAULT_QBER_ABORT));
    close(
        bb84_expected_qber(&intercept(), BB84_SECOND_BASIS).unwrap(),
        0.25,
        1e-12,
    );
    let fixed = EveStrategy::InterceptResend {
        policy: BasisPolicy::Fixed(0),
    };
    close(
        bb84_expected_qber(&fixed, BB84_SECOND_BASIS).unwrap(),
        0.25,
        1e-12,
    );
    close(
        bb84_expected_qber(&EveStrategy::None, BB84_SECOND_BASIS).unwrap(),
        0.0,
        1e-15,
    );
}

#[test]
fn bb84_depolarizing_attack() {
    let p = 0.2;
    let eve = EveStrategy::Channel {
        channel: KrausChannel::depolarizing(p).unwrap(),
    };
    // ρ → (1 − p)ρ + p I/2 flips a sifted bit with probability p/2
    close(
        bb84_expected_qber(&eve, BB84_SECOND_BASIS).unwrap(),
        p / 2.0,
        1e-12,
    );
    let t = bb84(20_000, &eve, 9).unwrap();
    within_sigma(
        t.qber,
        p / 2.0,
        (0.1 * 0.9 / t.sifted_key_alice.len() as f64).sqrt(),
        4.0,
    );
}

#[test]
fn bb84_rejects_bad_input() {
    assert!(bb84(0, &EveStrategy::None, 1).is_err());
    let wide = EveStrategy::Channel {
        channel: KrausChannel::identity(3),
    };
    assert!(bb84(10, &wide, 1).is_err());
    assert!(bb84(
        10,
        &EveStrategy::InterceptResend {
            policy: BasisPolicy::Fixed(2)
        },
        1
    )
    .is_err());
}

#[test]
fn transcripts_are_reproducible() {
    let a = bb84(500, &intercept(), 42).unwrap();
    let b = bb84(500, &intercept(), 42).unwrap();
    assert_eq!(
        serde_json::to_string(&a).unwrap(),
        serde_json::to_string(&b).unwrap()
    );
    assert_ne!(a.rounds, bb84(500, &intercept(), 43).unwrap().rounds);
    let a = ekert91(500, &EveStrategy::None, 42).unwrap();
    let b = ekert91(500, &EveStrategy::None, 42).unwrap();
    assert_eq!(a, b);
}

#[test]
fn e91_without_eve() {
    let t = ekert91(100_000, &EveStrategy::None, 11).unwrap();
    let s = t.chsh_estimate.unwrap();
    close(s, -2.0 * SQRT_2, 0.05);
    assert_eq!(t.qber, 0.0);
    assert_eq!(t.sifted_key_alice, t.sifted_key_bob);
    for r in t.rounds.iter().filter(|r| r.sifted) {
        assert_ne!(r.alice_bit, r.bob_bit, "matched axes must anti-correlate");
    }
    let expected_sift = 2.0 / 9.0;
    within_sigma(
        t.sift_fraction,
        expected_sift,
        (expected_sift * (1.0 - expected_sift) / 1e5).sqrt(),
        4.0,
    );
}

#[test]
fn e91_intercept_resend_breaks_violation() {
    let t = ekert91(100_000, &intercept(), 12).unwrap();
    let s = t.chsh_estimate.unwrap();
    assert!(s.abs() <= 2.0 + 0.05, "{s}");
    // Eve's z/x measurement leaves E(a, b) = −a·b/2, so S = −√2
    close(s, -SQRT_2, 0.1);
    assert!(t.qber > 0.15);
}

#[test]
fn e91_matched_single_round_anticorrelates() {
    let t = (0..200)
        .map(|seed| ekert91(1, &EveStrategy::None, seed).unwrap())
        .find(|t| t.rounds[0].sifted)
        .expect("some seed draws a key round");
    assert_ne!(t.rounds[0].alice_bit, t.rounds[0].bob_bit);
}

#[test]
fn teleport_examples() {
    let zero = StateVector::basis(2, 0).unwrap();
    for l in B::ALL {
        let r = teleport(&zero, OutcomeChoice::Fixed(l)).unwrap();
        assert!(r.bob_after.same_ray(&zero));
        close(r.probability, 0.25, 1e-12);
    }
    let mut rng = substream(50, 0);
    let mu = random_state_vector(&[2], &mut rng);
    for l in B::ALL {
        close(
            teleport(&mu, OutcomeChoice::Fixed(l)).unwrap().fidelity,
            1.0,
            1e-10,
        );
    }
    let avg = teleport_uncorrected_average(&mu).unwrap();
    assert!(linalg::max_abs_diff(avg.matrix(), &CMatrix::identity(2, 2).scale(0.5)) < 1e-12);
    close(fidelity(&avg, &mu.density()).unwrap(), 0.5, 1e-12);

    let sampled = teleport(&mu, OutcomeChoice::Sampled(3)).unwrap();
    assert_eq!(sampled, teleport(&mu, OutcomeChoice::Sampled(3)).unwrap());
    close(sampled.fidelity, 1.0, 1e-10);
    assert!(teleport(
        &StateVector::basis(3, 0).unwrap(),
        OutcomeChoice::Fixed(B::PHI_PLUS)
    )
    .is_err());
}

#[test]
fn teleport_spherical_grid() {
    for i in 0..4 {
        for j in 0..8 {
            let polar = PI * (i as f64 + 0.5) / 4.0;
            let az = 2.0 * PI * j as f64 / 8.0;
            let mu = StateVector::qubit_bloch(polar, az);
            let mut total = 0.0;
            for l in B::ALL {
                let r = teleport(&mu, OutcomeChoice::Fixed(l)).unwrap();
                assert!(r.fidelity >= 1.0 - 1e-10, "grid ({i}, {j}) outcome {l}");
                total += r.probability;
                close(r.probability, 0.25, 1e-12);
            }
            close(total, 1.0, 1e-12);
        }
    }
}

#[test]
fn superdense_examples() {
    let zero = superdense_send(0).unwrap();
    assert_eq!((zero.decoded, zero.outcome), (0, B::PHI_PLUS));
    for m in 0..4u8 {
        assert_eq!(superdense_send(m).unwrap().decoded, m);
        let d = superdense_distribution(&bell_state(B::PHI_PLUS).density(), m).unwrap();
        close(d[m as usize], 1.0, 1e-12);
    }
    assert_eq!(superdense_send(1).unwrap().outcome, B::PSI_PLUS);
    let mixed = DensityOperator::maximally_mixed(vec![2, 2]).unwrap();
    for m in 0..4u8 {
        for p in superdense_distribution(&mixed, m).unwrap() {
            close(p, 0.25, 1e-12);
        }
    }
    assert!(superdense_send(4).is_err());
}

#[test]
fn swap_examples() {
    let r = entanglement_swap(OutcomeChoice::Fixed(B::PHI_PLUS)).unwrap();
    assert!(r.ad_before.same_ray(&bell_state(B::PHI_PLUS)));
    let r = entanglement_swap(OutcomeChoice::Fixed(B::PSI_MINUS)).unwrap();
    assert!(r.ad_before.same_ray(&bell_state(B::PSI_MINUS)));
    assert!(r.ad_after.same_ray(&bell_state(B::PHI_PLUS)));
    for l in B::ALL {
        let r = entanglement_swap(OutcomeChoice::Fixed(l)).unwrap();
        assert!(r.ad_before.same_ray(&bell_state(l)));
        close(r.fidelity, 1.0, 1e-10);
        close(r.probability, 0.25, 1e-12);
    }
    for p in swap_outcome_probabilities() {
        close(p, 0.25, 1e-12);
    }
    let runs = 10_000u64;
    let counts = swap_outcome_counts(runs, 13);
    assert_eq!(counts.iter().sum::<u64>(), runs);
    let sigma = (runs as f64 * 0.25 * 0.75).sqrt();
    for c in counts {
        within_sigma(c as f64, runs as f64 / 4.0, sigma, 3.0);
    }
}

#[test]
fn purify_analytic_examples() {
    let one = purify_step_analytic(1.0).unwrap();
    assert_eq!((one.f_next, one.p_pass), (1.0, 1.0));
    let quarter = purify_step_analytic(0.25).unwrap();
    close(quarter.f_next, 0.25, 1e-15);
    close(quarter.p_pass, 0.5, 1e-15);
    let s = purify_step_analytic(0.7).unwrap();
    close(s.p_pass, 0.68, 1e-14);
    close(s.f_next, 0.5 / 0.68, 1e-14);
    close(s.f_next, 0.73529, 1e-5);
    assert!(purify_step_analytic(1.2).is_err());

    let run = purify_run(0.6, 5, PurifyMode::Analytic).unwrap();
    let mut prev = 0.6;
    for r in &run.rounds {
        assert!(r.fidelity > prev && r.fidelity < 1.0);
        prev = r.fidelity;
    }
    for k in 1..20 {
        let f = 0.5 + 0.025 * k as f64;
        assert!(purify_step_analytic(f).unwrap().f_next > f);
    }
}

#[test]
fn purify_simulated_examples() {
    let s = purify_step_simulated(0.7, 100_000, 21).unwrap();
    close(s.p_pass, 0.68, 0.005);
    close(s.f_next, 0.73529, 0.005);
    assert_eq!(s.attempts, 50_000);
    assert_eq!(s.pairs_out, s.passed);
    assert!(s.pairs_out <= s.pairs_in / 2);

    let perfect = purify_step_simulated(1.0, 1000, 22).unwrap();
    assert_eq!(perfect.passed, 500);
    assert_eq!(perfect.f_next, 1.0);
    assert!(purify_step_simulated(0.7, 11, 1).is_err());
}

#[test]
fn purify_simulated_matches_analytic() {
    for k in 0..9 {
        let f = 0.55 + 0.05 * k as f64;
        let exact = purify_step_analytic(f).unwrap();
        let sim = purify_step_simulated(f, 40_000, 100 + k).unwrap();
        let sp = (exact.p_pass * (1.0 - exact.p_pass) / sim.attempts as f64).sqrt();
        within_sigma(sim.p_pass, exact.p_pass, sp, 5.0);
        let sf = (exact.f_next * (1.0 - exact.f_next) / sim.passed as f64).sqrt();
        within_sigma(sim.f_next, exact.f_next, sf, 5.0);
    }
}

#[test]
fn purify_simulated_run_bookkeeping() {
    let run = purify_run(
        0.75,
        4,
        PurifyMode::Simulated {
            seed: 5,
            pairs: 20_001,
        },
    )
    .unwrap();
    assert_eq!(run.rounds.len(), 4);
    let mut prev = 20_001u64;
    for r in &run.rounds {
        let left = r.pairs_remaining.unwrap();
        assert!(left <= prev.div_ceil(2), "{left} after {prev}");
        prev = left;
    }
    assert!(run.rounds[1].fidelity > run.rounds[0].fidelity);
    let analytic = purify_run(0.75, 2, PurifyMode::Analytic).unwrap();
    close(run.rounds[0].fidelity, analytic.rounds[0].fidelity, 0.02);
    close(run.rounds[1].fidelity, analytic.rounds[1].fidelity, 0.03);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn teleport_any_state_any_outcome(seed in any::<u64>(), k in 0usize..4) {
        let mut rng = substream(seed, 0);
        let mu = random_state_vector(&[2], &mut rng);
        let r = teleport(&mu, OutcomeChoice::Fixed(B::from_index(k))).unwrap();
        prop_assert!(r.fidelity >= 1.0 - 1e-10);
    }

    #[test]
    fn disturbing_attacks_raise_qber(seed in any::<u64>(), kraus in 1usize..4) {
        let mut rng = substream(seed, 1);
        let ch = random_channel(2, kraus, &mut rng);
        let q = bb84_expected_qber(&EveStrategy::Channel { channel: ch }, BB84_SECOND_BASIS).unwrap();
        prop_assert!(q > 0.0);
    }

    #[test]
    fn purify_fixed_points_and_gain(f in 0.0f64..=1.0) {
        let s = purify_step_analytic(f).unwrap();
        prop_assert!(s.p_pass > 0.0 && s.p_pass <= 1.0 + 1e-15);
        prop_assert!((0.0..=1.0 + 1e-15).contains(&s.f_next));
        if f > 0.5 + 1e-9 && f < 1.0 - 1e-9 {
            prop_assert!(s.f_next > f);
        }
    }
}
