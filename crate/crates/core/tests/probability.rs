use qinfo::probability::*;
use qinfo::{Error, LogBase};

const BITS: LogBase = LogBase::Bits;
const NATS: LogBase = LogBase::Nats;

fn dist(p: &[f64]) -> Distribution {
    Distribution::new(p.to_vec()).unwrap()
}

fn close(a: f64, b: f64, tol: f64) {
    assert!((a - b).abs() <= tol, "{a} vs {b} (tol {tol})");
}

/// Independent direct-sum oracle: -Σ p log2 p.
fn h2(p: &[f64]) -> f64 {
    p.iter().filter(|&&x| x > 0.0).map(|&x| -x * x.log2()).sum()
}

#[test]
fn distribution_validation() {
    assert!(matches!(
        Distribution::new(vec![0.6, 0.6]),
        Err(Error::InvalidDistribution(_))
    ));
    assert!(matches!(
        Distribution::new(vec![1.2, -0.2]),
        Err(Error::InvalidDistribution(_))
    ));
    assert!(Distribution::new(vec![]).is_err());
    assert!(Distribution::new(vec![0.3, 0.7]).is_ok());
    let json: Result<Distribution, _> = serde_json::from_str("[0.5, 0.6]");
    assert!(json.is_err());
    let ok: Distribution = serde_json::from_str("[0.25, 0.75]").unwrap();
    assert_eq!(serde_json::to_string(&ok).unwrap(), "[0.25,0.75]");
}

#[test]
fn shannon_entropy_examples() {
    close(shannon_entropy(&dist(&[0.5, 0.5]), BITS), 1.0, 1e-15);
    assert_eq!(shannon_entropy(&dist(&[1.0, 0.0]), BITS), 0.0);
    let mut key = vec![0.9];
    key.extend(std::iter::repeat_n(0.001, 100));
    close(shannon_entropy(&dist(&key), NATS), 0.7856, 1e-4);
    close(
        shannon_entropy(&Distribution::uniform(100).unwrap(), NATS),
        100f64.ln(),
        1e-12,
    );
}

#[test]
fn log_base_conversion() {
    let p = dist(&[0.2, 0.3, 0.5]);
    close(
        shannon_entropy(&p, NATS),
        shannon_entropy(&p, BITS) * std::f64::consts::LN_2,
        1e-14,
    );
    close(
        BITS.from_nats(NATS.to_nats(1.0)),
        1.0 / std::f64::consts::LN_2,
        1e-14,
    );
}

#[test]
fn conditional_entropy_examples() {
    let a = dist(&[0.3, 0.7]);
    let b = dist(&[0.1, 0.2, 0.7]);
    let prod = JointDistribution::product(&a, &b);
    close(
        conditional_entropy(&prod, BITS),
        shannon_entropy(&b, BITS),
        1e-12,
    );

    let diag = JointDistribution::new(vec![vec![0.5, 0.0], vec![0.0, 0.5]]).unwrap();
    close(conditional_entropy(&diag, BITS), 0.0, 1e-15);

    let j = JointDistribution::new(vec![vec![0.4, 0.1], vec![0.1, 0.4]]).unwrap();
    let oracle = h2(&[0.4, 0.1, 0.1, 0.4]) - 1.0;
    close(oracle, 0.72193, 1e-5);
    close(conditional_entropy(&j, BITS), oracle, 1e-12);
    close(conditional_entropy_by_average(&j, BITS), oracle, 1e-12);
}

#[test]
fn mutual_information_examples() {
    let prod = JointDistribution::product(&dist(&[0.5, 0.5]), &dist(&[0.2, 0.8]));
    close(mutual_information(&prod, BITS), 0.0, 1e-12);
    let copy = JointDistribution::new(vec![vec![0.5, 0.0], vec![0.0, 0.5]]).unwrap();
    close(mutual_information(&copy, BITS), 1.0, 1e-12);
    let j = JointDistribution::new(vec![vec![0.4, 0.1], vec![0.1, 0.4]]).unwrap();
    let i = mutual_information(&j, BITS);
    close(i, 1.0 - (h2(&[0.4, 0.1, 0.1, 0.4]) - 1.0), 1e-12);
    close(i, 0.27807, 1e-5);
    let kl = kl_divergence(
        &Distribution::new(j.flat().to_vec()).unwrap(),
        &Distribution::new(
            JointDistribution::product(&j.marginal_a(), &j.marginal_b())
                .flat()
                .to_vec(),
        )
        .unwrap(),
        BITS,
    )
    .unwrap();
    close(i, kl, 1e-12);
}

#[test]
fn kl_examples() {
    let p = dist(&[0.3, 0.7]);
    assert_eq!(kl_divergence(&p, &p, BITS).unwrap(), 0.0);
    close(
        kl_divergence(&dist(&[1.0, 0.0]), &dist(&[0.5, 0.5]), BITS).unwrap(),
        1.0,
        1e-15,
    );
    assert_eq!(
        kl_divergence(&dist(&[0.5, 0.5]), &dist(&[1.0, 0.0]), BITS).unwrap(),
        f64::INFINITY
    );
    assert!(matches!(
        kl_divergence(&dist(&[1.0]), &dist(&[0.5, 0.5]), BITS),
        Err(Error::DimensionMismatch { .. })
    ));
}

#[test]
fn bayes_cards() {
    // hidden: first card removed was an ace (0) or not (1); observation: next card ace (0) or not (1)
    let prior = dist(&[4.0 / 52.0, 48.0 / 52.0]);
    let likelihood = DiscreteChannel::new(vec![
        vec![3.0 / 51.0, 48.0 / 51.0],
        vec![4.0 / 51.0, 47.0 / 51.0],
    ])
    .unwrap();
    close(likelihood.transition(0, 0), 3.0 / 51.0, 1e-15);
    close(likelihood.transition(1, 0), 4.0 / 51.0, 1e-15);
    // P(next ace) = 4/52 by symmetry, and the posterior for "ace removed" is 3/51
    let post = bayes_posterior(&prior, &likelihood, 0).unwrap();
    close(post.probs()[0], 3.0 / 51.0, 1e-14);

    let uniform = DiscreteChannel::new(vec![vec![0.5, 0.5], vec![0.5, 0.5]]).unwrap();
    let p = dist(&[0.2, 0.8]);
    assert_eq!(bayes_posterior(&p, &uniform, 1).unwrap().probs(), p.probs());
    let det = DiscreteChannel::new(vec![vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
    assert_eq!(bayes_posterior(&p, &det, 1).unwrap().probs(), &[0.0, 1.0]);
    let never = DiscreteChannel::new(vec![vec![1.0, 0.0], vec![1.0, 0.0]]).unwrap();
    assert!(matches!(
        bayes_posterior(&p, &never, 1),
        Err(Error::ZeroProbability(1))
    ));
}

#[test]
fn closed_form_capacities() {
    close(
        channel_capacity_closed(ChannelKind::BinarySymmetric(0.5), BITS)
            .unwrap()
            .capacity,
        0.0,
        1e-15,
    );
    let bsc = channel_capacity_closed(ChannelKind::BinarySymmetric(0.1), BITS).unwrap();
    close(bsc.capacity, 1.0 - h2(&[0.1, 0.9]), 1e-14);
    close(bsc.capacity, 0.531004, 1e-6);
    let t0 = channel_capacity_closed(ChannelKind::Ternary(0.0), NATS).unwrap();
    close(t0.capacity, 3f64.ln(), 1e-15);
    for x in t0.optimal_input.probs() {
        close(*x, 1.0 / 3.0, 1e-15);
    }
    close(
        channel_capacity_closed(ChannelKind::Ternary(0.5), BITS)
            .unwrap()
            .capacity,
        1.0,
        1e-12,
    );
    close(
        channel_capacity_closed(ChannelKind::Noiseless(4), BITS)
            .unwrap()
            .capacity,
        2.0,
        1e-15,
    );
    assert!(channel_capacity_closed(ChannelKind::BinarySymmetric(1.5), BITS).is_err());
}

#[test]
fn numeric_capacities() {
    let bsc = channel_capacity_numeric(
        &DiscreteChannel::binary_symmetric(0.1).unwrap(),
        1e-10,
        BITS,
    )
    .unwrap();
    close(bsc.capacity, 0.531004, 1e-6);
    let t = channel_capacity_numeric(&DiscreteChannel::ternary(0.5).unwrap(), 1e-12, BITS).unwrap();
    close(t.capacity, 1.0, 1e-9);
    let nl =
        channel_capacity_numeric(&DiscreteChannel::noiseless(2).unwrap(), 1e-12, BITS).unwrap();
    close(nl.capacity, 1.0, 1e-12);
    close(nl.optimal_input.probs()[0], 0.5, 1e-9);
    // closed-form optimal input for the ternary channel is reproduced
    let p = 0.2;
    let closed = channel_capacity_closed(ChannelKind::Ternary(p), BITS).unwrap();
    let numeric =
        channel_capacity_numeric(&DiscreteChannel::ternary(p).unwrap(), 1e-12, BITS).unwrap();
    for (a, b) in closed
        .optimal_input
        .probs()
        .iter()
        .zip(numeric.optimal_input.probs())
    {
        close(*a, *b, 1e-4);
    }
}

#[test]
fn numeric_capacity_rejects_bad_tolerance() {
    let ch = DiscreteChannel::binary_symmetric(0.2).unwrap();
    assert!(channel_capacity_numeric(&ch, 0.0, BITS).is_err());
}

#[test]
fn typical_set_examples() {
    let uni = typical_set(
        &Distribution::uniform(2).unwrap(),
        10,
        0.05,
        DEFAULT_ENUMERATION_CAP,
    )
    .unwrap();
    assert_eq!(uni.size(), 1024);
    close(uni.total_prob, 1.0, 1e-12);

    let point = typical_set(&dist(&[1.0, 0.0]), 8, 0.1, DEFAULT_ENUMERATION_CAP).unwrap();
    assert_eq!(point.members, vec![vec![0; 8]]);

    // p = [0.9, 0.1], n = 20, eps = 0.1: only exactly-two-ones sequences qualify
    let t = typical_set(&dist(&[0.9, 0.1]), 20, 0.1, DEFAULT_ENUMERATION_CAP).unwrap();
    assert_eq!(t.size(), 190);
    assert!(t
        .members
        .iter()
        .all(|s| s.iter().filter(|&&x| x == 1).count() == 2));
    close(t.total_prob, 190.0 * 0.9f64.powi(18) * 0.01, 1e-12);
    assert!(t.bounds.size_upper);
    assert!(t.bounds.size_lower);
    // n = 20 is far from asymptotic here: the probability bound fails and is reported as such
    assert!(!t.bounds.probability);

    let wide = typical_set(&dist(&[0.8, 0.2]), 20, 0.5, DEFAULT_ENUMERATION_CAP).unwrap();
    assert!(wide.bounds.probability && wide.bounds.size_lower && wide.bounds.size_upper);
}

#[test]
fn typical_set_cap() {
    let err = typical_set(&Distribution::uniform(3).unwrap(), 30, 0.1, 1 << 20).unwrap_err();
    assert!(matches!(err, Error::CapExceeded { .. }));
}

#[test]
fn noisy_coding_examples() {
    let clean = DiscreteChannel::binary_symmetric(0.0).unwrap();
    for row in noisy_coding_demo(&clean, 0.5, &[4, 8, 12], 500, 3).unwrap() {
        assert_eq!(row.errors, 0, "{row:?}");
    }
    let bsc = DiscreteChannel::binary_symmetric(0.1).unwrap();
    let rows = noisy_coding_demo(&bsc, 0.3, &[8, 12, 16], 10_000, 11).unwrap();
    assert!(
        rows[0].error_rate > rows[1].error_rate && rows[1].error_rate > rows[2].error_rate,
        "{rows:?}"
    );
    let above = noisy_coding_demo(&bsc, 0.9, &[16], 2_000, 11).unwrap();
    assert!(above[0].error_rate > 0.2, "{above:?}");
}

#[test]
fn noisy_coding_rejects_rate_above_alphabet() {
    let ch = DiscreteChannel::binary_symmetric(0.1).unwrap();
    assert!(noisy_coding_demo(&ch, 1.5, &[8], 10, 1).is_err());
    assert!(noisy_coding_demo(&ch, 1.0, &[8], 10, 1).is_ok());
}

#[test]
fn noisy_coding_is_reproducible() {
    let ch = DiscreteChannel::ternary(0.3).unwrap();
    let a = noisy_coding_demo(&ch, 0.4, &[4, 6], 300, 99).unwrap();
    let b = noisy_coding_demo(&ch, 0.4, &[4, 6], 300, 99).unwrap();
    assert_eq!(a, b);
}
