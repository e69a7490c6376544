//! Seeded simulations of BB84, E91, teleportation, superdense coding,
//! entanglement swapping and recurrence (two-pair) purification.
//!
//! Each round or pair draws from its own substream of the master seed, so
//! transcripts are bit-identical for a given configuration regardless of
//! thread count.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dynamics::{apply_channel, KrausChannel, ProjectiveMeasurement};
use crate::entanglement::{
    bell_state, bell_weights, bilateral_rotation_group, classify_bell, e91_alice_axes,
    e91_bob_axes, BellLabel, PairOp, WernerState,
};
use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, CVector};
use crate::random::{sample_index, substream, StreamRng};
use crate::state::{DensityOperator, StateVector};

/// Default QBER above which a run is treated as eavesdropped.
pub const DEFAULT_QBER_ABORT: f64 = 0.11;

/// Angle of BB84's second basis state |0'⟩ = cos θ|0⟩ + sin θ|1⟩.
pub const BB84_SECOND_BASIS: f64 = std::f64::consts::FRAC_PI_4;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BasisPolicy {
    /// Uniform over the protocol's bases each round.
    Random,
    /// Always the given basis index.
    Fixed(u8),
}

/// What happens to the qubit in flight (Bob's half in E91).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum EveStrategy {
    None,
    /// Measure in one of Eve's bases and resend the observed eigenstate.
    /// BB84 uses the protocol's two bases; E91 uses the z and x axes.
    InterceptResend {
        policy: BasisPolicy,
    },
    /// An arbitrary qubit channel.
    Channel {
        channel: KrausChannel,
    },
}

impl EveStrategy {
    fn validate(&self) -> Result<()> {
        match self {
            EveStrategy::Channel { channel }
                if channel.input_dim() != 2 || channel.output_dim() != 2 =>
            {
                Err(Error::DimensionMismatch {
                    expected: 2,
                    got: channel.input_dim(),
                })
            }
            EveStrategy::InterceptResend {
                policy: BasisPolicy::Fixed(b),
            } if *b > 1 => Err(Error::InvalidArgument(format!(
                "Eve basis {b} out of range"
            ))),
            _ => Ok(()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum EveAction {
    None,
    Measured { basis: u8, outcome: u8 },
    Channel,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QkdRound {
    pub round: u64,
    pub alice_basis: u8,
    /// Prepared bit (BB84) or measured bit (E91, 0 for spin up).
    pub alice_bit: u8,
    pub bob_basis: u8,
    pub bob_bit: u8,
    pub eve: EveAction,
    pub sifted: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum QkdProtocol {
    Bb84,
    E91,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QkdTranscript {
    pub protocol: QkdProtocol,
    pub seed: u64,
    pub rounds: Vec<QkdRound>,
    pub sifted_key_alice: Vec<u8>,
    /// Bob's sifted bits; in E91 they are complemented so that agreement
    /// means anti-correlated outcomes.
    pub sifted_key_bob: Vec<u8>,
    pub qber: f64,
    pub sift_fraction: f64,
    pub chsh_estimate: Option<f64>,
}

impl QkdTranscript {
    fn assemble(
        protocol: QkdProtocol,
        seed: u64,
        rounds: Vec<QkdRound>,
        complement_bob: bool,
    ) -> Self {
        let (mut ka, mut kb) = (Vec::new(), Vec::new());
        for r in rounds.iter().filter(|r| r.sifted) {
            ka.push(r.alice_bit);
            kb.push(if complement_bob {
                1 - r.bob_bit
            } else {
                r.bob_bit
            });
        }
        let errors = ka.iter().zip(&kb).filter(|(a, b)| a != b).count();
        let qber = if ka.is_empty() {
            0.0
        } else {
            errors as f64 / ka.len() as f64
        };
        let sift_fraction = ka.len() as f64 / rounds.len().max(1) as f64;
        Self {
            protocol,
            seed,
            rounds,
            sifted_key_alice: ka,
            sifted_key_bob: kb,
            qber,
            sift_fraction,
            chsh_estimate: None,
        }
    }

    pub fn should_abort(&self, qber_threshold: f64) -> bool {
        self.qber > qber_threshold
    }
}

fn bb84_state(basis: u8, bit: u8, angle: f64) -> StateVector {
    StateVector::qubit_at_angle(basis as f64 * angle + bit as f64 * std::f64::consts::FRAC_PI_2)
}

fn bb84_measurement(basis: u8, angle: f64) -> ProjectiveMeasurement {
    ProjectiveMeasurement::qubit_at_angle(basis as f64 * angle)
}

fn born_sample(rho: &DensityOperator, m: &ProjectiveMeasurement, rng: &mut StreamRng) -> usize {
    let probs: Vec<f64> = m
        .projectors()
        .iter()
        .map(|p| rho.expectation(p).map(|z| z.re.max(0.0)).unwrap_or(0.0))
        .collect();
    sample_index(&probs, rng)
}

fn pick_basis(policy: BasisPolicy, rng: &mut StreamRng) -> u8 {
    match policy {
        BasisPolicy::Random => rng.random_range(0..2u8),
        BasisPolicy::Fixed(b) => b,
    }
}

pub fn bb84(rounds: u64, eve: &EveStrategy, seed: u64) -> Result<QkdTranscript> {
    bb84_with_basis(rounds, eve, seed, BB84_SECOND_BASIS)
}

/// BB84 with the second basis rotated by `angle` from the computational one.
pub fn bb84_with_basis(
    rounds: u64,
    eve: &EveStrategy,
    seed: u64,
    angle: f64,
) -> Result<QkdTranscript> {
    if rounds == 0 {
        return Err(Error::InvalidArgument(
            "at least one round is required".into(),
        ));
    }
    eve.validate()?;
    let measurements = [bb84_measurement(0, angle), bb84_measurement(1, angle)];
    let records: Vec<QkdRound> = (0..rounds)
        .into_par_iter()
        .map(|round| {
            let mut rng = substream(seed, round);
            let alice_basis = rng.random_range(0..2u8);
            let alice_bit = rng.random_range(0..2u8);
            let mut rho = bb84_state(alice_basis, alice_bit, angle).density();
            let action = match eve {
                EveStrategy::None => EveAction::None,
                EveStrategy::InterceptResend { policy } => {
                    let basis = pick_basis(*policy, &mut rng);
                    let outcome = born_sample(&rho, &measurements[basis as usize], &mut rng) as u8;
                    rho = bb84_state(basis, outcome, angle).density();
                    EveAction::Measured { basis, outcome }
                }
                EveStrategy::Channel { channel } => {
                    rho = apply_channel(&rho, channel).expect("validated qubit channel");
                    EveAction::Channel
                }
            };
            let bob_basis = rng.random_range(0..2u8);
            let bob_bit = born_sample(&rho, &measurements[bob_basis as usize], &mut rng) as u8;
            QkdRound {
                round,
                alice_basis,
                alice_bit,
                bob_basis,
                bob_bit,
                eve: action,
                sifted: alice_basis == bob_basis,
            }
        })
        .collect();
    Ok(QkdTranscript::assemble(
        QkdProtocol::Bb84,
        seed,
        records,
        false,
    ))
}

/// Exact QBER expected on sifted BB84 bits under `eve`.
pub fn bb84_expected_qber(eve: &EveStrategy, angle: f64) -> Result<f64> {
    eve.validate()?;
    let measurements = [bb84_measurement(0, angle), bb84_measurement(1, angle)];
    let mut total = 0.0;
    for basis in 0..2u8 {
        for bit in 0..2u8 {
            let rho = bb84_state(basis, bit, angle).density();
            let received = match eve {
                EveStrategy::None => rho,
                EveStrategy::Channel { channel } => apply_channel(&rho, channel)?,
                EveStrategy::InterceptResend { policy } => {
                    let bases: Vec<(u8, f64)> = match policy {
                        BasisPolicy::Random => vec![(0, 0.5), (1, 0.5)],
                        BasisPolicy::Fixed(b) => vec![(*b, 1.0)],
                    };
                    let mut acc = CMatrix::zeros(2, 2);
                    for (eb, w) in bases {
                        for (o, p) in measurements[eb as usize].projectors().iter().enumerate() {
                            let prob = rho.expectation(p)?.re;
                            acc += bb84_state(eb, o as u8, angle)
                                .density()
                                .matrix()
                                .scale(w * prob);
                        }
                    }
                    DensityOperator::from_matrix(acc)?
                }
            };
            let wrong = &measurements[basis as usize].projectors()[1 - bit as usize];
            total += 0.25 * received.expectation(wrong)?.re;
        }
    }
    Ok(total)
}

/// Key rounds: Alice's basis 1 with Bob's 0, and Alice's 2 with Bob's 1
/// (parallel axes). Rounds with both parties in {0, 2} feed the CHSH estimate.
fn e91_key_round(a: u8, b: u8) -> bool {
    (a == 1 && b == 0) || (a == 2 && b == 1)
}

pub fn ekert91(rounds: u64, eve: &EveStrategy, seed: u64) -> Result<QkdTranscript> {
    if rounds == 0 {
        return Err(Error::InvalidArgument(
            "at least one round is required".into(),
        ));
    }
    eve.validate()?;
    let alice: Vec<ProjectiveMeasurement> = e91_alice_axes()
        .iter()
        .map(|a| ProjectiveMeasurement::spin_along(*a))
        .collect::<Result<_>>()?;
    let bob: Vec<ProjectiveMeasurement> = e91_bob_axes()
        .iter()
        .map(|b| ProjectiveMeasurement::spin_along(*b))
        .collect::<Result<_>>()?;
    let eve_bases = [
        ProjectiveMeasurement::spin_along([0.0, 0.0, 1.0])?,
        ProjectiveMeasurement::spin_along([1.0, 0.0, 0.0])?,
    ];
    let singlet = bell_state(BellLabel::PSI_MINUS).density();
    let bob_channel = match eve {
        EveStrategy::Channel { channel } => {
            let lifted = channel
                .operators()
                .iter()
                .map(|k| linalg::kron(&linalg::identity(2), k))
                .collect();
            Some(KrausChannel::new(lifted)?)
        }
        _ => None,
    };
    let shared = match &bob_channel {
        Some(ch) => apply_channel(&singlet, ch)?.with_dims(vec![2, 2])?,
        None => singlet.clone(),
    };

    let records: Vec<QkdRound> = (0..rounds)
        .into_par_iter()
        .map(|round| {
            let mut rng = substream(seed, round);
            let alice_basis = rng.random_range(0..3u8);
            let bob_basis = rng.random_range(0..3u8);
            let (rho, action) = match eve {
                EveStrategy::InterceptResend { policy } => {
                    let basis = pick_basis(*policy, &mut rng);
                    let m = &eve_bases[basis as usize];
                    let lifted: Vec<CMatrix> = m
                        .projectors()
                        .iter()
                        .map(|p| linalg::kron(&linalg::identity(2), p))
                        .collect();
                    let probs: Vec<f64> = lifted
                        .iter()
                        .map(|p| singlet.expectation(p).map(|z| z.re).unwrap_or(0.0))
                        .collect();
                    let outcome = sample_index(&probs, &mut rng);
                    // Bob's half is replaced by the eigenstate Eve saw
                    let alice_half = {
                        let post = &lifted[outcome] * singlet.matrix() * &lifted[outcome];
                        let norm = linalg::trace(&post).re;
                        let reduced = crate::state::reduce(
                            &DensityOperator::from_trusted(post.unscale(norm), vec![2, 2]),
                            0,
                        )
                        .expect("two-qubit reduction");
                        reduced.matrix().clone()
                    };
                    let bob_half = m.projectors()[outcome].clone();
                    let product = DensityOperator::from_trusted(
                        linalg::kron(&alice_half, &bob_half),
                        vec![2, 2],
                    );
                    (
                        product,
                        EveAction::Measured {
                            basis,
                            outcome: outcome as u8,
                        },
                    )
                }
                EveStrategy::Channel { .. } => (shared.clone(), EveAction::Channel),
                EveStrategy::None => (shared.clone(), EveAction::None),
            };
            let mut probs = [0.0; 4];
            for (i, pa) in alice[alice_basis as usize].projectors().iter().enumerate() {
                for (j, pb) in bob[bob_basis as usize].projectors().iter().enumerate() {
                    probs[2 * i + j] = rho
                        .expectation(&linalg::kron(pa, pb))
                        .map(|z| z.re.max(0.0))
                        .unwrap_or(0.0);
                }
            }
            let k = sample_index(&probs, &mut rng);
            QkdRound {
                round,
                alice_basis,
                alice_bit: (k / 2) as u8,
                bob_basis,
                bob_bit: (k % 2) as u8,
                eve: action,
                sifted: e91_key_round(alice_basis, bob_basis),
            }
        })
        .collect();
    let mut transcript = QkdTranscript::assemble(QkdProtocol::E91, seed, records, true);
    transcript.chsh_estimate = chsh_from_rounds(&transcript.rounds);
    Ok(transcript)
}

/// S = E(0,0) − E(0,2) + E(2,0) + E(2,2) from the empirical correlations;
/// `None` until every term has at least one round.
pub fn chsh_from_rounds(rounds: &[QkdRound]) -> Option<f64> {
    let mut sum = [[0i64; 3]; 3];
    let mut count = [[0i64; 3]; 3];
    for r in rounds {
        let (a, b) = (r.alice_basis as usize, r.bob_basis as usize);
        let product = if r.alice_bit == r.bob_bit { 1 } else { -1 };
        sum[a][b] += product;
        count[a][b] += 1;
    }
    let e = |a: usize, b: usize| (count[a][b] > 0).then(|| sum[a][b] as f64 / count[a][b] as f64);
    Some(e(0, 0)? - e(0, 2)? + e(2, 0)? + e(2, 2)?)
}

/// Bob's correction after a Bell outcome, chosen so it returns the matching
/// term of the expansion to the original state: Φ⁺ → 1, Ψ⁺ → σx, Φ⁻ → σz,
/// Ψ⁻ → σy.
pub fn correction(outcome: BellLabel) -> CMatrix {
    match (outcome.amplitude, outcome.phase) {
        (1, 0) => linalg::identity(2),
        (0, 0) => linalg::pauli_x(),
        (1, _) => linalg::pauli_z(),
        _ => linalg::pauli_y(),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutcomeChoice {
    Fixed(BellLabel),
    Sampled(u64),
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TeleportResult {
    pub outcome: BellLabel,
    pub probability: f64,
    pub bob_before: StateVector,
    pub bob_after: StateVector,
    /// |⟨μ|ψ_after⟩|².
    pub fidelity: f64,
}

/// Conditional states of Bob's qubit for each Bell outcome on AC, in
/// [`BellLabel::ALL`] order, with their probabilities.
fn teleport_branches(mu: &StateVector) -> Result<Vec<(f64, CVector)>> {
    if mu.dim() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            got: mu.dim(),
        });
    }
    let phi = bell_state(BellLabel::PHI_PLUS);
    // register order A, C, B
    let mut psi = CVector::zeros(8);
    for a in 0..2 {
        for cq in 0..2 {
            for b in 0..2 {
                psi[4 * a + 2 * cq + b] = phi.amps()[2 * a + b] * mu.amps()[cq];
            }
        }
    }
    Ok(BellLabel::ALL
        .iter()
        .map(|&l| {
            let bell = bell_state(l);
            let bob = CVector::from_fn(2, |b, _| {
                (0..4)
                    .map(|ac| bell.amps()[ac].conj() * psi[2 * ac + b])
                    .sum()
            });
            (bob.norm_squared(), bob)
        })
        .collect())
}

fn choose(probs: &[f64], choice: OutcomeChoice) -> BellLabel {
    match choice {
        OutcomeChoice::Fixed(l) => l,
        OutcomeChoice::Sampled(seed) => {
            BellLabel::from_index(sample_index(probs, &mut substream(seed, 0)))
        }
    }
}

pub fn teleport(mu: &StateVector, choice: OutcomeChoice) -> Result<TeleportResult> {
    let branches = teleport_branches(mu)?;
    let probs: Vec<f64> = branches.iter().map(|(p, _)| *p).collect();
    let outcome = choose(&probs, choice);
    let (probability, bob) = branches[outcome.index()].clone();
    let bob_before = StateVector::from_unnormalized(bob, vec![2])?;
    let bob_after = bob_before.evolve(&correction(outcome))?;
    let fidelity = mu.inner(&bob_after)?.norm_sqr();
    Ok(TeleportResult {
        outcome,
        probability,
        bob_before,
        bob_after,
        fidelity,
    })
}

/// Bob's state averaged over outcomes when he applies no correction.
pub fn teleport_uncorrected_average(mu: &StateVector) -> Result<DensityOperator> {
    let m = teleport_branches(mu)?
        .iter()
        .fold(CMatrix::zeros(2, 2), |acc, (_, v)| {
            acc + linalg::projector(v)
        });
    DensityOperator::from_matrix(m)
}

/// Alice's encoding operators U₀…U₃ = 1, σx, σy, σz on her half.
pub fn superdense_encoder(message: u8) -> Result<CMatrix> {
    let single = match message {
        0 => linalg::identity(2),
        1 => linalg::pauli_x(),
        2 => linalg::pauli_y(),
        3 => linalg::pauli_z(),
        m => {
            return Err(Error::InvalidArgument(format!(
                "message {m} is not two bits"
            )))
        }
    };
    Ok(linalg::kron(&single, &linalg::identity(2)))
}

/// Message Bob infers from each Bell outcome: Φ⁺ → 0, Ψ⁺ → 1, Ψ⁻ → 2, Φ⁻ → 3.
pub fn superdense_decode(label: BellLabel) -> u8 {
    match (label.amplitude, label.phase) {
        (1, 0) => 0,
        (0, 0) => 1,
        (0, _) => 2,
        _ => 3,
    }
}

/// Distribution of decoded messages when `message` is encoded on `shared`.
pub fn superdense_distribution(shared: &DensityOperator, message: u8) -> Result<[f64; 4]> {
    let encoded = shared.evolve(&superdense_encoder(message)?)?;
    let weights = bell_weights(&encoded)?;
    let mut out = [0.0; 4];
    for l in BellLabel::ALL {
        out[superdense_decode(l) as usize] += weights[l.index()];
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct SuperdenseResult {
    pub message: u8,
    pub decoded: u8,
    pub outcome: BellLabel,
}

/// Encodes `message` on a shared Φ⁺ and decodes it with a Bell measurement.
pub fn superdense_send(message: u8) -> Result<SuperdenseResult> {
    let encoded = bell_state(BellLabel::PHI_PLUS).evolve(&superdense_encoder(message)?)?;
    let outcome = classify_bell(&encoded)
        .ok_or_else(|| Error::Internal("encoded state left the Bell basis".into()))?;
    Ok(SuperdenseResult {
        message,
        decoded: superdense_decode(outcome),
        outcome,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SwapResult {
    pub outcome: BellLabel,
    pub probability: f64,
    pub ad_before: StateVector,
    pub ad_after: StateVector,
    /// |⟨Φ⁺|AD after⟩|².
    pub fidelity: f64,
}

fn swap_branches() -> Vec<(f64, CVector)> {
    let phi = bell_state(BellLabel::PHI_PLUS);
    let psi = linalg::kron_vec(phi.amps(), phi.amps());
    BellLabel::ALL
        .iter()
        .map(|&l| {
            let bell = bell_state(l);
            let ad = CVector::from_fn(4, |k, _| {
                let (a, d) = (k / 2, k % 2);
                (0..4)
                    .map(|bc| bell.amps()[bc].conj() * psi[8 * a + 2 * bc + d])
                    .sum()
            });
            (ad.norm_squared(), ad)
        })
        .collect()
}

/// Bell measurement on BC of Φ⁺_AB ⊗ Φ⁺_CD followed by Alice's local
/// correction of AD back to Φ⁺.
pub fn entanglement_swap(choice: OutcomeChoice) -> Result<SwapResult> {
    let branches = swap_branches();
    let probs: Vec<f64> = branches.iter().map(|(p, _)| *p).collect();
    let outcome = choose(&probs, choice);
    let (probability, ad) = branches[outcome.index()].clone();
    let ad_before = StateVector::from_unnormalized(ad, vec![2, 2])?;
    let fix = linalg::kron(&correction(outcome), &linalg::identity(2));
    let ad_after = ad_before.evolve(&fix)?;
    let fidelity = bell_state(BellLabel::PHI_PLUS).inner(&ad_after)?.norm_sqr();
    Ok(SwapResult {
        outcome,
        probability,
        ad_before,
        ad_after,
        fidelity,
    })
}

/// Exact outcome probabilities of the BC Bell measurement, in [`BellLabel::ALL`] order.
pub fn swap_outcome_probabilities() -> [f64; 4] {
    let mut out = [0.0; 4];
    for (k, (p, _)) in swap_branches().into_iter().enumerate() {
        out[k] = p;
    }
    out
}

/// Outcome counts over `runs` seeded swaps (run i uses substream i).
pub fn swap_outcome_counts(runs: u64, seed: u64) -> [u64; 4] {
    let probs = swap_outcome_probabilities();
    (0..runs)
        .into_par_iter()
        .map(|i| sample_index(&probs, &mut substream(seed, i)))
        .fold(
            || [0u64; 4],
            |mut acc, k| {
                acc[k] += 1;
                acc
            },
        )
        .reduce(
            || [0u64; 4],
            |mut a, b| {
                (0..4).for_each(|k| a[k] += b[k]);
                a
            },
        )
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PurifyStep {
    pub f_next: f64,
    pub p_pass: f64,
}

/// One recurrence step on W_F ⊗ W_F. The pair survives when the target's
/// local Z outcomes agree; then
/// p_pass = F² + ⅔F(1−F) + 5/9(1−F)² and F' = (F² + (1−F)²/9) / p_pass.
pub fn purify_step_analytic(f: f64) -> Result<PurifyStep> {
    if !(0.0..=1.0).contains(&f) {
        return Err(Error::InvalidArgument(format!(
            "fidelity {f} outside [0, 1]"
        )));
    }
    let g = 1.0 - f;
    let p_pass = f * f + 2.0 * f * g / 3.0 + 5.0 * g * g / 9.0;
    let f_next = (f * f + g * g / 9.0) / p_pass;
    Ok(PurifyStep { f_next, p_pass })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimulatedStep {
    pub f_next: f64,
    pub p_pass: f64,
    pub attempts: u64,
    pub passed: u64,
    pub pairs_in: u64,
    pub pairs_out: u64,
}

struct PairOutcome {
    passed: bool,
    source: BellLabel,
}

/// Bilateral CNOT on source ⊗ target Bell states, then Alice and Bob read
/// the target qubits in Z. Returns the pass flag and the source label.
fn purify_pair(
    bxor: &CMatrix,
    source: BellLabel,
    target: BellLabel,
    rng: &mut StreamRng,
) -> Result<PairOutcome> {
    let psi = linalg::kron_vec(bell_state(source).amps(), bell_state(target).amps());
    let out = bxor * psi;
    // probabilities of (c, d) on qubits 2 and 3
    let mut probs = [0.0; 4];
    for (k, z) in out.iter().enumerate() {
        probs[k & 3] += z.norm_sqr();
    }
    let cd = sample_index(&probs, rng);
    let passed = (cd >> 1) == (cd & 1);
    let src = CVector::from_fn(4, |ab, _| out[4 * ab + cd]);
    let src = StateVector::from_unnormalized(src, vec![2, 2])?;
    let label =
        classify_bell(&src).ok_or_else(|| Error::Internal("source left the Bell basis".into()))?;
    Ok(PairOutcome {
        passed,
        source: label,
    })
}

fn sample_werner_labels(f: f64, count: u64, seed: u64, round: u64) -> Vec<BellLabel> {
    let weights = WernerState { fidelity: f }.bell_weights();
    (0..count)
        .into_par_iter()
        .map(|i| {
            BellLabel::from_index(sample_index(
                &weights,
                &mut substream(seed, (round << 40) | i),
            ))
        })
        .collect()
}

fn bxor_unitary() -> CMatrix {
    PairOp::BilateralCnot {
        source: 0,
        target: 1,
    }
    .unitary(2)
    .expect("two-pair register")
}

/// One step over `labels`, pairing consecutive entries (source, target).
/// An odd final pair is carried over untouched.
fn purify_round(
    labels: &[BellLabel],
    seed: u64,
    round: u64,
) -> Result<(Vec<BellLabel>, u64, u64, u64)> {
    let bxor = bxor_unitary();
    let attempts = labels.len() / 2;
    let outcomes = (0..attempts)
        .into_par_iter()
        .map(|k| {
            let mut rng = substream(seed, (1 << 62) | (round << 40) | k as u64);
            purify_pair(&bxor, labels[2 * k], labels[2 * k + 1], &mut rng)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut survivors: Vec<BellLabel> = outcomes
        .iter()
        .filter(|o| o.passed)
        .map(|o| o.source)
        .collect();
    let passed = survivors.len() as u64;
    let good = survivors
        .iter()
        .filter(|l| **l == BellLabel::PHI_PLUS)
        .count() as u64;
    if labels.len() % 2 == 1 {
        survivors.push(labels[labels.len() - 1]);
    }
    Ok((survivors, attempts as u64, passed, good))
}

/// Monte-Carlo version of [`purify_step_analytic`] on `pairs` Werner pairs.
pub fn purify_step_simulated(f: f64, pairs: u64, seed: u64) -> Result<SimulatedStep> {
    if !(0.0..=1.0).contains(&f) {
        return Err(Error::InvalidArgument(format!(
            "fidelity {f} outside [0, 1]"
        )));
    }
    if pairs < 2 || pairs % 2 == 1 {
        return Err(Error::InvalidArgument(format!(
            "need an even number of pairs, got {pairs}"
        )));
    }
    let labels = sample_werner_labels(f, pairs, seed, 0);
    let (survivors, attempts, passed, good) = purify_round(&labels, seed, 0)?;
    Ok(SimulatedStep {
        f_next: if passed == 0 {
            0.0
        } else {
            good as f64 / passed as f64
        },
        p_pass: passed as f64 / attempts as f64,
        attempts,
        passed,
        pairs_in: pairs,
        pairs_out: survivors.len() as u64,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "mode")]
pub enum PurifyMode {
    Analytic,
    Simulated { seed: u64, pairs: u64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PurificationRound {
    /// Fidelity after this round.
    pub fidelity: f64,
    pub p_pass: f64,
    pub pairs_remaining: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PurificationRun {
    pub initial_f: f64,
    pub mode: PurifyMode,
    pub rounds: Vec<PurificationRound>,
}

/// Repeated recurrence steps. In simulated mode every survivor is twirled
/// by a random element of the bilateral rotation group (conjugated so Φ⁺ is
/// invariant) before the next round, which restores Werner form on average.
pub fn purify_run(initial_f: f64, rounds: usize, mode: PurifyMode) -> Result<PurificationRun> {
    let mut out = Vec::with_capacity(rounds);
    match mode {
        PurifyMode::Analytic => {
            let mut f = initial_f;
            for _ in 0..rounds {
                let step = purify_step_analytic(f)?;
                f = step.f_next;
                out.push(PurificationRound {
                    fidelity: f,
                    p_pass: step.p_pass,
                    pairs_remaining: None,
                });
            }
        }
        PurifyMode::Simulated { seed, pairs } => {
            if !(0.0..=1.0).contains(&initial_f) {
                return Err(Error::InvalidArgument(format!(
                    "fidelity {initial_f} outside [0, 1]"
                )));
            }
            let mut labels = sample_werner_labels(initial_f, pairs, seed, 0);
            for r in 0..rounds as u64 {
                if labels.len() < 2 {
                    break;
                }
                let (survivors, attempts, passed, good) = purify_round(&labels, seed, r)?;
                labels = twirl_labels(&survivors, seed, r);
                out.push(PurificationRound {
                    fidelity: if passed == 0 {
                        0.0
                    } else {
                        good as f64 / passed as f64
                    },
                    p_pass: passed as f64 / attempts.max(1) as f64,
                    pairs_remaining: Some(labels.len() as u64),
                });
            }
        }
    }
    Ok(PurificationRun {
        initial_f,
        mode,
        rounds: out,
    })
}

fn twirl_labels(labels: &[BellLabel], seed: u64, round: u64) -> Vec<BellLabel> {
    let group = bilateral_rotation_group();
    let flip = linalg::on_qubit(2, 0, &linalg::pauli_y());
    labels
        .par_iter()
        .enumerate()
        .map(|(i, &l)| {
            let mut rng = substream(seed, (1 << 61) | (round << 40) | i as u64);
            let u = &group[rng.random_range(0..group.len())];
            let op = &flip * linalg::kron(u, u) * flip.adjoint();
            let moved = bell_state(l).evolve(&op).expect("two-qubit unitary");
            classify_bell(&moved).expect("Clifford maps Bell states to Bell states")
        })
        .collect()
}
