//! Classical probability and Shannon-theoretic functionals: entropy,
//! conditional entropy, mutual information, relative entropy, Bayes updates,
//! channel capacity (closed forms and numerical), typical sets, and a
//! random-coding Monte-Carlo over a memoryless channel.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::random::{sample_index, substream};

/// Tolerance on the unit sum of a probability vector.
pub const SUM_TOLERANCE: f64 = 1e-12;

/// Default upper bound on the number of sequences enumerated exhaustively.
pub const DEFAULT_ENUMERATION_CAP: u128 = 1 << 22;

/// Iteration cap of the numerical capacity solver.
pub const CAPACITY_MAX_ITERATIONS: usize = 100_000;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LogBase {
    #[default]
    Bits,
    Nats,
}

impl LogBase {
    /// Converts a quantity measured in nats into this base.
    pub fn from_nats(self, nats: f64) -> f64 {
        match self {
            LogBase::Bits => nats / std::f64::consts::LN_2,
            LogBase::Nats => nats,
        }
    }

    pub fn to_nats(self, value: f64) -> f64 {
        match self {
            LogBase::Bits => value * std::f64::consts::LN_2,
            LogBase::Nats => value,
        }
    }

    pub fn log(self, x: f64) -> f64 {
        self.from_nats(x.ln())
    }
}

/// `-x ln x` with the continuity convention `0 ln 0 = 0`.
pub(crate) fn eta_nats(x: f64) -> f64 {
    if x > 0.0 {
        -x * x.ln()
    } else {
        0.0
    }
}

/// Entropy of a non-negative weight vector, without validation.
pub(crate) fn entropy_nats(probs: &[f64]) -> f64 {
    probs.iter().map(|&p| eta_nats(p)).sum()
}

fn validate_probs(probs: &[f64]) -> Result<()> {
    if probs.is_empty() {
        return Err(Error::InvalidDistribution("empty alphabet".into()));
    }
    if let Some(bad) = probs.iter().find(|p| !p.is_finite() || **p < 0.0) {
        return Err(Error::InvalidDistribution(format!(
            "entry {bad} is negative or not finite"
        )));
    }
    let sum: f64 = probs.iter().sum();
    if (sum - 1.0).abs() > SUM_TOLERANCE {
        return Err(Error::InvalidDistribution(format!("entries sum to {sum}")));
    }
    Ok(())
}

/// A probability vector over a finite alphabet.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct Distribution {
    probs: Vec<f64>,
}

impl Distribution {
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        validate_probs(&probs)?;
        Ok(Self { probs })
    }

    pub fn uniform(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidDistribution("empty alphabet".into()));
        }
        Ok(Self {
            probs: vec![1.0 / n as f64; n],
        })
    }

    pub fn point_mass(n: usize, index: usize) -> Result<Self> {
        if index >= n {
            return Err(Error::InvalidArgument(format!(
                "index {index} outside alphabet of size {n}"
            )));
        }
        let mut probs = vec![0.0; n];
        probs[index] = 1.0;
        Ok(Self { probs })
    }

    /// Renormalizes non-negative weights into a distribution.
    pub fn from_weights(weights: &[f64]) -> Result<Self> {
        let total: f64 = weights.iter().sum();
        if !(total > 0.0) || weights.iter().any(|w| *w < 0.0) {
            return Err(Error::InvalidDistribution(
                "weights must be non-negative with positive sum".into(),
            ));
        }
        Self::new(weights.iter().map(|w| w / total).collect())
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }
}

impl TryFrom<Vec<f64>> for Distribution {
    type Error = Error;
    fn try_from(v: Vec<f64>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<Distribution> for Vec<f64> {
    fn from(d: Distribution) -> Self {
        d.probs
    }
}

/// Joint distribution p(a, b), stored row-major with `a` indexing rows.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<f64>>", into = "Vec<Vec<f64>>")]
pub struct JointDistribution {
    probs: Vec<f64>,
    rows: usize,
    cols: usize,
}

impl JointDistribution {
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self> {
        let n_rows = rows.len();
        let n_cols = rows.first().map_or(0, Vec::len);
        if n_rows == 0 || n_cols == 0 || rows.iter().any(|r| r.len() != n_cols) {
            return Err(Error::InvalidDistribution(
                "joint table must be a non-empty rectangle".into(),
            ));
        }
        let probs: Vec<f64> = rows.into_iter().flatten().collect();
        validate_probs(&probs)?;
        Ok(Self {
            probs,
            rows: n_rows,
            cols: n_cols,
        })
    }

    /// Product joint p_A(a) p_B(b).
    pub fn product(a: &Distribution, b: &Distribution) -> Self {
        let probs = a
            .probs
            .iter()
            .flat_map(|pa| b.probs.iter().map(move |pb| pa * pb))
            .collect();
        Self {
            probs,
            rows: a.len(),
            cols: b.len(),
        }
    }

    /// Joint p(x, y) = p(x) p(y|x) of an input distribution through a channel.
    pub fn from_channel(input: &Distribution, channel: &DiscreteChannel) -> Result<Self> {
        if input.len() != channel.inputs() {
            return Err(Error::DimensionMismatch {
                expected: channel.inputs(),
                got: input.len(),
            });
        }
        let probs = input
            .probs
            .iter()
            .zip(&channel.rows)
            .flat_map(|(px, row)| row.iter().map(move |pyx| px * pyx))
            .collect();
        Ok(Self {
            probs,
            rows: channel.inputs(),
            cols: channel.outputs(),
        })
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn get(&self, a: usize, b: usize) -> f64 {
        self.probs[a * self.cols + b]
    }

    pub fn flat(&self) -> &[f64] {
        &self.probs
    }

    pub fn marginal_a(&self) -> Distribution {
        let probs = self
            .probs
            .chunks(self.cols)
            .map(|r| r.iter().sum())
            .collect();
        Distribution { probs }
    }

    pub fn marginal_b(&self) -> Distribution {
        let probs = (0..self.cols)
            .map(|b| (0..self.rows).map(|a| self.get(a, b)).sum())
            .collect();
        Distribution { probs }
    }

    /// p(a | b) for a fixed `b`.
    pub fn conditional_a_given_b(&self, b: usize) -> Result<Distribution> {
        let column: Vec<f64> = (0..self.rows).map(|a| self.get(a, b)).collect();
        let pb: f64 = column.iter().sum();
        if pb <= 0.0 {
            return Err(Error::ZeroProbability(b));
        }
        Ok(Distribution {
            probs: column.iter().map(|x| x / pb).collect(),
        })
    }

    pub fn transpose(&self) -> Self {
        let probs = (0..self.cols)
            .flat_map(|b| (0..self.rows).map(move |a| (a, b)))
            .map(|(a, b)| self.get(a, b))
            .collect();
        Self {
            probs,
            rows: self.cols,
            cols: self.rows,
        }
    }
}

impl TryFrom<Vec<Vec<f64>>> for JointDistribution {
    type Error = Error;
    fn try_from(v: Vec<Vec<f64>>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<JointDistribution> for Vec<Vec<f64>> {
    fn from(j: JointDistribution) -> Self {
        j.probs.chunks(j.cols).map(<[f64]>::to_vec).collect()
    }
}

/// Memoryless channel given by its row-stochastic transition matrix p(y|x).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<f64>>", into = "Vec<Vec<f64>>")]
pub struct DiscreteChannel {
    rows: Vec<Vec<f64>>,
}

impl DiscreteChannel {
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self> {
        let width = rows.first().map_or(0, Vec::len);
        if rows.is_empty() || width == 0 || rows.iter().any(|r| r.len() != width) {
            return Err(Error::InvalidDistribution(
                "transition matrix must be a non-empty rectangle".into(),
            ));
        }
        for row in &rows {
            validate_probs(row)?;
        }
        Ok(Self { rows })
    }

    pub fn binary_symmetric(p: f64) -> Result<Self> {
        check_unit_interval(p)?;
        Self::new(vec![vec![1.0 - p, p], vec![p, 1.0 - p]])
    }

    /// Symbol 0 passes untouched; symbols 1 and 2 are swapped with probability `p`.
    pub fn ternary(p: f64) -> Result<Self> {
        check_unit_interval(p)?;
        Self::new(vec![
            vec![1.0, 0.0, 0.0],
            vec![0.0, 1.0 - p, p],
            vec![0.0, p, 1.0 - p],
        ])
    }

    pub fn noiseless(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument(
                "noiseless channel needs at least one symbol".into(),
            ));
        }
        Self::new(
            (0..n)
                .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
                .collect(),
        )
    }

    pub fn inputs(&self) -> usize {
        self.rows.len()
    }

    pub fn outputs(&self) -> usize {
        self.rows[0].len()
    }

    pub fn transition(&self, x: usize, y: usize) -> f64 {
        self.rows[x][y]
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }
}

impl TryFrom<Vec<Vec<f64>>> for DiscreteChannel {
    type Error = Error;
    fn try_from(v: Vec<Vec<f64>>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<DiscreteChannel> for Vec<Vec<f64>> {
    fn from(c: DiscreteChannel) -> Self {
        c.rows
    }
}

fn check_unit_interval(p: f64) -> Result<()> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!(
            "probability {p} outside [0, 1]"
        )))
    }
}

pub fn shannon_entropy(p: &Distribution, base: LogBase) -> f64 {
    base.from_nats(entropy_nats(&p.probs))
}

/// Binary entropy function H(p).
pub fn binary_entropy(p: f64, base: LogBase) -> f64 {
    base.from_nats(eta_nats(p) + eta_nats(1.0 - p))
}

pub fn joint_entropy(j: &JointDistribution, base: LogBase) -> f64 {
    base.from_nats(entropy_nats(&j.probs))
}

/// H(B|A) = H(A,B) - H(A).
pub fn conditional_entropy(j: &JointDistribution, base: LogBase) -> f64 {
    joint_entropy(j, base) - shannon_entropy(&j.marginal_a(), base)
}

/// H(B|A) by direct conditional averaging, Σ_a p(a) H(B | A = a).
pub fn conditional_entropy_by_average(j: &JointDistribution, base: LogBase) -> f64 {
    let nats: f64 = j
        .probs
        .chunks(j.cols)
        .map(|row| {
            let pa: f64 = row.iter().sum();
            if pa > 0.0 {
                pa * entropy_nats(&row.iter().map(|x| x / pa).collect::<Vec<_>>())
            } else {
                0.0
            }
        })
        .sum();
    base.from_nats(nats)
}

/// I(A:B) = H(A) + H(B) - H(A,B).
pub fn mutual_information(j: &JointDistribution, base: LogBase) -> f64 {
    let v = shannon_entropy(&j.marginal_a(), base) + shannon_entropy(&j.marginal_b(), base)
        - joint_entropy(j, base);
    v.max(0.0)
}

/// D(p‖q); `+∞` when p puts weight where q has none.
pub fn kl_divergence(p: &Distribution, q: &Distribution, base: LogBase) -> Result<f64> {
    if p.len() != q.len() {
        return Err(Error::DimensionMismatch {
            expected: p.len(),
            got: q.len(),
        });
    }
    Ok(base.from_nats(kl_nats(&p.probs, &q.probs)))
}

pub(crate) fn kl_nats(p: &[f64], q: &[f64]) -> f64 {
    let mut total = 0.0;
    for (&pi, &qi) in p.iter().zip(q) {
        if pi > 0.0 {
            if qi <= 0.0 {
                return f64::INFINITY;
            }
            total += pi * (pi / qi).ln();
        }
    }
    total.max(0.0)
}

/// Posterior over the hidden variable after observing output `observation`
/// of the likelihood channel p(observation | hidden).
pub fn bayes_posterior(
    prior: &Distribution,
    likelihoods: &DiscreteChannel,
    observation: usize,
) -> Result<Distribution> {
    if prior.len() != likelihoods.inputs() {
        return Err(Error::DimensionMismatch {
            expected: likelihoods.inputs(),
            got: prior.len(),
        });
    }
    if observation >= likelihoods.outputs() {
        return Err(Error::InvalidArgument(format!(
            "observation {observation} outside output alphabet"
        )));
    }
    let joint: Vec<f64> = prior
        .probs
        .iter()
        .enumerate()
        .map(|(h, p)| p * likelihoods.transition(h, observation))
        .collect();
    let evidence: f64 = joint.iter().sum();
    if evidence <= 0.0 {
        return Err(Error::ZeroProbability(observation));
    }
    Ok(Distribution {
        probs: joint.iter().map(|x| x / evidence).collect(),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChannelKind {
    BinarySymmetric(f64),
    Ternary(f64),
    Noiseless(usize),
}

impl ChannelKind {
    pub fn channel(self) -> Result<DiscreteChannel> {
        match self {
            ChannelKind::BinarySymmetric(p) => DiscreteChannel::binary_symmetric(p),
            ChannelKind::Ternary(p) => DiscreteChannel::ternary(p),
            ChannelKind::Noiseless(n) => DiscreteChannel::noiseless(n),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Capacity {
    pub capacity: f64,
    pub optimal_input: Distribution,
    pub iterations: usize,
}

/// Closed-form capacities of the binary symmetric, uncertain ternary and
/// noiseless channels.
pub fn channel_capacity_closed(kind: ChannelKind, base: LogBase) -> Result<Capacity> {
    let (nats, input) = match kind {
        ChannelKind::BinarySymmetric(p) => {
            check_unit_interval(p)?;
            (
                std::f64::consts::LN_2 - eta_nats(p) - eta_nats(1.0 - p),
                Distribution::uniform(2)?,
            )
        }
        ChannelKind::Ternary(p) => {
            check_unit_interval(p)?;
            // alpha is the noise entropy in nats; P = e^a/(e^a+2), Q = 1/(e^a+2)
            let alpha = eta_nats(p) + eta_nats(1.0 - p);
            let ea = alpha.exp();
            let big = ea / (ea + 2.0);
            let small = 1.0 / (ea + 2.0);
            (
                (ea + 2.0).ln() - alpha,
                Distribution::new(vec![big, small, 1.0 - big - small])?,
            )
        }
        ChannelKind::Noiseless(n) => {
            if n == 0 {
                return Err(Error::InvalidArgument(
                    "noiseless channel needs at least one symbol".into(),
                ));
            }
            ((n as f64).ln(), Distribution::uniform(n)?)
        }
    };
    Ok(Capacity {
        capacity: base.from_nats(nats),
        optimal_input: input,
        iterations: 0,
    })
}

/// I(X:Y) for input distribution `input` through `channel`.
pub fn channel_mutual_information(
    channel: &DiscreteChannel,
    input: &Distribution,
    base: LogBase,
) -> Result<f64> {
    Ok(mutual_information(
        &JointDistribution::from_channel(input, channel)?,
        base,
    ))
}

/// Numerical capacity by alternating maximization over the input simplex.
///
/// Each sweep yields a lower bound `ln Σ r c` and an upper bound
/// `ln max c`; iteration stops once they are within `tol` (in `base`).
pub fn channel_capacity_numeric(
    channel: &DiscreteChannel,
    tol: f64,
    base: LogBase,
) -> Result<Capacity> {
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument("tolerance must be positive".into()));
    }
    let nx = channel.inputs();
    let ny = channel.outputs();
    let tol_nats = base.to_nats(tol);
    let mut r = vec![1.0 / nx as f64; nx];
    let mut lower = 0.0;
    for iteration in 1..=CAPACITY_MAX_ITERATIONS {
        let q: Vec<f64> = (0..ny)
            .map(|y| (0..nx).map(|x| r[x] * channel.transition(x, y)).sum())
            .collect();
        let c: Vec<f64> = (0..nx)
            .map(|x| {
                let d: f64 = (0..ny)
                    .filter(|&y| channel.transition(x, y) > 0.0)
                    .map(|y| {
                        let p = channel.transition(x, y);
                        p * (p / q[y]).ln()
                    })
                    .sum();
                d.exp()
            })
            .collect();
        let weighted: f64 = r.iter().zip(&c).map(|(a, b)| a * b).sum();
        lower = weighted.ln();
        let upper = c.iter().cloned().fold(f64::MIN, f64::max).ln();
        if upper - lower < tol_nats {
            let input = Distribution::new(r.clone()).or_else(|_| Distribution::from_weights(&r))?;
            let capacity = channel_mutual_information(channel, &input, base)?;
            return Ok(Capacity {
                capacity,
                optimal_input: input,
                iterations: iteration,
            });
        }
        for (rx, cx) in r.iter_mut().zip(&c) {
            *rx *= cx / weighted;
        }
    }
    Err(Error::NonConvergence {
        iterations: CAPACITY_MAX_ITERATIONS,
        best_value: base.from_nats(lower),
        best_input: r,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TypicalBounds {
    /// Prob(A) > 1 - ε.
    pub probability: bool,
    /// |A| > (1 - ε) 2^{n(H - ε)}.
    pub size_lower: bool,
    /// |A| < 2^{n(H + ε)}.
    pub size_upper: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TypicalSet {
    pub n: usize,
    pub eps: f64,
    pub entropy_bits: f64,
    pub members: Vec<Vec<usize>>,
    pub total_prob: f64,
    pub bounds: TypicalBounds,
}

impl TypicalSet {
    pub fn size(&self) -> usize {
        self.members.len()
    }
}

/// Exhaustive ε-typical set of length-`n` sequences of an i.i.d. source.
pub fn typical_set(p: &Distribution, n: usize, eps: f64, cap: u128) -> Result<TypicalSet> {
    if !(eps >= 0.0) {
        return Err(Error::InvalidArgument("eps must be non-negative".into()));
    }
    let k = p.len();
    let count = (k as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
    if count > cap {
        return Err(Error::CapExceeded {
            requested: count,
            cap,
        });
    }
    let h = shannon_entropy(p, LogBase::Bits);
    let slack = 1e-9 * (n.max(1) as f64);
    let lo = -(n as f64) * (h + eps) - slack;
    let hi = -(n as f64) * (h - eps) + slack;
    let log2p: Vec<f64> = p.probs.iter().map(|x| x.log2()).collect();

    let mut members = Vec::new();
    let mut total = 0.0;
    let mut seq = vec![0usize; n];
    for _ in 0..count {
        let lp: f64 = seq.iter().map(|&s| log2p[s]).sum();
        if lp.is_finite() && lp >= lo && lp <= hi {
            members.push(seq.clone());
            total += lp.exp2();
        }
        // odometer increment, last symbol fastest
        for pos in (0..n).rev() {
            seq[pos] += 1;
            if seq[pos] < k {
                break;
            }
            seq[pos] = 0;
        }
    }
    let size = members.len() as f64;
    let nf = n as f64;
    let bounds = TypicalBounds {
        probability: total > 1.0 - eps,
        size_lower: size > (1.0 - eps) * (nf * (h - eps)).exp2(),
        size_upper: size < (nf * (h + eps)).exp2(),
    };
    Ok(TypicalSet {
        n,
        eps,
        entropy_bits: h,
        members,
        total_prob: total,
        bounds,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CodingRow {
    pub block_length: usize,
    pub codewords: usize,
    pub trials: usize,
    pub errors: usize,
    pub error_rate: f64,
    /// Binomial standard error of `error_rate`.
    pub std_error: f64,
}

/// Random-coding Monte-Carlo over a memoryless channel.
///
/// For each block length `n`, every trial draws a fresh codebook of
/// `⌊2^{nR}⌋` words with i.i.d. uniform symbols, sends a uniformly chosen
/// word, and decodes by maximum likelihood over the codebook. Ties go to the
/// lexicographically smallest codeword. Trial `t` of block-length index `i`
/// uses RNG substream `(i << 32) | t`.
pub fn noisy_coding_demo(
    channel: &DiscreteChannel,
    rate: f64,
    block_lengths: &[usize],
    trials: usize,
    seed: u64,
) -> Result<Vec<CodingRow>> {
    if !(rate > 0.0) || block_lengths.contains(&0) {
        return Err(Error::InvalidArgument(
            "rate and block lengths must be positive".into(),
        ));
    }
    block_lengths
        .iter()
        .enumerate()
        .map(|(idx, &n)| {
            let codewords = (n as f64 * rate).exp2().floor().max(1.0);
            if codewords > (1u64 << 24) as f64 {
                return Err(Error::CapExceeded { requested: codewords as u128, cap: 1 << 24 });
            }
            let m = codewords as usize;
            let fits = (channel.inputs() as u128)
                .checked_pow(n as u32)
                .is_none_or(|total| m as u128 <= total);
            if !fits {
                return Err(Error::InvalidArgument(format!(
                    "rate {rate} needs more distinct codewords than the input alphabet allows at n = {n}"
                )));
            }
            let errors = (0..trials)
                .into_par_iter()
                .filter(|&t| {
                    let mut rng = substream(seed, ((idx as u64) << 32) | t as u64);
                    !coding_trial(channel, n, m, &mut rng)
                })
                .count();
            let rate_hat = if trials > 0 { errors as f64 / trials as f64 } else { 0.0 };
            let std_error = if trials > 0 {
                (rate_hat * (1.0 - rate_hat) / trials as f64).sqrt()
            } else {
                0.0
            };
            Ok(CodingRow { block_length: n, codewords: m, trials, errors, error_rate: rate_hat, std_error })
        })
        .collect()
}

/// Draws `m` distinct codewords of length `n` over `nx` symbols, each as a
/// base-`nx` integer (first symbol most significant) when that fits in
/// `u64`, otherwise as explicit symbol vectors.
fn distinct_codebook(
    nx: usize,
    n: usize,
    m: usize,
    rng: &mut crate::random::StreamRng,
) -> Vec<Vec<usize>> {
    use rand::Rng;
    let total = (nx as u64).checked_pow(n as u32);
    match total {
        Some(total) if total <= u32::MAX as u64 => rand::seq::index::sample(rng, total as usize, m)
            .into_iter()
            .map(|mut code| {
                let mut word = vec![0; n];
                for slot in word.iter_mut().rev() {
                    *slot = code % nx;
                    code /= nx;
                }
                word
            })
            .collect(),
        _ => {
            let mut seen = std::collections::HashSet::with_capacity(m);
            let mut book = Vec::with_capacity(m);
            while book.len() < m {
                let word: Vec<usize> = (0..n).map(|_| rng.random_range(0..nx)).collect();
                if seen.insert(word.clone()) {
                    book.push(word);
                }
            }
            book
        }
    }
}

/// One random-code transmission over a codebook of distinct codewords;
/// returns whether decoding recovered the sent codeword.
fn coding_trial(
    channel: &DiscreteChannel,
    n: usize,
    m: usize,
    rng: &mut crate::random::StreamRng,
) -> bool {
    if channel.inputs() == 2 && channel.outputs() == 2 && n <= 64 {
        return binary_coding_trial(channel, n, m, rng);
    }
    use rand::Rng;
    let nx = channel.inputs();
    let log_table: Vec<Vec<f64>> = channel
        .rows
        .iter()
        .map(|row| row.iter().map(|p| p.ln()).collect())
        .collect();
    let codebook: Vec<usize> = distinct_codebook(nx, n, m, rng).concat();
    let word = |i: usize| &codebook[i * n..(i + 1) * n];
    let sent = rng.random_range(0..m);
    let received: Vec<usize> = word(sent)
        .iter()
        .map(|&x| sample_index(&channel.rows[x], rng))
        .collect();
    let score = |w: &[usize]| -> f64 {
        w.iter()
            .zip(&received)
            .map(|(&x, &y)| log_table[x][y])
            .sum()
    };
    let mut best = 0;
    let mut best_score = score(word(0));
    for i in 1..m {
        let s = score(word(i));
        if s > best_score || (s == best_score && word(i) < word(best)) {
            best = i;
            best_score = s;
        }
    }
    best == sent
}

/// Binary-alphabet fast path: words packed into a `u64` with the first
/// symbol in the most significant used bit, so numeric order is
/// lexicographic order.
fn binary_coding_trial(
    channel: &DiscreteChannel,
    n: usize,
    m: usize,
    rng: &mut crate::random::StreamRng,
) -> bool {
    use rand::Rng;
    let mask = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    let codebook: Vec<u64> = if n <= 32 {
        rand::seq::index::sample(rng, 1usize << n, m)
            .into_iter()
            .map(|w| w as u64)
            .collect()
    } else {
        let mut seen = std::collections::HashSet::with_capacity(m);
        let mut book = Vec::with_capacity(m);
        while book.len() < m {
            let w = rng.random::<u64>() & mask;
            if seen.insert(w) {
                book.push(w);
            }
        }
        book
    };
    let sent = rng.random_range(0..m);
    let mut received = 0u64;
    for pos in (0..n).rev() {
        let x = ((codebook[sent] >> pos) & 1) as usize;
        let y = sample_index(&channel.rows[x], rng) as u64;
        received |= y << pos;
    }
    let l = |x: usize, y: usize| channel.transition(x, y).ln();
    let (l00, l01, l10, l11) = (l(0, 0), l(0, 1), l(1, 0), l(1, 1));
    let score = |w: u64| -> f64 {
        let n11 = (w & received).count_ones() as f64;
        let n10 = (w & !received & mask).count_ones() as f64;
        let n01 = (!w & received & mask).count_ones() as f64;
        let n00 = n as f64 - n11 - n10 - n01;
        let term = |count: f64, logp: f64| if count > 0.0 { count * logp } else { 0.0 };
        term(n00, l00) + term(n01, l01) + term(n10, l10) + term(n11, l11)
    };
    let mut best = 0;
    let mut best_score = score(codebook[0]);
    for (i, &w) in codebook.iter().enumerate().skip(1) {
        let s = score(w);
        if s > best_score || (s == best_score && w < codebook[best]) {
            best = i;
            best_score = s;
        }
    }
    best == sent
}
