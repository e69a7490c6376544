//! Seeded randomness: per-index substreams and random quantum objects for
//! property testing and Monte-Carlo protocols.
//!
//! Every stochastic routine derives its generator from `(seed, index)` with
//! [`substream`], so results do not depend on evaluation order or thread
//! scheduling.

use nalgebra::DMatrix;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;

use crate::dynamics::KrausChannel;
use crate::linalg::{c, CMatrix, CVector};
use crate::state::{DensityOperator, StateVector};

pub type StreamRng = ChaCha20Rng;

/// Generator for stream `index` under master `seed`.
pub fn substream(seed: u64, index: u64) -> StreamRng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Samples an index from `probs` by inverse CDF with a single uniform draw.
pub fn sample_index<R: Rng + ?Sized>(probs: &[f64], rng: &mut R) -> usize {
    let u: f64 = rng.random();
    let total: f64 = probs.iter().sum();
    let mut acc = 0.0;
    for (k, p) in probs.iter().enumerate() {
        acc += p / total;
        if u < acc {
            return k;
        }
    }
    // rounding left u above the final partial sum
    probs.iter().rposition(|&p| p > 0.0).unwrap_or(0)
}

fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    rng.sample(StandardNormal)
}

pub fn ginibre<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> CMatrix {
    DMatrix::from_fn(rows, cols, |_, _| c(gaussian(rng), gaussian(rng)))
}

/// Haar-random unitary: QR of a complex Gaussian matrix with the phases of
/// R's diagonal folded back into Q.
pub fn haar_unitary<R: Rng + ?Sized>(d: usize, rng: &mut R) -> CMatrix {
    let qr = ginibre(d, d, rng).qr();
    let q = qr.q();
    let r = qr.r();
    let mut out = q.clone();
    for k in 0..d {
        let z = r[(k, k)];
        let phase = if z.norm() > 0.0 {
            z / z.norm()
        } else {
            c(1.0, 0.0)
        };
        for i in 0..d {
            out[(i, k)] = q[(i, k)] * phase;
        }
    }
    out
}

pub fn random_state_vector<R: Rng + ?Sized>(dims: &[usize], rng: &mut R) -> StateVector {
    let d: usize = dims.iter().product();
    let v = CVector::from_fn(d, |_, _| c(gaussian(rng), gaussian(rng)));
    StateVector::from_unnormalized(v, dims.to_vec())
        .unwrap_or_else(|e| panic!("random state construction failed: {e}"))
}

/// Random density operator of the given rank (induced measure from a
/// Ginibre matrix).
pub fn random_density<R: Rng + ?Sized>(
    dims: &[usize],
    rank: usize,
    rng: &mut R,
) -> DensityOperator {
    let d: usize = dims.iter().product();
    let g = ginibre(d, rank.max(1), rng);
    let m = &g * g.adjoint();
    let tr = crate::linalg::trace(&m).re;
    DensityOperator::new(m / c(tr, 0.0), dims.to_vec())
        .unwrap_or_else(|e| panic!("random density construction failed: {e}"))
}

/// Random CPTP map with `k` Kraus operators on dimension `d`, cut from a
/// Haar-random isometry.
pub fn random_channel<R: Rng + ?Sized>(d: usize, k: usize, rng: &mut R) -> KrausChannel {
    let u = haar_unitary(d * k, rng);
    let ops = (0..k)
        .map(|j| u.view((j * d, 0), (d, d)).into_owned())
        .collect();
    KrausChannel::new(ops).unwrap_or_else(|e| panic!("random channel construction failed: {e}"))
}

/// Random point on the probability simplex.
pub fn random_simplex<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<f64> {
    let raw: Vec<f64> = (0..n).map(|_| -(1.0 - rng.random::<f64>()).ln()).collect();
    let s: f64 = raw.iter().sum();
    raw.iter().map(|x| x / s).collect()
}
