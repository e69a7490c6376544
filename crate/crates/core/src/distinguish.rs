//! Ensembles of signal states and how well they can be told apart:
//! preparation and Holevo information, an accessible-information search over
//! rank-one POVMs, two-state error probability, Chernoff bound, statistical
//! overlap, and unambiguous discrimination of linearly independent states.

use serde::{Deserialize, Serialize};

use crate::dynamics::{measure_probabilities, Povm, ProjectiveMeasurement};
use crate::error::{Error, Result};
use crate::linalg::{self, c, CMatrix, CVector};
use crate::probability::{
    bayes_posterior, entropy_nats, shannon_entropy, DiscreteChannel, Distribution, LogBase,
};
use crate::random::{ginibre, substream};
use crate::state::{von_neumann_entropy, DensityOperator, StateVector};

/// Weighted collection of signal states {pᵢ, ρᵢ}.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawEnsemble", into = "RawEnsemble")]
pub struct Ensemble {
    probs: Distribution,
    states: Vec<DensityOperator>,
}

impl Ensemble {
    pub fn new(probs: Distribution, states: Vec<DensityOperator>) -> Result<Self> {
        if probs.len() != states.len() || states.is_empty() {
            return Err(Error::DimensionMismatch {
                expected: states.len(),
                got: probs.len(),
            });
        }
        let d = states[0].dim();
        if let Some(bad) = states.iter().find(|s| s.dim() != d) {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: bad.dim(),
            });
        }
        Ok(Self { probs, states })
    }

    pub fn pure(probs: Distribution, states: &[StateVector]) -> Result<Self> {
        Self::new(probs, states.iter().map(StateVector::density).collect())
    }

    /// The eigenstates of ρ weighted by their eigenvalues (zero weights dropped).
    pub fn eigenensemble(rho: &DensityOperator) -> Result<Self> {
        let spec = rho.spectral();
        let mut probs = Vec::new();
        let mut states = Vec::new();
        for (k, &w) in spec.eigenvalues.iter().enumerate() {
            if w > crate::state::EIGEN_CLIP {
                probs.push(w);
                let v = StateVector::from_unnormalized(spec.eigenvector(k), vec![rho.dim()])?;
                states.push(v.density());
            }
        }
        Self::new(Distribution::from_weights(&probs)?, states)
    }

    pub fn probs(&self) -> &Distribution {
        &self.probs
    }

    pub fn states(&self) -> &[DensityOperator] {
        &self.states
    }

    pub fn dim(&self) -> usize {
        self.states[0].dim()
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    /// ρ = Σ pᵢ ρᵢ.
    pub fn average_state(&self) -> DensityOperator {
        DensityOperator::mixture(self.probs.probs(), &self.states)
            .unwrap_or_else(|e| panic!("average of a valid ensemble failed: {e}"))
    }

    /// Likelihood channel p(b | i) = Tr(E_b ρᵢ).
    pub fn outcome_channel(&self, povm: &Povm) -> Result<DiscreteChannel> {
        let rows = self
            .states
            .iter()
            .map(|s| measure_probabilities(s, povm).map(|d| d.probs().to_vec()))
            .collect::<Result<Vec<_>>>()?;
        DiscreteChannel::new(rows)
    }
}

/// χ = S(Σ pᵢρᵢ) − Σ pᵢ S(ρᵢ).
pub fn holevo_chi(e: &Ensemble, base: LogBase) -> f64 {
    let avg = von_neumann_entropy(&e.average_state(), base);
    let parts: f64 = e
        .probs
        .probs()
        .iter()
        .zip(&e.states)
        .map(|(p, s)| p * von_neumann_entropy(s, base))
        .sum();
    (avg - parts).max(0.0)
}

/// I_P = H(p(i)), the information needed to specify which signal was prepared.
pub fn preparation_information(e: &Ensemble, base: LogBase) -> f64 {
    shannon_entropy(&e.probs, base)
}

/// Mutual information between preparation and outcome of `povm`, computed
/// as I_P − H(P|O) from the Bayes posteriors of each outcome.
pub fn measurement_information(e: &Ensemble, povm: &Povm, base: LogBase) -> Result<f64> {
    let likelihoods = e.outcome_channel(povm)?;
    let prior = &e.probs;
    let mut missing_nats = 0.0;
    for b in 0..povm.elements().len() {
        let pb: f64 = prior
            .probs()
            .iter()
            .enumerate()
            .map(|(i, p)| p * likelihoods.transition(i, b))
            .sum();
        if pb <= 0.0 {
            continue;
        }
        let posterior = bayes_posterior(prior, &likelihoods, b)?;
        missing_nats += pb * entropy_nats(posterior.probs());
    }
    let ip = preparation_information(e, LogBase::Nats);
    Ok(base.from_nats((ip - missing_nats).max(0.0)))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchConfig {
    pub restarts: usize,
    pub seed: u64,
    /// Ascent steps per start before the run is declared exhausted.
    pub max_steps: usize,
    /// Largest POVM size tried; defaults to D².
    pub max_outcomes: Option<usize>,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self {
            restarts: 8,
            seed: 0,
            max_steps: 400,
            max_outcomes: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct AccessibleInformation {
    /// Best mutual information found; a lower bound on J.
    pub lower_bound: f64,
    pub povm: Povm,
    pub holevo: f64,
    /// Some start ran out of its step budget before its step size collapsed.
    pub approximate: bool,
}

/// Builds a rank-one POVM from unconstrained vectors vᵦ by restoring
/// completeness: wᵦ = G^{-1/2} vᵦ with G = Σ vᵦ vᵦ†.
fn povm_from_params(params: &[f64], d: usize, n: usize) -> Option<Povm> {
    let vs: Vec<CVector> = (0..n)
        .map(|b| {
            CVector::from_fn(d, |i, _| {
                c(params[2 * (b * d + i)], params[2 * (b * d + i) + 1])
            })
        })
        .collect();
    let g = vs
        .iter()
        .fold(CMatrix::zeros(d, d), |acc, v| acc + linalg::projector(v));
    let (vals, _) = linalg::hermitian_eigen(&g);
    if vals[d - 1] <= 1e-10 * vals[0].max(1e-300) {
        return None;
    }
    let inv_sqrt = linalg::hermitian_fn(&g, |x| 1.0 / x.sqrt());
    let elements = vs
        .iter()
        .map(|v| linalg::projector(&(&inv_sqrt * v)))
        .collect::<Vec<_>>();
    Povm::new(elements).ok()
}

fn params_from_vectors(vs: &[CVector]) -> Vec<f64> {
    vs.iter()
        .flat_map(|v| v.iter().flat_map(|z| [z.re, z.im]))
        .collect()
}

/// Multi-start local ascent over rank-one POVMs with D ≤ N ≤ D² outcomes.
///
/// Starts include the eigenbasis of the average state and the
/// square-root ("pretty good") measurement, plus `restarts` random starts per
/// outcome count. The result never exceeds χ; a violation is reported as an
/// internal error since it would indicate a broken objective.
pub fn accessible_information_search(
    e: &Ensemble,
    config: &SearchConfig,
    base: LogBase,
) -> Result<AccessibleInformation> {
    let d = e.dim();
    if d > 4 {
        return Err(Error::InvalidArgument(format!(
            "search supports dimension ≤ 4, got {d}"
        )));
    }
    let holevo = holevo_chi(e, base);
    let objective = |params: &[f64], n: usize| -> f64 {
        povm_from_params(params, d, n)
            .and_then(|p| measurement_information(e, &p, LogBase::Nats).ok())
            .unwrap_or(f64::NEG_INFINITY)
    };

    let mut starts: Vec<(usize, Vec<f64>)> = Vec::new();
    let avg = e.average_state();
    let spec = avg.spectral();
    let eig: Vec<CVector> = (0..d).map(|k| spec.eigenvector(k)).collect();
    starts.push((d, params_from_vectors(&eig)));
    // square-root measurement vectors ρ^{-1/2} √pᵢ |ψᵢ⟩ from the top eigenvector of each signal
    if e.len() >= d && e.len() <= d * d {
        let sr: Vec<CVector> = e
            .states
            .iter()
            .zip(e.probs.probs())
            .map(|(s, p)| s.spectral().eigenvector(0).scale(p.sqrt()))
            .collect();
        starts.push((e.len(), params_from_vectors(&sr)));
    }
    let max_n = config.max_outcomes.unwrap_or(d * d).clamp(d, d * d);
    for n in d..=max_n {
        for r in 0..config.restarts {
            let mut rng = substream(config.seed, ((n as u64) << 32) | r as u64);
            let g = ginibre(d, n, &mut rng);
            let vs: Vec<CVector> = g.column_iter().map(|col| col.into_owned()).collect();
            starts.push((n, params_from_vectors(&vs)));
        }
    }

    let mut best: Option<(f64, usize, Vec<f64>)> = None;
    let mut approximate = false;
    for (n, x0) in starts {
        let (value, x, exhausted) = ascend(|x| objective(x, n), x0, config.max_steps);
        approximate |= exhausted;
        if best.as_ref().is_none_or(|(bv, _, _)| value > *bv) {
            best = Some((value, n, x));
        }
    }
    let (value, n, x) = best.ok_or_else(|| Error::Internal("no search starts".into()))?;
    let povm =
        povm_from_params(&x, d, n).ok_or_else(|| Error::Internal("degenerate optimum".into()))?;
    let lower_bound = base.from_nats(value.max(0.0));
    if lower_bound > holevo + 1e-9 {
        return Err(Error::Internal(format!(
            "measured information {lower_bound} exceeds Holevo bound {holevo}"
        )));
    }
    Ok(AccessibleInformation {
        lower_bound,
        povm,
        holevo,
        approximate,
    })
}

/// Adaptive-step gradient ascent with central finite differences. Returns
/// the best value, its point, and whether the step budget ran out.
fn ascend(f: impl Fn(&[f64]) -> f64, mut x: Vec<f64>, max_steps: usize) -> (f64, Vec<f64>, bool) {
    let mut fx = f(&x);
    let mut step = 0.1;
    let h = 1e-6;
    for _ in 0..max_steps {
        let mut grad = vec![0.0; x.len()];
        let mut probe = x.clone();
        for k in 0..x.len() {
            probe[k] = x[k] + h;
            let up = f(&probe);
            probe[k] = x[k] - h;
            let down = f(&probe);
            probe[k] = x[k];
            grad[k] = if up.is_finite() && down.is_finite() {
                (up - down) / (2.0 * h)
            } else {
                0.0
            };
        }
        let norm = grad.iter().map(|g| g * g).sum::<f64>().sqrt();
        if norm < 1e-12 {
            return (fx, x, false);
        }
        loop {
            let candidate: Vec<f64> = x
                .iter()
                .zip(&grad)
                .map(|(xi, gi)| xi + step * gi / norm)
                .collect();
            let fc = f(&candidate);
            if fc > fx {
                x = candidate;
                fx = fc;
                step *= 1.5;
                break;
            }
            step *= 0.5;
            if step < 1e-10 {
                return (fx, x, false);
            }
        }
    }
    (fx, x, true)
}

/// Two hypotheses ρ0, ρ1 with prior probabilities π0, π1.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiscriminationProblem {
    pub priors: Distribution,
    pub states: [DensityOperator; 2],
}

impl DiscriminationProblem {
    pub fn new(priors: Distribution, states: [DensityOperator; 2]) -> Result<Self> {
        if priors.len() != 2 {
            return Err(Error::DimensionMismatch {
                expected: 2,
                got: priors.len(),
            });
        }
        if states[0].dim() != states[1].dim() {
            return Err(Error::DimensionMismatch {
                expected: states[0].dim(),
                got: states[1].dim(),
            });
        }
        Ok(Self { priors, states })
    }
}

/// Minimum error probability ½(1 − ‖π0ρ0 − π1ρ1‖₁) (Helstrom).
pub fn error_probability(p: &DiscriminationProblem) -> f64 {
    let pi = p.priors.probs();
    let diff = p.states[0].matrix().scale(pi[0]) - p.states[1].matrix().scale(pi[1]);
    (0.5 * (1.0 - linalg::trace_norm_hermitian(&diff))).clamp(0.0, 0.5)
}

/// The projective measurement attaining [`error_probability`]: projector onto
/// the non-negative eigenspace of π0ρ0 − π1ρ1 (guess 0) and its complement.
pub fn helstrom_measurement(p: &DiscriminationProblem) -> Result<ProjectiveMeasurement> {
    let pi = p.priors.probs();
    let diff = p.states[0].matrix().scale(pi[0]) - p.states[1].matrix().scale(pi[1]);
    let (vals, vecs) = linalg::hermitian_eigen(&diff);
    let d = vals.len();
    let mut p0 = CMatrix::zeros(d, d);
    for (k, v) in vals.iter().enumerate() {
        if *v >= 0.0 {
            p0 += linalg::projector(&vecs.column(k).into_owned());
        }
    }
    let p1 = linalg::identity(d) - &p0;
    ProjectiveMeasurement::new(vec![p0, p1])
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ChernoffBound {
    pub lambda: f64,
    pub alpha: f64,
}

fn chernoff_sum(p0: &[f64], p1: &[f64], alpha: f64) -> f64 {
    p0.iter()
        .zip(p1)
        .map(|(&a, &b)| {
            if alpha <= 0.0 {
                if a > 0.0 {
                    b
                } else {
                    0.0
                }
            } else if alpha >= 1.0 {
                if b > 0.0 {
                    a
                } else {
                    0.0
                }
            } else if a > 0.0 && b > 0.0 {
                a.powf(alpha) * b.powf(1.0 - alpha)
            } else {
                0.0
            }
        })
        .sum()
}

/// λ = min over α ∈ [0, 1] of Σ p0^α p1^{1−α}. The sum is log-convex in α,
/// so golden-section search on the interior plus the endpoints suffices.
pub fn chernoff_bound(p0: &Distribution, p1: &Distribution) -> Result<ChernoffBound> {
    if p0.len() != p1.len() {
        return Err(Error::DimensionMismatch {
            expected: p0.len(),
            got: p1.len(),
        });
    }
    let f = |a: f64| chernoff_sum(p0.probs(), p1.probs(), a);
    let ratio = (5f64.sqrt() - 1.0) / 2.0;
    let (mut lo, mut hi) = (0.0, 1.0);
    let mut x1 = hi - ratio * (hi - lo);
    let mut x2 = lo + ratio * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    while hi - lo > 1e-10 {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - ratio * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + ratio * (hi - lo);
            f2 = f(x2);
        }
    }
    let mid = 0.5 * (lo + hi);
    let mut best = ChernoffBound {
        lambda: f(mid),
        alpha: mid,
    };
    for a in [0.0, 1.0] {
        let v = f(a);
        if v < best.lambda {
            best = ChernoffBound {
                lambda: v,
                alpha: a,
            };
        }
    }
    Ok(best)
}

/// Statistical overlap Σ √(p0 p1) (Bhattacharyya coefficient).
pub fn classical_overlap(p0: &Distribution, p1: &Distribution) -> Result<f64> {
    if p0.len() != p1.len() {
        return Err(Error::DimensionMismatch {
            expected: p0.len(),
            got: p1.len(),
        });
    }
    Ok(p0
        .probs()
        .iter()
        .zip(p1.probs())
        .map(|(a, b)| (a * b).sqrt())
        .sum::<f64>()
        .min(1.0))
}

#[derive(Clone, Debug, PartialEq)]
pub struct UnambiguousMeasurement {
    /// Eⱼ = cⱼ |φⱼ⟩⟨φⱼ| with φⱼ orthogonal to every ψₖ, k ≠ j.
    pub elements: Vec<CMatrix>,
    /// Inconclusive element E₀ = I − Σ Eⱼ.
    pub inconclusive: CMatrix,
    pub scales: Vec<f64>,
    /// Tr(Eⱼ |ψⱼ⟩⟨ψⱼ|).
    pub success_probs: Vec<f64>,
    /// Σ pⱼ success_probs[j].
    pub average_success: f64,
    /// Smallest eigenvalue of I − Σ |φⱼ⟩⟨φⱼ| (all scales 1); negative when
    /// the unscaled construction is not a POVM.
    pub unscaled_min_eigenvalue: f64,
    /// Largest |Tr(Eⱼ |ψₖ⟩⟨ψₖ|)| over j ≠ k.
    pub max_cross_talk: f64,
}

/// Zero-error discrimination of linearly independent pure states.
///
/// The scales cⱼ maximize Σ pⱼ cⱼ |⟨φⱼ|ψⱼ⟩|² subject to E₀ ⪰ 0. The
/// objective is homogeneous in the scale direction, so the search runs over
/// directions with the feasible magnitude set by the largest eigenvalue of
/// Σ wⱼ|φⱼ⟩⟨φⱼ|. When the equal-success direction is optimal to 1e-12 it is
/// preferred.
pub fn unambiguous_discriminator(
    states: &[StateVector],
    priors: &Distribution,
) -> Result<UnambiguousMeasurement> {
    let n = states.len();
    if n == 0 || priors.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: priors.len(),
        });
    }
    let d = states[0].dim();
    if states.iter().any(|s| s.dim() != d) || n > d {
        return Err(Error::LinearlyDependent(0.0));
    }
    let s_mat = CMatrix::from_columns(&states.iter().map(|s| s.amps().clone()).collect::<Vec<_>>());
    let gram = s_mat.adjoint() * &s_mat;
    let det = gram.determinant().norm();
    if det <= 1e-10 {
        return Err(Error::LinearlyDependent(det));
    }
    let gram_inv = gram.try_inverse().ok_or(Error::LinearlyDependent(det))?;
    // reciprocal vectors: ⟨φⱼ|ψₖ⟩ ∝ δⱼₖ
    let dual = &s_mat * gram_inv;
    let phis: Vec<CVector> = dual
        .column_iter()
        .map(|col| {
            let v = col.into_owned();
            let norm = v.norm();
            v.unscale(norm)
        })
        .collect();
    let projectors: Vec<CMatrix> = phis.iter().map(linalg::projector).collect();
    let hits: Vec<f64> = phis
        .iter()
        .zip(states)
        .map(|(phi, s)| phi.dotc(s.amps()).norm_sqr())
        .collect();
    let weights = priors.probs();

    let lambda_max = |w: &[f64]| -> f64 {
        let m = projectors
            .iter()
            .zip(w)
            .fold(CMatrix::zeros(d, d), |acc, (p, wi)| acc + p.scale(*wi));
        linalg::hermitian_eigenvalues(&m)[0]
    };
    let value = |logw: &[f64]| -> f64 {
        let w: Vec<f64> = logw.iter().map(|x| x.exp()).collect();
        let num: f64 = (0..n).map(|k| weights[k] * w[k] * hits[k]).sum();
        num / lambda_max(&w)
    };

    let equal: Vec<f64> = hits.iter().map(|h| -h.ln()).collect();
    let mut x = equal.clone();
    let mut fx = value(&x);
    for _sweep in 0..200 {
        let before = fx;
        for k in 0..n {
            let (best_t, best_v) = golden_max(
                |t| {
                    let mut y = x.clone();
                    y[k] = t;
                    value(&y)
                },
                x[k] - 8.0,
                x[k] + 8.0,
            );
            if best_v > fx {
                x[k] = best_t;
                fx = best_v;
            }
        }
        if fx - before < 1e-14 {
            break;
        }
    }
    let equal_value = value(&equal);
    if equal_value >= fx - 1e-12 {
        x = equal;
    }

    let w: Vec<f64> = x.iter().map(|v| v.exp()).collect();
    let lm = lambda_max(&w);
    let scales: Vec<f64> = w.iter().map(|wi| wi / lm).collect();
    let elements: Vec<CMatrix> = projectors
        .iter()
        .zip(&scales)
        .map(|(p, s)| p.scale(*s))
        .collect();
    let total = elements.iter().fold(CMatrix::zeros(d, d), |acc, e| acc + e);
    let inconclusive = linalg::identity(d) - total;
    let success_probs: Vec<f64> = scales.iter().zip(&hits).map(|(s, h)| s * h).collect();
    let average_success = success_probs.iter().zip(weights).map(|(s, p)| s * p).sum();
    let unscaled = projectors
        .iter()
        .fold(linalg::identity(d), |acc, p| acc - p);
    let unscaled_min_eigenvalue = *linalg::hermitian_eigenvalues(&unscaled)
        .last()
        .unwrap_or(&0.0);
    let mut max_cross_talk: f64 = 0.0;
    for (j, e) in elements.iter().enumerate() {
        for (k, s) in states.iter().enumerate() {
            if j != k {
                let v = s.amps().dotc(&(e * s.amps())).norm();
                max_cross_talk = max_cross_talk.max(v);
            }
        }
    }
    Ok(UnambiguousMeasurement {
        elements,
        inconclusive,
        scales,
        success_probs,
        average_success,
        unscaled_min_eigenvalue,
        max_cross_talk,
    })
}

fn golden_max(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> (f64, f64) {
    let ratio = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - ratio * (hi - lo);
    let mut x2 = lo + ratio * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    while hi - lo > 1e-9 {
        if f1 >= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - ratio * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + ratio * (hi - lo);
            f2 = f(x2);
        }
    }
    let mid = 0.5 * (lo + hi);
    (mid, f(mid))
}

/// A unitary cloner U|ψ⟩|0⟩ = |ψ⟩|ψ⟩ for both states would force
/// ⟨ψ1|ψ2⟩ = ⟨ψ1|ψ2⟩². Returns |s| − |s|² for s = ⟨ψ1|ψ2⟩, which vanishes
/// only when the states are orthogonal or identical up to phase.
pub fn cloning_obstruction(psi1: &StateVector, psi2: &StateVector) -> Result<f64> {
    let s = psi1.inner(psi2)?.norm();
    Ok(s - s * s)
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum RawSignal {
    Pure(StateVector),
    Mixed(DensityOperator),
}

#[derive(Serialize, Deserialize)]
struct RawEnsemble {
    probs: Distribution,
    states: Vec<RawSignal>,
}

impl TryFrom<RawEnsemble> for Ensemble {
    type Error = Error;
    fn try_from(raw: RawEnsemble) -> Result<Self> {
        let states = raw
            .states
            .into_iter()
            .map(|s| match s {
                RawSignal::Pure(v) => v.density(),
                RawSignal::Mixed(m) => m,
            })
            .collect();
        Ensemble::new(raw.probs, states)
    }
}

impl From<Ensemble> for RawEnsemble {
    fn from(e: Ensemble) -> Self {
        RawEnsemble {
            probs: e.probs,
            states: e.states.into_iter().map(RawSignal::Mixed).collect(),
        }
    }
}
