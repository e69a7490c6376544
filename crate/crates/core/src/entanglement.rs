//! Bell-basis algebra, pure-state entanglement, Werner states, twirling,
//! CHSH correlations, and the unilateral/bilateral pair operations.

use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dynamics::ProjectiveMeasurement;
use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, C64};
use crate::probability::{entropy_nats, LogBase};
use crate::random::substream;
use crate::state::{schmidt_decompose, DensityOperator, StateVector, PHASE_TOLERANCE};

/// Bell-state label. The amplitude bit is 0 for the Ψ states and 1 for the
/// Φ states; the phase bit is 0 for + and 1 for −.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub struct BellLabel {
    pub amplitude: u8,
    pub phase: u8,
}

impl BellLabel {
    pub const PHI_PLUS: Self = Self {
        amplitude: 1,
        phase: 0,
    };
    pub const PSI_PLUS: Self = Self {
        amplitude: 0,
        phase: 0,
    };
    pub const PHI_MINUS: Self = Self {
        amplitude: 1,
        phase: 1,
    };
    pub const PSI_MINUS: Self = Self {
        amplitude: 0,
        phase: 1,
    };
    pub const ALL: [Self; 4] = [
        Self::PHI_PLUS,
        Self::PSI_PLUS,
        Self::PHI_MINUS,
        Self::PSI_MINUS,
    ];

    pub fn new(amplitude: u8, phase: u8) -> Result<Self> {
        if amplitude > 1 || phase > 1 {
            return Err(Error::InvalidArgument(format!(
                "bits must be 0 or 1, got ({amplitude}, {phase})"
            )));
        }
        Ok(Self { amplitude, phase })
    }

    /// Position in [`BellLabel::ALL`].
    pub fn index(self) -> usize {
        2 * self.phase as usize + (1 - self.amplitude as usize)
    }

    pub fn from_index(i: usize) -> Self {
        Self::ALL[i % 4]
    }

    pub fn is_phi(self) -> bool {
        self.amplitude == 1
    }

    pub fn name(self) -> &'static str {
        match (self.amplitude, self.phase) {
            (1, 0) => "phi_plus",
            (0, 0) => "psi_plus",
            (1, _) => "phi_minus",
            _ => "psi_minus",
        }
    }
}

impl fmt::Display for BellLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for BellLabel {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|l| l.name() == s.to_ascii_lowercase().replace('-', "_"))
            .ok_or_else(|| Error::InvalidArgument(format!("unknown Bell label '{s}'")))
    }
}

impl From<BellLabel> for String {
    fn from(l: BellLabel) -> Self {
        l.name().to_string()
    }
}

impl TryFrom<String> for BellLabel {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

/// Φ± = (|00⟩ ± |11⟩)/√2, Ψ± = (|01⟩ ± |10⟩)/√2.
pub fn bell_state(label: BellLabel) -> StateVector {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let sign = if label.phase == 0 { 1.0 } else { -1.0 };
    let mut amps = [C64::default(); 4];
    if label.is_phi() {
        amps[0] = C64::new(h, 0.0);
        amps[3] = C64::new(sign * h, 0.0);
    } else {
        amps[1] = C64::new(h, 0.0);
        amps[2] = C64::new(sign * h, 0.0);
    }
    StateVector::from_amplitudes(&amps)
        .and_then(|s| s.with_dims(vec![2, 2]))
        .unwrap_or_else(|e| panic!("Bell state construction failed: {e}"))
}

/// The Bell label a two-qubit pure state equals up to global phase, if any.
pub fn classify_bell(psi: &StateVector) -> Option<BellLabel> {
    if psi.dim() != 4 {
        return None;
    }
    BellLabel::ALL.into_iter().find(|&l| {
        psi.inner(&bell_state(l))
            .map(|z| z.norm_sqr() > 1.0 - PHASE_TOLERANCE)
            .unwrap_or(false)
    })
}

/// Populations ⟨β|ρ|β⟩ in [`BellLabel::ALL`] order.
pub fn bell_weights(rho: &DensityOperator) -> Result<[f64; 4]> {
    if rho.dim() != 4 {
        return Err(Error::DimensionMismatch {
            expected: 4,
            got: rho.dim(),
        });
    }
    let mut w = [0.0; 4];
    for l in BellLabel::ALL {
        w[l.index()] = rho.expectation_pure(&bell_state(l))?;
    }
    Ok(w)
}

/// E(|Ψ⟩) = H(λᵢ), the Shannon entropy of the Schmidt weights.
pub fn entanglement_entropy(
    psi: &StateVector,
    split: (usize, usize),
    base: LogBase,
) -> Result<f64> {
    let form = schmidt_decompose(psi, split)?;
    Ok(base.from_nats(entropy_nats(&form.weights())))
}

/// Product state test: a single Schmidt coefficient above 1e-9.
pub fn is_separable_pure(psi: &StateVector, split: (usize, usize)) -> Result<bool> {
    let form = schmidt_decompose(psi, split)?;
    Ok(form.coefficients.iter().filter(|&&s| s > 1e-9).count() == 1)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub const ALL: [Axis; 3] = [Axis::X, Axis::Y, Axis::Z];

    fn index(self) -> usize {
        self as usize
    }

    pub fn pauli(self) -> CMatrix {
        match self {
            Axis::X => linalg::pauli_x(),
            Axis::Y => linalg::pauli_y(),
            Axis::Z => linalg::pauli_z(),
        }
    }
}

/// Bilateral rotations use this fixed angle.
pub const BILATERAL_ANGLE: f64 = std::f64::consts::FRAC_PI_2;

/// Operations on Bell pairs. Pair `p` occupies qubits 2p (Alice) and 2p + 1 (Bob).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "op")]
pub enum PairOp {
    /// σ on Alice's qubit only.
    Unilateral { axis: Axis, pair: usize },
    /// R(π/2) ⊗ R(π/2) about the same axis on both qubits.
    Bilateral { axis: Axis, pair: usize },
    /// CNOT from each qubit of `source` to the matching qubit of `target`.
    BilateralCnot { source: usize, target: usize },
}

impl PairOp {
    /// The op's unitary on a register of `pairs` Bell pairs.
    pub fn unitary(self, pairs: usize) -> Result<CMatrix> {
        let n = 2 * pairs;
        let check = |p: usize| {
            if p < pairs {
                Ok(())
            } else {
                Err(Error::DimensionMismatch {
                    expected: pairs,
                    got: p + 1,
                })
            }
        };
        match self {
            PairOp::Unilateral { axis, pair } => {
                check(pair)?;
                Ok(linalg::on_qubit(n, 2 * pair, &axis.pauli()))
            }
            PairOp::Bilateral { axis, pair } => {
                check(pair)?;
                let r = linalg::rotation(axis.index(), BILATERAL_ANGLE);
                Ok(linalg::on_qubit(n, 2 * pair, &r) * linalg::on_qubit(n, 2 * pair + 1, &r))
            }
            PairOp::BilateralCnot { source, target } => {
                check(source)?;
                check(target)?;
                if source == target {
                    return Err(Error::InvalidArgument(
                        "source and target pair coincide".into(),
                    ));
                }
                Ok(linalg::cnot(n, 2 * source, 2 * target)
                    * linalg::cnot(n, 2 * source + 1, 2 * target + 1))
            }
        }
    }
}

fn pair_count(dim: usize) -> Result<usize> {
    match dim {
        4 => Ok(1),
        16 => Ok(2),
        d => Err(Error::DimensionMismatch {
            expected: 4,
            got: d,
        }),
    }
}

pub fn apply_pair_op(rho: &DensityOperator, op: PairOp) -> Result<DensityOperator> {
    rho.evolve(&op.unitary(pair_count(rho.dim())?)?)
}

pub fn apply_pair_op_pure(psi: &StateVector, op: PairOp) -> Result<StateVector> {
    psi.evolve(&op.unitary(pair_count(psi.dim())?)?)
}

/// W_F = F |Φ⁺⟩⟨Φ⁺| + (1 − F)/3 (remaining Bell projectors).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WernerState {
    pub fidelity: f64,
}

impl WernerState {
    pub fn new(fidelity: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&fidelity) {
            return Err(Error::InvalidArgument(format!(
                "Werner fidelity {fidelity} outside [0, 1]"
            )));
        }
        Ok(Self { fidelity })
    }

    /// Bell populations in [`BellLabel::ALL`] order.
    pub fn bell_weights(self) -> [f64; 4] {
        let r = (1.0 - self.fidelity) / 3.0;
        let mut w = [r; 4];
        w[BellLabel::PHI_PLUS.index()] = self.fidelity;
        w
    }

    pub fn density(self) -> DensityOperator {
        bell_diagonal(self.bell_weights())
    }
}

pub fn werner_density(fidelity: f64) -> Result<DensityOperator> {
    Ok(WernerState::new(fidelity)?.density())
}

/// ⟨Φ⁺|ρ|Φ⁺⟩.
pub fn fidelity_to_phi_plus(rho: &DensityOperator) -> Result<f64> {
    if rho.dim() != 4 {
        return Err(Error::DimensionMismatch {
            expected: 4,
            got: rho.dim(),
        });
    }
    rho.expectation_pure(&bell_state(BellLabel::PHI_PLUS))
}

fn bell_diagonal(weights: [f64; 4]) -> DensityOperator {
    let m = BellLabel::ALL.iter().fold(CMatrix::zeros(4, 4), |acc, l| {
        acc + bell_state(*l).density().matrix().scale(weights[l.index()])
    });
    DensityOperator::from_trusted(m, vec![2, 2])
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "mode")]
pub enum TwirlMode {
    /// Projection onto Werner form with the input's Φ⁺ population.
    Exact,
    /// Average over `samples` random elements of the group generated by the
    /// bilateral π/2 rotations, conjugated by a unilateral σy so that Φ⁺ is
    /// the invariant state.
    MonteCarlo { seed: u64, samples: usize },
}

/// The 24 single-qubit rotations generated by R_x(π/2) and R_y(π/2), modulo
/// global phase.
pub fn bilateral_rotation_group() -> &'static [CMatrix] {
    static GROUP: OnceLock<Vec<CMatrix>> = OnceLock::new();
    GROUP.get_or_init(|| {
        let gens = [
            linalg::rotation(0, BILATERAL_ANGLE),
            linalg::rotation(1, BILATERAL_ANGLE),
        ];
        let same_up_to_phase = |a: &CMatrix, b: &CMatrix| {
            let overlap = linalg::trace(&(a.adjoint() * b)).norm();
            (overlap - 2.0).abs() < 1e-9
        };
        let mut group = vec![linalg::identity(2)];
        let mut frontier = group.clone();
        while !frontier.is_empty() {
            let mut next = Vec::new();
            for g in &frontier {
                for h in &gens {
                    let candidate = h * g;
                    if !group.iter().any(|x| same_up_to_phase(x, &candidate)) {
                        group.push(candidate.clone());
                        next.push(candidate);
                    }
                }
            }
            frontier = next;
        }
        group
    })
}

pub fn twirl(rho: &DensityOperator, mode: TwirlMode) -> Result<DensityOperator> {
    if rho.dim() != 4 {
        return Err(Error::DimensionMismatch {
            expected: 4,
            got: rho.dim(),
        });
    }
    match mode {
        TwirlMode::Exact => {
            Ok(WernerState::new(fidelity_to_phi_plus(rho)?.clamp(0.0, 1.0))?.density())
        }
        TwirlMode::MonteCarlo { seed, samples } => {
            if samples == 0 {
                return Err(Error::InvalidArgument(
                    "twirl needs at least one sample".into(),
                ));
            }
            let group = bilateral_rotation_group();
            const CHUNK: usize = 4096;
            let chunks = samples.div_ceil(CHUNK);
            let counts = (0..chunks)
                .into_par_iter()
                .map(|c| {
                    let mut rng = substream(seed, c as u64);
                    let mut counts = vec![0usize; group.len()];
                    for _ in 0..CHUNK.min(samples - c * CHUNK) {
                        counts[rng.random_range(0..group.len())] += 1;
                    }
                    counts
                })
                .reduce(
                    || vec![0usize; group.len()],
                    |mut a, b| {
                        a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                        a
                    },
                );
            let flip = linalg::on_qubit(2, 0, &linalg::pauli_y());
            let conj = flip.adjoint() * rho.matrix() * &flip;
            let mut acc = CMatrix::zeros(4, 4);
            for (u, &k) in group.iter().zip(&counts) {
                if k > 0 {
                    let uu = linalg::kron(u, u);
                    acc += (&uu * &conj * uu.adjoint()).scale(k as f64);
                }
            }
            let out = &flip * acc.unscale(samples as f64) * flip.adjoint();
            Ok(DensityOperator::from_trusted(
                linalg::hermitian_part(&out),
                vec![2, 2],
            ))
        }
    }
}

/// Two measurement axes per party; index 0 and 1 here play the roles of the
/// E91 bases 0 and 2.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChshSetting {
    pub alice: [[f64; 3]; 2],
    pub bob: [[f64; 3]; 2],
}

impl ChshSetting {
    pub fn new(alice: [[f64; 3]; 2], bob: [[f64; 3]; 2]) -> Result<Self> {
        let s = Self { alice, bob };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        for v in self.alice.iter().chain(&self.bob) {
            let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            if (norm - 1.0).abs() > 1e-9 {
                return Err(Error::InvalidArgument(format!(
                    "axis {v:?} is not a unit vector"
                )));
            }
        }
        Ok(())
    }

    /// The outer bases of the E91 configuration (Alice 0 and 2, Bob 0 and 2).
    pub fn e91() -> Self {
        let a = e91_alice_axes();
        let b = e91_bob_axes();
        Self {
            alice: [a[0], a[2]],
            bob: [b[0], b[2]],
        }
    }
}

/// Alice's three E91 axes in the x-z plane, at 0, π/4 and π/2 from z.
pub fn e91_alice_axes() -> [[f64; 3]; 3] {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    [[0.0, 0.0, 1.0], [h, 0.0, h], [1.0, 0.0, 0.0]]
}

/// Bob's three E91 axes at π/4, π/2 and 3π/4 from z.
pub fn e91_bob_axes() -> [[f64; 3]; 3] {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    [[h, 0.0, h], [1.0, 0.0, 0.0], [h, 0.0, -h]]
}

/// E(a, b) = P₊₊ + P₋₋ − P₊₋ − P₋₊ from exact Born probabilities.
pub fn correlation(rho: &DensityOperator, a: [f64; 3], b: [f64; 3]) -> Result<f64> {
    if rho.dim() != 4 {
        return Err(Error::DimensionMismatch {
            expected: 4,
            got: rho.dim(),
        });
    }
    let ma = ProjectiveMeasurement::spin_along(a)?;
    let mb = ProjectiveMeasurement::spin_along(b)?;
    let mut e = 0.0;
    for (i, pa) in ma.projectors().iter().enumerate() {
        for (j, pb) in mb.projectors().iter().enumerate() {
            let p = rho.expectation(&linalg::kron(pa, pb))?.re;
            e += if i == j { p } else { -p };
        }
    }
    Ok(e)
}

/// S = E(0,0) − E(0,1) + E(1,0) + E(1,1).
pub fn chsh_value(rho: &DensityOperator, s: &ChshSetting) -> Result<f64> {
    s.validate()?;
    let e = |i: usize, j: usize| correlation(rho, s.alice[i], s.bob[j]);
    let value = e(0, 0)? - e(0, 1)? + e(1, 0)? + e(1, 1)?;
    if value.abs() > 2.0 * std::f64::consts::SQRT_2 + 1e-9 {
        return Err(Error::Internal(format!(
            "CHSH value {value} exceeds the Tsirelson bound"
        )));
    }
    Ok(value)
}

/// Smallest Werner fidelity whose CHSH value at `s` exceeds 2 in magnitude,
/// located by bisection. `None` when no F ∈ [0, 1] violates the bound.
pub fn werner_chsh_threshold(s: &ChshSetting) -> Result<Option<f64>> {
    let g = |f: f64| -> Result<f64> { Ok(chsh_value(&werner_density(f)?, s)?.abs() - 2.0) };
    // ties at |S| = 2 within rounding are not violations
    if g(1.0)? <= 1e-12 {
        return Ok(None);
    }
    // |S| is convex in F (linear inside the absolute value); start from the
    // point where S changes sign so the bracket holds a single crossing
    let (mut lo, mut hi) = (0.25, 1.0);
    if g(lo)? > 0.0 {
        lo = 0.0;
        if g(lo)? > 0.0 {
            return Ok(Some(0.0));
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if g(mid)? > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
        if hi - lo < 1e-13 {
            break;
        }
    }
    Ok(Some(hi))
}
