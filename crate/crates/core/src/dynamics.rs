//! Measurements and open-system dynamics: projective measurements, POVMs,
//! Kraus (operator-sum) channels, complete-positivity checks via the Choi
//! matrix, and the ancilla realization of a POVM as a projective measurement
//! on a larger system.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, c, CMatrix, CVector};
use crate::probability::Distribution;
use crate::state::{DensityOperator, StateVector};

pub const OPERATOR_TOLERANCE: f64 = 1e-10;
/// Choi eigenvalues above this count as non-negative.
pub const CP_TOLERANCE: f64 = -1e-9;

fn square_dim(ms: &[CMatrix]) -> Result<usize> {
    let d = ms
        .first()
        .ok_or_else(|| Error::InvalidOperator("empty operator list".into()))?
        .nrows();
    for m in ms {
        if m.nrows() != d || m.ncols() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: m.nrows().max(m.ncols()),
            });
        }
    }
    Ok(d)
}

/// Anything that assigns outcome probabilities Tr(Eᵢ ρ).
pub trait Measurement {
    fn elements(&self) -> &[CMatrix];

    fn dim(&self) -> usize {
        self.elements()[0].nrows()
    }

    fn outcomes(&self) -> usize {
        self.elements().len()
    }
}

/// Complete set of orthogonal projectors.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawOperators", into = "RawOperators")]
pub struct ProjectiveMeasurement {
    projectors: Vec<CMatrix>,
}

impl ProjectiveMeasurement {
    pub fn new(projectors: Vec<CMatrix>) -> Result<Self> {
        let d = square_dim(&projectors)?;
        let mut sum = CMatrix::zeros(d, d);
        for (i, p) in projectors.iter().enumerate() {
            if linalg::hermiticity_error(p) > OPERATOR_TOLERANCE {
                return Err(Error::InvalidOperator(format!(
                    "projector {i} is not Hermitian"
                )));
            }
            for (j, q) in projectors.iter().enumerate() {
                let expected = if i == j {
                    p.clone()
                } else {
                    CMatrix::zeros(d, d)
                };
                if linalg::max_abs_diff(&(p * q), &expected) > OPERATOR_TOLERANCE {
                    return Err(Error::InvalidOperator(format!(
                        "projectors {i} and {j} violate PᵢPⱼ = δᵢⱼPᵢ"
                    )));
                }
            }
            sum += p;
        }
        if linalg::max_abs_diff(&sum, &linalg::identity(d)) > OPERATOR_TOLERANCE {
            return Err(Error::InvalidOperator(
                "projectors do not sum to the identity".into(),
            ));
        }
        Ok(Self { projectors })
    }

    /// Rank-one projectors onto the vectors of an orthonormal basis.
    pub fn from_basis(basis: &[CVector]) -> Result<Self> {
        Self::new(basis.iter().map(linalg::projector).collect())
    }

    pub fn computational(d: usize) -> Self {
        let projectors = (0..d)
            .map(|k| {
                let mut m = CMatrix::zeros(d, d);
                m[(k, k)] = linalg::ONE;
                m
            })
            .collect();
        Self { projectors }
    }

    /// Qubit basis {cos θ|0⟩ + sin θ|1⟩, −sin θ|0⟩ + cos θ|1⟩}.
    pub fn qubit_at_angle(theta: f64) -> Self {
        let a = StateVector::qubit_at_angle(theta);
        let b = StateVector::qubit_at_angle(theta + std::f64::consts::FRAC_PI_2);
        Self {
            projectors: vec![linalg::projector(a.amps()), linalg::projector(b.amps())],
        }
    }

    /// Spin measurement along Bloch direction `n`: projectors (I ± n·σ)/2,
    /// outcome 0 is "+".
    pub fn spin_along(n: [f64; 3]) -> Result<Self> {
        let sigma = linalg::pauli_x().scale(n[0])
            + linalg::pauli_y().scale(n[1])
            + linalg::pauli_z().scale(n[2]);
        let norm = (n[0] * n[0] + n[1] * n[1] + n[2] * n[2]).sqrt();
        if (norm - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidArgument(format!("axis has norm {norm}")));
        }
        let id = linalg::identity(2);
        Ok(Self {
            projectors: vec![(&id + &sigma).scale(0.5), (&id - &sigma).scale(0.5)],
        })
    }

    pub fn projectors(&self) -> &[CMatrix] {
        &self.projectors
    }
}

impl Measurement for ProjectiveMeasurement {
    fn elements(&self) -> &[CMatrix] {
        &self.projectors
    }
}

/// Positive operator-valued measure.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawOperators", into = "RawOperators")]
pub struct Povm {
    elements: Vec<CMatrix>,
}

impl Povm {
    pub fn new(elements: Vec<CMatrix>) -> Result<Self> {
        let d = square_dim(&elements)?;
        let mut sum = CMatrix::zeros(d, d);
        for (i, e) in elements.iter().enumerate() {
            if linalg::hermiticity_error(e) > OPERATOR_TOLERANCE {
                return Err(Error::InvalidOperator(format!(
                    "element {i} is not Hermitian"
                )));
            }
            let min = linalg::hermitian_eigenvalues(e)
                .last()
                .copied()
                .unwrap_or(0.0);
            if min < -OPERATOR_TOLERANCE {
                return Err(Error::InvalidOperator(format!(
                    "element {i} has eigenvalue {min:e}"
                )));
            }
            sum += e;
        }
        if linalg::max_abs_diff(&sum, &linalg::identity(d)) > OPERATOR_TOLERANCE {
            return Err(Error::InvalidOperator(
                "elements do not sum to the identity".into(),
            ));
        }
        Ok(Self { elements })
    }

    /// Symmetric three-outcome qubit POVM {⅔|ψₖ⟩⟨ψₖ|} with |ψₖ⟩ at
    /// polarization angles 0, 60° and 120°.
    pub fn trine() -> Self {
        let elements = trine_states()
            .iter()
            .map(|s| linalg::projector(s.amps()).scale(2.0 / 3.0))
            .collect();
        Self { elements }
    }

    pub fn elements(&self) -> &[CMatrix] {
        &self.elements
    }
}

/// The trine states cos θₖ|0⟩ + sin θₖ|1⟩, θₖ = kπ/3.
pub fn trine_states() -> [StateVector; 3] {
    [0.0, 1.0, 2.0].map(|k| StateVector::qubit_at_angle(k * std::f64::consts::FRAC_PI_3))
}

impl Measurement for Povm {
    fn elements(&self) -> &[CMatrix] {
        &self.elements
    }
}

impl From<ProjectiveMeasurement> for Povm {
    fn from(m: ProjectiveMeasurement) -> Self {
        Povm {
            elements: m.projectors,
        }
    }
}

/// Completely positive trace-preserving map ρ ↦ Σ N_μ ρ N_μ†.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawOperators", into = "RawOperators")]
pub struct KrausChannel {
    operators: Vec<CMatrix>,
}

impl KrausChannel {
    pub fn new(operators: Vec<CMatrix>) -> Result<Self> {
        let first = operators
            .first()
            .ok_or_else(|| Error::InvalidOperator("empty Kraus list".into()))?;
        let (d_out, d_in) = first.shape();
        let mut sum = CMatrix::zeros(d_in, d_in);
        for op in &operators {
            if op.shape() != (d_out, d_in) {
                return Err(Error::DimensionMismatch {
                    expected: d_in,
                    got: op.ncols(),
                });
            }
            sum += op.adjoint() * op;
        }
        let dev = linalg::max_abs_diff(&sum, &linalg::identity(d_in));
        if dev > OPERATOR_TOLERANCE {
            return Err(Error::InvalidOperator(format!(
                "Σ N†N deviates from identity by {dev:e}"
            )));
        }
        Ok(Self { operators })
    }

    pub fn identity(d: usize) -> Self {
        Self {
            operators: vec![linalg::identity(d)],
        }
    }

    pub fn unitary(u: CMatrix) -> Result<Self> {
        Self::new(vec![u])
    }

    /// {√(1−3p/4) I, √(p/4) X, √(p/4) Y, √(p/4) Z}.
    pub fn depolarizing(p: f64) -> Result<Self> {
        if !(0.0..=4.0 / 3.0).contains(&p) {
            return Err(Error::InvalidArgument(format!(
                "depolarizing parameter {p} out of range"
            )));
        }
        let a = (1.0 - 0.75 * p).sqrt();
        let b = (p / 4.0).sqrt();
        Self::new(vec![
            linalg::identity(2).scale(a),
            linalg::pauli_x().scale(b),
            linalg::pauli_y().scale(b),
            linalg::pauli_z().scale(b),
        ])
    }

    /// Qubit dephasing: {√(1−p/2) I, √(p/2) Z}; p = 1 removes all coherence.
    pub fn dephasing(p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidArgument(format!(
                "dephasing parameter {p} out of range"
            )));
        }
        Self::new(vec![
            linalg::identity(2).scale((1.0 - p / 2.0).sqrt()),
            linalg::pauli_z().scale((p / 2.0).sqrt()),
        ])
    }

    pub fn operators(&self) -> &[CMatrix] {
        &self.operators
    }

    pub fn input_dim(&self) -> usize {
        self.operators[0].ncols()
    }

    pub fn output_dim(&self) -> usize {
        self.operators[0].nrows()
    }

    pub fn act(&self, m: &CMatrix) -> CMatrix {
        self.operators.iter().fold(
            CMatrix::zeros(self.output_dim(), self.output_dim()),
            |acc, n| acc + n * m * n.adjoint(),
        )
    }

    /// Channel followed by another: Kraus set {M_ν N_μ}.
    pub fn then(&self, next: &KrausChannel) -> Result<Self> {
        if next.input_dim() != self.output_dim() {
            return Err(Error::DimensionMismatch {
                expected: self.output_dim(),
                got: next.input_dim(),
            });
        }
        let ops = next
            .operators
            .iter()
            .flat_map(|m| self.operators.iter().map(move |n| m * n))
            .collect();
        Self::new(ops)
    }
}

pub fn measure_probabilities<M: Measurement + ?Sized>(
    rho: &DensityOperator,
    m: &M,
) -> Result<Distribution> {
    if m.dim() != rho.dim() {
        return Err(Error::DimensionMismatch {
            expected: rho.dim(),
            got: m.dim(),
        });
    }
    let probs: Vec<f64> = m
        .elements()
        .iter()
        .map(|e| rho.expectation(e).map(|z| z.re.max(0.0)))
        .collect::<Result<_>>()?;
    Distribution::from_weights(&probs)
}

/// Post-measurement state: ΠᵢρΠᵢ / Tr(Πᵢρ) when outcome `i` is read, or the
/// unread (non-selective) update Σᵢ ΠᵢρΠᵢ.
pub fn projective_update(
    rho: &DensityOperator,
    m: &ProjectiveMeasurement,
    outcome: Option<usize>,
) -> Result<DensityOperator> {
    if m.dim() != rho.dim() {
        return Err(Error::DimensionMismatch {
            expected: rho.dim(),
            got: m.dim(),
        });
    }
    let dims = rho.dims().to_vec();
    match outcome {
        Some(i) => {
            let p = m
                .projectors
                .get(i)
                .ok_or_else(|| Error::InvalidArgument(format!("no outcome {i}")))?;
            let post = p * rho.matrix() * p;
            let prob = linalg::trace(&post).re;
            if prob <= 1e-15 {
                return Err(Error::ZeroProbability(i));
            }
            Ok(DensityOperator::from_trusted(post.unscale(prob), dims))
        }
        None => {
            let d = rho.dim();
            let post = m
                .projectors
                .iter()
                .fold(CMatrix::zeros(d, d), |acc, p| acc + p * rho.matrix() * p);
            Ok(DensityOperator::from_trusted(post, dims))
        }
    }
}

pub fn apply_channel(rho: &DensityOperator, ch: &KrausChannel) -> Result<DensityOperator> {
    if ch.input_dim() != rho.dim() {
        return Err(Error::DimensionMismatch {
            expected: rho.dim(),
            got: ch.input_dim(),
        });
    }
    let dims = if ch.output_dim() == rho.dim() {
        rho.dims().to_vec()
    } else {
        vec![ch.output_dim()]
    };
    Ok(DensityOperator::from_trusted(ch.act(rho.matrix()), dims))
}

/// A linear map on operators, given either in operator-sum form or by its
/// action matrix on row-major vectorized operators (vec(ρ)[i·D + j] = ρᵢⱼ).
#[derive(Clone, Debug, PartialEq)]
pub enum Superoperator {
    Kraus(KrausChannel),
    Matrix {
        action: CMatrix,
        d_in: usize,
        d_out: usize,
    },
}

impl Superoperator {
    pub fn from_action(action: CMatrix, d_in: usize, d_out: usize) -> Result<Self> {
        if action.shape() != (d_out * d_out, d_in * d_in) {
            return Err(Error::DimensionMismatch {
                expected: d_in * d_in,
                got: action.ncols(),
            });
        }
        Ok(Superoperator::Matrix {
            action,
            d_in,
            d_out,
        })
    }

    /// Builds the action matrix of an arbitrary map from its images of the
    /// matrix units, then rejects the map if it fails linearity on a set of
    /// fixed probe combinations.
    pub fn from_map(d_in: usize, d_out: usize, f: impl Fn(&CMatrix) -> CMatrix) -> Result<Self> {
        let mut action = CMatrix::zeros(d_out * d_out, d_in * d_in);
        let mut units = Vec::with_capacity(d_in * d_in);
        for i in 0..d_in {
            for j in 0..d_in {
                let mut e = CMatrix::zeros(d_in, d_in);
                e[(i, j)] = linalg::ONE;
                let img = f(&e);
                if img.shape() != (d_out, d_out) {
                    return Err(Error::DimensionMismatch {
                        expected: d_out,
                        got: img.nrows(),
                    });
                }
                for a in 0..d_out {
                    for b in 0..d_out {
                        action[(a * d_out + b, i * d_in + j)] = img[(a, b)];
                    }
                }
                units.push(e);
            }
        }
        let op = Superoperator::Matrix {
            action,
            d_in,
            d_out,
        };
        let probes = [c(0.7, -0.2), c(-1.3, 0.5), c(0.25, 2.0)];
        let mut probe = CMatrix::zeros(d_in, d_in);
        for (k, e) in units.iter().enumerate() {
            probe += e * probes[k % probes.len()] * c(1.0 + k as f64, 0.0);
        }
        for scale in [c(1.0, 0.0), c(-2.5, 0.0), c(0.0, 1.5)] {
            let input = &probe * scale;
            let deviation = linalg::max_abs_diff(&f(&input), &op.apply(&input));
            if deviation > 1e-9 * (1.0 + input.norm()) {
                return Err(Error::NotLinear(deviation));
            }
        }
        Ok(op)
    }

    pub fn d_in(&self) -> usize {
        match self {
            Superoperator::Kraus(k) => k.input_dim(),
            Superoperator::Matrix { d_in, .. } => *d_in,
        }
    }

    pub fn d_out(&self) -> usize {
        match self {
            Superoperator::Kraus(k) => k.output_dim(),
            Superoperator::Matrix { d_out, .. } => *d_out,
        }
    }

    pub fn apply(&self, m: &CMatrix) -> CMatrix {
        match self {
            Superoperator::Kraus(k) => k.act(m),
            Superoperator::Matrix {
                action,
                d_in,
                d_out,
            } => {
                let v = CVector::from_fn(d_in * d_in, |k, _| m[(k / d_in, k % d_in)]);
                let w = action * v;
                CMatrix::from_fn(*d_out, *d_out, |a, b| w[a * d_out + b])
            }
        }
    }

    /// Normalized Choi matrix (1/D) Σᵢⱼ |i⟩⟨j| ⊗ Φ(|i⟩⟨j|).
    pub fn choi(&self) -> CMatrix {
        let (di, dout) = (self.d_in(), self.d_out());
        let mut choi = CMatrix::zeros(di * dout, di * dout);
        for i in 0..di {
            for j in 0..di {
                let mut e = CMatrix::zeros(di, di);
                e[(i, j)] = linalg::ONE;
                choi += linalg::kron(&e, &self.apply(&e));
            }
        }
        choi.unscale(di as f64)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CpReport {
    pub completely_positive: bool,
    pub min_eigenvalue: f64,
    /// Eigenvector of the most negative Choi eigenvalue, when not CP.
    pub witness: Option<CVector>,
}

pub fn is_completely_positive(map: &Superoperator) -> CpReport {
    let (vals, vecs) = linalg::hermitian_eigen(&map.choi());
    let last = vals.len() - 1;
    let min = vals[last];
    let cp = min >= CP_TOLERANCE;
    CpReport {
        completely_positive: cp,
        min_eigenvalue: min,
        witness: (!cp).then(|| vecs.column(last).into_owned()),
    }
}

/// Realization of a POVM by a unitary on system ⊗ ancilla followed by a
/// projective measurement of the ancilla.
#[derive(Clone, Debug, PartialEq)]
pub struct PovmRealization {
    pub ancilla_dim: usize,
    /// Unitary on the system ⊗ ancilla space (system is the first factor).
    pub unitary: CMatrix,
    pub measurement: ProjectiveMeasurement,
    /// Elements recovered as ⟨0_anc| U† (I ⊗ |α⟩⟨α|) U |0_anc⟩.
    pub recovered: Vec<CMatrix>,
    pub max_error: f64,
}

/// Square-root Kraus operators M_α = √E_α embedded as the first ancilla
/// column block of a unitary, completed orthonormally.
pub fn povm_via_ancilla(povm: &Povm) -> Result<PovmRealization> {
    let d = povm.dim();
    let n = povm.outcomes();
    let big = d * n;
    let roots: Vec<CMatrix> = povm.elements.iter().map(linalg::psd_sqrt).collect();
    // isometry V|i⟩ = Σ_α M_α|i⟩ ⊗ |α⟩, placed on the columns |i⟩ ⊗ |0⟩
    let mut iso = CMatrix::zeros(big, d);
    for (alpha, m) in roots.iter().enumerate() {
        for row in 0..d {
            for col in 0..d {
                iso[(row * n + alpha, col)] = m[(row, col)];
            }
        }
    }
    let completed = linalg::complete_unitary(&iso)
        .ok_or_else(|| Error::Internal("could not complete isometry to a unitary".into()))?;
    // reorder so that column i·n holds V|i⟩ (input |i⟩ ⊗ |0_anc⟩)
    let mut unitary = CMatrix::zeros(big, big);
    let mut spare = d..big;
    for col in 0..big {
        let src = if col % n == 0 {
            col / n
        } else {
            spare.next().unwrap_or(0)
        };
        unitary.set_column(col, &completed.column(src));
    }
    let unitary_error =
        linalg::max_abs_diff(&(unitary.adjoint() * &unitary), &linalg::identity(big));
    if unitary_error > 1e-9 {
        return Err(Error::Internal(format!(
            "completion not unitary ({unitary_error:e})"
        )));
    }
    let ancilla_projectors: Vec<CMatrix> = (0..n)
        .map(|alpha| {
            let mut p = CMatrix::zeros(n, n);
            p[(alpha, alpha)] = linalg::ONE;
            linalg::kron(&linalg::identity(d), &p)
        })
        .collect();
    let measurement = ProjectiveMeasurement::new(ancilla_projectors)?;
    let recovered: Vec<CMatrix> = measurement
        .projectors
        .iter()
        .map(|p| {
            let full = unitary.adjoint() * p * &unitary;
            CMatrix::from_fn(d, d, |i, j| full[(i * n, j * n)])
        })
        .collect();
    let max_error = recovered
        .iter()
        .zip(&povm.elements)
        .map(|(r, e)| linalg::max_abs_diff(r, e))
        .fold(0.0, f64::max);
    if max_error > 1e-9 {
        return Err(Error::Internal(format!(
            "recovered POVM deviates by {max_error:e}"
        )));
    }
    Ok(PovmRealization {
        ancilla_dim: n,
        unitary,
        measurement,
        recovered,
        max_error,
    })
}

#[derive(Serialize, Deserialize)]
#[serde(transparent)]
struct RawOperators(#[serde(with = "crate::io::matrix_list")] Vec<CMatrix>);

impl TryFrom<RawOperators> for ProjectiveMeasurement {
    type Error = Error;
    fn try_from(r: RawOperators) -> Result<Self> {
        Self::new(r.0)
    }
}

impl From<ProjectiveMeasurement> for RawOperators {
    fn from(m: ProjectiveMeasurement) -> Self {
        RawOperators(m.projectors)
    }
}

impl TryFrom<RawOperators> for Povm {
    type Error = Error;
    fn try_from(r: RawOperators) -> Result<Self> {
        Self::new(r.0)
    }
}

impl From<Povm> for RawOperators {
    fn from(m: Povm) -> Self {
        RawOperators(m.elements)
    }
}

impl TryFrom<RawOperators> for KrausChannel {
    type Error = Error;
    fn try_from(r: RawOperators) -> Result<Self> {
        Self::new(r.0)
    }
}

impl From<KrausChannel> for RawOperators {
    fn from(m: KrausChannel) -> Self {
        RawOperators(m.operators)
    }
}
