//! Finite-dimensional quantum states: pure state vectors and density
//! operators with an optional subsystem factorization, together with
//! composition, reduction, purification, Schmidt decomposition, entropy and
//! the state metrics (fidelity, trace distance, Hilbert-space angle).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, c, CMatrix, CVector, C64};
use crate::probability::{eta_nats, LogBase};

pub const NORM_TOLERANCE: f64 = 1e-12;
pub const DENSITY_TOLERANCE: f64 = 1e-10;
/// Eigenvalues below this are treated as zero for entropy and rank.
pub const EIGEN_CLIP: f64 = 1e-12;
/// Two unit vectors are the same ray when |⟨a|b⟩| ≥ 1 - PHASE_TOLERANCE.
pub const PHASE_TOLERANCE: f64 = 1e-10;

fn check_dims(total: usize, dims: &[usize]) -> Result<()> {
    let product: usize = dims.iter().product();
    if dims.is_empty() || dims.contains(&0) || product != total {
        return Err(Error::Factorization(format!(
            "{dims:?} does not factor dimension {total}"
        )));
    }
    Ok(())
}

/// Unit-norm complex amplitude vector.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawStateVector", into = "RawStateVector")]
pub struct StateVector {
    amps: CVector,
    dims: Vec<usize>,
}

impl StateVector {
    pub fn new(amps: CVector, dims: Vec<usize>) -> Result<Self> {
        check_dims(amps.len(), &dims)?;
        let norm2 = amps.norm_squared();
        if (norm2 - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::InvalidState(format!("squared norm is {norm2}")));
        }
        Ok(Self { amps, dims })
    }

    pub fn from_unnormalized(amps: CVector, dims: Vec<usize>) -> Result<Self> {
        let norm = amps.norm();
        if !(norm > 0.0) {
            return Err(Error::InvalidState("zero vector".into()));
        }
        Self::new(amps.unscale(norm), dims)
    }

    pub fn from_amplitudes(amps: &[C64]) -> Result<Self> {
        Self::new(CVector::from_column_slice(amps), vec![amps.len()])
    }

    /// Computational basis vector |k⟩ of dimension `dim`.
    pub fn basis(dim: usize, k: usize) -> Result<Self> {
        if k >= dim {
            return Err(Error::InvalidArgument(format!(
                "basis index {k} outside dimension {dim}"
            )));
        }
        let mut v = CVector::zeros(dim);
        v[k] = linalg::ONE;
        Ok(Self {
            amps: v,
            dims: vec![dim],
        })
    }

    /// n-qubit computational basis state from a bit string such as "011".
    pub fn bits(bits: &str) -> Result<Self> {
        let n = bits.len();
        let index = usize::from_str_radix(bits, 2)
            .map_err(|_| Error::InvalidArgument(format!("not a bit string: {bits}")))?;
        let mut v = CVector::zeros(1 << n);
        v[index] = linalg::ONE;
        Ok(Self {
            amps: v,
            dims: vec![2; n],
        })
    }

    /// Real-amplitude qubit cos θ|0⟩ + sin θ|1⟩.
    pub fn qubit_at_angle(theta: f64) -> Self {
        Self {
            amps: CVector::from_column_slice(&[c(theta.cos(), 0.0), c(theta.sin(), 0.0)]),
            dims: vec![2],
        }
    }

    /// Qubit with the given Bloch-sphere polar and azimuthal angles.
    pub fn qubit_bloch(polar: f64, azimuth: f64) -> Self {
        let a = c((polar / 2.0).cos(), 0.0);
        let b = C64::from_polar((polar / 2.0).sin(), azimuth);
        Self {
            amps: CVector::from_column_slice(&[a, b]),
            dims: vec![2],
        }
    }

    pub fn amps(&self) -> &CVector {
        &self.amps
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn with_dims(mut self, dims: Vec<usize>) -> Result<Self> {
        check_dims(self.amps.len(), &dims)?;
        self.dims = dims;
        Ok(self)
    }

    pub fn inner(&self, other: &Self) -> Result<C64> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: other.dim(),
            });
        }
        Ok(self.amps.dotc(&other.amps))
    }

    pub fn tensor(&self, other: &Self) -> Self {
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&other.dims);
        Self {
            amps: linalg::kron_vec(&self.amps, &other.amps),
            dims,
        }
    }

    pub fn density(&self) -> DensityOperator {
        DensityOperator {
            matrix: linalg::projector(&self.amps),
            dims: self.dims.clone(),
        }
    }

    /// Applies a unitary (or any norm-preserving operator).
    pub fn evolve(&self, u: &CMatrix) -> Result<Self> {
        if u.ncols() != self.dim() || u.nrows() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: u.ncols(),
            });
        }
        Self::from_unnormalized(u * &self.amps, self.dims.clone())
    }

    /// Equality up to global phase.
    pub fn same_ray(&self, other: &Self) -> bool {
        self.inner(other)
            .map(|z| z.norm() >= 1.0 - PHASE_TOLERANCE)
            .unwrap_or(false)
    }
}

/// Hermitian, positive semidefinite, unit-trace matrix.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawDensityOperator", into = "RawDensityOperator")]
pub struct DensityOperator {
    matrix: CMatrix,
    dims: Vec<usize>,
}

impl DensityOperator {
    pub fn new(matrix: CMatrix, dims: Vec<usize>) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::InvalidState("density matrix must be square".into()));
        }
        check_dims(matrix.nrows(), &dims)?;
        let herm = linalg::hermiticity_error(&matrix);
        if herm > DENSITY_TOLERANCE {
            return Err(Error::InvalidState(format!(
                "not Hermitian (deviation {herm:e})"
            )));
        }
        let tr = linalg::trace(&matrix);
        if (tr.re - 1.0).abs() > DENSITY_TOLERANCE || tr.im.abs() > DENSITY_TOLERANCE {
            return Err(Error::InvalidState(format!("trace is {tr}")));
        }
        let min = linalg::hermitian_eigenvalues(&matrix)
            .last()
            .copied()
            .unwrap_or(0.0);
        if min < -DENSITY_TOLERANCE {
            return Err(Error::InvalidState(format!("negative eigenvalue {min:e}")));
        }
        Ok(Self {
            matrix: linalg::hermitian_part(&matrix),
            dims,
        })
    }

    pub fn from_matrix(matrix: CMatrix) -> Result<Self> {
        let n = matrix.nrows();
        Self::new(matrix, vec![n])
    }

    /// Wraps a matrix known to be a valid state (result of a trace- and
    /// positivity-preserving operation on valid inputs).
    pub(crate) fn from_trusted(matrix: CMatrix, dims: Vec<usize>) -> Self {
        Self {
            matrix: linalg::hermitian_part(&matrix),
            dims,
        }
    }

    pub fn maximally_mixed(dims: Vec<usize>) -> Result<Self> {
        let d: usize = dims.iter().product();
        check_dims(d, &dims)?;
        Ok(Self {
            matrix: linalg::identity(d).unscale(d as f64),
            dims,
        })
    }

    pub fn diagonal(probs: &[f64]) -> Result<Self> {
        let n = probs.len();
        let mut m = CMatrix::zeros(n, n);
        for (k, p) in probs.iter().enumerate() {
            m[(k, k)] = c(*p, 0.0);
        }
        Self::new(m, vec![n])
    }

    /// Convex combination Σ wᵢ ρᵢ.
    pub fn mixture(weights: &[f64], states: &[DensityOperator]) -> Result<Self> {
        let first = states
            .first()
            .ok_or_else(|| Error::InvalidArgument("mixture of no states".into()))?;
        if weights.len() != states.len() {
            return Err(Error::DimensionMismatch {
                expected: states.len(),
                got: weights.len(),
            });
        }
        let d = first.dim();
        let mut m = CMatrix::zeros(d, d);
        for (w, s) in weights.iter().zip(states) {
            if s.dim() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    got: s.dim(),
                });
            }
            m += s.matrix.scale(*w);
        }
        Self::new(m, first.dims.clone())
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn with_dims(mut self, dims: Vec<usize>) -> Result<Self> {
        check_dims(self.dim(), &dims)?;
        self.dims = dims;
        Ok(self)
    }

    pub fn tensor(&self, other: &Self) -> Self {
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&other.dims);
        Self {
            matrix: linalg::kron(&self.matrix, &other.matrix),
            dims,
        }
    }

    /// U ρ U†.
    pub fn evolve(&self, u: &CMatrix) -> Result<Self> {
        if u.ncols() != self.dim() || u.nrows() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: u.ncols(),
            });
        }
        Ok(Self::from_trusted(
            u * &self.matrix * u.adjoint(),
            self.dims.clone(),
        ))
    }

    /// ⟨ψ|ρ|ψ⟩.
    pub fn expectation_pure(&self, psi: &StateVector) -> Result<f64> {
        if psi.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: psi.dim(),
            });
        }
        Ok(psi.amps.dotc(&(&self.matrix * &psi.amps)).re)
    }

    /// Tr(A ρ) for an operator A.
    pub fn expectation(&self, op: &CMatrix) -> Result<C64> {
        if op.nrows() != self.dim() || op.ncols() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: op.nrows(),
            });
        }
        Ok(linalg::trace(&(op * &self.matrix)))
    }

    pub fn purity(&self) -> f64 {
        linalg::trace(&(&self.matrix * &self.matrix)).re
    }

    pub fn spectral(&self) -> SpectralDecomposition {
        let (eigenvalues, eigenvectors) = linalg::hermitian_eigen(&self.matrix);
        SpectralDecomposition {
            eigenvalues,
            eigenvectors,
        }
    }

    pub fn rank(&self) -> usize {
        self.spectral()
            .eigenvalues
            .iter()
            .filter(|&&x| x > EIGEN_CLIP)
            .count()
    }
}

/// Eigenvalues in descending order with matching orthonormal eigenvector
/// columns.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralDecomposition {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: CMatrix,
}

impl SpectralDecomposition {
    pub fn reconstruct(&self) -> CMatrix {
        let n = self.eigenvalues.len();
        let mut d = CMatrix::zeros(n, n);
        for (k, v) in self.eigenvalues.iter().enumerate() {
            d[(k, k)] = c(*v, 0.0);
        }
        &self.eigenvectors * d * self.eigenvectors.adjoint()
    }

    pub fn eigenvector(&self, k: usize) -> CVector {
        self.eigenvectors.column(k).into_owned()
    }
}

/// Composition of two states.
pub trait Tensor {
    fn tensor(&self, other: &Self) -> Self;
}

impl Tensor for StateVector {
    fn tensor(&self, other: &Self) -> Self {
        StateVector::tensor(self, other)
    }
}

impl Tensor for DensityOperator {
    fn tensor(&self, other: &Self) -> Self {
        DensityOperator::tensor(self, other)
    }
}

pub fn tensor<T: Tensor>(a: &T, b: &T) -> T {
    a.tensor(b)
}

/// Reduced state on the subsystems listed in `keep` (in increasing order),
/// tracing out the rest: ρ_{ab} = Σ_ν ρ_{aν, bν}.
pub fn partial_trace(rho: &DensityOperator, keep: &[usize]) -> Result<DensityOperator> {
    let dims = rho.dims();
    let k = dims.len();
    if keep.is_empty() || keep.windows(2).any(|w| w[0] >= w[1]) || keep.iter().any(|&i| i >= k) {
        return Err(Error::Factorization(format!(
            "cannot keep subsystems {keep:?} of {dims:?}"
        )));
    }
    let traced: Vec<usize> = (0..k).filter(|i| !keep.contains(i)).collect();
    let kept_dims: Vec<usize> = keep.iter().map(|&i| dims[i]).collect();
    let traced_dims: Vec<usize> = traced.iter().map(|&i| dims[i]).collect();
    let dk: usize = kept_dims.iter().product();
    let dt: usize = traced_dims.iter().product();

    // strides of each subsystem in the full big-endian index
    let mut strides = vec![1usize; k];
    for i in (0..k.saturating_sub(1)).rev() {
        strides[i] = strides[i + 1] * dims[i + 1];
    }
    let compose = |sub: &[usize], sub_dims: &[usize], index: usize| -> usize {
        let mut rem = index;
        let mut full = 0;
        for (pos, &s) in sub.iter().enumerate().rev() {
            let digit = rem % sub_dims[pos];
            rem /= sub_dims[pos];
            full += digit * strides[s];
        }
        full
    };
    let kept_offsets: Vec<usize> = (0..dk).map(|a| compose(keep, &kept_dims, a)).collect();
    let traced_offsets: Vec<usize> = (0..dt).map(|v| compose(&traced, &traced_dims, v)).collect();

    let m = rho.matrix();
    let mut out = CMatrix::zeros(dk, dk);
    for a in 0..dk {
        for b in 0..dk {
            let mut acc = linalg::ZERO;
            for &nu in &traced_offsets {
                acc += m[(kept_offsets[a] + nu, kept_offsets[b] + nu)];
            }
            out[(a, b)] = acc;
        }
    }
    Ok(DensityOperator::from_trusted(out, kept_dims))
}

/// Reduced state of a single subsystem.
pub fn reduce(rho: &DensityOperator, keep: usize) -> Result<DensityOperator> {
    partial_trace(rho, &[keep])
}

/// Purification |Ψ⟩ = Σ √λᵢ |ψᵢ⟩ ⊗ |i⟩ with the ancilla (second factor) of
/// dimension rank(ρ).
pub fn purify(rho: &DensityOperator) -> StateVector {
    let spec = rho.spectral();
    let kept: Vec<usize> = (0..spec.eigenvalues.len())
        .filter(|&k| spec.eigenvalues[k] > EIGEN_CLIP)
        .collect();
    let rank = kept.len().max(1);
    let d = rho.dim();
    let mut amps = CVector::zeros(d * rank);
    for (j, &k) in kept.iter().enumerate() {
        let w = spec.eigenvalues[k].sqrt();
        let v = spec.eigenvector(k);
        for i in 0..d {
            amps[i * rank + j] = v[i] * w;
        }
    }
    StateVector::from_unnormalized(amps, vec![d, rank])
        .unwrap_or_else(|e| panic!("purification of a valid state failed: {e}"))
}

/// Bi-orthogonal form |Ψ⟩ = Σ √λᵢ |uᵢ⟩ ⊗ |vᵢ⟩.
#[derive(Clone, Debug, PartialEq)]
pub struct SchmidtForm {
    /// √λᵢ, descending, strictly positive.
    pub coefficients: Vec<f64>,
    pub left: Vec<CVector>,
    pub right: Vec<CVector>,
    pub schmidt_number: usize,
}

impl SchmidtForm {
    /// Schmidt weights λᵢ.
    pub fn weights(&self) -> Vec<f64> {
        self.coefficients.iter().map(|s| s * s).collect()
    }

    /// Number of weights λᵢ above `threshold`.
    pub fn rank(&self, threshold: f64) -> usize {
        self.weights().iter().filter(|&&l| l > threshold).count()
    }

    pub fn reconstruct(&self) -> CVector {
        let mut v = CVector::zeros(self.left[0].len() * self.right[0].len());
        for ((s, u), w) in self.coefficients.iter().zip(&self.left).zip(&self.right) {
            v += linalg::kron_vec(u, w).scale(*s);
        }
        v
    }
}

pub fn schmidt_decompose(psi: &StateVector, split: (usize, usize)) -> Result<SchmidtForm> {
    let (da, db) = split;
    if da * db != psi.dim() {
        return Err(Error::Factorization(format!(
            "{da}x{db} does not split dimension {}",
            psi.dim()
        )));
    }
    let m = CMatrix::from_fn(da, db, |a, b| psi.amps[a * db + b]);
    let svd = m.svd(true, true);
    let u = svd
        .u
        .ok_or_else(|| Error::Internal("SVD produced no U".into()))?;
    let vt = svd
        .v_t
        .ok_or_else(|| Error::Internal("SVD produced no V†".into()))?;
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));
    let mut coefficients = Vec::new();
    let mut left = Vec::new();
    let mut right = Vec::new();
    for &k in &order {
        let s = svd.singular_values[k];
        if s * s <= EIGEN_CLIP && !coefficients.is_empty() {
            continue;
        }
        coefficients.push(s);
        left.push(u.column(k).into_owned());
        right.push(vt.row(k).transpose());
    }
    let schmidt_number = coefficients.iter().filter(|s| *s * *s > EIGEN_CLIP).count();
    Ok(SchmidtForm {
        coefficients,
        left,
        right,
        schmidt_number,
    })
}

/// Entropy of a spectrum, eigenvalues clipped at zero.
pub(crate) fn spectrum_entropy_nats(eigenvalues: &[f64]) -> f64 {
    eigenvalues
        .iter()
        .map(|&x| if x > EIGEN_CLIP { eta_nats(x) } else { 0.0 })
        .sum()
}

/// S(ρ) = -Tr ρ log ρ.
pub fn von_neumann_entropy(rho: &DensityOperator, base: LogBase) -> f64 {
    base.from_nats(spectrum_entropy_nats(&rho.spectral().eigenvalues))
}

fn same_dim(a: &DensityOperator, b: &DensityOperator) -> Result<()> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            got: b.dim(),
        });
    }
    Ok(())
}

/// F(ρ0, ρ1) = (Tr √(√ρ1 ρ0 √ρ1))², evaluated as the squared sum of the
/// singular values of √ρ0 √ρ1. Eigenvalues below the clip are zeroed before
/// the square roots so rank-deficient states keep full precision.
pub fn fidelity(rho0: &DensityOperator, rho1: &DensityOperator) -> Result<f64> {
    same_dim(rho0, rho1)?;
    let root =
        |m: &CMatrix| linalg::hermitian_fn(m, |x| if x > EIGEN_CLIP { x.sqrt() } else { 0.0 });
    let product = root(&rho0.matrix) * root(&rho1.matrix);
    let root_sum: f64 = product.singular_values().iter().sum();
    Ok((root_sum * root_sum).clamp(0.0, 1.0))
}

/// √F, the quantum statistical overlap.
pub fn statistical_overlap(rho0: &DensityOperator, rho1: &DensityOperator) -> Result<f64> {
    Ok(fidelity(rho0, rho1)?.sqrt())
}

/// Trace norm ‖ρ0 − ρ1‖ without the ½ factor; ranges over [0, 2].
pub fn trace_distance(rho0: &DensityOperator, rho1: &DensityOperator) -> Result<f64> {
    same_dim(rho0, rho1)?;
    Ok(linalg::trace_norm_hermitian(&(&rho0.matrix - &rho1.matrix)))
}

/// arccos |⟨ψ0|ψ1⟩|, in [0, π/2].
pub fn hilbert_angle(psi0: &StateVector, psi1: &StateVector) -> Result<f64> {
    Ok(psi0.inner(psi1)?.norm().min(1.0).acos())
}

#[derive(Serialize, Deserialize)]
struct RawStateVector {
    amps: Vec<[f64; 2]>,
    #[serde(default)]
    dims: Option<Vec<usize>>,
}

impl TryFrom<RawStateVector> for StateVector {
    type Error = Error;
    fn try_from(raw: RawStateVector) -> Result<Self> {
        let amps = CVector::from_iterator(raw.amps.len(), raw.amps.iter().map(|z| c(z[0], z[1])));
        let dims = raw.dims.unwrap_or_else(|| vec![amps.len()]);
        StateVector::new(amps, dims)
    }
}

impl From<StateVector> for RawStateVector {
    fn from(s: StateVector) -> Self {
        RawStateVector {
            amps: s.amps.iter().map(|z| [z.re, z.im]).collect(),
            dims: Some(s.dims),
        }
    }
}

#[derive(Serialize, Deserialize)]
struct RawDensityOperator {
    matrix: Vec<Vec<[f64; 2]>>,
    #[serde(default)]
    dims: Option<Vec<usize>>,
}

impl TryFrom<RawDensityOperator> for DensityOperator {
    type Error = Error;
    fn try_from(raw: RawDensityOperator) -> Result<Self> {
        let matrix = crate::io::matrix_from_rows(&raw.matrix)?;
        let dims = raw.dims.unwrap_or_else(|| vec![matrix.nrows()]);
        DensityOperator::new(matrix, dims)
    }
}

impl From<DensityOperator> for RawDensityOperator {
    fn from(d: DensityOperator) -> Self {
        RawDensityOperator {
            matrix: crate::io::matrix_to_rows(&d.matrix),
            dims: Some(d.dims),
        }
    }
}
