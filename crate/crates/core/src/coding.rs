//! Typical-subspace (Schumacher) compression at small block lengths, QECC
//! condition checking, three-qubit repetition-code recovery and the Hamming
//! bound.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::distinguish::Ensemble;
use crate::dynamics::KrausChannel;
use crate::error::{Error, Result};
use crate::linalg::{self, c, CMatrix, CVector, C64};
use crate::probability::{entropy_nats, DEFAULT_ENUMERATION_CAP};
use crate::state::{DensityOperator, StateVector, EIGEN_CLIP};

/// Largest block dimension for which an explicit projector or channel is built.
pub const EXPLICIT_DIM_CAP: usize = 1 << 10;

/// Span of selected product eigenvectors of ρ^⊗n.
///
/// Members are stored as indices into the dⁿ product basis (big-endian
/// digits select single-system eigenvectors), never as a dense projector.
#[derive(Clone, Debug, PartialEq)]
pub struct TypicalSubspace {
    pub n: usize,
    pub delta: f64,
    pub entropy_bits: f64,
    /// Single-system spectrum, descending.
    pub local_eigenvalues: Vec<f64>,
    /// Columns are the matching single-system eigenvectors.
    pub local_basis: CMatrix,
    pub members: Vec<usize>,
    /// Eigenvalue of ρ^⊗n for each member.
    pub member_eigenvalues: Vec<f64>,
    /// Tr(Π ρ^⊗n).
    pub weight: f64,
    pub checks: TypicalChecks,
}

/// The typical-subspace properties evaluated on a concrete instance, with
/// ε taken as 1 − weight.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TypicalChecks {
    /// Every member eigenvalue lies strictly inside the 2^{−n(S±δ)} window.
    pub eigenvalue_window: bool,
    /// dim ≤ 2^{n(S+δ)}.
    pub dimension_upper: bool,
    /// (1 − ε) 2^{n(S−δ)} ≤ dim.
    pub dimension_lower: bool,
    /// Π is spanned by eigenvectors of ρ^⊗n, so it commutes with it.
    pub spanned_by_eigenvectors: bool,
}

impl TypicalSubspace {
    pub fn dimension(&self) -> usize {
        self.members.len()
    }

    pub fn local_dim(&self) -> usize {
        self.local_eigenvalues.len()
    }

    pub fn block_dim(&self) -> usize {
        self.local_dim().pow(self.n as u32)
    }

    fn digits(&self, index: usize) -> Vec<usize> {
        let d = self.local_dim();
        let mut out = vec![0; self.n];
        let mut rest = index;
        for slot in out.iter_mut().rev() {
            *slot = rest % d;
            rest /= d;
        }
        out
    }

    /// Product eigenvector for basis `index`.
    pub fn eigenvector(&self, index: usize) -> CVector {
        self.digits(index)
            .iter()
            .fold(CVector::from_element(1, linalg::ONE), |acc, &k| {
                linalg::kron_vec(&acc, &self.local_basis.column(k).into_owned())
            })
    }

    /// Dense projector onto the subspace (small blocks only).
    pub fn projector(&self) -> Result<CMatrix> {
        let dim = self.block_dim();
        if dim > EXPLICIT_DIM_CAP {
            return Err(Error::CapExceeded {
                requested: dim as u128,
                cap: EXPLICIT_DIM_CAP as u128,
            });
        }
        Ok(self
            .members
            .iter()
            .fold(CMatrix::zeros(dim, dim), |acc, &m| {
                acc + linalg::projector(&self.eigenvector(m))
            }))
    }
}

fn block_log2_eigenvalue(digits_of: impl Iterator<Item = usize>, local: &[f64]) -> f64 {
    digits_of.map(|k| local[k].log2()).sum()
}

fn enumerate_check(d: usize, n: usize, cap: u128) -> Result<usize> {
    let total = (d as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
    if total > cap {
        return Err(Error::CapExceeded {
            requested: total,
            cap,
        });
    }
    Ok(total as usize)
}

fn local_spectrum(rho: &DensityOperator) -> (Vec<f64>, CMatrix) {
    let spec = rho.spectral();
    let vals = spec
        .eigenvalues
        .iter()
        .map(|&x| if x > EIGEN_CLIP { x } else { 0.0 })
        .collect();
    (vals, spec.eigenvectors.clone())
}

/// Which block eigenvectors form the code space.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "mode")]
pub enum SubspaceSelection {
    /// Eigenvalues strictly inside 2^{−n(S+δ)} < λ < 2^{−n(S−δ)}.
    Typical,
    /// The ⌊2^{n·rate}⌋ largest eigenvalues, ties broken by basis index.
    Truncated { rate: f64 },
}

/// Typical subspace of ρ^⊗n by exhaustive enumeration of the dⁿ product
/// eigenvalues. `cap` bounds dⁿ.
pub fn build_typical_subspace(
    rho: &DensityOperator,
    n: usize,
    delta: f64,
    cap: u128,
) -> Result<TypicalSubspace> {
    select_subspace(rho, n, delta, SubspaceSelection::Typical, cap)
}

pub fn select_subspace(
    rho: &DensityOperator,
    n: usize,
    delta: f64,
    selection: SubspaceSelection,
    cap: u128,
) -> Result<TypicalSubspace> {
    if n == 0 {
        return Err(Error::InvalidArgument(
            "block length must be positive".into(),
        ));
    }
    if !(delta >= 0.0) {
        return Err(Error::InvalidArgument(format!(
            "delta must be non-negative, got {delta}"
        )));
    }
    let (local, basis) = local_spectrum(rho);
    let d = local.len();
    let total = enumerate_check(d, n, cap)?;
    let s = entropy_nats(&local) / std::f64::consts::LN_2;
    let digits = |mut idx: usize| {
        let mut v = vec![0; n];
        for slot in v.iter_mut().rev() {
            *slot = idx % d;
            idx /= d;
        }
        v
    };
    let log_eig: Vec<f64> = (0..total)
        .into_par_iter()
        .map(|i| block_log2_eigenvalue(digits(i).into_iter(), &local))
        .collect();
    let nf = n as f64;
    let members: Vec<usize> = match selection {
        SubspaceSelection::Typical => (0..total)
            .filter(|&i| {
                let l = log_eig[i];
                l.is_finite() && l > -nf * (s + delta) && l < -nf * (s - delta)
            })
            .collect(),
        SubspaceSelection::Truncated { rate } => {
            if !(rate >= 0.0) {
                return Err(Error::InvalidArgument(format!(
                    "rate must be non-negative, got {rate}"
                )));
            }
            let keep = (2f64.powf(nf * rate).floor() as usize).min(total);
            let mut order: Vec<usize> = (0..total).filter(|&i| log_eig[i].is_finite()).collect();
            order.sort_by(|&a, &b| log_eig[b].total_cmp(&log_eig[a]).then(a.cmp(&b)));
            order.truncate(keep);
            order
        }
    };
    let member_eigenvalues: Vec<f64> = members.iter().map(|&m| log_eig[m].exp2()).collect();
    let weight: f64 = member_eigenvalues.iter().sum();
    let dim = members.len() as f64;
    let eps = 1.0 - weight;
    let checks = TypicalChecks {
        eigenvalue_window: member_eigenvalues.iter().all(|&l| {
            let lg = l.log2();
            lg > -nf * (s + delta) && lg < -nf * (s - delta)
        }),
        dimension_upper: dim <= 2f64.powf(nf * (s + delta)) * (1.0 + 1e-12),
        dimension_lower: (1.0 - eps) * 2f64.powf(nf * (s - delta)) <= dim * (1.0 + 1e-12),
        spanned_by_eigenvectors: true,
    };
    Ok(TypicalSubspace {
        n,
        delta,
        entropy_bits: s,
        local_eigenvalues: local,
        local_basis: basis,
        members,
        member_eigenvalues,
        weight,
        checks,
    })
}

/// Where the signals come from: a pure-state ensemble, or a density
/// operator standing for its own eigenensemble.
#[derive(Clone, Debug, PartialEq)]
pub enum SignalSource {
    Ensemble(Ensemble),
    Density(DensityOperator),
}

impl SignalSource {
    fn letters(&self) -> Result<(Vec<f64>, Vec<CVector>, DensityOperator)> {
        match self {
            SignalSource::Density(rho) => {
                let e = Ensemble::eigenensemble(rho)?;
                Self::Ensemble(e).letters()
            }
            SignalSource::Ensemble(e) => {
                let mut vecs = Vec::with_capacity(e.len());
                for s in e.states() {
                    if (s.purity() - 1.0).abs() > 1e-10 {
                        return Err(Error::InvalidState(
                            "compression needs pure signal states".into(),
                        ));
                    }
                    vecs.push(s.spectral().eigenvector(0));
                }
                Ok((e.probs().probs().to_vec(), vecs, e.average_state()))
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SchumacherReport {
    pub n: usize,
    pub delta: f64,
    pub entropy_bits: f64,
    pub dimension: usize,
    /// log₂(dim Λ) / n qubits per signal.
    pub rate: f64,
    /// Tr(Π ρ^⊗n).
    pub weight: f64,
    /// η = 1 − weight.
    pub eta: f64,
    /// 1 − 2η.
    pub lemma_bound: f64,
    /// F̄ = Σ p(a) ⟨a|ρ_a|a⟩ over all n-letter words.
    pub avg_fidelity: f64,
    /// Entanglement fidelity of the transposition channel on ρ^⊗n.
    pub entanglement_fidelity: f64,
    /// Basis index of the junk vector used on failure.
    pub junk: Option<usize>,
}

/// Block transposition through Λ: project onto Λ on success and replace by a
/// fixed junk vector on failure. The junk vector is the retained eigenvector
/// with the smallest eigenvalue (highest index on ties), so it lies in Λ and
/// the encoder needs only dim Λ code states.
///
/// Errors if F̄ ≤ 1 − 2η, which would contradict the transposition lemma.
pub fn schumacher_roundtrip(
    source: &SignalSource,
    n: usize,
    delta: f64,
    selection: SubspaceSelection,
    cap: u128,
) -> Result<(SchumacherReport, TypicalSubspace)> {
    let (probs, letters, rho) = source.letters()?;
    let sub = select_subspace(&rho, n, delta, selection, cap)?;
    let words = enumerate_check(letters.len(), n, cap)?;
    let d = sub.local_dim();
    if letters.iter().any(|v| v.len() != d) {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: letters[0].len(),
        });
    }
    // ov[x][k] = |⟨e_k|φ_x⟩|²
    let ov: Vec<Vec<f64>> = letters
        .iter()
        .map(|v| {
            (0..d)
                .map(|k| sub.local_basis.column(k).dotc(v).norm_sqr())
                .collect()
        })
        .collect();
    let junk = sub
        .members
        .iter()
        .zip(&sub.member_eigenvalues)
        .fold(None::<(usize, f64)>, |best, (&m, &l)| match best {
            Some((_, bl)) if l > bl => best,
            _ => Some((m, l)),
        })
        .map(|(m, _)| m);
    let member_digits: Vec<Vec<usize>> = sub.members.iter().map(|&m| sub.digits(m)).collect();
    let junk_digits = junk.map(|j| sub.digits(j));
    let l = letters.len();
    let avg_fidelity: f64 = (0..words)
        .into_par_iter()
        .map(|w| {
            let mut word = vec![0; n];
            let mut rest = w;
            for slot in word.iter_mut().rev() {
                *slot = rest % l;
                rest /= l;
            }
            let p: f64 = word.iter().map(|&x| probs[x]).product();
            if p == 0.0 {
                return 0.0;
            }
            let overlap = |digits: &[usize]| -> f64 {
                word.iter().zip(digits).map(|(&x, &k)| ov[x][k]).product()
            };
            let inside: f64 = member_digits
                .iter()
                .map(|dg| overlap(dg))
                .sum::<f64>()
                .min(1.0);
            let junk_overlap = junk_digits.as_deref().map(overlap).unwrap_or(0.0);
            p * (inside * inside + (1.0 - inside) * junk_overlap)
        })
        .sum();
    let weight = sub.weight;
    let eta = 1.0 - weight;
    // Kraus form {Π} ∪ {|j⟩⟨e_k| : k ∉ Λ}; the second family has zero trace
    // against ρ^⊗n because j ∈ Λ and both are eigenvectors
    let entanglement_fidelity = weight * weight;
    let dimension = sub.dimension();
    let report = SchumacherReport {
        n,
        delta,
        entropy_bits: sub.entropy_bits,
        dimension,
        rate: if dimension > 0 {
            (dimension as f64).log2() / n as f64
        } else {
            0.0
        },
        weight,
        eta,
        lemma_bound: 1.0 - 2.0 * eta,
        avg_fidelity,
        entanglement_fidelity,
        junk,
    };
    if !(report.avg_fidelity > report.lemma_bound - 1e-12) {
        return Err(Error::Internal(format!(
            "average fidelity {} does not exceed 1 − 2η = {}",
            report.avg_fidelity, report.lemma_bound
        )));
    }
    Ok((report, sub))
}

/// Explicit transposition channel on the block space (small blocks only).
pub fn transposition_channel(sub: &TypicalSubspace, junk: Option<usize>) -> Result<KrausChannel> {
    if sub.members.is_empty() {
        return Err(Error::InvalidArgument(
            "the selected subspace is empty; no channel maps into it".into(),
        ));
    }
    let pi = sub.projector()?;
    let dim = sub.block_dim();
    let mut ops = vec![pi];
    if let Some(j) = junk {
        let jv = sub.eigenvector(j);
        let inside: std::collections::HashSet<usize> = sub.members.iter().copied().collect();
        for k in (0..dim).filter(|k| !inside.contains(k)) {
            ops.push(linalg::outer(&jv, &sub.eigenvector(k)));
        }
    }
    KrausChannel::new(ops)
}

pub fn default_cap() -> u128 {
    DEFAULT_ENUMERATION_CAP
}

/// Orthonormal codewords spanning a code subspace of n qubits.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawCode", into = "RawCode")]
pub struct CodeSubspace {
    codewords: Vec<StateVector>,
    qubits: usize,
}

impl CodeSubspace {
    pub fn new(codewords: Vec<StateVector>) -> Result<Self> {
        let first = codewords
            .first()
            .ok_or_else(|| Error::InvalidArgument("code has no codewords".into()))?;
        let dim = first.dim();
        if !dim.is_power_of_two() {
            return Err(Error::InvalidArgument(format!(
                "dimension {dim} is not a qubit register"
            )));
        }
        for (i, u) in codewords.iter().enumerate() {
            if u.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: u.dim(),
                });
            }
            for v in &codewords[i + 1..] {
                let ip = u.inner(v)?.norm();
                if ip > 1e-10 {
                    return Err(Error::InvalidArgument(format!(
                        "codewords not orthogonal (overlap {ip})"
                    )));
                }
            }
        }
        let qubits = dim.trailing_zeros() as usize;
        let codewords = codewords
            .into_iter()
            .map(|w| w.with_dims(vec![2; qubits]))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { codewords, qubits })
    }

    /// {|000⟩, |111⟩}.
    pub fn repetition3() -> Self {
        Self::new(vec![
            StateVector::bits("000").expect("valid bits"),
            StateVector::bits("111").expect("valid bits"),
        ])
        .expect("orthonormal")
    }

    pub fn codewords(&self) -> &[StateVector] {
        &self.codewords
    }

    pub fn qubits(&self) -> usize {
        self.qubits
    }
}

#[derive(Serialize, Deserialize)]
struct RawCode {
    codewords: Vec<Vec<[f64; 2]>>,
}

impl TryFrom<RawCode> for CodeSubspace {
    type Error = Error;
    fn try_from(raw: RawCode) -> Result<Self> {
        let words = raw
            .codewords
            .iter()
            .map(|w| {
                StateVector::from_amplitudes(&w.iter().map(|z| c(z[0], z[1])).collect::<Vec<_>>())
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(words)
    }
}

impl From<CodeSubspace> for RawCode {
    fn from(code: CodeSubspace) -> Self {
        RawCode {
            codewords: code
                .codewords
                .iter()
                .map(|w| w.amps().iter().map(|z| [z.re, z.im]).collect())
                .collect(),
        }
    }
}

/// Pauli error strings over {I, X, Y, Z}, with Y = XZ.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<String>", into = "Vec<String>")]
pub struct PauliErrorSet {
    errors: Vec<String>,
    qubits: usize,
}

impl PauliErrorSet {
    pub fn new<S: AsRef<str>>(errors: &[S]) -> Result<Self> {
        let errors: Vec<String> = errors
            .iter()
            .map(|e| e.as_ref().to_ascii_uppercase())
            .collect();
        let qubits = errors
            .first()
            .map(|e| e.len())
            .ok_or_else(|| Error::InvalidArgument("empty error set".into()))?;
        for e in &errors {
            if e.len() != qubits || !e.chars().all(|ch| matches!(ch, 'I' | 'X' | 'Y' | 'Z')) {
                return Err(Error::InvalidArgument(format!("bad Pauli string '{e}'")));
            }
        }
        Ok(Self { errors, qubits })
    }

    /// All weight-one errors of one letter, plus the identity.
    pub fn single(letter: char, qubits: usize) -> Result<Self> {
        let mut errs = vec!["I".repeat(qubits)];
        for q in 0..qubits {
            let mut s: Vec<char> = vec!['I'; qubits];
            s[q] = letter.to_ascii_uppercase();
            errs.push(s.into_iter().collect());
        }
        Self::new(&errs)
    }

    pub fn errors(&self) -> &[String] {
        &self.errors
    }

    pub fn qubits(&self) -> usize {
        self.qubits
    }

    pub fn weight(error: &str) -> usize {
        error.chars().filter(|&ch| ch != 'I').count()
    }
}

impl TryFrom<Vec<String>> for PauliErrorSet {
    type Error = Error;
    fn try_from(v: Vec<String>) -> Result<Self> {
        Self::new(&v)
    }
}

impl From<PauliErrorSet> for Vec<String> {
    fn from(s: PauliErrorSet) -> Self {
        s.errors
    }
}

fn pauli_letter(ch: char) -> CMatrix {
    match ch {
        'X' => linalg::pauli_x(),
        'Z' => linalg::pauli_z(),
        // XZ, which is −iσy
        'Y' => linalg::pauli_x() * linalg::pauli_z(),
        _ => linalg::identity(2),
    }
}

/// Matrix of a Pauli string; the first letter acts on qubit 0.
pub fn pauli_operator(error: &str) -> Result<CMatrix> {
    if !error
        .chars()
        .all(|ch| matches!(ch.to_ascii_uppercase(), 'I' | 'X' | 'Y' | 'Z'))
    {
        return Err(Error::InvalidArgument(format!(
            "bad Pauli string '{error}'"
        )));
    }
    Ok(error.chars().fold(CMatrix::identity(1, 1), |acc, ch| {
        linalg::kron(&acc, &pauli_letter(ch.to_ascii_uppercase()))
    }))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum QeccViolation {
    /// ⟨u|Mₛ†Mₜ|v⟩ ≠ 0 for distinct codewords.
    OffDiagonal {
        s: String,
        t: String,
        u: usize,
        v: usize,
        value: [f64; 2],
    },
    /// ⟨u|Mₛ†Mₜ|u⟩ differs from the value on codeword 0.
    DiagonalMismatch {
        s: String,
        t: String,
        u: usize,
        value: [f64; 2],
        reference: [f64; 2],
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QeccReport {
    pub correctable: bool,
    pub witness: Option<QeccViolation>,
    pub pairs_checked: usize,
}

/// Checks the correctability conditions for every ordered error pair (s, t)
/// at tolerance 1e-10 and returns the first violation found.
pub fn qecc_check(code: &CodeSubspace, errors: &PauliErrorSet) -> Result<QeccReport> {
    if code.qubits() != errors.qubits() {
        return Err(Error::DimensionMismatch {
            expected: code.qubits(),
            got: errors.qubits(),
        });
    }
    let ops = errors
        .errors()
        .iter()
        .map(|e| pauli_operator(e))
        .collect::<Result<Vec<_>>>()?;
    let words: Vec<&CVector> = code.codewords().iter().map(|w| w.amps()).collect();
    let pack = |z: C64| [z.re, z.im];
    let mut pairs = 0;
    for (si, ms) in ops.iter().enumerate() {
        for (ti, mt) in ops.iter().enumerate() {
            pairs += 1;
            let m = ms.adjoint() * mt;
            let images: Vec<CVector> = words.iter().map(|v| &m * *v).collect();
            let reference = words[0].dotc(&images[0]);
            for (ui, u) in words.iter().enumerate() {
                for (vi, img) in images.iter().enumerate() {
                    let value = u.dotc(img);
                    let (s, t) = (errors.errors()[si].clone(), errors.errors()[ti].clone());
                    if ui != vi && value.norm() > 1e-10 {
                        let witness = QeccViolation::OffDiagonal {
                            s,
                            t,
                            u: ui,
                            v: vi,
                            value: pack(value),
                        };
                        return Ok(QeccReport {
                            correctable: false,
                            witness: Some(witness),
                            pairs_checked: pairs,
                        });
                    }
                    if ui == vi && (value - reference).norm() > 1e-10 {
                        let witness = QeccViolation::DiagonalMismatch {
                            s,
                            t,
                            u: ui,
                            value: pack(value),
                            reference: pack(reference),
                        };
                        return Ok(QeccReport {
                            correctable: false,
                            witness: Some(witness),
                            pairs_checked: pairs,
                        });
                    }
                }
            }
        }
    }
    Ok(QeccReport {
        correctable: true,
        witness: None,
        pairs_checked: pairs,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RecoveryReport {
    pub error: String,
    /// Errors the repetition code is built to undo: identity and single X flips.
    pub correctable: bool,
    /// Probabilities of the parity syndromes (Z₀Z₁, Z₁Z₂) = 00, 01, 10, 11.
    pub syndrome_probs: [f64; 4],
    /// Outcome-averaged |⟨ψ_L|recovered⟩|².
    pub fidelity: f64,
}

/// Encodes α|0⟩ + β|1⟩ into the repetition code, applies `error`, measures
/// both parities and flips the qubit the syndrome points to.
pub fn recovery_demo(alpha: C64, beta: C64, error: &str) -> Result<RecoveryReport> {
    let error = error.to_ascii_uppercase();
    if error.len() != 3 {
        return Err(Error::InvalidArgument(format!(
            "repetition code needs a 3-letter error, got '{error}'"
        )));
    }
    let logical = StateVector::from_unnormalized(
        CVector::from_fn(8, |i, _| match i {
            0 => alpha,
            7 => beta,
            _ => linalg::ZERO,
        }),
        vec![2, 2, 2],
    )?;
    let corrupted = pauli_operator(&error)? * logical.amps();
    let z = linalg::pauli_z();
    let id = linalg::identity(2);
    let parity = |a: usize, b: usize| {
        let mut ops = [&id, &id, &id];
        ops[a] = &z;
        ops[b] = &z;
        linalg::kron(&linalg::kron(ops[0], ops[1]), ops[2])
    };
    let half = |m: CMatrix, sign: f64| (linalg::identity(8) + m.scale(sign)).scale(0.5);
    let z01 = parity(0, 1);
    let z12 = parity(1, 2);
    let mut syndrome_probs = [0.0; 4];
    let mut fidelity = 0.0;
    for (s, slot) in syndrome_probs.iter_mut().enumerate() {
        let (b0, b1) = (s >> 1, s & 1);
        let proj = half(z01.clone(), if b0 == 0 { 1.0 } else { -1.0 })
            * half(z12.clone(), if b1 == 0 { 1.0 } else { -1.0 });
        let branch = &proj * &corrupted;
        let p = branch.norm_squared();
        *slot = p;
        if p < 1e-15 {
            continue;
        }
        let flip = match (b0, b1) {
            (1, 0) => Some(0),
            (1, 1) => Some(1),
            (0, 1) => Some(2),
            _ => None,
        };
        let fixed = match flip {
            Some(q) => linalg::on_qubit(3, q, &linalg::pauli_x()) * branch,
            None => branch,
        };
        fidelity += logical.amps().dotc(&fixed).norm_sqr();
    }
    let correctable = PauliErrorSet::weight(&error) == 0
        || (PauliErrorSet::weight(&error) == 1 && error.contains('X'));
    Ok(RecoveryReport {
        error,
        correctable,
        syndrome_probs,
        fidelity,
    })
}

/// k ≤ n − log₂ Σ_{i≤t} C(n, i), with exact integer binomials.
pub fn hamming_bound(n: u32, t: u32) -> Result<f64> {
    if t > n {
        return Err(Error::InvalidArgument(format!("t = {t} exceeds n = {n}")));
    }
    if n > 120 {
        return Err(Error::InvalidArgument(format!(
            "n = {n} too large for exact binomials"
        )));
    }
    let mut binom: u128 = 1;
    let mut total: u128 = 1;
    for i in 1..=t as u128 {
        binom = binom * (n as u128 - i + 1) / i;
        total += binom;
    }
    Ok(n as f64 - (total as f64).log2())
}
