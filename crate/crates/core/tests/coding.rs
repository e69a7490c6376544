use std::f64::consts::PI;

use proptest::prelude::*;
use qinfo::coding::*;
use qinfo::distinguish::Ensemble;
use qinfo::linalg::{self, c, CMatrix};
use qinfo::probability::{Distribution, DEFAULT_ENUMERATION_CAP};
use qinfo::random::{random_density, random_simplex, random_state_vector, substream};
use qinfo::state::{DensityOperator, StateVector};
use qinfo::Error;

const CAP: u128 = DEFAULT_ENUMERATION_CAP;

fn close(a: f64, b: f64, tol: f64) {
    assert!((a - b).abs() <= tol, "{a} vs {b} (tol {tol})");
}

fn binomial(n: u64, k: u64) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

fn tilted_pair() -> SignalSource {
    let (a, b) = (0.9f64.sqrt(), 0.1f64.sqrt());
    let e = Ensemble::pure(
        Distribution::uniform(2).unwrap(),
        &[
            StateVector::from_amplitudes(&[c(a, 0.0), c(b, 0.0)]).unwrap(),
            StateVector::from_amplitudes(&[c(a, 0.0), c(-b, 0.0)]).unwrap(),
        ],
    )
    .unwrap();
    SignalSource::Ensemble(e)
}

fn block_power(rho: &DensityOperator, n: usize) -> CMatrix {
    (1..n).fold(rho.matrix().clone(), |acc, _| {
        linalg::kron(&acc, rho.matrix())
    })
}

#[test]
fn typical_subspace_trivial_cases() {
    let pure = StateVector::qubit_bloch(0.8, 0.3).density();
    let sub = build_typical_subspace(&pure, 6, 0.1, CAP).unwrap();
    assert_eq!(sub.dimension(), 1);
    close(sub.weight, 1.0, 1e-12);
    let v = sub.eigenvector(sub.members[0]);
    let psi = StateVector::qubit_bloch(0.8, 0.3);
    let product = (1..6).fold(psi.amps().clone(), |acc, _| {
        linalg::kron_vec(&acc, psi.amps())
    });
    close(v.dotc(&product).norm(), 1.0, 1e-10);

    let mixed = DensityOperator::maximally_mixed(vec![2]).unwrap();
    let sub = build_typical_subspace(&mixed, 8, 0.01, CAP).unwrap();
    assert_eq!(sub.dimension(), 256);
    close(sub.weight, 1.0, 1e-12);
}

#[test]
fn typical_subspace_against_enumeration() {
    let (n, delta) = (12u64, 0.1);
    let rho = DensityOperator::diagonal(&[0.9, 0.1]).unwrap();
    let sub = build_typical_subspace(&rho, n as usize, delta, CAP).unwrap();
    let s = -(0.9f64 * 0.9f64.log2() + 0.1 * 0.1f64.log2());
    close(sub.entropy_bits, s, 1e-12);
    // eigenvalues depend only on the number k of minority letters
    let (mut dim, mut weight) = (0.0, 0.0);
    for k in 0..=n {
        let log_l = (n - k) as f64 * 0.9f64.log2() + k as f64 * 0.1f64.log2();
        if log_l > -(n as f64) * (s + delta) && log_l < -(n as f64) * (s - delta) {
            dim += binomial(n, k);
            weight += binomial(n, k) * log_l.exp2();
        }
    }
    assert_eq!(sub.dimension() as f64, dim);
    close(sub.weight, weight, 1e-12);
    assert!(sub.checks.eigenvalue_window);
    assert!(sub.checks.dimension_upper);
    assert!(sub.checks.dimension_lower);
    assert!(sub.checks.spanned_by_eigenvectors);
    assert!(sub.dimension() as f64 <= (n as f64 * (s + delta)).exp2());
}

#[test]
fn typical_projector_properties() {
    let mut rng = substream(60, 0);
    let rho = random_density(&[2], 2, &mut rng);
    let sub = build_typical_subspace(&rho, 6, 0.2, CAP).unwrap();
    let pi = sub.projector().unwrap();
    assert!(linalg::max_abs_diff(&(&pi * &pi), &pi) < 1e-10);
    assert!(linalg::hermiticity_error(&pi) < 1e-12);
    close(linalg::trace(&pi).re, sub.dimension() as f64, 1e-9);
    let block = block_power(&rho, 6);
    assert!(linalg::max_abs_diff(&(&pi * &block), &(&block * &pi)) < 1e-10);
    close(linalg::trace(&(&pi * &block)).re, sub.weight, 1e-10);

    let big = build_typical_subspace(&rho, 11, 0.2, CAP).unwrap();
    assert!(matches!(big.projector(), Err(Error::CapExceeded { .. })));
    assert!(matches!(
        build_typical_subspace(&rho, 30, 0.2, CAP),
        Err(Error::CapExceeded { .. })
    ));
}

#[test]
fn schumacher_eigenensemble_above_entropy() {
    let eigen = SignalSource::Density(DensityOperator::diagonal(&[0.9, 0.1]).unwrap());
    let rate = 0.469 + 0.3;
    let fids: Vec<f64> = [4, 8, 12]
        .iter()
        .map(|&n| {
            let (r, sub) =
                schumacher_roundtrip(&eigen, n, 0.1, SubspaceSelection::Truncated { rate }, CAP)
                    .unwrap();
            // orthogonal signals: a word survives exactly when it lies in the kept span
            close(r.avg_fidelity, sub.weight, 1e-12);
            r.avg_fidelity
        })
        .collect();
    assert!(fids.windows(2).all(|w| w[1] > w[0]), "{fids:?}");
    assert!(fids[2] > 0.98, "{fids:?}");
}

#[test]
fn schumacher_below_entropy() {
    let source = tilted_pair();
    let s = schumacher_roundtrip(&source, 4, 0.1, SubspaceSelection::Typical, CAP)
        .unwrap()
        .0
        .entropy_bits;
    let rate = s - 0.1;
    let fids: Vec<f64> = [8, 10, 12]
        .iter()
        .map(|&n| {
            schumacher_roundtrip(&source, n, 0.1, SubspaceSelection::Truncated { rate }, CAP)
                .unwrap()
                .0
        })
        .map(|r| {
            assert!(r.rate < s - 0.1 + 1e-12);
            r.avg_fidelity
        })
        .collect();
    assert!(fids[2] < 0.5, "{fids:?}");
    assert!(fids[2] < fids[0], "{fids:?}");
}

#[test]
fn schumacher_single_letter() {
    let e = Ensemble::pure(
        Distribution::new(vec![1.0]).unwrap(),
        &[StateVector::qubit_bloch(1.0, 2.0)],
    )
    .unwrap();
    let (r, _) = schumacher_roundtrip(
        &SignalSource::Ensemble(e),
        8,
        0.1,
        SubspaceSelection::Typical,
        CAP,
    )
    .unwrap();
    assert_eq!(r.dimension, 1);
    assert_eq!(r.rate, 0.0);
    close(r.avg_fidelity, 1.0, 1e-12);
}

#[test]
fn schumacher_typical_meets_lemma() {
    for source in [
        tilted_pair(),
        SignalSource::Density(DensityOperator::diagonal(&[0.9, 0.1]).unwrap()),
    ] {
        let (r, sub) =
            schumacher_roundtrip(&source, 12, 0.1, SubspaceSelection::Typical, CAP).unwrap();
        assert!(r.avg_fidelity > r.lemma_bound);
        close(r.eta, 1.0 - sub.weight, 1e-15);
        close(r.entanglement_fidelity, sub.weight * sub.weight, 1e-15);
        assert!(sub.members.contains(&r.junk.unwrap()));
    }
    let mixed = Ensemble::new(
        Distribution::new(vec![1.0]).unwrap(),
        vec![DensityOperator::maximally_mixed(vec![2]).unwrap()],
    )
    .unwrap();
    assert!(schumacher_roundtrip(
        &SignalSource::Ensemble(mixed),
        4,
        0.1,
        SubspaceSelection::Typical,
        CAP
    )
    .is_err());
}

/// Explicit check through a purification of ρ^⊗n: apply the transposition
/// channel to the system half and measure the overlap with the original.
#[test]
fn compression_preserves_entanglement() {
    let mut rng = substream(61, 0);
    let mut checked = 0;
    for n in [3usize, 4, 5, 6, 7] {
        let rho = random_density(&[2], 2, &mut rng);
        let source = SignalSource::Density(rho.clone());
        let (r, sub) =
            schumacher_roundtrip(&source, n, 0.3, SubspaceSelection::Typical, CAP).unwrap();
        if sub.dimension() == 0 {
            assert!(transposition_channel(&sub, r.junk).is_err());
            continue;
        }
        checked += 1;
        let channel = transposition_channel(&sub, r.junk).unwrap();
        let dim = sub.block_dim();
        // |Ψ⟩ = Σ √λᵢ |eᵢ⟩|i⟩ stored as the dim × dim coefficient matrix M
        let mut m = CMatrix::zeros(dim, dim);
        for i in 0..dim {
            let lambda: f64 = {
                let mut rest = i;
                let mut l = 1.0;
                for _ in 0..n {
                    l *= sub.local_eigenvalues[rest % 2];
                    rest /= 2;
                }
                l
            };
            let e = sub.eigenvector(i);
            m.set_column(i, &(e * c(lambda.sqrt(), 0.0)));
        }
        close(m.norm_squared(), 1.0, 1e-10);
        let fe: f64 = channel
            .operators()
            .iter()
            .map(|k| linalg::trace(&(m.adjoint() * k * &m)).norm_sqr())
            .sum();
        close(fe, r.entanglement_fidelity, 1e-9);
        assert!(fe > r.lemma_bound, "n = {n}: {fe} vs {}", r.lemma_bound);
    }
    assert!(checked >= 3);
}

#[test]
fn qecc_examples() {
    let code = CodeSubspace::repetition3();
    let flips = qecc_check(&code, &PauliErrorSet::single('X', 3).unwrap()).unwrap();
    assert!(flips.correctable);
    assert_eq!(flips.pairs_checked, 16);

    let phase = qecc_check(&code, &PauliErrorSet::new(&["III", "ZII"]).unwrap()).unwrap();
    assert!(!phase.correctable);
    match phase.witness.unwrap() {
        QeccViolation::DiagonalMismatch {
            value, reference, ..
        } => {
            assert!((value[0] - reference[0]).abs() > 1.0);
        }
        other => panic!("unexpected witness {other:?}"),
    }

    let trivial = qecc_check(&code, &PauliErrorSet::new(&["III"]).unwrap()).unwrap();
    assert!(trivial.correctable && trivial.witness.is_none());

    for q in 0..3 {
        let mut z = vec!['I'; 3];
        z[q] = 'Z';
        let z: String = z.into_iter().collect();
        let set = PauliErrorSet::new(&["III", "XII", "IXI", "IIX", z.as_str()]).unwrap();
        assert!(!qecc_check(&code, &set).unwrap().correctable, "{z}");
    }
    // a lone Y flip is distinguishable, but not together with the X flip on the same qubit
    assert!(
        qecc_check(&code, &PauliErrorSet::new(&["III", "YII"]).unwrap())
            .unwrap()
            .correctable
    );
    let xy = PauliErrorSet::new(&["III", "XII", "YII"]).unwrap();
    assert!(!qecc_check(&code, &xy).unwrap().correctable);
    assert!(qecc_check(&code, &PauliErrorSet::single('X', 4).unwrap()).is_err());
}

#[test]
fn pauli_strings() {
    assert!(PauliErrorSet::new(&["IXQ"]).is_err());
    assert!(PauliErrorSet::new(&["IX", "XXX"]).is_err());
    assert_eq!(PauliErrorSet::weight("XIZY"), 3);
    let y = pauli_operator("Y").unwrap();
    assert!(linalg::max_abs_diff(&y, &(linalg::pauli_y() * c(0.0, -1.0))) < 1e-15);
    let xz = pauli_operator("XZ").unwrap();
    assert!(
        linalg::max_abs_diff(&xz, &linalg::kron(&linalg::pauli_x(), &linalg::pauli_z())) < 1e-15
    );
    let json = serde_json::to_string(&PauliErrorSet::single('Z', 2).unwrap()).unwrap();
    assert_eq!(json, r#"["II","ZI","IZ"]"#);
    let code: CodeSubspace =
        serde_json::from_str(&serde_json::to_string(&CodeSubspace::repetition3()).unwrap())
            .unwrap();
    assert_eq!(code, CodeSubspace::repetition3());
    let overlapping = r#"{"codewords": [[[1,0],[0,0]], [[0.6,0],[0.8,0]]]}"#;
    assert!(serde_json::from_str::<CodeSubspace>(overlapping).is_err());
}

#[test]
fn recovery_examples() {
    let none = recovery_demo(c(0.6, 0.0), c(0.0, 0.8), "III").unwrap();
    close(none.fidelity, 1.0, 1e-12);
    close(none.syndrome_probs[0], 1.0, 1e-12);

    let mut reference: Option<[f64; 4]> = None;
    for i in 0..5 {
        for j in 0..4 {
            let theta = PI * i as f64 / 4.0;
            let phi = PI * j as f64 / 2.0;
            let (a, b) = (
                c((theta / 2.0).cos(), 0.0),
                num_complex::Complex64::from_polar((theta / 2.0).sin(), phi),
            );
            for err in ["IXI", "XII", "IIX"] {
                let r = recovery_demo(a, b, err).unwrap();
                assert!(r.correctable);
                close(r.fidelity, 1.0, 1e-10);
            }
            let r = recovery_demo(a, b, "IXI").unwrap();
            match reference {
                None => reference = Some(r.syndrome_probs),
                Some(s) => {
                    for (x, y) in s.iter().zip(r.syndrome_probs) {
                        close(*x, y, 1e-12);
                    }
                }
            }
        }
    }

    let z = recovery_demo(c(0.6, 0.0), c(0.8, 0.0), "ZII").unwrap();
    assert!(!z.correctable);
    assert!(z.fidelity < 1.0 - 1e-3);
    // Z flips the relative sign: fidelity (|α|² − |β|²)²
    close(z.fidelity, (0.36f64 - 0.64).powi(2), 1e-12);
    assert!(recovery_demo(c(1.0, 0.0), c(0.0, 0.0), "XX").is_err());
}

#[test]
fn hamming_examples() {
    close(hamming_bound(7, 1).unwrap(), 4.0, 1e-12);
    close(hamming_bound(5, 2).unwrap(), 1.0, 1e-12);
    for n in [1, 9, 40] {
        close(hamming_bound(n, 0).unwrap(), n as f64, 0.0);
    }
    close(hamming_bound(23, 3).unwrap(), 12.0, 1e-12);
    assert!(hamming_bound(3, 4).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn lemma_bound_holds(seed in any::<u64>(), n in 2usize..=10, letters in 2usize..4, delta in 0.05f64..0.5) {
        let mut rng = substream(seed, 0);
        let w = random_simplex(letters, &mut rng);
        let states: Vec<StateVector> = (0..letters).map(|_| random_state_vector(&[2], &mut rng)).collect();
        let e = Ensemble::pure(Distribution::new(w).unwrap(), &states).unwrap();
        let (r, _) = schumacher_roundtrip(&SignalSource::Ensemble(e), n, delta, SubspaceSelection::Typical, CAP).unwrap();
        prop_assert!(r.avg_fidelity > r.lemma_bound);
        prop_assert!(r.avg_fidelity <= 1.0 + 1e-12);
    }

    #[test]
    fn typical_projector_commutes(seed in any::<u64>(), n in 1usize..=7) {
        let mut rng = substream(seed, 1);
        let rho = random_density(&[2], 2, &mut rng);
        let sub = build_typical_subspace(&rho, n, 0.25, CAP).unwrap();
        let pi = sub.projector().unwrap();
        let block = block_power(&rho, n);
        prop_assert!(linalg::max_abs_diff(&(&pi * &block), &(&block * &pi)) < 1e-10);
    }
}
