use proptest::prelude::*;
use qinfo::dynamics::*;
use qinfo::linalg::{self, c, CMatrix};
use qinfo::random::{random_channel, random_density, random_simplex, substream};
use qinfo::state::{von_neumann_entropy, DensityOperator, StateVector};
use qinfo::{Error, LogBase};

fn close(a: f64, b: f64, tol: f64) {
    assert!((a - b).abs() <= tol, "{a} vs {b} (tol {tol})");
}

fn plus() -> StateVector {
    StateVector::qubit_at_angle(std::f64::consts::FRAC_PI_4)
}

fn half() -> CMatrix {
    CMatrix::identity(2, 2).scale(0.5)
}

#[test]
fn construction_rejects_invalid_operators() {
    let p0 = StateVector::basis(2, 0).unwrap().density().matrix().clone();
    assert!(ProjectiveMeasurement::new(vec![p0.clone()]).is_err());
    assert!(ProjectiveMeasurement::new(vec![p0.clone(), p0.clone()]).is_err());
    assert!(Povm::new(vec![p0.clone()]).is_err());
    let neg = CMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
        c(1.5, 0.0),
        c(-0.5, 0.0),
    ]));
    assert!(Povm::new(vec![neg.clone(), CMatrix::identity(2, 2) - neg]).is_err());
    assert!(KrausChannel::new(vec![CMatrix::identity(2, 2).scale(0.9)]).is_err());
}

#[test]
fn measurement_probabilities() {
    let z = ProjectiveMeasurement::computational(2);
    let mixed = DensityOperator::maximally_mixed(vec![2]).unwrap();
    assert_eq!(
        measure_probabilities(&mixed, &z).unwrap().probs(),
        &[0.5, 0.5]
    );
    let zero = StateVector::basis(2, 0).unwrap().density();
    assert_eq!(
        measure_probabilities(&zero, &z).unwrap().probs(),
        &[1.0, 0.0]
    );

    let trine = Povm::trine();
    let psi0 = trine_states()[0].density();
    let p = measure_probabilities(&psi0, &trine).unwrap();
    // |⟨ψ0|ψk⟩|² = 1/4 for k ≠ 0, scaled by 2/3
    for (got, want) in p.probs().iter().zip([2.0 / 3.0, 1.0 / 6.0, 1.0 / 6.0]) {
        close(*got, want, 1e-12);
    }
    let big = DensityOperator::maximally_mixed(vec![3]).unwrap();
    assert!(matches!(
        measure_probabilities(&big, &z),
        Err(Error::DimensionMismatch { .. })
    ));
}

#[test]
fn projective_updates() {
    let z = ProjectiveMeasurement::computational(2);
    let post = projective_update(&plus().density(), &z, Some(0)).unwrap();
    assert!(
        linalg::max_abs_diff(
            post.matrix(),
            StateVector::basis(2, 0).unwrap().density().matrix()
        ) < 1e-14
    );
    let unread = projective_update(&plus().density(), &z, None).unwrap();
    assert!(linalg::max_abs_diff(unread.matrix(), &half()) < 1e-14);

    let x = ProjectiveMeasurement::qubit_at_angle(std::f64::consts::FRAC_PI_4);
    let again = projective_update(&plus().density(), &x, Some(0)).unwrap();
    assert!(linalg::max_abs_diff(again.matrix(), plus().density().matrix()) < 1e-14);

    let zero = StateVector::basis(2, 0).unwrap().density();
    assert!(matches!(
        projective_update(&zero, &z, Some(1)),
        Err(Error::ZeroProbability(1))
    ));
}

#[test]
fn channel_examples() {
    let mut rng = substream(10, 0);
    let rho = random_density(&[2], 2, &mut rng);
    let id = apply_channel(&rho, &KrausChannel::identity(2)).unwrap();
    assert!(linalg::max_abs_diff(id.matrix(), rho.matrix()) < 1e-15);

    let dep = apply_channel(&rho, &KrausChannel::depolarizing(1.0).unwrap()).unwrap();
    // direct Kraus sum: (ρ + XρX + YρY + ZρZ)/4
    let paulis = [
        linalg::identity(2),
        linalg::pauli_x(),
        linalg::pauli_y(),
        linalg::pauli_z(),
    ];
    let oracle = paulis
        .iter()
        .fold(CMatrix::zeros(2, 2), |acc, s| acc + s * rho.matrix() * s)
        .scale(0.25);
    assert!(linalg::max_abs_diff(dep.matrix(), &oracle) < 1e-14);
    assert!(linalg::max_abs_diff(dep.matrix(), &half()) < 1e-14);

    let deph = apply_channel(&plus().density(), &KrausChannel::dephasing(1.0).unwrap()).unwrap();
    assert!(linalg::max_abs_diff(deph.matrix(), &half()) < 1e-14);

    assert!(KrausChannel::depolarizing(1.5).is_err());
    let big = DensityOperator::maximally_mixed(vec![3]).unwrap();
    assert!(apply_channel(&big, &KrausChannel::identity(2)).is_err());
}

#[test]
fn complete_positivity() {
    let mut rng = substream(11, 0);
    let ch = random_channel(3, 2, &mut rng);
    assert!(is_completely_positive(&Superoperator::Kraus(ch)).completely_positive);

    let transpose = Superoperator::from_map(2, 2, |m| m.transpose()).unwrap();
    let report = is_completely_positive(&transpose);
    assert!(!report.completely_positive);
    close(report.min_eigenvalue, -0.5, 1e-12);
    // the witness is the singlet direction of the swap operator
    let w = report.witness.unwrap();
    let singlet = [
        0.0,
        std::f64::consts::FRAC_1_SQRT_2,
        -std::f64::consts::FRAC_1_SQRT_2,
        0.0,
    ];
    let overlap: f64 = w
        .iter()
        .zip(singlet)
        .map(|(a, b)| a * b)
        .sum::<num_complex::Complex64>()
        .norm();
    close(overlap, 1.0, 1e-9);

    let identity = Superoperator::from_map(2, 2, |m| m.clone()).unwrap();
    let r = is_completely_positive(&identity);
    assert!(r.completely_positive && r.witness.is_none());

    let nonlinear = Superoperator::from_map(2, 2, |m| m.map(|z| c(z.norm(), 0.0)));
    assert!(matches!(nonlinear, Err(Error::NotLinear(_))));
}

#[test]
fn action_matrix_agrees_with_kraus_form() {
    let mut rng = substream(12, 0);
    let ch = random_channel(2, 3, &mut rng);
    let kraus = Superoperator::Kraus(ch.clone());
    let matrix = Superoperator::from_map(2, 2, |m| ch.act(m)).unwrap();
    assert!(linalg::max_abs_diff(&kraus.choi(), &matrix.choi()) < 1e-12);
    let rho = random_density(&[2], 2, &mut rng);
    assert!(linalg::max_abs_diff(&kraus.apply(rho.matrix()), &matrix.apply(rho.matrix())) < 1e-12);
}

#[test]
fn ancilla_realizations() {
    let proj: Povm = ProjectiveMeasurement::computational(3).into();
    let r = povm_via_ancilla(&proj).unwrap();
    assert_eq!(r.ancilla_dim, 3);
    assert!(r.max_error < 1e-12);

    let r = povm_via_ancilla(&Povm::trine()).unwrap();
    assert_eq!(r.ancilla_dim, 3);
    assert!(r.max_error < 1e-9);
    for (got, want) in r.recovered.iter().zip(Povm::trine().elements()) {
        assert!(linalg::max_abs_diff(got, want) < 1e-9);
    }
    let n = r.unitary.nrows();
    assert!(
        linalg::max_abs_diff(
            &(r.unitary.adjoint() * &r.unitary),
            &CMatrix::identity(n, n)
        ) < 1e-9
    );

    let trivial = Povm::new(vec![CMatrix::identity(2, 2)]).unwrap();
    let r = povm_via_ancilla(&trivial).unwrap();
    assert_eq!(r.ancilla_dim, 1);
    assert!(r.max_error < 1e-12);
}

#[test]
fn json_round_trip() {
    let trine = Povm::trine();
    let back: Povm = serde_json::from_str(&serde_json::to_string(&trine).unwrap()).unwrap();
    for (a, b) in back.elements().iter().zip(trine.elements()) {
        assert!(linalg::max_abs_diff(a, b) < 1e-15);
    }
    let bad: Result<KrausChannel, _> = serde_json::from_str("[[[[0.5,0],[0,0]],[[0,0],[0.5,0]]]]");
    assert!(bad.is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn povm_probabilities_are_real_and_nonnegative(seed in any::<u64>(), d in 2usize..4) {
        let mut rng = substream(seed, 0);
        // POVM from a random isometry: E_k = V_k† V_k
        let ch = random_channel(d, 3, &mut rng);
        let elems: Vec<CMatrix> = ch.operators().iter().map(|k| k.adjoint() * k).collect();
        let povm = Povm::new(elems).unwrap();
        let rho = random_density(&[d], d, &mut rng);
        for e in povm.elements() {
            let z = rho.expectation(e).unwrap();
            prop_assert!(z.im.abs() <= 1e-12);
            prop_assert!(z.re >= -1e-12);
        }
        let p = measure_probabilities(&rho, &povm).unwrap();
        prop_assert!((p.probs().iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn channels_are_linear_and_trace_preserving(seed in any::<u64>(), k in 1usize..4) {
        let mut rng = substream(seed, 1);
        let ch = random_channel(3, k, &mut rng);
        let w = random_simplex(3, &mut rng);
        let states: Vec<_> = (0..3).map(|_| random_density(&[3], 2, &mut rng)).collect();
        let mix = DensityOperator::mixture(&w, &states).unwrap();
        let lhs = apply_channel(&mix, &ch).unwrap();
        let rhs = w.iter().zip(&states).fold(CMatrix::zeros(3, 3), |acc, (p, r)| {
            acc + apply_channel(r, &ch).unwrap().matrix().scale(*p)
        });
        prop_assert!(linalg::max_abs_diff(lhs.matrix(), &rhs) < 1e-12);
        prop_assert!((linalg::trace(lhs.matrix()).re - 1.0).abs() < 1e-10);
        prop_assert!(linalg::hermiticity_error(lhs.matrix()) < 1e-12);
        prop_assert!(*lhs.spectral().eigenvalues.last().unwrap() > -1e-10);
    }

    #[test]
    fn unread_measurement_never_lowers_entropy(seed in any::<u64>(), theta in 0.0f64..3.2) {
        let mut rng = substream(seed, 2);
        let rho = random_density(&[2], 2, &mut rng);
        let m = ProjectiveMeasurement::qubit_at_angle(theta);
        let post = projective_update(&rho, &m, None).unwrap();
        prop_assert!(von_neumann_entropy(&post, LogBase::Nats) >= von_neumann_entropy(&rho, LogBase::Nats) - 1e-12);
    }
}
