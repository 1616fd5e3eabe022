use std::f64::consts::SQRT_2;

use approx::assert_abs_diff_eq;
use monogamy::catalog::{lookup, random_mixed, random_qubits, w_state, Source, STANDARD_LABELS};
use monogamy::convex_roof::OracleConfig;
use monogamy::engine::{Evaluator, ExponentParams, Policy, Split};
use monogamy::linalg::{CMatrix, C64};
use monogamy::measures::{
    concurrence_assistance_two_qubit, concurrence_pure, concurrence_two_qubit, MeasureDescriptor, Status,
};
use monogamy::state::{PartitionSpec, PureState};
use proptest::prelude::*;

fn local_unitary(theta: f64, phi: f64, chi: f64) -> CMatrix {
    let (c, s) = (theta.cos(), theta.sin());
    let e = |x: f64| C64::from_polar(1.0, x);
    CMatrix::from_vec(2, 2, vec![e(phi) * c, -e(-chi) * s, e(chi) * s, e(-phi) * c])
}

fn cheap_oracle(seed: u64) -> OracleConfig {
    OracleConfig {
        trials: 100,
        seed,
        polish_steps: 25,
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn partial_trace_composes(seed in any::<u64>()) {
        let rho = random_qubits(4, seed).unwrap().density();
        let direct = rho.partial_trace(&[1, 3]).unwrap();
        let staged = rho.partial_trace(&[0, 1, 3]).unwrap().partial_trace(&[1, 2]).unwrap();
        prop_assert!(direct.matrix().max_abs_diff(staged.matrix()) < 1e-13);
    }

    #[test]
    fn concurrence_is_local_unitary_invariant(
        seed in any::<u64>(),
        angles in prop::array::uniform3(0.0f64..6.3),
        party in 0usize..3,
    ) {
        let psi = random_qubits(3, seed).unwrap();
        let u = local_unitary(angles[0], angles[1], angles[2]);
        let moved = psi.apply_local(party, &u).unwrap();
        for keep in [&[0][..], &[1], &[0, 2]] {
            let cut = PartitionSpec::new(keep, 3).unwrap();
            let a = concurrence_pure(&psi, &cut).unwrap().value;
            let b = concurrence_pure(&moved, &cut).unwrap().value;
            prop_assert!((a - b).abs() < 1e-12);
        }
        let pa = concurrence_two_qubit(&psi.reduced(&[0, 1]).unwrap()).unwrap().value;
        let pb = concurrence_two_qubit(&moved.reduced(&[0, 1]).unwrap()).unwrap().value;
        prop_assert!((pa - pb).abs() < 1e-10);
    }

    #[test]
    fn two_qubit_pure_concurrence_is_twice_determinant(seed in any::<u64>()) {
        let psi = random_qubits(2, seed).unwrap();
        let a = psi.amplitudes();
        let det = 2.0 * (a[0] * a[3] - a[1] * a[2]).norm();
        let cut = PartitionSpec::new(&[0], 2).unwrap();
        prop_assert!((concurrence_pure(&psi, &cut).unwrap().value - det).abs() < 1e-12);
        let rho = psi.density();
        prop_assert!((concurrence_two_qubit(&rho).unwrap().value - det).abs() < 1e-10);
        prop_assert!((concurrence_assistance_two_qubit(&rho).unwrap().value - det).abs() < 1e-10);
    }

    #[test]
    fn tripartite_residual_nonnegative(seed in any::<u64>(), alpha in 2.0f64..5.0) {
        let e = Evaluator::new(random_qubits(3, seed).unwrap(), MeasureDescriptor::CONCURRENCE, OracleConfig::default());
        let r = e.residual_tripartite([0, 1, 2], alpha).unwrap();
        prop_assert_eq!(r.status, Status::Exact);
        prop_assert!(r.value >= -1e-9);
    }

    #[test]
    fn weighted_bounds_collapse_at_beta(seed in any::<u64>()) {
        let e = Evaluator::new(random_qubits(4, seed).unwrap(), MeasureDescriptor::CONCURRENCE, cheap_oracle(seed));
        let p = ExponentParams::new(2.0, 2.0).unwrap();
        let t1 = e.theorem1(&p).unwrap().rhs;
        let t3 = e.with_residuals(&p, Policy::Max).unwrap().rhs;
        for m in 0..=2 {
            prop_assert!((e.theorem4(&p, Split::Fixed(m)).unwrap().rhs - t1).abs() < 1e-12);
            prop_assert!((e.theorem5(&p, Split::Fixed(m)).unwrap().rhs - t3).abs() < 1e-12);
        }
    }

    #[test]
    fn lemma_coefficient_only_raises_rhs(seed in any::<u64>(), alpha in 2.0f64..6.0) {
        let e = Evaluator::new(random_qubits(3, seed).unwrap(), MeasureDescriptor::CONCURRENCE, OracleConfig::default());
        let p = ExponentParams::new(alpha, 2.0).unwrap();
        prop_assert!(e.lemma(&p).unwrap().rhs >= e.theorem1(&p).unwrap().rhs - 1e-12);
    }
}

#[test]
fn assistance_dominates_concurrence() {
    for seed in 0..500 {
        let rho = random_mixed(&[2, 2], 4, seed).unwrap();
        let c = concurrence_two_qubit(&rho).unwrap().value;
        let ca = concurrence_assistance_two_qubit(&rho).unwrap().value;
        assert!(ca >= c - 1e-12, "seed {seed}: {ca} < {c}");
    }
}

#[test]
fn w4_curves_ordered_in_alpha() {
    let e = Evaluator::new(
        w_state(4).unwrap(),
        MeasureDescriptor::CONCURRENCE,
        OracleConfig::default(),
    );
    for i in 0..=60 {
        let alpha = 2.0 + 0.05 * i as f64;
        let p = ExponentParams::new(alpha, 2.0).unwrap();
        let t1 = e.theorem1(&p).unwrap();
        let t3 = e.with_residuals(&p, Policy::Max).unwrap();
        if i == 0 {
            for y in [t1.lhs, t1.rhs, t3.rhs] {
                assert_abs_diff_eq!(y, 0.75, epsilon = 1e-9);
            }
        } else {
            assert!(
                t1.lhs >= t3.rhs - 1e-9 && t3.rhs >= t1.rhs - 1e-9,
                "alpha {alpha}"
            );
        }
    }
}

#[test]
fn w6_corollary2() {
    let e = Evaluator::new(
        w_state(6).unwrap(),
        MeasureDescriptor::CONCURRENCE,
        cheap_oracle(6),
    );
    let c = e.corollary2().unwrap();
    assert_abs_diff_eq!(c.lhs, 1.0, epsilon = 1e-12);
    assert!(c.satisfied);
    assert_eq!(c.status, Status::Estimate);
    assert_abs_diff_eq!(e.assistance(2, 4).unwrap().value, 1.0 / 3.0, epsilon = 1e-12);
}

#[test]
fn catalog_expected_values_reproduce() {
    for label in STANDARD_LABELS {
        let entry = lookup(label).unwrap();
        for ev in &entry.expected {
            let v = ev
                .quantity
                .evaluate(
                    &entry.state,
                    &MeasureDescriptor::CONCURRENCE,
                    Some(&OracleConfig::default()),
                )
                .unwrap();
            let tol = if v.status == Status::Exact { 1e-10 } else { 5e-3 };
            let name = ev.quantity.label(&entry.party_names, "C");
            assert!(
                (v.value - ev.value).abs() <= tol,
                "{label} {name}: got {} want {}",
                v.value,
                ev.value
            );
        }
    }
    let fs = lookup("fs").unwrap();
    assert!(fs.expected.iter().any(|e| e.source == Source::Reference));
}

#[test]
fn file_round_trip_feeds_engine() {
    let psi = random_qubits(3, 11).unwrap();
    let text = monogamy::state::format_state(&psi);
    let back: PureState = text.parse().unwrap();
    let a = Evaluator::new(psi, MeasureDescriptor::CONCURRENCE, OracleConfig::default());
    let b = Evaluator::new(back, MeasureDescriptor::CONCURRENCE, OracleConfig::default());
    let p = ExponentParams::new(2.5, 2.0).unwrap();
    assert_abs_diff_eq!(
        a.theorem1(&p).unwrap().gap,
        b.theorem1(&p).unwrap().gap,
        epsilon = 1e-12
    );
}

#[test]
fn eof_bounds_use_their_own_beta() {
    let e = Evaluator::new(
        w_state(4).unwrap(),
        MeasureDescriptor::EOF,
        OracleConfig::default(),
    );
    assert!(ExponentParams::for_measure(1.2, e.measure()).is_err());
    let p = ExponentParams::for_measure(SQRT_2, e.measure()).unwrap();
    let t1 = e.theorem1(&p).unwrap();
    assert!(t1.satisfied);
    assert_eq!(t1.status, Status::Exact);
}
