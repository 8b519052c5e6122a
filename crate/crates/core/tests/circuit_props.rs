use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;
use qrps_core::circuits::{
    angles_from_distribution, cnot, diffusion, prepare_alpha, ref_actions, ref_alpha, rotation, rotation_z,
    rz_pulse_identity, u_zz, FlagSplit, PreparationAngles, RzSign, StationaryDistribution,
};
use qrps_core::qsim::{Unitary, C64};
use qrps_oracles::*;

const TAU: f64 = 2.0 * PI;

fn drive_axis(phi: f64) -> DMatrix<C64> {
    pauli_x() * c(phi.cos(), 0.0) - pauli_y() * c(phi.sin(), 0.0)
}

/// |α⟩ straight from the angles: R(θ, π/2)|0⟩ = (cos θ/2, sin θ/2).
fn alpha_from_angles(t1: f64, t2: f64) -> DVector<C64> {
    let q0 = [(t1 / 2.0).cos(), (t1 / 2.0).sin()];
    let q1 = [(t2 / 2.0).cos(), (t2 / 2.0).sin()];
    DVector::from_fn(4, |i, _| c(q0[i >> 1] * q1[i & 1], 0.0))
}

fn reflection_oracle(alpha: &DVector<C64>) -> DMatrix<C64> {
    outer(alpha) * c(2.0, 0.0) - identity(4)
}

fn flag_reflection_oracle() -> DMatrix<C64> {
    DMatrix::from_diagonal(&DVector::from_vec(vec![c(1.0, 0.0), c(1.0, 0.0), c(-1.0, 0.0), c(-1.0, 0.0)]))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn rotations_match_matrix_exponential(theta in -TAU..TAU, phi in -TAU..TAU) {
        prop_assert!(max_abs_diff(rotation(theta, phi).matrix(), &exp_i_half(theta, &drive_axis(phi))) < 1e-12);
        prop_assert!(max_abs_diff(rotation_z(theta).matrix(), &exp_i_half(-theta, &pauli_z())) < 1e-12);
        prop_assert!(max_abs_diff(u_zz(theta).matrix(), &exp_i_half(theta, &kron(&pauli_z(), &pauli_z()))) < 1e-12);
    }

    #[test]
    fn every_gate_is_unitary(t1 in -TAU..TAU, t2 in -TAU..TAU, phi in -TAU..TAU) {
        let angles = PreparationAngles::new(t1, t2);
        for u in [rotation(t1, phi), rotation_z(t1), u_zz(t2), diffusion(&angles), ref_alpha(&angles)] {
            prop_assert!(u.unitarity_error() < 1e-12);
        }
    }

    #[test]
    fn rotation_inverse(theta in -TAU..TAU, phi in -TAU..TAU) {
        let product = rotation(theta, phi).mul(&rotation(-theta, phi));
        prop_assert!(max_abs_diff(product.matrix(), &identity(2)) < 1e-12);
    }

    #[test]
    fn preparation_round_trip(eps in 1e-6..=1.0f64, fraction in 0.0..=1.0f64) {
        let angles = angles_from_distribution(eps, FlagSplit::Fraction(fraction)).unwrap();
        let p = prepare_alpha(&angles).probabilities().unwrap();
        let expected = [eps * fraction, eps * (1.0 - fraction), (1.0 - eps) * fraction, (1.0 - eps) * (1.0 - fraction)];
        for (got, want) in p.probs().iter().zip(expected) {
            prop_assert!((got - want).abs() < 1e-10, "{got} vs {want}");
        }
        prop_assert!((angles.epsilon() - eps).abs() < 1e-10);
    }

    #[test]
    fn reflections_match_outer_product(t1 in 0.0..TAU, t2 in 0.0..TAU) {
        let angles = PreparationAngles::new(t1, t2);
        let r_alpha = reflection_oracle(&alpha_from_angles(t1, t2));
        prop_assert!(phase_free_diff(ref_alpha(&angles).matrix(), &r_alpha) < 1e-10);
        prop_assert!(phase_free_diff(diffusion(&angles).matrix(), &(&r_alpha * flag_reflection_oracle())) < 1e-10);
    }

    #[test]
    fn grover_sector_is_invariant(eps in 1e-3..0.999f64, fraction in 0.01..0.99f64) {
        let angles = angles_from_distribution(eps, FlagSplit::Fraction(fraction)).unwrap();
        let alpha = alpha_from_angles(angles.theta1(), angles.theta2());
        let mut flagged = alpha.clone();
        flagged[2] = c(0.0, 0.0);
        flagged[3] = c(0.0, 0.0);
        let unflagged = &alpha - &flagged;
        let basis = [flagged.normalize(), unflagged.normalize()];
        let d = diffusion(&angles);
        let mut psi = alpha.clone();
        for _ in 0..=10 {
            let weight: f64 = basis.iter().map(|b| b.dotc(&psi).norm_sqr()).sum();
            prop_assert!((weight - 1.0).abs() < 1e-9);
            psi = d.matrix() * psi;
        }
    }
}

/// Fixed 12 × 12 grid of angle pairs, on top of the random draws above.
#[test]
fn decomposition_identities_on_angle_grid() {
    let mut checked = 0;
    for i in 0..12 {
        for j in 0..12 {
            let (t1, t2) = (TAU * i as f64 / 12.0, TAU * j as f64 / 12.0);
            let angles = PreparationAngles::new(t1, t2);
            let r_alpha = reflection_oracle(&alpha_from_angles(t1, t2));
            assert!(phase_free_diff(ref_alpha(&angles).matrix(), &r_alpha) < 1e-10, "ref_alpha at ({t1}, {t2})");
            let d = &r_alpha * flag_reflection_oracle();
            assert!(phase_free_diff(diffusion(&angles).matrix(), &d) < 1e-10, "diffusion at ({t1}, {t2})");
            checked += 1;
        }
    }
    assert!(checked >= 100);
}

#[test]
fn cnot_matches_truth_table() {
    let one = c(1.0, 0.0);
    let zero = c(0.0, 0.0);
    #[rustfmt::skip]
    let truth = DMatrix::from_row_slice(4, 4, &[
        one, zero, zero, zero,
        zero, one, zero, zero,
        zero, zero, zero, one,
        zero, zero, one, zero,
    ]);
    assert!(max_abs_diff(cnot().matrix(), &truth) < 1e-10);
}

#[test]
fn rz_pulse_identities() {
    for (sign, theta) in [(RzSign::Plus, PI / 2.0), (RzSign::Minus, -PI / 2.0)] {
        let pulses = rz_pulse_identity(sign).map(|p| p.unitary());
        let product = Unitary::product(&pulses).unwrap();
        let target = DMatrix::from_diagonal(&DVector::from_vec(vec![
            C64::from_polar(1.0, -theta / 2.0),
            C64::from_polar(1.0, theta / 2.0),
        ]));
        assert!(phase_free_diff(product.matrix(), &target) < 1e-10, "{sign:?}");
    }
}

#[test]
fn flag_reflection_values() {
    let r = ref_actions();
    assert!(max_abs_diff(r.matrix(), &(flag_reflection_oracle() * c(0.0, 1.0))) < 1e-15);
    let sq = r.mul(&r);
    assert!(max_abs_diff(sq.matrix(), &(identity(4) * c(-1.0, 0.0))) < 1e-15);
}

#[test]
fn reflection_fixes_alpha_and_negates_orthogonal() {
    let angles = angles_from_distribution(0.2742, FlagSplit::Ratio(1.0)).unwrap();
    let alpha = alpha_from_angles(angles.theta1(), angles.theta2());
    let r = ref_alpha(&angles);
    let image = r.matrix() * &alpha;
    let phase = alpha.dotc(&image);
    assert!((phase.norm() - 1.0).abs() < 1e-12);
    // a vector orthogonal to a real α
    let ortho = DVector::from_vec(vec![alpha[1], -alpha[0], c(0.0, 0.0), c(0.0, 0.0)]).normalize();
    let image = r.matrix() * &ortho;
    assert!((image + &ortho * phase).norm() < 1e-10);
}

#[test]
fn one_step_at_largest_epsilon() {
    let angles = angles_from_distribution(0.2742, FlagSplit::Ratio(1.0)).unwrap();
    let psi = prepare_alpha(&angles).evolve(&diffusion(&angles)).unwrap();
    let p = psi.probabilities().unwrap();
    assert!((p.get(0) + p.get(1) - 0.9932).abs() < 5e-5);
    assert!((p.get(0) - p.get(1)).abs() < 1e-12);
    assert!((p.get(0) + p.get(1) - grover_oracle(0.2742, 1)).abs() < 1e-12);
}

#[test]
fn stationary_distribution_angles_round_trip() {
    let d = StationaryDistribution::two_qubit(0.0504, FlagSplit::A00(0.0302)).unwrap();
    let back = StationaryDistribution::from_angles(&d.angles().unwrap()).unwrap();
    for (a, b) in d.probs().iter().zip(back.probs()) {
        assert!((a - b).abs() < 1e-12);
    }
    assert!((back.ratio().unwrap() - 0.0302 / 0.0202).abs() < 1e-9);
}
