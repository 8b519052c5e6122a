use std::f64::consts::{FRAC_PI_2, PI};

use super::gates::{cnot, on_qubit, rotation, rotation_z, u_zz};
use super::prep::PreparationAngles;
use crate::qsim::Unitary;

/// ref_A = R_{1,z}(−π) = diag(i, i, −i, −i): a reflection about the flagged
/// actions |00⟩, |01⟩ up to the global phase i.
pub fn ref_actions() -> Unitary {
    on_qubit(&rotation_z(-PI), 0)
}

/// ref_α built from two calls to U_P and a CNOT:
/// R₁(θ₁−π, π/2) R₂(θ₂+π/2, π/2) U_CNOT R₁(−θ₁−π, π/2) R₂(−θ₂−π/2, π/2).
pub fn ref_alpha(angles: &PreparationAngles) -> Unitary {
    let (t1, t2) = (angles.theta1(), angles.theta2());
    let factors = [
        on_qubit(&rotation(t1 - PI, FRAC_PI_2), 0),
        on_qubit(&rotation(t2 + FRAC_PI_2, FRAC_PI_2), 1),
        cnot(),
        on_qubit(&rotation(-t1 - PI, FRAC_PI_2), 0),
        on_qubit(&rotation(-t2 - FRAC_PI_2, FRAC_PI_2), 1),
    ];
    Unitary::product(&factors).expect("two-qubit factors")
}

/// The merged diffusion step D ≐ ref_α · ref_A:
/// R₂(θ₂,π/2) R₁(θ₁,π/2) R_{2,z}(−π/2) R_{1,z}(π/2) U_ZZ(π/2) R₂(−θ₂,π/2) R₁(θ₁,π/2).
pub fn diffusion(angles: &PreparationAngles) -> Unitary {
    let (t1, t2) = (angles.theta1(), angles.theta2());
    let factors = [
        on_qubit(&rotation(t2, FRAC_PI_2), 1),
        on_qubit(&rotation(t1, FRAC_PI_2), 0),
        on_qubit(&rotation_z(-FRAC_PI_2), 1),
        on_qubit(&rotation_z(FRAC_PI_2), 0),
        u_zz(FRAC_PI_2),
        on_qubit(&rotation(-t2, FRAC_PI_2), 1),
        on_qubit(&rotation(t1, FRAC_PI_2), 0),
    ];
    Unitary::product(&factors).expect("two-qubit factors")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuits::{angles_from_distribution, prepare_alpha, FlagSplit};
    use crate::qsim::C64;

    #[test]
    fn ref_actions_examples() {
        let r = ref_actions();
        assert!((r.entry(0, 0) - C64::i()).norm() < 1e-15);
        assert!((r.entry(3, 3) + C64::i()).norm() < 1e-15);
        assert!(r.mul(&r).phase_distance(&Unitary::identity(4)) < 1e-15);
    }

    #[test]
    fn ref_alpha_fixes_alpha_and_negates_complement() {
        let angles = angles_from_distribution(0.2742, FlagSplit::Ratio(1.0)).unwrap();
        let alpha = prepare_alpha(&angles);
        let r = ref_alpha(&angles);
        let image = alpha.evolve(&r).unwrap();
        let ov = alpha.overlap(&image).unwrap();
        assert!((ov.norm() - 1.0).abs() < 1e-12);
        let phase = ov / ov.norm();

        // |01⟩ − projection onto α is orthogonal to α
        let a = alpha.amplitudes().unwrap().clone();
        let mut perp = nalgebra::DVector::<C64>::zeros(4);
        perp[1] = C64::new(1.0, 0.0);
        let proj = a.dotc(&perp);
        let perp = &perp - &a * proj;
        let perp = &perp / C64::new(perp.norm(), 0.0);
        let out = r.matrix() * &perp;
        let expected = &perp * (-phase);
        assert!((out - expected).norm() < 1e-12);
    }

    #[test]
    fn diffusion_one_step_near_certain() {
        let angles = angles_from_distribution(0.2742, FlagSplit::Ratio(1.0)).unwrap();
        let out = prepare_alpha(&angles).evolve(&diffusion(&angles)).unwrap();
        let p = out.probabilities().unwrap();
        assert!((p.get(0) + p.get(1) - 0.9932).abs() < 5e-5);
        assert!(diffusion(&angles).unitarity_error() < 1e-12);
    }
}
