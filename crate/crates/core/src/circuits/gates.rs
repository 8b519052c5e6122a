use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use crate::qsim::{Unitary, C64};

/// Single-qubit rotation exp[i(θ/2)(X cos φ − Y sin φ)], the native RF pulse.
pub fn rotation(theta: f64, phi: f64) -> Unitary {
    let (s, c) = (theta / 2.0).sin_cos();
    // X cos φ − Y sin φ = [[0, e^{iφ}], [e^{−iφ}, 0]]
    let off_upper = C64::i() * s * C64::from_polar(1.0, phi);
    let off_lower = C64::i() * s * C64::from_polar(1.0, -phi);
    Unitary::from_matrix_unchecked(nalgebra::DMatrix::from_row_slice(
        2,
        2,
        &[C64::new(c, 0.0), off_upper, off_lower, C64::new(c, 0.0)],
    ))
}

/// R_z(θ) = exp[−i(θ/2)Z].
pub fn rotation_z(theta: f64) -> Unitary {
    Unitary::diagonal(&[C64::from_polar(1.0, -theta / 2.0), C64::from_polar(1.0, theta / 2.0)])
}

/// U_ZZ(θ) = exp[i(θ/2)Z₁Z₂].
pub fn u_zz(theta: f64) -> Unitary {
    let plus = C64::from_polar(1.0, theta / 2.0);
    let minus = C64::from_polar(1.0, -theta / 2.0);
    Unitary::diagonal(&[plus, minus, minus, plus])
}

/// A resonant pulse given by rotation angle and drive phase.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pulse {
    pub angle: f64,
    pub phase: f64,
}

impl Pulse {
    pub const fn new(angle: f64, phase: f64) -> Self {
        Pulse { angle, phase }
    }

    pub fn unitary(&self) -> Unitary {
        rotation(self.angle, self.phase)
    }

    /// Same operation with a non-negative angle: R(−θ, φ) = R(θ, φ + π).
    pub fn normalized(&self) -> Pulse {
        if self.angle < 0.0 {
            Pulse::new(-self.angle, (self.phase + PI).rem_euclid(2.0 * PI))
        } else {
            *self
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RzSign {
    Plus,
    Minus,
}

/// Three resonant pulses reproducing R_z(±π/2) up to global phase.
///
/// Listed in written operator order, so the last entry is applied first.
pub fn rz_pulse_identity(sign: RzSign) -> [Pulse; 3] {
    let middle = match sign {
        RzSign::Plus => 0.0,
        RzSign::Minus => PI,
    };
    [Pulse::new(FRAC_PI_2, FRAC_PI_2), Pulse::new(FRAC_PI_2, middle), Pulse::new(FRAC_PI_2, 3.0 * FRAC_PI_2)]
}

/// Time-ordered version of [`rz_pulse_identity`].
pub fn rz_pulses_in_time_order(sign: RzSign) -> [Pulse; 3] {
    let mut p = rz_pulse_identity(sign);
    p.reverse();
    p
}

/// `u` acting on `qubit` of a two-qubit register.
pub fn on_qubit(u: &Unitary, qubit: usize) -> Unitary {
    u.embed(&[qubit], 2).expect("single-qubit embedding into two qubits")
}

/// CNOT (control qubit 0, target qubit 1) assembled from native operations:
/// e^{−iπ/4} R₂(π/2,3π/2) U_ZZ(π/2) R₂(π/2,0) R_{2,z}(π/2) R_{1,z}(−π/2).
pub fn cnot() -> Unitary {
    let factors = [
        on_qubit(&rotation(FRAC_PI_2, 3.0 * FRAC_PI_2), 1),
        u_zz(FRAC_PI_2),
        on_qubit(&rotation(FRAC_PI_2, 0.0), 1),
        on_qubit(&rotation_z(FRAC_PI_2), 1),
        on_qubit(&rotation_z(-FRAC_PI_2), 0),
    ];
    Unitary::product(&factors).expect("two-qubit factors").scale(C64::from_polar(1.0, -FRAC_PI_4))
}
