//! Noise channels of the trapped-ion implementation and a pulse-level model
//! of the diffusion step.
//!
//! Detuning enters with its own sign: δr < 0 tilts every drive axis towards
//! −Z and drifts both qubits as exp[i t (δr Ω/2) Z] between pulses.

mod run;
mod schedule;

use std::f64::consts::PI;

use serde::Deserialize;

pub use run::{run_noisy, ExperimentRow, NoisyRun, Reporting};
pub use schedule::{
    compile_diffusion_schedule, compile_prep_schedule, compile_zz_window, simulate_schedule, zz_window_fidelity,
    CompiledSchedule, DdSequence, Event, Fidelity, PulseParams, PulseSchedule, ScheduleOp,
};

use crate::error::{invalid, Error, Result};
use crate::qsim::{OutcomeDistribution, QuantumState, Representation, Unitary, C64};

#[derive(Debug, Clone, Copy, PartialEq, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NoiseModel {
    /// δr = Δω/Ω, signed.
    pub detuning: f64,
    /// γτ per diffusion step.
    pub dephasing: f64,
    /// d_B: bright ion read as dark.
    pub detect_bright_as_dark: f64,
    /// d_D: dark ion read as bright.
    pub detect_dark_as_bright: f64,
    /// Half-width of the uniform error on the prepared ε.
    pub prep_epsilon_jitter: f64,
}

impl NoiseModel {
    pub fn ideal() -> Self {
        NoiseModel::default()
    }

    pub fn is_ideal(&self) -> bool {
        *self == NoiseModel::default()
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.detuning.abs() < 1.0) {
            return Err(invalid(format!("detuning ratio {} must satisfy |δr| < 1", self.detuning)));
        }
        if !(self.dephasing >= 0.0 && self.dephasing.is_finite()) {
            return Err(invalid(format!("dephasing exponent {} must be finite and ≥ 0", self.dephasing)));
        }
        for (name, d) in [("d_B", self.detect_bright_as_dark), ("d_D", self.detect_dark_as_bright)] {
            if !(0.0..1.0).contains(&d) {
                return Err(invalid(format!("{name} = {d} must lie in [0, 1)")));
            }
        }
        if !(0.0..1.0).contains(&self.prep_epsilon_jitter) {
            return Err(invalid(format!("ε jitter {} must lie in [0, 1)", self.prep_epsilon_jitter)));
        }
        Ok(())
    }
}

/// exp[i(θ/2)((X cos φ − Y sin φ) + δr Z)]: a resonant pulse of nominal area θ
/// with its axis tilted by the detuning.
pub fn detuned_rotation(theta: f64, phi: f64, detuning: f64) -> Unitary {
    let g = (1.0 + detuning * detuning).sqrt();
    let (s, c) = (theta * g / 2.0).sin_cos();
    let k = C64::i() * (s / g);
    let m = nalgebra::DMatrix::from_row_slice(
        2,
        2,
        &[
            C64::new(c, 0.0) + k * detuning,
            k * C64::from_polar(1.0, phi),
            k * C64::from_polar(1.0, -phi),
            C64::new(c, 0.0) - k * detuning,
        ],
    );
    Unitary::from_matrix_unchecked(m)
}

/// Phase damping of one qubit: coherences between its |0⟩ and |1⟩ blocks
/// shrink by e^{−γτ}.
pub fn dephasing_channel(state: &QuantumState, gamma_tau: f64, qubit: usize) -> Result<QuantumState> {
    if !(gamma_tau >= 0.0) {
        return Err(invalid(format!("dephasing exponent {gamma_tau} must be ≥ 0")));
    }
    let n = state.n_qubits();
    if qubit >= n {
        return Err(Error::QubitOutOfRange { index: qubit, n_qubits: n });
    }
    let Representation::Density(rho) = state.representation() else {
        return Err(Error::RequiresDensity);
    };
    let factor = (-gamma_tau).exp();
    let mask = 1usize << (n - 1 - qubit);
    let mut out = rho.clone();
    for i in 0..out.nrows() {
        for j in 0..out.ncols() {
            if (i ^ j) & mask != 0 {
                out[(i, j)] *= factor;
            }
        }
    }
    Ok(QuantumState::from_density_unchecked(out))
}

/// Independent per-qubit readout confusion
/// [[1−d_D, d_B], [d_D, 1−d_B]] (rows read dark/bright, columns true).
pub fn detection_confusion(
    dist: &OutcomeDistribution,
    bright_as_dark: f64,
    dark_as_bright: f64,
) -> Result<OutcomeDistribution> {
    for d in [bright_as_dark, dark_as_bright] {
        if !(0.0..=1.0).contains(&d) {
            return Err(invalid(format!("detection error {d} outside [0, 1]")));
        }
    }
    let len = dist.len();
    if !len.is_power_of_two() || len < 2 {
        return Err(invalid(format!("distribution over {len} outcomes is not a qubit register")));
    }
    let m = [[1.0 - dark_as_bright, bright_as_dark], [dark_as_bright, 1.0 - bright_as_dark]];
    let mut p = dist.probs().to_vec();
    let mut mask = 1usize;
    while mask < len {
        for i in (0..len).filter(|i| i & mask == 0) {
            let (dark, bright) = (p[i], p[i | mask]);
            p[i] = m[0][0] * dark + m[0][1] * bright;
            p[i | mask] = m[1][0] * dark + m[1][1] * bright;
        }
        mask <<= 1;
    }
    OutcomeDistribution::new(p)
}

/// Drive phases of the 14-pulse universally robust decoupling sequence.
pub fn ur14_phases() -> [f64; 14] {
    const SEVENTHS: [u8; 14] = [0, 6, 4, 8, 4, 6, 0, 0, 6, 4, 8, 4, 6, 0];
    SEVENTHS.map(|m| m as f64 * PI / 7.0)
}
