//! Dense exact simulation of small qubit registers.
//!
//! States are either amplitude vectors or density operators; unitaries are
//! dense matrices embedded into the register on demand. Qubit 0 is the most
//! significant bit of a basis index.

mod sampling;
mod state;
mod unitary;

pub use nalgebra::Complex;
pub use sampling::{sample_outcomes, stream_rng, OutcomeDistribution};
pub use state::{min_eigenvalue, Mode, QuantumState, Representation};
pub use unitary::Unitary;

pub type C64 = Complex<f64>;

/// Convenience wrapper for [`QuantumState::zero`].
pub fn zero_state(n_qubits: usize, mode: Mode) -> crate::Result<QuantumState> {
    QuantumState::zero(n_qubits, mode)
}
