//! Gate set and two-qubit circuits of the rank-one deliberation algorithm:
//! native rotations, the ZZ interaction, the CNOT decomposition, stationary
//! state preparation, both reflections and the merged diffusion step.
//!
//! Operator products are written in textbook order: the rightmost factor
//! acts first on the state.

mod gates;
mod prep;
mod reflections;

pub use gates::{
    cnot, on_qubit, rotation, rotation_z, rz_pulse_identity, rz_pulses_in_time_order, u_zz, Pulse, RzSign,
};
pub use prep::{
    angles_from_distribution, preparation_unitary, prepare_alpha, FlagSplit, PreparationAngles, StationaryDistribution,
};
pub use reflections::{diffusion, ref_actions, ref_alpha};
