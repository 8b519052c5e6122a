//! Simulation of rank-one quantum reflecting projective simulation on a
//! two-qubit trapped-ion register.

pub mod circuits;
pub mod deliberation;
pub mod error;
pub mod harness;
pub mod noise;
pub mod qsim;

pub use error::{Error, Result};
