use nalgebra::{DMatrix, DVector};

use super::unitary::{check_targets, max_abs};
use super::{OutcomeDistribution, Unitary, C64};
use crate::error::{invalid, Error, Result};

const NORM_TOL: f64 = 1e-10;
const HERMITIAN_TOL: f64 = 1e-12;
const PSD_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Pure,
    Density,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Representation {
    Pure(DVector<C64>),
    Density(DMatrix<C64>),
}

/// State of an `n_qubits` register, either as an amplitude vector or a
/// density operator. Immutable: every operation returns a new state.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantumState {
    n_qubits: usize,
    repr: Representation,
}

impl QuantumState {
    /// |0…0⟩ in the requested representation.
    pub fn zero(n_qubits: usize, mode: Mode) -> Result<Self> {
        if n_qubits == 0 {
            return Err(invalid("a register needs at least one qubit"));
        }
        let dim = 1usize << n_qubits;
        let repr = match mode {
            Mode::Pure => {
                let mut v = DVector::zeros(dim);
                v[0] = C64::new(1.0, 0.0);
                Representation::Pure(v)
            }
            Mode::Density => {
                let mut m = DMatrix::zeros(dim, dim);
                m[(0, 0)] = C64::new(1.0, 0.0);
                Representation::Density(m)
            }
        };
        Ok(QuantumState { n_qubits, repr })
    }

    pub fn from_amplitudes(amplitudes: Vec<C64>) -> Result<Self> {
        let n_qubits = register_size(amplitudes.len())?;
        let state = QuantumState { n_qubits, repr: Representation::Pure(DVector::from_vec(amplitudes)) };
        state.check_invariants()?;
        Ok(state)
    }

    pub fn from_density(rho: DMatrix<C64>) -> Result<Self> {
        if rho.nrows() != rho.ncols() {
            return Err(invalid("density operator must be square"));
        }
        let n_qubits = register_size(rho.nrows())?;
        let state = QuantumState { n_qubits, repr: Representation::Density(rho) };
        state.check_invariants()?;
        Ok(state)
    }

    pub(crate) fn from_density_unchecked(rho: DMatrix<C64>) -> Self {
        let n_qubits = rho.nrows().trailing_zeros() as usize;
        QuantumState { n_qubits, repr: Representation::Density(rho) }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        1 << self.n_qubits
    }

    pub fn mode(&self) -> Mode {
        match self.repr {
            Representation::Pure(_) => Mode::Pure,
            Representation::Density(_) => Mode::Density,
        }
    }

    pub fn representation(&self) -> &Representation {
        &self.repr
    }

    pub fn amplitudes(&self) -> Option<&DVector<C64>> {
        match &self.repr {
            Representation::Pure(v) => Some(v),
            Representation::Density(_) => None,
        }
    }

    pub fn density(&self) -> Option<&DMatrix<C64>> {
        match &self.repr {
            Representation::Density(m) => Some(m),
            Representation::Pure(_) => None,
        }
    }

    /// |ψ⟩⟨ψ| for pure states; density states are returned unchanged.
    pub fn to_density(&self) -> QuantumState {
        match &self.repr {
            Representation::Pure(v) => {
                QuantumState { n_qubits: self.n_qubits, repr: Representation::Density(v * v.adjoint()) }
            }
            Representation::Density(_) => self.clone(),
        }
    }

    /// Applies `u` to the ordered `targets`; `targets[0]` is the most
    /// significant qubit of `u`.
    pub fn apply(&self, u: &Unitary, targets: &[usize]) -> Result<QuantumState> {
        check_targets(targets, self.n_qubits)?;
        if u.dim() != 1 << targets.len() {
            return Err(Error::DimensionMismatch { expected: 1 << targets.len(), actual: u.dim() });
        }
        let full = if targets.len() == self.n_qubits && targets.iter().enumerate().all(|(i, &q)| i == q) {
            u.clone()
        } else {
            u.embed(targets, self.n_qubits)?
        };
        self.evolve(&full)
    }

    /// Applies a unitary already spanning the whole register.
    pub fn evolve(&self, u: &Unitary) -> Result<QuantumState> {
        if u.dim() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), actual: u.dim() });
        }
        let m = u.matrix();
        let repr = match &self.repr {
            Representation::Pure(v) => Representation::Pure(m * v),
            Representation::Density(rho) => Representation::Density(m * rho * m.adjoint()),
        };
        Ok(QuantumState { n_qubits: self.n_qubits, repr })
    }

    /// Computational-basis outcome probabilities.
    pub fn probabilities(&self) -> Result<OutcomeDistribution> {
        let probs: Vec<f64> = match &self.repr {
            Representation::Pure(v) => v.iter().map(|a| a.norm_sqr()).collect(),
            Representation::Density(rho) => (0..self.dim()).map(|i| rho[(i, i)].re).collect(),
        };
        OutcomeDistribution::new(probs)
    }

    /// ⟨φ|ψ⟩ for two pure states.
    pub fn overlap(&self, other: &QuantumState) -> Result<C64> {
        match (&self.repr, &other.repr) {
            (Representation::Pure(a), Representation::Pure(b)) if a.len() == b.len() => Ok(a.dotc(b)),
            (Representation::Pure(_), Representation::Pure(_)) => {
                Err(Error::DimensionMismatch { expected: self.dim(), actual: other.dim() })
            }
            _ => Err(invalid("overlap is defined for pure states only")),
        }
    }

    /// Validates normalization (pure) or Hermiticity, unit trace and
    /// positivity (density).
    pub fn check_invariants(&self) -> Result<()> {
        match &self.repr {
            Representation::Pure(v) => {
                let norm: f64 = v.iter().map(|a| a.norm_sqr()).sum();
                if (norm - 1.0).abs() > NORM_TOL {
                    return Err(Error::Invariant(format!("state norm² is {norm}")));
                }
            }
            Representation::Density(rho) => {
                let herm = max_abs(&(rho - rho.adjoint()));
                if herm > HERMITIAN_TOL {
                    return Err(Error::Invariant(format!("density operator not Hermitian ({herm:e})")));
                }
                let trace = rho.trace();
                if (trace.re - 1.0).abs() > NORM_TOL || trace.im.abs() > NORM_TOL {
                    return Err(Error::Invariant(format!("density trace is {trace}")));
                }
                let min_eig = min_eigenvalue(rho);
                if min_eig < -PSD_TOL {
                    return Err(Error::Invariant(format!("density has eigenvalue {min_eig:e}")));
                }
            }
        }
        Ok(())
    }
}

/// Smallest eigenvalue of a Hermitian matrix (symmetrized before solving).
pub fn min_eigenvalue(rho: &DMatrix<C64>) -> f64 {
    let sym = (rho + rho.adjoint()) * C64::new(0.5, 0.0);
    sym.symmetric_eigenvalues().iter().copied().fold(f64::INFINITY, f64::min)
}

fn register_size(dim: usize) -> Result<usize> {
    if dim < 2 || !dim.is_power_of_two() {
        return Err(invalid(format!("state dimension {dim} is not a power of two ≥ 2")));
    }
    Ok(dim.trailing_zeros() as usize)
}
