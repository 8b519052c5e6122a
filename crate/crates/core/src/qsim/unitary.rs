use nalgebra::DMatrix;

use super::C64;
use crate::error::{invalid, Error, Result};

/// Tolerance used when validating unitarity at construction.
const UNITARITY_TOL: f64 = 1e-10;

/// A square unitary matrix acting on one or more qubits.
///
/// Qubit 0 is the most significant bit of the basis index, so for two
/// qubits the basis order is |00⟩, |01⟩, |10⟩, |11⟩ with qubit 0 leftmost.
#[derive(Debug, Clone, PartialEq)]
pub struct Unitary(DMatrix<C64>);

impl Unitary {
    pub fn new(matrix: DMatrix<C64>) -> Result<Self> {
        let dim = matrix.nrows();
        if matrix.ncols() != dim {
            return Err(invalid(format!("unitary must be square, got {}x{}", dim, matrix.ncols())));
        }
        if dim < 2 || !dim.is_power_of_two() {
            return Err(invalid(format!("unitary dimension {dim} is not a power of two")));
        }
        let u = Unitary(matrix);
        let dev = u.unitarity_error();
        if dev > UNITARITY_TOL {
            return Err(Error::Invariant(format!("matrix is not unitary (‖U†U − I‖ = {dev:e})")));
        }
        Ok(u)
    }

    /// Builds a unitary from a row-major list of entries.
    pub fn from_rows(dim: usize, entries: &[C64]) -> Result<Self> {
        if entries.len() != dim * dim {
            return Err(Error::DimensionMismatch { expected: dim * dim, actual: entries.len() });
        }
        Self::new(DMatrix::from_row_slice(dim, dim, entries))
    }

    /// Caller guarantees unitarity (products and exponentials of Hermitian generators).
    pub(crate) fn from_matrix_unchecked(matrix: DMatrix<C64>) -> Self {
        Unitary(matrix)
    }

    pub fn identity(dim: usize) -> Self {
        Unitary(DMatrix::identity(dim, dim))
    }

    pub fn diagonal(entries: &[C64]) -> Self {
        Unitary(DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(entries)))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn n_qubits(&self) -> usize {
        self.dim().trailing_zeros() as usize
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.0
    }

    pub fn into_matrix(self) -> DMatrix<C64> {
        self.0
    }

    pub fn entry(&self, row: usize, col: usize) -> C64 {
        self.0[(row, col)]
    }

    pub fn adjoint(&self) -> Self {
        Unitary(self.0.adjoint())
    }

    /// Matrix product `self · rhs`, i.e. `rhs` acts first.
    pub fn mul(&self, rhs: &Unitary) -> Self {
        Unitary(&self.0 * &rhs.0)
    }

    /// Product of operators written left to right in textbook order: the
    /// rightmost factor acts first on the state.
    pub fn product<'a>(factors: impl IntoIterator<Item = &'a Unitary>) -> Result<Self> {
        let mut iter = factors.into_iter();
        let first = iter.next().ok_or_else(|| invalid("empty operator product"))?;
        let mut acc = first.0.clone();
        for f in iter {
            if f.dim() != acc.nrows() {
                return Err(Error::DimensionMismatch { expected: acc.nrows(), actual: f.dim() });
            }
            acc = &acc * &f.0;
        }
        Ok(Unitary(acc))
    }

    pub fn scale(&self, phase: C64) -> Self {
        Unitary(&self.0 * phase)
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Unitary::identity(self.dim());
        for _ in 0..k {
            acc = self.mul(&acc);
        }
        acc
    }

    pub fn kron(&self, rhs: &Unitary) -> Self {
        Unitary(self.0.kronecker(&rhs.0))
    }

    /// Max-entry deviation of U†U from the identity.
    pub fn unitarity_error(&self) -> f64 {
        let prod = self.0.adjoint() * &self.0;
        let id = DMatrix::<C64>::identity(self.dim(), self.dim());
        max_abs(&(prod - id))
    }

    /// Embeds this operator into an `n_qubits` register acting on `targets`.
    ///
    /// `targets[0]` is the most significant qubit of this operator's own
    /// index space.
    pub fn embed(&self, targets: &[usize], n_qubits: usize) -> Result<Unitary> {
        check_targets(targets, n_qubits)?;
        if 1usize << targets.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: 1 << targets.len(), actual: self.dim() });
        }
        let dim = 1usize << n_qubits;
        let bit = |q: usize| n_qubits - 1 - q;
        let target_mask: usize = targets.iter().map(|&q| 1usize << bit(q)).sum();
        let local = |idx: usize| -> usize { targets.iter().fold(0usize, |acc, &q| (acc << 1) | ((idx >> bit(q)) & 1)) };
        let mut out = DMatrix::<C64>::zeros(dim, dim);
        for row in 0..dim {
            for col in 0..dim {
                if row & !target_mask == col & !target_mask {
                    out[(row, col)] = self.0[(local(row), local(col))];
                }
            }
        }
        Ok(Unitary(out))
    }

    /// Phase-insensitive distance: min over unit λ of ‖self − λ·other‖_max,
    /// with λ taken from the largest-magnitude entry of other†·self.
    pub fn phase_distance(&self, other: &Unitary) -> f64 {
        if self.dim() != other.dim() {
            return f64::INFINITY;
        }
        let overlap = other.0.adjoint() * &self.0;
        let pivot = overlap.iter().copied().max_by(|a, b| a.norm().total_cmp(&b.norm())).unwrap_or(C64::new(0.0, 0.0));
        if pivot.norm() == 0.0 {
            return max_abs(&(&self.0 - &other.0));
        }
        let lambda = pivot / pivot.norm();
        max_abs(&(&self.0 - &other.0 * lambda))
    }

    pub fn approx_eq_up_to_phase(&self, other: &Unitary, tol: f64) -> bool {
        self.phase_distance(other) <= tol
    }

    /// Average-gate-style fidelity |Tr(A†B)|²/d², insensitive to global phase.
    pub fn process_fidelity(&self, other: &Unitary) -> f64 {
        let d = self.dim() as f64;
        (self.0.adjoint() * &other.0).trace().norm_sqr() / (d * d)
    }
}

pub(crate) fn check_targets(targets: &[usize], n_qubits: usize) -> Result<()> {
    if targets.is_empty() {
        return Err(invalid("no target qubits given"));
    }
    for (i, &q) in targets.iter().enumerate() {
        if q >= n_qubits {
            return Err(Error::QubitOutOfRange { index: q, n_qubits });
        }
        if targets[..i].contains(&q) {
            return Err(invalid(format!("duplicate target qubit {q}")));
        }
    }
    Ok(())
}

pub(crate) fn max_abs(m: &DMatrix<C64>) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn pauli_x() -> Unitary {
        Unitary::from_rows(2, &[c(0., 0.), c(1., 0.), c(1., 0.), c(0., 0.)]).unwrap()
    }

    #[test]
    fn rejects_non_unitary() {
        let m = DMatrix::from_row_slice(2, 2, &[c(1., 0.), c(1., 0.), c(0., 0.), c(1., 0.)]);
        assert!(matches!(Unitary::new(m), Err(Error::Invariant(_))));
    }

    #[test]
    fn rejects_bad_dimension() {
        assert!(Unitary::new(DMatrix::identity(3, 3)).is_err());
        assert!(Unitary::from_rows(2, &[c(1., 0.)]).is_err());
    }

    #[test]
    fn embed_matches_kronecker() {
        let x = pauli_x();
        let id = Unitary::identity(2);
        assert!(x.embed(&[0], 2).unwrap().phase_distance(&x.kron(&id)) < 1e-15);
        assert!(x.embed(&[1], 2).unwrap().phase_distance(&id.kron(&x)) < 1e-15);
    }

    #[test]
    fn embed_reversed_targets_swaps_roles() {
        // CNOT with control on the first listed target.
        let one = c(1., 0.);
        let zero = c(0., 0.);
        let cnot = Unitary::from_rows(
            4,
            &[one, zero, zero, zero, zero, one, zero, zero, zero, zero, zero, one, zero, zero, one, zero],
        )
        .unwrap();
        let flipped = cnot.embed(&[1, 0], 2).unwrap();
        // control qubit 1, target qubit 0: |01⟩ → |11⟩
        assert_eq!(flipped.entry(3, 1), one);
        assert_eq!(flipped.entry(2, 2), one);
        assert_eq!(flipped.entry(1, 1), zero);
    }

    #[test]
    fn phase_distance_ignores_global_phase() {
        let x = pauli_x();
        let phased = x.scale(C64::from_polar(1.0, 0.7));
        assert!(x.phase_distance(&phased) < 1e-15);
        assert!(x.phase_distance(&Unitary::identity(2)) > 0.9);
    }

    #[test]
    fn product_is_rightmost_first() {
        let x = pauli_x();
        let z = Unitary::diagonal(&[c(1., 0.), c(-1., 0.)]);
        let xz = Unitary::product([&x, &z]).unwrap();
        assert_eq!(xz, x.mul(&z));
    }
}
