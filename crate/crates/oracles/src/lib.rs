//! Reference computations written from first principles: Pauli algebra,
//! Kronecker products, a Taylor-series matrix exponential, random states
//! and the closed-form amplitude amplification law. Tests compare the
//! simulator against these without sharing any of its code.

use nalgebra::{DMatrix, DVector};
use rand::Rng;

pub type C64 = nalgebra::Complex<f64>;

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn max_abs_diff(a: &DMatrix<C64>, b: &DMatrix<C64>) -> f64 {
    (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Distance between `a` and `b` after removing the best global phase.
pub fn phase_free_diff(a: &DMatrix<C64>, b: &DMatrix<C64>) -> f64 {
    let (i, _) =
        b.iter().enumerate().fold((0, 0.0), |best, (i, z)| if z.norm() > best.1 { (i, z.norm()) } else { best });
    let phase = a.as_slice()[i] / b.as_slice()[i];
    let phase = phase / phase.norm();
    max_abs_diff(a, &(b * phase))
}

pub fn pauli_x() -> DMatrix<C64> {
    DMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)])
}

pub fn pauli_y() -> DMatrix<C64> {
    DMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(0.0, -1.0), c(0.0, 1.0), c(0.0, 0.0)])
}

pub fn pauli_z() -> DMatrix<C64> {
    DMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-1.0, 0.0)])
}

pub fn identity(dim: usize) -> DMatrix<C64> {
    DMatrix::identity(dim, dim)
}

/// Plain Kronecker product by index arithmetic.
pub fn kron(a: &DMatrix<C64>, b: &DMatrix<C64>) -> DMatrix<C64> {
    let (ar, ac, br, bc) = (a.nrows(), a.ncols(), b.nrows(), b.ncols());
    DMatrix::from_fn(ar * br, ac * bc, |i, j| a[(i / br, j / bc)] * b[(i % br, j % bc)])
}

/// exp(M) by scaling and squaring of a truncated Taylor series.
pub fn expm_taylor(m: &DMatrix<C64>) -> DMatrix<C64> {
    let norm = m.iter().map(|z| z.norm()).sum::<f64>();
    let squarings = norm.max(1.0).log2().ceil() as u32 + 4;
    let scaled = m / c(2f64.powi(squarings as i32), 0.0);
    let n = m.nrows();
    let mut term = identity(n);
    let mut sum = identity(n);
    for j in 1..=30 {
        term = &term * &scaled / c(j as f64, 0.0);
        sum += &term;
    }
    for _ in 0..squarings {
        sum = &sum * &sum;
    }
    sum
}

/// exp(i·θ/2·G) for a Hermitian generator G.
pub fn exp_i_half(theta: f64, generator: &DMatrix<C64>) -> DMatrix<C64> {
    expm_taylor(&(generator * c(0.0, theta / 2.0)))
}

fn random_complex_matrix<R: Rng>(dim: usize, rng: &mut R) -> DMatrix<C64> {
    DMatrix::from_fn(dim, dim, |_, _| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
}

/// Haar-ish random unitary from the QR factor of a random complex matrix.
pub fn random_unitary<R: Rng>(dim: usize, rng: &mut R) -> DMatrix<C64> {
    random_complex_matrix(dim, rng).qr().q()
}

pub fn random_pure<R: Rng>(dim: usize, rng: &mut R) -> Vec<C64> {
    let v: Vec<C64> = (0..dim).map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    v.into_iter().map(|z| z / norm).collect()
}

/// Random full-rank density operator A·A†/tr.
pub fn random_density<R: Rng>(dim: usize, rng: &mut R) -> DMatrix<C64> {
    let a = random_complex_matrix(dim, rng);
    let rho = &a * a.adjoint();
    let tr = rho.trace();
    rho / tr
}

pub fn outer(v: &DVector<C64>) -> DMatrix<C64> {
    v * v.adjoint()
}

/// |α⟩ for the product preparation: qubit 0 carries √ε, qubit 1 carries the
/// flagged split.
pub fn alpha_oracle(epsilon: f64, fraction: f64) -> DVector<C64> {
    let q0 = [epsilon.sqrt(), (1.0 - epsilon).sqrt()];
    let q1 = [fraction.sqrt(), (1.0 - fraction).sqrt()];
    DVector::from_fn(4, |i, _| c(q0[i >> 1] * q1[i & 1], 0.0))
}

pub fn grover_oracle(epsilon: f64, k: u32) -> f64 {
    ((2 * k + 1) as f64 * epsilon.sqrt().asin()).sin().powi(2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn taylor_exponential_matches_closed_forms() {
        // exp(iθ/2·P) = cos(θ/2)·I + i sin(θ/2)·P for any Pauli P
        for theta in [0.3f64, 2.0, 7.5, -11.0] {
            for p in [pauli_x(), pauli_y(), pauli_z()] {
                let want = identity(2) * c((theta / 2.0).cos(), 0.0) + &p * c(0.0, (theta / 2.0).sin());
                assert!(max_abs_diff(&exp_i_half(theta, &p), &want) < 1e-13);
            }
        }
    }

    #[test]
    fn kron_of_paulis() {
        let zz = kron(&pauli_z(), &pauli_z());
        let diag: Vec<f64> = (0..4).map(|i| zz[(i, i)].re).collect();
        assert_eq!(diag, vec![1.0, -1.0, -1.0, 1.0]);
        assert_eq!(kron(&identity(2), &pauli_x())[(0, 1)], c(1.0, 0.0));
    }

    #[test]
    fn random_objects_are_valid() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(1);
        let u = random_unitary(4, &mut rng);
        assert!(max_abs_diff(&(u.adjoint() * &u), &identity(4)) < 1e-12);
        let rho = random_density(4, &mut rng);
        assert!((rho.trace() - c(1.0, 0.0)).norm() < 1e-12);
        let psi = random_pure(8, &mut rng);
        assert!((psi.iter().map(|z| z.norm_sqr()).sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn phase_free_distance_ignores_global_phase() {
        let a = pauli_y();
        let b = &a * C64::from_polar(1.0, 0.7);
        assert!(phase_free_diff(&a, &b) < 1e-15);
        assert!(phase_free_diff(&a, &pauli_x()) > 0.5);
    }

    #[test]
    fn grover_law_values() {
        assert!((grover_oracle(0.25, 1) - 1.0).abs() < 1e-12);
        assert!((grover_oracle(0.2742, 1) - 0.9932).abs() < 5e-5);
        assert!((alpha_oracle(0.3, 0.5).norm() - 1.0).abs() < 1e-12);
    }
}
