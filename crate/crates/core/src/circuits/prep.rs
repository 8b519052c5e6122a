use std::collections::BTreeSet;
use std::f64::consts::{FRAC_PI_2, PI};

use super::gates::{on_qubit, rotation};
use crate::error::{invalid, Result};
use crate::qsim::{Mode, QuantumState, Unitary};

const SUM_TOL: f64 = 1e-10;

/// Rotation angles of the stationary-state preparation U_P(θ₁, θ₂).
///
/// θ₁ fixes the flagged mass ε = cos²(θ₁/2); θ₂ fixes the split between the
/// two flagged actions, a₀₀/ε = cos²(θ₂/2).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PreparationAngles {
    theta1: f64,
    theta2: f64,
}

impl PreparationAngles {
    /// Angles are reduced into [0, 2π).
    pub fn new(theta1: f64, theta2: f64) -> Self {
        PreparationAngles { theta1: theta1.rem_euclid(2.0 * PI), theta2: theta2.rem_euclid(2.0 * PI) }
    }

    pub fn theta1(&self) -> f64 {
        self.theta1
    }

    pub fn theta2(&self) -> f64 {
        self.theta2
    }

    pub fn epsilon(&self) -> f64 {
        (self.theta1 / 2.0).cos().powi(2)
    }

    /// a₀₀/ε.
    pub fn flagged_fraction(&self) -> f64 {
        (self.theta2 / 2.0).cos().powi(2)
    }
}

/// How the flagged mass ε is split between |00⟩ and |01⟩.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FlagSplit {
    /// Absolute stationary probability a₀₀ (a₀₁ = ε − a₀₀).
    A00(f64),
    /// Fraction a₀₀/ε.
    Fraction(f64),
    /// Input ratio rᵢ = a₀₀/a₀₁.
    Ratio(f64),
}

impl FlagSplit {
    /// a₀₀/ε for a given ε.
    pub fn fraction(&self, epsilon: f64) -> Result<f64> {
        let f = match *self {
            FlagSplit::A00(a00) => {
                if epsilon <= 0.0 {
                    return Err(invalid("a₀₀/ε is undefined at ε = 0"));
                }
                if a00 < 0.0 || a00 > epsilon * (1.0 + 1e-12) {
                    return Err(invalid(format!("a₀₀ = {a00} must lie in [0, ε = {epsilon}]")));
                }
                a00 / epsilon
            }
            FlagSplit::Fraction(f) => f,
            FlagSplit::Ratio(r) => {
                if !(r >= 0.0) || !r.is_finite() {
                    return Err(invalid(format!("input ratio {r} must be finite and non-negative")));
                }
                r / (1.0 + r)
            }
        };
        if !(0.0..=1.0 + 1e-12).contains(&f) {
            return Err(invalid(format!("flagged fraction {f} outside [0, 1]")));
        }
        Ok(f.min(1.0))
    }
}

/// Inverts ε = cos²(θ₁/2) and a₀₀/ε = cos²(θ₂/2).
pub fn angles_from_distribution(epsilon: f64, split: FlagSplit) -> Result<PreparationAngles> {
    if !(0.0..=1.0).contains(&epsilon) {
        return Err(invalid(format!("ε = {epsilon} outside [0, 1]")));
    }
    if epsilon == 0.0 {
        return Err(invalid("θ₂ is undefined at ε = 0"));
    }
    let fraction = split.fraction(epsilon)?;
    Ok(PreparationAngles::new(2.0 * epsilon.sqrt().acos(), 2.0 * fraction.sqrt().acos()))
}

/// U_P = R₁(θ₁, π/2) R₂(θ₂, π/2).
pub fn preparation_unitary(angles: &PreparationAngles) -> Unitary {
    on_qubit(&rotation(angles.theta1, FRAC_PI_2), 0).mul(&on_qubit(&rotation(angles.theta2, FRAC_PI_2), 1))
}

/// |α⟩ = U_P |00⟩ as a pure two-qubit state.
pub fn prepare_alpha(angles: &PreparationAngles) -> QuantumState {
    QuantumState::zero(2, Mode::Pure)
        .and_then(|s| s.evolve(&preparation_unitary(angles)))
        .expect("two-qubit preparation")
}

/// Stationary distribution over clips together with the set of flagged clips.
#[derive(Debug, Clone, PartialEq)]
pub struct StationaryDistribution {
    probs: Vec<f64>,
    flagged: BTreeSet<usize>,
}

impl StationaryDistribution {
    pub fn new(probs: Vec<f64>, flagged: impl IntoIterator<Item = usize>) -> Result<Self> {
        if probs.iter().any(|p| !(*p >= 0.0)) {
            return Err(invalid("stationary probabilities must be non-negative"));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > SUM_TOL {
            return Err(invalid(format!("stationary probabilities sum to {total}")));
        }
        let flagged: BTreeSet<usize> = flagged.into_iter().collect();
        if let Some(&bad) = flagged.iter().find(|&&i| i >= probs.len()) {
            return Err(invalid(format!("flagged index {bad} out of range")));
        }
        Ok(StationaryDistribution { probs, flagged })
    }

    /// Two-qubit product distribution produced by U_P with |00⟩, |01⟩ flagged.
    pub fn two_qubit(epsilon: f64, split: FlagSplit) -> Result<Self> {
        Self::from_angles(&angles_from_distribution(epsilon, split)?)
    }

    pub fn from_angles(angles: &PreparationAngles) -> Result<Self> {
        let e = angles.epsilon();
        let f = angles.flagged_fraction();
        Self::new(vec![e * f, e * (1.0 - f), (1.0 - e) * f, (1.0 - e) * (1.0 - f)], [0, 1])
    }

    /// Uniform distribution over `clips` clips with the first `flagged` flagged.
    pub fn uniform(clips: usize, flagged: usize) -> Result<Self> {
        if clips == 0 || flagged > clips {
            return Err(invalid(format!("cannot flag {flagged} of {clips} clips")));
        }
        Self::new(vec![1.0 / clips as f64; clips], 0..flagged)
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn flagged(&self) -> &BTreeSet<usize> {
        &self.flagged
    }

    pub fn is_flagged(&self, clip: usize) -> bool {
        self.flagged.contains(&clip)
    }

    pub fn num_flagged(&self) -> usize {
        self.flagged.len()
    }

    /// ε: total stationary probability of flagged clips.
    pub fn epsilon(&self) -> f64 {
        self.flagged.iter().map(|&i| self.probs[i]).sum()
    }

    pub fn a00(&self) -> f64 {
        self.probs.first().copied().unwrap_or(0.0)
    }

    pub fn a01(&self) -> f64 {
        self.probs.get(1).copied().unwrap_or(0.0)
    }

    /// rᵢ = a₀₀/a₀₁, when a₀₁ > 0.
    pub fn ratio(&self) -> Option<f64> {
        (self.a01() > 0.0).then(|| self.a00() / self.a01())
    }

    pub fn unflag(&mut self, clip: usize) -> bool {
        self.flagged.remove(&clip)
    }

    /// Preparation angles when this is the two-qubit layout with |00⟩, |01⟩
    /// flagged.
    pub fn angles(&self) -> Result<PreparationAngles> {
        if self.probs.len() != 4 || self.flagged != BTreeSet::from([0, 1]) {
            return Err(invalid("preparation angles need the two-qubit layout with |00⟩, |01⟩ flagged"));
        }
        angles_from_distribution(self.epsilon().min(1.0), FlagSplit::A00(self.a00()))
    }

    /// Whether the distribution factorizes as produced by U_P (within `tol`).
    pub fn is_two_qubit_product(&self, tol: f64) -> bool {
        match Self::from_angles_checked(self) {
            Some(p) => p.probs.iter().zip(&self.probs).all(|(a, b)| (a - b).abs() <= tol),
            None => false,
        }
    }

    fn from_angles_checked(d: &Self) -> Option<Self> {
        let angles = d.angles().ok()?;
        Self::from_angles(&angles).ok()
    }
}
