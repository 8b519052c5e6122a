//! The rank-one deliberation loop: amplitude amplification towards flagged
//! actions, repeat-until-flagged sampling with U_P call accounting, the
//! classical sampling baseline and a flag-removal learning demo.

mod learning;

use std::f64::consts::PI;

use rand::Rng;

pub use learning::{learning_demo, LearningConfig, LearningStep, LearningTrace};

use crate::circuits::{
    angles_from_distribution, diffusion, prepare_alpha, FlagSplit, PreparationAngles, StationaryDistribution,
};
use crate::error::{invalid, Error, Result};
use crate::qsim::OutcomeDistribution;

/// Upper bound on prepare/measure cycles in one deliberation.
pub const ATTEMPT_CAP: u64 = 1_000_000;

/// Number of diffusion steps maximizing the flagged probability.
///
/// k = round(π/(4√ε) − 1/2), halves rounded away from zero.
pub fn optimal_k(epsilon: f64) -> Result<u32> {
    if !(epsilon > 0.0 && epsilon <= 1.0) {
        return Err(invalid(format!("ε = {epsilon} must lie in (0, 1]")));
    }
    let k = (PI / (4.0 * epsilon.sqrt()) - 0.5).round();
    Ok(k.max(0.0) as u32)
}

/// sin²((2k+1)·arcsin√ε).
pub fn grover_success(epsilon: f64, k: u32) -> f64 {
    let theta = epsilon.clamp(0.0, 1.0).sqrt().asin();
    ((2 * k + 1) as f64 * theta).sin().powi(2)
}

/// Flagged mass ε together with the number of diffusion steps to apply.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiffusionPlan {
    pub epsilon: f64,
    pub k: u32,
}

impl DiffusionPlan {
    pub fn optimal(epsilon: f64) -> Result<Self> {
        Ok(DiffusionPlan { epsilon, k: optimal_k(epsilon)? })
    }

    pub fn success(&self) -> f64 {
        grover_success(self.epsilon, self.k)
    }

    /// U_P calls per prepare/measure cycle.
    pub fn calls_per_attempt(&self) -> u64 {
        2 * self.k as u64 + 1
    }

    /// Expected U_P calls until a flagged action: (2k+1)/ε̃.
    pub fn expected_cost(&self) -> f64 {
        self.calls_per_attempt() as f64 / self.success()
    }
}

/// Output distribution of k exact diffusion steps applied to |α⟩.
pub fn run_ideal_with_k(angles: &PreparationAngles, k: u32) -> Result<OutcomeDistribution> {
    let d = diffusion(angles);
    let mut state = prepare_alpha(angles);
    for _ in 0..k {
        state = state.evolve(&d)?;
    }
    state.probabilities()
}

/// Exact circuit run with the optimal number of diffusion steps.
pub fn run_ideal(epsilon: f64, split: FlagSplit) -> Result<OutcomeDistribution> {
    let angles = angles_from_distribution(epsilon, split)?;
    run_ideal_with_k(&angles, optimal_k(epsilon)?)
}

/// Output distribution after k amplification steps, computed from the
/// distribution alone: flagged weights scale by ε̃/ε and unflagged by
/// (1−ε̃)/(1−ε).
pub fn amplified_distribution(dist: &StationaryDistribution, k: u32) -> Result<OutcomeDistribution> {
    let eps = dist.epsilon();
    if eps <= 0.0 {
        return Err(invalid("no flagged probability mass"));
    }
    let eps_tilde = grover_success(eps, k);
    let probs = dist
        .probs()
        .iter()
        .enumerate()
        .map(|(i, &a)| {
            if dist.is_flagged(i) {
                a * eps_tilde / eps
            } else if eps < 1.0 {
                a * (1.0 - eps_tilde) / (1.0 - eps)
            } else {
                0.0
            }
        })
        .collect();
    OutcomeDistribution::new(probs)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Backend {
    Quantum,
    Classical,
}

impl std::str::FromStr for Backend {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "quantum" => Ok(Backend::Quantum),
            "classical" => Ok(Backend::Classical),
            other => Err(invalid(format!("unknown backend {other:?}"))),
        }
    }
}

impl std::fmt::Display for Backend {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Backend::Quantum => "quantum",
            Backend::Classical => "classical",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DeliberationRecord {
    pub action: usize,
    pub attempts: u64,
    pub up_calls: u64,
    pub backend: Backend,
    pub k: u32,
}

/// Per-distribution precomputation so repeated deliberations only sample.
#[derive(Debug, Clone)]
pub struct Deliberator {
    output: OutcomeDistribution,
    flagged: Vec<bool>,
    backend: Backend,
    k: u32,
}

impl Deliberator {
    pub fn new(dist: &StationaryDistribution, backend: Backend) -> Result<Self> {
        let eps = dist.epsilon();
        if eps <= 0.0 {
            return Err(invalid("deliberation needs ε > 0"));
        }
        let (output, k) = match backend {
            Backend::Classical => (OutcomeDistribution::new(dist.probs().to_vec())?, 0),
            Backend::Quantum => {
                let k = optimal_k(eps.min(1.0))?;
                let output = if dist.is_two_qubit_product(1e-12) {
                    run_ideal_with_k(&dist.angles()?, k)?
                } else {
                    amplified_distribution(dist, k)?
                };
                (output, k)
            }
        };
        let flagged = (0..dist.probs().len()).map(|i| dist.is_flagged(i)).collect();
        Ok(Deliberator { output, flagged, backend, k })
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    /// Probability that a single attempt yields a flagged action.
    pub fn success(&self) -> f64 {
        self.output.mass(self.flagged.iter().enumerate().filter(|(_, &f)| f).map(|(i, _)| i))
    }

    pub fn output(&self) -> &OutcomeDistribution {
        &self.output
    }

    pub fn run<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<DeliberationRecord> {
        let per_attempt = 2 * self.k as u64 + 1;
        for attempts in 1..=ATTEMPT_CAP {
            let action = self.output.sample(rng);
            if self.flagged[action] {
                return Ok(DeliberationRecord {
                    action,
                    attempts,
                    up_calls: attempts * per_attempt,
                    backend: self.backend,
                    k: self.k,
                });
            }
        }
        Err(Error::AttemptCap(ATTEMPT_CAP))
    }
}

/// Prepare, amplify (quantum only) and sample until a flagged action appears.
///
/// Two-qubit product distributions flagged on |00⟩, |01⟩ go through the
/// exact circuit; anything else uses the closed-form amplification.
pub fn deliberate<R: Rng + ?Sized>(
    dist: &StationaryDistribution,
    backend: Backend,
    rng: &mut R,
) -> Result<DeliberationRecord> {
    Deliberator::new(dist, backend)?.run(rng)
}

/// Monte Carlo mean U_P calls per deliberation for each ε.
///
/// Each ε is realized as a two-qubit distribution with an even flagged split.
pub fn cost_curve<R: Rng + ?Sized>(
    epsilons: &[f64],
    runs: u64,
    backend: Backend,
    rng: &mut R,
) -> Result<Vec<(f64, f64)>> {
    if runs == 0 {
        return Err(invalid("runs must be positive"));
    }
    epsilons
        .iter()
        .map(|&eps| {
            let dist = StationaryDistribution::two_qubit(eps, FlagSplit::Fraction(0.5))?;
            let engine = Deliberator::new(&dist, backend)?;
            let mut total = 0u64;
            for _ in 0..runs {
                total += engine.run(rng)?.up_calls;
            }
            Ok((eps, total as f64 / runs as f64))
        })
        .collect()
}

pub fn classical_cost_curve<R: Rng + ?Sized>(epsilons: &[f64], runs: u64, rng: &mut R) -> Result<Vec<(f64, f64)>> {
    cost_curve(epsilons, runs, Backend::Classical, rng)
}

pub fn quantum_cost_curve<R: Rng + ?Sized>(epsilons: &[f64], runs: u64, rng: &mut R) -> Result<Vec<(f64, f64)>> {
    cost_curve(epsilons, runs, Backend::Quantum, rng)
}
