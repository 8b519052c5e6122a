use rand::Rng;

use super::schedule::{compile_diffusion_schedule, compile_prep_schedule, CompiledSchedule, Fidelity, PulseParams};
use super::{detection_confusion, NoiseModel};
use crate::circuits::{angles_from_distribution, FlagSplit};
use crate::deliberation::{optimal_k, run_ideal_with_k};
use crate::error::{invalid, Result};
use crate::qsim::{sample_outcomes, Mode, OutcomeDistribution, QuantumState};

/// What the b columns of a row are computed from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Reporting {
    /// Relative frequencies of the sampled counts.
    #[default]
    Sampled,
    /// Exact model probabilities; counts are still sampled.
    Exact,
}

/// One configuration of a campaign: inputs, counts and derived estimates.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentRow {
    pub k: u32,
    pub epsilon: f64,
    pub a00: f64,
    pub a01: f64,
    pub shots: u64,
    pub counts: [u64; 4],
    pub b00: f64,
    pub b01: f64,
    pub eps_tilde: f64,
    pub err_b00: f64,
    pub err_b01: f64,
    pub err_eps_tilde: f64,
    pub cost: f64,
    pub err_cost: f64,
}

fn binomial_se(p: f64, n: u64) -> f64 {
    (p * (1.0 - p) / n as f64).max(0.0).sqrt()
}

impl ExperimentRow {
    /// Fills the estimate columns from `counts` or from `exact`.
    pub fn new(
        k: u32,
        epsilon: f64,
        a00: f64,
        counts: [u64; 4],
        exact: &OutcomeDistribution,
        reporting: Reporting,
    ) -> Result<Self> {
        let shots: u64 = counts.iter().sum();
        if shots == 0 {
            return Err(invalid("a row needs at least one shot"));
        }
        let (b00, b01) = match reporting {
            Reporting::Sampled => (counts[0] as f64 / shots as f64, counts[1] as f64 / shots as f64),
            Reporting::Exact => (exact.get(0), exact.get(1)),
        };
        let eps_tilde = b00 + b01;
        let err_eps_tilde = binomial_se(eps_tilde, shots);
        let cost = (2 * k + 1) as f64 / eps_tilde;
        Ok(ExperimentRow {
            k,
            epsilon,
            a00,
            a01: epsilon - a00,
            shots,
            counts,
            b00,
            b01,
            eps_tilde,
            err_b00: binomial_se(b00, shots),
            err_b01: binomial_se(b01, shots),
            err_eps_tilde,
            cost,
            err_cost: cost * err_eps_tilde / eps_tilde,
        })
    }

    /// rᵢ = a₀₀/a₀₁.
    pub fn ratio_in(&self) -> f64 {
        self.a00 / self.a01
    }

    /// r_f = b₀₀/b₀₁.
    pub fn ratio_out(&self) -> f64 {
        self.b00 / self.b01
    }

    /// Standard error of r_f from the multinomial covariance of b₀₀, b₀₁.
    pub fn ratio_out_err(&self) -> f64 {
        let n = self.shots as f64;
        self.ratio_out() * (1.0 / (n * self.b00) + 1.0 / (n * self.b01)).sqrt()
    }
}

/// A single noisy configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct NoisyRun {
    pub epsilon: f64,
    pub split: FlagSplit,
    /// Diffusion steps; `None` picks the optimal k for `epsilon`.
    pub k: Option<u32>,
    pub shots: u64,
    pub noise: NoiseModel,
    pub fidelity: Fidelity,
    pub params: PulseParams,
    pub reporting: Reporting,
}

impl NoisyRun {
    pub fn new(epsilon: f64, split: FlagSplit) -> Self {
        NoisyRun {
            epsilon,
            split,
            k: None,
            shots: 1600,
            noise: NoiseModel::ideal(),
            fidelity: Fidelity::Gate,
            params: PulseParams::default(),
            reporting: Reporting::Sampled,
        }
    }

    pub fn steps(&self) -> Result<u32> {
        match self.k {
            Some(k) => Ok(k),
            None => optimal_k(self.epsilon),
        }
    }

    /// Exact outcome distribution, detection errors included, for a given
    /// prepared ε (the nominal one unless jittered).
    pub fn distribution(&self, prepared_epsilon: f64) -> Result<OutcomeDistribution> {
        self.noise.validate()?;
        let k = self.steps()?;
        let fraction = self.split.fraction(self.epsilon)?;
        let angles = angles_from_distribution(prepared_epsilon, FlagSplit::Fraction(fraction))?;
        let noise = &self.noise;
        let raw = if noise.detuning == 0.0 && noise.dephasing == 0.0 {
            run_ideal_with_k(&angles, k)?
        } else {
            let prep = CompiledSchedule::compile(
                &compile_prep_schedule(&angles, &self.params, self.fidelity)?,
                noise.detuning,
            )?;
            let step = CompiledSchedule::compile(
                &compile_diffusion_schedule(&angles, &self.params, self.fidelity)?,
                noise.detuning,
            )?;
            let mut state = prep.apply(&QuantumState::zero(2, Mode::Density)?, noise.dephasing)?;
            for _ in 0..k {
                state = step.apply(&state, noise.dephasing)?;
            }
            state.probabilities()?
        };
        detection_confusion(&raw, noise.detect_bright_as_dark, noise.detect_dark_as_bright)
    }

    /// ε after the preparation error: a uniform draw in ±jitter, kept inside
    /// (0, 1].
    fn prepared_epsilon<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let j = self.noise.prep_epsilon_jitter;
        if j == 0.0 {
            return self.epsilon;
        }
        (self.epsilon + rng.gen_range(-j..=j)).clamp(f64::MIN_POSITIVE, 1.0)
    }

    pub fn run<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<ExperimentRow> {
        if !(self.epsilon > 0.0 && self.epsilon <= 1.0) {
            return Err(invalid(format!("ε = {} must lie in (0, 1]", self.epsilon)));
        }
        let eps = self.prepared_epsilon(rng);
        let dist = self.distribution(eps)?;
        let sampled = sample_outcomes(&dist, self.shots, rng)?;
        let counts: [u64; 4] = sampled.try_into().map_err(|_| invalid("two-qubit runs produce four outcomes"))?;
        let a00 = self.epsilon * self.split.fraction(self.epsilon)?;
        ExperimentRow::new(self.steps()?, self.epsilon, a00, counts, &dist, self.reporting)
    }
}

pub fn run_noisy<R: Rng + ?Sized>(run: &NoisyRun, rng: &mut R) -> Result<ExperimentRow> {
    run.run(rng)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::deliberation::grover_success;
    use crate::qsim::stream_rng;

    #[test]
    fn row_identities() {
        let exact = OutcomeDistribution::new(vec![0.4, 0.4, 0.1, 0.1]).unwrap();
        let row = ExperimentRow::new(2, 0.1, 0.05, [600, 700, 200, 100], &exact, Reporting::Sampled).unwrap();
        assert_eq!(row.shots, 1600);
        assert_eq!(row.eps_tilde, row.b00 + row.b01);
        assert_eq!(row.cost, 5.0 / row.eps_tilde);
        let exact_row = ExperimentRow::new(2, 0.1, 0.05, [600, 700, 200, 100], &exact, Reporting::Exact).unwrap();
        assert_eq!(exact_row.b00, 0.4);
    }

    #[test]
    fn noiseless_run_matches_closed_form() {
        let mut run = NoisyRun::new(0.0504, FlagSplit::Ratio(1.0));
        run.reporting = Reporting::Exact;
        let row = run.run(&mut stream_rng(1, 0)).unwrap();
        assert!((row.eps_tilde - grover_success(0.0504, 3)).abs() < 1e-9);
        assert_eq!(row.counts.iter().sum::<u64>(), 1600);
    }

    #[test]
    fn noiseless_schedule_path_matches_circuit() {
        // a vanishing dephasing forces the pulse-level engine
        let mut run = NoisyRun::new(0.0987, FlagSplit::Ratio(0.5));
        let circuit = run.distribution(0.0987).unwrap();
        run.noise.dephasing = 1e-300;
        for fidelity in [Fidelity::Gate, Fidelity::Pulse] {
            run.fidelity = fidelity;
            let pulses = run.distribution(0.0987).unwrap();
            for i in 0..4 {
                assert!((pulses.get(i) - circuit.get(i)).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn dephasing_only_lowers_success() {
        let mut run = NoisyRun::new(0.0146, FlagSplit::Ratio(1.0));
        run.noise.dephasing = 1.0 / 14.0;
        let d = run.distribution(0.0146).unwrap();
        let eps_tilde = d.get(0) + d.get(1);
        assert!(eps_tilde < 0.95 && eps_tilde > 0.85, "{eps_tilde}");
    }

    #[test]
    fn jitter_is_seeded() {
        let mut run = NoisyRun::new(0.0305, FlagSplit::Ratio(1.0));
        run.noise.prep_epsilon_jitter = 2.5e-3;
        let a = run.run(&mut stream_rng(4, 1)).unwrap();
        let b = run.run(&mut stream_rng(4, 1)).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.k, 4);
    }
}
