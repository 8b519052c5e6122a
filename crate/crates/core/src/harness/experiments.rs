use rayon::prelude::*;

use super::config::Config;
use super::fit::{fit_linear, fit_power_law, fit_power_law_weighted, LinearFit, PowerLawFit};
use crate::circuits::{FlagSplit, StationaryDistribution};
use crate::deliberation::{learning_demo, Backend, Deliberator, LearningConfig};
use crate::error::{invalid, Result};
use crate::noise::{
    zz_window_fidelity, DdSequence, ExperimentRow, Fidelity, NoiseModel, NoisyRun, PulseParams, Reporting,
};
use crate::qsim::stream_rng;

/// Stream offsets keep the campaigns of one seed statistically independent.
const CLASSICAL_STREAM: u64 = 1 << 20;
const DETUNING_STREAM: u64 = 1 << 24;

#[derive(Debug, Clone, PartialEq)]
pub struct ScalingOutput {
    pub rows: Vec<ExperimentRow>,
    /// `None` when fewer than three ε values were run.
    pub fit: Option<PowerLawFit>,
    /// (ε, mean U_P calls) of the classical sampler.
    pub classical: Vec<(f64, f64)>,
    pub classical_fit: Option<PowerLawFit>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RatioOutput {
    pub rows: Vec<ExperimentRow>,
    /// Linear fit of r_f against rᵢ for every k with at least two rows.
    pub fits: Vec<(u32, LinearFit)>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WindowCheck {
    pub detuning: f64,
    pub ur14: f64,
    pub constant_phase: f64,
    pub unprotected: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DdReport {
    pub curves: Vec<(f64, Vec<ExperimentRow>)>,
    pub window: Vec<WindowCheck>,
}

fn reporting_for(config: &Config, noise: &NoiseModel) -> Reporting {
    let mut probe = config.clone();
    probe.noise = *noise;
    probe.reporting()
}

fn run_grid(config: &Config, noise: NoiseModel, fidelity: Fidelity, stream_base: u64) -> Result<Vec<ExperimentRow>> {
    let reporting = reporting_for(config, &noise);
    let ex = &config.experiment;
    ex.epsilons
        .par_iter()
        .enumerate()
        .map(|(i, &epsilon)| {
            let run = NoisyRun {
                shots: ex.shots,
                noise,
                fidelity,
                params: config.params(),
                reporting,
                ..NoisyRun::new(epsilon, FlagSplit::Ratio(1.0))
            };
            run.run(&mut stream_rng(ex.seed, stream_base + i as u64))
        })
        .collect()
}

fn cost_fit(config: &Config, rows: &[ExperimentRow]) -> Result<Option<PowerLawFit>> {
    if rows.len() < 3 {
        return Ok(None);
    }
    let fit = if config.experiment.weighted_fit {
        fit_power_law_weighted(&rows.iter().map(|r| (r.epsilon, r.cost, r.err_cost)).collect::<Vec<_>>())?
    } else {
        fit_power_law(&rows.iter().map(|r| (r.epsilon, r.cost)).collect::<Vec<_>>())?
    };
    Ok(Some(fit))
}

/// Mean U_P calls of the classical sampler over `classical_runs` deliberations.
pub fn classical_baseline(config: &Config) -> Result<Vec<(f64, f64)>> {
    let ex = &config.experiment;
    ex.epsilons
        .par_iter()
        .enumerate()
        .map(|(i, &epsilon)| {
            let dist = StationaryDistribution::two_qubit(epsilon, FlagSplit::Fraction(0.5))?;
            let engine = Deliberator::new(&dist, Backend::Classical)?;
            let mut rng = stream_rng(ex.seed, CLASSICAL_STREAM + i as u64);
            let mut total = 0u64;
            for _ in 0..ex.classical_runs {
                total += engine.run(&mut rng)?.up_calls;
            }
            Ok((epsilon, total as f64 / ex.classical_runs as f64))
        })
        .collect()
}

/// Cost C = (2k+1)/ε̃ over the ε grid with the optimal k, plus the classical
/// baseline and power-law fits of both.
pub fn scaling_experiment(config: &Config) -> Result<ScalingOutput> {
    let rows = run_grid(config, config.noise, config.pulses.fidelity, 0)?;
    let fit = cost_fit(config, &rows)?;
    let classical = classical_baseline(config)?;
    let classical_fit = if classical.len() >= 3 { Some(fit_power_law(&classical)?) } else { None };
    Ok(ScalingOutput { rows, fit, classical, classical_fit })
}

/// Output ratio r_f = b₀₀/b₀₁ for each configured (k, a₀₀, a₀₁) row.
pub fn ratio_experiment(config: &Config) -> Result<RatioOutput> {
    let ex = &config.experiment;
    if let Some((i, _)) = ex.ratio_rows.iter().enumerate().find(|(_, r)| !(r.a01 > 0.0)) {
        return Err(invalid(format!("ratio row {i} has a01 = 0, so the input ratio is undefined")));
    }
    let reporting = config.reporting();
    let rows: Vec<ExperimentRow> = ex
        .ratio_rows
        .par_iter()
        .enumerate()
        .map(|(i, row)| {
            let run = NoisyRun {
                k: Some(row.k),
                shots: ex.shots,
                noise: config.noise,
                fidelity: config.pulses.fidelity,
                params: config.params(),
                reporting,
                ..NoisyRun::new(row.a00 + row.a01, FlagSplit::A00(row.a00))
            };
            run.run(&mut stream_rng(ex.seed, i as u64))
        })
        .collect::<Result<_>>()?;

    let mut ks: Vec<u32> = Vec::new();
    for r in &rows {
        if !ks.contains(&r.k) {
            ks.push(r.k);
        }
    }
    let mut fits = Vec::new();
    for k in ks {
        let points: Vec<(f64, f64, f64)> =
            rows.iter().filter(|r| r.k == k).map(|r| (r.ratio_in(), r.ratio_out(), r.ratio_out_err())).collect();
        if points.len() >= 2 {
            fits.push((k, fit_linear(&points)?));
        }
    }
    Ok(RatioOutput { rows, fits })
}

/// Pulse-level cost curves for each configured detuning and the fidelity of
/// the decoupled ZZ window against bare and constant-phase alternatives.
pub fn dd_check(config: &Config) -> Result<DdReport> {
    let params = config.params();
    let curves = config
        .experiment
        .detunings
        .iter()
        .enumerate()
        .map(|(j, &detuning)| {
            let noise = NoiseModel { detuning, ..config.noise };
            let rows = run_grid(config, noise, Fidelity::Pulse, DETUNING_STREAM * (j as u64 + 1))?;
            Ok((detuning, rows))
        })
        .collect::<Result<Vec<_>>>()?;
    let window = config
        .experiment
        .detunings
        .iter()
        .map(|&detuning| {
            let with = |sequence| zz_window_fidelity(&PulseParams { sequence, ..params }, Fidelity::Pulse, detuning);
            Ok(WindowCheck {
                detuning,
                ur14: with(DdSequence::Ur14)?,
                constant_phase: with(DdSequence::ConstantPhase)?,
                unprotected: with(DdSequence::None)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(DdReport { curves, window })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CostSummary {
    pub mean_calls: f64,
    pub sem_calls: f64,
    pub mean_interactions: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LearningSummary {
    pub runs: u64,
    pub quantum: CostSummary,
    pub classical: CostSummary,
}

fn summarize(samples: &[(u64, usize)]) -> CostSummary {
    let n = samples.len() as f64;
    let mean = samples.iter().map(|s| s.0 as f64).sum::<f64>() / n;
    let var = samples.iter().map(|s| (s.0 as f64 - mean).powi(2)).sum::<f64>() / (n - 1.0).max(1.0);
    CostSummary {
        mean_calls: mean,
        sem_calls: (var / n).sqrt(),
        mean_interactions: samples.iter().map(|s| s.1 as f64).sum::<f64>() / n,
    }
}

/// Average cumulative U_P calls of the flag-removal demo for both backends
/// over `runs` seeds.
pub fn learning_comparison(config: &LearningConfig, runs: u64, seed: u64) -> Result<LearningSummary> {
    if runs == 0 {
        return Err(invalid("runs must be positive"));
    }
    let mut out = [CostSummary { mean_calls: 0.0, sem_calls: 0.0, mean_interactions: 0.0 }; 2];
    for (slot, backend) in [Backend::Quantum, Backend::Classical].into_iter().enumerate() {
        let cfg = LearningConfig { backend, ..config.clone() };
        let samples: Vec<(u64, usize)> = (0..runs)
            .into_par_iter()
            .map(|r| {
                let trace = learning_demo(&cfg, &mut stream_rng(seed, 2 * r + slot as u64))?;
                Ok((trace.total_up_calls(), trace.interactions()))
            })
            .collect::<Result<_>>()?;
        out[slot] = summarize(&samples);
    }
    Ok(LearningSummary { runs, quantum: out[0], classical: out[1] })
}
