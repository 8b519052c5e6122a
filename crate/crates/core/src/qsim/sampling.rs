use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{invalid, Error, Result};

const NEGATIVE_TOL: f64 = 1e-12;
const SUM_TOL: f64 = 1e-9;

/// Probabilities over computational-basis outcomes.
///
/// Entries within 1e-12 below zero are clamped to zero and a total within
/// 1e-9 of one is renormalized; anything further off is rejected.
#[derive(Debug, Clone, PartialEq)]
pub struct OutcomeDistribution(Vec<f64>);

impl OutcomeDistribution {
    pub fn new(mut probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return Err(invalid("empty outcome distribution"));
        }
        for p in probs.iter_mut() {
            if !p.is_finite() || *p < -NEGATIVE_TOL {
                return Err(Error::Invariant(format!("probability {p} out of range")));
            }
            *p = p.max(0.0);
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > SUM_TOL {
            return Err(Error::Invariant(format!("probabilities sum to {total}")));
        }
        probs.iter_mut().for_each(|p| *p /= total);
        Ok(OutcomeDistribution(probs))
    }

    pub fn probs(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, outcome: usize) -> f64 {
        self.0.get(outcome).copied().unwrap_or(0.0)
    }

    /// Total probability of the given outcomes.
    pub fn mass(&self, outcomes: impl IntoIterator<Item = usize>) -> f64 {
        outcomes.into_iter().map(|i| self.get(i)).sum()
    }

    /// Draws a single outcome by inverse-CDF lookup.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let u: f64 = rng.gen();
        let mut acc = 0.0;
        for (i, p) in self.0.iter().enumerate() {
            acc += p;
            if u < acc {
                return i;
            }
        }
        // u landed in the rounding gap above the final partial sum
        self.0.iter().rposition(|&p| p > 0.0).unwrap_or(self.0.len() - 1)
    }
}

/// Multinomial outcome counts for `shots` independent draws.
pub fn sample_outcomes<R: Rng + ?Sized>(dist: &OutcomeDistribution, shots: u64, rng: &mut R) -> Result<Vec<u64>> {
    if shots == 0 {
        return Err(invalid("shots must be at least 1"));
    }
    let mut counts = vec![0u64; dist.len()];
    for _ in 0..shots {
        counts[dist.sample(rng)] += 1;
    }
    Ok(counts)
}

/// Independent, reproducible random stream for worker `stream` of a
/// campaign seeded with `seed`.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn clamps_and_renormalizes() {
        let d = OutcomeDistribution::new(vec![0.5 + 5e-10, -1e-13, 0.5]).unwrap();
        assert_eq!(d.get(1), 0.0);
        assert!((d.probs().iter().sum::<f64>() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn rejects_large_deviations() {
        assert!(OutcomeDistribution::new(vec![0.6, 0.6]).is_err());
        assert!(OutcomeDistribution::new(vec![1.1, -0.1]).is_err());
        assert!(OutcomeDistribution::new(vec![]).is_err());
    }

    #[test]
    fn degenerate_distribution() {
        let d = OutcomeDistribution::new(vec![1.0, 0.0, 0.0, 0.0]).unwrap();
        let counts = sample_outcomes(&d, 100, &mut stream_rng(3, 0)).unwrap();
        assert_eq!(counts, vec![100, 0, 0, 0]);
    }

    #[test]
    fn fair_coin_within_three_sigma() {
        let d = OutcomeDistribution::new(vec![0.5, 0.5, 0.0, 0.0]).unwrap();
        let counts = sample_outcomes(&d, 1600, &mut stream_rng(2024, 0)).unwrap();
        assert_eq!(counts.iter().sum::<u64>(), 1600);
        let freq = counts[0] as f64 / 1600.0;
        // binomial σ = √(0.25/1600) = 0.0125
        assert!((freq - 0.5).abs() < 3.0 * 0.0125);
    }

    #[test]
    fn same_seed_same_counts() {
        let d = OutcomeDistribution::new(vec![0.5, 0.5, 0.0, 0.0]).unwrap();
        let a = sample_outcomes(&d, 1600, &mut stream_rng(11, 4)).unwrap();
        let b = sample_outcomes(&d, 1600, &mut stream_rng(11, 4)).unwrap();
        assert_eq!(a, b);
        let c = sample_outcomes(&d, 1600, &mut stream_rng(11, 5)).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn zero_shots_rejected() {
        let d = OutcomeDistribution::new(vec![1.0]).unwrap();
        assert!(sample_outcomes(&d, 0, &mut stream_rng(0, 0)).is_err());
    }
}
