use std::collections::BTreeSet;

use rand::Rng;

use super::{Backend, Deliberator};
use crate::circuits::StationaryDistribution;
use crate::error::{invalid, Error, Result};

/// Flag-removal demo: an agent looking for a rewarded action unflags every
/// action that went unrewarded.
#[derive(Debug, Clone, PartialEq)]
pub struct LearningConfig {
    pub num_actions: usize,
    /// Clips in the uniform stationary distribution per action. Only the
    /// action clips carry flags, so ε starts at 1/clip_factor.
    pub clip_factor: usize,
    pub rewarded: BTreeSet<usize>,
    pub backend: Backend,
}

impl LearningConfig {
    pub fn new(num_actions: usize, rewarded: impl IntoIterator<Item = usize>, backend: Backend) -> Self {
        LearningConfig { num_actions, clip_factor: 4, rewarded: rewarded.into_iter().collect(), backend }
    }

    pub fn with_clip_factor(mut self, clip_factor: usize) -> Self {
        self.clip_factor = clip_factor;
        self
    }

    fn validate(&self) -> Result<()> {
        if self.num_actions < 2 {
            return Err(invalid("the learning demo needs at least two actions"));
        }
        if self.clip_factor == 0 {
            return Err(invalid("clip_factor must be positive"));
        }
        if self.rewarded.is_empty() {
            return Err(invalid("at least one action must be rewarded"));
        }
        let clips = self.num_actions * self.clip_factor;
        if let Some(&bad) = self.rewarded.iter().find(|&&a| a >= clips) {
            return Err(invalid(format!("rewarded clip {bad} outside 0..{clips}")));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LearningStep {
    /// Flagged actions before this interaction.
    pub flagged: usize,
    pub epsilon: f64,
    pub action: usize,
    pub up_calls: u64,
    pub cumulative_up_calls: u64,
    pub rewarded: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LearningTrace {
    pub backend: Backend,
    pub steps: Vec<LearningStep>,
}

impl LearningTrace {
    pub fn total_up_calls(&self) -> u64 {
        self.steps.last().map_or(0, |s| s.cumulative_up_calls)
    }

    pub fn interactions(&self) -> usize {
        self.steps.len()
    }
}

pub fn learning_demo<R: Rng + ?Sized>(config: &LearningConfig, rng: &mut R) -> Result<LearningTrace> {
    config.validate()?;
    let clips = config.num_actions * config.clip_factor;
    let mut dist = StationaryDistribution::uniform(clips, config.num_actions)?;
    let mut steps = Vec::new();
    let mut cumulative = 0u64;
    loop {
        if dist.flagged().is_disjoint(&config.rewarded) {
            return Err(Error::PolicyExhausted);
        }
        let record = Deliberator::new(&dist, config.backend)?.run(rng)?;
        cumulative += record.up_calls;
        let rewarded = config.rewarded.contains(&record.action);
        steps.push(LearningStep {
            flagged: dist.num_flagged(),
            epsilon: dist.epsilon(),
            action: record.action,
            up_calls: record.up_calls,
            cumulative_up_calls: cumulative,
            rewarded,
        });
        if rewarded {
            return Ok(LearningTrace { backend: config.backend, steps });
        }
        dist.unflag(record.action);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qsim::stream_rng;

    #[test]
    fn two_actions_need_at_most_two_interactions() {
        let config = LearningConfig::new(2, [0], Backend::Classical);
        for seed in 0..50 {
            let trace = learning_demo(&config, &mut stream_rng(seed, 0)).unwrap();
            assert!(trace.interactions() <= 2);
            assert!(trace.steps.last().unwrap().rewarded);
        }
    }

    #[test]
    fn flags_shrink_until_reward() {
        let config = LearningConfig::new(20, [7], Backend::Quantum);
        let trace = learning_demo(&config, &mut stream_rng(5, 0)).unwrap();
        for pair in trace.steps.windows(2) {
            assert_eq!(pair[1].flagged, pair[0].flagged - 1);
            assert!(pair[1].epsilon < pair[0].epsilon);
        }
        assert_eq!(trace.steps.last().unwrap().action, 7);
    }

    #[test]
    fn same_seed_same_trace() {
        let config = LearningConfig::new(30, [3], Backend::Quantum);
        let a = learning_demo(&config, &mut stream_rng(9, 2)).unwrap();
        let b = learning_demo(&config, &mut stream_rng(9, 2)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn errors() {
        let rng = &mut stream_rng(0, 0);
        assert!(learning_demo(&LearningConfig::new(1, [0], Backend::Classical), rng).is_err());
        assert!(learning_demo(&LearningConfig::new(4, [], Backend::Classical), rng).is_err());
        assert!(learning_demo(&LearningConfig::new(4, [99], Backend::Classical), rng).is_err());
        // a rewarded clip that is not an action can never be reached
        let unreachable = LearningConfig::new(4, [10], Backend::Classical);
        assert!(matches!(learning_demo(&unreachable, rng), Err(Error::PolicyExhausted)));
    }
}
