//! MDP model checking used as a sub-routine by the equilibrium engine:
//! optimal reachability probabilities, expected rewards, qualitative
//! almost-sure analysis and optimal strategies.

mod compiled;
mod qualitative;
mod reach;
mod reward;

pub use compiled::Compiled;
pub use qualitative::{prob0a, prob0e, prob1_min_set, prob1a, prob1e};
pub use reach::{bounded_until, next_prob, until, Layered, ReachResult};
pub use reward::{cumulative_reward, instantaneous_reward, reach_reward, RewardResult};

use thiserror::Error;

use crate::model::StateId;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Optimise {
    Max,
    Min,
}

/// Stopping rule for value iteration.
#[derive(Clone, Debug)]
pub struct IterationSettings {
    /// Relative per-state change below which iteration stops.
    pub epsilon: f64,
    pub max_iters: usize,
}

impl Default for IterationSettings {
    fn default() -> Self {
        IterationSettings { epsilon: 1e-6, max_iters: 100_000 }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MdpError {
    #[error("expected reward is infinite from {} state(s)", states.len())]
    InfiniteValue { states: Vec<StateId> },
    #[error("value iteration did not converge within {iterations} iterations")]
    NotConverged { iterations: usize },
    #[error("unknown reward structure `{0}`")]
    UnknownReward(String),
}

/// `max(|a - b| / max(1, |a|))` over all states.
pub(crate) fn relative_change(new: &[f64], old: &[f64]) -> f64 {
    new.iter().zip(old).map(|(a, b)| if a == b { 0.0 } else { (a - b).abs() / a.abs().max(1.0) }).fold(0.0, f64::max)
}
