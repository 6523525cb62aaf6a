//! Game arenas: concurrent stochastic games, their two-coalition
//! reductions, end components, and the MDPs extracted from them.

mod assumption;
mod coalition;
mod csg;
pub mod explicit;
mod mdp;
mod mec;
mod strategy;

pub use assumption::{check_objectives, AssumptionReport, ObjectiveTargets, Severity, Violation};
pub use coalition::CoalitionGame;
pub use csg::{
    Choice, ConstValue, Csg, CsgBuilder, Distribution, Move, Player, RewardStructure, StateId, StateInfo, VariableInfo,
};
pub use mdp::{joint_mdp, Mdp, MdpChoice, MdpRewards};
pub use mec::{enumerate_mecs, EndComponent};
pub use strategy::{induce_chain, induce_mdp, CoalitionStrategy, InducedMdp, Side};

pub(crate) use csg::product;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("coalition is empty")]
    EmptyCoalition,
    #[error("coalition contains every player")]
    FullCoalition,
    #[error("unknown player `{0}`")]
    UnknownPlayer(String),
    #[error("no initial state")]
    NoInitialState,
    #[error("state {state}: no transition for joint move {moves}")]
    MissingTransition { state: String, moves: String },
    #[error("state {state}: move of player {player} is not available")]
    UnavailableMove { state: String, player: String },
    #[error("state {state}: probabilities sum to {sum}")]
    BadDistribution { state: String, sum: f64 },
    #[error("reward structure `{reward}` has a negative value")]
    NegativeReward { reward: String },
    #[error("strategy undefined at state {state}, memory {memory}")]
    IncompleteStrategy { state: String, memory: usize },
    #[error("{0}")]
    Malformed(String),
}
