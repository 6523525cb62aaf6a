//! Subgame-perfect social-welfare Nash equilibria for the two-coalition
//! reduction of a CSG: exact backwards induction for finite horizons, value
//! iteration for reachability, and the layered product for mixed pairs.

mod bounded;
mod export;
mod local;
mod product;
mod synthesis;
mod unbounded;
mod verify;

use std::fmt;
use std::sync::Arc;
use std::time::Duration;

use thiserror::Error;

pub use export::{export_profile, ExportEntry, ProfileExport, WeightedAction};
pub use local::{local_game, Continuation};
pub use product::{mixed_horizon_product, Product};
pub use synthesis::{LocalEquilibrium, Mode, Profile};
pub use verify::{verify_epsilon_ne, VerifyReport};

use crate::bimatrix::{BimatrixError, Field};
use crate::mdp::MdpError;
use crate::model::{check_objectives, CoalitionGame, Csg, ModelError, ObjectiveTargets, StateId};
use crate::num::{Rational, Scalar};

/// Arithmetic usable by both the local bimatrix solves and the MDP layers.
pub trait Number: Field + Scalar {}

impl<T: Field + Scalar> Number for T {}

/// One objective of a Nash pair, with its state subformulae already
/// evaluated to satisfaction vectors.
#[derive(Clone, Debug, PartialEq)]
pub enum Goal {
    Next {
        target: Vec<bool>,
    },
    Until {
        left: Vec<bool>,
        right: Vec<bool>,
        bound: Option<usize>,
    },
    Instant {
        reward: usize,
        k: usize,
    },
    Cumulative {
        reward: usize,
        k: usize,
    },
    /// Expected reward accumulated until `target` is reached.
    Reach {
        reward: usize,
        target: Vec<bool>,
    },
}

impl Goal {
    pub fn eventually(target: Vec<bool>, bound: Option<usize>) -> Goal {
        Goal::Until { left: vec![true; target.len()], right: target, bound }
    }

    pub fn is_finite(&self) -> bool {
        !matches!(self, Goal::Until { bound: None, .. } | Goal::Reach { .. })
    }

    pub fn is_reward(&self) -> bool {
        matches!(self, Goal::Instant { .. } | Goal::Cumulative { .. } | Goal::Reach { .. })
    }

    /// Step bound of a finite objective; 0 for unbounded ones.
    pub fn horizon(&self) -> usize {
        match self {
            Goal::Next { .. } => 1,
            Goal::Until { bound, .. } => bound.unwrap_or(0),
            Goal::Instant { k, .. } | Goal::Cumulative { k, .. } => *k,
            Goal::Reach { .. } => 0,
        }
    }

    /// Whether the objective's outcome is settled at `s` with `remaining`
    /// steps left (targets reached, path failed, or horizon exhausted).
    pub fn resolved(&self, s: StateId, remaining: usize) -> bool {
        match self {
            Goal::Until { left, right, bound } => right[s] || !left[s] || (bound.is_some() && remaining == 0),
            Goal::Reach { target, .. } => target[s],
            Goal::Next { .. } | Goal::Instant { .. } | Goal::Cumulative { .. } => remaining == 0,
        }
    }

    /// Action rewards are paid by cumulative and reachability objectives.
    pub(crate) fn paying_reward(&self) -> Option<usize> {
        match self {
            Goal::Cumulative { reward, .. } | Goal::Reach { reward, .. } => Some(*reward),
            _ => None,
        }
    }
}

#[derive(Clone, Debug)]
pub struct NashSettings {
    /// Absolute per-state convergence threshold of value iteration.
    pub conv_epsilon: f64,
    pub max_iters: usize,
    /// Run value iteration in exact rational arithmetic.
    pub exact: bool,
    /// Assumption violations abort instead of warning.
    pub strict: bool,
    /// States whose iterates are recorded.
    pub trace: Vec<StateId>,
}

impl Default for NashSettings {
    fn default() -> Self {
        NashSettings { conv_epsilon: 1e-6, max_iters: 10_000, exact: false, strict: false, trace: Vec::new() }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ValuePair {
    pub v1: f64,
    pub v2: f64,
}

impl ValuePair {
    pub fn sum(&self) -> f64 {
        self.v1 + self.v2
    }
}

impl fmt::Display for ValuePair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.v1, self.v2)
    }
}

/// Per-state iterates of value iteration; entry `n - 1` is iteration `n`.
pub type Trace = Vec<Vec<(Rational, Rational)>>;

#[derive(Clone, Debug)]
pub struct Divergence {
    pub iterations: usize,
    /// Individual values repeat with period two while not settling.
    pub oscillating: bool,
    pub last: Vec<ValuePair>,
    pub previous: Vec<ValuePair>,
    pub trace: Trace,
    /// Convergence-assumption violations found before iterating.
    pub warnings: Vec<String>,
}

impl fmt::Display for Divergence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "value iteration did not converge after {} iterations", self.iterations)?;
        if self.oscillating {
            write!(f, ": individual values oscillate with period 2")?;
        }
        Ok(())
    }
}

#[derive(Debug, Error, Clone)]
pub enum NashError {
    #[error("{0}")]
    NotConverged(Box<Divergence>),
    #[error("convergence assumption violated: {}", .0.join("; "))]
    Assumption(Vec<String>),
    #[error("objective {objective}: expected reward is infinite from state {state}")]
    InfiniteReward { objective: usize, state: String },
    #[error("state {state}: local equilibrium fails its certificate")]
    Certificate { state: String },
    #[error(transparent)]
    Bimatrix(#[from] BimatrixError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Mdp(#[from] MdpError),
}

/// Values, witness profile and statistics of one Nash query.
#[derive(Clone, Debug)]
pub struct NashSolution {
    /// Indexed by state of the queried game.
    pub values: Vec<ValuePair>,
    /// Exact values when computed in rational arithmetic.
    pub exact: Option<Vec<(Rational, Rational)>>,
    pub iterations: usize,
    pub profile: Profile,
    pub warnings: Vec<String>,
    pub trace: Trace,
    pub mdp_time: Duration,
    pub csg_time: Duration,
}

impl NashSolution {
    pub fn at(&self, s: StateId) -> ValuePair {
        self.values[s]
    }
}

/// Solves `goals[0] + goals[1]` for coalition `coalition` against the rest.
pub fn solve(
    g: &Arc<Csg>,
    coalition: &[usize],
    goals: &[Goal; 2],
    settings: &NashSettings,
) -> Result<NashSolution, NashError> {
    match (goals[0].is_finite(), goals[1].is_finite()) {
        (true, true) => {
            let cg = CoalitionGame::new(g.clone(), coalition)?;
            bounded::solve(cg, goals.clone())
        }
        (false, false) => {
            let cg = CoalitionGame::new(g.clone(), coalition)?;
            let warnings = assumption(g, goals, settings.strict)?;
            let mut sol = unbounded::solve(cg, goals.clone(), settings).map_err(|e| with_warnings(e, &warnings))?;
            sol.warnings = warnings;
            Ok(sol)
        }
        _ => {
            let p = mixed_horizon_product(g, goals)?;
            let cg = CoalitionGame::new(p.game.clone(), coalition)?;
            let warnings = assumption(&p.game, &p.goals, settings.strict)?;
            let trace_settings =
                NashSettings { trace: settings.trace.iter().map(|s| p.embedding[*s]).collect(), ..settings.clone() };
            let mut sol =
                unbounded::solve(cg, p.goals.clone(), &trace_settings).map_err(|e| with_warnings(e, &warnings))?;
            sol.values = p.embedding.iter().map(|s| sol.values[*s]).collect();
            sol.exact = sol.exact.map(|e| p.embedding.iter().map(|s| e[*s].clone()).collect());
            sol.profile.set_embedding(p.embedding);
            sol.warnings = warnings;
            Ok(sol)
        }
    }
}

fn with_warnings(e: NashError, warnings: &[String]) -> NashError {
    match e {
        NashError::NotConverged(mut d) => {
            d.warnings = warnings.to_vec();
            NashError::NotConverged(d)
        }
        other => other,
    }
}

fn assumption(g: &Csg, goals: &[Goal; 2], strict: bool) -> Result<Vec<String>, NashError> {
    let targets: Vec<ObjectiveTargets> = goals
        .iter()
        .map(|goal| match goal {
            Goal::Reach { target, .. } => ObjectiveTargets::Reward { targets: target.clone() },
            _ if goal.is_finite() => ObjectiveTargets::Finite,
            _ => ObjectiveTargets::Probabilistic,
        })
        .collect();
    let report = check_objectives(g, &targets, strict);
    let text = report.describe(g);
    if report.is_fatal() {
        Err(NashError::Assumption(text))
    } else {
        Ok(text)
    }
}

pub(crate) fn pair_f64<T: Number>(v: &[T; 2]) -> ValuePair {
    ValuePair { v1: v[0].as_f64(), v2: v[1].as_f64() }
}

#[cfg(test)]
mod tests;
