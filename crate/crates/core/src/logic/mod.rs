//! Extended rPATL: state formulae with zero-sum coalition operators and
//! Nash operators `<<C:C'>>` over sums of two objectives.

mod display;
mod parser;

pub use parser::{parse_properties, parse_property};

use thiserror::Error;

use crate::expr::Expr;
use crate::lang::Pos;
use crate::num::Rational;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LogicError {
    #[error("{pos}: syntax error: {msg}")]
    Syntax { pos: Pos, msg: String },
    #[error("{pos}: unknown player `{name}`")]
    UnknownPlayer { pos: Pos, name: String },
    #[error("{pos}: coalitions do not partition the players: {msg}")]
    CoalitionNotPartition { pos: Pos, msg: String },
    #[error("{pos}: unknown reward structure `{name}`")]
    UnknownReward { pos: Pos, name: String },
    #[error("{pos}: unknown label or variable `{name}`")]
    UnknownLabel { pos: Pos, name: String },
    #[error("{pos}: bad threshold: {msg}")]
    BadThreshold { pos: Pos, msg: String },
    #[error("{pos}: type error: {msg}")]
    Type { pos: Pos, msg: String },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Comparison {
    Lt,
    Le,
    Ge,
    Gt,
}

impl Comparison {
    pub fn symbol(self) -> &'static str {
        match self {
            Comparison::Lt => "<",
            Comparison::Le => "<=",
            Comparison::Ge => ">=",
            Comparison::Gt => ">",
        }
    }

    pub fn holds<T: PartialOrd>(self, value: &T, bound: &T) -> bool {
        match self {
            Comparison::Lt => value < bound,
            Comparison::Le => value <= bound,
            Comparison::Ge => value >= bound,
            Comparison::Gt => value > bound,
        }
    }

    /// Direction a coalition optimises when the bound must hold.
    pub fn direction(self) -> Direction {
        match self {
            Comparison::Lt | Comparison::Le => Direction::Min,
            Comparison::Ge | Comparison::Gt => Direction::Max,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    Max,
    Min,
}

#[derive(Clone, Debug, PartialEq)]
pub enum QueryMode {
    Threshold(Comparison, Rational),
    Value(Direction),
}

#[derive(Clone, Debug, PartialEq)]
pub enum PathFormula {
    Next(Box<StateFormula>),
    /// `F φ` is `true U φ`.
    Until {
        left: Box<StateFormula>,
        right: Box<StateFormula>,
        bound: Option<u64>,
    },
}

impl PathFormula {
    pub fn is_finite(&self) -> bool {
        !matches!(self, PathFormula::Until { bound: None, .. })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum RewardFormula {
    Instant(u64),
    Cumulative(u64),
    Reach(Box<StateFormula>),
}

impl RewardFormula {
    pub fn is_finite(&self) -> bool {
        !matches!(self, RewardFormula::Reach(_))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Objective {
    Prob(PathFormula),
    Reward { reward: String, index: usize, formula: RewardFormula },
}

impl Objective {
    pub fn is_finite(&self) -> bool {
        match self {
            Objective::Prob(p) => p.is_finite(),
            Objective::Reward { formula, .. } => formula.is_finite(),
        }
    }

    pub fn is_reward(&self) -> bool {
        matches!(self, Objective::Reward { .. })
    }
}

/// `<<C:C'>>` over `objectives[0] + objectives[1]`; coalition `C` pursues
/// the first objective.
#[derive(Clone, Debug, PartialEq)]
pub struct NashQuery {
    pub coalition: Vec<usize>,
    pub opponents: Vec<usize>,
    pub objectives: [Objective; 2],
    pub mode: QueryMode,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Horizon {
    BothFinite,
    BothInfinite,
    /// Exactly one objective is finite-horizon; the index says which.
    Mixed {
        finite: usize,
    },
}

pub fn classify_horizon(q: &NashQuery) -> Horizon {
    match (q.objectives[0].is_finite(), q.objectives[1].is_finite()) {
        (true, true) => Horizon::BothFinite,
        (false, false) => Horizon::BothInfinite,
        (true, false) => Horizon::Mixed { finite: 0 },
        (false, true) => Horizon::Mixed { finite: 1 },
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum StateFormula {
    True,
    False,
    Label(String),
    /// Boolean expression over state variables.
    Atom(Expr),
    Not(Box<StateFormula>),
    And(Box<StateFormula>, Box<StateFormula>),
    Or(Box<StateFormula>, Box<StateFormula>),
    Prob {
        coalition: Vec<usize>,
        mode: QueryMode,
        path: PathFormula,
    },
    Reward {
        coalition: Vec<usize>,
        reward: String,
        index: usize,
        mode: QueryMode,
        formula: RewardFormula,
    },
    Nash(Box<NashQuery>),
}

impl StateFormula {
    pub fn not(f: StateFormula) -> StateFormula {
        StateFormula::Not(Box::new(f))
    }

    pub fn and(a: StateFormula, b: StateFormula) -> StateFormula {
        StateFormula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: StateFormula, b: StateFormula) -> StateFormula {
        StateFormula::Or(Box::new(a), Box::new(b))
    }

    /// `true U φ`.
    pub fn eventually(target: StateFormula, bound: Option<u64>) -> PathFormula {
        PathFormula::Until { left: Box::new(StateFormula::True), right: Box::new(target), bound }
    }
}
