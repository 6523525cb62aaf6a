//! Bottom-up evaluation of state formulae on an explicit CSG.

use std::sync::Arc;

use thiserror::Error;

use crate::expr::EvalError;
use crate::logic::{Comparison, Direction, NashQuery, Objective, PathFormula, QueryMode, RewardFormula, StateFormula};
use crate::mdp::{
    bounded_until, cumulative_reward, instantaneous_reward, next_prob, reach_reward, until, IterationSettings,
    MdpError, Optimise,
};
use crate::model::{Csg, Mdp, MdpChoice, MdpRewards};
use crate::nash::{self, Goal, NashError, NashSettings, NashSolution};
use crate::num::{self, Rational};

#[derive(Debug, Error)]
pub enum CheckError {
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("unknown label `{0}`")]
    UnknownLabel(String),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Nash(#[from] NashError),
    #[error(transparent)]
    Mdp(#[from] MdpError),
}

#[derive(Debug)]
pub enum Evaluation {
    /// Satisfaction per state.
    Bool(Vec<bool>),
    /// Optimal values of a zero-sum query per state.
    Value(Vec<f64>),
    /// Nash query; `sat` is present for threshold queries.
    Nash { solution: Box<NashSolution>, sat: Option<Vec<bool>> },
}

pub fn evaluate(g: &Arc<Csg>, f: &StateFormula, settings: &NashSettings) -> Result<Evaluation, CheckError> {
    let c = Checker { g, settings };
    match f {
        StateFormula::Nash(q) => {
            let solution = c.nash(q)?;
            let sat = match &q.mode {
                QueryMode::Threshold(cmp, bound) => {
                    Some(solution.values.iter().map(|v| c.compare(*cmp, v.sum(), bound)).collect())
                }
                QueryMode::Value(_) => None,
            };
            Ok(Evaluation::Nash { solution: Box::new(solution), sat })
        }
        StateFormula::Prob { coalition, mode: QueryMode::Value(d), path } => {
            Ok(Evaluation::Value(c.prob(coalition, *d, path)?))
        }
        StateFormula::Reward { coalition, index, mode: QueryMode::Value(d), formula, .. } => {
            Ok(Evaluation::Value(c.reward(coalition, *d, *index, formula)?))
        }
        _ => Ok(Evaluation::Bool(c.sat(f)?)),
    }
}

/// Satisfaction vector of a boolean-valued formula.
pub fn satisfying(g: &Arc<Csg>, f: &StateFormula, settings: &NashSettings) -> Result<Vec<bool>, CheckError> {
    Checker { g, settings }.sat(f)
}

struct Checker<'a> {
    g: &'a Arc<Csg>,
    settings: &'a NashSettings,
}

impl Checker<'_> {
    fn sat(&self, f: &StateFormula) -> Result<Vec<bool>, CheckError> {
        let n = self.g.num_states();
        Ok(match f {
            StateFormula::True => vec![true; n],
            StateFormula::False => vec![false; n],
            StateFormula::Label(l) => self.g.label(l).ok_or_else(|| CheckError::UnknownLabel(l.clone()))?.to_vec(),
            StateFormula::Atom(e) => (0..n).map(|s| e.eval_bool(self.g.valuation(s))).collect::<Result<_, _>>()?,
            StateFormula::Not(a) => self.sat(a)?.into_iter().map(|b| !b).collect(),
            StateFormula::And(a, b) => self.sat(a)?.into_iter().zip(self.sat(b)?).map(|(x, y)| x && y).collect(),
            StateFormula::Or(a, b) => self.sat(a)?.into_iter().zip(self.sat(b)?).map(|(x, y)| x || y).collect(),
            StateFormula::Prob { coalition, mode, path } => {
                let (cmp, bound) = threshold(mode)?;
                let values = self.prob(coalition, cmp.direction(), path)?;
                values.iter().map(|v| self.compare(cmp, *v, bound)).collect()
            }
            StateFormula::Reward { coalition, index, mode, formula, .. } => {
                let (cmp, bound) = threshold(mode)?;
                let values = self.reward(coalition, cmp.direction(), *index, formula)?;
                values.iter().map(|v| self.compare(cmp, *v, bound)).collect()
            }
            StateFormula::Nash(q) => {
                let (cmp, bound) = threshold(&q.mode)?;
                let solution = self.nash(q)?;
                solution.values.iter().map(|v| self.compare(cmp, v.sum(), bound)).collect()
            }
        })
    }

    /// Threshold comparison with slack for values from value iteration.
    fn compare(&self, cmp: Comparison, value: f64, bound: &Rational) -> bool {
        let b = num::to_f64(bound);
        let tol = self.settings.conv_epsilon;
        match cmp {
            Comparison::Ge => value >= b - tol,
            Comparison::Le => value <= b + tol,
            Comparison::Gt => value > b + tol,
            Comparison::Lt => value < b - tol,
        }
    }

    fn nash(&self, q: &NashQuery) -> Result<NashSolution, CheckError> {
        let goals = [self.goal(&q.objectives[0])?, self.goal(&q.objectives[1])?];
        Ok(nash::solve(self.g, &q.coalition, &goals, self.settings)?)
    }

    fn goal(&self, o: &Objective) -> Result<Goal, CheckError> {
        Ok(match o {
            Objective::Prob(PathFormula::Next(t)) => Goal::Next { target: self.sat(t)? },
            Objective::Prob(PathFormula::Until { left, right, bound }) => {
                Goal::Until { left: self.sat(left)?, right: self.sat(right)?, bound: bound.map(steps) }
            }
            Objective::Reward { index, formula, .. } => match formula {
                RewardFormula::Instant(k) => Goal::Instant { reward: *index, k: steps(*k) },
                RewardFormula::Cumulative(k) => Goal::Cumulative { reward: *index, k: steps(*k) },
                RewardFormula::Reach(t) => Goal::Reach { reward: *index, target: self.sat(t)? },
            },
        })
    }

    /// Direction of the single decision maker controlling every player.
    fn controller(&self, coalition: &[usize], d: Direction) -> Result<Optimise, CheckError> {
        let all = coalition.len() == self.g.num_players();
        let opt = match (d, all || coalition.is_empty()) {
            (_, false) => {
                return Err(CheckError::Unsupported(
                    "zero-sum operators are evaluated only for the empty or the grand coalition".into(),
                ))
            }
            (Direction::Max, _) => Optimise::Max,
            (Direction::Min, _) => Optimise::Min,
        };
        Ok(if all { opt } else { flip(opt) })
    }

    fn prob(&self, coalition: &[usize], d: Direction, path: &PathFormula) -> Result<Vec<f64>, CheckError> {
        let opt = self.controller(coalition, d)?;
        let mdp = full_mdp(self.g);
        Ok(match path {
            PathFormula::Next(t) => to_f64(&next_prob::<Rational>(&mdp, &self.sat(t)?, opt).0),
            PathFormula::Until { left, right, bound: Some(k) } => {
                let k = steps(*k);
                to_f64(&bounded_until::<Rational>(&mdp, &self.sat(left)?, &self.sat(right)?, k, opt).layers[k])
            }
            PathFormula::Until { left, right, bound: None } => {
                until(&mdp, &self.sat(left)?, &self.sat(right)?, opt, &self.iteration())?.values
            }
        })
    }

    fn reward(
        &self,
        coalition: &[usize],
        d: Direction,
        index: usize,
        formula: &RewardFormula,
    ) -> Result<Vec<f64>, CheckError> {
        let opt = self.controller(coalition, d)?;
        let mdp = full_mdp(self.g);
        Ok(match formula {
            RewardFormula::Instant(k) => {
                let k = steps(*k);
                to_f64(&instantaneous_reward::<Rational>(&mdp, index, k, opt)?.layers[k])
            }
            RewardFormula::Cumulative(k) => {
                let k = steps(*k);
                to_f64(&cumulative_reward::<Rational>(&mdp, index, k, opt)?.layers[k])
            }
            RewardFormula::Reach(t) => {
                if opt == Optimise::Min {
                    return Err(CheckError::Unsupported("minimal expected reachability reward".into()));
                }
                let open = Mdp { initial: Vec::new(), ..mdp };
                reach_reward(&open, index, &self.sat(t)?, &self.iteration())?.values
            }
        })
    }

    fn iteration(&self) -> IterationSettings {
        IterationSettings { epsilon: self.settings.conv_epsilon.min(1e-8), ..IterationSettings::default() }
    }
}

fn threshold(mode: &QueryMode) -> Result<(Comparison, &Rational), CheckError> {
    match mode {
        QueryMode::Threshold(cmp, bound) => Ok((*cmp, bound)),
        QueryMode::Value(_) => Err(CheckError::Unsupported("value query nested inside a formula".into())),
    }
}

fn flip(o: Optimise) -> Optimise {
    match o {
        Optimise::Max => Optimise::Min,
        Optimise::Min => Optimise::Max,
    }
}

fn steps(k: u64) -> usize {
    usize::try_from(k).expect("step bound fits in usize")
}

fn to_f64(v: &[Rational]) -> Vec<f64> {
    v.iter().map(num::to_f64).collect()
}

/// Every joint move of the game as a choice of one decision maker.
fn full_mdp(g: &Csg) -> Mdp {
    let choices: Vec<Vec<MdpChoice>> = (0..g.num_states())
        .map(|s| {
            g.choices(s).iter().enumerate().map(|(k, c)| MdpChoice { id: k, dist: c.dist.entries().to_vec() }).collect()
        })
        .collect();
    let rewards = g
        .rewards()
        .iter()
        .map(|r| MdpRewards { name: r.name.clone(), state: r.state.clone(), choice: r.action.clone() })
        .collect();
    Mdp { initial: g.initial().to_vec(), choices, rewards }
}
