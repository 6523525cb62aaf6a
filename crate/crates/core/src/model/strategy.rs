use std::collections::{BTreeMap, HashMap, VecDeque};

use num_traits::Zero;

use super::coalition::CoalitionGame;
use super::csg::StateId;
use super::mdp::{Mdp, MdpChoice, MdpRewards};
use super::ModelError;
use crate::num::Rational;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Side {
    First,
    Second,
}

impl Side {
    pub fn other(self) -> Side {
        match self {
            Side::First => Side::Second,
            Side::Second => Side::First,
        }
    }

    pub fn index(self) -> usize {
        match self {
            Side::First => 0,
            Side::Second => 1,
        }
    }
}

/// A finite-memory strategy pair for a coalition game. Memory is a plain
/// index; both coalitions observe the same memory.
pub trait CoalitionStrategy {
    fn initial_memory(&self, state: StateId) -> usize;
    fn next_memory(&self, memory: usize, next: StateId) -> usize;
    /// Distribution over `side`'s local actions, or `None` when undefined.
    fn decide(&self, side: Side, state: StateId, memory: usize) -> Option<Vec<(usize, Rational)>>;
}

/// Product of a coalition game with a strategy's memory.
#[derive(Clone, Debug)]
pub struct InducedMdp {
    pub mdp: Mdp,
    /// `(state, memory)` for every product state.
    pub product: Vec<(StateId, usize)>,
}

impl InducedMdp {
    pub fn index_of(&self, state: StateId, memory: usize) -> Option<usize> {
        self.product.iter().position(|p| *p == (state, memory))
    }
}

/// Fixes `fixed`'s randomised choices and leaves the other coalition free.
/// Choice ids of the result are the free coalition's local action indices.
pub fn induce_mdp(
    cg: &CoalitionGame,
    fixed: Side,
    strategy: &dyn CoalitionStrategy,
    starts: &[StateId],
) -> Result<InducedMdp, ModelError> {
    build_product(cg, Some(fixed), strategy, starts)
}

/// Fixes both coalitions, giving a Markov chain (one choice per state).
pub fn induce_chain(
    cg: &CoalitionGame,
    strategy: &dyn CoalitionStrategy,
    starts: &[StateId],
) -> Result<InducedMdp, ModelError> {
    build_product(cg, None, strategy, starts)
}

fn build_product(
    cg: &CoalitionGame,
    fixed: Option<Side>,
    strategy: &dyn CoalitionStrategy,
    starts: &[StateId],
) -> Result<InducedMdp, ModelError> {
    let g = cg.base();
    let mut index: HashMap<(StateId, usize), usize> = HashMap::new();
    let mut product = Vec::new();
    let mut queue = VecDeque::new();
    let mut initial = Vec::new();
    for &s in starts {
        let key = (s, strategy.initial_memory(s));
        let id = *index.entry(key).or_insert_with(|| {
            product.push(key);
            queue.push_back(key);
            product.len() - 1
        });
        if !initial.contains(&id) {
            initial.push(id);
        }
    }
    let nrew = g.rewards().len();
    let mut choices: Vec<Vec<MdpChoice>> = Vec::new();
    let mut choice_rewards: Vec<Vec<Vec<Rational>>> = vec![Vec::new(); nrew];
    while let Some((s, mem)) = queue.pop_front() {
        let undefined = || ModelError::IncompleteStrategy { state: g.state(s).name.clone(), memory: mem };
        let rows_dist: Vec<(usize, Rational)>;
        let cols_dist: Vec<(usize, Rational)>;
        // each option is a list of weighted (row, col) pairs
        let options: Vec<(usize, Vec<(usize, usize, Rational)>)> = match fixed {
            Some(Side::First) => {
                rows_dist = strategy.decide(Side::First, s, mem).ok_or_else(undefined)?;
                (0..cg.num_cols(s)).map(|c| (c, rows_dist.iter().map(|(r, p)| (*r, c, p.clone())).collect())).collect()
            }
            Some(Side::Second) => {
                cols_dist = strategy.decide(Side::Second, s, mem).ok_or_else(undefined)?;
                (0..cg.num_rows(s)).map(|r| (r, cols_dist.iter().map(|(c, p)| (r, *c, p.clone())).collect())).collect()
            }
            None => {
                rows_dist = strategy.decide(Side::First, s, mem).ok_or_else(undefined)?;
                cols_dist = strategy.decide(Side::Second, s, mem).ok_or_else(undefined)?;
                let mut pairs = Vec::new();
                for (r, p) in &rows_dist {
                    for (c, q) in &cols_dist {
                        pairs.push((*r, *c, p * q));
                    }
                }
                vec![(0, pairs)]
            }
        };
        let mut state_choices = Vec::with_capacity(options.len());
        let mut state_rewards: Vec<Vec<Rational>> = vec![Vec::with_capacity(options.len()); nrew];
        for (id, pairs) in options {
            let mut dist: BTreeMap<usize, Rational> = BTreeMap::new();
            let mut rew = vec![Rational::zero(); nrew];
            for (r, c, p) in pairs {
                if r >= cg.num_rows(s) || c >= cg.num_cols(s) {
                    return Err(undefined());
                }
                let k = cg.choice_index(s, r, c);
                for (t, q) in g.choices(s)[k].dist.entries() {
                    let key = (*t, strategy.next_memory(mem, *t));
                    let tid = *index.entry(key).or_insert_with(|| {
                        product.push(key);
                        queue.push_back(key);
                        product.len() - 1
                    });
                    *dist.entry(tid).or_insert_with(Rational::zero) += &p * q;
                }
                for (j, rw) in g.rewards().iter().enumerate() {
                    let a = &rw.action[s][k];
                    if !a.is_zero() {
                        rew[j] += &p * a;
                    }
                }
            }
            state_choices.push(MdpChoice { id, dist: dist.into_iter().filter(|(_, p)| !p.is_zero()).collect() });
            for (j, r) in rew.into_iter().enumerate() {
                state_rewards[j].push(r);
            }
        }
        choices.push(state_choices);
        for (j, r) in state_rewards.into_iter().enumerate() {
            choice_rewards[j].push(r);
        }
    }
    let rewards = g
        .rewards()
        .iter()
        .zip(choice_rewards)
        .map(|(rw, choice)| MdpRewards {
            name: rw.name.clone(),
            state: product.iter().map(|(s, _)| rw.state[*s].clone()).collect(),
            choice,
        })
        .collect();
    Ok(InducedMdp { mdp: Mdp { initial, choices, rewards }, product })
}
