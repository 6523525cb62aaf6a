use num_traits::Zero;

use super::coalition::CoalitionGame;
use super::csg::StateId;
use crate::num::Rational;

#[derive(Clone, Debug)]
pub struct MdpChoice {
    /// Caller-defined identifier; for joint MDPs `row * num_cols + col`.
    pub id: usize,
    pub dist: Vec<(StateId, Rational)>,
}

#[derive(Clone, Debug)]
pub struct MdpRewards {
    pub name: String,
    pub state: Vec<Rational>,
    /// Parallel to each state's choices.
    pub choice: Vec<Vec<Rational>>,
}

#[derive(Clone, Debug)]
pub struct Mdp {
    pub initial: Vec<StateId>,
    pub choices: Vec<Vec<MdpChoice>>,
    pub rewards: Vec<MdpRewards>,
}

impl Mdp {
    pub fn num_states(&self) -> usize {
        self.choices.len()
    }

    pub fn num_choices(&self) -> usize {
        self.choices.iter().map(|c| c.len()).sum()
    }

    pub fn reward_index(&self, name: &str) -> Option<usize> {
        self.rewards.iter().position(|r| r.name == name)
    }

    /// Predecessor lists: `(source, choice index)` for every edge into a state.
    pub fn predecessors(&self) -> Vec<Vec<(StateId, usize)>> {
        let mut pre = vec![Vec::new(); self.num_states()];
        for (s, choices) in self.choices.iter().enumerate() {
            for (k, c) in choices.iter().enumerate() {
                for (t, _) in &c.dist {
                    if pre[*t].last() != Some(&(s, k)) {
                        pre[*t].push((s, k));
                    }
                }
            }
        }
        pre
    }
}

/// The MDP in which one decision maker picks both coalitions' actions.
pub fn joint_mdp(cg: &CoalitionGame) -> Mdp {
    let g = cg.base();
    let n = g.num_states();
    let mut choices = Vec::with_capacity(n);
    let mut rewards: Vec<MdpRewards> = g
        .rewards()
        .iter()
        .map(|r| MdpRewards { name: r.name.clone(), state: r.state.clone(), choice: Vec::with_capacity(n) })
        .collect();
    for s in 0..n {
        let (rows, cols) = (cg.num_rows(s), cg.num_cols(s));
        let mut cs = Vec::with_capacity(rows * cols);
        let mut rs: Vec<Vec<Rational>> = vec![Vec::with_capacity(rows * cols); rewards.len()];
        for r in 0..rows {
            for c in 0..cols {
                let idx = cg.choice_index(s, r, c);
                cs.push(MdpChoice { id: r * cols + c, dist: g.choices(s)[idx].dist.entries().to_vec() });
                for (k, rw) in g.rewards().iter().enumerate() {
                    rs[k].push(rw.action[s][idx].clone());
                }
            }
        }
        choices.push(cs);
        for (k, r) in rs.into_iter().enumerate() {
            rewards[k].choice.push(r);
        }
    }
    Mdp { initial: g.initial().to_vec(), choices, rewards }
}

impl MdpRewards {
    pub fn zero(name: &str, mdp_choices: &[Vec<MdpChoice>]) -> Self {
        MdpRewards {
            name: name.to_string(),
            state: vec![Rational::zero(); mdp_choices.len()],
            choice: mdp_choices.iter().map(|c| vec![Rational::zero(); c.len()]).collect(),
        }
    }
}
