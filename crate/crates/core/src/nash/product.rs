//! Mixed pairs (one finite, one unbounded objective) become unbounded pairs
//! on a product of the game with a step counter `i`; state `(s, 0)` of the
//! product stands for `s`.

use std::collections::{HashMap, VecDeque};
use std::sync::Arc;

use num_traits::Zero;

use super::{Goal, NashError};
use crate::model::{Csg, CsgBuilder, Distribution, StateId};

#[derive(Clone, Debug)]
pub struct Product {
    pub game: Arc<Csg>,
    /// Both unbounded, over the product's states and reward structures.
    pub goals: [Goal; 2],
    /// Product state `(s, 0)` for each original state `s`.
    pub embedding: Vec<StateId>,
    /// Counter value of each product state.
    pub layer: Vec<usize>,
    /// Original state of each product state.
    pub origin: Vec<StateId>,
}

struct Layers<'a> {
    g: &'a Csg,
    index: HashMap<(StateId, usize), StateId>,
    order: Vec<(StateId, usize)>,
    queue: VecDeque<(StateId, usize)>,
}

impl Layers<'_> {
    fn visit(&mut self, b: &mut CsgBuilder, key: (StateId, usize)) -> StateId {
        if let Some(id) = self.index.get(&key) {
            return *id;
        }
        let name = layer_name(self.g, key.0, key.1);
        let valuation = self.g.valuation(key.0);
        let id =
            if valuation.is_empty() { b.add_state(name) } else { b.add_state_with_valuation(name, valuation.to_vec()) };
        self.index.insert(key, id);
        self.order.push(key);
        self.queue.push_back(key);
        id
    }
}

fn layer_name(g: &Csg, s: StateId, i: usize) -> String {
    format!("{} @{}", g.state(s).name, i)
}

fn fresh(taken: &dyn Fn(&str) -> bool, base: &str) -> String {
    let mut name = base.to_string();
    while taken(&name) {
        name.push('\'');
    }
    name
}

/// Builds the layered product for a mixed pair: `X` uses layers `{0, 1}`,
/// `U<=k` layers `0..=k+1`, `I=k` layers `0..=k+1` with the reward paid only
/// on layer `k`, and `C<=k` layers `0..=k` with the reward zeroed on layer
/// `k`. The counter saturates at its last layer.
pub fn mixed_horizon_product(g: &Csg, goals: &[Goal; 2]) -> Result<Product, NashError> {
    let f = match (goals[0].is_finite(), goals[1].is_finite()) {
        (true, false) => 0,
        (false, true) => 1,
        _ => panic!("mixed_horizon_product needs exactly one finite objective"),
    };
    let finite = &goals[f];
    let top = match finite {
        Goal::Next { .. } => 1,
        Goal::Until { bound: Some(k), .. } | Goal::Instant { k, .. } => k + 1,
        Goal::Cumulative { k, .. } => *k,
        _ => unreachable!(),
    };
    let step = |i: usize| (i + 1).min(top);

    let mut b = CsgBuilder::new(g.players().to_vec());
    if !g.is_exact() {
        b.set_inexact();
    }
    let mut layers = Layers { g, index: HashMap::new(), order: Vec::new(), queue: VecDeque::new() };
    for s in 0..g.num_states() {
        let id = layers.visit(&mut b, (s, 0));
        b.set_initial(id);
    }
    let structures: Vec<usize> = g.rewards().iter().map(|r| b.add_reward_structure(r.name.clone())).collect();
    let extra = match finite {
        Goal::Instant { reward, .. } | Goal::Cumulative { reward, .. } => {
            let taken = |n: &str| g.reward_index(n).is_some();
            Some((*reward, b.add_reward_structure(fresh(&taken, &format!("{}'", g.rewards()[*reward].name)))))
        }
        _ => None,
    };
    while let Some((s, i)) = layers.queue.pop_front() {
        let id = layers.index[&(s, i)];
        b.set_available(id, g.state(s).available.clone());
        for (k, choice) in g.choices(s).iter().enumerate() {
            let mut entries = Vec::with_capacity(choice.dist.len());
            for (t, p) in choice.dist.entries() {
                entries.push((layers.visit(&mut b, (*t, step(i))), p.clone()));
            }
            b.add_transition(id, choice.moves.clone(), Distribution::from_entries(entries));
            for (r, rw) in g.rewards().iter().enumerate() {
                if !rw.action[s][k].is_zero() {
                    b.add_action_reward(structures[r], id, choice.moves.clone(), rw.action[s][k].clone());
                }
            }
            if let (Some((r, e)), Goal::Cumulative { k: bound, .. }) = (extra, finite) {
                let a = &g.rewards()[r].action[s][k];
                if i < *bound && !a.is_zero() {
                    b.add_action_reward(e, id, choice.moves.clone(), a.clone());
                }
            }
        }
        for (r, rw) in g.rewards().iter().enumerate() {
            if !rw.state[s].is_zero() {
                b.add_state_reward(structures[r], id, rw.state[s].clone());
            }
        }
        if let Some((r, e)) = extra {
            let v = &g.rewards()[r].state[s];
            let paid = match finite {
                Goal::Instant { k, .. } => i == *k,
                Goal::Cumulative { k, .. } => i < *k,
                _ => false,
            };
            if paid && !v.is_zero() {
                b.add_state_reward(e, id, v.clone());
            }
        }
        for (name, sat) in g.labels() {
            if sat[s] {
                b.add_label(name.clone(), id);
            } else {
                b.declare_label(name.clone());
            }
        }
    }

    let game = b.build()?;
    // the builder renumbers states; recover (s, i) by name
    let by_name: HashMap<String, (StateId, usize)> =
        layers.order.iter().map(|&(s, i)| (layer_name(g, s, i), (s, i))).collect();
    let keys: Vec<(StateId, usize)> = game.states().iter().map(|st| by_name[&st.name]).collect();
    let renumber: HashMap<(StateId, usize), StateId> = keys.iter().enumerate().map(|(j, k)| (*k, j)).collect();
    let embedding: Vec<StateId> = (0..g.num_states()).map(|s| renumber[&(s, 0)]).collect();
    let on = |pred: &dyn Fn(StateId, usize) -> bool| keys.iter().map(|&(s, i)| pred(s, i)).collect::<Vec<bool>>();

    let lifted = |goal: &Goal| match goal {
        Goal::Until { left, right, bound: None } => {
            Goal::Until { left: on(&|s, _| left[s]), right: on(&|s, _| right[s]), bound: None }
        }
        Goal::Reach { reward, target } => Goal::Reach { reward: *reward, target: on(&|s, _| target[s]) },
        _ => unreachable!(),
    };
    let rewritten = match finite {
        // reaching layer 1 outside the target fails the objective
        Goal::Next { target } => {
            Goal::Until { left: on(&|_, i| i == 0), right: on(&|s, i| i == 1 && target[s]), bound: None }
        }
        Goal::Until { left, right, bound: Some(k) } => {
            Goal::Until { left: on(&|s, i| left[s] && i < *k), right: on(&|s, i| right[s] && i <= *k), bound: None }
        }
        Goal::Instant { k, .. } => Goal::Reach { reward: extra.unwrap().1, target: on(&|_, i| i == k + 1) },
        Goal::Cumulative { k, .. } => Goal::Reach { reward: extra.unwrap().1, target: on(&|_, i| i == *k) },
        _ => unreachable!(),
    };
    let goals = if f == 0 { [rewritten, lifted(&goals[1])] } else { [lifted(&goals[0]), rewritten] };
    Ok(Product {
        game: Arc::new(game),
        goals,
        embedding,
        layer: keys.iter().map(|k| k.1).collect(),
        origin: keys.iter().map(|k| k.0).collect(),
    })
}
