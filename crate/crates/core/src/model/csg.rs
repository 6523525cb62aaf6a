use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::fmt;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::ModelError;
use crate::num::{self, Rational};

pub type StateId = usize;

/// A single player's move: one of its actions, or the idle action.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Move {
    Idle,
    /// Index into the player's alphabet.
    Act(usize),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Player {
    pub name: String,
    pub actions: Vec<String>,
}

impl Player {
    pub fn new(name: impl Into<String>, actions: &[&str]) -> Self {
        Player { name: name.into(), actions: actions.iter().map(|a| a.to_string()).collect() }
    }

    pub fn action_index(&self, action: &str) -> Option<usize> {
        self.actions.iter().position(|a| a == action)
    }

    pub fn move_name(&self, m: Move) -> &str {
        match m {
            Move::Idle => "-",
            Move::Act(i) => &self.actions[i],
        }
    }
}

/// Constant values carried by a model, used to resolve property expressions.
#[derive(Clone, Debug, PartialEq)]
pub enum ConstValue {
    Int(i64),
    Bool(bool),
    Rat(Rational),
}

impl fmt::Display for ConstValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConstValue::Int(i) => write!(f, "{i}"),
            ConstValue::Bool(b) => write!(f, "{b}"),
            ConstValue::Rat(r) => write!(f, "{}", num::format_rational(r)),
        }
    }
}

/// A probability distribution over successor states, sorted by state with
/// no duplicate or zero entries.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Distribution {
    entries: Vec<(StateId, Rational)>,
}

impl Distribution {
    /// Merges duplicates and drops zero-probability entries. Does not
    /// check the sum.
    pub fn from_entries(entries: impl IntoIterator<Item = (StateId, Rational)>) -> Self {
        let mut merged: BTreeMap<StateId, Rational> = BTreeMap::new();
        for (s, p) in entries {
            *merged.entry(s).or_insert_with(Rational::zero) += p;
        }
        Distribution { entries: merged.into_iter().filter(|(_, p)| !p.is_zero()).collect() }
    }

    pub fn dirac(s: StateId) -> Self {
        Distribution { entries: vec![(s, Rational::one())] }
    }

    pub fn entries(&self) -> &[(StateId, Rational)] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn total(&self) -> Rational {
        self.entries.iter().map(|(_, p)| p).sum()
    }

    pub fn prob(&self, s: StateId) -> Rational {
        self.entries
            .binary_search_by_key(&s, |(t, _)| *t)
            .map(|i| self.entries[i].1.clone())
            .unwrap_or_else(|_| Rational::zero())
    }

    pub fn support(&self) -> impl Iterator<Item = StateId> + '_ {
        self.entries.iter().map(|(s, _)| *s)
    }

    pub(crate) fn remap(&self, map: &[Option<StateId>]) -> Distribution {
        Distribution::from_entries(self.entries.iter().map(|(s, p)| (map[*s].expect("reachable successor"), p.clone())))
    }
}

#[derive(Clone, Debug)]
pub struct Choice {
    /// One move per player.
    pub moves: Vec<Move>,
    pub dist: Distribution,
}

#[derive(Clone, Debug)]
pub struct StateInfo {
    pub name: String,
    /// Per player: available moves `A_i(s)`, `[Idle]` when none are enabled.
    pub available: Vec<Vec<Move>>,
    /// All joint moves in mixed-radix order over `available`, player 0 most
    /// significant.
    pub choices: Vec<Choice>,
}

#[derive(Clone, Debug)]
pub struct RewardStructure {
    pub name: String,
    pub state: Vec<Rational>,
    /// Parallel to each state's `choices`.
    pub action: Vec<Vec<Rational>>,
}

impl RewardStructure {
    pub fn has_action_rewards(&self) -> bool {
        self.action.iter().flatten().any(|r| !r.is_zero())
    }
}

#[derive(Clone, Debug)]
pub struct VariableInfo {
    pub name: String,
    pub low: i64,
    pub high: i64,
    pub boolean: bool,
}

/// A concurrent stochastic game restricted to the states reachable from its
/// initial states. Immutable once built.
#[derive(Clone, Debug)]
pub struct Csg {
    players: Vec<Player>,
    states: Vec<StateInfo>,
    initial: Vec<StateId>,
    labels: BTreeMap<String, Vec<bool>>,
    rewards: Vec<RewardStructure>,
    variables: Vec<VariableInfo>,
    valuations: Vec<Vec<i64>>,
    constants: BTreeMap<String, ConstValue>,
    exact: bool,
}

impl Csg {
    pub fn players(&self) -> &[Player] {
        &self.players
    }

    pub fn num_players(&self) -> usize {
        self.players.len()
    }

    pub fn player_index(&self, name: &str) -> Option<usize> {
        self.players.iter().position(|p| p.name == name)
    }

    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn state(&self, s: StateId) -> &StateInfo {
        &self.states[s]
    }

    pub fn states(&self) -> &[StateInfo] {
        &self.states
    }

    pub fn state_index(&self, name: &str) -> Option<StateId> {
        self.states.iter().position(|s| s.name == name)
    }

    pub fn initial(&self) -> &[StateId] {
        &self.initial
    }

    pub fn choices(&self, s: StateId) -> &[Choice] {
        &self.states[s].choices
    }

    pub fn available(&self, s: StateId, player: usize) -> &[Move] {
        &self.states[s].available[player]
    }

    pub fn num_choices(&self) -> usize {
        self.states.iter().map(|s| s.choices.len()).sum()
    }

    /// Number of (state, joint move, successor) triples.
    pub fn num_transitions(&self) -> usize {
        self.states.iter().flat_map(|s| &s.choices).map(|c| c.dist.len()).sum()
    }

    pub fn labels(&self) -> &BTreeMap<String, Vec<bool>> {
        &self.labels
    }

    pub fn label(&self, name: &str) -> Option<&[bool]> {
        self.labels.get(name).map(|v| v.as_slice())
    }

    pub fn state_labels(&self, s: StateId) -> Vec<&str> {
        self.labels.iter().filter(|(_, v)| v[s]).map(|(k, _)| k.as_str()).collect()
    }

    pub fn rewards(&self) -> &[RewardStructure] {
        &self.rewards
    }

    pub fn reward_index(&self, name: &str) -> Option<usize> {
        self.rewards.iter().position(|r| r.name == name)
    }

    pub fn variables(&self) -> &[VariableInfo] {
        &self.variables
    }

    pub fn variable_index(&self, name: &str) -> Option<usize> {
        self.variables.iter().position(|v| v.name == name)
    }

    /// Variable valuation of a state; empty for explicit-state models.
    pub fn valuation(&self, s: StateId) -> &[i64] {
        self.valuations.get(s).map(|v| v.as_slice()).unwrap_or(&[])
    }

    pub fn constants(&self) -> &BTreeMap<String, ConstValue> {
        &self.constants
    }

    /// True when every probability came from a rational literal.
    pub fn is_exact(&self) -> bool {
        self.exact
    }

    pub fn format_moves(&self, moves: &[Move]) -> String {
        let parts: Vec<&str> = moves.iter().zip(&self.players).map(|(m, p)| p.move_name(*m)).collect();
        format!("({})", parts.join(","))
    }

    /// Index of the choice with exactly these moves.
    pub fn choice_index(&self, s: StateId, moves: &[Move]) -> Option<usize> {
        let info = &self.states[s];
        let mut index = 0;
        for (player, m) in moves.iter().enumerate() {
            let avail = &info.available[player];
            let pos = avail.iter().position(|a| a == m)?;
            index = index * avail.len() + pos;
        }
        Some(index)
    }

    pub(crate) fn with_extras(mut self, variables: Vec<VariableInfo>, constants: BTreeMap<String, ConstValue>) -> Self {
        self.variables = variables;
        self.constants = constants;
        self
    }
}

/// Incremental construction of a [`Csg`].
pub struct CsgBuilder {
    players: Vec<Player>,
    names: Vec<String>,
    transitions: Vec<Vec<(Vec<Move>, Distribution)>>,
    available: Vec<Option<Vec<Vec<Move>>>>,
    initial: Vec<StateId>,
    labels: BTreeMap<String, BTreeSet<StateId>>,
    rewards: Vec<(String, HashMap<StateId, Rational>, HashMap<(StateId, Vec<Move>), Rational>)>,
    valuations: Vec<Vec<i64>>,
    exact: bool,
    tolerance: Rational,
}

impl CsgBuilder {
    pub fn new(players: Vec<Player>) -> Self {
        CsgBuilder {
            players,
            names: Vec::new(),
            transitions: Vec::new(),
            available: Vec::new(),
            initial: Vec::new(),
            labels: BTreeMap::new(),
            rewards: Vec::new(),
            valuations: Vec::new(),
            exact: true,
            tolerance: num::rat(1, 1_000_000_000),
        }
    }

    /// Marks the model as containing floating-point probabilities, which
    /// relaxes the distribution-sum check to a tolerance.
    pub fn set_inexact(&mut self) {
        self.exact = false;
    }

    pub fn add_state(&mut self, name: impl Into<String>) -> StateId {
        self.names.push(name.into());
        self.transitions.push(Vec::new());
        self.available.push(None);
        self.names.len() - 1
    }

    pub fn add_state_with_valuation(&mut self, name: impl Into<String>, valuation: Vec<i64>) -> StateId {
        let s = self.add_state(name);
        self.valuations.push(valuation);
        s
    }

    pub fn num_states(&self) -> usize {
        self.names.len()
    }

    pub fn set_initial(&mut self, s: StateId) {
        if !self.initial.contains(&s) {
            self.initial.push(s);
        }
    }

    pub fn set_available(&mut self, s: StateId, available: Vec<Vec<Move>>) {
        self.available[s] = Some(available);
    }

    pub fn add_transition(&mut self, s: StateId, moves: Vec<Move>, dist: Distribution) {
        self.transitions[s].push((moves, dist));
    }

    pub fn add_label(&mut self, name: impl Into<String>, s: StateId) {
        self.labels.entry(name.into()).or_default().insert(s);
    }

    /// Declares a label that may hold in no state.
    pub fn declare_label(&mut self, name: impl Into<String>) {
        self.labels.entry(name.into()).or_default();
    }

    pub fn add_reward_structure(&mut self, name: impl Into<String>) -> usize {
        self.rewards.push((name.into(), HashMap::new(), HashMap::new()));
        self.rewards.len() - 1
    }

    pub fn add_state_reward(&mut self, reward: usize, s: StateId, value: Rational) {
        *self.rewards[reward].1.entry(s).or_insert_with(Rational::zero) += value;
    }

    pub fn add_action_reward(&mut self, reward: usize, s: StateId, moves: Vec<Move>, value: Rational) {
        *self.rewards[reward].2.entry((s, moves)).or_insert_with(Rational::zero) += value;
    }

    /// Validates every structural invariant, drops unreachable states and
    /// renumbers the rest in order of first appearance.
    pub fn build(self) -> Result<Csg, ModelError> {
        let n = self.names.len();
        if self.initial.is_empty() {
            return Err(ModelError::NoInitialState);
        }
        let nplayers = self.players.len();
        let mut infos: Vec<Option<StateInfo>> = Vec::with_capacity(n);
        for s in 0..n {
            let trans = &self.transitions[s];
            let available = match &self.available[s] {
                Some(a) => a.clone(),
                None => infer_available(nplayers, trans),
            };
            if available.len() != nplayers {
                return Err(ModelError::Malformed(format!(
                    "state {}: availability given for {} players, expected {}",
                    self.names[s],
                    available.len(),
                    nplayers
                )));
            }
            let mut by_moves: HashMap<&[Move], &Distribution> = HashMap::new();
            for (moves, dist) in trans {
                if moves.len() != nplayers {
                    return Err(ModelError::Malformed(format!(
                        "state {}: joint move of arity {}",
                        self.names[s],
                        moves.len()
                    )));
                }
                for (p, m) in moves.iter().enumerate() {
                    if !available[p].contains(m) {
                        return Err(ModelError::UnavailableMove {
                            state: self.names[s].clone(),
                            player: self.players[p].name.clone(),
                        });
                    }
                }
                if by_moves.insert(moves.as_slice(), dist).is_some() {
                    return Err(ModelError::Malformed(format!("state {}: duplicate joint move", self.names[s])));
                }
                let total = dist.total();
                let ok =
                    if self.exact { total.is_one() } else { (total.clone() - Rational::one()).abs() <= self.tolerance };
                if !ok {
                    return Err(ModelError::BadDistribution { state: self.names[s].clone(), sum: num::to_f64(&total) });
                }
                if let Some(bad) = dist.support().find(|t| *t >= n) {
                    return Err(ModelError::Malformed(format!(
                        "state {}: successor {} out of range",
                        self.names[s], bad
                    )));
                }
            }
            let mut choices = Vec::new();
            for moves in product(&available) {
                match by_moves.get(moves.as_slice()) {
                    Some(dist) => choices.push(Choice { moves, dist: (*dist).clone() }),
                    None => {
                        let players = &self.players;
                        let text: Vec<&str> = moves.iter().zip(players).map(|(m, p)| p.move_name(*m)).collect();
                        return Err(ModelError::MissingTransition {
                            state: self.names[s].clone(),
                            moves: format!("({})", text.join(",")),
                        });
                    }
                }
            }
            if choices.len() != trans.len() {
                return Err(ModelError::Malformed(format!(
                    "state {}: transitions do not form the product of available moves",
                    self.names[s]
                )));
            }
            infos.push(Some(StateInfo { name: self.names[s].clone(), available, choices }));
        }

        // reachability from the initial states, in BFS order
        let mut map: Vec<Option<StateId>> = vec![None; n];
        let mut order = Vec::new();
        let mut queue = VecDeque::new();
        for &s in &self.initial {
            if s >= n {
                return Err(ModelError::Malformed(format!("initial state {s} out of range")));
            }
            if map[s].is_none() {
                map[s] = Some(order.len());
                order.push(s);
                queue.push_back(s);
            }
        }
        while let Some(s) = queue.pop_front() {
            let info = infos[s].as_ref().unwrap();
            for c in &info.choices {
                for t in c.dist.support() {
                    if map[t].is_none() {
                        map[t] = Some(order.len());
                        order.push(t);
                        queue.push_back(t);
                    }
                }
            }
        }
        // keep the original order among reachable states when nothing was pruned
        if order.len() == n {
            order = (0..n).collect();
            for (i, &s) in order.iter().enumerate() {
                map[s] = Some(i);
            }
        }

        let mut states = Vec::with_capacity(order.len());
        for &s in &order {
            let mut info = infos[s].take().unwrap();
            for c in &mut info.choices {
                c.dist = c.dist.remap(&map);
            }
            states.push(info);
        }
        let initial: Vec<StateId> = self.initial.iter().map(|s| map[*s].unwrap()).collect();
        let labels = self
            .labels
            .into_iter()
            .map(|(name, set)| {
                let mut v = vec![false; order.len()];
                for s in set {
                    if let Some(Some(t)) = map.get(s) {
                        v[*t] = true;
                    }
                }
                (name, v)
            })
            .collect();
        let mut rewards = Vec::new();
        for (name, state_r, action_r) in self.rewards {
            let mut state = vec![Rational::zero(); order.len()];
            let mut action: Vec<Vec<Rational>> =
                states.iter().map(|i| vec![Rational::zero(); i.choices.len()]).collect();
            for (s, r) in state_r {
                if r.is_negative() {
                    return Err(ModelError::NegativeReward { reward: name });
                }
                if let Some(t) = map[s] {
                    state[t] = r;
                }
            }
            for ((s, moves), r) in action_r {
                if r.is_negative() {
                    return Err(ModelError::NegativeReward { reward: name });
                }
                if let Some(t) = map[s] {
                    let idx = choice_position(&states[t], &moves).ok_or_else(|| {
                        ModelError::Malformed(format!("reward {name}: action reward on undefined joint move"))
                    })?;
                    action[t][idx] = r;
                }
            }
            rewards.push(RewardStructure { name, state, action });
        }
        let valuations = if self.valuations.len() == n {
            order.iter().map(|s| self.valuations[*s].clone()).collect()
        } else {
            Vec::new()
        };
        Ok(Csg {
            players: self.players,
            states,
            initial,
            labels,
            rewards,
            variables: Vec::new(),
            valuations,
            constants: BTreeMap::new(),
            exact: self.exact,
        })
    }
}

fn choice_position(info: &StateInfo, moves: &[Move]) -> Option<usize> {
    let mut index = 0;
    for (player, m) in moves.iter().enumerate() {
        let avail = info.available.get(player)?;
        let pos = avail.iter().position(|a| a == m)?;
        index = index * avail.len() + pos;
    }
    Some(index)
}

fn infer_available(nplayers: usize, trans: &[(Vec<Move>, Distribution)]) -> Vec<Vec<Move>> {
    let mut sets: Vec<BTreeSet<Move>> = vec![BTreeSet::new(); nplayers];
    for (moves, _) in trans {
        for (p, m) in moves.iter().enumerate().take(nplayers) {
            sets[p].insert(*m);
        }
    }
    sets.into_iter().map(|s| if s.is_empty() { vec![Move::Idle] } else { s.into_iter().collect() }).collect()
}

/// Cartesian product in mixed-radix order, first factor most significant.
pub(crate) fn product(sets: &[Vec<Move>]) -> Vec<Vec<Move>> {
    let mut out = vec![Vec::with_capacity(sets.len())];
    for set in sets {
        let mut next = Vec::with_capacity(out.len() * set.len());
        for prefix in &out {
            for m in set {
                let mut v = prefix.clone();
                v.push(*m);
                next.push(v);
            }
        }
        out = next;
    }
    out
}
