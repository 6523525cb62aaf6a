//! Test-only brute-force oracles. They share no code with the library's
//! solvers: games are solved by enumerating vertices of the normalised
//! best-response polyhedra, and finite-horizon queries by backward induction
//! over (state, elapsed steps, objective status) read off the path semantics.

#![allow(dead_code)]

use std::collections::HashMap;
use std::path::PathBuf;

use csgnash::model::{Csg, CsgBuilder, Distribution, Move, Player};
use csgnash::num::{int, rat, Rational};
use num_traits::{One, Zero};
use rand::Rng;

pub fn model_text(name: &str) -> String {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../models").join(name);
    std::fs::read_to_string(path).unwrap()
}

/// Unique solution of a square system, by exact Gauss-Jordan elimination.
pub fn solve_square(mut m: Vec<Vec<Rational>>, mut b: Vec<Rational>) -> Option<Vec<Rational>> {
    let n = b.len();
    for col in 0..n {
        let pivot = (col..n).find(|r| !m[*r][col].is_zero())?;
        m.swap(col, pivot);
        b.swap(col, pivot);
        let inv = Rational::one() / m[col][col].clone();
        for k in col..n {
            m[col][k] = &m[col][k] * &inv;
        }
        b[col] = &b[col] * &inv;
        for r in 0..n {
            if r != col && !m[r][col].is_zero() {
                let f = m[r][col].clone();
                for k in col..n {
                    let d = &f * &m[col][k];
                    m[r][k] -= d;
                }
                let d = &f * &b[col];
                b[r] -= d;
            }
        }
    }
    Some(b)
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// Vertices of `{(p, w) : p >= 0, sum p = 1, M p <= w}` with their tight
/// labels: `own[i]` for `p_i = 0`, `other[j]` for row `j` of `M` tight.
fn polyhedron_vertices(
    m: &[Vec<Rational>],
    dim: usize,
    own: impl Fn(usize) -> usize,
    other: impl Fn(usize) -> usize,
) -> Vec<(Vec<Rational>, Vec<usize>)> {
    let rows = m.len();
    let ineqs = dim + rows;
    let mut out: Vec<(Vec<Rational>, Vec<usize>)> = Vec::new();
    for tight in subsets(ineqs, dim) {
        // unknowns: p_0..p_{dim-1}, w
        let mut a = Vec::with_capacity(dim + 1);
        let mut b = Vec::with_capacity(dim + 1);
        a.push((0..=dim).map(|k| if k < dim { int(1) } else { int(0) }).collect::<Vec<_>>());
        b.push(int(1));
        for &c in &tight {
            if c < dim {
                a.push((0..=dim).map(|k| if k == c { int(1) } else { int(0) }).collect());
            } else {
                let row = &m[c - dim];
                a.push((0..=dim).map(|k| if k < dim { row[k].clone() } else { int(-1) }).collect());
            }
            b.push(int(0));
        }
        let Some(sol) = solve_square(a, b) else { continue };
        let (p, w) = (&sol[..dim], &sol[dim]);
        if p.iter().any(|x| *x < int(0)) {
            continue;
        }
        let mut labels = Vec::new();
        let mut feasible = true;
        for (i, x) in p.iter().enumerate() {
            if x.is_zero() {
                labels.push(own(i));
            }
        }
        for (j, row) in m.iter().enumerate() {
            let lhs: Rational = row.iter().zip(p).map(|(a, x)| a * x).sum();
            if lhs > *w {
                feasible = false;
                break;
            }
            if lhs == *w {
                labels.push(other(j));
            }
        }
        if feasible && !out.iter().any(|(q, _)| q.as_slice() == p) {
            out.push((p.to_vec(), labels));
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq)]
pub struct Equilibrium {
    pub x: Vec<Rational>,
    pub y: Vec<Rational>,
    pub u: Rational,
    pub v: Rational,
}

/// Every extreme equilibrium: completely labelled pairs of vertices of the
/// normalised best-response polyhedra. Labels `0..l` are rows, `l..l+m`
/// columns.
pub fn extreme_equilibria(z1: &[Vec<Rational>], z2: &[Vec<Rational>]) -> Vec<Equilibrium> {
    let (l, m) = (z1.len(), z1[0].len());
    // row player's polyhedron bounds the column player's payoffs
    let bt: Vec<Vec<Rational>> = (0..m).map(|j| (0..l).map(|i| z2[i][j].clone()).collect()).collect();
    let px = polyhedron_vertices(&bt, l, |i| i, |j| l + j);
    let qy = polyhedron_vertices(z1, m, |j| l + j, |i| i);
    let mut out: Vec<Equilibrium> = Vec::new();
    for (x, lx) in &px {
        for (y, ly) in &qy {
            if (0..l + m).all(|k| lx.contains(&k) || ly.contains(&k)) {
                let u: Rational =
                    (0..l).flat_map(|i| (0..m).map(move |j| (i, j))).map(|(i, j)| &x[i] * &y[j] * &z1[i][j]).sum();
                let v: Rational =
                    (0..l).flat_map(|i| (0..m).map(move |j| (i, j))).map(|(i, j)| &x[i] * &y[j] * &z2[i][j]).sum();
                let e = Equilibrium { x: x.clone(), y: y.clone(), u, v };
                if !out.contains(&e) {
                    out.push(e);
                }
            }
        }
    }
    out
}

/// Values of the social-welfare optimum: largest sum, then an equal split
/// if available, then the largest first value.
pub fn swne_values(eqs: &[Equilibrium]) -> (Rational, Rational) {
    let best = eqs.iter().map(|e| &e.u + &e.v).max().expect("an equilibrium exists");
    let top: Vec<&Equilibrium> = eqs.iter().filter(|e| &e.u + &e.v == best).collect();
    let pick =
        top.iter().find(|e| e.u == e.v).copied().unwrap_or_else(|| top.iter().max_by(|a, b| a.u.cmp(&b.u)).unwrap());
    (pick.u.clone(), pick.v.clone())
}

/// Finite-horizon objectives by their path semantics.
#[derive(Clone, Debug)]
pub enum Objective {
    /// `left U<=k right`
    Until { left: Vec<bool>, right: Vec<bool>, k: usize },
    /// `X target`
    Next { target: Vec<bool> },
    /// Reward (state plus action) accumulated over the first `k` steps.
    Cumulative { reward: usize, k: usize },
    /// State reward `k` steps ahead.
    Instant { reward: usize, k: usize },
}

impl Objective {
    fn horizon(&self) -> usize {
        match self {
            Objective::Until { k, .. } | Objective::Cumulative { k, .. } | Objective::Instant { k, .. } => *k,
            Objective::Next { .. } => 1,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
enum Status {
    Pending,
    Won,
    Lost,
}

/// Joint moves of a set of players at `s`, in mixed-radix order.
pub fn coalition_moves(g: &Csg, s: usize, players: &[usize]) -> Vec<Vec<(usize, Move)>> {
    let mut out: Vec<Vec<(usize, Move)>> = vec![Vec::new()];
    for &p in players {
        let mut next = Vec::new();
        for prefix in &out {
            for m in g.available(s, p) {
                let mut v = prefix.clone();
                v.push((p, *m));
                next.push(v);
            }
        }
        out = next;
    }
    out
}

pub struct BoundedOracle<'a> {
    g: &'a Csg,
    coalition: Vec<usize>,
    opponents: Vec<usize>,
    goals: [Objective; 2],
    horizon: usize,
    memo: HashMap<(usize, usize, [Status; 2]), (Rational, Rational)>,
}

impl<'a> BoundedOracle<'a> {
    pub fn new(g: &'a Csg, coalition: &[usize], goals: [Objective; 2]) -> Self {
        let opponents = (0..g.num_players()).filter(|p| !coalition.contains(p)).collect();
        let horizon = goals[0].horizon().max(goals[1].horizon());
        BoundedOracle { g, coalition: coalition.to_vec(), opponents, goals, horizon, memo: HashMap::new() }
    }

    /// Subgame-perfect SWNE values from `s` at time 0.
    pub fn value(&mut self, s: usize) -> (Rational, Rational) {
        self.at(s, 0, [Status::Pending; 2])
    }

    fn update(&self, i: usize, s: usize, t: usize, st: Status) -> Status {
        if st != Status::Pending {
            return st;
        }
        match &self.goals[i] {
            Objective::Until { left, right, k } => {
                if right[s] && t <= *k {
                    Status::Won
                } else if !left[s] || t >= *k {
                    Status::Lost
                } else {
                    Status::Pending
                }
            }
            Objective::Next { target } if t == 1 => {
                if target[s] {
                    Status::Won
                } else {
                    Status::Lost
                }
            }
            _ => Status::Pending,
        }
    }

    fn settled_value(st: Status) -> Rational {
        if st == Status::Won {
            int(1)
        } else {
            int(0)
        }
    }

    /// Payoff collected at `(s, t)` independent of the moves.
    fn state_payoff(&self, i: usize, s: usize, t: usize) -> Rational {
        match &self.goals[i] {
            Objective::Instant { reward, k } if t == *k => self.g.rewards()[*reward].state[s].clone(),
            Objective::Cumulative { reward, k } if t < *k => self.g.rewards()[*reward].state[s].clone(),
            _ => int(0),
        }
    }

    fn action_payoff(&self, i: usize, s: usize, t: usize, choice: usize) -> Rational {
        match &self.goals[i] {
            Objective::Cumulative { reward, k } if t < *k => self.g.rewards()[*reward].action[s][choice].clone(),
            _ => int(0),
        }
    }

    fn at(&mut self, s: usize, t: usize, st: [Status; 2]) -> (Rational, Rational) {
        let st = [self.update(0, s, t, st[0]), self.update(1, s, t, st[1])];
        if let Some(v) = self.memo.get(&(s, t, st)) {
            return v.clone();
        }
        let goals = self.goals.clone();
        let reward_goal = |i: usize| matches!(goals[i], Objective::Cumulative { .. } | Objective::Instant { .. });
        let base = [self.state_payoff(0, s, t), self.state_payoff(1, s, t)];
        let result = if t == self.horizon {
            let f = |i: usize| if reward_goal(i) { base[i].clone() } else { Self::settled_value(st[i]) };
            (f(0), f(1))
        } else {
            let rows = coalition_moves(self.g, s, &self.coalition);
            let cols = coalition_moves(self.g, s, &self.opponents);
            let mut z = [vec![vec![int(0); cols.len()]; rows.len()], vec![vec![int(0); cols.len()]; rows.len()]];
            for (r, rm) in rows.iter().enumerate() {
                for (c, cm) in cols.iter().enumerate() {
                    let mut moves = vec![Move::Idle; self.g.num_players()];
                    for (p, m) in rm.iter().chain(cm) {
                        moves[*p] = *m;
                    }
                    let k = self.g.choice_index(s, &moves).expect("joint move defined");
                    let mut cont = [int(0), int(0)];
                    for (succ, p) in self.g.choices(s)[k].dist.entries().to_vec() {
                        let v = self.at(succ, t + 1, st);
                        cont[0] += &p * &v.0;
                        cont[1] += &p * &v.1;
                    }
                    for i in 0..2 {
                        z[i][r][c] = if reward_goal(i) {
                            &base[i] + self.action_payoff(i, s, t, k) + &cont[i]
                        } else if st[i] == Status::Pending {
                            cont[i].clone()
                        } else {
                            Self::settled_value(st[i])
                        };
                    }
                }
            }
            swne_values(&extreme_equilibria(&z[0], &z[1]))
        };
        self.memo.insert((s, t, st), result.clone());
        result
    }
}

/// Random two-player CSG with at most `max_states` states, at most two
/// actions per player, small-denominator probabilities, labels `a`, `b`
/// and reward structures `r1`, `r2` (state and action rewards).
pub fn random_csg(rng: &mut impl Rng, max_states: usize) -> Csg {
    let n = rng.gen_range(2..=max_states);
    let players = vec![Player::new("p1", &["a1", "b1"]), Player::new("p2", &["a2", "b2"])];
    let mut b = CsgBuilder::new(players);
    let ids: Vec<usize> = (0..n).map(|i| b.add_state(format!("s{i}"))).collect();
    b.set_initial(ids[0]);
    b.declare_label("a");
    b.declare_label("b");
    let r1 = b.add_reward_structure("r1");
    let r2 = b.add_reward_structure("r2");
    for &s in &ids {
        let avail = |rng: &mut _| -> Vec<Move> {
            match Rng::gen_range(rng, 0..3) {
                0 => vec![Move::Act(0)],
                _ => vec![Move::Act(0), Move::Act(1)],
            }
        };
        let (m1, m2) = (avail(rng), avail(rng));
        b.set_available(s, vec![m1.clone(), m2.clone()]);
        for a in &m1 {
            for c in &m2 {
                let support = rng.gen_range(1..=2.min(n));
                let mut weights: Vec<(usize, i64)> = Vec::new();
                for _ in 0..support {
                    weights.push((ids[rng.gen_range(0..n)], rng.gen_range(1..=3)));
                }
                let total: i64 = weights.iter().map(|w| w.1).sum();
                let dist = Distribution::from_entries(weights.into_iter().map(|(t, w)| (t, rat(w, total))));
                b.add_transition(s, vec![*a, *c], dist);
                for r in [r1, r2] {
                    if rng.gen_bool(0.4) {
                        b.add_action_reward(r, s, vec![*a, *c], int(rng.gen_range(0..=3)));
                    }
                }
            }
        }
        for r in [r1, r2] {
            if rng.gen_bool(0.4) {
                b.add_state_reward(r, s, int(rng.gen_range(0..=2)));
            }
        }
        if rng.gen_bool(0.35) {
            b.add_label("a", s);
        }
        if rng.gen_bool(0.35) {
            b.add_label("b", s);
        }
    }
    b.build().expect("well-formed random game")
}
