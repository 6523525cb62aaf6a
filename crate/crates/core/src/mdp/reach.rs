use std::collections::VecDeque;

use rayon::prelude::*;

use super::compiled::Compiled;
use super::qualitative::{prob0a, prob0e, prob1a, prob1e};
use super::{relative_change, IterationSettings, MdpError, Optimise};
use crate::model::Mdp;
use crate::num::Scalar;

/// Unbounded result: values and a memoryless optimal strategy (choice
/// index per state).
#[derive(Clone, Debug)]
pub struct ReachResult {
    pub values: Vec<f64>,
    pub strategy: Vec<usize>,
    pub iterations: usize,
}

/// Step-bounded result. `layers[r][s]` is the value with `r` steps
/// remaining; `strategy[r][s]` the optimal choice there (`strategy[0]` is
/// empty).
#[derive(Clone, Debug)]
pub struct Layered<S> {
    pub layers: Vec<Vec<S>>,
    pub strategy: Vec<Vec<usize>>,
}

impl<S> Layered<S> {
    pub fn last(&self) -> &[S] {
        self.layers.last().expect("at least one layer")
    }
}

pub(crate) fn better<S: Scalar>(opt: Optimise, a: &S, b: &S) -> bool {
    match opt {
        Optimise::Max => a > b,
        Optimise::Min => a < b,
    }
}

/// Best choice at `s` against `values`; ties go to the lowest index.
pub(crate) fn best_choice<S: Scalar>(
    m: &Compiled<S>,
    s: usize,
    values: &[S],
    opt: Optimise,
    bonus: impl Fn(usize) -> S,
) -> (S, usize) {
    let mut best: Option<(S, usize)> = None;
    for k in 0..m.num_choices(s) {
        let v = bonus(k).plus(&m.expect(s, k, values));
        if best.as_ref().is_none_or(|(b, _)| better(opt, &v, b)) {
            best = Some((v, k));
        }
    }
    best.expect("every state has a choice")
}

/// `P^opt(left U<=k right)` by exact backward layers.
pub fn bounded_until<S: Scalar>(mdp: &Mdp, left: &[bool], right: &[bool], k: usize, opt: Optimise) -> Layered<S> {
    let m = Compiled::<S>::new(mdp);
    let n = mdp.num_states();
    let base: Vec<S> = (0..n).map(|s| if right[s] { S::unit() } else { S::nil() }).collect();
    let mut layers = vec![base];
    let mut strategy = vec![Vec::new()];
    for _ in 0..k {
        let prev = layers.last().unwrap();
        let (vals, strat): (Vec<S>, Vec<usize>) = (0..n)
            .into_par_iter()
            .map(|s| {
                if right[s] {
                    (S::unit(), 0)
                } else if !left[s] {
                    (S::nil(), 0)
                } else {
                    best_choice(&m, s, prev, opt, |_| S::nil())
                }
            })
            .unzip();
        layers.push(vals);
        strategy.push(strat);
    }
    Layered { layers, strategy }
}

/// `P^opt(X target)`.
pub fn next_prob<S: Scalar>(mdp: &Mdp, target: &[bool], opt: Optimise) -> (Vec<S>, Vec<usize>) {
    let m = Compiled::<S>::new(mdp);
    let ind: Vec<S> = target.iter().map(|b| if *b { S::unit() } else { S::nil() }).collect();
    (0..mdp.num_states()).map(|s| best_choice(&m, s, &ind, opt, |_| S::nil())).unzip()
}

/// `P^opt(left U right)` by value iteration after qualitative
/// precomputation.
pub fn until(
    mdp: &Mdp,
    left: &[bool],
    right: &[bool],
    opt: Optimise,
    settings: &IterationSettings,
) -> Result<ReachResult, MdpError> {
    let n = mdp.num_states();
    let (no, yes) = match opt {
        Optimise::Max => (prob0a(mdp, left, right), prob1e(mdp, left, right)),
        Optimise::Min => (prob0e(mdp, left, right), prob1a(mdp, left, right)),
    };
    let m = Compiled::<f64>::new(mdp);
    let mut values: Vec<f64> = (0..n).map(|s| if yes[s] { 1.0 } else { 0.0 }).collect();
    let mut iterations = 0;
    let unknown: Vec<usize> = (0..n).filter(|s| !yes[*s] && !no[*s]).collect();
    if !unknown.is_empty() {
        loop {
            iterations += 1;
            let updated: Vec<(usize, f64)> =
                unknown.par_iter().map(|&s| (s, best_choice(&m, s, &values, opt, |_| 0.0).0)).collect();
            let mut next = values.clone();
            for (s, v) in updated {
                next[s] = v;
            }
            let change = relative_change(&next, &values);
            values = next;
            if change < settings.epsilon {
                break;
            }
            if iterations >= settings.max_iters {
                return Err(MdpError::NotConverged { iterations });
            }
        }
    }
    let strategy = match opt {
        Optimise::Max => progressive_strategy(mdp, &m, &values, right, settings.epsilon * 10.0),
        Optimise::Min => (0..n).map(|s| best_choice(&m, s, &values, opt, |_| 0.0).1).collect(),
    };
    Ok(ReachResult { values, strategy, iterations })
}

/// Maximising strategy that also makes progress: among value-optimal
/// choices, picks one with a successor closer to the target.
pub(crate) fn progressive_strategy(
    mdp: &Mdp,
    m: &Compiled<f64>,
    values: &[f64],
    targets: &[bool],
    tol: f64,
) -> Vec<usize> {
    let n = mdp.num_states();
    let optimal = |s: usize, k: usize| {
        let v = m.expect(s, k, values);
        v >= values[s] - tol * values[s].abs().max(1.0)
    };
    let mut strategy: Vec<Option<usize>> = vec![None; n];
    let mut done: Vec<bool> = targets.to_vec();
    let pre = mdp.predecessors();
    let mut queue: VecDeque<usize> = (0..n).filter(|s| targets[*s]).collect();
    for s in 0..n {
        if targets[s] {
            strategy[s] = Some(0);
        }
    }
    while let Some(t) = queue.pop_front() {
        let mut sources: Vec<usize> = pre[t].iter().map(|(s, _)| *s).collect();
        sources.sort_unstable();
        sources.dedup();
        for s in sources {
            if done[s] || values[s] <= 0.0 {
                continue;
            }
            let pick = (0..m.num_choices(s)).find(|&k| optimal(s, k) && m.successors(s, k).iter().any(|u| done[*u]));
            if let Some(k) = pick {
                strategy[s] = Some(k);
                done[s] = true;
                queue.push_back(s);
            }
        }
    }
    (0..n).map(|s| strategy[s].unwrap_or_else(|| (0..m.num_choices(s)).find(|&k| optimal(s, k)).unwrap_or(0))).collect()
}
