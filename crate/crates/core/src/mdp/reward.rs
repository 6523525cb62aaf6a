use rayon::prelude::*;

use super::compiled::Compiled;
use super::qualitative::prob1_min_set;
use super::reach::{best_choice, Layered};
use super::{relative_change, IterationSettings, MdpError, Optimise};
use crate::model::Mdp;
use crate::num::Scalar;

#[derive(Clone, Debug)]
pub struct RewardResult {
    /// `f64::INFINITY` where the targets are not reached almost surely.
    pub values: Vec<f64>,
    pub strategy: Vec<usize>,
    pub iterations: usize,
}

fn reward_of(mdp: &Mdp, reward: usize) -> Result<(), MdpError> {
    if reward < mdp.rewards.len() {
        Ok(())
    } else {
        Err(MdpError::UnknownReward(format!("#{reward}")))
    }
}

/// `R^opt(I=k)`: state reward collected exactly at step `k`.
pub fn instantaneous_reward<S: Scalar>(
    mdp: &Mdp,
    reward: usize,
    k: usize,
    opt: Optimise,
) -> Result<Layered<S>, MdpError> {
    reward_of(mdp, reward)?;
    let m = Compiled::<S>::new(mdp);
    let r = &mdp.rewards[reward];
    let n = mdp.num_states();
    let mut layers = vec![r.state.iter().map(S::from_rational).collect::<Vec<S>>()];
    let mut strategy = vec![Vec::new()];
    for _ in 0..k {
        let prev = layers.last().unwrap();
        let (v, st): (Vec<S>, Vec<usize>) =
            (0..n).into_par_iter().map(|s| best_choice(&m, s, prev, opt, |_| S::nil())).unzip();
        layers.push(v);
        strategy.push(st);
    }
    Ok(Layered { layers, strategy })
}

/// `R^opt(C<=k)`: state and action rewards summed over the first `k` steps.
pub fn cumulative_reward<S: Scalar>(mdp: &Mdp, reward: usize, k: usize, opt: Optimise) -> Result<Layered<S>, MdpError> {
    reward_of(mdp, reward)?;
    let m = Compiled::<S>::new(mdp);
    let r = &mdp.rewards[reward];
    let n = mdp.num_states();
    let state: Vec<S> = r.state.iter().map(S::from_rational).collect();
    let action: Vec<Vec<S>> = r.choice.iter().map(|c| c.iter().map(S::from_rational).collect()).collect();
    let mut layers = vec![vec![S::nil(); n]];
    let mut strategy = vec![Vec::new()];
    for _ in 0..k {
        let prev = layers.last().unwrap();
        let (v, st): (Vec<S>, Vec<usize>) = (0..n)
            .into_par_iter()
            .map(|s| {
                let (best, c) = best_choice(&m, s, prev, opt, |k| action[s][k].clone());
                (state[s].plus(&best), c)
            })
            .unzip();
        layers.push(v);
        strategy.push(st);
    }
    Ok(Layered { layers, strategy })
}

/// `R^max(F targets)`. Values are infinite outside the almost-sure set;
/// an error is raised only when an initial state is affected.
pub fn reach_reward(
    mdp: &Mdp,
    reward: usize,
    targets: &[bool],
    settings: &IterationSettings,
) -> Result<RewardResult, MdpError> {
    reward_of(mdp, reward)?;
    let n = mdp.num_states();
    let sure = prob1_min_set(mdp, targets);
    let infinite: Vec<usize> = mdp.initial.iter().copied().filter(|s| !sure[*s]).collect();
    if !infinite.is_empty() {
        return Err(MdpError::InfiniteValue { states: infinite });
    }
    let m = Compiled::<f64>::new(mdp);
    let r = &mdp.rewards[reward];
    let state: Vec<f64> = r.state.iter().map(crate::num::to_f64).collect();
    let action: Vec<Vec<f64>> = r.choice.iter().map(|c| c.iter().map(crate::num::to_f64).collect()).collect();
    let mut values: Vec<f64> = (0..n).map(|s| if sure[s] { 0.0 } else { f64::INFINITY }).collect();
    let unknown: Vec<usize> = (0..n).filter(|s| sure[*s] && !targets[*s]).collect();
    let mut iterations = 0;
    if !unknown.is_empty() {
        loop {
            iterations += 1;
            let updated: Vec<(usize, f64)> = unknown
                .par_iter()
                .map(|&s| (s, state[s] + best_choice(&m, s, &values, Optimise::Max, |k| action[s][k]).0))
                .collect();
            let mut next = values.clone();
            for (s, v) in updated {
                next[s] = v;
            }
            let change = relative_change(
                &unknown.iter().map(|s| next[*s]).collect::<Vec<_>>(),
                &unknown.iter().map(|s| values[*s]).collect::<Vec<_>>(),
            );
            values = next;
            if change < settings.epsilon {
                break;
            }
            if iterations >= settings.max_iters {
                return Err(MdpError::NotConverged { iterations });
            }
        }
    }
    let strategy = (0..n)
        .map(|s| if sure[s] { best_choice(&m, s, &values, Optimise::Max, |k| action[s][k]).1 } else { 0 })
        .collect();
    Ok(RewardResult { values, strategy, iterations })
}
