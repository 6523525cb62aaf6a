use serde::{Deserialize, Serialize};

use super::synthesis::Profile;
use super::{Goal, NashError};
use crate::mdp::{
    bounded_until, cumulative_reward, instantaneous_reward, next_prob, reach_reward, until, IterationSettings,
    MdpError, Optimise,
};
use crate::model::{induce_chain, induce_mdp, CoalitionStrategy, InducedMdp, Mdp, Side, StateId};
use crate::num::{self, Rational};

/// Largest gain a coalition could obtain by deviating unilaterally.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub gap1: f64,
    pub gap2: f64,
    pub epsilon: f64,
    pub pass: bool,
}

fn lift(v: &[bool], induced: &InducedMdp) -> Vec<bool> {
    induced.product.iter().map(|(s, _)| v[*s]).collect()
}

fn to_f64(v: Vec<Rational>) -> Vec<f64> {
    v.iter().map(num::to_f64).collect()
}

/// Maximal value of `goal` in an MDP whose states are `induced.product`.
fn optimum(goal: &Goal, induced: &InducedMdp) -> Result<Vec<f64>, NashError> {
    let mdp = &induced.mdp;
    let settings = IterationSettings { epsilon: 1e-10, max_iters: 1_000_000 };
    Ok(match goal {
        Goal::Until { left, right, bound: None } => {
            until(mdp, &lift(left, induced), &lift(right, induced), Optimise::Max, &settings)?.values
        }
        Goal::Until { left, right, bound: Some(k) } => {
            let l = bounded_until::<Rational>(mdp, &lift(left, induced), &lift(right, induced), *k, Optimise::Max);
            to_f64(l.layers[*k].clone())
        }
        Goal::Next { target } => to_f64(next_prob::<Rational>(mdp, &lift(target, induced), Optimise::Max).0),
        Goal::Instant { reward, k } => {
            to_f64(instantaneous_reward::<Rational>(mdp, *reward, *k, Optimise::Max)?.layers[*k].clone())
        }
        Goal::Cumulative { reward, k } => {
            to_f64(cumulative_reward::<Rational>(mdp, *reward, *k, Optimise::Max)?.layers[*k].clone())
        }
        Goal::Reach { reward, target } => {
            let open = Mdp { initial: Vec::new(), ..mdp.clone() };
            match reach_reward(&open, *reward, &lift(target, induced), &settings) {
                Ok(r) => r.values,
                Err(MdpError::InfiniteValue { .. }) => vec![f64::INFINITY; mdp.num_states()],
                Err(e) => return Err(e.into()),
            }
        }
    })
}

/// Checks that neither coalition gains more than `epsilon` by deviating from
/// `profile`, for play starting at each of `starts` (states of the queried
/// game). Deviations range over all strategies of the deviating coalition
/// against the other's fixed finite-memory strategy.
pub fn verify_epsilon_ne(profile: &Profile, starts: &[StateId], epsilon: f64) -> Result<VerifyReport, NashError> {
    let cg = profile.game();
    let starts: Vec<StateId> = starts.iter().map(|s| profile.embedding()[*s]).collect();
    let chain = induce_chain(cg, profile, &starts)?;
    let mut gaps = [0.0f64; 2];
    for (l, goal) in profile.goals().iter().enumerate() {
        let fixed = if l == 0 { Side::Second } else { Side::First };
        let free = induce_mdp(cg, fixed, profile, &starts)?;
        let best = optimum(goal, &free)?;
        let achieved = optimum(goal, &chain)?;
        for &s in &starts {
            let m = profile.initial_memory(s);
            let (Some(i), Some(j)) = (free.index_of(s, m), chain.index_of(s, m)) else { continue };
            let gap = best[i] - achieved[j];
            let gap = if gap.is_nan() { f64::INFINITY } else { gap.max(0.0) };
            gaps[l] = gaps[l].max(gap);
        }
    }
    Ok(VerifyReport { gap1: gaps[0], gap2: gaps[1], epsilon, pass: gaps[0] <= epsilon && gaps[1] <= epsilon })
}
