//! Value iteration for pairs of unbounded reachability objectives. States
//! where an objective is already settled take fixed rows (the settled value
//! and the cooperative optimum of the other objective); the rest solve a
//! local bimatrix game against the previous iterate.

use std::time::Instant;

use rayon::prelude::*;

use super::local::LocalTables;
use super::synthesis::{LocalEquilibrium, Profile};
use super::{pair_f64, Divergence, Goal, NashError, NashSettings, NashSolution, Number, Trace, ValuePair};
use crate::bimatrix::{is_equilibrium, solve_swne};
use crate::mdp::{reach_reward, until, IterationSettings, MdpError, Optimise};
use crate::model::{joint_mdp, CoalitionGame, Csg, Mdp, StateId};
use crate::num::{self, Rational};

pub(super) fn solve(cg: CoalitionGame, goals: [Goal; 2], settings: &NashSettings) -> Result<NashSolution, NashError> {
    if settings.exact {
        iterate::<Rational>(cg, goals, settings)
    } else {
        iterate::<f64>(cg, goals, settings)
    }
}

/// Value fixed by the current state alone, if any.
fn settled<T: Number>(goal: &Goal, s: StateId) -> Option<T> {
    match goal {
        Goal::Until { left, right, .. } => {
            if right[s] {
                Some(T::unit())
            } else if !left[s] {
                Some(T::nil())
            } else {
                None
            }
        }
        Goal::Reach { target, .. } => target[s].then(T::nil),
        _ => unreachable!("finite objective in value iteration"),
    }
}

/// Cooperative optimum of one objective and a strategy attaining it.
fn single(joint: &Mdp, goal: &Goal, settings: &IterationSettings) -> Result<(Vec<f64>, Vec<usize>), MdpError> {
    match goal {
        Goal::Until { left, right, .. } => {
            let r = until(joint, left, right, Optimise::Max, settings)?;
            Ok((r.values, r.strategy))
        }
        Goal::Reach { reward, target } => {
            // no initial states: infinite values are reported per state instead
            let open = Mdp { initial: Vec::new(), ..joint.clone() };
            let r = reach_reward(&open, *reward, target, settings)?;
            Ok((r.values, r.strategy))
        }
        _ => unreachable!("finite objective in value iteration"),
    }
}

fn lift<T: Number>(g: &Csg, objective: usize, s: StateId, v: f64) -> Result<T, NashError> {
    if v.is_finite() {
        Ok(T::from_rational(&num::from_f64(v).expect("finite")))
    } else {
        Err(NashError::InfiniteReward { objective, state: g.state(s).name.clone() })
    }
}

fn max_delta(a: &[ValuePair], b: &[ValuePair], f: impl Fn(&ValuePair, &ValuePair) -> f64) -> f64 {
    a.iter().zip(b).map(|(x, y)| f(x, y)).fold(0.0, f64::max)
}

fn player_delta(a: &ValuePair, b: &ValuePair) -> f64 {
    (a.v1 - b.v1).abs().max((a.v2 - b.v2).abs())
}

type Cell<T> = ([T; 2], Option<LocalEquilibrium>);

fn iterate<T: Number>(cg: CoalitionGame, goals: [Goal; 2], settings: &NashSettings) -> Result<NashSolution, NashError> {
    let g = cg.base();
    let n = g.num_states();
    let eps = settings.conv_epsilon;
    let rewards = goals.iter().all(Goal::is_reward);

    let clock = Instant::now();
    let joint = joint_mdp(&cg);
    let mdp_settings = IterationSettings { epsilon: eps.min(1e-8), ..IterationSettings::default() };
    let singles = [single(&joint, &goals[0], &mdp_settings)?, single(&joint, &goals[1], &mdp_settings)?];
    let mut fixed: Vec<Option<[T; 2]>> = Vec::with_capacity(n);
    for s in 0..n {
        fixed.push(match [settled::<T>(&goals[0], s), settled::<T>(&goals[1], s)] {
            [Some(a), Some(b)] => Some([a, b]),
            [Some(a), None] => Some([a, lift(g, 1, s, singles[1].0[s])?]),
            [None, Some(b)] => Some([lift(g, 0, s, singles[0].0[s])?, b]),
            [None, None] => None,
        });
    }
    let mdp_time = clock.elapsed();

    let clock = Instant::now();
    let tables = LocalTables::<T>::new(&cg, [goals[0].paying_reward(), goals[1].paying_reward()]);
    let zero = || [T::nil(), T::nil()];
    let mut values: Vec<[T; 2]> = fixed
        .iter()
        .map(|f| match f {
            Some(v) if !rewards => v.clone(),
            _ => zero(),
        })
        .collect();
    let mut shown: Vec<ValuePair> = values.iter().map(pair_f64).collect();
    let mut older: Option<Vec<ValuePair>> = None;
    let mut trace: Trace = Vec::new();
    let mut eqs: Vec<Option<LocalEquilibrium>> = vec![None; n];
    let mut last_player = f64::INFINITY;
    let mut last_periodic = false;
    let mut iterations = 0;
    loop {
        iterations += 1;
        let cells: Vec<Cell<T>> = (0..n)
            .into_par_iter()
            .map(|s| -> Result<Cell<T>, NashError> {
                if let Some(v) = &fixed[s] {
                    return Ok((v.clone(), None));
                }
                let game = tables.game(s, &values);
                let p = solve_swne(&game)?;
                if !is_equilibrium(&game, &p.x, &p.y, &p.u, &p.v, &game.tolerance())? {
                    return Err(NashError::Certificate { state: g.state(s).name.clone() });
                }
                let eq = LocalEquilibrium::from_profile(&p);
                Ok(([p.u, p.v], Some(eq)))
            })
            .collect::<Result<_, _>>()?;
        let (next, next_eqs): (Vec<[T; 2]>, Vec<Option<LocalEquilibrium>>) = cells.into_iter().unzip();
        let next_shown: Vec<ValuePair> = next.iter().map(pair_f64).collect();
        if !settings.trace.is_empty() {
            trace.push(settings.trace.iter().map(|s| (next[*s][0].to_rational(), next[*s][1].to_rational())).collect());
        }
        let sum = max_delta(&next_shown, &shown, |a, b| (a.sum() - b.sum()).abs());
        let player = max_delta(&next_shown, &shown, player_delta);
        let periodic = player >= eps && older.as_ref().is_some_and(|o| max_delta(&next_shown, o, player_delta) < eps);
        let converged = sum < eps && player < eps && last_player < eps;
        let stuck = periodic && last_periodic;
        if !converged && (stuck || iterations >= settings.max_iters) {
            return Err(NashError::NotConverged(Box::new(Divergence {
                iterations,
                oscillating: stuck || sum < eps,
                last: next_shown,
                previous: shown,
                trace,
                warnings: Vec::new(),
            })));
        }
        values = next;
        eqs = next_eqs;
        older = Some(std::mem::replace(&mut shown, next_shown));
        last_player = player;
        last_periodic = periodic;
        if converged {
            break;
        }
    }
    let csg_time = clock.elapsed();
    let [(_, s0), (_, s1)] = singles;
    let exact = T::EXACT.then(|| values.iter().map(|[a, b]| (a.to_rational(), b.to_rational())).collect());
    Ok(NashSolution {
        values: shown,
        exact,
        iterations,
        profile: Profile::stationary(cg, goals, eqs, [s0, s1]),
        warnings: Vec::new(),
        trace,
        mdp_time,
        csg_time,
    })
}
