//! Backwards induction for pairs of finite-horizon objectives, in exact
//! arithmetic. Layer `n` holds the values of the pair with `n + n_i` steps
//! left for objective `i`, where `n_i` is its surplus over the shorter
//! horizon.

use std::time::Instant;

use rayon::prelude::*;

use super::local::LocalTables;
use super::synthesis::{LocalEquilibrium, Profile};
use super::{pair_f64, Goal, NashError, NashSolution, Number};
use crate::bimatrix::{is_equilibrium, solve_swne};
use crate::mdp::{bounded_until, cumulative_reward, instantaneous_reward, next_prob, Layered, Optimise};
use crate::model::{joint_mdp, CoalitionGame, Csg, Mdp, StateId};
use crate::num::Rational;

/// Value of a finite objective at `s` with `remaining` steps when no further
/// play can change it.
pub(super) fn settled<T: Number>(g: &Csg, goal: &Goal, s: StateId, remaining: usize) -> Option<T> {
    let indicator = |b: bool| if b { T::unit() } else { T::nil() };
    match goal {
        Goal::Until { left, right, .. } => {
            if right[s] {
                Some(T::unit())
            } else if !left[s] || remaining == 0 {
                Some(T::nil())
            } else {
                None
            }
        }
        Goal::Next { target } => (remaining == 0).then(|| indicator(target[s])),
        Goal::Instant { reward, .. } => (remaining == 0).then(|| T::from_rational(&g.rewards()[*reward].state[s])),
        Goal::Cumulative { .. } => (remaining == 0).then(T::nil),
        Goal::Reach { .. } => unreachable!("unbounded objective in backwards induction"),
    }
}

/// Optimal single-objective values `layers[r]` with `r` steps left, when
/// both coalitions cooperate on this objective alone.
pub(super) fn single_layers<T: Number>(joint: &Mdp, goal: &Goal, horizon: usize) -> Result<Layered<T>, NashError> {
    Ok(match goal {
        Goal::Until { left, right, .. } => bounded_until(joint, left, right, horizon, Optimise::Max),
        Goal::Next { target } => {
            let base = target.iter().map(|b| if *b { T::unit() } else { T::nil() }).collect();
            let (next, strategy) = next_prob(joint, target, Optimise::Max);
            Layered { layers: vec![base, next], strategy: vec![Vec::new(), strategy] }
        }
        Goal::Instant { reward, .. } => instantaneous_reward(joint, *reward, horizon, Optimise::Max)?,
        Goal::Cumulative { reward, .. } => cumulative_reward(joint, *reward, horizon, Optimise::Max)?,
        Goal::Reach { .. } => unreachable!("unbounded objective in backwards induction"),
    })
}

type Cell<T> = ([T; 2], Option<LocalEquilibrium>);

pub(super) fn solve(cg: CoalitionGame, goals: [Goal; 2]) -> Result<NashSolution, NashError> {
    let (values, eqs, single, mdp_time, csg_time) = induction::<Rational>(&cg, &goals)?;
    let horizons = [goals[0].horizon(), goals[1].horizon()];
    let k = horizons[0].min(horizons[1]);
    let profile = Profile::stepped(cg, goals, eqs, single);
    Ok(NashSolution {
        values: values.iter().map(pair_f64).collect(),
        exact: Some(values.into_iter().map(|[a, b]| (a, b)).collect()),
        iterations: k,
        profile,
        warnings: Vec::new(),
        trace: Vec::new(),
        mdp_time,
        csg_time,
    })
}

#[allow(clippy::type_complexity)]
fn induction<T: Number>(
    cg: &CoalitionGame,
    goals: &[Goal; 2],
) -> Result<
    (Vec<[T; 2]>, Vec<Vec<Option<LocalEquilibrium>>>, [Vec<Vec<usize>>; 2], std::time::Duration, std::time::Duration),
    NashError,
> {
    let g = cg.base();
    let n = g.num_states();
    let horizons = [goals[0].horizon(), goals[1].horizon()];
    let k = horizons[0].min(horizons[1]);
    let surplus = [horizons[0] - k, horizons[1] - k];

    let clock = Instant::now();
    let joint = joint_mdp(cg);
    let singles =
        [single_layers::<T>(&joint, &goals[0], horizons[0])?, single_layers::<T>(&joint, &goals[1], horizons[1])?];
    let mdp_time = clock.elapsed();

    let clock = Instant::now();
    let tables = LocalTables::<T>::new(cg, [goals[0].paying_reward(), goals[1].paying_reward()]);
    let mut values: Vec<[T; 2]> = Vec::new();
    let mut eqs = Vec::with_capacity(k + 1);
    for layer in 0..=k {
        let rem = [layer + surplus[0], layer + surplus[1]];
        let cells: Vec<Cell<T>> = (0..n)
            .into_par_iter()
            .map(|s| -> Result<Cell<T>, NashError> {
                let fixed = [settled::<T>(g, &goals[0], s, rem[0]), settled::<T>(g, &goals[1], s, rem[1])];
                Ok(match fixed {
                    [Some(a), Some(b)] => ([a, b], None),
                    [Some(a), None] => ([a, singles[1].layers[rem[1]][s].clone()], None),
                    [None, Some(b)] => ([singles[0].layers[rem[0]][s].clone(), b], None),
                    [None, None] => {
                        let game = tables.game(s, &values);
                        let p = solve_swne(&game)?;
                        if !is_equilibrium(&game, &p.x, &p.y, &p.u, &p.v, &game.tolerance())? {
                            return Err(NashError::Certificate { state: g.state(s).name.clone() });
                        }
                        let eq = LocalEquilibrium::from_profile(&p);
                        ([p.u, p.v], Some(eq))
                    }
                })
            })
            .collect::<Result<_, _>>()?;
        let (v, e): (Vec<[T; 2]>, Vec<Option<LocalEquilibrium>>) = cells.into_iter().unzip();
        values = v;
        eqs.push(e);
    }
    let single = singles.map(|l| l.strategy);
    Ok((values, eqs, single, mdp_time, clock.elapsed()))
}
