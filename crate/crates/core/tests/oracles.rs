mod common;

use std::collections::BTreeSet;
use std::sync::Arc;

use common::{coalition_moves, extreme_equilibria, random_csg, solve_square, swne_values, BoundedOracle, Objective};
use csgnash::bimatrix::{is_equilibrium, solve_all, solve_swne, BimatrixGame};
use csgnash::lang;
use csgnash::mdp::{until, IterationSettings, Optimise};
use csgnash::model::{enumerate_mecs, joint_mdp, CoalitionGame, Csg, Mdp};
use csgnash::nash::{self, Goal};
use csgnash::num::{int, Rational};
use num_traits::Zero;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_matrix(rng: &mut impl Rng, l: usize, m: usize) -> Vec<Vec<Rational>> {
    (0..l).map(|_| (0..m).map(|_| int(rng.gen_range(-5..=5))).collect()).collect()
}

fn profile_key(x: &[Rational], y: &[Rational]) -> (Vec<Rational>, Vec<Rational>) {
    (x.to_vec(), y.to_vec())
}

#[test]
fn bimatrix_equilibria_match_vertex_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for case in 0..200 {
        let (l, m) = (rng.gen_range(1..=4), rng.gen_range(1..=4));
        let (z1, z2) = (random_matrix(&mut rng, l, m), random_matrix(&mut rng, l, m));
        let game = BimatrixGame::new(z1.clone(), z2.clone()).unwrap();
        let found = solve_all(&game).unwrap();
        let expected = extreme_equilibria(&z1, &z2);
        let got: BTreeSet<_> = found.iter().map(|e| (profile_key(&e.x, &e.y), e.u.clone(), e.v.clone())).collect();
        let want: BTreeSet<_> = expected.iter().map(|e| (profile_key(&e.x, &e.y), e.u.clone(), e.v.clone())).collect();
        assert_eq!(got, want, "case {case}: {z1:?} / {z2:?}");
        for e in &found {
            assert!(is_equilibrium(&game, &e.x, &e.y, &e.u, &e.v, &Rational::zero()).unwrap(), "case {case}");
        }
        let swne = solve_swne(&game).unwrap();
        assert_eq!((swne.u, swne.v), swne_values(&expected), "case {case}");
    }
}

fn goal_of(o: &Objective) -> Goal {
    match o {
        Objective::Until { left, right, k } => {
            Goal::Until { left: left.clone(), right: right.clone(), bound: Some(*k) }
        }
        Objective::Next { target } => Goal::Next { target: target.clone() },
        Objective::Cumulative { reward, k } => Goal::Cumulative { reward: *reward, k: *k },
        Objective::Instant { reward, k } => Goal::Instant { reward: *reward, k: *k },
    }
}

fn random_objective(rng: &mut impl Rng, g: &Csg, player: usize) -> Objective {
    let label = |name: &str| g.label(name).unwrap().to_vec();
    let k = rng.gen_range(0..=3);
    match rng.gen_range(0..5) {
        0 => Objective::Until { left: vec![true; g.num_states()], right: label(["a", "b"][player]), k },
        1 => Objective::Until { left: label("a").iter().map(|b| !b).collect(), right: label("b"), k },
        2 => Objective::Next { target: label(["b", "a"][player]) },
        3 => Objective::Cumulative { reward: player, k },
        _ => Objective::Instant { reward: player, k },
    }
}

fn check_bounded(g: &Arc<Csg>, coalition: &[usize], objectives: [Objective; 2]) {
    let goals = [goal_of(&objectives[0]), goal_of(&objectives[1])];
    let sol = nash::solve(g, coalition, &goals, &Default::default()).unwrap();
    let exact = sol.exact.expect("finite horizons are solved exactly");
    let mut oracle = BoundedOracle::new(g, coalition, objectives.clone());
    for s in 0..g.num_states() {
        assert_eq!(exact[s], oracle.value(s), "state {s}, objectives {objectives:?}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(150))]

    #[test]
    fn bounded_induction_matches_oracle(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = Arc::new(random_csg(&mut rng, 5));
        let objectives = [random_objective(&mut rng, &g, 0), random_objective(&mut rng, &g, 1)];
        let both_reward = objectives.iter().all(|o| matches!(o, Objective::Cumulative { .. } | Objective::Instant { .. }));
        let both_prob = objectives.iter().all(|o| matches!(o, Objective::Until { .. } | Objective::Next { .. }));
        prop_assume!(both_reward || both_prob);
        check_bounded(&g, &[0], objectives);
    }

    #[test]
    fn joint_mdp_lists_every_coalition_pair(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = Arc::new(random_csg(&mut rng, 5));
        let cg = CoalitionGame::new(g.clone(), &[1]).unwrap();
        let mdp = joint_mdp(&cg);
        for s in 0..g.num_states() {
            let rows = coalition_moves(&g, s, &[1]);
            let cols = coalition_moves(&g, s, &[0]);
            prop_assert_eq!(mdp.choices[s].len(), rows.len() * cols.len());
            for (r, rm) in rows.iter().enumerate() {
                for (c, cm) in cols.iter().enumerate() {
                    let moves = vec![cm[0].1, rm[0].1];
                    let k = g.choice_index(s, &moves).unwrap();
                    let choice = &mdp.choices[s][r * cols.len() + c];
                    prop_assert_eq!(choice.id, r * cols.len() + c);
                    prop_assert_eq!(choice.dist.as_slice(), g.choices(s)[k].dist.entries());
                }
            }
        }
    }

    #[test]
    fn until_matches_strategy_enumeration(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = Arc::new(random_csg(&mut rng, 5));
        let mdp = joint_mdp(&CoalitionGame::new(g.clone(), &[0]).unwrap());
        let left: Vec<bool> = g.label("a").unwrap().iter().map(|b| !b).collect();
        let right = g.label("b").unwrap().to_vec();
        for opt in [Optimise::Max, Optimise::Min] {
            let got = until(&mdp, &left, &right, opt, &IterationSettings { epsilon: 1e-12, max_iters: 1_000_000 }).unwrap();
            let want = until_by_enumeration(&mdp, &left, &right, opt);
            for s in 0..mdp.num_states() {
                prop_assert!((got.values[s] - csgnash::num::to_f64(&want[s])).abs() < 1e-8, "{:?} state {}", opt, s);
            }
        }
    }

    #[test]
    fn mecs_match_subset_enumeration(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = random_csg(&mut rng, 6);
        let got: BTreeSet<Vec<usize>> = enumerate_mecs(&g).into_iter().map(|m| m.states).collect();
        prop_assert_eq!(got, mecs_by_enumeration(&g));
    }
}

/// Reachability in the chain of each memoryless deterministic strategy;
/// these strategies attain both optima.
fn until_by_enumeration(mdp: &Mdp, left: &[bool], right: &[bool], opt: Optimise) -> Vec<Rational> {
    let n = mdp.num_states();
    let mut best: Option<Vec<Rational>> = None;
    let mut pick = vec![0usize; n];
    loop {
        // states that can reach `right` through `left` in this chain
        let mut reach = right.to_vec();
        loop {
            let mut changed = false;
            for s in 0..n {
                if !reach[s] && left[s] && mdp.choices[s][pick[s]].dist.iter().any(|(t, _)| reach[*t]) {
                    reach[s] = true;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        let unknown: Vec<usize> = (0..n).filter(|s| reach[*s] && !right[*s]).collect();
        let mut a = vec![vec![int(0); unknown.len()]; unknown.len()];
        let mut b = vec![int(0); unknown.len()];
        for (i, &s) in unknown.iter().enumerate() {
            a[i][i] += int(1);
            for (t, p) in &mdp.choices[s][pick[s]].dist {
                if right[*t] {
                    b[i] += p;
                } else if let Some(j) = unknown.iter().position(|u| u == t) {
                    a[i][j] -= p;
                }
            }
        }
        let sol = solve_square(a, b).expect("nonsingular");
        let mut values: Vec<Rational> = (0..n).map(|s| if right[s] { int(1) } else { int(0) }).collect();
        for (i, &s) in unknown.iter().enumerate() {
            values[s] = sol[i].clone();
        }
        best = Some(match best {
            None => values,
            Some(b) => b
                .into_iter()
                .zip(values)
                .map(|(x, y)| match opt {
                    Optimise::Max => x.max(y),
                    Optimise::Min => x.min(y),
                })
                .collect(),
        });
        let mut s = 0;
        loop {
            if s == n {
                return best.unwrap();
            }
            pick[s] += 1;
            if pick[s] < mdp.choices[s].len() {
                break;
            }
            pick[s] = 0;
            s += 1;
        }
    }
}

/// Maximal state sets that are end components when every joint move
/// staying inside the set is kept.
fn mecs_by_enumeration(g: &Csg) -> BTreeSet<Vec<usize>> {
    let n = g.num_states();
    let mut ecs: Vec<Vec<usize>> = Vec::new();
    for mask in 1u32..(1 << n) {
        let set: Vec<usize> = (0..n).filter(|s| mask & (1 << s) != 0).collect();
        let inside = |t: usize| mask & (1 << t) != 0;
        let kept: Vec<Vec<usize>> = set
            .iter()
            .map(|&s| {
                g.choices(s)
                    .iter()
                    .filter(|c| c.dist.support().all(inside))
                    .flat_map(|c| c.dist.support().collect::<Vec<_>>())
                    .collect()
            })
            .collect();
        if kept.iter().any(|succ| succ.is_empty()) {
            continue;
        }
        // strongly connected under the kept moves
        let strongly_connected = set.iter().all(|&from| {
            let mut seen = vec![from];
            let mut stack = vec![from];
            while let Some(s) = stack.pop() {
                let i = set.iter().position(|x| *x == s).unwrap();
                for &t in &kept[i] {
                    if !seen.contains(&t) {
                        seen.push(t);
                        stack.push(t);
                    }
                }
            }
            seen.len() == set.len()
        });
        if strongly_connected {
            ecs.push(set);
        }
    }
    ecs.iter().filter(|e| !ecs.iter().any(|f| f.len() > e.len() && e.iter().all(|s| f.contains(s)))).cloned().collect()
}

#[test]
fn robot_deadline_matches_oracle() {
    let text = common::model_text("robot_coordination.csg");
    let consts = [("l".to_string(), "4".to_string()), ("q".to_string(), "0.1".to_string())];
    let g = Arc::new(lang::load(&text, &consts).unwrap());
    let all = vec![true; g.num_states()];
    let goal = |name: &str| g.label(name).unwrap().to_vec();
    let objectives = [
        Objective::Until { left: all.clone(), right: goal("goal1"), k: 3 },
        Objective::Until { left: all, right: goal("goal2"), k: 3 },
    ];
    let goals = [goal_of(&objectives[0]), goal_of(&objectives[1])];
    let sol = nash::solve(&g, &[0], &goals, &Default::default()).unwrap();
    let exact = sol.exact.unwrap();
    let mut oracle = BoundedOracle::new(&g, &[0], objectives);
    let s0 = g.initial()[0];
    assert_eq!(exact[s0], oracle.value(s0));
    for s in 0..g.num_states() {
        assert_eq!(exact[s], oracle.value(s), "state {}", g.state(s).name);
    }
}
