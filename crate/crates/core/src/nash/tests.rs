use std::sync::Arc;

use num_traits::Zero;

use super::*;
use crate::bimatrix::BimatrixGame;
use crate::model::{explicit, CsgBuilder, Distribution, Move, Player};
use crate::num::{int, rat};

const CHANNEL: &str = include_str!("../../../../models/two_user_channel.csg");
const OSC_REACH: &str = include_str!("../../../../models/oscillating_reach.explicit");
const OSC_REWARD: &str = include_str!("../../../../models/oscillating_reward.explicit");

fn channel(q2: &str) -> Arc<Csg> {
    Arc::new(crate::lang::load(CHANNEL, &[("q2".into(), q2.into())]).unwrap())
}

fn label(g: &Csg, name: &str) -> Vec<bool> {
    g.label(name).unwrap().to_vec()
}

fn not(v: &[bool]) -> Vec<bool> {
    v.iter().map(|b| !b).collect()
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() < 1e-6
}

#[test]
fn channel_both_users_eventually_send() {
    let g = channel("0.75");
    let goals = [Goal::eventually(label(&g, "sent1"), None), Goal::eventually(label(&g, "sent2"), None)];
    let sol = solve(&g, &[0], &goals, &NashSettings::default()).unwrap();
    let v = sol.at(g.initial()[0]);
    assert!(close(v.v1, 1.0) && close(v.v2, 1.0), "{v}");
    // one user transmits while the other waits
    let eq = sol.profile.equilibrium(g.initial()[0], 0).unwrap();
    assert_eq!(eq.x.len(), 1);
    assert_eq!(eq.y.len(), 1);
    let (row, col) = (eq.x[0].0, eq.y[0].0);
    let cg = sol.profile.game();
    let moves = [cg.format_local(0, true, row), cg.format_local(0, false, col)];
    assert!(moves == ["t1", "w2"] || moves == ["w1", "t2"], "{moves:?}");
    let report = verify_epsilon_ne(&sol.profile, g.initial(), 1e-4).unwrap();
    assert!(report.pass, "{report:?}");
}

#[test]
fn channel_until_pair_has_both_transmit() {
    for (q, expected) in [("0.25", 0.25), ("0.5", 0.5), ("0.75", 0.75)] {
        let g = channel(q);
        let (s1, s2) = (label(&g, "send1"), label(&g, "send2"));
        let goals = [
            Goal::Until { left: not(&s2), right: s1.clone(), bound: None },
            Goal::Until { left: not(&s1), right: s2.clone(), bound: None },
        ];
        let sol = solve(&g, &[0], &goals, &NashSettings::default()).unwrap();
        let v = sol.at(g.initial()[0]);
        assert!(close(v.v1, expected) && close(v.v2, expected), "q2={q}: {v}");
        assert!(verify_epsilon_ne(&sol.profile, g.initial(), 1e-4).unwrap().pass);
    }
}

#[test]
fn waiting_forever_is_not_an_equilibrium() {
    let g = channel("0.75");
    let goals = [Goal::eventually(label(&g, "sent1"), None), Goal::eventually(label(&g, "sent2"), None)];
    let cg = CoalitionGame::new(g.clone(), &[0]).unwrap();
    // wait is the second local action of each user wherever transmitting is possible
    let wait = |s: StateId, first: bool| {
        let n = if first { cg.num_rows(s) } else { cg.num_cols(s) };
        (0..n).find(|i| cg.format_local(s, first, *i).starts_with('w')).unwrap_or(0)
    };
    let eqs = (0..g.num_states())
        .map(|s| Some(LocalEquilibrium { x: vec![(wait(s, true), int(1))], y: vec![(wait(s, false), int(1))] }))
        .collect();
    let n = g.num_states();
    let profile = Profile::stationary(cg, goals, eqs, [vec![0; n], vec![0; n]]);
    let report = verify_epsilon_ne(&profile, g.initial(), 1e-4).unwrap();
    assert!(close(report.gap1, 1.0) && close(report.gap2, 1.0), "{report:?}");
    assert!(!report.pass);
    assert!(verify_epsilon_ne(&profile, g.initial(), 1.0).unwrap().pass);
}

fn osc_settings(g: &Csg) -> NashSettings {
    NashSettings { exact: true, trace: vec![g.initial()[0]], ..NashSettings::default() }
}

#[test]
fn reach_oscillation_is_detected() {
    let g = Arc::new(explicit::parse(OSC_REACH).unwrap());
    let goals = [Goal::eventually(label(&g, "a1"), None), Goal::eventually(label(&g, "a2"), None)];
    let err = solve(&g, &[0], &goals, &osc_settings(&g)).unwrap_err();
    let NashError::NotConverged(d) = err else { panic!("{err}") };
    assert!(d.oscillating);
    let (lo, hi) = ((rat(1, 4), rat(3, 4)), (rat(3, 4), rat(1, 4)));
    let s1: Vec<_> = d.trace.iter().map(|it| it[0].clone()).collect();
    assert_eq!(s1[..4], [lo.clone(), hi.clone(), lo, hi]);
}

#[test]
fn reward_oscillation_is_detected() {
    let g = Arc::new(explicit::parse(OSC_REWARD).unwrap());
    let a = label(&g, "a");
    let goals = [Goal::Reach { reward: 0, target: a.clone() }, Goal::Reach { reward: 1, target: a }];
    let err = solve(&g, &[0], &goals, &osc_settings(&g)).unwrap_err();
    let NashError::NotConverged(d) = err else { panic!("{err}") };
    let (p, q) = ((rat(1, 3), int(1)), (int(2), rat(1, 3)));
    let s1: Vec<_> = d.trace.iter().map(|it| it[0].clone()).collect();
    assert_eq!(s1[..4], [p.clone(), q.clone(), p, q]);
}

#[test]
fn strict_assumptions_reject_the_oscillating_game() {
    let g = Arc::new(explicit::parse(OSC_REACH).unwrap());
    let goals = [Goal::eventually(label(&g, "a1"), None), Goal::eventually(label(&g, "a2"), None)];
    let settings = NashSettings { strict: true, ..NashSettings::default() };
    assert!(matches!(solve(&g, &[0], &goals, &settings), Err(NashError::Assumption(_))));
}

#[test]
fn first_local_game_of_the_oscillating_game() {
    let g = Arc::new(explicit::parse(OSC_REACH).unwrap());
    let cg = CoalitionGame::new(g.clone(), &[0]).unwrap();
    // iteration 0: targets fixed at (1,0) and (0,1), the rest zero
    let values = vec![[int(0), int(0)], [int(0), int(0)], [int(1), int(0)], [int(0), int(1)]];
    let game: BimatrixGame<Rational> = local_game(&cg, 0, &Continuation { values: &values, rewards: [None, None] });
    assert_eq!((game.rows(), game.cols()), (2, 1));
    assert_eq!([game.z1(0, 0).clone(), game.z1(1, 0).clone()], [int(0), rat(1, 4)]);
    assert_eq!([game.z2(0, 0).clone(), game.z2(1, 0).clone()], [int(0), rat(3, 4)]);
}

#[test]
fn bounded_base_cases() {
    let g = channel("0.75");
    let (s1, s2) = (label(&g, "sent1"), label(&g, "sent2"));
    let goals = [Goal::eventually(s1.clone(), Some(0)), Goal::eventually(s2.clone(), Some(0))];
    let sol = solve(&g, &[0], &goals, &NashSettings::default()).unwrap();
    let exact = sol.exact.unwrap();
    for s in 0..g.num_states() {
        let want = (int(i64::from(s1[s])), int(i64::from(s2[s])));
        assert_eq!(exact[s], want);
    }
    let g = Arc::new(crate::lang::load(include_str!("../../../../models/medium_access.csg"), &[]).unwrap());
    let goals = [Goal::Cumulative { reward: 0, k: 0 }, Goal::Cumulative { reward: 1, k: 0 }];
    let sol = solve(&g, &[0], &goals, &NashSettings::default()).unwrap();
    assert!(sol.exact.unwrap().iter().all(|(a, b)| a.is_zero() && b.is_zero()));
}

#[test]
fn bounded_matches_unbounded_on_acyclic_game() {
    // The channel game is acyclic apart from absorbing states and waiting self-loops;
    // with waiting removed by the horizon the values agree at depth 2
    let g = channel("0.75");
    let (s1, s2) = (label(&g, "sent1"), label(&g, "sent2"));
    let bounded = [Goal::eventually(s1.clone(), Some(2)), Goal::eventually(s2.clone(), Some(2))];
    let b = solve(&g, &[0], &bounded, &NashSettings::default()).unwrap();
    let v = b.at(g.initial()[0]);
    assert_eq!(v, ValuePair { v1: 1.0, v2: 1.0 });
}

#[test]
fn cumulative_rewards_in_single_state_game_give_stag_hunt() {
    let mut b = CsgBuilder::new(vec![Player::new("p1", &["a1", "a2"]), Player::new("p2", &["b1", "b2", "b3"])]);
    let s = b.add_state("s");
    let t = b.add_state("t");
    b.set_initial(s);
    let z1 = [[2, 2, 2], [0, 4, 6]];
    let z2 = [[4, 2, 0], [4, 6, 9]];
    let (r1, r2) = (b.add_reward_structure("r1"), b.add_reward_structure("r2"));
    for i in 0..2 {
        for j in 0..3 {
            let moves = vec![Move::Act(i), Move::Act(j)];
            b.add_transition(s, moves.clone(), Distribution::dirac(t));
            b.add_action_reward(r1, s, moves.clone(), int(z1[i][j]));
            b.add_action_reward(r2, s, moves, int(z2[i][j]));
        }
    }
    b.add_transition(t, vec![Move::Idle, Move::Idle], Distribution::dirac(t));
    let g = Arc::new(b.build().unwrap());
    let goals = [Goal::Cumulative { reward: 0, k: 1 }, Goal::Cumulative { reward: 1, k: 1 }];
    let sol = solve(&g, &[0], &goals, &NashSettings::default()).unwrap();
    assert_eq!(sol.exact.as_ref().unwrap()[0], (int(6), int(9)));
    let eq = sol.profile.equilibrium(0, 0).unwrap();
    assert_eq!(eq.x, vec![(1, int(1))]);
    assert_eq!(eq.y, vec![(2, int(1))]);
    assert!(verify_epsilon_ne(&sol.profile, &[0], 0.0).unwrap().pass);
}

#[test]
fn next_product_doubles_the_game() {
    let g = channel("0.75");
    let (s1, s2) = (label(&g, "sent1"), label(&g, "sent2"));
    let goals = [Goal::Next { target: s1.clone() }, Goal::eventually(s2, None)];
    let p = mixed_horizon_product(&g, &goals).unwrap();
    assert_eq!(p.game.num_states(), 2 * g.num_states());
    let Goal::Until { right, .. } = &p.goals[0] else { panic!() };
    assert!((0..p.game.num_states()).all(|s| !right[s] || (p.layer[s] == 1 && s1[p.origin[s]])));
}

#[test]
fn cumulative_product_zeroes_the_last_layer() {
    let g = Arc::new(
        crate::lang::load(include_str!("../../../../models/medium_access.csg"), &[("emax".into(), "2".into())])
            .unwrap(),
    );
    let done = vec![false; g.num_states()];
    let goals = [Goal::Cumulative { reward: 0, k: 3 }, Goal::Reach { reward: 1, target: done }];
    let p = mixed_horizon_product(&g, &goals).unwrap();
    assert_eq!(p.layer.iter().max(), Some(&3));
    let Goal::Reach { reward, target } = &p.goals[0] else { panic!() };
    let r = &p.game.rewards()[*reward];
    for s in 0..p.game.num_states() {
        assert_eq!(target[s], p.layer[s] == 3);
        if p.layer[s] == 3 {
            assert!(r.state[s].is_zero() && r.action[s].iter().all(|a| a.is_zero()));
        } else {
            assert_eq!(r.action[s], g.rewards()[0].action[p.origin[s]]);
        }
    }
}

#[test]
fn zero_bound_until_product_labels_layer_zero_only() {
    let g = channel("0.75");
    let (s1, s2) = (label(&g, "sent1"), label(&g, "sent2"));
    let goals = [Goal::Until { left: vec![true; s1.len()], right: s1, bound: Some(0) }, Goal::eventually(s2, None)];
    let p = mixed_horizon_product(&g, &goals).unwrap();
    let Goal::Until { left, right, .. } = &p.goals[0] else { panic!() };
    assert!(left.iter().all(|b| !b));
    assert!((0..left.len()).all(|s| !right[s] || p.layer[s] == 0));
}

#[test]
fn mixed_pair_matches_bounded_pair() {
    // P[F<=3 sent1] + P[F sent2] agrees with the all-bounded pair at a
    // horizon past which nothing changes
    let g = channel("0.75");
    let (s1, s2) = (label(&g, "sent1"), label(&g, "sent2"));
    let mixed = [Goal::eventually(s1.clone(), Some(3)), Goal::eventually(s2.clone(), None)];
    let m = solve(&g, &[0], &mixed, &NashSettings::default()).unwrap();
    let v = m.at(g.initial()[0]);
    assert!(close(v.v1, 1.0) && close(v.v2, 1.0), "{v}");
    assert!(verify_epsilon_ne(&m.profile, g.initial(), 1e-4).unwrap().pass);
}
