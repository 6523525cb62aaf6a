use std::path::PathBuf;
use std::sync::Arc;
use std::time::Instant;

use csgnash::check::{evaluate, Evaluation};
use csgnash::lang;
use csgnash::logic::parse_property;
use csgnash::nash::{verify_epsilon_ne, NashSettings, NashSolution};
use csgnash::Csg;

fn load(name: &str, consts: &[(&str, &str)]) -> Arc<Csg> {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../models").join(name);
    let text = std::fs::read_to_string(path).unwrap();
    let consts: Vec<(String, String)> = consts.iter().map(|(a, b)| (a.to_string(), b.to_string())).collect();
    Arc::new(lang::load(&text, &consts).unwrap())
}

fn nash(g: &Arc<Csg>, property: &str) -> NashSolution {
    let f = parse_property(property, g).unwrap();
    match evaluate(g, &f, &NashSettings::default()).unwrap() {
        Evaluation::Nash { solution, .. } => *solution,
        other => panic!("expected a Nash result, got {other:?}"),
    }
}

#[test]
fn robots_reach_both_goals_without_deadline() {
    let g = load("robot_coordination.csg", &[("l", "4"), ("q", "0.1")]);
    let clock = Instant::now();
    let sol = nash(&g, "<<p1:p2>>max=? (P[F \"goal1\"] + P[F \"goal2\"])");
    let v = sol.at(g.initial()[0]);
    eprintln!("{v} in {:?}, {} iterations", clock.elapsed(), sol.iterations);
    assert!((v.sum() - 2.0).abs() < 1e-4, "{v}");
    let report = verify_epsilon_ne(&sol.profile, g.initial(), 1e-4).unwrap();
    assert!(report.pass, "{report:?}");
}

#[test]
fn aloha_users_send_before_deadline() {
    let g = load("aloha.csg", &[]);
    let clock = Instant::now();
    let sol = nash(&g, "<<p1:p2,p3>>max=? (P[F \"sent1\" & t<=D] + P[F \"sent2\" & \"sent3\" & t<=D])");
    let v = sol.at(g.initial()[0]);
    eprintln!("aloha {v} in {:?}, {} iterations", clock.elapsed(), sol.iterations);
    assert!(v.v1 > 0.0 && v.v2 > 0.0 && v.sum() <= 2.0);
    let report = verify_epsilon_ne(&sol.profile, g.initial(), 1e-4).unwrap();
    assert!(report.pass, "{report:?}");
}

#[test]
fn phones_accumulate_quality_until_empty() {
    let g = load("power_control.csg", &[("emax", "8"), ("powmax", "3")]);
    let sol = nash(&g, "<<p1:p2>>max=? (R{\"r1\"}[F e1=0] + R{\"r2\"}[F e2=0])");
    let v = sol.at(g.initial()[0]);
    eprintln!("power control {v}, {} iterations", sol.iterations);
    // staying at power 1 throughout drains 8 units in 8 steps at quality 1/2
    assert!(v.v1 >= 4.0 - 1e-4 && v.v2 >= 4.0 - 1e-4, "{v}");
    let report = verify_epsilon_ne(&sol.profile, g.initial(), 1e-4).unwrap();
    assert!(report.pass, "{report:?}");
}
