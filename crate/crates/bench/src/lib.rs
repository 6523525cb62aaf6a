//! Shared fixtures for the benchmarks.

use std::path::PathBuf;
use std::sync::Arc;

use csgnash::bimatrix::BimatrixGame;
use csgnash::check::{evaluate, Evaluation};
use csgnash::lang;
use csgnash::logic::parse_property;
use csgnash::nash::NashSettings;
use csgnash::num::{int, Rational};
use csgnash::Csg;

pub fn model_text(name: &str) -> String {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../models").join(name);
    std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

pub fn build(name: &str, consts: &[(&str, &str)]) -> Arc<Csg> {
    let consts: Vec<(String, String)> = consts.iter().map(|(a, b)| (a.to_string(), b.to_string())).collect();
    Arc::new(lang::load(&model_text(name), &consts).unwrap())
}

/// Sum of the two values at the first initial state.
pub fn nash_sum(g: &Arc<Csg>, property: &str) -> f64 {
    let f = parse_property(property, g).unwrap();
    match evaluate(g, &f, &NashSettings::default()).unwrap() {
        Evaluation::Nash { solution, .. } => solution.at(g.initial()[0]).sum(),
        other => panic!("expected a Nash result, got {other:?}"),
    }
}

/// Deterministic `n`x`n` game with small integer payoffs.
pub fn scrambled(n: usize) -> BimatrixGame<Rational> {
    BimatrixGame::from_fn(n, n, |i, j| {
        let a = (7 * i + 3 * j + i * j) % 11;
        let b = (5 * i + 2 * j + 3 * i * j + 4) % 13;
        (int(a as i64), int(b as i64))
    })
}

pub fn stag_hunt() -> BimatrixGame<Rational> {
    let m = |rows: [[i64; 2]; 2]| rows.iter().map(|r| r.iter().map(|x| int(*x)).collect()).collect();
    BimatrixGame::new(m([[4, 1], [3, 3]]), m([[4, 3], [1, 3]])).unwrap()
}
