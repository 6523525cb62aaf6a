use crate::bimatrix::BimatrixGame;
use crate::model::{CoalitionGame, StateId};

use super::Number;

/// What a local game is built from: per-successor value pairs and, per
/// objective, the reward structure paid on this step (if any).
pub struct Continuation<'a, T> {
    pub values: &'a [[T; 2]],
    pub rewards: [Option<usize>; 2],
}

/// The bimatrix game at `s`: `z^l(a, b)` is the expected continuation value
/// of objective `l`, plus state and action reward where the objective pays.
pub fn local_game<T: Number>(cg: &CoalitionGame, s: StateId, next: &Continuation<'_, T>) -> BimatrixGame<T> {
    let tables = LocalTables::<T>::new(cg, next.rewards);
    tables.game(s, next.values)
}

/// Local transition structure in the arithmetic of the solve, converted once.
pub(crate) struct LocalTables<T> {
    pub(crate) rows: Vec<usize>,
    pub(crate) cols: Vec<usize>,
    /// Per state, per local choice `r * cols + c`: successors with
    /// probabilities.
    trans: Vec<Vec<Vec<(StateId, T)>>>,
    /// Per objective: per state and local choice, state plus action reward.
    bonus: [Option<Vec<Vec<T>>>; 2],
}

impl<T: Number> LocalTables<T> {
    pub(crate) fn new(cg: &CoalitionGame, rewards: [Option<usize>; 2]) -> Self {
        let g = cg.base();
        let n = g.num_states();
        let mut rows = Vec::with_capacity(n);
        let mut cols = Vec::with_capacity(n);
        let mut trans = Vec::with_capacity(n);
        for s in 0..n {
            let (nr, nc) = (cg.num_rows(s), cg.num_cols(s));
            rows.push(nr);
            cols.push(nc);
            let mut local = Vec::with_capacity(nr * nc);
            for r in 0..nr {
                for c in 0..nc {
                    local.push(cg.dist(s, r, c).entries().iter().map(|(t, p)| (*t, T::from_rational(p))).collect());
                }
            }
            trans.push(local);
        }
        let bonus = rewards.map(|rw| {
            rw.map(|k| {
                let structure = &g.rewards()[k];
                (0..n)
                    .map(|s| {
                        let mut out = Vec::with_capacity(rows[s] * cols[s]);
                        for r in 0..rows[s] {
                            for c in 0..cols[s] {
                                let a = &structure.action[s][cg.choice_index(s, r, c)];
                                out.push(T::from_rational(&(&structure.state[s] + a)));
                            }
                        }
                        out
                    })
                    .collect()
            })
        });
        LocalTables { rows, cols, trans, bonus }
    }

    pub(crate) fn game(&self, s: StateId, values: &[[T; 2]]) -> BimatrixGame<T> {
        let cols = self.cols[s];
        BimatrixGame::from_fn(self.rows[s], cols, |r, c| {
            let k = r * cols + c;
            let mut z = [T::nil(), T::nil()];
            for (t, p) in &self.trans[s][k] {
                for l in 0..2 {
                    z[l] = z[l].plus(&p.times(&values[*t][l]));
                }
            }
            for l in 0..2 {
                if let Some(b) = &self.bonus[l] {
                    z[l] = z[l].plus(&b[s][k]);
                }
            }
            let [a, b] = z;
            (a, b)
        })
    }
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::model::{CsgBuilder, Distribution, Move, Player};
    use crate::num::{int, Rational};

    #[test]
    fn zero_continuation_gives_zero_matrices() {
        let mut b = CsgBuilder::new(vec![Player::new("a", &["x", "y"]), Player::new("b", &["z"])]);
        let s = b.add_state("s");
        b.set_initial(s);
        for m in 0..2 {
            b.add_transition(s, vec![Move::Act(m), Move::Act(0)], Distribution::dirac(s));
        }
        let g = Arc::new(b.build().unwrap());
        let cg = CoalitionGame::new(g, &[0]).unwrap();
        let values = vec![[int(0), int(0)]];
        let game: BimatrixGame<Rational> = local_game(&cg, 0, &Continuation { values: &values, rewards: [None, None] });
        assert_eq!((game.rows(), game.cols()), (2, 1));
        for r in 0..2 {
            assert_eq!(*game.z1(r, 0), int(0));
            assert_eq!(*game.z2(r, 0), int(0));
        }
    }
}
