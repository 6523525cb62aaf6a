use std::sync::Arc;

use super::csg::{Csg, Distribution, Move, StateId};
use super::ModelError;

/// Two-player view of a [`Csg`]: player 1 controls the coalition (members in
/// ascending index order), player 2 the remaining players. Local actions
/// are tuples of member moves, numbered in mixed-radix order.
#[derive(Clone, Debug)]
pub struct CoalitionGame {
    base: Arc<Csg>,
    first: Vec<usize>,
    second: Vec<usize>,
    row_offsets: Vec<Vec<usize>>,
    col_offsets: Vec<Vec<usize>>,
}

impl CoalitionGame {
    pub fn new(base: Arc<Csg>, coalition: &[usize]) -> Result<Self, ModelError> {
        let n = base.num_players();
        let mut first: Vec<usize> = coalition.to_vec();
        first.sort_unstable();
        first.dedup();
        if first.is_empty() {
            return Err(ModelError::EmptyCoalition);
        }
        if let Some(&bad) = first.iter().find(|&&p| p >= n) {
            return Err(ModelError::UnknownPlayer(format!("#{}", bad + 1)));
        }
        if first.len() == n {
            return Err(ModelError::FullCoalition);
        }
        let second: Vec<usize> = (0..n).filter(|p| !first.contains(p)).collect();
        let mut row_offsets = Vec::with_capacity(base.num_states());
        let mut col_offsets = Vec::with_capacity(base.num_states());
        for s in 0..base.num_states() {
            let avail = &base.state(s).available;
            let mut stride = vec![1usize; n];
            for p in (0..n.saturating_sub(1)).rev() {
                stride[p] = stride[p + 1] * avail[p + 1].len();
            }
            row_offsets.push(offsets(&first, avail, &stride));
            col_offsets.push(offsets(&second, avail, &stride));
        }
        Ok(CoalitionGame { base, first, second, row_offsets, col_offsets })
    }

    pub fn base(&self) -> &Csg {
        &self.base
    }

    pub fn base_arc(&self) -> &Arc<Csg> {
        &self.base
    }

    pub fn coalition(&self) -> &[usize] {
        &self.first
    }

    pub fn opponents(&self) -> &[usize] {
        &self.second
    }

    pub fn num_states(&self) -> usize {
        self.base.num_states()
    }

    pub fn num_rows(&self, s: StateId) -> usize {
        self.row_offsets[s].len()
    }

    pub fn num_cols(&self, s: StateId) -> usize {
        self.col_offsets[s].len()
    }

    /// Index into the base state's choices for local action pair `(r, c)`.
    pub fn choice_index(&self, s: StateId, r: usize, c: usize) -> usize {
        self.row_offsets[s][r] + self.col_offsets[s][c]
    }

    pub fn dist(&self, s: StateId, r: usize, c: usize) -> &Distribution {
        &self.base.choices(s)[self.choice_index(s, r, c)].dist
    }

    /// Member moves of local action `r` of player 1 (or `c` of player 2).
    pub fn local_moves(&self, s: StateId, side_first: bool, index: usize) -> Vec<Move> {
        let members = if side_first { &self.first } else { &self.second };
        let avail = &self.base.state(s).available;
        let mut rest = index;
        let mut out = vec![Move::Idle; members.len()];
        for (k, &p) in members.iter().enumerate().rev() {
            let len = avail[p].len();
            out[k] = avail[p][rest % len];
            rest /= len;
        }
        out
    }

    pub fn format_local(&self, s: StateId, side_first: bool, index: usize) -> String {
        let members = if side_first { &self.first } else { &self.second };
        let moves = self.local_moves(s, side_first, index);
        let names: Vec<&str> = moves.iter().zip(members).map(|(m, &p)| self.base.players()[p].move_name(*m)).collect();
        if names.len() == 1 {
            names[0].to_string()
        } else {
            format!("({})", names.join(","))
        }
    }
}

fn offsets(members: &[usize], avail: &[Vec<Move>], stride: &[usize]) -> Vec<usize> {
    let mut out = vec![0usize];
    for &p in members {
        let mut next = Vec::with_capacity(out.len() * avail[p].len());
        for base in &out {
            for k in 0..avail[p].len() {
                next.push(base + k * stride[p]);
            }
        }
        out = next;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{CsgBuilder, Player};
    use crate::num::rat;

    fn three_player_game() -> Csg {
        let players =
            vec![Player::new("a", &["x", "y"]), Player::new("b", &["u", "v", "w"]), Player::new("c", &["p", "q"])];
        let mut b = CsgBuilder::new(players);
        let s0 = b.add_state("s0");
        let s1 = b.add_state("s1");
        b.set_initial(s0);
        for i in 0..2 {
            for j in 0..3 {
                for k in 0..2 {
                    let p = rat((i * 6 + j * 2 + k + 1) as i64, 13);
                    let d = Distribution::from_entries([(s0, p.clone()), (s1, rat(1, 1) - p)]);
                    b.add_transition(s0, vec![Move::Act(i), Move::Act(j), Move::Act(k)], d);
                }
            }
        }
        b.add_transition(s1, vec![Move::Idle; 3], Distribution::dirac(s1));
        b.build().unwrap()
    }

    #[test]
    fn regrouping_is_faithful() {
        let g = Arc::new(three_player_game());
        for coalition in [vec![0], vec![1], vec![0, 2], vec![2, 1]] {
            let cg = CoalitionGame::new(g.clone(), &coalition).unwrap();
            let s = 0;
            assert_eq!(cg.num_rows(s) * cg.num_cols(s), g.choices(s).len());
            let mut seen = vec![false; g.choices(s).len()];
            for r in 0..cg.num_rows(s) {
                for c in 0..cg.num_cols(s) {
                    let idx = cg.choice_index(s, r, c);
                    assert!(!seen[idx]);
                    seen[idx] = true;
                    let mut moves = vec![Move::Idle; 3];
                    for (m, &p) in cg.local_moves(s, true, r).iter().zip(cg.coalition()) {
                        moves[p] = *m;
                    }
                    for (m, &p) in cg.local_moves(s, false, c).iter().zip(cg.opponents()) {
                        moves[p] = *m;
                    }
                    assert_eq!(g.choices(s)[idx].moves, moves);
                }
            }
        }
    }

    #[test]
    fn rejects_trivial_coalitions() {
        let g = Arc::new(three_player_game());
        assert!(matches!(CoalitionGame::new(g.clone(), &[]), Err(ModelError::EmptyCoalition)));
        assert!(matches!(CoalitionGame::new(g.clone(), &[0, 1, 2]), Err(ModelError::FullCoalition)));
        let cg = CoalitionGame::new(g, &[0, 1]).unwrap();
        assert_eq!(cg.num_rows(0), 6);
        assert_eq!(cg.num_cols(0), 2);
        assert_eq!(cg.format_local(0, true, 5), "(y,w)");
    }
}
