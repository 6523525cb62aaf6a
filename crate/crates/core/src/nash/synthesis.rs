use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::bimatrix::MixedProfile;
use crate::model::{CoalitionGame, CoalitionStrategy, Side, StateId};
use crate::num::{Rational, Scalar};

use super::{Goal, Number};

/// Sparse mixed choices of both coalitions at one state.
#[derive(Clone, Debug, PartialEq)]
pub struct LocalEquilibrium {
    pub x: Vec<(usize, Rational)>,
    pub y: Vec<(usize, Rational)>,
}

impl LocalEquilibrium {
    pub(crate) fn from_profile<T: Number>(p: &MixedProfile<T>) -> Self {
        let sparse = |v: &[T]| {
            v.iter().enumerate().filter(|(_, q)| !Scalar::is_nil(*q)).map(|(i, q)| (i, q.to_rational())).collect()
        };
        LocalEquilibrium { x: sparse(&p.x), y: sparse(&p.y) }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    BothPending,
    Target1Done,
    Target2Done,
    Done,
}

impl Mode {
    fn from_flags(d1: bool, d2: bool) -> Mode {
        match (d1, d2) {
            (false, false) => Mode::BothPending,
            (true, false) => Mode::Target1Done,
            (false, true) => Mode::Target2Done,
            (true, true) => Mode::Done,
        }
    }

    fn flags(self) -> (bool, bool) {
        match self {
            Mode::BothPending => (false, false),
            Mode::Target1Done => (true, false),
            Mode::Target2Done => (false, true),
            Mode::Done => (true, true),
        }
    }
}

#[derive(Clone, Debug)]
enum Schedule {
    Stationary,
    /// `horizons` per objective; `k` is their minimum.
    Stepped {
        horizons: [usize; 2],
        k: usize,
    },
}

/// A finite-memory subgame-perfect profile. Memory records which objectives
/// are settled and, for finite horizons, the number of steps taken.
/// Equilibrium phases randomise per the local equilibria; once one
/// objective is settled both coalitions follow an optimal joint strategy for
/// the other.
#[derive(Clone, Debug)]
pub struct Profile {
    game: CoalitionGame,
    goals: [Goal; 2],
    schedule: Schedule,
    /// Stationary: `[0][s]`. Stepped: `[n][s]` with `n` steps to the nearer
    /// horizon.
    equilibria: Vec<Vec<Option<LocalEquilibrium>>>,
    /// Per objective, joint choice ids (`row * cols + col`) of the optimal
    /// single-objective strategy: `[0][s]` or `[remaining][s]`.
    single: [Vec<Vec<usize>>; 2],
    embedding: Vec<StateId>,
}

impl Profile {
    pub(crate) fn stationary(
        game: CoalitionGame,
        goals: [Goal; 2],
        equilibria: Vec<Option<LocalEquilibrium>>,
        single: [Vec<usize>; 2],
    ) -> Self {
        let n = game.num_states();
        Profile {
            game,
            goals,
            schedule: Schedule::Stationary,
            equilibria: vec![equilibria],
            single: single.map(|s| vec![s]),
            embedding: (0..n).collect(),
        }
    }

    pub(crate) fn stepped(
        game: CoalitionGame,
        goals: [Goal; 2],
        equilibria: Vec<Vec<Option<LocalEquilibrium>>>,
        single: [Vec<Vec<usize>>; 2],
    ) -> Self {
        let n = game.num_states();
        let horizons = [goals[0].horizon(), goals[1].horizon()];
        let k = horizons[0].min(horizons[1]);
        Profile {
            game,
            goals,
            schedule: Schedule::Stepped { horizons, k },
            equilibria,
            single,
            embedding: (0..n).collect(),
        }
    }

    pub(crate) fn set_embedding(&mut self, embedding: Vec<StateId>) {
        self.embedding = embedding;
    }

    /// The coalition game the profile plays (a layered product for mixed
    /// horizons).
    pub fn game(&self) -> &CoalitionGame {
        &self.game
    }

    pub fn goals(&self) -> &[Goal; 2] {
        &self.goals
    }

    /// State of [`Profile::game`] standing for each state of the queried game.
    pub fn embedding(&self) -> &[StateId] {
        &self.embedding
    }

    pub fn is_stepped(&self) -> bool {
        matches!(self.schedule, Schedule::Stepped { .. })
    }

    pub fn decode(&self, memory: usize) -> (Mode, usize) {
        let (d1, d2) = (memory & 1 == 1, memory & 2 == 2);
        (Mode::from_flags(d1, d2), memory >> 2)
    }

    fn encode(mode: Mode, step: usize) -> usize {
        let (d1, d2) = mode.flags();
        (step << 2) | usize::from(d1) | (usize::from(d2) << 1)
    }

    fn remaining(&self, l: usize, step: usize) -> usize {
        match self.schedule {
            Schedule::Stationary => 0,
            Schedule::Stepped { horizons, .. } => horizons[l].saturating_sub(step),
        }
    }

    fn last_step(&self) -> usize {
        match self.schedule {
            Schedule::Stationary => 0,
            Schedule::Stepped { horizons, .. } => horizons[0].max(horizons[1]),
        }
    }

    fn mode_at(&self, s: StateId, step: usize, before: Mode) -> Mode {
        let (d1, d2) = before.flags();
        Mode::from_flags(
            d1 || self.goals[0].resolved(s, self.remaining(0, step)),
            d2 || self.goals[1].resolved(s, self.remaining(1, step)),
        )
    }

    /// The local equilibrium played in the both-pending phase.
    pub fn equilibrium(&self, s: StateId, step: usize) -> Option<&LocalEquilibrium> {
        let n = match self.schedule {
            Schedule::Stationary => 0,
            Schedule::Stepped { k, .. } => k.checked_sub(step)?,
        };
        self.equilibria.get(n)?.get(s)?.as_ref()
    }

    /// Joint local choice `(row, col)` of the single-objective phase for
    /// objective `l`.
    pub fn single_choice(&self, l: usize, s: StateId, step: usize) -> Option<(usize, usize)> {
        let layer = match self.schedule {
            Schedule::Stationary => 0,
            Schedule::Stepped { .. } => self.remaining(l, step),
        };
        let id = *self.single[l].get(layer)?.get(s)?;
        let cols = self.game.num_cols(s);
        Some((id / cols, id % cols))
    }
}

impl CoalitionStrategy for Profile {
    fn initial_memory(&self, state: StateId) -> usize {
        Profile::encode(self.mode_at(state, 0, Mode::BothPending), 0)
    }

    fn next_memory(&self, memory: usize, next: StateId) -> usize {
        let (mode, step) = self.decode(memory);
        let step = (step + 1).min(self.last_step());
        Profile::encode(self.mode_at(next, step, mode), step)
    }

    fn decide(&self, side: Side, state: StateId, memory: usize) -> Option<Vec<(usize, Rational)>> {
        let (mode, step) = self.decode(memory);
        let pure = |i: usize| Some(vec![(i, Rational::one())]);
        let pick = |(r, c): (usize, usize)| match side {
            Side::First => pure(r),
            Side::Second => pure(c),
        };
        match mode {
            Mode::BothPending => {
                let eq = self.equilibrium(state, step)?;
                Some(match side {
                    Side::First => eq.x.clone(),
                    Side::Second => eq.y.clone(),
                })
            }
            Mode::Target1Done => pick(self.single_choice(1, state, step)?),
            Mode::Target2Done => pick(self.single_choice(0, state, step)?),
            Mode::Done => pure(0),
        }
    }
}
