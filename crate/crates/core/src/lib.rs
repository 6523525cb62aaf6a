//! Nash equilibrium model checking and strategy synthesis for concurrent
//! stochastic games.

pub mod bimatrix;
pub mod check;
pub mod expr;
pub mod lang;
pub mod logic;
pub mod mdp;
pub mod model;
pub mod nash;
pub mod num;

pub use model::{CoalitionGame, Csg, CsgBuilder, Distribution, Move, Player, StateId};
pub use num::Rational;
