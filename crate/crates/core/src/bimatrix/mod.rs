//! Two-player normal-form games: all extreme Nash equilibria via labelled
//! best-response polytopes, strict-dominance pre-filtering, and
//! social-welfare-optimal selection.

mod dominance;
mod field;
mod polytope;
mod select;

pub use dominance::eliminate_dominated;
pub use field::Field;
pub use polytope::enumerate_equilibria;
pub use select::{compare_lexicographic, select_swne};

use std::fmt;

use thiserror::Error;

use crate::num::{self, Rational};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BimatrixError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("no equilibrium found (internal error)")]
    NoEquilibrium,
    #[error("empty equilibrium list")]
    EmptyList,
}

/// Utilities `z1[i][j]`, `z2[i][j]` for row action `i` and column action `j`.
#[derive(Clone, Debug, PartialEq)]
pub struct BimatrixGame<T> {
    rows: usize,
    cols: usize,
    z1: Vec<T>,
    z2: Vec<T>,
}

impl<T: Field> BimatrixGame<T> {
    pub fn new(z1: Vec<Vec<T>>, z2: Vec<Vec<T>>) -> Result<Self, BimatrixError> {
        let rows = z1.len();
        if rows == 0 || z2.len() != rows {
            return Err(BimatrixError::DimensionMismatch("row counts differ or are zero".into()));
        }
        let cols = z1[0].len();
        if cols == 0 || z1.iter().chain(&z2).any(|r| r.len() != cols) {
            return Err(BimatrixError::DimensionMismatch("ragged or empty rows".into()));
        }
        Ok(BimatrixGame { rows, cols, z1: z1.into_iter().flatten().collect(), z2: z2.into_iter().flatten().collect() })
    }

    /// Builds from row-major payoff functions.
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> (T, T)) -> Self {
        let mut z1 = Vec::with_capacity(rows * cols);
        let mut z2 = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                let (a, b) = f(i, j);
                z1.push(a);
                z2.push(b);
            }
        }
        BimatrixGame { rows, cols, z1, z2 }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn z1(&self, i: usize, j: usize) -> &T {
        &self.z1[i * self.cols + j]
    }

    pub fn z2(&self, i: usize, j: usize) -> &T {
        &self.z2[i * self.cols + j]
    }

    /// Subgame on the given rows and columns.
    pub fn restrict(&self, rows: &[usize], cols: &[usize]) -> Self {
        BimatrixGame::from_fn(rows.len(), cols.len(), |i, j| {
            (self.z1(rows[i], cols[j]).clone(), self.z2(rows[i], cols[j]).clone())
        })
    }

    /// `(x^T Z1 y, x^T Z2 y)`.
    pub fn payoffs(&self, x: &[T], y: &[T]) -> (T, T) {
        let mut u = T::zero();
        let mut v = T::zero();
        for i in 0..self.rows {
            if x[i].is_exact_zero() {
                continue;
            }
            for j in 0..self.cols {
                if y[j].is_exact_zero() {
                    continue;
                }
                let p = x[i].mul(&y[j]);
                u = u.add(&p.mul(self.z1(i, j)));
                v = v.add(&p.mul(self.z2(i, j)));
            }
        }
        (u, v)
    }

    /// Tolerance for comparisons on this game: zero when exact, relative to
    /// the largest payoff magnitude otherwise.
    pub fn tolerance(&self) -> T {
        T::tolerance_for(self.z1.iter().chain(&self.z2))
    }

    pub fn map<U: Field>(&self, f: impl Fn(&T) -> U) -> BimatrixGame<U> {
        BimatrixGame {
            rows: self.rows,
            cols: self.cols,
            z1: self.z1.iter().map(&f).collect(),
            z2: self.z2.iter().map(&f).collect(),
        }
    }
}

/// A mixed strategy pair with its payoffs.
#[derive(Clone, Debug, PartialEq)]
pub struct MixedProfile<T> {
    pub x: Vec<T>,
    pub y: Vec<T>,
    pub u: T,
    pub v: T,
}

impl<T: Field> MixedProfile<T> {
    pub fn support_x(&self) -> Vec<usize> {
        (0..self.x.len()).filter(|i| !self.x[*i].is_exact_zero()).collect()
    }

    pub fn support_y(&self) -> Vec<usize> {
        (0..self.y.len()).filter(|j| !self.y[*j].is_exact_zero()).collect()
    }
}

impl MixedProfile<Rational> {
    pub fn to_f64(&self) -> MixedProfile<f64> {
        MixedProfile {
            x: self.x.iter().map(num::to_f64).collect(),
            y: self.y.iter().map(num::to_f64).collect(),
            u: num::to_f64(&self.u),
            v: num::to_f64(&self.v),
        }
    }
}

impl<T: Field> fmt::Display for MixedProfile<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let show = |v: &[T]| v.iter().map(|t| t.show()).collect::<Vec<_>>().join(", ");
        write!(f, "x=({}) y=({}) values=({}, {})", show(&self.x), show(&self.y), self.u.show(), self.v.show())
    }
}

/// Checks the complementarity conditions `x^T(1u - Z1 y) = 0`,
/// `y^T(1v - Z2^T x) = 0`, `1u - Z1 y >= 0`, `1v - Z2^T x >= 0` within
/// `tolerance`.
pub fn is_equilibrium<T: Field>(
    g: &BimatrixGame<T>,
    x: &[T],
    y: &[T],
    u: &T,
    v: &T,
    tolerance: &T,
) -> Result<bool, BimatrixError> {
    if x.len() != g.rows || y.len() != g.cols {
        return Err(BimatrixError::DimensionMismatch(format!(
            "profile is {}x{}, game is {}x{}",
            x.len(),
            y.len(),
            g.rows,
            g.cols
        )));
    }
    let scale_u = T::one().max_abs(u);
    let scale_v = T::one().max_abs(v);
    let tol_u = tolerance.mul(&scale_u);
    let tol_v = tolerance.mul(&scale_v);
    let mut comp_x = T::zero();
    for i in 0..g.rows {
        let mut row = T::zero();
        for j in 0..g.cols {
            row = row.add(&g.z1(i, j).mul(&y[j]));
        }
        let slack = u.sub(&row);
        if slack.lt_tol(&T::zero(), &tol_u) {
            return Ok(false);
        }
        comp_x = comp_x.add(&x[i].mul(&slack));
    }
    let mut comp_y = T::zero();
    for j in 0..g.cols {
        let mut col = T::zero();
        for i in 0..g.rows {
            col = col.add(&g.z2(i, j).mul(&x[i]));
        }
        let slack = v.sub(&col);
        if slack.lt_tol(&T::zero(), &tol_v) {
            return Ok(false);
        }
        comp_y = comp_y.add(&y[j].mul(&slack));
    }
    Ok(comp_x.abs_le(&tol_u) && comp_y.abs_le(&tol_v))
}

/// Every extreme equilibrium of `g`, computed on the game reduced by strict
/// dominance and lifted back to the original indices.
pub fn solve_all<T: Field>(g: &BimatrixGame<T>) -> Result<Vec<MixedProfile<T>>, BimatrixError> {
    let (reduced, row_map, col_map) = eliminate_dominated(g);
    let eqs = enumerate_equilibria(&reduced)?;
    Ok(eqs
        .into_iter()
        .map(|e| {
            let mut x = vec![T::zero(); g.rows];
            let mut y = vec![T::zero(); g.cols];
            for (k, p) in e.x.into_iter().enumerate() {
                x[row_map[k]] = p;
            }
            for (k, p) in e.y.into_iter().enumerate() {
                y[col_map[k]] = p;
            }
            MixedProfile { x, y, u: e.u, v: e.v }
        })
        .collect())
}

/// The selected social-welfare-optimal equilibrium.
pub fn solve_swne<T: Field>(g: &BimatrixGame<T>) -> Result<MixedProfile<T>, BimatrixError> {
    let eqs = solve_all(g)?;
    select_swne(eqs)
}
