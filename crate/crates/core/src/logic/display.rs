use std::fmt;

use super::*;
use crate::expr::ExprDisplay;
use crate::model::Csg;
use crate::num;

/// Property text that parses back to the same formula against `g`.
pub struct FormulaDisplay<'a> {
    formula: &'a StateFormula,
    vars: Vec<String>,
    players: Vec<String>,
}

impl StateFormula {
    pub fn display<'a>(&'a self, g: &Csg) -> FormulaDisplay<'a> {
        FormulaDisplay {
            formula: self,
            vars: g.variables().iter().map(|v| v.name.clone()).collect(),
            players: g.players().iter().map(|p| p.name.clone()).collect(),
        }
    }
}

impl fmt::Display for FormulaDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.state(f, self.formula)
    }
}

fn precedence(s: &StateFormula) -> u8 {
    match s {
        StateFormula::Or(..) => 1,
        StateFormula::And(..) => 2,
        StateFormula::Not(_) => 3,
        _ => 4,
    }
}

fn mode(f: &mut fmt::Formatter<'_>, m: &QueryMode) -> fmt::Result {
    match m {
        QueryMode::Value(Direction::Max) => write!(f, "max=?"),
        QueryMode::Value(Direction::Min) => write!(f, "min=?"),
        QueryMode::Threshold(c, x) => write!(f, "{}{}", c.symbol(), num::format_rational(x)),
    }
}

impl FormulaDisplay<'_> {
    fn child(&self, f: &mut fmt::Formatter<'_>, s: &StateFormula, min: u8) -> fmt::Result {
        if precedence(s) < min {
            write!(f, "(")?;
            self.state(f, s)?;
            write!(f, ")")
        } else {
            self.state(f, s)
        }
    }

    fn coalition(&self, f: &mut fmt::Formatter<'_>, c: &[usize]) -> fmt::Result {
        let names: Vec<&str> = c.iter().map(|p| self.players[*p].as_str()).collect();
        if names.len() == 1 {
            write!(f, "{}", names[0])
        } else {
            write!(f, "{{{}}}", names.join(","))
        }
    }

    fn state(&self, f: &mut fmt::Formatter<'_>, s: &StateFormula) -> fmt::Result {
        match s {
            StateFormula::True => write!(f, "true"),
            StateFormula::False => write!(f, "false"),
            StateFormula::Label(l) => write!(f, "\"{l}\""),
            StateFormula::Atom(e) => write!(f, "{}", ExprDisplay { expr: e, names: &self.vars }),
            StateFormula::Not(a) => {
                write!(f, "!")?;
                self.child(f, a, 3)
            }
            StateFormula::And(a, b) => {
                self.child(f, a, 2)?;
                write!(f, " & ")?;
                self.child(f, b, 3)
            }
            StateFormula::Or(a, b) => {
                self.child(f, a, 1)?;
                write!(f, " | ")?;
                self.child(f, b, 2)
            }
            StateFormula::Prob { coalition, mode: m, path } => {
                write!(f, "<<")?;
                self.coalition(f, coalition)?;
                write!(f, ">>P")?;
                mode(f, m)?;
                write!(f, " [")?;
                self.path(f, path)?;
                write!(f, "]")
            }
            StateFormula::Reward { coalition, reward, mode: m, formula, .. } => {
                write!(f, "<<")?;
                self.coalition(f, coalition)?;
                write!(f, ">>R{{\"{reward}\"}}")?;
                mode(f, m)?;
                write!(f, " [")?;
                self.reward(f, formula)?;
                write!(f, "]")
            }
            StateFormula::Nash(q) => {
                write!(f, "<<")?;
                self.coalition(f, &q.coalition)?;
                write!(f, ":")?;
                self.coalition(f, &q.opponents)?;
                write!(f, ">> ")?;
                mode(f, &q.mode)?;
                write!(f, " (")?;
                self.objective(f, &q.objectives[0])?;
                write!(f, " + ")?;
                self.objective(f, &q.objectives[1])?;
                write!(f, ")")
            }
        }
    }

    fn objective(&self, f: &mut fmt::Formatter<'_>, o: &Objective) -> fmt::Result {
        match o {
            Objective::Prob(p) => {
                write!(f, "P[")?;
                self.path(f, p)?;
                write!(f, "]")
            }
            Objective::Reward { reward, formula, .. } => {
                write!(f, "R{{\"{reward}\"}}[")?;
                self.reward(f, formula)?;
                write!(f, "]")
            }
        }
    }

    fn path(&self, f: &mut fmt::Formatter<'_>, p: &PathFormula) -> fmt::Result {
        match p {
            PathFormula::Next(a) => {
                write!(f, "X ")?;
                self.state(f, a)
            }
            PathFormula::Until { left, right, bound } => {
                if **left == StateFormula::True {
                    write!(f, "F")?;
                } else {
                    self.state(f, left)?;
                    write!(f, " U")?;
                }
                if let Some(k) = bound {
                    write!(f, "<={k}")?;
                }
                write!(f, " ")?;
                self.state(f, right)
            }
        }
    }

    fn reward(&self, f: &mut fmt::Formatter<'_>, r: &RewardFormula) -> fmt::Result {
        match r {
            RewardFormula::Instant(k) => write!(f, "I={k}"),
            RewardFormula::Cumulative(k) => write!(f, "C<={k}"),
            RewardFormula::Reach(a) => {
                write!(f, "F ")?;
                self.state(f, a)
            }
        }
    }
}
