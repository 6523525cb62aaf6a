use super::*;
use crate::expr::Value;
use crate::lang::lexer::Tok;
use crate::lang::parser::Parser;
use crate::lang::LangError;
use crate::model::{ConstValue, Csg};
use crate::num;

fn syntax(e: LangError) -> LogicError {
    match e {
        LangError::Syntax { pos, msg } => LogicError::Syntax { pos, msg },
        LangError::UndeclaredSymbol { pos, name } => LogicError::UnknownLabel { pos, name },
        other => LogicError::Syntax { pos: Pos { line: 0, col: 0 }, msg: other.to_string() },
    }
}

struct PropertyParser<'a> {
    p: Parser,
    g: &'a Csg,
}

fn const_expr(c: &ConstValue) -> Expr {
    Expr::Lit(match c {
        ConstValue::Int(i) => Value::Int(*i),
        ConstValue::Bool(b) => Value::Bool(*b),
        ConstValue::Rat(r) => Value::Num(r.clone()),
    })
}

/// Parses one property against the model's players, labels, variables,
/// constants and reward structures.
pub fn parse_property(text: &str, g: &Csg) -> Result<StateFormula, LogicError> {
    let mut pp = PropertyParser { p: Parser::new(text).map_err(syntax)?, g };
    let f = pp.formula()?;
    if !pp.p.at_eof() {
        return Err(LogicError::Syntax { pos: pp.p.pos(), msg: format!("unexpected {}", pp.p.peek()) });
    }
    Ok(f)
}

/// One property per line; blank lines and `//` comments are skipped. Each
/// entry keeps its source text.
pub fn parse_properties(text: &str, g: &Csg) -> Result<Vec<(String, StateFormula)>, LogicError> {
    let mut out = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let body = line.split("//").next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let f = parse_property(body, g).map_err(|e| shift_line(e, n + 1))?;
        out.push((body.to_string(), f));
    }
    Ok(out)
}

fn shift_line(e: LogicError, line: usize) -> LogicError {
    let fix = |pos: Pos| Pos { line, col: pos.col };
    match e {
        LogicError::Syntax { pos, msg } => LogicError::Syntax { pos: fix(pos), msg },
        LogicError::UnknownPlayer { pos, name } => LogicError::UnknownPlayer { pos: fix(pos), name },
        LogicError::CoalitionNotPartition { pos, msg } => LogicError::CoalitionNotPartition { pos: fix(pos), msg },
        LogicError::UnknownReward { pos, name } => LogicError::UnknownReward { pos: fix(pos), name },
        LogicError::UnknownLabel { pos, name } => LogicError::UnknownLabel { pos: fix(pos), name },
        LogicError::BadThreshold { pos, msg } => LogicError::BadThreshold { pos: fix(pos), msg },
        LogicError::Type { pos, msg } => LogicError::Type { pos: fix(pos), msg },
    }
}

fn continues_expression(t: &Tok) -> bool {
    matches!(
        t,
        Tok::Plus
            | Tok::Minus
            | Tok::Star
            | Tok::Slash
            | Tok::Eq
            | Tok::Neq
            | Tok::Lt
            | Tok::Le
            | Tok::Gt
            | Tok::Ge
            | Tok::Question
    )
}

impl PropertyParser<'_> {
    fn formula(&mut self) -> Result<StateFormula, LogicError> {
        let lhs = self.disjunction()?;
        if self.p.eat(&Tok::Implies) {
            let rhs = self.formula()?;
            return Ok(StateFormula::or(StateFormula::not(lhs), rhs));
        }
        Ok(lhs)
    }

    fn disjunction(&mut self) -> Result<StateFormula, LogicError> {
        let mut lhs = self.conjunction()?;
        while self.p.eat(&Tok::Or) {
            lhs = StateFormula::or(lhs, self.conjunction()?);
        }
        Ok(lhs)
    }

    fn conjunction(&mut self) -> Result<StateFormula, LogicError> {
        let mut lhs = self.negation()?;
        while self.p.eat(&Tok::And) {
            lhs = StateFormula::and(lhs, self.negation()?);
        }
        Ok(lhs)
    }

    fn negation(&mut self) -> Result<StateFormula, LogicError> {
        if self.p.eat(&Tok::Not) {
            return Ok(StateFormula::not(self.negation()?));
        }
        self.atom()
    }

    fn atom(&mut self) -> Result<StateFormula, LogicError> {
        match self.p.peek().clone() {
            Tok::Str(name) => {
                let pos = self.p.bump().pos;
                if self.g.label(&name).is_none() {
                    return Err(LogicError::UnknownLabel { pos, name });
                }
                Ok(StateFormula::Label(name))
            }
            Tok::LtLt => self.coalition_operator(),
            Tok::LParen => {
                let start = self.p.i;
                self.p.bump();
                let attempt = self.formula();
                if let Ok(f) = attempt {
                    if self.p.eat(&Tok::RParen) && !continues_expression(self.p.peek()) {
                        return Ok(f);
                    }
                }
                // an arithmetic subexpression such as `(x+1)<=3`
                self.p.i = start;
                self.expression_atom()
            }
            _ => self.expression_atom(),
        }
    }

    fn resolve(&self, e: &Expr) -> Expr {
        let g = self.g;
        e.resolve(&|n| {
            if let Some(i) = g.variable_index(n) {
                return Some(Expr::Var(i, g.variables()[i].boolean));
            }
            g.constants().get(n).map(const_expr)
        })
    }

    fn expression_atom(&mut self) -> Result<StateFormula, LogicError> {
        let pos = self.p.pos();
        let e = self.p.relational().map_err(syntax)?;
        match &e {
            Expr::Lit(Value::Bool(true)) => return Ok(StateFormula::True),
            Expr::Lit(Value::Bool(false)) => return Ok(StateFormula::False),
            Expr::Name(n) if self.g.label(n).is_some() && self.g.variable_index(n).is_none() => {
                return Ok(StateFormula::Label(n.clone()))
            }
            _ => {}
        }
        let e = self.resolve(&e);
        if let Some(n) = e.unresolved() {
            return Err(LogicError::UnknownLabel { pos, name: n.to_string() });
        }
        let probe = self.g.valuation(self.g.initial()[0]);
        if !probe.is_empty() || self.g.variables().is_empty() {
            match e.eval(probe) {
                Ok(Value::Bool(_)) => {}
                Ok(v) => return Err(LogicError::Type { pos, msg: format!("expected a condition, found value {v}") }),
                Err(err) => return Err(LogicError::Type { pos, msg: err.to_string() }),
            }
        }
        Ok(StateFormula::Atom(e))
    }

    fn player(&mut self) -> Result<usize, LogicError> {
        let pos = self.p.pos();
        match self.p.bump().tok {
            Tok::Ident(name) => self.g.player_index(&name).ok_or(LogicError::UnknownPlayer { pos, name }),
            Tok::Int(i) if i >= 1 && (i as usize) <= self.g.num_players() => Ok(i as usize - 1),
            Tok::Int(i) => Err(LogicError::UnknownPlayer { pos, name: i.to_string() }),
            other => Err(LogicError::Syntax { pos, msg: format!("expected player, found {other}") }),
        }
    }

    /// Players up to `:` or `>>`, as names, 1-based indices, or `{..}` groups.
    fn player_list(&mut self) -> Result<Vec<usize>, LogicError> {
        let mut players = Vec::new();
        loop {
            match self.p.peek() {
                Tok::GtGt | Tok::Colon => return Ok(players),
                Tok::LBrace => {
                    self.p.bump();
                    if *self.p.peek() != Tok::RBrace {
                        players.push(self.player()?);
                        while self.p.eat(&Tok::Comma) {
                            players.push(self.player()?);
                        }
                    }
                    self.p.expect(&Tok::RBrace).map_err(syntax)?;
                }
                _ => players.push(self.player()?),
            }
            if !self.p.eat(&Tok::Comma) {
                return Ok(players);
            }
        }
    }

    fn coalition_operator(&mut self) -> Result<StateFormula, LogicError> {
        let pos = self.p.expect(&Tok::LtLt).map_err(syntax)?;
        let first = self.player_list()?;
        let second = if self.p.eat(&Tok::Colon) { Some(self.player_list()?) } else { None };
        self.p.expect(&Tok::GtGt).map_err(syntax)?;
        let n = self.g.num_players();
        let mut seen = vec![false; n];
        for &p in first.iter().chain(second.iter().flatten()) {
            if seen[p] {
                return Err(LogicError::CoalitionNotPartition {
                    pos,
                    msg: format!("player `{}` listed twice", self.g.players()[p].name),
                });
            }
            seen[p] = true;
        }
        let Some(second) = second else {
            return self.zero_sum(first);
        };
        if let Some(missing) = seen.iter().position(|s| !s) {
            return Err(LogicError::CoalitionNotPartition {
                pos,
                msg: format!("player `{}` is in neither coalition", self.g.players()[missing].name),
            });
        }
        if first.is_empty() || second.is_empty() {
            return Err(LogicError::CoalitionNotPartition { pos, msg: "both coalitions must be nonempty".into() });
        }
        let mode = self.mode(false)?;
        let close = if self.p.eat(&Tok::LParen) {
            Tok::RParen
        } else if self.p.eat(&Tok::LBrack) {
            Tok::RBrack
        } else {
            return Err(LogicError::Syntax { pos: self.p.pos(), msg: "expected `(` before the objectives".into() });
        };
        let a = self.objective()?;
        self.p.expect(&Tok::Plus).map_err(syntax)?;
        let b = self.objective()?;
        self.p.expect(&close).map_err(syntax)?;
        if a.is_reward() != b.is_reward() {
            return Err(LogicError::Syntax {
                pos,
                msg: "a Nash operator sums two probability or two reward objectives".into(),
            });
        }
        if let QueryMode::Value(Direction::Min) = mode {
            return Err(LogicError::Syntax { pos, msg: "Nash operators support max=? only".into() });
        }
        Ok(StateFormula::Nash(Box::new(NashQuery { coalition: first, opponents: second, objectives: [a, b], mode })))
    }

    fn zero_sum(&mut self, coalition: Vec<usize>) -> Result<StateFormula, LogicError> {
        let pos = self.p.pos();
        let (word, _) = self.p.ident().map_err(syntax)?;
        let (kind, inline) = match word.as_str() {
            "P" => ('P', None),
            "Pmax" => ('P', Some(Direction::Max)),
            "Pmin" => ('P', Some(Direction::Min)),
            "R" => ('R', None),
            "Rmax" => ('R', Some(Direction::Max)),
            "Rmin" => ('R', Some(Direction::Min)),
            _ => return Err(LogicError::Syntax { pos, msg: format!("expected P or R, found `{word}`") }),
        };
        let reward = if kind == 'R' && inline.is_none() { self.reward_name()? } else { None };
        let mode = match inline {
            Some(d) => {
                self.p.expect(&Tok::Eq).map_err(syntax)?;
                self.p.expect(&Tok::Question).map_err(syntax)?;
                QueryMode::Value(d)
            }
            None => self.mode(kind == 'P')?,
        };
        self.p.expect(&Tok::LBrack).map_err(syntax)?;
        let f = if kind == 'P' {
            StateFormula::Prob { coalition, mode, path: self.path()? }
        } else {
            let (reward, index) = self.resolve_reward(reward, pos)?;
            StateFormula::Reward { coalition, reward, index, mode, formula: self.reward_formula()? }
        };
        self.p.expect(&Tok::RBrack).map_err(syntax)?;
        Ok(f)
    }

    fn reward_name(&mut self) -> Result<Option<(String, Pos)>, LogicError> {
        if !self.p.eat(&Tok::LBrace) {
            return Ok(None);
        }
        let pos = self.p.pos();
        let name = match self.p.bump().tok {
            Tok::Str(s) | Tok::Ident(s) => s,
            other => return Err(LogicError::Syntax { pos, msg: format!("expected reward name, found {other}") }),
        };
        self.p.expect(&Tok::RBrace).map_err(syntax)?;
        Ok(Some((name, pos)))
    }

    fn resolve_reward(&self, name: Option<(String, Pos)>, pos: Pos) -> Result<(String, usize), LogicError> {
        match name {
            Some((name, at)) => match self.g.reward_index(&name) {
                Some(i) => Ok((name, i)),
                None => Err(LogicError::UnknownReward { pos: at, name }),
            },
            None if !self.g.rewards().is_empty() => Ok((self.g.rewards()[0].name.clone(), 0)),
            None => Err(LogicError::UnknownReward { pos, name: String::new() }),
        }
    }

    /// `max=?`, `min=?` (if allowed) or a comparison with a bound.
    fn mode(&mut self, probability: bool) -> Result<QueryMode, LogicError> {
        let pos = self.p.pos();
        if self.p.is_keyword("max") || self.p.is_keyword("min") {
            let dir = if self.p.eat_keyword("max") {
                Direction::Max
            } else {
                self.p.bump();
                Direction::Min
            };
            self.p.expect(&Tok::Eq).map_err(syntax)?;
            self.p.expect(&Tok::Question).map_err(syntax)?;
            return Ok(QueryMode::Value(dir));
        }
        let cmp = match self.p.peek() {
            Tok::Lt => Comparison::Lt,
            Tok::Le => Comparison::Le,
            Tok::Ge => Comparison::Ge,
            Tok::Gt => Comparison::Gt,
            other => {
                return Err(LogicError::Syntax { pos, msg: format!("expected `max=?` or a comparison, found {other}") })
            }
        };
        self.p.bump();
        let pos = self.p.pos();
        let raw = self.p.additive().map_err(syntax)?;
        let e = self.resolve(&raw);
        let bound = e
            .eval_const()
            .and_then(|v| v.as_rational())
            .map_err(|err| LogicError::BadThreshold { pos, msg: err.to_string() })?;
        if probability && (bound < num::int(0) || bound > num::int(1)) {
            return Err(LogicError::BadThreshold {
                pos,
                msg: format!("probability bound {} outside [0,1]", num::format_rational(&bound)),
            });
        }
        Ok(QueryMode::Threshold(cmp, bound))
    }

    fn objective(&mut self) -> Result<Objective, LogicError> {
        let pos = self.p.pos();
        let (word, _) = self.p.ident().map_err(syntax)?;
        match word.as_str() {
            "P" => {
                self.p.expect(&Tok::LBrack).map_err(syntax)?;
                let path = self.path()?;
                self.p.expect(&Tok::RBrack).map_err(syntax)?;
                Ok(Objective::Prob(path))
            }
            "R" => {
                let name = self.reward_name()?;
                let (reward, index) = self.resolve_reward(name, pos)?;
                self.p.expect(&Tok::LBrack).map_err(syntax)?;
                let formula = self.reward_formula()?;
                self.p.expect(&Tok::RBrack).map_err(syntax)?;
                Ok(Objective::Reward { reward, index, formula })
            }
            _ => Err(LogicError::Syntax { pos, msg: format!("expected P[..] or R[..], found `{word}`") }),
        }
    }

    fn step_bound(&mut self) -> Result<u64, LogicError> {
        let pos = self.p.pos();
        let raw = self.p.additive().map_err(syntax)?;
        let e = self.resolve(&raw);
        match e.eval_const().and_then(|v| v.as_int()) {
            Ok(k) if k >= 0 => Ok(k as u64),
            Ok(k) => Err(LogicError::BadThreshold { pos, msg: format!("negative step bound {k}") }),
            Err(err) => Err(LogicError::BadThreshold { pos, msg: err.to_string() }),
        }
    }

    fn optional_bound(&mut self) -> Result<Option<u64>, LogicError> {
        if self.p.eat(&Tok::Le) {
            Ok(Some(self.step_bound()?))
        } else {
            Ok(None)
        }
    }

    fn path(&mut self) -> Result<PathFormula, LogicError> {
        if self.p.eat_keyword("X") {
            return Ok(PathFormula::Next(Box::new(self.formula()?)));
        }
        if self.p.eat_keyword("F") {
            let bound = self.optional_bound()?;
            return Ok(StateFormula::eventually(self.formula()?, bound));
        }
        let left = self.formula()?;
        if !self.p.eat_keyword("U") {
            return Err(LogicError::Syntax { pos: self.p.pos(), msg: "expected `U`".into() });
        }
        let bound = self.optional_bound()?;
        let right = self.formula()?;
        Ok(PathFormula::Until { left: Box::new(left), right: Box::new(right), bound })
    }

    fn reward_formula(&mut self) -> Result<RewardFormula, LogicError> {
        let pos = self.p.pos();
        if self.p.eat_keyword("I") {
            self.p.expect(&Tok::Eq).map_err(syntax)?;
            return Ok(RewardFormula::Instant(self.step_bound()?));
        }
        if self.p.eat_keyword("C") {
            self.p.expect(&Tok::Le).map_err(syntax)?;
            return Ok(RewardFormula::Cumulative(self.step_bound()?));
        }
        if self.p.eat_keyword("F") {
            return Ok(RewardFormula::Reach(Box::new(self.formula()?)));
        }
        Err(LogicError::Syntax { pos, msg: "expected I=k, C<=k or F".into() })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{CsgBuilder, Distribution, Move, Player};

    fn three_players() -> Csg {
        let mut b =
            CsgBuilder::new(vec![Player::new("p1", &["a"]), Player::new("p2", &["b"]), Player::new("p3", &["c"])]);
        let s = b.add_state("s");
        b.set_initial(s);
        b.add_transition(s, vec![Move::Act(0); 3], Distribution::dirac(s));
        b.add_label("sent1", s);
        b.declare_label("sent2");
        b.declare_label("sent3");
        let r = b.add_reward_structure("r1");
        b.add_state_reward(r, s, num::int(1));
        b.build().unwrap()
    }

    #[test]
    fn nash_with_grouped_coalition() {
        let g = three_players();
        let f = parse_property("<<p1:{p2,p3}>>max=? (P[F sent1] + P[F (sent2 & sent3)])", &g).unwrap();
        let StateFormula::Nash(q) = f else { panic!() };
        assert_eq!(q.coalition, vec![0]);
        assert_eq!(q.opponents, vec![1, 2]);
        assert_eq!(classify_horizon(&q), Horizon::BothInfinite);
    }

    #[test]
    fn partition_is_enforced() {
        let g = three_players();
        for bad in ["<<p1:p1>>max=? (P[F sent1] + P[F sent2])", "<<p1:p2>>max=? (P[F sent1] + P[F sent2])"] {
            assert!(matches!(parse_property(bad, &g), Err(LogicError::CoalitionNotPartition { .. })), "{bad}");
        }
        assert!(matches!(
            parse_property("<<p1:q>>max=? (P[F sent1] + P[F sent2])", &g),
            Err(LogicError::UnknownPlayer { .. })
        ));
    }

    #[test]
    fn horizons_and_errors() {
        let g = three_players();
        let q = |t: &str| match parse_property(t, &g).unwrap() {
            StateFormula::Nash(q) => classify_horizon(&q),
            _ => panic!(),
        };
        assert_eq!(q("<<p1:p2,p3>>max=? (P[X sent1] + P[sent2 U sent3])"), Horizon::Mixed { finite: 0 });
        assert_eq!(q("<<p1:p2,p3>>>=1 (P[F<=3 sent1] + P[F<=2 sent2])"), Horizon::BothFinite);
        assert_eq!(q("<<1:2,3>>max=? (R{\"r1\"}[F sent1] + R{\"r1\"}[C<=4])"), Horizon::Mixed { finite: 1 });
        assert!(matches!(
            parse_property("<<p1:p2,p3>>max=? (P[F sent1] + R{\"r1\"}[C<=4])", &g),
            Err(LogicError::Syntax { .. })
        ));
        assert!(matches!(
            parse_property("<<p1:p2,p3>>max=? (R{\"zz\"}[C<=4] + R{\"r1\"}[C<=4])", &g),
            Err(LogicError::UnknownReward { .. })
        ));
        assert!(matches!(parse_property("<<p1>>P>=1.5 [F sent1]", &g), Err(LogicError::BadThreshold { .. })));
        assert!(matches!(parse_property("<<p1>>Pmax=? [F nope]", &g), Err(LogicError::UnknownLabel { .. })));
    }

    #[test]
    fn printing_round_trips() {
        let g = three_players();
        for text in [
            "<<p1:{p2,p3}>> max=? (P[F \"sent1\"] + P[!\"sent2\" U<=4 \"sent3\"])",
            "<<p1,p2>>Pmax=? [X \"sent1\" | \"sent2\" & !\"sent3\"]",
            "<<p2:{p1,p3}>> >=3/2 (R{\"r1\"}[I=2] + R{\"r1\"}[F true])",
        ] {
            let f = parse_property(text, &g).unwrap();
            let printed = f.display(&g).to_string();
            assert_eq!(parse_property(&printed, &g).unwrap(), f, "{printed}");
        }
    }
}
