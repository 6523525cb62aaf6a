use super::ast::*;
use super::lexer::{tokenize, Pos, Tok, Token};
use super::LangError;
use crate::expr::{BinOp, Expr, Func, UnOp, Value};
use crate::num;

/// Token cursor with the expression grammar; the model and property
/// parsers build on it.
pub(crate) struct Parser {
    toks: Vec<Token>,
    pub(crate) i: usize,
}

impl Parser {
    pub(crate) fn new(text: &str) -> Result<Self, LangError> {
        let toks = tokenize(text).map_err(|(pos, msg)| LangError::Syntax { pos, msg })?;
        Ok(Parser { toks, i: 0 })
    }

    pub(crate) fn peek(&self) -> &Tok {
        &self.toks[self.i].tok
    }

    pub(crate) fn peek_at(&self, k: usize) -> &Tok {
        let j = (self.i + k).min(self.toks.len() - 1);
        &self.toks[j].tok
    }

    pub(crate) fn pos(&self) -> Pos {
        self.toks[self.i].pos
    }

    pub(crate) fn bump(&mut self) -> Token {
        let t = self.toks[self.i].clone();
        if self.i + 1 < self.toks.len() {
            self.i += 1;
        }
        t
    }

    pub(crate) fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek() == tok {
            self.bump();
            true
        } else {
            false
        }
    }

    pub(crate) fn error<T>(&self, msg: impl Into<String>) -> Result<T, LangError> {
        Err(LangError::Syntax { pos: self.pos(), msg: msg.into() })
    }

    pub(crate) fn expect(&mut self, tok: &Tok) -> Result<Pos, LangError> {
        if self.peek() == tok {
            Ok(self.bump().pos)
        } else {
            self.error(format!("expected {}, found {}", tok, self.peek()))
        }
    }

    pub(crate) fn is_keyword(&self, word: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == word)
    }

    pub(crate) fn eat_keyword(&mut self, word: &str) -> bool {
        if self.is_keyword(word) {
            self.bump();
            true
        } else {
            false
        }
    }

    pub(crate) fn expect_keyword(&mut self, word: &str) -> Result<Pos, LangError> {
        if self.is_keyword(word) {
            Ok(self.bump().pos)
        } else {
            self.error(format!("expected `{word}`, found {}", self.peek()))
        }
    }

    pub(crate) fn ident(&mut self) -> Result<(String, Pos), LangError> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                let pos = self.bump().pos;
                Ok((s, pos))
            }
            other => self.error(format!("expected identifier, found {other}")),
        }
    }

    pub(crate) fn at_eof(&self) -> bool {
        *self.peek() == Tok::Eof
    }

    pub(crate) fn expr(&mut self) -> Result<Expr, LangError> {
        let cond = self.implies()?;
        if self.eat(&Tok::Question) {
            let a = self.expr()?;
            self.expect(&Tok::Colon)?;
            let b = self.expr()?;
            return Ok(Expr::Ite(Box::new(cond), Box::new(a), Box::new(b)));
        }
        Ok(cond)
    }

    fn implies(&mut self) -> Result<Expr, LangError> {
        let lhs = self.or()?;
        if self.eat(&Tok::Implies) {
            let rhs = self.implies()?;
            return Ok(Expr::Binary(BinOp::Implies, Box::new(lhs), Box::new(rhs)));
        }
        Ok(lhs)
    }

    fn or(&mut self) -> Result<Expr, LangError> {
        let mut lhs = self.and()?;
        while self.eat(&Tok::Or) {
            let rhs = self.and()?;
            lhs = Expr::Binary(BinOp::Or, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn and(&mut self) -> Result<Expr, LangError> {
        let mut lhs = self.not()?;
        while self.eat(&Tok::And) {
            let rhs = self.not()?;
            lhs = Expr::Binary(BinOp::And, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn not(&mut self) -> Result<Expr, LangError> {
        if self.eat(&Tok::Not) {
            return Ok(Expr::Unary(UnOp::Not, Box::new(self.not()?)));
        }
        self.relational()
    }

    pub(crate) fn relational(&mut self) -> Result<Expr, LangError> {
        let lhs = self.additive()?;
        let op = match self.peek() {
            Tok::Eq => BinOp::Eq,
            Tok::Neq => BinOp::Neq,
            Tok::Lt => BinOp::Lt,
            Tok::Le => BinOp::Le,
            Tok::Gt => BinOp::Gt,
            Tok::Ge => BinOp::Ge,
            _ => return Ok(lhs),
        };
        self.bump();
        let rhs = self.additive()?;
        Ok(Expr::Binary(op, Box::new(lhs), Box::new(rhs)))
    }

    pub(crate) fn additive(&mut self) -> Result<Expr, LangError> {
        let mut lhs = self.multiplicative()?;
        loop {
            let op = match self.peek() {
                Tok::Plus => BinOp::Add,
                Tok::Minus => BinOp::Sub,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.multiplicative()?;
            lhs = Expr::Binary(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn multiplicative(&mut self) -> Result<Expr, LangError> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.peek() {
                Tok::Star => BinOp::Mul,
                Tok::Slash => BinOp::Div,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.unary()?;
            lhs = Expr::Binary(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn unary(&mut self) -> Result<Expr, LangError> {
        if self.eat(&Tok::Minus) {
            return Ok(match self.unary()? {
                Expr::Lit(Value::Int(i)) => Expr::Lit(Value::Int(-i)),
                e => Expr::Unary(UnOp::Neg, Box::new(e)),
            });
        }
        if self.eat(&Tok::Not) {
            return Ok(Expr::Unary(UnOp::Not, Box::new(self.unary()?)));
        }
        self.primary()
    }

    fn primary(&mut self) -> Result<Expr, LangError> {
        match self.peek().clone() {
            Tok::Int(i) => {
                self.bump();
                Ok(Expr::int(i))
            }
            Tok::Real(text) => {
                let pos = self.bump().pos;
                num::parse_rational(&text)
                    .map(|r| Expr::Lit(Value::Num(r)))
                    .ok_or(LangError::Syntax { pos, msg: format!("bad number `{text}`") })
            }
            Tok::LParen => {
                self.bump();
                let e = self.expr()?;
                self.expect(&Tok::RParen)?;
                Ok(e)
            }
            Tok::Ident(name) => {
                let pos = self.bump().pos;
                match name.as_str() {
                    "true" => return Ok(Expr::boolean(true)),
                    "false" => return Ok(Expr::boolean(false)),
                    _ => {}
                }
                if *self.peek() == Tok::LParen {
                    let func = Func::from_name(&name)
                        .ok_or(LangError::UndeclaredSymbol { pos, name: format!("{name}(...)") })?;
                    self.bump();
                    let mut args = vec![self.expr()?];
                    while self.eat(&Tok::Comma) {
                        args.push(self.expr()?);
                    }
                    self.expect(&Tok::RParen)?;
                    return Ok(Expr::Call(func, args));
                }
                Ok(Expr::Name(name))
            }
            other => self.error(format!("expected expression, found {other}")),
        }
    }

    fn action_list(&mut self) -> Result<Vec<String>, LangError> {
        self.expect(&Tok::LBrack)?;
        let mut actions = Vec::new();
        if *self.peek() != Tok::RBrack {
            actions.push(self.ident()?.0);
            while self.eat(&Tok::Comma) {
                actions.push(self.ident()?.0);
            }
        }
        self.expect(&Tok::RBrack)?;
        Ok(actions)
    }
}

/// Parses model source text into an unchecked AST.
pub(crate) fn parse_source(text: &str) -> Result<ModelAst, LangError> {
    let mut p = Parser::new(text)?;
    let mut ast = ModelAst::default();
    if p.is_keyword("csg") || p.is_keyword("smg") {
        p.bump();
    }
    while !p.at_eof() {
        let (word, pos) = match p.peek().clone() {
            Tok::Ident(w) => (w, p.pos()),
            other => return p.error(format!("expected declaration, found {other}")),
        };
        match word.as_str() {
            "const" => ast.constants.push(constant(&mut p)?),
            "player" => ast.players.push(player(&mut p)?),
            "module" => ast.modules.push(module(&mut p)?),
            "label" => {
                p.bump();
                let name = match p.bump().tok {
                    Tok::Str(s) => s,
                    other => return Err(LangError::Syntax { pos, msg: format!("expected label name, found {other}") }),
                };
                p.expect(&Tok::Eq)?;
                let expr = p.expr()?;
                p.expect(&Tok::Semi)?;
                ast.labels.push(LabelDecl { name, expr, pos });
            }
            "rewards" => ast.rewards.push(rewards(&mut p)?),
            "global" | "formula" | "init" | "system" => {
                return p.error(format!("`{word}` declarations are not supported"));
            }
            _ => return p.error(format!("unexpected `{word}`")),
        }
    }
    if ast.modules.is_empty() {
        return Err(LangError::Syntax { pos: p.pos(), msg: "model declares no modules".into() });
    }
    Ok(ast)
}

fn constant(p: &mut Parser) -> Result<ConstDecl, LangError> {
    p.expect_keyword("const")?;
    let ty = if p.eat_keyword("int") {
        ConstType::Int
    } else if p.eat_keyword("double") || p.eat_keyword("rational") {
        ConstType::Double
    } else if p.eat_keyword("bool") {
        ConstType::Bool
    } else {
        ConstType::Int
    };
    let (name, pos) = p.ident()?;
    let value = if p.eat(&Tok::Eq) { Some(p.expr()?) } else { None };
    p.expect(&Tok::Semi)?;
    Ok(ConstDecl { name, ty, value, pos })
}

fn player(p: &mut Parser) -> Result<PlayerDecl, LangError> {
    p.expect_keyword("player")?;
    let (name, pos) = p.ident()?;
    let mut decl = PlayerDecl { name, modules: Vec::new(), actions: Vec::new(), pos };
    loop {
        if *p.peek() == Tok::LBrack {
            let list = p.action_list()?;
            if list.len() != 1 {
                return p.error("player blocks list single actions");
            }
            decl.actions.extend(list);
        } else {
            decl.modules.push(p.ident()?.0);
        }
        if !p.eat(&Tok::Comma) {
            break;
        }
    }
    p.expect_keyword("endplayer")?;
    Ok(decl)
}

fn module(p: &mut Parser) -> Result<ModuleDecl, LangError> {
    p.expect_keyword("module")?;
    let (name, pos) = p.ident()?;
    let mut decl = ModuleDecl { name, vars: Vec::new(), commands: Vec::new(), pos };
    loop {
        if p.eat_keyword("endmodule") {
            return Ok(decl);
        }
        match p.peek() {
            Tok::LBrack => decl.commands.push(command(p)?),
            Tok::Ident(_) => decl.vars.push(variable(p)?),
            other => return p.error(format!("expected variable or command, found {other}")),
        }
    }
}

fn variable(p: &mut Parser) -> Result<VarDecl, LangError> {
    let (name, pos) = p.ident()?;
    p.expect(&Tok::Colon)?;
    let kind = if p.eat_keyword("bool") {
        VarKind::Bool
    } else {
        p.expect(&Tok::LBrack)?;
        let low = p.additive()?;
        p.expect(&Tok::DotDot)?;
        let high = p.additive()?;
        p.expect(&Tok::RBrack)?;
        VarKind::Int { low, high }
    };
    let init = if p.eat_keyword("init") { Some(p.expr()?) } else { None };
    p.expect(&Tok::Semi)?;
    Ok(VarDecl { name, kind, init, pos })
}

fn command(p: &mut Parser) -> Result<Command, LangError> {
    let pos = p.pos();
    let actions = p.action_list()?;
    if actions.is_empty() {
        return Err(LangError::Syntax { pos, msg: "commands must be labelled with an action".into() });
    }
    let guard = p.expr()?;
    p.expect(&Tok::Arrow)?;
    let mut updates = vec![update(p)?];
    while p.eat(&Tok::Plus) {
        updates.push(update(p)?);
    }
    p.expect(&Tok::Semi)?;
    Ok(Command { actions, guard, updates, pos })
}

fn update(p: &mut Parser) -> Result<Update, LangError> {
    let starts_assignments = |p: &Parser| {
        (*p.peek() == Tok::LParen && matches!(p.peek_at(1), Tok::Ident(_)) && *p.peek_at(2) == Tok::Prime)
            || (p.is_keyword("true") && matches!(p.peek_at(1), Tok::Semi | Tok::Plus))
    };
    let prob = if starts_assignments(p) {
        None
    } else {
        let e = p.expr()?;
        p.expect(&Tok::Colon)?;
        Some(e)
    };
    let mut assigns = Vec::new();
    if !p.eat_keyword("true") {
        loop {
            p.expect(&Tok::LParen)?;
            let (var, _) = p.ident()?;
            p.expect(&Tok::Prime)?;
            p.expect(&Tok::Eq)?;
            let e = p.expr()?;
            p.expect(&Tok::RParen)?;
            assigns.push((var, e));
            if !p.eat(&Tok::And) {
                break;
            }
        }
    }
    Ok(Update { prob, assigns })
}

fn rewards(p: &mut Parser) -> Result<RewardDecl, LangError> {
    let pos = p.expect_keyword("rewards")?;
    let name = match p.peek().clone() {
        Tok::Str(s) => {
            p.bump();
            s
        }
        _ => String::new(),
    };
    let mut items = Vec::new();
    while !p.eat_keyword("endrewards") {
        let item_pos = p.pos();
        let actions = if *p.peek() == Tok::LBrack { Some(p.action_list()?) } else { None };
        if actions.as_ref().is_some_and(|a| a.is_empty()) {
            return Err(LangError::Syntax { pos: item_pos, msg: "reward items need an action".into() });
        }
        let guard = p.expr()?;
        p.expect(&Tok::Colon)?;
        let value = p.expr()?;
        p.expect(&Tok::Semi)?;
        items.push(RewardItem { actions, guard, value, pos: item_pos });
    }
    Ok(RewardDecl { name, items, pos })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_updates_with_and_without_probabilities() {
        let src = "player p m endplayer
module m
  x : [0..2] init 0;
  [a] x<2 -> (x'=x+1);
  [b] true -> 1/2:(x'=0) + 1/2:true;
  [c] x=2 -> true;
endmodule";
        let ast = parse_source(src).unwrap();
        let m = &ast.modules[0];
        assert_eq!(m.vars.len(), 1);
        assert_eq!(m.commands.len(), 3);
        assert!(m.commands[0].updates[0].prob.is_none());
        assert_eq!(m.commands[1].updates.len(), 2);
        assert!(m.commands[1].updates[1].assigns.is_empty());
        assert!(m.commands[2].updates[0].assigns.is_empty());
    }

    #[test]
    fn empty_model_is_rejected() {
        assert!(matches!(parse_source("const int N = 2;"), Err(LangError::Syntax { .. })));
        assert!(matches!(parse_source(""), Err(LangError::Syntax { .. })));
    }

    #[test]
    fn errors_carry_positions() {
        let err = parse_source("module m\n  x : [0..1] init 0;\n  [a] x=0 -> (x'=1)\nendmodule").unwrap_err();
        match err {
            LangError::Syntax { pos, .. } => assert_eq!(pos.line, 4),
            other => panic!("unexpected {other:?}"),
        }
    }
}
