//! Expressions over integer/boolean variables and constants, shared by the
//! modelling language and state predicates in properties.

use std::fmt;

use num_traits::{ToPrimitive, Zero};
use thiserror::Error;

use crate::num::{self, Rational};

#[derive(Clone, Debug, PartialEq)]
pub enum Value {
    Bool(bool),
    Int(i64),
    Num(Rational),
}

impl Value {
    pub fn as_bool(&self) -> Result<bool, EvalError> {
        match self {
            Value::Bool(b) => Ok(*b),
            other => Err(EvalError::Type(format!("expected boolean, found {other}"))),
        }
    }

    pub fn as_rational(&self) -> Result<Rational, EvalError> {
        match self {
            Value::Int(i) => Ok(num::int(*i)),
            Value::Num(r) => Ok(r.clone()),
            Value::Bool(_) => Err(EvalError::Type("expected number, found boolean".into())),
        }
    }

    pub fn as_int(&self) -> Result<i64, EvalError> {
        match self {
            Value::Int(i) => Ok(*i),
            Value::Num(r) if r.is_integer() => {
                r.to_integer().to_i64().ok_or_else(|| EvalError::Type("integer out of range".into()))
            }
            other => Err(EvalError::Type(format!("expected integer, found {other}"))),
        }
    }

    /// Storage form for a state variable (booleans as 0/1).
    pub fn as_slot(&self) -> Result<i64, EvalError> {
        match self {
            Value::Bool(b) => Ok(*b as i64),
            other => other.as_int(),
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Bool(b) => write!(f, "{b}"),
            Value::Int(i) => write!(f, "{i}"),
            Value::Num(r) => write!(f, "{}", num::format_rational(r)),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EvalError {
    #[error("type error: {0}")]
    Type(String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("unresolved identifier `{0}`")]
    Unresolved(String),
    #[error("integer overflow")]
    Overflow,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum UnOp {
    Not,
    Neg,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Eq,
    Neq,
    Lt,
    Le,
    Gt,
    Ge,
    And,
    Or,
    Implies,
}

impl BinOp {
    pub fn symbol(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Div => "/",
            BinOp::Eq => "=",
            BinOp::Neq => "!=",
            BinOp::Lt => "<",
            BinOp::Le => "<=",
            BinOp::Gt => ">",
            BinOp::Ge => ">=",
            BinOp::And => "&",
            BinOp::Or => "|",
            BinOp::Implies => "=>",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Func {
    Min,
    Max,
    Floor,
    Ceil,
    Pow,
    Mod,
}

impl Func {
    pub fn from_name(name: &str) -> Option<Func> {
        Some(match name {
            "min" => Func::Min,
            "max" => Func::Max,
            "floor" => Func::Floor,
            "ceil" => Func::Ceil,
            "pow" => Func::Pow,
            "mod" => Func::Mod,
            _ => return None,
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            Func::Min => "min",
            Func::Max => "max",
            Func::Floor => "floor",
            Func::Ceil => "ceil",
            Func::Pow => "pow",
            Func::Mod => "mod",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Lit(Value),
    /// Index into the state valuation; the flag marks booleans.
    Var(usize, bool),
    /// Identifier not yet resolved to a variable or constant.
    Name(String),
    Unary(UnOp, Box<Expr>),
    Binary(BinOp, Box<Expr>, Box<Expr>),
    Ite(Box<Expr>, Box<Expr>, Box<Expr>),
    Call(Func, Vec<Expr>),
}

impl Expr {
    pub fn int(i: i64) -> Expr {
        Expr::Lit(Value::Int(i))
    }

    pub fn boolean(b: bool) -> Expr {
        Expr::Lit(Value::Bool(b))
    }

    /// Replaces every `Name` for which `lookup` returns a replacement.
    pub fn resolve(&self, lookup: &dyn Fn(&str) -> Option<Expr>) -> Expr {
        match self {
            Expr::Name(n) => lookup(n).unwrap_or_else(|| self.clone()),
            Expr::Lit(_) | Expr::Var(..) => self.clone(),
            Expr::Unary(op, e) => Expr::Unary(*op, Box::new(e.resolve(lookup))),
            Expr::Binary(op, a, b) => Expr::Binary(*op, Box::new(a.resolve(lookup)), Box::new(b.resolve(lookup))),
            Expr::Ite(c, a, b) => {
                Expr::Ite(Box::new(c.resolve(lookup)), Box::new(a.resolve(lookup)), Box::new(b.resolve(lookup)))
            }
            Expr::Call(f, args) => Expr::Call(*f, args.iter().map(|a| a.resolve(lookup)).collect()),
        }
    }

    /// First unresolved name, if any.
    pub fn unresolved(&self) -> Option<&str> {
        match self {
            Expr::Name(n) => Some(n),
            Expr::Lit(_) | Expr::Var(..) => None,
            Expr::Unary(_, e) => e.unresolved(),
            Expr::Binary(_, a, b) => a.unresolved().or_else(|| b.unresolved()),
            Expr::Ite(c, a, b) => c.unresolved().or_else(|| a.unresolved()).or_else(|| b.unresolved()),
            Expr::Call(_, args) => args.iter().find_map(|a| a.unresolved()),
        }
    }

    pub fn eval(&self, vals: &[i64]) -> Result<Value, EvalError> {
        match self {
            Expr::Lit(v) => Ok(v.clone()),
            Expr::Var(i, boolean) => {
                let v = vals[*i];
                Ok(if *boolean { Value::Bool(v != 0) } else { Value::Int(v) })
            }
            Expr::Name(n) => Err(EvalError::Unresolved(n.clone())),
            Expr::Unary(UnOp::Not, e) => Ok(Value::Bool(!e.eval(vals)?.as_bool()?)),
            Expr::Unary(UnOp::Neg, e) => match e.eval(vals)? {
                Value::Int(i) => i.checked_neg().map(Value::Int).ok_or(EvalError::Overflow),
                Value::Num(r) => Ok(Value::Num(-r)),
                Value::Bool(_) => Err(EvalError::Type("cannot negate a boolean".into())),
            },
            Expr::Binary(op, a, b) => {
                // short-circuit boolean connectives
                match op {
                    BinOp::And => {
                        return Ok(Value::Bool(a.eval(vals)?.as_bool()? && b.eval(vals)?.as_bool()?));
                    }
                    BinOp::Or => {
                        return Ok(Value::Bool(a.eval(vals)?.as_bool()? || b.eval(vals)?.as_bool()?));
                    }
                    BinOp::Implies => {
                        return Ok(Value::Bool(!a.eval(vals)?.as_bool()? || b.eval(vals)?.as_bool()?));
                    }
                    _ => {}
                }
                binary(*op, a.eval(vals)?, b.eval(vals)?)
            }
            Expr::Ite(c, a, b) => {
                if c.eval(vals)?.as_bool()? {
                    a.eval(vals)
                } else {
                    b.eval(vals)
                }
            }
            Expr::Call(f, args) => {
                let vs: Vec<Value> = args.iter().map(|a| a.eval(vals)).collect::<Result<_, _>>()?;
                call(*f, vs)
            }
        }
    }

    pub fn eval_bool(&self, vals: &[i64]) -> Result<bool, EvalError> {
        self.eval(vals)?.as_bool()
    }

    /// Evaluates an expression that must not mention state variables.
    pub fn eval_const(&self) -> Result<Value, EvalError> {
        self.eval(&[])
    }
}

fn binary(op: BinOp, a: Value, b: Value) -> Result<Value, EvalError> {
    use BinOp::*;
    if let (Value::Int(x), Value::Int(y)) = (&a, &b) {
        let (x, y) = (*x, *y);
        return Ok(match op {
            Add => Value::Int(x.checked_add(y).ok_or(EvalError::Overflow)?),
            Sub => Value::Int(x.checked_sub(y).ok_or(EvalError::Overflow)?),
            Mul => Value::Int(x.checked_mul(y).ok_or(EvalError::Overflow)?),
            Div => {
                if y == 0 {
                    return Err(EvalError::DivisionByZero);
                }
                Value::Num(num::rat(x, y))
            }
            Eq => Value::Bool(x == y),
            Neq => Value::Bool(x != y),
            Lt => Value::Bool(x < y),
            Le => Value::Bool(x <= y),
            Gt => Value::Bool(x > y),
            Ge => Value::Bool(x >= y),
            And | Or | Implies => unreachable!("handled by caller"),
        });
    }
    if let (Value::Bool(x), Value::Bool(y)) = (&a, &b) {
        return match op {
            Eq => Ok(Value::Bool(x == y)),
            Neq => Ok(Value::Bool(x != y)),
            _ => Err(EvalError::Type(format!("operator {} on booleans", op.symbol()))),
        };
    }
    let x = a.as_rational()?;
    let y = b.as_rational()?;
    Ok(match op {
        Add => Value::Num(x + y),
        Sub => Value::Num(x - y),
        Mul => Value::Num(x * y),
        Div => {
            if y.is_zero() {
                return Err(EvalError::DivisionByZero);
            }
            Value::Num(x / y)
        }
        Eq => Value::Bool(x == y),
        Neq => Value::Bool(x != y),
        Lt => Value::Bool(x < y),
        Le => Value::Bool(x <= y),
        Gt => Value::Bool(x > y),
        Ge => Value::Bool(x >= y),
        And | Or | Implies => unreachable!("handled by caller"),
    })
}

fn call(f: Func, args: Vec<Value>) -> Result<Value, EvalError> {
    let arity = |n: usize| {
        if args.len() == n {
            Ok(())
        } else {
            Err(EvalError::Type(format!("{} expects {} argument(s)", f.name(), n)))
        }
    };
    match f {
        Func::Min | Func::Max => {
            if args.is_empty() {
                return Err(EvalError::Type(format!("{} needs arguments", f.name())));
            }
            let mut best = args[0].clone();
            for v in &args[1..] {
                let take = if f == Func::Min {
                    v.as_rational()? < best.as_rational()?
                } else {
                    v.as_rational()? > best.as_rational()?
                };
                if take {
                    best = v.clone();
                }
            }
            best.as_rational()?;
            Ok(best)
        }
        Func::Floor | Func::Ceil => {
            arity(1)?;
            let r = args[0].as_rational()?;
            let v = if f == Func::Floor { r.floor() } else { r.ceil() };
            Ok(Value::Int(v.to_integer().to_i64().ok_or(EvalError::Overflow)?))
        }
        Func::Mod => {
            arity(2)?;
            let (a, b) = (args[0].as_int()?, args[1].as_int()?);
            if b == 0 {
                return Err(EvalError::DivisionByZero);
            }
            Ok(Value::Int(a.rem_euclid(b)))
        }
        Func::Pow => {
            arity(2)?;
            if let Ok(e) = args[1].as_int() {
                match &args[0] {
                    Value::Int(b) if e >= 0 => {
                        let e = u32::try_from(e).map_err(|_| EvalError::Overflow)?;
                        return b.checked_pow(e).map(Value::Int).ok_or(EvalError::Overflow);
                    }
                    base => {
                        let b = base.as_rational()?;
                        if b.is_zero() && e < 0 {
                            return Err(EvalError::DivisionByZero);
                        }
                        let p = num_traits::pow(b, e.unsigned_abs() as usize);
                        return Ok(Value::Num(if e < 0 { p.recip() } else { p }));
                    }
                }
            }
            // irrational in general: floating fallback
            let b = num::to_f64(&args[0].as_rational()?);
            let e = num::to_f64(&args[1].as_rational()?);
            let r = num::from_f64(b.powf(e)).ok_or_else(|| EvalError::Type("pow result is not finite".into()))?;
            Ok(Value::Num(r))
        }
    }
}

fn precedence(e: &Expr) -> u8 {
    match e {
        Expr::Ite(..) => 0,
        Expr::Binary(op, ..) => match op {
            BinOp::Implies => 1,
            BinOp::Or => 2,
            BinOp::And => 3,
            BinOp::Eq | BinOp::Neq | BinOp::Lt | BinOp::Le | BinOp::Gt | BinOp::Ge => 5,
            BinOp::Add | BinOp::Sub => 6,
            BinOp::Mul | BinOp::Div => 7,
        },
        Expr::Unary(UnOp::Not, _) => 4,
        Expr::Unary(UnOp::Neg, _) => 8,
        _ => 9,
    }
}

/// Printing needs variable names; `Var` prints through this table.
pub struct ExprDisplay<'a> {
    pub expr: &'a Expr,
    pub names: &'a [String],
}

impl fmt::Display for ExprDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_expr(f, self.expr, self.names)
    }
}

fn write_expr(f: &mut fmt::Formatter<'_>, e: &Expr, names: &[String]) -> fmt::Result {
    let child = |f: &mut fmt::Formatter<'_>, c: &Expr, min: u8| -> fmt::Result {
        if precedence(c) < min {
            write!(f, "(")?;
            write_expr(f, c, names)?;
            write!(f, ")")
        } else {
            write_expr(f, c, names)
        }
    };
    match e {
        Expr::Lit(Value::Num(r)) if !r.is_integer() => write!(f, "({}/{})", r.numer(), r.denom()),
        Expr::Lit(Value::Num(r)) => write!(f, "{}", r.numer()),
        Expr::Lit(v) => write!(f, "{v}"),
        Expr::Var(i, _) => match names.get(*i) {
            Some(n) => write!(f, "{n}"),
            None => write!(f, "#{i}"),
        },
        Expr::Name(n) => write!(f, "{n}"),
        Expr::Unary(UnOp::Not, a) => {
            write!(f, "!")?;
            child(f, a, 9)
        }
        Expr::Unary(UnOp::Neg, a) => {
            write!(f, "-")?;
            child(f, a, 9)
        }
        Expr::Binary(op, a, b) => {
            let p = precedence(e);
            // left-associative: the right operand needs strictly higher precedence
            child(f, a, p + u8::from(*op == BinOp::Implies))?;
            write!(f, " {} ", op.symbol())?;
            child(f, b, p + u8::from(*op != BinOp::Implies))
        }
        Expr::Ite(c, a, b) => {
            child(f, c, 1)?;
            write!(f, " ? ")?;
            child(f, a, 1)?;
            write!(f, " : ")?;
            child(f, b, 0)
        }
        Expr::Call(func, args) => {
            write!(f, "{}(", func.name())?;
            for (k, a) in args.iter().enumerate() {
                if k > 0 {
                    write!(f, ", ")?;
                }
                write_expr(f, a, names)?;
            }
            write!(f, ")")
        }
    }
}
