//! The guarded-command modelling language: players own modules, modules own
//! bounded variables, commands fire on joint actions.

pub mod ast;
mod build;
pub mod lexer;
pub(crate) mod parser;

use std::collections::{BTreeMap, HashMap, HashSet};

use thiserror::Error;

pub use ast::ModelAst;
pub use build::build_csg;
pub use lexer::Pos;

use crate::expr::Expr;
use crate::model::{Csg, ModelError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LangError {
    #[error("{pos}: syntax error: {msg}")]
    Syntax { pos: Pos, msg: String },
    #[error("{pos}: undeclared symbol `{name}`")]
    UndeclaredSymbol { pos: Pos, name: String },
    #[error("{pos}: type error: {msg}")]
    Type { pos: Pos, msg: String },
    #[error("{pos}: {msg}")]
    AlphabetViolation { pos: Pos, msg: String },
    #[error("constant `{0}` has no value; supply it with --const")]
    UndefinedConstant(String),
    #[error("no constant named `{0}`")]
    UnknownConstant(String),
    #[error("{pos}: state ({state}): {msg}")]
    UpdateClash { pos: Pos, state: String, msg: String },
    #[error("{pos}: state ({state}): update probabilities sum to {sum}")]
    ProbabilitySum { pos: Pos, state: String, sum: String },
    #[error("{pos}: state ({state}): variable `{var}` leaves its range")]
    RangeOverflow { pos: Pos, state: String, var: String },
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Which player owns each action, and each player's ordered alphabet.
#[derive(Clone, Debug)]
pub(crate) struct Alphabets {
    pub(crate) actions: Vec<Vec<String>>,
    pub(crate) owner: HashMap<String, (usize, usize)>,
    pub(crate) module_owner: Vec<usize>,
}

/// Player alphabets are the actions listed in each player block plus the
/// labels of single-action commands in its modules. They must be disjoint.
pub(crate) fn alphabets(ast: &ModelAst) -> Result<Alphabets, LangError> {
    if ast.players.is_empty() {
        let pos = ast.modules[0].pos;
        return Err(LangError::AlphabetViolation { pos, msg: "model declares no players".into() });
    }
    let mut seen = HashSet::new();
    for p in &ast.players {
        if !seen.insert(&p.name) {
            return Err(LangError::Syntax { pos: p.pos, msg: format!("player `{}` declared twice", p.name) });
        }
        for m in &p.modules {
            if ast.module(m).is_none() {
                return Err(LangError::UndeclaredSymbol { pos: p.pos, name: m.clone() });
            }
        }
    }
    let mut module_owner = Vec::new();
    for m in &ast.modules {
        let owners: Vec<usize> = (0..ast.players.len()).filter(|&i| ast.players[i].modules.contains(&m.name)).collect();
        match owners.as_slice() {
            [o] => module_owner.push(*o),
            [] => {
                return Err(LangError::AlphabetViolation {
                    pos: m.pos,
                    msg: format!("module `{}` belongs to no player", m.name),
                })
            }
            _ => {
                return Err(LangError::AlphabetViolation {
                    pos: m.pos,
                    msg: format!("module `{}` belongs to several players", m.name),
                })
            }
        }
    }
    let mut actions: Vec<Vec<String>> = vec![Vec::new(); ast.players.len()];
    let mut owner: HashMap<String, (usize, usize)> = HashMap::new();
    let mut claim = |action: &str, player: usize, pos: Pos| -> Result<(), LangError> {
        match owner.get(action) {
            Some((p, _)) if *p == player => Ok(()),
            Some((p, _)) => Err(LangError::AlphabetViolation {
                pos,
                msg: format!(
                    "action `{action}` used by players `{}` and `{}`",
                    ast.players[*p].name, ast.players[player].name
                ),
            }),
            None => {
                owner.insert(action.to_string(), (player, actions[player].len()));
                actions[player].push(action.to_string());
                Ok(())
            }
        }
    };
    for (i, p) in ast.players.iter().enumerate() {
        for a in &p.actions {
            claim(a, i, p.pos)?;
        }
    }
    for (m, module) in ast.modules.iter().enumerate() {
        for c in &module.commands {
            if c.actions.len() == 1 {
                claim(&c.actions[0], module_owner[m], c.pos)?;
            }
        }
    }
    let alpha = Alphabets { actions, owner, module_owner };
    for (m, module) in ast.modules.iter().enumerate() {
        for c in module.commands.iter().filter(|c| c.actions.len() > 1) {
            alpha.joint_requirements(&c.actions, Some(alpha.module_owner[m]), c.pos, ast)?;
        }
    }
    for r in &ast.rewards {
        for item in &r.items {
            if let Some(list) = &item.actions {
                alpha.joint_requirements(list, None, item.pos, ast)?;
            }
        }
    }
    Ok(alpha)
}

impl Alphabets {
    /// `(player, action index)` per entry of an action list. Entries must
    /// belong to distinct players, exactly one of them `owner` if given.
    pub(crate) fn joint_requirements(
        &self,
        list: &[String],
        owner: Option<usize>,
        pos: Pos,
        ast: &ModelAst,
    ) -> Result<Vec<(usize, usize)>, LangError> {
        let mut reqs = Vec::new();
        for a in list {
            let &(p, idx) = self.owner.get(a).ok_or_else(|| LangError::AlphabetViolation {
                pos,
                msg: format!("action `{a}` is in no player's alphabet"),
            })?;
            if reqs.iter().any(|(q, _)| *q == p) {
                return Err(LangError::AlphabetViolation {
                    pos,
                    msg: format!("action list names two actions of player `{}`", ast.players[p].name),
                });
            }
            reqs.push((p, idx));
        }
        if let Some(o) = owner {
            if !reqs.iter().any(|(p, _)| *p == o) {
                return Err(LangError::AlphabetViolation {
                    pos,
                    msg: format!("action list has no action of the owning player `{}`", ast.players[o].name),
                });
            }
        }
        Ok(reqs)
    }
}

/// Parses and statically checks a model: player/module ownership,
/// alphabets, declared identifiers and assignment targets.
pub fn parse_model(text: &str) -> Result<ModelAst, LangError> {
    let ast = parser::parse_source(text)?;
    alphabets(&ast)?;
    let mut declared: HashSet<&str> = HashSet::new();
    for c in &ast.constants {
        if !declared.insert(&c.name) {
            return Err(LangError::Syntax { pos: c.pos, msg: format!("`{}` declared twice", c.name) });
        }
    }
    let mut var_module: BTreeMap<&str, usize> = BTreeMap::new();
    for (m, module) in ast.modules.iter().enumerate() {
        for v in &module.vars {
            if !declared.insert(&v.name) {
                return Err(LangError::Syntax { pos: v.pos, msg: format!("`{}` declared twice", v.name) });
            }
            var_module.insert(&v.name, m);
        }
    }
    let check = |e: &Expr, pos: Pos| -> Result<(), LangError> {
        let probe = e.resolve(&|n| declared.contains(n).then(|| Expr::int(0)));
        match probe.unresolved() {
            Some(name) => Err(LangError::UndeclaredSymbol { pos, name: name.to_string() }),
            None => Ok(()),
        }
    };
    for c in &ast.constants {
        if let Some(v) = &c.value {
            check(v, c.pos)?;
        }
    }
    for (m, module) in ast.modules.iter().enumerate() {
        for v in &module.vars {
            if let ast::VarKind::Int { low, high } = &v.kind {
                check(low, v.pos)?;
                check(high, v.pos)?;
            }
            if let Some(i) = &v.init {
                check(i, v.pos)?;
            }
        }
        for c in &module.commands {
            check(&c.guard, c.pos)?;
            for u in &c.updates {
                if let Some(p) = &u.prob {
                    check(p, c.pos)?;
                }
                for (target, e) in &u.assigns {
                    match var_module.get(target.as_str()) {
                        None => return Err(LangError::UndeclaredSymbol { pos: c.pos, name: target.clone() }),
                        Some(&owner) if owner != m => {
                            return Err(LangError::Type {
                                pos: c.pos,
                                msg: format!("module `{}` cannot assign `{target}`", module.name),
                            })
                        }
                        _ => {}
                    }
                    check(e, c.pos)?;
                }
            }
        }
    }
    for l in &ast.labels {
        check(&l.expr, l.pos)?;
    }
    for r in &ast.rewards {
        for item in &r.items {
            check(&item.guard, item.pos)?;
            check(&item.value, item.pos)?;
        }
    }
    Ok(ast)
}

/// Parses, checks and builds a model with constant overrides `name=value`.
pub fn load(text: &str, overrides: &[(String, String)]) -> Result<Csg, LangError> {
    let ast = parse_model(text)?;
    build_csg(&ast, overrides)
}
