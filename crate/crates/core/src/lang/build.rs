use std::collections::{BTreeMap, HashMap, VecDeque};

use num_traits::{One, Signed, Zero};

use super::ast::{ConstType, ModelAst, VarKind};
use super::lexer::Pos;
use super::{alphabets, LangError};
use crate::expr::{EvalError, Expr, Value};
use crate::model::{product, ConstValue, Csg, CsgBuilder, Distribution, Move, Player, VariableInfo};
use crate::num::{self, Rational};

struct CompiledCommand {
    requires: Vec<(usize, usize)>,
    /// Action index of the owning player for single-action commands.
    own: Option<usize>,
    guard: Expr,
    updates: Vec<(Option<Expr>, Vec<(usize, Expr)>)>,
    pos: Pos,
}

struct CompiledReward {
    requires: Option<Vec<(usize, usize)>>,
    guard: Expr,
    value: Expr,
    pos: Pos,
}

fn type_error(pos: Pos) -> impl Fn(EvalError) -> LangError {
    move |e| LangError::Type { pos, msg: e.to_string() }
}

fn constant_values(ast: &ModelAst, overrides: &[(String, String)]) -> Result<BTreeMap<String, Value>, LangError> {
    for (name, _) in overrides {
        if !ast.constants.iter().any(|c| &c.name == name) {
            return Err(LangError::UnknownConstant(name.clone()));
        }
    }
    let mut values: BTreeMap<String, Value> = BTreeMap::new();
    for c in &ast.constants {
        let given = overrides.iter().rev().find(|(n, _)| n == &c.name).map(|(_, v)| v.trim());
        let raw = match (given, &c.value) {
            (Some(text), _) => match c.ty {
                ConstType::Bool => match text {
                    "true" => Value::Bool(true),
                    "false" => Value::Bool(false),
                    _ => return Err(LangError::Type { pos: c.pos, msg: format!("`{text}` is not a boolean") }),
                },
                _ => num::parse_rational(text)
                    .map(Value::Num)
                    .ok_or_else(|| LangError::Type { pos: c.pos, msg: format!("`{text}` is not a number") })?,
            },
            (None, Some(e)) => {
                let e = e.resolve(&|n| values.get(n).map(|v| Expr::Lit(v.clone())));
                if let Some(n) = e.unresolved() {
                    return Err(LangError::UndeclaredSymbol { pos: c.pos, name: n.to_string() });
                }
                e.eval_const().map_err(type_error(c.pos))?
            }
            (None, None) => return Err(LangError::UndefinedConstant(c.name.clone())),
        };
        let value = match c.ty {
            ConstType::Int => Value::Int(raw.as_int().map_err(type_error(c.pos))?),
            ConstType::Double => Value::Num(raw.as_rational().map_err(type_error(c.pos))?),
            ConstType::Bool => Value::Bool(raw.as_bool().map_err(type_error(c.pos))?),
        };
        values.insert(c.name.clone(), value);
    }
    Ok(values)
}

fn state_name(vars: &[VariableInfo], vals: &[i64]) -> String {
    vars.iter()
        .zip(vals)
        .map(|(v, x)| if v.boolean { format!("{}={}", v.name, *x != 0) } else { format!("{}={x}", v.name) })
        .collect::<Vec<_>>()
        .join(",")
}

/// Explores the reachable state space breadth-first from the initial
/// valuation and returns the game.
pub fn build_csg(ast: &ModelAst, overrides: &[(String, String)]) -> Result<Csg, LangError> {
    let alpha = alphabets(ast)?;
    let consts = constant_values(ast, overrides)?;
    let lit = |n: &str| consts.get(n).map(|v| Expr::Lit(v.clone()));
    let fold = |e: &Expr, pos: Pos| -> Result<Value, LangError> {
        let e = e.resolve(&lit);
        if let Some(n) = e.unresolved() {
            return Err(LangError::UndeclaredSymbol { pos, name: n.to_string() });
        }
        e.eval_const().map_err(type_error(pos))
    };

    let mut variables = Vec::new();
    let mut init = Vec::new();
    for module in &ast.modules {
        for v in &module.vars {
            let (low, high, boolean) = match &v.kind {
                VarKind::Bool => (0, 1, true),
                VarKind::Int { low, high } => (
                    fold(low, v.pos)?.as_int().map_err(type_error(v.pos))?,
                    fold(high, v.pos)?.as_int().map_err(type_error(v.pos))?,
                    false,
                ),
            };
            if low > high {
                return Err(LangError::Type { pos: v.pos, msg: format!("empty range for `{}`", v.name) });
            }
            let start = match &v.init {
                Some(e) => {
                    let val = fold(e, v.pos)?;
                    if boolean {
                        val.as_bool().map_err(type_error(v.pos))? as i64
                    } else {
                        val.as_int().map_err(type_error(v.pos))?
                    }
                }
                None => low,
            };
            if start < low || start > high {
                return Err(LangError::RangeOverflow { pos: v.pos, state: "initial".into(), var: v.name.clone() });
            }
            variables.push(VariableInfo { name: v.name.clone(), low, high, boolean });
            init.push(start);
        }
    }
    let var_index: HashMap<&str, usize> = variables.iter().enumerate().map(|(i, v)| (v.name.as_str(), i)).collect();
    let resolve = |e: &Expr| -> Expr {
        e.resolve(&|n| lit(n).or_else(|| var_index.get(n).map(|&i| Expr::Var(i, variables[i].boolean))))
    };

    let mut modules: Vec<Vec<CompiledCommand>> = Vec::new();
    for (m, module) in ast.modules.iter().enumerate() {
        let owner = alpha.module_owner[m];
        let mut cmds = Vec::new();
        for c in &module.commands {
            let (requires, own) = if c.actions.len() == 1 {
                let (p, a) = alpha.owner[&c.actions[0]];
                (vec![(p, a)], Some(a))
            } else {
                (alpha.joint_requirements(&c.actions, Some(owner), c.pos, ast)?, None)
            };
            let updates = c
                .updates
                .iter()
                .map(|u| {
                    let assigns = u.assigns.iter().map(|(t, e)| (var_index[t.as_str()], resolve(e))).collect();
                    (u.prob.as_ref().map(&resolve), assigns)
                })
                .collect();
            cmds.push(CompiledCommand { requires, own, guard: resolve(&c.guard), updates, pos: c.pos });
        }
        modules.push(cmds);
    }
    let mut reward_items: Vec<Vec<CompiledReward>> = Vec::new();
    for r in &ast.rewards {
        let mut items = Vec::new();
        for item in &r.items {
            let requires = match &item.actions {
                Some(list) => Some(alpha.joint_requirements(list, None, item.pos, ast)?),
                None => None,
            };
            items.push(CompiledReward {
                requires,
                guard: resolve(&item.guard),
                value: resolve(&item.value),
                pos: item.pos,
            });
        }
        reward_items.push(items);
    }
    let labels: Vec<(String, Expr, Pos)> =
        ast.labels.iter().map(|l| (l.name.clone(), resolve(&l.expr), l.pos)).collect();

    let players: Vec<Player> = ast
        .players
        .iter()
        .zip(&alpha.actions)
        .map(|(p, acts)| Player { name: p.name.clone(), actions: acts.clone() })
        .collect();
    let nplayers = players.len();
    let mut builder = CsgBuilder::new(players);
    builder.declare_label("init");
    for (name, _, _) in &labels {
        builder.declare_label(name.clone());
    }
    let reward_ids: Vec<usize> = ast.rewards.iter().map(|r| builder.add_reward_structure(r.name.clone())).collect();

    let mut index: HashMap<Vec<i64>, usize> = HashMap::new();
    let mut queue = VecDeque::new();
    let first = builder.add_state_with_valuation(state_name(&variables, &init), init.clone());
    builder.set_initial(first);
    builder.add_label("init", first);
    index.insert(init.clone(), first);
    queue.push_back(init);
    let mut exact = true;
    let one = Rational::one();
    let slack = num::rat(1, 1_000_000_000);

    while let Some(vals) = queue.pop_front() {
        let s = index[&vals];
        let here = || state_name(&variables, &vals);
        let enabled: Vec<Vec<bool>> = modules
            .iter()
            .map(|cmds| cmds.iter().map(|c| c.guard.eval_bool(&vals).map_err(type_error(c.pos))).collect())
            .collect::<Result<_, _>>()?;
        let mut available: Vec<Vec<Move>> = vec![Vec::new(); nplayers];
        for (m, cmds) in modules.iter().enumerate() {
            let owner = alpha.module_owner[m];
            for (k, c) in cmds.iter().enumerate() {
                if let (true, Some(a)) = (enabled[m][k], c.own) {
                    available[owner].push(Move::Act(a));
                }
            }
        }
        for a in &mut available {
            a.sort();
            a.dedup();
            if a.is_empty() {
                a.push(Move::Idle);
            }
        }

        for (name, e, pos) in &labels {
            if e.eval_bool(&vals).map_err(type_error(*pos))? {
                builder.add_label(name.clone(), s);
            }
        }
        for (r, items) in reward_items.iter().enumerate() {
            let mut total = Rational::zero();
            for item in items.iter().filter(|i| i.requires.is_none()) {
                if item.guard.eval_bool(&vals).map_err(type_error(item.pos))? {
                    total += item.value.eval(&vals).and_then(|v| v.as_rational()).map_err(type_error(item.pos))?;
                }
            }
            if !total.is_zero() {
                builder.add_state_reward(reward_ids[r], s, total);
            }
        }

        let joint_moves = product(&available);
        for moves in &joint_moves {
            let chosen = |reqs: &[(usize, usize)]| reqs.iter().all(|&(p, a)| moves[p] == Move::Act(a));
            let mut outcomes: Vec<(Rational, Vec<i64>)> = vec![(one.clone(), vals.clone())];
            for (m, cmds) in modules.iter().enumerate() {
                let firing: Vec<&CompiledCommand> = cmds
                    .iter()
                    .enumerate()
                    .filter(|(k, c)| enabled[m][*k] && chosen(&c.requires))
                    .map(|(_, c)| c)
                    .collect();
                let cmd = match firing.as_slice() {
                    [] => continue,
                    [c] => *c,
                    [a, b, ..] => {
                        return Err(LangError::UpdateClash {
                            pos: b.pos,
                            state: here(),
                            msg: format!(
                                "module `{}` has commands at {} and {} both firing on joint action {}",
                                ast.modules[m].name,
                                a.pos,
                                b.pos,
                                format_moves(ast, &alpha.actions, moves)
                            ),
                        })
                    }
                };
                let mut local: Vec<(Rational, Vec<(usize, i64)>)> = Vec::new();
                let mut sum = Rational::zero();
                for (prob, assigns) in &cmd.updates {
                    let p = match prob {
                        None => one.clone(),
                        Some(e) => e.eval(&vals).and_then(|v| v.as_rational()).map_err(type_error(cmd.pos))?,
                    };
                    if p.is_negative() {
                        return Err(LangError::ProbabilitySum {
                            pos: cmd.pos,
                            state: here(),
                            sum: format!("a negative term {}", num::format_rational(&p)),
                        });
                    }
                    sum += &p;
                    let mut writes = Vec::with_capacity(assigns.len());
                    for (v, e) in assigns {
                        let value = e.eval(&vals).and_then(|x| x.as_slot()).map_err(type_error(cmd.pos))?;
                        let info = &variables[*v];
                        if value < info.low || value > info.high {
                            return Err(LangError::RangeOverflow {
                                pos: cmd.pos,
                                state: here(),
                                var: info.name.clone(),
                            });
                        }
                        writes.push((*v, value));
                    }
                    if !p.is_zero() {
                        local.push((p, writes));
                    }
                }
                if sum != one {
                    if (sum.clone() - &one).abs() <= slack {
                        exact = false;
                    } else {
                        return Err(LangError::ProbabilitySum {
                            pos: cmd.pos,
                            state: here(),
                            sum: num::format_rational(&sum),
                        });
                    }
                }
                let mut next = Vec::with_capacity(outcomes.len() * local.len());
                for (p, state) in &outcomes {
                    for (q, writes) in &local {
                        let mut t = state.clone();
                        for (v, x) in writes {
                            t[*v] = *x;
                        }
                        next.push((p * q, t));
                    }
                }
                outcomes = next;
            }
            let mut entries = Vec::with_capacity(outcomes.len());
            for (p, t) in outcomes {
                let id = match index.get(&t) {
                    Some(&id) => id,
                    None => {
                        let id = builder.add_state_with_valuation(state_name(&variables, &t), t.clone());
                        index.insert(t.clone(), id);
                        queue.push_back(t);
                        id
                    }
                };
                entries.push((id, p));
            }
            builder.add_transition(s, moves.clone(), Distribution::from_entries(entries));

            for (r, items) in reward_items.iter().enumerate() {
                let mut total = Rational::zero();
                for item in items {
                    let Some(reqs) = &item.requires else { continue };
                    if chosen(reqs) && item.guard.eval_bool(&vals).map_err(type_error(item.pos))? {
                        total += item.value.eval(&vals).and_then(|v| v.as_rational()).map_err(type_error(item.pos))?;
                    }
                }
                if !total.is_zero() {
                    builder.add_action_reward(reward_ids[r], s, moves.clone(), total);
                }
            }
        }
        builder.set_available(s, available);
    }
    if !exact {
        builder.set_inexact();
    }
    let constants = consts
        .into_iter()
        .map(|(k, v)| {
            let c = match v {
                Value::Bool(b) => ConstValue::Bool(b),
                Value::Int(i) => ConstValue::Int(i),
                Value::Num(r) => ConstValue::Rat(r),
            };
            (k, c)
        })
        .collect();
    Ok(builder.build()?.with_extras(variables, constants))
}

fn format_moves(ast: &ModelAst, actions: &[Vec<String>], moves: &[Move]) -> String {
    let parts: Vec<String> = moves
        .iter()
        .enumerate()
        .map(|(p, m)| match m {
            Move::Idle => format!("{}:-", ast.players[p].name),
            Move::Act(a) => actions[p][*a].clone(),
        })
        .collect();
    format!("({})", parts.join(","))
}
