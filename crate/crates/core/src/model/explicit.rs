//! Plain-text explicit-state format.
//!
//! ```text
//! // comment
//! players p1 p2
//! actions p1 c s
//! actions p2 a
//! state s0 init {goal}
//! state s1
//! s0 (c,-) -> 1/2:s0 + 1/2:s1
//! s0 (s,-) -> s1
//! rewards r1
//!   value s0 1
//!   action s0 (c,-) 1/3
//! endrewards
//! ```
//!
//! `-` (or `⊥`) is the idle move. States without transitions get an idle
//! self-loop.

use std::collections::{BTreeSet, HashMap};
use std::fmt::Write as _;

use thiserror::Error;

use super::csg::{Csg, CsgBuilder, Distribution, Move, Player, StateId};
use super::ModelError;
use crate::num::{self, Rational};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ExplicitError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error(transparent)]
    Model(#[from] ModelError),
}

fn syntax(line: usize, message: impl Into<String>) -> ExplicitError {
    ExplicitError::Syntax { line, message: message.into() }
}

pub fn parse(text: &str) -> Result<Csg, ExplicitError> {
    let mut player_names: Vec<String> = Vec::new();
    let mut alphabets: HashMap<String, Vec<String>> = HashMap::new();
    let mut builder: Option<CsgBuilder> = None;
    let mut states: HashMap<String, StateId> = HashMap::new();
    let mut has_transition: Vec<bool> = Vec::new();
    let mut reward: Option<usize> = None;
    let mut inexact = false;

    for (lineno, raw) in text.lines().enumerate() {
        let line_no = lineno + 1;
        let line = raw.split("//").next().unwrap().trim();
        if line.is_empty() {
            continue;
        }
        let mut words = line.split_whitespace();
        let head = words.next().unwrap();
        match head {
            "players" if builder.is_none() => {
                player_names = words.map(str::to_string).collect();
                if player_names.is_empty() {
                    return Err(syntax(line_no, "no players"));
                }
            }
            "actions" if builder.is_none() => {
                let p = words.next().ok_or_else(|| syntax(line_no, "missing player"))?;
                if !player_names.iter().any(|n| n == p) {
                    return Err(syntax(line_no, format!("unknown player `{p}`")));
                }
                alphabets.insert(p.to_string(), words.map(str::to_string).collect());
            }
            "state" if reward.is_none() => {
                if builder.is_none() {
                    let players = player_names
                        .iter()
                        .map(|p| Player { name: p.clone(), actions: alphabets.get(p).cloned().unwrap_or_default() })
                        .collect();
                    builder = Some(CsgBuilder::new(players));
                }
                let b = builder.as_mut().unwrap();
                let rest = line["state".len()..].trim();
                let (head, labels) = match rest.find('{') {
                    Some(pos) => {
                        let close = rest.rfind('}').ok_or_else(|| syntax(line_no, "missing `}`"))?;
                        (&rest[..pos], &rest[pos + 1..close])
                    }
                    None => (rest, ""),
                };
                let mut parts = head.split_whitespace();
                let name = parts.next().ok_or_else(|| syntax(line_no, "missing state name"))?;
                if states.contains_key(name) {
                    return Err(syntax(line_no, format!("duplicate state `{name}`")));
                }
                let s = b.add_state(name);
                states.insert(name.to_string(), s);
                has_transition.push(false);
                for flag in parts {
                    match flag {
                        "init" => b.set_initial(s),
                        other => return Err(syntax(line_no, format!("unexpected `{other}`"))),
                    }
                }
                for l in labels.split(',').map(str::trim).filter(|l| !l.is_empty()) {
                    b.add_label(l, s);
                }
            }
            "label" => {
                let b = builder.as_mut().ok_or_else(|| syntax(line_no, "label before states"))?;
                for name in words {
                    b.declare_label(name);
                }
            }
            "rewards" => {
                let b = builder.as_mut().ok_or_else(|| syntax(line_no, "rewards before states"))?;
                let name = words.next().ok_or_else(|| syntax(line_no, "missing reward name"))?;
                reward = Some(b.add_reward_structure(name.trim_matches('"')));
            }
            "endrewards" => reward = None,
            _ if reward.is_some() => {
                let b = builder.as_mut().unwrap();
                let r = reward.unwrap();
                if head == "action" {
                    let rest = line["action".len()..].trim();
                    let (state, moves, value) = split_moves(rest, line_no)?;
                    let s = lookup(&states, state, line_no)?;
                    let moves = parse_moves(moves, &player_names, &alphabets, line_no)?;
                    let v = parse_value(value.trim(), line_no, &mut inexact)?;
                    b.add_action_reward(r, s, moves, v);
                } else if head == "value" {
                    let s = lookup(&states, words.next().unwrap_or(""), line_no)?;
                    let v = parse_value(words.next().unwrap_or(""), line_no, &mut inexact)?;
                    b.add_state_reward(r, s, v);
                } else {
                    return Err(syntax(line_no, format!("unexpected `{head}` in rewards section")));
                }
            }
            _ => {
                let b = builder.as_mut().ok_or_else(|| syntax(line_no, "transition before states"))?;
                let (state, moves, rest) = split_moves(line, line_no)?;
                let s = lookup(&states, state, line_no)?;
                let moves = parse_moves(moves, &player_names, &alphabets, line_no)?;
                let rest = rest.trim().strip_prefix("->").ok_or_else(|| syntax(line_no, "expected `->`"))?;
                let mut entries = Vec::new();
                for term in rest.split('+') {
                    let term = term.trim();
                    let (p, t) = match term.split_once(':') {
                        Some((p, t)) => (parse_value(p.trim(), line_no, &mut inexact)?, t.trim()),
                        None => (num::int(1), term),
                    };
                    entries.push((lookup(&states, t, line_no)?, p));
                }
                b.add_transition(s, moves, Distribution::from_entries(entries));
                has_transition[s] = true;
            }
        }
    }
    let mut b = builder.ok_or_else(|| syntax(0, "no states"))?;
    if inexact {
        b.set_inexact();
    }
    let n = player_names.len();
    for (s, has) in has_transition.iter().enumerate() {
        if !has {
            b.add_transition(s, vec![Move::Idle; n], Distribution::dirac(s));
        }
    }
    Ok(b.build()?)
}

fn split_moves(line: &str, line_no: usize) -> Result<(&str, &str, &str), ExplicitError> {
    let open = line.find('(').ok_or_else(|| syntax(line_no, "expected `(`"))?;
    let close = line[open..].find(')').ok_or_else(|| syntax(line_no, "expected `)`"))? + open;
    Ok((line[..open].trim(), &line[open + 1..close], &line[close + 1..]))
}

fn lookup(states: &HashMap<String, StateId>, name: &str, line_no: usize) -> Result<StateId, ExplicitError> {
    states.get(name).copied().ok_or_else(|| syntax(line_no, format!("unknown state `{name}`")))
}

fn parse_value(text: &str, line_no: usize, inexact: &mut bool) -> Result<Rational, ExplicitError> {
    if text.contains(['e', 'E']) {
        *inexact = true;
    }
    num::parse_rational(text).ok_or_else(|| syntax(line_no, format!("bad number `{text}`")))
}

fn parse_moves(
    text: &str,
    players: &[String],
    alphabets: &HashMap<String, Vec<String>>,
    line_no: usize,
) -> Result<Vec<Move>, ExplicitError> {
    let parts: Vec<&str> = text.split(',').map(str::trim).collect();
    if parts.len() != players.len() {
        return Err(syntax(line_no, format!("expected {} moves", players.len())));
    }
    parts
        .iter()
        .zip(players)
        .map(|(m, p)| {
            if *m == "-" || *m == "⊥" {
                return Ok(Move::Idle);
            }
            alphabets
                .get(p)
                .and_then(|a| a.iter().position(|x| x == m))
                .map(Move::Act)
                .ok_or_else(|| syntax(line_no, format!("`{m}` is not an action of {p}")))
        })
        .collect()
}

fn is_token(name: &str) -> bool {
    !name.is_empty() && name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_')
}

pub fn export(g: &Csg) -> String {
    let names: Vec<String> = {
        let raw: Vec<&str> = g.states().iter().map(|s| s.name.as_str()).collect();
        let unique = raw.iter().collect::<BTreeSet<_>>().len() == raw.len();
        let keywords = ["players", "actions", "state", "label", "rewards", "endrewards", "action", "value"];
        if unique && raw.iter().all(|n| is_token(n) && !keywords.contains(n)) {
            raw.iter().map(|s| s.to_string()).collect()
        } else {
            (0..g.num_states()).map(|i| format!("s{i}")).collect()
        }
    };
    let mut out = String::new();
    let players: Vec<&str> = g.players().iter().map(|p| p.name.as_str()).collect();
    writeln!(out, "players {}", players.join(" ")).unwrap();
    for p in g.players() {
        writeln!(out, "actions {} {}", p.name, p.actions.join(" ")).unwrap();
    }
    for (s, name) in names.iter().enumerate() {
        let init = if g.initial().contains(&s) { " init" } else { "" };
        writeln!(out, "state {name}{init} {{{}}}", g.state_labels(s).join(",")).unwrap();
    }
    let empty: Vec<&str> = g.labels().iter().filter(|(_, v)| !v.iter().any(|b| *b)).map(|(k, _)| k.as_str()).collect();
    if !empty.is_empty() {
        writeln!(out, "label {}", empty.join(" ")).unwrap();
    }
    let moves_text = |moves: &[Move]| {
        let parts: Vec<&str> = moves.iter().zip(g.players()).map(|(m, p)| p.move_name(*m)).collect();
        parts.join(",")
    };
    for (s, name) in names.iter().enumerate() {
        for c in g.choices(s) {
            let terms: Vec<String> =
                c.dist.entries().iter().map(|(t, p)| format!("{}:{}", num::format_rational(p), names[*t])).collect();
            writeln!(out, "{name} ({}) -> {}", moves_text(&c.moves), terms.join(" + ")).unwrap();
        }
    }
    for r in g.rewards() {
        writeln!(out, "rewards {}", r.name).unwrap();
        for (s, v) in r.state.iter().enumerate() {
            if !num_traits::Zero::is_zero(v) {
                writeln!(out, "  value {} {}", names[s], num::format_rational(v)).unwrap();
            }
        }
        for (s, vals) in r.action.iter().enumerate() {
            for (k, v) in vals.iter().enumerate() {
                if !num_traits::Zero::is_zero(v) {
                    let moves = &g.choices(s)[k].moves;
                    writeln!(out, "  action {} ({}) {}", names[s], moves_text(moves), num::format_rational(v)).unwrap();
                }
            }
        }
        writeln!(out, "endrewards").unwrap();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::num::rat;

    const SAMPLE: &str = "\
players p1 p2
actions p1 c s
actions p2 a
state s0 init {start}
state s1 {goal, done}
state s2
s0 (c,-) -> 1/2:s0 + 1/2:s1
s0 (s,-) -> s2
rewards r
  value s0 1
  action s0 (c,-) 1/3
endrewards
";

    #[test]
    fn parses_sample() {
        let g = parse(SAMPLE).unwrap();
        assert_eq!(g.num_states(), 3);
        assert_eq!(g.num_players(), 2);
        assert_eq!(g.choices(0).len(), 2);
        assert_eq!(g.choices(0)[0].dist.prob(1), rat(1, 2));
        assert_eq!(g.label("goal").unwrap(), &[false, true, false]);
        assert_eq!(g.rewards()[0].action[0][0], rat(1, 3));
        assert_eq!(g.rewards()[0].state[0], rat(1, 1));
        // s1 and s2 get idle self-loops
        assert_eq!(g.choices(1)[0].moves, vec![Move::Idle, Move::Idle]);
    }

    #[test]
    fn export_round_trips() {
        let g = parse(SAMPLE).unwrap();
        let text = export(&g);
        let h = parse(&text).unwrap();
        assert_eq!(export(&h), text);
    }

    #[test]
    fn reports_line_of_error() {
        let err = parse("players p1\nactions p1 a\nstate s0 init\ns0 (b) -> s0\n").unwrap_err();
        assert!(matches!(err, ExplicitError::Syntax { line: 4, .. }));
    }
}
