//! Model loading and per-property evaluation.

use std::fmt;
use std::path::Path;
use std::sync::Arc;
use std::time::{Duration, Instant};

use csgnash::check::{evaluate, CheckError, Evaluation};
use csgnash::lang::{self, LangError};
use csgnash::logic::{parse_properties, parse_property, StateFormula};
use csgnash::model::explicit::{self, ExplicitError};
use csgnash::nash::{export_profile, verify_epsilon_ne, NashError, NashSettings, ProfileExport, Trace};
use csgnash::num::format_rational;
use csgnash::Csg;

use crate::report::{ModelStats, Outcome, PropertyRecord};

pub const EXIT_VIOLATED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_NOT_CONVERGED: i32 = 3;

/// An error that ends the run with the given exit status.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl Failure {
    pub fn usage(message: impl Into<String>) -> Self {
        Failure { code: EXIT_USAGE, message: message.into() }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

#[derive(Debug)]
pub enum LoadError {
    Io(String),
    Lang(LangError),
    Explicit(ExplicitError),
}

impl fmt::Display for LoadError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LoadError::Io(m) => f.write_str(m),
            LoadError::Lang(e) => write!(f, "{e}"),
            LoadError::Explicit(e) => write!(f, "{e}"),
        }
    }
}

impl From<LoadError> for Failure {
    fn from(e: LoadError) -> Self {
        Failure::usage(e.to_string())
    }
}

/// Builds the model and reports how long that took.
pub fn load_model(path: &Path, consts: &[(String, String)]) -> Result<(Arc<Csg>, Duration), LoadError> {
    let text = std::fs::read_to_string(path).map_err(|e| LoadError::Io(format!("{}: {e}", path.display())))?;
    let clock = Instant::now();
    let g = if path.extension().is_some_and(|e| e == "explicit") {
        if let Some((name, _)) = consts.first() {
            return Err(LoadError::Lang(LangError::UnknownConstant(name.clone())));
        }
        explicit::parse(&text).map_err(LoadError::Explicit)?
    } else {
        lang::load(&text, consts).map_err(LoadError::Lang)?
    };
    Ok((Arc::new(g), clock.elapsed()))
}

pub fn stats(g: &Csg) -> ModelStats {
    ModelStats {
        players: g.num_players(),
        states: g.num_states(),
        choices: g.num_choices(),
        transitions: g.num_transitions(),
    }
}

/// Property texts given inline and as the contents of a property file.
#[derive(Clone, Debug, Default)]
pub struct PropertySource {
    pub inline: Vec<String>,
    pub file: Option<String>,
}

impl PropertySource {
    pub fn is_empty(&self) -> bool {
        self.inline.is_empty() && self.file.is_none()
    }

    pub fn parse(&self, g: &Csg) -> Result<Vec<(String, StateFormula)>, Failure> {
        let mut out = Vec::new();
        for text in &self.inline {
            let f = parse_property(text, g).map_err(|e| Failure::usage(format!("property `{text}`: {e}")))?;
            out.push((text.trim().to_string(), f));
        }
        if let Some(file) = &self.file {
            out.extend(parse_properties(file, g).map_err(|e| Failure::usage(format!("property file: {e}")))?);
        }
        Ok(out)
    }

    /// Replaces identifier `name` by `value`; `None` if it occurs nowhere.
    pub fn substitute(&self, name: &str, value: &str) -> Option<PropertySource> {
        let mut found = false;
        let mut sub = |t: &String| match crate::sweep::substitute(t, name, value) {
            Some(s) => {
                found = true;
                s
            }
            None => t.clone(),
        };
        let inline = self.inline.iter().map(&mut sub).collect();
        let file = self.file.as_ref().map(&mut sub);
        found.then_some(PropertySource { inline, file })
    }
}

#[derive(Clone, Debug)]
pub struct Options {
    pub settings: NashSettings,
    /// Epsilon for profile verification.
    pub verify: Option<f64>,
    pub export: bool,
    pub trace: Option<String>,
}

pub struct Checked {
    pub record: PropertyRecord,
    pub export: Option<ProfileExport>,
}

fn trace_at(trace: &Trace) -> Vec<[String; 2]> {
    trace.iter().map(|it| [format_rational(&it[0].0), format_rational(&it[0].1)]).collect()
}

fn seconds(d: Duration) -> f64 {
    d.as_secs_f64()
}

fn failure(e: impl fmt::Display) -> Failure {
    Failure::usage(e.to_string())
}

/// Evaluates one property; values are reported at the first initial state,
/// satisfaction over all initial states.
pub fn check_property(g: &Arc<Csg>, text: &str, f: &StateFormula, opts: &Options) -> Result<Checked, Failure> {
    let mut settings = opts.settings.clone();
    if let Some(name) = &opts.trace {
        let s = g.state_index(name).ok_or_else(|| Failure::usage(format!("no state named `{name}`")))?;
        settings.trace = vec![s];
    }
    let initial = g.initial();
    let s0 = initial[0];
    let all = |v: &[bool]| initial.iter().all(|s| v[*s]);
    let clock = Instant::now();
    let mut export = None;
    let outcome = match evaluate(g, f, &settings) {
        Ok(Evaluation::Nash { solution, sat }) => {
            let verify = opts
                .verify
                .map(|eps| verify_epsilon_ne(&solution.profile, initial, eps))
                .transpose()
                .map_err(failure)?;
            if opts.export {
                export = Some(export_profile(&solution.profile, text, initial).map_err(failure)?);
            }
            let v = solution.at(s0);
            Outcome::Nash {
                v1: v.v1,
                v2: v.v2,
                sum: v.sum(),
                exact: solution.exact.as_ref().map(|e| [format_rational(&e[s0].0), format_rational(&e[s0].1)]),
                satisfied: sat.as_deref().map(all),
                iterations: solution.iterations,
                mdp_s: seconds(solution.mdp_time),
                csg_s: seconds(solution.csg_time),
                warnings: solution.warnings.clone(),
                verify,
                trace: trace_at(&solution.trace),
            }
        }
        Ok(Evaluation::Value(v)) => Outcome::Value { value: v[s0], time_s: seconds(clock.elapsed()) },
        Ok(Evaluation::Bool(b)) => Outcome::Bool { satisfied: all(&b), time_s: seconds(clock.elapsed()) },
        Err(CheckError::Nash(NashError::NotConverged(d))) => {
            let (last, prev) = (d.last[s0], d.previous[s0]);
            Outcome::NotConverged {
                iterations: d.iterations,
                oscillating: d.oscillating,
                v1: last.v1,
                v2: last.v2,
                previous_v1: prev.v1,
                previous_v2: prev.v2,
                warnings: d.warnings.clone(),
                trace: trace_at(&d.trace),
            }
        }
        Err(e) => return Err(Failure::usage(format!("property `{text}`: {e}"))),
    };
    let record = PropertyRecord { property: text.to_string(), state: g.state(s0).name.clone(), outcome };
    Ok(Checked { record, export })
}

/// Exit status for a set of evaluated properties.
pub fn status(records: &[PropertyRecord]) -> i32 {
    if records.iter().any(|r| matches!(r.outcome, Outcome::NotConverged { .. })) {
        EXIT_NOT_CONVERGED
    } else if records.iter().any(|r| r.outcome.violated() || r.outcome.verify_failed()) {
        EXIT_VIOLATED
    } else {
        0
    }
}
