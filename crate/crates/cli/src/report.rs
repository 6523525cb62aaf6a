//! Result records and their human, JSON and CSV renderings.

use std::io::{self, Write};

use csgnash::nash::VerifyReport;
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelStats {
    pub players: usize,
    pub states: usize,
    pub choices: usize,
    pub transitions: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub model: String,
    pub constants: Vec<(String, String)>,
    pub stats: ModelStats,
    /// Model construction time in seconds.
    pub constr_s: f64,
    pub results: Vec<PropertyRecord>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PropertyRecord {
    pub property: String,
    /// Initial state the values refer to.
    pub state: String,
    pub outcome: Outcome,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Outcome {
    Nash {
        v1: f64,
        v2: f64,
        sum: f64,
        /// Exact values as `p/q` strings when computed in rationals.
        exact: Option<[String; 2]>,
        /// Threshold queries only.
        satisfied: Option<bool>,
        iterations: usize,
        mdp_s: f64,
        csg_s: f64,
        warnings: Vec<String>,
        verify: Option<VerifyReport>,
        trace: Vec<[String; 2]>,
    },
    Value {
        value: f64,
        time_s: f64,
    },
    Bool {
        satisfied: bool,
        time_s: f64,
    },
    NotConverged {
        iterations: usize,
        oscillating: bool,
        v1: f64,
        v2: f64,
        previous_v1: f64,
        previous_v2: f64,
        warnings: Vec<String>,
        trace: Vec<[String; 2]>,
    },
}

impl Outcome {
    /// Whether a threshold query failed at the reported state.
    pub fn violated(&self) -> bool {
        matches!(self, Outcome::Nash { satisfied: Some(false), .. } | Outcome::Bool { satisfied: false, .. })
    }

    pub fn verify_failed(&self) -> bool {
        matches!(self, Outcome::Nash { verify: Some(r), .. } if !r.pass)
    }
}

/// `sum=2.0 v1=1.0 v2=1.0`
pub fn value_line(v1: f64, v2: f64) -> String {
    format!("sum={:?} v1={:?} v2={:?}", v1 + v2, v1, v2)
}

fn secs(t: f64) -> String {
    format!("{t:.3} s")
}

pub fn write_human(out: &mut impl Write, r: &Report) -> io::Result<()> {
    writeln!(out, "Model: {}", r.model)?;
    if !r.constants.is_empty() {
        let c: Vec<String> = r.constants.iter().map(|(n, v)| format!("{n}={v}")).collect();
        writeln!(out, "Constants: {}", c.join(", "))?;
    }
    let s = &r.stats;
    writeln!(
        out,
        "States: {}, choices: {}, transitions: {}, players: {}",
        s.states, s.choices, s.transitions, s.players
    )?;
    writeln!(out, "Time for model construction: {}", secs(r.constr_s))?;
    for p in &r.results {
        writeln!(out)?;
        write_record(out, p)?;
    }
    Ok(())
}

fn write_trace(out: &mut impl Write, trace: &[[String; 2]]) -> io::Result<()> {
    for (i, [a, b]) in trace.iter().enumerate() {
        writeln!(out, "  iteration {}: ({a}, {b})", i + 1)?;
    }
    Ok(())
}

fn write_record(out: &mut impl Write, p: &PropertyRecord) -> io::Result<()> {
    writeln!(out, "Property: {}", p.property)?;
    match &p.outcome {
        Outcome::Nash { v1, v2, exact, satisfied, iterations, mdp_s, csg_s, warnings, verify, trace, .. } => {
            for w in warnings {
                writeln!(out, "Warning: {w}")?;
            }
            writeln!(out, "Result ({}): {}", p.state, value_line(*v1, *v2))?;
            if let Some([a, b]) = exact {
                writeln!(out, "Exact: v1={a} v2={b}")?;
            }
            if let Some(sat) = satisfied {
                writeln!(out, "Satisfied: {sat}")?;
            }
            writeln!(out, "Iterations: {iterations}")?;
            writeln!(out, "Time: MDP {}, CSG {}", secs(*mdp_s), secs(*csg_s))?;
            if let Some(v) = verify {
                let verdict = if v.pass { "pass" } else { "FAIL" };
                writeln!(out, "Verify (epsilon={}): gap1={:e} gap2={:e} {verdict}", v.epsilon, v.gap1, v.gap2)?;
            }
            if !trace.is_empty() {
                writeln!(out, "Trace:")?;
                write_trace(out, trace)?;
            }
        }
        Outcome::Value { value, time_s } => {
            writeln!(out, "Result ({}): {value:?}", p.state)?;
            writeln!(out, "Time: {}", secs(*time_s))?;
        }
        Outcome::Bool { satisfied, time_s } => {
            writeln!(out, "Result ({}): {satisfied}", p.state)?;
            writeln!(out, "Time: {}", secs(*time_s))?;
        }
        Outcome::NotConverged { iterations, oscillating, v1, v2, previous_v1, previous_v2, warnings, trace } => {
            for w in warnings {
                writeln!(out, "Warning: {w}")?;
            }
            let why = if *oscillating { " (individual values oscillate with period 2)" } else { "" };
            writeln!(out, "Result ({}): not converged after {iterations} iterations{why}", p.state)?;
            writeln!(out, "Last: {}", value_line(*v1, *v2))?;
            writeln!(out, "Previous: {}", value_line(*previous_v1, *previous_v2))?;
            if !trace.is_empty() {
                writeln!(out, "Trace:")?;
                write_trace(out, trace)?;
            }
        }
    }
    Ok(())
}

#[derive(Serialize)]
struct CsvRow<'a> {
    property: &'a str,
    state: &'a str,
    kind: &'a str,
    v1: Option<f64>,
    v2: Option<f64>,
    sum: Option<f64>,
    value: Option<f64>,
    satisfied: Option<bool>,
    iterations: Option<usize>,
    constr_s: f64,
    mdp_s: Option<f64>,
    csg_s: Option<f64>,
    time_s: Option<f64>,
}

pub fn write_csv(out: impl Write, r: &Report) -> io::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for p in &r.results {
        let mut row = CsvRow {
            property: &p.property,
            state: &p.state,
            kind: "",
            v1: None,
            v2: None,
            sum: None,
            value: None,
            satisfied: None,
            iterations: None,
            constr_s: r.constr_s,
            mdp_s: None,
            csg_s: None,
            time_s: None,
        };
        match &p.outcome {
            Outcome::Nash { v1, v2, sum, satisfied, iterations, mdp_s, csg_s, .. } => {
                row = CsvRow {
                    kind: "nash",
                    v1: Some(*v1),
                    v2: Some(*v2),
                    sum: Some(*sum),
                    satisfied: *satisfied,
                    iterations: Some(*iterations),
                    mdp_s: Some(*mdp_s),
                    csg_s: Some(*csg_s),
                    ..row
                }
            }
            Outcome::Value { value, time_s } => {
                row = CsvRow { kind: "value", value: Some(*value), time_s: Some(*time_s), ..row }
            }
            Outcome::Bool { satisfied, time_s } => {
                row = CsvRow { kind: "bool", satisfied: Some(*satisfied), time_s: Some(*time_s), ..row }
            }
            Outcome::NotConverged { iterations, v1, v2, .. } => {
                row = CsvRow {
                    kind: "not_converged",
                    v1: Some(*v1),
                    v2: Some(*v2),
                    sum: Some(v1 + v2),
                    iterations: Some(*iterations),
                    ..row
                }
            }
        }
        w.serialize(row)?;
    }
    w.flush()
}

pub fn write_json(out: impl Write, value: &impl Serialize) -> io::Result<()> {
    let mut out = out;
    serde_json::to_writer_pretty(&mut out, value)?;
    writeln!(out)
}
