//! Parameter sweeps over a model constant or a property identifier.

use std::io::{self, Write};

use csgnash::lang::LangError;
use csgnash::num::{self, format_rational, parse_rational, Rational};
use num_traits::{One, Signed};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::args::CheckArgs;
use crate::report::Outcome;
use crate::run::{check_property, load_model, status, Failure, LoadError, Options, PropertySource};

#[derive(Clone, Debug, PartialEq)]
pub struct SweepRange {
    pub name: String,
    pub values: Vec<String>,
}

fn show(r: &Rational) -> String {
    if r.is_integer() {
        format_rational(r)
    } else {
        num::to_f64(r).to_string()
    }
}

/// `NAME=LO..HI[:STEP]`, inclusive of `HI`; the step defaults to 1.
pub fn parse_range(s: &str) -> Result<SweepRange, String> {
    let (name, range) = s.split_once('=').ok_or_else(|| format!("expected NAME=LO..HI[:STEP], got `{s}`"))?;
    let (bounds, step) = match range.split_once(':') {
        Some((b, st)) => (b, Some(st)),
        None => (range, None),
    };
    let (lo, hi) = bounds.split_once("..").ok_or_else(|| format!("expected LO..HI in `{range}`"))?;
    let number = |t: &str| parse_rational(t).ok_or_else(|| format!("not a number: `{t}`"));
    let (lo, hi) = (number(lo)?, number(hi)?);
    let step = match step {
        Some(t) => number(t)?,
        None => Rational::one(),
    };
    if !step.is_positive() {
        return Err("sweep step must be positive".into());
    }
    if hi < lo {
        return Err(format!("empty sweep range `{range}`"));
    }
    let mut values = Vec::new();
    let mut x = lo;
    while x <= hi {
        values.push(show(&x));
        x += &step;
    }
    let name = name.trim();
    if name.is_empty() {
        return Err("missing sweep parameter name".into());
    }
    Ok(SweepRange { name: name.to_string(), values })
}

/// Replaces whole identifiers equal to `name` outside quoted labels;
/// `None` if there are none.
pub fn substitute(text: &str, name: &str, value: &str) -> Option<String> {
    let mut out = String::with_capacity(text.len());
    let mut found = false;
    let mut quoted = false;
    let mut chars = text.char_indices().peekable();
    while let Some((i, c)) = chars.next() {
        if c == '"' {
            quoted = !quoted;
            out.push(c);
        } else if !quoted && (c.is_ascii_alphabetic() || c == '_') {
            let mut end = i + c.len_utf8();
            while let Some(&(j, d)) = chars.peek() {
                if d.is_ascii_alphanumeric() || d == '_' {
                    end = j + d.len_utf8();
                    chars.next();
                } else {
                    break;
                }
            }
            let ident = &text[i..end];
            if ident == name {
                out.push_str(value);
                found = true;
            } else {
                out.push_str(ident);
            }
        } else {
            out.push(c);
        }
    }
    found.then_some(out)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub value: String,
    pub property: String,
    pub v1: Option<f64>,
    pub v2: Option<f64>,
    pub sum: Option<f64>,
    pub satisfied: Option<bool>,
    pub iterations: Option<usize>,
    /// Construction plus evaluation.
    pub time_s: f64,
    pub status: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub parameter: String,
    pub rows: Vec<SweepRow>,
}

fn row(value: &str, property: &str, outcome: &Outcome, time_s: f64) -> SweepRow {
    let base = SweepRow {
        value: value.to_string(),
        property: property.to_string(),
        v1: None,
        v2: None,
        sum: None,
        satisfied: None,
        iterations: None,
        time_s,
        status: "ok".into(),
    };
    match outcome {
        Outcome::Nash { v1, v2, sum, satisfied, iterations, .. } => SweepRow {
            v1: Some(*v1),
            v2: Some(*v2),
            sum: Some(*sum),
            satisfied: *satisfied,
            iterations: Some(*iterations),
            ..base
        },
        Outcome::Value { value, .. } => SweepRow { sum: Some(*value), ..base },
        Outcome::Bool { satisfied, .. } => SweepRow { satisfied: Some(*satisfied), ..base },
        Outcome::NotConverged { v1, v2, iterations, .. } => SweepRow {
            v1: Some(*v1),
            v2: Some(*v2),
            sum: Some(v1 + v2),
            iterations: Some(*iterations),
            status: "not_converged".into(),
            ..base
        },
    }
}

fn point(
    args: &CheckArgs,
    range: &SweepRange,
    value: &str,
    source: &PropertySource,
    opts: &Options,
) -> Result<(Vec<SweepRow>, i32), Failure> {
    let path = args.model.as_deref().expect("model is required");
    let mut consts = args.consts.clone();
    consts.push((range.name.clone(), value.to_string()));
    let clock = std::time::Instant::now();
    let (g, source) = match load_model(path, &consts) {
        Ok((g, _)) => (g, source.clone()),
        Err(LoadError::Lang(LangError::UnknownConstant(n))) if n == range.name => {
            let source = source
                .substitute(&range.name, value)
                .ok_or_else(|| Failure::usage(format!("no constant or property identifier named `{}`", range.name)))?;
            (load_model(path, &args.consts)?.0, source)
        }
        Err(e) => return Err(e.into()),
    };
    let mut rows = Vec::new();
    let mut records = Vec::new();
    for (text, f) in source.parse(&g)? {
        let checked = check_property(&g, &text, &f, opts)?;
        rows.push(row(value, &text, &checked.record.outcome, clock.elapsed().as_secs_f64()));
        records.push(checked.record);
    }
    Ok((rows, status(&records)))
}

/// Evaluates every property at every sweep value, points in parallel.
pub fn run(
    args: &CheckArgs,
    range: &SweepRange,
    source: &PropertySource,
    opts: &Options,
) -> Result<(SweepReport, i32), Failure> {
    let points: Vec<(Vec<SweepRow>, i32)> =
        range.values.par_iter().map(|v| point(args, range, v, source, opts)).collect::<Result<_, _>>()?;
    let code = points.iter().map(|p| p.1).max_by_key(|c| (*c == crate::run::EXIT_NOT_CONVERGED, *c)).unwrap_or(0);
    let rows = points.into_iter().flat_map(|p| p.0).collect();
    Ok((SweepReport { parameter: range.name.clone(), rows }, code))
}

pub fn write_csv(out: impl Write, r: &SweepReport) -> io::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        r.parameter.as_str(),
        "property",
        "v1",
        "v2",
        "sum",
        "satisfied",
        "iterations",
        "time_s",
        "status",
    ])?;
    let opt = |x: Option<f64>| x.map(|v| format!("{v:?}")).unwrap_or_default();
    for row in &r.rows {
        w.write_record([
            row.value.clone(),
            row.property.clone(),
            opt(row.v1),
            opt(row.v2),
            opt(row.sum),
            row.satisfied.map(|b| b.to_string()).unwrap_or_default(),
            row.iterations.map(|i| i.to_string()).unwrap_or_default(),
            format!("{:.6}", row.time_s),
            row.status.clone(),
        ])?;
    }
    w.flush()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn ranges() {
        assert_eq!(parse_range("k=4..9").unwrap().values, ["4", "5", "6", "7", "8", "9"]);
        assert_eq!(parse_range("q2=0.25..0.75:0.25").unwrap().values, ["0.25", "0.5", "0.75"]);
        assert_eq!(parse_range("q=0.1..0.3:0.1").unwrap().values, ["0.1", "0.2", "0.3"]);
        assert_eq!(parse_range("x=3..3").unwrap().values, ["3"]);
        assert!(parse_range("x=3..2").is_err());
        assert!(parse_range("x=1..2:0").is_err());
        assert!(parse_range("x=1,2").is_err());
        assert!(parse_range("=1..2").is_err());
    }

    #[test]
    fn substitution_respects_identifiers_and_labels() {
        let p = "<<p1:p2>>max=? (P[F<=k \"k\"] + P[F<=k kk=k])";
        assert_eq!(substitute(p, "k", "5").unwrap(), "<<p1:p2>>max=? (P[F<=5 \"k\"] + P[F<=5 kk=5])");
        assert_eq!(substitute(p, "q", "5"), None);
    }

    proptest! {
        #[test]
        fn integer_ranges_have_expected_length(lo in -50i64..50, len in 0i64..40, step in 1i64..5) {
            let hi = lo + len;
            let r = parse_range(&format!("n={lo}..{hi}:{step}")).unwrap();
            prop_assert_eq!(r.values.len() as i64, len / step + 1);
            prop_assert_eq!(r.values[0].clone(), lo.to_string());
        }

        #[test]
        fn substituting_an_absent_name_changes_nothing(text in "[a-z <>=()\\[\\]\"+]{0,40}") {
            let out = substitute(&text, "ZZ", "1");
            prop_assert!(out.is_none());
        }
    }
}
