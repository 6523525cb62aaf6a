//! Two-player normal-form games given as payoff matrices.

use std::io::{self, Write};
use std::path::Path;

use csgnash::bimatrix::{select_swne, solve_all, BimatrixGame, MixedProfile};
use csgnash::num::{format_rational, parse_rational, Rational};
use serde::{Deserialize, Serialize};

/// Reads a CSV file if `arg` names one, otherwise inline rows separated by
/// `;` with entries separated by commas or spaces. Entries may be
/// integers, decimals or fractions.
pub fn parse_matrix(arg: &str) -> Result<Vec<Vec<Rational>>, String> {
    let text = if Path::new(arg).is_file() {
        std::fs::read_to_string(arg).map_err(|e| format!("{arg}: {e}"))?
    } else {
        arg.replace(';', "\n")
    };
    let mut rows = Vec::new();
    for line in text.lines() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let row = line
            .split([',', ' ', '\t'])
            .filter(|t| !t.is_empty())
            .map(|t| parse_rational(t).ok_or_else(|| format!("not a number: `{t}`")))
            .collect::<Result<Vec<_>, _>>()?;
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(format!("empty matrix `{arg}`"));
    }
    Ok(rows)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NfgProfile {
    pub x: Vec<String>,
    pub y: Vec<String>,
    pub u: String,
    pub v: String,
}

impl From<&MixedProfile<Rational>> for NfgProfile {
    fn from(p: &MixedProfile<Rational>) -> Self {
        let show = |v: &[Rational]| v.iter().map(format_rational).collect();
        NfgProfile { x: show(&p.x), y: show(&p.y), u: format_rational(&p.u), v: format_rational(&p.v) }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NfgReport {
    pub equilibria: Vec<NfgProfile>,
    pub swne: NfgProfile,
    pub swne_sum: String,
}

pub fn solve(z1: Vec<Vec<Rational>>, z2: Vec<Vec<Rational>>) -> Result<NfgReport, String> {
    let game = BimatrixGame::new(z1, z2).map_err(|e| e.to_string())?;
    let all = solve_all(&game).map_err(|e| e.to_string())?;
    let swne = select_swne(all.clone()).map_err(|e| e.to_string())?;
    Ok(NfgReport {
        equilibria: all.iter().map(NfgProfile::from).collect(),
        swne_sum: format_rational(&(&swne.u + &swne.v)),
        swne: NfgProfile::from(&swne),
    })
}

fn line(p: &NfgProfile) -> String {
    format!("x=({}) y=({}) values=({}, {})", p.x.join(", "), p.y.join(", "), p.u, p.v)
}

pub fn write_human(out: &mut impl Write, r: &NfgReport) -> io::Result<()> {
    writeln!(out, "Equilibria: {}", r.equilibria.len())?;
    for (i, p) in r.equilibria.iter().enumerate() {
        writeln!(out, "  {}: {}", i + 1, line(p))?;
    }
    writeln!(out, "SWNE: {} sum={}", line(&r.swne), r.swne_sum)
}

pub fn write_csv(out: impl Write, r: &NfgReport) -> io::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["index", "x", "y", "u", "v", "swne"])?;
    for (i, p) in r.equilibria.iter().enumerate() {
        let swne = (*p == r.swne).to_string();
        w.write_record([(i + 1).to_string(), p.x.join(" "), p.y.join(" "), p.u.clone(), p.v.clone(), swne])?;
    }
    w.flush()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inline_and_fractional_entries() {
        let m = parse_matrix("1, 1/2; -3 0.25").unwrap();
        assert_eq!(m.len(), 2);
        assert_eq!(format_rational(&m[0][1]), "1/2");
        assert_eq!(format_rational(&m[1][1]), "1/4");
        assert!(parse_matrix("1,x").is_err());
        assert!(parse_matrix(" ; ").is_err());
    }

    #[test]
    fn ragged_matrices_are_rejected() {
        let z = parse_matrix("1,2;3").unwrap();
        assert!(solve(z.clone(), z).is_err());
    }
}
