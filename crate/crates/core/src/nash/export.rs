//! JSON-shaped strategy export. One entry per `(state, memory)` pair reachable
//! under the profile: mixed choices of both coalitions while both objectives
//! are pending, a joint action otherwise.

use serde::{Deserialize, Serialize};

use super::synthesis::{Mode, Profile};
use super::NashError;
use crate::model::{induce_chain, CoalitionStrategy, Side, StateId};
use crate::num;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeightedAction {
    pub action: String,
    pub prob: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ExportEntry {
    Mixed {
        state: String,
        mode: Mode,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        step: Option<usize>,
        x: Vec<WeightedAction>,
        y: Vec<WeightedAction>,
    },
    Joint {
        state: String,
        mode: Mode,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        step: Option<usize>,
        action: String,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProfileExport {
    pub query: String,
    pub coalitions: [Vec<String>; 2],
    pub stepped: bool,
    pub modes: Vec<Mode>,
    pub entries: Vec<ExportEntry>,
}

pub fn export_profile(profile: &Profile, query: &str, starts: &[StateId]) -> Result<ProfileExport, NashError> {
    let cg = profile.game();
    let g = cg.base();
    let names = |ps: &[usize]| ps.iter().map(|p| g.players()[*p].name.clone()).collect::<Vec<_>>();
    let starts: Vec<StateId> = starts.iter().map(|s| profile.embedding()[*s]).collect();
    let chain = induce_chain(cg, profile, &starts)?;
    let mut entries = Vec::with_capacity(chain.product.len());
    for &(s, memory) in &chain.product {
        let (mode, step) = profile.decode(memory);
        let step = profile.is_stepped().then_some(step);
        let state = g.state(s).name.clone();
        let first = profile.decide(Side::First, s, memory).unwrap_or_default();
        let second = profile.decide(Side::Second, s, memory).unwrap_or_default();
        if mode == Mode::BothPending {
            let weigh = |dist: &[(usize, num::Rational)], side_first: bool| {
                dist.iter()
                    .map(|(i, p)| WeightedAction {
                        action: cg.format_local(s, side_first, *i),
                        prob: num::format_rational(p),
                    })
                    .collect()
            };
            entries.push(ExportEntry::Mixed { state, mode, step, x: weigh(&first, true), y: weigh(&second, false) });
        } else {
            let (r, c) = (first.first().map_or(0, |d| d.0), second.first().map_or(0, |d| d.0));
            let k = cg.choice_index(s, r, c);
            entries.push(ExportEntry::Joint { state, mode, step, action: g.format_moves(&g.choices(s)[k].moves) });
        }
    }
    Ok(ProfileExport {
        query: query.to_string(),
        coalitions: [names(cg.coalition()), names(cg.opponents())],
        stepped: profile.is_stepped(),
        modes: vec![Mode::BothPending, Mode::Target1Done, Mode::Target2Done, Mode::Done],
        entries,
    })
}
