use super::csg::{Csg, StateId};
use super::mdp::{Mdp, MdpChoice};
use super::mec::enumerate_mecs;

/// What the convergence precondition needs to know about one objective.
#[derive(Clone, Debug)]
pub enum ObjectiveTargets {
    /// Bounded horizon: nothing to check.
    Finite,
    /// Unbounded probabilistic objective.
    Probabilistic,
    /// Unbounded expected reward to reach the given states.
    Reward { targets: Vec<bool> },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Severity {
    Warning,
    Error,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    NonTerminalMec {
        states: Vec<StateId>,
    },
    /// Some profile avoids the targets of objective `objective` with
    /// positive probability from these states.
    TargetsNotAlmostSure {
        objective: usize,
        states: Vec<StateId>,
    },
}

#[derive(Clone, Debug)]
pub struct AssumptionReport {
    pub violations: Vec<Violation>,
    pub severity: Severity,
}

impl AssumptionReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn is_fatal(&self) -> bool {
        !self.passed() && self.severity == Severity::Error
    }

    pub fn describe(&self, g: &Csg) -> Vec<String> {
        let names = |states: &[StateId]| {
            let shown: Vec<&str> = states.iter().take(8).map(|s| g.state(*s).name.as_str()).collect();
            let more = if states.len() > 8 { format!(", ... ({} states)", states.len()) } else { String::new() };
            format!("{{{}{}}}", shown.join(","), more)
        };
        self.violations
            .iter()
            .map(|v| match v {
                Violation::NonTerminalMec { states } => {
                    format!("non-terminal end component {}", names(states))
                }
                Violation::TargetsNotAlmostSure { objective, states } => format!(
                    "objective {}: targets not reached with probability 1 under all profiles from {}",
                    objective + 1,
                    names(states)
                ),
            })
            .collect()
    }
}

/// Every joint move of the game as an MDP choice.
pub(crate) fn all_moves_mdp(g: &Csg) -> Mdp {
    let choices = (0..g.num_states())
        .map(|s| {
            g.choices(s).iter().enumerate().map(|(k, c)| MdpChoice { id: k, dist: c.dist.entries().to_vec() }).collect()
        })
        .collect();
    Mdp { initial: g.initial().to_vec(), choices, rewards: Vec::new() }
}

/// Checks the precondition under which value iteration is known to
/// converge: no non-terminal end components for unbounded probabilistic
/// objectives, and almost-sure target reachability under every profile for
/// unbounded reward objectives.
pub fn check_objectives(g: &Csg, objectives: &[ObjectiveTargets], strict: bool) -> AssumptionReport {
    let mut violations = Vec::new();
    if objectives.iter().any(|o| matches!(o, ObjectiveTargets::Probabilistic)) {
        for mec in enumerate_mecs(g) {
            if mec.non_terminal {
                violations.push(Violation::NonTerminalMec { states: mec.states });
            }
        }
    }
    let mut mdp = None;
    for (i, o) in objectives.iter().enumerate() {
        if let ObjectiveTargets::Reward { targets } = o {
            let mdp = mdp.get_or_insert_with(|| all_moves_mdp(g));
            let sure = crate::mdp::prob1_min_set(mdp, targets);
            let states: Vec<StateId> = (0..g.num_states()).filter(|s| !sure[*s]).collect();
            if !states.is_empty() {
                violations.push(Violation::TargetsNotAlmostSure { objective: i, states });
            }
        }
    }
    AssumptionReport { violations, severity: if strict { Severity::Error } else { Severity::Warning } }
}
